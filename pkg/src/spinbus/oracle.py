"""Brute-force verification backend: truncated-Fock evolution of single
damped modes under spin-conditional drive with instantaneous spin flips.

The system Hamiltonian is spin-diagonal between pulses, so the joint spin+
mode state never needs to be formed. For a pair of spin branch values
(s, s') the coherence block B = <s| rho |s'> obeys the closed linear equation

    dB/dt = -i (H_s B - B H_s') + gamma (N+1) D[a] B + gamma N D[a*] B,

with H_s = w a*a + (lam_n f(t) s / 2)(a + a*) and the dissipator acting with
ladder shifts. Tr B(t_g) is the spin coherence factor: |Tr B| = e^{-F_n} for
(s, s') = (+1, -1), arg Tr B the geometric phase for (1, 0). Branch density
matrices are the diagonal case s' = s.

Everything here is deliberately independent of the quadrature pipeline: a
fixed-step RK4 integrator, ladder-operator shift arithmetic, and closed-form
displaced-thermal overlaps for the undamped case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import TWO_PI
from .errors import PhysicsDomainError
from .layout import Layout
from .pulses import PulseSequence

TAIL_LIMIT = 1e-8
MAX_BRUTE_SITES = 400


@dataclass(frozen=True)
class TruncatedMode:
    """One collective mode in a Fock space truncated at ``dim`` levels."""

    dim: int
    omega_n: float
    lambda_n: float              # drive amplitude lam_n (eta_n * omega_n)
    gamma_n: float = 0.0
    bath_occupation: float = 0.0
    initial_occupation: float = 0.0

    def __post_init__(self):
        if self.dim < 4:
            raise PhysicsDomainError("Fock dimension must be at least 4")
        if self.omega_n <= 0.0:
            raise PhysicsDomainError("omega_n must be positive")
        if self.gamma_n < 0.0 or self.bath_occupation < 0.0 \
                or self.initial_occupation < 0.0:
            raise PhysicsDomainError("rates and occupations must be >= 0")

    @property
    def eta_n(self) -> float:
        return self.lambda_n / self.omega_n


def thermal_density(dim: int, occupation: float) -> np.ndarray:
    """Truncated thermal state diag(p_k), p_k = N^k / (N+1)^{k+1}."""
    if occupation == 0.0:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    k = np.arange(dim)
    p = np.exp(k * math.log(occupation) - (k + 1) * math.log(occupation + 1.0))
    return np.diag(p.astype(complex))


class _Lindblad:
    """RHS of the two-sided generator for one branch pair (s, s')."""

    def __init__(self, mode: TruncatedMode, s: float, s_prime: float):
        d = mode.dim
        self.mode = mode
        self.s = s
        self.s_prime = s_prime
        self.n_diag = np.arange(d, dtype=float)
        self.sq = np.sqrt(np.arange(1, d, dtype=float))   # sqrt(1..d-1)
        self.gamma_down = mode.gamma_n * (mode.bath_occupation + 1.0)
        self.gamma_up = mode.gamma_n * mode.bath_occupation

    # ladder arithmetic: rows index a-action from the left, columns from the
    # right; all O(dim^2) slice operations.
    def _a_left(self, B):
        out = np.zeros_like(B)
        out[:-1, :] = self.sq[:, None] * B[1:, :]
        return out

    def _adag_left(self, B):
        out = np.zeros_like(B)
        out[1:, :] = self.sq[:, None] * B[:-1, :]
        return out

    def _a_right(self, B):
        out = np.zeros_like(B)
        out[:, 1:] = B[:, :-1] * self.sq[None, :]
        return out

    def _adag_right(self, B):
        out = np.zeros_like(B)
        out[:, :-1] = B[:, 1:] * self.sq[None, :]
        return out

    def rhs(self, B: np.ndarray, f_value: float) -> np.ndarray:
        m = self.mode
        n = self.n_diag
        drive = 0.5 * m.lambda_n * f_value
        # -i (H_s B - B H_s'); x = a + a*
        out = -1j * m.omega_n * (n[:, None] * B - B * n[None, :])
        if drive != 0.0 and (self.s != 0.0 or self.s_prime != 0.0):
            xB = self._a_left(B) + self._adag_left(B)
            Bx = self._a_right(B) + self._adag_right(B)
            out += -1j * drive * (self.s * xB - self.s_prime * Bx)
        if m.gamma_n > 0.0:
            gd, gu = self.gamma_down, self.gamma_up
            aBad = self._adag_right(self._a_left(B))       # a B a*
            adBa = self._a_right(self._adag_left(B))       # a* B a
            out += gd * (aBad - 0.5 * ((n + 0.0)[:, None] * B + B * n[None, :]))
            out += gu * (adBa - 0.5 * ((n + 1.0)[:, None] * B + B * (n + 1.0)[None, :]))
        return out


@dataclass
class EvolutionResult:
    final: np.ndarray
    overlap: complex          # Tr B(t_g) / Tr B(0)
    max_tail: float           # peak top-level population fraction


def _integrate(mode: TruncatedMode, s: float, s_prime: float,
               seq: PulseSequence, steps_per_period: int,
               initial: np.ndarray | None = None,
               tail_limit: float = TAIL_LIMIT) -> EvolutionResult:
    gen = _Lindblad(mode, s, s_prime)
    B = thermal_density(mode.dim, mode.initial_occupation) if initial is None \
        else initial.astype(complex)
    trace0 = complex(np.trace(B))
    events = seq.times  # includes 0 and t_g
    h_max = TWO_PI / (steps_per_period * mode.omega_n)
    max_tail = 0.0
    for j in range(len(events) - 1):
        t0, t1 = events[j], events[j + 1]
        if t1 <= t0:
            continue
        f_value = float(seq.switching_function(np.asarray([0.5 * (t0 + t1)]))[0])
        n_steps = max(1, int(math.ceil((t1 - t0) / h_max)))
        h = (t1 - t0) / n_steps
        for _ in range(n_steps):
            k1 = gen.rhs(B, f_value)
            k2 = gen.rhs(B + 0.5 * h * k1, f_value)
            k3 = gen.rhs(B + 0.5 * h * k2, f_value)
            k4 = gen.rhs(B + h * k3, f_value)
            B = B + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        max_tail = max(max_tail, abs(B[-1, -1]) / abs(trace0))
    if max_tail > tail_limit:
        suggested = int(mode.dim * 1.5) + 8
        raise PhysicsDomainError(
            f"Fock truncation tail {max_tail:.2e} exceeds {tail_limit:.0e}; "
            f"retry with dim >= {suggested}")
    return EvolutionResult(final=B, overlap=complex(np.trace(B) / trace0),
                           max_tail=max_tail)


def evolve_conditional(mode: TruncatedMode, s_n: float, seq: PulseSequence,
                       steps_per_period: int = 200,
                       tail_limit: float = TAIL_LIMIT) -> EvolutionResult:
    """Evolve the branch density matrix for spin value s_n (trace preserved)."""
    return _integrate(mode, s_n, s_n, seq, steps_per_period,
                      tail_limit=tail_limit)


def conditional_overlap(mode: TruncatedMode, s: float, s_prime: float,
                        seq: PulseSequence,
                        steps_per_period: int = 200,
                        tail_limit: float = TAIL_LIMIT) -> complex:
    """Coherence factor Tr B(t_g) between spin branches s and s'."""
    return _integrate(mode, s, s_prime, seq, steps_per_period,
                      tail_limit=tail_limit).overlap


def oracle_f_n(mode: TruncatedMode, seq: PulseSequence,
               steps_per_period: int = 200,
               tail_limit: float = TAIL_LIMIT) -> float:
    """Motional dephasing exponent from the (+1, -1) branch coherence:
    F_n = -ln |Tr B(t_g)|."""
    ov = conditional_overlap(mode, 1.0, -1.0, seq, steps_per_period,
                             tail_limit)
    mag = abs(ov)
    if mag <= 0.0:
        raise PhysicsDomainError("coherence overlap underflowed to zero")
    return -math.log(mag)


def oracle_geometric_phase(mode: TruncatedMode, seq: PulseSequence,
                           steps_per_period: int = 200) -> float:
    """Geometric phase from the (1, 0) branch coherence (valid mod 2 pi)."""
    ov = conditional_overlap(mode, 1.0, 0.0, seq, steps_per_period)
    return math.atan2(ov.imag, ov.real)


def displaced_thermal_overlap(mode: TruncatedMode, seq: PulseSequence,
                              s: float, s_prime: float) -> float:
    """Closed-form |coherence| of the undamped driven mode:

    exp( - eta_n^2 (N_0 + 1/2) (s - s')^2 |beta(w_n)|^2 ),

    from the thermal characteristic function evaluated at the relative
    displacement the switching history imprints on the two branches.
    """
    b2 = abs(seq.beta_scalar(mode.omega_n)) ** 2
    return math.exp(-mode.eta_n ** 2 * (mode.initial_occupation + 0.5)
                    * (s - s_prime) ** 2 * b2)


def brute_force_delta_beta(layout: Layout, seq: PulseSequence,
                           omega_r: float) -> float:
    """Independent re-summation of the mean excitation amplitude.

    Assembles the coupling matrix wire by wire, diagonalizes it, and
    evaluates beta by a plain per-pulse loop; shares nothing with the
    vectorized filter path except the eigensolver backend.
    """
    from .layout import Custom, Chain, ChainConvention, layout_size

    n = layout_size(layout)
    if n > MAX_BRUTE_SITES:
        raise PhysicsDomainError(f"brute-force path capped at {MAX_BRUTE_SITES} sites")
    if isinstance(layout, Custom):
        G = np.asarray(layout.matrix, dtype=float).copy()
    else:
        G = np.zeros((n, n))
        for wire in layout.wires():
            for a in wire.terminals:
                for b in wire.terminals:
                    G[a, b] += wire.strength
        if isinstance(layout, Chain) and layout.convention is ChainConvention.PAPER_UNIFORM:
            for i in range(n):
                G[i, i] = 2.0 * layout.g
    mu = np.linalg.eigvalsh(G)
    total = 0.0
    for m in mu:
        w = math.sqrt(omega_r ** 2 + 2.0 * omega_r * m)
        re = 0.0
        im = 0.0
        for t_p, z_p in zip(seq.times, seq.weights):
            re += z_p * math.cos(w * t_p)
            im += z_p * math.sin(w * t_p)
        total += (omega_r / w) ** 3 * (re * re + im * im)
    return math.sqrt(total / len(mu))
