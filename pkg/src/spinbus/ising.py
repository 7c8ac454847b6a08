"""Phonon-mediated Ising couplings, gate times, and ideal spin-state
evolution on the computational basis.

Sign and counting conventions are pinned by one calibration point: with the
pair coupling J_ij = 2 M_ij (M_ij the single-counted matrix
sum_n lambda_{n,i} lambda_{n,j} / (4 w_n)) and the evolution phase
exp(i t sum_{i<j} J_ij s_i s_j), a two-site product superposition evolves
into (|00> + |11> + i|01> + i|10>)/2 at t_g = pi / (4 |J_12|). For two sites
J_12 = eta^2 w_r (1/xi - 1)/4, negative above resonance (xi > 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsDomainError
from .modes import ModeCouplings, PhononSpectrum
from .pulses import PulseSequence

MAX_STATE_QUBITS = 14


@dataclass(frozen=True)
class IsingCouplings:
    """Symmetric coupling matrix M (zero diagonal) and pair view J = 2M."""

    M: np.ndarray

    @property
    def n_spins(self) -> int:
        return self.M.shape[0]

    def pair_coupling(self, i: int, j: int) -> float:
        """Coefficient of sigma_z^i sigma_z^j, pairs counted once (i < j)."""
        if i == j:
            raise PhysicsDomainError("pair coupling needs distinct spins")
        return 2.0 * float(self.M[i, j])


def ising_matrix(modes: ModeCouplings, spectrum: PhononSpectrum) -> IsingCouplings:
    """M_ij = sum_n lambda_{n,i} lambda_{n,j} / (4 w_n), zero diagonal."""
    lam_ni = modes.lambda_ni
    if lam_ni.shape[0] != spectrum.n_modes:
        raise PhysicsDomainError("mode couplings and spectrum size mismatch")
    M = lam_ni.T @ (lam_ni / (4.0 * spectrum.omega[:, None]))
    np.fill_diagonal(M, 0.0)
    return IsingCouplings(M=0.5 * (M + M.T))


def gate_time(couplings: IsingCouplings, pair: tuple[int, int]) -> float:
    """Entangling time t_g = pi / (4 |J_ij|) for the given spin pair."""
    J = couplings.pair_coupling(*pair)
    if J == 0.0:
        raise PhysicsDomainError(f"zero coupling for pair {pair}; "
                                 "gate time is unbounded")
    return math.pi / (4.0 * abs(J))


class SpinState:
    """Pure state of N <= 14 qubits over the sigma_z computational basis.

    Basis index b maps qubit i to the bit (N-1-i) of b, so |q0 q1 ...> reads
    as the binary expansion of b; s_i = +1 for |0>.
    """

    def __init__(self, amplitudes: np.ndarray, n_qubits: int | None = None):
        amp = np.asarray(amplitudes, dtype=complex).ravel()
        n = int(round(math.log2(amp.size)))
        if 2 ** n != amp.size:
            raise PhysicsDomainError("amplitude vector length must be 2^N")
        if n_qubits is not None and n_qubits != n:
            raise PhysicsDomainError("n_qubits inconsistent with amplitudes")
        if n > MAX_STATE_QUBITS:
            raise PhysicsDomainError(f"state vectors capped at {MAX_STATE_QUBITS} qubits")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-12:
            raise PhysicsDomainError("state must be normalized")
        self.amplitudes = amp
        self.n_qubits = n

    @classmethod
    def product_superposition(cls, n_qubits: int) -> "SpinState":
        """prod_i (|0> + |1>)/sqrt(2)."""
        amp = np.full(2 ** n_qubits, 2.0 ** (-0.5 * n_qubits), dtype=complex)
        return cls(amp)

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "SpinState":
        amp = np.zeros(2 ** n_qubits, dtype=complex)
        amp[index] = 1.0
        return cls(amp)

    def fidelity_with(self, other: "SpinState") -> float:
        return float(abs(np.vdot(other.amplitudes, self.amplitudes)) ** 2)


def basis_spin_values(n_qubits: int) -> np.ndarray:
    """s[b, i] = +-1 eigenvalues of sigma_z^i for each basis index b."""
    b = np.arange(2 ** n_qubits)
    bits = (b[:, None] >> (n_qubits - 1 - np.arange(n_qubits))) & 1
    return 1.0 - 2.0 * bits


@dataclass(frozen=True)
class GatePlan:
    couplings: IsingCouplings
    t_g: float
    sequence: PulseSequence | None = None

    def __post_init__(self):
        if self.t_g <= 0.0:
            raise PhysicsDomainError("t_g must be positive")


def ising_phases(couplings: IsingCouplings, t: float) -> np.ndarray:
    """Per-basis-state phase t * sum_{i<j} J_ij s_i s_j."""
    n = couplings.n_spins
    s = basis_spin_values(n)
    # sum_{i != j} M_ij s_i s_j = s M s^T row-wise (diagonal of M is zero)
    quad = np.einsum("bi,ij,bj->b", s, couplings.M, s)
    return t * quad


def apply_ideal_gate(state: SpinState, plan: GatePlan,
                     mode_phases: np.ndarray | None = None,
                     spectrum: PhononSpectrum | None = None) -> SpinState:
    """Diagonal entangling gate exp(i t sum_{i<j} J_ij s_i s_j) |s> -> phases.

    With ``mode_phases`` (per-mode Phi_n) and the matching spectrum, applies
    the collective-mode form exp(i sum_n Phi_n s_n^2), s_n = sum_i c_{n,i} s_i,
    instead; the two differ only by a state-independent phase built from the
    s_i^2 self terms.
    """
    n = state.n_qubits
    if plan.couplings.n_spins != n:
        raise PhysicsDomainError("state and couplings dimension mismatch")
    if mode_phases is not None:
        if spectrum is None or spectrum.n_modes != n:
            raise PhysicsDomainError("mode phases need the matching spectrum")
        s = basis_spin_values(n)
        s_n = s @ spectrum.coeffs.T          # s_n[b, n]
        phase = s_n ** 2 @ np.asarray(mode_phases)
    else:
        phase = ising_phases(plan.couplings, plan.t_g)
    return SpinState(np.exp(1j * phase) * state.amplitudes)


def collective_phase_pattern(n_qubits: int, M: float, t: float) -> np.ndarray:
    """Star-layout phases exp(i M t (sum_i s_i)^2 / N), per basis state."""
    s = basis_spin_values(n_qubits)
    return M * t * s.sum(axis=1) ** 2 / n_qubits


def phases_equal_up_to_global(phi_a: np.ndarray, phi_b: np.ndarray,
                              atol: float = 1e-10) -> bool:
    """Whether two diagonal phase patterns agree up to one global offset."""
    d = np.angle(np.exp(1j * (phi_a - phi_b)))
    return bool(np.max(np.abs(d - d[0])) <= atol)
