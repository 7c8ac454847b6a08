"""Bath spectral densities, filtered dephasing integrals, geometric phases
and the two-spin gate decoherence summary R(xi), tau(xi).

Conventions used throughout:

* The bath seen by collective mode n enters through the filtered density
  J_eff^n(w) = J(w) w_n^4 / ((w_n^2 - w^2)^2 + w_n^2 J(w)^2), a Lorentzian of
  width gamma_n = J(w_n) around w_n on top of the bare J(w) at low frequency.
* Geometric phases Phi_n carry the spin-spin coupling: with no pulses and
  weak damping Phi_n -> eta_n^2 w_n t_g / 4 (the bare interaction); the
  pulse-pair term modifies it, suppressing the coupling like 1/k^2 for fast
  echo sequences.
* Motional dephasing exponents F_n split into the residual end-point
  excitation 4 eta_n^2 (N + 1/2) |beta(w_n)|^2 and dephasing accumulated
  during the evolution. At the commensurate operating points (beta(w_n) = 0)
  the equilibrium integral carries the during-gate part only, which is what
  the summary rate Gamma_eff (and hence R) measures.
* The pre-cooled coefficients use the weakly-damped-mode picture: a
  low-frequency part with the bare density, the residual term at the
  damping-shifted frequency, and the during-gate bath exposure
  gamma_n (N_th + 1/2) K(w_n) with K the integrated squared branch
  separation (``damped_response_integral``).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .constants import CONSTANTS, TWO_PI
from .errors import PhysicsDomainError
from .modes import PhononSpectrum, mode_couplings
from .pulses import PulseSequence
from .quadrature import DEFAULT_RTOL, Resonance, resonant_integral


# ---------------------------------------------------------------------------
# spectral densities

@dataclass(frozen=True)
class OhmicDensity:
    """Clamping losses: J(w) = w / Q."""

    Q: float

    def __post_init__(self):
        if self.Q <= 0.0:
            raise PhysicsDomainError("Q must be positive")

    def j(self, omega):
        return np.asarray(omega) / self.Q


@dataclass(frozen=True)
class ConstantDensity:
    """Frequency-independent density, the 1/f electric-noise surrogate.

    Defined for the dephasing coefficients only; the phase integral does not
    converge for a constant density.
    """

    J0: float

    def __post_init__(self):
        if self.J0 < 0.0:
            raise PhysicsDomainError("J0 must be >= 0")

    def j(self, omega):
        return np.full_like(np.asarray(omega, dtype=float), self.J0)


@dataclass(frozen=True)
class ZeroDensity:
    """Isolated resonators (no bath)."""

    def j(self, omega):
        return np.zeros_like(np.asarray(omega, dtype=float))


SpectralDensity = Union[OhmicDensity, ConstantDensity, ZeroDensity]


def damping_rate(J: SpectralDensity, omega_n: float) -> float:
    """Mode linewidth gamma_n = J(omega_n)."""
    return float(np.asarray(J.j(np.asarray([omega_n])))[0])


def j_eff(J: SpectralDensity, omega_n: float, omega):
    """Lorentzian-filtered spectral density seen through mode n."""
    omega = np.asarray(omega, dtype=float)
    jw = J.j(omega)
    return jw * omega_n ** 4 / ((omega_n ** 2 - omega ** 2) ** 2
                                + omega_n ** 2 * jw ** 2)


# ---------------------------------------------------------------------------
# bath state

@dataclass(frozen=True)
class BathState:
    """Support temperature and the resonator's initial occupation.

    ``precooled`` = None means thermal equilibrium with the support;
    otherwise the modes start at occupation N_i while the bath stays at T.
    """

    temperature: float
    precooled: float | None = None

    def __post_init__(self):
        if self.temperature < 0.0:
            raise PhysicsDomainError("temperature must be >= 0")
        if self.precooled is not None and self.precooled < 0.0:
            raise PhysicsDomainError("precooled occupation must be >= 0")

    @classmethod
    def from_occupation(cls, occupation: float, omega_n: float,
                        precooled: float | None = None) -> "BathState":
        """Bath whose Bose occupation at omega_n equals ``occupation``."""
        if occupation <= 0.0:
            return cls(0.0, precooled)
        T = CONSTANTS.hbar * omega_n / (CONSTANTS.k_B
                                        * math.log1p(1.0 / occupation))
        return cls(T, precooled)

    def thermal_occupation(self, omega_n: float) -> float:
        """Bose occupation 1/(e^{hbar w/kT} - 1); ~ k_B T/(hbar w) when hot.

        This is the occupation consistent with the coth kernel of the
        dephasing integrals (coth(hbar w / 2 k_B T) = 2 N + 1 exactly).
        """
        if self.temperature <= 0.0:
            return 0.0
        x = CONSTANTS.hbar * omega_n / (CONSTANTS.k_B * self.temperature)
        return 1.0 / math.expm1(x)

    def check_precooled(self, omega_n: float) -> None:
        if self.precooled is not None:
            n_th = self.thermal_occupation(omega_n)
            if self.precooled > 0.2 * n_th:
                warnings.warn(
                    f"precooled occupation {self.precooled:.3g} is not small "
                    f"against N_th = {n_th:.3g}; the pre-cooled expansion "
                    "assumes N_i << N_th")


def coth_factor(omega, temperature: float):
    """coth(hbar w / 2 k_B T) with the T = 0 and w -> 0 guards."""
    omega = np.asarray(omega, dtype=float)
    if temperature <= 0.0:
        return np.ones_like(omega)
    x = CONSTANTS.hbar * omega / (2.0 * CONSTANTS.k_B * temperature)
    out = np.empty_like(x)
    small = np.abs(x) < 5e-7
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1.0 / xs, 1.0 / np.tanh(xs))
    out[small] = 1.0 / x[small]
    return out


# ---------------------------------------------------------------------------
# pulse-pair kernels

def _prefix_pair_sum(seq: PulseSequence, omega, interior_only: bool,
                     time_weighted: bool):
    """sum_{p>q} z_p z_q e^{i w (t_p - t_q)} * (t_q if time_weighted else 1),
    vectorized over omega via prefix sums."""
    omega = np.asarray(omega, dtype=float)
    if interior_only:
        t = seq.times[1:-1]
        z = seq.weights[1:-1]
    else:
        t = seq.times
        z = seq.weights
    if len(t) < 2:
        return np.zeros(omega.shape, dtype=complex)
    phase = np.exp(1j * np.multiply.outer(omega, t))  # (M, P)
    terms = phase * z
    lower = np.conj(terms) * (t if time_weighted else 1.0)
    prefix = np.cumsum(lower, axis=-1)
    # pair (p, q<p): terms_p * prefix_{p-1}
    return np.einsum("...p,...p->...", terms[..., 1:], prefix[..., :-1])


def pulse_pair_sin_sum(seq: PulseSequence, omega, interior_only: bool = True):
    """sum_{p > q} z_p z_q sin(w (t_p - t_q)) over pulse weights."""
    return np.imag(_prefix_pair_sum(seq, omega, interior_only, False))


def damped_response_integral(seq: PulseSequence, omega: float) -> float:
    """Exposure of a weakly damped mode to the switching drive:

    K(w) = (w^2/4) Int_0^tg |Pf(tau)|^2 dtau,  Pf(tau) = Int_0^tau f e^{i w s} ds.

    K t_g^-1 measures the time-averaged squared branch separation, so
    gamma (N + 1/2) K is the during-gate decoherence a Lindblad-damped mode
    accumulates. Evaluated in closed form over the piecewise-constant
    switching intervals.
    """
    t = seq.times
    z = seq.weights
    # prefix sums over events: B_j = sum_{p<=j} z_p e^{i w t_p}, Z_j likewise
    Bj = np.cumsum(z * np.exp(1j * omega * t))
    Zj = np.cumsum(z)
    total = 0.0
    for j in range(len(t) - 1):
        dt_j = t[j + 1] - t[j]
        if dt_j <= 0.0:
            continue
        # int |e^{i w tau} Z_j - B_j|^2 over (t_j, t_{j+1})
        osc = (np.exp(1j * omega * t[j + 1]) - np.exp(1j * omega * t[j])) / (1j * omega)
        total += ((Zj[j] ** 2 + abs(Bj[j]) ** 2) * dt_j
                  - 2.0 * np.real(np.conj(Bj[j]) * Zj[j] * osc))
    return float(total)


def _pulse_scale(seq: PulseSequence) -> float:
    if seq.n_pulses == 0:
        return 0.0
    return TWO_PI / float(np.min(np.diff(seq.times)))


# ---------------------------------------------------------------------------
# geometric phases (Eq.-of-motion phase integral)

def exact_phase_undamped(seq: PulseSequence, omega_n: float,
                         eta_n: float) -> float:
    """Geometric phase of an undamped mode, closed form.

    Phi_n = (eta_n^2 w_n / 4) [ t_g + (4/w_n) sum_{p>q} z_p z_q
    sin(w_n (t_p - t_q)) ] with the sum over all weights including the
    boundary steps; equals the double time integral of the driven-oscillator
    commutator for piecewise-constant f.
    """
    s = float(pulse_pair_sin_sum(seq, np.asarray([omega_n]),
                                 interior_only=False)[0])
    return eta_n ** 2 * omega_n / 4.0 * (seq.t_g + 4.0 * s / omega_n)


def geometric_phase(J: SpectralDensity, seq: PulseSequence, omega_n: float,
                    eta_n: float, rtol: float = DEFAULT_RTOL) -> float:
    """Geometric phase Phi_n of mode n for the given pulse sequence.

    For an ohmic bath this is the filtered-density phase integral

      Phi_n = (eta_n^2 / 2 pi) Int_0^inf dw J_eff^n(w)
              [ t_g / w + (4 / w^2) sum_{p>q interior} z_p z_q sin(w(t_p-t_q)) ].

    A zero density falls back to the exact undamped closed form (the
    Lorentzian collapses to a delta function, which the quadrature cannot
    represent). A constant density has no convergent phase integral.
    """
    if eta_n == 0.0:
        return 0.0
    if isinstance(J, ZeroDensity):
        return exact_phase_undamped(seq, omega_n, eta_n)
    if isinstance(J, ConstantDensity):
        raise PhysicsDomainError(
            "geometric phase diverges for a constant spectral density; "
            "constant J models dephasing coefficients only")
    gamma_n = damping_rate(J, omega_n)
    upper = 40.0 * max(omega_n, _pulse_scale(seq))
    t_g = seq.t_g

    def integrand(w):
        w = np.asarray(w, dtype=float)
        bracket = t_g / w
        if seq.n_pulses >= 2:
            bracket = bracket + 4.0 / w ** 2 * pulse_pair_sin_sum(seq, w)
        return j_eff(J, omega_n, w) * bracket

    res = resonant_integral(integrand, upper, Resonance(omega_n, gamma_n),
                            rtol=rtol, oscillation_scale=TWO_PI / t_g)
    return eta_n ** 2 / (2.0 * math.pi) * res.value


# ---------------------------------------------------------------------------
# motional dephasing coefficients

def f_n_equilibrium(J: SpectralDensity, bath: BathState, seq: PulseSequence,
                    omega_n: float, eta_n: float,
                    rtol: float = DEFAULT_RTOL) -> float:
    """Dephasing exponent of mode n in thermal equilibrium:

    F_n = (4 eta_n^2 / pi) Int_0^inf dw (J_eff^n / w^2) coth(hw/2kT) |beta|^2.
    """
    if eta_n == 0.0 or isinstance(J, ZeroDensity):
        # isolated-mode limit: residual end-point excitation only
        n_occ = bath.thermal_occupation(omega_n)
        b2 = abs(seq.beta_scalar(omega_n)) ** 2
        return 4.0 * eta_n ** 2 * (n_occ + 0.5) * b2
    gamma_n = damping_rate(J, omega_n)
    upper = 40.0 * max(omega_n, _pulse_scale(seq))

    def integrand(w):
        w = np.asarray(w, dtype=float)
        b2 = np.abs(seq.beta(w)) ** 2
        return (j_eff(J, omega_n, w) / w ** 2
                * coth_factor(w, bath.temperature) * b2)

    res = resonant_integral(integrand, upper, Resonance(omega_n, gamma_n),
                            rtol=rtol, oscillation_scale=TWO_PI / seq.t_g)
    return 4.0 * eta_n ** 2 / math.pi * res.value


def f_n_low_freq(J: SpectralDensity, bath: BathState, seq: PulseSequence,
                 omega_n: float, eta_n: float,
                 rtol: float = DEFAULT_RTOL) -> float:
    """Low-frequency part F_n^l: the dephasing integral with the bare density
    J(w) in place of the filtered J_eff^n(w) (their ratio is 1 + O(w^2/w_n^2)
    below the resonance). Ohmic, no echo: ~ 2 eta_n^2 Gamma_m t_g.

    The resonant response excluded here is exactly what the analytic
    during-gate term of ``f_n_precooled`` restores, so the two halves compose
    without double counting.
    """
    if eta_n == 0.0 or isinstance(J, ZeroDensity):
        return 0.0
    upper = 40.0 * max(omega_n, _pulse_scale(seq))

    def integrand(w):
        w = np.asarray(w, dtype=float)
        b2 = np.abs(seq.beta(w)) ** 2
        return J.j(w) / w ** 2 * coth_factor(w, bath.temperature) * b2

    res = resonant_integral(integrand, upper, None, rtol=rtol,
                            oscillation_scale=TWO_PI / seq.t_g)
    return 4.0 * eta_n ** 2 / math.pi * res.value


def f_n_precooled(J: SpectralDensity, bath: BathState, seq: PulseSequence,
                  omega_n: float, eta_n: float,
                  rtol: float = DEFAULT_RTOL) -> float:
    """Dephasing exponent with the mode pre-cooled to N_i, bath at T:

    F_n = F_n^l + 4 eta_n^2 [ (N_i + 1/2) |beta(w_n + i gamma_n/2)|^2
          + gamma_n (N_th + 1/2) K(w_n) ],

    with K the damped-response exposure of ``damped_response_integral``.
    Valid for gamma_n t_g << 1 (warned otherwise). The structure separates
    the two claims of the pre-cooled analysis: pulse errors
    (beta(w_n) != 0) enter with the *initial* occupation N_i only, while the
    during-gate term gamma_n (N_th + 1/2) K = (Gamma_m + gamma_n/2) K is
    driven by the bath temperature (plus the zero-point which-path loss).
    """
    if bath.precooled is None:
        raise PhysicsDomainError("bath state carries no precooled occupation")
    bath.check_precooled(omega_n)
    gamma_n = damping_rate(J, omega_n)
    if gamma_n * seq.t_g > 0.3:
        warnings.warn(f"gamma_n t_g = {gamma_n * seq.t_g:.3g} is not small; "
                      "the pre-cooled expansion assumes gamma_n t_g << 1")
    n_i = bath.precooled
    b2 = abs(seq.beta_scalar(omega_n + 0.5j * gamma_n)) ** 2
    system = 4.0 * eta_n ** 2 * (n_i + 0.5) * b2
    low = f_n_low_freq(J, bath, seq, omega_n, eta_n, rtol)
    if gamma_n > 0.0:
        n_th = bath.thermal_occupation(omega_n)
        during = (4.0 * eta_n ** 2 * gamma_n * (n_th + 0.5)
                  * damped_response_integral(seq, omega_n))
    else:
        during = 0.0
    return low + system + during


@dataclass(frozen=True)
class ModeDecoherence:
    """Per-mode decoherence bundle for one spectrum/sequence/bath setup."""

    phi_n: np.ndarray
    f_n: np.ndarray
    f_n_lowfreq: np.ndarray
    gamma_n: np.ndarray


def mode_decoherence(spectrum: PhononSpectrum, J: SpectralDensity,
                     bath: BathState, seq: PulseSequence, lam: float,
                     rtol: float = DEFAULT_RTOL) -> ModeDecoherence:
    """Evaluate Phi_n and F_n for every collective mode."""
    couplings = mode_couplings(spectrum, lam)
    phi = np.empty(spectrum.n_modes)
    fn = np.empty(spectrum.n_modes)
    fl = np.empty(spectrum.n_modes)
    gam = np.empty(spectrum.n_modes)
    for n, (w_n, eta_n) in enumerate(zip(spectrum.omega, couplings.eta_n)):
        phi[n] = geometric_phase(J, seq, w_n, eta_n, rtol)
        if bath.precooled is None:
            fn[n] = f_n_equilibrium(J, bath, seq, w_n, eta_n, rtol)
        else:
            fn[n] = f_n_precooled(J, bath, seq, w_n, eta_n, rtol)
        fl[n] = f_n_low_freq(J, bath, seq, w_n, eta_n, rtol)
        gam[n] = damping_rate(J, w_n)
    return ModeDecoherence(phi_n=phi, f_n=fn, f_n_lowfreq=fl, gamma_n=gam)


# ---------------------------------------------------------------------------
# two-spin gate summary

@dataclass(frozen=True)
class GateSummary:
    M_eff: float      # signed effective Ising coupling, rad/s
    Gamma_eff: float  # motional dephasing rate, rad/s
    R_xi: float
    tau_xi: float
    phi_n: np.ndarray
    f_n: np.ndarray


def gate_summary(spectrum: PhononSpectrum, J: SpectralDensity,
                 bath: BathState, seq: PulseSequence, lam: float,
                 Gamma_m: float, rtol: float = DEFAULT_RTOL) -> GateSummary:
    """Two-spin decoherence summary: M_eff, Gamma_eff, R(xi), tau(xi).

    M_eff = (Phi_0 - Phi_1)/t_g, Gamma_eff = (F_0 + F_1)/(2 t_g),
    R(xi) = pi w_r Gamma_eff / (4 |M_eff| Gamma_m) and
    tau(xi) = t_gate lambda^2 / w_r with t_gate = pi / (4 |M_eff|) the
    implied gate duration. Intended for sequences tuned commensurate with
    both modes (beta(w_n) = 0), where F_n carries no end-point excitation
    and R measures dephasing during the evolution only.
    """
    if spectrum.n_modes != 2:
        raise PhysicsDomainError("the R/tau summary is defined for two sites")
    couplings = mode_couplings(spectrum, lam)
    phi = np.array([geometric_phase(J, seq, w, e, rtol)
                    for w, e in zip(spectrum.omega, couplings.eta_n)])
    fn = np.array([f_n_equilibrium(J, bath, seq, w, e, rtol)
                   for w, e in zip(spectrum.omega, couplings.eta_n)])
    t_g = seq.t_g
    m_eff = (phi[0] - phi[1]) / t_g
    if abs(m_eff) < 1e-14 * lam ** 2 / spectrum.omega_r:
        raise PhysicsDomainError("no effective coupling: M_eff ~ 0, "
                                 "R and tau are undefined")
    gamma_eff = (fn[0] + fn[1]) / (2.0 * t_g)
    if Gamma_m <= 0.0:
        raise PhysicsDomainError("Gamma_m must be positive for R(xi)")
    r_xi = math.pi * spectrum.omega_r * gamma_eff / (4.0 * abs(m_eff) * Gamma_m)
    tau_xi = math.pi * lam ** 2 / (4.0 * abs(m_eff) * spectrum.omega_r)
    return GateSummary(M_eff=m_eff, Gamma_eff=gamma_eff, R_xi=r_xi,
                       tau_xi=tau_xi, phi_n=phi, f_n=fn)
