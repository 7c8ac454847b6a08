"""Spin-echo pulse sequences, the switching function f(t) and the spectral
filter amplitude beta(omega).

A sequence is the ordered set of instantaneous pi-pulse times t_1..t_Np
strictly inside (0, t_g), plus boundary weights for the preparation and
readout steps: z_0 = +1/2 at t = 0, z_p = (-1)^p at the pulses, and a closing
weight z_{Np+1} = -(1/2)(-1)^Np at t_g. The closing weight's sign follows the
pulse parity so that the weights always sum to zero; that is what makes f(t)
vanish outside the gate window, beta(0) = 0, and the dephasing integrals
converge. (For even pulse counts it reduces to the familiar -1/2.)

beta is evaluated by direct complex summation over the weights, which covers
irregular sequences and complex arguments uniformly; the equidistant even-k
closed form sin^2(n pi w/w_r) tan^2(pi w/(k w_r)) is kept as a test oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .constants import TWO_PI
from .errors import PhysicsDomainError
from .layout import Chain, SingleWire, Layout, build_coupling_matrix
from .modes import PhononSpectrum, diagonalize, frequency_ratio_xi


class PulseSequence:
    """Gate window [0, t_g] with interior pi-pulse times."""

    def __init__(self, t_g: float, pulse_times=()):
        if t_g <= 0.0:
            raise PhysicsDomainError("t_g must be positive")
        times = np.asarray(sorted(float(t) for t in pulse_times), dtype=float)
        if times.size:
            if times[0] <= 0.0 or times[-1] >= t_g:
                raise PhysicsDomainError(
                    "pulse times must lie strictly inside (0, t_g)")
            if np.any(np.diff(times) <= 0.0):
                raise PhysicsDomainError("pulse times must be strictly increasing")
        self.t_g = float(t_g)
        self.pulse_times = times
        n_p = times.size
        # event times incl. boundaries, and their weights
        self.times = np.concatenate(([0.0], times, [self.t_g]))
        z = np.empty(n_p + 2)
        z[0] = 0.5
        z[1:n_p + 1] = (-1.0) ** np.arange(1, n_p + 1)
        z[n_p + 1] = -0.5 * (-1.0) ** n_p
        self.weights = z

    @property
    def n_pulses(self) -> int:
        return self.pulse_times.size

    def switching_function(self, t) -> np.ndarray:
        """f(t) = 2 sum_p z_p theta(t - t_p); +-1 inside the gate, 0 outside."""
        t = np.asarray(t, dtype=float)
        step = (t[..., None] >= self.times).astype(float)
        return 2.0 * step @ self.weights

    def beta(self, omega) -> np.ndarray:
        """Filter amplitude beta(omega) = sum_p z_p exp(i omega t_p).

        Accepts real or complex omega (complex arguments are used to fold in
        weak mode damping, beta(omega_n + i gamma_n / 2)).
        """
        omega = np.asarray(omega)
        phase = np.exp(1j * np.multiply.outer(omega, self.times))
        return phase @ self.weights.astype(complex)

    def beta_scalar(self, omega) -> complex:
        return complex(self.beta(np.asarray([omega]))[0])

    def rescaled(self, c: float) -> "PulseSequence":
        """Sequence with all times scaled by c (frequencies scale by 1/c)."""
        return PulseSequence(c * self.t_g, c * self.pulse_times)


@dataclass(frozen=True)
class EchoFamily:
    """Equidistant family: k pulses per period of ``reference_omega`` over
    n_cycles periods. Pulses sit at t_p = p * 2 pi / (k w_ref); the nominal
    final pulse coincides with t_g and is physically inert (it cannot change
    f(t) inside the gate), so the generated sequence carries the n*k - 1
    interior pulses and the parity closing weight, which reproduces the
    equidistant closed-form filter exactly.
    """

    k: int
    n_cycles: int
    reference_omega: float

    def __post_init__(self):
        if self.k < 0:
            raise PhysicsDomainError("k must be >= 0")
        if self.n_cycles < 1:
            raise PhysicsDomainError("n_cycles must be >= 1")
        if self.reference_omega <= 0.0:
            raise PhysicsDomainError("reference_omega must be positive")

    def sequence(self) -> PulseSequence:
        t_g = TWO_PI * self.n_cycles / self.reference_omega
        if self.k == 0:
            return PulseSequence(t_g)
        spacing = TWO_PI / (self.k * self.reference_omega)
        n_total = self.n_cycles * self.k
        times = spacing * np.arange(1, n_total)
        return PulseSequence(t_g, times)


def switching_function(seq: PulseSequence, t) -> np.ndarray:
    return seq.switching_function(t)


def beta(seq: PulseSequence, omega) -> np.ndarray:
    return seq.beta(omega)


def equidistant_filter_squared(omega, k: int, n: int, omega_ref: float):
    """Closed form |beta|^2 = sin^2(n pi w/w_ref) tan^2(pi w/(k w_ref)).

    Valid for even total pulse count n*k (in particular any even k); used as
    an independent oracle against the direct summation.
    """
    omega = np.asarray(omega, dtype=float)
    return (np.sin(n * np.pi * omega / omega_ref) ** 2
            * np.tan(np.pi * omega / (k * omega_ref)) ** 2)


def delta_beta(spectrum: PhononSpectrum, seq: PulseSequence) -> float:
    """RMS excitation amplitude over all modes.

    Delta beta = sqrt( (1/N) sum_n (w_r/w_n)^3 |beta(w_n)|^2 ).
    """
    b = seq.beta(spectrum.omega)
    w = (spectrum.omega_r / spectrum.omega) ** 3
    return float(np.sqrt(np.mean(w * np.abs(b) ** 2)))


def _xi_of_g(layout_factory: Callable[[float], Layout], omega_r: float, g: float) -> float:
    spec = diagonalize(build_coupling_matrix(layout_factory(g)), omega_r)
    return frequency_ratio_xi(spec)


def commensurate_tune(k: int, n: int, m: int, omega_r: float, layout: Layout,
                      g_max: float | None = None, rtol: float = 1e-12) -> Layout:
    """Adjust the layout's single coupling g so that xi = m/n exactly.

    Restricted to two-site or star layouts, whose xi(g) is strictly
    increasing. Solved by bisection on g to ``rtol`` relative accuracy in xi.
    """
    if not (m > n >= 1):
        raise PhysicsDomainError("commensurate target needs m > n >= 1")
    if isinstance(layout, SingleWire):
        factory: Callable[[float], Layout] = lambda g: SingleWire(layout.n, g)
    elif isinstance(layout, Chain) and layout.n == 2:
        factory = lambda g: Chain(2, g, layout.convention)
    else:
        raise PhysicsDomainError(
            "commensurate tuning needs a two-site or single-wire layout")
    if k >= 1 and k % 2 == 0 and (2 * m) % (n * k) == 0 and (2 * m) // (n * k) % 2 == 1:
        # xi sits on a filter resonance (odd multiple of k/2); tuning is legal
        # but the echo family cannot null this mode.
        import warnings
        warnings.warn("target xi coincides with a k-filter resonance")

    target = m / n
    lo, hi = 0.0, g_max if g_max is not None else 4.0 * omega_r
    expansions = 0
    while _xi_of_g(factory, omega_r, hi) < target:
        if g_max is not None or expansions > 40:
            raise PhysicsDomainError(
                f"target xi={target} unreachable within g in [0, {hi:.3e}]")
        hi *= 2.0
        expansions += 1
    if target == 1.0:
        return factory(0.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _xi_of_g(factory, omega_r, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 0.25 * rtol * (lo + hi):
            break
    g_star = 0.5 * (lo + hi)
    xi = _xi_of_g(factory, omega_r, g_star)
    if abs(xi - target) > 10.0 * rtol * target:
        raise PhysicsDomainError(
            f"bisection failed to reach xi={target}, got {xi}")
    return factory(g_star)


def snap_xi(xi: float, max_denominator: int = 16,
            min_cycles: int = 1) -> tuple[int, int]:
    """Nearest rational m/n with n <= max_denominator, then scale the pair so
    n >= min_cycles (denser filter zeros for scan resolution)."""
    frac = Fraction(xi).limit_denominator(max_denominator)
    m, n = frac.numerator, frac.denominator
    if n < min_cycles:
        c = math.ceil(min_cycles / n)
        m, n = m * c, n * c
    return m, n
