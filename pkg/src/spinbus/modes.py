"""Collective phonon modes of the coupled resonator array.

The position-position coupling (1/2) sum_ij G_ij x_i x_j on top of N bare
oscillators at omega_r diagonalizes exactly into modes with

    omega_n^2 = omega_r^2 + 2 omega_r mu_n,

where mu_n are the eigenvalues of G and the mode coefficients c_{n,i} are the
(orthonormal) eigenvector rows. Ordering is descending in omega_n; degenerate
eigenspaces are rotated onto a site-ordered canonical basis and each mode's
sign is fixed so its largest-magnitude coefficient is positive, which makes
spectra reproducible across runs and platforms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BuckledLayoutError, PhysicsDomainError
from .layout import CouplingMatrix

DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class PhononSpectrum:
    omega: np.ndarray    # omega_n, rad/s, descending
    coeffs: np.ndarray   # c[n, i], orthonormal rows
    omega_r: float       # bare resonator frequency, rad/s

    @property
    def n_modes(self) -> int:
        return len(self.omega)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues mu_n of the coupling matrix, recovered from omega_n."""
        return (self.omega ** 2 - self.omega_r ** 2) / (2.0 * self.omega_r)


@dataclass(frozen=True)
class ModeCouplings:
    lambda_ni: np.ndarray  # lambda * c[n, i], rad/s
    eta_n: np.ndarray      # lambda / omega_n per mode


def _canonical_degenerate_basis(vecs: np.ndarray) -> np.ndarray:
    """Rotate an orthonormal set spanning a degenerate eigenspace onto the
    basis obtained by Gram-Schmidt of the projected site vectors e_0, e_1, ...
    """
    dim, n_sites = vecs.shape
    proj = vecs.T @ vecs  # projector onto the eigenspace, site basis
    out = []
    for i in range(n_sites):
        v = proj[:, i].copy()
        for u in out:
            v -= (u @ v) * u
        norm = np.linalg.norm(v)
        if norm > 1e-10:
            out.append(v / norm)
        if len(out) == dim:
            break
    if len(out) != dim:
        raise PhysicsDomainError("failed to build canonical degenerate basis")
    return np.array(out)


def _fix_signs(coeffs: np.ndarray) -> np.ndarray:
    out = coeffs.copy()
    for row in out:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0.0:
            row *= -1.0
    return out


def diagonalize(G: CouplingMatrix, omega_r: float) -> PhononSpectrum:
    """Collective mode frequencies and coefficients of the coupled array."""
    if omega_r <= 0.0:
        raise PhysicsDomainError("omega_r must be positive")
    mu, vecs = np.linalg.eigh(G.G)
    if omega_r ** 2 + 2.0 * omega_r * mu[0] <= 0.0:
        raise BuckledLayoutError(mu[0], omega_r)

    # descending omega_n == descending mu
    order = np.argsort(mu)[::-1]
    mu = mu[order]
    coeffs = vecs.T[order]  # rows are modes

    # canonicalize degenerate groups for reproducibility
    scale = max(abs(mu[0]), abs(mu[-1]), omega_r * 1e-6)
    i = 0
    while i < len(mu):
        j = i + 1
        while j < len(mu) and abs(mu[j] - mu[i]) <= DEGENERACY_RTOL * scale:
            j += 1
        if j - i > 1:
            coeffs[i:j] = _canonical_degenerate_basis(coeffs[i:j])
        i = j

    coeffs = _fix_signs(coeffs)
    omega = np.sqrt(omega_r ** 2 + 2.0 * omega_r * mu)
    return PhononSpectrum(omega=omega, coeffs=coeffs, omega_r=omega_r)


def frequency_ratio_xi(spectrum: PhononSpectrum) -> float:
    """Ratio of highest to lowest collective frequency (two-site: xi)."""
    if spectrum.n_modes < 2:
        raise PhysicsDomainError("frequency ratio needs at least two modes")
    return float(spectrum.omega[0] / spectrum.omega[-1])


def mode_couplings(spectrum: PhononSpectrum, lam: float) -> ModeCouplings:
    """Per-mode spin-phonon couplings lambda_{n,i} and eta_n = lambda/omega_n."""
    if lam < 0.0:
        raise PhysicsDomainError("lambda must be >= 0")
    return ModeCouplings(lambda_ni=lam * spectrum.coeffs,
                         eta_n=lam / spectrum.omega)


def uniform_chain_spectrum(n: int, g: float, omega_r: float) -> np.ndarray:
    """Closed-form spectrum of the uniform-diagonal chain, descending.

    omega_j = sqrt(omega_r^2 + 4 omega_r g (1 + cos(j pi / (N+1)))), j = 1..N.
    The j/(N+1) indexing is the one that matches the numerical eigenvalues of
    the uniform-diagonal tridiagonal coupling matrix.
    """
    j = np.arange(1, n + 1)
    om = np.sqrt(omega_r ** 2 + 4.0 * omega_r * g * (1.0 + np.cos(j * np.pi / (n + 1))))
    return np.sort(om)[::-1]
