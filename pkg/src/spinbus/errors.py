"""Exception types shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2, PhysicsDomainError -> 3,
ConvergenceError -> 4.
"""
from __future__ import annotations


class SpinBusError(Exception):
    """Base class for package errors."""


class ConfigError(SpinBusError):
    """Bad or inconsistent scenario configuration."""


class PhysicsDomainError(SpinBusError, ValueError):
    """Inputs outside the physical domain of an operation."""


class BuckledLayoutError(PhysicsDomainError):
    """Coupling so strong that a collective mode frequency turns imaginary."""

    def __init__(self, mu_min: float, omega_r: float):
        self.mu_min = mu_min
        self.omega_r = omega_r
        super().__init__(
            "buckled layout: eigenvalue mu_min = "
            f"{mu_min:.6e} rad/s gives omega_r^2 + 2*omega_r*mu_min < 0 "
            f"at omega_r = {omega_r:.6e} rad/s"
        )


class ConvergenceError(SpinBusError):
    """A numerical routine failed to reach its tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual estimate {residual:.3e})"
        super().__init__(message)
