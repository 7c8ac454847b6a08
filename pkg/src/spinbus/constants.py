"""Physical constants (SI, CODATA 2018 values)."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed constants used throughout; all SI.

    `g_s` is the electron spin g-factor magnitude, kept at 2 for the
    S=1/2 impurity spins modelled here.
    """

    hbar: float = 1.054571817e-34   # J*s
    k_B: float = 1.380649e-23       # J/K
    mu_B: float = 9.2740100783e-24  # J/T
    g_s: float = 2.0
    eps0: float = 8.8541878128e-12  # F/m

    def __post_init__(self):
        for name in ("hbar", "k_B", "mu_B", "g_s", "eps0"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"constant {name} must be positive")


CONSTANTS = PhysicalConstants()

TWO_PI = 6.283185307179586
