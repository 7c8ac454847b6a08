"""Device parameters: from geometry, circuit and environment to model scales.

Everything internal is angular frequency (rad/s); conversions to ordinary
frequency happen only at the CLI boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from .constants import CONSTANTS, PhysicalConstants
from .errors import PhysicsDomainError


@dataclass(frozen=True)
class ResonatorGeometry:
    """Doubly clamped beam carrying the magnetized, charged tip.

    ``effective_mass_factor`` rescales the full beam mass to the modal mass of
    the fundamental flexural mode. The default 0.30 is calibrated so that the
    canonical Si beam (10 x 0.1 x 0.1 um, 1 MHz) has a zero-point motion of
    3.5e-13 m.
    """

    length: float           # m
    width: float            # m
    thickness: float        # m
    mass_density: float     # kg/m^3
    effective_mass_factor: float = 0.30

    def __post_init__(self):
        for name in ("length", "width", "thickness", "mass_density"):
            if getattr(self, name) <= 0.0:
                raise PhysicsDomainError(f"{name} must be positive")
        if not 0.0 < self.effective_mass_factor <= 1.0:
            raise PhysicsDomainError("effective_mass_factor must be in (0, 1]")

    @property
    def mass(self) -> float:
        """Effective vibrating mass in kg."""
        return (self.effective_mass_factor * self.mass_density
                * self.length * self.width * self.thickness)


@dataclass(frozen=True)
class CircuitGeometry:
    """Electrode and wiring geometry of the coupling circuit.

    Defaults follow the parallel-plate estimates C = eps0*l and C_w = eps0*d;
    pass explicit capacitances to override.
    """

    electrode_gap: float                     # h, m
    wire_length: float                       # d, m
    bias_voltage: float = 0.0                # U, V
    wire_resistance: float = 0.0             # R, Ohm
    resonator_capacitance: float | None = None  # C, F
    wire_capacitance: float | None = None       # C_w, F
    resonator_length: float | None = None       # m, used for the C default

    def __post_init__(self):
        if self.electrode_gap <= 0.0 or self.wire_length <= 0.0:
            raise PhysicsDomainError("electrode_gap and wire_length must be positive")
        if self.bias_voltage < 0.0:
            raise PhysicsDomainError("bias_voltage must be >= 0")
        if self.wire_resistance < 0.0:
            raise PhysicsDomainError("wire_resistance must be >= 0")
        if self.capacitance <= 0.0 or self.wire_cap <= 0.0:
            raise PhysicsDomainError("capacitances must be positive")

    @property
    def capacitance(self) -> float:
        if self.resonator_capacitance is not None:
            return self.resonator_capacitance
        if self.resonator_length is None:
            raise PhysicsDomainError(
                "resonator_capacitance or resonator_length required")
        return CONSTANTS.eps0 * self.resonator_length

    @property
    def wire_cap(self) -> float:
        if self.wire_capacitance is not None:
            return self.wire_capacitance
        return CONSTANTS.eps0 * self.wire_length


@dataclass(frozen=True)
class MagneticTip:
    """Magnetic field gradient of the tip, T/m."""

    gradient: float

    def __post_init__(self):
        if self.gradient < 0.0:
            raise PhysicsDomainError("gradient must be >= 0")


@dataclass(frozen=True)
class ThermalEnvironment:
    """Support temperature, mechanical quality and spin coherence inputs.

    ``precooled_occupation`` is None for thermal equilibrium; otherwise the
    resonator modes start at occupation N_i just before the gate.
    """

    temperature: float          # K
    mechanical_Q: float
    spin_T2: float              # s
    spin_alpha: float = 1.0
    precooled_occupation: float | None = None

    def __post_init__(self):
        if self.temperature < 0.0:
            raise PhysicsDomainError("temperature must be >= 0")
        if self.mechanical_Q <= 0.0:
            raise PhysicsDomainError("mechanical_Q must be positive")
        if self.spin_T2 <= 0.0:
            raise PhysicsDomainError("spin_T2 must be positive")
        if self.spin_alpha < 1.0:
            raise PhysicsDomainError("spin_alpha must be >= 1")
        if self.precooled_occupation is not None and self.precooled_occupation < 0.0:
            raise PhysicsDomainError("precooled_occupation must be >= 0")


@dataclass(frozen=True)
class DerivedScales:
    """Angular-frequency-scale model parameters derived from SI inputs."""

    omega_r: float      # rad/s
    a0: float           # m
    lam: float          # spin-phonon coupling, rad/s
    g: float            # electrostatic coupling, rad/s
    Q_el: float         # electrical Q (math.inf when no ohmic damping)
    N_th: float
    Gamma_m: float      # rad/s
    eta: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DerivedScales":
        return cls(**d)


def zero_point_motion(geometry: ResonatorGeometry, omega_r: float,
                      constants: PhysicalConstants = CONSTANTS) -> float:
    """RMS ground-state displacement a0 = sqrt(hbar / (2 m omega_r))."""
    if omega_r <= 0.0:
        raise PhysicsDomainError("omega_r must be positive")
    m = geometry.mass
    if m <= 0.0:
        raise PhysicsDomainError("effective mass must be positive")
    return math.sqrt(constants.hbar / (2.0 * m * omega_r))


def spin_phonon_coupling(tip: MagneticTip, a0: float,
                         constants: PhysicalConstants = CONSTANTS) -> float:
    """Zeeman shift per zero-point displacement: g_s mu_B G_m a0 / hbar."""
    if a0 <= 0.0:
        raise PhysicsDomainError("a0 must be positive")
    return constants.g_s * constants.mu_B * tip.gradient * a0 / constants.hbar


def electrostatic_coupling(circuit: CircuitGeometry, a0: float,
                           constants: PhysicalConstants = CONSTANTS) -> float:
    """Phonon-phonon coupling of two wired resonators (rad/s).

    g = C^2 C_w^2 U^2 / (hbar (2C + C_w)^3) * a0^2 / h^2. Quadratic in the
    bias voltage U.
    """
    if a0 <= 0.0:
        raise PhysicsDomainError("a0 must be positive")
    C = circuit.capacitance
    Cw = circuit.wire_cap
    U = circuit.bias_voltage
    h = circuit.electrode_gap
    return (C * C * Cw * Cw * U * U
            / (constants.hbar * (2.0 * C + Cw) ** 3)
            * (a0 / h) ** 2)


def electrical_quality_factor(circuit: CircuitGeometry, omega_r: float,
                              mass: float) -> float:
    """Effective Q of ohmic wire losses: omega_r m h^2 / (U^2 C^2 R).

    Returns math.inf when U = 0 or R = 0 (no current, no dissipation).
    """
    if omega_r <= 0.0 or mass <= 0.0:
        raise PhysicsDomainError("omega_r and mass must be positive")
    U = circuit.bias_voltage
    R = circuit.wire_resistance
    if U == 0.0 or R == 0.0:
        return math.inf
    C = circuit.capacitance
    return omega_r * mass * circuit.electrode_gap ** 2 / (U * U * C * C * R)


def thermal_scales(env: ThermalEnvironment, omega_r: float,
                   constants: PhysicalConstants = CONSTANTS) -> tuple[float, float]:
    """(N_th, Gamma_m): thermal occupation and motional decoherence rate."""
    if omega_r <= 0.0:
        raise PhysicsDomainError("omega_r must be positive")
    N_th = constants.k_B * env.temperature / (constants.hbar * omega_r)
    Gamma_m = constants.k_B * env.temperature / (constants.hbar * env.mechanical_Q)
    return N_th, Gamma_m


def derive_scales(geometry: ResonatorGeometry, circuit: CircuitGeometry,
                  tip: MagneticTip, env: ThermalEnvironment, omega_r: float,
                  constants: PhysicalConstants = CONSTANTS) -> DerivedScales:
    """Evaluate all derived scales for one device configuration."""
    a0 = zero_point_motion(geometry, omega_r, constants)
    lam = spin_phonon_coupling(tip, a0, constants)
    g = electrostatic_coupling(circuit, a0, constants)
    Q_el = electrical_quality_factor(circuit, omega_r, geometry.mass)
    N_th, Gamma_m = thermal_scales(env, omega_r, constants)
    return DerivedScales(omega_r=omega_r, a0=a0, lam=lam, g=g, Q_el=Q_el,
                         N_th=N_th, Gamma_m=Gamma_m, eta=lam / omega_r)


def total_mechanical_Q(mechanical_Q: float, Q_el: float) -> float:
    """Fold ohmic losses into the mechanical Q: 1/Q_tot = 1/Q + 1/Q_el."""
    if math.isinf(Q_el):
        return mechanical_Q
    return 1.0 / (1.0 / mechanical_Q + 1.0 / Q_el)
