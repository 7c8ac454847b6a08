"""spinbus: design tool for phonon-mediated spin-spin entangling gates in
charged nanomechanical resonator arrays."""

__version__ = "0.1.0"

from .constants import CONSTANTS, PhysicalConstants
from .device import (CircuitGeometry, DerivedScales, MagneticTip,
                     ResonatorGeometry, ThermalEnvironment, derive_scales,
                     electrical_quality_factor, electrostatic_coupling,
                     spin_phonon_coupling, thermal_scales, zero_point_motion)
from .errors import (BuckledLayoutError, ConfigError, ConvergenceError,
                     PhysicsDomainError, SpinBusError)
from .layout import (Boundary, Chain, ChainConvention, CouplingMatrix, Custom,
                     Lattice2D, SingleWire, TwoRegister, Wire,
                     build_coupling_matrix, switch_factor_from_voltage,
                     wire_quadratic_form)
from .modes import (ModeCouplings, PhononSpectrum, diagonalize,
                    frequency_ratio_xi, mode_couplings)
from .pulses import (EchoFamily, PulseSequence, beta, commensurate_tune,
                     delta_beta, equidistant_filter_squared, snap_xi,
                     switching_function)
from .decoherence import (BathState, ConstantDensity, GateSummary,
                          ModeDecoherence, OhmicDensity, ZeroDensity,
                          damped_response_integral, f_n_equilibrium,
                          f_n_low_freq, f_n_precooled, gate_summary,
                          geometric_phase, j_eff, mode_decoherence)
from .ising import (GatePlan, IsingCouplings, SpinState, apply_ideal_gate,
                    collective_phase_pattern, gate_time, ising_matrix)
from .fidelity import (FidelityBudget, OptimizationResult, approx_fidelity,
                       exact_fidelity, fig4_map, no_echo_R, no_echo_tau,
                       optimize_omega_r, spin_dephasing)
from .oracle import (TruncatedMode, brute_force_delta_beta,
                     conditional_overlap, displaced_thermal_overlap,
                     evolve_conditional, oracle_f_n, oracle_geometric_phase)
from .scans import fig3_scan, lattice_delta_beta
