import numpy as np
import pytest

from spinbus.constants import CONSTANTS, TWO_PI
from spinbus.decoherence import (BathState, ConstantDensity, OhmicDensity,
                                 ZeroDensity, coth_factor,
                                 damped_response_integral,
                                 exact_phase_undamped, f_n_equilibrium,
                                 f_n_low_freq, f_n_precooled, gate_summary,
                                 geometric_phase, j_eff, mode_decoherence)
from spinbus.errors import PhysicsDomainError
from spinbus.layout import SingleWire, build_coupling_matrix
from spinbus.modes import diagonalize
from spinbus.pulses import EchoFamily, PulseSequence, commensurate_tune

W = TWO_PI * 1e6


def bath_with_occupation(n_th: float, omega_n: float,
                         precooled=None) -> BathState:
    return BathState.from_occupation(n_th, omega_n, precooled)


def test_j_eff_at_resonance():
    Q = 1e5
    J = OhmicDensity(Q)
    assert j_eff(J, W, np.array([W]))[0] == pytest.approx(Q * W, rel=1e-12)


def test_j_eff_low_frequency_limit():
    J = OhmicDensity(1e6)
    w = np.array([1e-3 * W])
    assert j_eff(J, W, w)[0] == pytest.approx(J.j(w)[0], rel=3e-6)


def test_j_eff_zero_density():
    assert np.all(j_eff(ZeroDensity(), W, np.linspace(0.1 * W, 3 * W, 7)) == 0)


def test_coth_guards():
    assert np.all(coth_factor(np.array([0.5 * W, 2 * W]), 0.0) == 1.0)
    T = 0.1
    w_small = np.array([1e-9 * CONSTANTS.k_B * T / CONSTANTS.hbar])
    expected = 2 * CONSTANTS.k_B * T / (CONSTANTS.hbar * w_small[0])
    assert coth_factor(w_small, T)[0] == pytest.approx(expected, rel=1e-6)


def test_bare_ising_recovery():
    # no pulses, high Q: Phi_n -> eta_n^2 w_n t_g / 4 within 0.1%
    seq = PulseSequence(TWO_PI / W)
    eta = 0.05
    phi = geometric_phase(OhmicDensity(1e8), seq, W, eta)
    assert phi == pytest.approx(eta ** 2 * W * seq.t_g / 4, rel=1e-3)


def test_geometric_phase_zero_eta():
    seq = PulseSequence(TWO_PI / W)
    assert geometric_phase(OhmicDensity(1e6), seq, W, 0.0) == 0.0


def test_geometric_phase_zero_density_closed_form():
    seq = PulseSequence(TWO_PI / W)
    eta = 0.07
    phi = geometric_phase(ZeroDensity(), seq, W, eta)
    # t_g/w - sin(w t_g)/w^2 bracket at commensurate t_g
    assert phi == pytest.approx(eta ** 2 * W * seq.t_g / 4, rel=1e-12)


def test_geometric_phase_constant_density_rejected():
    with pytest.raises(PhysicsDomainError):
        geometric_phase(ConstantDensity(1.0), PulseSequence(TWO_PI / W), W, 0.1)


def test_phase_quadrature_matches_undamped_closed_form():
    # large-Q ohmic phase -> exact undamped value at a commensurate point
    # (n = 4 cycles make 1.25 w_r commensurate: beta(w_n) = 0 there, where
    # the interior-pulse phase integral and the full switching history agree)
    seq = EchoFamily(4, 4, W).sequence()
    wn = 1.25 * W
    eta = 0.06
    phi = geometric_phase(OhmicDensity(1e8), seq, wn, eta)
    assert phi == pytest.approx(exact_phase_undamped(seq, wn, eta), rel=2e-3)


def test_f_low_freq_ohmic_no_echo():
    seq = PulseSequence(TWO_PI / W)
    eta = 0.05
    n_th = 1e3
    bath = bath_with_occupation(n_th, W)
    Q = 1e6
    Gamma_m = CONSTANTS.k_B * bath.temperature / (CONSTANTS.hbar * Q)
    fl = f_n_low_freq(OhmicDensity(Q), bath, seq, W, eta)
    assert fl == pytest.approx(2 * eta ** 2 * Gamma_m * seq.t_g, rel=0.02)


def test_f_equilibrium_commensurate_total():
    # low-frequency (2x) plus resonant response (1x) of eta^2 Gamma_m t_g
    seq = PulseSequence(TWO_PI / W)
    eta = 0.05
    bath = bath_with_occupation(1e3, W)
    Q = 1e6
    Gamma_m = CONSTANTS.k_B * bath.temperature / (CONSTANTS.hbar * Q)
    fn = f_n_equilibrium(OhmicDensity(Q), bath, seq, W, eta)
    assert fn == pytest.approx(3 * eta ** 2 * Gamma_m * seq.t_g, rel=0.01)


def test_f_equilibrium_isolated_mode_limit():
    seq = PulseSequence(2.3 * TWO_PI / W)  # non-commensurate: beta != 0
    eta = 0.05
    for n_th in (10.0, 100.0):
        bath = bath_with_occupation(n_th, W)
        fn = f_n_equilibrium(OhmicDensity(1e8), bath, seq, W, eta)
        target = 4 * eta ** 2 * (n_th + 0.5) * abs(seq.beta_scalar(W)) ** 2
        assert fn == pytest.approx(target, rel=0.02)


def test_f_equilibrium_monotone_in_temperature():
    seq = EchoFamily(4, 2, W).sequence()
    eta = 0.05
    vals = []
    for n_th in (50.0, 200.0, 800.0):
        bath = bath_with_occupation(n_th, 1.25 * W)
        vals.append(f_n_equilibrium(OhmicDensity(1e6), bath, seq, 1.25 * W, eta))
    assert vals[0] < vals[1] < vals[2]
    assert all(v >= 0 for v in vals)


def test_f_zero_density_reduces_to_residual():
    seq = PulseSequence(2.3 * TWO_PI / W)
    bath = bath_with_occupation(20.0, W)
    eta = 0.1
    fn = f_n_equilibrium(ZeroDensity(), bath, seq, W, eta)
    assert fn == pytest.approx(
        4 * eta ** 2 * 20.5 * abs(seq.beta_scalar(W)) ** 2, rel=1e-10)


def test_constant_density_log_growth():
    # 1/f surrogate with echo: F^l grows sub-linearly in t_g
    eta = 0.05
    J = ConstantDensity(1e-6 * W)
    vals = []
    for n in (2, 4, 8, 16):
        seq = EchoFamily(2, n, W).sequence()
        bath = bath_with_occupation(1e3, W)
        vals.append(f_n_low_freq(J, bath, seq, 1.5 * W, eta))
    ts = np.log([2, 4, 8, 16])
    slope = np.polyfit(ts, np.log(vals), 1)[0]
    assert slope < 1.0


def test_constant_density_zero_frequency_filter():
    # lim_{w->0} J |beta|^2 / w^3 = 0 for balanced echo sequences:
    # |beta|^2 ~ w^4, so the ratio decays linearly in w
    seq = EchoFamily(2, 2, W).sequence()
    w = np.array([1e-4 * W, 1e-5 * W])
    vals = np.abs(seq.beta(w)) ** 2 / w ** 3
    assert vals[1] < 0.15 * vals[0]


def test_precooled_gamma_zero_residual_only():
    seq = PulseSequence(2.3 * TWO_PI / W)
    eta = 0.1
    bath = bath_with_occupation(1e3, W, precooled=2.0)
    fn = f_n_precooled(ZeroDensity(), bath, seq, W, eta)
    assert fn == pytest.approx(
        4 * eta ** 2 * 2.5 * abs(seq.beta_scalar(W)) ** 2, rel=1e-10)


def test_precooled_pulse_error_scales_with_initial_occupation():
    seq = PulseSequence(2.3 * TWO_PI / W)
    eta = 0.1
    Q = 1e6
    b2 = abs(seq.beta_scalar(W)) ** 2
    f0 = f_n_precooled(OhmicDensity(Q), bath_with_occupation(1e3, W, 0.0),
                       seq, W, eta)
    f5 = f_n_precooled(OhmicDensity(Q), bath_with_occupation(1e3, W, 5.0),
                       seq, W, eta)
    assert f5 - f0 == pytest.approx(4 * eta ** 2 * 5.0 * b2, rel=1e-3)


def test_precooled_warns_when_not_cold():
    seq = PulseSequence(TWO_PI / W)
    bath = bath_with_occupation(10.0, W, precooled=9.0)
    with pytest.warns(UserWarning):
        f_n_precooled(OhmicDensity(1e6), bath, seq, W, 0.05)


def test_damped_response_integral_no_echo():
    seq = PulseSequence(2 * TWO_PI / W)
    # (w^2/4) int |Pf|^2 = t_g / 2 at a commensurate point
    assert damped_response_integral(seq, W) == pytest.approx(seq.t_g / 2, rel=1e-10)


def test_gate_summary_no_echo_closed_forms():
    eta = 0.05
    lam = eta * W
    bath = bath_with_occupation(1e3, W)
    Q = 1e6
    Gamma_m = CONSTANTS.k_B * bath.temperature / (CONSTANTS.hbar * Q)
    for (m, n) in ((2, 1), (3, 2)):
        xi = m / n
        layout = commensurate_tune(0, n, m, W, SingleWire(2, 0.1 * W))
        spec = diagonalize(build_coupling_matrix(layout), W)
        seq = PulseSequence(TWO_PI * n / W)
        gs = gate_summary(spec, OhmicDensity(Q), bath, seq, lam, Gamma_m)
        assert gs.R_xi == pytest.approx(
            3 * np.pi * (xi + 1 / xi) / (2 * (xi - 1)), rel=0.01)
        assert gs.tau_xi == pytest.approx(np.pi * xi / (xi - 1), rel=1e-6)
        assert gs.M_eff < 0  # above-resonance coupling is negative


def test_gate_summary_requires_two_modes():
    bath = bath_with_occupation(1e3, W)
    spec = diagonalize(build_coupling_matrix(SingleWire(3, 0.1 * W)), W)
    with pytest.raises(PhysicsDomainError):
        gate_summary(spec, OhmicDensity(1e6), bath, PulseSequence(TWO_PI / W),
                     0.05 * W, 1.0)


def test_mode_decoherence_bundle():
    layout = commensurate_tune(4, 4, 5, W, SingleWire(2, 0.1 * W))
    spec = diagonalize(build_coupling_matrix(layout), W)
    seq = EchoFamily(4, 4, W).sequence()
    bath = bath_with_occupation(500.0, W)
    dec = mode_decoherence(spec, OhmicDensity(1e6), bath, seq, 0.05 * W)
    assert dec.phi_n.shape == (2,)
    assert np.all(dec.f_n >= 0)
    assert np.all(dec.f_n_lowfreq >= 0)
    assert dec.gamma_n[0] == pytest.approx(spec.omega[0] / 1e6)
