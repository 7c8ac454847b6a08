import numpy as np
import pytest

from spinbus.constants import TWO_PI
from spinbus.errors import PhysicsDomainError
from spinbus.ising import (GatePlan, SpinState, apply_ideal_gate,
                           basis_spin_values, collective_phase_pattern,
                           gate_time, ising_matrix, ising_phases,
                           phases_equal_up_to_global)
from spinbus.layout import Chain, SingleWire, build_coupling_matrix
from spinbus.modes import diagonalize, mode_couplings

W = TWO_PI * 1e6
LAM = 0.1 * W


def couplings_for(layout):
    spec = diagonalize(build_coupling_matrix(layout), W)
    return ising_matrix(mode_couplings(spec, LAM), spec), spec


def test_two_site_pair_coupling_closed_form():
    eta = LAM / W
    for r in (1e-3, 0.03, 1.0, 10.0):
        couplings, spec = couplings_for(SingleWire(2, r * W))
        xi = spec.omega[0] / spec.omega[1]
        expected = eta ** 2 * W * (1 / xi - 1) / 4
        assert couplings.pair_coupling(0, 1) == pytest.approx(expected, rel=1e-8)


def test_chain_nearest_neighbor_scale():
    eta = LAM / W
    g = 0.01 * W
    couplings, _ = couplings_for(Chain(8, g))
    # edge bond carries the smallest frequency renormalization
    assert abs(couplings.M[0, 1]) == pytest.approx(eta ** 2 * g / 4, rel=0.05)


def test_chain_next_nearest_ratio():
    ratios = {}
    for r in (0.003, 0.03):
        couplings, _ = couplings_for(Chain(8, r * W))
        ratios[r] = abs(couplings.M[3, 5]) / abs(couplings.M[3, 4])
    assert ratios[0.03] / ratios[0.003] == pytest.approx(10.0, rel=0.20)


def test_degenerate_modes_no_coupling():
    couplings, _ = couplings_for(SingleWire(2, 0.0))
    assert np.allclose(couplings.M, 0.0)


def test_gate_time_inverse_coupling():
    c1, _ = couplings_for(SingleWire(2, 0.5 * W))
    t1 = gate_time(c1, (0, 1))
    assert t1 * abs(c1.pair_coupling(0, 1)) == pytest.approx(np.pi / 4, rel=1e-14)
    with pytest.raises(PhysicsDomainError):
        c0, _ = couplings_for(SingleWire(2, 0.0))
        gate_time(c0, (0, 1))


def test_bell_state_generation():
    couplings, _ = couplings_for(SingleWire(2, 0.5 * W))
    t_g = gate_time(couplings, (0, 1))
    psi = apply_ideal_gate(SpinState.product_superposition(2),
                           GatePlan(couplings, t_g))
    target = SpinState(np.array([1.0, 1.0j, 1.0j, 1.0]) / 2.0)
    assert 1.0 - psi.fidelity_with(target) < 1e-10


def test_identity_and_unitarity():
    couplings, _ = couplings_for(SingleWire(3, 0.4 * W))
    rng = np.random.default_rng(13)
    amp = rng.normal(size=8) + 1j * rng.normal(size=8)
    amp /= np.linalg.norm(amp)
    state = SpinState(amp)
    out = apply_ideal_gate(state, GatePlan(couplings, 1.0 / abs(
        couplings.pair_coupling(0, 1))))
    assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.abs(out.amplitudes), np.abs(state.amplitudes),
                       atol=1e-12)
    zero, _ = couplings_for(SingleWire(3, 0.0))
    out = apply_ideal_gate(state, GatePlan(zero, 1.0))
    assert np.allclose(out.amplitudes, state.amplitudes)


def test_collective_model_matches_star():
    couplings, _ = couplings_for(SingleWire(3, 0.3 * W))
    J_pair = couplings.pair_coupling(0, 1)
    M_collective = J_pair * 3 / 2  # pairwise entries are M_c / N
    t = 0.2 / abs(J_pair)
    exact = ising_phases(couplings, t)
    collective = collective_phase_pattern(3, M_collective, t)
    assert phases_equal_up_to_global(exact, collective, atol=1e-9)


def test_collective_pattern_edges():
    assert np.allclose(collective_phase_pattern(3, 1.0, 0.0), 0.0)
    phases = collective_phase_pattern(3, 0.7, 1.3)
    assert phases[0] == pytest.approx(0.7 * 1.3 * 3)  # all-|0>: (sum s)^2/N = N


def test_collective_two_site_equals_gate():
    couplings, _ = couplings_for(SingleWire(2, 0.5 * W))
    J = couplings.pair_coupling(0, 1)
    t = 0.31 / abs(J)
    exact = ising_phases(couplings, t)
    collective = collective_phase_pattern(2, J, t)
    assert phases_equal_up_to_global(exact, collective, atol=1e-9)


def test_mode_phase_gate_equals_ising_gate():
    layout = SingleWire(3, 0.3 * W)
    spec = diagonalize(build_coupling_matrix(layout), W)
    couplings = ising_matrix(mode_couplings(spec, LAM), spec)
    t = 0.15 / abs(couplings.pair_coupling(0, 1))
    # bare mode phases Phi_n = lambda^2 t / (4 w_n)
    phi_n = LAM ** 2 * t / (4 * spec.omega)
    state = SpinState.product_superposition(3)
    via_modes = apply_ideal_gate(state, GatePlan(couplings, t),
                                 mode_phases=phi_n, spectrum=spec)
    via_ising = apply_ideal_gate(state, GatePlan(couplings, t))
    overlap = abs(np.vdot(via_modes.amplitudes, via_ising.amplitudes))
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_state_validation():
    with pytest.raises(PhysicsDomainError):
        SpinState(np.array([1.0, 1.0]))  # unnormalized
    with pytest.raises(PhysicsDomainError):
        SpinState(np.zeros(3))  # not 2^N
    with pytest.raises(PhysicsDomainError):
        SpinState(np.ones(2 ** 15) / 2 ** 7.5)  # above the qubit cap
    s = basis_spin_values(2)
    assert np.array_equal(s, [[1, 1], [1, -1], [-1, 1], [-1, -1]])
