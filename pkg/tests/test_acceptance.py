"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS/FAIL lines. Tolerances are pinned here and nowhere else.
"""
import numpy as np
import pytest

from spinbus.constants import CONSTANTS, TWO_PI
from spinbus.decoherence import BathState, OhmicDensity, gate_summary
from spinbus.device import (CircuitGeometry, ThermalEnvironment,
                            electrostatic_coupling, thermal_scales)
from spinbus.fidelity import approx_fidelity, optimize_omega_r
from spinbus.ising import (GatePlan, SpinState, apply_ideal_gate, gate_time,
                           ising_matrix)
from spinbus.layout import (Chain, ChainConvention, SingleWire,
                            build_coupling_matrix)
from spinbus.modes import (diagonalize, frequency_ratio_xi, mode_couplings,
                           uniform_chain_spectrum)
from spinbus.oracle import (TruncatedMode, conditional_overlap,
                            displaced_thermal_overlap, oracle_f_n)
from spinbus.pulses import (EchoFamily, PulseSequence, commensurate_tune,
                            equidistant_filter_squared)
from spinbus.scans import fig3_scan, lattice_delta_beta, local_maxima

W = TWO_PI * 1e6  # canonical 1 MHz resonator


def report(tag: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {tag}: {'PASS' if ok else 'FAIL'}"
          + (f"  [{detail}]" if detail else ""))
    assert ok, f"{tag} failed: {detail}"


def test_c01_electrostatic_coupling():
    circuit = CircuitGeometry(electrode_gap=0.1e-6, wire_length=100e-6,
                              bias_voltage=1.0, resonator_length=10e-6)
    g = electrostatic_coupling(circuit, 3.5e-13)
    rel = abs(g / TWO_PI - 95e3) / 95e3
    report("C1 electrostatic coupling 95 kHz within 3%", rel <= 0.03,
           f"g/2pi = {g / TWO_PI:.1f} Hz, rel = {rel:.4f}")


def test_c02_thermal_scales():
    env = ThermalEnvironment(temperature=0.1, mechanical_Q=1e6,
                             spin_T2=10e-3, spin_alpha=3.0)
    n_th, gamma_m = thermal_scales(env, W)
    rel = abs(gamma_m / TWO_PI - 2.08e3) / 2.08e3
    ok = rel <= 0.01 and 1e3 <= n_th <= 1e4
    report("C2 thermal scales", ok,
           f"Gamma_m/2pi = {gamma_m / TWO_PI:.1f} Hz (rel {rel:.4f}), "
           f"N_th = {n_th:.0f}")


def test_c03_spectra():
    ok = True
    detail = []
    g = 0.3 * W
    for n in (2, 3, 8):
        spec = diagonalize(build_coupling_matrix(SingleWire(n, g)), W)
        w0 = np.sqrt(W ** 2 + 2 * W * g * n / (n - 1))
        ok &= bool(np.max(np.abs(spec.omega[1:] - W)) <= 1e-12 * W)
        ok &= abs(spec.omega[0] - w0) <= 1e-10 * w0
    for n in (4, 16, 64):
        spec = diagonalize(build_coupling_matrix(
            Chain(n, 0.25 * W, ChainConvention.PAPER_UNIFORM)), W)
        closed = uniform_chain_spectrum(n, 0.25 * W, W)
        err = np.max(np.abs(spec.omega - closed) / closed)
        ok &= bool(err <= 1e-10)
    xi_small = frequency_ratio_xi(diagonalize(
        build_coupling_matrix(SingleWire(2, 1e-3 * W)), W))
    rel_small = abs(xi_small - (1 + 2e-3)) / (1 + 2e-3)
    xi_large = frequency_ratio_xi(diagonalize(
        build_coupling_matrix(SingleWire(2, 1e3 * W)), W))
    rel_large = abs(xi_large - 2e0 * np.sqrt(1e3)) / (2 * np.sqrt(1e3))
    ok &= rel_small <= 1e-4 and rel_large <= 0.01
    detail.append(f"xi limits rel = {rel_small:.2e}, {rel_large:.2e}")
    report("C3 spectra (star, uniform chain, xi limits)", ok, "; ".join(detail))


def test_c04_ising_couplings():
    lam = 0.1 * W
    eta = lam / W
    ok = True
    worst = 0.0
    for r in (1e-3, 1e-2, 0.1, 1.0, 10.0):
        spec = diagonalize(build_coupling_matrix(SingleWire(2, r * W)), W)
        couplings = ising_matrix(mode_couplings(spec, lam), spec)
        xi = spec.omega[0] / spec.omega[1]
        expected = eta ** 2 * W * (1 / xi - 1) / 4
        rel = abs(couplings.pair_coupling(0, 1) - expected) / abs(expected)
        worst = max(worst, rel)
        ok &= rel <= 1e-8
    # chain nearest neighbor: the edge bond carries the smallest local
    # frequency renormalization; the paper's eta^2 g/4 is the matrix entry
    g = 0.01 * W
    spec = diagonalize(build_coupling_matrix(Chain(8, g)), W)
    couplings = ising_matrix(mode_couplings(spec, lam), spec)
    rel_nn = abs(abs(couplings.M[0, 1]) - eta ** 2 * g / 4) / (eta ** 2 * g / 4)
    ok &= rel_nn <= 0.05
    ratios = {}
    for r in (0.003, 0.03):
        spec = diagonalize(build_coupling_matrix(Chain(8, r * W)), W)
        cpl = ising_matrix(mode_couplings(spec, lam), spec)
        ratios[r] = abs(cpl.M[3, 5]) / abs(cpl.M[3, 4])
    prop = ratios[0.03] / ratios[0.003]
    ok &= abs(prop - 10.0) / 10.0 <= 0.20
    report("C4 Ising couplings", ok,
           f"pair worst rel = {worst:.1e}; chain NN rel = {rel_nn:.3f}; "
           f"NNN ratio scaling = {prop:.2f}")


def test_c05_bell_state():
    spec = diagonalize(build_coupling_matrix(SingleWire(2, 0.5 * W)), W)
    couplings = ising_matrix(mode_couplings(spec, 0.1 * W), spec)
    t_g = gate_time(couplings, (0, 1))
    psi = apply_ideal_gate(SpinState.product_superposition(2),
                           GatePlan(couplings, t_g))
    target = SpinState(np.array([1.0, 1.0j, 1.0j, 1.0]) / 2.0)
    infid = 1.0 - psi.fidelity_with(target)
    report("C5 Bell state at t_g = pi/(4|M|)", infid < 1e-10,
           f"infidelity = {infid:.2e}")


def test_c06_filter_functions():
    rng = np.random.default_rng(2024)
    ok = True
    worst = 0.0
    for (k, n) in ((2, 1), (2, 3), (4, 2), (6, 1), (6, 3)):
        seq = EchoFamily(k, n, 1.0).sequence()
        w = rng.uniform(1e-3, 10.0, 10000)
        w = w[np.abs(np.cos(np.pi * w / k)) > 0.03]
        direct = np.abs(seq.beta(w)) ** 2
        closed = equidistant_filter_squared(w, k, n, 1.0)
        err = float(np.max(np.abs(direct - closed) / (1.0 + closed)))
        worst = max(worst, err)
        ok &= err <= 1e-12
    for (k, n, m) in ((4, 4, 5), (6, 2, 3), (4, 2, 3)):
        layout = commensurate_tune(k, n, m, 1.0, SingleWire(2, 0.1), rtol=1e-14)
        spec = diagonalize(build_coupling_matrix(layout), 1.0)
        seq = EchoFamily(k, n, 1.0).sequence()
        res = float(np.max(np.abs(seq.beta(spec.omega))))
        ok &= res <= 1e-12 * (seq.n_pulses + 2)
        worst = max(worst, res)
    report("C6 filter functions (closed form + commensurate zeros)", ok,
           f"worst deviation = {worst:.2e}")


def _thermal_bath(n_th: float):
    T = n_th * CONSTANTS.hbar * W / CONSTANTS.k_B
    Gamma_m = CONSTANTS.k_B * T / (CONSTANTS.hbar * 1e6)
    return BathState(T), OhmicDensity(1e6), Gamma_m


def test_c07_no_echo_closed_forms():
    bath, J, Gamma_m = _thermal_bath(1e3)
    lam = 0.05 * W
    ok = True
    details = []
    for (m, n) in ((11, 10), (3, 2), (2, 1), (3, 1)):
        xi = m / n
        layout = commensurate_tune(0, n, m, W, SingleWire(2, 0.1 * W))
        spec = diagonalize(build_coupling_matrix(layout), W)
        seq = PulseSequence(TWO_PI * n / W)
        gs = gate_summary(spec, J, bath, seq, lam, Gamma_m)
        r_ref = 3 * np.pi * (xi + 1 / xi) / (2 * (xi - 1))
        t_ref = np.pi * xi / (xi - 1)
        rel_r = abs(gs.R_xi - r_ref) / r_ref
        rel_t = abs(gs.tau_xi - t_ref) / t_ref
        ok &= rel_r <= 0.05 and rel_t <= 0.05
        details.append(f"xi={xi:g}: dR={rel_r:.1e}, dtau={rel_t:.1e}")
    report("C7 no-echo R(xi), tau(xi) closed forms within 5%", ok,
           "; ".join(details))


@pytest.fixture(scope="module")
def fig3_rows():
    grid = np.arange(1.02, 3.0001, 0.01)
    return fig3_scan([1, 4], grid, W, 0.05 * W, Q=1e6, N_th=1e3,
                     max_denominator=16, min_cycles=8)


def test_c08_resonance_structure(fig3_rows):
    ok = True
    details = []
    for k, resonances in ((1, (1.5, 2.5)), (4, (2.0,))):
        pts = sorted((r.xi, r.R) for r in fig3_rows if r.k == k)
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        maxima = local_maxima(xs, ys)
        for res in resonances:
            near = [x for x in maxima if abs(x - res) <= 0.05]
            # the peak must be prominent, not grid jitter
            sel = np.abs(xs - res) <= 0.05
            prominent = ys[sel].max() > 10 * np.median(ys)
            ok &= bool(near) and bool(prominent)
            details.append(
                f"k={k} near {res}: maxima at "
                f"{[f'{x:.3f}' for x in near]}, peak/median = "
                f"{ys[sel].max() / np.median(ys):.1f}")
    report("C8 R(xi) resonances at odd multiples of k/2", ok,
           "; ".join(details))


def test_c09_fast_pulse_scaling():
    bath, J, Gamma_m = _thermal_bath(1e3)
    layout = commensurate_tune(4, 4, 5, W, SingleWire(2, 0.1 * W))
    spec = diagonalize(build_coupling_matrix(layout), W)
    ks = (8, 16, 32, 64)
    m_effs = []
    for k in ks:
        seq = EchoFamily(k, 4, W).sequence()
        gs = gate_summary(spec, J, bath, seq, 0.05 * W, Gamma_m)
        m_effs.append(abs(gs.M_eff))
    slope = np.polyfit(np.log(ks), np.log(m_effs), 1)[0]
    report("C9 M_eff ~ 1/k^2", abs(slope + 2.0) <= 0.2,
           f"fit exponent = {slope:.3f}")


OPERATING_POINT = dict(lam=TWO_PI * 1e5, g=TWO_PI * 5e5,
                       Gamma_m=TWO_PI * 2.08e3, T2=10e-3, alpha=3.0)
INTERVAL = (TWO_PI * 1e3, TWO_PI * 5e6)


def test_c10_operating_point():
    p = OPERATING_POINT
    res = optimize_omega_r(p["lam"], p["g"], p["Gamma_m"], p["T2"],
                           p["alpha"], INTERVAL)
    report("C10 optimized fidelity >= 0.985 at the quoted point",
           res.F_opt >= 0.985,
           f"F_opt = {res.F_opt:.4f} at omega_r/2pi = "
           f"{res.omega_r_opt / TWO_PI:.3g} Hz")


def test_c11_error_scaling_map():
    lam, g, alpha = OPERATING_POINT["lam"], OPERATING_POINT["g"], 3.0
    gammas = TWO_PI * np.logspace(1, 5, 40)
    t2s = np.logspace(np.log10(10e-6), np.log10(100e-3), 40)
    xs, ys = [], []
    plateau_cs = []
    for gm in gammas:
        for t2 in t2s:
            res = optimize_omega_r(lam, g, float(gm), float(t2), alpha,
                                   INTERVAL)
            err = 1.0 - res.F_opt
            xi = np.sqrt(1 + 4 * g / res.omega_r_opt)
            budget = approx_fidelity(xi, lam=lam, omega_r=res.omega_r_opt,
                                     Gamma_m=float(gm), T2=float(t2),
                                     alpha=alpha, parts="resonant")
            if (not res.at_boundary and 1e-5 < err < 0.2
                    and budget.term_spin > 0.12 * err):
                xs.append(np.log(gm / (lam ** 2 * t2)))
                ys.append(np.log(err))
            if (res.at_boundary and err < 0.2
                    and budget.term_spin < 0.01 * err):
                plateau_cs.append(err / (gm / g))
    slope = np.polyfit(xs, ys, 1)[0]
    ok_slope = abs(slope - 0.75) <= 0.10
    c_lo, c_hi = min(plateau_cs), max(plateau_cs)
    ok_plateau = 0.3 <= c_lo and c_hi <= 3.0
    report("C11 error scaling (slope 3/4, plateau Gamma_m/g)",
           ok_slope and ok_plateau,
           f"slope = {slope:.3f} over {len(xs)} cells; plateau c in "
           f"[{c_lo:.2f}, {c_hi:.2f}] over {len(plateau_cs)} cells")


def test_c12_cluster_state_excitation():
    base = lattice_delta_beta(20, 20, 0.2, 4, 4)
    ok = 0.0075 <= base.delta_beta_sq <= 0.030
    longer = lattice_delta_beta(20, 20, 0.2, 4, 16)
    variation = abs(longer.delta_beta_sq - base.delta_beta_sq) \
        / base.delta_beta_sq
    ok &= variation < 0.25
    report("C12 lattice excitation", ok,
           f"dbeta^2 = {base.delta_beta_sq:.4f} (n=4), "
           f"{longer.delta_beta_sq:.4f} (n=16), variation = {variation:.2%}")


def test_c13_oracle_equivalence():
    from spinbus.decoherence import f_n_low_freq, f_n_precooled

    ok = True
    details = []
    # (a) undamped Lindblad vs displaced-thermal closed form
    seq = PulseSequence(2.3 * TWO_PI)
    worst = 0.0
    for n0, eta, dim in ((0.0, 0.1, 24), (2.0, 0.15, 56)):
        mode = TruncatedMode(dim=dim, omega_n=1.0, lambda_n=eta,
                             initial_occupation=n0)
        ov = abs(conditional_overlap(mode, 1.0, -1.0, seq,
                                     steps_per_period=600, tail_limit=1e-5))
        diff = abs(ov - displaced_thermal_overlap(mode, seq, 1.0, -1.0))
        worst = max(worst, diff)
    ok &= worst <= 1e-6
    details.append(f"(a) overlap diff = {worst:.1e}")
    # (b) pre-cooled coefficients vs oracle (damped-mode content; the
    # sub-resonant low-frequency term has no Lindblad counterpart)
    wn, eta_n = 1.25, 0.15
    seq4 = EchoFamily(4, 4, 1.0).sequence()
    worst = 0.0
    for n_i, n_b, gt, dim in ((0.0, 10.0, 0.05, 56), (2.0, 10.0, 0.05, 72),
                              (1.0, 5.0, 0.02, 64)):
        gamma = gt / seq4.t_g
        bath = BathState.from_occupation(n_b, wn, precooled=n_i)
        J = OhmicDensity(Q=wn / gamma)
        formula = (f_n_precooled(J, bath, seq4, wn, eta_n)
                   - f_n_low_freq(J, bath, seq4, wn, eta_n))
        mode = TruncatedMode(dim=dim, omega_n=wn, lambda_n=eta_n * wn,
                             gamma_n=gamma, bath_occupation=n_b,
                             initial_occupation=n_i)
        rel = abs(formula / oracle_f_n(mode, seq4, steps_per_period=300) - 1)
        worst = max(worst, rel)
    ok &= worst <= 0.05
    details.append(f"(b) worst rel = {worst:.3f}")
    # (c) pulse-error coefficient independent of the bath occupation
    wn2 = 1.37
    seq_d = EchoFamily(4, 2, 1.0).sequence()
    seq_c = EchoFamily(4, 2, wn2).sequence()
    b2 = abs(seq_d.beta_scalar(wn2)) ** 2
    coefs = []
    for n_b in (2.5, 10.0):
        m1 = TruncatedMode(dim=64, omega_n=wn2, lambda_n=0.12 * wn2,
                           gamma_n=0.004 / seq_d.t_g, bath_occupation=n_b,
                           initial_occupation=0.0)
        m2 = TruncatedMode(dim=64, omega_n=wn2, lambda_n=0.12 * wn2,
                           gamma_n=0.004 / seq_c.t_g, bath_occupation=n_b,
                           initial_occupation=0.0)
        f1 = oracle_f_n(m1, seq_d, steps_per_period=300)
        f2 = oracle_f_n(m2, seq_c, steps_per_period=300)
        coefs.append((f1 - f2) / (4 * 0.12 ** 2 * b2))
    variation = abs(coefs[1] - coefs[0]) / coefs[0]
    ok &= variation < 0.10
    details.append(f"(c) coef = {coefs[0]:.3f} -> {coefs[1]:.3f} "
                   f"({variation:.1%})")
    report("C13 oracle equivalence", ok, "; ".join(details))


def test_c14_property_suites():
    # the randomized module invariants live in test_properties.py; run the
    # compact core here so the acceptance suite is self-contained
    import importlib.util
    import pathlib

    spec = importlib.util.spec_from_file_location(
        "prop_suites", pathlib.Path(__file__).with_name("test_properties.py"))
    props = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(props)

    checks = [
        props.test_random_layouts_symmetric_psd,
        props.test_random_spectra_parseval_and_eigen_identity,
        props.test_random_sequences_weight_closure,
        props.test_random_states_gate_unitarity,
        props.test_random_exact_fidelity_bounds,
        props.test_quadrature_halving_on_decoherence_integrals,
        props.test_quadrature_determinism,
    ]
    for check in checks:
        check()
    report("C14 randomized property suites", True,
           f"{len(checks)} suites re-run")
