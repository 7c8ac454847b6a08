"""Cross-validation battery behind the ``oracle`` CLI task.

Each check pits an analytic or quadrature result against the independent
truncated-Fock integration and reports the relative error. Sizes are kept
small so the suite runs in seconds.
"""
from __future__ import annotations

import warnings

from .constants import TWO_PI
from .decoherence import (BathState, OhmicDensity, exact_phase_undamped,
                          f_n_low_freq, f_n_precooled)
from .layout import Lattice2D
from .modes import diagonalize
from .oracle import (TruncatedMode, brute_force_delta_beta,
                     conditional_overlap, displaced_thermal_overlap,
                     oracle_f_n, oracle_geometric_phase)
from .pulses import EchoFamily, PulseSequence, delta_beta
from .layout import build_coupling_matrix


def _row(name: str, value: float, reference: float, tol: float):
    denom = max(abs(reference), 1e-300)
    rel = (value - reference) / denom
    status = "PASS" if abs(rel) <= tol else "FAIL"
    return [name, value, reference, rel, tol, status]


def run_oracle_suite(steps_per_period: int = 300) -> list[list]:
    rows = []
    w = 1.0

    # undamped overlap vs displaced-thermal closed form
    seq = PulseSequence(2.3 * TWO_PI / w)
    for n0, eta, dim in ((0.0, 0.1, 24), (2.0, 0.15, 56)):
        mode = TruncatedMode(dim=dim, omega_n=w, lambda_n=eta * w,
                             initial_occupation=n0)
        ov = abs(conditional_overlap(mode, 1.0, -1.0, seq,
                                     steps_per_period=2 * steps_per_period))
        ref = displaced_thermal_overlap(mode, seq, 1.0, -1.0)
        rows.append(_row(f"undamped_overlap_N0={n0}", ov, ref, 1e-6))

    # geometric phase vs undamped closed form
    seqk = EchoFamily(2, 2, w).sequence()
    mode = TruncatedMode(dim=24, omega_n=1.25 * w, lambda_n=0.08 * 1.25,
                         initial_occupation=0.0)
    ph = oracle_geometric_phase(mode, seqk, steps_per_period=2 * steps_per_period)
    ref = exact_phase_undamped(seqk, 1.25 * w, 0.08)
    rows.append(_row("geometric_phase_undamped", ph, ref, 1e-5))

    # damped coefficients vs the pre-cooled formula (its damped-mode content;
    # the low-frequency term is sub-resonant continuum noise the Lindblad
    # bath cannot represent, so it is subtracted on the formula side)
    wn, eta_n = 1.25, 0.15
    seq4 = EchoFamily(4, 4, w).sequence()
    gamma = 0.05 / seq4.t_g
    for n_i, n_b, dim in ((0.0, 10.0, 56), (2.0, 10.0, 72)):
        bath = BathState.from_occupation(n_b, wn, precooled=n_i)
        J = OhmicDensity(Q=wn / gamma)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            formula = (f_n_precooled(J, bath, seq4, wn, eta_n)
                       - f_n_low_freq(J, bath, seq4, wn, eta_n))
        mode = TruncatedMode(dim=dim, omega_n=wn, lambda_n=eta_n * wn,
                             gamma_n=gamma, bath_occupation=n_b,
                             initial_occupation=n_i)
        fo = oracle_f_n(mode, seq4, steps_per_period=steps_per_period)
        rows.append(_row(f"precooled_Fn_Ni={n_i}", formula, fo, 0.05))

    # pulse-error term scales with the initial, not the bath, occupation
    wn2 = 1.37
    seq_d = EchoFamily(4, 2, w).sequence()
    seq_c = EchoFamily(4, 2, wn2).sequence()
    b2 = abs(seq_d.beta_scalar(wn2)) ** 2
    coefs = []
    for n_b in (2.5, 10.0):
        gamma_d = 0.004 / seq_d.t_g
        m1 = TruncatedMode(dim=64, omega_n=wn2, lambda_n=0.12 * wn2,
                           gamma_n=gamma_d, bath_occupation=n_b,
                           initial_occupation=0.0)
        f1 = oracle_f_n(m1, seq_d, steps_per_period=steps_per_period)
        m2 = TruncatedMode(dim=64, omega_n=wn2, lambda_n=0.12 * wn2,
                           gamma_n=0.004 / seq_c.t_g, bath_occupation=n_b,
                           initial_occupation=0.0)
        f2 = oracle_f_n(m2, seq_c, steps_per_period=steps_per_period)
        coefs.append((f1 - f2) / (4 * 0.12 ** 2 * b2))
    rows.append(_row("pulse_error_coef_Nbath_independence",
                     coefs[1], coefs[0], 0.10))

    # independent delta-beta re-summation
    spec = diagonalize(build_coupling_matrix(Lattice2D(6, 6, 0.2)), 1.0)
    seq_l = EchoFamily(8, 4, float(spec.omega[0])).sequence()
    db = delta_beta(spec, seq_l)
    db_brute = brute_force_delta_beta(Lattice2D(6, 6, 0.2), seq_l, 1.0)
    rows.append(_row("delta_beta_resummation", db, db_brute, 1e-10))
    return rows
