"""Scenario-driven command line front end.

Every task reads a TOML scenario, writes one or more CSV files plus a JSON
run manifest (resolved config, wall time, sha256 of each CSV), and exits
with 0 on success, 2 on configuration errors, 3 on physics-domain errors,
4 on numerical-convergence failures. Identical configs produce byte
identical CSVs: floats are written with repr (shortest round-trip decimal).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import (Scenario, build_bath, build_device, build_layout,
                     build_pulses, load_scenario, TASKS, _number)
from .constants import TWO_PI
from .device import derive_scales
from .errors import ConfigError, ConvergenceError, PhysicsDomainError
from .layout import build_coupling_matrix
from .modes import diagonalize, frequency_ratio_xi, mode_couplings

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_NUMERICS = 4


def _fmt(value) -> str:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, task: str, scenario: Scenario,
                   outputs: list[Path], wall_time: float) -> Path:
    manifest = {
        "tool": "spinbus",
        "version": __version__,
        "task": task,
        "config": scenario.raw,
        "seed": scenario.seed,
        "wall_time_s": wall_time,
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    path = out_dir / f"{task}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# task runners: each returns a list of written CSV paths

def task_device_params(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    dev = build_device(scenario.section("device"))
    scales = derive_scales(dev.geometry, dev.circuit, dev.tip, dev.env,
                           dev.omega_r)
    rows = [
        ("omega_r_hz", scales.omega_r / TWO_PI),
        ("a0_m", scales.a0),
        ("lambda_hz", scales.lam / TWO_PI),
        ("g_hz", scales.g / TWO_PI),
        ("Q_el", scales.Q_el),
        ("N_th", scales.N_th),
        ("Gamma_m_hz", scales.Gamma_m / TWO_PI),
        ("eta", scales.eta),
    ]
    path = out_dir / "device_params.csv"
    write_csv(path, ["quantity", "value"], rows)
    return [path]


def _spectrum_for(scenario: Scenario):
    dev = build_device(scenario.section("device"))
    layout = build_layout(scenario.require("layout"), scenario.base_dir)
    G = build_coupling_matrix(layout)
    spectrum = diagonalize(G, dev.omega_r)
    return dev, layout, spectrum


def task_spectrum(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    _dev, _layout, spectrum = _spectrum_for(scenario)
    header = ["mode", "frequency_hz"] + [f"c_{i+1}" for i in
                                         range(spectrum.n_modes)]
    rows = [[n, spectrum.omega[n] / TWO_PI, *spectrum.coeffs[n]]
            for n in range(spectrum.n_modes)]
    path = out_dir / "spectrum.csv"
    write_csv(path, header, rows)
    return [path]


def task_ising(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    from .ising import ising_matrix

    dev, _layout, spectrum = _spectrum_for(scenario)
    scales = derive_scales(dev.geometry, dev.circuit, dev.tip, dev.env,
                           dev.omega_r)
    couplings = ising_matrix(mode_couplings(spectrum, scales.lam), spectrum)
    n = couplings.n_spins
    header = ["i"] + [f"j{j+1}" for j in range(n)]
    paths = []
    for name, scale in (("ising_rad.csv", 1.0), ("ising_hz.csv", 1.0 / TWO_PI)):
        rows = [[i, *(couplings.M[i] * scale)] for i in range(n)]
        path = out_dir / name
        write_csv(path, header, rows)
        paths.append(path)
    return paths


def task_fidelity(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    from .decoherence import gate_summary, mode_decoherence
    from .fidelity import approx_fidelity, exact_fidelity, spin_dephasing
    from .ising import SpinState

    dev, _layout, spectrum = _spectrum_for(scenario)
    scales = derive_scales(dev.geometry, dev.circuit, dev.tip, dev.env,
                           dev.omega_r)
    seq = build_pulses(scenario.require("pulses"), dev.omega_r)
    J, bath, Gamma_m = build_bath(scenario.require("bath"), dev)
    rtol = args.tolerance
    if spectrum.n_modes != 2:
        raise PhysicsDomainError("the fidelity task expects a two-site layout")
    xi = frequency_ratio_xi(spectrum)
    summary = gate_summary(spectrum, J, bath, seq, scales.lam, Gamma_m,
                           rtol=rtol)
    dec = mode_decoherence(spectrum, J, bath, seq, scales.lam, rtol=rtol)
    t_gate = np.pi / (4.0 * abs(summary.M_eff))
    from .fidelity import effective_occupation
    from .pulses import delta_beta
    occupation = effective_occupation(scales.N_th, bath.precooled)
    budget = approx_fidelity(xi, lam=scales.lam, omega_r=dev.omega_r,
                             Gamma_m=Gamma_m, T2=dev.env.spin_T2,
                             alpha=dev.env.spin_alpha,
                             occupation=occupation,
                             delta_beta_sq=delta_beta(spectrum, seq) ** 2,
                             R_value=summary.R_xi, tau_value=summary.tau_xi)
    state = SpinState.product_superposition(2)
    f_exact = exact_fidelity(state, dec.f_n, spectrum,
                             spin_loss=spin_dephasing(t_gate, dev.env.spin_T2,
                                                      dev.env.spin_alpha))
    rows = [
        ("xi", xi),
        ("M_eff_hz", summary.M_eff / TWO_PI),
        ("Gamma_eff_hz", summary.Gamma_eff / TWO_PI),
        ("R", summary.R_xi),
        ("tau", summary.tau_xi),
        ("t_gate_ms", t_gate * 1e3),
        ("F_approx", budget.total),
        ("term_pulse_error", budget.term_pulse_error),
        ("term_motional", budget.term_motional),
        ("term_spin", budget.term_spin),
        ("F_exact", f_exact),
        ("Phi_0", dec.phi_n[0]),
        ("Phi_1", dec.phi_n[1]),
        ("F_0", dec.f_n[0]),
        ("F_1", dec.f_n[1]),
    ]
    path = out_dir / "fidelity.csv"
    write_csv(path, ["quantity", "value"], rows)
    return [path]


def task_fig3(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    from .scans import fig3_scan

    dev = build_device(scenario.section("device"))
    scales = derive_scales(dev.geometry, dev.circuit, dev.tip, dev.env,
                           dev.omega_r)
    sec = scenario.section("fig3")
    xi_min = _number(sec, "xi_min", default=1.02)
    xi_max = _number(sec, "xi_max", default=3.0)
    xi_step = _number(sec, "xi_step", default=0.02, positive=True)
    k_list = sec.get("k_list", [0, 1, 4, 6])
    if not isinstance(k_list, list) or not all(isinstance(k, int) for k in k_list):
        raise ConfigError("fig3 k_list must be a list of integers")
    max_den = int(_number(sec, "max_denominator", default=16, positive=True))
    min_cycles = int(_number(sec, "min_cycles", default=8, positive=True))
    grid = np.arange(xi_min, xi_max + 0.5 * xi_step, xi_step)
    rows = fig3_scan(k_list, grid, dev.omega_r, scales.lam,
                     Q=dev.env.mechanical_Q, N_th=scales.N_th,
                     max_denominator=max_den, min_cycles=min_cycles,
                     rtol=args.tolerance, jobs=args.jobs)
    path = out_dir / "fig3.csv"
    write_csv(path, ["xi", "k", "R", "tau"],
              [[r.xi, r.k, r.R, r.tau] for r in rows])
    return [path]


def task_fig4(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    from .fidelity import optimize_omega_r

    dev = build_device(scenario.section("device"))
    scales = derive_scales(dev.geometry, dev.circuit, dev.tip, dev.env,
                           dev.omega_r)
    sec = scenario.section("fig4")
    lam = TWO_PI * _number(sec, "lambda_hz", default=scales.lam / TWO_PI,
                           positive=True)
    g = TWO_PI * _number(sec, "g_hz", default=scales.g / TWO_PI, positive=True)
    alpha = _number(sec, "alpha", default=dev.env.spin_alpha)
    gamma_lo = TWO_PI * _number(sec, "gamma_min_hz", default=10.0, positive=True)
    gamma_hi = TWO_PI * _number(sec, "gamma_max_hz", default=1e5, positive=True)
    t2_lo = 1e-3 * _number(sec, "t2_min_ms", default=0.01, positive=True)
    t2_hi = 1e-3 * _number(sec, "t2_max_ms", default=100.0, positive=True)
    nx = int(_number(sec, "nx", default=40, positive=True))
    ny = int(_number(sec, "ny", default=40, positive=True))
    interval = (TWO_PI * _number(sec, "omega_min_hz", default=1e3, positive=True),
                TWO_PI * _number(sec, "omega_max_hz", default=5e6, positive=True))
    parts = sec.get("motional", "resonant")
    ppd = int(_number(sec, "points_per_decade", default=60, positive=True))
    gammas = np.logspace(np.log10(gamma_lo), np.log10(gamma_hi), nx)
    t2s = np.logspace(np.log10(t2_lo), np.log10(t2_hi), ny)

    cells = [(i, j) for i in range(nx) for j in range(ny)]

    def run_cell(ij):
        i, j = ij
        res = optimize_omega_r(lam, g, float(gammas[i]), float(t2s[j]),
                               alpha, interval, ppd, parts)
        return (i, j, res.F_opt, res.omega_r_opt)

    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(
                _fig4_worker,
                [(i, j, float(gammas[i]), float(t2s[j]), lam, g, alpha,
                  interval, ppd, parts) for i, j in cells]))
    else:
        results = [run_cell(ij) for ij in cells]
    results.sort(key=lambda r: (r[0], r[1]))
    rows = [[gammas[i] / TWO_PI, t2s[j], f_opt, w_opt / TWO_PI]
            for i, j, f_opt, w_opt in results]
    path = out_dir / "fig4.csv"
    write_csv(path, ["Gamma_m_hz", "T2_s", "F_opt", "omega_r_opt_hz"], rows)
    return [path]


def _fig4_worker(args):
    from .fidelity import optimize_omega_r
    i, j, gm, t2, lam, g, alpha, interval, ppd, parts = args
    res = optimize_omega_r(lam, g, gm, t2, alpha, interval, ppd, parts)
    return (i, j, res.F_opt, res.omega_r_opt)


def task_optimize(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    from .fidelity import optimize_omega_r

    dev = build_device(scenario.section("device"))
    scales = derive_scales(dev.geometry, dev.circuit, dev.tip, dev.env,
                           dev.omega_r)
    sec = scenario.section("optimize")
    lam = TWO_PI * _number(sec, "lambda_hz", default=scales.lam / TWO_PI,
                           positive=True)
    g = TWO_PI * _number(sec, "g_hz", default=scales.g / TWO_PI, positive=True)
    Gamma_m = TWO_PI * _number(sec, "gamma_m_hz",
                               default=scales.Gamma_m / TWO_PI, positive=True)
    T2 = 1e-3 * _number(sec, "t2_ms", default=dev.env.spin_T2 * 1e3,
                        positive=True)
    alpha = _number(sec, "alpha", default=dev.env.spin_alpha)
    interval = (TWO_PI * _number(sec, "omega_min_hz", default=1e3, positive=True),
                TWO_PI * _number(sec, "omega_max_hz", default=5e6, positive=True))
    parts = sec.get("motional", "resonant")
    ppd = int(_number(sec, "points_per_decade", default=60, positive=True))
    res = optimize_omega_r(lam, g, Gamma_m, T2, alpha, interval, ppd, parts)
    rows = [
        ("omega_r_opt_hz", res.omega_r_opt / TWO_PI),
        ("F_opt", res.F_opt),
        ("at_boundary", int(res.at_boundary)),
        ("g_condition_ok", int(res.g_condition_ok)),
    ]
    path = out_dir / "optimize.csv"
    write_csv(path, ["quantity", "value"], rows)
    trace_path = out_dir / "optimize_trace.csv"
    write_csv(trace_path, ["omega_r_hz", "F"],
              [[w / TWO_PI, f] for w, f in res.trace])
    return [path, trace_path]


def task_lattice(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    from .scans import lattice_delta_beta

    sec = scenario.section("lattice")
    lx = int(_number(sec, "lx", default=20, positive=True))
    ly = int(_number(sec, "ly", default=20, positive=True))
    g_over = _number(sec, "g_over_omega", default=0.2, positive=True)
    k = int(_number(sec, "k", default=4, positive=True))
    n_cycles = int(_number(sec, "n_cycles", default=4, positive=True))
    res = lattice_delta_beta(lx, ly, g_over, k, n_cycles)
    path = out_dir / "lattice_dbeta.csv"
    write_csv(path, ["lx", "ly", "g_over_omega", "k", "n_cycles",
                     "omega_max_over_omega_r", "delta_beta_sq"],
              [[res.lx, res.ly, res.g_over_omega, res.k, res.n_cycles,
                res.omega_max, res.delta_beta_sq]])
    return [path]


def task_oracle(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    from .oracle_suite import run_oracle_suite

    sec = scenario.section("oracle")
    steps = int(_number(sec, "steps_per_period", default=300, positive=True))
    rows = run_oracle_suite(steps_per_period=steps)
    path = out_dir / "oracle.csv"
    write_csv(path, ["check", "value", "reference", "rel_err", "tol", "status"],
              rows)
    n_fail = sum(1 for r in rows if r[-1] == "FAIL")
    for r in rows:
        print(f"{r[0]:44s} {float(r[3]):+10.2e}  (tol {r[4]})  {r[5]}")
    if n_fail:
        raise ConvergenceError(f"{n_fail} oracle checks failed")
    return [path]


def task_validate(scenario: Scenario, out_dir: Path, args) -> list[Path]:
    dev = build_device(scenario.section("device"))
    scales = derive_scales(dev.geometry, dev.circuit, dev.tip, dev.env,
                           dev.omega_r)
    rows = [
        ("eta", scales.eta),
        ("N_th", scales.N_th),
        ("Gamma_m_hz", scales.Gamma_m / TWO_PI),
        ("lambda_hz", scales.lam / TWO_PI),
        ("g_hz", scales.g / TWO_PI),
        ("Q_el", scales.Q_el),
    ]
    if "layout" in scenario.raw:
        layout = build_layout(scenario.section("layout"), scenario.base_dir)
        try:
            spectrum = diagonalize(build_coupling_matrix(layout), dev.omega_r)
            rows.append(("stable", 1))
            if spectrum.n_modes >= 2:
                xi = frequency_ratio_xi(spectrum)
                rows.append(("xi", xi))
                if xi > 1.0:
                    # gate-time exposure estimate from the echo-free forms
                    from .fidelity import no_echo_R
                    exposure = no_echo_R(xi) * scales.Gamma_m / dev.omega_r
                    rows.append(("t_gate_Gamma_eff", exposure))
                    if exposure >= 1.0:
                        rows.append(("warning",
                                     "t_gate * Gamma_eff >= 1; gate slower "
                                     "than motional dephasing"))
        except PhysicsDomainError as exc:
            rows.append(("stable", 0))
            rows.append(("diagnostic", str(exc).replace(",", ";")))
    if scales.eta > 1.0:
        rows.append(("warning", "eta exceeds 1; displacement expansion suspect"))
    path = out_dir / "validate.csv"
    write_csv(path, ["quantity", "value"], rows)
    for name, value in rows:
        print(f"{name}: {value}")
    return [path]


_RUNNERS = {
    "device-params": task_device_params,
    "spectrum": task_spectrum,
    "ising": task_ising,
    "fidelity": task_fidelity,
    "fig3": task_fig3,
    "fig4": task_fig4,
    "lattice-dbeta": task_lattice,
    "optimize": task_optimize,
    "oracle": task_oracle,
    "validate": task_validate,
}


def run(scenario: Scenario, out_dir: Path, args) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    outputs = _RUNNERS[scenario.task](scenario, out_dir, args)
    wall = time.perf_counter() - start
    manifest = write_manifest(out_dir, scenario.task, scenario, outputs, wall)
    for p in outputs + [manifest]:
        print(f"wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbus",
        description="Phonon-mediated spin entangling gate design tool")
    sub = parser.add_subparsers(dest="command")
    for name in TASKS + ("run",):
        p = sub.add_parser(name, help=f"run the {name} task"
                           if name != "run" else "run the task named in the config")
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--task", default=None,
                       help="override the task (run subcommand only)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes for sweep tasks (0 = auto)")
        p.add_argument("--tolerance", type=float, default=1e-8,
                       help="relative quadrature tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command is None:
        build_parser().print_help()
        return EXIT_CONFIG
    if args.jobs == 0:
        import os
        args.jobs = os.cpu_count() or 1
    try:
        task = None if args.command == "run" else args.command
        if args.command == "run" and args.task:
            task = args.task
        scenario = load_scenario(args.config, task_override=task)
        return run(scenario, Path(args.out), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsDomainError as exc:
        print(f"physics domain error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except ConvergenceError as exc:
        print(f"numerical convergence error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
