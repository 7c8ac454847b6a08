"""Scenario configuration: strict TOML parsing with typed keys.

Frequencies enter as ordinary frequency (``*_hz``), temperatures in mK,
times in ms, lengths in um; conversion to SI/angular happens here so that
everything downstream is rad/s, K, s, m. Unknown keys are rejected to keep
typos from silently skewing physics parameters.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .constants import TWO_PI
from .device import (CircuitGeometry, MagneticTip, ResonatorGeometry,
                     ThermalEnvironment)
from .errors import ConfigError
from .layout import (Boundary, Chain, ChainConvention, Custom, Lattice2D,
                     SingleWire, TwoRegister)

TASKS = ("device-params", "spectrum", "ising", "fidelity", "fig3", "fig4",
         "lattice-dbeta", "optimize", "oracle", "validate")

_TOP_KEYS = {"task", "seed", "device", "layout", "pulses", "bath", "fig3",
             "fig4", "optimize", "lattice", "oracle"}

_SECTION_KEYS = {
    "device": {"length_um", "width_um", "thickness_um", "mass_density_kg_m3",
               "effective_mass_factor", "frequency_hz", "tip_gradient_t_m",
               "electrode_gap_um", "wire_length_um", "bias_voltage_v",
               "wire_resistance_ohm", "resonator_capacitance_f",
               "wire_capacitance_f", "temperature_mk", "mechanical_q",
               "spin_t2_ms", "spin_alpha", "precooled_n"},
    "layout": {"type", "n", "n1", "n2", "coupling_hz", "convention",
               "switch_factor", "control_voltage_v", "lx", "ly", "boundary",
               "csv_path"},
    "pulses": {"k", "n_cycles", "times"},
    "bath": {"kind", "Q", "J0_hz", "temperature_mk", "precooled_n"},
    "fig3": {"xi_min", "xi_max", "xi_step", "k_list", "max_denominator",
             "min_cycles"},
    "fig4": {"lambda_hz", "g_hz", "gamma_min_hz", "gamma_max_hz", "t2_min_ms",
             "t2_max_ms", "nx", "ny", "omega_min_hz", "omega_max_hz",
             "alpha", "motional", "points_per_decade"},
    "optimize": {"lambda_hz", "g_hz", "gamma_m_hz", "t2_ms", "alpha",
                 "omega_min_hz", "omega_max_hz", "motional",
                 "points_per_decade"},
    "lattice": {"lx", "ly", "g_over_omega", "k", "n_cycles"},
    "oracle": {"dim", "steps_per_period"},
}

_DEVICE_DEFAULTS = {
    "length_um": 10.0, "width_um": 0.1, "thickness_um": 0.1,
    "mass_density_kg_m3": 2330.0, "effective_mass_factor": 0.30,
    "frequency_hz": 1.0e6, "tip_gradient_t_m": 1.0e7,
    "electrode_gap_um": 0.1, "wire_length_um": 100.0, "bias_voltage_v": 1.0,
    "wire_resistance_ohm": 0.5, "temperature_mk": 100.0,
    "mechanical_q": 1.0e6, "spin_t2_ms": 10.0, "spin_alpha": 3.0,
}


@dataclass
class Scenario:
    task: str
    raw: dict[str, Any]
    base_dir: Path
    seed: int = 0

    def section(self, name: str) -> dict[str, Any]:
        return self.raw.get(name, {})

    def require(self, name: str) -> dict[str, Any]:
        if name not in self.raw:
            raise ConfigError(f"task '{self.task}' requires a [{name}] section")
        return self.raw[name]


def _check_keys(section: str, data: dict) -> None:
    allowed = _SECTION_KEYS[section]
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in [{section}]")


def _number(section: dict, key: str, default=None, positive=False):
    val = section.get(key, default)
    if val is None:
        raise ConfigError(f"missing required key '{key}'")
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ConfigError(f"key '{key}' must be a number, got {val!r}")
    if positive and val <= 0:
        raise ConfigError(f"key '{key}' must be positive, got {val}")
    return float(val)


def load_scenario(path: str | Path, task_override: str | None = None) -> Scenario:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}")

    for key in raw:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown top-level key '{key}'")
    for name in _SECTION_KEYS:
        if name in raw:
            if not isinstance(raw[name], dict):
                raise ConfigError(f"[{name}] must be a section")
            _check_keys(name, raw[name])

    task = task_override or raw.get("task")
    if task is None:
        raise ConfigError("no task given (config 'task =' or --task)")
    if task not in TASKS:
        raise ConfigError(f"unknown task '{task}'; choose from {', '.join(TASKS)}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return Scenario(task=task, raw=raw, base_dir=path.parent, seed=seed)


@dataclass(frozen=True)
class DeviceConfig:
    geometry: ResonatorGeometry
    circuit: CircuitGeometry
    tip: MagneticTip
    env: ThermalEnvironment
    omega_r: float


def build_device(section: dict) -> DeviceConfig:
    cfg = dict(_DEVICE_DEFAULTS)
    cfg.update(section)
    geometry = ResonatorGeometry(
        length=_number(cfg, "length_um", positive=True) * 1e-6,
        width=_number(cfg, "width_um", positive=True) * 1e-6,
        thickness=_number(cfg, "thickness_um", positive=True) * 1e-6,
        mass_density=_number(cfg, "mass_density_kg_m3", positive=True),
        effective_mass_factor=_number(cfg, "effective_mass_factor"),
    )
    circuit = CircuitGeometry(
        electrode_gap=_number(cfg, "electrode_gap_um", positive=True) * 1e-6,
        wire_length=_number(cfg, "wire_length_um", positive=True) * 1e-6,
        bias_voltage=_number(cfg, "bias_voltage_v"),
        wire_resistance=_number(cfg, "wire_resistance_ohm"),
        resonator_capacitance=(float(cfg["resonator_capacitance_f"])
                               if "resonator_capacitance_f" in cfg else None),
        wire_capacitance=(float(cfg["wire_capacitance_f"])
                          if "wire_capacitance_f" in cfg else None),
        resonator_length=_number(cfg, "length_um", positive=True) * 1e-6,
    )
    tip = MagneticTip(gradient=_number(cfg, "tip_gradient_t_m"))
    env = ThermalEnvironment(
        temperature=_number(cfg, "temperature_mk") * 1e-3,
        mechanical_Q=_number(cfg, "mechanical_q", positive=True),
        spin_T2=_number(cfg, "spin_t2_ms", positive=True) * 1e-3,
        spin_alpha=_number(cfg, "spin_alpha"),
        precooled_occupation=(float(cfg["precooled_n"])
                              if "precooled_n" in cfg else None),
    )
    omega_r = TWO_PI * _number(cfg, "frequency_hz", positive=True)
    return DeviceConfig(geometry=geometry, circuit=circuit, tip=tip, env=env,
                        omega_r=omega_r)


def build_layout(section: dict, base_dir: Path):
    kind = section.get("type")
    if kind is None:
        raise ConfigError("missing required key 'type' in [layout]")
    g = TWO_PI * _number(section, "coupling_hz", default=0.0) \
        if kind != "custom" else 0.0
    if kind == "chain":
        conv = section.get("convention", "physical")
        try:
            convention = ChainConvention(conv)
        except ValueError:
            raise ConfigError(f"unknown chain convention '{conv}'")
        return Chain(int(_number(section, "n", positive=True)), g, convention)
    if kind == "single_wire":
        return SingleWire(int(_number(section, "n", positive=True)), g)
    if kind == "two_register":
        n1 = int(_number(section, "n1", positive=True))
        n2 = int(_number(section, "n2", positive=True))
        if "control_voltage_v" in section:
            from .layout import switch_factor_from_voltage
            s = switch_factor_from_voltage(
                _number(section, "control_voltage_v"),
                _number(section, "bias_voltage_v", default=1.0))
        else:
            s = _number(section, "switch_factor", default=1.0)
        return TwoRegister(n1, n2, g, s)
    if kind == "lattice2d":
        bnd = section.get("boundary", "open")
        try:
            boundary = Boundary(bnd)
        except ValueError:
            raise ConfigError(f"unknown boundary '{bnd}'")
        return Lattice2D(int(_number(section, "lx", positive=True)),
                         int(_number(section, "ly", positive=True)),
                         g, boundary)
    if kind == "custom":
        csv_path = section.get("csv_path")
        if not csv_path:
            raise ConfigError("custom layout needs 'csv_path'")
        full = (base_dir / csv_path) if not Path(csv_path).is_absolute() \
            else Path(csv_path)
        if not full.exists():
            raise ConfigError(f"custom matrix file not found: {full}")
        matrix = np.loadtxt(full, delimiter=",", ndmin=2)
        return Custom(matrix=matrix)
    raise ConfigError(f"unknown layout type '{kind}'")


def build_pulses(section: dict, omega_r: float):
    """PulseSequence from [pulses]; explicit times are in units of 2pi/w_r."""
    from .pulses import EchoFamily, PulseSequence

    if "times" in section:
        times = section["times"]
        if not isinstance(times, list) or not all(
                isinstance(t, (int, float)) for t in times):
            raise ConfigError("'times' must be a list of numbers")
        if "n_cycles" not in section:
            raise ConfigError("'times' needs 'n_cycles' to fix t_g")
        n_cycles = int(_number(section, "n_cycles", positive=True))
        period = TWO_PI / omega_r
        return PulseSequence(n_cycles * period,
                             [t * period for t in times])
    k = int(_number(section, "k", default=0.0))
    n_cycles = int(_number(section, "n_cycles", default=1.0, positive=True))
    return EchoFamily(k, n_cycles, omega_r).sequence()


def build_bath(section: dict, device: DeviceConfig):
    """(SpectralDensity, BathState, Gamma_m) from [bath] with device defaults."""
    from .constants import CONSTANTS
    from .decoherence import BathState, ConstantDensity, OhmicDensity, ZeroDensity

    kind = section.get("kind", "ohmic")
    Q = _number(section, "Q", default=device.env.mechanical_Q, positive=True)
    temperature = _number(section, "temperature_mk",
                          default=device.env.temperature * 1e3) * 1e-3
    precooled = section.get("precooled_n", device.env.precooled_occupation)
    if precooled is not None:
        precooled = float(precooled)
    if kind == "ohmic":
        J = OhmicDensity(Q)
    elif kind == "constant":
        J = ConstantDensity(TWO_PI * _number(section, "J0_hz"))
    elif kind == "zero":
        J = ZeroDensity()
    else:
        raise ConfigError(f"unknown bath kind '{kind}'")
    Gamma_m = CONSTANTS.k_B * temperature / (CONSTANTS.hbar * Q)
    return J, BathState(temperature, precooled), Gamma_m
