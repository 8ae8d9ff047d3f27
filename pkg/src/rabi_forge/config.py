"""TOML run configuration.

Every frequency and drive amplitude is a linear number of MHz, multiplied by
2*pi on ingestion; phases are radians; times, T1 and T2 are microseconds.
Tone detunings are distances *below* the qubit frequency
(``omega_i = omega_a - 2*pi*detuning_i``), so positive detunings give
positive effective splittings.

Example (setting b)::

    mode = "sweep"

    [drive]
    tone1_detuning = 0
    tone2_detuning = 10
    amplitude1 = 20
    amplitude2 = 20
    phase_difference = 0

    [sweep]
    parameter = "amplitude2"
    start = 1
    stop = 20
    count = 201
"""

from __future__ import annotations

import math
import sys
from decimal import Decimal
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .experiments import SweepSpec
from .frames import effective_params
from .model import DriveTone, EffectiveParams, LabDriveParams
from .propagator import DecoherenceParams, IntegratorConfig, TimeGrid

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MHZ = 2 * math.pi * 1e6
MODES = ("evolve", "sweep", "trajectory", "waveform", "verify")
FORMATS = ("csv", "json", "svg")

_TOP_KEYS = {"mode", "frame", "decoherence", "full_carrier", "carrier", "observable", "seed", "subject",
             "trajectory_frame", "device", "drive", "effective", "sweep", "time", "integrator", "waveform",
             "output"}
_SECTION_KEYS = {
    "device": {"qubit_frequency", "t1", "t2"},
    "drive": {"tone1_detuning", "tone2_detuning", "amplitude1", "amplitude2", "phase1", "phase2",
              "phase_difference"},
    "effective": {"omega_a_star", "omega_d_star", "phi0_star", "amplitude1", "amplitude2"},
    "sweep": {"parameter", "start", "stop", "count"},
    "time": {"t_start", "t_end", "samples"},
    "integrator": {"rel_tol", "abs_tol", "max_step", "renormalize"},
    "waveform": {"sample_rate", "duration", "kind"},
    "output": {"path", "format"},
}
_REQUIRED = {
    "drive": ("amplitude1", "amplitude2", "tone1_detuning", "tone2_detuning"),
    "effective": ("amplitude1", "amplitude2", "omega_a_star", "omega_d_star"),
    "sweep": ("count", "parameter", "start", "stop"),
    "waveform": ("duration", "sample_rate"),
}
# config sweep names -> swept lab parameter
_SWEEP_PARAMS = {"tone2_detuning": "tone2.omega", "amplitude2": "tone2.amplitude",
                 "phase_difference": "phase_difference"}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    qubit_frequency: float = 2 * math.pi * 7.173e9
    decoherence_params: DecoherenceParams = DecoherenceParams(10e-6, 10e-6)
    decoherence: bool = True
    drive: LabDriveParams | None = None
    effective: EffectiveParams | None = None
    sweep_parameter: str | None = None
    sweep_values: tuple = ()
    grid: TimeGrid = TimeGrid(0.0, 1e-6, 501)
    frame: str = "effective"
    full_carrier: bool = False
    carrier: float = 2 * math.pi * 100e6
    observable: str = "Pe"
    trajectory_frame: str = "drive"
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    sample_rate: float | None = None
    waveform_duration: float | None = None
    waveform_kind: str = "iq"
    subject: str = "all"
    seed: int = 0
    output_path: str | None = None
    output_format: str = "csv"

    @property
    def active_decoherence(self) -> DecoherenceParams | None:
        return self.decoherence_params if self.decoherence else None

    def effective_params(self) -> EffectiveParams:
        if self.effective is not None:
            return self.effective
        if self.drive is None:
            raise ConfigError("neither [drive] nor [effective] is configured")
        return effective_params(self.drive)[0]

    def sweep_spec(self) -> SweepSpec:
        if self.drive is None or self.sweep_parameter is None:
            raise ConfigError("sweep mode needs [drive] and [sweep] sections")
        return SweepSpec(base=self.drive, swept=self.sweep_parameter, sweep_values=self.sweep_values,
                         grid=self.grid, frame=self.frame, decoherence=self.active_decoherence,
                         observable=self.observable, full_carrier=self.full_carrier,
                         reduced_carrier=self.carrier)


def _us(value: float) -> float:
    # decimal rescaling: 0.2 us becomes the float nearest 2e-7, which 0.2 * 1e-6 is not
    return float(Decimal(repr(float(value))).scaleb(-6))


def _number(section: str, table: dict, key: str, default=None) -> float:
    if key not in table:
        if default is None:
            raise ConfigError(f"{section}.{key} is required")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{section}.{key} must be a finite number, got {value!r}")
    return float(value)


def _check_keys(section: str, table, allowed) -> None:
    if not isinstance(table, dict):
        raise ConfigError(f"[{section}] must be a table")
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")
    missing = [k for k in _REQUIRED.get(section, ()) if k not in table]
    if missing:
        raise ConfigError(f"[{section}] is missing required key(s): {', '.join(missing)}")


def _choice(key: str, value, options) -> str:
    if value not in options:
        raise ConfigError(f"{key} must be one of {', '.join(options)}, got {value!r}")
    return value


def _wrap(key: str, fn, *args):
    # model constructors raise ConfigError/ValueError without naming the config key
    try:
        return fn(*args)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _parse_drive(d: dict, omega_a: float) -> LabDriveParams:
    phase2 = _number("drive", d, "phase2", 0.0)
    if "phase_difference" in d and "phase1" in d:
        raise ConfigError("drive: give either phase1 or phase_difference, not both")
    if "phase_difference" in d:
        phase1 = phase2 + _number("drive", d, "phase_difference")
    else:
        phase1 = _number("drive", d, "phase1", 0.0)
    tone1 = _wrap("drive", DriveTone, omega_a - _number("drive", d, "tone1_detuning") * MHZ,
                  _number("drive", d, "amplitude1") * MHZ, phase1)
    tone2 = _wrap("drive", DriveTone, omega_a - _number("drive", d, "tone2_detuning") * MHZ,
                  _number("drive", d, "amplitude2") * MHZ, phase2)
    return LabDriveParams(omega_a, tone1, tone2)


def _parse_effective(e: dict) -> EffectiveParams:
    return _wrap("effective", EffectiveParams,
                 _number("effective", e, "omega_a_star") * MHZ,
                 _number("effective", e, "omega_d_star") * MHZ,
                 _number("effective", e, "phi0_star", 0.0),
                 _number("effective", e, "amplitude1") * MHZ,
                 _number("effective", e, "amplitude2") * MHZ)


def _parse_sweep(s: dict, omega_a: float) -> tuple[str, tuple]:
    name = _choice("sweep.parameter", s["parameter"], tuple(_SWEEP_PARAMS))
    count = s["count"]
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ConfigError(f"sweep.count must be a positive integer, got {count!r}")
    values = np.linspace(_number("sweep", s, "start"), _number("sweep", s, "stop"), count)
    if name == "tone2_detuning":
        values = omega_a - values * MHZ
    elif name == "amplitude2":
        values = values * MHZ
    return _SWEEP_PARAMS[name], tuple(float(v) for v in values)


def config_from_dict(raw: dict) -> RunConfig:
    _check_keys("top level", raw, _TOP_KEYS)
    for section, allowed in _SECTION_KEYS.items():
        if section in raw:
            _check_keys(section, raw[section], allowed)
    if "mode" not in raw:
        raise ConfigError(f"mode is required (one of {', '.join(MODES)})")
    mode = _choice("mode", raw["mode"], MODES)
    kw = {"mode": mode}

    dev = raw.get("device", {})
    omega_a = _number("device", dev, "qubit_frequency", 7173.0) * MHZ
    if omega_a <= 0:
        raise ConfigError("device.qubit_frequency must be positive")
    kw["qubit_frequency"] = omega_a
    t1 = _us(_number("device", dev, "t1", 10.0))
    t2 = _us(_number("device", dev, "t2", 10.0))
    kw["decoherence_params"] = DecoherenceParams(t1, t2)

    if "decoherence" in raw:
        if not isinstance(raw["decoherence"], bool):
            raise ConfigError("decoherence must be true or false")
        kw["decoherence"] = raw["decoherence"]
    if "full_carrier" in raw:
        kw["full_carrier"] = bool(raw["full_carrier"])
    if "carrier" in raw:
        kw["carrier"] = _number("top level", raw, "carrier") * MHZ
    kw["frame"] = _choice("frame", raw.get("frame", "effective"), ("lab", "effective"))
    kw["observable"] = _choice("observable", raw.get("observable", "Pe"), ("Pe", "sx", "sy", "sz"))
    kw["trajectory_frame"] = _choice("trajectory_frame", raw.get("trajectory_frame", "drive"),
                                     ("drive", "effective"))
    kw["subject"] = _choice("subject", raw.get("subject", "all"), ("frames", "oracles", "waveform", "all"))
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    kw["seed"] = seed

    if "drive" in raw:
        kw["drive"] = _parse_drive(raw["drive"], omega_a)
    if "effective" in raw:
        kw["effective"] = _parse_effective(raw["effective"])
    if "sweep" in raw:
        kw["sweep_parameter"], kw["sweep_values"] = _parse_sweep(raw["sweep"], omega_a)

    tm = raw.get("time", {})
    samples = tm.get("samples", 501)
    if isinstance(samples, bool) or not isinstance(samples, int):
        raise ConfigError(f"time.samples must be an integer, got {samples!r}")
    kw["grid"] = _wrap("time", TimeGrid, _us(_number("time", tm, "t_start", 0.0)),
                       _us(_number("time", tm, "t_end", 1.0)), samples)

    ig = raw.get("integrator", {})
    kw["integrator"] = _wrap("integrator", IntegratorConfig,
                             _number("integrator", ig, "rel_tol", 1e-9),
                             _number("integrator", ig, "abs_tol", 1e-11),
                             _number("integrator", ig, "max_step", math.inf) * 1e-9,
                             bool(ig.get("renormalize", False)))

    if "waveform" in raw:
        wf = raw["waveform"]
        kw["sample_rate"] = _number("waveform", wf, "sample_rate") * 1e6
        kw["waveform_duration"] = _us(_number("waveform", wf, "duration"))
        kw["waveform_kind"] = _choice("waveform.kind", wf.get("kind", "iq"), ("iq", "rf"))

    out = raw.get("output", {})
    if "path" in out:
        kw["output_path"] = str(out["path"])
    kw["output_format"] = _choice("output.format", out.get("format", "csv"), FORMATS)

    cfg = RunConfig(**kw)
    check_mode_requirements(cfg)
    return cfg


def check_mode_requirements(cfg: RunConfig) -> None:
    if cfg.mode == "sweep":
        if cfg.drive is None or cfg.sweep_parameter is None:
            raise ConfigError("sweep mode needs [drive] and [sweep] sections")
        _wrap("sweep", cfg.sweep_spec)
    elif cfg.mode in ("evolve", "trajectory"):
        if cfg.drive is None and cfg.effective is None:
            raise ConfigError(f"{cfg.mode} mode needs a [drive] or [effective] section")
        if cfg.mode == "trajectory" and cfg.frame == "lab":
            raise ConfigError("frame: trajectories are computed in the effective frame")
        if cfg.mode == "evolve" and cfg.frame == "lab" and cfg.drive is None:
            raise ConfigError("lab-frame evolution needs a [drive] section")
    elif cfg.mode == "waveform":
        if cfg.drive is None or cfg.sample_rate is None:
            raise ConfigError("waveform mode needs [drive] and [waveform] sections")


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Parse and validate TOML configuration text.

    ``mode`` (from the command line) fills in a missing ``mode`` key and must
    agree with one that is present.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if mode is not None:
        if raw.setdefault("mode", mode) != mode:
            raise ConfigError(f"mode: configuration is for {raw['mode']!r}, not {mode!r}")
    return config_from_dict(raw)


def load_config(path, mode: str | None = None) -> RunConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        return parse_config(text, mode)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
