"""Parameter sweeps, Bloch trajectories and RWA comparisons built on the propagator.

A sweep varies one lab-drive parameter and propagates every row in a single
batched integration.  Presets ``a``, ``b`` and ``c`` encode the three
strong-driving settings (frequency, counter-rotating strength and relative
phase sweeps); :func:`figure_preset` encodes the four Bloch-trajectory panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, InvariantViolation, PhysicsError
from .frames import effective_arrays
from .model import DriveTone, EffectiveHamiltonian, EffectiveParams, LabDriveParams, LabHamiltonian
from .propagator import (
    DecoherenceParams,
    EvolutionResult,
    IntegratorConfig,
    TimeGrid,
    propagate_lindblad,
    propagate_unitary,
)
from .qubit import BlochVector

TWO_PI_MHZ = 2 * math.pi * 1e6
QUBIT_FREQUENCY = 2 * math.pi * 7.173e9
DEVICE_T1 = 10e-6
DEVICE_T2 = 10e-6
REDUCED_CARRIER = 2 * math.pi * 100e6

SWEEPABLE = ("tone2.omega", "tone2.amplitude", "phase_difference")
OBSERVABLE_KEYS = {"Pe": "pe", "sx": "sx", "sy": "sy", "sz": "sz"}


@dataclass(frozen=True)
class SweepSpec:
    base: LabDriveParams
    swept: str
    sweep_values: tuple
    grid: TimeGrid
    frame: str = "effective"
    decoherence: DecoherenceParams | None = None
    observable: str = "Pe"
    full_carrier: bool = False
    reduced_carrier: float = REDUCED_CARRIER

    def __post_init__(self):
        values = np.asarray(self.sweep_values, dtype=float)
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in values))
        if self.swept not in SWEEPABLE:
            raise ConfigError(f"swept parameter must be one of {SWEEPABLE}, got {self.swept!r}")
        if values.ndim != 1 or values.size == 0:
            raise ConfigError("sweep_values must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise ConfigError("sweep_values must be finite")
        steps = np.diff(values)
        if values.size > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ConfigError("sweep_values must be strictly monotone")
        if self.frame not in ("lab", "effective"):
            raise ConfigError(f"frame must be 'lab' or 'effective', got {self.frame!r}")
        if self.observable not in OBSERVABLE_KEYS:
            raise ConfigError(f"observable must be one of {tuple(OBSERVABLE_KEYS)}, got {self.observable!r}")


@dataclass
class SweepResult:
    parameter: str
    sweep_values: np.ndarray
    times: np.ndarray
    values: np.ndarray
    observable: str = "Pe"
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (len(self.sweep_values), len(self.times)):
            raise ValueError(f"values shape {self.values.shape} does not match "
                             f"{len(self.sweep_values)} sweep values x {len(self.times)} times")


@dataclass
class TrajectoryResult:
    times: np.ndarray
    xyz: np.ndarray
    params: EffectiveParams
    phi0_star: float
    frame: str = "drive"

    @property
    def points(self) -> list:
        return [BlochVector(*p) for p in self.xyz]


def _row_arrays(spec: SweepSpec):
    base = spec.base
    values = np.asarray(spec.sweep_values, dtype=float)
    ones = np.ones_like(values)
    omega_a = base.omega_a * ones
    w1, a1, p1 = base.tone1.omega * ones, base.tone1.amplitude * ones, base.tone1.phase * ones
    w2, a2, p2 = base.tone2.omega * ones, base.tone2.amplitude * ones, base.tone2.phase * ones
    if spec.swept == "tone2.omega":
        w2 = values.copy()
        if np.any(w2 <= 0) or np.any(w2 > w1):
            raise ConfigError("swept tone2 frequencies must lie in (0, tone1.omega]")
    elif spec.swept == "tone2.amplitude":
        a2 = values.copy()
        if np.any(a2 < 0):
            raise ConfigError("swept tone2 amplitudes must be non-negative")
    else:
        # raw phase difference, deliberately not wrapped: phi0* spans half of it
        p1 = p2 + values
    return omega_a, (w1, a1, p1), (w2, a2, p2)


def sweep_hamiltonian(spec: SweepSpec):
    """The batched Hamiltonian for every row of ``spec`` in the requested frame."""
    omega_a, (w1, a1, p1), (w2, a2, p2) = _row_arrays(spec)
    if spec.frame == "effective":
        w_a, w_d, phi0, _, _ = effective_arrays(omega_a, w1, w2, p1, p2)
        return EffectiveHamiltonian(w_a, w_d, phi0, a1, a2)
    if not spec.full_carrier:
        # z-frame equivalence: only detunings matter for populations
        shift = spec.reduced_carrier - omega_a
        omega_a, w1, w2 = omega_a + shift, w1 + shift, w2 + shift
        if np.any(w2 <= 0):
            raise ConfigError("reduced carrier too low: a tone frequency became non-positive")
    return LabHamiltonian(omega_a, w1, a1, p1, w2, a2, p2)


def _propagate(h, decoherence, grid, cfg, check=True):
    if decoherence is None:
        return propagate_unitary(h, grid=grid, cfg=cfg, check=check)
    return propagate_lindblad(h, dec=decoherence, grid=grid, cfg=cfg, check=check)


def _locate_failure(spec, cfg, exc):
    for i, v in enumerate(spec.sweep_values):
        single = replace(spec, sweep_values=(v,))
        try:
            _propagate(sweep_hamiltonian(single), spec.decoherence, spec.grid, cfg)
        except PhysicsError as row_exc:
            raise type(row_exc)(f"sweep row {i} ({spec.swept}={v!r}): {row_exc}") from row_exc
    raise exc


def run_sweep(spec: SweepSpec, cfg: IntegratorConfig | None = None) -> SweepResult:
    """Propagate ``|g>`` for each sweep value; rows of the result follow ``sweep_values``.

    Rows share one adaptive step sequence.  A failing batch is re-run row by
    row so the error names the offending sweep value.
    """
    cfg = cfg or IntegratorConfig()
    h = sweep_hamiltonian(spec)
    try:
        result = _propagate(h, spec.decoherence, spec.grid, cfg)
    except PhysicsError as exc:
        _locate_failure(spec, cfg, exc)
    values = result.observables[OBSERVABLE_KEYS[spec.observable]]
    lo, hi = (0.0, 1.0) if spec.observable == "Pe" else (-1.0, 1.0)
    if not np.all((values >= lo - 1e-8) & (values <= hi + 1e-8)):
        raise InvariantViolation(f"{spec.observable} left its physical range [{lo}, {hi}]")
    return SweepResult(spec.swept, np.asarray(spec.sweep_values), result.times, values,
                       spec.observable, result.stats)


def _table_base(detuning2_mhz: float, amp2_mhz: float) -> LabDriveParams:
    w_a = QUBIT_FREQUENCY
    return LabDriveParams(
        omega_a=w_a,
        tone1=DriveTone(w_a, 20 * TWO_PI_MHZ, 0.0),
        tone2=DriveTone(w_a - detuning2_mhz * TWO_PI_MHZ, amp2_mhz * TWO_PI_MHZ, 0.0),
    )


def preset_setting(which: str, n_values: int = 201, grid: TimeGrid | None = None,
                   decoherence: DecoherenceParams | None = DecoherenceParams(DEVICE_T1, DEVICE_T2),
                   frame: str = "effective") -> SweepSpec:
    """Sweep specification for strong-driving setting ``a``, ``b`` or ``c``.

    a: both amplitudes 2pi x 20 MHz, tone 2 detuned 0..20 MHz below the qubit.
    b: tone 2 detuned 10 MHz below, its amplitude swept 1..20 MHz.
    c: amplitudes 20 MHz, detuning 10 MHz, phase difference swept 0..2pi.
    """
    grid = grid or TimeGrid(0.0, 1e-6, 501)
    if which == "a":
        base = _table_base(0.0, 20.0)
        values = QUBIT_FREQUENCY - np.linspace(0.0, 20.0, n_values) * TWO_PI_MHZ
        swept = "tone2.omega"
    elif which == "b":
        base = _table_base(10.0, 20.0)
        values = np.linspace(1.0, 20.0, n_values) * TWO_PI_MHZ
        swept = "tone2.amplitude"
    elif which == "c":
        base = _table_base(10.0, 20.0)
        values = np.linspace(0.0, 2 * math.pi, n_values)
        swept = "phase_difference"
    else:
        raise ConfigError(f"setting must be 'a', 'b' or 'c', got {which!r}")
    return SweepSpec(base=base, swept=swept, sweep_values=tuple(values), grid=grid,
                     frame=frame, decoherence=decoherence)


FIGURE_PANELS = {
    "3a": (2000.0, 0.0),
    "3b": (2000.0, math.pi / 2),
    "3c": (5.0, 0.0),
    "3d": (5.0, math.pi / 2),
}


def figure_preset(panel: str) -> tuple[EffectiveParams, TimeGrid]:
    """Resonant trajectory panels: weak (2 GHz splitting) or deep strong (5 MHz), drive 20 MHz."""
    try:
        split_mhz, phi0 = FIGURE_PANELS[panel]
    except KeyError:
        raise ConfigError(f"figure panel must be one of {sorted(FIGURE_PANELS)}, got {panel!r}") from None
    w = split_mhz * TWO_PI_MHZ
    amp = 20 * TWO_PI_MHZ
    return EffectiveParams(w, w, phi0, amp, amp), TimeGrid(0.0, 200e-9, 501)


def bloch_trajectory(e: EffectiveParams, phi0_star: float | None = None, grid: TimeGrid | None = None,
                     dec: DecoherenceParams | None = None, frame: str = "drive",
                     cfg: IntegratorConfig | None = None) -> TrajectoryResult:
    """Bloch vector of ``|g>`` evolving under the effective Hamiltonian.

    ``frame="drive"`` reports the vector in the frame co-rotating with the
    drive phase ``omega_d* t + phi0*``, where a resonant weak drive is a static
    x rotation; ``frame="effective"`` reports it unrotated.
    """
    if grid is None:
        raise ConfigError("a TimeGrid is required")
    if frame not in ("drive", "effective"):
        raise ConfigError(f"frame must be 'drive' or 'effective', got {frame!r}")
    phi0 = e.phi0_star if phi0_star is None else float(phi0_star)
    e = replace(e, phi0_star=phi0)
    h = EffectiveHamiltonian(e.omega_a_star, e.omega_d_star, phi0, e.omega1_amp, e.omega2_amp)
    result = _propagate(h, dec, grid, cfg or IntegratorConfig())
    transverse = result.sx + 1j * result.sy
    if frame == "drive":
        transverse = transverse * np.exp(-1j * (e.omega_d_star * result.times + phi0))
    xyz = np.column_stack([transverse.real, transverse.imag, result.sz])
    if not np.all(np.sum(xyz**2, axis=1) <= 1 + 1e-8):
        raise InvariantViolation("Bloch vector left the unit ball")
    return TrajectoryResult(result.times, xyz, e, phi0, frame)


@dataclass
class RwaComparison:
    full: EvolutionResult
    rwa: EvolutionResult
    max_abs_delta_pe: float


def compare_rwa(e: EffectiveParams, grid: TimeGrid, cfg: IntegratorConfig | None = None) -> RwaComparison:
    """Propagate the full model and its counter-rotating-free truncation side by side."""
    h = EffectiveHamiltonian(e.omega_a_star, e.omega_d_star, e.phi0_star,
                             e.omega1_amp, np.array([e.omega2_amp, 0.0]))
    both = propagate_unitary(h, grid=grid, cfg=cfg)
    full, rwa = both.row(0), both.row(1)
    return RwaComparison(full, rwa, float(np.max(np.abs(full.pe - rwa.pe))))
