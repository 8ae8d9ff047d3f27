"""Cross-module identity checks behind ``rabi-forge verify``.

Each suite returns :class:`Check` records holding a worst-case residual and
the tolerance it must stay under.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import derivative_residual, effective_params, transformation_residual
from .iqsynth import extract_tones, lo_frequency, synthesize_iq, upconvert
from .model import DriveTone, EffectiveHamiltonian, LabDriveParams, ReducedRabiHamiltonian
from .propagator import TimeGrid, commuting_drive_pe, propagate_unitary, rabi_formula

TWO_PI_MHZ = 2 * math.pi * 1e6
QUBIT_FREQUENCY = 2 * math.pi * 7.173e9
SUBJECTS = ("frames", "oracles", "waveform")


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)


def random_lab_params(rng: np.random.Generator, omega_a: float = QUBIT_FREQUENCY) -> LabDriveParams:
    """Drive parameters over the strong-driving ranges: detunings up to 20 MHz, amplitudes 1..20 MHz."""
    return LabDriveParams(
        omega_a=omega_a,
        tone1=DriveTone(omega_a - rng.uniform(-5, 5) * TWO_PI_MHZ, rng.uniform(1, 20) * TWO_PI_MHZ,
                        rng.uniform(-math.pi, math.pi)),
        tone2=DriveTone(omega_a - rng.uniform(0, 20) * TWO_PI_MHZ, rng.uniform(1, 20) * TWO_PI_MHZ,
                        rng.uniform(-math.pi, math.pi)),
    )


def verify_frames(rng: np.random.Generator, trials: int = 1000, times_per_trial: int = 10) -> list[Check]:
    worst_h = worst_fd = 0.0
    for _ in range(trials):
        p = random_lab_params(rng)
        times = rng.uniform(0, 1e-6, times_per_trial)
        worst_h = max(worst_h, transformation_residual(p, times))
        worst_fd = max(worst_fd, derivative_residual(effective_params(p)[1], times[:2]))
    return [Check("frame transform |U'HU - iU'dU - H_eff| / |H|", worst_h, 1e-10),
            Check("frame derivative vs central difference", worst_fd, 1e-6)]


def verify_oracles(rng: np.random.Generator = None) -> list[Check]:
    grid = TimeGrid(0.0, 1e-6, 501)
    rabi = propagate_unitary(EffectiveHamiltonian(5 * TWO_PI_MHZ, 5 * TWO_PI_MHZ, 0.0, TWO_PI_MHZ, 0.0), grid=grid)
    r_rabi = float(np.max(np.abs(rabi.pe - rabi_formula(0.0, TWO_PI_MHZ, grid.times))))
    w, wd = 20 * TWO_PI_MHZ, 5 * TWO_PI_MHZ
    comm = propagate_unitary(ReducedRabiHamiltonian(0.0, wd, 0.0, w), grid=grid)
    r_comm = float(np.max(np.abs(comm.pe - commuting_drive_pe(w, wd, 0.0, grid.times))))
    return [Check("numeric vs Rabi formula (no counter-rotation)", r_rabi, 1e-6),
            Check("numeric vs commuting-drive solution (zero splitting)", r_comm, 1e-6)]


def random_waveform_target(rng: np.random.Generator, carrier: float = 2 * math.pi * 100e6) -> LabDriveParams:
    """Two tones on integer-MHz frequencies so a 1 us record holds whole periods of both."""
    d1, d2 = rng.choice(np.arange(-10, 21), size=2, replace=False)
    return LabDriveParams(
        omega_a=carrier,
        tone1=DriveTone(carrier - d1 * TWO_PI_MHZ, rng.uniform(0.05, 1.0), rng.uniform(-math.pi, math.pi)),
        tone2=DriveTone(carrier - d2 * TWO_PI_MHZ, rng.uniform(0.05, 1.0), rng.uniform(-math.pi, math.pi)),
    )


def tone_recovery_residuals(p: LabDriveParams, sample_rate: float = 1e10, duration: float = 1e-6):
    """Worst relative amplitude, phase (rad) and frequency (Hz) error of an I/Q round trip."""
    rf = upconvert(synthesize_iq(p, sample_rate, duration), lo_frequency(p))
    tones = extract_tones(rf, 2)
    amp = phase = freq = 0.0
    for est, tone in zip(tones, (p.tone1, p.tone2)):
        amp = max(amp, abs(est.amplitude - tone.amplitude) / tone.amplitude)
        dphi = (est.phase - tone.phase + math.pi) % (2 * math.pi) - math.pi
        phase = max(phase, abs(dphi))
        freq = max(freq, abs(est.frequency - tone.omega / (2 * math.pi)))
    return amp, phase, freq


def verify_waveform(rng: np.random.Generator, trials: int = 100) -> list[Check]:
    amp = phase = 0.0
    for _ in range(trials):
        a, ph, _ = tone_recovery_residuals(random_waveform_target(rng))
        amp, phase = max(amp, a), max(phase, ph)
    return [Check("I/Q round trip relative amplitude", amp, 1e-3),
            Check("I/Q round trip phase (rad)", phase, 1e-3)]


def verify(subject: str, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    if subject == "frames":
        return verify_frames(rng)
    if subject == "oracles":
        return verify_oracles(rng)
    if subject == "waveform":
        return verify_waveform(rng)
    if subject == "all":
        return [c for s in SUBJECTS for c in verify(s, seed)]
    raise ValueError(f"subject must be one of {SUBJECTS + ('all',)}, got {subject!r}")
