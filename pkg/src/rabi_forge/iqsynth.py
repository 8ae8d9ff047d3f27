"""Two-tone drive synthesis from a single LO and two baseband (I, Q) channels.

The LO sits at the mean tone frequency.  With ``delta = (w1 - w2) / 2`` the
baseband pair

    I(t) = W1 cos(delta t + p1) + W2 cos(delta t - p2)
    Q(t) = W1 sin(delta t + p1) - W2 sin(delta t - p2)

mixed as ``I cos(w_LO t) - Q sin(w_LO t)`` yields
``W1 cos(w1 t + p1) + W2 cos(w2 t + p2)``.  The mixer is ideal.

Waveforms round-trip through CSV with a one-line ``#`` header carrying the
sample rate and start time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, NonCommensurateDuration, PeakCountMismatch, UndersampledBeat, UndersampledCarrier
from .model import LabDriveParams, canonical_phase

_LEAKAGE_TOL = 1e-6


@dataclass(frozen=True)
class SampledWaveform:
    """Uniformly sampled waveform; ``samples`` is ``(N,)`` for RF or ``(N, 2)`` for I/Q."""

    sample_rate: float
    samples: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if not self.sample_rate > 0:
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate!r}")
        if samples.shape[0] == 0 or samples.ndim not in (1, 2) or (samples.ndim == 2 and samples.shape[1] != 2):
            raise ConfigError(f"samples must be a non-empty (N,) or (N, 2) array, got {samples.shape}")
        object.__setattr__(self, "samples", samples)

    @property
    def is_iq(self) -> bool:
        return self.samples.ndim == 2

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(len(self.samples)) / self.sample_rate

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class ToneEstimate:
    frequency: float
    amplitude: float
    phase: float


def lo_frequency(p: LabDriveParams) -> float:
    """Angular LO frequency: the mean of the two tones."""
    return 0.5 * (p.tone1.omega + p.tone2.omega)


def synthesize_iq(p: LabDriveParams, sample_rate: float, duration: float, start_time: float = 0.0) -> SampledWaveform:
    delta = 0.5 * (p.tone1.omega - p.tone2.omega)
    if duration <= 0:
        raise ConfigError(f"duration must be positive, got {duration!r}")
    if delta > 0 and sample_rate <= 4 * delta / (2 * math.pi):
        raise UndersampledBeat(
            f"sample rate {sample_rate!r} Hz does not exceed 4x the baseband frequency {delta / (2 * math.pi)!r} Hz")
    n = int(round(duration * sample_rate))
    t = start_time + np.arange(n) / sample_rate
    a1, p1 = p.tone1.amplitude, p.tone1.phase
    a2, p2 = p.tone2.amplitude, p.tone2.phase
    i = a1 * np.cos(delta * t + p1) + a2 * np.cos(delta * t - p2)
    q = a1 * np.sin(delta * t + p1) - a2 * np.sin(delta * t - p2)
    return SampledWaveform(sample_rate, np.column_stack([i, q]), start_time)


def upconvert(iq: SampledWaveform, omega_lo: float) -> SampledWaveform:
    if not iq.is_iq:
        raise ConfigError("upconvert needs an I/Q waveform")
    if iq.sample_rate <= 4 * abs(omega_lo) / (2 * math.pi):
        raise UndersampledCarrier(
            f"sample rate {iq.sample_rate!r} Hz does not exceed 4x the LO frequency {omega_lo / (2 * math.pi)!r} Hz")
    t = iq.times
    rf = iq.samples[:, 0] * np.cos(omega_lo * t) - iq.samples[:, 1] * np.sin(omega_lo * t)
    return SampledWaveform(iq.sample_rate, rf, iq.start_time)


def extract_tones(rf: SampledWaveform, expected_count: int) -> list[ToneEstimate]:
    """Recover the ``expected_count`` spectral lines of a leakage-free RF record.

    Uses a rectangular-window DFT, so every tone must complete a whole number
    of cycles in the record; anything else raises
    :class:`NonCommensurateDuration`.  Tones are returned by descending
    frequency, with phases referenced to ``t = 0``.
    """
    if rf.is_iq:
        raise ConfigError("extract_tones needs a real RF waveform")
    x = rf.samples
    n = len(x)
    spectrum = np.fft.rfft(x) / n
    amps = 2 * np.abs(spectrum)
    amps[0] = np.abs(spectrum[0])
    if n % 2 == 0:
        amps[-1] = np.abs(spectrum[-1])
    peak = amps.max()
    if peak == 0:
        raise PeakCountMismatch(f"expected {expected_count} tones, found a silent record")
    lines = np.flatnonzero(amps > _LEAKAGE_TOL * peak)
    if len(lines) > expected_count:
        # a clean record has exactly one bin per tone; extra energy right beside a line is leakage
        strongest = lines[np.argsort(amps[lines])[::-1][:expected_count]]
        if np.any(np.isin(lines, np.concatenate([strongest - 1, strongest + 1]))):
            raise NonCommensurateDuration("spectral leakage detected; the record must span whole tone periods")
    if len(lines) != expected_count:
        raise PeakCountMismatch(f"expected {expected_count} spectral lines, found {len(lines)}")
    freqs = np.fft.rfftfreq(n, d=1.0 / rf.sample_rate)
    tones = []
    for k in sorted(lines, key=lambda k: -freqs[k]):
        f = freqs[k]
        phase = canonical_phase(float(np.angle(spectrum[k])) - 2 * math.pi * f * rf.start_time)
        tones.append(ToneEstimate(float(f), float(amps[k]), phase))
    return tones


def mean_power(rf: SampledWaveform) -> float:
    return float(np.mean(rf.samples**2))


def render_waveform_csv(wave: SampledWaveform) -> str:
    buf = io.StringIO()
    columns = "I,Q" if wave.is_iq else "RF"
    buf.write(f"# sample_rate={wave.sample_rate!r} start_time={wave.start_time!r} columns={columns}\n")
    writer = csv.writer(buf, lineterminator="\n")
    rows = wave.samples if wave.is_iq else wave.samples[:, None]
    for row in rows:
        writer.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def write_waveform_csv(wave: SampledWaveform, path) -> Path:
    path = Path(path)
    path.write_text(render_waveform_csv(wave))
    return path


def read_waveform_csv(path) -> SampledWaveform:
    path = Path(path)
    with path.open(newline="") as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ConfigError(f"{path}: missing '# sample_rate=...' header")
        meta = dict(item.split("=", 1) for item in header[1:].split())
        try:
            sample_rate = float(meta["sample_rate"])
            start_time = float(meta.get("start_time", 0.0))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{path}: bad header {header.strip()!r}") from exc
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    samples = np.array(rows, dtype=float)
    if samples.ndim == 2 and samples.shape[1] == 1:
        samples = samples[:, 0]
    return SampledWaveform(sample_rate, samples, start_time)
