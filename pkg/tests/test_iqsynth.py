import math

import numpy as np
import pytest

from conftest import MHZ
from rabi_forge.errors import (
    ConfigError,
    NonCommensurateDuration,
    PeakCountMismatch,
    UndersampledBeat,
    UndersampledCarrier,
)
from rabi_forge.iqsynth import (
    SampledWaveform,
    extract_tones,
    lo_frequency,
    mean_power,
    read_waveform_csv,
    synthesize_iq,
    upconvert,
    write_waveform_csv,
)
from rabi_forge.model import DriveTone, LabDriveParams
from rabi_forge.verification import random_waveform_target, tone_recovery_residuals

CARRIER = 2 * math.pi * 100e6
RATE = 2e9


def two_tone(d1, d2, a1=1.0, a2=1.0, p1=0.0, p2=0.0):
    return LabDriveParams(CARRIER, DriveTone(CARRIER - d1 * MHZ, a1, p1), DriveTone(CARRIER - d2 * MHZ, a2, p2))


def test_single_tone_is_ssb_pair():
    p = two_tone(0, 20, a1=0.8, a2=0.0, p1=0.3)
    iq = synthesize_iq(p, RATE, 1e-6)
    delta = 10 * MHZ
    t = iq.times
    assert np.allclose(iq.samples[:, 0], 0.8 * np.cos(delta * t + 0.3), atol=1e-14)
    assert np.allclose(iq.samples[:, 1], 0.8 * np.sin(delta * t + 0.3), atol=1e-14)


def test_symmetric_tones_give_single_quadrature():
    iq = synthesize_iq(two_tone(0, 20, 0.5, 0.5), RATE, 1e-6)
    assert np.allclose(iq.samples[:, 0], 1.0 * np.cos(10 * MHZ * iq.times), atol=1e-14)
    assert np.max(np.abs(iq.samples[:, 1])) < 1e-14


def test_mixer_reproduces_two_tone_field():
    p = two_tone(-3, 17, 0.7, 0.4, 1.2, -0.5)
    rf = upconvert(synthesize_iq(p, RATE, 1e-6), lo_frequency(p))
    t = rf.times
    direct = sum(tone.amplitude * np.cos(tone.omega * t + tone.phase) for tone in (p.tone1, p.tone2))
    assert np.max(np.abs(rf.samples - direct)) < 1e-12


def test_upconvert_constant_envelopes():
    n = 400
    ones, zeros = np.ones(n), np.zeros(n)
    w = 2 * math.pi * 50e6
    i_only = upconvert(SampledWaveform(RATE, np.column_stack([ones, zeros])), w)
    q_only = upconvert(SampledWaveform(RATE, np.column_stack([zeros, ones])), w)
    t = i_only.times
    assert np.allclose(i_only.samples, np.cos(w * t), atol=1e-15)
    assert np.allclose(q_only.samples, -np.sin(w * t), atol=1e-15)


def test_table_a_endpoint_tones():
    w_a = CARRIER
    p = LabDriveParams(w_a, DriveTone(w_a, 1.0), DriveTone(w_a - 20 * MHZ, 1.0))
    tones = extract_tones(upconvert(synthesize_iq(p, RATE, 1e-6), lo_frequency(p)), 2)
    assert [t.frequency for t in tones] == pytest.approx([100e6, 80e6], abs=1e-3)
    assert tones[0].amplitude == pytest.approx(tones[1].amplitude, rel=1e-3)


def test_table_b_amplitude_ratio():
    p = two_tone(0, 10, 20.0, 1.0)
    tones = extract_tones(upconvert(synthesize_iq(p, RATE, 1e-6), lo_frequency(p)), 2)
    assert tones[1].amplitude / tones[0].amplitude == pytest.approx(0.05, abs=1e-3)


def test_single_tone_estimate():
    t = np.arange(2000) / RATE
    rf = SampledWaveform(RATE, 0.37 * np.cos(2 * math.pi * 31e6 * t - 2.1))
    (tone,) = extract_tones(rf, 1)
    assert tone.frequency == pytest.approx(31e6, abs=1e-6)
    assert tone.amplitude == pytest.approx(0.37, abs=1e-6)
    assert tone.phase == pytest.approx(-2.1, abs=1e-6)


def test_extract_tones_respects_start_time():
    p = two_tone(2, 9, 0.5, 0.9, 0.4, -1.0)
    rf = upconvert(synthesize_iq(p, RATE, 1e-6, start_time=3e-6), lo_frequency(p))
    tones = extract_tones(rf, 2)
    assert tones[0].phase == pytest.approx(0.4, abs=1e-9)
    assert tones[1].phase == pytest.approx(-1.0, abs=1e-9)


def test_round_trip_random_targets(rng):
    worst = np.max([tone_recovery_residuals(random_waveform_target(rng))[:2] for _ in range(20)])
    assert worst < 1e-9


def test_errors():
    p = two_tone(0, 20)
    with pytest.raises(UndersampledBeat):
        synthesize_iq(p, 10e6, 1e-6)
    with pytest.raises(UndersampledCarrier):
        upconvert(synthesize_iq(p, 200e6, 1e-6), lo_frequency(p))
    with pytest.raises(NonCommensurateDuration):
        extract_tones(upconvert(synthesize_iq(two_tone(0.37, 20), RATE, 1e-6), lo_frequency(p)), 2)
    with pytest.raises(PeakCountMismatch):
        extract_tones(upconvert(synthesize_iq(p, RATE, 1e-6), lo_frequency(p)), 3)
    with pytest.raises(PeakCountMismatch):
        extract_tones(SampledWaveform(RATE, np.zeros(100)), 1)
    with pytest.raises(ConfigError):
        SampledWaveform(-1.0, np.zeros(3))


def test_csv_round_trip(tmp_path):
    p = two_tone(1, 7, 0.3, 0.6, 0.1, 0.2)
    iq = synthesize_iq(p, RATE, 1e-7, start_time=1e-8)
    rf = upconvert(iq, lo_frequency(p))
    for wave in (iq, rf):
        back = read_waveform_csv(write_waveform_csv(wave, tmp_path / "w.csv"))
        assert back.sample_rate == wave.sample_rate and back.start_time == wave.start_time
        assert np.array_equal(back.samples, wave.samples)
    assert (tmp_path / "w.csv").read_text().startswith("# sample_rate=2000000000.0")


def test_mean_power_of_two_tones():
    p = two_tone(0, 10, 0.6, 0.8)
    rf = upconvert(synthesize_iq(p, RATE, 1e-6), lo_frequency(p))
    assert mean_power(rf) == pytest.approx((0.36 + 0.64) / 2, rel=1e-12)
