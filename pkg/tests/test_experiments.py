import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import MHZ
from rabi_forge.errors import ConfigError, StepSizeUnderflow
from rabi_forge.experiments import (
    QUBIT_FREQUENCY,
    SweepSpec,
    bloch_trajectory,
    compare_rwa,
    figure_preset,
    preset_setting,
    run_sweep,
    sweep_hamiltonian,
)
from rabi_forge.frames import effective_arrays
from rabi_forge.model import DriveTone, EffectiveParams, LabDriveParams
from rabi_forge.propagator import IntegratorConfig, TimeGrid, commuting_drive_pe

SMALL = TimeGrid(0.0, 1e-6, 201)


def effective_of(spec):
    h = sweep_hamiltonian(spec)
    return h.omega_a_star, h.omega_d_star, h.phi0_star


def test_setting_a_spans_extreme_to_deep_strong():
    spec = preset_setting("a", n_values=5)
    w_a, w_d, _ = effective_of(spec)
    assert w_a[0] == pytest.approx(0.0, abs=1e-3) and w_a[-1] == pytest.approx(10 * MHZ, rel=1e-6)
    assert np.allclose(w_d, w_a, rtol=1e-6, atol=1e-3)
    assert 20 * MHZ / w_a[-1] == pytest.approx(2.0, rel=1e-6)


def test_setting_b_fixed_effective_frequencies():
    w_a, w_d, phi = effective_of(preset_setting("b", n_values=7))
    assert np.allclose(w_a, 5 * MHZ, rtol=1e-6) and np.allclose(w_d, 5 * MHZ, rtol=1e-6)
    assert np.all(phi == 0)


def test_setting_c_phase_spans_zero_to_pi():
    _, _, phi = effective_of(preset_setting("c", n_values=9))
    assert phi[0] == 0 and phi[-1] == pytest.approx(math.pi, rel=1e-15)
    assert np.all(np.diff(phi) > 0)


def test_unknown_setting():
    with pytest.raises(ConfigError):
        preset_setting("d")


def test_sweep_validation():
    base = preset_setting("b", n_values=3).base
    with pytest.raises(ConfigError):
        SweepSpec(base, "tone1.omega", (1.0, 2.0), SMALL)
    with pytest.raises(ConfigError):
        SweepSpec(base, "tone2.amplitude", (1.0, 1.0), SMALL)
    with pytest.raises(ConfigError):
        SweepSpec(base, "tone2.amplitude", (), SMALL)
    with pytest.raises(ConfigError):
        run_sweep(SweepSpec(base, "tone2.amplitude", (-1.0, 2.0), SMALL))


def test_setting_b_lowest_row_is_single_frequency():
    spec = preset_setting("b", n_values=3, decoherence=None, grid=TimeGrid(0, 1e-6, 1001))
    pe = run_sweep(spec).values[0]
    power = np.abs(np.fft.rfft(pe - pe.mean())) ** 2
    freqs = np.fft.rfftfreq(pe.size, 1e-9)
    # resonant rotating drive: P_e oscillates at the 20 MHz Rabi frequency
    peak = np.argmax(power)
    assert freqs[peak] == pytest.approx(20e6, abs=1.01e6)
    assert power[peak - 1:peak + 2].sum() / power.sum() > 0.95


def test_setting_a_zero_detuning_row_matches_commuting_oracle():
    spec = preset_setting("a", n_values=11, decoherence=None)
    r = run_sweep(spec)
    # zero detuning: omega_a* = omega_d* = 0, equal amplitudes -> 20 MHz * cos(phi) sx, constant
    assert np.max(np.abs(r.values[0] - commuting_drive_pe(20 * MHZ, 0.0, 0.0, r.times))) < 1e-6


def test_empty_drive_gives_ground_state():
    base = LabDriveParams(QUBIT_FREQUENCY, DriveTone(QUBIT_FREQUENCY, 0.0), DriveTone(QUBIT_FREQUENCY - 10 * MHZ, 0.0))
    for frame in ("effective", "lab"):
        spec = SweepSpec(base, "phase_difference", (0.0, 1.0, 2.0), SMALL, frame=frame)
        assert np.all(run_sweep(spec).values == 0.0)


def test_rows_follow_sweep_order_and_are_permutation_invariant():
    spec = preset_setting("c", n_values=9, grid=SMALL)
    forward = run_sweep(spec)
    backward = run_sweep(replace(spec, sweep_values=spec.sweep_values[::-1]))
    # rows share one step sequence, so reordering rows leaves every row bit-identical
    assert np.array_equal(forward.values, backward.values[::-1])
    assert np.array_equal(backward.sweep_values, np.asarray(spec.sweep_values[::-1]))


@pytest.mark.parametrize("which", ["a", "b", "c"])
def test_lab_and_effective_frames_agree(which):
    spec = preset_setting(which, n_values=5, decoherence=None, grid=SMALL)
    eff = run_sweep(spec, IntegratorConfig(1e-11, 1e-13))
    lab = run_sweep(replace(spec, frame="lab"), IntegratorConfig(1e-11, 1e-13))
    assert np.max(np.abs(eff.values - lab.values)) < 1e-7


def test_lab_full_carrier_matches_reduced_on_short_window():
    spec = replace(preset_setting("b", n_values=2, decoherence=None, grid=TimeGrid(0, 2e-8, 11)), frame="lab")
    reduced = run_sweep(spec)
    full = run_sweep(replace(spec, full_carrier=True))
    assert np.max(np.abs(reduced.values - full.values)) < 1e-7


def test_sweep_observables_and_ranges():
    spec = replace(preset_setting("b", n_values=3, grid=SMALL), observable="sz")
    r = run_sweep(spec)
    assert r.values.shape == (3, 201)
    assert np.all(np.abs(r.values) <= 1)
    assert r.values[0, 0] == -1


def test_failing_row_is_named():
    spec = preset_setting("b", n_values=3, decoherence=None, grid=SMALL)
    with pytest.raises(StepSizeUnderflow, match=r"sweep row 0 \(tone2.amplitude="):
        run_sweep(spec, IntegratorConfig(rel_tol=1e-300, abs_tol=1e-300))


def test_figure_preset_panels():
    e, grid = figure_preset("3c")
    assert e == EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 20 * MHZ, 20 * MHZ)
    assert grid.t_end == 200e-9
    with pytest.raises(ConfigError):
        figure_preset("3e")


def test_weak_trajectories_stay_in_yz_plane_and_coincide():
    e, grid = figure_preset("3a")
    a = bloch_trajectory(e, 0.0, grid)
    b = bloch_trajectory(e, math.pi / 2, grid)
    assert np.max(np.abs(a.xyz[:, 0])) < 0.05 and np.max(np.abs(b.xyz[:, 0])) < 0.05
    assert np.max(np.linalg.norm(a.xyz - b.xyz, axis=1)) < 0.05


def test_deep_strong_trajectories_depend_on_phase():
    e, grid = figure_preset("3c")
    a = bloch_trajectory(e, 0.0, grid)
    b = bloch_trajectory(e, math.pi / 2, grid)
    assert np.max(np.linalg.norm(a.xyz - b.xyz, axis=1)) > 0.5


def test_zero_drive_trajectory_is_south_pole():
    r = bloch_trajectory(EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 0.0, 0.0), grid=SMALL)
    assert np.all(r.xyz[:, :2] == 0.0)
    assert np.max(np.abs(r.xyz[:, 2] + 1.0)) < 1e-12


def test_trajectory_frames_differ_only_by_rotation():
    e = EffectiveParams(5 * MHZ, 3 * MHZ, 0.3, 20 * MHZ, 11 * MHZ)
    d = bloch_trajectory(e, grid=SMALL, frame="drive")
    f = bloch_trajectory(e, grid=SMALL, frame="effective")
    assert np.allclose(d.xyz[:, 2], f.xyz[:, 2])
    assert np.allclose(np.hypot(d.xyz[:, 0], d.xyz[:, 1]), np.hypot(f.xyz[:, 0], f.xyz[:, 1]))
    with pytest.raises(ConfigError):
        bloch_trajectory(e, grid=SMALL, frame="lab")


def test_compare_rwa_regimes():
    weak = compare_rwa(EffectiveParams(100 * MHZ, 100 * MHZ, 0.0, MHZ, MHZ), SMALL)
    assert weak.max_abs_delta_pe < 0.02
    strong = compare_rwa(EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 20 * MHZ, 20 * MHZ), SMALL)
    assert strong.max_abs_delta_pe > 0.2
    noop = compare_rwa(EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 20 * MHZ, 0.0), SMALL)
    assert noop.max_abs_delta_pe == 0.0


def test_effective_arrays_vectorize():
    w_a, w_d, phi, fw, fp = effective_arrays(10.0, np.array([9.0, 8.0]), 6.0, np.array([0.4, 0.2]), 0.0)
    assert np.allclose(w_a, [2.5, 3.0]) and np.allclose(w_d, [1.5, 1.0]) and np.allclose(phi, [0.2, 0.1])
