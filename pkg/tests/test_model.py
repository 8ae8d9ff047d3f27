import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MHZ
from rabi_forge.errors import AnisotropicInput, ConfigError, PhaseNotRepresentable, ZeroRotatingStrength
from rabi_forge.model import (
    DriveTone,
    EffectiveParams,
    GeneralizedRabiHamiltonian,
    LabDriveParams,
    Regime,
    canonical_phase,
    classify_regime,
    effective_hamiltonian,
    generalized_hamiltonian,
    lab_hamiltonian,
    map_from_effective,
    reduced_rabi_hamiltonian,
)
from rabi_forge.qubit import SIGMA_X, SIGMA_Y, SIGMA_Z

W_A = 2 * math.pi * 7.173e9


def lab(a1, a2, p1=0.0, p2=0.0, d2=10.0):
    return LabDriveParams(W_A, DriveTone(W_A, a1 * MHZ, p1), DriveTone(W_A - d2 * MHZ, a2 * MHZ, p2))


def test_undriven_lab_hamiltonian():
    h = lab_hamiltonian(lab(0, 0))
    for t in (0.0, 1.3e-7, 9e-7):
        assert np.allclose(h(t), 0.5 * W_A * SIGMA_Z, rtol=0, atol=1e-6)


def test_lab_hamiltonian_at_zero():
    p = lab(20, 7)
    expected = 0.5 * W_A * SIGMA_Z + 0.5 * 27 * MHZ * SIGMA_X
    assert np.max(np.abs(lab_hamiltonian(p)(0.0) - expected)) < 1e-6


def test_lab_hamiltonian_hermitian(rng):
    for _ in range(100):
        p = lab(*rng.uniform(1, 20, 2), *rng.uniform(-3, 3, 2), d2=rng.uniform(0, 20))
        h = lab_hamiltonian(p)(rng.uniform(0, 1e-6, 10))
        residual = np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2)))) / np.max(np.abs(h))
        assert residual < 1e-12


def test_tones_are_ordered_and_phases_canonical():
    p = LabDriveParams(W_A, DriveTone(W_A - 10 * MHZ, 1.0, 4.0), DriveTone(W_A, 2.0, 0.0))
    assert p.tone1.omega == W_A and p.tone2.amplitude == 1.0
    assert -math.pi < p.tone2.phase <= math.pi
    assert canonical_phase(math.pi) == math.pi
    assert canonical_phase(-math.pi) == math.pi
    with pytest.raises(ConfigError):
        DriveTone(-1.0, 1.0)
    with pytest.raises(ConfigError):
        DriveTone(1.0, -1.0)


def test_effective_rwa_form_has_no_counter_rotation():
    e = EffectiveParams(5 * MHZ, 3 * MHZ, 0.2, 20 * MHZ, 0.0)
    t = 3.7e-8
    th = 3 * MHZ * t + 0.2
    sigma_minus = np.array([[0, 0], [1, 0]])
    expected = 2.5 * MHZ * SIGMA_Z + 10 * MHZ * (np.exp(1j * th) * sigma_minus
                                                  + np.exp(-1j * th) * sigma_minus.T)
    assert np.max(np.abs(effective_hamiltonian(e)(t) - expected)) < 1e-6


def test_effective_equal_amplitudes_is_single_axis_drive():
    e = EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 20 * MHZ, 20 * MHZ)
    assert np.max(np.abs(effective_hamiltonian(e)(0.0) - (2.5 * MHZ * SIGMA_Z + 20 * MHZ * SIGMA_X))) < 1e-6
    t = np.random.default_rng(1).uniform(0, 1e-6, 1000)
    e = EffectiveParams(5 * MHZ, 4 * MHZ, 0.7, 20 * MHZ, 20 * MHZ)
    h_eff = effective_hamiltonian(e)(t)
    h_red = reduced_rabi_hamiltonian(e)(t)
    assert np.max(np.abs(h_eff - h_red)) < 1e-6
    expected = 20 * MHZ * np.cos(4 * MHZ * t + 0.7)[:, None, None] * SIGMA_X + 2.5 * MHZ * SIGMA_Z
    assert np.max(np.abs(h_red - expected)) < 1e-6


def test_reduced_rabi_node_and_commuting_limit():
    e = EffectiveParams(5 * MHZ, 4 * MHZ, 0.0, 20 * MHZ, 20 * MHZ)
    node = (math.pi / 2) / (4 * MHZ)
    assert np.max(np.abs(reduced_rabi_hamiltonian(e)(node) - 2.5 * MHZ * SIGMA_Z)) < 1e-6
    e0 = EffectiveParams(0.0, 4 * MHZ, 0.3, 20 * MHZ, 20 * MHZ)
    h = reduced_rabi_hamiltonian(e0)
    a, b = h(1e-8), h(2.3e-7)
    assert np.max(np.abs(a @ b - b @ a)) == 0
    with pytest.raises(AnisotropicInput):
        reduced_rabi_hamiltonian(EffectiveParams(0.0, 4 * MHZ, 0.0, 20 * MHZ, 19 * MHZ))


def test_generalized_limits():
    t = 7.1e-8
    h1 = GeneralizedRabiHamiltonian(5 * MHZ, 4 * MHZ, 10 * MHZ, 1.0)(t)
    assert np.max(np.abs(h1 - (2.5 * MHZ * SIGMA_Z + 2 * 10 * MHZ * math.cos(4 * MHZ * t) * SIGMA_X))) < 1e-6
    h0 = GeneralizedRabiHamiltonian(5 * MHZ, 4 * MHZ, 10 * MHZ, 0.0)(t)
    th = 4 * MHZ * t
    rotating = 10 * MHZ * (math.cos(th) * SIGMA_X + math.sin(th) * SIGMA_Y)
    assert np.max(np.abs(h0 - (2.5 * MHZ * SIGMA_Z + rotating))) < 1e-6


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(0, 20), st.floats(0.5, 20), st.floats(0, 20))
def test_generalized_matches_effective_via_mapping(wa, wd, w1, w2):
    e = EffectiveParams(wa * MHZ, wd * MHZ, 0.0, w1 * MHZ, w2 * MHZ)
    t = np.linspace(0, 1e-6, 1000)
    diff = generalized_hamiltonian(map_from_effective(e))(t) - effective_hamiltonian(e)(t)
    assert np.max(np.abs(diff)) <= 1e-12 * 40 * MHZ


@pytest.mark.parametrize("w2, a_d, lam", [(20, 10, 1.0), (1, 10, 0.05), (0, 10, 0.0)])
def test_map_from_effective_examples(w2, a_d, lam):
    g = map_from_effective(EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 20 * MHZ, w2 * MHZ))
    assert g.a_d == pytest.approx(a_d * MHZ, rel=1e-15)
    assert g.lam == pytest.approx(lam, rel=1e-15)


def test_map_from_effective_errors():
    with pytest.raises(ZeroRotatingStrength):
        map_from_effective(EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 0.0, 1.0))
    with pytest.raises(PhaseNotRepresentable):
        map_from_effective(EffectiveParams(5 * MHZ, 5 * MHZ, 0.5, 1.0, 1.0))


@pytest.mark.parametrize("split, drive, regime", [
    (2000, 20, Regime.WEAK),
    (100, 20, Regime.ULTRASTRONG),
    (10, 20, Regime.DEEP_STRONG),
    (0, 20, Regime.EXTREME),
    (1, 20, Regime.EXTREME),
    (5, 0, Regime.WEAK),
])
def test_classify_regime(split, drive, regime):
    e = EffectiveParams(split * MHZ, split * MHZ, 0.0, drive * MHZ, drive * MHZ)
    assert classify_regime(e) is regime


def test_batched_parameters_broadcast():
    e = effective_hamiltonian(EffectiveParams(5 * MHZ, 5 * MHZ, 0.0, 20 * MHZ, 20 * MHZ))
    assert e(np.zeros(7)).shape == (7, 2, 2)
    g = GeneralizedRabiHamiltonian(np.array([1.0, 2.0, 3.0]), 1.0, 1.0, 0.5)
    assert g.batch_shape == (3,)
    assert g(0.0).shape == (3, 2, 2)
