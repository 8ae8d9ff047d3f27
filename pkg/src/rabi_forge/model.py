"""Hamiltonians for the bichromatically driven qubit and the generalized Rabi model.

All frequencies and amplitudes are angular (rad/s), times are in seconds.
Every Hamiltonian here is traceless and Hermitian, so it is stored as a real
field ``(hx, hy, hz)`` with ``H = hx sigma_x + hy sigma_y + hz sigma_z``.

Hamiltonian objects accept scalar or array parameters.  Array parameters
broadcast against each other (and against ``t``), which is how a whole sweep
is propagated as one batch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AnisotropicInput, ConfigError, PhaseNotRepresentable, ZeroRotatingStrength


def canonical_phase(phi: float) -> float:
    """Map an angle onto ``(-pi, pi]``."""
    return math.pi - (math.pi - phi) % (2 * math.pi)


def _finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise ConfigError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class DriveTone:
    omega: float
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        _finite("drive tone", self.omega, self.amplitude, self.phase)
        if self.omega <= 0:
            raise ConfigError(f"tone frequency must be positive, got {self.omega!r}")
        if self.amplitude < 0:
            raise ConfigError(f"tone amplitude must be non-negative, got {self.amplitude!r}")
        object.__setattr__(self, "phase", canonical_phase(self.phase))


@dataclass(frozen=True)
class LabDriveParams:
    """Qubit splitting plus two drive tones; ``tone1`` is always the higher one."""

    omega_a: float
    tone1: DriveTone
    tone2: DriveTone

    def __post_init__(self):
        _finite("omega_a", self.omega_a)
        if self.tone1.omega < self.tone2.omega:
            t1, t2 = self.tone2, self.tone1
            object.__setattr__(self, "tone1", t1)
            object.__setattr__(self, "tone2", t2)


@dataclass(frozen=True)
class EffectiveParams:
    omega_a_star: float
    omega_d_star: float
    phi0_star: float
    omega1_amp: float
    omega2_amp: float

    def __post_init__(self):
        _finite("effective parameters", self.omega_a_star, self.omega_d_star, self.phi0_star,
                self.omega1_amp, self.omega2_amp)
        if self.omega_d_star < 0:
            raise ConfigError(f"omega_d_star must be >= 0, got {self.omega_d_star!r}")
        if self.omega1_amp < 0 or self.omega2_amp < 0:
            raise ConfigError("drive amplitudes must be non-negative")


@dataclass(frozen=True)
class GeneralizedRabiParams:
    omega_a: float
    omega_d: float
    a_d: float
    lam: float

    def __post_init__(self):
        _finite("generalized Rabi parameters", self.omega_a, self.omega_d, self.a_d, self.lam)
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam!r}")


class Hamiltonian:
    """Time-dependent traceless 2x2 Hamiltonian ``t -> H(t)`` (units rad/s).

    Subclasses implement :meth:`field`.  Calling the object returns the matrix
    with shape ``broadcast(params, t) + (2, 2)``.
    """

    def field(self, t):
        raise NotImplementedError

    def max_frequency(self) -> float:
        """Largest angular frequency in the model; sets the integrator's step cap."""
        raise NotImplementedError

    @property
    def batch_shape(self) -> tuple:
        return np.broadcast_shapes(*(np.shape(c) for c in self.field(0.0)))

    def __call__(self, t) -> np.ndarray:
        hx, hy, hz = np.broadcast_arrays(*self.field(t))
        h = np.empty(hx.shape + (2, 2), dtype=complex)
        h[..., 0, 0] = hz
        h[..., 1, 1] = -hz
        h[..., 0, 1] = hx - 1j * hy
        h[..., 1, 0] = hx + 1j * hy
        return h


def _max_abs(*values) -> float:
    return float(max(np.max(np.abs(v)) for v in values))


class LabHamiltonian(Hamiltonian):
    """``(w_a/2) sz + sum_i (W_i/2)(exp(+i(w_i t + p_i)) s- + h.c.)``."""

    def __init__(self, omega_a, omega1, amp1, phase1, omega2, amp2, phase2):
        self.omega_a = np.asarray(omega_a, dtype=float)
        self.omega1, self.amp1, self.phase1 = (np.asarray(v, dtype=float) for v in (omega1, amp1, phase1))
        self.omega2, self.amp2, self.phase2 = (np.asarray(v, dtype=float) for v in (omega2, amp2, phase2))

    def field(self, t):
        th1 = self.omega1 * t + self.phase1
        th2 = self.omega2 * t + self.phase2
        # exp(+i th) s- + exp(-i th) s+ = cos(th) sx + sin(th) sy
        hx = 0.5 * (self.amp1 * np.cos(th1) + self.amp2 * np.cos(th2))
        hy = 0.5 * (self.amp1 * np.sin(th1) + self.amp2 * np.sin(th2))
        hz = 0.5 * self.omega_a + 0.0 * hx
        return hx, hy, hz

    def max_frequency(self):
        return _max_abs(self.omega_a, self.omega1, self.omega2, self.amp1, self.amp2)


class EffectiveHamiltonian(Hamiltonian):
    """Rotating-frame model: co-rotating amplitude ``W1`` and counter-rotating ``W2``."""

    def __init__(self, omega_a_star, omega_d_star, phi0_star, omega1_amp, omega2_amp):
        self.omega_a_star = np.asarray(omega_a_star, dtype=float)
        self.omega_d_star = np.asarray(omega_d_star, dtype=float)
        self.phi0_star = np.asarray(phi0_star, dtype=float)
        self.omega1_amp = np.asarray(omega1_amp, dtype=float)
        self.omega2_amp = np.asarray(omega2_amp, dtype=float)

    def field(self, t):
        th = self.omega_d_star * t + self.phi0_star
        c, s = np.cos(th), np.sin(th)
        hx = 0.5 * (self.omega1_amp + self.omega2_amp) * c
        hy = 0.5 * (self.omega1_amp - self.omega2_amp) * s
        hz = 0.5 * self.omega_a_star + 0.0 * hx
        return hx, hy, hz

    def max_frequency(self):
        return _max_abs(self.omega_a_star, self.omega_d_star, self.omega1_amp, self.omega2_amp)


class ReducedRabiHamiltonian(Hamiltonian):
    """Isotropic case: ``(w_a*/2) sz + W* cos(w_d* t + phi0*) sx``."""

    def __init__(self, omega_a_star, omega_d_star, phi0_star, omega_star):
        self.omega_a_star = np.asarray(omega_a_star, dtype=float)
        self.omega_d_star = np.asarray(omega_d_star, dtype=float)
        self.phi0_star = np.asarray(phi0_star, dtype=float)
        self.omega_star = np.asarray(omega_star, dtype=float)

    def field(self, t):
        hx = self.omega_star * np.cos(self.omega_d_star * t + self.phi0_star)
        return hx, 0.0 * hx, 0.5 * self.omega_a_star + 0.0 * hx

    def max_frequency(self):
        return _max_abs(self.omega_a_star, self.omega_d_star, self.omega_star)


class GeneralizedRabiHamiltonian(Hamiltonian):
    """``(w_a/2) sz + A_d (H_r + lam H_cr)``.

    ``H_r = exp(+i w_d t) s- + h.c.`` and ``H_cr = exp(-i w_d t) s- + h.c.``.
    """

    def __init__(self, omega_a, omega_d, a_d, lam):
        self.omega_a = np.asarray(omega_a, dtype=float)
        self.omega_d = np.asarray(omega_d, dtype=float)
        self.a_d = np.asarray(a_d, dtype=float)
        self.lam = np.asarray(lam, dtype=float)

    def field(self, t):
        th = self.omega_d * t
        hx = self.a_d * (1.0 + self.lam) * np.cos(th)
        hy = self.a_d * (1.0 - self.lam) * np.sin(th)
        return hx, hy, 0.5 * self.omega_a + 0.0 * hx

    def max_frequency(self):
        return _max_abs(self.omega_a, self.omega_d, self.a_d, self.a_d * self.lam)


def lab_hamiltonian(p: LabDriveParams) -> LabHamiltonian:
    return LabHamiltonian(p.omega_a,
                          p.tone1.omega, p.tone1.amplitude, p.tone1.phase,
                          p.tone2.omega, p.tone2.amplitude, p.tone2.phase)


def effective_hamiltonian(e: EffectiveParams) -> EffectiveHamiltonian:
    return EffectiveHamiltonian(e.omega_a_star, e.omega_d_star, e.phi0_star, e.omega1_amp, e.omega2_amp)


def reduced_rabi_hamiltonian(e: EffectiveParams) -> ReducedRabiHamiltonian:
    """Isotropic reduction; requires ``omega1_amp == omega2_amp`` to 1e-9 relative."""
    if abs(e.omega1_amp - e.omega2_amp) > 1e-9 * max(e.omega1_amp, e.omega2_amp, 1.0):
        raise AnisotropicInput(
            f"reduction needs equal amplitudes, got {e.omega1_amp!r} and {e.omega2_amp!r}")
    return ReducedRabiHamiltonian(e.omega_a_star, e.omega_d_star, e.phi0_star, e.omega1_amp)


def generalized_hamiltonian(g: GeneralizedRabiParams) -> GeneralizedRabiHamiltonian:
    return GeneralizedRabiHamiltonian(g.omega_a, g.omega_d, g.a_d, g.lam)


def map_from_effective(e: EffectiveParams) -> GeneralizedRabiParams:
    """Express an effective parameter set as ``(omega_a, omega_d, A_d, lambda)``.

    ``A_d = W1 / 2`` so that ``lambda = 1`` gives ``W1 cos(w_d t) sx``.  The
    generalized model carries no drive phase, so ``phi0_star`` must be zero.
    """
    if e.omega1_amp == 0:
        raise ZeroRotatingStrength("co-rotating amplitude is zero; lambda is undefined")
    if e.phi0_star != 0:
        raise PhaseNotRepresentable(f"phi0_star={e.phi0_star!r} has no counterpart without a drive phase")
    return GeneralizedRabiParams(omega_a=e.omega_a_star, omega_d=e.omega_d_star,
                                 a_d=0.5 * e.omega1_amp, lam=e.omega2_amp / e.omega1_amp)


class Regime(str, enum.Enum):
    WEAK = "weak"
    ULTRASTRONG = "ultrastrong"
    DEEP_STRONG = "deep_strong"
    EXTREME = "extreme"


def classify_regime(e: EffectiveParams) -> Regime:
    """Driving regime from ``W = max(W1, W2)`` against ``|omega_a_star|``.

    weak: ``W <= 0.1|w|``; ultrastrong: ``0.1|w| < W <= |w|``; deep strong:
    ``W > |w|``; extreme: ``W >= 10|w|`` or ``w == 0`` (with nonzero drive).
    """
    drive = max(e.omega1_amp, e.omega2_amp)
    split = abs(e.omega_a_star)
    if drive == 0:
        return Regime.WEAK
    if split == 0 or drive >= 10 * split:
        return Regime.EXTREME
    if drive > split:
        return Regime.DEEP_STRONG
    if drive > 0.1 * split:
        return Regime.ULTRASTRONG
    return Regime.WEAK
