"""Rotating-frame transformation from the lab drive to the effective model.

The frame is a z rotation ``U(t) = exp(-i (omega t + phi) sigma_z / 2)`` with
``omega`` the mean tone frequency and ``phi`` the mean tone phase.  A
Hamiltonian transforms as ``U^dag H U - i U^dag dU/dt``; the second term is
exactly ``-(omega / 2) sigma_z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import EffectiveHamiltonian, EffectiveParams, Hamiltonian, LabDriveParams, lab_hamiltonian
from .qubit import SIGMA_Z, dagger


@dataclass(frozen=True)
class FrameSpec:
    omega: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.omega) and math.isfinite(self.phi)):
            raise ValueError("frame parameters must be finite")


def effective_arrays(omega_a, omega1, omega2, phase1, phase2):
    """Array form of the lab-to-effective map.

    Returns ``(omega_a_star, omega_d_star, phi0_star, frame_omega, frame_phi)``.
    """
    frame_omega = 0.5 * (np.asarray(omega1) + omega2)
    frame_phi = 0.5 * (np.asarray(phase1) + phase2)
    return (omega_a - frame_omega, 0.5 * (np.asarray(omega1) - omega2),
            0.5 * (np.asarray(phase1) - phase2), frame_omega, frame_phi)


def effective_params(p: LabDriveParams) -> tuple[EffectiveParams, FrameSpec]:
    w_a, w_d, phi0, frame_omega, frame_phi = (float(v) for v in effective_arrays(
        p.omega_a, p.tone1.omega, p.tone2.omega, p.tone1.phase, p.tone2.phase))
    eff = EffectiveParams(omega_a_star=w_a, omega_d_star=w_d, phi0_star=phi0,
                          omega1_amp=p.tone1.amplitude, omega2_amp=p.tone2.amplitude)
    return eff, FrameSpec(omega=frame_omega, phi=frame_phi)


def frame_angle(f: FrameSpec, t):
    return f.omega * np.asarray(t, dtype=float) + f.phi


def frame_unitary(f: FrameSpec, t) -> np.ndarray:
    """``exp(-i (omega t + phi) sigma_z / 2)``; vectorized over ``t``."""
    half = 0.5 * frame_angle(f, t)
    u = np.zeros(np.shape(half) + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(-1j * half)
    u[..., 1, 1] = np.exp(1j * half)
    return u


def frame_unitary_derivative(f: FrameSpec, t) -> np.ndarray:
    """Analytic ``dU/dt = -i (omega / 2) sigma_z U``."""
    return -0.5j * f.omega * (SIGMA_Z @ frame_unitary(f, t))


class TransformedHamiltonian(Hamiltonian):
    """``t -> U^dag(t) H(t) U(t) - (omega/2) sigma_z`` for an arbitrary inner Hamiltonian."""

    def __init__(self, inner, frame: FrameSpec):
        self.inner = inner
        self.frame = frame

    def __call__(self, t):
        u = frame_unitary(self.frame, t)
        h = self.inner(t)
        return dagger(u) @ h @ u - 0.5 * self.frame.omega * SIGMA_Z

    def field(self, t):
        h = self(t)
        return h[..., 1, 0].real, h[..., 1, 0].imag, 0.5 * (h[..., 0, 0] - h[..., 1, 1]).real

    def max_frequency(self):
        inner = getattr(self.inner, "max_frequency", None)
        return max(inner() if inner else 0.0, abs(self.frame.omega))


def transform_hamiltonian(h, f: FrameSpec) -> TransformedHamiltonian:
    return TransformedHamiltonian(h, f)


def transform_state(state: np.ndarray, f: FrameSpec, t: float, direction: str = "lab_to_rot") -> np.ndarray:
    """Move a pure state or density matrix between the lab and rotating frames.

    ``lab_to_rot`` applies ``U^dag``; ``rot_to_lab`` applies ``U``.
    """
    u = frame_unitary(f, t)
    if direction == "lab_to_rot":
        u = dagger(u)
    elif direction != "rot_to_lab":
        raise ValueError(f"direction must be 'lab_to_rot' or 'rot_to_lab', got {direction!r}")
    state = np.asarray(state, dtype=complex)
    if state.shape[-1:] == (2,) and state.ndim == 1:
        return u @ state
    return u @ state @ dagger(u)


def transformation_residual(p: LabDriveParams, times) -> float:
    """Max entrywise ``|U^dag H_lab U - i U^dag dU - H_eff|`` over ``times``, relative to ``max|H_lab|``.

    Unlike :class:`TransformedHamiltonian` this uses the analytic ``dU/dt``
    as a matrix product rather than its folded closed form.
    """
    e, f = effective_params(p)
    times = np.asarray(times, dtype=float)
    u = frame_unitary(f, times)
    ud = dagger(u)
    h_lab = lab_hamiltonian(p)(times)
    h_rot = ud @ h_lab @ u - 1j * (ud @ frame_unitary_derivative(f, times))
    h_eff = EffectiveHamiltonian(e.omega_a_star, e.omega_d_star, e.phi0_star,
                                 e.omega1_amp, e.omega2_amp)(times)
    scale = np.max(np.abs(h_lab))
    return float(np.max(np.abs(h_rot - h_eff)) / scale)


def derivative_residual(f: FrameSpec, times, rel_step: float = 1e-2) -> float:
    """Five-point central-difference check of the analytic ``dU/dt``, relative to ``|omega|/2``.

    The step is ``rel_step / |omega|``.  At microsecond times the frame angle
    ``omega t`` is ~1e4 rad and carries ~1e-11 rad of rounding, which a
    difference quotient amplifies by ``1 / (omega h)``; a fourth-order stencil
    lets the step be large enough to keep that, and the truncation error, near
    1e-9.
    """
    if f.omega == 0:
        return 0.0
    h = rel_step / abs(f.omega)
    times = np.asarray(times, dtype=float)

    def u(k):
        return frame_unitary(f, times + k * h)

    fd = (u(-2) - 8 * u(-1) + 8 * u(1) - u(2)) / (12 * h)
    exact = frame_unitary_derivative(f, times)
    return float(np.max(np.abs(fd - exact)) / (0.5 * abs(f.omega)))
