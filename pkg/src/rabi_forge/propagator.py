"""Time evolution of pure states and density matrices, plus analytic reference solutions.

Pure states follow ``i dpsi/dt = H(t) psi``.  Density matrices follow the
Lindblad equation with an amplitude-damping channel ``sigma_-`` at rate
``1/T1`` and a pure-dephasing channel ``sigma_z`` at rate
``gamma_phi / 2`` where ``gamma_phi = 1/T2 - 1/(2 T1)``.

Hamiltonians may carry batched parameters; the initial state is broadcast
over the batch and every observable series then has shape
``batch + (n_samples,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rk
from .errors import ConfigError, InvalidState, InvariantViolation, UnphysicalDecoherence
from .model import Hamiltonian
from .qubit import GROUND, projector

OBSERVABLES = ("sx", "sy", "sz", "pe")


@dataclass(frozen=True)
class DecoherenceParams:
    t1: float = math.inf
    t2: float = math.inf

    def __post_init__(self):
        for name, v in (("t1", self.t1), ("t2", self.t2)):
            if math.isnan(v) or v <= 0:
                raise ConfigError(f"{name} must be positive, got {v!r}")
        if self.t2 > 2 * self.t1:
            raise UnphysicalDecoherence(
                f"t2={self.t2!r} exceeds 2*t1={2 * self.t1!r}; pure dephasing rate would be negative")

    @property
    def gamma1(self) -> float:
        return 1.0 / self.t1

    @property
    def gamma_phi(self) -> float:
        return 1.0 / self.t2 - 0.5 / self.t1

    @property
    def is_closed(self) -> bool:
        return math.isinf(self.t1) and math.isinf(self.t2)


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_samples: int

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ConfigError("time grid bounds must be finite")
        if self.t_end <= self.t_start:
            raise ConfigError(f"t_end ({self.t_end!r}) must exceed t_start ({self.t_start!r})")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ConfigError(f"n_samples must be an integer >= 2, got {self.n_samples!r}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.n_samples))


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = math.inf
    renormalize: bool = False

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise ConfigError("integrator tolerances and max_step must be positive")

    def step_cap(self, h) -> float:
        """``max_step`` tightened to ``1/(50 f_max)`` for the fastest frequency in ``h``."""
        cap = self.max_step
        max_frequency = getattr(h, "max_frequency", None)
        if max_frequency is not None:
            w = max_frequency()
            if w > 0:
                cap = min(cap, 2 * math.pi / (50 * w))
        return cap


@dataclass
class EvolutionResult:
    times: np.ndarray
    observables: dict
    states: np.ndarray | None = None
    stats: dict = field(default_factory=dict)

    @property
    def sx(self):
        return self.observables["sx"]

    @property
    def sy(self):
        return self.observables["sy"]

    @property
    def sz(self):
        return self.observables["sz"]

    @property
    def pe(self):
        return self.observables["pe"]

    def row(self, index) -> "EvolutionResult":
        """Select one member of a batched result."""
        obs = {k: v[index] for k, v in self.observables.items()}
        states = None if self.states is None else self.states[index]
        return EvolutionResult(self.times, obs, states, dict(self.stats))


def _field_or_matrix(h, t):
    if isinstance(h, Hamiltonian) and type(h).field is not Hamiltonian.field:
        hx, hy, hz = h.field(t)
        return hz, hx - 1j * hy, hx + 1j * hy, -hz
    m = np.asarray(h(t))
    return m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]


def _batch_shape(h, t0):
    return np.shape(np.asarray(h(t0)))[:-2]


def _pure_rhs(h):
    def rhs(t, y):
        a, b, c, d = _field_or_matrix(h, t)
        out = np.empty_like(y)
        out[..., 0] = -1j * (a * y[..., 0] + b * y[..., 1])
        out[..., 1] = -1j * (c * y[..., 0] + d * y[..., 1])
        return out
    return rhs


def _lindblad_rhs(h, gamma1, gamma_phi):
    coh = 0.5 * gamma1 + gamma_phi

    # rho flattened as (ee, eg, ge, gg)
    def rhs(t, y):
        a, b, c, d = _field_or_matrix(h, t)
        r00, r01, r10, r11 = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
        out = np.empty_like(y)
        out[..., 0] = -1j * (b * r10 - r01 * c) - gamma1 * r00
        out[..., 1] = -1j * ((a - d) * r01 + b * (r11 - r00)) - coh * r01
        out[..., 2] = -1j * ((d - a) * r10 + c * (r00 - r11)) - coh * r10
        out[..., 3] = -1j * (c * r01 - r10 * b) + gamma1 * r00
        return out
    return rhs


def _pure_observables(psi):
    e, g = psi[..., 0], psi[..., 1]
    z = np.conj(e) * g
    sz = np.abs(e) ** 2 - np.abs(g) ** 2
    return {"sx": 2 * z.real, "sy": 2 * z.imag, "sz": sz, "pe": np.abs(e) ** 2}


def _density_observables(rho):
    r10 = rho[..., 2]
    sz = (rho[..., 0] - rho[..., 3]).real
    return {"sx": 2 * r10.real, "sy": 2 * r10.imag, "sz": sz, "pe": rho[..., 0].real}


def _move_time_last(arr, n_state_axes):
    # integrator output is (time, batch..., state...); results are (batch..., time, ...)
    batch_ndim = arr.ndim - 1 - n_state_axes
    return np.moveaxis(arr, 0, batch_ndim)


def _check_populations(pe):
    if not np.all((pe >= -1e-9) & (pe <= 1 + 1e-9)):
        raise InvariantViolation(f"excited population left [0, 1]: range [{pe.min()!r}, {pe.max()!r}]")


def propagate_unitary(h, psi0=GROUND, grid: TimeGrid = None, cfg: IntegratorConfig = None,
                      store_states: bool = False, check: bool = True) -> EvolutionResult:
    """Solve the Schrodinger equation on ``grid`` starting from ``psi0`` (default ``|g>``).

    With ``check`` set, raises :class:`InvariantViolation` when the norm drifts
    by more than ``1e-9`` (unless renormalizing) or ``P_e`` leaves ``[0, 1]``.
    """
    if grid is None:
        raise ConfigError("a TimeGrid is required")
    cfg = cfg or IntegratorConfig()
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape[-1:] != (2,):
        raise InvalidState(f"pure state must have a trailing axis of length 2, got {psi0.shape}")
    times = grid.times
    shape = np.broadcast_shapes(_batch_shape(h, times[0]), psi0.shape[:-1])
    y0 = np.broadcast_to(psi0, shape + (2,)).copy()

    on_sample = None
    if cfg.renormalize:
        def on_sample(y):
            return y / np.sqrt(np.sum(np.abs(y) ** 2, axis=-1, keepdims=True))

    ys, st = _rk.integrate(_pure_rhs(h), y0, times, cfg.rel_tol, cfg.abs_tol, cfg.step_cap(h), on_sample)
    norm_drift = float(np.max(np.abs(np.sum(np.abs(ys) ** 2, axis=-1) - 1.0)))
    obs = {k: _move_time_last(v, 0) for k, v in _pure_observables(ys).items()}
    stats = {"accepted": st.accepted, "rejected": st.rejected, "worst_error": st.worst_error,
             "norm_drift": norm_drift}
    if check:
        if not cfg.renormalize and not norm_drift <= 1e-9:
            raise InvariantViolation(f"state norm drifted by {norm_drift!r}")
        _check_populations(obs["pe"])
    states = _move_time_last(ys, 1) if store_states else None
    return EvolutionResult(times, obs, states, stats)


def _rho_diagnostics(ys):
    r00, r01, r10, r11 = (ys[..., i] for i in range(4))
    trace = r00 + r11
    trace_drift = float(np.max(np.abs(trace - 1.0)))
    herm = float(max(np.max(np.abs(r01 - np.conj(r10))), np.max(np.abs(r00.imag)), np.max(np.abs(r11.imag))))
    gap = np.sqrt((r00.real - r11.real) ** 2 + 4 * np.abs(r01) ** 2)
    min_eig = float(np.min(0.5 * (trace.real - gap)))
    return trace_drift, herm, min_eig


def propagate_lindblad(h, rho0=None, dec: DecoherenceParams = None, grid: TimeGrid = None,
                       cfg: IntegratorConfig = None, store_states: bool = False,
                       check: bool = True) -> EvolutionResult:
    """Integrate the Lindblad equation from ``rho0`` (default ``|g><g|``).

    ``rho0`` may also be given as a pure state vector.  With ``check`` set,
    raises :class:`InvariantViolation` if any output sample has trace drift
    above ``1e-9``, a Hermiticity defect above ``1e-10`` or an eigenvalue below
    ``-1e-8``.
    """
    if grid is None:
        raise ConfigError("a TimeGrid is required")
    cfg = cfg or IntegratorConfig()
    dec = dec or DecoherenceParams()
    rho0 = projector(GROUND) if rho0 is None else np.asarray(rho0, dtype=complex)
    if rho0.shape == (2,):
        rho0 = projector(rho0)
    if rho0.shape[-2:] != (2, 2):
        raise InvalidState(f"density matrix must be 2x2, got {rho0.shape}")
    times = grid.times
    shape = np.broadcast_shapes(_batch_shape(h, times[0]), rho0.shape[:-2])
    y0 = np.broadcast_to(rho0.reshape(rho0.shape[:-2] + (4,)), shape + (4,)).copy()

    gamma1 = 0.0 if math.isinf(dec.t1) else dec.gamma1
    gamma_phi = 0.0 if dec.is_closed else dec.gamma_phi
    rhs = _lindblad_rhs(h, gamma1, gamma_phi)
    ys, st = _rk.integrate(rhs, y0, times, cfg.rel_tol, cfg.abs_tol, cfg.step_cap(h))
    trace_drift, herm, min_eig = _rho_diagnostics(ys)
    obs = {k: _move_time_last(v, 0) for k, v in _density_observables(ys).items()}
    stats = {"accepted": st.accepted, "rejected": st.rejected, "worst_error": st.worst_error,
             "trace_drift": trace_drift, "hermiticity_defect": herm, "min_eigenvalue": min_eig}
    if check:
        if not trace_drift <= 1e-9:
            raise InvariantViolation(f"trace drifted by {trace_drift!r}")
        if not herm <= 1e-10:
            raise InvariantViolation(f"density matrix lost Hermiticity by {herm!r}")
        if not min_eig >= -1e-8:
            raise InvariantViolation(f"density matrix eigenvalue fell to {min_eig!r}")
        _check_populations(obs["pe"])
    states = None
    if store_states:
        states = _move_time_last(ys.reshape(ys.shape[:-1] + (2, 2)), 2)
    return EvolutionResult(times, obs, states, stats)


def rabi_formula(delta, omega, t):
    """RWA excited population from ``|g>``: ``W^2/(D^2+W^2) sin^2(sqrt(D^2+W^2) t / 2)``."""
    delta, omega, t = (np.asarray(v, dtype=float) for v in (delta, omega, t))
    gen2 = delta**2 + omega**2
    with np.errstate(invalid="ignore", divide="ignore"):
        contrast = np.where(gen2 > 0, omega**2 / np.where(gen2 > 0, gen2, 1.0), 0.0)
    result = contrast * np.sin(0.5 * np.sqrt(gen2) * t) ** 2
    return float(result) if result.ndim == 0 else result


def commuting_drive_pe(omega_star, omega_d_star, phi0_star, t):
    """Exact ``P_e`` from ``|g>`` for ``H = W cos(w_d t + phi0) sigma_x`` (zero splitting).

    The Hamiltonian commutes with itself at all times, so ``P_e = sin^2(Theta)``
    with ``Theta = (W/w_d)(sin(w_d t + phi0) - sin(phi0))``; ``w_d = 0`` uses
    the limit ``Theta = W t cos(phi0)``.
    """
    if omega_d_star < 0:
        raise ConfigError(f"omega_d_star must be >= 0, got {omega_d_star!r}")
    t = np.asarray(t, dtype=float)
    if omega_d_star == 0:
        theta = omega_star * t * math.cos(phi0_star)
    else:
        theta = (omega_star / omega_d_star) * (np.sin(omega_d_star * t + phi0_star) - math.sin(phi0_star))
    result = np.sin(theta) ** 2
    return float(result) if result.ndim == 0 else result
