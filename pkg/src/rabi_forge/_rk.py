"""Batched Dormand-Prince 8(5,3) integrator for complex linear ODEs.

The state has shape ``(batch..., k)``.  One step size is shared by the whole
batch and chosen from the worst row's error norm, so rows stay synchronized
and permuting rows permutes results without changing them.  Steps are clipped
to land exactly on each requested output time, so no dense-output
interpolation is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
# Tableau of Hairer's DOP853; scipy's solve_ivp cannot share a step across a
# batch or report per-row errors, so only the coefficients are reused.
from scipy.integrate._ivp import dop853_coefficients as _dop

from .errors import StepSizeUnderflow

_N = _dop.N_STAGES
_C = _dop.C[:_N]
_A = [[(j, float(_dop.A[s, j])) for j in range(s) if _dop.A[s, j] != 0.0] for s in range(_N)]
_B = [(j, float(b)) for j, b in enumerate(_dop.B) if b != 0.0]
_E3 = [(j, float(e)) for j, e in enumerate(_dop.E3) if e != 0.0]
_E5 = [(j, float(e)) for j, e in enumerate(_dop.E5) if e != 0.0]

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_EXPONENT = -1.0 / 8.0


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    worst_error: float = 0.0
    min_step: float = float("inf")
    max_step_taken: float = 0.0


def _combine(k, weights):
    acc = k[weights[0][0]] * weights[0][1]
    for j, w in weights[1:]:
        acc = acc + k[j] * w
    return acc


def _error_norm(k, step, y_old, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        e5 = np.abs(_combine(k, _E5)) / scale
        e3 = np.abs(_combine(k, _E3)) / scale
        s5 = np.sum(e5 * e5, axis=-1)
        s3 = np.sum(e3 * e3, axis=-1)
        denom = s5 + 0.01 * s3
        n = y_old.shape[-1]
        per_row = np.where(denom > 0, step * s5 / np.sqrt(np.where(denom > 0, denom, 1.0) * n), 0.0)
    err = float(np.max(per_row))
    # overflowing or non-finite estimates count as a failed step
    return err if np.isfinite(err) else np.inf


def _rms(v):
    with np.errstate(over="ignore"):
        return float(np.sqrt(np.mean(np.abs(v) ** 2)))


def _initial_step(rhs, t0, y0, f0, rtol, atol, max_step, span):
    # Hairer, Norsett & Wanner, "Solving ODEs I", II.4
    scale = atol + rtol * np.abs(y0)
    d0, d1 = _rms(y0 / scale), _rms(f0 / scale)
    if not (np.isfinite(d0) and np.isfinite(d1)):
        return min(1e-6 * span, max_step)
    h0 = 1e-6 * span if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step, span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = _rms((f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6 * span, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 8)
    return min(100 * h0, h1, max_step, span)


def integrate(rhs, y0, times, rtol=1e-9, atol=1e-11, max_step=np.inf, on_sample=None):
    """Integrate ``dy/dt = rhs(t, y)`` and return ``y`` at every entry of ``times``.

    ``times`` must be strictly increasing; ``times[0]`` is the initial time.
    ``on_sample(y)`` may return a replacement state at each output time (used
    for renormalization).  Returns ``(ys, stats)`` with ``ys`` shaped
    ``(len(times),) + y0.shape``.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("output times must be strictly increasing")
    y = np.array(y0, dtype=complex)
    out = np.empty((len(times),) + y.shape, dtype=complex)
    out[0] = y
    stats = StepStats()
    if len(times) == 1:
        return out, stats

    t = times[0]
    f = rhs(t, y)
    h = _initial_step(rhs, t, y, f, rtol, atol, max_step, times[-1] - times[0])
    k = [None] * (_N + 1)
    for i_out in range(1, len(times)):
        t_target = times[i_out]
        while t < t_target:
            remaining = t_target - t
            # absorb slivers so the next step does not start a hair before the target
            last = h >= 0.99 * remaining
            step = remaining if last else h
            if step <= 10 * np.spacing(abs(t)):
                raise StepSizeUnderflow(
                    f"step size {step!r} underflowed at t={t!r}", t=t, worst_error=stats.worst_error)
            k[0] = f
            for s in range(1, _N):
                k[s] = rhs(t + _C[s] * step, y + step * _combine(k, _A[s]))
            y_new = y + step * _combine(k, _B)
            t_new = t_target if last else t + step
            k[_N] = rhs(t_new, y_new)
            err = _error_norm(k, step, y, y_new, rtol, atol)
            if not np.all(np.isfinite(y_new)):
                err = np.inf
            if err <= 1.0:
                t, y, f = t_new, y_new, k[_N]
                stats.accepted += 1
                stats.worst_error = max(stats.worst_error, err)
                stats.min_step = min(stats.min_step, step)
                stats.max_step_taken = max(stats.max_step_taken, step)
                factor = _MAX_FACTOR if err == 0 else min(_MAX_FACTOR, _SAFETY * err ** _EXPONENT)
                # a clipped final step says nothing about how far the next one can go
                h = min(max(h, step * factor) if last else step * factor, max_step)
            else:
                stats.rejected += 1
                h = step * max(_MIN_FACTOR, _SAFETY * err ** _EXPONENT)
        if on_sample is not None:
            replaced = on_sample(y)
            if replaced is not None:
                y = replaced
                f = rhs(t, y)
        out[i_out] = y
    return out, stats
