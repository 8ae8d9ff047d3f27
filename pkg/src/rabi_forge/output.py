"""Serialization of results: CSV, JSON and hand-written SVG plots.

CSV floats use 17 significant digits so re-parsing reproduces every value
bit-exactly.  SVG output contains no timestamps or random ids, so identical
results give byte-identical files.

Heatmap color ramp: the value range [0, 1] (``Pe``) or [-1, 1] (Pauli
expectations) is mapped linearly onto :data:`RAMP_ANCHORS`, dark blue at the
low end through teal and green to yellow at the high end, and quantized to
:data:`RAMP_LEVELS` colors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import DegenerateRange
from .experiments import SweepResult, TrajectoryResult
from .propagator import EvolutionResult

RAMP_ANCHORS = (
    (0.00, (0x44, 0x01, 0x54)),
    (0.25, (0x3b, 0x52, 0x8b)),
    (0.50, (0x21, 0x90, 0x8d)),
    (0.75, (0x5d, 0xc8, 0x63)),
    (1.00, (0xfd, 0xe7, 0x25)),
)
RAMP_LEVELS = 256

_PARAM_UNITS = {"tone2.omega": "rad_per_s", "tone2.amplitude": "rad_per_s", "phase_difference": "rad"}
_PARAM_LABELS = {
    "tone2.omega": ("tone-2 frequency / 2π (MHz)", 1 / (2 * math.pi * 1e6)),
    "tone2.amplitude": ("tone-2 amplitude Ω₂ / 2π (MHz)", 1 / (2 * math.pi * 1e6)),
    "phase_difference": ("phase difference φ₁ − φ₂ (rad)", 1.0),
}
_OBS_COLUMNS = (("sx", "sigma_x"), ("sy", "sigma_y"), ("sz", "sigma_z"), ("pe", "P_e"))


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def csv_rows(result):
    """Header and rows for any result type, in the fixed column order."""
    if isinstance(result, SweepResult):
        header = [f"{result.parameter}_{_PARAM_UNITS.get(result.parameter, 'si')}", "time_s", result.observable]
        rows = [(v, t, x) for v, row in zip(result.sweep_values, result.values)
                for t, x in zip(result.times, row)]
    elif isinstance(result, TrajectoryResult):
        header = ["time_s", "x", "y", "z"]
        rows = [(t, *p) for t, p in zip(result.times, result.xyz)]
    elif isinstance(result, EvolutionResult):
        if np.ndim(result.pe) != 1:
            raise ValueError("emit a single row of a batched EvolutionResult")
        header = ["time_s"] + [name for _, name in _OBS_COLUMNS]
        rows = zip(result.times, *(result.observables[k] for k, _ in _OBS_COLUMNS))
    else:
        raise TypeError(f"cannot serialize {type(result).__name__}")
    return header, rows


def render_csv(result) -> str:
    header, rows = csv_rows(result)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(result, path) -> Path:
    path = Path(path)
    path.write_text(render_csv(result), encoding="utf-8")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    return header, data


def to_json_dict(result) -> dict:
    if isinstance(result, SweepResult):
        return {"kind": "sweep", "parameter": result.parameter, "observable": result.observable,
                "sweep_values": result.sweep_values.tolist(), "times_s": result.times.tolist(),
                "values": result.values.tolist(), "stats": result.stats}
    if isinstance(result, TrajectoryResult):
        p = result.params
        return {"kind": "trajectory", "frame": result.frame, "phi0_star": result.phi0_star,
                "effective_params": {"omega_a_star": p.omega_a_star, "omega_d_star": p.omega_d_star,
                                     "phi0_star": p.phi0_star, "omega1_amp": p.omega1_amp,
                                     "omega2_amp": p.omega2_amp},
                "times_s": result.times.tolist(), "bloch": result.xyz.tolist()}
    if isinstance(result, EvolutionResult):
        return {"kind": "evolution", "times_s": result.times.tolist(),
                "observables": {name: np.asarray(result.observables[k]).tolist() for k, name in _OBS_COLUMNS},
                "stats": result.stats}
    raise TypeError(f"cannot serialize {type(result).__name__}")


def render_json(result) -> str:
    return json.dumps(to_json_dict(result), indent=1, sort_keys=True) + "\n"


def emit_json(result, path) -> Path:
    path = Path(path)
    path.write_text(render_json(result), encoding="utf-8")
    return path


def ramp_color(u: float) -> str:
    """Hex color for ``u`` in [0, 1] on the fixed ramp (values outside are clipped)."""
    level = int(round(min(max(u, 0.0), 1.0) * (RAMP_LEVELS - 1)))
    u = level / (RAMP_LEVELS - 1)
    for (u0, c0), (u1, c1) in zip(RAMP_ANCHORS, RAMP_ANCHORS[1:]):
        if u <= u1:
            w = (u - u0) / (u1 - u0)
            rgb = [int(round(a + w * (b - a))) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*RAMP_ANCHORS[-1][1])


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _num(v) -> str:
    return f"{v:.4g}"


def render_heatmap_svg(result: SweepResult) -> str:
    n_rows, n_cols = result.values.shape
    if n_rows < 2:
        raise DegenerateRange("heatmap needs at least two sweep values")
    if n_cols < 2:
        raise DegenerateRange("heatmap needs at least two time samples")
    lo, hi = (0.0, 1.0) if result.observable == "Pe" else (-1.0, 1.0)
    left, top, width, height = 90, 20, 600, 400
    label, scale = _PARAM_LABELS.get(result.parameter, (result.parameter, 1.0))
    colors = [[ramp_color((v - lo) / (hi - lo)) for v in row] for row in result.values]

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{left + width + 110}" height="{top + height + 60}" '
           f'font-family="sans-serif" font-size="12">']
    out.append(f'<g transform="translate({left},{top}) scale({width / n_cols:.6f},{height / n_rows:.6f})" '
               f'shape-rendering="crispEdges">')
    flat = {c for row in colors for c in row}
    if len(flat) == 1:
        out.append(f'<rect x="0" y="0" width="{n_cols}" height="{n_rows}" fill="{flat.pop()}"/>')
    else:
        for i, row in enumerate(colors):
            y = n_rows - 1 - i  # first sweep value at the bottom
            j = 0
            while j < n_cols:
                k = j
                while k + 1 < n_cols and row[k + 1] == row[j]:
                    k += 1
                out.append(f'<rect x="{j}" y="{y}" width="{k - j + 1}" height="1" fill="{row[j]}"/>')
                j = k + 1
    out.append("</g>")
    out.append(f'<rect x="{left}" y="{top}" width="{width}" height="{height}" fill="none" stroke="black"/>')

    t0, t1 = result.times[0] * 1e6, result.times[-1] * 1e6
    for tv in _ticks(t0, t1):
        x = left + width * (tv - t0) / (t1 - t0)
        out.append(f'<line x1="{x:.2f}" y1="{top + height}" x2="{x:.2f}" y2="{top + height + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + height + 18}" text-anchor="middle">{_num(tv)}</text>')
    out.append(f'<text x="{left + width / 2}" y="{top + height + 40}" text-anchor="middle">time (μs)</text>')

    v0, v1 = result.sweep_values[0] * scale, result.sweep_values[-1] * scale
    for vv in _ticks(v0, v1):
        y = top + height - height * (vv - v0) / (v1 - v0)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{_num(vv)}</text>')
    out.append(f'<text transform="translate(20,{top + height / 2}) rotate(-90)" text-anchor="middle">{label}</text>')

    bar_x = left + width + 25
    steps = 64
    for s in range(steps):
        y = top + height - (s + 1) * height / steps
        out.append(f'<rect x="{bar_x}" y="{y:.2f}" width="16" height="{height / steps + 0.5:.2f}" '
                   f'fill="{ramp_color(s / (steps - 1))}"/>')
    out.append(f'<text x="{bar_x + 22}" y="{top + height}">{_num(lo)}</text>')
    out.append(f'<text x="{bar_x + 22}" y="{top + 10}">{_num(hi)}</text>')
    out.append(f'<text x="{bar_x}" y="{top + height + 40}">{result.observable}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_heatmap(result: SweepResult, path) -> Path:
    path = Path(path)
    path.write_text(render_heatmap_svg(result), encoding="utf-8")
    return path


def render_trajectory_svg(result: TrajectoryResult) -> str:
    """Bloch vector projected on the y-z plane (left) and ``<sigma_z>`` against time (right)."""
    if len(result.times) < 2:
        raise DegenerateRange("trajectory needs at least two samples")
    r, cx, cy = 150, 190, 190
    px0, pw, ph = 400, 420, 300
    py0 = cy - ph / 2
    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="860" height="400" font-family="sans-serif" font-size="12">']
    out.append(f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="#888"/>')
    out.append(f'<line x1="{cx - r}" y1="{cy}" x2="{cx + r}" y2="{cy}" stroke="#ccc"/>')
    out.append(f'<line x1="{cx}" y1="{cy - r}" x2="{cx}" y2="{cy + r}" stroke="#ccc"/>')
    pts = " ".join(f"{cx + r * y:.2f},{cy - r * z:.2f}" for _, y, z in result.xyz)
    out.append(f'<polyline points="{pts}" fill="none" stroke="#3b528b" stroke-width="1"/>')
    out.append(f'<text x="{cx + r + 4}" y="{cy + 4}">y</text>')
    out.append(f'<text x="{cx - 4}" y="{cy - r - 6}">z</text>')

    t = result.times
    span = t[-1] - t[0]
    out.append(f'<rect x="{px0}" y="{py0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<line x1="{px0}" y1="{cy}" x2="{px0 + pw}" y2="{cy}" stroke="#ccc"/>')
    pts = " ".join(f"{px0 + pw * (ti - t[0]) / span:.2f},{cy - (ph / 2) * z:.2f}"
                   for ti, z in zip(t, result.xyz[:, 2]))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#21908d" stroke-width="1"/>')
    for label, y in (("1", py0), ("0", cy), ("-1", py0 + ph)):
        out.append(f'<text x="{px0 - 6}" y="{y + 4:.2f}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{px0}" y="{py0 + ph + 18}">{_num(t[0] * 1e6)}</text>')
    out.append(f'<text x="{px0 + pw}" y="{py0 + ph + 18}" text-anchor="end">{_num(t[-1] * 1e6)}</text>')
    out.append(f'<text x="{px0 + pw / 2}" y="{py0 + ph + 36}" text-anchor="middle">time (μs)</text>')
    out.append(f'<text x="{px0 + pw / 2}" y="{py0 - 8}" text-anchor="middle">⟨σz⟩, '
               f'φ₀* = {_num(result.phi0_star)} rad</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_trajectory(result: TrajectoryResult, path) -> Path:
    path = Path(path)
    path.write_text(render_trajectory_svg(result), encoding="utf-8")
    return path
