"""``rabi-forge`` command line.

Exit codes: 0 success, 2 configuration error, 3 physics-invariant violation
(or a failed ``verify`` check), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .config import MODES, RunConfig, check_mode_requirements, load_config, parse_config
from .errors import ConfigError, PhysicsError
from .experiments import bloch_trajectory, run_sweep
from .iqsynth import lo_frequency, render_waveform_csv, synthesize_iq, upconvert
from .model import EffectiveHamiltonian, LabHamiltonian
from .output import render_csv, render_heatmap_svg, render_json, render_trajectory_svg
from .propagator import propagate_lindblad, propagate_unitary
from .verification import verify

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_IO = 0, 2, 3, 4
SETTINGS = ("a", "b", "c")
FIGURES = ("3a", "3b", "3c", "3d")


def preset_text(name: str) -> str:
    """Text of a shipped preset, e.g. ``setting_b`` or ``figure_3c``."""
    return (resources.files("rabi_forge") / "presets" / f"{name}.toml").read_text(encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rabi-forge",
                                description="Bichromatically driven qubit simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("mode", choices=MODES)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="TOML run configuration")
    src.add_argument("--setting", choices=SETTINGS, help="shipped strong-driving sweep preset")
    src.add_argument("--figure", choices=FIGURES, help="shipped Bloch-trajectory preset")
    p.add_argument("--output", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json", "svg"))
    p.add_argument("--no-decoherence", action="store_true", help="closed-system (Schroedinger) evolution")
    p.add_argument("--frame", choices=("lab", "effective"))
    p.add_argument("--seed", type=int, help="RNG seed for verify")
    p.add_argument("--subject", choices=("frames", "oracles", "waveform", "all"), help="verify suite")
    return p


def resolve_config(args) -> RunConfig | None:
    if args.config is not None:
        cfg = load_config(args.config, args.mode)
    elif args.setting is not None:
        cfg = parse_config(preset_text(f"setting_{args.setting}"), args.mode)
    elif args.figure is not None:
        cfg = parse_config(preset_text(f"figure_{args.figure}"), args.mode)
    elif args.mode == "verify":
        cfg = RunConfig(mode="verify")
    else:
        raise ConfigError(f"{args.mode} needs --config, --setting or --figure")
    overrides = {}
    if args.no_decoherence:
        overrides["decoherence"] = False
    if args.frame is not None:
        overrides["frame"] = args.frame
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {args.seed}")
        overrides["seed"] = args.seed
    if args.subject is not None:
        overrides["subject"] = args.subject
    if args.format is not None:
        overrides["output_format"] = args.format
    if args.output is not None:
        overrides["output_path"] = str(args.output)
    if overrides:
        cfg = replace(cfg, **overrides)
        check_mode_requirements(cfg)
    return cfg


def _evolve(cfg: RunConfig):
    if cfg.frame == "lab":
        d = cfg.drive
        shift = 0.0 if cfg.full_carrier else cfg.carrier - d.omega_a
        if d.tone2.omega + shift <= 0:
            raise ConfigError("carrier too low: a tone frequency became non-positive")
        h = LabHamiltonian(d.omega_a + shift, d.tone1.omega + shift, d.tone1.amplitude, d.tone1.phase,
                           d.tone2.omega + shift, d.tone2.amplitude, d.tone2.phase)
    else:
        e = cfg.effective_params()
        h = EffectiveHamiltonian(e.omega_a_star, e.omega_d_star, e.phi0_star, e.omega1_amp, e.omega2_amp)
    dec = cfg.active_decoherence
    if dec is None:
        return propagate_unitary(h, grid=cfg.grid, cfg=cfg.integrator)
    return propagate_lindblad(h, dec=dec, grid=cfg.grid, cfg=cfg.integrator)


def _render_result(result, fmt: str, svg=None) -> str:
    if fmt == "csv":
        return render_csv(result)
    if fmt == "json":
        return render_json(result)
    if svg is None:
        raise ConfigError("format: svg output is available for sweep and trajectory modes only")
    return svg(result)


def _render_waveform(cfg: RunConfig) -> str:
    p = cfg.drive
    wave = synthesize_iq(p, cfg.sample_rate, cfg.waveform_duration)
    if cfg.waveform_kind == "rf":
        wave = upconvert(wave, lo_frequency(p))
    if cfg.output_format == "csv":
        return render_waveform_csv(wave)
    if cfg.output_format == "json":
        cols = wave.samples if wave.is_iq else wave.samples[:, None]
        names = ("I", "Q") if wave.is_iq else ("RF",)
        body = {"kind": "waveform", "sample_rate_hz": wave.sample_rate, "start_time_s": wave.start_time,
                **{n: np.asarray(c).tolist() for n, c in zip(names, cols.T)}}
        return json.dumps(body, indent=1, sort_keys=True) + "\n"
    raise ConfigError("format: waveforms are written as csv or json")


def _render_verify(cfg: RunConfig) -> tuple[str, bool]:
    checks = verify(cfg.subject, cfg.seed)
    ok = all(c.passed for c in checks)
    if cfg.output_format == "json":
        body = [{"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed}
                for c in checks]
        return json.dumps(body, indent=1) + "\n", ok
    if cfg.output_format == "svg":
        raise ConfigError("format: verify reports are written as csv or json")
    lines = ["check,max_residual,tolerance,status"]
    lines += [f'"{c.name}",{c.residual:.3e},{c.tolerance:.0e},{"PASS" if c.passed else "FAIL"}' for c in checks]
    return "\n".join(lines) + "\n", ok


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute ``cfg`` and return the rendered output with its exit code."""
    if cfg.mode == "verify":
        text, ok = _render_verify(cfg)
        return text, EXIT_OK if ok else EXIT_PHYSICS
    if cfg.mode == "waveform":
        return _render_waveform(cfg), EXIT_OK
    if cfg.mode == "sweep":
        result = run_sweep(cfg.sweep_spec(), cfg.integrator)
        return _render_result(result, cfg.output_format, render_heatmap_svg), EXIT_OK
    if cfg.mode == "trajectory":
        result = bloch_trajectory(cfg.effective_params(), grid=cfg.grid, dec=cfg.active_decoherence,
                                  frame=cfg.trajectory_frame, cfg=cfg.integrator)
        return _render_result(result, cfg.output_format, render_trajectory_svg), EXIT_OK
    return _render_result(_evolve(cfg), cfg.output_format), EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        text, code = run(cfg)
        if cfg.output_path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            Path(cfg.output_path).write_text(text, encoding="utf-8")
    except ConfigError as exc:
        print(f"rabi-forge: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"rabi-forge: physics invariant violated: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except BrokenPipeError:
        # downstream reader (e.g. ``head``) closed early; not an error of ours
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except OSError as exc:
        print(f"rabi-forge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if code == EXIT_PHYSICS:
        print("rabi-forge: verification failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
