"""``qftbs <experiment> --config <path>`` command-line driver."""
from __future__ import annotations

import argparse
import hashlib
import logging
import platform
import sys
import time
import traceback
from dataclasses import replace
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np
import scipy

from . import cases, fiber, green, interference, ssfm
from .config import EXPERIMENTS, load_config
from .errors import ConfigurationError, QFTBSError
from .experiments import run_experiment
from .io import write_csv, write_json, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("qftbs")


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qftbs", description=__doc__)
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, type=Path, help="YAML case file")
    p.add_argument("--out", type=Path, default=None, help="run directory (default runs/<name>-<experiment>)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for propagations")
    p.add_argument("--steps", type=int, default=None, help="override solver.n_steps")
    p.add_argument("--modes", type=int, default=None, help="override basis.n_modes")
    p.add_argument("--points", type=int, default=None, help="override mesh.n_points")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _defaults() -> dict:
    return {
        "window_factor": cases.WINDOW_FACTOR,
        "sweep_grid_long_ps": cases.SWEEP_DEFAULTS["long"],
        "sweep_grid_short_ps": cases.SWEEP_DEFAULTS["short"],
        "long_pump_threshold_ps": cases.LONG_PUMP_THRESHOLD / cases.PS,
        "derivative_rel_step": fiber.DispersionProfile.__dataclass_fields__["rel_step"].default,
        "aliasing_band_fraction": ssfm.ALIAS_BAND,
        "aliasing_level": ssfm.ALIAS_LEVEL,
        "unitarity_default": green.UNITARITY_TOL,
        "input_condition_limit": green.MAX_CONDITION,
        "truncation_limit": interference.TRUNCATION_LIMIT,
        "reference_frame": "p",
        "splitting": "symmetric, half dispersion / RK4 nonlinear / half dispersion",
    }


def _write_outputs(result, out: Path) -> list[str]:
    files = []
    for name, table in result.tables.items():
        files.append(write_csv(table, out / f"{name}.csv").name)
    for name, doc in result.documents.items():
        files.append(write_json(doc, out / f"{name}.json").name)
    return files


def run_case(args) -> int:
    overrides = {"n_steps": args.steps, "n_modes": args.modes, "n_points": args.points}
    try:
        cfg = load_config(args.config, **overrides)
        if cfg.experiment != args.experiment:
            cfg = replace(cfg, experiment=args.experiment)
        if args.jobs < 1:
            raise ConfigurationError("--jobs must be >= 1")
        case = cases.build_case(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QFTBSError as exc:
        print(f"setup failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    out = args.out or Path("runs") / f"{cfg.name}-{args.experiment}"
    out.mkdir(parents=True, exist_ok=True)
    raw = Path(args.config).read_bytes()
    manifest = {
        "experiment": args.experiment,
        "name": cfg.name,
        "config_path": str(args.config),
        "config_sha256": hashlib.sha256(raw).hexdigest(),
        "version": {"package": _version(), "python": platform.python_version(),
                    "numpy": np.__version__, "scipy": scipy.__version__},
        "config": cfg.to_dict(),
        "defaults": _defaults(),
        "resolved": {"window_s": case.mesh.window, "n_points": case.mesh.n_points,
                     "dt_s": case.mesh.dt, "checkpoint_stride": case.propagation.store_every,
                     **{f"carrier_{b}_m": case.carriers.wavelength(b) for b in "pqgb"}},
        "jobs": args.jobs,
    }
    start = time.perf_counter()
    try:
        result = run_experiment(case, args.jobs)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QFTBSError, np.linalg.LinAlgError, FloatingPointError) as exc:
        (out / "diagnostics.txt").write_text(traceback.format_exc())
        manifest["status"] = "numerical-error"
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        write_manifest(manifest, out / "manifest.txt")
        print(f"numerical error: {type(exc).__name__}: {exc} (see {out / 'diagnostics.txt'})",
              file=sys.stderr)
        return EXIT_NUMERICAL
    manifest["runtime_s"] = time.perf_counter() - start
    for w in result.warnings:
        log.warning(w)
        print(f"warning: {w}", file=sys.stderr)
    files = _write_outputs(result, out)
    manifest["status"] = "ok"
    manifest["summary"] = result.summary
    manifest["warnings"] = "; ".join(result.warnings) or "none"
    manifest["outputs"] = ", ".join(files)
    write_manifest(manifest, out / "manifest.txt")
    for key, value in result.summary.items():
        print(f"{key}: {value}")
    print(f"outputs written to {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run_case(args)


if __name__ == "__main__":
    sys.exit(main())
