"""Command-line entry point: ``mom-tournament {run,sweep,curves,calibrate-oracle}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

import numpy as np

from . import kernels
from .datagen import Noise
from .harness import ExperimentConfig, calibrate_from_config, confidence_curve, load_config, run_experiment
from .io import emit_csv, emit_svg_curves, emit_sweep_csv, read_csv

SWEEP_PARAMS = ("N", "n_dim", "noise_tail", "r_mult")


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["base_seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        changes["threads"] = args.threads
    if getattr(args, "sigma_inflate", None) is not None:
        changes["sigma_inflate"] = args.sigma_inflate
    if getattr(args, "trials", None) is not None:
        changes["n_trials"] = args.trials
    return cfg.replace(**changes) if changes else cfg


def _with_param(cfg: ExperimentConfig, param: str, value: float) -> ExperimentConfig:
    p = cfg.problem
    if param == "N":
        return cfg.replace(problem=dataclasses.replace(p, n_per_part=int(value)))
    if param == "n_dim":
        d = int(value)
        t0 = np.zeros(d)
        t0[: min(d, p.n_dim)] = p.t0[: min(d, p.n_dim)]
        pool = cfg.pool
        if pool.center.shape != (d,):
            center = np.zeros(d)
            center[: min(d, pool.center.size)] = pool.center[: min(d, pool.center.size)]
            pool = pool.with_center(center)
        return cfg.replace(problem=dataclasses.replace(p, n_dim=d, t0=t0), pool=pool)
    if param == "noise_tail":
        if p.noise not in (Noise.STUDENT_T, Noise.SYMMETRIZED_PARETO):
            raise SystemExit("noise_tail sweeps need student_t or pareto noise")
        return cfg.replace(problem=dataclasses.replace(p, noise_param=float(value)))
    return cfg.replace(r_multipliers=(float(value),))


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    results = run_experiment(cfg)
    out = args.out or cfg.output_path
    emit_csv(results, out)
    failed = sum(r.failed for r in results)
    print(f"wrote {len(results)} rows ({failed} failed) to {out} [kernels: {kernels.BACKEND}]")
    return 0


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    groups = []
    for text in args.values.split(","):
        text = text.strip()
        if not text:
            continue
        sub = _with_param(cfg, args.param, float(text))
        groups.append((args.param, text, run_experiment(sub)))
        print(f"{args.param}={text}: {len(groups[-1][2])} rows")
    emit_sweep_csv(groups, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_curves(args) -> int:
    results = read_csv(args.inp)
    thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
    methods = list(dict.fromkeys(r.method for r in results))
    curves = {m: confidence_curve(results, m, thresholds) for m in methods}
    emit_svg_curves(curves, args.out)
    for m, pts in curves.items():
        print(m, " ".join(f"{t:.4g}:{c:.3f}" for t, c in pts))
    return 0


def cmd_calibrate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    cal = calibrate_from_config(cfg)
    for ell, (a, b) in sorted(cal.per_ell.items()):
        print(f"ell={ell:<4d} alpha={a:.6f} beta={b:.6f} beta/alpha={b / a:.6f}")
    print(f"alpha={cal.alpha:.6f} beta={cal.beta:.6f} ell={cal.ell}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mom-tournament", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="flat key = value config file")
        p.add_argument("--seed", type=int, help="override base_seed")
        p.add_argument("--threads", type=int, help="worker threads for trials")
        p.add_argument("--trials", type=int, help="override n_trials")
        p.add_argument(
            "--sigma-inflate",
            type=float,
            help="multiply the sigma handed to the tournament by this factor",
        )

    p = sub.add_parser("run", help="run the Monte Carlo experiment")
    common(p)
    p.add_argument("--out", help="output CSV (default: output_path from the config)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="repeat the experiment over one parameter")
    common(p)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("curves", help="confidence curves from a results CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--thresholds", required=True, help="comma-separated error thresholds")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("calibrate-oracle", help="estimate alpha, beta and ell")
    common(p)
    p.set_defaults(func=cmd_calibrate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
