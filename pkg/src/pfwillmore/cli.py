"""Command-line entry points.

    pfwillmore run --config FILE [--out DIR] [--resume SNAPSHOT]
    pfwillmore energies --snapshot FILE
    pfwillmore contour --snapshot FILE --level 0.5 --out FILE
    pfwillmore check --config FILE
    pfwillmore gradcheck --energy KIND [--seed N]

Exit codes: 0 success, 1 validation/usage error, 2 solver failure
(NonConvergence or Divergence).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis, flows
from .config import ConfigError, parse_config
from .energies import ENERGY_KINDS, EnergyReport, RegParams, check_gradient, energy_report
from .grid import make_grid, random_band_limited, rms
from .io import SnapshotError, read_snapshot, write_contour_csv
from .run import run_flow

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2


def _load_config(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    result = run_flow(cfg, out_dir=args.out, resume=args.resume)
    last = result.series[-1]
    print(f"completed {result.session.n} steps to t = {result.session.t:g}")
    print(f"series: {result.series_path} ({len(result.series)} rows)")
    print(f"snapshots: {len(result.snapshot_paths)} files in {args.out or cfg.out_dir}")
    if last.R_est is not None:
        print(f"final R_est = {last.R_est:.6g}, components = {last.component_count}")
    return EXIT_OK


def _cmd_energies(args) -> int:
    snap = read_snapshot(args.snapshot)
    grid = make_grid(snap.dims, snap.points // 2)
    report = energy_report(grid, snap.u, snap.eps)
    print(EnergyReport.CSV_HEADER)
    print(report.csv_row())
    return EXIT_OK


def _cmd_contour(args) -> int:
    snap = read_snapshot(args.snapshot)
    if snap.dims != 2:
        raise ValueError("contour extraction expects a 2D snapshot")
    contour = analysis.extract_contour(snap.u, args.level, time=snap.time)
    write_contour_csv(args.out, contour)
    print(f"{len(contour.polylines)} polylines -> {args.out}")
    return EXIT_OK


def _cmd_check(args) -> int:
    cfg = _load_config(args.config)
    grid = make_grid(cfg.dims, cfg.modes)
    report = flows.stability_limits(cfg.model, grid)
    print(report.summary())
    print(f"configured dt             = {cfg.model.dt:.6g}")
    print(f"dt within heuristic bound = {cfg.model.dt <= report.heuristic_dt_max}")
    return EXIT_OK


def _cmd_gradcheck(args) -> int:
    grid = make_grid(2, args.modes)
    rng = np.random.default_rng(args.seed)
    reg = RegParams(sigma=args.sigma)
    worst = 0.0
    for _ in range(args.trials):
        u = random_band_limited(grid, rng, max_mode=args.max_mode)
        w = random_band_limited(grid, rng, max_mode=args.max_mode, offset=0.0)
        w /= max(rms(w), 1e-30)
        err = check_gradient(args.energy, grid, u, args.eps, w, h=1e-5, reg=reg)
        worst = max(worst, err)
    print(f"{args.energy}: max relative error over {args.trials} fields = {worst:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfwillmore",
        description="Phase-field Willmore flow solver and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured flow")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="override the output directory")
    p_run.add_argument("--resume", default=None, help="restart from a snapshot file")
    p_run.set_defaults(func=_cmd_run)

    p_en = sub.add_parser("energies", help="print the energy report of a snapshot")
    p_en.add_argument("--snapshot", required=True)
    p_en.set_defaults(func=_cmd_energies)

    p_ct = sub.add_parser("contour", help="extract an isocontour from a snapshot")
    p_ct.add_argument("--snapshot", required=True)
    p_ct.add_argument("--level", type=float, default=0.5)
    p_ct.add_argument("--out", required=True)
    p_ct.set_defaults(func=_cmd_contour)

    p_ck = sub.add_parser("check", help="print stability diagnostics for a config")
    p_ck.add_argument("--config", required=True)
    p_ck.set_defaults(func=_cmd_check)

    p_gc = sub.add_parser("gradcheck", help="finite-difference oracle for an energy gradient")
    p_gc.add_argument("--energy", required=True, choices=ENERGY_KINDS)
    p_gc.add_argument("--seed", type=int, default=0)
    p_gc.add_argument("--trials", type=int, default=10)
    p_gc.add_argument("--modes", type=int, default=32)
    p_gc.add_argument("--max-mode", type=int, default=6)
    p_gc.add_argument("--eps", type=float, default=0.05)
    p_gc.add_argument("--sigma", type=float, default=1e-3)
    p_gc.set_defaults(func=_cmd_gradcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, SnapshotError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (flows.NonConvergenceError, flows.DivergenceError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
