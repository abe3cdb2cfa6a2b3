"""Experiment driver: initialize a configured flow, march it, record outputs.

Outputs land in the configured directory:

    series.csv              one row per snapshot cadence tick
    snap_000000.pfwf ...    binary snapshots at the same cadence (plus t = 0
                            and the final state)

On NonConvergence/Divergence the partial series and a last snapshot are
flushed before the error propagates, so failed runs stay inspectable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import analysis, flows
from .config import RunConfig
from .energies import energy_report
from .geometry import builtin_scene
from .grid import make_grid
from .io import Snapshot, read_snapshot, write_series, write_snapshot

__all__ = ["RunResult", "run_flow"]


@dataclass
class RunResult:
    """Summary of one completed driver invocation."""

    session: flows.FlowSession
    series: list[analysis.SeriesPoint]
    snapshot_paths: list[str]
    series_path: str


def _observe(cfg: RunConfig, session: flows.FlowSession) -> analysis.SeriesPoint:
    u = session.u
    report = energy_report(session.grid, u, cfg.model.eps, cfg.model.reg, which=cfg.energies)
    try:
        radius = analysis.estimate_radius(u)
    except ValueError:
        radius = None
    components = analysis.count_components(u, 0.5)
    min_dist = None
    if cfg.track_contours and cfg.dims == 2:
        contour = analysis.extract_contour(u, 0.5, time=session.t)
        if len(contour.polylines) >= 2:
            min_dist = analysis.min_pair_distance(contour)
    iters = session.fp_iters[-1] if session.fp_iters else None
    return analysis.SeriesPoint(
        t=session.t,
        R_est=radius,
        energies=report,
        component_count=components,
        min_pair_distance=min_dist,
        fp_iters=iters,
    )


def _snapshot(session: flows.FlowSession) -> Snapshot:
    return Snapshot(
        dims=session.grid.dims,
        points=session.grid.points,
        eps=session.params.eps,
        alpha=session.params.alpha,
        time=session.t,
        flow=session.params.flow,
        u=session.u,
        mu=session.mu,
    )


def run_flow(cfg: RunConfig, out_dir: str | None = None, resume: str | None = None) -> RunResult:
    """Run the configured flow to cfg.duration, writing snapshots and series.

    `resume` restarts from a snapshot file instead of the scene's initial
    data (grid and flow kind must match the config).  NonConvergence and
    Divergence propagate after the partial outputs are flushed.
    """
    grid = make_grid(cfg.dims, cfg.modes)
    out = out_dir or cfg.out_dir
    os.makedirs(out, exist_ok=True)

    if resume is not None:
        snap = read_snapshot(resume)
        if snap.dims != cfg.dims or snap.points != grid.points:
            raise ValueError(
                f"snapshot grid {snap.points}^{snap.dims} does not match config "
                f"{grid.points}^{cfg.dims}"
            )
        if snap.flow != cfg.model.flow:
            raise ValueError(f"snapshot flow {snap.flow!r} does not match config {cfg.model.flow!r}")
        session = flows.FlowSession(grid=grid, params=cfg.model, u=snap.u, mu=snap.mu)
        session.t = snap.time
        session.n = round(snap.time / cfg.model.dt)
    else:
        shape = builtin_scene(cfg.scene, **cfg.scene_params)
        session = flows.new_session(grid, cfg.model, shape, track_energy=cfg.track_energy)

    series: list[analysis.SeriesPoint] = [_observe(cfg, session)]
    snapshot_paths: list[str] = []
    series_path = os.path.join(out, "series.csv")

    def flush_snapshot():
        path = os.path.join(out, f"snap_{session.n:06d}.pfwf")
        write_snapshot(path, _snapshot(session))
        snapshot_paths.append(path)

    flush_snapshot()
    steps = cfg.steps
    try:
        for _ in range(session.n, steps):
            flows.step(session)
            if session.n % cfg.snapshot_every == 0 or session.n == steps:
                series.append(_observe(cfg, session))
                flush_snapshot()
    except (flows.NonConvergenceError, flows.DivergenceError):
        fields_ok = np.all(np.isfinite(session.u)) and np.all(np.isfinite(session.mu))
        if fields_ok and session.t > series[-1].t:
            series.append(_observe(cfg, session))
            flush_snapshot()
        write_series(series_path, analysis.assemble_series(series))
        raise

    write_series(series_path, analysis.assemble_series(series))
    return RunResult(
        session=session,
        series=series,
        snapshot_paths=snapshot_paths,
        series_path=series_path,
    )
