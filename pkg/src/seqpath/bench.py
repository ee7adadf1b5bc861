"""Batch solves over generated games with a per-method summary CSV."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .aqre import AqreConfig, aqre_trace
from .assessment import Assessment
from .checker import CheckVerdict, check_sequential
from .game import GameTree
from .generate import GenSpec, child_seeds, generate
from .homotopy import SolverConfig
from .tracer import TraceRecord, trace

METHODS = ("entb-z", "entb-w", "aqre")
CSV_COLUMNS = ("spec", "method", "time_avg", "time_min", "time_max",
               "iters_avg", "iters_min", "iters_max", "successes", "total")


@dataclass
class SolveOutcome:
    method: str
    success: bool
    iterations: int
    wall_time: float
    assessment: Assessment | None
    verdict: CheckVerdict | None
    trace: TraceRecord
    message: str = ""
    extra: dict = field(default_factory=dict)


def solve(game: GameTree, method: str = "entb-z", seed: int = 0,
          config: SolverConfig | None = None, aqre_config: AqreConfig | None = None) -> SolveOutcome:
    """Run one method; ``success`` means the checker accepted the terminal assessment."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "aqre":
        r = aqre_trace(game, aqre_config)
        tol = 1e-4 * max(game.payoff_range(), 1e-12)
        verdict = check_sequential(game, r.assessment, tol)
        return SolveOutcome(method, verdict.accepted, r.iterations, r.wall_time, r.assessment,
                            verdict, r.trace, r.message, {"gamma": r.gamma, "path_complete": r.success})
    cfg = replace(config or SolverConfig(), formulation=method[-1], seed=seed)
    r = trace(game, cfg)
    extra = {"attempts": r.attempts}
    if r.point is not None:
        extra["t"] = r.point[1]
    return SolveOutcome(method, r.success, r.iterations, r.wall_time, r.assessment,
                        r.verdict, r.trace, r.message, extra)


def _task(args):
    spec, seed, method = args
    game = generate(replace(spec, seed=seed))
    out = solve(game, method, seed)
    return out.success, out.iterations, out.wall_time


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def bench_rows(spec: GenSpec, count: int, methods=("entb-z", "entb-w"), jobs: int = 1) -> list[dict]:
    """One summary row per method over ``count`` games spawned from ``spec.seed``."""
    if count <= 0:
        return []
    seeds = child_seeds(spec.seed, count)
    tasks = [(spec, s, m) for m in methods for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    rows = []
    for k, m in enumerate(methods):
        chunk = results[k * count:(k + 1) * count]
        times = np.array([r[2] for r in chunk])
        iters = np.array([r[1] for r in chunk], dtype=float)
        rows.append({
            "spec": spec.label(), "method": m,
            "time_avg": _fmt(times.mean()), "time_min": _fmt(times.min()), "time_max": _fmt(times.max()),
            "iters_avg": _fmt(iters.mean()), "iters_min": _fmt(iters.min()), "iters_max": _fmt(iters.max()),
            "successes": str(sum(r[0] for r in chunk)), "total": str(count),
        })
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()

