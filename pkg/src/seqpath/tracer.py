"""Predictor-corrector path following for the entropy homotopy.

The path is followed in (x, t) from t = 1 towards t = 0 with an arclength
parametrization: Euler predictor along the unit kernel vector of the
Jacobian, Newton corrector restricted to the hyperplane orthogonal to the
tangent.  When t drops below ``t_end`` the point is polished by Newton in x
at a tiny frozen t, dominated entries are rounded to zero, and the result is
checked for sequential rationality.
"""
from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .assessment import Assessment, UndefinedBeliefError, bayes_beliefs, homotopy_perturb
from .checker import CheckVerdict, check_sequential
from .game import GameTree
from .homotopy import EntropyHomotopy, SolverConfig


class TraceFailure(RuntimeError):
    pass


@dataclass
class TraceRecord:
    t: list[float] = field(default_factory=list)
    step: list[float] = field(default_factory=list)
    corrector_iters: list[int] = field(default_factory=list)
    beta: list[np.ndarray] = field(default_factory=list)

    def append(self, t, step, iters, beta):
        self.t.append(float(t))
        self.step.append(float(step))
        self.corrector_iters.append(int(iters))
        self.beta.append(np.array(beta, dtype=float))

    def __len__(self):
        return len(self.t)

    def to_tsv(self, labels: list[str] | None = None) -> str:
        buf = io.StringIO()
        m = len(self.beta[0]) if self.beta else 0
        labels = labels or [f"beta{k}" for k in range(m)]
        buf.write("\t".join(["t", "step", "corrector_iters", *labels]) + "\n")
        for t, h, k, b in zip(self.t, self.step, self.corrector_iters, self.beta):
            buf.write("\t".join([repr(t), repr(h), str(k), *map(repr, b.tolist())]) + "\n")
        return buf.getvalue()


@dataclass
class PathResult:
    success: bool
    point: tuple[np.ndarray, float] | None
    assessment: Assessment | None
    verdict: CheckVerdict | None
    trace: TraceRecord
    iterations: int
    wall_time: float
    attempts: int = 1
    alpha: np.ndarray | None = None
    message: str = ""


def _log(t: float, base10: bool) -> float:
    return math.log10(t) if base10 else math.log(t)


def step_bound(t: float, cfg: SolverConfig) -> float:
    return cfg.step_scale * 10.0 ** (cfg.step_rate * _log(t, cfg.log10_schedule))


def accuracy(t: float, cfg: SolverConfig) -> float:
    return cfg.accuracy_scale * 10.0 ** (cfg.accuracy_rate * _log(t, cfg.log10_schedule))


def equilibrate(A: np.ndarray) -> np.ndarray:
    """Row scales making every row's sup-norm 1 (rows of unreached sets are tiny)."""
    s = np.abs(A).max(axis=1)
    return np.where(s > 0, s, 1.0)


def tangent(J: np.ndarray) -> np.ndarray:
    """Unit vector spanning the kernel of a full-rank m × (m+1) matrix."""
    q, _ = np.linalg.qr((J / equilibrate(J)[:, None]).T, mode="complete")
    return q[:, -1]


def draw_alpha(m0: int, seed: int, alpha_max: float = 1e-2, attempt: int = 0) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, attempt])))
    return rng.uniform(-alpha_max, alpha_max, m0)


def _admissible(hom: EntropyHomotopy, x: np.ndarray, t: float) -> bool:
    if not (0.0 < t <= 1.0) or not np.all(np.isfinite(x)):
        return False
    return hom.formulation != "w" or bool(np.all(x > 0))


def _converged(hom, H, tol, norm_tol):
    return np.abs(H).max() <= tol and np.abs(H[hom.norm_rows]).max() <= norm_tol


def _correct(hom, y_pred, tau, tol, cfg, max_dist):
    """Newton on [H(y); τ·(y - y_pred)] = 0.  Returns (y, iters) or None.

    Gap rows must reach ``tol``; normalization rows must also reach
    ``cfg.norm_tol`` so every recorded profile sums to one per set.
    """
    y = y_pred.copy()
    m0 = hom.m0
    norm_tol = min(tol, cfg.norm_tol)
    if not _admissible(hom, y[:m0], y[m0]):
        return None
    # a predictor already far inside the tolerance is kept as is: near t = 0
    # the Jacobian can be numerically singular and Newton would only add noise
    try:
        if _converged(hom, hom.residual(y[:m0], y[m0]), 1e-3 * tol, norm_tol):
            return y, 0
    except FloatingPointError:
        return None
    for k in range(1, cfg.max_corrector_iters + 1):
        try:
            H, J = hom.evaluate(y[:m0], y[m0])
        except FloatingPointError:
            return None
        A = np.vstack([J, tau])
        rhs = np.append(H, tau @ (y - y_pred))
        sc = equilibrate(A)
        try:
            dy = np.linalg.solve(A / sc[:, None], rhs / sc)
        except np.linalg.LinAlgError:
            return None
        y = y - dy
        if not np.all(np.isfinite(y)) or np.linalg.norm(y - y_pred) > max_dist:
            return None
        if not _admissible(hom, y[:m0], y[m0]):
            return None
        try:
            Hn = hom.residual(y[:m0], y[m0])
        except FloatingPointError:
            return None
        if _converged(hom, Hn, tol, norm_tol):
            return y, k
    return None


def _polish(hom: EntropyHomotopy, x: np.ndarray, t: float, iters: int = 40,
            tol: float = 1e-10) -> np.ndarray | None:
    """Newton in x at frozen t; converged when the reach-scaled residual is below ``tol``."""
    x = x.copy()
    for _ in range(iters):
        try:
            H, J = hom.evaluate(x, t)
            if np.abs(H / hom.row_scale(x, t)).max() < tol:
                return x
            sc = equilibrate(J[:, :-1])
            dx = np.linalg.solve(J[:, :-1] / sc[:, None], H / sc)
        except (FloatingPointError, np.linalg.LinAlgError):
            return None
        x = x - dx
        if not _admissible(hom, x, t):
            return None
    return None


def _round(game: GameTree, beta: np.ndarray, tol: float) -> np.ndarray:
    out = np.where(beta < tol, 0.0, beta)
    for I in game.infosets:
        s = out[I.span].sum()
        out[I.span] = out[I.span] / s if s > 0 else beta[I.span] / beta[I.span].sum()
    return out


def follow_path(hom: EntropyHomotopy, cfg: SolverConfig, record: TraceRecord) -> tuple[np.ndarray, float, int]:
    """Track from t = 1 to t < cfg.t_end.  Returns (x, t, predictor steps)."""
    m0 = hom.m0
    y = np.append(hom.start_point(), 1.0)
    H, J = hom.evaluate(y[:m0], 1.0)
    tau = tangent(J)
    if tau[m0] > 0:
        tau = -tau
    h = step_bound(1.0, cfg)
    record.append(1.0, 0.0, 0, hom.profile(y[:m0], 1.0))
    steps = 0
    cheap = 0
    while y[m0] >= cfg.t_end:
        if steps >= cfg.max_steps:
            raise TraceFailure(f"step budget exhausted at t = {y[m0]:.3g}")
        t = y[m0]
        h = min(h, step_bound(t, cfg))
        if tau[m0] < 0:
            h = min(h, 0.9 * t / -tau[m0])
        y_pred = y + h * tau
        t_pred = min(max(y_pred[m0], 1e-300), 1.0)
        out = _correct(hom, y_pred, tau, accuracy(t_pred, cfg), cfg, max_dist=max(2.0 * h, 1e-8))
        if out is None:
            h *= 0.5
            cheap = 0
            if h < cfg.min_step:
                raise TraceFailure(f"step size underflow at t = {t:.3g}")
            continue
        y_new, iters = out
        steps += 1
        _, J = hom.evaluate(y_new[:m0], y_new[m0])
        tau_new = tangent(J)
        if tau_new @ tau < 0:
            tau_new = -tau_new
        y, tau = y_new, tau_new
        record.append(y[m0], h, iters, hom.profile(y[:m0], y[m0]))
        cheap = cheap + 1 if iters <= cfg.cheap_iters else 0
        if cheap >= cfg.grow_after:
            h *= cfg.step_grow
            cheap = 0
    return y[:m0], float(y[m0]), steps


def trace(game: GameTree, config: SolverConfig | None = None) -> PathResult:
    """Follow the homotopy, retrying with fresh perturbations on failure."""
    cfg = config or SolverConfig()
    tol = cfg.check_tol if cfg.check_tol is not None else 1e-4 * max(game.payoff_range(), 1e-12)
    start = time.perf_counter()
    total_steps = 0
    message = ""
    record = TraceRecord()
    alpha = None
    last_point, last_assessment, last_verdict = None, None, None
    for attempt in range(cfg.max_retries + 1):
        if cfg.alpha is not None and attempt == 0:
            alpha = np.asarray(cfg.alpha, dtype=float)
        else:
            alpha = draw_alpha(game.m0, cfg.seed, cfg.alpha_max, attempt)
        hom = EntropyHomotopy(game, cfg.formulation, cfg.kappa, cfg.prior, alpha, cfg.alpha_weighting)
        record = TraceRecord()
        try:
            x, t, steps = follow_path(hom, cfg, record)
        except (TraceFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
            message = f"attempt {attempt + 1}: {exc}"
            total_steps += len(record) - 1
            continue
        total_steps += steps
        beta_raw = hom.profile(x, t)
        # alpha only selects a generic path; at off-path sets its bias is the
        # same order as the reach, so the endpoint is polished with alpha = 0
        xp = _polish(EntropyHomotopy(game, cfg.formulation, cfg.kappa, cfg.prior), x, cfg.polish_t)
        if xp is None:
            xp = _polish(hom, x, cfg.polish_t)
        if xp is not None:
            x, t = xp, cfg.polish_t
            beta_raw = hom.profile(x, t)
        try:
            mu = bayes_beliefs(game, homotopy_perturb(beta_raw, hom.prior, t))
        except UndefinedBeliefError as exc:
            message = f"attempt {attempt + 1}: {exc}"
            continue
        beta = _round(game, beta_raw, cfg.round_tol)
        assessment = Assessment(beta, mu)
        verdict = check_sequential(game, assessment, tol)
        if verdict.accepted:
            return PathResult(True, (x, t), assessment, verdict, record, total_steps,
                              time.perf_counter() - start, attempt + 1, alpha, "accepted")
        last_point, last_assessment, last_verdict = (x, t), assessment, verdict
        message = f"attempt {attempt + 1}: {verdict.describe(game)}"
    return PathResult(False, last_point, last_assessment, last_verdict, record, total_steps,
                      time.perf_counter() - start, cfg.max_retries + 1, alpha, message)
