"""Logit agent quantal response equilibrium path (baseline).

Variables are log-probabilities v.  Gap rows for each set I and action
a ≠ a⁰ read v(a⁰) - v(a) - γ[CU(a⁰) - CU(a)], where CU is the conditional
payoff at I under Bayes beliefs of the logit profile; each set adds
Σ exp(v) - 1.  Conditional payoffs and beliefs are evaluated in log space so
sets whose reach underflows at large γ still get well-defined values.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .assessment import Assessment
from .game import GameTree
from .tracer import TraceRecord


class ZeroReachError(ValueError):
    pass


@dataclass
class AqreConfig:
    gamma_max: float = 1e4
    growth: float = 1.15
    min_increment: float = 0.1
    max_newton: int = 20
    tol: float = 1e-10   # relative to 1 + γ·payoff range
    max_steps: int = 10_000


@dataclass
class AqreResult:
    success: bool          # reached gamma_max without a corrector failure
    gamma: float           # last accepted γ
    v: np.ndarray
    assessment: Assessment
    trace: TraceRecord     # the t column holds γ
    iterations: int
    wall_time: float
    message: str = ""
    extra: dict = field(default_factory=dict)


def _group_logsumexp(x: np.ndarray, group: np.ndarray, n: int) -> np.ndarray:
    top = np.full(n, -np.inf)
    np.maximum.at(top, group, x)
    safe = np.where(np.isfinite(top), top, 0.0)
    tot = np.zeros(n)
    np.add.at(tot, group, np.exp(x - safe[group]))
    with np.errstate(divide="ignore"):
        return safe + np.log(tot)


def _log_factor_values(game: GameTree, v: np.ndarray) -> np.ndarray:
    pa = game.paths
    with np.errstate(divide="ignore"):
        return np.concatenate([v, np.log(pa.chance), [0.0]])


def _log_node_beliefs(game: GameTree, v: np.ndarray):
    pa = game.paths
    lv = _log_factor_values(game, v)
    log_reach = lv[pa.node_factor].sum(axis=1)
    lse = _group_logsumexp(log_reach, pa.node_infoset, pa.n_infosets)
    if not np.all(np.isfinite(lse)):
        bad = game.infosets[int(np.flatnonzero(~np.isfinite(lse))[0])]
        raise ZeroReachError(f"information set {bad.name} has zero reach")
    return log_reach, lse


def logit_beliefs(game: GameTree, v: np.ndarray) -> np.ndarray:
    """Bayes beliefs of the profile exp(v), computed without forming exp(v)."""
    pa = game.paths
    log_reach, lse = _log_node_beliefs(game, v)
    mu = np.empty(game.n_beliefs)
    mu[pa.node_slot] = np.exp(log_reach - lse[pa.node_infoset])
    return mu


def logit_conditional_payoffs(game: GameTree, v: np.ndarray, jac: bool = False):
    """CU(a) for every action under exp(v) and its Bayes beliefs; optionally dCU/dv."""
    pa = game.paths
    m0 = pa.m0
    lv = _log_factor_values(game, v)
    log_reach, lse = _log_node_beliefs(game, v)
    logP = lv[pa.term_factor]
    D = pa.depth
    logpre = np.zeros_like(logP)
    logsuf = np.zeros_like(logP)
    if D > 1:
        logpre[:, 1:] = np.cumsum(logP[:, :-1], axis=1)
        logsuf[:, :-1] = np.cumsum(logP[:, :0:-1], axis=1)[:, ::-1]
    move = pa.is_move
    inf = np.where(move, pa.step_infoset, 0)
    with np.errstate(invalid="ignore"):
        L = np.where(move, logpre + logsuf - lse[inf], -np.inf)
    W = np.where(move, pa.step_payoff * np.exp(L), 0.0)
    cu = np.zeros(pa.n_factors + 1)
    np.add.at(cu, pa.term_factor, W)
    cu = cu[:m0]
    if not jac:
        return cu

    # expected membership of factor m in the history leading to I
    mu_node = np.exp(log_reach - lse[pa.node_infoset])
    E = np.zeros((pa.n_infosets, m0))
    nmask = pa.node_factor < m0
    rows = np.broadcast_to(pa.node_infoset[:, None], pa.node_factor.shape)
    np.add.at(E, (rows[nmask], pa.node_factor[nmask]),
              np.broadcast_to(mu_node[:, None], pa.node_factor.shape)[nmask])

    fk = np.broadcast_to(pa.term_factor[:, :, None], (logP.shape[0], D, D))
    fl = np.broadcast_to(pa.term_factor[:, None, :], (logP.shape[0], D, D))
    mask = move[:, :, None] & (fl < m0) & ~np.eye(D, dtype=bool)[None]
    Wk = np.broadcast_to(W[:, :, None], fk.shape)
    dcu = np.zeros((m0, m0))
    np.add.at(dcu, (fk[mask], fl[mask]), Wk[mask])
    owner = game.infoset_of_index()
    dcu -= cu[:, None] * E[owner]
    return cu, dcu


class AqreSystem:
    def __init__(self, game: GameTree):
        self.game = game
        self.m0 = game.m0
        self.owner = game.infoset_of_index()
        gap, act, ref, norm = [], [], [], []
        for I in game.infosets:
            n = len(I.actions)
            for k in range(1, n):
                gap.append(I.offset + k - 1)
                act.append(I.offset + k)
                ref.append(I.offset)
            norm.append(I.offset + n - 1)
        self.gap_rows = np.array(gap, dtype=np.int64)
        self.act = np.array(act, dtype=np.int64)
        self.ref = np.array(ref, dtype=np.int64)
        self.norm_rows = np.array(norm, dtype=np.int64)

    def start_point(self) -> np.ndarray:
        return np.log(self.game.uniform_profile())

    def residual(self, v: np.ndarray, gamma: float) -> np.ndarray:
        return self.evaluate(v, gamma, jac=False)[0]

    def jacobian(self, v: np.ndarray, gamma: float) -> np.ndarray:
        return self.evaluate(v, gamma, jac=True)[1]

    def evaluate(self, v: np.ndarray, gamma: float, jac: bool = True):
        v = np.asarray(v, dtype=float)
        g, a, r = self.gap_rows, self.act, self.ref
        out = logit_conditional_payoffs(self.game, v, jac)
        cu, dcu = out if jac else (out, None)
        F = np.zeros(self.m0)
        F[g] = v[r] - v[a] - gamma * (cu[r] - cu[a])
        F[self.norm_rows] = np.bincount(self.owner, weights=np.exp(v), minlength=len(self.norm_rows)) - 1.0
        J = None
        if jac:
            J = np.zeros((self.m0, self.m0))
            J[g] = -gamma * (dcu[r] - dcu[a])
            J[g, r] += 1.0
            J[g, a] -= 1.0
            J[self.norm_rows[self.owner], np.arange(self.m0)] = np.exp(v)
        return F, J


def aqre_residual(game: GameTree, v: np.ndarray, gamma: float) -> np.ndarray:
    return AqreSystem(game).residual(v, gamma)


def aqre_jacobian(game: GameTree, v: np.ndarray, gamma: float) -> np.ndarray:
    return AqreSystem(game).jacobian(v, gamma)


def _newton(sys: AqreSystem, v: np.ndarray, gamma: float, cfg: AqreConfig, scale: float):
    tol = cfg.tol * (1.0 + gamma * scale)
    for k in range(1, cfg.max_newton + 1):
        F, J = sys.evaluate(v, gamma)
        try:
            dv = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return None
        v = v - dv
        if not np.all(np.isfinite(v)):
            return None
        F = sys.residual(v, gamma)
        if np.abs(F).max() <= tol:
            return v, k
    return None


def next_gamma(gamma: float, cfg: AqreConfig) -> float:
    return min(max(gamma * cfg.growth, gamma + cfg.min_increment), cfg.gamma_max)


def aqre_trace(game: GameTree, config: AqreConfig | None = None) -> AqreResult:
    cfg = config or AqreConfig()
    start = time.perf_counter()
    sys = AqreSystem(game)
    scale = max(game.payoff_range(), 1e-12)
    v = sys.start_point()
    gamma = 0.0
    record = TraceRecord()
    record.append(gamma, 0.0, 0, np.exp(v))
    steps = 0
    message = f"reached gamma = {cfg.gamma_max:g}"
    success = True
    while gamma < cfg.gamma_max:
        if steps >= cfg.max_steps:
            success, message = False, f"step budget exhausted at gamma = {gamma:.4g}"
            break
        g_new = next_gamma(gamma, cfg)
        try:
            out = _newton(sys, v, g_new, cfg, scale)
        except (FloatingPointError, ZeroReachError) as exc:
            out = None
            message = str(exc)
        if out is None:
            success = False
            message = f"corrector failed at gamma = {g_new:.4g}; stopped at {gamma:.4g}"
            break
        v, iters = out
        steps += 1
        record.append(g_new, g_new - gamma, iters, np.exp(v))
        gamma = g_new
    beta = np.exp(v)
    mu = logit_beliefs(game, v)
    return AqreResult(success, gamma, v, Assessment(beta, mu), record, steps,
                      time.perf_counter() - start, message)
