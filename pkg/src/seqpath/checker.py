"""Equilibrium verification.

``check_sequential`` tests local sequential rationality: at every information
set, an action whose conditional payoff falls below the best one by more than
``tol`` must carry probability at most ``tol``.  Consistency of the beliefs is
the caller's responsibility (fixtures derive it analytically; solver outputs
carry a perturbed profile whose Bayes beliefs they report).

The ε-γ checks work on totally mixed profiles (or on a profile plus an
explicit perturbation) and require every γ-dominated action to be played with
probability at most ε (respectively exactly zero).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assessment import Assessment, bayes_beliefs, conditional_payoffs, perturb
from .fixtures import match_equilibrium_class  # noqa: F401  (re-exported)
from .game import GameTree

DEFAULT_TOL = 1e-6


class MissingBeliefError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    infoset: str
    better: str
    worse: str
    magnitude: float


@dataclass(frozen=True)
class Certificate:
    lam: np.ndarray    # per action: best conditional payoff minus this action's
    zeta: np.ndarray   # per information set: best conditional payoff


@dataclass(frozen=True)
class CheckVerdict:
    accepted: bool
    violation: Violation | None
    certificate: Certificate | None
    payoffs: np.ndarray

    def describe(self, game: GameTree) -> str:
        if self.accepted:
            return "accepted"
        v = self.violation
        return (f"rejected at {v.infoset}: {v.better} beats {v.worse} "
                f"(magnitude {v.magnitude:.3g})")


def _certificate(game: GameTree, cu: np.ndarray) -> Certificate:
    zeta = np.array([cu[I.span].max() for I in game.infosets])
    lam = np.empty(game.m0)
    for I in game.infosets:
        lam[I.span] = zeta[I.number] - cu[I.span]
    return Certificate(lam, zeta)


def _verdict(game: GameTree, beta: np.ndarray, cu: np.ndarray, gap_tol: float,
             prob_tol: float, magnitude) -> CheckVerdict:
    cert = _certificate(game, cu)
    worst: Violation | None = None
    for I in game.infosets:
        best = int(np.argmax(cu[I.span]))
        for k, a in enumerate(I.actions):
            idx = I.offset + k
            if cert.lam[idx] > gap_tol and beta[idx] > prob_tol:
                mag = float(magnitude(beta[idx], cert.lam[idx]))
                if worst is None or mag > worst.magnitude:
                    worst = Violation(I.name, I.actions[best], a, mag)
    ok = worst is None
    return CheckVerdict(ok, worst, cert if ok else None, cu)


def _complete_beliefs(game: GameTree, a: Assessment) -> np.ndarray:
    mu = np.asarray(a.beliefs, dtype=float).copy()
    for I in game.infosets:
        block = mu[I.member_span]
        if np.isnan(block).any():
            if len(I.members) == 1:
                mu[I.member_span] = 1.0
                continue
            raise MissingBeliefError(f"beliefs missing at {I.name}")
    return mu


def check_sequential(game: GameTree, assessment: Assessment, tol: float = DEFAULT_TOL) -> CheckVerdict:
    beta = np.asarray(assessment.profile, dtype=float)
    mu = _complete_beliefs(game, assessment)
    cu = conditional_payoffs(game, beta, mu)
    return _verdict(game, beta, cu, tol, tol, lambda p, gap: p * gap)


def _require_totally_mixed(beta: np.ndarray) -> None:
    if np.any(np.asarray(beta) <= 0.0):
        raise ValueError("profile is not totally mixed")


def check_eps_gamma(game: GameTree, assessment: Assessment, eps: float, gamma: float,
                    tol: float = DEFAULT_TOL) -> CheckVerdict:
    """Beliefs must be Bayes (within ``tol``) and γ-dominated actions carry ≤ ε.

    Violation magnitude is the excess probability over ε; a belief mismatch is
    reported with ``worse`` naming the offending member history.
    """
    beta = np.asarray(assessment.profile, dtype=float)
    _require_totally_mixed(beta)
    mu_b = bayes_beliefs(game, beta)
    mu = _complete_beliefs(game, assessment)
    err = np.abs(mu - mu_b)
    if err.max(initial=0.0) > tol:
        k = int(np.argmax(err))
        I = next(J for J in game.infosets if J.member_offset <= k < J.member_offset + len(J.members))
        h = I.members[k - I.member_offset]
        return CheckVerdict(False, Violation(I.name, "bayes", "/".join(h.history), float(err[k])), None,
                            conditional_payoffs(game, beta, mu))
    cu = conditional_payoffs(game, beta, mu)
    return _verdict(game, beta, cu, gamma, eps, lambda p, gap: p - eps)


def check_eps_perfect(game: GameTree, assessment: Assessment, eps: float,
                      tol: float = DEFAULT_TOL, gap_tol: float = 1e-12) -> CheckVerdict:
    """The γ = 0 case: any strictly worse action (gap > ``gap_tol``) carries ≤ ε."""
    return check_eps_gamma(game, assessment, eps, gap_tol, tol)


def check_eps_gamma_separated(game: GameTree, beta: np.ndarray, eta: np.ndarray, gamma: float,
                              tol: float = DEFAULT_TOL) -> CheckVerdict:
    """Payoffs and beliefs are taken at the perturbed profile (1-τ)β + η; every
    action whose gap exceeds γ must have β(a) = 0 (up to ``tol``)."""
    beta = np.asarray(beta, dtype=float)
    pert = perturb(game, beta, eta)
    mu = bayes_beliefs(game, pert)
    cu = conditional_payoffs(game, pert, mu)
    return _verdict(game, beta, cu, gamma, tol, lambda p, gap: p)
