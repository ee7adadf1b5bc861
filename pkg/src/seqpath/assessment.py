"""Realization probabilities, beliefs and conditional payoffs.

Profiles are flat vectors indexed by ``game.layout``; belief systems are flat
vectors over information-set members (``node.slot``).  Every payoff quantity
is a sum over root-to-terminal paths of a payoff times a product of move
probabilities, so it is evaluated on the padded path arrays of
:class:`~seqpath.game.PathArrays` with prefix/suffix cumulative products
(no division, exact zeros are handled).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .game import GameTree, InfosetRef, Node

PROB_TOL = 1e-12


class UndefinedBeliefError(ValueError):
    def __init__(self, infoset):
        self.infoset = infoset
        super().__init__(f"undefined belief: information set {infoset.name} has zero reach")


@dataclass
class Assessment:
    profile: np.ndarray
    beliefs: np.ndarray

    def copy(self) -> "Assessment":
        return Assessment(self.profile.copy(), self.beliefs.copy())


def validate_profile(game: GameTree, beta: np.ndarray, tol: float = PROB_TOL) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (game.m0,):
        raise ValueError(f"profile must have length {game.m0}")
    if np.any(beta < -tol) or not np.all(np.isfinite(beta)):
        raise ValueError("profile has negative or non-finite entries")
    for I in game.infosets:
        if abs(beta[I.span].sum() - 1.0) > tol * len(I.actions) + tol:
            raise ValueError(f"profile at {I.name} does not sum to 1")
    return beta


# -- products along paths ----------------------------------------------------

def _prefix_suffix(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """pre[:, k] = prod_{j<k} P[:, j], suf[:, k] = prod_{j>k} P[:, j]."""
    pre = np.ones_like(P)
    suf = np.ones_like(P)
    if P.shape[1] > 1:
        pre[:, 1:] = np.cumprod(P[:, :-1], axis=1)
        suf[:, :-1] = np.cumprod(P[:, :0:-1], axis=1)[:, ::-1]
    return pre, suf


def _leave_one_out(P: np.ndarray) -> np.ndarray:
    pre, suf = _prefix_suffix(P)
    return pre * suf


def _leave_two_out(P: np.ndarray) -> np.ndarray:
    """out[:, k, l] = prod_{j != k, l} P[:, j] (for k == l the value is unused)."""
    Z, D = P.shape
    out = np.empty((Z, D, D))
    for l in range(D):
        Q = P.copy()
        Q[:, l] = 1.0
        out[:, :, l] = _leave_one_out(Q)
    return out


def terminal_reach(game: GameTree, beta: np.ndarray) -> np.ndarray:
    pa = game.paths
    return pa.factor_values(beta)[pa.term_factor].prod(axis=1)


def node_reach(game: GameTree, beta: np.ndarray) -> np.ndarray:
    """Reach probability of every decision node (order of ``game.decision_nodes``)."""
    pa = game.paths
    return pa.factor_values(beta)[pa.node_factor].prod(axis=1)


def infoset_reach(game: GameTree, beta: np.ndarray) -> np.ndarray:
    pa = game.paths
    return np.bincount(pa.node_infoset, weights=node_reach(game, beta), minlength=pa.n_infosets)


def partial_payoffs(game: GameTree, beta: np.ndarray) -> np.ndarray:
    """u^i((a, beta^{-I}) ∧ I) for every flat action index (i owns I)."""
    pa = game.paths
    P = pa.factor_values(beta)[pa.term_factor]
    ex = _leave_one_out(P)
    out = np.zeros(pa.n_factors + 1)
    np.add.at(out, pa.term_factor, pa.step_payoff * ex)
    return out[:pa.m0]


def conditional_payoffs(game: GameTree, beta: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """u^i(a, beta^{-I}, mu | I) for every flat action index."""
    pa = game.paths
    P = pa.factor_values(beta)[pa.term_factor]
    _, suf = _prefix_suffix(P)
    mu_ext = np.append(np.asarray(mu, dtype=float), 0.0)
    w = pa.step_payoff * mu_ext[pa.step_slot] * suf
    out = np.zeros(pa.n_factors + 1)
    np.add.at(out, pa.term_factor, np.where(pa.is_move, w, 0.0))
    return out[:pa.m0]


class PayoffKernel(NamedTuple):
    U: np.ndarray       # partial payoffs, shape (m0,)
    dU: np.ndarray      # dU[k, m] = d U[k] / d beta[m], shape (m0, m0)
    omega: np.ndarray   # information-set reach, shape (#sets,)
    domega: np.ndarray  # d omega[I] / d beta[m], shape (#sets, m0)


def payoff_kernel(game: GameTree, p: np.ndarray) -> PayoffKernel:
    """Partial payoffs and set reach with exact first derivatives.

    Each quantity is multilinear in the profile entries; the derivative with
    respect to one entry is the same path sum with that factor removed.
    """
    pa = game.paths
    m0 = pa.m0
    vals = pa.factor_values(p)
    P = vals[pa.term_factor]
    ex1 = _leave_one_out(P)
    U = np.zeros(pa.n_factors + 1)
    np.add.at(U, pa.term_factor, pa.step_payoff * ex1)

    D = pa.depth
    ex2 = _leave_two_out(P)
    fk = np.broadcast_to(pa.term_factor[:, :, None], ex2.shape)
    fl = np.broadcast_to(pa.term_factor[:, None, :], ex2.shape)
    mask = (fk < m0) & (fl < m0) & ~np.eye(D, dtype=bool)[None]
    weight = pa.step_payoff[:, :, None] * ex2
    dU = np.zeros((m0, m0))
    np.add.at(dU, (fk[mask], fl[mask]), weight[mask])

    Pn = vals[pa.node_factor]
    reach = Pn.prod(axis=1)
    omega = np.bincount(pa.node_infoset, weights=reach, minlength=pa.n_infosets)
    exn = _leave_one_out(Pn)
    nmask = pa.node_factor < m0
    rows = np.broadcast_to(pa.node_infoset[:, None], pa.node_factor.shape)
    domega = np.zeros((pa.n_infosets, m0))
    np.add.at(domega, (rows[nmask], pa.node_factor[nmask]), exn[nmask])
    return PayoffKernel(U[:m0], dU, omega, domega)


# -- single-quantity API ------------------------------------------------------

def reach_probability(game: GameTree, beta: np.ndarray, h: Node | tuple) -> float:
    node = game.node(h)
    vals = game.paths.factor_values(beta)
    return float(np.prod([vals[f] for f in _factors(game, node)]))


def reach_probability_excluding(game: GameTree, beta: np.ndarray, infoset: InfosetRef,
                                action: str, h: Node | tuple) -> float:
    """Reach of ``h`` with the factor taken at ``infoset`` skipped.

    The value does not depend on ``action`` (beyond validating it): the
    factor at the set is omitted whichever action the history takes there.
    """
    I = game.infoset(infoset)
    I.action_index(action)
    node = game.node(h)
    vals = game.paths.factor_values(beta)
    return float(np.prod([vals[f] for f in _factors(game, node) if not I.offset <= f < I.offset + len(I.actions)]))


def _factors(game: GameTree, node: Node) -> list[int]:
    edge = game.paths.edge
    out = []
    cur = node
    while cur.parent is not None:
        out.append(edge[(cur.parent.index, cur.incoming)])
        cur = cur.parent
    return out


def infoset_reach_probability(game: GameTree, beta: np.ndarray, infoset: InfosetRef) -> float:
    return float(infoset_reach(game, beta)[game.infoset(infoset).number])


def bayes_beliefs(game: GameTree, beta: np.ndarray, strict: bool = True) -> np.ndarray:
    """Bayes beliefs; unreached sets raise, or are left NaN when ``strict`` is false."""
    reach = node_reach(game, beta)
    omega = infoset_reach(game, beta)
    zero = np.flatnonzero(omega <= 0.0)
    if zero.size and strict:
        raise UndefinedBeliefError(game.infosets[zero[0]])
    mu = np.empty(game.n_beliefs)
    pa = game.paths
    om = omega[pa.node_infoset]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu[pa.node_slot] = np.where(om > 0, reach / om, np.nan)
    return mu


def expected_payoff(game: GameTree, beta: np.ndarray, player: int) -> float:
    return float(terminal_reach(game, beta) @ game.paths.payoffs[:, player - 1])


def conditional_action_payoff(game: GameTree, beta: np.ndarray, mu: np.ndarray,
                              infoset: InfosetRef, action: str) -> float:
    I = game.infoset(infoset)
    return float(conditional_payoffs(game, beta, mu)[I.action_index(action)])


def conditional_profile_payoff(game: GameTree, beta: np.ndarray, mu: np.ndarray,
                               infoset: InfosetRef) -> float:
    I = game.infoset(infoset)
    cu = conditional_payoffs(game, beta, mu)
    return float(np.asarray(beta)[I.span] @ cu[I.span])


def partial_payoff(game: GameTree, beta: np.ndarray, infoset: InfosetRef, action: str | None = None) -> float:
    """u^i(beta ∧ I) when ``action`` is None, else u^i((a, beta^{-I}) ∧ I)."""
    I = game.infoset(infoset)
    U = partial_payoffs(game, beta)
    if action is None:
        return float(np.asarray(beta)[I.span] @ U[I.span])
    return float(U[I.action_index(action)])


def perturb(game: GameTree, beta: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """(1 - tau) beta + eta per information set, tau = sum of eta over the set."""
    beta = np.asarray(beta, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("perturbation must be nonnegative")
    tau = np.empty(game.m0)
    for I in game.infosets:
        s = eta[I.span].sum()
        if s >= 1.0:
            raise ValueError(f"perturbation mass {s} >= 1 at {I.name}")
        tau[I.span] = s
    return (1.0 - tau) * beta + eta


def homotopy_perturb(beta: np.ndarray, prior: np.ndarray, t: float) -> np.ndarray:
    """The homotopy's perturbation: eta = t * prior, so tau = t."""
    return (1.0 - t) * np.asarray(beta) + t * np.asarray(prior)
