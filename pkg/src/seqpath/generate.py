"""Seeded random benchmark games.

All three families are sequential-move games where every player has the same
number of actions at each of their information sets.

Type A  players 1..n move once, in order.  Player i >= 3 observes the actions
        of players 1..i-2 (but not of player i-1).
Type B  players 1..n move once, in order.  Player i >= 2 observes only the
        action of player i-1.
Type C  Type A repeated for L layers: positions p = 1..nL are taken by
        players 1..n cyclically and position p >= 3 observes positions
        1..p-2.  Type A is Type C with L = 1.

Payoffs: one zeroing probability q ~ U[0, zero_prob_max] per game, then each
payoff entry is a uniform integer in [low, high] replaced by 0 with
probability q (``zero_mode="entry"`` draws q per entry instead).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from math import prod

import numpy as np

from .game import GameTree, Node, decision, terminal


@dataclass(frozen=True)
class GenSpec:
    kind: str                      # "A", "B" or "C"
    actions: tuple[int, ...]       # actions per player; n = len(actions)
    layers: int = 1
    payoff_low: int = -10
    payoff_high: int = 10
    zero_prob_max: float = 0.5
    zero_mode: str = "game"        # "game" or "entry"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(int(a) for a in self.actions))
        if self.kind not in ("A", "B", "C"):
            raise ValueError("kind must be A, B or C")
        if len(self.actions) < 2:
            raise ValueError("at least two players required")
        if min(self.actions) < 2:
            raise ValueError("every player needs at least two actions")
        if self.layers < 1 or (self.kind != "C" and self.layers != 1):
            raise ValueError("layers must be >= 1 (and 1 unless kind is C)")
        if self.payoff_low > self.payoff_high:
            raise ValueError("payoff_low exceeds payoff_high")
        if not 0.0 <= self.zero_prob_max <= 1.0:
            raise ValueError("zero_prob_max must lie in [0, 1]")
        if self.zero_mode not in ("game", "entry"):
            raise ValueError("zero_mode must be 'game' or 'entry'")

    @property
    def n(self) -> int:
        return len(self.actions)

    @property
    def positions(self) -> int:
        return self.n * self.layers

    def label(self) -> str:
        counts = ",".join(map(str, expected_infoset_counts(self)))
        acts = ",".join(map(str, self.actions))
        tail = f",{self.layers}" if self.kind == "C" else ""
        return f"{self.kind}:{self.n},({counts}),({acts}){tail}"


def expected_infoset_counts(spec: GenSpec) -> tuple[int, ...]:
    """Closed-form number of information sets per player."""
    a = spec.actions
    n = spec.n
    if spec.kind == "B":
        return (1,) + tuple(a[i - 1] for i in range(1, n))
    counts = [0] * n
    for p in range(1, spec.positions + 1):
        mover = (p - 1) % n
        counts[mover] += 1 if p <= 2 else prod(a[(q - 1) % n] for q in range(1, p - 1))
    return tuple(counts)


def _infoset_key(spec: GenSpec, p: int, history: tuple[str, ...]) -> str:
    if spec.kind == "B":
        return f"p{p}" if p == 1 else f"p{p}:{history[p - 2]}"
    if p <= 2:
        return f"p{p}"
    return f"p{p}:" + ".".join(history[:p - 2])


def _draw_payoffs(spec: GenSpec, rng: np.random.Generator, n_terminals: int) -> np.ndarray:
    shape = (n_terminals, spec.n)
    if spec.zero_mode == "game":
        q = rng.uniform(0.0, spec.zero_prob_max)
    else:
        q = rng.uniform(0.0, spec.zero_prob_max, size=shape)
    vals = rng.integers(spec.payoff_low, spec.payoff_high + 1, size=shape)
    zero = rng.random(shape) < q
    return np.where(zero, 0, vals).astype(float)


def generate(spec: GenSpec) -> GameTree:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = spec.n
    n_terminals = prod(spec.actions[(p - 1) % n] for p in range(1, spec.positions + 1))
    payoffs = _draw_payoffs(spec, rng, n_terminals)
    counter = iter(range(n_terminals))

    def build(p: int, history: tuple[str, ...]) -> Node:
        if p > spec.positions:
            return terminal(*payoffs[next(counter)])
        mover = (p - 1) % n
        labels = [f"a{k}" for k in range(spec.actions[mover])]
        return decision(mover + 1, _infoset_key(spec, p, history),
                        *((lab, build(p + 1, history + (lab,))) for lab in labels))

    root = build(1, ())
    players = [f"player {i + 1}" for i in range(n)]
    return GameTree(players, root, name=f"type-{spec.kind}", metadata={"spec": spec.label(), "seed": spec.seed})


def child_seeds(seed: int, count: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def batch(spec: GenSpec, count: int) -> list[tuple[GameTree, int]]:
    """``count`` games whose seeds are spawned from ``spec.seed``."""
    return [(generate(replace(spec, seed=s)), s) for s in child_seeds(spec.seed, count)]
