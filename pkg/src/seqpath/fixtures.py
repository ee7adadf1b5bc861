"""Small reference games with analytically known sequential equilibria.

Each :class:`FixtureGame` carries its equilibrium classes.  A class is a list
of per-coordinate interval constraints (on an action probability or on a
belief) used for membership tests, plus a sampler producing a consistent
representative assessment from a parameter ``r`` in (0, 1).

Payoffs that no conditional payoff formula depends on are set to 0; they are
listed under ``metadata["unpinned"]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Fr
from typing import Callable

import numpy as np

from .assessment import Assessment
from .game import GameTree, chance, decision, terminal as T

DEFAULT_MARGIN = 1e-9


@dataclass(frozen=True)
class Constraint:
    """``lo <= value <= hi`` with optional strictness on either side.

    ``kind`` is ``"beta"`` (label is an action) or ``"mu"`` (label is a member
    history written with ``/`` between actions).
    """

    kind: str
    infoset: str
    label: str
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def value(self, game: GameTree, a: Assessment) -> float:
        I = game.infoset(self.infoset)
        if self.kind == "beta":
            return float(a.profile[I.action_index(self.label)])
        for h in I.members:
            if "/".join(h.history) == self.label:
                return float(a.beliefs[h.slot])
        raise KeyError(f"{self.label!r} is not a member of {I.name}")

    def holds(self, v: float, margin: float = DEFAULT_MARGIN) -> bool:
        lo_ok = v > self.lo + margin if self.lo_open else v >= self.lo - margin
        hi_ok = v < self.hi - margin if self.hi_open else v <= self.hi + margin
        return lo_ok and hi_ok


Sampler = Callable[[float], tuple[dict, dict]]


@dataclass
class EquilibriumClass:
    name: str
    constraints: tuple[Constraint, ...]
    sampler: Sampler

    def contains(self, game: GameTree, a: Assessment, margin: float = DEFAULT_MARGIN) -> bool:
        return all(c.holds(c.value(game, a), margin) for c in self.constraints)

    def representative(self, game: GameTree, r: float) -> Assessment:
        prof, bel = self.sampler(r)
        beta = game.profile_from_dict(prof)
        mu = game.beliefs_from_dict(bel)
        return Assessment(beta, mu)


@dataclass
class FixtureGame:
    name: str
    game: GameTree
    classes: list[EquilibriumClass] = field(default_factory=list)
    description: str = ""


def match_equilibrium_class(fixture: FixtureGame, assessment: Assessment,
                            margin: float = DEFAULT_MARGIN) -> str | None:
    for cls in fixture.classes:
        if cls.contains(fixture.game, assessment, margin):
            return cls.name
    return None


# -- constraint helpers --------------------------------------------------------

def _pure(I: str, actions: tuple[str, ...], chosen: str) -> list[Constraint]:
    return [Constraint("beta", I, a, float(a == chosen), float(a == chosen)) for a in actions]


def _eq(kind: str, I: str, label: str, v) -> Constraint:
    return Constraint(kind, I, label, float(v), float(v))


def _iv(kind: str, I: str, label: str, lo, hi, lo_open=False, hi_open=False) -> Constraint:
    return Constraint(kind, I, label, float(lo), float(hi), lo_open, hi_open)


def _mix(actions: tuple[str, ...], probs) -> dict:
    return {a: float(p) for a, p in zip(actions, probs)}


# -- games ---------------------------------------------------------------------

def notation_game() -> GameTree:
    """Three players, chance first; a compact example of every structural feature."""
    z = lambda: T(0, 0, 0)
    left = decision(1, "I1", ("s", z()), ("y", decision(3, "I1", ("A", T(0, 0, 4)), ("B", T(0, 0, 0)))))
    mid = decision(1, "I1", ("s", z()), ("y", decision(
        2, "I1",
        ("d", decision(3, "I1", ("A", T(0, 0, 8)), ("B", T(0, 0, 10)))),
        ("e", decision(3, "I2",
                       ("F", decision(2, "I2", ("L", T(0, 6, 0)), ("R", T(0, 4, 0)))),
                       ("G", z()))))))
    right = decision(1, "I1", ("s", z()), ("y", decision(
        2, "I1",
        ("d", z()),
        ("e", decision(3, "I3",
                       ("H", decision(2, "I2", ("L", T(0, 8, 0)), ("R", T(0, 6, 0)))),
                       ("K", z()))))))
    root = chance(("a", 0.2, left), ("b", 0.2, mid), ("c", 0.6, right))
    return GameTree(["1", "2", "3"], root, name="FN", metadata={
        "unpinned": "all payoffs other than player 2 after <b,y,e,F> / <c,y,e,H> and "
                    "player 3 at the leaves of set 3:I1"})


def fig1_game() -> GameTree:
    root = decision(
        1, "I1",
        ("A", decision(2, "I1",
                       ("U", decision(1, "I2", ("L", T(7, 0)), ("R", T(0, 2)))),
                       ("D", decision(1, "I2", ("L", T(0, 5)), ("R", T(1, 0)))))),
        ("B", decision(2, "I2",
                       ("U'", decision(1, "I3", ("Y", T(3, 0)), ("N", T(0, 2)))),
                       ("D'", T(2, 1)))))
    return GameTree(["1", "2"], root, name="F1")


def bonanno_game() -> GameTree:
    root = decision(
        1, "I1",
        ("L", decision(1, "I2",
                       ("A", decision(2, "I1", ("C", T(1, 0, 0)), ("D", T(0, 1, 0)))),
                       ("B", decision(2, "I1", ("C", T(0, 2, 0)), ("D", T(2, 0, 0)))))),
        ("R", decision(1, "I3",
                       ("E", decision(3, "I1", ("L", T(3, 0, 1)), ("M", T(0, 0, 0)))),
                       ("F", decision(2, "I2",
                                      ("G", decision(3, "I1", ("L", T(0, 1, 1)), ("M", T(4, 0, 0)))),
                                      ("H", T(1, 0, 0)))))))
    return GameTree(["1", "2", "3"], root, name="F2")


def horse_game() -> GameTree:
    root = decision(
        1, "I1",
        ("D", decision(3, "I1", ("L", T(3, 0, 2)), ("R", T(0, 0, 0)))),
        ("C", decision(2, "I1",
                       ("d", decision(3, "I1", ("L", T(4, 4, 0)), ("R", T(0, 0, 1)))),
                       ("c", T(1, 1, 0)))))
    return GameTree(["1", "2", "3"], root, name="F3", metadata={
        "unpinned": "u2 at <D,L>, <D,R>; u3 at <C,c>"})


def selten_game() -> GameTree:
    root = decision(
        1, "I1",
        ("A", decision(2, "I1",
                       ("L", T(1, 3, 0)),
                       ("R", decision(1, "I2",
                                      ("a", T(2, 0, 0)),
                                      ("b", decision(3, "I1", ("N", T(0, 0, 5)), ("Y", T(4, 4, 0)))))))),
        ("B", decision(3, "I1", ("N", T(0, 0, 0)), ("Y", T(3, 0, 3)))))
    return GameTree(["1", "2", "3"], root, name="F4", metadata={
        "unpinned": "u2 at <B,N>, <B,Y>; u3 at <A,L>, <A,R,a>"})


def osborne_rubinstein_game() -> GameTree:
    root = decision(
        1, "I1",
        ("L", T(1, 0)),
        ("M", decision(2, "I1", ("L", T(3, 1)), ("R", T(-2, 0)))),
        ("R", decision(2, "I1", ("L", T(2, 0)), ("R", T(-1, 1)))))
    return GameTree(["1", "2"], root, name="FA1", metadata={"unpinned": "u2 at <L>"})


def battigalli_game() -> GameTree:
    def third(key: str):
        return (decision(3, key, ("a", T(0, 0, 3)), ("b", T(0, 0, 0)), ("c", T(0, 0, 2))),
                decision(3, key, ("a", T(0, 0, 0)), ("b", T(0, 0, 3)), ("c", T(0, 0, 2))))

    l1, r1 = third("I1")
    l2, r2 = third("I2")
    root = decision(
        1, "I1",
        ("L'", decision(2, "I1", ("A''", T(1, 1, 0)), ("L''", l1), ("R''", r1))),
        ("R'", decision(2, "I1", ("A''", T(0, 0, 0)), ("L''", l2), ("R''", r2))))
    return GameTree(["1", "2", "3"], root, name="FA2", metadata={"unpinned": "u3 at <L',A''>, <R',A''>"})


# -- equilibrium classes -------------------------------------------------------

def _horse_classes() -> list[EquilibriumClass]:
    base = [*_pure("1:I1", ("D", "C"), "C"), *_pure("2:I1", ("d", "c"), "c")]
    pure = lambda: {"1:I1": "C", "2:I1": "c"}
    t1 = EquilibriumClass(
        "Type 1",
        (*base, *_pure("3:I1", ("L", "R"), "R"), _iv("mu", "3:I1", "D", 0, Fr(1, 3), hi_open=True)),
        lambda r: ({**pure(), "3:I1": "R"}, {"3:I1": [r / 3, 1 - r / 3]}))
    t2 = EquilibriumClass(
        "Type 2",
        (*base, _iv("beta", "3:I1", "L", 0, Fr(1, 4)), _eq("mu", "3:I1", "D", Fr(1, 3))),
        lambda r: ({**pure(), "3:I1": [r / 4, 1 - r / 4]}, {"3:I1": [1 / 3, 2 / 3]}))
    return [t1, t2]


def _selten_classes() -> list[EquilibriumClass]:
    t1 = EquilibriumClass(
        "Type 1",
        (*_pure("1:I1", ("A", "B"), "A"), *_pure("1:I2", ("a", "b"), "a"),
         *_pure("2:I1", ("L", "R"), "L"), *_pure("3:I1", ("N", "Y"), "N"),
         _iv("mu", "3:I1", "A/R/b", Fr(3, 8), 1, lo_open=True)),
        lambda r: ({"1:I1": "A", "1:I2": "a", "2:I1": "L", "3:I1": "N"},
                   {"3:I1": [3 / 8 + 5 * r / 8, 5 / 8 - 5 * r / 8]}))
    t2 = EquilibriumClass(
        "Type 2",
        (_eq("beta", "1:I1", "A", Fr(24, 49)), _eq("beta", "1:I1", "B", Fr(25, 49)),
         *_pure("1:I2", ("a", "b"), "b"),
         _eq("beta", "2:I1", "L", Fr(3, 8)), _eq("beta", "2:I1", "R", Fr(5, 8)),
         _eq("beta", "3:I1", "N", Fr(1, 4)), _eq("beta", "3:I1", "Y", Fr(3, 4)),
         _eq("mu", "3:I1", "A/R/b", Fr(3, 8))),
        lambda r: ({"1:I1": [24 / 49, 25 / 49], "1:I2": "b", "2:I1": [3 / 8, 5 / 8], "3:I1": [1 / 4, 3 / 4]},
                   {"3:I1": [3 / 8, 5 / 8]}))
    t3 = EquilibriumClass(
        "Type 3",
        (*_pure("1:I1", ("A", "B"), "A"), *_pure("1:I2", ("a", "b"), "a"),
         *_pure("2:I1", ("L", "R"), "L"), _iv("beta", "3:I1", "Y", 0, Fr(1, 3)),
         _eq("mu", "3:I1", "A/R/b", Fr(3, 8))),
        lambda r: ({"1:I1": "A", "1:I2": "a", "2:I1": "L", "3:I1": [1 - r / 3, r / 3]},
                   {"3:I1": [3 / 8, 5 / 8]}))
    return [t1, t2, t3]


def _osborne_rubinstein_classes() -> list[EquilibriumClass]:
    p1 = ("L", "M", "R")
    c1 = EquilibriumClass(
        "Type 1",
        (*_pure("1:I1", p1, "M"), *_pure("2:I1", ("L", "R"), "L"), _eq("mu", "2:I1", "M", 1)),
        lambda r: ({"1:I1": "M", "2:I1": "L"}, {"2:I1": [1.0, 0.0]}))
    c2 = EquilibriumClass(
        "Type 2",
        (*_pure("1:I1", p1, "L"), *_pure("2:I1", ("L", "R"), "R"),
         _iv("mu", "2:I1", "R", Fr(1, 2), 1, lo_open=True)),
        lambda r: ({"1:I1": "L", "2:I1": "R"}, {"2:I1": [(1 - r) / 2, (1 + r) / 2]}))
    c3 = EquilibriumClass(
        "Type 3",
        (*_pure("1:I1", p1, "L"), _iv("beta", "2:I1", "L", 0, Fr(3, 5)), _eq("mu", "2:I1", "R", Fr(1, 2))),
        lambda r: ({"1:I1": "L", "2:I1": [3 * r / 5, 1 - 3 * r / 5]}, {"2:I1": [0.5, 0.5]}))
    return [c1, c2, c3]


def _battigalli_classes() -> list[EquilibriumClass]:
    P1, P2, P3 = ("L'", "R'"), ("A''", "L''", "R''"), ("a", "b", "c")
    LL, LR, RL, RR = "L'/L''", "L'/R''", "R'/L''", "R'/R''"

    def mu3(on_right: float) -> dict:
        # belief on the R'' member, shared by both of player 3's sets
        return {"3:I1": [1 - on_right, on_right], "3:I2": [1 - on_right, on_right]}

    def both(lo, hi, lo_open, hi_open, member_left: bool) -> tuple[Constraint, ...]:
        a, b = (LL, RL) if member_left else (LR, RR)
        return (_iv("mu", "3:I1", a, lo, hi, lo_open, hi_open), _iv("mu", "3:I2", b, lo, hi, lo_open, hi_open))

    def p3(x1, x2) -> tuple[Constraint, ...]:
        out = []
        for key, x in (("3:I1", x1), ("3:I2", x2)):
            out += _pure(key, P3, x) if isinstance(x, str) else list(x(key))
        return tuple(out)

    def zero(action):
        def build(key):
            return (_eq("beta", key, action, 0),)
        return build

    left = (*_pure("1:I1", P1, "L'"), *_pure("2:I1", P2, "A''"))
    third = Fr(1, 3)
    half = Fr(1, 2)
    classes = [
        ("1", (*left, *p3("a", "a"), *both(0, third, False, True, False)),
         lambda r: ({"1:I1": "L'", "2:I1": "A''", "3:I1": "a", "3:I2": "a"}, {"2:I1": [1, 0], **mu3(r / 3)})),
        ("2", (*left, *p3("c", "c"), *both(third, half, True, True, False)),
         lambda r: ({"1:I1": "L'", "2:I1": "A''", "3:I1": "c", "3:I2": "c"}, {"2:I1": [1, 0], **mu3(1 / 3 + r / 6)})),
        ("3", (*left, *p3(zero("b"), zero("b")), *both(third, third, False, False, False)),
         lambda r: ({"1:I1": "L'", "2:I1": "A''", "3:I1": [r, 0, 1 - r], "3:I2": [1 - r, 0, r]},
                    {"2:I1": [1, 0], **mu3(1 / 3)})),
        ("4", (*left, *p3("b", "b"), *both(0, third, False, True, True)),
         lambda r: ({"1:I1": "L'", "2:I1": "A''", "3:I1": "b", "3:I2": "b"}, {"2:I1": [1, 0], **mu3(1 - r / 3)})),
        ("5", (*left, *p3("c", "c"), *both(third, half, True, True, True)),
         lambda r: ({"1:I1": "L'", "2:I1": "A''", "3:I1": "c", "3:I2": "c"},
                    {"2:I1": [1, 0], **mu3(1 - (1 / 3 + r / 6))})),
        ("6", (*left, *p3(zero("a"), zero("a")), *both(third, third, False, False, True)),
         lambda r: ({"1:I1": "L'", "2:I1": "A''", "3:I1": [0, r, 1 - r], "3:I2": [0, 1 - r, r]},
                    {"2:I1": [1, 0], **mu3(2 / 3)})),
        ("7", (*left, *p3("c", "c"), *both(half, half, False, False, True)),
         lambda r: ({"1:I1": "L'", "2:I1": "A''", "3:I1": "c", "3:I2": "c"}, {"2:I1": [1, 0], **mu3(0.5)})),
    ]
    right = tuple(_pure("1:I1", P1, "R'")) + (_eq("beta", "2:I1", "A''", 0),)
    rb = lambda on_r: {"2:I1": [0, 1], **mu3(on_r)}
    classes += [
        ("8", (*right, _iv("beta", "2:I1", "R''", 0, third, hi_open=True), *p3("a", "a"),
               *both(0, third, False, True, False)),
         lambda r: ({"1:I1": "R'", "2:I1": [0, 1 - r / 3, r / 3], "3:I1": "a", "3:I2": "a"}, rb(r / 3))),
        ("9", (*right, _iv("beta", "2:I1", "R''", third, half, True, True), *p3("c", "c"),
               *both(third, half, True, True, False)),
         lambda r: ({"1:I1": "R'", "2:I1": [0, 2 / 3 - r / 6, 1 / 3 + r / 6], "3:I1": "c", "3:I2": "c"},
                    rb(1 / 3 + r / 6))),
        ("10", (*right, _eq("beta", "2:I1", "L''", Fr(2, 3)), _eq("beta", "2:I1", "R''", third),
                *p3(zero("b"), zero("b")), *both(third, third, False, False, False)),
         lambda r: ({"1:I1": "R'", "2:I1": [0, 2 / 3, 1 / 3], "3:I1": [r, 0, 1 - r], "3:I2": [r, 0, 1 - r]},
                    rb(1 / 3))),
        ("11", (*right, _iv("beta", "2:I1", "L''", 0, third, hi_open=True), *p3("b", "b"),
                *both(0, third, False, True, True)),
         lambda r: ({"1:I1": "R'", "2:I1": [0, r / 3, 1 - r / 3], "3:I1": "b", "3:I2": "b"}, rb(1 - r / 3))),
        ("12", (*right, _iv("beta", "2:I1", "L''", third, half, True, True), *p3("c", "c"),
                *both(third, half, True, True, True)),
         lambda r: ({"1:I1": "R'", "2:I1": [0, 1 / 3 + r / 6, 2 / 3 - r / 6], "3:I1": "c", "3:I2": "c"},
                    rb(2 / 3 - r / 6))),
        ("13", (*right, _eq("beta", "2:I1", "L''", third), _eq("beta", "2:I1", "R''", Fr(2, 3)),
                *p3(zero("a"), zero("a")), *both(third, third, False, False, True)),
         lambda r: ({"1:I1": "R'", "2:I1": [0, 1 / 3, 2 / 3], "3:I1": [0, r, 1 - r], "3:I2": [0, 1 - r, r]},
                    rb(2 / 3))),
        ("14", (*right, _eq("beta", "2:I1", "L''", half), _eq("beta", "2:I1", "R''", half),
                *p3("c", "c"), *both(half, half, False, False, True)),
         lambda r: ({"1:I1": "R'", "2:I1": [0, 0.5, 0.5], "3:I1": "c", "3:I2": "c"}, rb(0.5))),
    ]
    return [EquilibriumClass(f"Type {k}", cons, smp) for k, cons, smp in classes]


def _fig1_classes() -> list[EquilibriumClass]:
    cons = (*_pure("1:I1", ("A", "B"), "B"), _eq("beta", "1:I2", "L", Fr(2, 7)),
            *_pure("1:I3", ("Y", "N"), "Y"), _eq("beta", "2:I1", "U", Fr(1, 8)),
            *_pure("2:I2", ("U'", "D'"), "D'"), _eq("mu", "1:I2", "A/U", Fr(1, 8)))
    return [EquilibriumClass("Unique", cons, lambda r: (
        {"1:I1": "B", "1:I2": [2 / 7, 5 / 7], "1:I3": "Y", "2:I1": [1 / 8, 7 / 8], "2:I2": "D'"},
        {"1:I2": [1 / 8, 7 / 8]}))]


def _bonanno_classes() -> list[EquilibriumClass]:
    cons = (*_pure("1:I1", ("L", "R"), "R"), _eq("beta", "1:I2", "A", Fr(2, 3)),
            *_pure("1:I3", ("E", "F"), "E"), _eq("beta", "2:I1", "C", Fr(2, 3)),
            *_pure("2:I2", ("G", "H"), "G"), *_pure("3:I1", ("L", "M"), "L"),
            _eq("mu", "2:I1", "L/B", Fr(1, 3)), _eq("mu", "3:I1", "R/F/G", 0))
    return [EquilibriumClass("Unique", cons, lambda r: (
        {"1:I1": "R", "1:I2": [2 / 3, 1 / 3], "1:I3": "E", "2:I1": [2 / 3, 1 / 3], "2:I2": "G", "3:I1": "L"},
        {"2:I1": [2 / 3, 1 / 3], "3:I1": [1.0, 0.0]}))]


_REGISTRY = {
    "F1": (fig1_game, _fig1_classes, "two-player game with a unique, partly mixed sequential equilibrium"),
    "F2": (bonanno_game, _bonanno_classes, "three-player game with an off-path mixed subgame"),
    "F3": (horse_game, _horse_classes, "Selten's horse"),
    "F4": (selten_game, _selten_classes, "Selten's three-player game"),
    "FA1": (osborne_rubinstein_game, _osborne_rubinstein_classes, "Osborne-Rubinstein signalling game"),
    "FA2": (battigalli_game, _battigalli_classes, "Battigalli's three-player game"),
    "FN": (notation_game, lambda: [], "chance-rooted game used for payoff unit tests"),
}


def fixture(name: str) -> FixtureGame:
    make, classes, desc = _REGISTRY[name]
    return FixtureGame(name, make(), classes(), desc)


def fixtures() -> list[FixtureGame]:
    return [fixture(k) for k in _REGISTRY]


FIXTURE_NAMES = tuple(_REGISTRY)
