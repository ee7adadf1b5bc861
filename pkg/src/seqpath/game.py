"""Finite extensive-form games with perfect recall.

Histories are tree nodes with parent links; two histories are equal iff they
are the same node.  Chance is a distinguished mover (player id 0) and payoffs
live only at terminals.  After construction a :class:`GameTree` is treated as
immutable, and it caches flat arrays describing every root-to-terminal path so
that payoff sums can be evaluated with numpy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

CHANCE = 0
CHANCE_TOL = 1e-12


class GameError(ValueError):
    """Invalid game description."""


class StructuralError(GameError):
    """Malformed tree: shared or cyclic nodes, bad arity, bad player ids."""


class PerfectRecallError(GameError):
    def __init__(self, violations):
        self.violations = list(violations)
        pairs = ", ".join(f"{_fmt(a)} ~ {_fmt(b)}" for a, b in self.violations[:5])
        super().__init__(f"perfect recall violated: {pairs}")


class UnknownHistoryError(KeyError):
    pass


def _fmt(node: "Node") -> str:
    return "<" + ",".join(node.history) + ">"


@dataclass(eq=False)
class Node:
    """One history.  ``kind`` is ``"chance"``, ``"decision"`` or ``"terminal"``."""

    kind: str
    actions: tuple[str, ...] = ()
    children: list["Node"] = field(default_factory=list)
    player: int = CHANCE
    infoset_key: str | None = None
    probs: tuple[float, ...] = ()
    payoffs: tuple[float, ...] = ()
    # filled in by GameTree
    parent: "Node | None" = field(default=None, repr=False)
    incoming: int = -1
    index: int = -1
    history: tuple[str, ...] = ()
    infoset: "InformationSet | None" = field(default=None, repr=False)
    slot: int = -1

    @property
    def is_terminal(self) -> bool:
        return self.kind == "terminal"

    def __repr__(self) -> str:
        return f"Node({self.kind}, {_fmt(self)})"


def chance(*branches: tuple[str, float, Node]) -> Node:
    labels, probs, kids = zip(*branches)
    return Node("chance", tuple(labels), list(kids), CHANCE, None, tuple(float(p) for p in probs))


def decision(player: int, infoset: str, *branches: tuple[str, Node]) -> Node:
    labels, kids = zip(*branches)
    return Node("decision", tuple(labels), list(kids), int(player), str(infoset))


def terminal(*payoffs: float) -> Node:
    return Node("terminal", payoffs=tuple(float(u) for u in payoffs))


@dataclass(eq=False)
class InformationSet:
    player: int
    j: int  # 1-based position within the player's partition
    key: str
    members: tuple[Node, ...]
    actions: tuple[str, ...]
    offset: int  # first flat index of this set's actions
    number: int  # global position in GameTree.infosets
    member_offset: int  # first flat index of this set's beliefs

    @property
    def id(self) -> tuple[int, int]:
        return (self.player, self.j)

    @property
    def name(self) -> str:
        return f"{self.player}:{self.key}"

    @property
    def span(self) -> slice:
        return slice(self.offset, self.offset + len(self.actions))

    @property
    def member_span(self) -> slice:
        return slice(self.member_offset, self.member_offset + len(self.members))

    def action_index(self, label: str) -> int:
        try:
            return self.offset + self.actions.index(label)
        except ValueError:
            raise KeyError(f"action {label!r} not available at {self.name}") from None

    def __repr__(self) -> str:
        return f"InformationSet({self.name}, {len(self.members)} members, {self.actions})"


InfosetRef = Union[InformationSet, str, tuple[int, int], int]


@dataclass(frozen=True)
class RecallReport:
    ok: bool
    violations: tuple[tuple[Node, Node], ...] = ()


class IndexLayout:
    """Bijection between (player, set index j, action label) and [0, m0)."""

    def __init__(self, infosets: Sequence[InformationSet]):
        self._triples: list[tuple[int, int, str]] = []
        self._index: dict[tuple[int, int, str], int] = {}
        for I in infosets:
            for a in I.actions:
                triple = (I.player, I.j, a)
                self._index[triple] = len(self._triples)
                self._triples.append(triple)

    @property
    def m0(self) -> int:
        return len(self._triples)

    def index(self, player: int, j: int, action: str) -> int:
        return self._index[(player, j, action)]

    def triple(self, idx: int) -> tuple[int, int, str]:
        return self._triples[idx]

    def __len__(self) -> int:
        return self.m0


class GameTree:
    """An extensive-form game; see module docstring.

    ``players`` holds display names, one per player.  Construction validates
    structure and, unless ``check_recall`` is false, perfect recall.
    """

    def __init__(self, players: Sequence[str], root: Node, name: str = "",
                 metadata: dict | None = None, check_recall: bool = True):
        self.name = name
        self.players = tuple(str(p) for p in players)
        self.n = len(self.players)
        if self.n < 1:
            raise StructuralError("a game needs at least one player")
        self.root = root
        self.metadata = dict(metadata or {})
        self.nodes: list[Node] = []
        self._walk()
        self._build_infosets()
        self.layout = IndexLayout(self.infosets)
        self.m0 = self.layout.m0
        self._by_history = {nd.history: nd for nd in self.nodes}
        if check_recall:
            report = validate_perfect_recall(self)
            if not report.ok:
                raise PerfectRecallError(report.violations)

    # -- construction ---------------------------------------------------
    def _walk(self) -> None:
        seen: set[int] = set()
        stack = [(self.root, None, -1)]
        while stack:
            node, parent, k = stack.pop()
            if id(node) in seen:
                raise StructuralError("node reachable along two paths (cycle or shared subtree)")
            seen.add(id(node))
            node.parent, node.incoming = parent, k
            node.history = () if parent is None else parent.history + (parent.actions[k],)
            node.index = len(self.nodes)
            self.nodes.append(node)
            self._check_node(node)
            for c in reversed(range(len(node.children))):
                stack.append((node.children[c], node, c))
        self.terminals = [nd for nd in self.nodes if nd.is_terminal]
        self.decision_nodes = [nd for nd in self.nodes if nd.kind == "decision"]

    def _check_node(self, node: Node) -> None:
        where = _fmt(node)
        if node.kind == "terminal":
            if node.children or node.actions:
                raise StructuralError(f"terminal {where} has actions")
            if len(node.payoffs) != self.n:
                raise StructuralError(f"terminal {where} needs {self.n} payoffs, got {len(node.payoffs)}")
            if not all(np.isfinite(node.payoffs)):
                raise GameError(f"non-finite payoff at {where}")
            return
        if node.kind not in ("chance", "decision"):
            raise StructuralError(f"unknown node kind {node.kind!r} at {where}")
        if not node.actions:
            raise StructuralError(f"nonterminal {where} has no actions")
        if len(node.children) != len(node.actions):
            raise StructuralError(f"{where}: {len(node.actions)} actions but {len(node.children)} children")
        if len(set(node.actions)) != len(node.actions):
            raise StructuralError(f"{where}: duplicate action labels")
        if node.kind == "chance":
            p = np.asarray(node.probs, dtype=float)
            if p.shape != (len(node.actions),):
                raise StructuralError(f"{where}: chance law has wrong length")
            if np.any(p < 0) or abs(p.sum() - 1.0) > CHANCE_TOL:
                raise GameError(f"chance law not normalized at {where}")
            node.player = CHANCE
        else:
            if not 1 <= node.player <= self.n:
                raise StructuralError(f"{where}: player {node.player} out of range")
            if node.infoset_key is None:
                raise StructuralError(f"{where}: decision node without information set")

    def _build_infosets(self) -> None:
        groups: dict[tuple[int, str], list[Node]] = {}
        for nd in self.decision_nodes:
            groups.setdefault((nd.player, nd.infoset_key), []).append(nd)
        order = sorted(groups, key=lambda k: (k[0], groups[k][0].index))
        self.infosets: list[InformationSet] = []
        self._by_key: dict[tuple[int, str], InformationSet] = {}
        counts = [0] * (self.n + 1)
        offset = moff = 0
        for key in order:
            members = groups[key]
            acts = members[0].actions
            for h in members[1:]:
                if h.actions != acts:
                    raise StructuralError(
                        f"information set {key[0]}:{key[1]} has mismatched actions at {_fmt(h)}")
            counts[key[0]] += 1
            I = InformationSet(key[0], counts[key[0]], key[1], tuple(members), acts,
                               offset, len(self.infosets), moff)
            for s, h in enumerate(members):
                h.infoset, h.slot = I, moff + s
            offset += len(acts)
            moff += len(members)
            self.infosets.append(I)
            self._by_key[key] = I
        self.n_beliefs = moff

    # -- queries --------------------------------------------------------
    def infoset(self, ref: InfosetRef, key: str | int | None = None) -> InformationSet:
        """Look up an information set by object, ``"player:key"``, ``(player, j)``,
        global number, or ``infoset(player, key)``."""
        if isinstance(ref, InformationSet):
            return ref
        if key is not None:
            ref = (int(ref), key)
        if isinstance(ref, str):
            p, _, k = ref.partition(":")
            return self._by_key[(int(p), k)]
        if isinstance(ref, tuple):
            p, k = ref
            if isinstance(k, str):
                return self._by_key[(p, k)]
            return self.player_infosets(p)[k - 1]
        return self.infosets[int(ref)]

    def player_infosets(self, player: int) -> list[InformationSet]:
        return [I for I in self.infosets if I.player == player]

    def node(self, history: Node | Iterable[str]) -> Node:
        if isinstance(history, Node):
            if history.index < 0 or history.index >= len(self.nodes) or self.nodes[history.index] is not history:
                raise UnknownHistoryError(repr(history))
            return history
        h = tuple(history)
        try:
            return self._by_history[h]
        except KeyError:
            raise UnknownHistoryError(h) from None

    def action_labels(self) -> list[str]:
        """Human-readable label per flat index, e.g. ``'1:I1/A'``."""
        return [f"{I.name}/{a}" for I in self.infosets for a in I.actions]

    def infoset_of_index(self) -> np.ndarray:
        out = np.empty(self.m0, dtype=int)
        for I in self.infosets:
            out[I.span] = I.number
        return out

    def payoff_range(self) -> float:
        u = np.array([z.payoffs for z in self.terminals])
        return float(u.max() - u.min()) if u.size else 0.0

    def uniform_profile(self) -> np.ndarray:
        beta = np.empty(self.m0)
        for I in self.infosets:
            beta[I.span] = 1.0 / len(I.actions)
        return beta

    def profile_from_dict(self, spec: dict) -> np.ndarray:
        """``{infoset name: {label: prob} | [probs] | label}`` to a flat vector.

        A bare label means the pure action.  Every set must be specified.
        """
        beta = np.full(self.m0, np.nan)
        for ref, val in spec.items():
            I = self.infoset(ref)
            beta[I.span] = self._vector(I.actions, val, f"profile at {I.name}")
        missing = [I.name for I in self.infosets if np.isnan(beta[I.span]).any()]
        if missing:
            raise GameError(f"profile missing at {', '.join(missing)}")
        return beta

    def beliefs_from_dict(self, spec: dict) -> np.ndarray:
        """Beliefs keyed by set, each either a list in member order or a dict
        keyed by history (labels joined with ``/``).  Unspecified sets are NaN,
        except singletons which get 1."""
        mu = np.full(self.n_beliefs, np.nan)
        for I in self.infosets:
            if len(I.members) == 1:
                mu[I.member_offset] = 1.0
        for ref, val in spec.items():
            I = self.infoset(ref)
            names = tuple("/".join(h.history) for h in I.members)
            mu[I.member_span] = self._vector(names, val, f"beliefs at {I.name}")
        return mu

    @staticmethod
    def _vector(labels: Sequence[str], val, what: str) -> np.ndarray:
        if isinstance(val, str):
            if val not in labels:
                raise GameError(f"{what}: unknown label {val!r}")
            return np.array([1.0 if a == val else 0.0 for a in labels])
        if isinstance(val, dict):
            unknown = set(val) - set(labels)
            if unknown:
                raise GameError(f"{what}: unknown labels {sorted(unknown)}")
            return np.array([float(val.get(a, 0.0)) for a in labels])
        vec = np.asarray(val, dtype=float)
        if vec.shape != (len(labels),):
            raise GameError(f"{what}: expected {len(labels)} entries")
        return vec

    def profile_to_dict(self, beta: np.ndarray) -> dict:
        return {I.name: {a: float(beta[I.offset + k]) for k, a in enumerate(I.actions)}
                for I in self.infosets}

    def beliefs_to_dict(self, mu: np.ndarray) -> dict:
        return {I.name: {"/".join(h.history): float(mu[h.slot]) for h in I.members}
                for I in self.infosets}

    # -- cached path arrays ---------------------------------------------
    @cached_property
    def paths(self) -> "PathArrays":
        return PathArrays(self)

    def __repr__(self) -> str:
        return (f"GameTree({self.name!r}, n={self.n}, |Z|={len(self.terminals)}, "
                f"sets={len(self.infosets)}, m0={self.m0})")


class PathArrays:
    """Every root-to-terminal path as a padded row of factor indices.

    Factor ``k < m0`` is a player action (shared across an information set),
    factors ``m0 .. m0+c-1`` are chance edges with fixed probability, and the
    last factor is a padding sentinel whose value is 1.
    """

    def __init__(self, game: GameTree):
        m0 = game.m0
        chance_p: list[float] = []
        edge: dict[tuple[int, int], int] = {}
        for nd in game.nodes:
            if nd.kind == "chance":
                for k, p in enumerate(nd.probs):
                    edge[(nd.index, k)] = m0 + len(chance_p)
                    chance_p.append(p)
            elif nd.kind == "decision":
                for k in range(len(nd.actions)):
                    edge[(nd.index, k)] = nd.infoset.offset + k
        self.edge = edge
        self.m0 = m0
        self.n_factors = m0 + len(chance_p)
        self.sentinel = self.n_factors
        self.chance = np.array(chance_p, dtype=float)

        def prefix(nd: Node) -> tuple[list[int], list[int]]:
            f, who = [], []
            cur = nd
            while cur.parent is not None:
                f.append(edge[(cur.parent.index, cur.incoming)])
                who.append(cur.parent.index)
                cur = cur.parent
            return f[::-1], who[::-1]

        zs = [prefix(z) for z in game.terminals]
        hs = [prefix(h) for h in game.decision_nodes]
        depth = max([len(f) for f, _ in zs] + [1])
        Z, H = len(zs), len(hs)
        self.depth = depth
        self.term_factor = np.full((Z, depth), self.sentinel, dtype=np.int64)
        self.term_node = np.full((Z, depth), -1, dtype=np.int64)
        for r, (f, who) in enumerate(zs):
            self.term_factor[r, :len(f)] = f
            self.term_node[r, :len(who)] = who
        self.node_factor = np.full((H, depth), self.sentinel, dtype=np.int64)
        for r, (f, _) in enumerate(hs):
            self.node_factor[r, :len(f)] = f
        self.payoffs = np.array([z.payoffs for z in game.terminals], dtype=float).reshape(Z, game.n)

        owner = game.infoset_of_index()
        player = np.array([I.player for I in game.infosets], dtype=np.int64)
        # per (terminal, step): is it a player move, and whose payoff counts
        self.is_move = self.term_factor < m0
        owner_ext = np.concatenate([owner, np.full(self.n_factors - m0 + 1, -1)])
        self.step_infoset = owner_ext[self.term_factor]
        mover = np.where(self.is_move, player[np.maximum(self.step_infoset, 0)] - 1, 0)
        self.step_payoff = np.where(self.is_move, np.take_along_axis(self.payoffs, mover, axis=1), 0.0)
        slots = np.array([nd.slot for nd in game.nodes], dtype=np.int64)
        self.step_slot = np.where(self.is_move, slots[np.maximum(self.term_node, 0)], -1)
        self.node_infoset = np.array([h.infoset.number for h in game.decision_nodes], dtype=np.int64)
        self.node_slot = np.array([h.slot for h in game.decision_nodes], dtype=np.int64)
        self.n_infosets = len(game.infosets)

    def factor_values(self, beta: np.ndarray) -> np.ndarray:
        return np.concatenate([np.asarray(beta, dtype=float), self.chance, [1.0]])


# -- perfect recall ----------------------------------------------------------

def experience_record(game: GameTree, player: int, h: Node | Iterable[str]) -> tuple[tuple[tuple[int, int], str], ...]:
    """(information-set id, action) for every move of ``player`` strictly before ``h``."""
    node = game.node(h)
    rec = []
    cur = node
    while cur.parent is not None:
        par = cur.parent
        if par.kind == "decision" and par.player == player:
            rec.append((par.infoset.id, par.actions[cur.incoming]))
        cur = par
    return tuple(reversed(rec))


def validate_perfect_recall(game: GameTree) -> RecallReport:
    bad = []
    for I in game.infosets:
        recs = [experience_record(game, I.player, h) for h in I.members]
        for a in range(len(recs)):
            for b in range(a + 1, len(recs)):
                if recs[a] != recs[b]:
                    pair = sorted((I.members[a], I.members[b]), key=lambda nd: nd.index)
                    bad.append(tuple(pair))
    bad.sort(key=lambda pr: (pr[0].index, pr[1].index))
    return RecallReport(not bad, tuple(bad))


def index_layout(game: GameTree) -> IndexLayout:
    return game.layout
