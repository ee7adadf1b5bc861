"""JSON game documents.

Schema::

    {"name": str, "players": [str, ...], "root": NODE}
    NODE = {"kind": "chance",   "actions": [{"label", "prob", "child"}, ...]}
         | {"kind": "decision", "player": 1-based int, "infoset": str,
            "actions": [{"label", "child"}, ...]}
         | {"kind": "terminal", "payoffs": [num, ...]}

Decision nodes of the same player sharing an ``infoset`` string form one
information set.  Optional top-level ``"metadata"`` is carried through.
"""
from __future__ import annotations

import json
from pathlib import Path

from .game import GameError, GameTree, Node, StructuralError


class ParseError(GameError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None, where: str = ""):
        self.line, self.col, self.where = line, col, where
        loc = f"line {line}, column {col}: " if line is not None else ""
        loc += f"{where}: " if where else ""
        super().__init__(loc + msg)


def parse_game(text: str | bytes, check_recall: bool = True) -> GameTree:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if not text.strip():
        raise ParseError("empty document", 1, 1)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", 1, 1)
    players = doc.get("players")
    if not isinstance(players, list) or not players:
        raise ParseError("'players' must be a nonempty list", where="players")
    if "root" not in doc:
        raise ParseError("missing 'root'")
    root = _node(doc["root"], "root")
    try:
        return GameTree(players, root, name=str(doc.get("name", "")),
                        metadata=doc.get("metadata"), check_recall=check_recall)
    except StructuralError as e:
        raise ParseError(str(e)) from None


def _node(obj, where: str) -> Node:
    if not isinstance(obj, dict):
        raise ParseError("node must be an object", where=where)
    kind = obj.get("kind")
    if kind == "terminal":
        pay = obj.get("payoffs")
        if not isinstance(pay, list) or not all(_is_num(u) for u in pay):
            raise ParseError("'payoffs' must be a list of numbers", where=where)
        return Node("terminal", payoffs=tuple(float(u) for u in pay))
    if kind not in ("chance", "decision"):
        raise ParseError(f"unknown kind {kind!r}", where=where)
    acts = obj.get("actions")
    if not isinstance(acts, list) or not acts:
        raise ParseError("'actions' must be a nonempty list", where=where)
    labels, kids, probs = [], [], []
    for k, a in enumerate(acts):
        here = f"{where}.actions[{k}]"
        if not isinstance(a, dict) or not isinstance(a.get("label"), str) or "child" not in a:
            raise ParseError("action needs 'label' (str) and 'child'", where=here)
        labels.append(a["label"])
        if kind == "chance":
            if not _is_num(a.get("prob")):
                raise ParseError("chance action needs numeric 'prob'", where=here)
            probs.append(float(a["prob"]))
        kids.append(_node(a["child"], here + ".child"))
    if kind == "chance":
        return Node("chance", tuple(labels), kids, probs=tuple(probs))
    player, key = obj.get("player"), obj.get("infoset")
    if not isinstance(player, int) or isinstance(player, bool):
        raise ParseError("'player' must be an integer", where=where)
    if not isinstance(key, str):
        raise ParseError("'infoset' must be a string", where=where)
    return Node("decision", tuple(labels), kids, player, key)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def game_to_dict(game: GameTree) -> dict:
    def enc(nd: Node) -> dict:
        if nd.kind == "terminal":
            return {"kind": "terminal", "payoffs": [_num(u) for u in nd.payoffs]}
        if nd.kind == "chance":
            return {"kind": "chance", "actions": [
                {"label": a, "prob": p, "child": enc(c)}
                for a, p, c in zip(nd.actions, nd.probs, nd.children)]}
        return {"kind": "decision", "player": nd.player, "infoset": nd.infoset_key,
                "actions": [{"label": a, "child": enc(c)} for a, c in zip(nd.actions, nd.children)]}

    doc = {"name": game.name, "players": list(game.players)}
    if game.metadata:
        doc["metadata"] = game.metadata
    doc["root"] = enc(game.root)
    return doc


def _num(u: float):
    return int(u) if float(u).is_integer() else u


def serialize_game(game: GameTree, indent: int | None = 1) -> str:
    return json.dumps(game_to_dict(game), indent=indent, ensure_ascii=False)


def load_game(path: str | Path) -> GameTree:
    return parse_game(Path(path).read_text(encoding="utf-8"))


def save_game(game: GameTree, path: str | Path) -> None:
    Path(path).write_text(serialize_game(game) + "\n", encoding="utf-8")


def isomorphic(g: GameTree, h: GameTree) -> bool:
    """Same tree shape, labels, movers, chance laws, payoffs and information
    partition (set keys may differ; membership must agree)."""
    if g.players != h.players or len(g.nodes) != len(h.nodes):
        return False
    for a, b in zip(g.nodes, h.nodes):
        if (a.kind, a.actions, a.player, a.history) != (b.kind, b.actions, b.player, b.history):
            return False
        if a.probs != b.probs or a.payoffs != b.payoffs:
            return False
    part = lambda G: sorted(tuple(m.index for m in I.members) for I in G.infosets)
    return part(g) == part(h)
