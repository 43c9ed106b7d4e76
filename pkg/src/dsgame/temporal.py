"""Satisficing with an additional omega-regular goal given as a parity automaton.

The game is labeled with sets of atomic propositions.  A deterministic parity
automaton (max-parity, even wins) reads the label of each visited state.  The
comparator product is synchronized with the automaton and the comparator's
own condition is folded into the priorities, giving one parity game that is
solved with Zielonka's recursive algorithm.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .comparator import Comparator, Kind, Relation, build
from .game import Owner, QuantitativeGame
from .product import (
    CompSatisficeResult,
    Condition,
    Strategy,
    _require_integer,
    attractor,
    product,
)

__all__ = [
    "DPA",
    "Labeling",
    "ParityGame",
    "TemporalInputError",
    "parse_dpa",
    "parse_labeling",
    "trivial_dpa",
    "rejecting_dpa",
    "infinitely_often_dpa",
    "parity_product",
    "solve_parity",
    "satisfice_with_goal",
]

LOSE_PRIORITY = 1


class TemporalInputError(ValueError):
    pass


def _parse_set(tok: str, lineno: int) -> frozenset:
    if tok == "-":
        return frozenset()
    if not (tok.startswith("{") and tok.endswith("}")):
        raise TemporalInputError(f"line {lineno}: expected {{a,b}} or -, got {tok!r}")
    inner = tok[1:-1].strip()
    if not inner:
        return frozenset()
    return frozenset(a.strip() for a in inner.split(","))


def _format_set(s) -> str:
    return "{" + ",".join(sorted(s)) + "}" if s else "-"


def _lines(text):
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


@dataclass(frozen=True)
class DPA:
    """Deterministic parity automaton over ``2^AP``, total by construction."""

    ap: tuple
    n_states: int
    init: int
    priority: tuple
    trans: dict  # (state, frozenset) -> state

    def __post_init__(self):
        if not 0 <= self.init < self.n_states:
            raise TemporalInputError(f"initial automaton state {self.init} out of range")
        if len(self.priority) != self.n_states:
            raise TemporalInputError("every automaton state needs a priority")
        for q in range(self.n_states):
            for sub in self.letters():
                if (q, sub) not in self.trans:
                    raise TemporalInputError(
                        f"automaton has no transition from {q} on {_format_set(sub)}"
                    )

    def letters(self):
        for r in range(len(self.ap) + 1):
            for combo in itertools.combinations(self.ap, r):
                yield frozenset(combo)

    def step(self, q: int, label) -> int:
        label = frozenset(label)
        if not label <= set(self.ap):
            raise TemporalInputError(
                f"label {_format_set(label)} uses propositions outside {list(self.ap)}"
            )
        return self.trans[(q, label)]


Labeling = dict  # game state -> frozenset of propositions


def parse_dpa(text) -> DPA:
    """Read ``ap`` / ``dpastates`` / ``dpainit`` / ``dpaprio`` / ``dpatrans`` lines."""
    ap, n, init = (), None, None
    prio, trans = {}, {}
    for lineno, tok in _lines(text):
        key, args = tok[0], tok[1:]
        try:
            if key == "ap":
                ap = tuple(args)
            elif key == "dpastates":
                (n,) = map(int, args)
            elif key == "dpainit":
                (init,) = map(int, args)
            elif key == "dpaprio":
                q, p = map(int, args)
                if p < 0:
                    raise TemporalInputError(f"line {lineno}: priorities are non-negative")
                prio[q] = p
            elif key == "dpatrans":
                if len(args) != 3:
                    raise ValueError
                src, dst = int(args[0]), int(args[2])
                sub = _parse_set(args[1], lineno)
                if not sub <= set(ap):
                    raise TemporalInputError(
                        f"line {lineno}: unknown proposition in {args[1]}"
                    )
                if (src, sub) in trans:
                    raise TemporalInputError(f"line {lineno}: duplicate transition")
                trans[(src, sub)] = dst
            else:
                raise TemporalInputError(f"line {lineno}: unknown directive {key!r}")
        except ValueError as e:
            if isinstance(e, TemporalInputError):
                raise
            raise TemporalInputError(f"line {lineno}: malformed {key!r} line")
    if n is None or init is None:
        raise TemporalInputError("automaton needs 'dpastates' and 'dpainit' lines")
    missing = [q for q in range(n) if q not in prio]
    if missing:
        raise TemporalInputError(f"automaton state {missing[0]} has no priority")
    for (src, _), dst in trans.items():
        if not (0 <= src < n and 0 <= dst < n):
            raise TemporalInputError(f"transition {src} -> {dst} out of range")
    return DPA(ap, n, init, tuple(prio[q] for q in range(n)), trans)


def parse_labeling(text, n_states: Optional[int] = None) -> Labeling:
    lab = {}
    for lineno, tok in _lines(text):
        if tok[0] != "label" or len(tok) != 3:
            raise TemporalInputError(f"line {lineno}: expected 'label <state> {{a,b}}|-'")
        try:
            v = int(tok[1])
        except ValueError:
            raise TemporalInputError(f"line {lineno}: bad state id {tok[1]!r}")
        if v in lab:
            raise TemporalInputError(f"line {lineno}: state {v} labeled twice")
        lab[v] = _parse_set(tok[2], lineno)
    if n_states is not None:
        _check_labeling(lab, n_states)
    return lab


def _check_labeling(lab, n_states):
    for v in range(n_states):
        if v not in lab:
            raise TemporalInputError(f"state {v} has no label line")
    extra = [v for v in lab if not 0 <= v < n_states]
    if extra:
        raise TemporalInputError(f"label for unknown state {extra[0]}")


def trivial_dpa(ap=()) -> DPA:
    """One state, even priority: accepts everything."""
    ap = tuple(ap)
    trans = {}
    for r in range(len(ap) + 1):
        for combo in itertools.combinations(ap, r):
            trans[(0, frozenset(combo))] = 0
    return DPA(ap, 1, 0, (0,), trans)


def rejecting_dpa(ap=()) -> DPA:
    """One state, odd priority: accepts nothing."""
    t = trivial_dpa(ap)
    return DPA(t.ap, 1, 0, (1,), t.trans)


def infinitely_often_dpa(a: str = "a", ap=None) -> DPA:
    """Two states; state 1 (priority 2) is entered after reading ``a``."""
    ap = tuple(ap) if ap is not None else (a,)
    trans = {}
    for q in (0, 1):
        for r in range(len(ap) + 1):
            for combo in itertools.combinations(ap, r):
                sub = frozenset(combo)
                trans[(q, sub)] = 1 if a in sub else 0
    return DPA(ap, 2, 0, (1, 2), trans)


def format_dpa(a: DPA) -> str:
    lines = [f"ap {' '.join(a.ap)}".rstrip(), f"dpastates {a.n_states}", f"dpainit {a.init}"]
    lines += [f"dpaprio {q} {p}" for q, p in enumerate(a.priority)]
    for (q, sub), dst in sorted(a.trans.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]))):
        lines.append(f"dpatrans {q} {_format_set(sub)} {dst}")
    return "\n".join(lines) + "\n"


@dataclass
class ParityGame:
    """Max-parity game; the protagonist wins iff the top recurring priority is even."""

    protagonist: list
    succ: list
    priority: list
    init: int
    origin: list = field(default_factory=list)

    @property
    def n_states(self) -> int:
        return len(self.succ)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.succ)


def parity_product(
    g: QuantitativeGame,
    lab: Labeling,
    c: Comparator,
    a: DPA,
    player: Owner,
    deadline: Optional[float] = None,
) -> ParityGame:
    """Synchronize the comparator product with ``a`` and fold in the comparator goal.

    A state ``(x, q)`` pairs a comparator-product state with the automaton
    state reached before reading the label of ``x``'s game state.  For a
    safety comparator every product state in the avoid set collapses into one
    absorbing losing state.  For a co-safety comparator, states that have not
    yet reached the accepting sink get priority 1, so a play that never
    reaches it loses, while afterwards only the automaton's priorities count.
    """
    _require_integer(g)
    _check_labeling(lab, g.n_states)
    arena = product(g, c, player, deadline)
    region = arena.region
    safety = arena.condition is Condition.SAFETY

    ids = {}
    origin, succ, prio, prot = [], [], [], []
    lose = None

    def new_state(key, is_prot, p):
        ids[key] = len(origin)
        origin.append(key)
        succ.append(None)
        prio.append(p)
        prot.append(is_prot)
        return ids[key]

    def visit(x, q):
        nonlocal lose
        if safety and x in region:
            if lose is None:
                lose = new_state("LOSE", False, LOSE_PRIORITY)
                succ[lose] = [lose]
            return lose
        key = (x, q)
        if key in ids:
            return ids[key]
        if safety or x in region:
            p = a.priority[q]
        else:
            p = LOSE_PRIORITY
        s = new_state(key, arena.protagonist[x], p)
        stack.append(s)
        return s

    stack = []
    init = visit(arena.init, a.init)
    while stack:
        s = stack.pop()
        x, q = origin[s]
        v = arena.origin[x][0]
        q2 = a.step(q, lab[v])
        succ[s] = [visit(y, q2) for y in arena.succ[x]]
    return ParityGame(prot, succ, prio, init, origin)


def _subgame_attractor(pg: ParityGame, alive: set, target: set, protagonist: bool):
    """Attractor inside ``alive`` plus an attractor strategy for that player."""
    rank = attractor(pg, target, protagonist, alive)
    moves = {}
    for x, r in rank.items():
        if r > 0 and pg.protagonist[x] == protagonist:
            moves[x] = min(y for y in pg.succ[x] if y in rank and rank[y] < r)
    return set(rank), moves


def _zielonka(pg: ParityGame, alive: set):
    """Returns ``(win, strat)``: per player index (0 = protagonist) a set and a dict."""
    if not alive:
        return [set(), set()], [{}, {}]
    top = max(pg.priority[x] for x in alive)
    i = top % 2
    me = i == 0  # does the favored player coincide with the protagonist?
    U = {x for x in alive if pg.priority[x] == top}
    A, attr_moves = _subgame_attractor(pg, alive, U, me)
    win1, strat1 = _zielonka(pg, alive - A)
    if not win1[1 - i]:
        win = [set(), set()]
        win[i] = set(alive)
        strat = [{}, {}]
        strat[i] = dict(strat1[i])
        strat[i].update(attr_moves)
        for x in U:
            if pg.protagonist[x] == me:
                strat[i][x] = min(y for y in pg.succ[x] if y in alive)
        return win, strat
    B, b_moves = _subgame_attractor(pg, alive, win1[1 - i], not me)
    win2, strat2 = _zielonka(pg, alive - B)
    win = [set(), set()]
    strat = [{}, {}]
    win[1 - i] = win2[1 - i] | B
    strat[1 - i] = dict(strat2[1 - i])
    strat[1 - i].update({x: m for x, m in strat1[1 - i].items() if x in win1[1 - i]})
    strat[1 - i].update({x: m for x, m in b_moves.items() if x not in win1[1 - i]})
    win[i] = win2[i]
    strat[i] = strat2[i]
    return win, strat


def solve_parity(pg: ParityGame):
    """Protagonist winning region and a memoryless winning strategy on it."""
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * pg.n_states + 1000))
    try:
        win, strat = _zielonka(pg, set(range(pg.n_states)))
    finally:
        sys.setrecursionlimit(limit)
    moves = {x: m for x, m in strat[0].items() if x in win[0] and pg.protagonist[x]}
    return win[0], Strategy(moves)


def satisfice_with_goal(
    g: QuantitativeGame,
    lab: Labeling,
    dpa: DPA,
    v,
    rel: Relation,
    player: Owner,
    deadline: Optional[float] = None,
) -> CompSatisficeResult:
    """Can ``player`` force ``cost rel v`` and the automaton's goal at once?"""
    _require_integer(g)
    rel, player = Relation(rel), Owner(player)
    c = build(max(g.mu, 1), g.discount.p, Fraction(v), rel)
    pg = parity_product(g, lab, c, dpa, player, deadline)
    win, strat = solve_parity(pg)
    holds = pg.init in win
    return CompSatisficeResult(
        holds, strat if holds else None, pg.n_states, pg.n_edges, c.n_states, pg, c
    )
