"""Game x comparator products and linear-time safety/reachability solving."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import LassoSeq, UnsupportedDiscountError, dsum_lasso
from .comparator import AlphabetError, Comparator, Kind, Relation, build
from .game import Owner, QuantitativeGame
from .vi import check_deadline

__all__ = [
    "Condition",
    "TwoPlayerGame",
    "ProductArena",
    "Strategy",
    "CompSatisficeResult",
    "VerificationTooLarge",
    "product",
    "attractor",
    "solve_reachability",
    "solve_safety",
    "solve",
    "comp_satisfice",
    "verify_strategy",
    "format_strategy",
]

DEADLINE_STRIDE = 100_000


class Condition(str, enum.Enum):
    SAFETY = "safety"
    REACHABILITY = "reachability"


class VerificationTooLarge(RuntimeError):
    pass


@dataclass
class TwoPlayerGame:
    """Unweighted arena with a safety (avoid) or reachability (target) goal.

    ``protagonist[x]`` tells whether the protagonist moves at ``x``.
    ``succ[x]`` lists successors and may repeat a state for parallel edges.
    """

    protagonist: list
    succ: list
    init: int
    condition: Condition
    region: frozenset

    @property
    def n_states(self) -> int:
        return len(self.succ)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    def predecessors(self):
        pred = [[] for _ in range(self.n_states)]
        for x, out in enumerate(self.succ):
            for y in out:
                pred[y].append(x)
        return pred


@dataclass
class ProductArena(TwoPlayerGame):
    """Reachable part of ``game x comparator``.

    ``origin[x]`` is the ``(game state, comparator state)`` pair and
    ``weight[x][k]`` the game weight on the ``k``-th outgoing edge.
    """

    origin: list = field(default_factory=list)
    weight: list = field(default_factory=list)


@dataclass(frozen=True)
class Strategy:
    """Memoryless protagonist strategy: state -> chosen successor."""

    moves: dict

    def __call__(self, x):
        return self.moves[x]


def product(
    g: QuantitativeGame,
    c: Comparator,
    protagonist: Owner,
    deadline: Optional[float] = None,
    full: bool = False,
) -> ProductArena:
    """Synchronized product reachable from ``(g.init, c.init)``.

    With ``full=True`` every pair in ``V x S`` is emitted, reachable or not;
    this is only useful for measuring the size of the whole grid.
    """
    if g.mu > c.mu:
        raise AlphabetError(
            f"game weights reach {g.mu} but the comparator alphabet stops at {c.mu}"
        )
    if g.discount.value != c.d:
        raise UnsupportedDiscountError(
            f"game discount {g.discount} differs from comparator discount {c.d}"
        )
    protagonist = Owner(protagonist)
    ids = {}
    origin = []
    queue = deque()

    def visit(v, s):
        key = (v, s)
        x = ids.get(key)
        if x is None:
            x = ids[key] = len(origin)
            origin.append(key)
            queue.append(key)
            if x % DEADLINE_STRIDE == 0:
                check_deadline(deadline)
        return x

    visit(g.init, c.init)
    if full:
        for v in range(g.n_states):
            for s in range(c.n_states):
                visit(v, s)
    succ, weight = [], []
    trans, mu = c.trans, c.mu
    gsucc = g.succ
    while queue:
        v, s = queue.popleft()
        row = trans[s]
        out, ws = [], []
        for u, w in gsucc[v]:
            out.append(visit(u, row[w + mu]))
            ws.append(w)
        succ.append(out)
        weight.append(ws)
    # states were dequeued in id order, so succ[x] lines up with origin[x]
    owner = g.owner
    prot = [owner[v] is protagonist for v, _ in origin]
    if c.kind is Kind.SAFETY:
        cond = Condition.SAFETY
        sinks = set(c.rejecting_sinks)
    else:
        cond = Condition.REACHABILITY
        sinks = set(c.accepting_sinks)
    region = frozenset(x for x, (_, s) in enumerate(origin) if s in sinks)
    return ProductArena(prot, succ, ids[(g.init, c.init)], cond, region, origin, weight)


def attractor(game: TwoPlayerGame, target, player_is_protagonist: bool, alive=None):
    """Attractor of ``target`` for one player, with ranks.

    Returns ``rank`` (dict state -> distance to target).  ``alive`` restricts
    the computation to a sub-arena; edges leaving it are ignored.
    """
    n = game.n_states
    if alive is None:
        alive_mask = None
    else:
        alive_mask = [False] * n
        for x in alive:
            alive_mask[x] = True
    pred = [[] for _ in range(n)]
    count = [0] * n
    for x, out in enumerate(game.succ):
        if alive_mask is not None and not alive_mask[x]:
            continue
        for y in out:
            if alive_mask is None or alive_mask[y]:
                pred[y].append(x)
                count[x] += 1
    rank = {}
    queue = deque()
    for x in sorted(target):
        if alive_mask is None or alive_mask[x]:
            rank[x] = 0
            queue.append(x)
    while queue:
        y = queue.popleft()
        for x in pred[y]:
            if x in rank:
                continue
            if game.protagonist[x] == player_is_protagonist:
                rank[x] = rank[y] + 1
                queue.append(x)
            else:
                count[x] -= 1
                if count[x] == 0:
                    rank[x] = rank[y] + 1
                    queue.append(x)
    return rank


def solve_reachability(game: TwoPlayerGame):
    """Protagonist winning region and strategy for a reachability goal."""
    if game.condition is not Condition.REACHABILITY:
        raise ValueError("solve_reachability needs a reachability condition")
    rank = attractor(game, game.region, True)
    moves = {}
    for x, r in rank.items():
        if not game.protagonist[x]:
            continue
        if r > 0:
            moves[x] = min(y for y in game.succ[x] if rank.get(y, r) < r)
        else:
            # play goes on after the target is hit; any move will do
            moves[x] = min(game.succ[x])
    return set(rank), Strategy(moves)


def solve_safety(game: TwoPlayerGame):
    """Protagonist winning region and strategy for a safety goal."""
    if game.condition is not Condition.SAFETY:
        raise ValueError("solve_safety needs a safety condition")
    losing = attractor(game, game.region, False)
    win = set(range(game.n_states)) - set(losing)
    moves = {}
    for x in win:
        if game.protagonist[x]:
            moves[x] = min(y for y in game.succ[x] if y in win)
    return win, Strategy(moves)


def solve(game: TwoPlayerGame):
    if game.condition is Condition.SAFETY:
        return solve_safety(game)
    return solve_reachability(game)


@dataclass
class CompSatisficeResult:
    holds: bool
    strategy: Optional[Strategy]
    product_states: int
    product_edges: int
    comparator_states: int = 0
    arena: Optional[ProductArena] = None
    comparator: Optional[Comparator] = None


def _require_integer(g: QuantitativeGame):
    if not g.discount.is_integer:
        raise UnsupportedDiscountError(
            f"comparator satisficing needs an integer discount factor, got "
            f"{g.discount}; use value iteration instead"
        )


def comp_satisfice(
    g: QuantitativeGame,
    v,
    rel: Relation,
    player: Owner,
    deadline: Optional[float] = None,
) -> CompSatisficeResult:
    """Decide satisficing by solving the product safety/reachability game."""
    _require_integer(g)
    rel, player = Relation(rel), Owner(player)
    c = build(max(g.mu, 1), g.discount.p, Fraction(v), rel)
    arena = product(g, c, player, deadline)
    win, strat = solve(arena)
    holds = arena.init in win
    return CompSatisficeResult(
        holds,
        strat if holds else None,
        arena.n_states,
        arena.n_edges,
        c.n_states,
        arena,
        c,
    )


def _lasso_plays(arena: ProductArena, strategy: Strategy, limit: int):
    """Yield every play of a memoryless antagonist against ``strategy``.

    Each play is a simple path closed into a lasso; yielded as the list of
    product states plus the index where the loop starts, and the weights.
    """
    path, weights = [], []
    pos = {}
    count = 0

    def dfs(x):
        nonlocal count
        if x in pos:
            count += 1
            if count > limit:
                raise VerificationTooLarge(f"more than {limit} plays to check")
            yield pos[x], list(weights)
            return
        pos[x] = len(path)
        path.append(x)
        out = arena.succ[x]
        if arena.protagonist[x]:
            k = out.index(strategy.moves[x])
            choices = [k]
        else:
            choices = range(len(out))
        for k in choices:
            weights.append(arena.weight[x][k])
            yield from dfs(out[k])
            weights.pop()
        path.pop()
        del pos[x]

    yield from dfs(arena.init)


def verify_strategy(
    g: QuantitativeGame,
    arena: ProductArena,
    strategy: Strategy,
    v,
    rel: Relation,
    max_states: int = 8,
    max_plays: int = 200_000,
) -> bool:
    """Check a product strategy by evaluating every memoryless counter-play.

    Every resulting lasso is evaluated exactly with its discounted sum; the
    comparator plays no part in the check.
    """
    if g.n_states > max_states:
        raise VerificationTooLarge(f"game has {g.n_states} > {max_states} states")
    rel = Relation(rel)
    v = Fraction(v)
    for start, ws in _lasso_plays(arena, strategy, max_plays):
        cost = dsum_lasso(LassoSeq(ws[:start], ws[start:]), g.discount)
        if not rel.holds(cost, v):
            return False
    return True


def format_strategy(arena: ProductArena, strategy: Strategy, c: Comparator) -> str:
    lines = []
    for x in sorted(strategy.moves):
        v, s = arena.origin[x]
        u, _ = arena.origin[strategy.moves[x]]
        lines.append(f"move {v} {c.state_name(s)} -> {u}")
    return "\n".join(lines) + ("\n" if lines else "")
