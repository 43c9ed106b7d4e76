"""Quantitative graph games: data model, text format and instance generators."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

from .arith import DiscountFactor, as_discount

__all__ = [
    "Owner",
    "Edge",
    "QuantitativeGame",
    "GameParseError",
    "GameValidationError",
    "parse_game",
    "serialize_game",
    "gen_random",
    "gen_lower_bound",
    "gen_scalable",
    "gen_robustness",
]


class Owner(str, enum.Enum):
    MAX = "max"
    MIN = "min"

    @property
    def opponent(self) -> "Owner":
        return Owner.MIN if self is Owner.MAX else Owner.MAX


class Edge(NamedTuple):
    src: int
    dst: int
    weight: int


class GameParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class GameValidationError(ValueError):
    pass


@dataclass(frozen=True)
class QuantitativeGame:
    """Two-player turn-based game with integer edge weights.

    Edges are kept sorted so that structurally equal games compare equal
    regardless of the order they were given in.  Parallel edges are allowed.
    """

    n_states: int
    owner: tuple
    init: int
    edges: tuple
    discount: DiscountFactor

    def __post_init__(self):
        object.__setattr__(self, "owner", tuple(Owner(o) for o in self.owner))
        object.__setattr__(
            self, "edges", tuple(sorted(Edge(*map(int, e)) for e in self.edges))
        )
        object.__setattr__(self, "discount", as_discount(self.discount))
        self._validate()

    def _validate(self):
        n = self.n_states
        if n < 1:
            raise GameValidationError("game needs at least one state")
        if len(self.owner) != n:
            raise GameValidationError(
                f"owner map covers {len(self.owner)} of {n} states"
            )
        if not 0 <= self.init < n:
            raise GameValidationError(f"initial state {self.init} out of range")
        has_out = [False] * n
        for e in self.edges:
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise GameValidationError(
                    f"edge {e.src} -> {e.dst} has an endpoint out of range"
                )
            has_out[e.src] = True
        for v, ok in enumerate(has_out):
            if not ok:
                raise GameValidationError(f"state {v} has no outgoing edge")

    @cached_property
    def succ(self) -> tuple:
        """Per state, the tuple of ``(dst, weight)`` pairs."""
        out = [[] for _ in range(self.n_states)]
        for e in self.edges:
            out[e.src].append((e.dst, e.weight))
        return tuple(tuple(s) for s in out)

    @cached_property
    def mu(self) -> int:
        return max(abs(e.weight) for e in self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def swap_owners(self) -> "QuantitativeGame":
        """Same arena with the maximizer and minimizer exchanged."""
        return QuantitativeGame(
            self.n_states,
            tuple(o.opponent for o in self.owner),
            self.init,
            self.edges,
            self.discount,
        )

    def with_discount(self, d) -> "QuantitativeGame":
        return QuantitativeGame(self.n_states, self.owner, self.init, self.edges, d)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GameParseError(lineno, f"{what} must be an integer, got {tok!r}")


def parse_game(text) -> QuantitativeGame:
    """Parse the line-oriented game format.

    Accepts ``str`` or ``bytes``.  Syntax problems raise
    :class:`GameParseError` (with the line number); structural problems raise
    :class:`GameValidationError`.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    discount = n = init = None
    owners = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key, args = tok[0], tok[1:]
        if key == "discount":
            if len(args) != 2:
                raise GameParseError(lineno, "expected 'discount <p> <q>'")
            p, q = (_int(a, lineno, "discount") for a in args)
            if q < 1 or Fraction(p, q) <= 1:
                raise GameValidationError("discount factor must exceed 1")
            discount = DiscountFactor(p, q)
        elif key == "states":
            if len(args) != 1:
                raise GameParseError(lineno, "expected 'states <n>'")
            n = _int(args[0], lineno, "state count")
        elif key == "init":
            if len(args) != 1:
                raise GameParseError(lineno, "expected 'init <id>'")
            init = _int(args[0], lineno, "initial state")
        elif key == "owner":
            if len(args) != 2 or args[1] not in ("max", "min"):
                raise GameParseError(lineno, "expected 'owner <id> max|min'")
            v = _int(args[0], lineno, "state id")
            if v in owners:
                raise GameParseError(lineno, f"owner of state {v} given twice")
            owners[v] = Owner(args[1])
        elif key == "edge":
            if len(args) != 3:
                raise GameParseError(lineno, "expected 'edge <src> <dst> <weight>'")
            edges.append(tuple(_int(a, lineno, "edge field") for a in args))
        else:
            raise GameParseError(lineno, f"unknown directive {key!r}")

    for what, val in (("discount", discount), ("states", n), ("init", init)):
        if val is None:
            raise GameValidationError(f"missing '{what}' line")
    missing = [v for v in range(n) if v not in owners]
    if missing:
        raise GameValidationError(f"state {missing[0]} has no owner")
    extra = [v for v in owners if not 0 <= v < n]
    if extra:
        raise GameValidationError(f"owner line for unknown state {extra[0]}")
    return QuantitativeGame(n, tuple(owners[v] for v in range(n)), init, edges, discount)


def serialize_game(g: QuantitativeGame) -> bytes:
    lines = [
        f"discount {g.discount.p} {g.discount.q}",
        f"states {g.n_states}",
        f"init {g.init}",
    ]
    lines += [f"owner {v} {o.value}" for v, o in enumerate(g.owner)]
    lines += [f"edge {e.src} {e.dst} {e.weight}" for e in g.edges]
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def gen_random(n: int, mu: int, b: int, seed: int, d=2) -> QuantitativeGame:
    """Seeded random game: each state gets 1..b edges, weights in [-mu, mu]."""
    if n < 1 or mu < 1 or b < 1:
        raise ValueError("gen_random needs n, mu, b >= 1")
    rng = random.Random(seed)
    owners = [Owner.MAX if rng.random() < 0.5 else Owner.MIN for _ in range(n)]
    edges = []
    for v in range(n):
        for _ in range(rng.randint(1, b)):
            edges.append((v, rng.randrange(n), rng.randint(-mu, mu)))
    return QuantitativeGame(n, owners, 0, edges, d)


def lower_bound_weights(n: int, d: int = 2):
    """Unscaled weights ``(w, one)`` of the lower-bound family.

    ``w`` is the entry weight into the short loop; it exceeds the value at
    which both branches tie by ``d**-(n*n)``, so the long-run optimum takes
    the short loop while short horizons prefer the other branch.
    """
    dd = Fraction(d)
    long_loop = dd ** (4 * n - 1) / (dd ** (4 * n) - 1)
    short_loop = 1 / (dd ** (2 * n) - 1)
    w = long_loop - short_loop + dd ** (-(n * n))
    return w, Fraction(1)


def gen_lower_bound(n: int, d: int = 2) -> QuantitativeGame:
    """The two-loop family whose value iteration needs Omega(|V|) steps.

    State 0 is the start (max).  States ``1..2n`` form the short loop entered
    with weight ``w``; its closing edge carries the unit weight.  States
    ``2n+1..6n`` form the long loop entered with weight 0; its first edge
    carries the unit weight.  All weights are scaled to integers.
    """
    if n < 1:
        raise ValueError("gen_lower_bound needs n >= 1")
    w, one = lower_bound_weights(n, d)
    scale = w.denominator
    W, ONE = int(w * scale), int(one * scale)
    edges = []
    short = list(range(1, 2 * n + 1))
    long_ = list(range(2 * n + 1, 6 * n + 1))
    edges.append((0, short[0], W))
    for a, b in zip(short, short[1:]):
        edges.append((a, b, 0))
    edges.append((short[-1], short[0], ONE))
    edges.append((0, long_[0], 0))
    for k, (a, b) in enumerate(zip(long_, long_[1:])):
        edges.append((a, b, ONE if k == 0 else 0))
    edges.append((long_[-1], long_[0], 0))
    return QuantitativeGame(6 * n + 1, [Owner.MAX] * (6 * n + 1), 0, edges, d)


def gen_scalable(i: int, d: int = 2) -> QuantitativeGame:
    """Scalable family with ``3 * 2**i`` states, weights in [-5, 5].

    A ring through all states keeps the game connected; each state gets one
    extra seeded chord.  Owners alternate by state id.
    """
    if i < 1:
        raise ValueError("gen_scalable needs i >= 1")
    n = 3 * 2**i
    rng = random.Random(i)
    owners = [Owner.MAX if v % 2 == 0 else Owner.MIN for v in range(n)]
    edges = []
    for v in range(n):
        edges.append((v, (v + 1) % n, rng.randint(-5, 5)))
        edges.append((v, rng.randrange(n), rng.randint(-5, 5)))
    return QuantitativeGame(n, owners, 0, edges, d)


def gen_robustness(n: int = 200, head: int = 12, mu: int = 5, seed: int = 0) -> QuantitativeGame:
    """Fixed game for threshold sweeps.

    A path of ``head`` states leads into a ring of ``n - head`` states.  Every
    state offers two parallel edges to its successor, so plays are pinned to
    the path and only the weights are contested; the optimal cost then has a
    short, fully controlled digit lasso.
    """
    rng = random.Random(seed)
    owners = [Owner.MAX if v % 2 == 0 else Owner.MIN for v in range(n)]
    edges = []
    for v in range(n):
        nxt = v + 1 if v + 1 < n else head
        a, b = rng.sample(range(-mu, mu + 1), 2)
        edges.append((v, nxt, a))
        edges.append((v, nxt, b))
    return QuantitativeGame(n, owners, 0, edges, 2)
