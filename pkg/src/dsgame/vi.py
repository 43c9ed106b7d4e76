"""Value iteration for discounted-sum games, with an exact stopping rule.

Iterates ``wt_{k+1}(v) = opt_w gamma(v, w) + wt_k(w) / d`` for exactly as many
steps as needed for the finite-horizon interval around ``wt_k(init)`` to be
narrower than the minimal gap between candidate optimal costs, then recovers
the optimal cost as the unique rational of bounded denominator inside it.

Values are kept as integer numerators over the shared denominator
``p**(k-1)``, which keeps each step in integer arithmetic.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import format_rational
from .comparator import Relation
from .game import Owner, QuantitativeGame

__all__ = [
    "ViState",
    "IterationBudget",
    "OptimalCostResult",
    "SatisficeAnswer",
    "DecidedBy",
    "ReconstructionError",
    "DeadlineExceeded",
    "vi_init",
    "vi_step",
    "vi_run",
    "iteration_budget",
    "vi_interval",
    "reconstruct_rational",
    "vi_optimize",
    "vi_satisfice",
    "coherent",
    "game_for",
]


class ReconstructionError(ArithmeticError):
    """No rational with the requested denominator bound lies in the interval."""


class DeadlineExceeded(TimeoutError):
    pass


def check_deadline(deadline: Optional[float]):
    if deadline is not None and time.monotonic() > deadline:
        raise DeadlineExceeded("deadline exceeded")


@dataclass(frozen=True)
class ViState:
    """Snapshot ``wt_k`` of value iteration.

    ``num[v] / p**(k-1)`` is ``wt_k(v)``; :attr:`wt` gives the reduced values.
    """

    k: int
    num: tuple
    p: int

    @property
    def denominator(self) -> int:
        return self.p ** (self.k - 1)

    def value(self, v: int) -> Fraction:
        return Fraction(self.num[v], self.denominator)

    @property
    def wt(self) -> tuple:
        den = self.denominator
        return tuple(Fraction(x, den) for x in self.num)


def vi_init(g: QuantitativeGame) -> ViState:
    num = []
    for v, out in enumerate(g.succ):
        ws = [w for _, w in out]
        num.append(max(ws) if g.owner[v] is Owner.MAX else min(ws))
    return ViState(1, tuple(num), g.discount.p)


def vi_step(g: QuantitativeGame, s: ViState) -> ViState:
    p, q = g.discount.p, g.discount.q
    pk = p**s.k
    prev = s.num
    num = []
    for v, out in enumerate(g.succ):
        vals = [w * pk + q * prev[u] for u, w in out]
        num.append(max(vals) if g.owner[v] is Owner.MAX else min(vals))
    return ViState(s.k + 1, tuple(num), p)


def vi_run(g: QuantitativeGame, k: int):
    """Yield ``wt_1 .. wt_k``."""
    s = vi_init(g)
    yield s
    while s.k < k:
        s = vi_step(g, s)
        yield s


@dataclass(frozen=True)
class IterationBudget:
    k_max: int
    bound_W: int
    bound_diff: int


def _interval_small_enough(k: int, mu: int, p: int, q: int, bound_diff: int) -> bool:
    # 2mu / ((d-1) d^(k-1)) < 1/bound_diff, cleared of denominators
    return 2 * mu * bound_diff * q**k < (p - q) * p ** (k - 1)


def iteration_budget(g: QuantitativeGame) -> IterationBudget:
    """Denominator bounds and the number of iterations that suffices."""
    n = g.n_states
    p, q = g.discount.p, g.discount.q
    bound_W = (p**n - q**n) * p**n
    bound_diff = bound_W * bound_W
    mu = g.mu
    if mu == 0:
        return IterationBudget(1, bound_W, bound_diff)
    hi = 1
    while not _interval_small_enough(hi, mu, p, q, bound_diff):
        hi *= 2
    lo = hi // 2  # fails (or is 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _interval_small_enough(mid, mu, p, q, bound_diff):
            hi = mid
        else:
            lo = mid
    return IterationBudget(hi, bound_W, bound_diff)


def interval_radius(mu: int, p: int, q: int, k: int) -> Fraction:
    """``mu / ((d-1) d^(k-1))`` for ``d = p/q``."""
    return Fraction(mu * q**k, (p - q) * p ** (k - 1))


def vi_interval(s: ViState, g: QuantitativeGame):
    """Closed interval ``(lo, hi)`` known to contain the optimal cost."""
    r = interval_radius(g.mu, g.discount.p, g.discount.q, s.k)
    c = s.value(g.init)
    return c - r, c + r


def _floor_div_frac(a: Fraction, b: Fraction) -> int:
    return (a.numerator * b.denominator) // (a.denominator * b.numerator)


def reconstruct_rational(lo, hi, max_den: int, closed: bool = True) -> Fraction:
    """Simplest rational in the interval, by Stern-Brocot descent.

    Walks the mediant tree from ``0/1``, ``1/0`` (after shifting by
    ``floor(lo)``), taking whole runs of same-direction steps at once.  With
    ``closed=True`` the endpoints belong to the interval.  Raises
    :class:`ReconstructionError` when the simplest member has a denominator
    above ``max_den`` (or the interval is empty).
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi or (not closed and lo >= hi):
        raise ReconstructionError(f"empty interval [{lo}, {hi}]")
    shift = lo.numerator // lo.denominator
    a, b = lo - shift, hi - shift  # 0 <= a < 1

    def below(x):  # x lies left of the interval
        return x < a if closed else x <= a

    def above(x):
        return x > b if closed else x >= b

    ln, ld, rn, rd = 0, 1, 1, 0
    if not below(Fraction(0)):
        result = Fraction(0)
    else:
        while True:
            mn, md = ln + rn, ld + rd
            if md > max_den:
                raise ReconstructionError(
                    f"no rational with denominator <= {max_den} in [{lo}, {hi}]"
                )
            m = Fraction(mn, md)
            if below(m):
                # largest t with (ln + t rn)/(ld + t rd) still below a
                x = Fraction(a * ld - ln) / (rn - a * rd)
                t = (x.numerator + x.denominator - 1) // x.denominator - 1 if closed else x.numerator // x.denominator
                t = max(t, 1)
                ln, ld = ln + t * rn, ld + t * rd
            elif above(m):
                # largest t with (rn + t ln)/(rd + t ld) still above b
                x = Fraction(rn - b * rd) / (b * ld - ln)
                t = (x.numerator + x.denominator - 1) // x.denominator - 1 if closed else x.numerator // x.denominator
                t = max(t, 1)
                rn, rd = rn + t * ln, rd + t * ld
            else:
                result = m
                break
    if result.denominator > max_den:
        raise ReconstructionError(
            f"no rational with denominator <= {max_den} in [{lo}, {hi}]"
        )
    return result + shift


@dataclass(frozen=True)
class OptimalCostResult:
    W: Fraction
    iterations_used: int
    interval: tuple
    budget: IterationBudget

    def __str__(self):
        return f"W = {format_rational(self.W)} after {self.iterations_used} iterations"


def vi_optimize(g: QuantitativeGame, deadline: Optional[float] = None) -> OptimalCostResult:
    budget = iteration_budget(g)
    s = vi_init(g)
    while s.k < budget.k_max:
        check_deadline(deadline)
        s = vi_step(g, s)
    lo, hi = vi_interval(s, g)
    W = reconstruct_rational(lo, hi, budget.bound_W)
    return OptimalCostResult(W, s.k, (lo, hi), budget)


class DecidedBy(str, enum.Enum):
    BUDGET_EXHAUSTED = "budget_exhausted"
    INTERVAL_EXIT = "interval_exit"


@dataclass(frozen=True)
class SatisficeAnswer:
    holds: bool
    iterations_used: int
    decided_by: DecidedBy
    k_max: int


def coherent(rel: Relation, player: Owner) -> bool:
    """Whether ``player`` pushes the cost in the direction ``rel`` asks for."""
    return (player is Owner.MIN) == rel.is_upper_bound


def game_for(g: QuantitativeGame, rel: Relation, player: Owner) -> QuantitativeGame:
    """Game whose optimal cost decides ``player`` forcing ``cost rel v``.

    A minimizer asking for a lower bound (or a maximizer asking for an upper
    bound) is really playing the opposite role, so the owners are swapped.
    """
    return g if coherent(rel, player) else g.swap_owners()


def vi_satisfice(
    g: QuantitativeGame,
    v,
    rel: Relation,
    player: Owner,
    deadline: Optional[float] = None,
) -> SatisficeAnswer:
    """Decide whether ``player`` can force every play to satisfy ``cost rel v``.

    Stops early as soon as ``v`` falls outside the interval around the
    current estimate; otherwise runs the full budget and compares the
    reconstructed optimal cost.
    """
    v = Fraction(v)
    rel, player = Relation(rel), Owner(player)
    h = game_for(g, rel, player)
    budget = iteration_budget(h)
    p, q, mu = h.discount.p, h.discount.q, h.mu
    s = vi_init(h)
    while True:
        c = s.value(h.init)
        r = interval_radius(mu, p, q, s.k)
        if v < c - r:  # W > v
            return SatisficeAnswer(rel.holds(v + 1, v), s.k, DecidedBy.INTERVAL_EXIT, budget.k_max)
        if v > c + r:  # W < v
            return SatisficeAnswer(rel.holds(v - 1, v), s.k, DecidedBy.INTERVAL_EXIT, budget.k_max)
        if s.k >= budget.k_max:
            W = reconstruct_rational(c - r, c + r, budget.bound_W)
            return SatisficeAnswer(rel.holds(W, v), s.k, DecidedBy.BUDGET_EXHAUSTED, budget.k_max)
        check_deadline(deadline)
        s = vi_step(h, s)
