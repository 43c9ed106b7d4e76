"""Brute-force reference solvers used as independent test oracles.

Everything here enumerates memoryless strategy profiles and evaluates the
resulting plays exactly, so it only scales to very small games.  None of it
shares code with the value-iteration or comparator solvers beyond the lasso
evaluator.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .arith import LassoSeq, dsum_lasso
from .comparator import Relation
from .game import Owner, QuantitativeGame

__all__ = [
    "play_lasso",
    "profile_costs",
    "brute_optimal",
    "brute_satisfice",
    "brute_parity",
    "candidate_rationals",
]


def play_lasso(g: QuantitativeGame, choice) -> LassoSeq:
    """Weight lasso of the play where state ``v`` always takes edge ``choice[v]``."""
    seen = {}
    weights = []
    v = g.init
    while v not in seen:
        seen[v] = len(weights)
        u, w = g.succ[v][choice[v]]
        weights.append(w)
        v = u
    start = seen[v]
    return LassoSeq(weights[:start], weights[start:])


def profile_costs(g: QuantitativeGame):
    """Cost of every memoryless profile, keyed by ``(max_choice, min_choice)``.

    Each key part is a tuple of edge indices for the states of that owner,
    in state order.
    """
    max_states = [v for v in range(g.n_states) if g.owner[v] is Owner.MAX]
    min_states = [v for v in range(g.n_states) if g.owner[v] is Owner.MIN]
    max_opts = list(itertools.product(*(range(len(g.succ[v])) for v in max_states)))
    min_opts = list(itertools.product(*(range(len(g.succ[v])) for v in min_states)))
    costs = {}
    choice = [0] * g.n_states
    for a in max_opts:
        for v, k in zip(max_states, a):
            choice[v] = k
        for b in min_opts:
            for v, k in zip(min_states, b):
                choice[v] = k
            costs[(a, b)] = dsum_lasso(play_lasso(g, choice), g.discount)
    return max_opts, min_opts, costs


def brute_optimal(g: QuantitativeGame, table=None) -> Fraction:
    """``min`` over minimizer profiles of ``max`` over maximizer profiles."""
    max_opts, min_opts, costs = table or profile_costs(g)
    return min(max(costs[(a, b)] for a in max_opts) for b in min_opts)


def brute_satisfice(g: QuantitativeGame, v, rel: Relation, player: Owner, table=None) -> bool:
    """Is there a memoryless strategy of ``player`` making every play satisfy ``cost rel v``?

    Memoryless counter-strategies suffice here: once the protagonist is
    fixed, the opponent faces a one-player discounted game.
    """
    rel, player = Relation(rel), Owner(player)
    v = Fraction(v)
    max_opts, min_opts, costs = table or profile_costs(g)
    if player is Owner.MAX:
        return any(all(rel.holds(costs[(a, b)], v) for b in min_opts) for a in max_opts)
    return any(all(rel.holds(costs[(a, b)], v) for a in max_opts) for b in min_opts)


def candidate_rationals(lo: Fraction, hi: Fraction, max_den: int):
    """All ``p/q`` with ``q <= max_den`` in the closed interval, by enumeration."""
    out = set()
    for q in range(1, max_den + 1):
        p = -((-lo.numerator * q) // lo.denominator)  # ceil(lo * q)
        while Fraction(p, q) <= hi:
            out.add(Fraction(p, q))
            p += 1
    return sorted(out)


def _antagonist_can_win(pg, sigma) -> bool:
    """With the protagonist fixed to ``sigma``, can the antagonist force an odd max?"""
    reach = set()
    stack = [pg.init]
    while stack:
        x = stack.pop()
        if x in reach:
            continue
        reach.add(x)
        if pg.protagonist[x]:
            stack.append(sigma[x])
        else:
            stack.extend(pg.succ[x])

    def edges(x, allowed):
        outs = [sigma[x]] if pg.protagonist[x] else pg.succ[x]
        return [y for y in outs if y in allowed]

    for p in sorted({pg.priority[x] for x in reach if pg.priority[x] % 2 == 1}):
        allowed = {x for x in reach if pg.priority[x] <= p}
        # an odd-max cycle exists iff some priority-p state lies on a cycle
        # inside the states of priority <= p
        for s in (x for x in allowed if pg.priority[x] == p):
            seen = set()
            stack = list(edges(s, allowed))
            while stack:
                y = stack.pop()
                if y == s:
                    return True
                if y in seen:
                    continue
                seen.add(y)
                stack.extend(edges(y, allowed))
    return False


def brute_parity(pg, limit: int = 1_000_000) -> bool:
    """Does the protagonist win from ``pg.init`` with some memoryless strategy?

    Strategies are enumerated lazily over the states they actually reach.
    """
    count = 0

    def extend(sigma):
        nonlocal count
        # find a reachable protagonist state without a choice yet
        reach, stack = set(), [pg.init]
        pending = None
        while stack:
            x = stack.pop()
            if x in reach:
                continue
            reach.add(x)
            if pg.protagonist[x]:
                if x not in sigma:
                    pending = x
                    break
                stack.append(sigma[x])
            else:
                stack.extend(pg.succ[x])
        if pending is None:
            count += 1
            if count > limit:
                raise RuntimeError("too many strategies to enumerate")
            return not _antagonist_can_win(pg, sigma)
        for y in sorted(set(pg.succ[pending])):
            sigma[pending] = y
            if extend(sigma):
                del sigma[pending]
                return True
            del sigma[pending]
        return False

    return extend({})
