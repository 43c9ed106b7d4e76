"""Discounted-sum comparator automata for an arbitrary rational threshold.

For an integer discount factor ``d`` the language ``{A : DSum(A, d) <= v}``
over letters ``-mu..mu`` is recognised by a deterministic safety automaton
whose states track the recoverable gap between the input read so far and the
digits of ``v``.  The other three inequalities are obtained from it by
negating letters and/or complementing acceptance.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import (
    LassoSeq,
    ThresholdDigits,
    UnsupportedDiscountError,
    as_discount,
    dsum_lasso,
    format_rational,
    gap_step,
    to_threshold_digits,
)

__all__ = [
    "Relation",
    "Kind",
    "PrefixClass",
    "Comparator",
    "AlphabetError",
    "bounds",
    "build_leq",
    "build",
    "classify_prefix",
    "membership_lasso",
    "state_count",
    "size_bound",
    "dump",
]

BAD = 0
VERYGOOD = 1


class AlphabetError(ValueError):
    """A letter falls outside ``-mu..mu``."""


class Relation(str, enum.Enum):
    LEQ = "leq"
    GEQ = "geq"
    LT = "lt"
    GT = "gt"

    @property
    def symbol(self) -> str:
        return {"leq": "<=", "geq": ">=", "lt": "<", "gt": ">"}[self.value]

    @property
    def is_upper_bound(self) -> bool:
        return self in (Relation.LEQ, Relation.LT)

    @property
    def is_strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)

    def holds(self, x, v) -> bool:
        if self is Relation.LEQ:
            return x <= v
        if self is Relation.GEQ:
            return x >= v
        if self is Relation.LT:
            return x < v
        return x > v


class Kind(str, enum.Enum):
    SAFETY = "safety"
    COSAFETY = "cosafety"


class PrefixClass(str, enum.Enum):
    BAD_PREFIX = "bad"
    VERY_GOOD_PREFIX = "very_good"
    UNDETERMINED = "undetermined"


def _int_discount(d) -> int:
    d = as_discount(d)
    if not d.is_integer:
        raise UnsupportedDiscountError(
            f"comparators exist only for integer discount factors, got {d}"
        )
    return d.p


def bounds(mu: int, d, threshold: ThresholdDigits, i: int):
    """``(U_i, L_i)``: gap limits after consuming digit ``i``.

    Both are ``DSum(tail)/d +- mu/(d-1)`` where the tail is the digit word
    that follows index ``i``.
    """
    dv = as_discount(d).value
    tail = dsum_lasso(threshold.tail(threshold.next_index(i)), dv)
    slack = Fraction(mu) / (dv - 1)
    return tail / dv + slack, tail / dv - slack


def _canonical_indices(t: ThresholdDigits) -> list:
    """Map each digit index to the smallest index with the same tail word.

    States whose indices have identical tails behave identically, so they
    are merged.  Two eventually periodic words with pre-period <= n+1 and
    period P agree everywhere iff they agree on the first n+1+P letters.
    """
    horizon = t.n + 1 + len(t.period)

    def word(j):
        out = []
        for _ in range(horizon):
            out.append(t.digits[j])
            j = t.next_index(j)
        return tuple(out)

    first = {}
    canon = []
    for j in range(t.n + 1):
        canon.append(first.setdefault(word(j), j))
    return canon


@dataclass(frozen=True)
class Comparator:
    """Deterministic comparator automaton.

    States are integers: ``0`` is the BAD sink, ``1`` the VERYGOOD sink of the
    underlying ``<=`` construction, and ``2..`` are ``(gap, index)`` pairs
    listed in :attr:`labels`.  ``trans[s][a + mu]`` is the successor of ``s``
    on letter ``a``.  For ``>=``/``<`` the transition table already includes
    the letter negation, while :attr:`labels` and :attr:`threshold` describe
    the underlying ``<=`` automaton for ``-v``.
    """

    mu: int
    d: int
    v: Fraction
    rel: Relation
    kind: Kind
    threshold: ThresholdDigits
    labels: tuple
    init: int
    trans: tuple
    accepting: tuple

    @property
    def n_states(self) -> int:
        return len(self.trans)

    def step(self, s: int, a: int) -> int:
        if not -self.mu <= a <= self.mu:
            raise AlphabetError(f"letter {a} outside [-{self.mu}, {self.mu}]")
        return self.trans[s][a + self.mu]

    def run(self, word: Sequence[int]) -> int:
        s = self.init
        for a in word:
            s = self.step(s, a)
        return s

    def is_sink(self, s: int) -> bool:
        return s in (BAD, VERYGOOD)

    @property
    def accepting_sinks(self):
        return [s for s in (BAD, VERYGOOD) if self.accepting[s]]

    @property
    def rejecting_sinks(self):
        return [s for s in (BAD, VERYGOOD) if not self.accepting[s]]

    def complement(self) -> "Comparator":
        flipped = {
            Relation.LEQ: Relation.GT,
            Relation.GT: Relation.LEQ,
            Relation.GEQ: Relation.LT,
            Relation.LT: Relation.GEQ,
        }[self.rel]
        kind = Kind.COSAFETY if self.kind is Kind.SAFETY else Kind.SAFETY
        return Comparator(
            self.mu,
            self.d,
            self.v,
            flipped,
            kind,
            self.threshold,
            self.labels,
            self.init,
            self.trans,
            tuple(not x for x in self.accepting),
        )

    def state_name(self, s: int) -> str:
        if s == BAD:
            return "BAD"
        if s == VERYGOOD:
            return "VERYGOOD"
        g, i = self.labels[s]
        return f"({g},{i})"


def build_leq(mu: int, d, threshold: ThresholdDigits, v=None) -> Comparator:
    """Safety comparator for ``DSum(A, d) <= v`` where ``threshold`` digits ``v``."""
    base = _int_discount(d)
    if mu < 1:
        raise ValueError("comparator alphabet bound mu must be >= 1")
    t = threshold
    if v is None:
        v = t.value(base)
    canon = _canonical_indices(t)
    # window of admissible gaps for states whose next digit index is j
    window = {}
    for i in range(t.n + 1):
        j = canon[t.next_index(i)]
        if j not in window:
            U, L = bounds(mu, base, t, i)
            window[j] = (math.floor(L), math.floor(U))

    labels = [None, None]
    ids = {}

    def add(g, j):
        key = (g, j)
        if key not in ids:
            ids[key] = len(labels)
            labels.append(key)
        return ids[key]

    init = add(0, canon[0])
    for j in sorted(window):
        lo, hi = window[j]
        for g in range(lo + 1, hi + 1):
            add(g, j)

    trans = []
    for s, lab in enumerate(labels):
        if lab is None:
            trans.append((s,) * (2 * mu + 1))
            continue
        g, i = lab
        j = canon[t.next_index(i)]
        lo, hi = window[j]
        row = []
        for a in range(-mu, mu + 1):
            x = base * g + a - t.digits[i]
            if x > hi:
                row.append(BAD)
            elif x <= lo:
                row.append(VERYGOOD)
            else:
                row.append(ids[(x, j)])
        trans.append(tuple(row))
    accepting = tuple(s != BAD for s in range(len(labels)))
    return Comparator(
        mu, base, Fraction(v), Relation.LEQ, Kind.SAFETY, t, tuple(labels), init,
        tuple(trans), accepting,
    )


def _negate_letters(c: Comparator) -> tuple:
    return tuple(row[::-1] for row in c.trans)


def build(mu: int, d, v, rel: Relation) -> Comparator:
    """Comparator for ``DSum(A, d) rel v``."""
    rel = Relation(rel)
    base = _int_discount(d)
    v = Fraction(v)
    if rel in (Relation.LEQ, Relation.GT):
        c = build_leq(mu, base, to_threshold_digits(v, base), v)
    else:
        # DSum(A) >= v  iff  DSum(-A) <= -v
        neg = build_leq(mu, base, to_threshold_digits(-v, base), -v)
        c = Comparator(
            mu, base, v, Relation.GEQ, Kind.SAFETY, neg.threshold, neg.labels,
            neg.init, _negate_letters(neg), neg.accepting,
        )
    if rel.is_strict:
        c = c.complement()
    return c


def classify_prefix(mu: int, d, threshold: ThresholdDigits, word: Sequence[int]) -> PrefixClass:
    """Classify a finite word for the ``<=`` language of ``threshold``.

    The empty word is always undetermined, like the automaton's initial state.
    """
    dv = as_discount(d).value
    g = Fraction(0)
    j = 0
    for a in word:
        if not -mu <= a <= mu:
            raise AlphabetError(f"letter {a} outside [-{mu}, {mu}]")
        g = gap_step(g, a - threshold.digits[j], dv)
        j = threshold.next_index(j)
    if not word:
        return PrefixClass.UNDETERMINED
    tail = dsum_lasso(threshold.tail(j), dv)
    slack = Fraction(mu) / (dv - 1)
    if g > tail / dv + slack:
        return PrefixClass.BAD_PREFIX
    if g <= tail / dv - slack:
        return PrefixClass.VERY_GOOD_PREFIX
    return PrefixClass.UNDETERMINED


def membership_lasso(c: Comparator, lasso: LassoSeq) -> bool:
    """Whether the comparator accepts ``head . loop^omega``."""
    if not isinstance(lasso, LassoSeq):
        lasso = LassoSeq(*lasso)
    s = c.run(lasso.head)
    seen = set()
    off = 0
    while (s, off) not in seen:
        seen.add((s, off))
        s = c.step(s, lasso.loop[off])
        off = (off + 1) % len(lasso.loop)
    # acceptance is constant along any cycle: the only states whose status
    # differs from their successors' are never revisited
    return c.accepting[s]


def state_count(c: Comparator) -> int:
    return c.n_states


def size_bound(c: Comparator) -> Fraction:
    return 2 + (c.threshold.n + 1) * (Fraction(2 * c.mu, c.d - 1) + 1)


def dump(c: Comparator) -> str:
    lines = [
        f"comparator mu={c.mu} d={c.d} rel={c.rel.value} v={format_rational(c.v)} "
        f"kind={c.kind.value}"
    ]
    for s in range(c.n_states):
        acc = int(c.accepting[s])
        if s == BAD:
            lines.append(f"state {s} BAD accepting={acc}")
        elif s == VERYGOOD:
            lines.append(f"state {s} VERYGOOD accepting={acc}")
        else:
            g, i = c.labels[s]
            lines.append(f"state {s} gap={g} idx={i} accepting={acc}")
    for s in range(c.n_states):
        for a in range(-c.mu, c.mu + 1):
            lines.append(f"trans {s} {a} {c.trans[s][a + c.mu]}")
    return "\n".join(lines) + "\n"
