"""Exact discounted-sum arithmetic.

Every value in the toolkit is a :class:`fractions.Fraction`; nothing here
touches floating point.  A discount factor ``d = p/q`` is carried as a
:class:`DiscountFactor` so that callers can get at ``p`` and ``q`` directly
(several bounds are stated in terms of them).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

__all__ = [
    "DiscountFactor",
    "LassoSeq",
    "ThresholdDigits",
    "InvalidLassoError",
    "UnsupportedDiscountError",
    "as_discount",
    "dsum_finite",
    "dsum_lasso",
    "gap",
    "gap_step",
    "max_dsum_bound",
    "to_threshold_digits",
    "parse_rational",
    "format_rational",
    "partial_sum",
]

RationalLike = Union[int, Fraction]


class InvalidLassoError(ValueError):
    """Raised for a lasso whose loop is empty."""


class UnsupportedDiscountError(ValueError):
    """Raised when an operation needs an integer discount factor."""


@dataclass(frozen=True)
class DiscountFactor:
    """Discount factor ``p/q`` with ``p > q >= 1`` in lowest terms."""

    p: int
    q: int = 1

    def __post_init__(self):
        if self.q < 1 or self.p <= self.q:
            raise ValueError("discount factor must exceed 1")
        if math.gcd(self.p, self.q) != 1:
            g = math.gcd(self.p, self.q)
            object.__setattr__(self, "p", self.p // g)
            object.__setattr__(self, "q", self.q // g)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def is_integer(self) -> bool:
        return self.q == 1

    def __str__(self):
        return f"{self.p}/{self.q}"


def as_discount(d) -> DiscountFactor:
    if isinstance(d, DiscountFactor):
        return d
    d = Fraction(d)
    return DiscountFactor(d.numerator, d.denominator)


def dsum_finite(weights: Sequence[int], d) -> Fraction:
    """Discounted sum ``w0 + w1/d + w2/d^2 + ...`` of a finite sequence."""
    d = as_discount(d)
    if not weights:
        return Fraction(0)
    # integer Horner form: sum_i w_i q^i p^(L-1-i) / p^(L-1)
    p, q = d.p, d.q
    num = 0
    qpow = 1
    for w in weights:
        num = num * p + w * qpow
        qpow *= q
    return Fraction(num, p ** (len(weights) - 1))


@dataclass(frozen=True)
class LassoSeq:
    """Eventually periodic weight sequence ``head . loop^omega``."""

    head: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise InvalidLassoError("lasso loop must be non-empty")

    def unroll(self, k: int) -> list:
        """First ``k`` letters of the infinite word."""
        out = list(self.head[:k])
        while len(out) < k:
            out.extend(self.loop[: k - len(out)])
        return out

    def letters(self):
        return self.head + self.loop


def dsum_lasso(lasso: LassoSeq, d) -> Fraction:
    """Exact discounted sum of ``head . loop^omega``."""
    if not isinstance(lasso, LassoSeq):
        lasso = LassoSeq(*lasso)
    d = as_discount(d)
    dv = d.value
    dl = dv ** len(lasso.loop)
    return dsum_finite(lasso.head, d) + dsum_finite(lasso.loop, d) * dl / (
        (dl - 1) * dv ** len(lasso.head)
    )


def partial_sum(lasso: LassoSeq, d, k: int) -> Fraction:
    return dsum_finite(lasso.unroll(k), d)


def gap_step(g: RationalLike, w: int, d) -> Fraction:
    """One step of the recoverable-gap recurrence: ``d*g + w``."""
    return as_discount(d).value * g + w


def gap(weights: Sequence[int], d) -> Fraction:
    """Recoverable gap ``d^(|W|-1) * DSum(W)``; zero for the empty word."""
    g = Fraction(0)
    for w in weights:
        g = gap_step(g, w, d)
    return g


def max_dsum_bound(mu: int, d) -> Fraction:
    """Largest ``|DSum|`` of any sequence with letters in ``[-mu, mu]``."""
    dv = as_discount(d).value
    return mu * dv / (dv - 1)


@dataclass(frozen=True)
class ThresholdDigits:
    """Digit lasso ``v[0..m] (v[m+1..n])^omega`` of a rational threshold.

    Index arithmetic follows the digit positions: after index ``n`` the next
    index is ``m + 1``, the start of the period.
    """

    prefix: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise InvalidLassoError("threshold period must be non-empty")

    @property
    def digits(self) -> tuple:
        return self.prefix + self.period

    @property
    def n(self) -> int:
        return len(self.prefix) + len(self.period) - 1

    @property
    def m(self) -> int:
        return len(self.prefix) - 1

    def next_index(self, i: int) -> int:
        return self.m + 1 if i == self.n else i + 1

    def tail(self, j: int) -> LassoSeq:
        """The digit word read from index ``j`` onwards."""
        if j <= self.m:
            return LassoSeq(self.prefix[j:], self.period)
        r = j - (self.m + 1)
        return LassoSeq((), self.period[r:] + self.period[:r])

    def as_lasso(self) -> LassoSeq:
        return LassoSeq(self.prefix, self.period)

    def value(self, d) -> Fraction:
        return dsum_lasso(self.as_lasso(), d)


def to_threshold_digits(v: RationalLike, d) -> ThresholdDigits:
    """Greedy base-``d`` expansion of ``v`` as a digit lasso.

    The leading digit is ``floor(v)``; later digits lie in ``0..d-1``.  The
    expansion stops at the first repeated remainder.
    """
    d = as_discount(d)
    if not d.is_integer:
        raise UnsupportedDiscountError(
            f"threshold digits need an integer discount factor, got {d}"
        )
    base = d.p
    v = Fraction(v)
    lead = math.floor(v)
    digits = [lead]
    r = v - lead
    seen = {}
    while r not in seen:
        seen[r] = len(digits)
        x = r * base
        digit = math.floor(x)
        digits.append(digit)
        r = x - digit
    start = seen[r]
    return ThresholdDigits(tuple(digits[:start]), tuple(digits[start:]))


_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"P/Q"`` or ``"N"``; decimals are rejected on purpose."""
    m = _RATIONAL.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(x: RationalLike) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
