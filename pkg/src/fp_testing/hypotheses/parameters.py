"""Bernoulli parameter sets with exact membership and closed-form distances."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from math import gcd
from typing import Callable, Iterator

from fp_testing.measure import ExactReal, Interval

_SQRT2_MINUS_ONE = ExactReal(-1, 1)
_SQRT2_MINUS_TWO = ExactReal(-2, 1)


def farey_rationals() -> Iterator[Fraction]:
    """Q n [0, 1] by denominator, then numerator: 0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, ..."""
    yield Fraction(0)
    yield Fraction(1)
    for q in count(2):
        for p in range(1, q):
            if gcd(p, q) == 1:
                yield Fraction(p, q)


def shifted_rationals() -> Iterator[ExactReal]:
    """(Q + sqrt2) n [0, 1], one value per rational r in [0, 1), in Farey order of r."""
    for r in farey_rationals():
        if r == 1:
            continue
        s = _SQRT2_MINUS_ONE + r
        yield s if s <= 1 else _SQRT2_MINUS_TWO + r


class ParameterSet:
    """A subset of [0, 1]; subclasses define membership and, if known, the closure."""

    description = "parameter set"

    def contains(self, p: ExactReal) -> bool:
        raise NotImplementedError

    def closure(self) -> tuple[tuple[Fraction, Fraction], ...] | None:
        return None

    def distance(self, x: float) -> float | None:
        """Distance from x to the set, or None when no closed form is available."""
        closure = self.closure()
        if closure is None:
            return None
        return min(max(float(lo) - x, x - float(hi), 0.0) for lo, hi in closure)

    def gap(self, other: ParameterSet) -> float:
        mine, theirs = self.closure(), other.closure()
        if mine is None or theirs is None:
            raise ValueError("unsupported hypothesis representation")
        return min(
            max(float(a_lo - b_hi), float(b_lo - a_hi), 0.0)
            for a_lo, a_hi in mine
            for b_lo, b_hi in theirs
        )

    def __str__(self):
        return self.description


@dataclass(frozen=True)
class IntervalUnion(ParameterSet):
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        for iv in self.intervals:
            if iv.lo is None or iv.hi is None or iv.lo < 0 or iv.hi > 1:
                raise ValueError(f"Parameter interval {iv} must lie in [0, 1]")

    @classmethod
    def closed(cls, lo, hi) -> IntervalUnion:
        return cls((Interval(Fraction(lo), Fraction(hi), True, True),))

    @classmethod
    def of(cls, lo, hi, lo_closed: bool, hi_closed: bool) -> IntervalUnion:
        return cls((Interval(Fraction(lo), Fraction(hi), lo_closed, hi_closed),))

    @property
    def description(self) -> str:
        return " u ".join(map(str, self.intervals))

    def contains(self, p: ExactReal) -> bool:
        p = ExactReal.of(p)
        for iv in self.intervals:
            above = p >= iv.lo if iv.lo_closed else p > iv.lo
            below = p <= iv.hi if iv.hi_closed else p < iv.hi
            if above and below:
                return True
        return False

    def closure(self):
        return tuple((iv.lo, iv.hi) for iv in self.intervals)


class RationalPoints(ParameterSet):
    description = "Q n [0, 1]"

    def contains(self, p: ExactReal) -> bool:
        p = ExactReal.of(p)
        return p.is_rational and 0 <= p <= 1

    def closure(self):
        return ((Fraction(0), Fraction(1)),)

    def enumerate(self) -> Iterator[Fraction]:
        return farey_rationals()

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(type(self))


class ShiftedRationalPoints(ParameterSet):
    description = "(Q + sqrt2) n [0, 1]"

    def contains(self, p: ExactReal) -> bool:
        p = ExactReal.of(p)
        return p.b == 1 and 0 <= p <= 1

    def closure(self):
        return ((Fraction(0), Fraction(1)),)

    def enumerate(self) -> Iterator[ExactReal]:
        return shifted_rationals()

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(type(self))


class IrrationalPoints(ParameterSet):
    description = "[0, 1] \\ Q"

    def contains(self, p: ExactReal) -> bool:
        p = ExactReal.of(p)
        return not p.is_rational and 0 <= p <= 1

    def closure(self):
        return ((Fraction(0), Fraction(1)),)

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(type(self))


@dataclass(frozen=True)
class PredicateSet(ParameterSet):
    """Membership given by a predicate only; distances fall back to grid search."""

    predicate: Callable[[ExactReal], bool]
    description: str = "custom parameter set"

    def contains(self, p: ExactReal) -> bool:
        return bool(self.predicate(ExactReal.of(p)))
