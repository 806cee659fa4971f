"""Metric sample spaces and the exact open-set calculus used by the subbasis tests.

Real spaces keep interval endpoints as `Fraction`s so boundary membership is decided
exactly. Sample points may be floats; a float that rounds onto an endpoint is compared
through its exact rational value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from fp_testing.errors import SpaceMismatchError

Endpoint = Fraction | None  # None is -inf on the left, +inf on the right

_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteSpace:
    """Finitely many labelled points with a symmetric distance table."""

    points: tuple[Hashable, ...]
    distances: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        m = len(self.points)
        if m == 0:
            raise ValueError("A discrete space needs at least one point")
        if len(set(self.points)) != m:
            raise ValueError("Point labels must be distinct")
        d = np.asarray(self.distances, dtype=float)
        if d.shape != (m, m):
            raise ValueError(f"Distance table must be {m}x{m}, got {d.shape}")
        if np.any(d < 0) or np.any(np.diag(d) != 0):
            raise ValueError("Distances must be non-negative with zero diagonal")
        if not np.allclose(d, d.T, atol=_TOL, rtol=0):
            raise ValueError("Distance table must be symmetric")
        off_diagonal = d[~np.eye(m, dtype=bool)]
        if np.any(off_diagonal <= 0):
            raise ValueError("Distinct points must be at positive distance")
        # d[i, k] <= d[i, j] + d[j, k]
        if np.any(d[:, None, :] > d[:, :, None] + d[None, :, :] + _TOL):
            raise ValueError("Distance table violates the triangle inequality")

    @classmethod
    def uniform(cls, points: Sequence[Hashable], distance: float = 1.0) -> DiscreteSpace:
        m = len(points)
        table = tuple(
            tuple(0.0 if i == j else float(distance) for j in range(m)) for i in range(m)
        )
        return cls(points=tuple(points), distances=table)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.distances, dtype=float)

    @cached_property
    def index(self) -> dict[Hashable, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def min_separation(self) -> float:
        m = len(self.points)
        if m == 1:
            return math.inf
        return float(self.matrix[~np.eye(m, dtype=bool)].min())

    @cached_property
    def _scalar_labels(self) -> bool:
        return all(isinstance(p, (int, float, str)) for p in self.points)

    def contains_point(self, x) -> bool:
        try:
            return _scalar(x) in self.index
        except TypeError:
            return False

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points)
        if self._scalar_labels and points.ndim == 1:
            return np.isin(points, np.asarray(self.points))
        return np.array([self.contains_point(x) for x in points], dtype=bool)

    def distance(self, x, y) -> float:
        return float(self.matrix[self.index[_scalar(x)], self.index[_scalar(y)]])

    def distance_matrix(self, points: Sequence) -> np.ndarray:
        idx = np.array([self.index[_scalar(p)] for p in points], dtype=int)
        return self.matrix[np.ix_(idx, idx)]

    def __str__(self):
        return "{" + ", ".join(map(str, self.points)) + "}"


@dataclass(frozen=True)
class RealSpace:
    """The interval [lo, hi] of the real line; a None end is unbounded."""

    lo: Endpoint = None
    hi: Endpoint = None

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo is not None and self.hi is not None and self.lo >= self.hi:
            raise ValueError(f"Degenerate ambient interval [{self.lo}, {self.hi}]")

    @property
    def min_separation(self) -> float:
        return 0.0

    def contains_point(self, x) -> bool:
        x = _scalar(x)
        if isinstance(x, bool) or not isinstance(x, (int, float, Fraction)):
            return False
        if isinstance(x, float) and not math.isfinite(x):
            return False
        return (self.lo is None or x >= self.lo) and (self.hi is None or x <= self.hi)

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points)
        if points.dtype == object or points.ndim != 1:
            return np.array([self.contains_point(x) for x in points], dtype=bool)
        mask = np.isfinite(points.astype(float))
        if self.lo is not None:
            mask &= exact_ge(points, self.lo)
        if self.hi is not None:
            mask &= exact_le(points, self.hi)
        return mask

    def distance(self, x, y) -> float:
        return float(abs(_scalar(x) - _scalar(y)))

    def distance_matrix(self, points: Sequence) -> np.ndarray:
        v = np.array([float(_scalar(p)) for p in points], dtype=float)
        return np.abs(v[:, None] - v[None, :])

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"[{lo}, {hi}]"


@dataclass(frozen=True)
class ProductSpace:
    """Finite product of spaces with the sum metric d = d_1 + ... + d_k."""

    factors: tuple[DiscreteSpace | RealSpace, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise ValueError("A product space needs at least two factors")
        if any(isinstance(f, ProductSpace) for f in self.factors):
            raise ValueError("Nested product spaces are not supported; flatten the factors")

    @property
    def dim(self) -> int:
        return len(self.factors)

    @cached_property
    def min_separation(self) -> float:
        return min(f.min_separation for f in self.factors)

    def project(self, axes: Sequence[int]) -> SampleSpace:
        axes = tuple(axes)
        if len(axes) == 1:
            return self.factors[axes[0]]
        return ProductSpace(tuple(self.factors[a] for a in axes))

    def contains_point(self, x) -> bool:
        try:
            coords = tuple(x)
        except TypeError:
            return False
        return len(coords) == self.dim and all(
            f.contains_point(c) for f, c in zip(self.factors, coords)
        )

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points)
        if points.ndim == 2 and points.shape[1] == self.dim and points.dtype != object:
            mask = np.ones(points.shape[0], dtype=bool)
            for axis, factor in enumerate(self.factors):
                mask &= factor.contains(points[:, axis])
            return mask
        return np.array([self.contains_point(p) for p in points], dtype=bool)

    def distance(self, x, y) -> float:
        return float(sum(f.distance(a, b) for f, a, b in zip(self.factors, x, y)))

    def distance_matrix(self, points: Sequence) -> np.ndarray:
        total = np.zeros((len(points), len(points)))
        for axis, factor in enumerate(self.factors):
            total += factor.distance_matrix([p[axis] for p in points])
        return total

    def __str__(self):
        return " x ".join(map(str, self.factors))


SampleSpace = DiscreteSpace | RealSpace | ProductSpace

BERNOULLI_SPACE = DiscreteSpace.uniform((0, 1))
UNIT_INTERVAL = RealSpace(Fraction(0), Fraction(1))
REAL_LINE = RealSpace()


def require_same_space(expected: SampleSpace, actual: SampleSpace, what: str = "object"):
    if expected != actual:
        raise SpaceMismatchError(f"{what} lives on {actual}, expected {expected}")


def _compare(points, bound: Fraction, op) -> np.ndarray:
    points = np.asarray(points)
    if points.dtype == object:
        return np.array([op(_scalar(x), bound) for x in points], dtype=bool)
    fb = float(bound)
    result = op(points, fb)
    ties = points == fb
    if np.any(ties):
        result = np.where(ties, op(Fraction(fb), bound), result)
    return np.asarray(result, dtype=bool)


def exact_gt(points, bound: Fraction) -> np.ndarray:
    return _compare(points, bound, lambda x, b: x > b)


def exact_ge(points, bound: Fraction) -> np.ndarray:
    return _compare(points, bound, lambda x, b: x >= b)


def exact_lt(points, bound: Fraction) -> np.ndarray:
    return _compare(points, bound, lambda x, b: x < b)


def exact_le(points, bound: Fraction) -> np.ndarray:
    return _compare(points, bound, lambda x, b: x <= b)


@dataclass(frozen=True, slots=True)
class Interval:
    lo: Endpoint
    hi: Endpoint
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", Fraction(self.hi))
        if (self.lo is None and self.lo_closed) or (self.hi is None and self.hi_closed):
            raise ValueError("Infinite endpoints cannot be closed")
        if not _nonempty(self.lo, self.hi, self.lo_closed, self.hi_closed):
            raise ValueError(f"Empty interval {self}")

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points)
        mask = np.ones(points.shape, dtype=bool)
        if self.lo is not None:
            mask &= exact_ge(points, self.lo) if self.lo_closed else exact_gt(points, self.lo)
        if self.hi is not None:
            mask &= exact_le(points, self.hi) if self.hi_closed else exact_lt(points, self.hi)
        return mask

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{'[' if self.lo_closed else '('}{lo}, {hi}{']' if self.hi_closed else ')'}"


def _nonempty(lo, hi, lo_closed, hi_closed) -> bool:
    if lo is None or hi is None:
        return True
    return lo < hi or (lo == hi and lo_closed and hi_closed)


def _make_interval(lo, hi, lo_closed, hi_closed) -> Interval | None:
    if not _nonempty(lo, hi, lo_closed, hi_closed):
        return None
    return Interval(lo, hi, lo_closed, hi_closed)


def _merge(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort and merge overlapping or touching intervals."""

    def key(iv: Interval):
        return (-math.inf if iv.lo is None else iv.lo, not iv.lo_closed)

    merged: list[Interval] = []
    for iv in sorted(intervals, key=key):
        if not merged:
            merged.append(iv)
            continue
        cur = merged[-1]
        if cur.hi is None:
            continue
        touches = (
            iv.lo is None
            or iv.lo < cur.hi
            or (iv.lo == cur.hi and (cur.hi_closed or iv.lo_closed))
        )
        if not touches:
            merged.append(iv)
            continue
        if iv.hi is None:
            hi, hi_closed = None, False
        elif iv.hi > cur.hi:
            hi, hi_closed = iv.hi, iv.hi_closed
        elif iv.hi == cur.hi:
            hi, hi_closed = cur.hi, cur.hi_closed or iv.hi_closed
        else:
            hi, hi_closed = cur.hi, cur.hi_closed
        merged[-1] = Interval(cur.lo, hi, cur.lo_closed, hi_closed)
    return tuple(merged)


@dataclass(frozen=True)
class OpenSet:
    """An open subset of a discrete or real sample space.

    Discrete spaces use `members`. Real spaces use `intervals`, kept sorted,
    disjoint and open relative to the ambient interval (a closed end is only
    allowed at an ambient endpoint).
    """

    space: DiscreteSpace | RealSpace
    members: frozenset = frozenset()
    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        if isinstance(self.space, DiscreteSpace):
            if self.intervals:
                raise ValueError("Discrete open sets are given by members, not intervals")
            unknown = [m for m in self.members if not self.space.contains_point(m)]
            if unknown:
                raise SpaceMismatchError(f"Points {unknown} are not in {self.space}")
        elif isinstance(self.space, RealSpace):
            if self.members:
                raise ValueError("Real open sets are given by intervals, not members")
            clipped = (self._clip(iv) for iv in self.intervals)
            normalized = _merge(iv for iv in clipped if iv is not None)
            for iv in normalized:
                lo_bad = iv.lo_closed and iv.lo != self.space.lo
                hi_bad = iv.hi_closed and iv.hi != self.space.hi
                if lo_bad or hi_bad:
                    raise ValueError(f"Interval {iv} is not open in {self.space}")
            object.__setattr__(self, "intervals", normalized)
        else:
            raise SpaceMismatchError("Open sets are defined on discrete or real spaces only")

    @classmethod
    def discrete(cls, space: DiscreteSpace, members: Iterable) -> OpenSet:
        return cls(space=space, members=frozenset(members))

    @classmethod
    def real(cls, space: RealSpace, intervals: Iterable[Interval]) -> OpenSet:
        return cls(space=space, intervals=tuple(intervals))

    @classmethod
    def open_interval(cls, space: RealSpace, lo, hi) -> OpenSet:
        lo = None if lo is None else Fraction(lo)
        hi = None if hi is None else Fraction(hi)
        return cls.real(space, [Interval(lo, hi)])

    @classmethod
    def empty(cls, space: DiscreteSpace | RealSpace) -> OpenSet:
        return cls(space=space)

    @classmethod
    def whole(cls, space: DiscreteSpace | RealSpace) -> OpenSet:
        if isinstance(space, DiscreteSpace):
            return cls.discrete(space, space.points)
        ends = Interval(space.lo, space.hi, space.lo is not None, space.hi is not None)
        return cls.real(space, [ends])

    @property
    def is_empty(self) -> bool:
        return not self.members and not self.intervals

    def __str__(self):
        if isinstance(self.space, DiscreteSpace):
            return "{" + ", ".join(sorted(map(str, self.members))) + "}"
        return " u ".join(map(str, self.intervals)) or "{}"

    def _clip(self, iv: Interval) -> Interval | None:
        lo, lo_closed, hi, hi_closed = iv.lo, iv.lo_closed, iv.hi, iv.hi_closed
        if self.space.lo is not None and (lo is None or lo < self.space.lo):
            lo, lo_closed = self.space.lo, True
        if self.space.hi is not None and (hi is None or hi > self.space.hi):
            hi, hi_closed = self.space.hi, True
        return _make_interval(lo, hi, lo_closed, hi_closed)

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points)
        if isinstance(self.space, DiscreteSpace):
            if not self.members:
                return np.zeros(points.shape[:1], dtype=bool)
            if self.space._scalar_labels and points.ndim == 1:
                return np.isin(points, np.asarray(list(self.members)))
            return np.array([_scalar(p) in self.members for p in points], dtype=bool)
        mask = np.zeros(points.shape, dtype=bool)
        for iv in self.intervals:
            mask |= iv.contains(points)
        return mask

    def boundary_points(self) -> tuple[Fraction, ...]:
        if isinstance(self.space, DiscreteSpace):
            return ()
        ends = set()
        for iv in self.intervals:
            # an ambient endpoint is a boundary point only when the set leaves it out
            if iv.lo is not None and not (iv.lo == self.space.lo and iv.lo_closed):
                ends.add(iv.lo)
            if iv.hi is not None and not (iv.hi == self.space.hi and iv.hi_closed):
                ends.add(iv.hi)
        return tuple(sorted(ends))

    def boundary_distance(self, points) -> np.ndarray:
        """Distance of each point to the boundary of the set (inf when there is none)."""
        points = np.asarray(points)
        n = points.shape[0]
        if isinstance(self.space, DiscreteSpace):
            return np.full(n, self.space.min_separation)
        ends = self.boundary_points()
        if not ends:
            return np.full(n, math.inf)
        b = np.array([float(e) for e in ends])
        x = np.array([float(_scalar(p)) for p in points]) if points.dtype == object else points
        return np.min(np.abs(x.astype(float)[:, None] - b[None, :]), axis=1)

    def stability_radius(self, points) -> float:
        """Largest r such that moving each point by less than r keeps its membership."""
        if len(points) == 0:
            return math.inf
        return float(np.min(self.boundary_distance(points)))


def _closed_complement(S: OpenSet) -> list[Interval]:
    """Components of the complement of a real open set, closed relative to the space."""
    space = S.space
    components: list[Interval] = []
    lo, lo_closed = space.lo, space.lo is not None
    for iv in S.intervals:
        if iv.lo is not None:
            gap = _make_interval(lo, iv.lo, lo_closed, not iv.lo_closed)
            if gap is not None:
                components.append(gap)
        if iv.hi is None:
            return components
        lo, lo_closed = iv.hi, not iv.hi_closed
    gap = _make_interval(lo, space.hi, lo_closed, space.hi is not None)
    if gap is not None:
        components.append(gap)
    return components


def neighborhood_of_complement(A: OpenSet, r) -> OpenSet:
    """Open r-neighbourhood of the closed complement of A."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError(f"Neighbourhood radius must be positive, got {r}")
    space = A.space
    if isinstance(space, DiscreteSpace):
        outside = [i for i, p in enumerate(space.points) if p not in A.members]
        if not outside:
            return OpenSet.empty(space)
        near = space.matrix[:, outside].min(axis=1) < float(r)
        return OpenSet.discrete(space, (p for p, ok in zip(space.points, near) if ok))
    grown = []
    for comp in _closed_complement(A):
        lo = None if comp.lo is None else comp.lo - r
        hi = None if comp.hi is None else comp.hi + r
        grown.append(Interval(lo, hi))
    return OpenSet.real(space, grown)


def exterior(S: OpenSet) -> OpenSet:
    """Interior of the complement of S."""
    space = S.space
    if isinstance(space, DiscreteSpace):
        return OpenSet.discrete(space, (p for p in space.points if p not in S.members))
    inner = []
    for comp in _closed_complement(S):
        lo_closed = comp.lo_closed and comp.lo == space.lo
        hi_closed = comp.hi_closed and comp.hi == space.hi
        if comp.lo is not None and comp.hi is not None and comp.lo == comp.hi:
            continue
        inner.append(Interval(comp.lo, comp.hi, lo_closed, hi_closed))
    return OpenSet.real(space, inner)


def _scalar(x):
    if isinstance(x, np.generic):
        return x.item()
    return x
