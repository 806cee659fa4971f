from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np
import structlog

from fp_testing.errors import SpaceMismatchError
from fp_testing.measure.exact import ExactReal
from fp_testing.measure.spaces import (
    BERNOULLI_SPACE,
    REAL_LINE,
    OpenSet,
    ProductSpace,
    SampleSpace,
    _scalar,
)

logger = structlog.get_logger()

WEIGHT_TOL = 1e-12

Seed = int | Sequence[int] | np.random.SeedSequence


class MeasureKind(str, Enum):
    FINITE = "finite"
    BERNOULLI = "bernoulli"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Measure:
    """A probability measure: finite support, Bernoulli(p) or a Gaussian.

    Use the `finite`, `bernoulli`, `gaussian`, `dirac` and `mixture` constructors
    rather than building instances directly.
    """

    kind: MeasureKind
    space: SampleSpace
    atoms: tuple = ()
    weights: tuple[float, ...] = ()
    p: ExactReal | None = None
    mean: tuple[float, ...] = ()
    cov: tuple[tuple[float, ...], ...] = ()
    # Rational weights, set for empirical measures so their masses add up exactly.
    exact_weights: tuple[Fraction, ...] | None = field(default=None, compare=False)

    @classmethod
    def finite(
        cls,
        space: SampleSpace,
        atoms: Sequence,
        weights: Sequence[float | Fraction],
    ) -> Measure:
        atoms = [_atom_key(a) for a in atoms]
        if len(atoms) != len(weights):
            raise ValueError("atoms and weights must have equal length")
        if not atoms:
            raise ValueError("A finite-support measure needs at least one atom")
        if any(w < 0 for w in weights):
            raise ValueError("Weights must be non-negative")
        total = math.fsum(float(w) for w in weights)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"Weights must sum to 1, got {total!r}")
        outside = [a for a in atoms if not space.contains_point(a)]
        if outside:
            raise SpaceMismatchError(f"Atoms {outside[:3]} are not in {space}")

        exact = all(isinstance(w, (int, Fraction)) for w in weights)
        merged: dict = {}
        for a, w in zip(atoms, weights):
            merged[a] = merged.get(a, 0) + (Fraction(w) if exact else float(w))
        keys = tuple(merged)
        return cls(
            kind=MeasureKind.FINITE,
            space=space,
            atoms=keys,
            weights=tuple(float(merged[k]) for k in keys),
            exact_weights=tuple(merged[k] for k in keys) if exact else None,
        )

    @classmethod
    def bernoulli(cls, p: ExactReal | Fraction | float | str) -> Measure:
        p = ExactReal.of(p)
        if p < 0 or p > 1:
            raise ValueError(f"Bernoulli parameter must lie in [0, 1], got {p}")
        return cls(kind=MeasureKind.BERNOULLI, space=BERNOULLI_SPACE, p=p)

    @classmethod
    def gaussian(cls, mean: Sequence[float], cov: Sequence[Sequence[float]]) -> Measure:
        mean_arr = np.atleast_1d(np.asarray(mean, dtype=float))
        cov_arr = np.atleast_2d(np.asarray(cov, dtype=float))
        d = mean_arr.shape[0]
        if cov_arr.shape != (d, d):
            raise ValueError(f"Covariance must be {d}x{d}, got {cov_arr.shape}")
        if not np.allclose(cov_arr, cov_arr.T, atol=WEIGHT_TOL, rtol=0):
            raise ValueError("Covariance must be symmetric")
        if np.linalg.eigvalsh(cov_arr).min() < -WEIGHT_TOL:
            raise ValueError("Covariance must be positive semi-definite")
        space = REAL_LINE if d == 1 else ProductSpace((REAL_LINE,) * d)
        return cls(
            kind=MeasureKind.GAUSSIAN,
            space=space,
            mean=tuple(mean_arr.tolist()),
            cov=tuple(tuple(row) for row in cov_arr.tolist()),
        )

    @classmethod
    def dirac(cls, space: SampleSpace, x) -> Measure:
        return cls.finite(space, [x], [Fraction(1)])

    @classmethod
    def mixture(cls, weights: Sequence[float | Fraction], measures: Sequence[Measure]) -> Measure:
        if len(weights) != len(measures) or not measures:
            raise ValueError("mixture needs one weight per component")
        space = measures[0].space
        atoms, mixed = [], []
        for w, m in zip(weights, measures):
            if m.space != space:
                raise SpaceMismatchError("Mixture components must share a space")
            finite = m.as_finite()
            ws = finite.exact_weights if finite.exact_weights is not None else finite.weights
            for a, v in zip(finite.atoms, ws):
                atoms.append(a)
                if isinstance(w, (int, Fraction)) and isinstance(v, Fraction):
                    mixed.append(Fraction(w) * v)
                else:
                    mixed.append(float(w) * float(v))
        if not all(isinstance(v, Fraction) for v in mixed):
            mixed = [float(v) for v in mixed]
        return cls.finite(space, atoms, mixed)

    def as_finite(self) -> Measure:
        """Finite-support view; Bernoulli(p) becomes atoms {0, 1}."""
        if self.kind is MeasureKind.FINITE:
            return self
        if self.kind is MeasureKind.BERNOULLI:
            p = self.p
            if p.is_rational:
                return Measure.finite(BERNOULLI_SPACE, [0, 1], [1 - p.a, p.a])
            return Measure.finite(BERNOULLI_SPACE, [0, 1], [1 - float(p), float(p)])
        raise ValueError("Gaussian measures have no finite-support representation")

    def exact_mass(self, S: OpenSet) -> ExactReal | None:
        """Mass of S without rounding, when the representation allows it."""
        if S.space != self.space:
            raise SpaceMismatchError(f"Set lives on {S.space}, measure on {self.space}")
        if self.kind is MeasureKind.BERNOULLI:
            mass = ExactReal()
            if 1 in S.members:
                mass = mass + self.p
            if 0 in S.members:
                mass = mass + (1 - self.p)
            return mass
        if self.kind is MeasureKind.FINITE and self.exact_weights is not None:
            inside = S.contains(_as_array(self.atoms))
            return ExactReal(sum((w for w, ok in zip(self.exact_weights, inside) if ok), Fraction(0)))
        return None

    def marginal(self, axes: Sequence[int]) -> Measure:
        """Push-forward onto the given coordinates of a product space."""
        finite = self.as_finite()
        if not isinstance(self.space, ProductSpace):
            raise ValueError("Marginals are only defined on product spaces")
        axes = tuple(axes)
        target = self.space.project(axes)
        project = (lambda a: a[axes[0]]) if len(axes) == 1 else (lambda a: tuple(a[i] for i in axes))
        ws = finite.exact_weights if finite.exact_weights is not None else finite.weights
        return Measure.finite(target, [project(a) for a in finite.atoms], list(ws))

    def probability(self) -> float:
        """Bernoulli success probability, also for finite measures on {0, 1}."""
        if self.kind is MeasureKind.BERNOULLI:
            return float(self.p)
        if self.space != BERNOULLI_SPACE:
            raise SpaceMismatchError("Success probability needs a measure on {0, 1}")
        return math.fsum(w for a, w in zip(self.atoms, self.weights) if a == 1)

    def __str__(self):
        if self.kind is MeasureKind.BERNOULLI:
            return f"Bernoulli({self.p})"
        if self.kind is MeasureKind.GAUSSIAN:
            return f"Gaussian(mean={list(self.mean)})"
        parts = ", ".join(f"{a}: {w:.6g}" for a, w in zip(self.atoms, self.weights))
        return "{" + parts + "}"


@dataclass(frozen=True, eq=False)
class Sample:
    """n points drawn from a space, stored as a numpy array (one row per point)."""

    space: SampleSpace
    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points)
        object.__setattr__(self, "points", points)
        if points.shape[0] and not np.all(self.space.contains(points)):
            raise SpaceMismatchError(f"Sample has points outside {self.space}")

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    def __len__(self):
        return self.n

    def _view(self, points: np.ndarray) -> Sample:
        # sub-arrays of a validated sample need no re-validation
        view = object.__new__(Sample)
        object.__setattr__(view, "space", self.space)
        object.__setattr__(view, "points", points)
        return view

    def blocks(self, size: int, count: int) -> list[Sample]:
        return [self._view(self.points[j * size : (j + 1) * size]) for j in range(count)]

    def block_array(self, size: int, count: int) -> np.ndarray:
        """The first size*count points reshaped to one row per block."""
        used = self.points[: size * count]
        return used.reshape((count, size) + used.shape[1:])


def sample_iid(P: Measure, n: int, seed: Seed | np.random.Generator) -> Sample:
    """Draw n i.i.d. points from P; deterministic for a fixed seed."""
    if n < 0:
        raise ValueError(f"Sample size must be non-negative, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if P.kind is MeasureKind.BERNOULLI:
        points = (rng.random(n) < float(P.p)).astype(np.int64)
    elif P.kind is MeasureKind.GAUSSIAN:
        draws = rng.multivariate_normal(np.asarray(P.mean), np.asarray(P.cov), size=n)
        points = draws[:, 0] if len(P.mean) == 1 else draws
    else:
        weights = np.asarray(P.weights, dtype=float)
        if abs(weights.sum() - 1.0) > WEIGHT_TOL or np.any(weights < 0):
            raise ValueError("Cannot sample from a measure whose weights are not a distribution")
        idx = rng.choice(len(P.atoms), size=n, p=weights / weights.sum())
        points = _as_array(P.atoms)[idx]
    return Sample(P.space, points)


def empirical_measure(x: Sample) -> Measure:
    """Uniform weights 1/n on the observed points, merged by multiplicity."""
    if x.n == 0:
        raise ValueError("The empirical measure of an empty sample is undefined")
    pts = x.points
    if pts.dtype != object:
        if pts.ndim == 1:
            values, counts = np.unique(pts, return_counts=True)
            atoms = [v.item() for v in values]
        else:
            values, counts = np.unique(pts, axis=0, return_counts=True)
            atoms = [tuple(v.tolist()) for v in values]
        pairs = zip(atoms, counts.tolist())
    else:
        pairs = Counter(_atom_key(p) for p in pts).items()
    atoms, weights = [], []
    for a, c in pairs:
        atoms.append(a)
        weights.append(Fraction(c, x.n))
    return Measure.finite(x.space, atoms, weights)


def measure_of_set(P: Measure, S: OpenSet) -> float:
    """P(S) with exact atom-in-set membership."""
    if S.space != P.space:
        raise SpaceMismatchError(f"Set lives on {S.space}, measure on {P.space}")
    exact = P.exact_mass(S)
    if exact is not None:
        return float(exact)
    if P.kind is MeasureKind.GAUSSIAN:
        raise ValueError("measure_of_set needs a finite-support or Bernoulli measure")
    inside = S.contains(_as_array(P.atoms))
    return math.fsum(w for w, ok in zip(P.weights, inside) if ok)


def _atom_key(a) -> Hashable:
    a = _scalar(a)
    if isinstance(a, np.ndarray):
        return tuple(_scalar(v) for v in a.tolist())
    if isinstance(a, list | tuple):
        return tuple(_scalar(v) for v in a)
    return a


def _as_array(atoms: Sequence) -> np.ndarray:
    if atoms and isinstance(atoms[0], tuple):
        arr = np.array(atoms)
        if arr.dtype != object and arr.ndim == 2:
            return arr
        out = np.empty(len(atoms), dtype=object)
        out[:] = list(atoms)
        return out
    if any(isinstance(a, Fraction) for a in atoms):
        out = np.empty(len(atoms), dtype=object)
        out[:] = list(atoms)
        return out
    return np.array(atoms)
