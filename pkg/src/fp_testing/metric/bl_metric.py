"""Bounded-Lipschitz distance between finite-support measures.

d_BL(P, Q) = sup { sum_i f_i (p_i - q_i) : |f_i| <= 1, f_i - f_j <= d(x_i, x_j) }
over the pooled support x_1..x_m, solved as a linear program with HiGHS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
import structlog
from scipy.optimize import linprog
from scipy.sparse import csc_matrix

from fp_testing.errors import SolverError, SpaceMismatchError
from fp_testing.measure import BERNOULLI_SPACE, ExactReal, Measure
from fp_testing.measure.measures import WEIGHT_TOL

if TYPE_CHECKING:
    from fp_testing.hypotheses import HypothesisRegion

logger = structlog.get_logger()

MAX_SUPPORT = 500
MAX_BRUTEFORCE_SUPPORT = 4
MAX_GRID_POINTS = 5_000_000
FEASIBILITY_TOL = 1e-12

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


@dataclass(frozen=True, eq=False)
class BlProblem:
    """Pooled support, weight differences p_i - q_i and pairwise distances."""

    points: tuple
    diff: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        if len(self.points) < 1:
            raise ValueError("BL problem needs at least one support point")
        if abs(math.fsum(self.diff)) > 2 * WEIGHT_TOL:
            raise ValueError("Weight differences must sum to zero")

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.diff)

    @classmethod
    def pool(cls, P: Measure, Q: Measure) -> BlProblem:
        if P.space != Q.space:
            raise SpaceMismatchError(f"Cannot compare measures on {P.space} and {Q.space}")
        P, Q = P.as_finite(), Q.as_finite()
        index: dict = {}
        for a in P.atoms + Q.atoms:
            index.setdefault(a, len(index))
        diff = np.zeros(len(index))
        for a, w in zip(P.atoms, P.weights):
            diff[index[a]] += w
        for a, w in zip(Q.atoms, Q.weights):
            diff[index[a]] -= w
        points = tuple(index)
        return cls(points=points, diff=diff, distances=P.space.distance_matrix(points))


def d_bl(P: Measure, Q: Measure) -> float:
    """Bounded-Lipschitz distance via the LP dual; result in [0, 2]."""
    problem = BlProblem.pool(P, Q)
    if problem.is_trivial:
        return 0.0
    if problem.m > MAX_SUPPORT:
        raise ValueError(f"Pooled support of {problem.m} points exceeds {MAX_SUPPORT}")
    return _solve(problem)


def _solve(problem: BlProblem) -> float:
    m, D = problem.m, problem.distances
    # One row per ordered pair whose Lipschitz constraint can bind; |f| <= 1 makes d >= 2 slack.
    i_idx, j_idx = np.nonzero((D < 2.0) & ~np.eye(m, dtype=bool))
    if i_idx.size == 0:
        return float(min(2.0, np.abs(problem.diff).sum()))
    rows = np.arange(i_idx.size)
    A_ub = csc_matrix(
        (
            np.concatenate([np.ones(i_idx.size), -np.ones(j_idx.size)]),
            (np.concatenate([rows, rows]), np.concatenate([i_idx, j_idx])),
        ),
        shape=(i_idx.size, m),
    )
    res = linprog(
        -problem.diff,
        A_ub=A_ub,
        b_ub=D[i_idx, j_idx],
        bounds=(-1.0, 1.0),
        method="highs",
        options=_HIGHS_OPTIONS,
    )
    if res.status != 0:
        logger.error("BL linear program failed", status=res.status, message=res.message, m=m)
        raise SolverError(f"HiGHS did not reach optimality: {res.message}")
    return float(min(2.0, max(0.0, -res.fun)))


def default_resolution(m: int) -> float:
    if m <= 2:
        return 1e-3
    if m == 3:
        return 1 / 100
    return 1 / 50


def d_bl_bruteforce(P: Measure, Q: Measure, resolution: float | None = None) -> float:
    """Grid-search oracle for d_bl on at most four support points.

    f ranges over the grid -1 + k*h with every Lipschitz constraint widened to
    |f_i - f_j| <= d(x_i, x_j) + h, so the LP optimiser rounded to the grid stays
    feasible. The first m-1 coordinates are enumerated and the last one is set to its
    best feasible grid value. For any distances the result lies within
    (h / 2) * sum|p_i - q_i| of d_bl(P, Q), on either side.
    """
    problem = BlProblem.pool(P, Q)
    m = problem.m
    if m > MAX_BRUTEFORCE_SUPPORT:
        raise ValueError(f"Brute force supports at most {MAX_BRUTEFORCE_SUPPORT} points, got {m}")
    if problem.is_trivial:
        return 0.0
    h = default_resolution(m) if resolution is None else float(resolution)
    steps = round(2.0 / h)
    if steps < 1 or abs(steps * h - 2.0) > 1e-9:
        raise ValueError(f"Resolution must divide 2, got {h}")
    if (steps + 1) ** (m - 1) > MAX_GRID_POINTS:
        raise ValueError(f"Grid of {(steps + 1) ** (m - 1)} points is too large; coarsen the resolution")
    grid = -1.0 + h * np.arange(steps + 1)
    c = problem.diff
    if m == 1:
        return 0.0
    # widened distances; the diagonal stays 0
    D = problem.distances + h * (1.0 - np.eye(m))

    mesh = np.meshgrid(*([grid] * (m - 1)), indexing="ij")
    F = np.stack([g.ravel() for g in mesh], axis=1)
    feasible = np.ones(F.shape[0], dtype=bool)
    for i in range(m - 1):
        for j in range(i + 1, m - 1):
            feasible &= np.abs(F[:, i] - F[:, j]) <= D[i, j] + FEASIBILITY_TOL
    F = F[feasible]

    last = m - 1
    lo = np.maximum(-1.0, np.max(F - D[:last, last], axis=1))
    hi = np.minimum(1.0, np.min(F + D[:last, last], axis=1))
    lo_k = np.ceil((lo + 1.0) / h - FEASIBILITY_TOL / h)
    hi_k = np.floor((hi + 1.0) / h + FEASIBILITY_TOL / h)
    ok = lo_k <= hi_k
    if c[last] > 0:
        f_last = -1.0 + h * hi_k
    elif c[last] < 0:
        f_last = -1.0 + h * lo_k
    else:
        f_last = np.zeros_like(lo)
    values = F @ c[:last] + c[last] * f_last
    return float(min(2.0, max(0.0, values[ok].max())))


def d_tv(P: Measure, Q: Measure) -> float:
    """Total variation sup_A |P(A) - Q(A)| for finite-support measures."""
    problem = BlProblem.pool(P, Q)
    return 0.5 * float(np.abs(problem.diff).sum())


def _bernoulli_scale() -> float:
    return min(2.0, BERNOULLI_SPACE.distance(0, 1))


def bernoulli_distance(p: float | ExactReal, q: float | ExactReal) -> float:
    """Closed form d_BL(Bern(p), Bern(q)) = |p - q| * min(2, d(0, 1))."""
    return abs(float(p) - float(q)) * _bernoulli_scale()


def d_bl_to_set(P: Measure, H: HypothesisRegion, resolution: float = 1e-3) -> float:
    """Distance from P to a hypothesis given as a Bernoulli parameter set or a finite list."""
    if H.measures is not None:
        if not H.measures:
            raise ValueError("Distance to an empty measure list is undefined")
        return min(d_bl(P, M) for M in H.measures)
    if H.parameter_set is not None and H.space == BERNOULLI_SPACE:
        if P.space != BERNOULLI_SPACE:
            raise SpaceMismatchError(f"Measure lives on {P.space}, hypothesis on {BERNOULLI_SPACE}")
        p_hat = P.probability()
        closed_form = H.parameter_set.distance(p_hat)
        if closed_form is not None:
            return closed_form * _bernoulli_scale()
        return _grid_distance(p_hat, H, resolution)
    raise ValueError("unsupported hypothesis representation")


def _grid_distance(p_hat: float, H: HypothesisRegion, resolution: float) -> float:
    steps = round(1.0 / resolution)
    candidates = [Fraction(k, steps) for k in range(steps + 1)]
    members = [float(g) for g in candidates if H.parameter_set.contains(ExactReal(g))]
    if not members:
        raise ValueError(f"No grid point of resolution {resolution} lies in {H.name}")
    gaps = np.abs(np.asarray(members) - p_hat)
    best = int(np.argmin(gaps))  # first minimiser is the smallest parameter
    logger.info(
        "Grid minimisation for hypothesis distance",
        hypothesis=H.name,
        resolution=resolution,
        nearest=members[best],
    )
    return float(gaps[best]) * _bernoulli_scale()


def region_separation(H0: HypothesisRegion, H1: HypothesisRegion) -> float:
    """Set-to-set BL distance inf { d_bl(P, Q) : P in H0, Q in H1 }."""
    if H0.measures is not None and H1.measures is not None:
        return min(d_bl(P, Q) for P in H0.measures for Q in H1.measures)
    if H0.parameter_set is not None and H1.parameter_set is not None and H0.space == BERNOULLI_SPACE:
        return H0.parameter_set.gap(H1.parameter_set) * _bernoulli_scale()
    raise ValueError("unsupported hypothesis representation")
