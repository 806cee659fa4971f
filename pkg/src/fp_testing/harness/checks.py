"""Oracle batches: d_BL against brute force and closed forms, and the CI benchmarks."""

from __future__ import annotations

from fractions import Fraction
from typing import Literal

import numpy as np
import structlog
from pydantic import BaseModel

from fp_testing.errors import ConfigError
from fp_testing.harness.simulation import SimResult, frequency_row, verdict_counts
from fp_testing.kernels import ci_distance, ci_test, densify_ci
from fp_testing.measure import (
    BERNOULLI_SPACE,
    REAL_LINE,
    UNIT_INTERVAL,
    DiscreteSpace,
    Measure,
    ProductSpace,
    Sample,
    SampleSpace,
    sample_iid,
)
from fp_testing.metric import bernoulli_distance, d_bl, d_bl_bruteforce, default_resolution

logger = structlog.get_logger()

CiMode = Literal["independent", "dependent", "densify"]

CI_SPACE = ProductSpace((BERNOULLI_SPACE, BERNOULLI_SPACE, BERNOULLI_SPACE))
DENSIFY_SPACE = ProductSpace((BERNOULLI_SPACE, BERNOULLI_SPACE, UNIT_INTERVAL))
DEFAULT_INDEPENDENT_EPSILON = 0.2


class BlCheckReport(BaseModel):
    instances: int
    tol: float
    oracle_violations: int = 0
    max_oracle_gap: float = 0.0
    bernoulli_violations: int = 0
    axiom_violations: int = 0
    identity_violations: int = 0

    @property
    def violations(self) -> int:
        return (
            self.oracle_violations
            + self.bernoulli_violations
            + self.axiom_violations
            + self.identity_violations
        )

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _line_space(rng: np.random.Generator, m: int, h: float) -> DiscreteSpace:
    """m points on a line at multiples of h, so every distance is a multiple of h."""
    slots = int(round(1.5 / h))
    ticks = np.sort(rng.choice(slots + 1, size=m, replace=False))
    table = tuple(tuple(abs(int(a) - int(b)) * h for b in ticks) for a in ticks)
    return DiscreteSpace(points=tuple(range(m)), distances=table)


def _line_points(rng: np.random.Generator, m: int) -> list[float]:
    """m distinct points of [0, 1.5] at arbitrary float positions."""
    return sorted(set(rng.uniform(0.0, 1.5, size=m).tolist()))


def _random_measure(rng: np.random.Generator, space: SampleSpace, support: list) -> Measure:
    weights = rng.dirichlet(np.ones(len(support)))
    weights /= weights.sum()
    return Measure.finite(space, support, weights.tolist())


def bl_check(count: int, tol: float = 1e-9, seed: int = 0) -> BlCheckReport:
    """LP against the brute-force oracle, Bernoulli closed form and metric axioms."""
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    rng = np.random.default_rng(seed)
    report = BlCheckReport(instances=count, tol=tol)

    for i in range(count):
        m = int(rng.integers(2, 5))
        h = default_resolution(m)
        # even instances sit on a grid-aligned discrete line, odd ones anywhere on the real line
        if i % 2 == 0:
            space = _line_space(rng, m, h)
            support = list(space.points)
        else:
            space = REAL_LINE
            support = _line_points(rng, m)
        P, Q = _random_measure(rng, space, support), _random_measure(rng, space, support)
        lp, brute = d_bl(P, Q), d_bl_bruteforce(P, Q, h)
        l1 = sum(abs(a - b) for a, b in zip(P.weights, Q.weights))
        gap = lp - brute
        report.max_oracle_gap = max(report.max_oracle_gap, abs(gap))
        if abs(gap) > h * l1 / 2 + tol:
            report.oracle_violations += 1
            logger.warning(
                "LP and brute force disagree", lp=lp, brute=brute, m=m, resolution=h, space=str(space)
            )

        p, q = rng.random(2)
        got = d_bl(Measure.bernoulli(float(p)), Measure.bernoulli(float(q)))
        if abs(got - bernoulli_distance(float(p), float(q))) > tol:
            report.bernoulli_violations += 1
            logger.warning("Bernoulli closed form mismatch", p=p, q=q, got=got)

        R = _random_measure(rng, space, support)
        d_pq, d_qp = d_bl(P, Q), d_bl(Q, P)
        d_pr, d_rq = d_bl(P, R), d_bl(R, Q)
        if (
            abs(d_pq - d_qp) > tol
            or d_pq > d_pr + d_rq + tol
            or not -tol <= d_pq <= 2 + tol
        ):
            report.axiom_violations += 1
            logger.warning("Metric axiom violated", d_pq=d_pq, d_qp=d_qp, d_pr=d_pr, d_rq=d_rq)
        if d_bl(P, P) != 0.0:
            report.identity_violations += 1

    logger.info(
        "Finished BL oracle checks",
        instances=count,
        violations=report.violations,
        max_oracle_gap=report.max_oracle_gap,
    )
    return report


def independent_fixture() -> Measure:
    atoms = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    return Measure.finite(CI_SPACE, atoms, [Fraction(1, 8)] * 8)


def dependent_fixture() -> Measure:
    """X = Y a fair coin and Z constant."""
    return Measure.finite(CI_SPACE, [(0, 0, 0), (1, 1, 0)], [Fraction(1, 2)] * 2)


def random_densify_fixture(rng: np.random.Generator) -> Measure:
    """Up to eight atoms on {0,1}^2 x [0, 1] whose z values collide on a coarse grid."""
    k = int(rng.integers(2, 9))
    counts = rng.integers(1, 10, size=k)
    total = int(counts.sum())
    zs = [Fraction(int(v), 4) for v in rng.integers(0, 5, size=k)]
    atoms = [(int(rng.integers(2)), int(rng.integers(2)), z) for z in zs]
    return Measure.finite(DENSIFY_SPACE, atoms, [Fraction(int(c), total) for c in counts])


def ci_bench(
    mode: CiMode,
    n: int = 2000,
    epsilon: float | None = None,
    gamma: float | None = None,
    reps: int = 1000,
    seed: int = 0,
    workers: int = 1,
    fixtures: int = 100,
) -> SimResult:
    """Level and power of ci_test by Monte Carlo, or a densify_ci verification batch."""
    if mode == "densify":
        return _densify_bench(fixtures, DEFAULT_INDEPENDENT_EPSILON if epsilon is None else epsilon, seed)
    if mode not in ("independent", "dependent"):
        raise ConfigError(f"Unknown ci mode {mode}", field="mode")

    truth = independent_fixture() if mode == "independent" else dependent_fixture()
    d_star = ci_distance(truth)
    if epsilon is None:
        epsilon = DEFAULT_INDEPENDENT_EPSILON if mode == "independent" else d_star / 2
    try:
        test = ci_test(CI_SPACE, epsilon, gamma)
    except ValueError as e:
        raise ConfigError(str(e), field="gamma") from e

    def draw(size: int, rng: np.random.Generator) -> Sample:
        return sample_iid(truth, size, rng)

    logger.info("Starting CI benchmark", mode=mode, n=n, epsilon=epsilon, d_star=d_star, reps=reps)
    counts = verdict_counts(test, draw, n, reps, seed, workers)
    row = frequency_row(
        counts,
        reps,
        pair=f"ci-{mode}",
        test="ci",
        n=n,
        true_param=f"{d_star:.12g}",
        bound=None,
        seed=seed,
    )
    # level under independence is the rejection rate, power under dependence likewise
    column = "level" if mode == "independent" else "power"
    logger.info("Finished CI benchmark", mode=mode, **{column: row.freq1})
    return SimResult(
        rows=[row],
        provenance={
            "mode": mode,
            "d_star": d_star,
            "reps": reps,
            "seed": seed,
            "test": test.provenance,
            column: row.freq1,
        },
    )


def _densify_bench(fixtures: int, epsilon: float, seed: int) -> SimResult:
    if fixtures < 1:
        raise ConfigError("fixtures must be at least 1", field="fixtures")
    rng = np.random.default_rng(seed)
    checks = {"fixtures": fixtures, "passed": 0, "not_distinct": 0, "not_independent": 0, "over_budget": 0}
    worst = 0.0
    for _ in range(fixtures):
        P = random_densify_fixture(rng)
        Q = densify_ci(P, epsilon)
        zs = [a[2] for a in Q.atoms]
        distinct = len(set(zs)) == len(zs)
        independent = ci_distance(Q) == 0.0
        moved = d_bl(P, Q)
        worst = max(worst, moved)
        within = moved < epsilon
        checks["not_distinct"] += not distinct
        checks["not_independent"] += not independent
        checks["over_budget"] += not within
        checks["passed"] += distinct and independent and within
    logger.info("Finished densify checks", epsilon=epsilon, worst_displacement=worst, **checks)
    return SimResult(
        provenance={"mode": "densify", "epsilon": epsilon, "seed": seed, "worst_displacement": worst},
        checks=checks,
    )


def ci_passed(result: SimResult) -> bool:
    if not result.checks:
        return True
    return result.checks["passed"] == result.checks["fixtures"]
