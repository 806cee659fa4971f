"""Conditional-independence distance, its finite-precision test and the dense-CI perturbation."""

from __future__ import annotations

from fractions import Fraction

import structlog

from fp_testing.fptest import FpTest, Verdict, decide
from fp_testing.kernels.markov import conditional_kernel, kernel_product
from fp_testing.measure import DiscreteSpace, Measure, MeasureKind, ProductSpace, RealSpace, Sample
from fp_testing.measure import empirical_measure
from fp_testing.metric import d_bl

logger = structlog.get_logger()

X_AXIS, Y_AXIS, Z_AXIS = 0, 1, 2


def _require_xyz(P: Measure):
    if not isinstance(P.space, ProductSpace) or P.space.dim != 3:
        raise ValueError(f"Expected a measure on X x Y x Z, got one on {P.space}")
    if P.kind is MeasureKind.GAUSSIAN:
        raise ValueError("ci_distance needs a finite-support measure")


def ci_distance(P: Measure) -> float:
    """d_BL(P(X | Z) (x) P(Y, Z), P(X, Y, Z)) with conditionals on the observed z-atoms."""
    _require_xyz(P)
    if not P.atoms:
        raise ValueError("ci_distance of a measure with empty support")
    K = conditional_kernel(P, [X_AXIS], [Z_AXIS])
    factorized = kernel_product(K, P.marginal([Y_AXIS, Z_AXIS]))
    return d_bl(factorized, P)


def ci_test(space: ProductSpace, epsilon: float, gamma: float | None = None, alpha: float | None = None) -> FpTest:
    """Verdict 0 iff ci_distance(P_n) < gamma, 1 iff ci_distance(P_n) > epsilon - gamma.

    H0 is conditional independence, H1 is {ci_distance >= epsilon}.
    """
    if not isinstance(space, ProductSpace) or space.dim != 3:
        raise ValueError(f"ci_test needs a space X x Y x Z, got {space}")
    if not all(isinstance(f, DiscreteSpace) for f in space.factors):
        raise ValueError("ci_test needs finite X, Y and Z")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if gamma is None:
        gamma = epsilon / 4
    if not 0 < gamma < epsilon / 2:
        raise ValueError(f"gamma must lie in (0, epsilon / 2) = (0, {epsilon / 2}), got {gamma}")
    upper = epsilon - gamma

    def evaluator(x: Sample) -> Verdict:
        if x.n == 0:
            return Verdict.SUSPEND
        stat = ci_distance(empirical_measure(x))
        return decide(stat < gamma, stat > upper, "ci_test")

    def margin(x: Sample) -> float:
        # the statistic jumps when mass moves between z-atoms, so only a move that
        # leaves every point in place is safe
        if evaluator(x) is Verdict.SUSPEND:
            return 0.0
        return space.min_separation

    return FpTest(
        name="ci",
        space=space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={"test": "ci", "epsilon": epsilon, "gamma": gamma, "alpha": alpha},
        alpha=alpha,
    )


def _dyadic_below(bound: Fraction) -> Fraction:
    step = Fraction(1)
    while step >= bound:
        step /= 2
    return step


def densify_ci(P: Measure, epsilon) -> Measure:
    """Move atoms sharing a z-coordinate to fresh nearby z values.

    Atoms are visited in order; an atom of weight a whose z is taken is shifted by the
    largest dyadic step below epsilon / (k a), k the number of atoms, halving until the
    new z is unused and inside the ambient space. Every conditional of the result is a
    point mass, so it is conditionally independent, and d_BL(P, P') < epsilon.
    """
    _require_xyz(P)
    epsilon = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    Z = P.space.factors[Z_AXIS]
    P = P.as_finite()
    k = len(P.atoms)
    if isinstance(Z, DiscreteSpace):
        raise ValueError("densify_ci needs a real-valued Z coordinate")
    if not isinstance(Z, RealSpace):
        raise ValueError(f"Unsupported Z space {Z}")

    weights = P.exact_weights if P.exact_weights is not None else P.weights
    used: set = set()
    atoms = []
    moved = 0
    for (x, y, z), w in zip(P.atoms, weights):
        z_exact = Fraction(z)
        if z_exact not in used:
            used.add(z_exact)
            atoms.append((x, y, z))
            continue
        budget = epsilon / (k * Fraction(w)) if w > 0 else Fraction(1)
        step = _dyadic_below(budget)
        while True:
            shifted = [_like(z, z_exact + step), _like(z, z_exact - step)]
            candidates = [c for c in shifted if Z.contains_point(c) and Fraction(c) not in used]
            if candidates:
                break
            step /= 2
        fresh = candidates[0]
        used.add(Fraction(fresh))
        atoms.append((x, y, fresh))
        moved += 1
    if not moved:
        return P
    logger.debug("Densified conditional-independence fixture", atoms=k, moved=moved)
    return Measure.finite(P.space, atoms, list(weights))


def _like(z, value: Fraction):
    # keep float coordinates as floats so sample arrays stay numeric
    return float(value) if isinstance(z, float) else value
