from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pytest

from fp_testing.errors import SpaceMismatchError
from fp_testing.kernels import (
    MarkovKernel,
    conditional_kernel,
    kernel_compose,
    kernel_product,
    lipschitz_estimate,
    mixture_bound_check,
    product_bound_check,
)
from fp_testing.measure import BERNOULLI_SPACE, DiscreteSpace, Measure, ProductSpace

HALF_APART_X = DiscreteSpace(points=("a", "b"), distances=((0, 0.5), (0.5, 0)))
HALF_APART_Z = DiscreteSpace(points=(0, 1), distances=((0, 0.5), (0.5, 0)))


def coin(p) -> Measure:
    return Measure.bernoulli(p)


def test_table_kernel_lookup():
    K = MarkovKernel.from_table(BERNOULLI_SPACE, BERNOULLI_SPACE, {0: coin("1/4"), 1: coin("3/4")})
    assert K(1) == coin("3/4")
    assert K.points == (0, 1)
    with pytest.raises(ValueError, match="no entry"):
        K(2)


def test_table_kernel_validation():
    with pytest.raises(SpaceMismatchError):
        MarkovKernel.from_table(BERNOULLI_SPACE, BERNOULLI_SPACE, {3: coin("1/2")})
    with pytest.raises(SpaceMismatchError):
        MarkovKernel.from_table(HALF_APART_X, BERNOULLI_SPACE, {0: coin("1/2")})
    with pytest.raises(ValueError, match="at least one"):
        MarkovKernel.from_table(BERNOULLI_SPACE, BERNOULLI_SPACE, {})


def test_kernel_product_of_fair_coins_is_uniform():
    K = MarkovKernel.constant(coin("1/2"), BERNOULLI_SPACE, [0, 1])
    joint = kernel_product(K, coin("1/2"))
    assert joint.space == ProductSpace((BERNOULLI_SPACE, BERNOULLI_SPACE))
    assert sorted(joint.atoms) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert joint.exact_weights == (Fraction(1, 4),) * 4


def test_kernel_product_on_y_and_z():
    K = MarkovKernel.from_table(BERNOULLI_SPACE, BERNOULLI_SPACE, {0: Measure.dirac(BERNOULLI_SPACE, 1)})
    YZ = ProductSpace((BERNOULLI_SPACE, BERNOULLI_SPACE))
    Q = Measure.finite(YZ, [(0, 0), (1, 0)], [Fraction(1, 2)] * 2)
    joint = kernel_product(K, Q)
    assert joint.atoms == ((1, 0, 0), (1, 1, 0))
    assert joint.space.dim == 3


def test_kernel_product_rejects_foreign_conditioning_space():
    K = MarkovKernel.constant(coin("1/2"), HALF_APART_Z, [0, 1])
    with pytest.raises(SpaceMismatchError):
        kernel_product(K, coin("1/2"))


def test_compose_declares_max_one_l_times_m():
    inner = MarkovKernel.from_table(
        BERNOULLI_SPACE,
        BERNOULLI_SPACE,
        {0: Measure.dirac(BERNOULLI_SPACE, 0), 1: Measure.dirac(BERNOULLI_SPACE, 1)},
        lipschitz=2.0,
    )
    outer = MarkovKernel.from_table(
        BERNOULLI_SPACE, BERNOULLI_SPACE, {0: coin("1/4"), 1: coin("3/4")}, lipschitz=0.5
    )
    composed = kernel_compose(outer, inner)
    assert composed.lipschitz == 2.0
    assert composed(0).exact_weights == (Fraction(3, 4), Fraction(1, 4))
    assert lipschitz_estimate(composed) <= composed.lipschitz


def test_compose_needs_matching_spaces():
    K1 = MarkovKernel.constant(coin("1/2"), HALF_APART_Z, [0, 1])
    K2 = MarkovKernel.constant(coin("1/2"), BERNOULLI_SPACE, [0, 1])
    with pytest.raises(SpaceMismatchError):
        kernel_compose(K1, K2)


def test_lipschitz_estimate_on_unit_distances_is_at_most_two():
    rng = np.random.default_rng(5)
    Z = DiscreteSpace.uniform((0, 1, 2))
    table = {z: coin(float(p)) for z, p in zip(Z.points, rng.random(3))}
    K = MarkovKernel.from_table(BERNOULLI_SPACE, Z, table)
    estimate = lipschitz_estimate(K)
    assert 0.0 <= estimate <= 2.0
    assert lipschitz_estimate(K, [(0, 1)]) <= estimate


def test_lipschitz_estimate_rejects_bad_pairs():
    K = MarkovKernel.constant(coin("1/2"), BERNOULLI_SPACE, [0, 1])
    with pytest.raises(ValueError, match="at least one pair"):
        lipschitz_estimate(K, [])
    with pytest.raises(ValueError, match="distinct"):
        lipschitz_estimate(K, [(0, 0)])


def test_product_bound_needs_one_plus_l():
    # K(0) and K(1) are point masses half a unit apart, so L = 1
    K = MarkovKernel.from_table(
        HALF_APART_X,
        HALF_APART_Z,
        {0: Measure.dirac(HALF_APART_X, "a"), 1: Measure.dirac(HALF_APART_X, "b")},
    )
    Q0, Q1 = Measure.dirac(HALF_APART_Z, 0), Measure.dirac(HALF_APART_Z, 1)
    with patch("fp_testing.kernels.markov.logger") as mock_logger:
        check = product_bound_check(K, Q0, Q1)
        mock_logger.warning.assert_called_once()
    assert check.lhs == pytest.approx(1.0)
    assert check.rhs == pytest.approx(1.0)
    assert check.printed_rhs == pytest.approx(0.5)
    assert check.holds
    assert not check.printed_holds


def test_product_bound_for_constant_kernel():
    K = MarkovKernel.constant(coin("1/3"), BERNOULLI_SPACE, [0, 1])
    check = product_bound_check(K, coin("1/4"), coin("3/4"))
    assert check.holds
    assert check.printed_holds
    assert check.lhs == pytest.approx(0.5, abs=1e-8)


def test_mixture_bound():
    K = MarkovKernel.from_table(BERNOULLI_SPACE, BERNOULLI_SPACE, {0: coin("1/4"), 1: coin("3/4")})
    K_prime = MarkovKernel.constant(coin("1/2"), BERNOULLI_SPACE, [0, 1])
    check = mixture_bound_check(K, K_prime, coin("1/2"))
    assert check.holds
    assert check.rhs == pytest.approx(0.25, abs=1e-8)


def test_conditional_kernel_of_a_copy():
    XYZ = ProductSpace((BERNOULLI_SPACE, BERNOULLI_SPACE, BERNOULLI_SPACE))
    P = Measure.finite(XYZ, [(0, 0, 0), (1, 1, 0)], [Fraction(1, 2)] * 2)
    K = conditional_kernel(P, [0], [2])
    assert K.points == (0,)
    assert K(0).exact_weights == (Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(ValueError, match="overlap"):
        conditional_kernel(P, [0, 2], [2])


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_line(rng: np.random.Generator) -> DiscreteSpace:
    m = int(rng.integers(2, 4))
    positions = np.sort(rng.choice(20, size=m, replace=False)) * rng.uniform(0.05, 0.5)
    table = tuple(tuple(abs(float(a) - float(b)) for b in positions) for a in positions)
    return DiscreteSpace(points=tuple(range(m)), distances=table)


def random_measure(rng: np.random.Generator, space: DiscreteSpace) -> Measure:
    return Measure.finite(space, list(space.points), rng.dirichlet(np.ones(len(space.points))).tolist())


def test_product_bound_holds_for_random_table_kernels(rng):
    printed_breaches = 0
    with patch("fp_testing.kernels.markov.logger") as mock_logger:
        for _ in range(100):
            X, Z = random_line(rng), random_line(rng)
            K = MarkovKernel.from_table(X, Z, {z: random_measure(rng, X) for z in Z.points})
            check = product_bound_check(K, random_measure(rng, Z), random_measure(rng, Z))
            assert check.holds
            printed_breaches += not check.printed_holds
    # the max{1, L} constant is only ever logged
    assert mock_logger.warning.call_count == printed_breaches
