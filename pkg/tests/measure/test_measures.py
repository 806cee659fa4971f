from fractions import Fraction

import numpy as np
import pytest

from fp_testing.errors import SpaceMismatchError
from fp_testing.measure import (
    BERNOULLI_SPACE,
    UNIT_INTERVAL,
    ExactReal,
    Measure,
    MeasureKind,
    OpenSet,
    ProductSpace,
    Sample,
    empirical_measure,
    measure_of_set,
    sample_iid,
)

ONE = OpenSet.discrete(BERNOULLI_SPACE, [1])


def test_finite_merges_repeated_atoms_exactly():
    P = Measure.finite(BERNOULLI_SPACE, [0, 1, 1], [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    assert P.atoms == (0, 1)
    assert P.exact_weights == (Fraction(1, 2), Fraction(1, 2))
    assert P.weights == (0.5, 0.5)


def test_finite_rejects_bad_weights():
    with pytest.raises(ValueError, match="sum to 1"):
        Measure.finite(BERNOULLI_SPACE, [0, 1], [0.5, 0.6])
    with pytest.raises(ValueError, match="non-negative"):
        Measure.finite(BERNOULLI_SPACE, [0, 1], [1.5, -0.5])


def test_finite_rejects_atoms_outside_the_space():
    with pytest.raises(SpaceMismatchError):
        Measure.finite(BERNOULLI_SPACE, [2], [1.0])


def test_bernoulli_mass_is_exact_for_irrational_parameters():
    P = Measure.bernoulli("sqrt2/2")
    assert P.exact_mass(ONE) == ExactReal.parse("sqrt2/2")
    assert P.exact_mass(OpenSet.whole(BERNOULLI_SPACE)) == 1
    assert measure_of_set(P, ONE) == pytest.approx(2**-0.5)


def test_bernoulli_parameter_range():
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        Measure.bernoulli(Fraction(3, 2))


def test_gaussian_rejects_indefinite_covariance():
    with pytest.raises(ValueError, match="positive semi-definite"):
        Measure.gaussian([0, 0], [[1, 2], [2, 1]])
    assert Measure.gaussian([0.0], [[1.0]]).kind is MeasureKind.GAUSSIAN


def test_sample_iid_is_deterministic_for_a_seed():
    P = Measure.bernoulli("1/3")
    a = sample_iid(P, 50, 7)
    b = sample_iid(P, 50, 7)
    assert np.array_equal(a.points, b.points)
    assert set(np.unique(a.points).tolist()) <= {0, 1}


def test_sample_iid_from_finite_product_measure():
    space = ProductSpace((BERNOULLI_SPACE, UNIT_INTERVAL))
    P = Measure.finite(space, [(0, Fraction(1, 4)), (1, Fraction(3, 4))], [Fraction(1, 2)] * 2)
    x = sample_iid(P, 20, 0)
    assert x.n == 20
    assert all(tuple(p) in {(0, Fraction(1, 4)), (1, Fraction(3, 4))} for p in x.points)


def test_sample_rejects_points_outside_the_space():
    with pytest.raises(SpaceMismatchError):
        Sample(BERNOULLI_SPACE, np.array([0, 1, 2]))


def test_empirical_measure_has_exact_frequencies():
    P_hat = empirical_measure(Sample(BERNOULLI_SPACE, np.array([0, 1, 1, 1])))
    assert P_hat.atoms == (0, 1)
    assert P_hat.exact_weights == (Fraction(1, 4), Fraction(3, 4))
    assert P_hat.exact_mass(ONE) == Fraction(3, 4)


def test_empirical_measure_of_empty_sample():
    with pytest.raises(ValueError, match="empty sample"):
        empirical_measure(Sample(BERNOULLI_SPACE, np.array([], dtype=np.int64)))


def test_block_array_reshapes_leading_points():
    x = Sample(BERNOULLI_SPACE, np.array([0, 1, 1, 0, 1, 1, 0]))
    assert x.block_array(3, 2).tolist() == [[0, 1, 1], [0, 1, 1]]
    assert [b.n for b in x.blocks(2, 3)] == [2, 2, 2]


def test_marginal_and_mixture():
    space = ProductSpace((BERNOULLI_SPACE, BERNOULLI_SPACE))
    P = Measure.finite(space, [(0, 0), (0, 1), (1, 1)], [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)])
    X = P.marginal([0])
    assert X.space == BERNOULLI_SPACE
    assert X.exact_weights == (Fraction(1, 2), Fraction(1, 2))

    mix = Measure.mixture(
        [Fraction(1, 2), Fraction(1, 2)],
        [Measure.dirac(BERNOULLI_SPACE, 0), Measure.bernoulli(Fraction(1, 2))],
    )
    assert mix.exact_weights == (Fraction(3, 4), Fraction(1, 4))
    assert mix.probability() == 0.25


def test_marginal_needs_a_product_space():
    with pytest.raises(ValueError, match="product spaces"):
        Measure.bernoulli("1/2").marginal([0])
