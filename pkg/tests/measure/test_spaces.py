from fractions import Fraction

import numpy as np
import pytest

from fp_testing.errors import SpaceMismatchError
from fp_testing.measure import (
    BERNOULLI_SPACE,
    UNIT_INTERVAL,
    DiscreteSpace,
    Interval,
    OpenSet,
    ProductSpace,
    exterior,
    neighborhood_of_complement,
)


def test_discrete_space_rejects_triangle_violation():
    with pytest.raises(ValueError, match="triangle"):
        DiscreteSpace(points=("a", "b", "c"), distances=((0, 1, 3), (1, 0, 1), (3, 1, 0)))


def test_discrete_space_rejects_asymmetric_table():
    with pytest.raises(ValueError, match="symmetric"):
        DiscreteSpace(points=(0, 1), distances=((0, 1), (2, 0)))


def test_min_separation():
    space = DiscreteSpace(points=(0, 1, 2), distances=((0, 0.5, 1), (0.5, 0, 0.75), (1, 0.75, 0)))
    assert space.min_separation == 0.5
    assert UNIT_INTERVAL.min_separation == 0.0


def test_open_interval_membership_is_exact_at_endpoints():
    S = OpenSet.open_interval(UNIT_INTERVAL, 0, Fraction(1, 2))
    assert S.contains([0.5, 0.49, 0.0]).tolist() == [False, True, False]


def test_real_open_set_must_be_relatively_open():
    with pytest.raises(ValueError, match="not open"):
        OpenSet.real(UNIT_INTERVAL, [Interval(Fraction(1, 4), Fraction(1, 2), True, False)])


def test_open_set_clips_to_ambient_space():
    S = OpenSet.open_interval(UNIT_INTERVAL, Fraction(1, 2), 2)
    assert S.intervals == (Interval(Fraction(1, 2), Fraction(1), False, True),)
    assert S.contains([1.0]).tolist() == [True]


def test_discrete_open_set_rejects_foreign_points():
    with pytest.raises(SpaceMismatchError):
        OpenSet.discrete(BERNOULLI_SPACE, [2])


def test_neighborhood_and_exterior_on_the_line():
    A = OpenSet.open_interval(UNIT_INTERVAL, Fraction(1, 2), None)
    near = neighborhood_of_complement(A, Fraction(1, 4))
    ext = exterior(near)
    assert near.contains([0.0, 0.7, 0.75]).tolist() == [True, True, False]
    assert ext.contains([0.75, 0.8, 1.0]).tolist() == [False, True, True]


def test_float_on_an_endpoint_is_compared_exactly():
    S = OpenSet.open_interval(UNIT_INTERVAL, 0, Fraction(3, 5))
    # the double nearest 0.6 lies just below 3/5
    assert S.contains([0.6]).tolist() == [True]


def test_neighborhood_and_exterior_on_bernoulli_space():
    A = OpenSet.discrete(BERNOULLI_SPACE, [1])
    near = neighborhood_of_complement(A, Fraction(1, 2))
    assert near.members == frozenset({0})
    assert exterior(near).members == frozenset({1})


def test_neighborhood_of_whole_space_is_empty():
    near = neighborhood_of_complement(OpenSet.whole(UNIT_INTERVAL), Fraction(1, 3))
    assert near.is_empty
    assert exterior(near).contains([0.0, 1.0]).tolist() == [True, True]


def test_boundary_distance_and_stability_radius():
    S = OpenSet.open_interval(UNIT_INTERVAL, Fraction(1, 4), Fraction(3, 4))
    assert S.boundary_distance(np.array([0.5, 0.3])) == pytest.approx([0.25, 0.05])
    assert S.stability_radius(np.array([0.5, 0.3])) == pytest.approx(0.05)
    assert OpenSet.discrete(BERNOULLI_SPACE, [1]).stability_radius(np.array([0, 1])) == 1.0


def test_product_space_uses_sum_metric():
    space = ProductSpace((BERNOULLI_SPACE, UNIT_INTERVAL))
    assert space.distance((0, 0.25), (1, 0.75)) == pytest.approx(1.5)
    assert space.contains(np.array([[0, 0.5], [1, 1.5]])).tolist() == [True, False]
    assert space.project([1]) == UNIT_INTERVAL


def test_nested_products_are_rejected():
    inner = ProductSpace((BERNOULLI_SPACE, BERNOULLI_SPACE))
    with pytest.raises(ValueError, match="Nested"):
        ProductSpace((inner, BERNOULLI_SPACE))


def test_boundary_includes_an_ambient_end_the_set_leaves_out():
    S = OpenSet.open_interval(UNIT_INTERVAL, 0, Fraction(1, 2))
    assert S.boundary_points() == (Fraction(0), Fraction(1, 2))
    assert S.stability_radius(np.array([0.1])) == pytest.approx(0.1)


def random_open_set(rng: np.random.Generator, grid: int = 64) -> OpenSet:
    """Up to three disjoint open intervals with endpoints on a 1/grid lattice of [0, 1]."""
    k = int(rng.integers(1, 4))
    ticks = np.sort(rng.choice(grid + 1, size=2 * k, replace=False))
    return OpenSet.real(
        UNIT_INTERVAL,
        [Interval(Fraction(int(a), grid), Fraction(int(b), grid)) for a, b in ticks.reshape(-1, 2)],
    )


def lattice_and_random_points(rng: np.random.Generator, grid: int = 64) -> np.ndarray:
    return np.concatenate([np.arange(grid + 1) / grid, rng.uniform(0.0, 1.0, 400)])


@pytest.mark.parametrize("seed", range(20))
def test_exterior_is_disjoint_from_the_set(seed):
    rng = np.random.default_rng(seed)
    S = random_open_set(rng)
    xs = lattice_and_random_points(rng)
    inside, outside = S.contains(xs), exterior(S).contains(xs)
    assert not np.any(inside & outside)
    # whatever is in neither lies on the boundary
    ends = {float(e) for e in S.boundary_points()}
    assert all(float(x) in ends for x in xs[~inside & ~outside])


@pytest.mark.parametrize("seed", range(20))
def test_neighborhood_grows_with_the_radius(seed):
    rng = np.random.default_rng(seed)
    A = random_open_set(rng)
    xs = lattice_and_random_points(rng)
    complement = ~A.contains(xs)
    previous = complement
    for r in (Fraction(1, 256), Fraction(1, 64), Fraction(1, 16), Fraction(1, 4)):
        mask = neighborhood_of_complement(A, r).contains(xs)
        assert np.all(mask[previous])
        previous = mask


@pytest.mark.parametrize("seed", range(20))
def test_neighborhood_shrinks_to_the_complement(seed):
    rng = np.random.default_rng(seed)
    A = random_open_set(rng)
    xs = rng.uniform(0.0, 1.0, 400)
    xs = xs[A.contains(xs)]
    gap = A.boundary_distance(xs)
    for k in (2, 6, 12, 40):
        r = Fraction(1, 2**k)
        near = neighborhood_of_complement(A, r).contains(xs)
        clear = np.abs(gap - float(r)) > 1e-12
        assert np.array_equal(near[clear], (gap < float(r))[clear])
    # a point of A at distance g from the complement leaves every neighbourhood of radius <= g
    assert not np.any(neighborhood_of_complement(A, Fraction(1, 2**40)).contains(xs[gap > 2**-40]))


def test_open_set_str():
    assert str(OpenSet.open_interval(UNIT_INTERVAL, Fraction(1, 4), Fraction(3, 4))) == "(1/4, 3/4)"
    assert str(OpenSet.discrete(BERNOULLI_SPACE, [1])) == "{1}"
    assert str(OpenSet.empty(UNIT_INTERVAL)) == "{}"
