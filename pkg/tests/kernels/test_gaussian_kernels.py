import math

import numpy as np
import pytest

from fp_testing.kernels import (
    GaussianJoint,
    KernelKind,
    example_gauss_sequence,
    gaussian_conditional,
    gaussian_lipschitz,
)


@pytest.mark.parametrize("n", [1, 4, 100])
def test_example_sequence_conditional_covariance(n):
    J = example_gauss_sequence(n)
    _, cov = gaussian_conditional(J, [0, 1], [2])
    np.testing.assert_allclose(cov, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)


@pytest.mark.parametrize("n,expected", [(1, 0.5), (4, 1.0), (100, 5.0)])
def test_example_sequence_lipschitz_grows_like_sqrt_n(n, expected):
    J = example_gauss_sequence(n)
    assert gaussian_lipschitz(J, [0], [2]) == pytest.approx(expected, abs=1e-10)
    assert gaussian_lipschitz(J, [1], [2]) == pytest.approx(math.sqrt(n) / 2, abs=1e-10)
    kernel, _ = gaussian_conditional(J, [0], [2])
    assert kernel.kind is KernelKind.GAUSSIAN_LINEAR
    assert kernel.lipschitz == pytest.approx(expected, abs=1e-10)


def test_gaussian_kernel_evaluates_to_shifted_normal():
    kernel, _ = gaussian_conditional(example_gauss_sequence(4), [0], [2])
    P = kernel(0.5)
    # coefficient sqrt(4) / 2 = 1
    assert P.mean == pytest.approx((0.5,))
    assert P.cov[0][0] == pytest.approx(0.5)


def test_singular_conditioning_covariance_is_rejected():
    J = GaussianJoint(mean=np.zeros(2), cov=np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="singular"):
        gaussian_conditional(J, [0], [1])


def test_joint_validation():
    with pytest.raises(ValueError, match="positive semi-definite"):
        GaussianJoint(mean=np.zeros(2), cov=np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError, match="disjoint"):
        gaussian_conditional(example_gauss_sequence(4), [0, 2], [2])
    with pytest.raises(ValueError, match="n must"):
        example_gauss_sequence(0)
