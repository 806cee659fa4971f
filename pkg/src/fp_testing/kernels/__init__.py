from .ci import ci_distance, ci_test, densify_ci
from .gaussian import (
    GaussianJoint,
    example_gauss_sequence,
    gaussian_conditional,
    gaussian_lipschitz,
)
from .markov import (
    BoundCheck,
    KernelKind,
    MarkovKernel,
    conditional_kernel,
    kernel_compose,
    kernel_product,
    lipschitz_estimate,
    mixture_bound_check,
    product_bound_check,
)

__all__ = [
    "BoundCheck",
    "GaussianJoint",
    "KernelKind",
    "MarkovKernel",
    "ci_distance",
    "ci_test",
    "conditional_kernel",
    "densify_ci",
    "example_gauss_sequence",
    "gaussian_conditional",
    "gaussian_lipschitz",
    "kernel_compose",
    "kernel_product",
    "lipschitz_estimate",
    "mixture_bound_check",
    "product_bound_check",
]
