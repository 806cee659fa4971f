from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fp_testing.kernels.markov import MarkovKernel
from fp_testing.measure import Measure

SINGULAR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GaussianJoint:
    """Mean vector and covariance of a jointly Gaussian vector; blocks are picked by index."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        # raises on shape mismatch, asymmetry or a negative eigenvalue
        Measure.gaussian(mean, cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        return self.cov[np.ix_(list(rows), list(cols))]

    def measure(self) -> Measure:
        return Measure.gaussian(self.mean, self.cov)


def _coefficient(J: GaussianJoint, target: Sequence[int], given: Sequence[int]) -> np.ndarray:
    target, given = list(target), list(given)
    if not target or not given or set(target) & set(given):
        raise ValueError(f"target {target} and given {given} must be disjoint and non-empty")
    if max(target + given) >= J.dim or min(target + given) < 0:
        raise ValueError(f"Indices out of range for a {J.dim}-dimensional Gaussian")
    S_zz = J.block(given, given)
    eig = np.linalg.eigvalsh(S_zz)
    if eig.min() <= SINGULAR_TOL * max(1.0, eig.max()):
        raise ValueError(f"Sigma_ZZ is singular (smallest eigenvalue {eig.min():.3g})")
    # Sigma_XZ Sigma_ZZ^{-1}, via the symmetric solve Sigma_ZZ C^T = Sigma_ZX
    return np.linalg.solve(S_zz, J.block(given, target)).T


def gaussian_conditional(
    J: GaussianJoint, target: Sequence[int], given: Sequence[int]
) -> tuple[MarkovKernel, np.ndarray]:
    """The kernel z -> N(mu_X + C (z - mu_Z), Sigma_XX - C Sigma_ZX) and its covariance."""
    C = _coefficient(J, target, given)
    cov = J.block(target, target) - C @ J.block(given, target)
    cov = (cov + cov.T) / 2
    kernel = MarkovKernel.gaussian_linear(
        C,
        J.mean[list(target)],
        J.mean[list(given)],
        cov,
        lipschitz=_operator_norm(C),
    )
    return kernel, cov


def _operator_norm(M: np.ndarray) -> float:
    return math.sqrt(max(0.0, float(np.linalg.eigvalsh(M.T @ M).max())))


def gaussian_lipschitz(J: GaussianJoint, target: Sequence[int], given: Sequence[int]) -> float:
    """Spectral norm of Sigma_XZ Sigma_ZZ^{-1}."""
    return _operator_norm(_coefficient(J, target, given))


def example_gauss_sequence(n: int) -> GaussianJoint:
    """(X, Y, Z) with X, Y independent given Z while Sigma_ZZ = 2/n shrinks to zero."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    c = 1 / math.sqrt(n)
    cov = [
        [1.0, 0.5, c],
        [0.5, 1.0, c],
        [c, c, 2 / n],
    ]
    return GaussianJoint(mean=np.zeros(3), cov=np.array(cov))
