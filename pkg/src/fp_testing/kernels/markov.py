"""Markov kernels on finite tables and linear-Gaussian families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
import structlog

from fp_testing.errors import InvariantViolation, SpaceMismatchError
from fp_testing.measure import Measure, MeasureKind, ProductSpace, SampleSpace
from fp_testing.metric import d_bl

logger = structlog.get_logger()

BOUND_TOL = 1e-8


class KernelKind(str, Enum):
    TABLE = "table"
    GAUSSIAN_LINEAR = "gaussian-linear"


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """z -> P(X | Z = z), either tabulated on finitely many z or linear-Gaussian.

    A linear-Gaussian kernel maps z to N(mean_x + coefficient (z - mean_z), cov).
    `lipschitz` is a declared bound on d_BL(K(z), K(z')) / d(z, z').
    """

    kind: KernelKind
    target: SampleSpace
    given: SampleSpace
    table: Mapping[Hashable, Measure] = field(default_factory=dict)
    coefficient: np.ndarray | None = None
    mean_x: np.ndarray | None = None
    mean_z: np.ndarray | None = None
    cov: np.ndarray | None = None
    lipschitz: float | None = None

    @classmethod
    def from_table(
        cls,
        target: SampleSpace,
        given: SampleSpace,
        table: Mapping[Hashable, Measure],
        lipschitz: float | None = None,
    ) -> MarkovKernel:
        if not table:
            raise ValueError("A table kernel needs at least one conditioning point")
        for z, P in table.items():
            if not given.contains_point(z):
                raise SpaceMismatchError(f"Conditioning point {z} is not in {given}")
            if P.space != target:
                raise SpaceMismatchError(f"Entry for z={z} lives on {P.space}, expected {target}")
            if P.kind is MeasureKind.GAUSSIAN:
                raise ValueError("Table kernel entries must have finite support")
        if lipschitz is not None and lipschitz < 0:
            raise ValueError(f"Lipschitz bound must be non-negative, got {lipschitz}")
        return cls(
            kind=KernelKind.TABLE,
            target=target,
            given=given,
            table=MappingProxyType(dict(table)),
            lipschitz=lipschitz,
        )

    @classmethod
    def constant(cls, P: Measure, given: SampleSpace, points: Iterable[Hashable]) -> MarkovKernel:
        return cls.from_table(P.space, given, {z: P for z in points}, lipschitz=0.0)

    @classmethod
    def gaussian_linear(
        cls,
        coefficient,
        mean_x,
        mean_z,
        cov,
        lipschitz: float | None = None,
    ) -> MarkovKernel:
        C = np.atleast_2d(np.asarray(coefficient, dtype=float))
        mx = np.atleast_1d(np.asarray(mean_x, dtype=float))
        mz = np.atleast_1d(np.asarray(mean_z, dtype=float))
        S = np.atleast_2d(np.asarray(cov, dtype=float))
        if C.shape != (mx.size, mz.size) or S.shape != (mx.size, mx.size):
            raise ValueError(
                f"Inconsistent shapes: coefficient {C.shape}, mean_x {mx.shape}, "
                f"mean_z {mz.shape}, cov {S.shape}"
            )
        # validates symmetry and positive semi-definiteness
        target = Measure.gaussian(mx, S).space
        given = Measure.gaussian(mz, np.eye(mz.size)).space
        return cls(
            kind=KernelKind.GAUSSIAN_LINEAR,
            target=target,
            given=given,
            coefficient=C,
            mean_x=mx,
            mean_z=mz,
            cov=S,
            lipschitz=lipschitz,
        )

    @property
    def points(self) -> tuple:
        return tuple(self.table)

    def __call__(self, z) -> Measure:
        if self.kind is KernelKind.GAUSSIAN_LINEAR:
            z = np.atleast_1d(np.asarray(z, dtype=float))
            return Measure.gaussian(self.mean_x + self.coefficient @ (z - self.mean_z), self.cov)
        try:
            return self.table[z]
        except KeyError:
            raise ValueError(f"Kernel has no entry for conditioning point {z}") from None


def _require_table(K: MarkovKernel, what: str):
    if K.kind is not KernelKind.TABLE:
        raise ValueError(f"{what} needs a table kernel")


def _weights(P: Measure) -> Sequence[float | Fraction]:
    P = P.as_finite()
    return P.exact_weights if P.exact_weights is not None else P.weights


def kernel_product(K: MarkovKernel, Q: Measure) -> Measure:
    """K (x) Q on X x Y x Z with weights K(z)({x}) * Q({(y, z)}).

    Q lives on Y x Z (Z the last factor) or on Z alone, giving X x Z.
    """
    _require_table(K, "kernel_product")
    if Q.kind is MeasureKind.GAUSSIAN:
        raise ValueError("kernel_product needs a finite-support Q")
    if isinstance(K.target, ProductSpace):
        raise ValueError("kernel_product needs a single-factor target space")
    Q = Q.as_finite()
    on_z = Q.space == K.given
    if on_z:
        space = ProductSpace((K.target, K.given))
    elif isinstance(Q.space, ProductSpace) and Q.space.factors[-1] == K.given:
        space = ProductSpace((K.target,) + Q.space.factors)
    else:
        raise SpaceMismatchError(f"Q lives on {Q.space}; expected {K.given} as its last factor")

    atoms, weights = [], []
    for a, w in zip(Q.atoms, _weights(Q)):
        rest, z = ((), a) if on_z else (tuple(a[:-1]), a[-1])
        entry = K(z).as_finite()
        for x, v in zip(entry.atoms, _weights(entry)):
            atoms.append((x,) + rest + (z,))
            weights.append(v * w if isinstance(v, Fraction) and isinstance(w, Fraction) else float(v) * float(w))
    if not all(isinstance(w, Fraction) for w in weights):
        weights = [float(w) for w in weights]
    return Measure.finite(space, atoms, weights)


def kernel_compose(K1: MarkovKernel, K2: MarkovKernel) -> MarkovKernel:
    """z -> sum_y K2(z)({y}) K1(y); declared bound max{1, L} * M from K1's L and K2's M."""
    _require_table(K1, "kernel_compose")
    _require_table(K2, "kernel_compose")
    if K2.target != K1.given:
        raise SpaceMismatchError(f"K2 maps into {K2.target}, K1 conditions on {K1.given}")
    table = {}
    for z, inner in K2.table.items():
        inner = inner.as_finite()
        missing = [y for y in inner.atoms if y not in K1.table]
        if missing:
            raise ValueError(f"K1 has no entry for {missing[:3]} reached from z={z}")
        table[z] = Measure.mixture(list(_weights(inner)), [K1.table[y] for y in inner.atoms])
    bound = None
    if K1.lipschitz is not None and K2.lipschitz is not None:
        bound = max(1.0, K1.lipschitz) * K2.lipschitz
    return MarkovKernel.from_table(K1.target, K2.given, table, lipschitz=bound)


def lipschitz_estimate(K: MarkovKernel, pairs: Sequence[tuple] | None = None) -> float:
    """max d_BL(K(z), K(z')) / d(z, z') over the given pairs, or over all table pairs.

    Over given pairs this is a lower bound on the Lipschitz constant; over all pairs of
    a finite table it is the constant itself.
    """
    _require_table(K, "lipschitz_estimate")
    if pairs is None:
        pairs = list(combinations(K.points, 2))
    elif not pairs:
        raise ValueError("lipschitz_estimate needs at least one pair")
    best = 0.0
    for z, w in pairs:
        gap = K.given.distance(z, w)
        if not gap > 0:
            raise ValueError(f"Pair ({z}, {w}) is at distance {gap}; pairs must be distinct points")
        best = max(best, d_bl(K(z), K(w)) / gap)
    return best


def conditional_kernel(P: Measure, target: Sequence[int], given: Sequence[int]) -> MarkovKernel:
    """P(target | given) on the observed conditioning atoms, weights renormalised."""
    if not isinstance(P.space, ProductSpace):
        raise ValueError("Conditionals are only defined on product spaces")
    P = P.as_finite()
    target, given = tuple(target), tuple(given)
    if set(target) & set(given):
        raise ValueError(f"Target axes {target} and conditioning axes {given} overlap")
    def pick(a, axes):
        return a[axes[0]] if len(axes) == 1 else tuple(a[i] for i in axes)

    groups: dict = {}
    for a, w in zip(P.atoms, _weights(P)):
        groups.setdefault(pick(a, given), []).append((pick(a, target), w))
    target_space = P.space.project(target)
    table = {}
    for z, entries in groups.items():
        total = sum(w for _, w in entries)
        if total == 0:
            continue
        table[z] = Measure.finite(target_space, [x for x, _ in entries], [w / total for _, w in entries])
    return MarkovKernel.from_table(target_space, P.space.project(given), table)


@dataclass(frozen=True, slots=True)
class BoundCheck:
    lhs: float
    rhs: float
    # right-hand side with the constant max{1, L}; may legitimately be exceeded
    printed_rhs: float | None = None

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + BOUND_TOL

    @property
    def printed_holds(self) -> bool:
        return self.printed_rhs is None or self.lhs <= self.printed_rhs + BOUND_TOL


def product_bound_check(K: MarkovKernel, Q0: Measure, Q1: Measure, L: float | None = None) -> BoundCheck:
    """d_BL(K (x) Q0, K (x) Q1) <= (1 + L) d_BL(Q0, Q1) under the sum metric.

    The constant max{1, L} is also reported; it fails for some kernels and is only
    logged.
    """
    if L is None:
        L = K.lipschitz if K.lipschitz is not None else lipschitz_estimate(K)
    lhs = d_bl(kernel_product(K, Q0), kernel_product(K, Q1))
    base = d_bl(Q0, Q1)
    check = BoundCheck(lhs=lhs, rhs=(1.0 + L) * base, printed_rhs=max(1.0, L) * base)
    if not check.holds:
        raise InvariantViolation(f"Product bound violated: {lhs} > (1 + {L}) * {base}")
    if not check.printed_holds:
        logger.warning(
            "Product bound with constant max{1, L} exceeded",
            lhs=lhs,
            printed_rhs=check.printed_rhs,
            L=L,
        )
    return check


def mixture_bound_check(K: MarkovKernel, K_prime: MarkovKernel, Q: Measure) -> BoundCheck:
    """d_BL(K (x) Q, K' (x) Q) <= sum_z Q(z) d_BL(K(z), K'(z)) for Q on Z."""
    if Q.space != K.given or K_prime.given != K.given:
        raise SpaceMismatchError("Both kernels must condition on Q's space")
    Q = Q.as_finite()
    lhs = d_bl(kernel_product(K, Q), kernel_product(K_prime, Q))
    rhs = math.fsum(w * d_bl(K(z), K_prime(z)) for z, w in zip(Q.atoms, Q.weights))
    check = BoundCheck(lhs=lhs, rhs=rhs)
    if not check.holds:
        raise InvariantViolation(f"Mixture bound violated: {lhs} > {rhs}")
    return check
