"""Constructors and combinators for finite-precision tests.

Every constructor returns an FpTest whose 0- and 1-regions are open, with the
exception of `to_binary`, which merges the suspension region into one of them.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import structlog

from fp_testing.errors import InvariantViolation
from fp_testing.fptest.fp_test import (
    FpTest,
    TestThresholds,
    Verdict,
    block_sizes,
    decide,
    t_n,
)
from fp_testing.hypotheses import (
    ClosedPiece,
    HypothesisRegion,
    LazySequence,
    SubbasisAtom,
    Term,
)
from fp_testing.measure import (
    OpenSet,
    Sample,
    SampleSpace,
    empirical_measure,
    exterior,
    neighborhood_of_complement,
)
from fp_testing.metric import d_bl_to_set, region_separation

logger = structlog.get_logger()

BUDGET_SLACK = 1e-12


@lru_cache(maxsize=4096)
def subbasis_regions(A: OpenSet, n: int) -> tuple[OpenSet, OpenSet]:
    """(A^c_{1/n}, ext(A^c_{1/n})) for the subbasis test at sample size n."""
    near = neighborhood_of_complement(A, Fraction(1, n))
    return near, exterior(near)


def subbasis_test(atom: SubbasisAtom, alpha: float) -> FpTest:
    """Test of {P(A) <= q} (verdict 0) against {P(A) > q} (verdict 1)."""
    TestThresholds(alpha=alpha)
    q = float(atom.q)

    def frequencies(points: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
        near, ext = subbasis_regions(atom.A, n)
        shape = points.shape
        flat = points.reshape(-1)
        f_near = near.contains(flat).reshape(shape).mean(axis=-1)
        f_ext = ext.contains(flat).reshape(shape).mean(axis=-1)
        return f_near, f_ext

    def evaluator(x: Sample) -> Verdict:
        n = x.n
        if n == 0:
            return Verdict.SUSPEND
        f_near, f_ext = frequencies(x.points, n)
        tn = t_n(n, alpha)
        return decide(bool(f_near > 1 - q - tn), bool(f_ext >= q + tn), "subbasis_test")

    def batch(blocks: np.ndarray) -> np.ndarray:
        k = blocks.shape[1]
        f_near, f_ext = frequencies(blocks, k)
        tn = t_n(k, alpha)
        zero = f_near > 1 - q - tn
        one = f_ext >= q + tn
        if np.any(zero & one):
            raise InvariantViolation("subbasis_test: verdicts 0 and 1 are both derivable")
        return np.where(zero, 0, np.where(one, 1, 2))

    def margin(x: Sample) -> float:
        if evaluator(x) is Verdict.SUSPEND:
            return 0.0
        near, ext = subbasis_regions(atom.A, x.n)
        return min(near.stability_radius(x.points), ext.stability_radius(x.points))

    return FpTest(
        name="subbasis",
        space=atom.space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={"test": "subbasis", "atom": {"A": str(atom.A), "q": str(atom.q)}, "alpha": alpha},
        alpha=alpha,
        batch_evaluator=batch,
    )


def amplify(base: FpTest, log_base: float = math.e) -> FpTest:
    """Majority vote of the base test over m_n disjoint blocks of size k_n."""

    def votes(x: Sample) -> np.ndarray:
        k, m = block_sizes(x.n, log_base)
        if base.batch_evaluator is not None:
            return np.asarray(base.batch_evaluator(x.block_array(k, m)))
        return np.array([int(base.evaluator(block)) for block in x.blocks(k, m)])

    def evaluator(x: Sample) -> Verdict:
        if x.n < 3:
            return Verdict.SUSPEND
        v = votes(x)
        m = v.shape[0]
        return decide(
            bool(2 * np.count_nonzero(v == 0) > m),
            bool(2 * np.count_nonzero(v == 1) > m),
            "amplify",
        )

    def margin(x: Sample) -> float:
        if evaluator(x) is Verdict.SUSPEND:
            return 0.0
        k, m = block_sizes(x.n, log_base)
        return min(base.margin_fn(block) for block in x.blocks(k, m))

    return FpTest(
        name="amplify",
        space=base.space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={"test": "amplify", "log_base": log_base, "base": base.provenance},
        alpha=base.alpha,
    )


def _as_lazy(items) -> LazySequence:
    if isinstance(items, LazySequence):
        return items
    return LazySequence.of(items)


def combine(
    terms: LazySequence[tuple[FpTest, ...]] | Sequence[Iterable[FpTest]],
    alpha: float,
    space: SampleSpace | None = None,
) -> FpTest:
    """Union over terms i of the intersection of their members, with budgets alpha / 2^i.

    Verdict 0 iff every term i <= n has a member voting 0; verdict 1 iff some term
    i <= n has all members voting 1.
    """
    TestThresholds(alpha=alpha)
    terms = _as_lazy(terms if isinstance(terms, LazySequence) else [tuple(t) for t in terms])
    first = terms.take(1)
    if space is None:
        if not first or not first[0]:
            raise ValueError("combine needs a space when its first term is empty")
        space = first[0][0].space

    def active(n: int) -> tuple[tuple[FpTest, ...], ...]:
        chosen = terms.take(n)
        for i, term in enumerate(chosen, start=1):
            budget = alpha / 2**i
            for t in term:
                if t.space != space:
                    raise ValueError(f"Term {i} mixes sample spaces")
                if t.alpha is not None and t.alpha > budget * (1 + BUDGET_SLACK):
                    raise ValueError(f"Term {i} member has level {t.alpha}, above its budget {budget}")
        return chosen

    def evaluator(x: Sample) -> Verdict:
        chosen = active(x.n)
        if not chosen:
            return Verdict.SUSPEND
        verdicts = [[t.evaluator(x) for t in term] for term in chosen]
        zero = all(any(v is Verdict.NULL for v in term) for term in verdicts)
        one = any(all(v is Verdict.ALTERNATIVE for v in term) for term in verdicts)
        return decide(zero, one, "combine")

    def margin(x: Sample) -> float:
        if evaluator(x) is Verdict.SUSPEND:
            return 0.0
        return min(
            (t.margin_fn(x) for term in active(x.n) for t in term),
            default=math.inf,
        )

    preview = [[t.provenance for t in term] for term in terms.take(3)]
    return FpTest(
        name="combine",
        space=space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={
            "test": "combine",
            "alpha": alpha,
            "num_terms": terms.length if terms.is_finite else "unbounded",
            "terms": preview,
        },
        alpha=alpha,
    )


def one_sided_test(terms: LazySequence[Term] | Sequence[Term], alpha: float, space: SampleSpace | None = None) -> FpTest:
    """Test of the closed complement (verdict 0) against the open union of atom intersections (verdict 1)."""
    terms = _as_lazy(terms)

    def tests():
        for i, term in enumerate(terms, start=1):
            yield tuple(subbasis_test(atom, alpha / 2**i) for atom in term)

    if space is None:
        first = terms.take(1)
        if first and first[0]:
            space = first[0][0].space
    return combine(LazySequence(tests, length=terms.length, label="subbasis terms"), alpha, space)


def exchange(t: FpTest) -> FpTest:
    """Swap verdicts 0 and 1."""
    swap = {Verdict.NULL: Verdict.ALTERNATIVE, Verdict.ALTERNATIVE: Verdict.NULL, Verdict.SUSPEND: Verdict.SUSPEND}

    def batch(blocks: np.ndarray) -> np.ndarray:
        v = np.asarray(t.batch_evaluator(blocks))
        return np.where(v == 2, 2, 1 - v)

    return FpTest(
        name="exchange",
        space=t.space,
        evaluator=lambda x: swap[Verdict(t.evaluator(x))],
        margin_fn=t.margin_fn,
        provenance={"test": "exchange", "base": t.provenance},
        alpha=t.alpha,
        open_regions=tuple(sorted(1 - v for v in t.open_regions)),
        batch_evaluator=batch if t.batch_evaluator is not None else None,
    )


def _closed_piece_test(piece: ClosedPiece, alpha: float, space: SampleSpace) -> FpTest:
    if not isinstance(piece, ClosedPiece):
        raise ValueError(f"{piece!r} has no complement representation")
    return one_sided_test(piece.complement, alpha, space)


def empty_piece(space: SampleSpace) -> ClosedPiece:
    """The empty set as a closed piece; its complement is the whole space."""
    return ClosedPiece(label="{}", complement=((SubbasisAtom(OpenSet.whole(space), 0),),))


def fsigma_test(
    H0_pieces: LazySequence[ClosedPiece] | Sequence[ClosedPiece] | None,
    H1_pieces: LazySequence[ClosedPiece] | Sequence[ClosedPiece] | None,
    alpha: float,
    space: SampleSpace,
    max_pieces: int | None = None,
) -> FpTest:
    """Test for H0 = u_m H0^m against H1 = u_m H1^m with closed pieces.

    phi_0^m tests (H0^m, complement) and phi_1^m tests (complement, H1^m); at sample
    size n the first min(n, max_pieces) pieces are used. A finite list of pieces is
    continued by repeating its last piece, and an empty list stands for the empty set.
    """
    if H0_pieces is None or H1_pieces is None:
        raise ValueError("fsigma_test needs closed pieces for both hypotheses")
    TestThresholds(alpha=alpha)
    if max_pieces is not None and max_pieces < 1:
        raise ValueError(f"max_pieces must be at least 1, got {max_pieces}")
    sides = []
    for pieces, flip in ((_as_lazy(H0_pieces), False), (_as_lazy(H1_pieces), True)):
        if pieces.is_finite and pieces.length == 0:
            pieces = LazySequence.of([empty_piece(space)], label="empty")

        def build(pieces=pieces, flip=flip):
            for m, piece in enumerate(pieces, start=1):
                test = _closed_piece_test(piece, alpha / 2**m, space)
                yield exchange(test) if flip else test

        sides.append(LazySequence(build, length=pieces.length, label="piece tests"))
    phi0, phi1 = sides

    def stage(n: int) -> int:
        return n if max_pieces is None else min(n, max_pieces)

    def pick(seq: LazySequence, M: int) -> list[FpTest]:
        chosen = list(seq.take(M))
        while chosen and len(chosen) < M:
            chosen.append(chosen[-1])
        return chosen

    def evaluator(x: Sample) -> Verdict:
        M = stage(x.n)
        if M < 1:
            return Verdict.SUSPEND
        v0 = [t.evaluator(x) for t in pick(phi0, M)]
        v1 = [t.evaluator(x) for t in pick(phi1, M)]
        zero = any(
            v0[m] is Verdict.NULL and all(v is Verdict.NULL for v in v1[: m + 1]) for m in range(M)
        )
        one = any(
            v1[m] is Verdict.ALTERNATIVE and all(v is Verdict.ALTERNATIVE for v in v0[: m + 1])
            for m in range(M)
        )
        return decide(zero, one, "fsigma_test")

    def margin(x: Sample) -> float:
        if evaluator(x) is Verdict.SUSPEND:
            return 0.0
        M = stage(x.n)
        return min(t.margin_fn(x) for t in pick(phi0, M) + pick(phi1, M))

    return FpTest(
        name="fsigma",
        space=space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={
            "test": "fsigma",
            "alpha": alpha,
            "max_pieces": max_pieces,
            "H0_pieces": [p.label for p in _as_lazy(H0_pieces).take(3)],
            "H1_pieces": [p.label for p in _as_lazy(H1_pieces).take(3)],
        },
        alpha=alpha,
    )


def clopen_test(t0: FpTest, t1: FpTest) -> FpTest:
    """Verdict i iff both tests vote i."""
    if t0.space != t1.space:
        raise ValueError("clopen_test needs two tests on the same space")

    def evaluator(x: Sample) -> Verdict:
        a, b = t0.evaluator(x), t1.evaluator(x)
        return decide(
            a is Verdict.NULL and b is Verdict.NULL,
            a is Verdict.ALTERNATIVE and b is Verdict.ALTERNATIVE,
            "clopen_test",
        )

    def margin(x: Sample) -> float:
        if evaluator(x) is Verdict.SUSPEND:
            return 0.0
        return min(t0.margin_fn(x), t1.margin_fn(x))

    alphas = [a for a in (t0.alpha, t1.alpha) if a is not None]
    return FpTest(
        name="clopen",
        space=t0.space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={"test": "clopen", "t0": t0.provenance, "t1": t1.provenance},
        alpha=max(alphas) if alphas else None,
    )


def bl_separated_test(H0: HypothesisRegion, H1: HypothesisRegion, gamma: float | None = None) -> FpTest:
    """Verdict 0 iff d_BL(P_n, H0) < gamma, verdict 1 iff d_BL(P_n, H1) < gamma."""
    separation = region_separation(H0, H1)
    if not separation > 0:
        raise ValueError(f"Hypotheses {H0} and {H1} are not separated")
    if gamma is None:
        gamma = 0.9 * separation / 2
    if not 0 < gamma < separation / 2:
        raise ValueError(f"gamma must lie in (0, {separation / 2}), got {gamma}")

    def distances(x: Sample) -> tuple[float, float]:
        P_n = empirical_measure(x)
        return d_bl_to_set(P_n, H0), d_bl_to_set(P_n, H1)

    def evaluator(x: Sample) -> Verdict:
        if x.n == 0:
            return Verdict.SUSPEND
        d0, d1 = distances(x)
        return decide(d0 < gamma, d1 < gamma, "bl_separated_test")

    def margin(x: Sample) -> float:
        if x.n == 0:
            return 0.0
        d0, d1 = distances(x)
        slack = max(gamma - d0, gamma - d1)
        if slack <= 0:
            return 0.0
        return max(slack, x.space.min_separation)

    return FpTest(
        name="bl_separated",
        space=H0.space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={
            "test": "bl_separated",
            "H0": H0.name,
            "H1": H1.name,
            "gamma": gamma,
            "separation": separation,
        },
    )


def shift(t: FpTest, N: int) -> FpTest:
    """Verdict 0 below sample size N, t's verdict from N on."""
    TestThresholds(alpha=1.0, N=N)

    def evaluator(x: Sample) -> Verdict:
        if x.n < N:
            return Verdict.NULL
        return t.evaluator(x)

    def margin(x: Sample) -> float:
        if x.n < N:
            return math.inf
        return t.margin_fn(x)

    return FpTest(
        name="shift",
        space=t.space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={"test": "shift", "N": N, "base": t.provenance},
        alpha=t.alpha,
        open_regions=t.open_regions,
    )


def to_binary(t: FpTest, merge_into: int) -> FpTest:
    """Remap verdict 2 to `merge_into`; only the other region stays open."""
    if merge_into not in (0, 1):
        raise ValueError(f"merge_into must be 0 or 1, got {merge_into}")
    target = Verdict(merge_into)
    kept = 1 - merge_into

    def evaluator(x: Sample) -> Verdict:
        v = Verdict(t.evaluator(x))
        return target if v is Verdict.SUSPEND else v

    def margin(x: Sample) -> float:
        return t.margin_fn(x) if Verdict(t.evaluator(x)) == kept else 0.0

    return FpTest(
        name="to_binary",
        space=t.space,
        evaluator=evaluator,
        margin_fn=margin,
        provenance={
            "test": "to_binary",
            "merge_into": merge_into,
            "open_regions": [kept],
            "base": t.provenance,
        },
        alpha=t.alpha,
        open_regions=tuple(r for r in t.open_regions if r == kept),
    )
