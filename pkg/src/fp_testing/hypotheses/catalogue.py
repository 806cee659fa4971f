"""The five Bernoulli hypothesis pairs and their subbasis representations.

1. H0: p in Q n [0, 1]           H1: p in [0, 1] \\ Q              (H1 not F-sigma)
2. H0: p in Q n [0, 1]           H1: p in (Q + sqrt2) n [0, 1]     (both F-sigma)
3. H0: p in [0, 1/2]             H1: p in (1/2, 1]                 (H0 closed)
4. H0: p in [0, 1/2)             H1: p in (1/2, 1]                 (both clopen in W)
5. H0: p in [0, 1/2 - eps]       H1: p in [1/2 + eps, 1]           (disjoint closures)
"""

from __future__ import annotations

from fractions import Fraction

import structlog

from fp_testing.errors import InvariantViolation, SpaceMismatchError
from fp_testing.hypotheses.atoms import (
    ClosedPiece,
    HypothesisPair,
    HypothesisRegion,
    LazySequence,
    Membership,
    SubbasisAtom,
    TopologyClass,
)
from fp_testing.hypotheses.parameters import (
    IntervalUnion,
    IrrationalPoints,
    RationalPoints,
    ShiftedRationalPoints,
)
from fp_testing.measure import BERNOULLI_SPACE, ExactReal, Measure, MeasureKind, OpenSet

logger = structlog.get_logger()

CATALOGUE_IDS = (1, 2, 3, 4, 5)
HALF = Fraction(1, 2)

ONE = OpenSet.discrete(BERNOULLI_SPACE, [1])
ZERO = OpenSet.discrete(BERNOULLI_SPACE, [0])


def success_atom(q) -> SubbasisAtom:
    """{P : P({1}) > q}, i.e. p > q."""
    return SubbasisAtom(ONE, ExactReal.of(q))


def failure_atom(q) -> SubbasisAtom:
    """{P : P({0}) > q}, i.e. p < 1 - q."""
    return SubbasisAtom(ZERO, ExactReal.of(q))


def singleton_closed_complement(r) -> tuple[SubbasisAtom, SubbasisAtom]:
    """Open complement of the Bernoulli singleton {p = r}: {P({1}) > r} u {P({0}) > 1 - r}."""
    r = ExactReal.of(r)
    if r < 0 or r > 1:
        raise ValueError(f"Parameter must lie in [0, 1], got {r}")
    return success_atom(r), failure_atom(1 - r)


def singleton_piece(r) -> ClosedPiece:
    above, below = singleton_closed_complement(r)
    return ClosedPiece(label=f"{{p = {r}}}", complement=((above,), (below,)))


def _singleton_pieces(values, label: str) -> LazySequence[ClosedPiece]:
    return LazySequence(lambda: (singleton_piece(r) for r in values()), label=label)


def parse_epsilon(epsilon) -> Fraction:
    """Exact epsilon; floats are read through their decimal text, so 0.2 means 1/5."""
    if epsilon is None:
        raise ValueError("Catalogue pair 5 needs an epsilon parameter")
    if isinstance(epsilon, float):
        epsilon = str(epsilon)
    eps = ExactReal.of(epsilon)
    if not eps.is_rational:
        raise ValueError(f"epsilon must be rational, got {eps}")
    if not 0 < eps.a < HALF:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {eps}")
    return eps.a


def catalogue(pair_id: int, epsilon=None) -> HypothesisPair:
    if pair_id not in CATALOGUE_IDS:
        raise ValueError(f"Unknown catalogue pair {pair_id}; expected one of {CATALOGUE_IDS}")
    builder = _BUILDERS[pair_id]
    pair = builder(epsilon) if pair_id == 5 else builder()
    logger.debug("Built catalogue pair", pair=pair_id, topology=[t.value for t in pair.topology])
    return pair


def _rational_null() -> HypothesisRegion:
    return HypothesisRegion(
        name="p in Q n [0, 1]",
        space=BERNOULLI_SPACE,
        topology=TopologyClass.F_SIGMA,
        parameter_set=RationalPoints(),
        pieces=_singleton_pieces(RationalPoints().enumerate, "rational singletons"),
    )


def _pair_1() -> HypothesisPair:
    return HypothesisPair(
        pair_id=1,
        H0=_rational_null(),
        H1=HypothesisRegion(
            name="p in [0, 1] \\ Q",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.NONE,
            parameter_set=IrrationalPoints(),
        ),
        space=BERNOULLI_SPACE,
        testable=False,
        description="rational vs irrational success probability; no consistent test exists",
    )


def _pair_2() -> HypothesisPair:
    return HypothesisPair(
        pair_id=2,
        H0=_rational_null(),
        H1=HypothesisRegion(
            name="p in (Q + sqrt2) n [0, 1]",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.F_SIGMA,
            parameter_set=ShiftedRationalPoints(),
            pieces=_singleton_pieces(ShiftedRationalPoints().enumerate, "shifted rational singletons"),
        ),
        space=BERNOULLI_SPACE,
        description="rational vs rational-plus-sqrt2 success probability",
    )


def _pair_3() -> HypothesisPair:
    atom = success_atom(HALF)
    return HypothesisPair(
        pair_id=3,
        H0=HypothesisRegion(
            name="p in [0, 1/2]",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.CLOSED,
            parameter_set=IntervalUnion.closed(0, HALF),
            pieces=LazySequence.of([ClosedPiece("[0, 1/2]", ((atom,),))], label="[0, 1/2]"),
        ),
        H1=HypothesisRegion(
            name="p in (1/2, 1]",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.OPEN,
            parameter_set=IntervalUnion.of(HALF, 1, False, True),
            terms=LazySequence.of([(atom,)], label="p > 1/2"),
        ),
        space=BERNOULLI_SPACE,
        description="closed null [0, 1/2] against (1/2, 1]",
    )


def _pair_4() -> HypothesisPair:
    return HypothesisPair(
        pair_id=4,
        H0=HypothesisRegion(
            name="p in [0, 1/2)",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.CLOPEN_IN_W,
            parameter_set=IntervalUnion.of(0, HALF, True, False),
            terms=LazySequence.of([(failure_atom(HALF),)], label="P({0}) > 1/2"),
        ),
        H1=HypothesisRegion(
            name="p in (1/2, 1]",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.CLOPEN_IN_W,
            parameter_set=IntervalUnion.of(HALF, 1, False, True),
            terms=LazySequence.of([(success_atom(HALF),)], label="P({1}) > 1/2"),
        ),
        space=BERNOULLI_SPACE,
        description="[0, 1/2) against (1/2, 1]; p = 1/2 lies outside W",
    )


def _pair_5(epsilon) -> HypothesisPair:
    eps = parse_epsilon(epsilon)
    lower, upper = HALF - eps, HALF + eps
    return HypothesisPair(
        pair_id=5,
        H0=HypothesisRegion(
            name=f"p in [0, {lower}]",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.CLOSED,
            parameter_set=IntervalUnion.closed(0, lower),
            pieces=LazySequence.of(
                [ClosedPiece(f"[0, {lower}]", ((success_atom(lower),),))], label=f"[0, {lower}]"
            ),
        ),
        H1=HypothesisRegion(
            name=f"p in [{upper}, 1]",
            space=BERNOULLI_SPACE,
            topology=TopologyClass.CLOSED,
            parameter_set=IntervalUnion.closed(upper, 1),
            pieces=LazySequence.of(
                [ClosedPiece(f"[{upper}, 1]", ((failure_atom(lower),),))], label=f"[{upper}, 1]"
            ),
        ),
        space=BERNOULLI_SPACE,
        epsilon=ExactReal(eps),
        description=f"separated intervals with gap ({lower}, {upper})",
    )


_BUILDERS = {1: _pair_1, 2: _pair_2, 3: _pair_3, 4: _pair_4, 5: _pair_5}


def member(pair: HypothesisPair, P: Measure) -> Membership:
    """Exact ground truth for a Bernoulli measure."""
    if P.space != pair.space:
        raise SpaceMismatchError(f"Measure lives on {P.space}, pair on {pair.space}")
    if P.kind is not MeasureKind.BERNOULLI:
        raise ValueError("Catalogue membership is defined for Bernoulli measures only")
    in_h0, in_h1 = pair.H0.contains(P), pair.H1.contains(P)
    if in_h0 and in_h1:
        raise InvariantViolation(f"{P} was assigned to both hypotheses of pair {pair.pair_id}")
    if in_h0:
        return Membership.H0
    if in_h1:
        return Membership.H1
    return Membership.NEITHER


def _interval_topology(parameters: IntervalUnion) -> TopologyClass:
    closed = all(iv.lo_closed and iv.hi_closed for iv in parameters.intervals)
    open_ = all(
        (not iv.lo_closed or iv.lo == 0) and (not iv.hi_closed or iv.hi == 1)
        for iv in parameters.intervals
    )
    if closed:
        return TopologyClass.CLOSED
    if open_:
        return TopologyClass.OPEN
    return TopologyClass.F_SIGMA


def custom_pair(h0: IntervalUnion, h1: IntervalUnion, description: str = "") -> HypothesisPair:
    """Bernoulli hypotheses given by unions of parameter intervals."""
    regions = []
    for label, parameters in (("H0", h0), ("H1", h1)):
        regions.append(
            HypothesisRegion(
                name=f"p in {parameters.description}",
                space=BERNOULLI_SPACE,
                topology=_interval_topology(parameters),
                parameter_set=parameters,
            )
        )
    overlap = [(a, b) for a in h0.intervals for b in h1.intervals if _meet(a, b, h0, h1)]
    if overlap:
        raise ValueError(f"Hypotheses overlap on {overlap[0][0]} and {overlap[0][1]}")
    return HypothesisPair(
        pair_id=None,
        H0=regions[0],
        H1=regions[1],
        space=BERNOULLI_SPACE,
        description=description or f"{regions[0].name} against {regions[1].name}",
    )


def _meet(a, b, h0: IntervalUnion, h1: IntervalUnion) -> bool:
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo < hi:
        return True
    # touching intervals share a point only when both sides include it
    return lo == hi and h0.contains(lo) and h1.contains(lo)
