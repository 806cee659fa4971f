from .atoms import (
    ClosedPiece,
    HypothesisPair,
    HypothesisRegion,
    LazySequence,
    Membership,
    SubbasisAtom,
    Term,
    TopologyClass,
)
from .catalogue import (
    CATALOGUE_IDS,
    catalogue,
    custom_pair,
    failure_atom,
    member,
    parse_epsilon,
    singleton_closed_complement,
    singleton_piece,
    success_atom,
)
from .parameters import (
    IntervalUnion,
    IrrationalPoints,
    ParameterSet,
    PredicateSet,
    RationalPoints,
    ShiftedRationalPoints,
    farey_rationals,
    shifted_rationals,
)

__all__ = [
    "CATALOGUE_IDS",
    "ClosedPiece",
    "HypothesisPair",
    "HypothesisRegion",
    "IntervalUnion",
    "IrrationalPoints",
    "LazySequence",
    "Membership",
    "ParameterSet",
    "PredicateSet",
    "RationalPoints",
    "ShiftedRationalPoints",
    "SubbasisAtom",
    "Term",
    "TopologyClass",
    "catalogue",
    "custom_pair",
    "failure_atom",
    "farey_rationals",
    "member",
    "parse_epsilon",
    "shifted_rationals",
    "singleton_closed_complement",
    "singleton_piece",
    "success_atom",
]
