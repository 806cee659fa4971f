from .exact import ExactReal
from .measures import (
    Measure,
    MeasureKind,
    Sample,
    empirical_measure,
    measure_of_set,
    sample_iid,
)
from .spaces import (
    BERNOULLI_SPACE,
    REAL_LINE,
    UNIT_INTERVAL,
    DiscreteSpace,
    Interval,
    OpenSet,
    ProductSpace,
    RealSpace,
    SampleSpace,
    exterior,
    neighborhood_of_complement,
    require_same_space,
)

__all__ = [
    "BERNOULLI_SPACE",
    "REAL_LINE",
    "UNIT_INTERVAL",
    "DiscreteSpace",
    "ExactReal",
    "Interval",
    "Measure",
    "MeasureKind",
    "OpenSet",
    "ProductSpace",
    "RealSpace",
    "Sample",
    "SampleSpace",
    "empirical_measure",
    "exterior",
    "measure_of_set",
    "neighborhood_of_complement",
    "require_same_space",
    "sample_iid",
]
