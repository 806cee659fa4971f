from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from itertools import islice
from typing import Callable, Generic, Iterable, Iterator, TypeVar

from fp_testing.measure import ExactReal, Measure, MeasureKind, OpenSet, SampleSpace
from fp_testing.measure import measure_of_set
from fp_testing.hypotheses.parameters import ParameterSet

T = TypeVar("T")


class TopologyClass(str, Enum):
    CLOSED = "closed"
    OPEN = "open"
    CLOPEN_IN_W = "clopen-in-W"
    F_SIGMA = "f-sigma"
    NONE = "none"


class Membership(str, Enum):
    H0 = "H0"
    H1 = "H1"
    NEITHER = "neither"


@dataclass(frozen=True, slots=True)
class SubbasisAtom:
    """The weak-topology subbasic set {P : P(A) > q}."""

    A: OpenSet
    q: ExactReal

    def __post_init__(self):
        object.__setattr__(self, "q", ExactReal.of(self.q))
        if self.q < 0 or self.q > 1:
            raise ValueError(f"Atom threshold must lie in [0, 1], got {self.q}")

    @property
    def space(self) -> SampleSpace:
        return self.A.space

    def holds(self, P: Measure) -> bool:
        exact = P.exact_mass(self.A)
        if exact is not None:
            return exact > self.q
        return measure_of_set(P, self.A) > float(self.q)

    def margin(self, P: Measure) -> float:
        """P(A) - q; every measure whose mass of A moves by less than this keeps the verdict."""
        return measure_of_set(P, self.A) - float(self.q)

    def describe(self) -> str:
        return f"P({self.A}) > {self.q}"


Term = tuple[SubbasisAtom, ...]


class LazySequence(Generic[T]):
    """A deterministic, possibly infinite sequence materialised on demand.

    Items are cached behind a lock so concurrent readers see one enumeration.
    """

    def __init__(self, factory: Callable[[], Iterable[T]], length: int | None = None, label: str = ""):
        self._factory = factory
        self._length = length
        self._label = label
        self._cache: list[T] = []
        self._source: Iterator[T] | None = None
        self._exhausted = False
        self._lock = threading.Lock()

    @classmethod
    def of(cls, items: Iterable[T], label: str = "") -> LazySequence[T]:
        items = tuple(items)
        return cls(lambda: items, length=len(items), label=label)

    @property
    def length(self) -> int | None:
        return self._length

    @property
    def is_finite(self) -> bool:
        return self._length is not None

    def take(self, k: int) -> tuple[T, ...]:
        """The first k items (fewer if the sequence is shorter)."""
        if k <= len(self._cache) or self._exhausted:
            return tuple(self._cache[:k])
        with self._lock:
            if self._source is None:
                self._source = iter(self._factory())
            missing = k - len(self._cache)
            fresh = list(islice(self._source, missing))
            if len(fresh) < missing:
                self._exhausted = True
            self._cache.extend(fresh)
            return tuple(self._cache[:k])

    def __getitem__(self, i: int) -> T:
        items = self.take(i + 1)
        if len(items) <= i:
            raise IndexError(i)
        return items[i]

    def __iter__(self) -> Iterator[T]:
        i = 0
        while True:
            items = self.take(i + 1)
            if len(items) <= i:
                return
            yield items[i]
            i += 1

    def __repr__(self):
        size = "inf" if self._length is None else self._length
        return f"LazySequence({self._label or '...'}, length={size})"


@dataclass(frozen=True)
class ClosedPiece:
    """A closed set given through the subbasis representation of its open complement."""

    label: str
    complement: tuple[Term, ...]

    def __post_init__(self):
        if not self.complement:
            raise ValueError(f"Piece {self.label} needs a complement representation")

    def contains(self, P: Measure) -> bool:
        return not any(all(atom.holds(P) for atom in term) for term in self.complement)


@dataclass(frozen=True)
class HypothesisRegion:
    """A hypothesis with whatever representations are available for it.

    `terms` is the open form (union over terms of the intersection of their atoms);
    `pieces` is the F-sigma form (union of closed pieces); `parameter_set` and
    `measures` give exact membership and distances.
    """

    name: str
    space: SampleSpace
    topology: TopologyClass
    parameter_set: ParameterSet | None = None
    measures: tuple[Measure, ...] | None = None
    terms: LazySequence[Term] | None = None
    pieces: LazySequence[ClosedPiece] | None = None

    def contains(self, P: Measure) -> bool:
        if self.parameter_set is not None and P.kind is MeasureKind.BERNOULLI:
            return self.parameter_set.contains(P.p)
        if self.measures is not None:
            return P in self.measures
        if self.terms is not None and self.terms.is_finite:
            return any(all(atom.holds(P) for atom in term) for term in self.terms)
        raise ValueError(f"Membership in {self.name} is not decidable for {P}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class HypothesisPair:
    pair_id: int | None
    H0: HypothesisRegion
    H1: HypothesisRegion
    space: SampleSpace
    testable: bool = True
    epsilon: ExactReal | None = None
    description: str = ""

    def __post_init__(self):
        if self.H0.space != self.space or self.H1.space != self.space:
            raise ValueError("Both hypotheses must live on the pair's space")

    @property
    def topology(self) -> tuple[TopologyClass, TopologyClass]:
        return (self.H0.topology, self.H1.topology)
