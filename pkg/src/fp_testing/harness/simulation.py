"""Seeded Monte-Carlo estimation of verdict frequencies over a grid of sample sizes.

Replicate r at sample size n draws from the stream SeedSequence([seed, n, r]), so a
row depends only on the config, never on how replicates are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable

import numpy as np
import structlog
from pydantic import BaseModel, Field

from fp_testing.config import SimConfig, TestParams
from fp_testing.errors import ConfigError
from fp_testing.fptest import (
    FpTest,
    Verdict,
    amplification_error_bound,
    amplify,
    bl_separated_test,
    clopen_test,
    exchange,
    fsigma_test,
    one_sided_test,
    separated_error_bound,
    shift,
    subbasis_error_bound,
    subbasis_test,
    to_binary,
)
from fp_testing.hypotheses import (
    HypothesisPair,
    IntervalUnion,
    LazySequence,
    Membership,
    TopologyClass,
    catalogue,
    custom_pair,
    member,
)
from fp_testing.measure import ExactReal, Interval, Measure, Sample, sample_iid

logger = structlog.get_logger()

CHUNK_SIZE = 256
NOISE_SIGMAS = 3.0


class SimRow(BaseModel):
    pair: str
    test: str
    n: int
    reps: int
    true_param: str
    freq0: float
    freq1: float
    freq2: float
    mc_se: float
    bound: float | None = None
    seed: int


class SimResult(BaseModel):
    rows: list[SimRow] = Field(default_factory=list)
    provenance: dict[str, Any] = Field(default_factory=dict)
    flags: list[str] = Field(default_factory=list)
    checks: dict[str, int] = Field(default_factory=dict)
    # verdict whose frequency forms the consistency curve (sweeps only)
    correct_verdict: int | None = None
    curve: list[float] = Field(default_factory=list)


def mc_standard_error(freqs: tuple[float, ...], reps: int) -> float:
    """Largest sqrt(f (1 - f) / reps) over the verdict frequencies."""
    return max(math.sqrt(f * (1.0 - f) / reps) for f in freqs)


def build_pair(cfg: SimConfig) -> HypothesisPair:
    if cfg.custom is None:
        return catalogue(cfg.pair, cfg.epsilon)

    def union(specs) -> IntervalUnion:
        return IntervalUnion(
            tuple(
                Interval(_exact(s.lo), _exact(s.hi), s.lo_closed, s.hi_closed) for s in specs
            )
        )

    try:
        return custom_pair(union(cfg.custom.h0), union(cfg.custom.h1))
    except ValueError as e:
        raise ConfigError(f"Invalid custom pair: {e}", field="custom") from e


def _exact(token):
    return ExactReal.of(str(token) if isinstance(token, float) else token).a


def _open_test(pair: HypothesisPair, side: str, params: TestParams) -> FpTest:
    """Test of (complement of the open side, open side) from its subbasis terms."""
    region = pair.H1 if side == "H1" else pair.H0
    if region.terms is None:
        raise ConfigError(
            f"Test {params.name} needs an open representation of {side} ({region.name})",
            field="test.name",
        )
    first = region.terms.take(2)
    if region.terms.is_finite and len(first) == 1 and len(first[0]) == 1:
        return subbasis_test(first[0][0], params.alpha)
    return one_sided_test(region.terms, params.alpha, pair.space)


def _subbasis(pair: HypothesisPair, params: TestParams) -> FpTest:
    return _open_test(pair, "H1", params)


def _amplify(pair: HypothesisPair, params: TestParams) -> FpTest:
    return amplify(_open_test(pair, "H1", params), params.log_base)


def _clopen(pair: HypothesisPair, params: TestParams) -> FpTest:
    return clopen_test(_open_test(pair, "H1", params), exchange(_open_test(pair, "H0", params)))


def _bl_separated(pair: HypothesisPair, params: TestParams) -> FpTest:
    return bl_separated_test(pair.H0, pair.H1, params.gamma)


def _fsigma(pair: HypothesisPair, params: TestParams) -> FpTest:
    pieces = []
    for region in (pair.H0, pair.H1):
        if region.pieces is not None:
            pieces.append(region.pieces)
        elif region.topology is TopologyClass.NONE:
            # no F-sigma form exists; the test can only ever treat it as empty
            pieces.append(LazySequence.of([], label="unrepresentable"))
        else:
            raise ConfigError(f"{region.name} has no closed pieces", field="test.name")
    return fsigma_test(pieces[0], pieces[1], params.alpha, pair.space, params.max_pieces)


TEST_BUILDERS: dict[str, Callable[[HypothesisPair, TestParams], FpTest]] = {
    "subbasis": _subbasis,
    "amplify": _amplify,
    "clopen": _clopen,
    "bl_separated": _bl_separated,
    "fsigma": _fsigma,
}


def build_test(pair: HypothesisPair, params: TestParams) -> FpTest:
    """The configured constructor, wrapped in shift and to_binary when requested."""
    try:
        test = TEST_BUILDERS[params.name](pair, params)
        if params.N is not None:
            test = shift(test, params.N)
        if params.merge_into is not None:
            test = to_binary(test, params.merge_into)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"Cannot build test {params.name}: {e}", field="test") from e
    return test


def theoretical_bound(test: FpTest, params: TestParams, n: int) -> float | None:
    """Closed-form error bound for the base constructor at sample size n, if it has one."""
    if params.N is not None and n < params.N:
        return None
    if params.name == "subbasis" and _innermost(test.provenance)["test"] == "subbasis":
        return subbasis_error_bound(n, params.alpha)
    if params.name == "amplify" and params.epsilon is not None:
        return amplification_error_bound(n, params.epsilon, params.log_base)
    if params.name == "bl_separated":
        return separated_error_bound(n, _find(test.provenance, "gamma"))
    return None


def _innermost(provenance: dict) -> dict:
    while "base" in provenance:
        provenance = provenance["base"]
    return provenance


def _find(provenance: dict, key: str):
    if key in provenance:
        return provenance[key]
    return _find(provenance["base"], key)


def replicate_stream(seed: int, n: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n, r]))


def verdict_counts(
    test: FpTest,
    draw: Callable[[int, np.random.Generator], Sample],
    n: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Counts of verdicts 0, 1, 2 over reps replicates; independent of `workers`."""

    def run_chunk(start: int) -> list[int]:
        stop = min(start + CHUNK_SIZE, reps)
        return [int(test(draw(n, replicate_stream(seed, n, r)))) for r in range(start, stop)]

    starts = range(0, reps, CHUNK_SIZE)
    if workers == 1:
        chunks = [run_chunk(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            # map yields in submission order, i.e. by replicate index
            chunks = list(executor.map(run_chunk, starts))
    verdicts = np.fromiter((v for chunk in chunks for v in chunk), dtype=np.int64, count=reps)
    return np.bincount(verdicts, minlength=3)[:3]


def frequency_row(counts: np.ndarray, reps: int, **fields) -> SimRow:
    freqs = tuple(float(c) / reps for c in counts)
    return SimRow(
        reps=reps,
        freq0=freqs[0],
        freq1=freqs[1],
        freq2=freqs[2],
        mc_se=mc_standard_error(freqs, reps),
        **fields,
    )


def config_provenance(cfg: SimConfig) -> dict[str, Any]:
    # sidecar is independent of worker count and output path
    return cfg.model_dump(mode="json", exclude={"workers", "out"})


def run_simulation(cfg: SimConfig) -> SimResult:
    """Verdict frequencies of the configured test under the configured Bernoulli law."""
    pair = build_pair(cfg)
    test = build_test(pair, cfg.test)
    p = cfg.parameter
    truth = Measure.bernoulli(p)
    pair_label = "custom" if cfg.pair is None else str(cfg.pair)

    def draw(n: int, rng: np.random.Generator) -> Sample:
        return sample_iid(truth, n, rng)

    logger.info(
        "Starting simulation",
        pair=pair_label,
        test=cfg.test.name,
        true_param=str(p),
        n_grid=cfg.n_grid,
        reps=cfg.reps,
        workers=cfg.workers,
    )
    rows = []
    for n in cfg.n_grid:
        counts = verdict_counts(test, draw, n, cfg.reps, cfg.seed, cfg.workers)
        row = frequency_row(
            counts,
            cfg.reps,
            pair=pair_label,
            test=cfg.test.name,
            n=n,
            true_param=str(p),
            bound=theoretical_bound(test, cfg.test, n),
            seed=cfg.seed,
        )
        logger.info(
            "Finished simulation grid point",
            n=n,
            freq0=row.freq0,
            freq1=row.freq1,
            freq2=row.freq2,
        )
        rows.append(row)

    flags = []
    if cfg.test.name == "bl_separated":
        flags.append("bound-exponent-flagged")
    if not pair.testable:
        flags.append("untestable")
    provenance = {
        "config": config_provenance(cfg),
        "pair": {
            "id": cfg.pair,
            "description": pair.description,
            "topology": [t.value for t in pair.topology],
            "testable": pair.testable,
        },
        "test": test.provenance,
        "flags": flags,
    }
    return SimResult(rows=rows, provenance=provenance, flags=flags)


def membership(pair: HypothesisPair, p) -> Membership:
    P = Measure.bernoulli(p)
    if pair.pair_id is not None:
        return member(pair, P)
    in_h0, in_h1 = pair.H0.contains(P), pair.H1.contains(P)
    if in_h0:
        return Membership.H0
    return Membership.H1 if in_h1 else Membership.NEITHER


def _correct_verdict(m: Membership) -> Verdict:
    return {
        Membership.H0: Verdict.NULL,
        Membership.H1: Verdict.ALTERNATIVE,
        Membership.NEITHER: Verdict.SUSPEND,
    }[m]


def non_monotone(curve: list[float], reps: int) -> bool:
    """True when some later point drops below an earlier one by more than the noise."""
    se = [math.sqrt(f * (1 - f) / reps) for f in curve]
    best, best_se = -math.inf, 0.0
    for f, s in zip(curve, se):
        if f < best - NOISE_SIGMAS * math.hypot(s, best_se):
            return True
        if f > best:
            best, best_se = f, s
    return False


def sweep_consistency(cfg: SimConfig) -> SimResult:
    """Frequency of the correct verdict along the n-grid, with consistency flags."""
    pair = build_pair(cfg)
    truth = membership(pair, cfg.parameter)
    correct = _correct_verdict(truth)
    result = run_simulation(cfg)
    curve = [(row.freq0, row.freq1, row.freq2)[correct] for row in result.rows]

    flags = list(result.flags)
    if truth is Membership.NEITHER:
        logger.warning("True distribution lies in neither hypothesis", true_param=str(cfg.parameter))
        flags.append("neither")
    if non_monotone(curve, cfg.reps):
        logger.warning("Consistency curve is not monotone beyond noise", curve=curve)
        flags.append("non-monotone")
    provenance = {**result.provenance, "flags": flags, "membership": truth.value}
    return result.model_copy(
        update={
            "flags": flags,
            "provenance": provenance,
            "correct_verdict": int(correct),
            "curve": curve,
        }
    )
