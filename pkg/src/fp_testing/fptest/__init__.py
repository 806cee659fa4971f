from .constructors import (
    amplify,
    bl_separated_test,
    clopen_test,
    combine,
    empty_piece,
    exchange,
    fsigma_test,
    one_sided_test,
    shift,
    subbasis_regions,
    subbasis_test,
    to_binary,
)
from .fp_test import (
    FpTest,
    TestThresholds,
    Verdict,
    amplification_error_bound,
    block_sizes,
    decide,
    evaluate,
    separated_error_bound,
    subbasis_error_bound,
    t_n,
)

__all__ = [
    "FpTest",
    "TestThresholds",
    "Verdict",
    "amplification_error_bound",
    "amplify",
    "bl_separated_test",
    "block_sizes",
    "clopen_test",
    "combine",
    "decide",
    "empty_piece",
    "evaluate",
    "exchange",
    "fsigma_test",
    "one_sided_test",
    "separated_error_bound",
    "shift",
    "subbasis_error_bound",
    "subbasis_regions",
    "subbasis_test",
    "t_n",
    "to_binary",
]
