from .checks import BlCheckReport, bl_check, ci_bench, ci_passed
from .output import CSV_HEADER, format_value, provenance_path, write_result
from .simulation import (
    TEST_BUILDERS,
    SimResult,
    SimRow,
    build_pair,
    build_test,
    mc_standard_error,
    membership,
    non_monotone,
    replicate_stream,
    run_simulation,
    sweep_consistency,
    theoretical_bound,
    verdict_counts,
)

__all__ = [
    "CSV_HEADER",
    "TEST_BUILDERS",
    "BlCheckReport",
    "SimResult",
    "SimRow",
    "bl_check",
    "build_pair",
    "build_test",
    "ci_bench",
    "ci_passed",
    "format_value",
    "mc_standard_error",
    "membership",
    "non_monotone",
    "provenance_path",
    "replicate_stream",
    "run_simulation",
    "sweep_consistency",
    "theoretical_bound",
    "verdict_counts",
    "write_result",
]
