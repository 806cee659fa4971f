import csv
import json
from pathlib import Path

import structlog

from fp_testing.harness.simulation import SimResult

logger = structlog.get_logger()

CSV_HEADER = ("pair", "test", "n", "reps", "true_param", "freq0", "freq1", "freq2", "mc_se", "bound", "seed")


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def provenance_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".provenance.json")


def write_result(result: SimResult, out: str | Path) -> tuple[Path, Path]:
    """Write the CSV table and its `<out>.provenance.json` sidecar."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in result.rows:
            writer.writerow(format_value(getattr(row, column)) for column in CSV_HEADER)

    sidecar = provenance_path(out)
    payload = {
        "provenance": result.provenance,
        "flags": result.flags,
        "checks": result.checks,
        "correct_verdict": result.correct_verdict,
        "curve": result.curve,
    }
    sidecar.write_text(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")
    logger.info("Wrote result files", csv=str(out), provenance=str(sidecar), rows=len(result.rows))
    return out, sidecar
