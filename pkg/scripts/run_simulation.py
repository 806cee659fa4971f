import argparse
import sys

import structlog
from dotenv import load_dotenv

from fp_testing.cli import EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, configure_logging
from fp_testing.config import load_sim_config
from fp_testing.errors import InvariantViolation, SolverError
from fp_testing.harness import run_simulation, write_result

logger = structlog.get_logger()

load_dotenv()


def parse_args():
    parser = argparse.ArgumentParser(
        description="Run every simulation config given on the command line."
    )
    parser.add_argument("config_files", nargs="+", help="Paths to simulation config YAML files")
    parser.add_argument("--log-level", default="info")
    return parser.parse_args()


if __name__ == "__main__":
    args = parse_args()
    configure_logging(args.log_level)

    status = EXIT_OK
    for config_file in args.config_files:
        try:
            cfg = load_sim_config(config_file)
            result = run_simulation(cfg)
            if cfg.out is None:
                logger.warning("Config has no output path; results were not written", config_file=config_file)
                continue
            write_result(result, cfg.out)
        except (InvariantViolation, SolverError) as e:
            logger.error("Simulation hit an invariant violation", config_file=config_file, error=str(e))
            status = EXIT_INVARIANT
        except (FileNotFoundError, ValueError) as e:
            logger.error("Failed to run simulation", config_file=config_file, error=str(e))
            status = max(status, EXIT_CONFIG)
    sys.exit(status)
