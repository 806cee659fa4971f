import argparse
import logging
import os
import sys
from pathlib import Path

import structlog
from dotenv import load_dotenv

from fp_testing.config import SimConfig, load_sim_config, parse_sim_config
from fp_testing.errors import ConfigError, InvariantViolation, SolverError
from fp_testing.harness import bl_check, ci_bench, ci_passed, run_simulation, sweep_consistency, write_result
from fp_testing.hypotheses import CATALOGUE_IDS, catalogue

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3

DEFAULT_PAIR_EPSILON = "1/5"


def configure_logging(level: str):
    structlog.configure(wrapper_class=structlog.make_filtering_bound_logger(getattr(logging, level.upper())))


def _apply_overrides(cfg: SimConfig, args) -> SimConfig:
    updates = {}
    for name in ("seed", "out", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if not updates:
        return cfg
    return parse_sim_config({**cfg.model_dump(), **updates})


def _finish(result, out: Path | None):
    if out is not None:
        write_result(result, out)
    for row in result.rows:
        logger.info(
            "Verdict frequencies",
            n=row.n,
            freq0=row.freq0,
            freq1=row.freq1,
            freq2=row.freq2,
            mc_se=row.mc_se,
            bound=row.bound,
        )
    if result.flags:
        logger.warning("Result flags", flags=result.flags)


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(load_sim_config(args.config), args)
    logger.info("Loaded simulation config", config_file=str(Path(args.config).resolve()))
    _finish(run_simulation(cfg), cfg.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    test = {"name": args.test, "alpha": args.alpha, "max_pieces": args.max_pieces}
    if args.margin_epsilon is not None:
        test["epsilon"] = args.margin_epsilon
    if args.gamma is not None:
        test["gamma"] = args.gamma
    data = {
        "pair": args.pair,
        "test": test,
        "true_param": args.p,
        "n_grid": [int(n) for n in args.n_grid.split(",") if n],
        "reps": args.reps,
        "seed": args.seed if args.seed is not None else 0,
        "workers": args.workers,
    }
    if args.pair == 5:
        data["epsilon"] = args.pair_epsilon or DEFAULT_PAIR_EPSILON
    if args.out is not None:
        data["out"] = args.out
    cfg = parse_sim_config(data)
    result = sweep_consistency(cfg)
    _finish(result, cfg.out)
    logger.info("Consistency curve", correct_verdict=result.correct_verdict, curve=result.curve)
    return EXIT_OK


def cmd_blcheck(args) -> int:
    if args.instances < 1:
        raise ConfigError("instances must be at least 1", field="instances")
    report = bl_check(args.instances, args.tol, args.seed or 0)
    if not report.passed:
        logger.error("BL oracle checks failed", **report.model_dump())
        return EXIT_INVARIANT
    logger.info("BL oracle checks passed", **report.model_dump())
    return EXIT_OK


def cmd_ci(args) -> int:
    result = ci_bench(
        args.mode,
        n=args.n,
        epsilon=args.eps,
        gamma=args.gamma,
        reps=args.reps,
        seed=args.seed or 0,
        workers=args.workers,
        fixtures=args.fixtures,
    )
    _finish(result, args.out)
    if not ci_passed(result):
        logger.error("densify_ci checks failed", **result.checks)
        return EXIT_INVARIANT
    return EXIT_OK


def _catalogue_pair(pair_id: int):
    return catalogue(pair_id, DEFAULT_PAIR_EPSILON if pair_id == 5 else None)


def cmd_catalogue(args) -> int:
    if args.pair is not None:
        pair = _catalogue_pair(args.pair)
        print(f"{pair.pair_id}  {pair.description}")
        for region in (pair.H0, pair.H1):
            print(f"  {region.name} [{region.topology.value}]")
            if region.terms is not None:
                for term in region.terms.take(args.terms):
                    print("    " + " and ".join(atom.describe() for atom in term))
            elif region.pieces is not None:
                for piece in region.pieces.take(args.terms):
                    print(f"    closed piece {piece.label}")
            else:
                print("    no representation")
        return EXIT_OK
    if not args.list:
        raise ConfigError("catalogue needs --list or --pair", field="catalogue")
    for pair_id in CATALOGUE_IDS:
        pair = _catalogue_pair(pair_id)
        h0, h1 = pair.topology
        print(f"{pair_id}  H0: {pair.H0.name:<22} [{h0.value}]  H1: {pair.H1.name:<28} [{h1.value}]  testable={pair.testable}")
    return EXIT_OK


def parse_args(argv=None):
    load_dotenv()
    workers = int(os.getenv("FP_TESTING_WORKERS", "1"))
    log_level = os.getenv("FP_TESTING_LOG_LEVEL", "info")

    parser = argparse.ArgumentParser(
        description="Finite-precision hypothesis tests: Monte-Carlo simulations and oracle checks."
    )
    parser.add_argument("--log-level", default=log_level, help="Minimum log level (debug, info, warning, error)")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Run a simulation from a YAML config")
    simulate.add_argument("--config", required=True, help="Path to simulation config YAML file")
    simulate.add_argument("--seed", type=int, help="Override the config seed")
    simulate.add_argument("--out", type=Path, help="Override the CSV output path")
    simulate.add_argument("--workers", type=int, help="Override the number of worker threads")
    simulate.set_defaults(handler=cmd_simulate)

    sweep = sub.add_parser("sweep", help="Consistency curve of a test on a catalogue pair")
    sweep.add_argument("--pair", type=int, required=True, choices=CATALOGUE_IDS)
    sweep.add_argument("--test", required=True, help="subbasis, amplify, clopen, bl_separated or fsigma")
    sweep.add_argument("--p", required=True, help="True Bernoulli parameter, e.g. 0.9, 1/3 or sqrt2/2")
    sweep.add_argument("--n-grid", default="10,100,1000", help="Comma separated sample sizes")
    sweep.add_argument("--reps", type=int, default=1000)
    sweep.add_argument("--alpha", type=float, default=0.05)
    sweep.add_argument("--gamma", type=float, help="Margin of the bl_separated test")
    sweep.add_argument("--margin-epsilon", type=float, help="Amplification epsilon for the bound column")
    sweep.add_argument("--pair-epsilon", help="Gap half-width of pair 5")
    sweep.add_argument("--max-pieces", type=int, default=32)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--out", type=Path)
    sweep.add_argument("--workers", type=int, default=workers)
    sweep.set_defaults(handler=cmd_sweep)

    blcheck = sub.add_parser("blcheck", help="Check the d_BL solver against its oracles")
    blcheck.add_argument("--instances", type=int, default=200)
    blcheck.add_argument("--tol", type=float, default=1e-9)
    blcheck.add_argument("--seed", type=int)
    blcheck.set_defaults(handler=cmd_blcheck)

    ci = sub.add_parser("ci", help="Conditional-independence test level, power or densify checks")
    ci.add_argument("--mode", required=True, choices=("independent", "dependent", "densify"))
    ci.add_argument("--n", type=int, default=2000)
    ci.add_argument("--eps", type=float)
    ci.add_argument("--gamma", type=float)
    ci.add_argument("--reps", type=int, default=1000)
    ci.add_argument("--fixtures", type=int, default=100)
    ci.add_argument("--seed", type=int)
    ci.add_argument("--out", type=Path)
    ci.add_argument("--workers", type=int, default=workers)
    ci.set_defaults(handler=cmd_ci)

    cat = sub.add_parser("catalogue", help="Show the hypothesis catalogue")
    cat.add_argument("--list", action="store_true", help="List all pairs")
    cat.add_argument("--pair", type=int, choices=CATALOGUE_IDS, help="Show the open terms of one pair")
    cat.add_argument("--terms", type=int, default=3, help="Number of terms to show per hypothesis")
    cat.set_defaults(handler=cmd_catalogue)

    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except FileNotFoundError as e:
        logger.error("Configuration file not found", error=str(e))
        return EXIT_CONFIG
    except InvariantViolation as e:
        logger.error("Invariant violated", error=str(e))
        return EXIT_INVARIANT
    except SolverError as e:
        logger.error("Linear program solver failed", error=str(e))
        return EXIT_INVARIANT
    except ValueError as e:
        logger.error("Invalid configuration", error=str(e), field=getattr(e, "field", None))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
