"""
rbdad command line: accuracy, timing and SLQ benchmark suites
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from config.settings import create_directories, settings
from src.bench.accuracy import run_accuracy_suite
from src.bench.schemas import SlqComparison, TimingCheck, rows_to_frame
from src.bench.slq_demo import PROVIDER_ALIASES, compare_providers, run_slq_demo
from src.bench.timing import run_timing_suite
from src.utils.errors import RbdadError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_ERROR = 2


def cmd_accuracy(args: argparse.Namespace) -> int:
    report = run_accuracy_suite(args.model, seed=args.seed, n_states=args.states, threads=args.threads)
    print(report.to_frame().to_string(index=False))
    if args.out is not None:
        report.write_csv(args.out)
    if not report.passed:
        for row in report.failures:
            logger.error(f"Tolerance breach: {row.function} {row.provider_a} vs {row.provider_b}")
        return EXIT_BREACH
    return EXIT_OK


def cmd_timing(args: argparse.Namespace) -> int:
    report = run_timing_suite(args.model, repetitions=args.reps, emit_dir=args.emit_dir, threads=args.threads)
    print(report.to_frame().to_string(index=False))
    print()
    print(rows_to_frame(report.checks, TimingCheck).to_string(index=False))
    if args.out is not None:
        report.write_csv(args.out)
    return EXIT_OK if report.passed else EXIT_BREACH


def cmd_slq(args: argparse.Namespace) -> int:
    if args.provider == "both":
        comparison = compare_providers(args.problem, args.out, args.threads, args.max_iterations)
        print(rows_to_frame([comparison], SlqComparison).T.to_string(header=False))
        return EXIT_OK if comparison.passed else EXIT_BREACH
    report, _ = run_slq_demo(args.problem, args.provider, args.out, args.threads, args.max_iterations)
    print(report.model_dump_json(indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbdad", description="Rigid-body dynamics derivative benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    acc = sub.add_parser("accuracy", help="Compare derivative providers on random states")
    acc.add_argument("--model", type=Path, required=True)
    acc.add_argument("--seed", type=int, default=settings.RANDOM_SEED)
    acc.add_argument("--states", type=int, default=100)
    acc.add_argument("--threads", type=int, default=1)
    acc.add_argument("--out", type=Path, default=None)
    acc.set_defaults(func=cmd_accuracy)

    tim = sub.add_parser("timing", help="Median Jacobian evaluation times")
    tim.add_argument("--model", type=Path, required=True)
    tim.add_argument("--reps", type=int, default=settings.TIMING_REPETITIONS)
    tim.add_argument("--emit-dir", type=Path, default=None, help="Write compiled program source here")
    tim.add_argument("--threads", type=int, default=1)
    tim.add_argument("--out", type=Path, default=None)
    tim.set_defaults(func=cmd_timing)

    slq = sub.add_parser("slq", help="Solve an SLQ problem and dump its trajectory")
    slq.add_argument("--problem", type=Path, required=True)
    slq.add_argument("--provider", choices=[*PROVIDER_ALIASES, "both"], default="compiled")
    slq.add_argument("--max-iterations", type=int, default=None)
    slq.add_argument("--threads", type=int, default=1)
    slq.add_argument("--out", type=Path, default=None)
    slq.set_defaults(func=cmd_slq)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    create_directories()
    try:
        return args.func(args)
    except RbdadError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
