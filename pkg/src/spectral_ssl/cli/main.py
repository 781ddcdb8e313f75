"""Command-line entry point for the spectral-ssl experiments."""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from ..config import LOG_LEVELS, RuntimeConfig
from ..exceptions import ConfigurationError, SpectralSSLError, ValidationError
from ..models.experiment import ExperimentSpec
from ..utils.formatting import format_check
from .experiments import registered_experiments
from .runner import run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_ERROR = 2


def setup_logging(level: str = "INFO") -> None:
    """Configure logging for the command line.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    log_level = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    # Reduce process-pool logging noise from parallel sweeps
    logging.getLogger("concurrent.futures").setLevel(logging.WARNING)


def parse_params(pairs: Sequence[str]) -> dict[str, Any]:
    """Parse repeated key=value overrides into a dict of strings.

    Raises:
        ValidationError: If an item has no '=' or an empty key
    """
    params: dict[str, Any] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ValidationError(f"Expected key=value, got '{pair}'.")
        params[key.strip()] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="spectral-ssl",
        description="Run spectral self-supervised learning experiments.",
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--experiment", metavar="NAME", help="registered experiment to run")
    source.add_argument("--spec", type=Path, metavar="FILE", help="JSON experiment spec")
    source.add_argument("--list", action="store_true", help="list registered experiments")
    parser.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a parameter (repeatable; lists are comma-separated)",
    )
    parser.add_argument("--out", type=Path, metavar="DIR", help="output directory")
    parser.add_argument("--seed", type=int, help="base seed")
    parser.add_argument("--jobs", type=int, help="parallel workers for sweep points")
    parser.add_argument("--log-level", choices=LOG_LEVELS, help="logging level")
    return parser


def _spec_from_args(args: argparse.Namespace, runtime: RuntimeConfig) -> ExperimentSpec:
    overrides = parse_params(args.param)
    if args.spec is not None:
        spec = ExperimentSpec.from_file(args.spec)
        return ExperimentSpec(
            name=spec.name,
            params={**spec.params, **overrides},
            output_dir=args.out if args.out is not None else spec.output_dir,
            seed=args.seed if args.seed is not None else spec.seed,
            jobs=args.jobs if args.jobs is not None else spec.jobs,
        )
    return ExperimentSpec(
        name=args.experiment,
        params=overrides,
        output_dir=args.out if args.out is not None else Path(runtime.output_dir),
        seed=args.seed if args.seed is not None else runtime.seed,
        jobs=args.jobs if args.jobs is not None else runtime.jobs,
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line.

    Exit codes: 0 when every check passed, 1 when a check failed, 2 on a
    usage, configuration or numerical error.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        Process exit code
    """
    from dotenv import load_dotenv

    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        runtime = RuntimeConfig.from_env()
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_ERROR
    setup_logging(args.log_level or runtime.log_level)

    if args.list:
        for experiment in registered_experiments():
            print(f"{experiment.name}: {experiment.description}")
        return EXIT_OK
    if args.experiment is None and args.spec is None:
        parser.print_usage(sys.stderr)
        print("One of --experiment, --spec or --list is required.", file=sys.stderr)
        return EXIT_ERROR

    try:
        report = run(_spec_from_args(args, runtime))
    except SpectralSSLError as e:
        logger.error("Experiment failed: %s", e)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR

    for check in report.checks:
        print(format_check(check))
    print(f"Summary: {report.summary_path}")
    return EXIT_OK if report.passed else EXIT_CHECKS_FAILED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
