import argparse
import json
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from config import Settings
from utils.errors import InvalidInputError, NumericalQualityError, ResourceLimitError
from utils.log_formatter import configure_logging

from .execute import load_config, run_experiment, tool_version, write_outputs
from .models import ExperimentKind, OutputFormat
from .selftest import run_selftest

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_INVALID_CONFIG = 2
EXIT_RESOURCE_LIMIT = 3
EXIT_NUMERICAL_QUALITY = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinprep",
        description="State-preparation error experiments for collective-spin interferometry.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one experiment and write its data series")
    run.add_argument("experiment", choices=[kind.value for kind in ExperimentKind])
    run.add_argument("--config", help="JSON experiment config")
    run.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key; VALUE is parsed as JSON, else taken as a string",
    )
    run.add_argument("--out", help="output directory (default: config output, then SPINPREP_OUTPUT_DIR)")
    run.add_argument("--format", choices=[fmt.value for fmt in OutputFormat])

    commands.add_parser("selftest", help="run the sign-convention and invariant gates")
    commands.add_parser("version", help="print the tool version")
    return parser


def _fail(exc: Exception, exit_code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": exit_code}
    print(json.dumps(payload), file=sys.stderr)
    return exit_code


def _run(args: argparse.Namespace, settings: Settings) -> int:
    updates = {"format": args.format} if args.format else {}
    config = load_config(args.config, args.overrides, args.experiment, updates)
    result = run_experiment(config, settings)
    out_dir = args.out or config.output or settings.output_dir
    for path in write_outputs(result, out_dir):
        print(path)
    return EXIT_OK


def _selftest() -> int:
    report = run_selftest()
    for check in report.checks:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    return EXIT_OK if report.passed else EXIT_SELFTEST_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings()  # pyright: ignore [reportCallIssue]
        configure_logging(settings.log_level)
        if args.command == "version":
            print(tool_version())
            return EXIT_OK
        if args.command == "selftest":
            return _selftest()
        return _run(args, settings)
    except (ValidationError, InvalidInputError) as exc:
        return _fail(exc, EXIT_INVALID_CONFIG)
    except ResourceLimitError as exc:
        return _fail(exc, EXIT_RESOURCE_LIMIT)
    except NumericalQualityError as exc:
        return _fail(exc, EXIT_NUMERICAL_QUALITY)


if __name__ == "__main__":
    sys.exit(main())
