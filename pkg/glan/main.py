"""Command-line entry point."""
import argparse
import logging
import sys
from typing import Optional, Sequence

import torch
from pydantic import ValidationError

from glan.commands import analysis, checks, data, training
from glan.config import RuntimeSettings
from glan.exceptions import GlanError, describe_error

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

COMMANDS = (data, training, analysis, checks)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glan",
        description="Rumor detection with local and global relation encoding",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_runtime(settings: RuntimeSettings) -> None:
    """Log to stderr at the configured level and cap torch threads."""
    package_logger = logging.getLogger("glan")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    package_logger.addHandler(handler)
    package_logger.setLevel(settings.log_level.upper())
    if settings.threads:
        torch.set_num_threads(settings.threads)


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 on a reported failure, 2 on a usage error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        configure_runtime(RuntimeSettings())
        return args.handler(args)
    except (GlanError, ValidationError, OSError) as e:
        print(f"error: {describe_error(e)}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
