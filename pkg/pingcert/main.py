"""Command-line entry point."""

import logging
import sys
from typing import Optional, Sequence

from pingcert import __version__
from pingcert.cli import register_commands
from pingcert.cli.common import EXIT_INCONCLUSIVE, EXIT_USAGE, ArgumentParser, CommandError
from pingcert.config import get_settings
from pingcert.errors import (
    InconclusiveError,
    PingCertError,
    RadiusTooSmallError,
    ResourceBudgetError,
    WindowError,
)

logger = logging.getLogger(__name__)

WINDOW_ERRORS = (WindowError, RadiusTooSmallError, ResourceBudgetError, InconclusiveError)


def create_application() -> ArgumentParser:
    """Create and configure the argument parser with every subcommand."""
    settings = get_settings()
    parser = ArgumentParser(
        prog=settings.app_name,
        description="Certify free-product decompositions of subgroups on finite Cayley-ball windows.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="stderr log level")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    register_commands(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = create_application()
    try:
        args = parser.parse_args(argv)
    except CommandError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code

    logging.basicConfig(
        level=args.log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except CommandError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    except WINDOW_ERRORS as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (PingCertError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
