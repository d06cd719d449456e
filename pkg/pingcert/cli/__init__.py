"""Command-line subcommands."""

from pingcert.cli import certify, geometry, quotients

COMMAND_MODULES = (geometry, certify, quotients)


def register_commands(subparsers) -> None:
    for module in COMMAND_MODULES:
        module.register(subparsers)
