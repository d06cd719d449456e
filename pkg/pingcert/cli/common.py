"""Shared CLI plumbing: argument types, input loading, output and exit codes."""

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from pydantic import BaseModel

from pingcert.errors import PresentationParseError
from pingcert.services.cayley import QuasiParams
from pingcert.services.presentation import Presentation, WordOracle, load_presentation
from pingcert.services.report_store import save_document
from pingcert.services.subgroups import SubgroupSpec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_REFUTED = 3

VERDICT_EXIT = {"CERTIFIED": EXIT_OK, "INCONCLUSIVE": EXIT_INCONCLUSIVE, "REFUTED": EXIT_REFUTED}

BUNDLED = Path(__file__).resolve().parents[1] / "data" / "presentations"


class CommandError(Exception):
    """Raised by handlers to stop with a message and exit code."""

    def __init__(self, exit_code: int, detail: str):
        self.exit_code = exit_code
        self.detail = detail
        super().__init__(detail)


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CommandError(EXIT_USAGE, message)


def natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}")
    return value


def positive(text: str) -> int:
    value = natural(text)
    if value == 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return value


def quasi_params(text: str) -> QuasiParams:
    """`L,LAMBDA,EPS` with rationals allowed, e.g. `20,1/8,10`."""
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected L,LAMBDA,EPS")
    try:
        L, lam, eps = (Fraction(p.strip()) for p in parts)
        return QuasiParams(lam=lam, eps=eps, L=L)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def resolve_presentation_path(text: str) -> Path:
    path = Path(text)
    if path.exists():
        return path
    for candidate in (BUNDLED / path.name, BUNDLED / f"{path.name}.grp"):
        if candidate.exists():
            return candidate
    raise CommandError(EXIT_USAGE, f"presentation file not found: {text}")


def load_oracle(args) -> WordOracle:
    try:
        presentation = load_presentation(resolve_presentation_path(args.pres))
    except PresentationParseError as exc:
        raise CommandError(EXIT_USAGE, f"{args.pres}: {exc}") from None
    return WordOracle(presentation)


def subgroup(oracle: WordOracle, text: Optional[str], name: str) -> SubgroupSpec:
    """Comma-separated generator words; a name bundled with the presentation (`sub:` line) also works."""
    presentation: Presentation = oracle.presentation
    if text is None or not text.strip():
        return SubgroupSpec(oracle, (), name=name)
    if text in presentation.subgroups:
        return SubgroupSpec(oracle, presentation.subgroups[text], name=name)
    try:
        generators = tuple(presentation.parse_word(w.strip()) for w in text.split(",") if w.strip())
        return SubgroupSpec(oracle, generators, name=name)
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, f"--{name}: {exc}") from None


def add_presentation_args(parser: argparse.ArgumentParser, radius_default: int = 4) -> None:
    parser.add_argument("--pres", required=True, help="presentation file (or bundled name: f1, f2, f3, z2, genus2)")
    parser.add_argument("--radius", type=natural, default=radius_default, help="window radius R")
    parser.add_argument("--budget", type=positive, default=None, help="resource budget (vertices or normal forms)")


def add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None, help="write the JSON document here (default: stdout)")
    parser.add_argument("--ledger", type=Path, default=None, help="also store the document in this SQLite ledger")


def emit(args, kind: str, document: BaseModel, summary: str) -> None:
    """JSON to --out (or stdout); the one-line summary goes to stdout after a file write, else stderr."""
    payload = document.model_dump_json(indent=2)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(payload + "\n", encoding="utf-8")
        print(summary)
    else:
        print(payload)
        print(summary, file=sys.stderr)
    if getattr(args, "ledger", None) is not None:
        digest = save_document(args.ledger, kind, document)
        print(f"ledger: {kind} {digest}", file=sys.stderr)
