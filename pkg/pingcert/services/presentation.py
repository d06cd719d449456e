"""Finite presentations and exact word-problem oracles."""

import hashlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, Optional, Sequence

from pingcert.errors import PresentationParseError, UnsupportedPresentationError
from pingcert.services.words import (
    DEFAULT_NAMES,
    Word,
    cyclic_shifts,
    cyclically_reduce,
    exponent_sums,
    format_letters,
    invert_letters,
    parse_letters,
    reduce_letters,
    shortlex_key,
)

logger = logging.getLogger(__name__)

C16_BOUND = Fraction(1, 6)


class OracleKind(str, Enum):
    FREE_GROUP = "FreeGroup"
    DEHN_C16 = "DehnC16"
    FREE_ABELIAN_CONTROL = "FreeAbelianControl"


@dataclass(frozen=True)
class Presentation:
    names: tuple[str, ...]
    relators: tuple[Word, ...]
    oracle_kind: OracleKind
    subgroups: dict[str, tuple[Word, ...]] = field(default_factory=dict, compare=False, hash=False)

    @property
    def rank(self) -> int:
        return len(self.names)

    def canonical_text(self) -> str:
        lines = ["gens: " + " ".join(self.names)]
        lines += ["rel: " + format_letters(r.letters, self.names) for r in self.relators]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def parse_word(self, text: str) -> Word:
        return Word(parse_letters(text, self.names))

    def format_word(self, w: Word) -> str:
        return format_letters(w.letters, self.names)


@dataclass(frozen=True)
class SmallCancellationReport:
    passed: bool
    max_ratio: Fraction
    witness_piece: Optional[Word] = None
    relator: Optional[Word] = None


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_presentation(text: str, bound: Fraction = C16_BOUND) -> Presentation:
    """Parse `gens:` / `rel:` / `sub:` lines and pick the oracle kind."""
    names: Optional[tuple[str, ...]] = None
    relators: list[Word] = []
    subgroups: dict[str, tuple[Word, ...]] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise PresentationParseError(line_no, f"malformed line {raw.strip()!r}")
        key = key.strip().lower()
        value = value.strip()

        if names is None:
            if key != "gens":
                raise PresentationParseError(line_no, "first line must declare `gens:`")
            gens = tuple(value.split())
            if not gens:
                raise PresentationParseError(line_no, "no generators declared")
            for g in gens:
                if len(g) != 1 or not g.islower() or g not in DEFAULT_NAMES:
                    raise PresentationParseError(line_no, f"generator {g!r} must be one lowercase letter")
            if len(set(gens)) != len(gens):
                raise PresentationParseError(line_no, "duplicate generator")
            names = gens
            continue

        if key == "rel":
            try:
                letters = parse_letters(value, names)
            except ValueError as exc:
                raise PresentationParseError(line_no, str(exc)) from exc
            core, _ = cyclically_reduce(Word(letters))
            if not core:
                raise PresentationParseError(line_no, "empty relator")
            relators.append(core)
        elif key == "sub":
            sub_name, eq, gens_text = value.partition("=")
            sub_name = sub_name.strip()
            if not eq or not sub_name:
                raise PresentationParseError(line_no, "expected `sub: <name> = <word>, ...`")
            try:
                words = tuple(Word(reduce_letters(parse_letters(part, names))) for part in gens_text.split(","))
            except ValueError as exc:
                raise PresentationParseError(line_no, str(exc)) from exc
            subgroups[sub_name] = words
        else:
            raise PresentationParseError(line_no, f"unknown directive {key!r}")

    if names is None:
        raise PresentationParseError(1, "missing `gens:` line")

    kind = _select_oracle_kind(names, relators, bound)
    logger.info("parsed presentation on %d generators, %d relators: %s", len(names), len(relators), kind.value)
    return Presentation(names=names, relators=tuple(relators), oracle_kind=kind, subgroups=subgroups)


def load_presentation(path) -> Presentation:
    with open(path, "r", encoding="utf-8") as f:
        return parse_presentation(f.read())


def _select_oracle_kind(names: Sequence[str], relators: Sequence[Word], bound: Fraction) -> OracleKind:
    if not relators:
        return OracleKind.FREE_GROUP
    report = check_metric_small_cancellation(relators, bound)
    if report.passed:
        return OracleKind.DEHN_C16
    if is_commutator_control(relators, len(names)):
        return OracleKind.FREE_ABELIAN_CONTROL
    piece = format_letters(report.witness_piece.letters, names) if report.witness_piece else ""
    raise UnsupportedPresentationError(
        f"unsupported presentation: piece {piece!r} has ratio {report.max_ratio} >= {bound} "
        "and the relators are not a free-abelian commutator set"
    )


def _symmetrized(relators: Sequence[Word]) -> list[tuple[int, ...]]:
    entries: list[tuple[int, ...]] = []
    for r in relators:
        entries.extend(cyclic_shifts(r.letters))
        entries.extend(cyclic_shifts(invert_letters(r.letters)))
    return entries


def _common_prefix(u: tuple[int, ...], v: tuple[int, ...]) -> int:
    n = 0
    for x, y in zip(u, v):
        if x != y:
            break
        n += 1
    return n


def check_metric_small_cancellation(relators: Sequence[Word], bound: Fraction = C16_BOUND) -> SmallCancellationReport:
    """Largest piece ratio over the symmetrized relator set; pass iff < bound.

    Cyclic shifts are distinguished by position, so a proper power produces
    a piece as long as the relator. A one-letter relator collapses a
    generator and is reported as its own piece.
    """
    if not relators:
        return SmallCancellationReport(passed=True, max_ratio=Fraction(0))
    for r in relators:
        if len(r) < 2:
            return SmallCancellationReport(passed=False, max_ratio=Fraction(1), witness_piece=r, relator=r)

    entries = _symmetrized(relators)
    best = Fraction(0)
    witness: Optional[tuple[int, ...]] = None
    owner: Optional[tuple[int, ...]] = None
    for i, u in enumerate(entries):
        for j, v in enumerate(entries):
            if i == j:
                continue
            n = _common_prefix(u, v)
            if n == 0:
                continue
            ratio = Fraction(n, len(u))
            if ratio > best:
                best, witness, owner = ratio, u[:n], u
    return SmallCancellationReport(
        passed=best < bound,
        max_ratio=best,
        witness_piece=Word(witness) if witness is not None else None,
        relator=Word(owner) if owner is not None else None,
    )


def is_commutator_control(relators: Sequence[Word], rank: int) -> bool:
    """True iff the relators are exactly the commutators of all generator pairs."""
    pairs: set[tuple[int, int]] = set()
    for r in relators:
        x = r.letters
        if len(x) != 4 or x[2] != -x[0] or x[3] != -x[1] or abs(x[0]) == abs(x[1]):
            return False
        pairs.add(tuple(sorted((abs(x[0]), abs(x[1])))))
    wanted = {(i, j) for i in range(1, rank + 1) for j in range(i + 1, rank + 1)}
    return pairs == wanted and len(relators) == len(wanted)


class WordOracle:
    """Exact triviality decision for the three supported presentation kinds."""

    def __init__(self, presentation: Presentation):
        self.presentation = presentation
        self.kind = presentation.oracle_kind
        self.rank = presentation.rank
        self._rules: dict[tuple[int, ...], tuple[int, ...]] = {}
        self._rule_lengths: tuple[int, ...] = ()
        if self.kind is OracleKind.DEHN_C16:
            self._build_dehn_rules()
        self.invariant_coords = self._invariant_coordinates()

    def _build_dehn_rules(self) -> None:
        for r in _symmetrized(self.presentation.relators):
            n = len(r)
            for k in range(n // 2 + 1, n + 1):
                key = r[:k]
                replacement = invert_letters(r[k:])
                current = self._rules.get(key)
                if current is None or shortlex_key(replacement) < shortlex_key(current):
                    self._rules[key] = replacement
        self._rule_lengths = tuple(sorted({len(k) for k in self._rules}, reverse=True))

    def _invariant_coordinates(self) -> tuple[int, ...]:
        coords = []
        for i in range(self.rank):
            if all(exponent_sums(r.letters, self.rank)[i] == 0 for r in self.presentation.relators):
                coords.append(i)
        return tuple(coords)

    @property
    def fingerprint_is_exact(self) -> bool:
        return self.kind is not OracleKind.DEHN_C16

    def reduce_letters(self, letters: Sequence[int]) -> tuple[int, ...]:
        if self.kind is OracleKind.FREE_ABELIAN_CONTROL:
            sums = exponent_sums(letters, self.rank)
            out: list[int] = []
            for i, e in enumerate(sums):
                out.extend([(i + 1) if e > 0 else -(i + 1)] * abs(e))
            return tuple(out)
        w = reduce_letters(letters)
        if self.kind is OracleKind.FREE_GROUP:
            return w
        return self._dehn(w)

    def _dehn(self, w: tuple[int, ...]) -> tuple[int, ...]:
        changed = True
        while changed:
            changed = False
            for i in range(len(w)):
                for n in self._rule_lengths:
                    if i + n > len(w):
                        continue
                    rep = self._rules.get(w[i : i + n])
                    if rep is not None:
                        w = reduce_letters(w[:i] + rep + w[i + n :])
                        changed = True
                        break
                if changed:
                    break
        return w

    def reduce(self, w: Word) -> Word:
        return Word(self.reduce_letters(w.letters))

    def is_trivial_letters(self, letters: Sequence[int]) -> bool:
        return not self.reduce_letters(letters)

    def is_trivial(self, w: Word) -> bool:
        return self.is_trivial_letters(w.letters)

    def abelian_image(self, letters: Sequence[int]) -> tuple[int, ...]:
        """Exponent sums on the coordinates every relator leaves invariant."""
        sums = exponent_sums(letters, self.rank)
        return tuple(sums[i] for i in self.invariant_coords)

    def fingerprint(self, letters: Sequence[int]) -> Hashable:
        """Equal group elements share a fingerprint; exact unless Dehn."""
        if self.kind is OracleKind.FREE_GROUP:
            return reduce_letters(letters)
        if self.kind is OracleKind.FREE_ABELIAN_CONTROL:
            return exponent_sums(letters, self.rank)
        return self.abelian_image(letters)


def dehn_reduce(w: Word, oracle: WordOracle) -> Word:
    return oracle.reduce(w)
