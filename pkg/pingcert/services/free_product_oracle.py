"""Brute-force cross-check of H1 *_{G0} K1 by alternating normal forms."""

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from pingcert.config import get_settings
from pingcert.services.instance import PingPongInstance
from pingcert.services.presentation import WordOracle
from pingcert.services.subgroups import Membership, MembershipOracle, SubgroupSpec
from pingcert.services.words import Word, invert_letters, shortlex_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleOutcome:
    status: str  # consistent | counterexample | partial
    maxlen: int
    achieved_length: int
    normal_forms: int
    counterexample: Optional[Word] = None
    syllables: tuple[Word, ...] = field(default_factory=tuple)


def _syllable_pool(spec: SubgroupSpec, membership: MembershipOracle, g0: MembershipOracle, maxlen: int) -> list[Word]:
    pool = [w for w in membership.elements_up_to(maxlen) if g0.is_member(w) is not Membership.YES]
    return sorted(pool, key=lambda w: (len(w), shortlex_key(w.letters)))


def _sequences(pools: tuple[list[Word], list[Word]], total: int) -> Iterator[tuple[int, tuple[Word, ...]]]:
    """(first side, alternating syllables) of exactly `total` letters, H-first ones first."""

    def extend(side: int, remaining: int, prefix: tuple[Word, ...]) -> Iterator[tuple[Word, ...]]:
        for w in pools[side]:
            if len(w) > remaining:
                break
            seq = prefix + (w,)
            if len(w) == remaining:
                yield seq
            else:
                yield from extend(1 - side, remaining - len(w), seq)

    for start in (0, 1):
        for seq in extend(start, total, ()):
            yield start, seq


def merge_syllables(sides: Sequence[int], syllables: Sequence[Word], oracle: WordOracle) -> tuple[Word, ...]:
    """Multiply out neighbouring syllables from the same factor; trivial products drop out."""
    merged: list[tuple[int, tuple[int, ...]]] = []
    for side, w in zip(sides, syllables):
        if merged and merged[-1][0] == side:
            letters = oracle.reduce_letters(merged.pop()[1] + w.letters)
            if letters:
                merged.append((side, letters))
        else:
            merged.append((side, w.letters))
    return tuple(Word(letters) for _, letters in merged)


def oracle_free_product_check(instance: PingPongInstance, maxlen: Optional[int] = None, budget: Optional[int] = None) -> OracleOutcome:
    """Enumerate alternating products of H1∖G0 and K1∖G0 syllables by total length.

    A product that is trivial or lies in G0 is a counterexample. With G0
    trivial, two distinct sequences naming the same element are one too and
    are reported as u·v⁻¹.
    """
    settings = get_settings()
    maxlen = settings.oracle_maxlen if maxlen is None else maxlen
    budget = settings.oracle_budget if budget is None else budget
    oracle = instance.oracle
    g0 = instance.membership(instance.G0)
    pools = (
        _syllable_pool(instance.H1, instance.membership(instance.H1), g0, maxlen),
        _syllable_pool(instance.K1, instance.membership(instance.K1), g0, maxlen),
    )
    collisions = not instance.G0.generators
    exact = oracle.fingerprint_is_exact
    seen: dict = {}
    count = 0

    def counterexample(word: tuple[int, ...], syllables: tuple[Word, ...], achieved: int) -> OracleOutcome:
        logger.info("oracle counterexample at length %d: %s", achieved, oracle.presentation.format_word(Word(word)))
        return OracleOutcome("counterexample", maxlen, achieved, count, Word(word), syllables)

    for total in range(1, maxlen + 1):
        for start, seq in _sequences(pools, total):
            count += 1
            if count > budget:
                logger.warning("oracle budget of %d normal forms exhausted at length %d", budget, total)
                return OracleOutcome("partial", maxlen, total - 1, count - 1)
            letters = tuple(c for w in seq for c in w.letters)
            if oracle.is_trivial_letters(letters) or (len(seq) > 1 and g0.is_member(letters) is Membership.YES):
                return counterexample(letters, seq, total)
            if not collisions:
                continue
            key = oracle.fingerprint(letters)
            for other, other_start, other_seq in seen.get(key, ()):
                if exact or oracle.is_trivial_letters(letters + invert_letters(other)):
                    sides = [(other_start + i) % 2 for i in range(len(other_seq))]
                    sides += [(start + i) % 2 for i in reversed(range(len(seq)))]
                    inverse = tuple(Word(invert_letters(w.letters)) for w in reversed(seq))
                    syllables = merge_syllables(sides, other_seq + inverse, oracle)
                    return counterexample(other + invert_letters(letters), syllables, total)
            seen.setdefault(key, []).append((letters, start, seq))
        logger.debug("oracle: length %d consistent (%d normal forms)", total, count)

    return OracleOutcome("consistent", maxlen, maxlen, count)
