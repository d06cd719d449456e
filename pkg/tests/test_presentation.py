from fractions import Fraction

import numpy as np
import pytest

from pingcert.errors import PresentationParseError, UnsupportedPresentationError
from pingcert.services.presentation import (
    OracleKind,
    WordOracle,
    check_metric_small_cancellation,
    dehn_reduce,
    parse_presentation,
)
from pingcert.services.cayley import build_ball
from pingcert.services.words import Word, alphabet_codes, invert_letters, reduce_letters


def test_parse_error_names_line():
    with pytest.raises(PresentationParseError) as exc:
        parse_presentation("gens: a b\nrel: abx\n")
    assert exc.value.line_no == 2
    assert "line 2" in str(exc.value)


def test_missing_gens_line():
    with pytest.raises(PresentationParseError):
        parse_presentation("rel: ab\n")


def test_one_letter_relator_is_unsupported():
    with pytest.raises(UnsupportedPresentationError, match="unsupported presentation"):
        parse_presentation("gens: a\nrel: a\n")


def test_proper_power_fails_small_cancellation():
    report = check_metric_small_cancellation([Word.parse("abab")])
    assert not report.passed
    with pytest.raises(UnsupportedPresentationError):
        parse_presentation("gens: a b\nrel: abab\n")


def test_genus2_is_c16(genus2):
    report = check_metric_small_cancellation(genus2.presentation.relators)
    assert report.passed
    assert report.max_ratio == Fraction(1, 8)
    assert genus2.kind is OracleKind.DEHN_C16
    assert genus2.presentation.subgroups["H"] == (Word.parse("a"),)


def test_dehn_reduction(genus2):
    p = genus2.presentation
    assert p.format_word(dehn_reduce(p.parse_word("abABc"), genus2)) == "dcD"
    assert genus2.is_trivial(p.parse_word("abABcdCD"))
    assert not genus2.is_trivial(p.parse_word("abAB"))


def test_free_group_keeps_reduced_words(f2):
    assert f2.kind is OracleKind.FREE_GROUP
    assert f2.reduce(Word.parse("abAB")).format() == "abAB"


def test_commutator_control(z2):
    assert z2.kind is OracleKind.FREE_ABELIAN_CONTROL
    assert z2.is_trivial(Word.parse("abAB"))
    assert z2.fingerprint_is_exact


def test_canonical_digest_is_stable():
    a = parse_presentation("gens: a b\n# comment\nrel: abAB\n")
    b = parse_presentation("gens: a b\nrel: abAB")
    assert a.digest() == b.digest()


def random_reduced(rng, rank, length):
    codes = alphabet_codes(rank)
    letters: list[int] = []
    while len(letters) < length:
        c = codes[rng.integers(len(codes))]
        if not letters or c != -letters[-1]:
            letters.append(c)
    return tuple(letters)


def relator_shifts(oracle):
    r = oracle.presentation.relators[0].letters
    shifts = {r[i:] + r[:i] for i in range(len(r))}
    return shifts | {invert_letters(s) for s in shifts}


@pytest.fixture(scope="module")
def genus2_ball4(genus2):
    return build_ball(genus2, 4)


def test_relator_shifts_are_trivial(genus2):
    shifts = relator_shifts(genus2)
    assert len(shifts) == 16
    assert all(genus2.is_trivial_letters(s) for s in shifts)


def test_dehn_reduction_never_lengthens(genus2):
    rng = np.random.default_rng(21)
    codes = alphabet_codes(4)
    for _ in range(2000):
        w = tuple(codes[i] for i in rng.integers(len(codes), size=rng.integers(0, 13)))
        assert len(genus2.reduce_letters(w)) <= len(reduce_letters(w)) <= len(w)


def test_short_reduced_words_are_nontrivial(genus2):
    rng = np.random.default_rng(22)
    shifts = relator_shifts(genus2)
    for _ in range(5000):
        w = random_reduced(rng, 4, int(rng.integers(1, 9)))
        assert genus2.is_trivial_letters(w) == (w in shifts)


def test_dehn_agrees_with_the_window(genus2, genus2_ball4):
    ball = genus2_ball4
    rng = np.random.default_rng(23)
    words = list(relator_shifts(genus2)) + [random_reduced(rng, 4, int(rng.integers(1, 9))) for _ in range(3000)]
    for w in words:
        half = len(w) // 2
        same_vertex = ball.locate(w[:half]) == ball.locate(invert_letters(w[half:]))
        assert same_vertex == genus2.is_trivial_letters(w), genus2.presentation.format_word(Word(w))
