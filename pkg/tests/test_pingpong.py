import pytest

from pingcert.errors import ActionOutsideSetError
from pingcert.models.schemas import AbstractPingPongInstance
from pingcert.services.cayley import build_ball
from pingcert.services.instance import WindowAnalysis
from pingcert.services.pingpong import abstract_ping_pong_check, schottky_power_search
from pingcert.services.words import Word, alphabet_codes, format_letters, parse_letters, reduce_letters


def free_left_multiplication(depth: int = 3) -> AbstractPingPongInstance:
    """Reduced words of F(a, b) up to `depth`, acted on by left multiplication where defined."""
    words = [()]
    frontier = [()]
    for _ in range(depth):
        frontier = [w + (c,) for w in frontier for c in alphabet_codes(2) if not w or w[-1] != -c]
        words.extend(frontier)
    points = [format_letters(w) for w in words]
    elements = ["a", "A", "aa", "AA", "b", "B", "bb", "BB"]
    actions = {}
    for x in elements:
        table = {}
        for w in words:
            image = reduce_letters(parse_letters(x) + w)
            if len(image) <= depth:
                table[format_letters(w)] = format_letters(image)
        actions[x] = table
    return AbstractPingPongInstance(
        points=points,
        actions=actions,
        H=elements[:4],
        K=elements[4:],
        S_H=[p for p in points if p[:1] in ("b", "B")],
        S_K=[p for p in points if p[:1] in ("a", "A")],
    )


def swap_instance(**overrides) -> AbstractPingPongInstance:
    swap = {"1": "3", "2": "4", "3": "1", "4": "2"}
    fields = dict(
        points=["1", "2", "3", "4"],
        actions={"e": {p: p for p in "1234"}, "h": swap, "k": dict(swap)},
        H=["e", "h"],
        K=["e", "k"],
        G0=["e"],
        S_H=["1", "2"],
        S_K=["3", "4"],
    )
    fields.update(overrides)
    return AbstractPingPongInstance(**fields)


def test_free_left_multiplication_is_verified():
    result = abstract_ping_pong_check(free_left_multiplication(), maxsyll=3)
    assert result.status == "verified"
    assert result.maxsyll == 3
    assert result.index_H == 4
    assert result.odd_products_checked > 0


def test_index_two_amalgam_is_guarded():
    result = abstract_ping_pong_check(swap_instance(), maxsyll=3)
    assert result.status == "index-guard"
    assert (result.index_H, result.index_K) == (2, 2)


def test_overlapping_sets_fail():
    result = abstract_ping_pong_check(swap_instance(S_H=["1", "3"], S_K=["3", "4"]), maxsyll=3)
    assert result.status == "hypotheses-fail"
    assert "share" in result.reason


def test_element_not_mapping_into_other_set():
    fixed = {"1": "1", "2": "4", "3": "1", "4": "2"}
    inst = swap_instance(actions={"e": {p: p for p in "1234"}, "h": fixed, "k": fixed})
    result = abstract_ping_pong_check(inst, maxsyll=3)
    assert result.status == "hypotheses-fail"
    assert "h does not map" in result.reason


def test_action_outside_set():
    inst = swap_instance(actions={"e": {p: p for p in "1234"}, "h": {"1": "9"}, "k": {}})
    with pytest.raises(ActionOutsideSetError):
        abstract_ping_pong_check(inst, maxsyll=1)


def test_schottky_search_finds_first_pair(f2):
    analysis = WindowAnalysis(build_ball(f2, 4))
    result = schottky_power_search(analysis, Word.parse("ab"), Word.parse("aB"), maxpow=2, maxlen=4)
    assert result.found
    assert (result.m, result.n) == (1, 1)
    assert result.certificate.verdict.status == "CERTIFIED"


def test_schottky_search_exhausts_on_commensurable_pair(f2):
    analysis = WindowAnalysis(build_ball(f2, 3))
    result = schottky_power_search(analysis, Word.parse("a"), Word.parse("a"), maxpow=2, maxlen=3)
    assert not result.found
    assert [a.status for a in result.attempts] == ["invalid"] * 4
