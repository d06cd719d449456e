import pytest

from pingcert.errors import WindowError
from pingcert.services.cayley import build_ball
from pingcert.services.subgroups import (
    Membership,
    MembershipMode,
    MembershipOracle,
    SubgroupSpec,
    build_relative_ball,
    check_malnormal,
    estimate_mu,
    lemma6_constants,
    shortest_double_coset_rep,
)
from pingcert.services.words import Word


def spec(oracle, *gens, name="H"):
    return SubgroupSpec(oracle, tuple(Word.parse(g) for g in gens), name)


@pytest.fixture(scope="module")
def f2_ball4(f2):
    return build_ball(f2, 4)


def test_folded_membership(f2):
    m = MembershipOracle(spec(f2, "a"))
    assert m.mode is MembershipMode.FOLDED
    assert m.is_member(Word.parse("aaa")) is Membership.YES
    assert m.is_member(Word.parse("ab")) is Membership.NO
    assert MembershipOracle(spec(f2, "ab", "ba")).is_member(Word.parse("abba")) is Membership.YES


def test_trivial_generator_rejected(f2):
    with pytest.raises(ValueError):
        spec(f2, "aA")


def test_modes_follow_the_ambient_group(genus2, z2):
    assert MembershipOracle(spec(genus2, "a")).mode is MembershipMode.CYCLIC
    assert MembershipOracle(spec(genus2)).mode is MembershipMode.TRIVIAL
    with pytest.raises(WindowError):
        MembershipOracle(spec(z2, "a", "b"))
    bounded = MembershipOracle(spec(z2, "a", "b"), build_ball(z2, 3))
    assert bounded.mode is MembershipMode.BOUNDED
    assert bounded.validity_radius == 2
    assert not bounded.exact


def test_cyclic_membership_in_surface_group(genus2):
    m = MembershipOracle(spec(genus2, "a"))
    assert m.is_member(genus2.presentation.parse_word("aaa")) is Membership.YES
    assert m.is_member(genus2.presentation.parse_word("c")) is Membership.NO


def test_mu_estimates(f2_ball4):
    oracle = f2_ball4.oracle
    assert estimate_mu(spec(oracle, "a"), f2_ball4) == 0
    assert estimate_mu(spec(oracle, "ab"), f2_ball4) == 1


def test_mu_needs_two_elements(f2):
    with pytest.raises(WindowError):
        estimate_mu(spec(f2, "aaaa"), build_ball(f2, 2))


def test_double_coset_representative(f2, f2_ball6):
    g0 = MembershipOracle(spec(f2, "a", name="G0"))
    assert shortest_double_coset_rep(Word.parse("aba"), g0, f2_ball6).format() == "b"
    assert shortest_double_coset_rep(Word.parse("a"), g0, f2_ball6).format() == ""
    assert shortest_double_coset_rep(Word.parse("aba"), g0, f2_ball6, side="left-only").format() == "ba"
    with pytest.raises(WindowError):
        shortest_double_coset_rep(Word.parse("abab"), g0, f2_ball6)


def test_relative_ball_counts(f1, f2):
    rel = build_relative_ball(spec(f2, "a"), 2)
    assert rel.vertex_count(0) == 1
    assert rel.vertex_count(1) == 3
    whole = build_relative_ball(spec(f1, "a"), 2)
    assert whole.counts() == [1, 1, 1]


def test_lemma6_constants(f2):
    rel = build_relative_ball(spec(f2, "a"), 2)
    assert lemma6_constants(rel, 0, 0) == (1, 2)
    assert lemma6_constants(rel, 1, 0) == (3, 10)


def test_malnormality(f2_ball4):
    oracle = f2_ball4.oracle
    verdict = check_malnormal(spec(oracle, "aa"), f2_ball4)
    assert verdict.violation
    assert verdict.g.format() == "a"
    assert verdict.witness.format() == "aa"
    assert not check_malnormal(spec(oracle, "a"), f2_ball4).violation
    assert not check_malnormal(spec(oracle, "ab"), f2_ball4).violation


def test_mu_is_nondecreasing_in_radius(f2_ball6):
    H = spec(f2_ball6.oracle, "ab")
    values = [estimate_mu(H, f2_ball6.truncate(r)) for r in range(2, 7)]
    assert values == sorted(values)


@pytest.mark.parametrize("gens", [("ab", "aaB"), ("aa", "bb")])
def test_relative_ball_closes_exactly_on_members(f2_ball6, gens):
    H = spec(f2_ball6.oracle, *gens)
    membership = MembershipOracle(H)
    rel = build_relative_ball(H, 4, membership)
    for v in range(f2_ball6.offsets[5]):
        word = f2_ball6.words[v]
        closed = rel.walk(word) == 0
        assert closed == (membership.is_member(word) is Membership.YES), f2_ball6.word(v).format()


@pytest.mark.parametrize("gens", [("aa", "bb"), ("ab", "aB")])
def test_bounded_membership_agrees_with_folding(f2_ball6, gens):
    H = spec(f2_ball6.oracle, *gens)
    exact = MembershipOracle(H)
    bounded = MembershipOracle(H, f2_ball6, bounded=True)
    assert bounded.mode is MembershipMode.BOUNDED
    assert bounded.validity_radius == 4
    for v in range(f2_ball6.offsets[5]):
        word = f2_ball6.words[v]
        assert bounded.is_member(word) is exact.is_member(word), f2_ball6.word(v).format()
    beyond = f2_ball6.offsets[5]
    assert bounded.is_member(f2_ball6.words[beyond]) is Membership.UNKNOWN
