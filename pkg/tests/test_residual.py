import pytest
from sympy.combinatorics import Permutation

from pingcert.errors import PresentationParseError, UnsupportedPresentationError
from pingcert.services.cayley import build_ball
from pingcert.services.certifier import certify_theorem1
from pingcert.services.instance import WindowAnalysis
from pingcert.services.residual import (
    corollary_instance,
    find_deep_quotient,
    kernel_free_below,
    parse_quotient_spec,
    shortest_kernel_element,
)
from pingcert.services.subgroups import MembershipOracle, power_letters
from pingcert.services.words import Word

A4_PAIR = "perm: a = (1 2 3)\nperm: b = (1 2 4)\n"


def test_three_cycles_have_depth_three():
    spec = parse_quotient_spec(A4_PAIR)
    assert spec.rank == 2 and spec.degree == 4
    report = shortest_kernel_element(spec)
    assert report.depth == 3
    assert report.witness.format() == "aaa"
    assert kernel_free_below(spec, 3)
    assert not kernel_free_below(spec, 4)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_single_cycle_depth_is_its_length(d):
    cycle = " ".join(str(i) for i in range(1, d + 1))
    report = shortest_kernel_element(parse_quotient_spec(f"perm: a = ({cycle})", rank=1))
    assert report.depth == d


def test_identity_images_have_depth_one():
    report = shortest_kernel_element(parse_quotient_spec("perm: a = ()", rank=2))
    assert report.depth == 1
    assert report.witness.format() == "a"


def test_depth_is_invariant_under_relabelling():
    spec = parse_quotient_spec(A4_PAIR)
    relabelled = spec.relabel(Permutation([3, 0, 2, 1]))
    assert shortest_kernel_element(relabelled).depth == shortest_kernel_element(spec).depth


def test_cycle_notation_round_trip():
    spec = parse_quotient_spec(A4_PAIR)
    assert spec.cycle_notation() == {"a": "(1 2 3)", "b": "(1 2 4)"}


@pytest.mark.parametrize(
    "text",
    ["perm: x = (1 2)", "perm: a = (1 1)", "perm: a = (1 2", "a = (1 2)", "perm: a = (0 1)"],
)
def test_malformed_quotients(text):
    with pytest.raises(PresentationParseError):
        parse_quotient_spec(text, names=("a", "b"))


def test_deep_quotient_search():
    search = find_deep_quotient(2, 4, budget=200, max_degree=7, seed=11)
    assert search.found
    assert search.report.depth >= 4
    assert kernel_free_below(search.report.spec, 4)


def test_deep_quotient_search_can_exhaust():
    search = find_deep_quotient(2, 10**6, budget=5, max_degree=4, seed=1)
    assert not search.found
    assert search.tried == 5


def test_budget_remainder_is_spent():
    search = find_deep_quotient(2, 10**6, budget=7, max_degree=4, seed=1)
    assert search.tried == 7


def test_search_needs_room_for_a_permutation():
    with pytest.raises(ValueError):
        find_deep_quotient(2, 4, budget=5, max_degree=1)


def test_corollary_instance(f2):
    analysis = WindowAnalysis(build_ball(f2, 4))
    inst = corollary_instance(analysis, Word.parse("a"), Word.parse("b"), parse_quotient_spec(A4_PAIR))
    assert inst.H1.generators == (Word.parse("aaa"),)
    assert inst.K1.generators == (Word.parse("bbb"),)
    assert inst.mode == "theorem1"


def test_corollary_needs_free_ambient_group(z2):
    analysis = WindowAnalysis(build_ball(z2, 2))
    with pytest.raises(UnsupportedPresentationError):
        corollary_instance(analysis, Word.parse("a"), Word.parse("b"), parse_quotient_spec(A4_PAIR))


def corollary_certificate(ball, seed=5):
    inst = corollary_instance(WindowAnalysis(ball), Word.parse("a"), Word.parse("b"), parse_quotient_spec(A4_PAIR))
    return certify_theorem1(inst, oracle_maxlen=6, path_count=10, seed=seed)


def test_corollary_instance_is_certified(f2_ball6):
    cert = corollary_certificate(f2_ball6)
    assert cert.verdict.status == "CERTIFIED"
    assert cert.syllable_paths_checked > 0
    assert cert.oracle.outcome == "consistent"


def test_corollary_certificate_is_deterministic(f2_ball6):
    assert corollary_certificate(f2_ball6).model_dump() == corollary_certificate(f2_ball6).model_dump()


def test_corollary_needs_room_for_two_syllables(f2):
    cert = corollary_certificate(build_ball(f2, 4))
    assert cert.syllable_paths_checked == 0
    assert cert.verdict.status == "INCONCLUSIVE"
    assert not next(g for g in cert.gates if g.gate_id == "syllable_paths").passed


def test_shortest_restricted_element_is_a_full_power(f2):
    spec = parse_quotient_spec(A4_PAIR)
    h = Word.parse("ab")
    s = spec.order(h)
    inst = corollary_instance(WindowAnalysis(build_ball(f2, 4)), h, Word.parse("b"), spec)
    assert inst.H1.generators == (Word(power_letters(h, s)),)
    shortest = MembershipOracle(inst.H1).elements_up_to(2 * s)
    assert shortest and min(len(w) for w in shortest) == 2 * s
    assert not MembershipOracle(inst.H1).elements_up_to(2 * s - 1)


def test_restricted_power_of_a_conjugate_is_reduced(f2):
    spec = parse_quotient_spec(A4_PAIR)
    inst = corollary_instance(WindowAnalysis(build_ball(f2, 4)), Word.parse("abA"), Word.parse("b"), spec)
    assert inst.H1.generators[0].format() == "abbbA"
    assert inst.K1.generators[0].format() == "bbb"
