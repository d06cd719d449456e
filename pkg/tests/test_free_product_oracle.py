from pingcert.services.cayley import build_ball
from pingcert.services.free_product_oracle import merge_syllables, oracle_free_product_check
from pingcert.services.instance import WindowAnalysis, build_instance
from pingcert.services.subgroups import Membership, MembershipOracle, SubgroupSpec
from pingcert.services.words import Word


def free_instance(oracle, h, k, g0=(), radius=3):
    analysis = WindowAnalysis(build_ball(oracle, radius))
    H = SubgroupSpec(oracle, tuple(Word.parse(w) for w in h), "H")
    K = SubgroupSpec(oracle, tuple(Word.parse(w) for w in k), "K")
    G0 = SubgroupSpec(oracle, tuple(Word.parse(w) for w in g0), "G0")
    return build_instance(analysis, H, K, H, K, G0)


def test_powers_in_free_group_are_consistent(f2):
    outcome = oracle_free_product_check(free_instance(f2, ["aa"], ["bbb"]), maxlen=8)
    assert outcome.status == "consistent"
    assert outcome.achieved_length == 8
    assert outcome.normal_forms > 0


def test_commuting_generators_collide(z2):
    outcome = oracle_free_product_check(free_instance(z2, ["a"], ["b"]), maxlen=4)
    assert outcome.status == "counterexample"
    assert outcome.counterexample.format() == "abAB"
    assert outcome.achieved_length == 2
    assert z2.is_trivial(Word(tuple(c for w in outcome.syllables for c in w.letters)))


def test_zero_length_is_vacuous(f2):
    outcome = oracle_free_product_check(free_instance(f2, ["a"], ["b"]), maxlen=0)
    assert outcome.status == "consistent"
    assert outcome.normal_forms == 0


def test_budget_gives_partial_result(f2):
    outcome = oracle_free_product_check(free_instance(f2, ["a"], ["b"]), maxlen=8, budget=10)
    assert outcome.status == "partial"
    assert outcome.achieved_length < 8


def test_amalgamated_product_over_common_subgroup(f3):
    outcome = oracle_free_product_check(free_instance(f3, ["a", "b"], ["a", "c"], g0=["a"]), maxlen=4)
    assert outcome.status == "consistent"


def words(*texts):
    return [Word.parse(t) for t in texts]


def test_merge_joins_same_side_neighbours(f2):
    assert merge_syllables([0, 1, 1], words("a", "b", "b"), f2) == tuple(words("a", "bb"))
    assert merge_syllables([0, 1, 1, 0], words("a", "b", "B", "a"), f2) == tuple(words("aa"))
    assert merge_syllables([0, 1], words("a", "b"), f2) == tuple(words("a", "b"))


def test_collision_syllables_alternate(z2):
    inst = free_instance(z2, ["a"], ["ab"])
    outcome = oracle_free_product_check(inst, maxlen=6)
    assert outcome.status == "counterexample"
    h, k = MembershipOracle(inst.H), MembershipOracle(inst.K)
    in_h = [h.is_member(w) is Membership.YES for w in outcome.syllables]
    in_k = [k.is_member(w) is Membership.YES for w in outcome.syllables]
    assert all(a != b for a, b in zip(in_h, in_k))
    assert all(a != b for a, b in zip(in_h, in_h[1:]))
    assert z2.is_trivial(Word(tuple(c for w in outcome.syllables for c in w.letters)))
