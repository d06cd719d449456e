import json

import pytest

from pingcert.services.gate_engine import evaluate_gates, load_gates

THEOREM1_PASSING = {
    "instance_invariants": True,
    "mu_stable": True,
    "short_elements_H1": True,
    "short_elements_K1": True,
    "syllable_paths_checked": 12,
    "unmeasured_paths": 0,
    "local_quasigeodesic_failures": 0,
    "lemma5_violations": 0,
    "oracle_consistent": True,
}


def test_bundled_gates_cover_both_modes():
    ids1 = [g["id"] for g in load_gates("theorem1")]
    ids2 = [g["id"] for g in load_gates("theorem2")]
    assert ids1[0] == "instance_invariants"
    assert "malnormality" in ids2 and "lemma6_overlap" in ids2
    assert "short_elements_K1" not in ids2
    for ids in (ids1, ids2):
        assert ids.index("syllable_paths") < ids.index("paths_measured") < ids.index("local_quasigeodesic")


def test_all_gates_pass():
    passed, outcomes = evaluate_gates("theorem1", THEOREM1_PASSING)
    assert passed
    assert all(o.passed for o in outcomes)


def test_failing_gate_reports_value():
    metrics = dict(THEOREM1_PASSING, lemma5_violations=2)
    passed, outcomes = evaluate_gates("theorem1", metrics)
    assert not passed
    failing = [o for o in outcomes if not o.passed]
    assert [o.gate_id for o in failing] == ["lemma5_overlap"]
    assert failing[0].message == "lemma5_violations=2 != 0"


def test_empty_or_unmeasured_path_sample_fails():
    passed, outcomes = evaluate_gates("theorem1", dict(THEOREM1_PASSING, syllable_paths_checked=0))
    assert not passed
    assert [o.gate_id for o in outcomes if not o.passed] == ["syllable_paths"]
    passed, outcomes = evaluate_gates("theorem1", dict(THEOREM1_PASSING, unmeasured_paths=12))
    assert not passed
    assert [o.gate_id for o in outcomes if not o.passed] == ["paths_measured"]


def test_missing_metric_fails():
    metrics = dict(THEOREM1_PASSING)
    del metrics["mu_stable"]
    passed, outcomes = evaluate_gates("theorem1", metrics)
    assert not passed
    assert next(o for o in outcomes if o.gate_id == "mu_stable").message == "Metric mu_stable not computed"


def test_custom_gate_file(tmp_path):
    path = tmp_path / "gates.json"
    path.write_text(
        json.dumps({"theorem1": [{"id": "g", "name": "g", "metric": "x", "operator": "~", "value": 1}]}),
        encoding="utf-8",
    )
    passed, outcomes = evaluate_gates("theorem1", {"x": 1}, path)
    assert not passed
    assert outcomes[0].message == "Unsupported operator: ~"
    with pytest.raises(KeyError):
        load_gates("theorem2", path)
