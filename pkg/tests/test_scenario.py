import copy
import json

import numpy as np
import pytest
from helpers import random_doc

from spillplan.scenario import (
    ScenarioParseError,
    ScenarioValidationError,
    demo_path,
    from_dict,
    load_demo,
    load_scenario,
    parse_scenario,
    serialize,
    to_dict,
    validate,
)


@pytest.fixture
def demo_doc():
    return json.loads(demo_path().read_text(encoding="utf-8"))


def test_demo_loads_and_validates():
    s = load_demo()
    assert validate(s) == []
    assert s.n == 12
    assert s.sensitive_targets == ["H2", "H3", "H5"]
    assert s.decision_period == 2
    assert len(s.hypotheses) == 3


def test_round_trip_is_lossless():
    s = load_demo()
    again = parse_scenario(serialize(s))
    assert again == s
    assert serialize(again) == serialize(s)


def test_round_trip_random_documents():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = from_dict(random_doc(rng))
        assert from_dict(to_dict(s)) == s


def test_unknown_key_is_rejected(demo_doc):
    demo_doc["physics"]["wind"] = 3
    with pytest.raises(ScenarioParseError, match="unknown key"):
        from_dict(demo_doc)


def test_malformed_json():
    with pytest.raises(ScenarioParseError, match="malformed"):
        parse_scenario("{not json")


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioParseError, match="cannot read"):
        load_scenario(tmp_path / "absent.json")


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d["physics"].__setitem__("spread_rate", 1.5), "spread_rate out of [0,1]"),
        (lambda d: d["adjacency"].append(["H2", "S3"]), "shore sector H2 has an outgoing edge"),
        (lambda d: d.__setitem__("source", "H0"), "source must be a sea sector"),
        (lambda d: d["physics"]["hypotheses"][0].__setitem__("weight", 0.5), "weights must sum to 1"),
        (lambda d: d["inventory"]["boom_curve"].__setitem__("f_max", 1.0), "booms leak"),
        (lambda d: d["sectors"][0].__setitem__("sensitive", True), "only allowed on shore"),
        (lambda d: d["inventory"]["booms"][0]["transit_time"].__setitem__("X9", 1.0), "unknown sector 'X9'"),
    ],
)
def test_invariant_violations_are_named(demo_doc, mutate, message):
    doc = copy.deepcopy(demo_doc)
    mutate(doc)
    with pytest.raises(ScenarioValidationError) as info:
        parse_scenario(json.dumps(doc))
    assert any(message in v for v in info.value.violations)


def test_validate_collects_every_violation(demo_doc):
    demo_doc["physics"]["spread_rate"] = -1
    demo_doc["physics"]["uncertainty_factor"] = 2
    problems = validate(from_dict(demo_doc))
    assert len(problems) == 2


def test_scalar_thickness_expands_to_every_sector():
    s = load_demo()
    assert set(s.thickness) == set(s.sector_ids)
    assert to_dict(s)["physics"]["thickness"] == 2.0
