import dataclasses

import pytest

from spillplan.backbone import (
    BEST_PRACTICE,
    CHASE,
    NONE,
    PROTECT,
    BackboneError,
    build_backbone,
    enumerate_feasible,
    prune_dominated,
    render_backbone,
    smallest_area,
    strategy_targets,
)
from spillplan.equipment import DISPERSE, SURVEIL
from spillplan.scenario import load_demo


@pytest.fixture(scope="module")
def demo():
    s = load_demo()
    return s, build_backbone(s)


def test_demo_points_and_actions(demo):
    _, b = demo
    assert [p.period for p in b.points] == [0, 2]
    assert [a.label for a in b.first] == ["equal", "stabilize", "protect"]
    assert b.second_labels() == ["equal", "stabilize", "protect", "chase"]
    assert [a.aircraft for a in b.second] == [SURVEIL] * 4 + [DISPERSE] * 4
    assert b.policy_space_size == 24


def test_only_the_observing_branch_sees_the_trajectory(demo):
    _, b = demo
    assert b.points[0].observes == ()
    assert b.points[1].observes


def test_strategy_coverage(demo):
    s, b = demo
    assert smallest_area(s) == "H5"
    assert b.first_action("stabilize").strategy.boom_allocation == {"S0": 3, "H2": 1}
    assert b.first_action("equal").strategy.boom_allocation == {"S0": 1, "H2": 1, "H3": 1, "H5": 1}
    assert b.first_action("protect").strategy.boom_allocation == {"H5": 3, "H2": 1, "H3": 1}
    required, extras = strategy_targets(s, CHASE)
    assert required == {"H5": 3} and extras == ["H2", "H3"]


def test_chase_is_protect_delayed(demo):
    s, b = demo
    delay = s.inventory.relocation_delay
    protect, chase = b.second_boom(PROTECT), b.second_boom(CHASE)
    assert [(a.boom_id, a.sector) for a in chase.assignments] == [(a.boom_id, a.sector) for a in protect.assignments]
    assert [a.arrival_period for a in chase.assignments] == [a.arrival_period + delay for a in protect.assignments]


def test_best_practice_matches_starred_cells(demo):
    _, b = demo
    starred = {p.label for p in b.pruned if p.reason == BEST_PRACTICE}
    assert starred == {"protect->equal", "protect->stabilize"}
    assert b.forbidden == {("protect", "equal"), ("protect", "stabilize")}


def test_first_period_booms_are_recalled_at_the_decision(demo):
    _, b = demo
    d = b.deployment(b.first_action("stabilize"), DISPERSE, b.second_boom("equal"))
    first = [a for a in d.booms if a.until_period == b.decision_period]
    assert {a.boom_id for a in first} == {"B1", "B2", "B3", "B4"}
    assert d.aircraft.sector == b.dispersant_sector == "S1"


def test_chase_records_relocations(demo):
    _, b = demo
    d = b.deployment(b.first_action("stabilize"), DISPERSE, b.second_boom(CHASE))
    moved = {r.boom_id: (r.from_sector, r.to_sector) for r in d.relocations}
    assert moved["B4"] == ("S0", "H5")


def test_dominance_off_keeps_more_variants():
    s = load_demo()
    full = build_backbone(s, dominance=False)
    assert len(full.first) > 3
    assert {a.name for a in full.first} == {"equal", "stabilize", "protect"}


def test_empty_inventory_gives_single_none():
    s = load_demo()
    s = s.replace(inventory=dataclasses.replace(s.inventory, booms=()))
    b = build_backbone(s)
    assert [a.label for a in b.first] == [NONE]
    assert b.second_labels() == [NONE]
    assert b.pruned == []


def test_unreachable_primary_target_drops_strategy():
    s = load_demo()
    booms = tuple(
        dataclasses.replace(bm, transit_time={k: v for k, v in bm.transit_time.items() if k != "H5"})
        for bm in s.inventory.booms
    )
    s = s.replace(inventory=dataclasses.replace(s.inventory, booms=booms))
    b = build_backbone(s)
    assert PROTECT not in [a.label for a in b.first]
    assert CHASE not in b.second_labels()
    assert b.policy_space_size == 2 * 2 * 2
    assert any(p.label == PROTECT and p.reason == "infeasible-by-arrival" for p in b.pruned)


def test_needs_two_sensitive_areas():
    s = load_demo()
    sectors = tuple(dataclasses.replace(x, sensitive=x.id == "H2") for x in s.sectors)
    with pytest.raises(BackboneError):
        build_backbone(s.replace(sectors=sectors))


def test_restriction(demo):
    s, _ = demo
    b = build_backbone(s, first=["stabilize"], second=[(DISPERSE, "stabilize")])
    assert [a.label for a in b.first] == ["stabilize"]
    assert [a.label for a in b.second] == ["disperse/stabilize"]


def test_render_lists_points_and_pruning(demo):
    _, b = demo
    text = render_backbone(b)
    assert "decision point 1 (period 0)" in text
    assert "decision point 2 (period 2)" in text
    assert "policy space: 3 x 8 = 24" in text
    assert "[best-practice] point 2: protect->equal" in text


def test_enumeration_is_pruned_and_ordered(demo):
    s, _ = demo
    actions = enumerate_feasible(s)
    n_targets = 1 + len(s.sensitive_targets)
    assert len(actions) < 4**n_targets * len(s.inventory.booms)
    keys = [(a.arrival_period, a.coverage, a.boom_id) for a in actions]
    assert keys == sorted(keys)
    kept, pruned = prune_dominated(actions)
    assert len({(a.target, a.coverage) for a in kept}) == len(kept)
    assert all(p.reason == "dominance" for p in pruned)
    assert {(a.target, a.arrival_period) for a in kept} >= {("S0", 0), ("H2", 1), ("H5", 1)}


def test_backbone_does_not_consult_the_solver(demo, monkeypatch):
    import spillplan.solver as solver

    def boom(*_a, **_k):
        raise AssertionError("solver called while building the backbone")

    monkeypatch.setattr(solver.PlanModel, "__init__", boom)
    s, b = demo
    assert build_backbone(s).forbidden == b.forbidden
