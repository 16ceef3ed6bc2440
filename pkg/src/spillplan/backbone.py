"""Rule-based stand-in for the generative planner.

Turns a scenario into a two-point decision backbone:

* point 1 (period 0): a boom strategy out of equal / stabilize / protect;
* point 2 (the period the aircraft is ready): the aircraft is committed to
  surveillance or dispersant, then a boom strategy out of equal / stabilize /
  protect / chase is chosen, after observing the slick when surveilling.

Strategies are realised as concrete boom-to-target assignments.  Assignments
whose coverage-over-time is dominated by another assignment are pruned, so
each strategy normally keeps a single realisation.  First/second-period
combinations that move boom back against the spreading direction are
flagged as best-practice violations.  None of this looks at objective
values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .equipment import (
    DISPERSE,
    SURVEIL,
    AircraftAction,
    BoomAssignment,
    Deployment,
    Relocation,
    arrival_period,
)
from .scenario import Scenario
from .trajectory import build_transitions, injection_vector, oil_arrival_periods, run_trajectory

EQUAL, STABILIZE, PROTECT, CHASE, NONE = "equal", "stabilize", "protect", "chase", "none"
STRATEGY_ORDER = (EQUAL, STABILIZE, PROTECT, CHASE, NONE)
FIRST_STRATEGIES = (EQUAL, STABILIZE, PROTECT)
SECOND_STRATEGIES = (EQUAL, STABILIZE, PROTECT, CHASE)
AIRCRAFT_ORDER = (SURVEIL, DISPERSE)

DOMINANCE = "dominance"
INFEASIBLE_BY_ARRIVAL = "infeasible-by-arrival"
INFEASIBLE_BY_LENGTH = "infeasible-by-length"
BEST_PRACTICE = "best-practice"


class BackboneError(ValueError):
    """Scenario structure the backbone builder does not support."""


@dataclass(frozen=True)
class EmploymentAction:
    boom_id: str
    target: str
    coverage: int
    arrival_period: int
    depart_period: int = 0


@dataclass(frozen=True)
class Strategy:
    name: str
    boom_allocation: dict[str, int]


@dataclass(frozen=True)
class BoomAction:
    """A strategy realised by concrete boom assignments."""

    label: str
    strategy: Strategy
    assignments: tuple[BoomAssignment, ...] = ()

    @property
    def name(self) -> str:
        return self.strategy.name


@dataclass(frozen=True)
class SecondAction:
    aircraft: str
    boom: BoomAction

    @property
    def label(self) -> str:
        return f"{self.aircraft}/{self.boom.label}"


@dataclass(frozen=True)
class DecisionPoint:
    index: int
    period: int
    actions: tuple
    observes: tuple[str, ...] = ()


@dataclass(frozen=True)
class PrunedAction:
    point: int
    label: str
    reason: str
    detail: str = ""


@dataclass
class DecisionBackbone:
    points: tuple[DecisionPoint, DecisionPoint]
    pruned: list[PrunedAction]
    forbidden: frozenset[tuple[str, str]]
    decision_period: int
    dispersant_sector: str
    ship: str
    smallest_area: str
    oil_arrival: dict[str, int | None]
    notes: list[str] = field(default_factory=list)

    @property
    def first(self) -> tuple[BoomAction, ...]:
        return self.points[0].actions

    @property
    def second(self) -> tuple[SecondAction, ...]:
        return self.points[1].actions

    @property
    def policy_space_size(self) -> int:
        return len(self.first) * len(self.second)

    def admissible(self, first: BoomAction, second: BoomAction) -> bool:
        return (first.label, second.label) not in self.forbidden

    def none_first(self) -> BoomAction:
        return BoomAction(NONE, Strategy(NONE, {}))

    def none_second(self) -> BoomAction:
        return BoomAction(NONE, Strategy(NONE, {}))

    def first_action(self, label: str) -> BoomAction:
        if label == NONE:
            return self.none_first()
        for a in self.first:
            if a.label == label:
                return a
        raise KeyError(f"no first-period action {label!r}")

    def second_boom(self, label: str) -> BoomAction:
        if label == NONE:
            return self.none_second()
        for a in self.second:
            if a.boom.label == label:
                return a.boom
        raise KeyError(f"no second-period action {label!r}")

    def second_labels(self) -> list[str]:
        seen = []
        for a in self.second:
            if a.boom.label not in seen:
                seen.append(a.boom.label)
        return seen

    def aircraft_options(self) -> list[str]:
        return [k for k in AIRCRAFT_ORDER if any(a.aircraft == k for a in self.second)]

    def deployment(self, first: BoomAction, aircraft: str, second: BoomAction) -> Deployment:
        t2 = self.decision_period
        booms = [
            BoomAssignment(a.sector, a.coverage, a.arrival_period, t2, a.boom_id)
            for a in first.assignments
            if a.arrival_period < t2
        ]
        booms += list(second.assignments)
        relocations = []
        if second.name == CHASE:
            before = {a.boom_id: a.sector for a in first.assignments}
            for a in second.assignments:
                src = before.get(a.boom_id)
                if src is not None and src != a.sector:
                    relocations.append(Relocation(a.boom_id, src, a.sector, t2, a.arrival_period))
        ac = AircraftAction(
            aircraft,
            t2,
            self.dispersant_sector if aircraft == DISPERSE else None,
        )
        return Deployment(tuple(booms), ac, tuple(relocations))


# -- elementary actions --------------------------------------------------


def targets(s: Scenario) -> list[str]:
    return [s.source] + s.sensitive_targets


def enumerate_feasible(s: Scenario, depart_period: int = 0) -> list[EmploymentAction]:
    """Every boom-to-target employment that arrives before the horizon.

    Coverage is the number of whole layers the boom alone lays around the
    target (capped at 3); booms shorter than one span are useless there.
    Sorted by arrival, then coverage, then boom id: the total order used
    downstream.
    """
    out = []
    for boom in s.inventory.booms:
        for t in targets(s):
            if t not in boom.transit_time:
                continue
            arr = arrival_period(s.inventory, boom.id, t, depart_period)
            cov = min(3, int(math.floor(boom.length / s.sector(t).span + 1e-9)))
            if arr < s.horizon_T and cov >= 1:
                out.append(EmploymentAction(boom.id, t, cov, arr, depart_period))
    out.sort(key=lambda a: (a.arrival_period, a.coverage, a.boom_id, a.target))
    return out


def prune_dominated(actions) -> tuple[list[EmploymentAction], list[PrunedAction]]:
    """Keep the earliest-arriving option per (target, coverage)."""
    kept: dict[tuple[str, int], EmploymentAction] = {}
    pruned = []
    for a in sorted(actions, key=lambda a: (a.arrival_period, a.coverage, a.boom_id)):
        key = (a.target, a.coverage)
        if key in kept:
            best = kept[key]
            pruned.append(
                PrunedAction(
                    0,
                    f"{a.boom_id}->{a.target}x{a.coverage}",
                    DOMINANCE,
                    f"arrives {a.arrival_period}, {best.boom_id} arrives {best.arrival_period}",
                )
            )
        else:
            kept[key] = a
    kept_list = sorted(kept.values(), key=lambda a: (a.arrival_period, a.coverage, a.boom_id, a.target))
    return kept_list, pruned


# -- strategies ----------------------------------------------------------


def smallest_area(s: Scenario) -> str:
    areas = s.sensitive_targets
    return min(areas, key=lambda sid: (s.sector(sid).span, s.index(sid)))


def _others_by_size(s: Scenario, exclude: str) -> list[str]:
    rest = [t for t in s.sensitive_targets if t != exclude]
    return sorted(rest, key=lambda sid: (-s.sector(sid).span, s.index(sid)))


def strategy_targets(s: Scenario, name: str) -> tuple[dict[str, int], list[str]]:
    """Required coverage per target and optional 1x extras in priority order."""
    small = smallest_area(s)
    if name == EQUAL:
        return {t: 1 for t in targets(s)}, []
    if name == STABILIZE:
        return {s.source: 3}, _others_by_size(s, small)
    if name in (PROTECT, CHASE):
        return {small: 3}, _others_by_size(s, small)
    return {}, []


def _arrivals(s: Scenario, depart: int, delay: int) -> dict[tuple[str, str], int]:
    arr = {}
    for boom in s.inventory.booms:
        for t in targets(s):
            if t in boom.transit_time:
                a = arrival_period(s.inventory, boom.id, t, depart) + delay
                if a < s.horizon_T:
                    arr[(boom.id, t)] = a
    return arr


@dataclass
class _Realisation:
    assignments: tuple[BoomAssignment, ...]
    profile: np.ndarray
    nbooms: int
    key: tuple


def _realise_one(s, choice, need, arr, periods, until):
    """Layers per target over ``periods`` for one boom->target choice."""
    by_target: dict[str, list[str]] = {}
    for bid, t in choice:
        if t is not None:
            by_target.setdefault(t, []).append(bid)
    profile = np.zeros((len(need), len(periods)), dtype=np.int64)
    assignments = []
    for ti, (t, c) in enumerate(need.items()):
        span = s.sector(t).span
        booms = sorted(by_target.get(t, []), key=lambda b: (arr[(b, t)], b))
        length, layers = 0.0, 0
        for b in booms:
            length += s.inventory.boom(b).length
            now = min(c, int(math.floor(length / span + 1e-9)))
            if now > layers:
                a = arr[(b, t)]
                assignments.append(BoomAssignment(t, now - layers, a, until, b))
                profile[ti, [j for j, p in enumerate(periods) if p >= a and (until is None or p < until)]] += now - layers
                layers = now
        if layers < c:
            return None
    return assignments, profile


def realise(
    s: Scenario,
    need: dict[str, int],
    depart: int,
    delay: int,
    until: int | None,
    dominance: bool = True,
) -> tuple[list[_Realisation], int]:
    """All boom assignments meeting ``need``; Pareto-maximal ones when
    ``dominance`` is set.  Returns (realisations, number dominated)."""
    if not need:
        return [_Realisation((), np.zeros((0, 0)), 0, ())], 0
    arr = _arrivals(s, depart, delay)
    periods = list(range(depart, s.horizon_T if until is None else until))
    options = []
    for boom in s.inventory.booms:
        opts = [None] + [t for t in need if (boom.id, t) in arr]
        options.append([(boom.id, t) for t in opts])
    seen: dict[bytes, _Realisation] = {}
    for choice in itertools.product(*options):
        got = _realise_one(s, choice, need, arr, periods, until)
        if got is None:
            continue
        assignments, profile = got
        used = tuple(sorted({a.boom_id for a in assignments}))
        key = (len(used), tuple(sorted((a.boom_id, a.sector) for a in assignments)))
        fp = profile.tobytes()
        cand = _Realisation(tuple(sorted(assignments, key=lambda a: (a.arrival_period, a.coverage, a.boom_id))), profile, len(used), key)
        if fp not in seen or key < seen[fp].key:
            seen[fp] = cand
    found = sorted(seen.values(), key=lambda r: (-int(r.profile.sum()), r.key))
    if not dominance:
        return found, 0
    kept = []
    for r in found:
        dominated = any(
            np.all(o.profile >= r.profile) and np.any(o.profile > r.profile) for o in found if o is not r
        )
        if not dominated:
            kept.append(r)
    return kept, len(found) - len(kept)


def build_strategy(
    s: Scenario,
    name: str,
    depart: int,
    until: int | None,
    dominance: bool = True,
) -> tuple[list[BoomAction], list[PrunedAction], str | None]:
    """Realise one strategy.  Returns (actions, pruned records, drop reason)."""
    point = 1 if depart == 0 else 2
    if not s.inventory.booms:
        # nothing to lay: not a pruning decision, just an empty action set
        return [], [], None
    need, extras = strategy_targets(s, name)
    delay = s.inventory.relocation_delay if name == CHASE else 0
    arr = _arrivals(s, depart, delay)
    reachable = {t for (_, t) in arr}
    primary = {s.source} if name == STABILIZE else ({smallest_area(s)} if name in (PROTECT, CHASE) else set())
    if primary - reachable:
        return [], [], INFEASIBLE_BY_ARRIVAL
    notes = []
    for t in list(need):
        if t not in reachable:
            notes.append(PrunedAction(point, f"{name}@{t}", INFEASIBLE_BY_ARRIVAL, "no boom arrives before the horizon"))
            del need[t]
    if not need:
        return [], notes, INFEASIBLE_BY_ARRIVAL
    base, _ = realise(s, need, depart, delay, until, dominance=True)
    if not base:
        return [], notes, INFEASIBLE_BY_LENGTH
    for t in extras:
        if t not in reachable:
            continue
        trial = dict(need)
        trial[t] = 1
        got, _ = realise(s, trial, depart, delay, until, dominance=True)
        if got:
            need = trial
    found, ndominated = realise(s, need, depart, delay, until, dominance=dominance)
    strat = Strategy(name, dict(need))
    actions = []
    for i, r in enumerate(found):
        label = name if i == 0 else f"{name}~{i + 1}"
        actions.append(BoomAction(label, strat, r.assignments))
    if ndominated:
        notes.append(
            PrunedAction(point, name, DOMINANCE, f"{ndominated} boom assignment(s) arrive later than a kept one")
        )
    return actions, notes, None


def _earliest(s: Scenario, target: str, depart: int, delay: int) -> int | None:
    arr = [a for (b, t), a in _arrivals(s, depart, delay).items() if t == target]
    return min(arr) if arr else None


def dispersant_target(s: Scenario, period: int, transitions=None) -> str:
    """Open-water sector holding the most oil in the blind forecast."""
    trace = run_trajectory(s, None, None, transitions)
    q = trace.states[period].quantities + injection_vector(s, period)
    best, best_q = s.source, 0.0
    for i, sec in enumerate(s.sectors):
        if sec.kind == "sea" and sec.id != s.source and q[i] > best_q:
            best, best_q = sec.id, q[i]
    return best


def build_backbone(
    s: Scenario,
    first=None,
    second=None,
    dominance: bool = True,
    best_practice: bool = True,
) -> DecisionBackbone:
    """Construct the two-point decision backbone.

    ``first`` restricts point-1 strategy names; ``second`` restricts point-2
    choices, given as strategy names or ``(aircraft, name)`` pairs.  A point
    left with no layable strategy falls back to the ``none`` action.
    """
    if len(s.sensitive_targets) < 2:
        raise BackboneError("backbone needs at least two sensitive areas")
    t2 = s.decision_period
    T = s.horizon_T
    if t2 >= T:
        raise BackboneError("second decision falls after the horizon")
    ts = build_transitions(s)
    pruned: list[PrunedAction] = []
    first_names = [n for n in FIRST_STRATEGIES if first is None or n in first]
    point1: list[BoomAction] = []
    for name in first_names:
        acts, notes, reason = build_strategy(s, name, 0, t2, dominance)
        pruned.extend(notes)
        if reason:
            pruned.append(PrunedAction(1, name, reason, "strategy cannot be laid"))
        point1.extend(acts)
    if not point1:
        point1 = [BoomAction(NONE, Strategy(NONE, {}))]

    wanted = None
    if second is not None:
        wanted = {(x if isinstance(x, tuple) else (None, x)) for x in second}
    boom2: list[BoomAction] = []
    for name in SECOND_STRATEGIES:
        if wanted is not None and not any(n == name for _, n in wanted):
            continue
        acts, notes, reason = build_strategy(s, name, t2, None, dominance)
        pruned.extend(notes)
        if reason:
            pruned.append(PrunedAction(2, name, reason, "strategy cannot be laid"))
        boom2.extend(acts)
    if not boom2:
        boom2 = [BoomAction(NONE, Strategy(NONE, {}))]
        wanted = None
    point2 = []
    for aircraft in AIRCRAFT_ORDER:
        for b in boom2:
            if wanted is None or (aircraft, b.name) in wanted or (None, b.name) in wanted:
                point2.append(SecondAction(aircraft, b))

    arrival = oil_arrival_periods(s, ts, observed=True)
    forbidden = set()
    if best_practice:
        for f in point1:
            if f.name == NONE:
                continue
            found = [(g, _against_spread(s, f, g, arrival, t2)) for g in boom2]
            if all(reason for _, reason in found):
                # never leave a first action without a continuation
                continue
            for g, reason in found:
                if reason:
                    forbidden.add((f.label, g.label))
                    pruned.append(PrunedAction(2, f"{f.label}->{g.label}", BEST_PRACTICE, reason))

    return DecisionBackbone(
        points=(
            DecisionPoint(1, 0, tuple(point1), ()),
            DecisionPoint(2, t2, tuple(point2), ("trajectory (surveil only)",)),
        ),
        pruned=pruned,
        forbidden=frozenset(forbidden),
        decision_period=t2,
        dispersant_sector=dispersant_target(s, t2, ts),
        ship=s.source,
        smallest_area=smallest_area(s),
        oil_arrival=arrival,
    )


def _against_spread(s, first: BoomAction, second: BoomAction, arrival, t2) -> str | None:
    """Boom sent to one of the second strategy's primary targets that the first
    period left open, arriving after the oil got there."""
    delay = s.inventory.relocation_delay if second.name == CHASE else 0
    covered = first.strategy.boom_allocation
    primary, _ = strategy_targets(s, second.name)
    for t, c in second.strategy.boom_allocation.items():
        if c <= 0 or t not in primary or covered.get(t, 0) > 0:
            continue
        oil = arrival.get(t)
        boom = _earliest(s, t, t2, delay)
        if oil is not None and boom is not None and oil < boom:
            return f"{t} holds oil from period {oil}; relocated boom arrives {boom}"
    return None


def render_backbone(b: DecisionBackbone) -> str:
    lines = []
    for p in b.points:
        obs = ", ".join(p.observes) if p.observes else "nothing"
        lines.append(f"decision point {p.index} (period {p.period}); observes: {obs}")
        for a in p.actions:
            boom = a.boom if isinstance(a, SecondAction) else a
            label = a.label
            cov = ", ".join(f"{t}x{c}" for t, c in boom.strategy.boom_allocation.items()) or "-"
            lines.append(f"  {label:<24} coverage: {cov}")
            for x in boom.assignments:
                lines.append(f"      {x.boom_id} -> {x.sector} +{x.coverage} arrives {x.arrival_period}")
    lines.append(f"policy space: {len(b.first)} x {len(b.second)} = {b.policy_space_size}")
    lines.append(f"dispersant target: {b.dispersant_sector}")
    lines.append("pruned:")
    if not b.pruned:
        lines.append("  (none)")
    for p in b.pruned:
        lines.append(f"  [{p.reason}] point {p.point}: {p.label} {p.detail}".rstrip())
    return "\n".join(lines) + "\n"
