"""Policy evaluation over the two-point backbone.

Objective: oil left in sensitive shore sectors at the horizon, as a
fraction of what lands there when nothing is done.  Two information
regimes exist after the aircraft decision:

* ``disperse`` keeps the planner blind.  Plans are scored on the median
  forecast ``M_j = P M'_j`` and normalised by the no-action forecast.
* ``surveil`` reveals which trajectory hypothesis is true.  Each
  hypothesis is scored with its own observed matrices from period 0, the
  second boom choice may depend on the hypothesis, and the expectation is
  normalised by the expected no-action impact.

``brute_force`` runs every (first, second) plan forward.  ``backward_induct``
instead sweeps each second-stage action backward once, producing the stage-2
return function as an exact linear function of the oil state at the
decision period, then runs each first-stage action forward to that period.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .backbone import (
    AIRCRAFT_ORDER,
    NONE,
    STRATEGY_ORDER,
    BoomAction,
    DecisionBackbone,
    SecondAction,
    build_backbone,
)
from .equipment import DISPERSE, SURVEIL, removal_schedule
from .scenario import Scenario
from .trajectory import absorbing_mask, build_transitions, injection_schedule

TIE_TOL = 1e-12


class DegenerateScenarioError(ValueError):
    """No oil reaches a sensitive area when nothing is done."""


@dataclass(frozen=True)
class Policy:
    first_boom: str
    aircraft: str
    second_boom: str | tuple[tuple[str, str], ...]

    def __post_init__(self):
        contingent = not isinstance(self.second_boom, str)
        if contingent and self.aircraft != SURVEIL:
            raise ValueError("a contingent second choice needs surveillance")

    @property
    def contingent(self) -> bool:
        return not isinstance(self.second_boom, str)

    def second_for(self, hypothesis: str) -> str:
        if isinstance(self.second_boom, str):
            return self.second_boom
        return dict(self.second_boom)[hypothesis]

    @property
    def name(self) -> str:
        if self.contingent:
            second = "{" + ",".join(f"{h}:{b}" for h, b in self.second_boom) + "}"
        else:
            second = self.second_boom
        return f"{self.first_boom}-{self.aircraft}-{second}"

    def to_dict(self) -> dict:
        second = dict(self.second_boom) if self.contingent else self.second_boom
        return {"first_boom": self.first_boom, "aircraft": self.aircraft, "second_boom": second, "name": self.name}


NONE_POLICY = Policy(NONE, SURVEIL, NONE)


@dataclass
class ReturnTable:
    title: str
    rows: list[str]
    cols: list[str]
    values: list[list[float | None]]
    optimal_cell: tuple[str, str] | None

    def value(self, row: str, col: str) -> float | None:
        return self.values[self.rows.index(row)][self.cols.index(col)]

    def render(self) -> str:
        """Aligned text, two decimals, ``*`` for cells not calculated."""
        width = max(len(r) for r in self.rows + ["boom"]) + 2
        colw = max(9, *(len(c) + 2 for c in self.cols))
        lines = [self.title, " " * width + "".join(c.rjust(colw) for c in self.cols)]
        for r, vals in zip(self.rows, self.values):
            cells = "".join(("*" if v is None else f"{v:.2f}").rjust(colw) for v in vals)
            lines.append(r.ljust(width) + cells)
        if self.optimal_cell:
            lines.append(f"optimum: {self.optimal_cell[0]} / {self.optimal_cell[1]}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "rows": self.rows,
            "cols": self.cols,
            "values": self.values,
            "optimal_cell": list(self.optimal_cell) if self.optimal_cell else None,
        }


@dataclass
class SolveResult:
    optimal_policy: Policy
    value: float
    evaluations_bruteforce: int | None
    evaluations_staged: int | None
    stage_tables: list[ReturnTable] = field(default_factory=list)
    method: str = ""

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "optimal_policy": self.optimal_policy.to_dict(),
            "value": self.value,
            "evaluations_bruteforce": self.evaluations_bruteforce,
            "evaluations_staged": self.evaluations_staged,
            "stage_tables": [t.to_dict() for t in self.stage_tables],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class VoiResult:
    paper_voi: float
    free_voi: float


class PlanModel:
    """Pre-computed matrices, schedules and baselines for one backbone."""

    def __init__(self, s: Scenario, b: DecisionBackbone):
        self.s, self.b = s, b
        self.T, self.t2 = s.horizon_T, b.decision_period
        self.absorbing = np.ascontiguousarray(absorbing_mask(s))
        self.w = np.array([1.0 if sec.sensitive else 0.0 for sec in s.sectors])
        self.inj = np.ascontiguousarray(injection_schedule(s))
        self.blind = self._moff(build_transitions(s).uncertain)
        self.hyp_names = [h.name for h in s.hypotheses]
        self.hyp_weights = np.array([h.weight for h in s.hypotheses])
        self.observed = [self._moff(build_transitions(s, h.spread_shift).observed) for h in s.hypotheses]
        self._fracs: dict = {}
        none1, none2 = b.none_first(), b.none_second()
        self.base_blind = self.terminal(self.blind, self.plan_fracs(none1, SURVEIL, none2))
        base_obs = [self.terminal(m, self.plan_fracs(none1, SURVEIL, none2)) for m in self.observed]
        self.base_obs_parts = np.array(base_obs)
        self.base_obs = float(np.dot(self.hyp_weights, self.base_obs_parts))
        if not (self.base_blind > 0 and self.base_obs > 0):
            raise DegenerateScenarioError("no oil reaches a sensitive area without controls")

    def _moff(self, mats) -> np.ndarray:
        out = np.array(mats, dtype=np.float64)
        idx = np.flatnonzero(self.absorbing)
        out[:, idx, idx] = 0.0
        return np.ascontiguousarray(out)

    def plan_fracs(self, first: BoomAction, aircraft: str, second: BoomAction) -> np.ndarray:
        key = (first.label, aircraft, second.label)
        if key not in self._fracs:
            d = self.b.deployment(first, aircraft, second)
            self._fracs[key] = np.ascontiguousarray(removal_schedule(self.s, d))
        return self._fracs[key]

    def terminal(self, moff: np.ndarray, fracs: np.ndarray) -> float:
        z = np.zeros(self.s.n)
        a, b = kernels.forward(moff, self.absorbing, fracs, self.inj, z, z, 0, self.T)
        return float(np.dot(self.w, a + b))

    def regimes(self, aircraft: str) -> list[np.ndarray]:
        return [self.blind] if aircraft == DISPERSE else self.observed

    def raw_values(self, first: BoomAction, aircraft: str, second: BoomAction) -> np.ndarray:
        """Sensitive-shore barrels per regime (one entry when blind)."""
        fr = self.plan_fracs(first, aircraft, second)
        return np.array([self.terminal(m, fr) for m in self.regimes(aircraft)])

    def normalise(self, aircraft: str, per_class: np.ndarray) -> float:
        if aircraft == DISPERSE:
            return float(per_class[0]) / self.base_blind
        return float(np.dot(self.hyp_weights, per_class)) / self.base_obs


def _argmin(cands):
    """``cands``: iterable of (value, tiebreak key, payload); lowest value,
    near-ties resolved by key."""
    cands = list(cands)
    best = min(v for v, _, _ in cands)
    return min((c for c in cands if c[0] <= best + TIE_TOL), key=lambda c: c[1])


def _order(b: DecisionBackbone):
    first_rank = {a.label: i for i, a in enumerate(b.first)}
    second_rank = {a.boom.label: i for i, a in enumerate(b.second)}
    return first_rank, second_rank


def _optimise(model: PlanModel, value_of) -> tuple[Policy, float]:
    """Shared stage combination: ``value_of(first, aircraft, second)`` gives
    raw per-class values; the contingent choice is optimised per class."""
    b = model.b
    first_rank, second_rank = _order(b)
    cands = []
    for f in b.first:
        for aircraft in b.aircraft_options():
            options = [c.boom for c in b.second if c.aircraft == aircraft and b.admissible(f, c.boom)]
            if not options:
                continue
            raws = {g.label: value_of(f, aircraft, g) for g in options}
            key_base = (first_rank[f.label], AIRCRAFT_ORDER.index(aircraft))
            if aircraft == DISPERSE or len(model.hyp_names) == 1:
                for g in options:
                    v = model.normalise(aircraft, raws[g.label])
                    cands.append((v, key_base + ((second_rank[g.label],),), Policy(f.label, aircraft, g.label)))
            else:
                chosen, per_class = [], []
                for h, name in enumerate(model.hyp_names):
                    v, _, g = _argmin((raws[g.label][h] / model.base_obs, second_rank[g.label], g.label) for g in options)
                    chosen.append((name, g))
                    per_class.append(raws[g][h])
                v = model.normalise(aircraft, np.array(per_class))
                ranks = tuple(second_rank[g] for _, g in chosen)
                if len({g for _, g in chosen}) == 1:
                    second = chosen[0][1]
                else:
                    second = tuple(chosen)
                cands.append((v, key_base + (ranks,), Policy(f.label, aircraft, second)))
    v, _, policy = _argmin(cands)
    return policy, v


def brute_force(s: Scenario, b: DecisionBackbone | None = None, tables: bool = True) -> SolveResult:
    """Forward-simulate every plan in the backbone's product space."""
    b = b or build_backbone(s)
    model = PlanModel(s, b)
    raw = {}
    for f in b.first:
        for c in b.second:
            raw[(f.label, c.aircraft, c.boom.label)] = model.raw_values(f, c.aircraft, c.boom)
    policy, value = _optimise(model, lambda f, a, g: raw[(f.label, a, g.label)])
    return SolveResult(
        optimal_policy=policy,
        value=value,
        evaluations_bruteforce=len(raw),
        evaluations_staged=None,
        stage_tables=[stage_return_table(s, b, 2, model), stage_return_table(s, b, 1, model)] if tables else [],
        method="brute",
    )


def backward_induct(s: Scenario, b: DecisionBackbone | None = None, tables: bool = True) -> SolveResult:
    """Bellman recursion over the two decision points.

    Stage 2: for each (aircraft, boom) choice one backward sweep from the
    horizon to the decision period gives ``V2(a, b) = c.a + c'.b + d`` in
    every regime.  Stage 1: one forward run per first-period action gives
    the oil state at the decision period, which is substituted into the
    stored return functions.
    """
    b = b or build_backbone(s)
    if len(b.second) == 1:
        # a single continuation leaves nothing to factor: run the plans
        result = brute_force(s, b, tables)
        result.evaluations_staged, result.evaluations_bruteforce = result.evaluations_bruteforce, None
        result.method = "staged"
        return result
    model = PlanModel(s, b)
    t2, T = model.t2, model.T
    none1 = b.none_first()
    evaluations = 0
    returns = {}
    for c in b.second:
        fr = model.plan_fracs(none1, c.aircraft, c.boom)
        returns[(c.aircraft, c.boom.label)] = [
            kernels.backward(m, model.absorbing, fr, model.inj, model.w, t2, T) for m in model.regimes(c.aircraft)
        ]
        evaluations += 1
    states = {}
    z = np.zeros(s.n)
    for f in b.first:
        fr = model.plan_fracs(f, SURVEIL, b.none_second())
        states[(f.label, DISPERSE)] = [kernels.forward(model.blind, model.absorbing, fr, model.inj, z, z, 0, t2)]
        states[(f.label, SURVEIL)] = [
            kernels.forward(m, model.absorbing, fr, model.inj, z, z, 0, t2) for m in model.observed
        ]
        evaluations += 1

    def value_of(f, aircraft, g):
        out = []
        for (la, lb, d), (a, bb) in zip(returns[(aircraft, g.label)], states[(f.label, aircraft)]):
            out.append(float(np.dot(la, a) + np.dot(lb, bb) + d))
        return np.array(out)

    policy, value = _optimise(model, value_of)
    return SolveResult(
        optimal_policy=policy,
        value=value,
        evaluations_bruteforce=None,
        evaluations_staged=evaluations,
        stage_tables=[stage_return_table(s, b, 2, model), stage_return_table(s, b, 1, model)] if tables else [],
        method="staged",
    )


def evaluate_plan(s: Scenario, p: Policy, b: DecisionBackbone | None = None, model: PlanModel | None = None) -> float:
    """Objective fraction of a policy (expectation over hypotheses when surveilling)."""
    b = b or build_backbone(s)
    model = model or PlanModel(s, b)
    f = b.first_action(p.first_boom)
    if not p.contingent:
        g = b.second_boom(p.second_boom)
        return model.normalise(p.aircraft, model.raw_values(f, p.aircraft, g))
    per_class = []
    for h, name in enumerate(model.hyp_names):
        g = b.second_boom(p.second_for(name))
        per_class.append(model.raw_values(f, p.aircraft, g)[h])
    return model.normalise(p.aircraft, np.array(per_class))


def stage_return_table(s: Scenario, b: DecisionBackbone, stage: int, model: PlanModel | None = None) -> ReturnTable:
    """Stage 2: second-period boom x aircraft, nothing laid in period one.
    Stage 1: second-period boom x first-period boom, dispersant plans, with
    best-practice-pruned cells left uncalculated."""
    model = model or PlanModel(s, b)
    if stage == 2:
        rows = b.second_labels() + [NONE]
        cols = list(AIRCRAFT_ORDER)
        f = b.none_first()
        offered = {(c.aircraft, c.boom.label) for c in b.second}
        values = []
        for r in rows:
            g = b.second_boom(r)
            line = []
            for col in cols:
                if r != NONE and (col, r) not in offered:
                    line.append(None)
                    continue
                line.append(model.normalise(col, model.raw_values(f, col, g)))
            values.append(line)
        title = "second-period return: fraction of oil left in sensitive areas"
    elif stage == 1:
        rows = b.second_labels()
        cols = [a.label for a in b.first]
        aircraft = DISPERSE if DISPERSE in b.aircraft_options() else SURVEIL
        offered = {c.boom.label for c in b.second if c.aircraft == aircraft}
        values = []
        for r in rows:
            g = b.second_boom(r)
            line = []
            for col in cols:
                f = b.first_action(col)
                if r not in offered or not b.admissible(f, g):
                    line.append(None)
                else:
                    line.append(model.normalise(aircraft, model.raw_values(f, aircraft, g)))
            values.append(line)
        title = f"both periods ({aircraft}): fraction of oil left in sensitive areas"
    else:
        raise ValueError("stage must be 1 or 2")
    cells = [(v, (i, j)) for i, line in enumerate(values) for j, v in enumerate(line) if v is not None]
    optimal = None
    if cells:
        best = min(v for v, _ in cells)
        i, j = min(k for v, k in cells if v <= best + TIE_TOL)
        optimal = (rows[i], cols[j])
    return ReturnTable(title, rows, cols, values, optimal)


def _branch_best(model: PlanModel, aircraft: str, contingent: bool) -> float:
    b = model.b
    best = np.inf
    for f in b.first:
        options = [c.boom for c in b.second if c.aircraft == aircraft and b.admissible(f, c.boom)]
        if not options:
            continue
        raws = [model.raw_values(f, aircraft, g) for g in options]
        if contingent:
            v = model.normalise(aircraft, np.min(np.vstack(raws), axis=0))
        else:
            v = min(model.normalise(aircraft, r) for r in raws)
        best = min(best, v)
    return best


def value_of_surveillance(s: Scenario, b: DecisionBackbone | None = None) -> VoiResult:
    """``paper_voi``: best dispersant plan minus best surveillance plan (the
    aircraft trade-off; negative when surveillance loses).  ``free_voi``: gain
    from observing the true trajectory for free while still dispersing,
    scored in the hypothesis world; never negative."""
    b = b or build_backbone(s)
    model = PlanModel(s, b)
    aircraft = b.aircraft_options()
    trade_off = np.nan
    if SURVEIL in aircraft and DISPERSE in aircraft:
        trade_off = _branch_best(model, DISPERSE, False) - _branch_best(model, SURVEIL, True)
    labels = b.second_labels()
    use = DISPERSE if DISPERSE in aircraft else SURVEIL
    blind_best, informed_best = np.inf, np.inf
    for f in b.first:
        opts = [b.second_boom(l) for l in labels if b.admissible(f, b.second_boom(l))]
        if not opts:
            continue
        raws = []
        for g in opts:
            fr = model.plan_fracs(f, use, g)
            raws.append([model.terminal(m, fr) for m in model.observed])
        raws = np.array(raws)
        blind_best = min(blind_best, float(np.min(raws @ model.hyp_weights)) / model.base_obs)
        informed_best = min(informed_best, float(np.dot(model.hyp_weights, raws.min(axis=0))) / model.base_obs)
    return VoiResult(float(trade_off), blind_best - informed_best)


def policy_names(b: DecisionBackbone) -> list[str]:
    names = [NONE_POLICY.name]
    for f in b.first:
        for c in b.second:
            names.append(Policy(f.label, c.aircraft, c.boom.label).name)
    return names


def parse_policy_name(name: str) -> Policy:
    parts = name.split("-")
    if len(parts) != 3:
        raise ValueError(f"policy name must look like first-aircraft-second, got {name!r}")
    return Policy(*parts)


__all__ = [
    "STRATEGY_ORDER",
    "Policy",
    "ReturnTable",
    "SolveResult",
    "VoiResult",
    "PlanModel",
    "DegenerateScenarioError",
    "brute_force",
    "backward_induct",
    "evaluate_plan",
    "stage_return_table",
    "value_of_surveillance",
    "policy_names",
    "parse_policy_name",
    "SecondAction",
]
