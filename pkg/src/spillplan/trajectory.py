"""Sector Markov transport of oil, blind and observed.

Vectors are row vectors: ``s_next[k] = sum_i s[i] * m[i, k]``.  Observed
spreading uses ``M'_j``; the blind (uncertain) forecast uses
``M_j = P @ M'_j`` where ``P`` is built from the uncertainty factor with the
same rule as ``M'``.  The blind trace is read as the median fractile of the
oil quantity.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .scenario import SHORE, Scenario

TOL = 1e-9
SUPPORT_THRESHOLD = 1e-6
FRACTILE_P = 0.5


class TrajectoryError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionSet:
    observed: tuple[np.ndarray, ...]
    uncertain: tuple[np.ndarray, ...]
    uncertainty: np.ndarray


@dataclass(frozen=True)
class OilState:
    """Per-sector barrels at the start of ``period`` (before injection).

    ``landed`` is the part of ``quantities`` at rest in absorbing sectors;
    it can no longer be removed by equipment.
    """

    quantities: np.ndarray
    period: int = 0
    fractile_p: float = FRACTILE_P
    landed: np.ndarray | None = None

    @property
    def afloat(self) -> np.ndarray:
        if self.landed is None:
            return self.quantities
        return self.quantities - self.landed

    @property
    def total(self) -> float:
        return float(self.quantities.sum())


@dataclass
class TrajectoryTrace:
    sector_ids: list[str]
    states: list[OilState]
    removals: list[np.ndarray]
    injections: list[np.ndarray]
    observed_at: int | None = None
    regime: str = "blind"
    extra: dict = field(default_factory=dict)

    def matrix(self) -> np.ndarray:
        return np.vstack([st.quantities for st in self.states])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.sector_ids)
        for st in self.states:
            w.writerow([repr(float(v)) for v in st.quantities])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    def support(self, period: int, threshold: float = SUPPORT_THRESHOLD) -> set[str]:
        q = self.states[period].quantities
        return {sid for sid, v in zip(self.sector_ids, q) if v > threshold}


def spread_matrix(s: Scenario, rate: float) -> np.ndarray:
    """Row-stochastic spreading: a sea sector keeps ``1 - rate`` and sends
    ``rate`` split evenly over its out-neighbours; shore rows are identity."""
    n = s.n
    m = np.zeros((n, n))
    for i, sec in enumerate(s.sectors):
        nbrs = [s.index(b) for b in s.out_neighbors(sec.id)]
        if sec.kind == SHORE or not nbrs or rate == 0.0:
            m[i, i] = 1.0
            continue
        m[i, i] = 1.0 - rate
        for k in nbrs:
            m[i, k] += rate / len(nbrs)
    return m


def apply_uncertainty(mprime: np.ndarray, p_matrix: np.ndarray) -> np.ndarray:
    """Return ``P @ M'``: spread by the uncertainty matrix, then by M'."""
    mprime = np.asarray(mprime, dtype=float)
    p_matrix = np.asarray(p_matrix, dtype=float)
    if mprime.ndim != 2 or mprime.shape[0] != mprime.shape[1] or p_matrix.shape != mprime.shape:
        raise TrajectoryError(f"dimension mismatch: {p_matrix.shape} vs {mprime.shape}")
    return p_matrix @ mprime


def period_rates(s: Scenario, shift: float = 0.0) -> list[float]:
    base = s.spread_schedule if s.spread_schedule is not None else [s.spread_rate] * s.horizon_T
    return [min(1.0, max(0.0, r + shift * s.uncertainty_factor)) for r in base]


def _frozen(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


def build_transitions(s: Scenario, shift: float = 0.0) -> TransitionSet:
    """Pre-compute ``M'_j`` and ``M_j`` for every period.

    ``shift`` selects a hypothesis (see :class:`~spillplan.scenario.Hypothesis`);
    the uncertainty matrix itself does not depend on it.
    """
    p = _frozen(spread_matrix(s, s.uncertainty_factor))
    cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    observed, uncertain = [], []
    for rate in period_rates(s, shift):
        if rate not in cache:
            mp = spread_matrix(s, rate)
            cache[rate] = (_frozen(mp), _frozen(apply_uncertainty(mp, p)))
        observed.append(cache[rate][0])
        uncertain.append(cache[rate][1])
    return TransitionSet(tuple(observed), tuple(uncertain), p)


def absorbing_mask(s: Scenario) -> np.ndarray:
    return np.array([1.0 if sec.kind == SHORE else 0.0 for sec in s.sectors])


def injection_vector(s: Scenario, period: int) -> np.ndarray:
    v = np.zeros(s.n)
    if period < s.spill_duration:
        v[s.index(s.source)] = s.spill_rate
    return v


def injection_schedule(s: Scenario) -> np.ndarray:
    return np.vstack([injection_vector(s, j) for j in range(s.horizon_T)])


def propagate(
    state: OilState,
    m: np.ndarray,
    removal: np.ndarray,
    absorbing: np.ndarray | None = None,
) -> OilState:
    """One period of ``s_{j+1} = M [s_j - e_j]``.

    ``absorbing`` marks sectors whose retained oil lands; when omitted it is
    inferred from unit rows of ``m``.
    """
    q = np.asarray(state.quantities, dtype=float)
    removal = np.asarray(removal, dtype=float)
    if np.any(removal < 0) or np.any(removal > state.afloat + TOL * max(1.0, float(np.abs(q).max(initial=0.0)))):
        raise TrajectoryError("removal must lie between 0 and the afloat quantity in every sector")
    if absorbing is None:
        absorbing = (np.isclose(np.diag(m), 1.0)).astype(float)
    left = np.clip(q - removal, 0.0, None)
    return OilState(
        quantities=left @ m,
        period=state.period + 1,
        fractile_p=state.fractile_p,
        landed=left * absorbing,
    )


def run_trajectory(
    s: Scenario,
    deployment=None,
    observe_at: int | None = None,
    transitions: TransitionSet | None = None,
) -> TrajectoryTrace:
    """Account oil per period and sector under ``deployment``.

    Without an observation the blind matrices ``M_j`` are used.  With
    ``observe_at`` the whole trace is recomputed from period 0 with the
    observed matrices ``M'_j``, which is what observing the slick does to the
    known history.
    """
    from .equipment import Deployment, removal_vector

    if observe_at is not None and not 0 <= observe_at < s.horizon_T:
        raise TrajectoryError("observe_at must lie in [0, horizon)")
    deployment = deployment or Deployment()
    ts = transitions or build_transitions(s)
    mats = ts.observed if observe_at is not None else ts.uncertain
    absorbing = absorbing_mask(s)
    state = OilState(np.zeros(s.n), 0, FRACTILE_P, np.zeros(s.n))
    states, removals, injections = [], [], []
    for j in range(s.horizon_T):
        inj = injection_vector(s, j)
        states.append(state)
        injections.append(inj)
        loaded = OilState(state.quantities + inj, j, state.fractile_p, state.landed)
        r = removal_vector(s, deployment, loaded, j)
        removals.append(r)
        state = propagate(loaded, mats[j], r, absorbing)
    states.append(state)
    return TrajectoryTrace(
        sector_ids=s.sector_ids,
        states=states,
        removals=removals,
        injections=injections,
        observed_at=observe_at,
        regime="observed" if observe_at is not None else "blind",
    )


def oil_arrival_periods(s: Scenario, transitions: TransitionSet | None = None, observed: bool = True) -> dict[str, int | None]:
    """First period each sector holds more than the support threshold with
    no equipment deployed (after that period's injection)."""
    ts = transitions or build_transitions(s)
    mats = ts.observed if observed else ts.uncertain
    absorbing = absorbing_mask(s)
    state = OilState(np.zeros(s.n), 0, FRACTILE_P, np.zeros(s.n))
    first: dict[str, int | None] = {sid: None for sid in s.sector_ids}
    for j in range(s.horizon_T + 1):
        q = state.quantities + (injection_vector(s, j) if j < s.horizon_T else 0.0)
        for sid, v in zip(s.sector_ids, q):
            if first[sid] is None and v > SUPPORT_THRESHOLD:
                first[sid] = j
        if j < s.horizon_T:
            loaded = OilState(q, j, FRACTILE_P, state.landed)
            state = propagate(loaded, mats[j], np.zeros(s.n), absorbing)
    return first
