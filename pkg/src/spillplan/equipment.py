"""Removal function ``e_j(s_j)``: booms, dispersant, arrival times."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import BoomCurve, EquipmentInventory, Scenario

COVERAGE_LEVELS = (0, 1, 2, 3)
SURVEIL = "surveil"
DISPERSE = "disperse"


class EquipmentError(ValueError):
    pass


@dataclass(frozen=True)
class BoomAssignment:
    """``coverage`` layers contributed at ``sector`` for periods in
    ``[arrival_period, until_period)``; ``until_period=None`` means to the end."""

    sector: str
    coverage: int
    arrival_period: int
    until_period: int | None = None
    boom_id: str | None = None

    def __post_init__(self):
        if self.coverage not in COVERAGE_LEVELS:
            raise EquipmentError(f"coverage must be one of {COVERAGE_LEVELS}, got {self.coverage}")
        if self.arrival_period < 0:
            raise EquipmentError("arrival_period must be >= 0")

    def active(self, period: int) -> bool:
        return self.arrival_period <= period and (self.until_period is None or period < self.until_period)


@dataclass(frozen=True)
class AircraftAction:
    kind: str
    execute_period: int
    sector: str | None = None

    def __post_init__(self):
        if self.kind not in (SURVEIL, DISPERSE):
            raise EquipmentError(f"aircraft action must be surveil or disperse, got {self.kind!r}")
        if self.kind == DISPERSE and self.sector is None:
            raise EquipmentError("disperse needs a target sector")


@dataclass(frozen=True)
class Relocation:
    boom_id: str
    from_sector: str
    to_sector: str
    depart_period: int
    arrive_period: int

    def __post_init__(self):
        if self.arrive_period <= self.depart_period:
            raise EquipmentError("relocation must take time")


@dataclass(frozen=True)
class Deployment:
    booms: tuple[BoomAssignment, ...] = ()
    aircraft: AircraftAction | None = None
    relocations: tuple[Relocation, ...] = ()

    def __post_init__(self):
        # a boom sits in at most one sector per period
        by_boom: dict[str, list[BoomAssignment]] = {}
        for a in self.booms:
            if a.boom_id is not None:
                by_boom.setdefault(a.boom_id, []).append(a)
        for bid, items in by_boom.items():
            for x in items:
                for y in items:
                    if x is y or x.sector == y.sector:
                        continue
                    lo = max(x.arrival_period, y.arrival_period)
                    hi = min(x.until_period or math.inf, y.until_period or math.inf)
                    if lo < hi:
                        raise EquipmentError(f"boom {bid} is in two sectors at period {lo}")


def boom_removal_fraction(coverage: int, thickness: float, curve: BoomCurve = BoomCurve()) -> float:
    """Fraction of afloat oil a boom ring of ``coverage`` layers removes per period.

    Sub-unit coverage is useless, so only whole layers count.  Thin slicks are
    contained less efficiently: the fraction scales with
    ``min(1, thickness / reference_thickness)``.
    """
    if coverage not in COVERAGE_LEVELS:
        raise EquipmentError(f"coverage must be one of {COVERAGE_LEVELS}, got {coverage}")
    if not thickness > 0:
        raise EquipmentError("thickness must be > 0")
    if coverage == 0:
        return 0.0
    scale = min(1.0, thickness / curve.reference_thickness)
    return curve.f_max * (coverage / 3.0) ** curve.gamma * scale


def combine(fractions) -> float:
    """Independent removal layers: ``1 - prod(1 - f)``."""
    keep = 1.0
    for f in fractions:
        keep *= 1.0 - f
    return 1.0 - keep


def sector_coverage(d: Deployment, period: int) -> dict[str, int]:
    cov: dict[str, int] = {}
    for a in d.booms:
        if a.active(period):
            cov[a.sector] = cov.get(a.sector, 0) + a.coverage
    return {k: min(3, v) for k, v in cov.items()}


def removal_fractions(s: Scenario, d: Deployment, period: int) -> np.ndarray:
    """Per-sector fraction of afloat oil removed during ``period``."""
    out = np.full(s.n, s.natural_decay)
    curve = s.inventory.boom_curve
    for sid, cov in sector_coverage(d, period).items():
        i = s.index(sid)
        out[i] = combine([out[i], boom_removal_fraction(cov, s.thickness[sid], curve)])
    ac = d.aircraft
    if ac is not None and ac.kind == DISPERSE and ac.execute_period == period:
        i = s.index(ac.sector)
        out[i] = combine([out[i], s.inventory.aircraft.dispersant_efficiency])
    return out


def removal_vector(s: Scenario, d: Deployment, state, period: int) -> np.ndarray:
    """Barrels removed per sector in ``period``; acts on afloat oil only."""
    if period >= s.horizon_T:
        raise EquipmentError("period must lie before the horizon")
    return state.afloat * removal_fractions(s, d, period)


def removal_schedule(s: Scenario, d: Deployment) -> np.ndarray:
    """(T, n) array of removal fractions for the whole horizon."""
    return np.vstack([removal_fractions(s, d, j) for j in range(s.horizon_T)])


def arrival_period(inventory: EquipmentInventory, boom_id: str, target: str, depart_period: int) -> int:
    """Departure plus transit, rounded up to whole periods."""
    try:
        boom = inventory.boom(boom_id)
    except KeyError as exc:
        raise EquipmentError(str(exc)) from exc
    if target not in boom.transit_time:
        raise EquipmentError(f"boom {boom_id} has no transit time to {target!r}")
    return depart_period + math.ceil(boom.transit_time[target])


def relocation_arrival(inventory: EquipmentInventory, boom_id: str, target: str, depart_period: int) -> int:
    """Arrival when a deployed boom is pulled and re-laid elsewhere."""
    return arrival_period(inventory, boom_id, target, depart_period) + inventory.relocation_delay
