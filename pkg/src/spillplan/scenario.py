"""World model types and the JSON scenario format.

A scenario file is a UTF-8 JSON document with exactly the top-level keys
``sectors``, ``adjacency``, ``source``, ``spill``, ``physics`` and
``inventory``.  Unknown keys are rejected at every level so that typos fail
loudly.  The order of ``sectors`` fixes the row/column order of every vector
and matrix built from the scenario.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SEA = "sea"
SHORE = "shore"


class ScenarioError(ValueError):
    """Base class for scenario loading failures."""


class ScenarioParseError(ScenarioError):
    """The file is not a well-formed scenario document."""


class ScenarioValidationError(ScenarioError):
    """The document parsed but violates one or more invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Sector:
    id: str
    kind: str
    span: float
    sensitive: bool = False


@dataclass(frozen=True)
class Boom:
    id: str
    length: float
    staging_site: str
    transit_time: dict[str, float]


@dataclass(frozen=True)
class Aircraft:
    prep_time: float
    dispersant_efficiency: float


@dataclass(frozen=True)
class BoomCurve:
    """Calibration of boom containment: ``f_max * (c/3)**gamma``."""

    f_max: float = 0.9
    gamma: float = 1.0
    reference_thickness: float = 1.0


@dataclass(frozen=True)
class EquipmentInventory:
    booms: tuple[Boom, ...]
    aircraft: Aircraft
    boom_curve: BoomCurve = BoomCurve()
    relocation_delay: int = 2

    def boom(self, boom_id: str) -> Boom:
        for b in self.booms:
            if b.id == boom_id:
                return b
        raise KeyError(f"unknown boom {boom_id!r}")


@dataclass(frozen=True)
class Hypothesis:
    """One possible world for the trajectory.

    The spreading rate under this hypothesis is
    ``spread_rate + spread_shift * uncertainty_factor`` (clipped to [0, 1]),
    so every hypothesis collapses onto the nominal trajectory when the
    uncertainty factor is zero.
    """

    name: str
    weight: float
    spread_shift: float = 0.0


NOMINAL = (Hypothesis("nominal", 1.0, 0.0),)


@dataclass(frozen=True)
class Scenario:
    sectors: tuple[Sector, ...]
    adjacency: tuple[tuple[str, str], ...]
    source: str
    spill_rate: float
    spill_duration: int
    spread_rate: float
    uncertainty_factor: float
    thickness: dict[str, float]
    inventory: EquipmentInventory
    horizon_T: int = 24
    hypotheses: tuple[Hypothesis, ...] = NOMINAL
    natural_decay: float = 0.0
    spread_schedule: tuple[float, ...] | None = None
    # Scenario-wide thickness used when the file gave a single number.
    default_thickness: float | None = field(default=None, compare=True)

    @property
    def sector_ids(self) -> list[str]:
        return [s.id for s in self.sectors]

    @property
    def n(self) -> int:
        return len(self.sectors)

    def index(self, sector_id: str) -> int:
        for i, s in enumerate(self.sectors):
            if s.id == sector_id:
                return i
        raise KeyError(f"unknown sector {sector_id!r}")

    def sector(self, sector_id: str) -> Sector:
        return self.sectors[self.index(sector_id)]

    @property
    def sensitive_targets(self) -> list[str]:
        return [s.id for s in self.sectors if s.sensitive]

    @property
    def decision_period(self) -> int:
        """Period of the second decision: the aircraft is ready then."""
        return max(1, math.ceil(self.inventory.aircraft.prep_time))

    def out_neighbors(self, sector_id: str) -> list[str]:
        return [b for a, b in self.adjacency if a == sector_id]

    def replace(self, **changes: Any) -> Scenario:
        import dataclasses

        return dataclasses.replace(self, **changes)


def validate(s: Scenario) -> list[str]:
    """Return one description per violated invariant; empty when valid."""
    out: list[str] = []
    ids = [sec.id for sec in s.sectors]
    if len(set(ids)) != len(ids):
        out.append("sectors: duplicate sector id")
    known = set(ids)
    kinds = {}
    for sec in s.sectors:
        kinds[sec.id] = sec.kind
        if sec.kind not in (SEA, SHORE):
            out.append(f"sectors[{sec.id}].kind must be 'sea' or 'shore'")
        if not sec.span > 0:
            out.append(f"sectors[{sec.id}].span must be > 0")
        if sec.sensitive and sec.kind != SHORE:
            out.append(f"sectors[{sec.id}].sensitive only allowed on shore sectors")
    for a, b in s.adjacency:
        if a not in known or b not in known:
            out.append(f"adjacency: edge {a}->{b} names an unknown sector")
            continue
        if a == b:
            out.append(f"adjacency: self loop on {a}")
        if kinds[a] == SHORE:
            out.append(f"adjacency: shore sector {a} has an outgoing edge (shore is absorbing)")
    if len(set(s.adjacency)) != len(s.adjacency):
        out.append("adjacency: duplicate edge")
    if s.source not in known:
        out.append(f"source: unknown sector {s.source!r}")
    elif kinds[s.source] != SEA:
        out.append("source must be a sea sector")
    if not (isinstance(s.horizon_T, int) and s.horizon_T >= 2):
        out.append("physics.horizon must be an integer >= 2")
    if not (isinstance(s.spill_duration, int) and 0 <= s.spill_duration <= s.horizon_T):
        out.append("spill.duration must be an integer in [0, horizon]")
    if not s.spill_rate >= 0:
        out.append("spill.rate must be >= 0")
    for name in ("spread_rate", "uncertainty_factor", "natural_decay"):
        v = getattr(s, name)
        if not 0.0 <= v <= 1.0:
            out.append(f"{name} out of [0,1]")
    if s.spread_schedule is not None:
        if len(s.spread_schedule) != s.horizon_T:
            out.append("physics.spread_schedule must have one entry per period")
        if any(not 0.0 <= v <= 1.0 for v in s.spread_schedule):
            out.append("physics.spread_schedule entries out of [0,1]")
    for sid, t in s.thickness.items():
        if sid not in known:
            out.append(f"physics.thickness names unknown sector {sid!r}")
        if not t > 0:
            out.append(f"physics.thickness[{sid}] must be > 0")
    missing = known - set(s.thickness)
    if missing:
        out.append(f"physics.thickness missing for {sorted(missing)}")
    if not s.hypotheses:
        out.append("physics.hypotheses must not be empty")
    else:
        names = [h.name for h in s.hypotheses]
        if len(set(names)) != len(names):
            out.append("physics.hypotheses: duplicate name")
        if any(not h.weight > 0 for h in s.hypotheses):
            out.append("physics.hypotheses weights must be > 0")
        if abs(sum(h.weight for h in s.hypotheses) - 1.0) > 1e-9:
            out.append("physics.hypotheses weights must sum to 1")
    out.extend(_validate_inventory(s, known))
    return out


def _validate_inventory(s: Scenario, known: set[str]) -> list[str]:
    out = []
    inv = s.inventory
    bids = [b.id for b in inv.booms]
    if len(set(bids)) != len(bids):
        out.append("inventory.booms: duplicate boom id")
    for b in inv.booms:
        if not b.length > 0:
            out.append(f"inventory.booms[{b.id}].length must be > 0")
        for sid, t in b.transit_time.items():
            if sid not in known:
                out.append(f"inventory.booms[{b.id}].transit_time names unknown sector {sid!r}")
            if not t >= 0:
                out.append(f"inventory.booms[{b.id}].transit_time[{sid}] must be >= 0")
    ac = inv.aircraft
    if not 0.0 <= ac.dispersant_efficiency <= 1.0:
        out.append("inventory.aircraft.dispersant_efficiency out of [0,1]")
    if not ac.prep_time >= 0:
        out.append("inventory.aircraft.prep_time must be >= 0")
    elif isinstance(s.horizon_T, int) and not max(1, math.ceil(ac.prep_time)) < s.horizon_T:
        out.append("inventory.aircraft.prep_time must be ready before the horizon")
    c = inv.boom_curve
    if not 0.0 <= c.f_max < 1.0:
        out.append("inventory.boom_curve.f_max must lie in [0,1) (booms leak)")
    if not c.gamma > 0:
        out.append("inventory.boom_curve.gamma must be > 0")
    if not c.reference_thickness > 0:
        out.append("inventory.boom_curve.reference_thickness must be > 0")
    if not (isinstance(inv.relocation_delay, int) and inv.relocation_delay >= 1):
        out.append("inventory.relocation_delay must be an integer >= 1")
    return out


# -- file format -----------------------------------------------------------

_TOP = {"sectors", "adjacency", "source", "spill", "physics", "inventory"}
_SECTOR = {"id", "kind", "span", "sensitive"}
_SPILL = {"rate", "duration"}
_PHYSICS = {
    "horizon",
    "spread_rate",
    "uncertainty_factor",
    "thickness",
    "natural_decay",
    "spread_schedule",
    "hypotheses",
}
_HYP = {"name", "weight", "spread_shift"}
_INVENTORY = {"booms", "aircraft", "boom_curve", "relocation_delay"}
_BOOM = {"id", "length", "staging_site", "transit_time"}
_AIRCRAFT = {"prep_time", "dispersant_efficiency"}
_CURVE = {"f_max", "gamma", "reference_thickness"}


def _obj(value: Any, where: str, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(value, dict):
        raise ScenarioParseError(f"{where}: expected an object")
    unknown = set(value) - allowed
    if unknown:
        raise ScenarioParseError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(value)
    if missing:
        raise ScenarioParseError(f"{where}: missing key(s) {sorted(missing)}")
    return value


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"{where}: expected a number")
    return float(value)


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(f"{where}: expected an integer")
    return value


def from_dict(doc: Any) -> Scenario:
    """Build a Scenario from a parsed document without validating it."""
    doc = _obj(doc, "scenario", _TOP, _TOP)
    if not isinstance(doc["sectors"], list):
        raise ScenarioParseError("sectors: expected a list")
    sectors = []
    for i, raw in enumerate(doc["sectors"]):
        raw = _obj(raw, f"sectors[{i}]", _SECTOR, {"id", "kind", "span"})
        sectors.append(
            Sector(
                id=str(raw["id"]),
                kind=raw["kind"],
                span=_num(raw["span"], f"sectors[{i}].span"),
                sensitive=bool(raw.get("sensitive", False)),
            )
        )
    if not isinstance(doc["adjacency"], list):
        raise ScenarioParseError("adjacency: expected a list of [from, to] pairs")
    edges = []
    for i, e in enumerate(doc["adjacency"]):
        if not (isinstance(e, list) and len(e) == 2):
            raise ScenarioParseError(f"adjacency[{i}]: expected a [from, to] pair")
        edges.append((str(e[0]), str(e[1])))
    spill = _obj(doc["spill"], "spill", _SPILL, _SPILL)
    phys = _obj(doc["physics"], "physics", _PHYSICS, {"spread_rate", "uncertainty_factor", "thickness"})
    ids = [s.id for s in sectors]
    default_thickness = None
    thick = phys["thickness"]
    if isinstance(thick, dict):
        thickness = {str(k): _num(v, f"physics.thickness[{k}]") for k, v in thick.items()}
    else:
        default_thickness = _num(thick, "physics.thickness")
        thickness = {sid: default_thickness for sid in ids}
    hyps = NOMINAL
    if "hypotheses" in phys:
        if not isinstance(phys["hypotheses"], list):
            raise ScenarioParseError("physics.hypotheses: expected a list")
        parsed = []
        for i, h in enumerate(phys["hypotheses"]):
            where = f"physics.hypotheses[{i}]"
            h = _obj(h, where, _HYP, {"name", "weight"})
            parsed.append(
                Hypothesis(
                    name=str(h["name"]),
                    weight=_num(h["weight"], f"{where}.weight"),
                    spread_shift=_num(h.get("spread_shift", 0.0), f"{where}.spread_shift"),
                )
            )
        hyps = tuple(parsed)
    schedule = phys.get("spread_schedule")
    if schedule is not None:
        if not isinstance(schedule, list):
            raise ScenarioParseError("physics.spread_schedule: expected a list")
        schedule = tuple(_num(v, "physics.spread_schedule") for v in schedule)
    inv = _obj(doc["inventory"], "inventory", _INVENTORY, {"booms", "aircraft"})
    if not isinstance(inv["booms"], list):
        raise ScenarioParseError("inventory.booms: expected a list")
    booms = []
    for i, raw in enumerate(inv["booms"]):
        raw = _obj(raw, f"inventory.booms[{i}]", _BOOM, _BOOM)
        if not isinstance(raw["transit_time"], dict):
            raise ScenarioParseError(f"inventory.booms[{i}].transit_time: expected an object")
        booms.append(
            Boom(
                id=str(raw["id"]),
                length=_num(raw["length"], f"inventory.booms[{i}].length"),
                staging_site=str(raw["staging_site"]),
                transit_time={
                    str(k): _num(v, f"inventory.booms[{i}].transit_time[{k}]")
                    for k, v in raw["transit_time"].items()
                },
            )
        )
    if isinstance(inv["aircraft"], list):
        raise ScenarioParseError("inventory.aircraft: exactly one aircraft object is supported")
    ac = _obj(inv["aircraft"], "inventory.aircraft", _AIRCRAFT, _AIRCRAFT)
    curve = _obj(inv.get("boom_curve", {}), "inventory.boom_curve", _CURVE, set())
    inventory = EquipmentInventory(
        booms=tuple(booms),
        aircraft=Aircraft(
            prep_time=_num(ac["prep_time"], "inventory.aircraft.prep_time"),
            dispersant_efficiency=_num(ac["dispersant_efficiency"], "inventory.aircraft.dispersant_efficiency"),
        ),
        boom_curve=BoomCurve(
            **{k: _num(v, f"inventory.boom_curve.{k}") for k, v in curve.items()}
        ),
        relocation_delay=_int(inv.get("relocation_delay", 2), "inventory.relocation_delay"),
    )
    return Scenario(
        sectors=tuple(sectors),
        adjacency=tuple(edges),
        source=str(doc["source"]),
        spill_rate=_num(spill["rate"], "spill.rate"),
        spill_duration=_int(spill["duration"], "spill.duration"),
        spread_rate=_num(phys["spread_rate"], "physics.spread_rate"),
        uncertainty_factor=_num(phys["uncertainty_factor"], "physics.uncertainty_factor"),
        thickness=thickness,
        inventory=inventory,
        horizon_T=_int(phys.get("horizon", 24), "physics.horizon"),
        hypotheses=hyps,
        natural_decay=_num(phys.get("natural_decay", 0.0), "physics.natural_decay"),
        spread_schedule=schedule,
        default_thickness=default_thickness,
    )


def to_dict(s: Scenario) -> dict:
    """Serialize to the file format; ``from_dict(to_dict(s)) == s``."""
    sectors = []
    for sec in s.sectors:
        d: dict[str, Any] = {"id": sec.id, "kind": sec.kind, "span": sec.span}
        if sec.sensitive:
            d["sensitive"] = True
        sectors.append(d)
    physics: dict[str, Any] = {
        "horizon": s.horizon_T,
        "spread_rate": s.spread_rate,
        "uncertainty_factor": s.uncertainty_factor,
        "thickness": s.default_thickness if s.default_thickness is not None else dict(s.thickness),
        "natural_decay": s.natural_decay,
        "hypotheses": [
            {"name": h.name, "weight": h.weight, "spread_shift": h.spread_shift} for h in s.hypotheses
        ],
    }
    if s.spread_schedule is not None:
        physics["spread_schedule"] = list(s.spread_schedule)
    inv = s.inventory
    return {
        "sectors": sectors,
        "adjacency": [list(e) for e in s.adjacency],
        "source": s.source,
        "spill": {"rate": s.spill_rate, "duration": s.spill_duration},
        "physics": physics,
        "inventory": {
            "booms": [
                {
                    "id": b.id,
                    "length": b.length,
                    "staging_site": b.staging_site,
                    "transit_time": dict(b.transit_time),
                }
                for b in inv.booms
            ],
            "aircraft": {
                "prep_time": inv.aircraft.prep_time,
                "dispersant_efficiency": inv.aircraft.dispersant_efficiency,
            },
            "boom_curve": {
                "f_max": inv.boom_curve.f_max,
                "gamma": inv.boom_curve.gamma,
                "reference_thickness": inv.boom_curve.reference_thickness,
            },
            "relocation_delay": inv.relocation_delay,
        },
    }


def serialize(s: Scenario) -> str:
    return json.dumps(to_dict(s), indent=2) + "\n"


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"malformed JSON: {exc}") from exc
    s = from_dict(doc)
    problems = validate(s)
    if problems:
        raise ScenarioValidationError(problems)
    return s


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text)


def demo_path() -> Path:
    return Path(__file__).parent / "data" / "demo.json"


def load_demo() -> Scenario:
    return load_scenario(demo_path())
