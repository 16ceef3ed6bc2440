"""Random small scenarios for property and oracle tests."""

from __future__ import annotations

import numpy as np

from spillplan.backbone import FIRST_STRATEGIES, SECOND_STRATEGIES
from spillplan.equipment import DISPERSE, SURVEIL
from spillplan.scenario import from_dict, validate


def random_doc(rng: np.random.Generator, n_hyp: int | None = None, uf: float | None = None) -> dict:
    """At most six sectors, two or three of them sensitive shore."""
    n_sea = int(rng.integers(2, 4))
    n_shore = int(rng.integers(2, 7 - n_sea))
    sea = [f"S{i}" for i in range(n_sea)]
    shore = [f"H{i}" for i in range(n_shore)]
    n_sens = int(rng.integers(2, n_shore + 1))
    sectors = [{"id": s, "kind": "sea", "span": float(rng.uniform(200, 600))} for s in sea]
    for i, h in enumerate(shore):
        d = {"id": h, "kind": "shore", "span": float(rng.uniform(200, 600))}
        if i < n_sens:
            d["sensitive"] = True
        sectors.append(d)
    edges = set()
    for i in range(1, n_sea):  # a random tree below the source
        edges.add((sea[int(rng.integers(0, i))], sea[i]))
    for h in shore:
        edges.add((sea[int(rng.integers(0, n_sea))], h))
    for _ in range(int(rng.integers(0, 3))):
        a, b = rng.choice(sea), rng.choice(sea + shore)
        if a != b:
            edges.add((str(a), str(b)))
    targets = [sea[0]] + shore[:n_sens]
    booms = []
    for k in range(int(rng.integers(1, 4))):
        reach = [t for t in targets if rng.random() < 0.8] or [sea[0]]
        booms.append(
            {
                "id": f"B{k}",
                "length": float(rng.choice([300.0, 500.0, 900.0, 1500.0])),
                "staging_site": "base",
                "transit_time": {t: float(rng.uniform(0, 5)) for t in reach},
            }
        )
    n_hyp = n_hyp if n_hyp is not None else int(rng.integers(1, 4))
    w = rng.uniform(0.2, 1.0, n_hyp)
    w = w / w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    hyps = [{"name": f"h{i}", "weight": float(w[i]), "spread_shift": float(rng.uniform(-1.5, 1.5))} for i in range(n_hyp)]
    horizon = int(rng.integers(6, 13))
    return {
        "sectors": sectors,
        "adjacency": [list(e) for e in sorted(edges)],
        "source": sea[0],
        "spill": {"rate": float(rng.uniform(10, 2000)), "duration": int(rng.integers(1, horizon))},
        "physics": {
            "horizon": horizon,
            "spread_rate": float(rng.uniform(0.1, 0.9)),
            "uncertainty_factor": float(rng.uniform(0, 0.5)) if uf is None else uf,
            "thickness": {s["id"]: float(rng.uniform(0.3, 3)) for s in sectors},
            "natural_decay": float(rng.choice([0.0, 0.02])),
            "hypotheses": hyps,
        },
        "inventory": {
            "booms": booms,
            "aircraft": {"prep_time": float(rng.uniform(0.5, 4)), "dispersant_efficiency": float(rng.uniform(0, 0.9))},
            "boom_curve": {"f_max": float(rng.uniform(0.5, 0.95)), "gamma": float(rng.uniform(0.5, 2))},
            "relocation_delay": int(rng.integers(1, 4)),
        },
    }


def random_scenario(rng: np.random.Generator, **kw):
    s = from_dict(random_doc(rng, **kw))
    assert not validate(s), validate(s)
    return s


def random_restriction(rng: np.random.Generator):
    """Strategy subsets giving at most three actions per decision point."""
    first = [str(x) for x in rng.choice(FIRST_STRATEGIES, int(rng.integers(1, 4)), replace=False)]
    pairs = [(a, n) for a in (SURVEIL, DISPERSE) for n in SECOND_STRATEGIES]
    idx = rng.choice(len(pairs), int(rng.integers(1, 4)), replace=False)
    return first, [pairs[i] for i in idx]
