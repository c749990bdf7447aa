"""Data-analysis scenarios evaluated with declaratively built theories.

* scales: do two bathroom scales agree on readings taken close in time?
* monotone dependence: is weight a non-decreasing function of calories?
* itinerary: how well does a theory of someone's movements agree with
  witness sightings, given travel times between locations?
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregation import EXACT, MAX, MEAN, ProperAggregator, TopKind, TotalAggregator
from .core import Formula, FormulaSet, MetricDef, Space, hyp, obs
from .errors import DomainError, SchemaError
from .theory import (NO_HYPOTHESIS, NO_REG, TRAVEL_SLACK, And, Aspect, ExplicitInstances,
                     IncongruityTheory, ModalityIs, PairContext, XDistGt, XDistLeq, XDistLt,
                     XLess, YGreater, aspect_deviations, colliding_indices, hinge_above,
                     total_incongruity)

PASS = TotalAggregator(TopKind.PASSTHROUGH)
SUM_TOP = TotalAggregator(TopKind.SUM)


def _pairs_table(result, aspect_index, theory, keys):
    """Colliding pairs of one aspect with their deviations, largest first."""
    M = result.model
    a = theory.aspects[aspect_index]
    ctx = PairContext(M.formulas)
    i, j = colliding_indices(M, a, ctx)
    dev = aspect_deviations(M, a, ctx)
    rows = []
    for p, q, v in zip(i, j, dev):
        fa, fb = M.formulas[p], M.formulas[q]
        rows.append({keys[0]: _row(fa), keys[1]: _row(fb), "rho_x": float(ctx.rho_x[p, q]),
                     "rho_y": float(ctx.rho_y[p, q]), "deviation": float(v)})
    rows.sort(key=lambda r: -r["deviation"])  # stable: ties keep pair order
    return rows


def _row(f: Formula) -> dict:
    return {"modality": str(f.modality), "x": f.x[0] if len(f.x) == 1 else list(f.x),
            "y": f.y if not isinstance(f.y, tuple) else list(f.y)}


# ---------------------------------------------------------------------------
# scales


@dataclass(frozen=True)
class ScaleReading:
    scale_id: int
    time: float
    weight: float

    def __post_init__(self):
        if self.scale_id not in (1, 2):
            raise SchemaError(f"scale_id must be 1 or 2, got {self.scale_id}")
        if not np.isfinite(self.time):
            raise DomainError("reading time must be finite")
        if not self.weight > 0:
            raise DomainError("weight must be positive")


def scales_theory(window: float = 5.0, tol: float = 1.0, agg: ProperAggregator | None = None):
    agg = agg or ProperAggregator.of("percentile", 80.0)
    cond = And((ModalityIs(1, obs(1)), ModalityIs(2, obs(2)), XDistLeq(window)))
    return IncongruityTheory((Aspect(cond, hinge_above(tol), agg),), "scales", PASS)


def scales_report(readings, window: float = 5.0, tol: float = 1.0,
                  agg: ProperAggregator | str = "percentile80", mode: str = EXACT) -> dict:
    """Incongruity of two scales; pairs are (scale 1, scale 2) readings within ``window`` minutes."""
    if isinstance(agg, str):
        agg = {"percentile80": ProperAggregator.of("percentile", 80.0), "max": MAX}.get(agg)
        if agg is None:
            raise SchemaError("scales aggregation must be 'percentile80' or 'max'")
    T = scales_theory(window, tol, agg)
    fs = FormulaSet(tuple(Formula(obs(r.scale_id), (r.time,), r.weight) for r in readings), x_dim=1)
    res = total_incongruity(NO_HYPOTHESIS, fs, T, mode=mode)
    pairs = _pairs_table(res, 0, T, ("scale1", "scale2"))
    positive = sum(1 for p in pairs if p["deviation"] > 0)
    return {"scenario": "scales", "incongruity": res.total, "aggregator": str(agg),
            "window": window, "tol": tol, "pairs": len(pairs), "positive_pairs": positive,
            "no_collisions": res.aspects[0].no_collisions, "violating_pairs": pairs}


# ---------------------------------------------------------------------------
# monotone dependence


@dataclass(frozen=True)
class DailyLog:
    day: int
    calories: float
    weight: float

    def __post_init__(self):
        if not self.calories >= 0:
            raise DomainError("calories must be non-negative")


def monotone_theory(x_gap: float = 100.0, y_tol: float = 1.0, monotone: bool = True):
    pi1 = And((XLess(), YGreater(), XDistGt(x_gap)))
    pi2 = And((YGreater(), XDistLt(x_gap)))
    dev = hinge_above(y_tol)
    aspects = ((Aspect(pi1, dev, MEAN),) if monotone else ()) + (Aspect(pi2, dev, MEAN),)
    return IncongruityTheory(aspects, "monotone_dependence" if monotone else "dependence", SUM_TOP)


def monotone_dependence_report(log, x_gap: float = 100.0, y_tol: float = 1.0,
                               monotone: bool = True, mode: str = EXACT) -> dict:
    """Weight against calories.  With ``monotone=False`` only the
    same-intake aspect is used."""
    log = list(log)
    if len(log) < 2:
        raise DomainError("need at least two log entries")
    T = monotone_theory(x_gap, y_tol, monotone)
    fs = FormulaSet(tuple(Formula(obs(), (e.calories,), e.weight) for e in log), x_dim=1)
    res = total_incongruity(NO_HYPOTHESIS, fs, T, mode=mode)
    names = ["opposite_direction", "same_intake"] if monotone else ["same_intake"]
    aspects = []
    for k, (name, ar) in enumerate(zip(names, res.aspects)):
        d = ar.to_dict()
        d["name"] = name
        d["violating_pairs"] = _pairs_table(res, k, T, ("first", "second"))
        aspects.append(d)
    return {"scenario": "monotone_dependence", "monotone": monotone, "x_gap": x_gap,
            "y_tol": y_tol, "total": res.total, "aspects": aspects}


# ---------------------------------------------------------------------------
# itinerary


@dataclass(frozen=True)
class Sighting:
    who: str
    time: float
    location: int

    @property
    def is_theory(self) -> bool:
        return self.who == "theory" or self.who.startswith("theory:")


def itinerary_theory(travel: MetricDef) -> IncongruityTheory:
    cond = And((ModalityIs(1, hyp()), ModalityIs(2, obs())))
    return IncongruityTheory((Aspect(cond, TRAVEL_SLACK, MEAN),), "itinerary", PASS, NO_REG,
                             MetricDef.absolute(Space.X), travel)


def _travel(travel) -> MetricDef:
    if isinstance(travel, MetricDef):
        return travel
    return MetricDef.travel_time(travel)


def _check_locations(sightings, travel: MetricDef):
    for s in sightings:
        if not (isinstance(s.location, (int, np.integer)) and 0 <= s.location < travel.n_locations):
            raise DomainError(f"location index {s.location!r} of {s.who} out of range 0..{travel.n_locations - 1}")


def itinerary_report(theory_sightings, witness_sightings, travel, mode: str = EXACT) -> dict:
    """Mean travel slack over every (theory sighting, witness sighting) pair."""
    travel = _travel(travel)
    theory_sightings, witness_sightings = list(theory_sightings), list(witness_sightings)
    _check_locations(theory_sightings + witness_sightings, travel)
    T = itinerary_theory(travel)
    S = FormulaSet(tuple(Formula(obs(), (s.time,), float(s.location)) for s in witness_sightings),
                   T.x_metric, T.y_metric, 1)
    h = ExplicitInstances(tuple(Formula(hyp(), (s.time,), float(s.location)) for s in theory_sightings))
    res = total_incongruity(h, S, T, mode=mode)
    pairs = _pairs_table(res, 0, T, ("theory", "witness"))
    names = travel.locations
    if names is not None:
        for p in pairs:
            for key in ("theory", "witness"):
                p[key]["location"] = names[int(p[key]["y"])]
    return {"scenario": "itinerary", "total": res.total, "pairs": len(pairs),
            "feasible": all(p["deviation"] == 0 for p in pairs),
            "no_collisions": res.aspects[0].no_collisions, "slack": pairs}


def rank_theories(theories: dict, witness_sightings, travel, mode: str = EXACT) -> list[dict]:
    """Itinerary totals for several theories, lowest (best) first; ties keep input order."""
    rows = [{"theory": name, "total": itinerary_report(s, witness_sightings, travel, mode)["total"]}
            for name, s in theories.items()]
    rows.sort(key=lambda r: r["total"])
    return rows


def witness_cross_incongruity(witness_sightings, travel, mode: str = EXACT) -> list[dict]:
    """Each witness's sightings scored as a theory against all other witnesses.

    Returned highest score first; ties keep first-appearance order.
    """
    travel = _travel(travel)
    witness_sightings = list(witness_sightings)
    order = list(dict.fromkeys(s.who for s in witness_sightings))
    if len(order) < 2:
        raise DomainError("need at least two witnesses")
    rows = []
    for w in order:
        mine = [s for s in witness_sightings if s.who == w]
        others = [s for s in witness_sightings if s.who != w]
        rep = itinerary_report(mine, others, travel, mode)
        rows.append({"witness": w, "score": rep["total"], "pairs": rep["pairs"]})
    rows.sort(key=lambda r: -r["score"])
    return rows
