"""Command-line front end.

Subcommands: ``eval``, ``learn``, ``scenario``, ``agg``, ``check``.  Each
writes one JSON report.  Exit codes: 0 success, 1 counterexample found by
``check``, 2 usage or schema error, 3 numeric domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .aggregation import (EXACT, FAST, ProperAggregator, check_order_invariance,
                          check_proper_axioms)
from .core import Formula, FormulaSet
from .errors import DomainError, IncongruityError, SchemaError, UnsupportedTheoryError
from .learners import (Basis, LabeledDataset, LabelKind, Schedule, TreeConfig, ada_knn_predict,
                       hoeffding_knn_predict, kmeans_run, knn_predict, linkage_cluster,
                       logistic_train, naive_bayes_predict, ridge_train, svm_train, svr_train,
                       transform_dataset, tree_predict, tree_train)
from .learners.base import _plain
from .schema import validate_report
from .scenarios import (itinerary_report, monotone_dependence_report, rank_theories,
                        scales_report, witness_cross_incongruity)
from .theory import (ExplicitInstances, IncongruityTheory, PointFunction,
                     constant_hypothesis, linear_hypothesis, total_incongruity)

SCHEMA_VERSION = "1.0"
MODES = {"bit-exact": EXACT, "fast": FAST}
EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(SchemaError):
    pass


# ---------------------------------------------------------------------------
# inputs


def _load_json(text: str, what: str):
    """Inline JSON (starting with '{' or '[') or a path to a JSON file."""
    src = text.strip()
    if not src.startswith(("{", "[")):
        try:
            src = Path(text).read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"{what}: cannot read {text!r} ({exc.strerror})") from None
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what} line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"{args.command} needs --{name}")
    return v


def _hypothesis(spec, x_dim: int):
    if spec is None:
        return None
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SchemaError("hypothesis must be one of {constant}, {linear}, {sigmoid}, {instances}")
    (kind, val), = spec.items()
    if kind == "constant":
        return constant_hypothesis(float(val))
    if kind in ("linear", "sigmoid"):
        w, b = val.get("w"), float(val.get("b", 0.0))
        if w is None or len(w) != x_dim:
            raise SchemaError(f"hypothesis field {kind}.w: need {x_dim} weights")
        if kind == "linear":
            return linear_hypothesis(w, b)
        from .learners import sigmoid_hypothesis
        return sigmoid_hypothesis(w, b)
    if kind == "instances":
        fs = io.read_formula_set(val)
        return ExplicitInstances(fs.formulas)
    raise SchemaError(f"unknown hypothesis kind {kind!r}")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> tuple[dict, int]:
    T = IncongruityTheory.from_dict(_load_json(_need(args, "theory"), "theory"))
    X, y, mods = io.read_dataset(_need(args, "data"))
    formulas = tuple(Formula(m, x, v) for m, x, v in zip(mods, X, y))
    S = FormulaSet(tuple(f for f in formulas if f.modality.is_observation), x_dim=X.shape[1])
    h = _hypothesis(_load_json(args.hypothesis, "hypothesis") if args.hypothesis else None, X.shape[1])
    if h is None:
        h = ExplicitInstances(tuple(f for f in formulas if not f.modality.is_observation), "data")
    res = total_incongruity(h, S, T, mode=MODES[args.mode])
    payload = {"theory": T.name, "hypothesis": getattr(h, "name", "h"),
               "observations": res.model.n_observations, "hypothetical": res.model.n_hypothetical}
    return _report(args, res.total, [a.to_dict() for a in res.aspects], payload, [],
                   regularization=res.regularization), EXIT_OK


_LABELS = {
    "knn": LabelKind.BINARY01, "ada_knn": LabelKind.BINARY01, "hoeffding_knn": LabelKind.BINARY01,
    "naive_bayes": LabelKind.BINARY01, "logistic": LabelKind.BINARY01,
    "tree": LabelKind.ORDINAL_BINARY, "svm": LabelKind.BINARY_PM1, "svr": LabelKind.REAL,
    "ridge": LabelKind.REAL, "linkage": LabelKind.REAL, "kmeans": LabelKind.REAL,
}


def _p(params, key, cast, default=None):
    if key not in params:
        if default is None:
            raise SchemaError(f"learner field params.{key} is required")
        return default
    try:
        return cast(params[key])
    except (TypeError, ValueError):
        raise SchemaError(f"learner field params.{key}: bad value {params[key]!r}") from None


def _hyp_payload(h):
    if isinstance(h, PointFunction):
        return {"name": h.name, "w": list(h.w) if h.w is not None else None, "b": h.b}
    if hasattr(h, "to_dict"):
        return h.to_dict()
    return h


def cmd_learn(args) -> tuple[dict, int]:
    spec = _load_json(_need(args, "learner"), "learner")
    if not isinstance(spec, dict) or "name" not in spec:
        raise SchemaError("learner field name is required")
    name, params = spec["name"], spec.get("params") or {}
    if name not in _LABELS:
        raise SchemaError(f"unknown learner {name!r}; known: {', '.join(sorted(_LABELS))}")
    X, y, _ = io.read_dataset(_need(args, "data"))
    S = LabeledDataset(X, y, _LABELS[name])
    sched = Schedule(_p(params, "eta0", float, 0.1), _p(params, "max_iter", int, 10_000))
    query = lambda: _p(params, "x", lambda v: np.asarray(v, dtype=np.float64))
    if name == "knn":
        d = knn_predict(query(), S, _p(params, "k", int))
    elif name == "ada_knn":
        d = ada_knn_predict(query(), S, _p(params, "k0", int), _p(params, "delta", float),
                            _p(params, "c1", float), _p(params, "rule", str, "boxed"))
    elif name == "hoeffding_knn":
        d = hoeffding_knn_predict(query(), S, _p(params, "k0", int))
    elif name == "naive_bayes":
        d = naive_bayes_predict(query(), S)
    elif name == "tree":
        cfg = TreeConfig(_p(params, "leaf_min_count", int, 2), _p(params, "leaf_purity", float, 1.0))
        d = tree_train(S, cfg)
        if "x" in params:
            p = tree_predict(d.hypothesis, query())
            d.info["prediction"] = {"label": p.hypothesis, "abstained": p.abstained, **p.info}
    elif name == "logistic":
        d = logistic_train(S, sched)
    elif name == "svm":
        d = svm_train(S, _p(params, "alpha", float, 0.0), sched)
    elif name in ("svr", "ridge"):
        if "basis" in params:
            S = transform_dataset(S, Basis.from_dict(params["basis"]))
        if name == "svr":
            d = svr_train(S, _p(params, "eps", float, 0.0), _p(params, "lam", float, 0.0))
        else:
            d = ridge_train(S, _p(params, "alpha", float, 0.0))
    elif name == "linkage":
        dg = linkage_cluster(X, _p(params, "linkage", str, "single"), _p(params, "stop", int, 1))
        d_payload = {"partition": dg.partition,
                     "merges": [{"i": m[0], "j": m[1], "a": m[2], "b": m[3], "loss": m[4]}
                                for m in dg.merges]}
        loss = dg.merges[-1][4] if dg.merges else None
        trace = [{"step": "optimal_selection", "params": {"i": m[0], "j": m[1]}, "loss": m[4]}
                 for m in dg.merges]
        return _report(args, loss, [], {"learner": name, **d_payload}, trace), EXIT_OK
    else:  # kmeans
        d = kmeans_run(X, _p(params, "K", int), args.seed, _p(params, "max_iter", int, 100),
                       _p(params, "rule", str, "closest_mean"))
    payload = {"learner": name, "hypothesis": _plain(_hyp_payload(d.hypothesis)),
               "abstained": d.abstained, "info": _plain(d.info)}
    trace = [_plain(t.to_dict()) for t in d.trace]
    return _report(args, d.loss, [], payload, trace), EXIT_OK


def cmd_scenario(args) -> tuple[dict, int]:
    spec = _load_json(_need(args, "scenario"), "scenario")
    if not isinstance(spec, dict) or "name" not in spec:
        raise SchemaError("scenario field name is required")
    name, params = spec["name"], spec.get("params") or {}
    data = args.data or spec.get("data")
    if data is None:
        raise UsageError("scenario needs --data or a data field")
    mode = MODES[args.mode]
    if name == "scales":
        rep = scales_report(io.read_scales(data), float(params.get("window", 5.0)),
                            float(params.get("tol", 1.0)), params.get("agg", "percentile80"), mode)
        total = rep["incongruity"]
    elif name == "monotone_dependence":
        rep = monotone_dependence_report(io.read_log(data), float(params.get("x_gap", 100.0)),
                                         float(params.get("y_tol", 1.0)),
                                         bool(params.get("monotone", True)), mode)
        total = rep["total"]
    elif name in ("itinerary", "witnesses"):
        if "travel" not in spec:
            raise SchemaError("scenario field travel is required")
        travel = io.read_travel(spec["travel"])
        sightings = io.read_sightings(data, travel)
        witnesses = [s for s in sightings if not s.is_theory]
        if name == "witnesses":
            rows = witness_cross_incongruity(witnesses, travel, mode)
            rep = {"scenario": "witnesses", "scores": rows}
            total = rows[0]["score"]
        else:
            theories = {}
            for s in sightings:
                if s.is_theory:
                    theories.setdefault(s.who, []).append(s)
            if not theories:
                raise SchemaError(f"{data}: no theory sightings (who = theory or theory:<name>)")
            if len(theories) == 1:
                (tname, ts), = theories.items()
                rep = itinerary_report(ts, witnesses, travel, mode)
                rep["theory"] = tname
            else:
                ranking = rank_theories(theories, witnesses, travel, mode)
                best = ranking[0]["theory"]
                rep = itinerary_report(theories[best], witnesses, travel, mode)
                rep["theory"] = best
                rep["ranking"] = ranking
            total = rep["total"]
    else:
        raise SchemaError(f"unknown scenario {name!r}")
    return _report(args, total, [], rep, []), EXIT_OK


def _values(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise SchemaError(f"--values: {text!r} is not a comma-separated list of numbers") from None
    if not vals:
        raise SchemaError("--values is empty")
    return vals


def cmd_agg(args) -> tuple[dict, int]:
    agg = ProperAggregator.of(_need(args, "id"), args.p)
    vals = _values(_need(args, "values"))
    v = agg(vals, MODES[args.mode])
    return _report(args, v, [], {"aggregator": str(agg), "n": len(vals), "value": v}, []), EXIT_OK


def _fake_min_minus_one(G):
    return float(np.min(G)) - 1.0


FAKE_AGGREGATORS = {"fake_min_minus_one": _fake_min_minus_one}


def cmd_check(args) -> tuple[dict, int]:
    name = _need(args, "agg")
    if name in FAKE_AGGREGATORS:
        agg = FAKE_AGGREGATORS[name]
        domain = (-1e3, 1e3)
    else:
        agg = ProperAggregator.of(name, args.p)
        domain = agg.domain
    rep = check_proper_axioms(agg, args.trials, seed=args.seed, domain=domain, name=name)
    payload = {"axioms": rep.to_dict()}
    ok = rep.passed
    r = agg.recursive if isinstance(agg, ProperAggregator) else None
    if r is not None:
        rng = np.random.default_rng(args.seed)
        low, high = domain
        worst, exact = 0.0, True
        for _ in range(args.order_sets):
            G = rng.uniform(low, high, int(rng.integers(2, 51)))
            if low == 0.0:
                G = high - G + low
            o = check_order_invariance(G, r, 50, int(rng.integers(2**63)))
            worst, exact = max(worst, o.max_rel_discrepancy), exact and o.canonical_exact
        order_ok = worst <= 1e-9 and exact
        payload["order_invariance"] = {"passed": order_ok, "multisets": args.order_sets,
                                       "max_rel_discrepancy": worst, "canonical_exact": exact}
        ok = ok and order_ok
    payload["passed"] = ok
    return _report(args, None, [], payload, []), (EXIT_OK if ok else EXIT_COUNTEREXAMPLE)


COMMANDS = {"eval": cmd_eval, "learn": cmd_learn, "scenario": cmd_scenario, "agg": cmd_agg,
            "check": cmd_check}


# ---------------------------------------------------------------------------
# reports


def _echo(args) -> dict:
    keys = ("data", "theory", "hypothesis", "learner", "scenario", "values", "id", "p", "agg",
            "trials", "seed", "mode")
    out = {"name": args.command}
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def _report(args, total, aspects, payload, trace, regularization=None) -> dict:
    rep = {"schema_version": SCHEMA_VERSION, "command": _echo(args), "total": total,
           "aspects": aspects, "regularization": regularization, "decision": _plain(payload),
           "trace": trace, "timing": None}
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="incongruity", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit non-negative integer")
    common.add_argument("--mode", choices=sorted(MODES), default="bit-exact")
    common.add_argument("--out", help="report path (default stdout)")

    p = sub.add_parser("eval", parents=[common], help="total incongruity of a hypothesis")
    p.add_argument("--data", help="CSV with x1..xn, y and optional mod")
    p.add_argument("--theory", help="theory JSON (inline or file)")
    p.add_argument("--hypothesis", help="JSON: {constant}, {linear}, {sigmoid} or {instances}")

    p = sub.add_parser("learn", parents=[common], help="run a learner")
    p.add_argument("--data")
    p.add_argument("--learner", help='JSON {"name": ..., "params": {...}}')

    p = sub.add_parser("scenario", parents=[common], help="data-analysis scenario")
    p.add_argument("--data")
    p.add_argument("--scenario", help='JSON {"name": ..., "params": {...}}')

    p = sub.add_parser("agg", parents=[common], help="aggregate a list of numbers")
    p.add_argument("--id", help="mean, rms, max, geomean, median, percentile, sum")
    p.add_argument("--p", type=float, help="percentile rank for id=percentile")
    p.add_argument("--values", help="comma-separated numbers")

    p = sub.add_parser("check", parents=[common], help="randomized axiom oracle")
    p.add_argument("--agg", help="aggregator id, or fake_min_minus_one")
    p.add_argument("--p", type=float)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--order-sets", type=int, default=100, help="multisets for the order check")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be a 64-bit non-negative integer")
        t0 = time.perf_counter()
        rep, code = COMMANDS[args.command](args)
        if args.mode == "fast":
            rep["timing"] = {"seconds": time.perf_counter() - t0}
        validate_report(rep)
        text = json.dumps(rep, indent=2, allow_nan=False) + "\n"
    except (SchemaError, UnsupportedTheoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        # ValueError here comes from json refusing NaN/inf
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except IncongruityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
