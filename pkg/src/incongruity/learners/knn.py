"""Empirical risk and the nearest-neighbour family.

All nearest-neighbour learners share one proper-training step: focus on the
``k`` training points closest to the query (distance ties go to the lower
row index), fit the constants 0 and 1 by error rate, keep the better one
(ties go to 0).  Ada and Hoeffding k-NN wrap that step in a loop over ``k``.
"""
from __future__ import annotations

import math

import numpy as np

from ..core import MetricDef, Space
from ..errors import DomainError, SchemaError
from .base import Decision, LabeledDataset, LabelKind, fit_constants


def erm_loss(h, S: LabeledDataset) -> float:
    """Mean absolute deviation of ``h`` from the labels."""
    S.require_nonempty()
    pred = np.array([float(h(x)) for x in S.X])
    return float(np.mean(np.abs(pred - S.y)))


def _order(x, S: LabeledDataset) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if x.shape[1] != S.n:
        raise DomainError(f"query has dimension {x.shape[1]}, data has {S.n}")
    d = MetricDef.euclidean(Space.X).pairwise(x, S.X)[0]
    return np.argsort(d, kind="stable")


def _check_binary(S: LabeledDataset):
    S.require_nonempty()
    if S.label_kind not in (LabelKind.BINARY01, LabelKind.ORDINAL_BINARY):
        raise SchemaError("nearest-neighbour learners need 0/1 labels")


def _proper_step(order, S, k, d: Decision | None):
    focus = order[:k]
    c, r0, r1 = fit_constants(S.y[focus])
    r = r1 if c == 1 else r0
    if d is not None:
        d.step("focusing", k=k, focus=focus.tolist())
        d.step("fitting", k=k, error_rates={"0": r0, "1": r1})
        d.step("optimal_selection", loss=r, k=k, label=c)
    return focus, c, r


def knn_predict(x, S: LabeledDataset, k: int) -> Decision:
    _check_binary(S)
    if not 1 <= k <= S.m:
        raise DomainError(f"k must be in 1..{S.m}")
    d = Decision(None, None)
    focus, c, r = _proper_step(_order(x, S), S, k, d)
    d.hypothesis, d.loss = c, r
    d.info["focus"] = focus.tolist()
    return d


def ada_threshold(n: float, k: float, delta: float, c1: float) -> float:
    """``c1 * sqrt((ln n + ln(1/delta)) / k)``."""
    if not (n >= 1 and k >= 1 and 0 < delta <= 1 and c1 > 0):
        raise DomainError("need n >= 1, k >= 1, 0 < delta <= 1, c1 > 0")
    return c1 * math.sqrt((math.log(n) + math.log(1.0 / delta)) / k)


def ada_knn_predict(x, S: LabeledDataset, k0: int, delta: float, c1: float,
                    rule: str = "boxed") -> Decision:
    """Adaptive k-NN.

    ``rule="boxed"`` stops as soon as the selected constant's error rate
    exceeds the threshold and answers only if that happened before ``k``
    reached ``m``.  ``rule="bias"`` stops once the prevalent-class bias
    ``p - 0.5`` reaches the threshold and abstains if it never does.
    """
    _check_binary(S)
    if rule not in ("boxed", "bias"):
        raise SchemaError(f"unknown stop rule {rule!r}")
    m = S.m
    if not 1 <= k0 <= m:
        raise DomainError(f"k0 must be in 1..{m}")
    order = _order(x, S)
    d = Decision(None, None)
    stopped = False
    for k in range(k0, m + 1):
        focus, c, r = _proper_step(order, S, k, d)
        thr = ada_threshold(m, k, delta, c1)
        if rule == "boxed":
            stopped = r > thr
            d.step("break_check", k=k, error_rate=r, threshold=thr, stop=stopped)
        else:
            bias = (1.0 - r) - 0.5
            stopped = bias >= thr
            d.step("break_check", k=k, bias=bias, threshold=thr, stop=stopped)
        if stopped:
            break
    answer = (k < m) if rule == "boxed" else stopped
    d.info.update(k=k, rule=rule)
    if answer:
        d.hypothesis, d.loss = c, r
        d.step("combining", loss=r, k=k, label=c)
    else:
        d.abstained = True
        d.loss = r
        d.step("combining", k=k, abstain=True)
    return d


def hoeffding_weight(p: float, k: int) -> float:
    """``2 exp(-2 k |p - 0.5|^2)``."""
    if not 0.0 <= p <= 1.0 or k < 1:
        raise DomainError("need p in [0, 1] and k >= 1")
    t = abs(p - 0.5)
    return 2.0 * math.exp(-2.0 * k * t * t)


def hoeffding_knn_predict(x, S: LabeledDataset, k0: int) -> Decision:
    """Pick ``k`` in ``k0..m-1`` minimizing the Hoeffding weight; ties go to the smallest ``k``."""
    _check_binary(S)
    m = S.m
    if not 1 <= k0 <= m - 1:
        raise DomainError(f"k0 must be in 1..{m - 1}")
    order = _order(x, S)
    d = Decision(None, None)
    best = None
    rows = []
    for k in range(k0, m):
        _, c, r = _proper_step(order, S, k, d)
        p = 1.0 - r
        w = hoeffding_weight(p, k)
        d.step("weight", k=k, p=p, W=w)
        rows.append((k, p, w))
        if best is None or w < best[0]:
            best = (w, k, c, r)
    w, k, c, r = best
    d.hypothesis, d.loss = c, r
    d.info.update(k=k, W=w, scan=rows)
    d.step("wrapper_decision", loss=r, k=k, label=c, W=w)
    return d
