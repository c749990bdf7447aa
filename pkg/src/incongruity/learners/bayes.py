"""Naive Bayes as a product of per-feature error rates."""
from __future__ import annotations

import numpy as np

from ..errors import DomainError, SchemaError
from .base import Decision, LabeledDataset, LabelKind, error_rate


def naive_bayes_delta(z, S: LabeledDataset, c: float) -> tuple[float, list[float | None]]:
    """``1 - prod_j (1 - e_j)`` where ``e_j`` is the error rate of ``c`` on rows sharing ``z_j``.

    Features with no matching rows are skipped (factor 1) and reported as ``None``.
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    if len(z) != S.n:
        raise DomainError(f"query has dimension {len(z)}, data has {S.n}")
    rates = []
    prod = 1.0
    for j in range(S.n):
        sel = S.X[:, j] == z[j]
        if not sel.any():
            rates.append(None)
            continue
        e = error_rate(S.y[sel], c)
        rates.append(e)
        prod = prod * (1.0 - e)
    return 1.0 - prod, rates


def naive_bayes_predict(z, S: LabeledDataset) -> Decision:
    S.require_nonempty()
    if S.label_kind not in (LabelKind.BINARY01, LabelKind.ORDINAL_BINARY):
        raise SchemaError("naive Bayes needs 0/1 labels")
    d = Decision(None, None)
    deltas = {}
    empty = None
    for c in (0, 1):
        delta, rates = naive_bayes_delta(z, S, float(c))
        deltas[c] = delta
        empty = [j + 1 for j, e in enumerate(rates) if e is None]
        d.step("fitting", loss=delta, label=c, error_rates=rates)
    c = 1 if deltas[1] < deltas[0] else 0
    d.hypothesis, d.loss = c, deltas[c]
    d.info.update(delta={"0": deltas[0], "1": deltas[1]}, empty_features=empty)
    d.step("optimal_selection", loss=deltas[c], label=c)
    return d
