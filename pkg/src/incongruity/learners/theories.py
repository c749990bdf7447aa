"""Incongruity theories whose totals are the learners' loss criteria.

Each builder returns an :class:`IncongruityTheory`.  ``engine_loss``
evaluates one of them for a hypothesis on a dataset; the learners compute
their losses directly and the tests compare the two.
"""
from __future__ import annotations

import numpy as np

from ..aggregation import MAX, MEAN, SUM, ProperAggregator, TopKind, TotalAggregator
from ..core import Formula, FormulaSet, MetricDef, Space, hyp, obs
from ..errors import SchemaError
from ..theory import (NO_HYPOTHESIS, NO_REG, RHO_Y, RHO_Y_SQUARED, And, Aspect, CoordEqual,
                      ExplicitInstances, IncongruityTheory, ModalityIs, RegularizationTerm, XEqual,
                      constant_hypothesis, log_rho_y, pointwise_condition, total_incongruity)

PASS = TotalAggregator(TopKind.PASSTHROUGH)
SUM_PLUS_REG = TotalAggregator(TopKind.SUM_PLUS_REG)


def _pw(name, deviation, agg, y_metric, reg=NO_REG):
    top = SUM_PLUS_REG if reg.kind.value != "none" else PASS
    return IncongruityTheory((Aspect(pointwise_condition(), deviation, agg),), name, top, reg,
                             MetricDef.euclidean(Space.X), y_metric)


def erm_theory() -> IncongruityTheory:
    return _pw("erm", RHO_Y, MEAN, MetricDef.absolute(Space.Y))


def classification_theory() -> IncongruityTheory:
    """Error rate: point-wise theory with the 0/1 feedback distance."""
    return _pw("error_rate", RHO_Y, MEAN, MetricDef.discrete01(Space.Y))


def logistic_theory(floor: float = 1e-12) -> IncongruityTheory:
    return _pw("logistic", log_rho_y(floor), MEAN, MetricDef.absolute(Space.Y))


def svm_theory(alpha: float) -> IncongruityTheory:
    return _pw("svm", RHO_Y, MEAN, MetricDef.sign_agreement(),
               RegularizationTerm.squared_weight_norm(alpha))


def svr_theory(eps: float, lam: float) -> IncongruityTheory:
    # plain sum, not a mean: the criterion is unnormalized
    return _pw("svr", RHO_Y, SUM, MetricDef.epsilon_insensitive(eps),
               RegularizationTerm.squared_weight_norm(lam))


def ridge_theory(alpha: float) -> IncongruityTheory:
    return _pw("ridge", RHO_Y_SQUARED, MEAN, MetricDef.absolute(Space.Y),
               RegularizationTerm.squared_weight_norm(alpha))


def naive_bayes_theory(n: int) -> IncongruityTheory:
    """One aspect per feature: the hypothetical case against rows sharing that feature value."""
    aspects = tuple(
        Aspect(And((ModalityIs(1, hyp()), ModalityIs(2, obs()), CoordEqual(j))), RHO_Y, MEAN)
        for j in range(1, n + 1))
    return IncongruityTheory(aspects, "naive_bayes", TotalAggregator(TopKind.ONE_MINUS_PRODUCT),
                             NO_REG, MetricDef.euclidean(Space.X), MetricDef.discrete01(Space.Y))


LINKAGE_AGGREGATORS = {
    "single": ProperAggregator.of("percentile", 0.0),
    "average": MEAN,
    "max": MAX,
}


def linkage_theory(linkage: str) -> IncongruityTheory:
    """Distances between members of two clusters, aggregated by the linkage.

    Formulas carry the candidate merged cluster's index as ``x`` and the
    observed vector as ``y``; members of the two clusters carry modalities
    ``obs:1`` and ``obs:2``.
    """
    try:
        agg = LINKAGE_AGGREGATORS[linkage]
    except KeyError:
        raise SchemaError(f"unknown linkage {linkage!r}") from None
    cond = And((ModalityIs(1, obs(1)), ModalityIs(2, obs(2)), XEqual()))
    return IncongruityTheory((Aspect(cond, RHO_Y, agg),), f"linkage_{linkage}", PASS, NO_REG,
                             MetricDef.euclidean(Space.X), MetricDef.euclidean(Space.Y))


def kmeans_theory() -> IncongruityTheory:
    """Half the sum of squared distances over ordered same-cluster pairs."""
    cond = XEqual()
    return IncongruityTheory((Aspect(cond, RHO_Y_SQUARED, SUM),), "kmeans",
                             TotalAggregator(TopKind.WEIGHTED_SUM, (0.5,)), NO_REG,
                             MetricDef.euclidean(Space.X), MetricDef.euclidean(Space.Y))


# ---------------------------------------------------------------------------
# engine-side loss evaluation


def engine_pointwise(theory: IncongruityTheory, h, X, y, mode: str = "exact") -> float:
    S = FormulaSet.from_arrays(X, y)
    return total_incongruity(h, S, theory, mode=mode).total


def engine_error_rate(X, y, c: float) -> float:
    return engine_pointwise(classification_theory(), constant_hypothesis(c), X, y)


def engine_naive_bayes(z, X, y, c: float) -> float:
    X = np.asarray(X, dtype=np.float64)
    S = FormulaSet.from_arrays(X, y)
    h = ExplicitInstances((Formula(hyp(), z, float(c)),), f"class {c:g}")
    return total_incongruity(h, S, naive_bayes_theory(X.shape[1])).total


def engine_linkage(X, members_a, members_b, linkage: str) -> float:
    X = np.asarray(X, dtype=np.float64)
    X = X.reshape(-1, 1) if X.ndim == 1 else X
    fs = [Formula(obs(1), (0.0,), tuple(X[i])) for i in members_a]
    fs += [Formula(obs(2), (0.0,), tuple(X[i])) for i in members_b]
    return total_incongruity(NO_HYPOTHESIS, FormulaSet(tuple(fs), x_dim=1), linkage_theory(linkage)).total


def engine_kmeans(X, labels) -> float:
    X = np.asarray(X, dtype=np.float64)
    X = X.reshape(-1, 1) if X.ndim == 1 else X
    fs = tuple(Formula(obs(), (float(c),), tuple(x)) for c, x in zip(labels, X))
    return total_incongruity(NO_HYPOTHESIS, FormulaSet(fs, x_dim=1), kmeans_theory()).total


THEORIES = {
    "erm": erm_theory,
    "error_rate": classification_theory,
    "logistic": logistic_theory,
    "svm": svm_theory,
    "svr": svr_theory,
    "ridge": ridge_theory,
    "naive_bayes": naive_bayes_theory,
    "linkage": linkage_theory,
    "kmeans": kmeans_theory,
}
