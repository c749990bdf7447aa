"""Linkage-based agglomerative clustering and K-means."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _backend
from ..core import MetricDef, Space
from ..errors import DomainError, SchemaError
from .base import Decision

LINKAGE_CODES = {"single": 0, "average": 1, "max": 2}


def _points(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return X.reshape(-1, 1) if X.ndim == 1 else X


def _labels_of(clusters, N) -> np.ndarray:
    labels = np.full(N, -1, dtype=np.int64)
    for c, members in enumerate(clusters):
        labels[list(members)] = c
    return labels


def linkage_merge_step(clusters, X, linkage: str = "single", D=None) -> tuple[int, int, float]:
    """Closest pair of clusters ``(i, j)``, ``i < j``, and its linkage loss.

    ``clusters`` is a list of member-index lists.  The loss of a pair is the
    minimum, mean or maximum of the distances between their members; ties
    go to the lexicographically smallest pair.
    """
    if linkage not in LINKAGE_CODES:
        raise SchemaError(f"unknown linkage {linkage!r}")
    if len(clusters) < 2:
        raise DomainError("need at least two clusters to merge")
    X = _points(X)
    if D is None:
        D = MetricDef.euclidean(Space.X).pairwise(X, X)
    if any(len(c) == 0 for c in clusters):
        raise DomainError("clusters must be non-empty")
    labels = _labels_of(clusters, len(X))
    used = np.flatnonzero(labels >= 0)
    L = _backend.linkage_matrix(D[np.ix_(used, used)], labels[used], len(clusters),
                                LINKAGE_CODES[linkage])
    flat = int(np.nanargmin(L))
    i, j = divmod(flat, len(clusters))
    return i, j, float(L[i, j])


@dataclass
class Dendrogram:
    merges: list = field(default_factory=list)  # (i, j, members_i, members_j, loss)
    partition: list = field(default_factory=list)

    def losses(self) -> list[float]:
        return [m[4] for m in self.merges]


def linkage_cluster(X, linkage: str = "single", stop: int = 1) -> Dendrogram:
    """Merge closest clusters starting from singletons until ``stop`` remain."""
    if stop < 1:
        raise DomainError("stop must be at least 1")
    X = _points(X)
    D = MetricDef.euclidean(Space.X).pairwise(X, X)
    clusters = [[i] for i in range(len(X))]
    dg = Dendrogram()
    while len(clusters) > stop:
        i, j, loss = linkage_merge_step(clusters, X, linkage, D)
        dg.merges.append((i, j, list(clusters[i]), list(clusters[j]), loss))
        clusters[i] = sorted(clusters[i] + clusters[j])
        del clusters[j]
    dg.partition = clusters
    return dg


# ---------------------------------------------------------------------------
# K-means


@dataclass(frozen=True)
class WithinLoss:
    pairwise: float
    centroid: float

    def __float__(self):
        return self.pairwise


def kmeans_within_loss(labels, X, K: int | None = None, tol: float = 1e-9) -> WithinLoss:
    """Half the sum of squared within-cluster pair distances, in both forms.

    The pairwise form and the size-weighted centroid form must agree; a
    larger relative gap than ``tol`` raises.
    """
    X = _points(X)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(X):
        raise DomainError("one label per point is required")
    if len(labels) and labels.min() < 0:
        raise DomainError("every point must be assigned")
    K = int(labels.max()) + 1 if K is None else K
    if len(labels) and labels.max() >= K:
        raise DomainError("label out of range")
    pw = _backend.within_pairwise(X, labels)
    ce = _backend.within_centroid(X, labels, K)
    if abs(pw - ce) > tol * max(1.0, abs(pw), abs(ce)):
        raise DomainError(f"within-cluster forms disagree: {pw} vs {ce}")
    return WithinLoss(pw, ce)


def _means(X, labels, K):
    means = np.full((K, X.shape[1]), np.nan)
    for c in range(K):
        sel = labels == c
        if sel.any():
            means[c] = X[sel].mean(axis=0)
    return means


def kmeans_assign_point(x0, X, labels, K: int, rule: str = "closest_mean") -> int:
    """Cluster for ``x0`` given the other points' assignment.

    ``closest_mean``: nearest cluster mean (empty clusters are skipped).
    ``incongruity``: the cluster whose within loss grows least, that is the
    smallest sum of squared distances from ``x0`` to its members (an empty
    cluster costs 0).  Ties go to the lower cluster index.
    """
    if K < 1:
        raise DomainError("need at least one cluster")
    X = _points(X)
    labels = np.asarray(labels, dtype=np.int64)
    x0 = np.asarray(x0, dtype=np.float64).reshape(1, -1)
    sq = ((X - x0) ** 2).sum(axis=1)
    if rule == "incongruity":
        cost = np.array([sq[labels == c].sum() for c in range(K)])
    elif rule == "closest_mean":
        means = _means(X, labels, K)
        cost = ((means - x0) ** 2).sum(axis=1)
        cost = np.where(np.isnan(cost), np.inf, cost)
        if np.isinf(cost).all():
            raise DomainError("all clusters are empty")
    else:
        raise SchemaError(f"unknown assignment rule {rule!r}")
    return int(np.argmin(cost))


def _plusplus(X, K, rng):
    idx = [int(rng.integers(len(X)))]
    for _ in range(1, K):
        d = np.min(((X[:, None, :] - X[idx][None, :, :]) ** 2).sum(-1), axis=1)
        total = d.sum()
        if total == 0:
            free = [i for i in range(len(X)) if i not in idx]
            idx.append(free[0])
        else:
            idx.append(int(rng.choice(len(X), p=d / total)))
    return X[idx].copy()


def _sse(X, labels, K):
    means = _means(X, labels, K)
    return float(sum(((X[labels == c] - means[c]) ** 2).sum() for c in range(K) if (labels == c).any()))


def kmeans_run(X, K: int, seed: int = 0, max_iter: int = 100, rule: str = "closest_mean") -> Decision:
    """Reassign points pass by pass until nothing changes.

    Each pass assigns every point with :func:`kmeans_assign_point` against
    the centroids fixed at the start of the pass, then recomputes them.
    ``info["history"]`` holds the pairwise within loss after each pass and
    ``info["sse"]`` the sum of squared distances to the centroids.
    """
    X = _points(X)
    N = len(X)
    if not 1 <= K <= N:
        raise DomainError(f"K must be in 1..{N}")
    rng = np.random.default_rng(seed)
    centers = _plusplus(X, K, rng)
    labels = np.argmin(((X[:, None, :] - centers[None]) ** 2).sum(-1), axis=1).astype(np.int64)
    d = Decision(None, None)
    d.step("generating_parameters", seed=seed, centers=centers)
    history, sse = [], []
    converged = False
    for it in range(1, max_iter + 1):
        new = labels.copy()
        if rule == "closest_mean":
            means = _means(X, labels, K)
            means = np.where(np.isnan(means), centers, means)
            centers = means
            new = np.argmin(((X[:, None, :] - centers[None]) ** 2).sum(-1), axis=1).astype(np.int64)
        else:
            for i in range(N):
                others = np.delete(np.arange(N), i)
                new[i] = kmeans_assign_point(X[i], X[others], new[others], K, rule)
        changed = int((new != labels).sum())
        labels = new
        w = float(kmeans_within_loss(labels, X, K))
        history.append(w)
        sse.append(_sse(X, labels, K))
        d.step("fitting", loss=w, iteration=it, changed=changed)
        if changed == 0:
            converged = True
            break
    loss = float(kmeans_within_loss(labels, X, K))
    d.hypothesis = labels.tolist()
    d.loss = loss
    d.info.update(converged=converged, iterations=it, history=history, sse=sse)
    d.step("optimal_selection", loss=loss, labels=labels.tolist())
    return d
