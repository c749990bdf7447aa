import itertools

import numpy as np
import pytest

from incongruity.errors import DomainError, SchemaError
from incongruity.learners import (kmeans_assign_point, kmeans_run, kmeans_within_loss,
                                  linkage_cluster, linkage_merge_step)
from incongruity.learners.theories import engine_kmeans, engine_linkage


def brute_gamma(X, a, b, linkage):
    d = [float(np.linalg.norm(np.atleast_1d(X[i]) - np.atleast_1d(X[j]))) for i in a for j in b]
    return {"single": min, "average": lambda v: sum(v) / len(v), "max": max}[linkage](d)


def brute_within(X, labels):
    X = np.asarray(X, dtype=float).reshape(len(labels), -1)
    return 0.5 * sum(float(((X[i] - X[j]) ** 2).sum())
                     for i in range(len(X)) for j in range(len(X)) if labels[i] == labels[j])


class TestLinkage:
    def test_single_nearest(self):
        assert linkage_merge_step([[0], [1], [2]], [0.0, 1.0, 3.0], "single") == (0, 1, 1.0)

    def test_average_and_max(self):
        X = [0.0, 2.0, 5.0]
        assert linkage_merge_step([[0, 1], [2]], X, "average")[2] == 4.0
        assert linkage_merge_step([[0, 1], [2]], X, "max")[2] == 5.0

    def test_tie_lexicographic(self):
        assert linkage_merge_step([[0], [1], [2]], [0.0, 1.0, 2.0], "single")[:2] == (0, 1)

    def test_errors(self):
        with pytest.raises(DomainError):
            linkage_merge_step([[0, 1]], [0.0, 1.0])
        with pytest.raises(SchemaError):
            linkage_merge_step([[0], [1]], [0.0, 1.0], "ward")

    def test_cluster(self):
        dg = linkage_cluster([0.0, 1.0, 10.0], "single", stop=2)
        assert dg.partition == [[0, 1], [2]]
        assert dg.losses() == [1.0]
        assert linkage_cluster([3.0]).merges == []

    @pytest.mark.parametrize("linkage", ["single", "average", "max"])
    def test_merges_match_engine_and_brute_force(self, linkage):
        X = np.random.default_rng(5).normal(size=(9, 2))
        dg = linkage_cluster(X, linkage)
        for _, _, a, b, loss in dg.merges:
            assert loss == pytest.approx(brute_gamma(X, a, b, linkage), abs=1e-12)
            assert loss == pytest.approx(engine_linkage(X, a, b, linkage), abs=1e-12)

    def test_single_losses_nondecreasing(self):
        r = np.random.default_rng(6)
        for _ in range(20):
            ls = linkage_cluster(r.normal(size=(10, 2)), "single").losses()
            assert all(a <= b for a, b in zip(ls, ls[1:]))

    def test_partial_clusters(self):
        # only some points clustered: distances restricted to the members given
        i, j, loss = linkage_merge_step([[0], [3]], [0.0, 100.0, -100.0, 2.0], "single")
        assert (i, j, loss) == (0, 1, 2.0)


class TestWithin:
    def test_example(self):
        w = kmeans_within_loss([0, 0], [0.0, 2.0])
        assert w.pairwise == 4.0 and w.centroid == 4.0

    def test_singletons(self):
        assert float(kmeans_within_loss([0, 1, 2], [1.0, 5.0, 9.0])) == 0.0

    def test_random_dual_form(self):
        r = np.random.default_rng(7)
        for _ in range(50):
            X = r.normal(size=(12, 3))
            labels = r.integers(0, 3, 12)
            w = kmeans_within_loss(labels, X, 3)
            assert w.pairwise == pytest.approx(w.centroid, rel=1e-9)
            assert w.pairwise == pytest.approx(brute_within(X, labels), rel=1e-12)
            assert w.pairwise == pytest.approx(engine_kmeans(X, labels), rel=1e-12)

    def test_empty_cluster_allowed(self):
        assert float(kmeans_within_loss([0, 0, 2], [0.0, 2.0, 7.0], 3)) == 4.0

    def test_unassigned(self):
        with pytest.raises(DomainError):
            kmeans_within_loss([0, -1], [0.0, 1.0])


class TestAssign:
    def test_closest_mean(self):
        assert kmeans_assign_point([1.0], [0.0, 10.0], [0, 1], 2) == 0

    def test_tie(self):
        assert kmeans_assign_point([5.0], [0.0, 10.0], [0, 1], 2) == 0

    def test_rules_disagree(self):
        X, labels, x0 = [0.0, 4, 4, 4, 4], [0, 1, 1, 1, 1], 2.5
        # closest mean: |2.5 - 0| = 2.5 vs |2.5 - 4| = 1.5
        assert kmeans_assign_point([x0], X, labels, 2) == 1
        # added within loss: 2.5^2 = 6.25 vs 4 * 1.5^2 = 9
        assert kmeans_assign_point([x0], X, labels, 2, rule="incongruity") == 0
        for c, other in ((0, 1), (1, 0)):
            lab = labels + [c]
            chosen = brute_within(X + [x0], lab) - brute_within(X, labels)
            lab2 = labels + [other]
            alt = brute_within(X + [x0], lab2) - brute_within(X, labels)
            assert (chosen < alt) == (c == 0)

    def test_errors(self):
        with pytest.raises(DomainError):
            kmeans_assign_point([0.0], [1.0], [0], 0)
        with pytest.raises(SchemaError):
            kmeans_assign_point([0.0], [1.0], [0], 1, rule="median")


def best_two_partition(X):
    n = len(X)
    best = None
    for mask in range(1, 2 ** (n - 1)):
        lab = [(mask >> i) & 1 for i in range(n)]
        w = brute_within(X, lab)
        if best is None or w < best[0]:
            best = (w, lab)
    return best


def same_partition(a, b):
    return {frozenset(i for i, v in enumerate(a) if v == c) for c in set(a)} == \
           {frozenset(i for i, v in enumerate(b) if v == c) for c in set(b)}


class TestRun:
    def test_blobs(self):
        r = np.random.default_rng(9)
        X = np.concatenate([r.normal(0, 0.3, 6), r.normal(10, 0.3, 6)])
        d = kmeans_run(X, 2, seed=1)
        w, lab = best_two_partition(list(X))
        assert same_partition(d.hypothesis, lab)
        assert d.loss == pytest.approx(w, rel=1e-12)
        assert d.info["converged"]

    def test_k1(self):
        X = np.random.default_rng(1).normal(size=(7, 2))
        d = kmeans_run(X, 1)
        assert set(d.hypothesis) == {0}
        assert d.loss == pytest.approx(float(kmeans_within_loss([0] * 7, X)))

    def test_k_all(self):
        d = kmeans_run([1.0, 4.0, 9.0, 2.5], 4)
        assert sorted(d.hypothesis) == [0, 1, 2, 3] and d.loss == 0.0

    def test_sse_nonincreasing(self):
        r = np.random.default_rng(3)
        for s in range(20):
            d = kmeans_run(r.normal(size=(30, 2)), 3, seed=s)
            sse = d.info["sse"]
            assert all(b <= a + 1e-12 for a, b in zip(sse, sse[1:]))

    def test_incongruity_rule_runs(self):
        r = np.random.default_rng(2)
        d = kmeans_run(r.normal(size=(15, 2)), 3, seed=0, rule="incongruity")
        assert len(d.hypothesis) == 15

    def test_cap_flag(self):
        r = np.random.default_rng(4)
        d = kmeans_run(r.normal(size=(40, 2)), 5, seed=0, max_iter=1)
        assert d.info["iterations"] == 1

    def test_seeded(self):
        X = np.random.default_rng(0).normal(size=(20, 2))
        assert kmeans_run(X, 3, seed=7).to_dict() == kmeans_run(X, 3, seed=7).to_dict()
        with pytest.raises(DomainError):
            kmeans_run(X, 21)
