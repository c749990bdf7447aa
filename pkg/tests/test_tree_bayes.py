import numpy as np
import pytest

from incongruity.errors import DomainError, SchemaError
from incongruity.learners import (LabeledDataset, LabelKind, TreeConfig, naive_bayes_delta,
                                  naive_bayes_predict, tree_predict, tree_train,
                                  tree_training_error)
from incongruity.learners.theories import engine_naive_bayes

O = LabelKind.ORDINAL_BINARY
XOR = LabeledDataset([[0, 0], [0, 1], [1, 0], [1, 1]], [0, 1, 1, 0], O)


class TestTree:
    def test_pure(self):
        d = tree_train(LabeledDataset([[1], [2], [3]], [1, 1, 1], O))
        assert d.info["leaves"] == 1 and d.loss == 0.0 and d.hypothesis.root.label == 1

    def test_xor(self):
        d = tree_train(XOR, TreeConfig(1, 1.0))
        assert d.info["leaves"] == 4 and d.loss == 0.0
        for x, y in zip(XOR.X, XOR.y):
            assert tree_predict(d.hypothesis, x).hypothesis == y

    def test_leaf_min_count(self):
        d = tree_train(XOR, TreeConfig(5, 1.0))
        assert d.info["leaves"] == 1 and d.loss == 0.5

    def test_purity_threshold(self):
        S = LabeledDataset([[1], [2], [3], [4], [5]], [1, 1, 1, 1, 0], O)
        assert tree_train(S, TreeConfig(1, 0.75)).info["leaves"] == 1
        assert tree_train(S, TreeConfig(1, 1.0)).info["leaves"] == 2

    def test_undefined(self):
        d = tree_predict(tree_train(XOR, TreeConfig(1)).hypothesis, [2, 0])
        assert d.abstained and "undefined" in d.info

    def test_training_error_is_leaf_error_rate(self):
        r = np.random.default_rng(0)
        X = r.integers(0, 4, (40, 3))
        y = r.integers(0, 2, 40)
        S = LabeledDataset(X, y, O)
        d = tree_train(S, TreeConfig(6, 0.9))
        wrong = sum(tree_predict(d.hypothesis, x).hypothesis != v for x, v in zip(X, y))
        assert d.loss == tree_training_error(d.hypothesis, S) == wrong / 40

    def test_config_and_data(self):
        with pytest.raises(DomainError):
            TreeConfig(1, 0.5)
        with pytest.raises(DomainError):
            tree_train(LabeledDataset(np.zeros((0, 2)), [], O))
        with pytest.raises(SchemaError):
            tree_train(LabeledDataset([[0]], [0.5]))


def delta_oracle(z, X, y, c):
    prod = 1.0
    for j in range(X.shape[1]):
        rows = [i for i in range(len(y)) if X[i, j] == z[j]]
        if rows:
            prod *= 1.0 - sum(y[i] != c for i in rows) / len(rows)
    return 1.0 - prod


class TestNaiveBayes:
    def test_class_one(self):
        S = LabeledDataset([[1, 1], [1, 2], [0, 0]], [1, 1, 0], O)
        d = naive_bayes_predict([1, 1], S)
        assert d.hypothesis == 1 and d.info["delta"]["1"] == 0.0

    def test_half_half(self):
        S = LabeledDataset([[1, 5], [1, 6], [2, 5], [2, 6]], [0, 1, 1, 0], O)
        delta, rates = naive_bayes_delta([1, 5], S, 0.0)
        assert rates == [0.5, 0.5] and delta == 0.75

    def test_empty_feature(self):
        S = LabeledDataset([[1, 5], [2, 6]], [1, 0], O)
        d = naive_bayes_predict([1, 9], S)
        assert d.info["empty_features"] == [2] and d.hypothesis == 1

    def test_tie_goes_to_zero(self):
        S = LabeledDataset([[1], [1]], [0, 1], O)
        assert naive_bayes_predict([1], S).hypothesis == 0

    def test_engine_and_oracle(self):
        r = np.random.default_rng(3)
        for _ in range(30):
            X = r.integers(0, 3, (15, 3)).astype(float)
            y = r.integers(0, 2, 15).astype(float)
            z = r.integers(0, 3, 3).astype(float)
            S = LabeledDataset(X, y, O)
            for c in (0.0, 1.0):
                delta, _ = naive_bayes_delta(z, S, c)
                assert delta == pytest.approx(delta_oracle(z, X, y, c), abs=1e-12)
                assert delta == pytest.approx(engine_naive_bayes(z, X, y, c), abs=1e-12)
