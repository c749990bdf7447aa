"""Decision tree on ordinal features with binary labels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, SchemaError
from .base import Decision, LabeledDataset, LabelKind, fit_constants


@dataclass(frozen=True)
class TreeConfig:
    leaf_min_count: int = 2
    leaf_purity: float = 1.0

    def __post_init__(self):
        if self.leaf_min_count < 1:
            raise DomainError("leaf_min_count must be positive")
        if not 0.5 < self.leaf_purity <= 1.0:
            raise DomainError("leaf_purity must be in (0.5, 1]")


@dataclass
class Node:
    idx: np.ndarray
    label: int
    loss: float
    feature: int | None = None
    cut: float | None = None
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            yield from self.left.leaves()
            yield from self.right.leaves()

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"label": self.label, "loss": self.loss, "count": int(len(self.idx))}
        return {"feature": self.feature, "cut": self.cut,
                "le": self.left.to_dict(), "gt": self.right.to_dict()}


@dataclass
class Tree:
    root: Node
    values: tuple  # observed values per feature
    config: TreeConfig

    def to_dict(self) -> dict:
        return self.root.to_dict()


def _best_split(X, y):
    best = None
    m = len(y)
    for f in range(X.shape[1]):
        vals = np.unique(X[:, f])
        for v in vals[:-1]:
            left = X[:, f] <= v
            _, l0, l1 = fit_constants(y[left])
            _, r0, r1 = fit_constants(y[~left])
            nl, nr = int(left.sum()), m - int(left.sum())
            err = (min(l0, l1) * nl + min(r0, r1) * nr) / m
            if best is None or err < best[0]:
                best = (err, f, float(v))
    return best


def tree_train(S: LabeledDataset, cfg: TreeConfig = TreeConfig()) -> Decision:
    """Greedy recursive splitting.

    A node becomes a leaf when it has fewer than ``leaf_min_count`` points,
    its prevalent-class share exceeds ``leaf_purity``, it is pure, or no
    feature varies within it.  Otherwise it splits on the (feature, cut)
    with the lowest count-weighted child error, ``<=`` going left; ties go
    to the lowest feature and cut.
    """
    S.require_nonempty()
    if S.label_kind not in (LabelKind.ORDINAL_BINARY, LabelKind.BINARY01):
        raise SchemaError("decision trees need 0/1 labels")
    d = Decision(None, None)

    def grow(idx, depth):
        y = S.y[idx]
        c, r0, r1 = fit_constants(y)
        r = r1 if c == 1 else r0
        share = 1.0 - r
        d.step("focusing", depth=depth, count=int(len(idx)))
        d.step("fitting", loss=r, depth=depth, error_rates={"0": r0, "1": r1})
        node = Node(idx, c, r)
        if len(idx) < cfg.leaf_min_count or share > cfg.leaf_purity or r == 0.0:
            d.step("optimal_selection", loss=r, depth=depth, label=c, leaf=True)
            return node
        split = _best_split(S.X[idx], y)
        if split is None:
            d.step("optimal_selection", loss=r, depth=depth, label=c, leaf=True)
            return node
        _, f, v = split
        d.step("generating_parameters", depth=depth, feature=f, cut=v)
        mask = S.X[idx, f] <= v
        node.feature, node.cut = f, v
        node.left = grow(idx[mask], depth + 1)
        node.right = grow(idx[~mask], depth + 1)
        return node

    root = grow(np.arange(S.m), 0)
    values = tuple(tuple(np.unique(S.X[:, f]).tolist()) for f in range(S.n))
    tree = Tree(root, values, cfg)
    d.hypothesis = tree
    d.loss = tree_training_error(tree, S)
    d.info["leaves"] = sum(1 for _ in root.leaves())
    return d


def tree_training_error(tree: Tree, S: LabeledDataset) -> float:
    wrong = sum(int(np.count_nonzero(S.y[leaf.idx] != leaf.label)) for leaf in tree.root.leaves())
    return wrong / S.m


def tree_predict(tree: Tree, x) -> Decision:
    """Leaf label for ``x``; abstains when a feature value never occurred in training."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if len(x) != len(tree.values):
        raise DomainError(f"query has dimension {len(x)}, tree has {len(tree.values)}")
    for f, v in enumerate(x):
        if float(v) not in tree.values[f]:
            d = Decision(None, None, abstained=True)
            d.info["undefined"] = f"feature {f + 1} value {v:g} is outside the training domain"
            return d
    node = tree.root
    path = []
    while not node.is_leaf:
        go_left = x[node.feature] <= node.cut
        path.append((node.feature, node.cut, "le" if go_left else "gt"))
        node = node.left if go_left else node.right
    d = Decision(node.label, node.loss)
    d.info["path"] = path
    return d
