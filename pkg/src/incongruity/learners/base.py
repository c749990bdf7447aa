"""Shared types for learners: datasets, decisions and traces."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..core import FormulaSet
from ..errors import DimensionError, DomainError, SchemaError


class LabelKind(enum.Enum):
    BINARY01 = "binary01"
    BINARY_PM1 = "binary_pm1"
    REAL = "real"
    ORDINAL_BINARY = "ordinal_binary"


@dataclass(frozen=True)
class LabeledDataset:
    """Training set: an ``m x n`` matrix of data points and ``m`` labels."""

    X: np.ndarray
    y: np.ndarray
    label_kind: LabelKind = LabelKind.REAL

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.y, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionError("X must be a matrix")
        if len(y) != len(X):
            raise DimensionError(f"{len(X)} data points but {len(y)} labels")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise DomainError("data must be finite")
        k = self.label_kind
        if k in (LabelKind.BINARY01, LabelKind.ORDINAL_BINARY) and not np.isin(y, (0.0, 1.0)).all():
            raise SchemaError(f"{k.value} labels must be 0 or 1")
        if k is LabelKind.BINARY_PM1 and not np.isin(y, (-1.0, 1.0)).all():
            raise SchemaError("binary_pm1 labels must be -1 or +1")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return len(self.X)

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def __len__(self):
        return self.m

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(self.X[idx], self.y[idx], self.label_kind)

    def formula_set(self) -> FormulaSet:
        return FormulaSet.from_arrays(self.X, self.y)

    def require_nonempty(self):
        if self.m == 0:
            raise DomainError("training set is empty")


@dataclass
class TraceStep:
    step: str
    params: dict = field(default_factory=dict)
    loss: float | None = None

    def to_dict(self) -> dict:
        return {"step": self.step, "params": self.params, "loss": self.loss}


@dataclass
class Decision:
    """Output of a learner: what was chosen, its loss, and how."""

    hypothesis: Any
    loss: float | None
    abstained: bool = False
    trace: list[TraceStep] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def step(self, name: str, loss: float | None = None, **params) -> None:
        self.trace.append(TraceStep(name, params, loss))

    def to_dict(self) -> dict:
        h = self.hypothesis
        if hasattr(h, "to_dict"):
            h = h.to_dict()
        return {"hypothesis": _plain(h), "loss": self.loss, "abstained": self.abstained,
                "info": _plain(self.info), "trace": [_plain(t.to_dict()) for t in self.trace]}


def _plain(v):
    """Convert numpy containers and scalars to JSON-friendly values."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def error_rate(labels: np.ndarray, c: float) -> float:
    labels = np.asarray(labels)
    return float(np.count_nonzero(labels != c)) / len(labels)


def fit_constants(labels: np.ndarray) -> tuple[int, float, float]:
    """Error rates of constants 0 and 1; the lower wins, ties go to 0."""
    r0 = error_rate(labels, 0.0)
    r1 = error_rate(labels, 1.0)
    return (1, r0, r1) if r1 < r0 else (0, r0, r1)
