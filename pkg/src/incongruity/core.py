"""Formulas of the logic of observations and hypotheses, and their distances.

A formula asserts one value of the underlying dependence under a modality:
an observation ("it appears that") or a hypothetical instance ("assume
that").  The dependence itself is never evaluated; formulas only carry the
asserted pair ``(x, y)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .errors import DimensionError, DomainError, SchemaError


class Kind(enum.Enum):
    OBSERVATION = "obs"
    HYPOTHETICAL = "hyp"


@dataclass(frozen=True, order=True)
class Modality:
    kind: Kind
    group: int = 0

    def __post_init__(self):
        if int(self.group) != self.group or self.group < 0:
            raise DomainError(f"modality group must be a non-negative integer, got {self.group!r}")

    @property
    def is_observation(self) -> bool:
        return self.kind is Kind.OBSERVATION

    def __str__(self):
        return f"{self.kind.value}:{self.group}"

    @classmethod
    def parse(cls, text: str) -> "Modality":
        """Parse ``"obs"``, ``"obs:2"``, ``"hyp:1"`` and similar."""
        head, _, tail = str(text).strip().partition(":")
        try:
            kind = Kind(head)
            group = int(tail) if tail else 0
        except ValueError:
            raise SchemaError(f"bad modality {text!r}; expected obs:<g> or hyp:<g>") from None
        return cls(kind, group)


def obs(group: int = 0) -> Modality:
    return Modality(Kind.OBSERVATION, group)


def hyp(group: int = 0) -> Modality:
    return Modality(Kind.HYPOTHETICAL, group)


def _as_point(v) -> tuple[float, ...]:
    arr = np.asarray(v, dtype=np.float64).ravel()
    return tuple(float(a) for a in arr)


def _as_feedback(v) -> float | tuple[float, ...]:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 0:
        return float(arr)
    return tuple(float(a) for a in arr.ravel())


@dataclass(frozen=True)
class Formula:
    """``modality(phi(x) = y)``.  Equality is structural."""

    modality: Modality
    x: tuple[float, ...]
    y: float | tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", _as_point(self.x))
        object.__setattr__(self, "y", _as_feedback(self.y))

    @property
    def s(self) -> Modality:
        return self.modality

    @property
    def y_vector(self) -> tuple[float, ...]:
        return self.y if isinstance(self.y, tuple) else (self.y,)


def make_formula(modality: Modality, x, y) -> Formula:
    return Formula(modality, x, y)


class Space(enum.Enum):
    X = "x"
    Y = "y"


class MetricKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    ABSOLUTE = "absolute"
    DISCRETE01 = "discrete01"
    SIGN_AGREEMENT = "sign_agreement"
    EPSILON_INSENSITIVE = "epsilon_insensitive"
    TRAVEL_TIME = "travel_time"


_CODES = {
    MetricKind.EUCLIDEAN: 0,
    MetricKind.ABSOLUTE: 1,
    MetricKind.DISCRETE01: 2,
    MetricKind.SIGN_AGREEMENT: 3,
    MetricKind.EPSILON_INSENSITIVE: 4,
}


@dataclass(frozen=True)
class MetricDef:
    """A distance on data points or on feedback values.

    ``SIGN_AGREEMENT`` and ``EPSILON_INSENSITIVE`` are pseudo-distances used as
    feedback metrics by the SVM and SVR theories; they are not metrics in the
    strict sense.  ``TRAVEL_TIME`` reads feedback as an integer index into a
    square table of travel times between named locations.
    """

    kind: MetricKind
    applies_to: Space = Space.Y
    eps: float = 0.0
    table: tuple[tuple[float, ...], ...] | None = None
    locations: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.eps < 0:
            raise DomainError("epsilon must be non-negative")
        if self.kind is MetricKind.TRAVEL_TIME:
            if self.table is None:
                raise SchemaError("travel_time metric needs a table")
            t = np.asarray(self.table, dtype=np.float64)
            if t.ndim != 2 or t.shape[0] != t.shape[1]:
                raise SchemaError("travel table must be square")
            if (t < 0).any() or not np.isfinite(t).all():
                raise DomainError("travel times must be finite and non-negative")
            if (np.diag(t) != 0).any():
                raise DomainError("travel table must have a zero diagonal")
            if not np.array_equal(t, t.T):
                raise DomainError("travel table must be symmetric")
            object.__setattr__(self, "table", tuple(tuple(float(v) for v in row) for row in t))
            if self.locations is not None:
                if len(self.locations) != t.shape[0]:
                    raise SchemaError("one location name per table row is required")
                object.__setattr__(self, "locations", tuple(self.locations))

    @classmethod
    def euclidean(cls, space=Space.X):
        return cls(MetricKind.EUCLIDEAN, space)

    @classmethod
    def absolute(cls, space=Space.Y):
        return cls(MetricKind.ABSOLUTE, space)

    @classmethod
    def discrete01(cls, space=Space.Y):
        return cls(MetricKind.DISCRETE01, space)

    @classmethod
    def sign_agreement(cls):
        return cls(MetricKind.SIGN_AGREEMENT, Space.Y)

    @classmethod
    def epsilon_insensitive(cls, eps: float):
        return cls(MetricKind.EPSILON_INSENSITIVE, Space.Y, eps=float(eps))

    @classmethod
    def travel_time(cls, table, locations=None, space=Space.Y):
        table = tuple(tuple(float(v) for v in row) for row in table)
        return cls(MetricKind.TRAVEL_TIME, space, table=table,
                   locations=tuple(locations) if locations is not None else None)

    @property
    def n_locations(self) -> int:
        return len(self.table) if self.table is not None else 0

    def location_index(self, name: str) -> int:
        if self.locations is None:
            raise SchemaError("travel table has no location names")
        try:
            return self.locations.index(name)
        except ValueError:
            raise DomainError(f"unknown location {name!r}") from None

    def pairwise(self, A, B) -> np.ndarray:
        """Distance matrix between two stacks of points (rows)."""
        A = np.asarray(A, dtype=np.float64)
        B = np.asarray(B, dtype=np.float64)
        A = A.reshape(-1, 1) if A.ndim == 1 else A
        B = B.reshape(-1, 1) if B.ndim == 1 else B
        if A.shape[1] != B.shape[1]:
            raise DimensionError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
        if self.kind is MetricKind.TRAVEL_TIME:
            n = self.n_locations
            ia = self._indices(A, n)
            ib = self._indices(B, n)
            return _backend.pairwise_table(ia, ib, np.asarray(self.table))
        return _backend.pairwise(A, B, _CODES[self.kind], self.eps)

    @staticmethod
    def _indices(A, n):
        if A.shape[1] != 1:
            raise DimensionError("travel_time feedback must be a scalar location index")
        col = A[:, 0]
        idx = col.astype(np.int64)
        if (idx != col).any() or (idx < 0).any() or (idx >= n).any():
            bad = col[(idx != col) | (idx < 0) | (idx >= n)][0]
            raise DomainError(f"location index {bad} out of range 0..{n - 1}")
        return idx

    def distance(self, a, b) -> float:
        return float(self.pairwise([np.ravel(a)], [np.ravel(b)])[0, 0])

    def to_dict(self) -> dict:
        d = {"id": self.kind.value}
        if self.kind is MetricKind.EPSILON_INSENSITIVE:
            d["eps"] = self.eps
        if self.kind is MetricKind.TRAVEL_TIME:
            d["table"] = [list(r) for r in self.table]
            if self.locations is not None:
                d["locations"] = list(self.locations)
        return d

    @classmethod
    def from_dict(cls, d: dict, space: Space) -> "MetricDef":
        try:
            kind = MetricKind(d["id"])
        except (KeyError, ValueError):
            raise SchemaError(f"unknown metric {d.get('id')!r}") from None
        return cls(kind, space, eps=float(d.get("eps", 0.0)),
                   table=tuple(tuple(r) for r in d["table"]) if "table" in d else None,
                   locations=tuple(d["locations"]) if "locations" in d else None)


def rho_x(a: Formula, b: Formula, m: MetricDef) -> float:
    if m.applies_to is not Space.X:
        raise DomainError("rho_x needs a metric on data points")
    if len(a.x) != len(b.x):
        raise DimensionError(f"dimension mismatch: {len(a.x)} vs {len(b.x)}")
    return m.distance(a.x, b.x)


def rho_y(a: Formula, b: Formula, m: MetricDef) -> float:
    if m.applies_to is not Space.Y:
        raise DomainError("rho_y needs a metric on feedback values")
    if len(a.y_vector) != len(b.y_vector):
        raise DimensionError(f"feedback dimension mismatch: {len(a.y_vector)} vs {len(b.y_vector)}")
    return m.distance(a.y_vector, b.y_vector)


@dataclass(frozen=True)
class FormulaSet:
    """Ordered collection of formulas sharing a data-point dimension.

    Iteration order is creation order.  Duplicate formulas are kept: a
    training set is a multiset of observations.
    """

    formulas: tuple[Formula, ...]
    x_metric: MetricDef = field(default_factory=lambda: MetricDef.euclidean(Space.X))
    y_metric: MetricDef = field(default_factory=lambda: MetricDef.absolute(Space.Y))
    x_dim: int | None = None

    def __post_init__(self):
        formulas = tuple(self.formulas)
        object.__setattr__(self, "formulas", formulas)
        if self.x_metric.applies_to is not Space.X or self.y_metric.applies_to is not Space.Y:
            raise DomainError("x_metric must apply to data points and y_metric to feedback")
        dim = self.x_dim
        if dim is None:
            dim = len(formulas[0].x) if formulas else 1
        if dim < 1:
            raise DimensionError("x_dim must be positive")
        for i, f in enumerate(formulas):
            if len(f.x) != dim:
                raise DimensionError(f"formula {i} has x dimension {len(f.x)}, expected {dim}")
        if formulas:
            q = len(formulas[0].y_vector)
            for i, f in enumerate(formulas):
                if len(f.y_vector) != q:
                    raise DimensionError(f"formula {i} has feedback dimension {len(f.y_vector)}, expected {q}")
        object.__setattr__(self, "x_dim", dim)

    @classmethod
    def from_arrays(cls, X, y, modality: Modality | Sequence[Modality] = None, **metrics) -> "FormulaSet":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(y, dtype=np.float64)
        if len(y) != len(X):
            raise DimensionError("X and y must have the same number of rows")
        if modality is None:
            modality = obs()
        mods = [modality] * len(X) if isinstance(modality, Modality) else list(modality)
        formulas = tuple(Formula(m, xi, yi) for m, xi, yi in zip(mods, X, y))
        return cls(formulas, x_dim=X.shape[1], **metrics)

    def __len__(self):
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)

    def __getitem__(self, i):
        return self.formulas[i]

    def extend(self, more: Iterable[Formula]) -> "FormulaSet":
        return FormulaSet(self.formulas + tuple(more), self.x_metric, self.y_metric, self.x_dim)

    def with_metrics(self, x_metric=None, y_metric=None) -> "FormulaSet":
        return FormulaSet(self.formulas, x_metric or self.x_metric, y_metric or self.y_metric, self.x_dim)

    @property
    def y_dim(self) -> int:
        return len(self.formulas[0].y_vector) if self.formulas else 1

    @cached_property
    def X(self) -> np.ndarray:
        if not self.formulas:
            return np.zeros((0, self.x_dim))
        return np.array([f.x for f in self.formulas], dtype=np.float64)

    @cached_property
    def Y(self) -> np.ndarray:
        if not self.formulas:
            return np.zeros((0, 1))
        return np.array([f.y_vector for f in self.formulas], dtype=np.float64)

    @cached_property
    def kinds(self) -> np.ndarray:
        return np.array([f.modality.kind is Kind.HYPOTHETICAL for f in self.formulas], dtype=bool)

    @cached_property
    def groups(self) -> np.ndarray:
        return np.array([f.modality.group for f in self.formulas], dtype=np.int64)

    def observations(self) -> "FormulaSet":
        return FormulaSet(tuple(f for f in self.formulas if f.modality.is_observation),
                          self.x_metric, self.y_metric, self.x_dim)

    def hypothetical(self) -> "FormulaSet":
        return FormulaSet(tuple(f for f in self.formulas if not f.modality.is_observation),
                          self.x_metric, self.y_metric, self.x_dim)
