"""Incongruity theories and their evaluation.

A theory is a list of aspects.  Each aspect pairs a collision condition (a
predicate on ordered pairs of formulas) with a deviation function
``t(rho_y, rho_x)`` and a proper aggregation of the resulting deviations.
The total incongruity of a hypothesis combines the aspect incongruities and
an optional regularization term with an isotone top-level aggregation.

Collision conditions are a closed combinator set evaluated over whole
formula sets at once: every atom yields an ``N x N`` boolean mask, ``And``
and ``Or`` combine masks, and the diagonal is always excluded.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .aggregation import EXACT, MEAN, MODES, ProperAggregator, TopKind, TotalAggregator
from .core import Formula, FormulaSet, Kind, MetricDef, Modality, Space, hyp, obs
from .errors import DimensionError, DomainError, SchemaError, UnsupportedTheoryError

# ---------------------------------------------------------------------------
# evaluation context


class PairContext:
    """Lazily computed per-formula arrays and distance matrices."""

    def __init__(self, fs: FormulaSet):
        self.fs = fs
        self.n = len(fs)
        self._rx = None
        self._ry = None

    @property
    def X(self):
        return self.fs.X

    @property
    def Y(self):
        return self.fs.Y

    @property
    def rho_x(self) -> np.ndarray:
        if self._rx is None:
            self._rx = self.fs.x_metric.pairwise(self.fs.X, self.fs.X)
        return self._rx

    @property
    def rho_y(self) -> np.ndarray:
        if self._ry is None:
            self._ry = self.fs.y_metric.pairwise(self.fs.Y, self.fs.Y)
        return self._ry

    def modality_vector(self, m: Modality) -> np.ndarray:
        return (self.fs.kinds == (m.kind is Kind.HYPOTHETICAL)) & (self.fs.groups == m.group)


# ---------------------------------------------------------------------------
# collision conditions


class Condition:
    """Base class of collision-condition combinators."""

    def mask(self, ctx: PairContext) -> np.ndarray:
        raise NotImplementedError

    def holds(self, a: Formula, b: Formula, x_metric: MetricDef | None = None,
              y_metric: MetricDef | None = None) -> bool:
        """Evaluate on a single ordered pair (``a`` first)."""
        fs = FormulaSet((a, b), x_metric or MetricDef.euclidean(Space.X),
                        y_metric or MetricDef.absolute(Space.Y))
        return bool(self.mask(PairContext(fs))[0, 1])

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def to_dict(self) -> dict:
        raise NotImplementedError


def _full(ctx, value=True):
    return np.full((ctx.n, ctx.n), value, dtype=bool)


@dataclass(frozen=True)
class AlwaysTrue(Condition):
    def mask(self, ctx):
        return _full(ctx)

    def to_dict(self):
        return {"atom": "always"}


@dataclass(frozen=True)
class ModalityIs(Condition):
    arg: int
    modality: Modality

    def __post_init__(self):
        if self.arg not in (1, 2):
            raise SchemaError("modality_is arg must be 1 or 2")

    def mask(self, ctx):
        v = ctx.modality_vector(self.modality)
        return np.broadcast_to(v[:, None] if self.arg == 1 else v[None, :], (ctx.n, ctx.n))

    def to_dict(self):
        return {"atom": "modality_is", "arg": self.arg, "modality": str(self.modality)}


@dataclass(frozen=True)
class XEqual(Condition):
    def mask(self, ctx):
        X = ctx.X
        return (X[:, None, :] == X[None, :, :]).all(axis=-1)

    def to_dict(self):
        return {"atom": "x_equal"}


@dataclass(frozen=True)
class CoordEqual(Condition):
    """Equality of the ``i``-th coordinate (1-based) of the data points."""

    i: int

    def __post_init__(self):
        if self.i < 1:
            raise SchemaError("coord_equal index is 1-based")

    def mask(self, ctx):
        if self.i > ctx.fs.x_dim:
            raise DimensionError(f"coordinate {self.i} out of range for x_dim {ctx.fs.x_dim}")
        col = ctx.X[:, self.i - 1]
        return col[:, None] == col[None, :]

    def to_dict(self):
        return {"atom": "coord_equal", "i": self.i}


class _DistCmp(Condition):
    op = None
    name = None

    def mask(self, ctx):
        return self.op(ctx.rho_x, self.c)

    def to_dict(self):
        return {"atom": self.name, "c": self.c}


@dataclass(frozen=True)
class XDistLeq(_DistCmp):
    c: float
    op = staticmethod(np.less_equal)
    name = "x_dist_leq"


@dataclass(frozen=True)
class XDistLt(_DistCmp):
    c: float
    op = staticmethod(np.less)
    name = "x_dist_lt"


@dataclass(frozen=True)
class XDistGt(_DistCmp):
    c: float
    op = staticmethod(np.greater)
    name = "x_dist_gt"


@dataclass(frozen=True)
class XDistGeq(_DistCmp):
    c: float
    op = staticmethod(np.greater_equal)
    name = "x_dist_geq"


@dataclass(frozen=True)
class XLess(Condition):
    """``x(a1) < x(a2)``; scalar data points only."""

    def mask(self, ctx):
        if ctx.fs.x_dim != 1:
            raise DimensionError("x_less needs scalar data points")
        col = ctx.X[:, 0]
        return col[:, None] < col[None, :]

    def to_dict(self):
        return {"atom": "x_less"}


@dataclass(frozen=True)
class YGreater(Condition):
    """``y(a1) > y(a2)``; scalar feedback only."""

    def mask(self, ctx):
        if ctx.Y.shape[1] != 1:
            raise DimensionError("y_greater needs scalar feedback")
        col = ctx.Y[:, 0]
        return col[:, None] > col[None, :]

    def to_dict(self):
        return {"atom": "y_greater"}


@dataclass(frozen=True)
class And(Condition):
    children: tuple[Condition, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise SchemaError("and needs at least one operand")

    def mask(self, ctx):
        out = np.array(self.children[0].mask(ctx), dtype=bool)
        for c in self.children[1:]:
            out &= c.mask(ctx)
        return out

    def to_dict(self):
        return {"and": [c.to_dict() for c in self.children]}


@dataclass(frozen=True)
class Or(Condition):
    children: tuple[Condition, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise SchemaError("or needs at least one operand")

    def mask(self, ctx):
        out = np.array(self.children[0].mask(ctx), dtype=bool)
        for c in self.children[1:]:
            out |= c.mask(ctx)
        return out

    def to_dict(self):
        return {"or": [c.to_dict() for c in self.children]}


_ATOMS = {
    "always": lambda d: AlwaysTrue(),
    "modality_is": lambda d: ModalityIs(int(d["arg"]), Modality.parse(d["modality"])),
    "x_equal": lambda d: XEqual(),
    "coord_equal": lambda d: CoordEqual(int(d["i"])),
    "x_dist_leq": lambda d: XDistLeq(float(d["c"])),
    "x_dist_lt": lambda d: XDistLt(float(d["c"])),
    "x_dist_gt": lambda d: XDistGt(float(d["c"])),
    "x_dist_geq": lambda d: XDistGeq(float(d["c"])),
    "x_less": lambda d: XLess(),
    "y_greater": lambda d: YGreater(),
}


def condition_from_dict(d: dict) -> Condition:
    if not isinstance(d, dict):
        raise SchemaError(f"condition must be an object, got {d!r}")
    if "and" in d:
        return And(tuple(condition_from_dict(c) for c in d["and"]))
    if "or" in d:
        return Or(tuple(condition_from_dict(c) for c in d["or"]))
    atom = d.get("atom")
    if atom not in _ATOMS:
        raise SchemaError(f"unknown condition atom {atom!r}")
    try:
        return _ATOMS[atom](d)
    except KeyError as exc:
        raise SchemaError(f"condition atom {atom!r} is missing field {exc}") from None


def pointwise_condition(hyp_group: int = 0, obs_group: int = 0) -> Condition:
    """Hypothetical instance and observation at the same data point."""
    return And((ModalityIs(1, hyp(hyp_group)), ModalityIs(2, obs(obs_group)), XEqual()))


# ---------------------------------------------------------------------------
# deviation functions


class DevKind(enum.Enum):
    RHO_Y = "rho_y"
    RHO_Y_SQUARED = "rho_y_squared"
    HINGE_ABOVE = "hinge_above"
    LOG_RHO_Y = "log_rho_y"
    TRAVEL_SLACK = "travel_slack"


@dataclass(frozen=True)
class DeviationFn:
    """``t(r1, r2)`` with ``r1 = rho_y`` and ``r2 = rho_x``.

    Isotone in ``r1`` and antitone in ``r2``.  ``log_rho_y`` clamps its
    argument at ``floor`` and can be negative.
    """

    kind: DevKind
    c: float = 0.0
    floor: float = 1e-12

    def __post_init__(self):
        if self.kind is DevKind.HINGE_ABOVE and self.c < 0:
            raise DomainError("hinge_above threshold must be non-negative")
        if self.kind is DevKind.LOG_RHO_Y and not self.floor > 0:
            raise DomainError("log_rho_y floor must be positive")

    def __call__(self, r1, r2=None):
        r1 = np.asarray(r1, dtype=np.float64)
        k = self.kind
        if k is DevKind.RHO_Y:
            return r1.copy()
        if k is DevKind.RHO_Y_SQUARED:
            return r1 * r1
        if k is DevKind.HINGE_ABOVE:
            return np.maximum(r1 - self.c, 0.0)
        if k is DevKind.LOG_RHO_Y:
            return np.log(np.maximum(r1, self.floor))
        r2 = np.asarray(r2, dtype=np.float64)
        return np.maximum(r1 - r2, 0.0)

    @property
    def uses_rho_x(self) -> bool:
        return self.kind is DevKind.TRAVEL_SLACK

    def to_dict(self) -> dict:
        d = {"id": self.kind.value}
        if self.kind is DevKind.HINGE_ABOVE:
            d["params"] = {"c": self.c}
        elif self.kind is DevKind.LOG_RHO_Y:
            d["params"] = {"floor": self.floor}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DeviationFn":
        try:
            kind = DevKind(d.get("id"))
        except ValueError:
            raise SchemaError(f"unknown deviation {d.get('id')!r}") from None
        params = d.get("params") or {}
        kw = {}
        if "c" in params:
            kw["c"] = float(params["c"])
        if "floor" in params:
            kw["floor"] = float(params["floor"])
        return cls(kind, **kw)


RHO_Y = DeviationFn(DevKind.RHO_Y)
RHO_Y_SQUARED = DeviationFn(DevKind.RHO_Y_SQUARED)
TRAVEL_SLACK = DeviationFn(DevKind.TRAVEL_SLACK)


def hinge_above(c: float) -> DeviationFn:
    return DeviationFn(DevKind.HINGE_ABOVE, c=float(c))


def log_rho_y(floor: float = 1e-12) -> DeviationFn:
    return DeviationFn(DevKind.LOG_RHO_Y, floor=float(floor))


# ---------------------------------------------------------------------------
# theories


@dataclass(frozen=True)
class Aspect:
    condition: Condition
    deviation: DeviationFn = RHO_Y
    aggregator: ProperAggregator = MEAN

    def to_dict(self) -> dict:
        return {"condition": self.condition.to_dict(), "deviation": self.deviation.to_dict(),
                "aggregator": self.aggregator.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "Aspect":
        try:
            return cls(condition_from_dict(d["condition"]), DeviationFn.from_dict(d["deviation"]),
                       ProperAggregator.from_dict(d["aggregator"]))
        except KeyError as exc:
            raise SchemaError(f"aspect is missing field {exc}") from None


class RegKind(enum.Enum):
    NONE = "none"
    SQUARED_WEIGHT_NORM = "squared_weight_norm"


@dataclass(frozen=True)
class RegularizationTerm:
    kind: RegKind = RegKind.NONE
    alpha: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or not math.isfinite(self.alpha):
            raise DomainError("regularization weight must be finite and non-negative")

    @classmethod
    def squared_weight_norm(cls, alpha: float) -> "RegularizationTerm":
        return cls(RegKind.SQUARED_WEIGHT_NORM, float(alpha))

    def value(self, h: "HypothesisSpec") -> float | None:
        if self.kind is RegKind.NONE:
            return None
        w = getattr(h, "w", None)
        if w is None:
            raise DomainError("squared_weight_norm needs a hypothesis with a linear form")
        w = np.asarray(w, dtype=np.float64)
        return self.alpha * float(np.dot(w, w))

    def to_dict(self) -> dict:
        if self.kind is RegKind.NONE:
            return {"id": "none"}
        return {"id": self.kind.value, "params": {"alpha": self.alpha}}

    @classmethod
    def from_dict(cls, d: dict | None) -> "RegularizationTerm":
        if not d:
            return NO_REG
        try:
            kind = RegKind(d.get("id"))
        except ValueError:
            raise SchemaError(f"unknown regularization {d.get('id')!r}") from None
        return cls(kind, float((d.get("params") or {}).get("alpha", 0.0)))


NO_REG = RegularizationTerm()


@dataclass(frozen=True)
class IncongruityTheory:
    aspects: tuple[Aspect, ...]
    name: str = "theory"
    top: TotalAggregator = field(default_factory=TotalAggregator)
    regularization: RegularizationTerm = NO_REG
    x_metric: MetricDef | None = None
    y_metric: MetricDef | None = None

    def __post_init__(self):
        object.__setattr__(self, "aspects", tuple(self.aspects))
        if not self.aspects:
            raise SchemaError("a theory needs at least one aspect")

    def to_dict(self) -> dict:
        d = {"name": self.name, "aspects": [a.to_dict() for a in self.aspects],
             "regularization": self.regularization.to_dict(), "top": self.top.to_dict()}
        if self.x_metric is not None:
            d["x_metric"] = self.x_metric.to_dict()
        if self.y_metric is not None:
            d["y_metric"] = self.y_metric.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IncongruityTheory":
        from .schema import validate_theory
        validate_theory(d)
        return cls(
            aspects=tuple(Aspect.from_dict(a) for a in d["aspects"]),
            name=d.get("name", "theory"),
            top=TotalAggregator.from_dict(d.get("top") or {"id": "passthrough"}),
            regularization=RegularizationTerm.from_dict(d.get("regularization")),
            x_metric=MetricDef.from_dict(d["x_metric"], Space.X) if "x_metric" in d else None,
            y_metric=MetricDef.from_dict(d["y_metric"], Space.Y) if "y_metric" in d else None,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "IncongruityTheory":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"theory JSON line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(d)

    def bind(self, S: FormulaSet) -> FormulaSet:
        """Apply the theory's metrics (if any) to an observation set."""
        if self.x_metric is None and self.y_metric is None:
            return S
        return S.with_metrics(self.x_metric, self.y_metric)


# ---------------------------------------------------------------------------
# hypotheses


class HypothesisSpec:
    pass


@dataclass(frozen=True)
class PointFunction(HypothesisSpec):
    """A hypothesis given as a function of the data point.

    ``w`` and ``b`` expose a linear form ``h(x) = w.x + b`` for
    regularization; when set, the callable must reproduce it.
    """

    fn: Callable
    w: tuple[float, ...] | None = None
    b: float | None = None
    name: str = "h"

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=np.float64))


def linear_hypothesis(w, b: float = 0.0, name: str = "linear") -> PointFunction:
    w = tuple(float(v) for v in np.ravel(w))
    b = float(b)
    warr = np.array(w)

    def fn(x):
        return float(np.dot(warr, np.ravel(x)) + b)

    return PointFunction(fn, w, b, name)


def constant_hypothesis(c, name: str | None = None) -> PointFunction:
    c = float(c)
    return PointFunction(lambda x: c, None, None, name or f"constant({c:g})")


@dataclass(frozen=True)
class ExplicitInstances(HypothesisSpec):
    """A hypothesis given as a finite set of hypothetical formulas."""

    formulas: tuple[Formula, ...] = ()
    name: str = "instances"
    w: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        for f in self.formulas:
            if f.modality.is_observation:
                raise SchemaError("explicit instances must carry hypothetical modalities")


NO_HYPOTHESIS = ExplicitInstances((), "none")


# ---------------------------------------------------------------------------
# full model


@dataclass(frozen=True)
class FullModel:
    formulas: FormulaSet
    origin: tuple[str, str]
    n_observations: int

    @property
    def n_hypothetical(self) -> int:
        return len(self.formulas) - self.n_observations


def _conjuncts(c: Condition):
    if isinstance(c, And):
        for ch in c.children:
            yield from _conjuncts(ch)
    else:
        yield c


def _generation_modality(T: IncongruityTheory) -> Modality:
    for a in T.aspects:
        for c in _conjuncts(a.condition):
            if isinstance(c, ModalityIs) and not c.modality.is_observation:
                return c.modality
    return hyp(0)


def _point_generating(T: IncongruityTheory) -> bool:
    return all(any(isinstance(c, XEqual) for c in _conjuncts(a.condition)) for a in T.aspects)


def _collision_masks(T: IncongruityTheory, ctx: PairContext) -> list[np.ndarray]:
    masks = []
    for a in T.aspects:
        m = np.array(a.condition.mask(ctx), dtype=bool)
        np.fill_diagonal(m, False)
        masks.append(m)
    return masks


def build_full_model(h: HypothesisSpec, S: FormulaSet, T: IncongruityTheory) -> FullModel:
    """Observations plus the hypothetical instances the theory collides with.

    A :class:`PointFunction` is instantiated at every distinct observed data
    point; this needs every aspect condition to constrain ``x`` equality
    (``x_equal`` as a conjunct).  :class:`ExplicitInstances` are taken as
    given.  Either way only hypothetical formulas that take part in at least
    one collision are kept, which makes the set minimal.
    """
    S = T.bind(S)
    obs_f = S.formulas
    if isinstance(h, PointFunction):
        if not _point_generating(T):
            raise UnsupportedTheoryError(
                f"theory {T.name!r} has a condition without x_equal; "
                "it cannot instantiate a point hypothesis, pass explicit instances")
        m = _generation_modality(T)
        seen = set()
        candidates = []
        for f in obs_f:
            if not f.modality.is_observation or f.x in seen:
                continue
            seen.add(f.x)
            candidates.append(Formula(m, f.x, h(f.x)))
    elif isinstance(h, ExplicitInstances):
        candidates = list(h.formulas)
    else:
        raise SchemaError(f"unsupported hypothesis type {type(h).__name__}")

    full = S.extend(candidates)
    if candidates:
        ctx = PairContext(full)
        hits = np.zeros(len(full), dtype=bool)
        for m in _collision_masks(T, ctx):
            hits |= m.any(axis=0) | m.any(axis=1)
        keep = [f for i, f in enumerate(candidates) if hits[len(obs_f) + i]]
        full = S.extend(keep)
    name = getattr(h, "name", "h")
    return FullModel(full, (T.name, name), len(obs_f))


def colliding_pairs(M: FullModel, a: Aspect) -> list[tuple[Formula, Formula]]:
    idx = colliding_indices(M, a)
    f = M.formulas.formulas
    return [(f[i], f[j]) for i, j in zip(*idx)]


def colliding_indices(M: FullModel, a: Aspect, ctx: PairContext | None = None):
    """Row/column index arrays of colliding pairs in lexicographic order."""
    ctx = ctx or PairContext(M.formulas)
    m = np.array(a.condition.mask(ctx), dtype=bool)
    np.fill_diagonal(m, False)
    return np.nonzero(m)


def aspect_deviations(M: FullModel, a: Aspect, ctx: PairContext | None = None) -> np.ndarray:
    """One deviation per colliding pair, in pair order."""
    ctx = ctx or PairContext(M.formulas)
    i, j = colliding_indices(M, a, ctx)
    if len(i) == 0:
        return np.zeros(0)
    r1 = ctx.rho_y[i, j]
    r2 = ctx.rho_x[i, j] if a.deviation.uses_rho_x else None
    return a.deviation(r1, r2)


@dataclass
class AspectResult:
    index: int
    value: float | None
    n_pairs: int
    aggregator: str
    no_collisions: bool

    def to_dict(self) -> dict:
        return {"aspect": self.index, "value": self.value, "pairs": self.n_pairs,
                "aggregator": self.aggregator, "no_collisions": self.no_collisions}


@dataclass
class IncongruityResult:
    total: float
    aspects: list[AspectResult]
    regularization: float | None
    model: FullModel

    def __float__(self):
        return self.total

    def to_dict(self) -> dict:
        return {"total": self.total, "aspects": [a.to_dict() for a in self.aspects],
                "regularization": self.regularization}


def total_incongruity(h: HypothesisSpec, S: FormulaSet, T: IncongruityTheory,
                      reg: RegularizationTerm | None = None, top: TotalAggregator | None = None,
                      mode: str = EXACT) -> IncongruityResult:
    """Aggregate each aspect's deviations, then combine with ``top``.

    ``reg`` and ``top`` default to the theory's own.  In ``exact`` mode each
    aspect is reduced in a canonical sorted order, so the result does not
    depend on pair enumeration order at the bit level; ``fast`` mode uses
    vectorized reductions and agrees to about 1e-9 relative.
    """
    if mode not in MODES:
        raise SchemaError(f"unknown mode {mode!r}")
    reg = T.regularization if reg is None else reg
    top = T.top if top is None else top
    M = build_full_model(h, S, T)
    ctx = PairContext(M.formulas)
    results = []
    for k, a in enumerate(T.aspects):
        devs = aspect_deviations(M, a, ctx)
        if len(devs) == 0:
            results.append(AspectResult(k, None, 0, str(a.aggregator), True))
            continue
        results.append(AspectResult(k, a.aggregator(devs, mode), len(devs), str(a.aggregator), False))
    reg_value = reg.value(h)
    total = top.combine([r.value for r in results], reg_value)
    return IncongruityResult(float(total), results, reg_value, M)
