"""Proper aggregation of deviation multisets.

A proper aggregation maps a finite non-empty multiset of reals to a real and
satisfies Monotony, Idempotence and Tautology.  Built-ins:

* the four recursive interpretations (plus, scale, norm):
  mean ``(+, x, x/i)``, rms ``(+, x**2, sqrt(x/i))``, max ``(max, x, x)``
  and geometric mean ``(*, x, x**(1/i))``;
* the median and any percentile.

``sum`` is provided for losses written as plain sums; it is not proper
(idempotence fails) and is flagged as such.

Recursive aggregations fold left over the multiset in the order given.  In
``exact`` mode the multiset is sorted first so every permutation of the
input yields the same bits.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .errors import DomainError, SchemaError

EXACT = "exact"
FAST = "fast"
MODES = (EXACT, FAST)


class Interp(enum.Enum):
    MEAN = "mean"
    RMS = "rms"
    MAX = "max"
    GEOMEAN = "geomean"


_FOLD_CODES = {Interp.MEAN: 0, Interp.RMS: 1, Interp.MAX: 2, Interp.GEOMEAN: 3}


@dataclass(frozen=True)
class RecursiveAggregator:
    """One row of the (plus, scale, norm) interpretation table."""

    interp: Interp

    def plus(self, x: float, y: float) -> float:
        if self.interp is Interp.MAX:
            return max(x, y)
        if self.interp is Interp.GEOMEAN:
            return x * y
        return x + y

    def scale(self, x: float) -> float:
        return x * x if self.interp is Interp.RMS else x

    def norm(self, x: float, i: int) -> float:
        if self.interp is Interp.MEAN:
            return x / i
        if self.interp is Interp.RMS:
            return math.sqrt(x / i)
        if self.interp is Interp.GEOMEAN:
            return math.pow(x, 1.0 / i)
        return x

    def check_domain(self, values: np.ndarray) -> None:
        if self.interp is Interp.GEOMEAN and (values <= 0).any():
            raise DomainError("geometric mean needs strictly positive values")
        if self.interp is Interp.RMS and (values < 0).any():
            # x**2 is monotone only on the non-negative half-line
            raise DomainError("rms aggregation needs non-negative values")


def _as_multiset(G) -> np.ndarray:
    arr = np.asarray(G, dtype=np.float64).ravel()
    if arr.size == 0:
        raise DomainError("aggregation of an empty multiset is undefined")
    if not np.isfinite(arr).all():
        raise DomainError("aggregation needs finite values")
    return arr


def recursive_tot(G, r: RecursiveAggregator | Interp | str, canonical: bool = False) -> float:
    """``norm(agg(count), count)`` with ``agg`` folded in the order of ``G``."""
    if not isinstance(r, RecursiveAggregator):
        r = RecursiveAggregator(Interp(r))
    arr = _as_multiset(G)
    r.check_domain(arr)
    if canonical:
        arr = np.sort(arr, kind="stable")
    return _backend.recursive_tot(arr, _FOLD_CODES[r.interp])


def plain_sum(G, canonical: bool = False) -> float:
    arr = _as_multiset(G)
    if canonical:
        arr = np.sort(arr, kind="stable")
    return _backend.recursive_tot(arr, 4)


def median(G) -> float:
    s = np.sort(_as_multiset(G), kind="stable")
    n = len(s)
    k = n // 2
    if n % 2:
        return float(s[k])
    return float((s[k - 1] + s[k]) / 2)


def percentile_agg(G, p: float) -> float:
    """Order statistic at percentile ``p``.

    ``p == 50`` is the median (midpoint of the two middle elements for even
    size).  Otherwise the result is the smallest element with strictly more
    than ``p`` percent of the multiset at or below it, i.e. rank
    ``floor(p * n / 100) + 1`` capped at ``n``; ``p == 0`` is the minimum.
    """
    if not 0 <= p <= 100:
        raise DomainError(f"percentile must be in [0, 100], got {p}")
    if p == 50:
        return median(G)
    s = np.sort(_as_multiset(G), kind="stable")
    n = len(s)
    rank = min(math.floor(p * n / 100) + 1, n)
    return float(s[rank - 1])


class AggKind(enum.Enum):
    MEAN = "mean"
    RMS = "rms"
    MAX = "max"
    GEOMEAN = "geomean"
    MEDIAN = "median"
    PERCENTILE = "percentile"
    SUM = "sum"


@dataclass(frozen=True)
class ProperAggregator:
    kind: AggKind
    p: float | None = None

    def __post_init__(self):
        if self.kind is AggKind.PERCENTILE:
            if self.p is None or not 0 <= self.p <= 100:
                raise DomainError("percentile aggregator needs p in [0, 100]")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise SchemaError(f"{self.kind.value} aggregator takes no parameter")

    @classmethod
    def of(cls, name: str, p: float | None = None) -> "ProperAggregator":
        try:
            kind = AggKind(name)
        except ValueError:
            raise SchemaError(f"unknown aggregator {name!r}") from None
        return cls(kind, p)

    @property
    def proper(self) -> bool:
        return self.kind is not AggKind.SUM

    @property
    def recursive(self) -> RecursiveAggregator | None:
        try:
            return RecursiveAggregator(Interp(self.kind.value))
        except ValueError:
            return None

    @property
    def domain(self) -> tuple[float, float]:
        """Open/closed value range used by the randomized axiom oracle."""
        if self.kind is AggKind.GEOMEAN:
            return (0.0, 1e3)
        if self.kind is AggKind.RMS:
            return (0.0, 1e3)
        return (-1e3, 1e3)

    def __call__(self, G, mode: str = EXACT) -> float:
        if mode not in MODES:
            raise SchemaError(f"unknown mode {mode!r}")
        r = self.recursive
        if r is not None:
            if mode == EXACT:
                return recursive_tot(G, r, canonical=True)
            arr = _as_multiset(G)
            r.check_domain(arr)
            if r.interp is Interp.MEAN:
                return float(np.mean(arr))
            if r.interp is Interp.RMS:
                return float(np.sqrt(np.mean(arr * arr)))
            if r.interp is Interp.MAX:
                return float(np.max(arr))
            return float(np.exp(np.mean(np.log(arr))))
        if self.kind is AggKind.SUM:
            if mode == EXACT:
                return plain_sum(G, canonical=True)
            return float(np.sum(_as_multiset(G)))
        if self.kind is AggKind.MEDIAN:
            return median(G)
        return percentile_agg(G, self.p)

    def to_dict(self) -> dict:
        d = {"id": self.kind.value}
        if self.kind is AggKind.PERCENTILE:
            d["params"] = {"p": self.p}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProperAggregator":
        params = d.get("params") or {}
        return cls.of(d.get("id"), params.get("p"))

    def __str__(self):
        return f"percentile({self.p:g})" if self.kind is AggKind.PERCENTILE else self.kind.value


MEAN = ProperAggregator(AggKind.MEAN)
MAX = ProperAggregator(AggKind.MAX)
SUM = ProperAggregator(AggKind.SUM)
MEDIAN = ProperAggregator(AggKind.MEDIAN)


class TopKind(enum.Enum):
    PASSTHROUGH = "passthrough"
    SUM = "sum"
    WEIGHTED_SUM = "weighted_sum"
    ONE_MINUS_PRODUCT = "one_minus_product"
    SUM_PLUS_REG = "sum_plus_reg"


@dataclass(frozen=True)
class TotalAggregator:
    """Isotone combination of aspect incongruities and a regularization term.

    The regularization value, when present, enters additive tops as one more
    summand.  An aspect without colliding pairs contributes the identity of
    the top: 0 for the additive tops, a factor of 1 for ``one_minus_product``.
    """

    kind: TopKind = TopKind.PASSTHROUGH
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind is TopKind.WEIGHTED_SUM:
            if not self.weights:
                raise SchemaError("weighted_sum needs weights")
            w = tuple(float(v) for v in self.weights)
            if any(v < 0 or not math.isfinite(v) for v in w):
                # negative weights would break isotony
                raise DomainError("weighted_sum weights must be finite and non-negative")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise SchemaError(f"{self.kind.value} takes no weights")

    @classmethod
    def of(cls, name: str, weights=None) -> "TotalAggregator":
        try:
            kind = TopKind(name)
        except ValueError:
            raise SchemaError(f"unknown total aggregator {name!r}") from None
        return cls(kind, tuple(weights) if weights is not None else None)

    def combine(self, aspect_values: Sequence[float | None], reg: float | None = None) -> float:
        k = len(aspect_values)
        if k == 0:
            raise SchemaError("a theory needs at least one aspect")
        vals = [v for v in aspect_values]
        if self.kind is TopKind.PASSTHROUGH:
            if k != 1 or reg is not None:
                raise SchemaError("passthrough combines exactly one aspect and no regularization")
            return 0.0 if vals[0] is None else float(vals[0])
        if self.kind is TopKind.ONE_MINUS_PRODUCT:
            if reg is not None:
                raise SchemaError("one_minus_product takes no regularization term")
            prod = 1.0
            for v in vals:
                if v is None:
                    continue
                if not 0.0 <= v <= 1.0:
                    raise DomainError(f"one_minus_product needs aspect values in [0, 1], got {v}")
                prod = prod * (1.0 - v)
            return 1.0 - prod
        if self.kind is TopKind.SUM_PLUS_REG and reg is None:
            raise SchemaError("sum_plus_reg needs a regularization term")
        if self.kind is TopKind.WEIGHTED_SUM:
            if len(self.weights) != k:
                raise SchemaError(f"weighted_sum has {len(self.weights)} weights for {k} aspects")
            weights = self.weights
        else:
            weights = (1.0,) * k
        total = 0.0
        for w, v in zip(weights, vals):
            if v is not None:
                total = total + w * v
        if reg is not None:
            total = total + reg
        return total

    def to_dict(self) -> dict:
        d = {"id": self.kind.value}
        if self.weights is not None:
            d["params"] = {"weights": list(self.weights)}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TotalAggregator":
        params = d.get("params") or {}
        return cls.of(d.get("id"), params.get("weights"))


# ---------------------------------------------------------------------------
# randomized oracles


@dataclass
class AxiomResult:
    passed: bool = True
    trials: int = 0
    witness: dict | None = None

    def fail(self, **witness):
        if self.passed:
            self.passed = False
            self.witness = {k: _jsonable(v) for k, v in witness.items()}


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [float(a) for a in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


@dataclass
class AxiomReport:
    aggregator: str
    monotony: AxiomResult = field(default_factory=AxiomResult)
    idempotence: AxiomResult = field(default_factory=AxiomResult)
    tautology: AxiomResult = field(default_factory=AxiomResult)
    bounds: AxiomResult = field(default_factory=AxiomResult)
    constant: AxiomResult = field(default_factory=AxiomResult)

    AXIOMS = ("monotony", "idempotence", "tautology", "bounds", "constant")

    @property
    def passed(self) -> bool:
        return all(getattr(self, a).passed for a in self.AXIOMS)

    def to_dict(self) -> dict:
        out = {"aggregator": self.aggregator, "passed": self.passed}
        for a in self.AXIOMS:
            r = getattr(self, a)
            out[a] = {"passed": r.passed, "trials": r.trials, "witness": r.witness}
        return out


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _draw(rng, size, low, high):
    if low == 0.0:
        # (0, high]: reflect [0, high) so zero is never drawn
        return high - rng.uniform(0.0, high, size)
    return rng.uniform(low, high, size)


def check_proper_axioms(agg: ProperAggregator | Callable, trials: int = 1000, size_max: int = 50,
                        seed: int = 0, tol: float = 1e-9, domain: tuple[float, float] | None = None,
                        name: str | None = None) -> AxiomReport:
    """Randomized search for counterexamples to the proper-aggregation axioms.

    Also checks the two consequences every proper aggregation must have:
    ``min(G) <= TOT(G) <= max(G)`` and ``TOT`` of a constant multiset is the
    constant.  Failures are recorded with the first witness found.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if domain is None:
        domain = agg.domain if isinstance(agg, ProperAggregator) else (-1e3, 1e3)
    low, high = domain
    rng = np.random.default_rng(seed)
    report = AxiomReport(name or str(agg))
    raw = agg

    def agg(G):
        # a domain error is a counterexample too; NaN fails every comparison
        try:
            return raw(G)
        except DomainError:
            return math.nan

    for _ in range(trials):
        n = int(rng.integers(1, size_max + 1))
        G1 = _draw(rng, n, low, high)
        t1 = agg(G1)

        # Monotony: pair G1 with an element-wise larger G2 (some gaps zero)
        inc = rng.uniform(0.0, 10.0, n) * (rng.random(n) < 0.7)
        G2 = G1 + inc
        t2 = agg(G2)
        report.monotony.trials += 1
        if not t2 >= t1:
            report.monotony.fail(G1=G1, G2=G2, tot1=t1, tot2=t2)
        inc = rng.uniform(0.01, 10.0, n)
        G3 = G1 + inc
        t3 = agg(G3)
        if not t3 > t1:
            report.monotony.fail(G1=G1, G2=G3, tot1=t1, tot2=t3, strict=True)

        report.idempotence.trials += 1
        t_ext = agg(np.append(G1, t1))
        if not _close(t_ext, t1, tol):
            report.idempotence.fail(G=G1, tot=t1, tot_extended=t_ext)

        report.tautology.trials += 1
        x = float(G1[0])
        tx = agg(np.array([x]))
        if tx != x:
            report.tautology.fail(x=x, tot=tx)

        report.bounds.trials += 1
        lo, hi = float(G1.min()), float(G1.max())
        if not (t1 >= lo or _close(t1, lo, tol)) or not (t1 <= hi or _close(t1, hi, tol)):
            report.bounds.fail(G=G1, tot=t1)

        report.constant.trials += 1
        tc = agg(np.full(n, x))
        if not _close(tc, x, tol):
            report.constant.fail(x=x, n=n, tot=tc)
    return report


@dataclass
class OrderReport:
    passed: bool
    permutations: int
    max_rel_discrepancy: float
    canonical_exact: bool
    value: float


def check_order_invariance(G, r: RecursiveAggregator | Interp | str, permutations: int = 50,
                           seed: int = 0, tol: float = 1e-9) -> OrderReport:
    """Fold ``G`` under random permutations and compare the totals."""
    arr = _as_multiset(G)
    if arr.size < 2:
        raise DomainError("order invariance needs at least two elements")
    rng = np.random.default_rng(seed)
    base = recursive_tot(arr, r)
    canon = recursive_tot(arr, r, canonical=True)
    worst = 0.0
    exact = True
    for _ in range(permutations):
        perm = rng.permutation(arr)
        v = recursive_tot(perm, r)
        gap = abs(v - base)
        worst = max(worst, gap / abs(base) if base else gap)
        exact &= recursive_tot(perm, r, canonical=True) == canon
    return OrderReport(worst <= tol and exact, permutations, worst, exact, base)
