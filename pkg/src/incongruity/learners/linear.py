"""Linear hypotheses: logistic, SVM, SVR, ridge, and basis transforms."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..errors import DomainError, SchemaError
from ..theory import PointFunction, linear_hypothesis
from .base import Decision, LabeledDataset, LabelKind

LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class Schedule:
    """Step size ``eta0 / sqrt(t)`` for ``t = 1..max_iter``."""

    eta0: float = 0.1
    max_iter: int = 10_000

    def __post_init__(self):
        if self.eta0 <= 0 or self.max_iter < 1:
            raise DomainError("need eta0 > 0 and max_iter >= 1")


def _wb(f):
    if isinstance(f, PointFunction):
        if f.w is None:
            raise DomainError("hypothesis has no linear form")
        return np.array(f.w, dtype=np.float64), float(f.b or 0.0)
    w, b = f
    return np.asarray(w, dtype=np.float64).ravel(), float(b)


def _scores(w, b, X):
    return X @ w + b


# ---------------------------------------------------------------------------
# logistic


def sigmoid_hypothesis(w, b: float = 0.0) -> PointFunction:
    w = tuple(float(v) for v in np.ravel(w))
    warr = np.array(w)

    def fn(x):
        return 1.0 / (1.0 + math.exp(-(float(np.dot(warr, np.ravel(x))) + b)))

    return PointFunction(fn, None, None, "sigmoid")


def logistic_loss(f, S: LabeledDataset, floor: float = LOG_FLOOR) -> float:
    """Mean of ``log(max(|y - f(x)|, floor))``."""
    S.require_nonempty()
    pred = np.array([float(f(x)) for x in S.X])
    return float(np.mean(np.log(np.maximum(np.abs(S.y - pred), floor))))


def logistic_train(S: LabeledDataset, sched: Schedule = Schedule(), floor: float = LOG_FLOOR) -> Decision:
    """Gradient descent on the clamped log-deviation criterion, keeping the best iterate."""
    S.require_nonempty()
    if S.label_kind is not LabelKind.BINARY01:
        raise SchemaError("logistic regression needs 0/1 labels")
    w = np.zeros(S.n)
    b = 0.0
    best = (logistic_loss(sigmoid_hypothesis(w, b), S, floor), w.copy(), b)
    for t in range(1, sched.max_iter + 1):
        z = _scores(w, b, S.X)
        s = 1.0 / (1.0 + np.exp(-z))
        dev = np.abs(S.y - s)
        g = np.where(dev > floor, 1.0 - S.y - s, 0.0) / S.m
        eta = sched.eta0 / math.sqrt(t)
        w = w - eta * (S.X.T @ g)
        b = b - eta * g.sum()
        loss = logistic_loss(sigmoid_hypothesis(w, b), S, floor)
        if loss < best[0]:
            best = (loss, w.copy(), b)
    loss, w, b = best
    d = Decision(sigmoid_hypothesis(w, b), loss)
    d.info.update(w=w, b=b)
    d.step("fitting", loss=loss, iterations=sched.max_iter)
    return d


# ---------------------------------------------------------------------------
# SVM


def normalize_to_Fprime(f, S: LabeledDataset) -> PointFunction:
    """Rescale so the smallest correct margin is exactly 1.

    If ``f`` classifies no point correctly it is negated first.
    """
    w, b = _wb(f)
    s = _scores(w, b, S.X)
    if not s.any():
        raise DomainError("hypothesis is identically zero on the data")
    ok = S.y * s > 0
    if not ok.any():
        w, b, s = -w, -b, -s
        ok = S.y * s > 0
        if not ok.any():
            raise DomainError("no point can be classified correctly by f or -f")
    q = float(np.min(np.abs(s[ok])))
    return linear_hypothesis(w / q, b / q)


def svm_misclassified(f, S: LabeledDataset) -> np.ndarray:
    w, b = _wb(f)
    return S.y * _scores(w, b, S.X) <= 0


def svm_loss(f, S: LabeledDataset, alpha: float) -> float:
    """``alpha |w|^2 + (1/m) sum over misclassified points of |y - f(x)|``.

    ``f`` is expected to be normalized already.  A point with ``f(x) = 0``
    counts as misclassified.
    """
    S.require_nonempty()
    w, b = _wb(f)
    s = _scores(w, b, S.X)
    bad = S.y * s <= 0
    return float(alpha * np.dot(w, w) + np.abs(S.y[bad] - s[bad]).sum() / S.m)


def min_slack(f, S: LabeledDataset) -> np.ndarray:
    """Smallest ``xi >= 0`` with ``y f(x) >= 1 - xi`` for each point."""
    w, b = _wb(f)
    return np.maximum(1.0 - S.y * _scores(w, b, S.X), 0.0)


def svm_train(S: LabeledDataset, alpha: float, sched: Schedule = Schedule()) -> Decision:
    """Subgradient descent on ``alpha |w|^2 + mean(hinge)``.

    Every iterate is normalized and scored with :func:`svm_loss`; the best
    one is returned.
    """
    if S.label_kind is not LabelKind.BINARY_PM1:
        raise SchemaError("SVM needs -1/+1 labels")
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    if len(np.unique(S.y)) < 2:
        raise DomainError("SVM needs both classes")
    w = np.zeros(S.n)
    b = 0.0
    best = None
    for t in range(1, sched.max_iter + 1):
        s = _scores(w, b, S.X)
        active = S.y * s < 1.0
        gw = 2.0 * alpha * w - (S.y[active, None] * S.X[active]).sum(axis=0) / S.m
        gb = -S.y[active].sum() / S.m
        eta = sched.eta0 / math.sqrt(t)
        w = w - eta * gw
        b = b - eta * gb
        if not _scores(w, b, S.X).any():
            continue
        f = normalize_to_Fprime((w, b), S)
        loss = svm_loss(f, S, alpha)
        if best is None or loss < best[0]:
            best = (loss, f, t)
    if best is None:
        raise DomainError("optimizer never left the zero hypothesis")
    loss, f, t = best
    err = float(np.mean(svm_misclassified(f, S)))
    d = Decision(f, loss)
    d.info.update(w=list(f.w), b=f.b, training_error=err, best_iteration=t)
    d.step("fitting", loss=loss, iterations=sched.max_iter, best_iteration=t)
    d.step("optimal_selection", loss=loss, training_error=err)
    return d


# ---------------------------------------------------------------------------
# SVR


def eps_insensitive(r, eps: float):
    return np.maximum(np.abs(r) - eps, 0.0)


def svr_loss(f, S: LabeledDataset, eps: float, lam: float) -> float:
    """``sum V_eps(y - f(x)) + lam |w|^2`` (a sum, not a mean)."""
    w, b = _wb(f)
    r = S.y - _scores(w, b, S.X)
    return float(eps_insensitive(r, eps).sum() + lam * np.dot(w, w))


def svr_train(S: LabeledDataset, eps: float, lam: float) -> Decision:
    """Solve the slack-form quadratic program with SLSQP."""
    S.require_nonempty()
    if eps < 0 or lam < 0:
        raise DomainError("eps and lam must be non-negative")
    m, n = S.m, S.n
    X, y = S.X, S.y

    def obj(v):
        w = v[:n]
        return v[n + 1:].sum() + lam * np.dot(w, w)

    def grad(v):
        g = np.zeros_like(v)
        g[:n] = 2.0 * lam * v[:n]
        g[n + 1:] = 1.0
        return g

    A = np.hstack([X, np.ones((m, 1))])
    cons = [
        # xi >= y - f - eps  and  xi >= f - y + eps
        {"type": "ineq", "fun": lambda v: v[n + 1:] - (y - A @ v[:n + 1]) + eps,
         "jac": lambda v: np.hstack([A, np.eye(m)])},
        {"type": "ineq", "fun": lambda v: v[n + 1:] - (A @ v[:n + 1] - y) + eps,
         "jac": lambda v: np.hstack([-A, np.eye(m)])},
    ]
    v0 = np.zeros(n + 1 + m)
    v0[n] = float(np.median(y))
    v0[n + 1:] = eps_insensitive(y - v0[n], eps)
    bounds = [(None, None)] * (n + 1) + [(0.0, None)] * m
    res = minimize(obj, v0, jac=grad, bounds=bounds, constraints=cons, method="SLSQP",
                   options={"maxiter": 1000, "ftol": 1e-12})
    w, b = res.x[:n], float(res.x[n])
    f = linear_hypothesis(w, b)
    loss = svr_loss(f, S, eps, lam)
    d = Decision(f, loss)
    d.info.update(w=w, b=b, converged=bool(res.success), message=str(res.message))
    d.step("fitting", loss=loss, iterations=int(res.nit))
    return d


# ---------------------------------------------------------------------------
# basis transform


@dataclass(frozen=True)
class Basis:
    """``identity``, ``polynomial`` (per-coordinate powers 1..degree) or
    ``radial`` (``exp(-gamma |x - c|^2)`` for each center)."""

    kind: str = "identity"
    degree: int = 1
    centers: tuple = ()
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "polynomial", "radial"):
            raise SchemaError(f"unknown basis {self.kind!r}")
        if self.kind == "polynomial" and self.degree < 1:
            raise DomainError("polynomial degree must be at least 1")
        if self.kind == "radial" and (not self.centers or self.gamma <= 0):
            raise DomainError("radial basis needs centers and gamma > 0")

    @classmethod
    def from_dict(cls, d: dict) -> "Basis":
        centers = tuple(tuple(np.ravel(c).tolist()) for c in d.get("centers", ()))
        return cls(d.get("kind", "identity"), int(d.get("degree", 1)), centers, float(d.get("gamma", 1.0)))


def kernel_transform(X, basis: Basis) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X = X.reshape(1, -1) if single else X
    if basis.kind == "identity":
        out = X.copy()
    elif basis.kind == "polynomial":
        out = np.hstack([X ** p for p in range(1, basis.degree + 1)])
    else:
        C = np.asarray(basis.centers, dtype=np.float64)
        if C.shape[1] != X.shape[1]:
            raise DomainError("center dimension does not match data")
        sq = ((X[:, None, :] - C[None]) ** 2).sum(-1)
        out = np.exp(-basis.gamma * sq)
    return out[0] if single else out


def transform_dataset(S: LabeledDataset, basis: Basis) -> LabeledDataset:
    return LabeledDataset(kernel_transform(S.X, basis), S.y, S.label_kind)


# ---------------------------------------------------------------------------
# ridge


def ridge_loss(f, S: LabeledDataset, alpha: float) -> float:
    """``alpha |w|^2 + mean((f(x) - y)^2)``."""
    S.require_nonempty()
    w, b = _wb(f)
    r = _scores(w, b, S.X) - S.y
    return float(alpha * np.dot(w, w) + np.mean(r * r))


def ridge_train(S: LabeledDataset, alpha: float) -> Decision:
    """Closed form with an unpenalized intercept."""
    S.require_nonempty()
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    m, n = S.m, S.n
    A = np.hstack([S.X, np.ones((m, 1))])
    P = np.eye(n + 1)
    P[n, n] = 0.0
    M = A.T @ A + m * alpha * P
    if np.linalg.matrix_rank(M) < n + 1:
        raise DomainError("normal equations are singular; use alpha > 0")
    theta = np.linalg.solve(M, A.T @ S.y)
    f = linear_hypothesis(theta[:n], theta[n])
    loss = ridge_loss(f, S, alpha)
    d = Decision(f, loss)
    d.info.update(w=theta[:n], b=float(theta[n]))
    d.step("fitting", loss=loss, alpha=alpha)
    return d
