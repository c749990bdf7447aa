"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise, or
when ``INCONGRUITY_PURE_PYTHON`` is set to a non-empty value, the pure-Python
``_pykernels`` module is used.  Both expose the same functions.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("INCONGRUITY_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"


def _f2(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return a


def _i1(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def pairwise(A, B, code, param=0.0, impl=None):
    return (impl or _impl).pairwise(_f2(A), _f2(B), int(code), float(param))


def pairwise_table(ia, ib, table, impl=None):
    return (impl or _impl).pairwise_table(_i1(ia), _i1(ib), _f2(table))


def recursive_tot(values, code, impl=None):
    values = np.ascontiguousarray(values, dtype=np.float64).ravel()
    return float((impl or _impl).recursive_tot(values, int(code)))


def within_pairwise(X, labels, impl=None):
    return float((impl or _impl).within_pairwise(_f2(X), _i1(labels)))


def within_centroid(X, labels, K, impl=None):
    return float((impl or _impl).within_centroid(_f2(X), _i1(labels), int(K)))


def linkage_matrix(D, labels, K, code, impl=None):
    return (impl or _impl).linkage_matrix(_f2(D), _i1(labels), int(K), int(code))
