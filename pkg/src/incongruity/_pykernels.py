"""Pure-Python kernels.

Reference implementation of the hot loops. ``_kernels.pyx`` mirrors every
function here with the same arithmetic in the same order, so both backends
return bitwise-identical results.

Metric codes: 0 Euclidean, 1 Absolute (L1), 2 Discrete01, 3 SignAgreement,
4 EpsilonInsensitive.  Fold codes: 0 mean, 1 rms, 2 max, 3 geometric mean,
4 plain sum.  Linkage codes: 0 min, 1 mean, 2 max.
"""
import math

import numpy as np


def _distance(a, b, code, param):
    n = len(a)
    if code == 0:
        s = 0.0
        for k in range(n):
            d = a[k] - b[k]
            s += d * d
        return math.sqrt(s)
    if code == 1:
        s = 0.0
        for k in range(n):
            s += abs(a[k] - b[k])
        return s
    if code == 2:
        for k in range(n):
            if a[k] != b[k]:
                return 1.0
        return 0.0
    if code == 3:
        if a[0] * b[0] >= 0.0:
            return 0.0
        return abs(b[0] - a[0])
    if code == 4:
        s = 0.0
        for k in range(n):
            s += abs(a[k] - b[k])
        s -= param
        return s if s > 0.0 else 0.0
    raise ValueError(f"unknown metric code {code}")


def pairwise(A, B, code, param):
    """Distance matrix between the rows of ``A`` and ``B``."""
    rows_a = A.tolist()
    rows_b = B.tolist()
    out = np.empty((len(rows_a), len(rows_b)), dtype=np.float64)
    for i, a in enumerate(rows_a):
        for j, b in enumerate(rows_b):
            out[i, j] = _distance(a, b, code, param)
    return out


def pairwise_table(ia, ib, table):
    """Lookup distances ``table[ia[i], ib[j]]``."""
    ia = ia.tolist()
    ib = ib.tolist()
    t = table.tolist()
    out = np.empty((len(ia), len(ib)), dtype=np.float64)
    for i, p in enumerate(ia):
        row = t[p]
        for j, q in enumerate(ib):
            out[i, j] = row[q]
    return out


def recursive_tot(values, code):
    """Left fold ``agg(i+1) = plus(agg(i), scale(x_{i+1}))`` then ``norm``."""
    xs = values.tolist()
    n = len(xs)
    if n == 0:
        raise ValueError("empty multiset")
    if code == 0 or code == 4:
        acc = xs[0]
        for i in range(1, n):
            acc = acc + xs[i]
        return acc / n if code == 0 else acc
    if code == 1:
        acc = xs[0] * xs[0]
        for i in range(1, n):
            acc = acc + xs[i] * xs[i]
        return math.sqrt(acc / n)
    if code == 2:
        acc = xs[0]
        for i in range(1, n):
            if xs[i] > acc:
                acc = xs[i]
        return acc
    if code == 3:
        acc = xs[0]
        for i in range(1, n):
            acc = acc * xs[i]
        return math.pow(acc, 1.0 / n)
    raise ValueError(f"unknown fold code {code}")


def within_pairwise(X, labels):
    """Half the sum of squared distances over ordered same-cluster pairs."""
    rows = X.tolist()
    lab = labels.tolist()
    m = len(rows)
    total = 0.0
    for i in range(m):
        a = rows[i]
        for j in range(m):
            if lab[i] != lab[j] or i == j:
                continue
            b = rows[j]
            s = 0.0
            for k in range(len(a)):
                d = a[k] - b[k]
                s += d * d
            total += s
    return 0.5 * total


def within_centroid(X, labels, K):
    """Sum over clusters of size times the squared deviation from the mean."""
    rows = X.tolist()
    lab = labels.tolist()
    dim = X.shape[1]
    sums = [[0.0] * dim for _ in range(K)]
    counts = [0] * K
    for a, c in zip(rows, lab):
        counts[c] += 1
        acc = sums[c]
        for k in range(dim):
            acc[k] += a[k]
    means = [[v / counts[c] if counts[c] else 0.0 for v in sums[c]] for c in range(K)]
    sse = [0.0] * K
    for a, c in zip(rows, lab):
        mu = means[c]
        s = 0.0
        for k in range(dim):
            d = a[k] - mu[k]
            s += d * d
        sse[c] += s
    total = 0.0
    for c in range(K):
        total += counts[c] * sse[c]
    return total


def linkage_matrix(D, labels, K, code):
    """Between-cluster aggregate of pairwise distances for every ``i < j``.

    Entries with ``i >= j`` and pairs involving an empty cluster are NaN.
    """
    lab = labels.tolist()
    d = D.tolist()
    members = [[] for _ in range(K)]
    for idx, c in enumerate(lab):
        members[c].append(idx)
    out = np.full((K, K), np.nan)
    for i in range(K):
        mi = members[i]
        if not mi:
            continue
        for j in range(i + 1, K):
            mj = members[j]
            if not mj:
                continue
            acc = d[mi[0]][mj[0]]
            first = True
            for a in mi:
                row = d[a]
                for b in mj:
                    v = row[b]
                    if first:
                        first = False
                        continue
                    if code == 0:
                        if v < acc:
                            acc = v
                    elif code == 1:
                        acc = acc + v
                    else:
                        if v > acc:
                            acc = v
            if code == 1:
                acc = acc / (len(mi) * len(mj))
            out[i, j] = acc
    return out
