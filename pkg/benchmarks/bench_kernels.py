"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Each row runs one kernel on the same inputs under both backends, checks the
results are bitwise equal and reports the best of ``--repeat`` runs.
"""
import argparse
import json
import sys
import timeit

import numpy as np

from incongruity import _backend, _pykernels

try:
    from incongruity import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    A, B = rng.normal(size=(200, 4)), rng.normal(size=(200, 4))
    v = rng.uniform(0.1, 100, 5000)
    X, lab = rng.normal(size=(400, 3)), rng.integers(0, 6, 400)
    D = _backend.pairwise(X[:150], X[:150], 0)
    lab150 = np.arange(150) % 20
    return [
        ("pairwise euclidean 200x200x4", _backend.pairwise, (A, B, 0)),
        ("pairwise epsilon 200x200", _backend.pairwise, (A[:, :1], B[:, :1], 4, 0.2)),
        ("recursive rms n=5000", _backend.recursive_tot, (v, 1)),
        ("recursive geomean n=5000", _backend.recursive_tot, (v, 3)),
        ("within pairwise n=400", _backend.within_pairwise, (X, lab)),
        ("within centroid n=400", _backend.within_centroid, (X, lab, 6)),
        ("linkage average 150 pts / 20 clusters", _backend.linkage_matrix, (D, lab150, 20, 1)),
    ]


def best(fn, args, impl, repeat):
    t = timeit.Timer(lambda: fn(*args, impl=impl))
    n, _ = t.autorange()
    return min(t.repeat(repeat, n)) / n


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="emit JSON rows instead of a table")
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    rows = []
    for name, fn, a in cases(np.random.default_rng(0)):
        py_out, cy_out = fn(*a, impl=_pykernels), fn(*a, impl=_kernels)
        equal = bool(np.array_equal(py_out, cy_out, equal_nan=True))
        tp, tc = best(fn, a, _pykernels, args.repeat), best(fn, a, _kernels, args.repeat)
        rows.append({"kernel": name, "python_s": tp, "cython_s": tc, "speedup": tp / tc, "bitwise_equal": equal})
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'kernel':40} {'python':>11} {'cython':>11} {'speedup':>8}  equal")
        for r in rows:
            print(f"{r['kernel']:40} {r['python_s'] * 1e3:9.3f}ms {r['cython_s'] * 1e3:9.3f}ms "
                  f"{r['speedup']:7.1f}x  {r['bitwise_equal']}")
    return 0 if all(r["bitwise_equal"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
