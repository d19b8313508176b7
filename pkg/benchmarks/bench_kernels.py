"""Time the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Prints one line per kernel
with the per-call time of each backend, the speed-up and the largest
difference between the two results.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from whitham_kdv import _pykernels

try:
    from whitham_kdv import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _cases(n_points: int):
    rng = np.random.default_rng(0)
    ms = rng.uniform(0.0, 0.999, 200)
    z = rng.uniform(-20.0, 20.0, n_points)
    m = 0.7
    K = _pykernels.agm_ke(m)[0]
    return [
        ("agm_ke x200", lambda mod: [mod.agm_ke(float(x)) for x in ms]),
        ("ellipk x200", lambda mod: [mod.ellipk(float(x)) for x in ms]),
        (f"cn_array n={n_points}", lambda mod: mod.cn_array(z, m, K)),
        (f"theta3_derivs n={n_points}", lambda mod: mod.theta3_derivs(z, 0.8, 8)),
    ]


def _max_diff(a, b) -> float:
    fa = np.concatenate([np.ravel(np.asarray(x, dtype=float)) for x in (a if isinstance(a, (list, tuple)) else [a])])
    fb = np.concatenate([np.ravel(np.asarray(x, dtype=float)) for x in (b if isinstance(b, (list, tuple)) else [b])])
    return float(np.max(np.abs(fa - fb)))


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':<26}{'python [ms]':>12}{'cython [ms]':>13}{'speed-up':>10}{'max diff':>11}")
    for name, fn in _cases(args.points):
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:<26}{tp:12.3f}{'-':>13}{'-':>10}{'-':>11}")
            continue
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        diff = _max_diff(fn(_pykernels), fn(_ckernels))
        print(f"{name:<26}{tp:12.3f}{tc:13.3f}{tp / tc:10.1f}{diff:11.1e}")


if __name__ == "__main__":
    main()
