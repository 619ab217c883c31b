"""Compare the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--size 52] [--repeat 5]
"""

import argparse
import time

import numpy as np

from tepmon._kernels import BACKEND, pure

try:
    from tepmon._kernels import _native
except ImportError:
    _native = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=52)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    A = rng.normal(size=(args.size, args.size))
    S = (A + A.T) / 2
    X = rng.normal(size=(2000, args.size))
    P = np.linalg.qr(rng.normal(size=(args.size, args.size // 2)))[0]
    lam = np.linspace(5.0, 0.5, args.size // 2)

    print(f"selected backend: {BACKEND}")
    print(f"matrix size: {args.size}x{args.size}, batch rows: {X.shape[0]}")
    rows = []
    rows.append(("jacobi_eigh pure", _time(lambda: pure.jacobi_eigh(S), args.repeat)))
    if _native is not None:
        rows.append(
            ("jacobi_eigh native", _time(lambda: _native.jacobi_eigh(S), args.repeat))
        )
    rows.append(
        ("t2_batch pure", _time(lambda: pure.t2_batch(X, P, lam), args.repeat))
    )
    if _native is not None:
        rows.append(
            ("t2_batch native", _time(lambda: _native.t2_batch(X, P, lam), args.repeat))
        )
    for name, seconds in rows:
        print(f"{name:22s} {seconds * 1e3:10.3f} ms")
    if _native is not None:
        pure_eig = dict(rows)["jacobi_eigh pure"]
        native_eig = dict(rows)["jacobi_eigh native"]
        print(f"eigensolver speedup: {pure_eig / native_eig:.1f}x")
    else:
        print("compiled extension unavailable; pure fallback only")


if __name__ == "__main__":
    main()
