"""Compare the numba and numpy row-reduction kernels on random matrices mod p.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from rectdecomp import _kernels as K

SIZES = [(4, 4), (8, 8), (16, 16), (32, 32), (64, 64), (128, 96)]
PRIMES = [2, 5, 10007]


def timed(fn, mats, p, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for a in mats:
            fn(a, p)
        best = min(best, time.perf_counter() - start)
    return best / len(mats)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--count", type=int, default=20, help="matrices per size")
    args = parser.parse_args()
    if K.rref_numba is None:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(0)
    K.rref_numba(np.eye(2, dtype=np.int64), 2)  # compile outside the timings
    print(f"{'shape':>10} {'p':>6} {'numpy us':>10} {'numba us':>10} {'speedup':>8}")
    for shape in SIZES:
        for p in PRIMES:
            mats = [rng.integers(0, p, size=shape) for _ in range(args.count)]
            for a in mats:
                r1, p1 = K.rref_numpy(a, p)
                r2, p2 = K.rref_numba(a, p)
                assert np.array_equal(r1, r2) and np.array_equal(p1, p2)
            t_np = timed(K.rref_numpy, mats, p, args.repeat)
            t_nb = timed(K.rref_numba, mats, p, args.repeat)
            print(f"{shape[0]:>4}x{shape[1]:<5} {p:>6} {t_np * 1e6:>10.1f} {t_nb * 1e6:>10.1f} {t_np / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
