"""Compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best wall time per kernel and backend and the largest entrywise
difference between the two results.
"""

import argparse
import math
import time

import numpy as np

from cstar_comp import _fallback

try:
    from cstar_comp import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases():
    s = math.sqrt(2.0)
    yield "power_table 256x2048 (|a|=0.71)", "power_table", (s, 1.0, 256, 2048)
    yield "power_table 64x20000 (|a|=0.99)", "power_table", (7.089, 7.018, 64, 20000)
    rng = np.random.default_rng(0)
    c = rng.normal(size=1300) + 1j * rng.normal(size=1300)
    z = np.exp(2j * np.pi * rng.uniform(size=65536))
    yield "horner deg 1300 at 65536 points", "horner", (c, z)


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'case':<36} {'numpy [s]':>10} {'cython [s]':>10} {'speedup':>8} {'max diff':>10}")
    for label, name, a in cases():
        tp, ref = best_of(lambda: getattr(_fallback, name)(*a), args.repeat)
        if _kernels is None:
            print(f"{label:<36} {tp:>10.4f}")
            continue
        tc, out = best_of(lambda: getattr(_kernels, name)(*a), args.repeat)
        if name == "power_table":
            ref, out = ref[0], out[0]
        diff = float(np.abs(ref - out).max())
        print(f"{label:<36} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
