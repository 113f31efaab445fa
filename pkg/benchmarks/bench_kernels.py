"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--no-end-to-end]

Part one times each kernel pair directly on random int64 arrays and checks
that both return the same result.  Part two runs one colored Jones
computation in fresh interpreters with AJT_NUMBA=1 and AJT_NUMBA=0.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from ajt import _kernels as K


def kernel_cases(rng):
    a = rng.integers(-50, 50, 4000, dtype=np.int64)
    b = rng.integers(-50, 50, 3000, dtype=np.int64)
    q = rng.integers(-9, 9, 200_000, dtype=np.int64)
    divisible = np.convolve(q, np.r_[-1, np.zeros(11, dtype=np.int64), 1])
    counts = rng.integers(1, 400, 2000, dtype=np.int64)
    tops = 4 * counts + rng.integers(0, 1000, 2000, dtype=np.int64)
    signs = rng.choice(np.array([-1, 1], dtype=np.int64), 2000)
    size = int(tops.max()) + 1
    long = rng.integers(-9, 9, 1_000_000, dtype=np.int64)
    return {
        "convolve 4000x3000": (lambda f: f(a, b), "convolve"),
        "div_binomial n=2e5 d=12": (lambda f: f(divisible, 12, 1), "div_binomial"),
        "add_brackets 2000 runs": (lambda f: f(np.zeros(size, dtype=np.int64), tops, counts, signs),
                                   "add_brackets"),
        "alt_sum n=1e6": (lambda f: f(long, False), "alt_sum"),
    }


def same(x, y):
    if isinstance(x, tuple):
        return all(np.array_equal(u, v) for u, v in zip(x, y))
    if isinstance(x, np.ndarray):
        return np.array_equal(x, y)
    return x == y


def bench_kernels(repeat):
    if not K.HAS_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}{'numba ms':>10}{'numpy ms':>10}{'speedup':>9}  equal")
    for label, (call, name) in kernel_cases(rng).items():
        nb, npf = getattr(K, name + "_nb"), getattr(K, name + "_np")
        call(nb)  # compile
        t_nb = min(timeit.repeat(lambda: call(nb), number=1, repeat=repeat))
        t_np = min(timeit.repeat(lambda: call(npf), number=1, repeat=repeat))
        print(f"{label:<26}{1e3 * t_nb:>10.2f}{1e3 * t_np:>10.2f}{t_np / t_nb:>8.1f}x  {same(call(nb), call(npf))}")


SNIPPET = """
import hashlib, time
from ajt.jones import CableParams, clear_cache, colored_jones
K = CableParams(4, 3, 37, 3).knot
colored_jones(K, 5)  # load or compile the kernels
clear_cache()
t = time.perf_counter()
v = colored_jones(K, 60)
print(time.perf_counter() - t, v.nterms, hashlib.sha256(str(v).encode()).hexdigest()[:12])
"""


def bench_end_to_end():
    print("\ncolored_jones(C(4,3;37,3), 60) in a fresh interpreter, after warm-up")
    for flag in ("1", "0"):
        env = dict(os.environ, AJT_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
        secs, nterms, digest = out.stdout.split()
        backend = "numba" if flag == "1" else "numpy"
        print(f"  {backend:<6} {float(secs):8.2f} s  terms={nterms} digest={digest}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-end-to-end", action="store_true")
    args = ap.parse_args()
    print(f"active backend: {K.BACKEND}")
    bench_kernels(args.repeat)
    if not args.no_end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
