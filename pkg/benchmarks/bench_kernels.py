"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best of ``--repeat`` runs after one warm-up call
(the warm-up also triggers numba compilation).
"""

import argparse
import time

import numpy as np

from degprobe import kernels
from degprobe.gf2 import subspace_array


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(rng):
    tt16 = rng.integers(0, 2, 1 << 16, dtype=np.uint8)
    tt8 = rng.integers(0, 2, 256, dtype=np.uint8)
    tt5 = rng.integers(0, 2, 32, dtype=np.uint8)
    b83, m83 = subspace_array(8, 3)
    b84, _ = subspace_array(8, 4)
    tuples = rng.integers(0, 256, size=(1_000_000, 4), dtype=np.int64)
    yield "moebius n=16", lambda f: f(tt16.copy(), 16), kernels.numba_moebius, kernels.numpy_moebius
    yield (
        "affine sums n=8 k=3",
        lambda f: f(tt8, b83, m83, 8, 3),
        kernels.numba_affine_failures,
        kernels.numpy_affine_failures,
    )
    yield "linear sums n=8 k=4", lambda f: f(tt8, b84, 4), kernels.numba_linear_failures, kernels.numpy_linear_failures
    yield "all tuples n=5 k=3", lambda f: f(tt5, 5, 3), kernels.numba_tuple_failures, kernels.numpy_tuple_failures
    yield (
        "1e6 sampled tuples k=3",
        lambda f: f(tt8, tuples, 3),
        kernels.numba_sample_failures,
        kernels.numpy_sample_failures,
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<26}{'numba ms':>12}{'numpy ms':>12}{'ratio':>9}")
    for name, call, fast, slow in cases(rng):
        assert np.array_equal(call(fast), call(slow)), name
        a = best_of(lambda: call(fast), args.repeat)
        b = best_of(lambda: call(slow), args.repeat)
        print(f"{name:<26}{a * 1e3:>12.2f}{b * 1e3:>12.2f}{b / a:>8.1f}x")


if __name__ == "__main__":
    main()
