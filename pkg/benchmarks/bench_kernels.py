"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from llb import _kernels_py, library
from llb.local import to_csr

try:
    from llb import _kernels
except ImportError:
    _kernels = None

P = 2147483647


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    for n in (100, 200, 400):
        A = rng.integers(-3, 4, size=(n, n)).astype(np.int64)
        yield f"rank_mod_p {n}x{n}", "rank_mod_p", (A, P)
    for n in (200, 1000, 3000):
        g = library.graph_from_edges(
            [(i, (i + 1) % n) for i in range(n)] + [(i, (i + 7) % n) for i in range(0, n, 3)]
        )
        _, indptr, indices = to_csr(g)
        yield f"shortest_cycles n={n}", "shortest_cycles", (indptr, indices, n)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'case':28s} {'fallback [s]':>13s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, fn, argv in cases():
        t_py, out_py = best_of(lambda: getattr(_kernels_py, fn)(*argv), args.repeat)
        if _kernels is None:
            print(f"{name:28s} {t_py:13.4f} {'-':>13s} {'-':>8s}")
            continue
        t_c, out_c = best_of(lambda: getattr(_kernels, fn)(*argv), args.repeat)
        assert np.array_equal(np.asarray(out_py), np.asarray(out_c)), name
        print(f"{name:28s} {t_py:13.4f} {t_c:13.4f} {t_py / t_c:8.1f}")


if __name__ == "__main__":
    main()
