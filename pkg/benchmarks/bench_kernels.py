"""Compare the numba and numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

The first numba call in a process includes loading (or compiling) the cached
machine code; it is reported separately as "first".
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from portrait_lab import kernels
from portrait_lab.census import _reduction_matrix
from portrait_lab.combinat import _admissible_table, _perm_table


def _time(fn, repeat: int) -> tuple[float, float]:
    t = time.perf_counter()
    first = fn()
    first_s = time.perf_counter() - t
    best = first_s
    for _ in range(repeat - 1):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
        assert np.array_equal(np.asarray(out[0] if isinstance(out, tuple) else out),
                              np.asarray(first[0] if isinstance(first, tuple) else first))
    return first_s, best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cases = []
    for n, d in ((4, 2), (5, 3), (6, 3)):
        maps, perms = _admissible_table(n, d), _perm_table(n)
        cases.append((f"min_conjugate n={n} d={d}",
                      lambda use, m=maps, p=perms: kernels.min_conjugate_codes(m, p, numba=use)))
    for n in (6, 7, 8):
        red = _reduction_matrix(n)
        cases.append((f"census n={n}", lambda use, n=n, r=red: kernels.census_degrees(n, r, numba=use)))

    print(f"{'kernel':28} {'numpy s':>10} {'numba first':>12} {'numba s':>10} {'speedup':>8}")
    for name, fn in cases:
        _, np_best = _time(lambda: fn(False), args.repeat)
        nb_first, nb_best = _time(lambda: fn(True), args.repeat)
        print(f"{name:28} {np_best:10.3f} {nb_first:12.3f} {nb_best:10.3f} {np_best / nb_best:8.1f}")


if __name__ == "__main__":
    main()
