"""Compare the compiled and pure-Python kernels on the hot loops.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import time

import numpy as np

from areabilliard import _pykernels
from areabilliard.geometry import house_pentagon, regular_polygon, unit_square

try:
    from areabilliard import _kernels
except ImportError:  # not built
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    polys = {"square": unit_square(), "regular-12": regular_polygon(12), "house-pentagon": house_pentagon()}
    print(f"{'polygon':<16}{'kernel':<20}{'python s':>10}{'cython s':>10}{'speedup':>9}  same")
    for name, poly in polys.items():
        A = 0.3 * poly.area
        svals = np.linspace(0, 1, 257)
        cases = {
            f"lift x{args.steps}": (
                lambda k, d: k.lift_iterate(*d, A, 0.123, args.steps)
            ),
            "grid 257 x q=40": (
                lambda k, d: np.asarray(k.displacement_grid(*d, A, svals, 12, 40))
            ),
        }
        for label, fn in cases.items():
            t_py, r_py = best_of(lambda: fn(_pykernels, poly.kernel_args("python")), args.repeat)
            if _kernels is None:
                print(f"{name:<16}{label:<20}{t_py:>10.4f}{'-':>10}{'-':>9}  -")
                continue
            t_cy, r_cy = best_of(lambda: fn(_kernels, poly.kernel_args("cython")), args.repeat)
            same = np.array_equal(np.asarray(r_py), np.asarray(r_cy))
            print(f"{name:<16}{label:<20}{t_py:>10.4f}{t_cy:>10.4f}{t_py / t_cy:>8.0f}x  {same}")


if __name__ == "__main__":
    main()
