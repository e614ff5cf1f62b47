"""Time the numpy and compiled kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--px 400] [--repeat 3]

Prints one row per kernel with best-of-N wall times and the speedup, and
checks that both backends return identical arrays.
"""
import argparse
import time

import numpy as np

from dlimit import PowerPoly, escape_radius
from dlimit.kernels import backend
from dlimit.raster import GridSpec, family_kind


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(px):
    g = GridSpec.square(1.6, px)
    z = g.centers().reshape(-1)
    zr, zi = np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag)
    f = PowerPoly(10, 0.5)
    kind, radius = family_kind(f), escape_radius(f)
    size = z.size
    c_r, c_i = np.full(size, 0.5), np.zeros(size)
    zeros = np.zeros(size)
    rng = np.random.default_rng(0)
    mask = rng.random((px, px)) < 0.01
    return {
        "escape_steps": lambda k: k.escape_steps(kind, zr, zi, c_r, c_i, zeros, zeros, 10, 10.0,
                                                 radius, 256, threads=1),
        "cell_undecided": lambda k: k.cell_undecided(kind, zr, zi, 0.5 * g.cell_diag, 0.5, 0.0, 0.0, 0.0,
                                                     10, 10.0, radius, 256, threads=1),
        "edt_sq": lambda k: k.edt_sq(mask, threads=1),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--px", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    py = backend("numpy")
    try:
        cy = backend("cython")
    except ImportError:
        cy = None
        print("compiled extension not built; timing numpy only")
    print(f"grid {args.px}x{args.px}, best of {args.repeat}")
    print(f"{'kernel':<16}{'numpy s':>10}{'cython s':>10}{'speedup':>9}  equal")
    for name, run in cases(args.px).items():
        tp, out_p = best_of(lambda: run(py), args.repeat)
        if cy is None:
            print(f"{name:<16}{tp:>10.4f}")
            continue
        tc, out_c = best_of(lambda: run(cy), args.repeat)
        same = np.array_equal(np.asarray(out_p), np.asarray(out_c))
        print(f"{name:<16}{tp:>10.4f}{tc:>10.4f}{tp / tc:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
