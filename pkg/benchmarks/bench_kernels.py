"""Compare the compiled and pure-Python characteristic kernels.

    python3 benchmarks/bench_kernels.py [--steps 2000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

import dkpeig._kernels as kernels
from dkpeig._kernels import python_backend
from dkpeig.characteristics import ForceField
from dkpeig.spectral import Grid2D, PotentialSpec, sample_potential


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    grid = Grid2D(256, 12.0)
    tables = ForceField(sample_potential(PotentialSpec.gaussian(0.1, 1.0), grid)).tables
    rng = np.random.default_rng(0)
    xs = rng.uniform(-10, 10, args.points)
    ys = rng.uniform(-10, 10, args.points)
    h = -10.0 / args.steps

    cases = {
        "rk4_bicubic": lambda mod: mod.rk4_bicubic(tables, grid.L, 0.3, 0.5, 0.0, h, args.steps),
        "bicubic_eval_many": lambda mod: mod.bicubic_eval_many(tables, grid.L, xs, ys),
    }
    print(f"compiled backend in use: {kernels.BACKEND}")
    for name, fn in cases.items():
        ref = fn(python_backend)
        out = fn(kernels)
        diff = max(float(np.abs(np.asarray(a) - np.asarray(b)).max()) for a, b in zip(ref[:2], out[:2]))
        t_py = min(timeit.repeat(lambda: fn(python_backend), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: fn(kernels), number=1, repeat=args.repeat))
        print(
            f"{name:18s} python {t_py * 1e3:9.2f} ms   {kernels.BACKEND} {t_c * 1e3:8.3f} ms"
            f"   speedup {t_py / t_c:7.1f}x   max diff {diff:.1e}"
        )


if __name__ == "__main__":
    main()
