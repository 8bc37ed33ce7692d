"""Timing comparison between the compiled kernels and the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from sogym.kernels import compiled, fallback


def time_call(fn, *args, repeat=20, **kwargs):
    fn(*args, **kwargs)  # warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=20, help="timing repetitions")
    args = parser.parse_args()

    backend = compiled
    if backend is None:
        print("compiled backend unavailable; timing the fallback against itself")
        backend = fallback

    rng = np.random.default_rng(0)
    bar = dict(
        x0=0.7, y0=0.6, length=0.55, cos_t=0.8, sin_t=0.6, ta=0.02, tb=0.04
    )
    grids = {"50x50": (50, 50), "100x100": (100, 100)}
    phi = rng.uniform(-0.05, 0.05, size=(101, 101))
    solid = rng.random((100, 100)) < 0.45
    seeds = np.array([[0, 50], [0, 51]])
    targets = np.zeros((100, 100), dtype=bool)
    targets[-1, :] = True
    pts_x = rng.uniform(0, 2, 2000)
    pts_y = rng.uniform(0, 2, 2000)

    rows = []
    for label, (nx, ny) in grids.items():
        rows.append(
            (
                f"tdf_grid {label}",
                time_call(fallback.tdf_grid, **bar, nx=nx, ny=ny, spacing=0.02, repeat=args.repeat),
                time_call(backend.tdf_grid, **bar, nx=nx, ny=ny, spacing=0.02, repeat=args.repeat),
            )
        )
    rows.append(
        (
            "tdf_points 2000",
            time_call(fallback.tdf_points, **bar, xs=pts_x, ys=pts_y, repeat=args.repeat),
            time_call(backend.tdf_points, **bar, xs=pts_x, ys=pts_y, repeat=args.repeat),
        )
    )
    rows.append(
        (
            "heaviside 101x101",
            time_call(fallback.heaviside, phi, 1e-2, 1e-9, repeat=args.repeat),
            time_call(backend.heaviside, phi, 1e-2, 1e-9, repeat=args.repeat),
        )
    )
    rows.append(
        (
            "flood search 100x100",
            time_call(fallback.grid_connected, solid, seeds, targets, repeat=args.repeat),
            time_call(backend.grid_connected, solid, seeds, targets, repeat=args.repeat),
        )
    )

    print(f"{'kernel':<22}{'numpy':>12}{'compiled':>12}{'speedup':>10}")
    for name, t_py, t_c in rows:
        print(f"{name:<22}{t_py * 1e6:>10.0f}us{t_c * 1e6:>10.0f}us{t_py / t_c:>9.1f}x")
    print("(the active backend picks the winner per kernel; see sogym.kernels)")


if __name__ == "__main__":
    main()
