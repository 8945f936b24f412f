"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both implementations are called directly, so the ``AREALSTATS_DISABLE_NUMBA``
flag does not matter here. The first numba call (compilation) is excluded.
"""
import argparse
import time
from pathlib import Path

from arealstats import _kernels, build_grid, load_structure, radius_grid, sample_csr

FIXTURE = Path(_kernels.__file__).parent / "data" / "irregular30.geojson"


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    grid = build_grid(20, 20, 1.0)
    rect = grid.region.rect.as_tuple()
    radii = radius_grid(grid).as_array()
    xy100 = sample_csr(100, grid.region, 1)
    xy1000 = sample_csr(1000, grid.region, 2)

    irr = load_structure(FIXTURE)
    irr_xy = sample_csr(60, irr.region, 3)
    irr_radii = radius_grid(irr).as_array()
    packed = irr.region.packed

    yield "nn_distances n=1000", lambda m: getattr(_kernels, f"nn_distances_{m}")(xy1000)
    yield "k_sums_rect n=100", lambda m: getattr(_kernels, f"k_sums_rect_{m}")(xy100, radii, rect)
    yield "k_sums_rect n=1000", lambda m: getattr(_kernels, f"k_sums_rect_{m}")(xy1000, radii, rect)
    yield "k_sums_region n=60", lambda m: getattr(_kernels, f"k_sums_region_{m}")(irr_xy, irr_radii, 2048, *packed)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, call in cases():
        call("numba")  # compile
        t_nb = best_of(lambda: call("numba"), args.repeat)
        t_np = best_of(lambda: call("numpy"), args.repeat)
        print(f"{name:<22}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
