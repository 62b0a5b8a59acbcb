"""Time the compiled kernels against their numpy forms.

Run with ``python3 benchmarks/bench_kernels.py``. The numba forms are compiled
once before timing; both forms are checked to agree before timing starts.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from twointerval import _accel, kernels
from twointerval.gaussian_core import CovarianceKind, Geometry, build_covariance
from twointerval.symbol import from_step


def ladder_case(size: int):
    k = size // 2 - 1
    geo = Geometry(k, size - k - 2, 4 * size)
    cov = build_covariance(from_step(np.pi / 3), geo, CovarianceKind.NEGATIVITY)
    return np.ascontiguousarray(cov.entries + 2j * np.eye(cov.size))


def roots_case(points: int, levels: int):
    rng = np.random.default_rng(7)
    energies = rng.uniform(-2.0, 2.0, points)
    poles = np.sort(rng.uniform(-1.0, 3.0, levels)) + np.arange(levels) * 1e-3
    c2 = rng.uniform(1e-3, 1e-2, levels)
    return energies, poles, c2


def bench(label: str, fn_loop, fn_numpy, args, number: int) -> None:
    ref = fn_numpy(*args)
    got = fn_loop(*args)
    if isinstance(ref, tuple):
        ref, got = ref[0], got[0]
    diff = np.max(np.abs(np.asarray(ref) - np.asarray(got)))
    t_loop = min(timeit.repeat(lambda: fn_loop(*args), number=number, repeat=3)) / number
    t_np = min(timeit.repeat(lambda: fn_numpy(*args), number=number, repeat=3)) / number
    print(f"{label:<28} compiled {t_loop * 1e3:9.3f} ms  numpy {t_np * 1e3:9.3f} ms"
          f"  speedup {t_np / t_loop:6.1f}x  max|diff| {diff:.1e}")


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--number", type=int, default=20)
    args = parser.parse_args(argv)
    if not _accel.NUMBA_ENABLED:
        print("numba disabled: both columns time the numpy forms")
        loop_ladder, loop_roots = kernels.lu_ladder_numpy, kernels.dispersion_roots_numpy
    else:
        loop_ladder, loop_roots = kernels.lu_ladder_jit, kernels.dispersion_roots_jit
    for size in (34, 66, 130):
        bench(f"lu_ladder N={size}", loop_ladder, kernels.lu_ladder_numpy,
              (ladder_case(size), 1e-13), args.number)
    for points, levels in ((256, 8), (1024, 64)):
        bench(f"dispersion_roots {points}x{levels}", loop_roots,
              kernels.dispersion_roots_numpy, roots_case(points, levels), args.number)


if __name__ == "__main__":
    main()
