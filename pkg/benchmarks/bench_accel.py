"""Timing comparison of the numba and numpy backends for the hot kernels.

Runs each kernel under both backends on identical inputs, checks that the
results agree, and reports wall times and the speedup.  Backend selection
goes through vexint._accel.set_backend, the same switch the VEXINT_ACCEL
environment variable drives at import time.

    python benchmarks/bench_accel.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vexint import _accel, build_exponent, luxemburg_norm, make_grid


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def compare(label: str, fn, repeats: int) -> None:
    if not _accel.HAS_NUMBA:
        _accel.set_backend("numpy")
        print(f"{label:<38s} numpy {best_of(fn, repeats) * 1e3:9.2f} ms "
              "(numba unavailable)")
        return
    _accel.set_backend("numba")
    fn()  # compile outside the timed region
    got_numba = fn()
    t_numba = best_of(fn, repeats)
    _accel.set_backend("numpy")
    got_numpy = fn()
    t_numpy = best_of(fn, repeats)
    dev = float(np.max(np.abs(np.asarray(got_numba) - np.asarray(got_numpy))))
    print(f"{label:<38s} numba {t_numba * 1e3:9.2f} ms   "
          f"numpy {t_numpy * 1e3:9.2f} ms   "
          f"speedup {t_numpy / t_numba:6.1f}x   max dev {dev:.2e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(7)

    g1 = rng.standard_normal(8192)
    compare("offset_abs_max_1d (N=8192)",
            lambda: _accel.offset_abs_max_1d(g1), args.repeats)

    g2 = rng.standard_normal((96, 96))
    compare("offset_abs_max_2d (N=96)",
            lambda: _accel.offset_abs_max_2d(g2), args.repeats)

    absf = np.abs(rng.standard_normal(1 << 20))
    p = rng.uniform(1.2, 4.0, absf.shape)
    compare("modular_pow_sum (2^20 points)",
            lambda: _accel.modular_pow_sum(absf, p, 1.7), args.repeats)

    grid = make_grid(2, 2.0, 512)
    pf = build_exponent(grid, "sine", base=2.3, amplitude=0.5, frequency=2)
    f = rng.standard_normal(grid.shape)
    compare("luxemburg_norm (512^2 grid)",
            lambda: luxemburg_norm(f, pf).value, args.repeats)

    _accel.set_backend("auto")


if __name__ == "__main__":
    main()
