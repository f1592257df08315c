"""Benchmark the numba kernels against the pure-numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Both implementations are
imported directly, so the comparison does not depend on SOCO_DISABLE_NUMBA;
set that flag only to force the whole library onto the fallback path.
"""

import time

import numpy as np

from soco import _kernels


def _time(fn, *args, repeat=5):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_admm(rng):
    d = 50
    groups = [np.arange(5 * i - 5, 5 * i + 5) for i in range(1, 10)]
    group_idx = np.concatenate(groups)
    group_start = np.cumsum([0] + [len(g) for g in groups]).astype(np.int64)
    counts = np.zeros(d)
    np.add.at(counts, group_idx, 1.0)
    r = rng.normal(size=d)
    lo, hi = np.full(d, -1e7), np.full(d, 1e7)
    args = (r, 1.5, 0.8, lo, hi, group_start, group_idx, counts, 1.0, 1e-10, 100_000)
    t_py, out_py = _time(_kernels._admm_group_prox_py, *args)
    t_nb, out_nb = _time(_kernels._admm_group_prox_impl, *args)
    assert np.allclose(out_py[0], out_nb[0], atol=1e-12)
    return "admm_group_prox (d=50, 9 groups)", t_py, t_nb


def bench_sweep(rng):
    n, d = 300, 2
    x_prev = rng.normal(size=(n, d))
    grads = rng.normal(size=(n, d))
    x0 = rng.normal(size=d)
    lo, hi = np.full(d, -1e6), np.full(d, 1e6)
    args = (x_prev, x0, grads, lo, hi, 1.0, 1.0)
    t_py, out_py = _time(_kernels._rhapd_s_sweep_py, *args, repeat=50)
    t_nb, out_nb = _time(_kernels._rhapd_s_sweep, *args, repeat=50)
    assert np.array_equal(out_py, out_nb)
    return "rhapd_s_sweep (N=300, d=2)", t_py, t_nb


def bench_tracking_am(rng):
    n, d = 100, 1
    u = rng.normal(size=(n, d))
    x0 = rng.normal(size=d)
    lo, hi = np.full(d, -1e6), np.full(d, 1e6)
    init = u.copy()
    t_py, out_py = _time(_kernels._tracking_am_solve_py,
                         u, x0, lo, hi, 25.0, init.copy(), 1e-12, 1_000_000,
                         repeat=3)
    t_nb, out_nb = _time(_kernels._tracking_am_solve,
                         u, x0, lo, hi, 25.0, init.copy(), 1e-12, 1_000_000,
                         repeat=3)
    assert np.array_equal(out_py[0], out_nb[0])
    return "tracking_am_solve (N=100, gamma=25)", t_py, t_nb


def main():
    if not _kernels.USE_NUMBA:
        print("note: SOCO_DISABLE_NUMBA is set; the 'numba' column below is "
              "the pure-python fallback too")
    rng = np.random.default_rng(0)
    rows = [bench_admm(rng), bench_sweep(rng), bench_tracking_am(rng)]
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy (ms)':>12}  {'numba (ms)':>12}  {'speedup':>8}")
    for name, t_py, t_nb in rows:
        print(f"{name:<{width}}  {t_py * 1e3:>12.3f}  {t_nb * 1e3:>12.3f}  "
              f"{t_py / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
