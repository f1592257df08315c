"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The fallback is selected by setting the environment variable
``SOCO_DISABLE_NUMBA=1`` before import (or automatically when numba is not
importable).  Both paths implement the same contract and are compared in
``benchmarks/bench_kernels.py`` and in the test suite.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("SOCO_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _admm_group_prox_py(r, q, w, lo, hi, group_start, group_idx, counts, rho, tol, max_iter):
    """Pure-numpy ADMM for min (q/2)|x-r|^2 + w*sum_i |x_{G_i}| + box indicator.

    Variable splitting with one copy z_i per group, scaled dual y_i.
    Returns (x, iterations, primal_res, dual_res).
    """
    d = r.shape[0]
    n_groups = group_start.shape[0] - 1
    total = group_idx.shape[0]
    z = np.zeros(total)
    y = np.zeros(total)
    x = np.clip(r, lo, hi)
    denom = q + rho * counts
    shrink = w / rho
    for it in range(1, max_iter + 1):
        # x-update: separable quadratic over the box
        acc = np.zeros(d)
        np.add.at(acc, group_idx, z - y)
        x = np.clip((q * r + rho * acc) / denom, lo, hi)
        # z-update: per-group block soft threshold
        xg = x[group_idx]
        z_prev = z.copy()
        z = np.empty(total)
        for i in range(n_groups):
            s, e = group_start[i], group_start[i + 1]
            v = xg[s:e] + y[s:e]
            nv = np.sqrt(np.sum(v * v))
            z[s:e] = 0.0 if nv <= shrink else v * (1.0 - shrink / nv)
        # dual update and residuals
        y += xg - z
        primal = np.sqrt(np.sum((xg - z) ** 2))
        dacc = np.zeros(d)
        np.add.at(dacc, group_idx, z - z_prev)
        dual = rho * np.sqrt(np.sum(dacc * dacc))
        if primal < tol and dual < tol:
            return x, it, primal, dual
    return x, max_iter, primal, dual


def _admm_group_prox_loop(r, q, w, lo, hi, group_start, group_idx, counts, rho, tol, max_iter):
    # Loop-style twin of _admm_group_prox_py, written for numba nopython mode.
    d = r.shape[0]
    n_groups = group_start.shape[0] - 1
    total = group_idx.shape[0]
    z = np.zeros(total)
    y = np.zeros(total)
    z_prev = np.zeros(total)
    x = np.empty(d)
    shrink = w / rho
    primal = np.inf
    dual = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        acc = np.zeros(d)
        for j in range(total):
            acc[group_idx[j]] += z[j] - y[j]
        for j in range(d):
            v = (q * r[j] + rho * acc[j]) / (q + rho * counts[j])
            if v < lo[j]:
                v = lo[j]
            elif v > hi[j]:
                v = hi[j]
            x[j] = v
        for j in range(total):
            z_prev[j] = z[j]
        primal_sq = 0.0
        for i in range(n_groups):
            s = group_start[i]
            e = group_start[i + 1]
            nv = 0.0
            for j in range(s, e):
                vj = x[group_idx[j]] + y[j]
                nv += vj * vj
            nv = np.sqrt(nv)
            scale = 0.0 if nv <= shrink else 1.0 - shrink / nv
            for j in range(s, e):
                vj = x[group_idx[j]] + y[j]
                z[j] = vj * scale
                res = x[group_idx[j]] - z[j]
                y[j] += res
                primal_sq += res * res
        primal = np.sqrt(primal_sq)
        dacc = np.zeros(d)
        for j in range(total):
            dacc[group_idx[j]] += z[j] - z_prev[j]
        dual_sq = 0.0
        for j in range(d):
            dual_sq += dacc[j] * dacc[j]
        dual = rho * np.sqrt(dual_sq)
        if primal < tol and dual < tol:
            return x, it, primal, dual
    return x, max_iter, primal, dual


def _rhapd_s_sweep_py(x_prev, x0, grads, lo, hi, gamma, tau):
    """One Gauss-Seidel layer of the closed-form projected updates.

    ``x_prev`` is layer k-1 (N, d), ``grads`` holds the stage gradients
    evaluated at layer k-1.  Returns layer k.
    """
    n = x_prev.shape[0]
    out = np.empty_like(x_prev)
    left = x0
    for t in range(n):
        if t < n - 1:
            num = gamma * tau * (left + x_prev[t + 1]) + x_prev[t] - tau * grads[t]
            den = 2.0 * gamma * tau + 1.0
        else:
            num = gamma * tau * left + x_prev[t] - tau * grads[t]
            den = gamma * tau + 1.0
        out[t] = np.minimum(np.maximum(num / den, lo), hi)
        left = out[t]
    return out


def _tracking_am_solve_py(u, x0, lo, hi, gamma, x, tol, max_sweeps):
    """Alternating-minimization sweeps for tracking stage costs with a
    quadratic switching cost, run until the relative objective decrease
    drops below ``tol``.

    ``u`` has shape (N, d); ``x`` is the (mutated) starting trajectory.
    Returns (x, objective, sweeps, converged_flag).
    """
    n, d = u.shape
    obj = 0.0
    for t in range(n):
        for j in range(d):
            prev = x0[j] if t == 0 else x[t - 1, j]
            df = x[t, j] - u[t, j]
            ds = x[t, j] - prev
            obj += 0.5 * df * df + 0.5 * gamma * ds * ds
    sweeps = 0
    new_obj = obj
    for sweeps in range(1, max_sweeps + 1):
        for t in range(n):
            for j in range(d):
                left = x0[j] if t == 0 else x[t - 1, j]
                if t < n - 1:
                    v = (gamma * (left + x[t + 1, j]) + u[t, j]) / (2.0 * gamma + 1.0)
                else:
                    v = (gamma * left + u[t, j]) / (gamma + 1.0)
                if v < lo[j]:
                    v = lo[j]
                elif v > hi[j]:
                    v = hi[j]
                x[t, j] = v
        new_obj = 0.0
        for t in range(n):
            for j in range(d):
                prev = x0[j] if t == 0 else x[t - 1, j]
                df = x[t, j] - u[t, j]
                ds = x[t, j] - prev
                new_obj += 0.5 * df * df + 0.5 * gamma * ds * ds
        gap = obj - new_obj
        limit = tol * (1.0 if abs(new_obj) < 1.0 else abs(new_obj))
        if gap <= limit:
            return x, new_obj, sweeps, True
        obj = new_obj
    return x, new_obj, max_sweeps, False


if USE_NUMBA:
    _admm_group_prox_impl = numba.njit(cache=True)(_admm_group_prox_loop)
    _rhapd_s_sweep = numba.njit(cache=True)(_rhapd_s_sweep_py)
    _tracking_am_solve = numba.njit(cache=True)(_tracking_am_solve_py)
else:
    _admm_group_prox_impl = _admm_group_prox_py
    _rhapd_s_sweep = _rhapd_s_sweep_py
    _tracking_am_solve = _tracking_am_solve_py


def admm_group_prox_kernel(r, q, w, lo, hi, group_start, group_idx, counts,
                           rho=1.0, tol=1e-10, max_iter=100_000):
    r = np.ascontiguousarray(r, dtype=np.float64)
    return _admm_group_prox_impl(
        r, float(q), float(w),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
        np.ascontiguousarray(group_start, dtype=np.int64),
        np.ascontiguousarray(group_idx, dtype=np.int64),
        np.ascontiguousarray(counts, dtype=np.float64),
        float(rho), float(tol), int(max_iter),
    )


def rhapd_s_sweep(x_prev, x0, grads, lo, hi, gamma, tau):
    return _rhapd_s_sweep(
        np.ascontiguousarray(x_prev, dtype=np.float64),
        np.ascontiguousarray(x0, dtype=np.float64),
        np.ascontiguousarray(grads, dtype=np.float64),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
        float(gamma), float(tau),
    )


def tracking_am_solve(u, x0, lo, hi, gamma, x_init, tol, max_sweeps):
    x = np.ascontiguousarray(x_init, dtype=np.float64).copy()
    return _tracking_am_solve(
        np.ascontiguousarray(u, dtype=np.float64),
        np.ascontiguousarray(x0, dtype=np.float64),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
        float(gamma), x, float(tol), int(max_sweeps),
    )
