"""Shared oracle helpers for the test suite.

Everything here is implemented independently of the library's own code
paths (brute-force or closed-form references) so the tests compare two
genuinely different routes to the same quantity.
"""

import numpy as np
import pytest

from soco.costs import (GroupLassoCost, LassoCost, QuadraticSwitch,
                        SumSquaredSwitch, TrackingCost)
from soco.problem import FeasibleBox, ProblemInstance

INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(fn, lo, hi, tol=1e-12, max_iter=500):
    """Minimize a scalar unimodal function over [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def prox_oracle_1d(cost, tau, v, lo, hi):
    """Brute-force prox_{tau f + box}(v) for a 1-d stage cost."""
    def fn(x):
        return cost.value(np.array([x])) + (x - v) ** 2 / (2.0 * tau)
    return golden_section(fn, lo, hi)


def brute_objective(stage_costs, switching, x0, traj):
    """Independent evaluation of J along a trajectory."""
    total = 0.0
    prev = np.asarray(x0, dtype=float)
    for t, c in enumerate(stage_costs):
        xt = np.asarray(traj[t], dtype=float)
        total += c.value(xt) + switching.value(xt, prev)
        prev = xt
    return total


def finite_diff_gradient(fn, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return g


def single_group_prox_closed_form(u, tau, v, w_groups=1):
    """Closed-form prox of 0.5||x-u||^2 + ||x||_2 (single group, no box):
    prox solves min (q/2)||x-r||^2 + w||x|| with q = tau+1, w = tau,
    r = (tau u + v)/q; solution r * max(0, 1 - w/(q||r||))."""
    q = tau + 1.0
    w = tau
    r = (tau * u + v) / q
    nr = np.linalg.norm(r)
    if q * nr <= w:
        return np.zeros_like(r)
    return r * (1.0 - w / (q * nr))


def random_instance(rng, family="tracking", switch="quadratic",
                    d=None, n=None, w=None, gamma=None, box_half=None):
    """Small random instance for twin/audit tests."""
    d = d if d is not None else int(rng.integers(1, 4))
    n = n if n is not None else int(rng.integers(3, 16))
    w = w if w is not None else int(rng.integers(1, min(n, 6) + 1))
    w = min(w, n)
    gamma = gamma if gamma is not None else float(rng.uniform(0.3, 4.0))
    box_half = box_half if box_half is not None else float(rng.uniform(2.0, 20.0))
    box = FeasibleBox.interval(-box_half, box_half, d)
    if family == "tracking":
        costs = [TrackingCost(rng.normal(0.0, 2.0, d)) for _ in range(n)]
    elif family == "lasso":
        costs = [LassoCost(rng.normal(0.0, 2.0, (int(rng.integers(1, 4)), d)),
                           lam=float(rng.uniform(0.1, 2.0)))
                 for _ in range(n)]
    elif family == "group":
        k = max(1, d // 2)
        groups = [rng.choice(d, size=min(d, 2), replace=False) for _ in range(k)]
        costs = [GroupLassoCost(rng.normal(0.0, 2.0, d), groups) for _ in range(n)]
    else:
        raise ValueError(family)
    if switch == "quadratic":
        sw = QuadraticSwitch(gamma)
    else:
        sw = SumSquaredSwitch(gamma, d)
    x0 = box.project(rng.normal(0.0, 1.0, d))
    return ProblemInstance(costs, sw, box, x0, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
