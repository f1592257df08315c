"""Stage-cost and switching-cost families.

Each stage cost exposes value, (sub)gradient, prox over a box, per-stage
minimizer, and its curvature constants mu_t / l_t.  Cost records are
immutable; every operation keeps its state local to the call.
"""

import itertools

import numpy as np

from ._kernels import admm_group_prox_kernel
from .errors import ConvergenceError, DimensionMismatchError, UnsupportedCostError


def soft_threshold(v, thresh):
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def solve_box_qp(Q, c, lo, hi, tol=1e-11):
    """Minimize 0.5 x'Qx + c'x over the box, Q symmetric positive definite.

    Uses exact active-set enumeration for small dimensions (each coordinate
    free or pinned at a finite bound), otherwise projected gradient descent.
    """
    d = c.shape[0]
    states = []
    for i in range(d):
        s = [None]
        if np.isfinite(lo[i]):
            s.append(("lo", lo[i]))
        if np.isfinite(hi[i]):
            s.append(("hi", hi[i]))
        states.append(s)
    n_combos = 1
    for s in states:
        n_combos *= len(s)
        if n_combos > 20000:
            break
    if n_combos > 20000:
        return _box_qp_pg(Q, c, lo, hi)

    scale = 1.0 + np.abs(c).max() + np.abs(Q).max()
    best = None
    best_val = np.inf
    for combo in itertools.product(*states):
        fixed = [i for i, st in enumerate(combo) if st is not None]
        free = [i for i, st in enumerate(combo) if st is None]
        x = np.zeros(d)
        for i in fixed:
            x[i] = combo[i][1]
        if free:
            Qff = Q[np.ix_(free, free)]
            rhs = -c[free] - Q[np.ix_(free, fixed)] @ x[fixed] if fixed else -c[free]
            try:
                x[free] = np.linalg.solve(Qff, rhs)
            except np.linalg.LinAlgError:
                continue
        if np.any(x < lo - tol * scale) or np.any(x > hi + tol * scale):
            continue
        g = Q @ x + c
        ok = True
        for i, st in enumerate(combo):
            if st is None:
                continue
            if st[0] == "lo" and g[i] < -tol * scale:
                ok = False
                break
            if st[0] == "hi" and g[i] > tol * scale:
                ok = False
                break
        if not ok:
            continue
        val = 0.5 * x @ Q @ x + c @ x
        if val < best_val:
            best_val = val
            best = np.clip(x, lo, hi)
    if best is None:
        return _box_qp_pg(Q, c, lo, hi)
    return best


def _box_qp_pg(Q, c, lo, hi, tol=1e-13, max_iter=2_000_000):
    lmax = float(np.linalg.eigvalsh(Q).max())
    step = 1.0 / lmax
    x = np.clip(np.linalg.solve(Q, -c), lo, hi)
    for it in range(max_iter):
        g = Q @ x + c
        x_new = np.clip(x - step * g, lo, hi)
        if np.max(np.abs(x_new - x)) < tol * (1.0 + np.max(np.abs(x))):
            return x_new
        x = x_new
    raise ConvergenceError("box QP projected gradient did not converge", iterations=max_iter)


def _check_dim(x, d):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (d,):
        raise DimensionMismatchError(f"expected dimension {d}, got shape {x.shape}")
    return x


def _max_box_dist(lo, hi, point):
    """Max of ||x - point|| over the box [lo, hi] (coordinate-wise)."""
    return float(np.sqrt(np.sum(np.maximum(np.abs(lo - point), np.abs(hi - point)) ** 2)))


class TrackingCost:
    """f(x) = 0.5 ||x - u||^2; smooth and proximable, mu = l = 1."""

    mu = 1.0
    lips = 1.0
    smooth = True
    proximable = True

    def __init__(self, u):
        self.u = np.asarray(u, dtype=np.float64)
        self.u.setflags(write=False)
        self.d = self.u.shape[0]

    def value(self, x):
        x = _check_dim(x, self.d)
        diff = x - self.u
        return 0.5 * float(diff @ diff)

    def subgradient(self, x):
        return _check_dim(x, self.d) - self.u

    gradient = subgradient

    def prox(self, tau, v, box):
        v = _check_dim(v, self.d)
        return box.project((v + tau * self.u) / (1.0 + tau))

    def minimizer(self, box):
        return box.project(self.u)

    def subgrad_norm_bound(self, lo, hi):
        return _max_box_dist(lo, hi, self.u)


class LassoCost:
    """f(x) = (1/M) sum_j ||x - u_j||^2 + (lam/2) ||x||_1.

    Strongly convex with mu = 2 from the quadratic part; non-smooth.
    At l1 kinks the minimum-norm subgradient element (0) is returned.
    """

    mu = 2.0
    lips = None
    smooth = False
    proximable = True

    def __init__(self, samples, lam, sigma=None):
        self.samples = np.asarray(samples, dtype=np.float64)
        if self.samples.ndim != 2:
            raise DimensionMismatchError("samples must have shape (M, d)")
        self.lam = float(lam)
        self.sigma = sigma
        self.M, self.d = self.samples.shape
        self.u_mean = self.samples.mean(axis=0)
        self.msq = float(np.mean(np.sum(self.samples ** 2, axis=1)))
        self.u_mean.setflags(write=False)
        self.samples.setflags(write=False)

    def value(self, x):
        x = _check_dim(x, self.d)
        quad = float(x @ x - 2.0 * x @ self.u_mean) + self.msq
        return quad + 0.5 * self.lam * float(np.abs(x).sum())

    def subgradient(self, x):
        x = _check_dim(x, self.d)
        return 2.0 * (x - self.u_mean) + 0.5 * self.lam * np.sign(x)

    def prox(self, tau, v, box):
        v = _check_dim(v, self.d)
        center = (v + 2.0 * tau * self.u_mean) / (1.0 + 2.0 * tau)
        thresh = (0.5 * self.lam * tau) / (1.0 + 2.0 * tau)
        return box.project(soft_threshold(center, thresh))

    def minimizer(self, box):
        return box.project(soft_threshold(self.u_mean, self.lam / 4.0))

    def subgrad_norm_bound(self, lo, hi):
        return 2.0 * _max_box_dist(lo, hi, self.u_mean) + 0.5 * self.lam * np.sqrt(self.d)


class GroupLassoCost:
    """f(x) = 0.5 ||x - u||^2 + sum_i ||x_{G_i}||, overlapping groups.

    The prox has no closed form; it is computed by variable-splitting ADMM
    terminated when both primal and dual residual norms drop below
    ``admm_tol`` (default 1e-10).
    """

    mu = 1.0
    lips = None
    smooth = False
    proximable = True

    def __init__(self, u, groups, admm_tol=1e-10, admm_max_iter=100_000):
        self.u = np.asarray(u, dtype=np.float64)
        self.u.setflags(write=False)
        self.d = self.u.shape[0]
        self.groups = tuple(np.asarray(g, dtype=np.int64) for g in groups)
        for g in self.groups:
            if g.min() < 0 or g.max() >= self.d:
                raise DimensionMismatchError("group index out of range")
        self.admm_tol = admm_tol
        self.admm_max_iter = admm_max_iter
        self._group_idx = np.concatenate(self.groups)
        self._group_start = np.cumsum([0] + [len(g) for g in self.groups]).astype(np.int64)
        counts = np.zeros(self.d)
        np.add.at(counts, self._group_idx, 1.0)
        self._counts = counts

    def value(self, x):
        x = _check_dim(x, self.d)
        diff = x - self.u
        v = 0.5 * float(diff @ diff)
        for g in self.groups:
            v += float(np.linalg.norm(x[g]))
        return v

    def subgradient(self, x):
        x = _check_dim(x, self.d)
        g_out = x - self.u
        for g in self.groups:
            nrm = np.linalg.norm(x[g])
            if nrm > 0:
                g_out[g] += x[g] / nrm
        return g_out

    def _solve(self, q, r, w, box):
        x, iters, primal, dual = admm_group_prox_kernel(
            r, q, w, box.lower, box.upper,
            self._group_start, self._group_idx, self._counts,
            rho=1.0, tol=self.admm_tol, max_iter=self.admm_max_iter,
        )
        if primal >= self.admm_tol or dual >= self.admm_tol:
            raise ConvergenceError(
                "group-lasso ADMM hit iteration cap",
                iterations=iters, residuals=(primal, dual))
        return x

    def prox(self, tau, v, box):
        v = _check_dim(v, self.d)
        q = tau + 1.0
        r = (tau * self.u + v) / q
        return self._solve(q, r, tau, box)

    def minimizer(self, box):
        return self._solve(1.0, self.u, 1.0, box)

    def subgrad_norm_bound(self, lo, hi):
        return _max_box_dist(lo, hi, self.u) + float(len(self.groups))


class DispatchCost:
    """Generation cost plus demand-supply imbalance penalty.

    f(x) = sum_i (a_i x_i^2 + b_i x_i + c_i) + xi (sum_i x_i + s - d)^2,
    a strongly convex quadratic with Hessian 2 diag(a) + 2 xi 11'.
    """

    smooth = True
    proximable = True

    def __init__(self, a, b, c, xi, demand, supply):
        self.a = np.asarray(a, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.c = np.asarray(c, dtype=np.float64)
        if not np.all(self.a > 0):
            raise ValueError("quadratic coefficients a_i must be positive")
        self.xi = float(xi)
        self.demand = float(demand)
        self.supply = float(supply)
        self.d = self.a.shape[0]
        e = self.supply - self.demand
        self.Q = 2.0 * np.diag(self.a) + 2.0 * self.xi * np.ones((self.d, self.d))
        self.c_lin = self.b + 2.0 * self.xi * e * np.ones(self.d)
        self.const = float(self.c.sum()) + self.xi * e * e
        eig = np.linalg.eigvalsh(self.Q)
        self.mu = float(eig[0])
        self.lips = float(eig[-1])

    def value(self, x):
        x = _check_dim(x, self.d)
        return 0.5 * float(x @ self.Q @ x) + float(self.c_lin @ x) + self.const

    def subgradient(self, x):
        x = _check_dim(x, self.d)
        return self.Q @ x + self.c_lin

    gradient = subgradient

    def prox(self, tau, v, box):
        v = _check_dim(v, self.d)
        Qp = self.Q + np.eye(self.d) / tau
        cp = self.c_lin - v / tau
        return solve_box_qp(Qp, cp, box.lower, box.upper)

    def minimizer(self, box):
        return solve_box_qp(self.Q, self.c_lin, box.lower, box.upper)

    def subgrad_norm_bound(self, lo, hi):
        e = self.supply - self.demand
        s_lo, s_hi = float(lo.sum()), float(hi.sum())
        imb = 2.0 * self.xi * max(abs(s_lo + e), abs(s_hi + e))
        per = np.maximum(np.abs(2.0 * self.a * lo + self.b),
                         np.abs(2.0 * self.a * hi + self.b))
        return float(np.linalg.norm(per)) + imb * np.sqrt(self.d)


class QuadraticSwitch:
    """g(x, y) = (gamma/2) ||x - y||^2."""

    quadratic = True

    def __init__(self, gamma):
        if gamma < 0:
            raise ValueError("gamma must be non-negative")
        self.gamma = float(gamma)
        self.l_g = self.gamma

    def value(self, x, y):
        diff = np.asarray(x) - np.asarray(y)
        return 0.5 * self.gamma * float(diff @ diff)

    def grad1(self, x, y):
        return self.gamma * (np.asarray(x) - np.asarray(y))

    def grad2(self, x, y):
        return -self.gamma * (np.asarray(x) - np.asarray(y))

    @property
    def L_gradH(self):
        return 4.0 * self.gamma


class SumSquaredSwitch:
    """g(x, y) = gamma / (2 sqrt(2) d) * <x - y, 1>^2.

    Penalizes changes of the coordinate sum only; gamma-smooth jointly in
    (x, y), and bounded above by (gamma/2)||x - y||^2 by Cauchy-Schwarz.
    """

    quadratic = False

    def __init__(self, gamma, d):
        if gamma < 0:
            raise ValueError("gamma must be non-negative")
        self.gamma = float(gamma)
        self.d = int(d)
        self.l_g = self.gamma

    def value(self, x, y):
        s = float(np.sum(np.asarray(x) - np.asarray(y)))
        return self.gamma / (2.0 * np.sqrt(2.0) * self.d) * s * s

    def grad1(self, x, y):
        s = float(np.sum(np.asarray(x) - np.asarray(y)))
        return self.gamma / (np.sqrt(2.0) * self.d) * s * np.ones(self.d)

    def grad2(self, x, y):
        return -self.grad1(x, y)

    @property
    def L_gradH(self):
        return 2.0 * np.sqrt(2.0) * self.gamma


def smoothness_constants(instance):
    """Constants of the switching block: l_g, L_gradH, and L_gradJ = l + L_gradH."""
    sw = instance.switching
    l_grad_j = instance.l + sw.L_gradH if instance.smooth else None
    return {"l_g": sw.l_g, "L_gradH": sw.L_gradH, "L_gradJ": l_grad_j}


# Thin functional aliases over the method-based interface.

def cost_value(cost, x):
    return cost.value(x)


def stage_subgradient(cost, x):
    return cost.subgradient(x)


def stage_prox(cost, tau, v, box):
    if not getattr(cost, "proximable", False):
        raise UnsupportedCostError(f"{type(cost).__name__} has no prox")
    if tau <= 0:
        raise ValueError("prox step must be positive")
    return cost.prox(tau, v, box)


def admm_group_prox(cost, tau, v, box):
    if not isinstance(cost, GroupLassoCost):
        raise UnsupportedCostError("admm_group_prox requires a GroupLassoCost")
    return cost.prox(tau, v, box)


def switch_value(switch, x, y):
    return switch.value(x, y)


def switch_grad1(switch, x, y):
    return switch.grad1(x, y)


def switch_grad2(switch, x, y):
    return switch.grad2(x, y)
