"""Online and offline solvers.

The receding-horizon solvers (rhapd, rhapd_s, rham) run the true online
schedule: at each time step the newly revealed stage cost seeds one fresh
layer-0 entry and one diagonal of refinements, and x_t^(W) is committed.
Their offline twins (apgd_offline, apgd_s_offline) run plain layer-by-layer
sweeps; by construction both visit each grid cell with identical inputs.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import costs as _costs
from ._kernels import rhapd_s_sweep
from .errors import ConvergenceError, InvalidArgumentError, UnsupportedCostError
from .problem import CostBreakdown, total_cost


@dataclass
class AlgorithmConfig:
    """Step sizes and solver knobs; unset fields fall back to the defaults
    of Table-style rules: rhapd tau = 0.8/gamma, rhapd_s tau = 1/l,
    pgd/fista tau = 1/L_gradH, rhgd eta_g = 1/L_gradJ, ogd eta = 1/l."""

    tau: float | None = None
    tau_stages: np.ndarray | None = None
    eta: float | None = None            # OGD initialization step
    eta_g: float | None = None          # RHGD/RHAG gradient step
    momentum: float | None = None       # RHAG momentum
    init: str | None = None             # "minimizer" | "ogd"
    record_grid: bool = False
    inner_tol: float = 1e-10            # MPC inner solver
    offline_tol: float = 1e-12          # offline optimum
    max_sweeps: int = 1_000_000
    extra: dict = field(default_factory=dict)


@dataclass
class RunResult:
    algorithm: str
    trajectory: np.ndarray
    breakdown: CostBreakdown
    wall_us: float
    grid: np.ndarray | None = None
    tau: float | np.ndarray | None = None
    init: str | None = None

    @property
    def objective(self):
        return self.breakdown.objective


def _cfg(config):
    return config if config is not None else AlgorithmConfig()


def default_tau_rhapd(instance):
    gamma = instance.switching.gamma
    if gamma <= 0:
        raise InvalidArgumentError("default tau = 0.8/gamma needs gamma > 0; pass tau explicitly")
    return 0.8 / gamma


def default_tau_rhapd_s(instance):
    if not instance.smooth:
        raise UnsupportedCostError("rhapd_s requires smooth stage costs")
    return 1.0 / instance.l


def default_eta_ogd(instance):
    if not instance.smooth:
        raise UnsupportedCostError("OGD initialization requires smooth stage costs")
    return 1.0 / instance.l


def policy_i_init(instance):
    """Layer 0 from the per-stage minimizers: x_1 = x_0, x_j = theta_{j-1}."""
    layer0 = np.empty((instance.N, instance.d))
    layer0[0] = instance.x0
    if instance.N > 1:
        layer0[1:] = instance.minimizers()[:-1]
    return layer0


def ogd_init(instance, eta=None):
    """Layer 0 by online projected gradient: x_1 = x_0, then one gradient
    step on the previously revealed stage cost."""
    eta = eta if eta is not None else default_eta_ogd(instance)
    layer0 = np.empty((instance.N, instance.d))
    layer0[0] = instance.x0
    for j in range(1, instance.N):
        prev = layer0[j - 1]
        layer0[j] = instance.box.project(prev - eta * instance.stage_costs[j - 1].gradient(prev))
    return layer0


def _make_layer0(instance, config, default):
    init = config.init or default
    if init == "minimizer":
        return init, policy_i_init(instance)
    if init == "ogd":
        return init, ogd_init(instance, config.eta)
    raise InvalidArgumentError(f"unknown init policy {init!r}")


def _tau_vector(instance, config, default_fn):
    if config.tau_stages is not None:
        tau = np.asarray(config.tau_stages, dtype=np.float64)
        if tau.shape != (instance.N,):
            raise InvalidArgumentError("tau_stages must have length N")
        return tau
    tau = config.tau if config.tau is not None else default_fn(instance)
    if tau <= 0:
        raise InvalidArgumentError("step size must be positive")
    return np.full(instance.N, float(tau))


# ---------------------------------------------------------------------------
# cell updates shared by online schedule and offline sweeps


def _apgd_cell(instance, tau_i, i, x_prev_i, left, right_prev):
    sw = instance.switching
    grad = sw.grad1(x_prev_i, left)
    if i < instance.N - 1:
        grad = grad + sw.grad2(right_prev, x_prev_i)
    return instance.stage_costs[i].prox(tau_i, x_prev_i - tau_i * grad, instance.box)


def _apgd_s_cell(instance, tau_i, i, x_prev_i, left, right_prev):
    gamma = instance.switching.gamma
    grad = instance.stage_costs[i].gradient(x_prev_i)
    if i < instance.N - 1:
        num = gamma * tau_i * (left + right_prev) + x_prev_i - tau_i * grad
        den = 2.0 * gamma * tau_i + 1.0
    else:
        num = gamma * tau_i * left + x_prev_i - tau_i * grad
        den = gamma * tau_i + 1.0
    return np.minimum(np.maximum(num / den, instance.box.lower), instance.box.upper)


# ---------------------------------------------------------------------------
# offline sweeps


def apgd_offline(instance, layer0, iters, tau_stages=None, config=None):
    """Gauss-Seidel proximal sweeps; returns the grid of shape
    (iters + 1, N, d) with layer 0 as supplied."""
    config = _cfg(config)
    if tau_stages is None:
        tau_stages = _tau_vector(instance, config, default_tau_rhapd)
    grid = np.empty((iters + 1, instance.N, instance.d))
    grid[0] = layer0
    for k in range(1, iters + 1):
        left = instance.x0
        for i in range(instance.N):
            right_prev = grid[k - 1, i + 1] if i < instance.N - 1 else None
            grid[k, i] = _apgd_cell(instance, tau_stages[i], i, grid[k - 1, i], left, right_prev)
            left = grid[k, i]
    return grid


def apgd_s_offline(instance, layer0, iters, tau=None, config=None):
    """Closed-form projected sweeps for smooth stage costs and quadratic
    switching cost (kernel-accelerated)."""
    config = _cfg(config)
    if not instance.switching.quadratic:
        raise UnsupportedCostError("apgd_s requires a quadratic switching cost")
    if tau is None:
        tau = config.tau if config.tau is not None else default_tau_rhapd_s(instance)
    gamma = instance.switching.gamma
    grid = np.empty((iters + 1, instance.N, instance.d))
    grid[0] = layer0
    grads = np.empty((instance.N, instance.d))
    for k in range(1, iters + 1):
        for t in range(instance.N):
            grads[t] = instance.stage_costs[t].gradient(grid[k - 1, t])
        grid[k] = rhapd_s_sweep(grid[k - 1], instance.x0, grads,
                                instance.box.lower, instance.box.upper, gamma, tau)
    return grid


# ---------------------------------------------------------------------------
# receding-horizon online schedule


def _receding_horizon(instance, cell, layer0_policy, tau_stages, config, name, tau_repr):
    """Shared schedule of Algorithm-1 style solvers.

    Grid cell (k, i) is computed at time step t = k + i - W; out-of-range
    stage indices at the boundary time steps are skipped.
    """
    n, w, d = instance.N, instance.W, instance.d
    t0 = time.perf_counter()
    init_name = config.init or layer0_policy
    grid = np.full((w + 1, n, d), np.nan)
    eta = config.eta
    theta = instance.minimizers() if init_name == "minimizer" else None
    if init_name == "ogd" and eta is None:
        eta = default_eta_ogd(instance)
    grid[0, 0] = instance.x0
    for t in range(2 - w, n + 1):
        j = t + w  # 1-indexed stage whose layer-0 value is seeded now
        if 2 <= j <= n:
            if init_name == "minimizer":
                grid[0, j - 1] = theta[j - 2]
            else:
                prev = grid[0, j - 2]
                grad = instance.stage_costs[j - 2].gradient(prev)
                grid[0, j - 1] = instance.box.project(prev - eta * grad)
        for i in range(t + w - 1, t - 1, -1):
            k = t + w - i
            if not (1 <= i <= n) or k > w:
                continue
            left = grid[k, i - 2] if i >= 2 else instance.x0
            right_prev = grid[k - 1, i] if i <= n - 1 else None
            grid[k, i - 1] = cell(instance, tau_stages[i - 1], i - 1,
                                  grid[k - 1, i - 1], left, right_prev)
    traj = grid[w].copy()
    wall_us = (time.perf_counter() - t0) * 1e6
    return RunResult(
        algorithm=name, trajectory=traj, breakdown=total_cost(instance, traj),
        wall_us=wall_us, grid=grid if config.record_grid else None,
        tau=tau_repr, init=init_name)


def rhapd(instance, config=None):
    """Receding horizon alternating proximal descent (proximable costs)."""
    config = _cfg(config)
    if not instance.proximable:
        raise UnsupportedCostError("rhapd requires proximable stage costs")
    tau_stages = _tau_vector(instance, config, default_tau_rhapd)
    return _receding_horizon(instance, _apgd_cell, "minimizer", tau_stages,
                             config, "rhapd", tau_stages[0] if config.tau_stages is None else tau_stages)


def rhapd_s(instance, config=None):
    """Receding horizon alternating proximal descent for smooth costs."""
    config = _cfg(config)
    if not instance.smooth:
        raise UnsupportedCostError("rhapd_s requires smooth stage costs")
    if not instance.switching.quadratic:
        raise UnsupportedCostError("rhapd_s requires a quadratic switching cost")
    tau_stages = _tau_vector(instance, config, default_tau_rhapd_s)
    return _receding_horizon(instance, _apgd_s_cell, "ogd", tau_stages,
                             config, "rhapd_s", tau_stages[0])


def rham_tau_stages(instance):
    gamma = instance.switching.gamma
    tau = np.full(instance.N, 1.0 / (2.0 * gamma))
    tau[-1] = 1.0 / gamma
    return tau


def rham(instance, config=None):
    """Alternating minimization: rhapd at tau_t = 1/(2 gamma), tau_N = 1/gamma."""
    config = _cfg(config)
    if not instance.switching.quadratic:
        raise UnsupportedCostError("rham requires a quadratic switching cost")
    if not instance.proximable:
        raise UnsupportedCostError("rham requires proximable stage costs")
    tau_stages = config.tau_stages if config.tau_stages is not None else rham_tau_stages(instance)
    res = _receding_horizon(instance, _apgd_cell, config.init or "minimizer",
                            np.asarray(tau_stages, dtype=np.float64), config, "rham", None)
    res.tau = np.asarray(tau_stages, dtype=np.float64)
    return res


# ---------------------------------------------------------------------------
# Jacobi baselines: online PGD and FISTA


def grad_h(instance, x):
    """Per-stage gradient block of the total switching cost H at x (N, d)."""
    sw = instance.switching
    out = np.empty_like(x)
    prev = instance.x0
    for t in range(instance.N):
        g = sw.grad1(x[t], prev)
        if t < instance.N - 1:
            g = g + sw.grad2(x[t + 1], x[t])
        out[t] = g
        prev = x[t]
    return out


def grad_j(instance, x):
    out = grad_h(instance, x)
    for t in range(instance.N):
        out[t] += instance.stage_costs[t].gradient(x[t])
    return out


def _pgd_layer(instance, x, tau):
    gh = grad_h(instance, x)
    out = np.empty_like(x)
    for t in range(instance.N):
        out[t] = instance.stage_costs[t].prox(tau, x[t] - tau * gh[t], instance.box)
    return out


def pgd_online(instance, config=None):
    """Layered proximal gradient descent with previous-layer neighbors."""
    config = _cfg(config)
    if not instance.proximable:
        raise UnsupportedCostError("pgd requires proximable stage costs")
    tau = config.tau if config.tau is not None else 1.0 / instance.switching.L_gradH
    t0 = time.perf_counter()
    init_name, x = _make_layer0(instance, config, "minimizer")
    grid = [x] if config.record_grid else None
    for _ in range(instance.W):
        x = _pgd_layer(instance, x, tau)
        if grid is not None:
            grid.append(x)
    wall_us = (time.perf_counter() - t0) * 1e6
    return RunResult("pgd", x, total_cost(instance, x), wall_us,
                     grid=np.asarray(grid) if grid is not None else None,
                     tau=tau, init=init_name)


def fista_online(instance, config=None):
    """Layered accelerated proximal gradient (standard momentum, no restarts)."""
    config = _cfg(config)
    if not instance.proximable:
        raise UnsupportedCostError("fista requires proximable stage costs")
    tau = config.tau if config.tau is not None else 1.0 / instance.switching.L_gradH
    t0 = time.perf_counter()
    init_name, x = _make_layer0(instance, config, "minimizer")
    y = x
    tk = 1.0
    grid = [x] if config.record_grid else None
    for _ in range(instance.W):
        x_new = _pgd_layer(instance, y, tau)
        tk_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        y = x_new + ((tk - 1.0) / tk_new) * (x_new - x)
        y = np.array([instance.box.project(y[t]) for t in range(instance.N)])
        x, tk = x_new, tk_new
        if grid is not None:
            grid.append(x)
    wall_us = (time.perf_counter() - t0) * 1e6
    return RunResult("fista", x, total_cost(instance, x), wall_us,
                     grid=np.asarray(grid) if grid is not None else None,
                     tau=tau, init=init_name)


# ---------------------------------------------------------------------------
# gradient baselines: RHGD and RHAG


def _require_smooth_quadratic(instance, name):
    if not instance.smooth:
        raise UnsupportedCostError(f"{name} requires smooth stage costs")
    if not instance.switching.quadratic:
        raise UnsupportedCostError(f"{name} requires a quadratic switching cost")


def _project_all(instance, x):
    return np.clip(x, instance.box.lower, instance.box.upper)


def rhgd(instance, config=None):
    """Layered projected gradient descent on the full objective J."""
    config = _cfg(config)
    _require_smooth_quadratic(instance, "rhgd")
    l_grad_j = instance.l + instance.switching.L_gradH
    eta_g = config.eta_g if config.eta_g is not None else 1.0 / l_grad_j
    t0 = time.perf_counter()
    init_name, x = _make_layer0(instance, config, "ogd")
    grid = [x] if config.record_grid else None
    for _ in range(instance.W):
        x = _project_all(instance, x - eta_g * grad_j(instance, x))
        if grid is not None:
            grid.append(x)
    wall_us = (time.perf_counter() - t0) * 1e6
    return RunResult("rhgd", x, total_cost(instance, x), wall_us,
                     grid=np.asarray(grid) if grid is not None else None,
                     tau=eta_g, init=init_name)


def rhag(instance, config=None):
    """Layered Nesterov-accelerated gradient on J with constant momentum."""
    config = _cfg(config)
    _require_smooth_quadratic(instance, "rhag")
    l_grad_j = instance.l + instance.switching.L_gradH
    eta_g = config.eta_g if config.eta_g is not None else 1.0 / l_grad_j
    lam = config.momentum
    if lam is None:
        lam = (np.sqrt(l_grad_j) - np.sqrt(instance.mu)) / (np.sqrt(l_grad_j) + np.sqrt(instance.mu))
    t0 = time.perf_counter()
    init_name, x = _make_layer0(instance, config, "ogd")
    y = x
    grid = [x] if config.record_grid else None
    for _ in range(instance.W):
        x_new = _project_all(instance, y - eta_g * grad_j(instance, y))
        y = x_new + lam * (x_new - x)
        x = x_new
        if grid is not None:
            grid.append(x)
    wall_us = (time.perf_counter() - t0) * 1e6
    return RunResult("rhag", x, total_cost(instance, x), wall_us,
                     grid=np.asarray(grid) if grid is not None else None,
                     tau=eta_g, init=init_name)


# ---------------------------------------------------------------------------
# full-horizon solvers: offline optimum and MPC


def _block_min_sweep(stage_costs, switching, box, x0, x):
    """One exact block-coordinate sweep (quadratic switch only)."""
    gamma = switching.gamma
    n = x.shape[0]
    out = x.copy()
    left = x0
    for t in range(n):
        if t < n - 1:
            out[t] = stage_costs[t].prox(1.0 / (2.0 * gamma),
                                         0.5 * (left + out[t + 1]), box)
        else:
            out[t] = stage_costs[t].prox(1.0 / gamma, left, box)
        left = out[t]
    return out


def _apgd_window_sweep(stage_costs, switching, box, x0, x, tau):
    n = x.shape[0]
    out = x.copy()
    left = x0
    for t in range(n):
        g = switching.grad1(out[t], left)
        if t < n - 1:
            g = g + switching.grad2(out[t + 1], out[t])
        out[t] = stage_costs[t].prox(tau, out[t] - tau * g, box)
        left = out[t]
    return out


def _window_objective(stage_costs, switching, x0, x):
    total = 0.0
    prev = x0
    for t in range(x.shape[0]):
        total += stage_costs[t].value(x[t]) + switching.value(x[t], prev)
        prev = x[t]
    return total


def _solve_window(stage_costs, switching, box, x0, init, tol, max_sweeps):
    """Full alternating minimization (or APGD for non-quadratic switching
    costs) to relative-decrease tolerance."""
    from . import costs as _c
    from ._kernels import tracking_am_solve
    use_blocks = switching.quadratic and all(c.proximable for c in stage_costs)
    if use_blocks and all(type(c) is _c.TrackingCost for c in stage_costs):
        # Kernel twin of the block-minimization loop below (identical
        # update order and stopping rule), for the tracking family.
        u = np.stack([c.u for c in stage_costs])
        x, obj, sweeps, converged = tracking_am_solve(
            u, x0, box.lower, box.upper, switching.gamma, init, tol, max_sweeps)
        if not converged:
            raise ConvergenceError("window solver hit sweep cap", iterations=sweeps)
        return x, obj
    tau = None
    if not use_blocks:
        if not all(c.proximable for c in stage_costs):
            raise UnsupportedCostError("window solver needs proximable stage costs")
        tau = 0.8 / switching.gamma if switching.gamma > 0 else 1.0
    x = init.copy()
    obj = _window_objective(stage_costs, switching, x0, x)
    for sweep in range(1, max_sweeps + 1):
        if use_blocks:
            x = _block_min_sweep(stage_costs, switching, box, x0, x)
        else:
            x = _apgd_window_sweep(stage_costs, switching, box, x0, x, tau)
        new_obj = _window_objective(stage_costs, switching, x0, x)
        if obj - new_obj <= tol * max(1.0, abs(new_obj)):
            return x, new_obj
        obj = new_obj
    raise ConvergenceError("window solver hit sweep cap",
                           iterations=max_sweeps, residuals=(obj - new_obj,))


def offline_optimum(instance, config=None):
    """High-precision minimizer of the full-horizon problem.

    Returns (trajectory, J*).  Alternating minimization from the policy-I
    initialization, relative decrease below ``offline_tol`` (default 1e-12).
    """
    config = _cfg(config)
    init = policy_i_init(instance)
    traj, jstar = _solve_window(instance.stage_costs, instance.switching,
                                instance.box, instance.x0, init,
                                config.offline_tol, config.max_sweeps)
    return traj, jstar


def mpc(instance, config=None):
    """Model predictive control: solve the W-stage window at each time and
    commit its first action."""
    config = _cfg(config)
    n, w = instance.N, instance.W
    theta = instance.minimizers()
    t0 = time.perf_counter()
    traj = np.empty((n, instance.d))
    prev = instance.x0
    for t in range(n):
        hi = min(t + w, n)
        window_costs = instance.stage_costs[t:hi]
        init = theta[t:hi].copy()
        sol, _ = _solve_window(window_costs, instance.switching, instance.box,
                               prev, init, config.inner_tol, config.max_sweeps)
        traj[t] = sol[0]
        prev = traj[t]
    wall_us = (time.perf_counter() - t0) * 1e6
    return RunResult("mpc", traj, total_cost(instance, traj), wall_us, init="minimizer")


ALGORITHMS = {
    "rhapd": rhapd,
    "rhapd_s": rhapd_s,
    "rham": rham,
    "pgd": pgd_online,
    "fista": fista_online,
    "rhgd": rhgd,
    "rhag": rhag,
    "mpc": mpc,
}
