"""Problem data model: feasible box, instances, objective evaluation.

All types are immutable after construction and safe to share between
threads; every operation here is a pure function of its inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError, NumericError

BOX_TOL = 1e-12


class FeasibleBox:
    """Axis-aligned box, per-coordinate bounds (+-inf allowed)."""

    def __init__(self, lower, upper):
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionMismatchError("lower/upper must be 1-d arrays of equal length")
        if np.any(lower > upper):
            raise InvalidArgumentError("box has lower[i] > upper[i]")
        self.lower = lower
        self.upper = upper
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)

    @property
    def d(self):
        return self.lower.shape[0]

    @classmethod
    def interval(cls, lo, hi, d):
        """d-fold product of the scalar interval [lo, hi]."""
        return cls(np.full(d, lo), np.full(d, hi))

    @classmethod
    def unbounded(cls, d):
        return cls.interval(-np.inf, np.inf, d)

    @classmethod
    def nonnegative(cls, d):
        return cls.interval(0.0, np.inf, d)

    def project(self, v):
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.d,):
            raise DimensionMismatchError(f"expected dimension {self.d}, got shape {v.shape}")
        return np.clip(v, self.lower, self.upper)

    def contains(self, v, tol=BOX_TOL):
        v = np.asarray(v, dtype=np.float64)
        return bool(np.all(v >= self.lower - tol) and np.all(v <= self.upper + tol))

    def is_bounded(self):
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))


def project(box, v):
    """Euclidean projection onto the box (coordinate-wise clamp)."""
    return box.project(v)


@dataclass(frozen=True)
class CostBreakdown:
    stage_total: float
    switching_total: float
    objective: float


class ProblemInstance:
    """Horizon of stage costs plus a switching cost over a feasible box.

    Carries the constants used by the bound calculator: ``G`` (subgradient
    bound), ``mu`` (min stage strong convexity) and ``l`` (max stage
    smoothness, None for non-smooth families).  ``G`` is estimated from the
    instance data when not supplied, see :func:`estimate_subgradient_bound`.
    """

    def __init__(self, stage_costs, switching, box, x0, W, G=None):
        self.N = len(stage_costs)
        if self.N < 1:
            raise InvalidArgumentError("need at least one stage cost")
        if not (1 <= W <= self.N):
            raise InvalidArgumentError(f"require 1 <= W <= N, got W={W}, N={self.N}")
        self.d = box.d
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.shape != (self.d,):
            raise DimensionMismatchError("x0 dimension mismatch")
        if not box.contains(x0):
            raise InvalidArgumentError("x0 outside the feasible box")
        self.stage_costs = tuple(stage_costs)
        self.switching = switching
        self.box = box
        self.x0 = x0
        self.x0.setflags(write=False)
        self.W = W
        self.mu = min(c.mu for c in self.stage_costs)
        if self.mu <= 0:
            raise InvalidArgumentError("stage costs must be strongly convex (mu > 0)")
        lips = [c.lips for c in self.stage_costs]
        self.l = max(lips) if all(v is not None for v in lips) else None
        self._minimizers = None
        self.G = float(G) if G is not None else estimate_subgradient_bound(self)

    @property
    def smooth(self):
        return self.l is not None

    @property
    def proximable(self):
        return all(c.proximable for c in self.stage_costs)

    def minimizers(self):
        """Per-stage minimizers theta_t over the box, cached."""
        if self._minimizers is None:
            theta = np.empty((self.N, self.d))
            for t, c in enumerate(self.stage_costs):
                theta[t] = c.minimizer(self.box)
            theta.setflags(write=False)
            self._minimizers = theta
        return self._minimizers


def stage_minimizers(instance):
    return instance.minimizers()


def total_cost(instance, trajectory):
    """Evaluate the objective J along a trajectory (x_0 from the instance)."""
    x = np.asarray(trajectory, dtype=np.float64)
    if x.shape != (instance.N, instance.d):
        raise DimensionMismatchError(
            f"trajectory must have shape {(instance.N, instance.d)}, got {x.shape}")
    stage = 0.0
    switch = 0.0
    prev = instance.x0
    for t in range(instance.N):
        stage += instance.stage_costs[t].value(x[t])
        switch += instance.switching.value(x[t], prev)
        prev = x[t]
    objective = stage + switch
    if not np.isfinite(objective):
        raise NumericError("non-finite objective value")
    return CostBreakdown(stage_total=stage, switching_total=switch, objective=objective)


def path_length(instance, include_initial=True):
    """Sum of ||theta_t - theta_{t-1}||.

    With ``include_initial`` (the default, matching the theorem statements)
    the sum starts at t = 1 with theta_0 := x_0; otherwise it starts at
    t = 2.
    """
    theta = instance.minimizers()
    diffs = np.linalg.norm(np.diff(theta, axis=0), axis=1)
    total = float(diffs.sum())
    if include_initial:
        total += float(np.linalg.norm(theta[0] - instance.x0))
    return total


def minimizer_hull(instance, inflate=2.0):
    """Bounding box of {x0, theta_1..theta_N}, inflated and clipped to X.

    This is the region over which the subgradient bound G has to hold for
    the regret analysis (the initialization trajectory and the minimizer
    path live inside it).
    """
    pts = np.vstack([instance.minimizers(), instance.x0[None, :]])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) * inflate + 1e-6
    lo = np.maximum(center - half, instance.box.lower)
    hi = np.minimum(center + half, instance.box.upper)
    return lo, hi


def estimate_subgradient_bound(instance):
    """Conservative G: max stage subgradient norm over the minimizer hull."""
    lo, hi = minimizer_hull(instance)
    return max(c.subgrad_norm_bound(lo, hi) for c in instance.stage_costs)
