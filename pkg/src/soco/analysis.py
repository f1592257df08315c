"""Theory constants, regret bounds, and machine-checkable lemma audits.

Everything here is a pure function over immutable inputs.  The audits run
on iterate grids recorded after the fact; each audited inequality produces
a slack value that must stay above ``-SLACK_TOL``.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, InvalidStepSizeError, UnsupportedCostError
from .problem import path_length, total_cost

SLACK_TOL = 1e-9


@dataclass(frozen=True)
class BoundConstants:
    """All constants of the regret theorems at a fixed step size tau.

    Fields for families the instance does not support (e.g. the smooth
    constants on a non-smooth instance) are None.
    """

    tau: float
    mu: float
    l: float | None
    gamma: float
    l_g: float
    G: float
    rho: float
    beta_sq: float
    rho_q: float | None
    beta_sq_q: float | None
    rho_s: float | None
    beta_sq_s: float | None
    kappa: float | None
    delta: float | None
    Q_f: float | None

    @property
    def rate(self):
        """Contraction factor r = 1 / (1 + 2 mu rho / beta^2) of Lemma 2."""
        return 1.0 / (1.0 + 2.0 * self.mu * self.rho / self.beta_sq)

    @property
    def rate_q(self):
        if self.rho_q is None:
            return None
        return 1.0 / (1.0 + 2.0 * self.mu * self.rho_q / self.beta_sq_q)

    @property
    def rate_s(self):
        if self.rho_s is None:
            return None
        return 1.0 / (1.0 + 2.0 * self.mu * self.rho_s / self.beta_sq_s)

    def rate_for(self, family):
        r = {"general": self.rate, "quadratic": self.rate_q, "smooth": self.rate_s}[family]
        if r is None:
            raise UnsupportedCostError(f"no {family} constants available")
        return r

    def rho_for(self, family):
        r = {"general": self.rho, "quadratic": self.rho_q, "smooth": self.rho_s}[family]
        if r is None:
            raise UnsupportedCostError(f"no {family} constants available")
        return r

    def beta_for(self, family):
        b = {"general": self.beta_sq, "quadratic": self.beta_sq_q,
             "smooth": self.beta_sq_s}[family]
        if b is None:
            raise UnsupportedCostError(f"no {family} constants available")
        return float(np.sqrt(b))


def compute_constants(instance, tau=None, require=("general",)):
    """All bound constants at step size tau (default 0.8/gamma for
    proximable, 1/l for smooth-only instances).

    ``require`` lists the families whose positivity condition must hold;
    violations raise InvalidStepSizeError naming the condition.
    """
    sw = instance.switching
    gamma = sw.gamma
    l_g = sw.l_g
    mu = instance.mu
    l = instance.l
    if tau is None:
        tau = 0.8 / gamma if gamma > 0 else (1.0 / l if l else 1.0)
    if tau <= 0:
        raise InvalidArgumentError("tau must be positive")
    inv = 1.0 / tau

    rho = mu / 2.0 + inv - l_g
    beta_sq = 2.0 * (np.sqrt(5.0) * l_g + inv) ** 2

    rho_q = beta_sq_q = None
    if sw.quadratic:
        rho_q = mu / 2.0 + inv - gamma
        beta_sq_q = 2.0 * (gamma ** 2 + max((2.0 * gamma - inv) ** 2, (gamma - inv) ** 2))

    rho_s = beta_sq_s = kappa = delta = Q_f = None
    if instance.smooth:
        lips = [c.lips for c in instance.stage_costs]
        interior = min((inv - lt / 2.0 + gamma) for lt in lips[:-1]) if instance.N > 1 else np.inf
        rho_s = min(interior, inv - lips[-1] / 2.0 + gamma / 2.0)
        beta_sq_s = 2.0 * (l + gamma + inv) ** 2
        kappa = float(np.sqrt(max(0.0, 1.0 - mu / l)))
        delta = (np.sqrt(beta_sq_s) / l + 1.0) * instance.G / (1.0 - kappa)
        Q_f = (l + 4.0 * gamma) / mu

    for family, (name, value) in {
        "general": ("rho", rho),
        "quadratic": ("rho_q", rho_q),
        "smooth": ("rho_s", rho_s),
    }.items():
        if family in require:
            if value is None:
                raise UnsupportedCostError(f"instance has no {family} constants")
            if value <= 0:
                raise InvalidStepSizeError(name, value)

    return BoundConstants(tau=float(tau), mu=mu, l=l, gamma=gamma, l_g=l_g,
                          G=instance.G, rho=rho, beta_sq=float(beta_sq),
                          rho_q=rho_q, beta_sq_q=beta_sq_q, rho_s=rho_s,
                          beta_sq_s=beta_sq_s, kappa=kappa, delta=delta, Q_f=Q_f)


def regret(objective, jstar):
    """Dynamic regret J(x^A) - J*; tiny negatives (solver noise) clamp to 0."""
    r = float(objective) - float(jstar)
    if r < 0.0:
        if r < -SLACK_TOL * (1.0 + abs(jstar)):
            warnings.warn(f"regret {r:g} below the negativity tolerance; "
                          "reference J* may be inaccurate")
        return 0.0
    return r


def _geometric_bound(front, rate, pathlen):
    def bound(W):
        return front * rate ** W * pathlen
    return bound


def bound_rhapd(constants, instance):
    """Theorem 1 regret bound of RHAPD (general switching costs), W -> scalar."""
    if constants.rho <= 0:
        raise InvalidStepSizeError("rho", constants.rho)
    front = constants.G * (1.0 + constants.gamma / constants.mu)
    return _geometric_bound(front, constants.rate, path_length(instance))


def bound_rhapd_quadratic(constants, instance):
    """Theorem 2 regret bound of RHAPD (quadratic switching cost)."""
    if constants.rho_q is None:
        raise UnsupportedCostError("quadratic constants unavailable")
    if constants.rho_q <= 0:
        raise InvalidStepSizeError("rho_q", constants.rho_q)
    front = constants.G * (1.0 + constants.gamma / constants.mu)
    return _geometric_bound(front, constants.rate_q, path_length(instance))


def bound_rhapd_s(constants, instance):
    """Theorem 3 regret bound of RHAPD-S (smooth costs, OGD initialization)."""
    if constants.rho_s is None:
        raise UnsupportedCostError("smooth constants unavailable")
    if constants.rho_s <= 0:
        raise InvalidStepSizeError("rho_s", constants.rho_s)
    return _geometric_bound(constants.delta, constants.rate_s, path_length(instance))


def bound_rhgd(constants, instance, init_regret):
    """RHGD regret bound Q_f (1 - 1/Q_f)^W Reg(I)."""
    if constants.Q_f is None:
        raise UnsupportedCostError("Q_f needs smooth stage costs")
    qf = constants.Q_f
    return lambda W: qf * (1.0 - 1.0 / qf) ** W * init_regret


def bound_rhag(constants, instance, init_regret):
    """RHAG regret bound 2 (1 - 1/sqrt(Q_f))^W Reg(I)."""
    if constants.Q_f is None:
        raise UnsupportedCostError("Q_f needs smooth stage costs")
    qf = constants.Q_f
    return lambda W: 2.0 * (1.0 - 1.0 / np.sqrt(qf)) ** W * init_regret


def init_regret_bound(constants, instance, jstar=None):
    """Initialization-policy regret: the G(1 + gamma/mu) * pathlength bound
    and, when jstar is given, the measured J(x^(0)) - J* for audit."""
    bound = constants.G * (1.0 + constants.gamma / constants.mu) * path_length(instance)
    measured = None
    if jstar is not None:
        from .algorithms import policy_i_init
        measured = regret(total_cost(instance, policy_i_init(instance)).objective, jstar)
    return bound, measured


def crossover_gamma(mu, l):
    """Switching-cost weight above which the RHAPD-S rate beats RHGD's
    (evaluated at tau = 1/l)."""
    if mu <= 0 or l <= 0:
        raise InvalidArgumentError("mu and l must be positive")
    return 0.25 * (mu + 3.0 * l + np.sqrt(mu * mu + 14.0 * mu * l + 65.0 * l * l))


# ---------------------------------------------------------------------------
# lemma audits


def witness_layer(instance, constants, xk1, xk, family):
    """Witness vectors v_t^(k) of the appendix constructions, shape (N, d).

    ``xk1`` is layer k-1, ``xk`` layer k.
    """
    n = instance.N
    tau = constants.tau
    sw = instance.switching
    gamma = sw.gamma
    v = np.empty_like(xk)
    for t in range(n):
        left_k = xk[t - 1] if t >= 1 else instance.x0
        if family == "general":
            vt = (xk1[t] - xk[t]) / tau \
                - sw.grad1(xk1[t], left_k) + sw.grad1(xk[t], left_k)
            if t < n - 1:
                vt = vt - sw.grad2(xk1[t + 1], xk1[t]) + sw.grad2(xk[t + 1], xk[t])
        elif family == "quadratic":
            if t < n - 1:
                vt = (2.0 * gamma - 1.0 / tau) * (xk[t] - xk1[t]) \
                    + gamma * (xk1[t + 1] - xk[t + 1])
            else:
                vt = (gamma - 1.0 / tau) * (xk[t] - xk1[t])
        elif family == "smooth":
            grad_diff = instance.stage_costs[t].gradient(xk[t]) \
                - instance.stage_costs[t].gradient(xk1[t])
            vt = grad_diff + (xk1[t] - xk[t]) / tau
            if t < n - 1:
                vt = vt + gamma * (xk1[t + 1] - xk[t + 1])
        else:
            raise InvalidArgumentError(f"unknown audit family {family!r}")
        v[t] = vt
    return v


@dataclass
class AuditReport:
    """Per-layer slack values of the three audited inequalities.

    All slacks are 'how far inside the inequality we are'; a negative
    value below -SLACK_TOL (scaled) is a violation.
    """

    family: str
    layers: int
    decrease_slack: list = field(default_factory=list)
    witness_slack: list = field(default_factory=list)
    rate_slack: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def to_json(self, indent=2):
        return json.dumps({
            "family": self.family,
            "layers": self.layers,
            "pass": self.passed,
            "decrease_slack": self.decrease_slack,
            "witness_slack": self.witness_slack,
            "rate_slack": self.rate_slack,
            "objectives": self.objectives,
            "violations": self.violations,
        }, indent=indent)


def audit_grid(instance, grid, constants, family, jstar=None):
    """Audit a recorded iterate grid against the sufficient-decrease,
    subgradient-witness and (when jstar is given) linear-rate inequalities.

    ``grid`` has shape (K+1, N, d) with layer 0 the initialization.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 3 or grid.shape[1] != instance.N or grid.shape[2] != instance.d:
        raise InvalidArgumentError(
            f"grid must have shape (K+1, {instance.N}, {instance.d}), got {grid.shape}")
    if np.any(~np.isfinite(grid)):
        raise InvalidArgumentError("grid contains non-finite cells; record a full run")
    rho = constants.rho_for(family)
    beta = constants.beta_for(family)
    rate = constants.rate_for(family)
    layers = grid.shape[0] - 1
    report = AuditReport(family=family, layers=layers)
    objectives = [total_cost(instance, grid[k]).objective for k in range(layers + 1)]
    report.objectives = objectives
    gap0 = objectives[0] - jstar if jstar is not None else None
    for k in range(1, layers + 1):
        xk1, xk = grid[k - 1], grid[k]
        delta_sq = float(np.sum((xk - xk1) ** 2))
        scale = 1.0 + abs(objectives[k])
        dec = (objectives[k - 1] - objectives[k]) - rho * delta_sq
        report.decrease_slack.append(dec)
        if dec < -SLACK_TOL * scale:
            report.violations.append(
                {"layer": k, "inequality": "sufficient_decrease", "slack": dec})
        v = witness_layer(instance, constants, xk1, xk, family)
        vnorm = float(np.linalg.norm(v))
        wit = beta * np.sqrt(delta_sq) * (1.0 + SLACK_TOL) - vnorm
        report.witness_slack.append(wit)
        if wit < -SLACK_TOL * (1.0 + beta * np.sqrt(delta_sq)):
            report.violations.append(
                {"layer": k, "inequality": "subgradient_witness", "slack": wit})
        if gap0 is not None:
            envelope = rate ** k * gap0 * (1.0 + SLACK_TOL)
            rs = envelope - (objectives[k] - jstar)
            report.rate_slack.append(rs)
            if rs < -SLACK_TOL * (1.0 + abs(envelope)):
                report.violations.append(
                    {"layer": k, "inequality": "linear_rate", "slack": rs})
    return report
