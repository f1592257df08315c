"""soco: solvers and benchmarks for smoothed online convex optimization.

The library implements receding-horizon proximal solvers for problems of
the form min sum_t f_t(x_t) + g(x_t, x_{t-1}) over a box, together with
baseline first-order methods, a theory-constant/bound calculator with
machine-checkable lemma audits, and a benchmark harness (experiments
E1-E7) with CSV/JSON artifacts.
"""

__version__ = "1.0.0"

from .errors import (ConvergenceError, DimensionMismatchError,  # noqa: F401
                     InvalidArgumentError, InvalidStepSizeError, NumericError,
                     SocoError, UnsupportedCostError)
from .problem import (CostBreakdown, FeasibleBox, ProblemInstance,  # noqa: F401
                      path_length, total_cost)
from .costs import (DispatchCost, GroupLassoCost, LassoCost,  # noqa: F401
                    QuadraticSwitch, SumSquaredSwitch, TrackingCost)
from .algorithms import (ALGORITHMS, AlgorithmConfig, RunResult,  # noqa: F401
                         apgd_offline, apgd_s_offline, fista_online, mpc,
                         offline_optimum, ogd_init, pgd_online, policy_i_init,
                         rhag, rham, rhapd, rhapd_s, rhgd)
from .analysis import (AuditReport, BoundConstants, audit_grid,  # noqa: F401
                       bound_rhapd, bound_rhapd_quadratic, bound_rhapd_s,
                       compute_constants, crossover_gamma, init_regret_bound,
                       regret)
