"""Benchmark experiment definitions E1-E7, data generation, and sweeps.

All randomness flows through ``numpy.random.default_rng`` (PCG64) with an
explicit seed; seed and generator id are echoed into result metadata so
runs are reproducible bit-for-bit.
"""

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .algorithms import ALGORITHMS, AlgorithmConfig, offline_optimum
from .analysis import regret
from .costs import (DispatchCost, GroupLassoCost, LassoCost, QuadraticSwitch,
                    SumSquaredSwitch, TrackingCost)
from .errors import InvalidArgumentError, UnsupportedCostError
from .problem import FeasibleBox, ProblemInstance, path_length

PRNG_ID = "numpy.random.default_rng (PCG64)"

RESULTS_HEADER = ["experiment", "algorithm", "W", "seed", "regret", "objective",
                  "stage_total", "switch_total", "path_length", "jstar"]
TIMING_HEADER = ["experiment", "algorithm", "W", "seed", "wall_us"]
DISPATCH_HEADER = ["hour", "demand_mw", "supply_mw"]


@dataclass(frozen=True)
class ExperimentSpec:
    """Static definition of one benchmark experiment."""

    id: str
    d: int
    N: int
    gamma: float
    box_lower: tuple
    box_upper: tuple
    init: str                   # layer-0 policy for all algorithms
    roster: tuple               # default algorithm roster
    w_range: tuple              # default W sweep
    eta: float | None = None    # OGD initialization step (None -> 1/l)
    # rhapd step rule: "table" = tau = 0.8/gamma; "block_min" = the
    # alternating-minimization special case tau_t = 1/(2 gamma), tau_N = 1/gamma;
    # "<c>/gamma" = fixed damped step tau = c/gamma
    rhapd_steps: str = "table"
    params: dict = field(default_factory=dict)

    def box(self):
        return FeasibleBox(np.array(self.box_lower), np.array(self.box_upper))


_E5_U = (6, 0, 6, 0, 6, 6, 0, 6, 6, 0, 6, 6, 0, 6, 6, 6, 6, 6, 6, 6)

_REGISTRY = {
    "E1": ExperimentSpec(
        id="E1", d=1, N=100, gamma=10.0,
        box_lower=(-1e5,), box_upper=(1e5,), init="minimizer",
        roster=("rhapd", "rham", "pgd", "fista", "mpc"),
        w_range=tuple(range(1, 16)), rhapd_steps="0.4/gamma",
        params={"sigma": 1000.0, "M": 60, "lam": 50.0, "switch": "quadratic"}),
    "E2": ExperimentSpec(
        id="E2", d=2, N=100, gamma=2.0 * np.sqrt(2.0),
        box_lower=(-100.0, -10.0), box_upper=(100.0, 10.0), init="minimizer",
        roster=("rhapd", "pgd", "fista", "mpc"),
        w_range=tuple(range(1, 16)),
        params={"sigma": 100.0, "M": 1, "lam": 1.0, "switch": "sum_squared",
                "gamma_note": "prose value 2*sqrt(2) used; table prints 2"}),
    "E3": ExperimentSpec(
        id="E3", d=50, N=30, gamma=10.0,
        box_lower=(-1e7,) * 50, box_upper=(1e7,) * 50, init="minimizer",
        roster=("rhapd", "rham", "pgd", "fista", "mpc"),
        w_range=tuple(range(1, 11)),
        params={"sigma": 1.0, "n_groups": 9, "switch": "quadratic"}),
    "E4": ExperimentSpec(
        id="E4", d=1, N=100, gamma=25.0,
        box_lower=(-1e6,), box_upper=(1e6,), init="ogd",
        roster=("rhapd_s", "rhapd", "rhgd", "rhag", "fista", "mpc"),
        w_range=tuple(range(1, 16)), rhapd_steps="block_min",
        params={"gammas": (0.1, 25.0, 300.0), "switch": "quadratic"}),
    "E5": ExperimentSpec(
        id="E5", d=1, N=20, gamma=20.0,
        box_lower=(0.0,), box_upper=(6.0,), init="ogd", eta=0.4,
        roster=("rhapd_s", "rhapd", "rhgd", "rhag", "fista", "mpc"),
        w_range=tuple(range(1, 21)),
        params={"u": _E5_U, "switch": "quadratic"}),
    "E6": ExperimentSpec(
        id="E6", d=2, N=300, gamma=1.0,
        box_lower=(-1e6, -1e6), box_upper=(1e6, 1e6), init="ogd",
        roster=("rhapd_s", "rhapd", "rhgd", "rhag", "fista", "mpc"),
        w_range=(10,),
        params={"switch": "quadratic"}),
    "E7": ExperimentSpec(
        id="E7", d=3, N=168, gamma=1.0,
        box_lower=(0.0, 0.0, 0.0), box_upper=(np.inf, np.inf, np.inf),
        init="ogd",
        roster=("rhapd", "rhapd_s", "rhgd", "rhag", "mpc"),
        w_range=tuple(range(1, 11)),
        params={"xi": 1.2,
                "a": (1.0, 1.2, 1.4), "b": (15.0, 10.0, 6.0), "c": (10.0, 27.0, 21.0),
                "switch": "quadratic"}),
}


def get_spec(exp_id, gamma=None):
    """Look up an experiment; E4 accepts a gamma override from its set."""
    if exp_id not in _REGISTRY:
        raise InvalidArgumentError(
            f"unknown experiment {exp_id!r}; known: {sorted(_REGISTRY)}")
    spec = _REGISTRY[exp_id]
    if gamma is not None and gamma != spec.gamma:
        return ExperimentSpec(**{**spec.__dict__, "gamma": float(gamma)})
    return spec


def experiment_ids():
    return tuple(sorted(_REGISTRY))


def _e3_groups():
    """Nine overlapping groups of ten coordinates: {5i-4..5i+5}, 1-indexed."""
    return [np.arange(5 * i - 5, 5 * i + 5) for i in range(1, 10)]


def build_instance(spec, seed, W=1, dispatch=None):
    """Deterministic problem instance for (spec, seed).

    ``dispatch`` optionally supplies (demand, supply) series for E7;
    otherwise a seeded synthetic profile is generated.
    """
    rng = np.random.default_rng(seed)
    box = spec.box()
    p = spec.params
    if spec.id in ("E1", "E2"):
        costs = [LassoCost(rng.normal(0.0, p["sigma"], size=(p["M"], spec.d)), p["lam"])
                 for _ in range(spec.N)]
        switch = (QuadraticSwitch(spec.gamma) if spec.id == "E1"
                  else SumSquaredSwitch(spec.gamma, spec.d))
        x0 = np.zeros(spec.d)
    elif spec.id == "E3":
        groups = _e3_groups()
        costs = [GroupLassoCost(rng.normal(0.0, p["sigma"], size=spec.d), groups)
                 for _ in range(spec.N)]
        switch = QuadraticSwitch(spec.gamma)
        x0 = np.zeros(spec.d)
    elif spec.id == "E4":
        x0 = rng.normal(size=1)
        costs = [TrackingCost(rng.normal(size=1)) for _ in range(spec.N)]
        switch = QuadraticSwitch(spec.gamma)
    elif spec.id == "E5":
        costs = [TrackingCost(np.array([float(u)])) for u in p["u"]]
        switch = QuadraticSwitch(spec.gamma)
        x0 = np.zeros(1)
    elif spec.id == "E6":
        x0 = rng.normal(size=2)
        tk = 6.0 + 2.0 * np.pi * np.arange(spec.N) / (spec.N - 1)
        u = np.column_stack([
            12.0 * np.cos(tk - 6.0) - 4.0 * np.cos(6.0 * (tk - 6.0)),
            12.0 * np.sin(tk - 6.0) - 4.0 * np.cos(6.0 * (tk - 6.0)),
        ])
        costs = [TrackingCost(u[t]) for t in range(spec.N)]
        switch = QuadraticSwitch(spec.gamma)
    elif spec.id == "E7":
        if dispatch is None:
            demand, supply = generate_dispatch_profile(seed, spec.N)
        else:
            demand, supply = dispatch
            if len(demand) != spec.N:
                raise InvalidArgumentError(
                    f"dispatch profile has {len(demand)} rows, expected {spec.N}")
        costs = [DispatchCost(p["a"], p["b"], p["c"], p["xi"], demand[t], supply[t])
                 for t in range(spec.N)]
        switch = QuadraticSwitch(spec.gamma)
        x0 = np.zeros(3)
    else:  # pragma: no cover
        raise InvalidArgumentError(f"unknown experiment {spec.id!r}")
    return ProblemInstance(costs, switch, box, x0, W)


# ---------------------------------------------------------------------------
# dispatch data


def generate_dispatch_profile(seed, n=168):
    """Synthetic hourly week: sinusoidal daily demand plus a noisy,
    gusty wind supply, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    hours = np.arange(n)
    daily = np.sin(2.0 * np.pi * (hours % 24) / 24.0 - 0.5 * np.pi)
    weekly = np.sin(2.0 * np.pi * hours / 168.0)
    demand = 1200.0 + 250.0 * daily + 60.0 * weekly + rng.normal(0.0, 30.0, n)
    demand = np.maximum(demand, 50.0)
    gusts = rng.normal(0.0, 80.0, n)
    supply = np.maximum(250.0 + 120.0 * np.sin(2.0 * np.pi * hours / 56.0) + gusts, 0.0)
    return demand, supply


def write_dispatch_csv(path, demand, supply):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DISPATCH_HEADER)
        for h, (d, s) in enumerate(zip(demand, supply)):
            writer.writerow([h, format(float(d), ".17g"), format(float(s), ".17g")])


def ingest_dispatch_csv(path, expected_n=None):
    """Read an hourly demand/supply profile.

    Header must be exactly ``hour,demand_mw,supply_mw``.  Negative demand
    is rejected; negative supply is clamped to 0 with a warning.  Parse
    errors name the offending line number.
    """
    demand, supply = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidArgumentError(f"{path}: empty file") from None
        if [h.strip() for h in header] != DISPATCH_HEADER:
            raise InvalidArgumentError(
                f"{path}: line 1: expected header {','.join(DISPATCH_HEADER)}, "
                f"got {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise InvalidArgumentError(
                    f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
            try:
                d = float(row[1])
                s = float(row[2])
            except ValueError as exc:
                raise InvalidArgumentError(
                    f"{path}: line {lineno}: {exc}") from None
            if not np.isfinite(d) or not np.isfinite(s):
                raise InvalidArgumentError(
                    f"{path}: line {lineno}: non-finite value")
            if d < 0:
                raise InvalidArgumentError(
                    f"{path}: line {lineno}: negative demand {d:g}")
            if s < 0:
                warnings.warn(f"{path}: line {lineno}: negative supply clamped to 0")
                s = 0.0
            demand.append(d)
            supply.append(s)
    if expected_n is not None and len(demand) != expected_n:
        raise InvalidArgumentError(
            f"{path}: expected {expected_n} data rows, got {len(demand)}")
    return np.array(demand), np.array(supply)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepResult:
    spec: ExperimentSpec
    rows: list                    # dicts keyed by RESULTS_HEADER
    timings: list                 # dicts keyed by TIMING_HEADER
    unsupported: list             # (algorithm, reason)
    metadata: dict

    def medians(self, algorithm):
        """Median regret over seeds per W for one algorithm."""
        per_w = {}
        for row in self.rows:
            if row["algorithm"] == algorithm and np.isfinite(row["regret"]):
                per_w.setdefault(row["W"], []).append(row["regret"])
        return {w: float(np.median(v)) for w, v in sorted(per_w.items())}


def _algorithm_config(spec, instance, algorithm=None):
    eta = spec.eta
    if eta is None and instance.smooth:
        eta = 1.0 / instance.l
    tau_stages = None
    tau = None
    if algorithm == "rhapd" and spec.rhapd_steps != "table":
        if spec.rhapd_steps == "block_min":
            from .algorithms import rham_tau_stages
            tau_stages = rham_tau_stages(instance)
        else:
            tau = float(spec.rhapd_steps.partition("/")[0]) / spec.gamma
    return AlgorithmConfig(init=spec.init, eta=eta, tau=tau, tau_stages=tau_stages)


def _instance_with_w(base, W):
    inst = ProblemInstance(base.stage_costs, base.switching, base.box,
                           base.x0, W, G=base.G)
    inst._minimizers = base.minimizers()
    return inst


def run_sweep(spec, algorithms=None, w_range=None, seeds=(0,), dispatch=None,
              progress=None):
    """Run every (algorithm, W, seed) cell of the sweep.

    Unsupported algorithm/cost pairings produce a NaN row (kept in the CSV
    as an explicit marker) plus an entry in ``unsupported``; they never
    crash the sweep.  Rows are emitted in deterministic
    (algorithm-roster, W, seed) order.
    """
    algorithms = tuple(algorithms) if algorithms else spec.roster
    w_range = tuple(w_range) if w_range else spec.w_range
    for name in algorithms:
        if name not in ALGORITHMS:
            raise InvalidArgumentError(
                f"unknown algorithm {name!r}; known: {sorted(ALGORITHMS)}")
    rows, timings, unsupported = [], [], []
    per_seed = {}
    for seed in seeds:
        base = build_instance(spec, seed, W=max(w_range), dispatch=dispatch)
        _, jstar = offline_optimum(base)
        per_seed[seed] = (base, jstar, path_length(base))
    for name in algorithms:
        fn = ALGORITHMS[name]
        for W in w_range:
            for seed in seeds:
                base, jstar, plen = per_seed[seed]
                inst = _instance_with_w(base, W)
                row = {"experiment": spec.id, "algorithm": name, "W": W, "seed": seed,
                       "path_length": plen, "jstar": jstar}
                try:
                    res = fn(inst, _algorithm_config(spec, inst, name))
                except UnsupportedCostError as exc:
                    row.update(regret=np.nan, objective=np.nan,
                               stage_total=np.nan, switch_total=np.nan)
                    reason = str(exc)
                    if (name, reason) not in unsupported:
                        unsupported.append((name, reason))
                else:
                    row.update(regret=regret(res.objective, jstar),
                               objective=res.breakdown.objective,
                               stage_total=res.breakdown.stage_total,
                               switch_total=res.breakdown.switching_total)
                    timings.append({"experiment": spec.id, "algorithm": name,
                                    "W": W, "seed": seed, "wall_us": res.wall_us})
                rows.append(row)
                if progress is not None:
                    progress(row)
    metadata = {
        "experiment": spec.id,
        "parameters": {"d": spec.d, "N": spec.N, "gamma": spec.gamma,
                       "box_lower": list(spec.box_lower), "box_upper": list(spec.box_upper),
                       "init": spec.init, "eta": spec.eta,
                       "rhapd_steps": spec.rhapd_steps,
                       **{k: (list(v) if isinstance(v, tuple) else v)
                          for k, v in spec.params.items()}},
        "algorithms": list(algorithms),
        "w_range": list(w_range),
        "seeds": list(seeds),
        "prng": PRNG_ID,
        "library_version": __version__,
        "unsupported": [{"algorithm": a, "reason": r} for a, r in unsupported],
    }
    return SweepResult(spec=spec, rows=rows, timings=timings,
                       unsupported=unsupported, metadata=metadata)


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_results_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in RESULTS_HEADER])


def write_timing_csv(path, timings):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMING_HEADER)
        for row in timings:
            writer.writerow([_fmt(row[k]) for k in TIMING_HEADER])


def write_metadata_json(path, metadata):
    with open(path, "w") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_results_csv(path):
    """Read a results CSV back into row dicts with numeric fields parsed."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULTS_HEADER:
            raise InvalidArgumentError(
                f"{path}: expected header {','.join(RESULTS_HEADER)}")
        for row in reader:
            parsed = dict(row)
            parsed["W"] = int(row["W"])
            parsed["seed"] = int(row["seed"])
            for k in ("regret", "objective", "stage_total", "switch_total",
                      "path_length", "jstar"):
                parsed[k] = float(row[k])
            rows.append(parsed)
    return rows
