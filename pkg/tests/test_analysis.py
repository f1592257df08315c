import numpy as np
import pytest

from conftest import random_instance
from soco.algorithms import apgd_offline, offline_optimum, policy_i_init
from soco.analysis import (BoundConstants, audit_grid, bound_rhag,
                           bound_rhapd, bound_rhapd_quadratic, bound_rhapd_s,
                           bound_rhgd, compute_constants, crossover_gamma,
                           init_regret_bound, regret, witness_layer)
from soco.costs import QuadraticSwitch, TrackingCost
from soco.errors import (InvalidArgumentError, InvalidStepSizeError,
                         UnsupportedCostError)
from soco.problem import FeasibleBox, ProblemInstance


def _tracking(n=6, gamma=2.0, w=3, seed=0):
    rng = np.random.default_rng(seed)
    box = FeasibleBox.interval(-10.0, 10.0, 1)
    return ProblemInstance([TrackingCost(rng.normal(size=1)) for _ in range(n)],
                           QuadraticSwitch(gamma), box, np.zeros(1), w)


class TestConstants:
    def test_hand_computed_values(self):
        inst = _tracking(gamma=2.0)
        tau = 0.25  # 1/tau = 4
        c = compute_constants(inst, tau=tau,
                              require=("general", "quadratic", "smooth"))
        assert c.rho == pytest.approx(0.5 + 4.0 - 2.0)
        assert c.beta_sq == pytest.approx(2.0 * (np.sqrt(5.0) * 2.0 + 4.0) ** 2)
        assert c.rho_q == pytest.approx(0.5 + 4.0 - 2.0)
        assert c.beta_sq_q == pytest.approx(
            2.0 * (4.0 + max((4.0 - 4.0) ** 2, (2.0 - 4.0) ** 2)))
        # rho_s = min over interior stages, last stage uses gamma/2
        assert c.rho_s == pytest.approx(min(4.0 - 0.5 + 2.0, 4.0 - 0.5 + 1.0))
        assert c.beta_sq_s == pytest.approx(2.0 * (1.0 + 2.0 + 4.0) ** 2)
        assert c.kappa == pytest.approx(0.0)  # mu = l = 1
        assert c.Q_f == pytest.approx(9.0)
        assert c.delta == pytest.approx((np.sqrt(c.beta_sq_s) + 1.0) * c.G)

    def test_default_tau(self):
        inst = _tracking(gamma=2.0)
        assert compute_constants(inst).tau == pytest.approx(0.4)

    def test_rates_in_unit_interval(self):
        c = compute_constants(_tracking(), require=("general", "quadratic", "smooth"))
        for r in (c.rate, c.rate_q, c.rate_s):
            assert 0.0 < r < 1.0

    def test_invalid_step_raises(self):
        inst = _tracking(gamma=2.0)
        with pytest.raises(InvalidStepSizeError) as exc:
            compute_constants(inst, tau=10.0, require=("quadratic",))
        assert "rho_q" in str(exc.value)
        with pytest.raises(InvalidArgumentError):
            compute_constants(inst, tau=0.0)

    def test_missing_family_raises(self, rng):
        lasso = random_instance(rng, family="lasso", switch="quadratic")
        with pytest.raises(UnsupportedCostError):
            compute_constants(lasso, require=("smooth",))
        c = compute_constants(lasso, require=("general",))
        with pytest.raises(UnsupportedCostError):
            c.rate_for("smooth")


class TestRegret:
    def test_plain(self):
        assert regret(5.0, 3.0) == 2.0

    def test_tiny_negative_clamps(self):
        assert regret(3.0 - 1e-12, 3.0) == 0.0

    def test_large_negative_warns(self):
        with pytest.warns(UserWarning):
            assert regret(2.0, 3.0) == 0.0


class TestBounds:
    def test_geometric_decay(self):
        inst = _tracking()
        c = compute_constants(inst, require=("general", "quadratic", "smooth"))
        for bound in (bound_rhapd(c, inst), bound_rhapd_quadratic(c, inst),
                      bound_rhapd_s(c, inst)):
            vals = [bound(w) for w in range(1, 6)]
            assert all(v > 0 for v in vals)
            assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_rhgd_rhag_formulas(self):
        inst = _tracking()
        c = compute_constants(inst, require=("smooth",))
        qf = c.Q_f
        assert bound_rhgd(c, inst, 10.0)(3) == pytest.approx(
            qf * (1.0 - 1.0 / qf) ** 3 * 10.0)
        assert bound_rhag(c, inst, 10.0)(3) == pytest.approx(
            2.0 * (1.0 - 1.0 / np.sqrt(qf)) ** 3 * 10.0)

    def test_init_regret_bound_dominates_measured(self):
        inst = _tracking(n=10, w=2, seed=3)
        c = compute_constants(inst)
        _, jstar = offline_optimum(inst)
        bound, measured = init_regret_bound(c, inst, jstar=jstar)
        assert measured is not None and bound >= measured


class TestCrossover:
    def test_closed_form(self):
        for mu, l in ((1.0, 1.0), (0.5, 2.0), (3.0, 7.0)):
            want = 0.25 * (mu + 3 * l + np.sqrt(mu ** 2 + 14 * mu * l + 65 * l ** 2))
            assert crossover_gamma(mu, l) == pytest.approx(want)

    def test_reference_value(self):
        assert crossover_gamma(1.0, 1.0) == pytest.approx(1.0 + np.sqrt(5.0))

    def test_invalid_inputs(self):
        with pytest.raises(InvalidArgumentError):
            crossover_gamma(0.0, 1.0)


class TestAudit:
    def _audited(self, seed=0):
        inst = _tracking(n=8, w=4, seed=seed)
        _, jstar = offline_optimum(inst)
        grid = apgd_offline(inst, policy_i_init(inst), inst.W)
        c = compute_constants(inst, require=("general", "quadratic"))
        return inst, grid, c, jstar

    def test_clean_run_passes(self):
        inst, grid, c, jstar = self._audited()
        for family in ("general", "quadratic"):
            rep = audit_grid(inst, grid, c, family, jstar=jstar)
            assert rep.passed and rep.layers == inst.W
            assert len(rep.rate_slack) == inst.W

    def test_corrupted_grid_fails(self):
        inst, grid, c, jstar = self._audited()
        bad = grid.copy()
        bad[-1] += 0.5  # push the last layer off the descent path
        rep = audit_grid(inst, bad, c, "quadratic", jstar=jstar)
        assert not rep.passed

    def test_shape_and_nan_rejection(self):
        inst, grid, c, _ = self._audited()
        with pytest.raises(InvalidArgumentError):
            audit_grid(inst, grid[:, :-1], c, "general")
        nan_grid = grid.copy()
        nan_grid[0, 0, 0] = np.nan
        with pytest.raises(InvalidArgumentError):
            audit_grid(inst, nan_grid, c, "general")

    def test_unknown_family_rejected(self):
        inst, grid, c, _ = self._audited()
        with pytest.raises(InvalidArgumentError):
            witness_layer(inst, c, grid[0], grid[1], "bogus")

    def test_report_json_roundtrip(self):
        import json
        inst, grid, c, jstar = self._audited()
        rep = audit_grid(inst, grid, c, "general", jstar=jstar)
        data = json.loads(rep.to_json())
        assert data["pass"] is True and data["layers"] == inst.W


def test_quadratic_witness_equals_general_witness():
    """On a quadratic switch the appendix-E closed form must agree with the
    generic appendix-C construction."""
    inst = _tracking(n=6, w=3, seed=5)
    grid = apgd_offline(inst, policy_i_init(inst), inst.W)
    c = compute_constants(inst, require=("general", "quadratic"))
    for k in range(1, inst.W + 1):
        vg = witness_layer(inst, c, grid[k - 1], grid[k], "general")
        vq = witness_layer(inst, c, grid[k - 1], grid[k], "quadratic")
        assert np.allclose(vg, vq, atol=1e-10)
