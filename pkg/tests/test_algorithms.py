import numpy as np
import pytest

from conftest import random_instance
from soco.algorithms import (ALGORITHMS, AlgorithmConfig, apgd_offline,
                             apgd_s_offline, fista_online, grad_h, grad_j,
                             mpc, offline_optimum, ogd_init, pgd_online,
                             policy_i_init, rhag, rham, rham_tau_stages,
                             rhapd, rhapd_s, rhgd)
from soco.costs import LassoCost, QuadraticSwitch, TrackingCost
from soco.errors import InvalidArgumentError, UnsupportedCostError
from soco.problem import FeasibleBox, ProblemInstance, total_cost


def _tracking(n=6, d=1, gamma=2.0, w=3, seed=0, box_half=10.0):
    rng = np.random.default_rng(seed)
    box = FeasibleBox.interval(-box_half, box_half, d)
    return ProblemInstance([TrackingCost(rng.normal(size=d)) for _ in range(n)],
                           QuadraticSwitch(gamma), box,
                           box.project(rng.normal(size=d)), w)


class TestInits:
    def test_policy_i(self):
        inst = _tracking()
        layer0 = policy_i_init(inst)
        assert np.allclose(layer0[0], inst.x0)
        assert np.allclose(layer0[1:], inst.minimizers()[:-1])

    def test_ogd_manual(self):
        inst = _tracking(n=3, d=1, seed=1)
        eta = 0.5
        layer0 = ogd_init(inst, eta)
        x = inst.x0.copy()
        assert np.allclose(layer0[0], x)
        for j in range(1, 3):
            x = inst.box.project(x - eta * inst.stage_costs[j - 1].gradient(x))
            assert np.allclose(layer0[j], x)

    def test_ogd_respects_box(self):
        inst = _tracking(box_half=0.1)
        layer0 = ogd_init(inst, 5.0)
        assert np.all(np.abs(layer0) <= 0.1 + 1e-12)


class TestTwins:
    def test_rhapd_online_matches_offline_grid(self, rng):
        for _ in range(5):
            inst = random_instance(rng, family="lasso", switch="quadratic")
            cfg = AlgorithmConfig(record_grid=True)
            online = rhapd(inst, cfg)
            offline = apgd_offline(inst, policy_i_init(inst), inst.W)
            assert np.array_equal(online.trajectory, offline[inst.W])
            assert np.array_equal(online.grid, offline)

    def test_rhapd_s_online_matches_offline_grid(self, rng):
        for _ in range(5):
            inst = random_instance(rng, family="tracking", switch="quadratic")
            online = rhapd_s(inst, AlgorithmConfig(record_grid=True))
            offline = apgd_s_offline(inst, ogd_init(inst), inst.W)
            assert np.array_equal(online.grid, offline)


class TestRham:
    def test_equals_rhapd_at_special_steps(self):
        inst = _tracking(n=8, w=4)
        a = rham(inst).trajectory
        b = rhapd(inst, AlgorithmConfig(tau_stages=rham_tau_stages(inst))).trajectory
        assert np.array_equal(a, b)

    def test_layer_monotonicity(self):
        """Offline block-minimization layers never increase J."""
        inst = _tracking(n=10, w=5)
        grid = apgd_offline(inst, policy_i_init(inst), inst.W,
                            tau_stages=rham_tau_stages(inst))
        objs = [total_cost(inst, grid[k]).objective for k in range(inst.W + 1)]
        assert all(objs[k] <= objs[k - 1] + 1e-12 for k in range(1, len(objs)))


class TestGradients:
    def test_grad_h_finite_diff(self, rng):
        inst = _tracking(n=4, d=2, seed=3)
        x = rng.normal(size=(4, 2))

        def H(flat):
            xx = flat.reshape(4, 2)
            return sum(inst.switching.value(xx[t], xx[t - 1] if t else inst.x0)
                       for t in range(4))
        g = grad_h(inst, x).ravel()
        flat = x.ravel()
        fd = np.array([(H(flat + 1e-6 * e) - H(flat - 1e-6 * e)) / 2e-6
                       for e in np.eye(8)])
        assert np.allclose(g, fd, atol=1e-5)

    def test_grad_j_adds_stage_gradients(self, rng):
        inst = _tracking(n=4, d=2, seed=4)
        x = rng.normal(size=(4, 2))
        diff = grad_j(inst, x) - grad_h(inst, x)
        for t in range(4):
            assert np.allclose(diff[t], inst.stage_costs[t].gradient(x[t]))


class TestBaselines:
    def test_pgd_w0_equals_init(self):
        inst = _tracking(w=1)
        # W layers are applied; with the same init, layer counts line up
        res = pgd_online(inst, AlgorithmConfig(record_grid=True))
        assert res.grid.shape == (2, inst.N, inst.d)
        assert np.allclose(res.grid[0], policy_i_init(inst))

    def test_fista_first_layer_equals_pgd(self):
        inst = _tracking(w=1)
        assert np.allclose(fista_online(inst).trajectory,
                           pgd_online(inst).trajectory)

    def test_trajectories_feasible(self, rng):
        inst = _tracking(n=8, d=2, w=4, box_half=0.5)
        for algo in (rhapd, rhapd_s, rham, pgd_online, fista_online, rhgd,
                     rhag, mpc):
            traj = algo(inst).trajectory
            assert np.all(traj >= inst.box.lower - 1e-12)
            assert np.all(traj <= inst.box.upper + 1e-12)

    def test_deeper_lookahead_helps(self):
        inst_small = _tracking(n=20, w=1, seed=7)
        inst_big = _tracking(n=20, w=10, seed=7)
        assert rhapd_s(inst_big).objective <= rhapd_s(inst_small).objective + 1e-9


class TestUnsupported:
    def test_rhapd_s_needs_smooth(self, rng):
        inst = random_instance(rng, family="lasso", switch="quadratic")
        with pytest.raises(UnsupportedCostError):
            rhapd_s(inst)

    def test_rhgd_rhag_need_smooth_quadratic(self, rng):
        lasso = random_instance(rng, family="lasso", switch="quadratic")
        with pytest.raises(UnsupportedCostError):
            rhgd(lasso)
        tracking_ss = random_instance(rng, family="tracking", switch="sum_squared")
        with pytest.raises(UnsupportedCostError):
            rhag(tracking_ss)

    def test_bad_tau_rejected(self):
        inst = _tracking()
        with pytest.raises(InvalidArgumentError):
            rhapd(inst, AlgorithmConfig(tau=-0.1))
        with pytest.raises(InvalidArgumentError):
            rhapd(inst, AlgorithmConfig(tau_stages=np.ones(inst.N + 1)))

    def test_unknown_init_rejected(self):
        inst = _tracking()
        with pytest.raises(InvalidArgumentError):
            pgd_online(inst, AlgorithmConfig(init="bogus"))


class TestFullHorizon:
    def test_offline_optimum_dominates_all(self, rng):
        inst = _tracking(n=10, w=5, seed=9)
        _, jstar = offline_optimum(inst)
        for name, fn in ALGORITHMS.items():
            assert fn(inst).objective >= jstar - 1e-9 * (1.0 + abs(jstar))

    def test_mpc_full_window_matches_offline(self):
        inst = _tracking(n=8, w=8, seed=11)
        traj, jstar = offline_optimum(inst)
        res = mpc(inst)
        assert res.objective == pytest.approx(jstar, rel=1e-6, abs=1e-8)

    def test_gamma_zero_decouples(self):
        rng = np.random.default_rng(5)
        box = FeasibleBox.interval(-10.0, 10.0, 1)
        costs = [TrackingCost(rng.normal(size=1)) for _ in range(5)]
        inst = ProblemInstance(costs, QuadraticSwitch(0.0), box,
                               np.zeros(1), 2)
        traj, jstar = offline_optimum(inst)
        assert np.allclose(traj, inst.minimizers(), atol=1e-9)
        assert jstar == pytest.approx(0.0, abs=1e-12)

    def test_offline_optimum_stationary(self, rng):
        inst = random_instance(rng, family="tracking", switch="quadratic")
        traj, jstar = offline_optimum(inst)
        g = grad_j(inst, traj)
        # projected-gradient fixed point on the box
        proj = np.clip(traj - 1e-3 * g, inst.box.lower, inst.box.upper)
        assert np.max(np.abs(proj - traj)) <= 1e-6


def test_run_result_metadata():
    inst = _tracking()
    res = rhapd(inst)
    assert res.algorithm == "rhapd"
    assert res.tau == pytest.approx(0.8 / inst.switching.gamma)
    assert res.init == "minimizer"
    assert res.wall_us > 0
    assert res.grid is None
