import numpy as np
import pytest

import timewarp as tw
from timewarp import (PenaltySpec, RegularizerSpec, SolveParams, WarpFunction,
                      distance, softmax_features, solve, solve_symmetric,
                      symmetric_distance)
from timewarp.solver import _softmax

from conftest import smooth_signal, warped_pair


class TestWarpFunction:
    def test_knot_round_trip_exact(self, rng):
        t = np.linspace(0, 1, 40)
        tau = np.clip(t + 0.05 * np.sin(2 * np.pi * t), 0, 1)
        tau[0], tau[-1] = 0.0, 1.0
        warp = WarpFunction(t=t, tau=tau)
        assert np.array_equal(warp(t), tau)

    def test_inverse_round_trip(self, rng):
        t = np.linspace(0, 1, 30)
        tau = t + 0.08 * np.sin(np.pi * t) * np.sin(3 * t)
        tau[0], tau[-1] = 0.0, 1.0
        warp = WarpFunction(t=t, tau=tau)
        probe = rng.uniform(0, 1, 200)
        assert np.allclose(warp.inverse()(warp(probe)), probe, atol=1e-12)

    def test_identity(self):
        t = np.linspace(0, 1, 10)
        warp = WarpFunction.identity(t)
        assert np.array_equal(warp.cumulative(), np.zeros(10))
        assert np.allclose(warp.slopes(), 1.0)

    def test_validation(self):
        with pytest.raises(ValueError, match="span"):
            WarpFunction(t=np.array([0.0, 0.5]), tau=np.array([0.0, 0.5]))
        with pytest.raises(ValueError, match="strictly increasing"):
            WarpFunction(t=np.array([0.0, 0.0, 1.0]), tau=np.array([0.0, 0.5, 1.0]))

    def test_inverse_requires_monotone(self):
        t = np.array([0.0, 0.5, 1.0])
        warp = WarpFunction(t=t, tau=np.array([0.0, 0.8, 1.0]))
        warp.inverse()
        bad = WarpFunction(t=t, tau=np.array([0.0, 0.9, 0.5]))
        with pytest.raises(ValueError):
            bad.inverse()


class TestSolve:
    def test_identity_recovery(self):
        x = smooth_signal(n=150)
        result = solve(x, x, params=SolveParams(M=60, refinements=3))
        assert np.max(np.abs(result.warp.tau - result.warp.t)) <= 0.01
        assert result.objective <= 1e-4

    def test_history_and_objective_contract(self):
        x, y, _ = warped_pair(n=100)
        params = SolveParams(M=40, refinements=3, early_stop_rel=0.0)
        result = solve(x, y, params=params)
        assert len(result.history) == 4
        assert result.objective == result.history[-1]
        c = result.components
        assert c.loss + c.cum_reg + c.inst_reg + c.inst2_reg == result.objective

    def test_history_non_increasing(self, rng):
        for _ in range(5):
            n = int(rng.integers(40, 80))
            x = tw.Signal.from_samples(np.linspace(0, 1, n), rng.normal(size=n))
            y = tw.Signal.from_samples(np.linspace(0, 1, n), rng.normal(size=n))
            pen = PenaltySpec(lambda_cum=float(rng.uniform(0, 0.2)),
                              lambda_inst=float(rng.uniform(0, 0.5)))
            result = solve(x, y, pen, SolveParams(M=30, refinements=4))
            assert np.all(np.diff(result.history) <= 1e-12)

    def test_zero_penalty_band_loss_zero_objective(self):
        x, y, _ = warped_pair(n=60)
        pen = PenaltySpec(loss=tw.LossSpec("band", band_eps=100.0),
                          lambda_cum=0.0, lambda_inst=0.0)
        result = solve(x, y, pen, SolveParams(M=30, refinements=1))
        assert result.objective == 0.0

    def test_warm_start_never_worse(self):
        x, y, _ = warped_pair(n=80)
        params = SolveParams(M=30, refinements=2)
        first = solve(x, y, params=params)
        again = solve(x, y, params=params, warm_start=first.warp)
        assert again.objective <= first.objective + 1e-12

    def test_stage_times_resolution(self):
        x = smooth_signal(n=8)
        y = smooth_signal(n=8)
        result = solve(x, y, params=SolveParams(M=20, refinements=0))
        assert result.warp.t.shape[0] == 16  # raised to the minimum
        result = solve(x, y, params=SolveParams(N=25, M=20, refinements=0))
        assert result.warp.t.shape[0] == 25
        y_big = smooth_signal(n=40)
        result = solve(x, y_big, params=SolveParams(M=20, refinements=0))
        assert np.array_equal(result.warp.t, y_big.knot_times)

    def test_explicit_stage_times(self):
        x, y, _ = warped_pair(n=50)
        st = np.concatenate(([0.0], np.sort(np.random.default_rng(3).uniform(0.05, 0.95, 20)), [1.0]))
        result = solve(x, y, params=SolveParams(M=25, refinements=1), stage_times=st)
        assert np.array_equal(result.warp.t, st)

    def test_boundary_margin_relaxes_endpoints(self):
        x, y, _ = warped_pair(n=60)
        params = SolveParams(M=40, refinements=2, beta=0.15)
        result = solve(x, y, params=params)
        assert 0.0 <= result.warp.tau[0] <= 0.15 + 1e-12
        assert 1.0 - 0.15 - 1e-12 <= result.warp.tau[-1] <= 1.0

    def test_timing_phases_reported(self):
        x = smooth_signal(n=40)
        result = solve(x, x, params=SolveParams(M=20, refinements=1))
        assert set(result.timing) == {"node_cost", "shortest_path", "total"}
        assert result.timing["total"] >= 0.0

    def test_regularization_path_monotone_on_fixed_grid(self):
        x, y, _ = warped_pair(n=60)
        params = SolveParams(M=40, refinements=0)
        prev_loss, prev_inst_raw = None, None
        for lam in (0.01, 0.1, 1.0):
            pen = PenaltySpec(lambda_cum=0.0, lambda_inst=lam)
            res = solve(x, y, pen, params)
            loss = res.components.loss
            inst_raw = res.components.inst_reg / lam
            if prev_loss is not None:
                assert loss >= prev_loss - 1e-12
                assert inst_raw <= prev_inst_raw + 1e-12
            prev_loss, prev_inst_raw = loss, inst_raw

    def test_second_order_params_flow(self):
        x, y, _ = warped_pair(n=40)
        pen = PenaltySpec(lambda_inst2=0.1)
        params = SolveParams(M=10, refinements=1, second_order=True)
        result = solve(x, y, pen, params)
        assert result.components.inst2_reg >= 0.0


class TestDistance:
    def test_self_distance_small(self):
        x = smooth_signal(n=120)
        assert distance(x, x, params=SolveParams(M=50, refinements=3)) <= 1e-3

    def test_generally_asymmetric(self):
        t = np.linspace(0, 1, 80)
        x = tw.Signal.from_samples(t, np.exp(-0.5 * ((t - 0.3) / 0.08) ** 2))
        y = tw.Signal.from_samples(t, 0.6 * np.exp(-0.5 * ((t - 0.6) / 0.2) ** 2))
        params = SolveParams(M=40, refinements=2)
        d_xy = distance(x, y, params=params)
        d_yx = distance(y, x, params=params)
        assert abs(d_xy - d_yx) > 1e-6

    def test_symmetric_distance_definitions(self):
        x, y, _ = warped_pair(n=60)
        params = SolveParams(M=30, refinements=1)
        d_xy = distance(x, y, params=params)
        d_yx = distance(y, x, params=params)
        assert symmetric_distance(x, y, params=params) == 0.5 * (d_xy + d_yx)
        assert symmetric_distance(x, y, params=params) == \
            symmetric_distance(y, x, params=params)
        assert symmetric_distance(x, x, params=params) == distance(x, x, params=params)

    def test_nonnegative(self):
        x, y, _ = warped_pair(n=50)
        assert distance(x, y, params=SolveParams(M=30, refinements=1)) >= 0.0


class TestSymmetricWarping:
    def test_mirror_constraint_exact(self):
        x, y, _ = warped_pair(n=60)
        pen = PenaltySpec(reg_inst=RegularizerSpec(slope_min=0.5, slope_max=1.5))
        warp_x, warp_y, objective = solve_symmetric(x, y, pen,
                                                    SolveParams(M=40, refinements=2))
        assert np.array_equal(warp_y.tau, 2.0 * warp_x.t - warp_x.tau)
        assert np.max(np.abs(warp_x.tau + warp_y.tau - 2.0 * warp_x.t)) == 0.0
        assert objective >= 0.0

    def test_identical_signals_near_identity(self):
        x = smooth_signal(n=100)
        pen = PenaltySpec(reg_inst=RegularizerSpec(slope_min=0.5, slope_max=1.5))
        warp_x, warp_y, _ = solve_symmetric(x, x, pen, SolveParams(M=50, refinements=3))
        assert np.max(np.abs(warp_x.tau - warp_x.t)) <= 0.01
        assert np.max(np.abs(warp_y.tau - warp_y.t)) <= 0.01

    def test_mirror_slopes(self):
        x, y, _ = warped_pair(n=50)
        pen = PenaltySpec(reg_inst=RegularizerSpec(slope_min=0.5, slope_max=1.5))
        warp_x, warp_y, _ = solve_symmetric(x, y, pen, SolveParams(M=30, refinements=1))
        assert np.allclose(warp_y.slopes(), 2.0 - warp_x.slopes(), atol=1e-9)
        if np.all(warp_x.slopes() <= 2.0):
            assert np.all(np.diff(warp_y.tau) >= 0.0)

    def test_inadmissible_box_rejected(self):
        x = smooth_signal(n=40)
        pen = PenaltySpec(reg_inst=RegularizerSpec(slope_min=0.1, slope_max=1.5))
        with pytest.raises(ValueError, match="s_min >= 2 - s_max"):
            solve_symmetric(x, x, pen)


class TestSoftmaxFeatures:
    def test_hand_formula(self):
        sigma = 0.7
        z = _softmax(np.array([0.0, sigma * np.log(3.0)]), sigma)
        assert z == pytest.approx([0.25, 0.75], rel=1e-12)

    def test_single_template(self):
        x = smooth_signal(n=40)
        z = softmax_features(x, [x], sigma=1.0,
                             params=SolveParams(M=20, refinements=0))
        assert z.shape == (1,)
        assert z[0] == 1.0

    def test_equal_distances_uniform(self):
        x = smooth_signal(n=40)
        y = smooth_signal(n=40, freqs=(2.0,), amps=(0.7,), phases=(0.3,))
        params = SolveParams(M=20, refinements=0)
        z = softmax_features(x, [y, y, y], sigma=0.5, params=params)
        assert np.allclose(z, 1.0 / 3.0, atol=1e-12)

    def test_normalized_and_positive(self):
        x = smooth_signal(n=40)
        templates = [smooth_signal(n=40, freqs=(f,), amps=(1.0,), phases=(0.0,))
                     for f in (1.0, 2.0, 3.0)]
        z = softmax_features(x, templates, sigma=0.1,
                             params=SolveParams(M=20, refinements=0))
        assert np.all(z > 0)
        assert z.sum() == pytest.approx(1.0, abs=1e-12)

    def test_overflow_guard(self):
        z = _softmax(np.array([0.0, 1e6]), sigma=1e-3)
        assert np.isfinite(z).all()
        assert z.sum() == pytest.approx(1.0, abs=1e-12)

    def test_positive_exponent_weights_farther_more(self):
        z = _softmax(np.array([0.0, 1.0]), sigma=1.0)
        assert z[1] > z[0]

    def test_bad_sigma(self):
        x = smooth_signal(n=40)
        with pytest.raises(ValueError):
            softmax_features(x, [x], sigma=0.0)
