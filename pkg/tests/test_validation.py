import numpy as np
import pytest

import timewarp as tw
from timewarp import (LossSpec, PenaltySpec, SolveParams, WarpFunction,
                      grid_search, split_times, train_test_losses, warp_errors)
from timewarp.validation import losses_of_warp

from conftest import warped_pair


class TestSplitTimes:
    def test_boundaries_in_both_sets(self):
        split = split_times(np.linspace(0, 1, 4), 0.5, seed=3)
        for pts in (split.t_train, split.t_test):
            assert pts[0] == 0.0 and pts[-1] == 1.0

    def test_four_points_half_split(self):
        # seed chosen so the two interior points split one each
        split = split_times(np.linspace(0, 1, 4), 0.5, seed=0)
        assert split.t_train.shape[0] == 3
        assert split.t_test.shape[0] == 3

    def test_deterministic_for_seed(self):
        t = np.linspace(0, 1, 100)
        a = split_times(t, 0.4, seed=7)
        b = split_times(t, 0.4, seed=7)
        assert np.array_equal(a.t_train, b.t_train)
        assert np.array_equal(a.t_test, b.t_test)

    def test_partition_invariants(self, rng):
        t = np.concatenate(([0.0], np.sort(rng.uniform(0.01, 0.99, 60)), [1.0]))
        for seed in range(20):
            split = split_times(t, 0.5, seed=seed)
            merged = np.sort(np.concatenate((split.t_train[1:-1], split.t_test[1:-1])))
            assert np.array_equal(merged, t[1:-1])
            inter = np.intersect1d(split.t_train, split.t_test)
            assert np.array_equal(inter, [0.0, 1.0])

    def test_fraction_concentration(self):
        t = np.linspace(0, 1, 1000)
        split = split_times(t, 0.3, seed=11)
        n_test = split.t_test.shape[0] - 2
        assert abs(n_test - 0.3 * 998) <= 0.05 * 300
        split = split_times(t, 0.7, seed=11)
        n_test = split.t_test.shape[0] - 2
        assert abs(n_test - 0.7 * 998) <= 0.05 * 700

    def test_degenerate_inputs(self):
        with pytest.raises(ValueError):
            split_times(np.linspace(0, 1, 3), 0.5, seed=0)
        with pytest.raises(ValueError):
            split_times(np.linspace(0, 1, 10), 1.0, seed=0)


class TestTrainTestLosses:
    def test_identity_pair_small(self):
        x, _, _ = warped_pair(n=120)
        split = split_times(x.knot_times, 0.5, seed=5)
        l_train, l_test = train_test_losses(x, x, PenaltySpec(),
                                            SolveParams(M=50, refinements=3), split)
        assert l_train <= 1e-3
        assert l_test <= 1e-3

    def test_over_regularization_forces_identity(self):
        x, y, _ = warped_pair(n=120)
        split = split_times(x.knot_times, 0.5, seed=5)
        pen = PenaltySpec(lambda_cum=1e6, lambda_inst=1e6)
        l_train, l_test = train_test_losses(x, y, pen,
                                            SolveParams(M=50, refinements=3), split)
        ident = WarpFunction.identity(x.knot_times)
        id_train, id_test = losses_of_warp(x, y, ident, pen.loss, split)
        assert l_train == pytest.approx(id_train, rel=0.05)
        assert l_test == pytest.approx(id_test, rel=0.05)

    def test_losses_nonnegative(self):
        x, y, _ = warped_pair(n=80)
        split = split_times(x.knot_times, 0.5, seed=2)
        l_train, l_test = train_test_losses(x, y, PenaltySpec(),
                                            SolveParams(M=30, refinements=1), split)
        assert l_train >= 0.0 and l_test >= 0.0


class TestWarpErrors:
    def test_exact_match_zero(self):
        t = np.linspace(0, 1, 50)
        warp = WarpFunction(t=t, tau=np.clip(t + 0.05 * np.sin(2 * np.pi * t), 0, 1))
        split = split_times(t, 0.5, seed=0)
        assert warp_errors(warp, warp, split) == (0.0, 0.0)

    def test_identity_pair_zero(self):
        t = np.linspace(0, 1, 50)
        ident = WarpFunction.identity(t)
        split = split_times(t, 0.5, seed=0)
        assert warp_errors(ident, lambda tt: np.asarray(tt), split) == (0.0, 0.0)

    def test_sine_displacement_quadrature(self):
        # epsilon ~ integral of (0.1 sin(pi t))^2 = 0.005
        t = np.linspace(0, 1, 400)
        ident = WarpFunction.identity(t)
        split = split_times(t, 0.5, seed=4)
        eps_train, eps_test = warp_errors(
            ident, lambda tt: np.asarray(tt) + 0.1 * np.sin(np.pi * np.asarray(tt)),
            split, LossSpec("squared_l2"))
        expected = 0.01 * 0.5
        assert eps_train == pytest.approx(expected, rel=0.10)
        assert eps_test == pytest.approx(expected, rel=0.10)


class TestGridSearch:
    def test_single_cell_matches_train_test_losses(self):
        x, y, _ = warped_pair(n=80)
        split = split_times(x.knot_times, 0.5, seed=9)
        pen = PenaltySpec()
        params = SolveParams(M=30, refinements=1)
        report = grid_search(x, y, pen, params, [0.01], [0.1], split)
        l_train, l_test = train_test_losses(x, y, pen, params, split)
        assert report.test_loss.shape == (1, 1)
        assert report.l_train == l_train
        assert report.l_test == l_test

    def test_cells_independent(self):
        x, y, _ = warped_pair(n=80)
        split = split_times(x.knot_times, 0.5, seed=9)
        params = SolveParams(M=30, refinements=1)
        lc = [0.001, 0.1]
        li = [0.01, 1.0]
        report = grid_search(x, y, PenaltySpec(), params, lc, li, split)
        pen = PenaltySpec().with_weights(lambda_cum=lc[1], lambda_inst=li[0])
        l_train, l_test = train_test_losses(x, y, pen, params, split)
        assert report.test_loss[1, 0] == l_test
        assert report.train_loss[1, 0] == l_train

    def test_all_cells_finite_for_feasible_problem(self):
        x, y, _ = warped_pair(n=60)
        split = split_times(x.knot_times, 0.5, seed=1)
        report = grid_search(x, y, PenaltySpec(), SolveParams(M=25, refinements=1),
                             np.logspace(-3, 0, 3), np.logspace(-3, 0, 3), split)
        assert np.all(np.isfinite(report.test_loss))

    def test_failed_cells_recorded_not_fatal(self, monkeypatch):
        x, y, _ = warped_pair(n=60)
        split = split_times(x.knot_times, 0.5, seed=1)
        import timewarp.validation as validation

        real_solve = validation.solve

        def flaky(xs, ys, pen, params, **kw):
            if pen.lambda_cum == 0.1:
                raise tw.NoFeasiblePathError("synthetic failure")
            return real_solve(xs, ys, pen, params, **kw)

        monkeypatch.setattr(validation, "solve", flaky)
        report = grid_search(x, y, PenaltySpec(), SolveParams(M=25, refinements=0),
                             [0.01, 0.1], [0.1], split)
        assert np.isinf(report.test_loss[1, 0])
        assert np.isfinite(report.test_loss[0, 0])
        assert report.best_cell == (0, 0)

    def test_tie_breaks_to_smallest_index(self, monkeypatch):
        x, y, _ = warped_pair(n=60)
        split = split_times(x.knot_times, 0.5, seed=1)
        import timewarp.validation as validation

        monkeypatch.setattr(validation, "losses_of_warp",
                            lambda *a, **k: (1.0, 1.0))
        report = grid_search(x, y, PenaltySpec(), SolveParams(M=25, refinements=0),
                             [0.01, 0.1], [0.1, 0.2], split)
        assert report.best_cell == (0, 0)

    def test_warp_error_matrices_when_truth_given(self):
        x, y, warp_true = warped_pair(n=80)
        split = split_times(x.knot_times, 0.5, seed=2)
        report = grid_search(x, y, PenaltySpec(), SolveParams(M=30, refinements=2),
                             [0.001, 0.1], [0.001, 0.1], split, warp_true=warp_true)
        assert report.eps_test_matrix.shape == (2, 2)
        assert report.eps_test is not None
        # regularization helps on warped pairs: the eps-argmin beats or ties the corner
        assert report.eps_test_matrix.min() <= report.eps_test_matrix[0, 0] + 1e-15

    def test_empty_grid_rejected(self):
        x, y, _ = warped_pair(n=60)
        split = split_times(x.knot_times, 0.5, seed=1)
        with pytest.raises(ValueError):
            grid_search(x, y, PenaltySpec(), SolveParams(), [], [0.1], split)


class TestParallelParity:
    def test_grid_search_n_jobs_identical(self):
        x, y, _ = warped_pair(n=60)
        split = split_times(x.knot_times, 0.5, seed=6)
        params = SolveParams(M=25, refinements=1)
        grids = ([0.001, 0.1], [0.01, 1.0])
        seq = grid_search(x, y, PenaltySpec(), params, *grids, split)
        par = grid_search(x, y, PenaltySpec(), params, *grids, split, n_jobs=4)
        assert np.array_equal(seq.test_loss, par.test_loss)
        assert seq.best_cell == par.best_cell
