import numpy as np
import pytest

from timewarp import GridInfeasibleError, build, compute_bounds, refine


def uniform(n):
    return np.linspace(0.0, 1.0, n)


class TestBounds:
    def test_hand_values(self):
        lower, upper = compute_bounds(uniform(3), 0.5, 1.5)
        # middle stage t=0.5
        assert lower[1] == pytest.approx(0.25, abs=1e-15)
        assert upper[1] == pytest.approx(0.75, abs=1e-15)

    def test_boundary_pins(self):
        lower, upper = compute_bounds(uniform(5), 0.5, 1.5)
        assert lower[0] == upper[0] == 0.0
        assert lower[-1] == upper[-1] == 1.0

    def test_margin_widens_boundaries(self):
        lower, upper = compute_bounds(uniform(5), 0.5, 1.5, beta=0.1)
        assert lower[0] == 0.0
        assert upper[0] == pytest.approx(0.1, abs=1e-15)
        assert lower[-1] == pytest.approx(0.9, abs=1e-15)
        assert upper[-1] == 1.0

    def test_clipped_to_unit_interval(self):
        lower, upper = compute_bounds(uniform(11), -0.5, 1.5)
        assert np.all(lower >= 0.0) and np.all(upper <= 1.0)
        assert np.all(lower <= upper)

    def test_infeasible_raises_with_stage(self):
        with pytest.raises(GridInfeasibleError) as err:
            compute_bounds(uniform(5), 0.9, 0.95)
        assert err.value.stage is not None

    def test_time_reversal_symmetry(self, rng):
        for _ in range(20):
            n = int(rng.integers(4, 30))
            interior = np.sort(rng.uniform(0.01, 0.99, size=n - 2))
            t = np.concatenate(([0.0], interior, [1.0]))
            s_min = rng.uniform(0.05, 0.9)
            s_max = rng.uniform(1.1, 5.0)
            lower, upper = compute_bounds(t, s_min, s_max)
            t_rev = np.concatenate(([0.0], np.sort(1.0 - interior), [1.0]))
            lower_r, upper_r = compute_bounds(t_rev, s_min, s_max)
            assert np.allclose(lower, (1.0 - upper_r)[::-1], atol=1e-12)
            assert np.allclose(upper, (1.0 - lower_r)[::-1], atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            compute_bounds(np.array([0.0, 0.5, 0.9]), 0.5, 1.5)  # no endpoint 1
        with pytest.raises(ValueError):
            compute_bounds(uniform(4), 1.5, 0.5)  # inverted box
        with pytest.raises(ValueError):
            compute_bounds(uniform(4), 0.5, 1.5, beta=1.0)


class TestBuild:
    def test_linear_spacing(self):
        t = uniform(3)
        bounds = (np.array([0.0, 0.25, 1.0]), np.array([0.0, 0.75, 1.0]))
        g = build(t, bounds, 3, 0.5, 1.5)
        assert np.allclose(g.candidates[1], [0.25, 0.5, 0.75], atol=1e-15)

    def test_degenerate_row_repeats(self):
        t = uniform(3)
        bounds = compute_bounds(t, 0.5, 1.5)
        g = build(t, bounds, 4, 0.5, 1.5)
        assert np.all(g.candidates[0] == 0.0)
        assert np.all(g.candidates[-1] == 1.0)

    def test_rows_sorted_and_in_bounds(self, rng):
        t = uniform(12)
        bounds = compute_bounds(t, 0.3, 2.5)
        g = build(t, bounds, 17, 0.3, 2.5)
        assert np.all(np.diff(g.candidates, axis=1) >= 0)
        assert np.all(g.candidates >= g.lower[:, None] - 1e-15)
        assert np.all(g.candidates <= g.upper[:, None] + 1e-15)

    def test_include_inserted_exactly(self, rng):
        t = uniform(10)
        bounds = compute_bounds(t, 0.3, 2.5)
        warm = np.clip(t + 0.05 * np.sin(2 * np.pi * t), bounds[0], bounds[1])
        g = build(t, bounds, 9, 0.3, 2.5, include=warm)
        for i in range(10):
            assert warm[i] in g.candidates[i]
        assert np.all(np.diff(g.candidates, axis=1) >= 0)

    def test_transition_infeasibility_diagnostic(self):
        t = uniform(3)
        bounds = (np.array([0.0, 0.4, 1.0]), np.array([0.0, 0.4, 1.0]))
        with pytest.raises(GridInfeasibleError, match="increase M"):
            build(t, bounds, 2, 0.9, 1.1)

    def test_negative_minimum_slope_allowed(self):
        t = uniform(9)
        bounds = compute_bounds(t, -0.5, 1.5)
        g = build(t, bounds, 7, -0.5, 1.5)
        assert g.candidates.shape == (9, 7)

    def test_single_candidate_requires_degenerate(self):
        t = uniform(3)
        bounds = compute_bounds(t, 0.5, 1.5)
        with pytest.raises(ValueError):
            build(t, bounds, 1, 0.5, 1.5)


class TestRefine:
    def test_hand_update(self):
        bounds = (np.array([0.0]), np.array([1.0]))
        lower, upper = refine(bounds, np.array([0.5]), 0.5, bounds)
        assert lower[0] == pytest.approx(0.25, abs=1e-15)
        assert upper[0] == pytest.approx(0.75, abs=1e-15)

    def test_clips_to_initial(self):
        bounds0 = (np.array([0.2]), np.array([0.8]))
        lower, upper = refine(bounds0, np.array([0.2]), 0.5, bounds0)
        assert lower[0] == 0.2
        assert upper[0] == pytest.approx(0.35, abs=1e-15)

    def test_degenerate_stage_unchanged(self):
        bounds0 = (np.array([0.3]), np.array([0.3]))
        lower, upper = refine(bounds0, np.array([0.3]), 0.15, bounds0)
        assert lower[0] == upper[0] == 0.3

    def test_contains_previous_optimum_and_contracts(self, rng):
        for _ in range(30):
            n = 15
            t = uniform(n)
            bounds0 = compute_bounds(t, 0.2, 3.0)
            tau = rng.uniform(bounds0[0], bounds0[1])
            bounds = bounds0
            for _ in range(3):
                new = refine(bounds, tau, 0.4, bounds0)
                assert np.all(new[0] <= tau + 1e-15)
                assert np.all(new[1] >= tau - 1e-15)
                assert np.all(new[1] - new[0] <= bounds[1] - bounds[0] + 1e-15)
                bounds = new

    def test_eta_validation(self):
        bounds = (np.zeros(2), np.ones(2))
        with pytest.raises(ValueError):
            refine(bounds, np.zeros(2), 1.0, bounds)
