import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_instance
from eqsmooth import (
    Budget,
    Dataset,
    LinearizationRecord,
    SolveConfig,
    oracle_solve,
    phi_n,
    solve,
    surrogate,
    surrogate_gradient,
    surrogate_objective,
    uniform_ball,
)

BUDGET = Budget(epsilon=0.25, dim=2)


def record(f, grad):
    return LinearizationRecord(f_value=f, gradient=np.asarray(grad, dtype=float))


class TestSurrogate:
    def test_clamps_below(self):
        assert surrogate(-1.0) == 0.0

    def test_interior(self):
        assert surrogate(0.5) == 0.5

    def test_clamps_above(self):
        assert surrogate(2.0) == 1.0

    @given(st.floats(-100, 100))
    def test_lower_bounds_indicator(self, alpha):
        indicator = 1.0 if alpha >= 0 else 0.0
        assert surrogate(alpha) <= indicator


class TestSurrogateGradient:
    def test_flat_far_inside(self):
        # b - eps * ||c|| > 1: the margin exceeds the clamp everywhere in the ball
        ds = Dataset(records=(record(2.0, [0.1, 0.0]),), budget=BUDGET)
        for v in uniform_ball(np.random.default_rng(0), 10, BUDGET):
            assert np.array_equal(surrogate_gradient(v, ds), np.zeros(2))

    def test_active_band(self):
        ds = Dataset(records=(record(0.1, [1.0, 0.0]),), budget=BUDGET)
        g = surrogate_gradient(np.array([0.2, 0.0]), ds)
        assert np.allclose(g, [1.0, 0.0])

    def test_inactive_below(self):
        ds = Dataset(records=(record(0.1, [1.0, 0.0]),), budget=BUDGET)
        assert np.array_equal(surrogate_gradient(np.zeros(2), ds), np.zeros(2))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_soundness_surrogate_below_phi(self, seed):
        rng = np.random.default_rng(seed)
        ds = random_instance(rng, int(rng.integers(2, 15)), 2)
        for v in uniform_ball(rng, 5, ds.budget):
            assert surrogate_objective(v, ds) <= phi_n(v, ds) + 1e-12


class TestSolve:
    def test_no_defense_needed_when_all_offsets_nonnegative(self):
        ds = Dataset(
            records=(record(1.0, [1.0, 0.0]), record(-2.0, [0.0, 1.0])),
            budget=BUDGET,
        )
        result = solve(ds, SolveConfig(seed=0))
        assert result.phi_value == 1.0

    def test_two_halfspace_corner(self):
        ds = Dataset(
            records=(record(0.15, [1.0, 0.0]), record(0.15, [0.0, 1.0])),
            budget=BUDGET,
        )
        result = solve(ds, SolveConfig(seed=1))
        assert result.phi_value == 1.0
        assert np.all(np.asarray(result.v_star) >= 0.1 - 1e-9)

    def test_disjoint_halfspaces_cover_half(self):
        ds = Dataset(
            records=(record(0.1, [1.0, 0.0]), record(-0.1, [1.0, 0.0])),
            budget=BUDGET,
        )
        result = solve(ds, SolveConfig(seed=2))
        assert result.phi_value == 0.5

    def test_feasibility_and_exact_reporting(self):
        rng = np.random.default_rng(3)
        for seed in range(15):
            ds = random_instance(rng, int(rng.integers(2, 20)), int(rng.integers(2, 4)))
            result = solve(ds, SolveConfig(seed=seed))
            assert np.linalg.norm(result.v_star) <= ds.budget.epsilon * (1 + 1e-9)
            assert result.phi_value == phi_n(result.v_star, ds)
            assert result.phi_value == len(result.satisfied_indices) / ds.n
            assert list(result.satisfied_indices) == sorted(result.satisfied_indices)

    def test_determinism(self):
        ds = random_instance(np.random.default_rng(4), 12, 3)
        cfg = SolveConfig(seed=9, restarts=8, iterations=200)
        a = solve(ds, cfg)
        b = solve(ds, cfg)
        assert np.array_equal(a.v_star, b.v_star)
        assert a.phi_value == b.phi_value
        assert a.satisfied_indices == b.satisfied_indices
        assert a.restarts_log == b.restarts_log

    def test_restarts_log_length(self):
        ds = random_instance(np.random.default_rng(5), 6, 2)
        assert len(solve(ds, SolveConfig(restarts=7, iterations=50)).restarts_log) == 7

    def test_matches_oracle_on_small_instances(self):
        rng = np.random.default_rng(6)
        hits = 0
        for seed in range(20):
            ds = random_instance(rng, int(rng.integers(3, 11)), int(rng.integers(2, 4)))
            target = oracle_solve(ds).phi_value
            if solve(ds, SolveConfig(seed=seed)).phi_value == target:
                hits += 1
        assert hits >= 18
