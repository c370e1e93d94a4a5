import numpy as np
import pytest

from eqsmooth import Budget, FanModel, GaussianSpec, InvalidInput, LinearModel, phi_closed_form
from eqsmooth.experiments import (
    _derived_seeds,
    game_table,
    generalization_rate,
    region_check,
)
from eqsmooth.solve import SolveConfig, solve
from eqsmooth.synthetic import sample_dataset

BUDGET = Budget(epsilon=0.25, dim=2)


def setup_model(seed=17):
    # data concentrated near the boundary: the smoothing defense has a large
    # exact coverage margin over playing nothing, so directional claims are
    # far outside sampling noise
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(2)
    w /= np.linalg.norm(w)
    model = LinearModel(w=w, b0=0.0)
    dist = GaussianSpec(mean=np.zeros(2), variances=np.full(2, 0.09))
    return model, dist


class TestGameTable:
    def test_clean_undefended_row_has_full_accuracy(self):
        # the defended clean row may dip below 1: the defense vector itself
        # can flip points within epsilon of the boundary
        model, dist = setup_model()
        rows = game_table(model, dist, n=60, budget=BUDGET, seed=5)
        clean = next(r for r in rows if (r.attack, r.defense) == ("none", "none"))
        assert clean.approximate_accuracy == 1.0
        assert clean.true_accuracy == 1.0
        assert clean.mean_attacker_utility == -1.0

    def test_smooth_defense_helps_under_attack(self):
        model, dist = setup_model()
        rows = {
            (r.attack, r.defense): r
            for r in game_table(model, dist, n=500, budget=BUDGET, seed=6)
        }
        assert (
            rows[("fgm", "smooth")].approximate_accuracy
            >= rows[("fgm", "none")].approximate_accuracy
        )
        assert (
            rows[("pgd", "smooth")].approximate_accuracy
            >= rows[("pgd", "none")].approximate_accuracy
        )

    def test_smooth_row_tracks_true_coverage(self):
        model, dist = setup_model()
        seed = 8
        rows = {
            (r.attack, r.defense): r
            for r in game_table(model, dist, n=400, budget=BUDGET, seed=seed)
        }
        train_seed, _, solve_seed = _derived_seeds(seed, 3)
        train = sample_dataset(model, dist, 400, BUDGET, train_seed)
        v = solve(train, SolveConfig(seed=solve_seed)).v_star
        expected = phi_closed_form(model, dist, v, BUDGET)
        assert rows[("fgm", "smooth")].approximate_accuracy == pytest.approx(
            expected, abs=0.08
        )

    def test_directional_claim_across_seeds(self):
        # smoothing never hurts the mean accuracy over seeds (single seeds
        # can dip by sampling noise on a disjoint test split)
        model, dist = setup_model()
        sums = {key: 0.0 for key in [("fgm", "smooth"), ("fgm", "none"),
                                     ("pgd", "smooth"), ("pgd", "none")]}
        for seed in range(10):
            for r in game_table(model, dist, n=80, budget=BUDGET, seed=seed):
                if (r.attack, r.defense) in sums:
                    sums[(r.attack, r.defense)] += r.approximate_accuracy
        assert sums[("fgm", "smooth")] >= sums[("fgm", "none")]
        assert sums[("pgd", "smooth")] >= sums[("pgd", "none")]

    def test_split_determinism_and_disjointness(self):
        model, dist = setup_model()
        train_seed, test_seed, _ = _derived_seeds(11, 3)
        train_a = sample_dataset(model, dist, 30, BUDGET, train_seed)
        train_b = sample_dataset(model, dist, 30, BUDGET, train_seed)
        test = sample_dataset(model, dist, 30, BUDGET, test_seed)
        for ra, rb in zip(train_a.records, train_b.records):
            assert np.array_equal(ra.point, rb.point)
        train_points = {tuple(r.point) for r in train_a.records}
        assert all(tuple(r.point) not in train_points for r in test.records)

    def test_all_metrics_in_range(self):
        model, dist = setup_model()
        for row in game_table(model, dist, n=50, budget=BUDGET, seed=13):
            assert 0.0 <= row.approximate_accuracy <= 1.0
            assert 0.0 <= row.true_accuracy <= 1.0
            assert -1.0 <= row.mean_attacker_utility <= 1.0


class TestGeneralizationRate:
    def test_gaps_are_nonnegative_and_bounded(self):
        model, dist = setup_model()
        report = generalization_rate(
            model, dist, BUDGET, ns=[20, 60], trials=3, seed=1
        )
        for p in report.points:
            assert 0.0 <= p.mean_gap <= 1.0

    def test_requires_increasing_ns(self):
        model, dist = setup_model()
        with pytest.raises(InvalidInput):
            generalization_rate(model, dist, BUDGET, ns=[50, 50], trials=2, seed=0)

    def test_slope_undefined_when_no_defense_needed(self):
        # a very confident model has full coverage for every defense: gaps
        # vanish and the log-log fit is flagged undefined
        model = LinearModel(w=np.array([1.0, 0.0]), b0=25.0)
        dist = GaussianSpec(mean=np.zeros(2), variances=np.ones(2))
        report = generalization_rate(model, dist, BUDGET, ns=[10, 30], trials=2, seed=2)
        assert not report.slope_defined
        assert report.slope is None


class TestFanGameTable:
    def test_piecewise_model_completes_all_rows(self):
        import math

        fan = FanModel(
            apex=np.zeros(2),
            angles=(0.7, 0.7 + math.pi / 2, 0.7 + math.pi, 0.7 + 3 * math.pi / 2),
            pieces=tuple(
                (np.asarray(w) / np.linalg.norm(w), b0)
                for w, b0 in [
                    ([1.0, 0.3], 0.1),
                    ([0.2, 1.0], -0.2),
                    ([1.0, -0.5], 0.05),
                    ([-0.4, 1.0], 0.0),
                ]
            ),
        )
        dist = GaussianSpec(mean=np.zeros(2), variances=np.ones(2))
        budget = Budget(epsilon=0.05, dim=2)
        # PGD iterates may cross sector seams; the table must still complete
        rows = game_table(fan, dist, n=40, budget=budget, seed=4)
        assert len(rows) == 6
        for r in rows:
            assert 0.0 <= r.approximate_accuracy <= 1.0
            assert 0.0 <= r.true_accuracy <= 1.0


class TestRegionCheck:
    def test_three_lines(self):
        report = region_check(3, seed=0)
        assert report.regions == 7
        assert report.formula == 7
        assert report.match

    def test_ten_lines(self):
        report = region_check(10, seed=1)
        assert report.regions == 56
        assert report.match

    def test_patterns_bounded_by_regions(self):
        for seed in range(8):
            report = region_check(6, seed=seed)
            assert report.patterns_within_bound
            assert report.distinct_patterns <= report.regions
