import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

import gds
from gds import (
    GdsConfig,
    accept_reject,
    build_proposal,
    build_threshold_table,
    find_mode,
    run_gds,
    sample_threshold,
    sample_thresholds,
)
from gds.errors import AttemptLimitError, DominanceError
from gds.models import make_cauchy_normal

from helpers import GaussianToy, NormalNormal1D, ks_distance, piecewise_threshold_cdf


class StubRng:
    """Feeds a preset sequence to random(); standard_normal returns zeros."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size=None):
        if size is None:
            return self.values.pop(0)
        out = self.values[:size]
        del self.values[:size]
        return np.asarray(out)

    def standard_normal(self, size):
        return np.zeros(size)


class TestThresholdTable:
    def test_single_entry(self):
        table = build_threshold_table(np.array([1.0]))
        np.testing.assert_allclose(table.weights, [np.exp(-1.0)], rtol=1e-14)

    def test_two_entries_against_formula_and_quadrature(self):
        table = build_threshold_table(np.array([1.5, 0.5]))
        np.testing.assert_array_almost_equal(table.v, [0.5, 1.5], decimal=10)
        expected1 = 0.5 * (np.exp(-0.5) - np.exp(-1.5))
        expected2 = np.exp(-1.5)
        np.testing.assert_allclose(table.weights, [expected1, expected2], rtol=1e-9)
        # frozen values from the formula oracle
        np.testing.assert_allclose(table.weights[0], 0.1917002497821018, rtol=1e-9)
        np.testing.assert_allclose(table.weights[1], 0.22313016014842982, rtol=1e-9)
        # independent quadrature of q_M(v) exp(-v) over each segment
        quad1 = integrate.quad(lambda t: 0.5 * np.exp(-t), 0.5, 1.5)[0]
        quad2 = integrate.quad(lambda t: np.exp(-t), 1.5, np.inf)[0]
        np.testing.assert_allclose(table.weights, [quad1, quad2], rtol=1e-9)

    def test_saturated_ratios_concentrate_on_last_segment(self):
        table = build_threshold_table(np.zeros(100))
        assert table.weights[-1] > 0.999999
        assert np.all(np.diff(table.v) > 0)  # jitter separates ties

    def test_dominance_violation_rejected(self):
        with pytest.raises(DominanceError):
            build_threshold_table(np.array([0.5, -1e-6]))

    def test_tiny_negative_clamped(self):
        table = build_threshold_table(np.array([-5e-10, 1.0]))
        assert table.v[0] == 0.0

    def test_infinite_entries_dropped_with_counter(self):
        with pytest.warns(UserWarning, match="zero-density"):
            table = build_threshold_table(np.array([0.5, np.inf, 1.5]))
        assert table.M == 2
        assert table.dropped == 1

    def test_nan_rejected(self):
        with pytest.raises(ValueError, match="NaN"):
            build_threshold_table(np.array([0.5, np.nan]))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=30.0), min_size=1, max_size=50))
    def test_invariants(self, values):
        table = build_threshold_table(np.asarray(values))
        assert np.all(table.v >= 0.0)
        assert np.all(table.weights >= 0.0)
        assert 0.0 < table.total_weight <= 1.0 + 1e-12
        np.testing.assert_allclose(table.weights[-1], np.exp(-table.v[-1]), rtol=1e-12)


class TestSampleThreshold:
    def test_lower_endpoint_limit(self):
        table = build_threshold_table(np.array([0.5, 1.5]))
        v = sample_threshold(table, StubRng([0.0, 1e-12]))
        np.testing.assert_allclose(v, table.v[0], atol=1e-11)

    def test_memoryless_tail_mean(self):
        table = build_threshold_table(np.array([1.0]))
        draws = sample_thresholds(table, np.random.default_rng(0), 1_000_000)
        np.testing.assert_allclose(draws.mean(), 2.0, atol=0.004)

    def test_segment_frequencies(self):
        table = build_threshold_table(np.array([0.5, 1.5]))
        draws = sample_thresholds(table, np.random.default_rng(1), 1_000_000)
        frac_first = np.mean(draws < table.v[1])
        expected = table.weights[0] / table.total_weight
        assert abs(frac_first - expected) < 0.002

    def test_draws_stay_inside_segments(self):
        table = build_threshold_table(np.array([0.2, 0.9, 2.0]))
        rng = np.random.default_rng(2)
        for _ in range(500):
            v = sample_threshold(table, rng)
            assert v >= table.v[0]
            if v < table.v[-1]:
                i = np.searchsorted(table.v, v, side="right") - 1
                assert table.v[i] <= v < table.v[i + 1]

    def test_scalar_and_batch_against_closed_form_cdf(self):
        table = build_threshold_table(np.array([0.3, 1.1, 2.6]))
        cdf = piecewise_threshold_cdf(table)
        draws = sample_thresholds(table, np.random.default_rng(3), 1_000_000)
        assert ks_distance(draws, cdf) < 0.005


@pytest.fixture(scope="module")
def gaussian_setup():
    model = GaussianToy(center=np.array([0.4, -0.9]))
    mode = find_mode(model, np.zeros(2))
    return model, mode


class TestAcceptReject:
    def test_infinite_threshold_accepts_first(self, gaussian_setup):
        model, mode = gaussian_setup
        prop = build_proposal(mode, 3.0)
        draw = accept_reject(model, mode, prop, np.inf, np.random.default_rng(0))
        assert draw.attempts == 1

    def test_matched_proposal_always_first_attempt(self, gaussian_setup):
        model, mode = gaussian_setup
        prop = build_proposal(mode, 1.0)
        for seed in range(50):
            draw = accept_reject(model, mode, prop, 0.001, np.random.default_rng(seed))
            assert draw.attempts == 1

    def test_attempt_cap(self, gaussian_setup):
        model, mode = gaussian_setup
        prop = build_proposal(mode, 4.0)
        with pytest.raises(AttemptLimitError) as exc_info:
            accept_reject(model, mode, prop, 1e-12, np.random.default_rng(1), max_attempts=50)
        assert exc_info.value.attempts == 50
        assert exc_info.value.threshold == 1e-12

    def test_dominance_abort(self, gaussian_setup):
        model, mode = gaussian_setup
        prop = build_proposal(mode, 0.5)  # narrower than the target: Phi > 1 off mode
        with pytest.raises(DominanceError):
            accept_reject(model, mode, prop, 5.0, np.random.default_rng(2))

    def test_threshold_must_be_positive(self, gaussian_setup):
        model, mode = gaussian_setup
        prop = build_proposal(mode, 2.0)
        with pytest.raises(ValueError):
            accept_reject(model, mode, prop, 0.0, np.random.default_rng(0))

    def test_monotone_attempts_under_coupling(self, gaussian_setup):
        model, mode = gaussian_setup
        prop = build_proposal(mode, 4.0)
        for seed in range(20):
            lo = accept_reject(model, mode, prop, 0.05, np.random.default_rng(seed)).attempts
            hi = accept_reject(model, mode, prop, 0.40, np.random.default_rng(seed)).attempts
            assert hi <= lo


class TestRunGds:
    def test_config_validation(self):
        model = make_cauchy_normal()
        with pytest.raises(ValueError):
            run_gds(model, GdsConfig(M=20000, N=0, seed=1, scale=200.0))
        with pytest.raises(ValueError):
            run_gds(model, GdsConfig(M=50, N=10, seed=1, scale=200.0))
        with pytest.raises(ValueError):
            GdsConfig(M=1000, N=10, seed=-1, scale=1.0).validate()

    def test_cauchy_completes_and_accounts_attempts(self):
        model = make_cauchy_normal()
        run = run_gds(model, GdsConfig(M=2000, N=40, seed=1, scale=200.0))
        assert run.N == 40
        assert run.total_attempts == int(np.sum(run.attempts))
        assert 0.0 < run.acceptance_rate <= 1.0
        assert all(d.attempts >= 1 for d in run.draws)
        assert set(run.timings) >= {"mode", "tune", "proposals", "accept_reject", "total"}

    def test_worker_count_invariance(self):
        model = make_cauchy_normal()
        runs = [
            run_gds(model, GdsConfig(M=2000, N=16, seed=1, scale=200.0, workers=w))
            for w in (1, 3)
        ]
        np.testing.assert_array_equal(runs[0].thetas(), runs[1].thetas())
        assert [d.attempts for d in runs[0].draws] == [d.attempts for d in runs[1].draws]
        assert [d.threshold for d in runs[0].draws] == [d.threshold for d in runs[1].draws]

    def test_same_seed_bit_identical(self):
        model = make_cauchy_normal()
        a = run_gds(model, GdsConfig(M=2000, N=10, seed=9, scale=200.0))
        b = run_gds(model, GdsConfig(M=2000, N=10, seed=9, scale=200.0))
        np.testing.assert_array_equal(a.thetas(), b.thetas())
        np.testing.assert_array_equal(a.table.v, b.table.v)

    def test_normal_normal_posterior_ks(self):
        model = NormalNormal1D()
        run = run_gds(model, GdsConfig(M=1000, N=800, seed=3, pilot=200))
        mean, var = model.posterior()
        result = stats.kstest(run.thetas()[:, 0], lambda x: stats.norm.cdf(x, mean, np.sqrt(var)))
        assert result.pvalue > 0.01

    def test_draw_independence_lag1(self):
        model = NormalNormal1D()
        run = run_gds(model, GdsConfig(M=1000, N=600, seed=4, pilot=200))
        x = run.thetas()[:, 0]
        x = x - x.mean()
        acf1 = float(np.sum(x[1:] * x[:-1]) / np.sum(x * x))
        assert abs(acf1) <= 3.0 / np.sqrt(len(x))

    def test_tuned_run_records_scale(self):
        model = GaussianToy(center=np.zeros(2))
        run = run_gds(model, GdsConfig(M=500, N=10, seed=5, pilot=100))
        assert run.tuned
        assert run.scale == 1.25  # matched target: minimal rung 1.0 plus one margin rung

    def test_retune_error_on_fixed_bad_scale(self):
        model = make_cauchy_normal()
        with pytest.raises(gds.RetuneError):
            run_gds(model, GdsConfig(M=200, N=5, seed=1, scale=0.5))

    def test_cauchy_draws_show_tail_dependence(self):
        # level and population-mean decouple near the mode but ride the same
        # Cauchy tail; far draws must be strongly correlated
        model = make_cauchy_normal()
        run = run_gds(model, GdsConfig(M=5000, N=200, seed=4, scale=200.0))
        draws = run.thetas()
        far = np.linalg.norm(draws, axis=1) > 5.0
        assert far.sum() > 10
        corr = np.corrcoef(draws[far, 0], draws[far, 1])[0, 1]
        assert corr > 0.9
