import csv
import dataclasses
import math

import numpy as np
import pytest

from povblock.cli import benchmark_scenario
from povblock.errors import InvalidConfig, TooFewPaths
from povblock.mc_validator import (
    SimConfig,
    distribution_test,
    simulate,
    write_paths_csv,
)
from povblock.pov_engine import optimal_rate
from povblock.volume_curve import VolumeCurve

TOTAL_10 = benchmark_scenario("Total", 0.10).problem()
RHO_STAR = optimal_rate(TOTAL_10).rho_star


class TestSimulate:
    def test_zero_noise_matches_analytic_mean(self):
        config = SimConfig(n_paths=2, n_steps=10_000, seed=1, rho=RHO_STAR, zero_noise=True)
        result = simulate(TOTAL_10, config)
        rel = abs(result.sample_mean - result.analytic.mean) / result.analytic.mean
        assert rel <= 1e-6

    def test_zero_noise_first_order_convergence(self):
        errors = []
        for steps in (250, 500, 1000, 2000):
            config = SimConfig(n_paths=1, n_steps=steps, seed=1, rho=RHO_STAR, zero_noise=True)
            result = simulate(TOTAL_10, config)
            errors.append(abs(result.sample_mean - result.analytic.mean))
        for coarse, fine in zip(errors, errors[1:]):
            assert coarse / fine >= 1.8

    def test_inventory_conservation(self):
        for curve in (
            TOTAL_10.volume_curve,
            VolumeCurve.piecewise([(0.5, 6e6), (0.5, 2e6)]),
        ):
            problem = dataclasses.replace(TOTAL_10, volume_curve=curve)
            result = simulate(problem, SimConfig(n_paths=2, n_steps=333, seed=2, rho=0.171))
            assert result.residual_inventory == 0.0
            assert abs(result.total_executed - problem.q0) <= 1e-12 * problem.q0

    def test_fixed_seed_reproducibility(self):
        config = SimConfig(n_paths=3000, n_steps=100, seed=9, rho=RHO_STAR)
        first = simulate(TOTAL_10, config)
        second = simulate(TOTAL_10, config)
        assert np.array_equal(first.x_terminal, second.x_terminal)
        assert first.sample_mean == second.sample_mean
        other = simulate(TOTAL_10, SimConfig(n_paths=3000, n_steps=100, seed=10, rho=RHO_STAR))
        assert not np.array_equal(first.x_terminal, other.x_terminal)

    def test_shortfall_per_share_with_negligible_noise(self):
        # with machine-tiny volatility the realized shortfall per share is
        # the three deterministic cost terms of the mean
        quiet = dataclasses.replace(TOTAL_10, sigma_model=1e-300)
        result = simulate(quiet, SimConfig(n_paths=2, n_steps=10_000, seed=1, rho=RHO_STAR))
        shortfall = (TOTAL_10.notional - result.sample_mean) / TOTAL_10.q0
        imp = TOTAL_10.impact
        expected = imp.psi + imp.k_perm * TOTAL_10.q0 / 2.0 + imp.eta * RHO_STAR**imp.phi
        assert shortfall == pytest.approx(expected, rel=1e-3)

    def test_moderate_run_statistics(self):
        result = simulate(TOTAL_10, SimConfig(n_paths=20_000, n_steps=300, seed=11, rho=RHO_STAR))
        assert result.std_error_mean == pytest.approx(
            math.sqrt(result.sample_variance / result.n_paths), rel=1e-12
        )
        assert abs(result.z_score_mean) <= 3.0
        assert 0.97 <= result.variance_ratio <= 1.03
        assert distribution_test(result, confidence=0.99).passed

    def test_piecewise_curve_distribution(self):
        problem = dataclasses.replace(
            TOTAL_10, volume_curve=VolumeCurve.piecewise([(0.5, 6e6), (0.5, 2e6)])
        )
        result = simulate(problem, SimConfig(n_paths=20_000, n_steps=2000, seed=3, rho=0.171))
        assert distribution_test(result, confidence=0.99).passed

    def test_utility_estimate_matches_exponential_form(self):
        # oracle: -exp(-gamma * (mean - gamma/2 * variance)) via the normal mgf
        result = simulate(TOTAL_10, SimConfig(n_paths=50_000, n_steps=300, seed=5, rho=RHO_STAR))
        dist = result.analytic
        closed = -math.exp(-TOTAL_10.gamma * dist.mean + 0.5 * TOTAL_10.gamma**2 * dist.variance)
        y = -np.exp(-TOTAL_10.gamma * result.x_terminal)
        se_log = float(np.std(y, ddof=1) / np.sqrt(result.n_paths) / abs(np.mean(y)))
        diff = abs(math.log(-result.utility_estimate) - math.log(-closed))
        assert diff <= 3.0 * se_log

    def test_invalid_config(self):
        with pytest.raises(InvalidConfig):
            SimConfig(n_paths=0, n_steps=10, seed=1, rho=0.1)
        with pytest.raises(InvalidConfig):
            SimConfig(n_paths=10, n_steps=0, seed=1, rho=0.1)
        with pytest.raises(InvalidConfig):
            SimConfig(n_paths=10, n_steps=10, seed=1, rho=0.0)


@pytest.fixture(scope="module")
def result():
    return simulate(TOTAL_10, SimConfig(n_paths=20_000, n_steps=300, seed=11, rho=RHO_STAR))


class TestDistributionTest:
    def test_correct_simulator_passes(self, result):
        report = distribution_test(result, confidence=0.99)
        assert report.passed
        assert report.mean_ok and report.variance_ok
        assert report.skewness_ok and report.kurtosis_ok
        assert report.z_critical == pytest.approx(2.5758, abs=1e-4)

    def test_doubled_variance_fails(self, result):
        broken = dataclasses.replace(result, variance_ratio=2.0)
        report = distribution_test(broken, confidence=0.99)
        assert not report.variance_ok
        assert not report.passed

    def test_too_few_paths(self):
        result = simulate(TOTAL_10, SimConfig(n_paths=10, n_steps=50, seed=1, rho=RHO_STAR))
        with pytest.raises(TooFewPaths):
            distribution_test(result, confidence=0.99)

    def test_bad_confidence(self, result):
        with pytest.raises(InvalidConfig):
            distribution_test(result, confidence=1.5)

    def test_moment_bounds_shrink_with_paths(self, result):
        report = distribution_test(result, confidence=0.99)
        assert report.skewness_bound == pytest.approx(4 * math.sqrt(6 / result.n_paths))
        assert report.kurtosis_bound == pytest.approx(4 * math.sqrt(24 / result.n_paths))


def test_write_paths_csv(tmp_path):
    result = simulate(TOTAL_10, SimConfig(n_paths=50, n_steps=20, seed=4, rho=RHO_STAR))
    out = tmp_path / "paths.csv"
    write_paths_csv(result, out)
    with open(out, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["path_id", "x_terminal"]
    assert len(rows) == 51
    values = np.array([float(x) for _, x in rows[1:]])
    assert np.array_equal(values, result.x_terminal)
