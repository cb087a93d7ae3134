"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -s`` to see
them all). Tolerances are frozen here, not tuned elsewhere.
"""

import dataclasses
import math
import time
import warnings

import numpy as np
from scipy.optimize import minimize_scalar

from povblock.block_pricing import (
    RATIO_LOWER_BOUND,
    is_premium,
    pov_premium,
    premium_ratio_bound,
)
from povblock.cli import (
    BENCHMARK_CASES,
    BPS_TOLERANCE,
    EXPECTED_TABLE,
    RATE_TOLERANCE_PP,
    benchmark_scenario,
    compute_benchmark_table,
)
from povblock.mc_validator import SimConfig, distribution_test, simulate
from povblock.model_core import ImpactParams, LiquidationProblem
from povblock.pov_engine import (
    HighParticipationWarning,
    optimal_rate,
    optimal_rate_closed_form,
    optimal_rate_numeric,
)
from povblock.scenario import with_parameter
from povblock.volume_curve import VolumeCurve
from test_volume_curve import quad_risk_integral


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number} [{'PASS' if ok else 'FAIL'}] {detail}")


def _random_flat_problem(rng: np.random.Generator) -> LiquidationProblem:
    """Flat-curve problem with every parameter log-uniform over 4 decades."""

    def decade(lo: float) -> float:
        return lo * 10.0 ** rng.uniform(0.0, 4.0)

    return LiquidationProblem(
        q0=decade(1e3),
        gamma=decade(1e-8),
        sigma_model=decade(5e-2),
        price_s0=decade(1e-1),
        volume_curve=VolumeCurve.flat(decade(1e3)),
        impact=ImpactParams(
            eta=decade(1e-3),
            phi=decade(1e-2),
            psi=0.0 if rng.uniform() < 0.25 else decade(1e-5),
            k_perm=0.0 if rng.uniform() < 0.25 else decade(1e-10),
        ),
    )


def test_criterion_1_benchmark_table():
    start = time.perf_counter()
    computed = compute_benchmark_table()
    elapsed = time.perf_counter() - start

    worst_rate = max(
        abs(got - want)
        for got, want in zip(computed["rate_percent"], EXPECTED_TABLE["rate_percent"])
    )
    worst_bps = max(
        abs(got - want)
        for key in computed
        if key != "rate_percent"
        for got, want in zip(computed[key], EXPECTED_TABLE[key])
    )
    ok = worst_rate <= RATE_TOLERANCE_PP and worst_bps <= BPS_TOLERANCE and elapsed < 1.0
    _report(
        1,
        ok,
        f"benchmark table: max rate dev {worst_rate:.3f} pp (tol {RATE_TOLERANCE_PP}), "
        f"max premium dev {worst_bps:.3f} bps (tol {BPS_TOLERANCE}), {elapsed:.3f}s",
    )
    assert worst_rate <= RATE_TOLERANCE_PP
    assert worst_bps <= BPS_TOLERANCE
    assert elapsed < 1.0


def test_criterion_2_numeric_matches_closed_form():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HighParticipationWarning)
        for _ in range(1000):
            problem = _random_flat_problem(rng)
            closed = optimal_rate_closed_form(problem)
            bracket = (closed.rho_star * 1e-3, closed.rho_star * 1e3)
            numeric = optimal_rate_numeric(problem, bracket=bracket)
            worst = max(worst, abs(numeric.rho_star - closed.rho_star) / closed.rho_star)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 30.0
    _report(
        2,
        ok,
        f"numeric vs closed form over 1000 random problems: "
        f"worst relative error {worst:.2e} (tol 1e-6), {elapsed:.1f}s",
    )
    assert worst <= 1e-6
    assert elapsed < 30.0


def test_criterion_3_monte_carlo_distribution():
    problem = benchmark_scenario("Total", 0.10).problem()
    rho_star = optimal_rate(problem).rho_star
    start = time.perf_counter()
    result = simulate(
        problem, SimConfig(n_paths=200_000, n_steps=500, seed=42, rho=rho_star)
    )
    elapsed = time.perf_counter() - start
    report = distribution_test(result, confidence=0.99)

    mean_ok = abs(result.sample_mean - result.analytic.mean) <= 3.0 * result.std_error_mean
    variance_ok = 0.98 <= result.variance_ratio <= 1.02
    moments_ok = report.skewness_ok and report.kurtosis_ok
    ok = mean_ok and variance_ok and moments_ok and elapsed < 30.0
    _report(
        3,
        ok,
        f"Monte Carlo vs analytic law: |z|={abs(result.z_score_mean):.2f} (<=3), "
        f"variance ratio {result.variance_ratio:.4f} (in [0.98, 1.02]), "
        f"skew {result.sample_skewness:.4f}/kurt {result.sample_excess_kurtosis:.4f} "
        f"within 99% moment bounds, {elapsed:.1f}s",
    )
    assert mean_ok
    assert variance_ok
    assert moments_ok
    assert elapsed < 30.0


def test_criterion_4_ratio_bound():
    res = minimize_scalar(
        premium_ratio_bound, bounds=(0.01, 10.0), method="bounded",
        options={"xatol": 1e-10},
    )
    min_value, min_at = float(res.fun), float(res.x)
    target_value = math.e * math.log(3.0) / (2.0 * math.sqrt(3.0))
    target_at = (2.0 - math.log(3.0)) / (3.0 * math.log(3.0) - 2.0)
    location_ok = abs(min_at - target_at) <= 1e-3
    value_ok = abs(min_value - target_value) <= 1e-3

    rng = np.random.default_rng(404)
    violations = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HighParticipationWarning)
        for _ in range(10_000):
            problem = _random_flat_problem(rng)
            ratio = is_premium(problem) / pov_premium(problem).premium_total
            bound = premium_ratio_bound(problem.impact.phi)
            if ratio < bound - 1e-12 or bound < RATIO_LOWER_BOUND - 1e-12:
                violations += 1

    ok = location_ok and value_ok and violations == 0
    _report(
        4,
        ok,
        f"ratio bound: min g = {min_value:.6f} at phi = {min_at:.6f} "
        f"(targets {target_value:.6f} at {target_at:.6f}); "
        f"{violations} violations in 10000 random problems",
    )
    assert location_ok
    assert value_ok
    assert violations == 0


def test_criterion_5_decomposition_identities():
    problems = [
        benchmark_scenario(stock, fraction).problem()
        for stock, fraction in BENCHMARK_CASES
    ]
    rng = np.random.default_rng(505)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HighParticipationWarning)
        problems += [_random_flat_problem(rng) for _ in range(1000)]

        worst_sum = 0.0
        worst_risk = 0.0
        for problem in problems:
            report = pov_premium(problem)
            parts = (
                report.permanent_component
                + report.instantaneous_component
                + report.risk_component
            )
            worst_sum = max(
                worst_sum, abs(parts - report.premium_total) / report.premium_total
            )
            # risk = phi * (instantaneous - psi*q0), checked as
            # risk/phi + psi*q0 = instantaneous to avoid the catastrophic
            # cancellation a literal subtraction suffers when psi*q0
            # dominates the nonlinear execution cost
            lhs = report.risk_component / problem.impact.phi + problem.impact.psi * problem.q0
            worst_risk = max(
                worst_risk,
                abs(lhs - report.instantaneous_component) / report.instantaneous_component,
            )
    ok = worst_sum <= 1e-12 and worst_risk <= 1e-12
    _report(
        5,
        ok,
        f"decomposition identities over {len(problems)} priced scenarios: "
        f"sum residual {worst_sum:.2e}, risk identity residual {worst_risk:.2e} "
        f"(tol 1e-12)",
    )
    assert worst_sum <= 1e-12
    assert worst_risk <= 1e-12


def test_criterion_6_comparative_statics():
    base = benchmark_scenario("Total", 0.10)
    checks = {}

    def rates_over(param, lo, hi):
        values = np.geomspace(lo, hi, 20)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HighParticipationWarning)
            return values, [
                optimal_rate(with_parameter(base, param, float(v)).problem()).rho_star
                for v in values
            ]

    _, rates = rates_over("gamma", 3e-7, 3e-5)
    checks["rho* increasing in gamma"] = all(b > a for a, b in zip(rates, rates[1:]))
    _, rates = rates_over("annualized_vol", 0.05, 0.8)
    checks["rho* increasing in sigma"] = all(b > a for a, b in zip(rates, rates[1:]))
    _, rates = rates_over("q0", 4e4, 4e6)
    checks["rho* increasing in q0"] = all(b > a for a, b in zip(rates, rates[1:]))
    _, rates = rates_over("eta", 0.01, 1.0)
    checks["rho* decreasing in eta"] = all(b < a for a, b in zip(rates, rates[1:]))

    advs, rates = rates_over("adv", 4e5, 4e7)
    speeds = [rho * v for rho, v in zip(rates, advs)]
    checks["traded speed increasing in V"] = all(b > a for a, b in zip(speeds, speeds[1:]))

    problem = base.problem()
    reference = optimal_rate(problem).rho_star
    invariant = True
    for psi in np.linspace(0.0, 0.1, 20):
        moved = dataclasses.replace(
            problem, impact=dataclasses.replace(problem.impact, psi=float(psi))
        )
        invariant &= optimal_rate(moved).rho_star == reference
    for k in np.linspace(0.0, 1e-4, 20):
        moved = dataclasses.replace(
            problem, impact=dataclasses.replace(problem.impact, k_perm=float(k))
        )
        invariant &= optimal_rate(moved).rho_star == reference
    checks["rho* exactly invariant in psi and k"] = invariant

    ok = all(checks.values())
    failed = [name for name, passed in checks.items() if not passed]
    _report(
        6,
        ok,
        "comparative statics on 20-point sweeps: "
        + ("all monotonicities hold" if ok else f"failed: {failed}"),
    )
    assert ok, failed


def test_criterion_7_piecewise_integrals():
    rng = np.random.default_rng(707)
    worst_quad = 0.0
    worst_residual = 0.0
    for _ in range(100):
        n_pieces = int(rng.integers(2, 9))
        raw = rng.uniform(0.2, 1.0, size=n_pieces)
        durations = list(raw / raw.sum())
        durations[-1] = 1.0 - sum(durations[:-1])
        rates = rng.uniform(0.1, 10.0, size=n_pieces) * 10.0 ** rng.uniform(3.0, 6.0)
        curve = VolumeCurve.piecewise(list(zip(durations, rates)))

        rho = float(rng.uniform(0.02, 1.5))
        q0 = float(rng.uniform(0.5, 15.0)) * rho * curve.daily_volume

        exact = curve.risk_integral(rho, q0)
        reference = quad_risk_integral(curve, rho, q0)
        worst_quad = max(worst_quad, abs(exact - reference) / reference)

        horizon = curve.completion_time(rho, q0)
        worst_residual = max(
            worst_residual, abs(rho * curve.cum_volume(horizon) - q0) / q0
        )

    ok = worst_quad <= 1e-10 and worst_residual <= 1e-12
    _report(
        7,
        ok,
        f"piecewise integrals over 100 random profiles: risk integral vs quadrature "
        f"{worst_quad:.2e} (tol 1e-10), completion residual {worst_residual:.2e} "
        f"(tol 1e-12)",
    )
    assert worst_quad <= 1e-10
    assert worst_residual <= 1e-12
