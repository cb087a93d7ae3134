"""Monte Carlo validation of the analytic terminal-cash distribution.

Simulates the price and cash dynamics under a constant participation rate
with an Euler scheme and compares sample statistics of the terminal cash
against the analytic normal law. The simulator deliberately marches the
raw dynamics step by step instead of reusing the analytic algebra, so an
error in the closed forms would show up as a failed comparison.

Scheme, on a uniform grid over [0, T] with a fitted final partial step:

    S[i+1] = S[i] + sigma * sqrt(dt[i]) * xi[i] - k * v[i] * dt[i]
    X      accumulates (v[i] * S[i] - V[i] * L(rho) - psi * v[i]) * dt[i]

with v[i] = rho * V(t[i]) and xi[i] iid standard normal. The executed
volume of the last step is set to the exact remaining inventory, so every
path finishes with residual inventory exactly zero. The trading schedule
(grid, rates, inventory) is deterministic and shared by all paths; with a
fixed seed the whole result is bit-reproducible because paths are drawn
from one counter-based generator in fixed block order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np
from scipy.stats import chi2

from .errors import InvalidConfig, TooFewPaths
from .model_core import LiquidationProblem
from .pov_engine import CashDistribution, terminal_cash_distribution

#: paths simulated per vectorized block; fixed so the draw order never varies
_BLOCK_PATHS = 16384

#: minimum sample size for the distribution test asymptotics
_MIN_PATHS_FOR_TEST = 1000


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings: path count, step count, seed, and the rate."""

    n_paths: int
    n_steps: int
    seed: int
    rho: float
    zero_noise: bool = False

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise InvalidConfig(f"n_paths must be >= 1, got {self.n_paths}")
        if self.n_steps < 1:
            raise InvalidConfig(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.rho > 0.0:
            raise InvalidConfig(f"rho must be > 0, got {self.rho}")


@dataclass(frozen=True, eq=False)
class SimResult:
    """Sample statistics of the simulated terminal cash, with the analytic law."""

    sample_mean: float
    sample_variance: float
    std_error_mean: float
    analytic: CashDistribution
    z_score_mean: float
    variance_ratio: float
    utility_estimate: float
    sample_skewness: float
    sample_excess_kurtosis: float
    n_paths: int
    total_executed: float
    residual_inventory: float
    x_terminal: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DistributionTestReport:
    """Outcome of the mean / variance / moment checks at a confidence level."""

    passed: bool
    mean_ok: bool
    variance_ok: bool
    skewness_ok: bool
    kurtosis_ok: bool
    confidence: float
    z_score_mean: float
    z_critical: float
    variance_ratio: float
    variance_lo: float
    variance_hi: float
    sample_skewness: float
    skewness_bound: float
    sample_excess_kurtosis: float
    kurtosis_bound: float


def _schedule(problem: LiquidationProblem, config: SimConfig):
    """Deterministic trading schedule: step durations, rates, executed volumes.

    The last step is whichever step exhausts the inventory; its duration is
    fitted so the cumulative executed volume equals q0 exactly.
    """
    curve = problem.volume_curve
    q0 = problem.q0
    horizon = curve.completion_time(config.rho, q0)
    n = config.n_steps
    dt = horizon / n

    t_grid = np.arange(n) * dt
    v = config.rho * np.array([curve.rate_at(t) for t in t_grid])
    nominal_exec = v * dt
    cum = np.cumsum(nominal_exec)

    last = min(int(np.searchsorted(cum, q0)), n - 1)
    executed = nominal_exec[: last + 1].copy()
    q_before_last = q0 - (cum[last - 1] if last > 0 else 0.0)
    executed[last] = q_before_last

    durations = np.full(last + 1, dt)
    durations[last] = q_before_last / v[last]

    # inventory at the start of each step; the final residual is exactly 0
    q_start = q0 - np.concatenate(([0.0], np.cumsum(executed)[:-1]))
    residual = q_start[last] - executed[last]
    return v[: last + 1], durations, executed, residual


def simulate(problem: LiquidationProblem, config: SimConfig) -> SimResult:
    """Run the Euler scheme and compare against the analytic distribution."""
    imp = problem.impact
    rho = config.rho
    v, durations, executed, residual = _schedule(problem, config)
    n_eff = len(v)

    # deterministic cash outflows: V*L(rho)*dt + psi*v*dt = (eta*rho**phi + psi) * exec
    fixed_costs = float(np.sum((imp.eta * rho**imp.phi + imp.psi) * executed))

    sqrt_dt = np.sqrt(durations)
    drift = -imp.k_perm * v * durations
    sigma = problem.sigma_model
    s0 = problem.price_s0

    rng = np.random.Generator(np.random.Philox(key=config.seed))
    x_terminal = np.empty(config.n_paths)
    done = 0
    while done < config.n_paths:
        block = min(_BLOCK_PATHS, config.n_paths - done)
        if config.zero_noise:
            increments = np.broadcast_to(drift, (block, n_eff)).copy()
        else:
            xi = rng.standard_normal((block, n_eff))
            increments = xi * (sigma * sqrt_dt) + drift
        # price at the start of each step: S[0] = s0, then cumulative increments
        s_path = np.empty((block, n_eff))
        s_path[:, 0] = s0
        if n_eff > 1:
            np.cumsum(increments[:, :-1], axis=1, out=s_path[:, 1:])
            s_path[:, 1:] += s0
        x_terminal[done : done + block] = s_path @ executed - fixed_costs
        done += block

    analytic = terminal_cash_distribution(problem, rho)
    n = config.n_paths
    sample_mean = float(np.mean(x_terminal))
    sample_variance = float(np.var(x_terminal, ddof=1)) if n > 1 else 0.0
    std_error = math.sqrt(sample_variance / n)
    diff = sample_mean - analytic.mean
    if std_error > 0.0:
        z = diff / std_error
    else:
        z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)

    centered = x_terminal - sample_mean
    m2 = float(np.mean(centered**2))
    if m2 > 0.0:
        skewness = float(np.mean(centered**3)) / m2**1.5
        kurtosis = float(np.mean(centered**4)) / m2**2 - 3.0
    else:
        skewness = 0.0
        kurtosis = 0.0

    # sigma > 0 guarantees a positive analytic variance, but it can
    # underflow for degenerate volatilities used in drift-only checks
    if analytic.variance > 0.0:
        variance_ratio = sample_variance / analytic.variance
    else:
        variance_ratio = 0.0 if sample_variance == 0.0 else math.inf

    return SimResult(
        sample_mean=sample_mean,
        sample_variance=sample_variance,
        std_error_mean=std_error,
        analytic=analytic,
        z_score_mean=z,
        variance_ratio=variance_ratio,
        utility_estimate=float(np.mean(-np.exp(-problem.gamma * x_terminal))),
        sample_skewness=skewness,
        sample_excess_kurtosis=kurtosis,
        n_paths=n,
        total_executed=float(np.sum(executed)),
        residual_inventory=float(residual),
        x_terminal=x_terminal,
    )


def distribution_test(result: SimResult, confidence: float = 0.99) -> DistributionTestReport:
    """Check the sample against the analytic normal law.

    Mean via a z test at the given confidence, variance via a chi-square
    interval around the analytic variance, and normality via moment tests:
    |skewness| <= 4*sqrt(6/n) and |excess kurtosis| <= 4*sqrt(24/n).
    """
    if not 0.0 < confidence < 1.0:
        raise InvalidConfig(f"confidence must be in (0, 1), got {confidence}")
    n = result.n_paths
    if n < _MIN_PATHS_FOR_TEST:
        raise TooFewPaths(n, _MIN_PATHS_FOR_TEST)

    alpha = 1.0 - confidence
    z_crit = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    mean_ok = abs(result.z_score_mean) <= z_crit

    dof = n - 1
    var_lo = float(chi2.ppf(alpha / 2.0, dof)) / dof
    var_hi = float(chi2.ppf(1.0 - alpha / 2.0, dof)) / dof
    variance_ok = var_lo <= result.variance_ratio <= var_hi

    skew_bound = 4.0 * math.sqrt(6.0 / n)
    kurt_bound = 4.0 * math.sqrt(24.0 / n)
    skewness_ok = abs(result.sample_skewness) <= skew_bound
    kurtosis_ok = abs(result.sample_excess_kurtosis) <= kurt_bound

    return DistributionTestReport(
        passed=mean_ok and variance_ok and skewness_ok and kurtosis_ok,
        mean_ok=mean_ok,
        variance_ok=variance_ok,
        skewness_ok=skewness_ok,
        kurtosis_ok=kurtosis_ok,
        confidence=confidence,
        z_score_mean=result.z_score_mean,
        z_critical=z_crit,
        variance_ratio=result.variance_ratio,
        variance_lo=var_lo,
        variance_hi=var_hi,
        sample_skewness=result.sample_skewness,
        skewness_bound=skew_bound,
        sample_excess_kurtosis=result.sample_excess_kurtosis,
        kurtosis_bound=kurt_bound,
    )


def write_paths_csv(result: SimResult, path) -> None:
    """Dump per-path terminal cash as CSV with columns path_id, x_terminal."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["path_id", "x_terminal"])
        for i, x in enumerate(result.x_terminal):
            writer.writerow([i, repr(float(x))])
