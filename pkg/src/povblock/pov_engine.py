"""Reduced objective, terminal-cash distribution, and the optimal rate.

Trading a constant participation rate rho leaves the terminal cash
normally distributed. Maximizing CARA utility of terminal cash therefore
reduces to minimizing, over rho > 0,

    J(rho) = eta * rho**phi * q0
             + (gamma / 2) * sigma**2 * risk_integral(curve, rho, q0).

For a flat volume curve V the risk integral is q0**3 / (3 * rho * V) and
the minimizer is available in closed form:

    rho* = (gamma * sigma**2 * q0**2 / (6 * eta * phi * V)) ** (1 / (1 + phi)).

General bounded curves are handled numerically. Only existence of a
minimizer is guaranteed there, so the search runs a coarse multi-start
grid in log(rho) before derivative-free local refinement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BracketTooNarrow, InvalidConfig, NonPositiveRate
from .model_core import LiquidationProblem

#: default search bracket for the numeric minimizer. Rates above 1 are
#: meaningful (participation is measured against market volume excluding
#: the trader's own volume), hence the generous upper end.
DEFAULT_BRACKET: tuple[float, float] = (1e-6, 10.0)

#: number of points in the coarse multi-start log grid
GRID_POINTS = 32


class SolveMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"


class HighParticipationWarning(UserWarning):
    """The optimal rate exceeds 100% of market volume (allowed, but notable)."""


@dataclass(frozen=True)
class CashDistribution:
    """Normal law of the terminal cash X_T under a constant rate rho."""

    mean: float
    variance: float
    horizon_t: float
    rho: float


@dataclass(frozen=True)
class RateSolution:
    """A located minimizer of the reduced objective."""

    rho_star: float
    objective_value: float
    method: SolveMethod
    horizon_t: float
    exceeds_market_volume: bool = False


def objective(problem: LiquidationProblem, rho: float) -> float:
    """J(rho): execution cost plus variance penalty, in currency.

    On a flat curve this equals
    ``eta * rho**phi * q0 + gamma * sigma**2 * q0**3 / (6 * rho * V)``.
    """
    if not rho > 0.0:
        raise NonPositiveRate(rho)
    imp = problem.impact
    cost = imp.eta * rho**imp.phi * problem.q0
    risk = (
        0.5
        * problem.gamma
        * problem.sigma_model**2
        * problem.volume_curve.risk_integral(rho, problem.q0)
    )
    return cost + risk


def terminal_cash_distribution(problem: LiquidationProblem, rho: float) -> CashDistribution:
    """Mean and variance of the terminal cash X_T at participation rate rho.

    mean = q0*S0 - psi*q0 - (k/2)*q0**2 - eta*rho**phi*q0
    variance = sigma**2 * risk_integral(curve, rho, q0)

    The variance depends on neither S0, psi, nor k.
    """
    if not rho > 0.0:
        raise NonPositiveRate(rho)
    imp = problem.impact
    q0 = problem.q0
    mean = (
        problem.notional
        - imp.psi * q0
        - 0.5 * imp.k_perm * q0 * q0
        - imp.eta * rho**imp.phi * q0
    )
    variance = problem.sigma_model**2 * problem.volume_curve.risk_integral(rho, q0)
    horizon = problem.volume_curve.completion_time(rho, q0)
    return CashDistribution(mean=mean, variance=variance, horizon_t=horizon, rho=rho)


def _flag_high_rate(rho_star: float) -> bool:
    if rho_star > 1.0:
        warnings.warn(
            f"optimal participation rate {rho_star:.4g} exceeds 100% of market volume",
            HighParticipationWarning,
            stacklevel=3,
        )
        return True
    return False


def optimal_rate_closed_form(problem: LiquidationProblem) -> RateSolution:
    """Unique minimizer of J for a flat curve and power-law execution cost.

    rho* = (gamma * sigma**2 * q0**2 / (6 * eta * phi * V)) ** (1/(1+phi)),
    with minimum value J(rho*) = (1 + phi) * eta * rho***phi * q0. The
    formula is not capped at 1; a rate above full market volume only
    raises :class:`HighParticipationWarning`.
    """
    v = problem.volume_curve.flat_rate
    imp = problem.impact
    q0, gamma, sigma = problem.q0, problem.gamma, problem.sigma_model
    rho_star = (gamma * sigma**2 * q0**2 / (6.0 * imp.eta * imp.phi * v)) ** (
        1.0 / (1.0 + imp.phi)
    )
    value = (1.0 + imp.phi) * imp.eta * rho_star**imp.phi * q0
    return RateSolution(
        rho_star=rho_star,
        objective_value=value,
        method=SolveMethod.CLOSED_FORM,
        horizon_t=q0 / (rho_star * v),
        exceeds_market_volume=_flag_high_rate(rho_star),
    )


def optimal_rate_numeric(
    problem: LiquidationProblem,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    rel_tol: float = 1e-9,
) -> RateSolution:
    """Global minimizer of J over [rho_lo, rho_hi] for any volume curve.

    A 32-point log-spaced grid locates the basin (ties broken toward the
    smallest rho), then bounded derivative-free minimization in log(rho)
    refines to relative tolerance ``rel_tol``. If the grid minimum sits on
    the bracket boundary the true minimizer may lie outside, and
    :class:`BracketTooNarrow` is raised instead of returning an endpoint.
    """
    rho_lo, rho_hi = bracket
    if not (0.0 < rho_lo < rho_hi):
        raise InvalidConfig(f"bracket must satisfy 0 < rho_lo < rho_hi, got {bracket!r}")
    if not rel_tol >= 1e-12:
        raise InvalidConfig(f"rel_tol must be >= 1e-12, got {rel_tol!r}")

    grid = np.geomspace(rho_lo, rho_hi, GRID_POINTS)
    with np.errstate(over="ignore"):  # far-from-optimum cells may reach inf
        values = np.array([objective(problem, rho) for rho in grid])
    idx = int(np.argmin(values))  # first minimum, i.e. smallest rho on ties
    if idx == 0 or idx == GRID_POINTS - 1:
        raise BracketTooNarrow(float(grid[idx]), bracket)

    lo_u, hi_u = math.log(grid[idx - 1]), math.log(grid[idx + 1])
    res = minimize_scalar(
        lambda u: objective(problem, math.exp(u)),
        bounds=(lo_u, hi_u),
        method="bounded",
        options={"xatol": 0.5 * rel_tol},
    )
    rho_star = math.exp(res.x)
    return RateSolution(
        rho_star=rho_star,
        objective_value=float(res.fun),
        method=SolveMethod.NUMERIC,
        horizon_t=problem.volume_curve.completion_time(rho_star, problem.q0),
        exceeds_market_volume=_flag_high_rate(rho_star),
    )


def optimal_rate(
    problem: LiquidationProblem,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    rel_tol: float = 1e-9,
) -> RateSolution:
    """Closed form when the curve is flat, numeric search otherwise."""
    if problem.volume_curve.is_flat:
        return optimal_rate_closed_form(problem)
    return optimal_rate_numeric(problem, bracket=bracket, rel_tol=rel_tol)
