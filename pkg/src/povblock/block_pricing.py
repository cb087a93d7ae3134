"""Block trade pricing and the risk-liquidity premium.

The certainty-equivalent price of a block of q0 shares under the optimal
constant participation rate is

    P(q0) = q0*S0 - psi*q0 - (k/2)*q0**2 - min_rho J(rho)      (sell side)

and the premium ell_pov = q0*S0 - P(q0) decomposes into a permanent
impact part (k*q0**2/2), an instantaneous impact part
(psi*q0 + eta*rho***phi*q0), and a risk part which on a flat curve equals
phi times the nonlinear instantaneous part.

A trader free to choose any trading curve (rather than a constant rate)
with no deadline pays

    ell_is = (k/2)*q0**2 + psi*q0
             + (1+phi)**2/(1+3*phi) * eta**(1/(1+phi))
               * (gamma*sigma**2/(2*phi*V))**(phi/(1+phi))
               * q0**((1+3*phi)/(1+phi)),

never less than g(phi) = (1+phi)/(1+3*phi) * 3**(phi/(1+phi)) times
ell_pov. g is U-shaped with minimum e*ln(3)/(2*sqrt(3)) ~ 0.862: the
saving from abandoning a constant rate is bounded near 14%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import NonPositivePhi
from .model_core import LiquidationProblem, Side
from .pov_engine import (
    DEFAULT_BRACKET,
    RateSolution,
    objective,
    optimal_rate,
)

#: global lower bound of the premium ratio, e * ln(3) / (2 * sqrt(3))
RATIO_LOWER_BOUND = math.e * math.log(3.0) / (2.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class PremiumReport:
    """Block price plus the decomposed risk-liquidity premium.

    Components are in currency; every ``*_bps`` field is the same quantity
    expressed in basis points of the pre-trade notional q0 * S0.
    ``is_premium`` is None when the volume curve is not flat (its closed
    form requires a constant curve).
    """

    block_price: float
    premium_total: float
    permanent_component: float
    instantaneous_component: float
    risk_component: float
    is_premium: Optional[float]
    rho_star: float
    notional: float
    premium_total_bps: float
    permanent_bps: float
    instantaneous_bps: float
    risk_bps: float
    is_premium_bps: Optional[float]


def phi_star() -> float:
    """Convexity exponent at which the premium ratio bound is smallest.

    Equal to (2 - ln 3) / (3 ln 3 - 2), about 0.6956.
    """
    ln3 = math.log(3.0)
    return (2.0 - ln3) / (3.0 * ln3 - 2.0)


def premium_ratio_bound(phi: float) -> float:
    """g(phi) = (1+phi)/(1+3*phi) * 3**(phi/(1+phi)), the ratio lower bound.

    Satisfies g(phi) >= RATIO_LOWER_BOUND for every phi > 0.
    """
    if not phi > 0.0:
        raise NonPositivePhi(phi)
    return (1.0 + phi) / (1.0 + 3.0 * phi) * 3.0 ** (phi / (1.0 + phi))


def is_premium(problem: LiquidationProblem) -> float:
    """Risk-liquidity premium of an unconstrained, deadline-free strategy.

    Only defined for a flat volume curve; piecewise curves raise
    :class:`RequiresFlatCurve` rather than silently flattening.
    """
    v = problem.volume_curve.flat_rate
    imp = problem.impact
    q0, gamma, sigma = problem.q0, problem.gamma, problem.sigma_model
    phi = imp.phi
    nonlinear = (
        (1.0 + phi) ** 2
        / (1.0 + 3.0 * phi)
        * imp.eta ** (1.0 / (1.0 + phi))
        * (gamma * sigma**2 / (2.0 * phi * v)) ** (phi / (1.0 + phi))
        * q0 ** ((1.0 + 3.0 * phi) / (1.0 + phi))
    )
    return 0.5 * imp.k_perm * q0 * q0 + imp.psi * q0 + nonlinear


def pov_premium(
    problem: LiquidationProblem,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    rel_tol: float = 1e-9,
) -> PremiumReport:
    """Price the block at the optimal constant rate and decompose the premium.

    Flat curves use the closed-form rate; other curves go through the
    numeric minimizer with the given bracket. The decomposition identity
    permanent + instantaneous + risk = premium_total holds exactly by
    construction; on flat curves the risk part additionally equals
    phi * (instantaneous - psi*q0) exactly.
    """
    solution = optimal_rate(problem, bracket=bracket, rel_tol=rel_tol)
    return _report_from_solution(problem, solution)


def block_price(
    problem: LiquidationProblem,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    rel_tol: float = 1e-9,
) -> float:
    """Certainty-equivalent price of the block: notional minus the premium
    for a sell, notional plus the premium for a buy."""
    return pov_premium(problem, bracket=bracket, rel_tol=rel_tol).block_price


def _report_from_solution(
    problem: LiquidationProblem, solution: RateSolution
) -> PremiumReport:
    imp = problem.impact
    q0 = problem.q0
    rho = solution.rho_star

    permanent = 0.5 * imp.k_perm * q0 * q0
    nonlinear_inst = imp.eta * rho**imp.phi * q0
    instantaneous = imp.psi * q0 + nonlinear_inst
    if problem.volume_curve.is_flat:
        # at the flat-curve optimum the variance cost equals phi times the
        # nonlinear execution cost; using the identity keeps it exact
        risk = imp.phi * nonlinear_inst
        is_prem: Optional[float] = is_premium(problem)
    else:
        risk = objective(problem, rho) - nonlinear_inst
        is_prem = None

    total = permanent + instantaneous + risk
    notional = problem.notional
    if problem.side is Side.BUY:
        price = notional + total
    else:
        price = notional - total

    to_bps = 1e4 / notional
    return PremiumReport(
        block_price=price,
        premium_total=total,
        permanent_component=permanent,
        instantaneous_component=instantaneous,
        risk_component=risk,
        is_premium=is_prem,
        rho_star=rho,
        notional=notional,
        premium_total_bps=total * to_bps,
        permanent_bps=permanent * to_bps,
        instantaneous_bps=instantaneous * to_bps,
        risk_bps=risk * to_bps,
        is_premium_bps=None if is_prem is None else is_prem * to_bps,
    )
