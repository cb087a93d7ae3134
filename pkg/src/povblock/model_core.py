"""Domain types, unit conversions, and input validation.

Everything downstream works in model units: time in trading days, the
price an arithmetic random walk with daily volatility sigma_model in
currency per share per sqrt(day). Market conventions (annualized
volatility as a fraction of price) are converted here, once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import NonPositiveInput, ZeroVolatility
from .volume_curve import VolumeCurve


class Side(str, Enum):
    """Direction of the block: a sell liquidates q0 > 0 shares, a buy acquires them.

    Both sides share the same risk-liquidity premium; only the sign with
    which it enters the block price differs.
    """

    SELL = "sell"
    BUY = "buy"


def _positive(field: str, value: float) -> float:
    if not value > 0.0:  # also rejects NaN
        raise NonPositiveInput(field, value)
    return float(value)


def _nonnegative(field: str, value: float) -> float:
    if not value >= 0.0:
        raise NonPositiveInput(field, value, requirement=">= 0")
    return float(value)


@dataclass(frozen=True)
class MarketSpec:
    """Stock observables in trader conventions.

    price_s0 in currency/share, adv in shares/day, annualized_vol as a
    dimensionless fraction (0.18 for 18%).
    """

    price_s0: float
    adv: float
    annualized_vol: float
    trading_days_per_year: float = 252.0

    def __post_init__(self) -> None:
        _positive("price_s0", self.price_s0)
        _positive("adv", self.adv)
        if self.annualized_vol == 0.0:
            raise ZeroVolatility()
        _positive("annualized_vol", self.annualized_vol)
        _positive("trading_days_per_year", self.trading_days_per_year)


@dataclass(frozen=True)
class ImpactParams:
    """Execution-cost and permanent-impact parameters.

    The per-share execution cost of trading at participation rate rho is
    ``psi + eta * rho**phi`` (a fixed cost plus a convex power law); k_perm
    is the linear permanent impact in currency/share^2.
    """

    eta: float
    phi: float
    psi: float = 0.0
    k_perm: float = 0.0

    def __post_init__(self) -> None:
        _positive("eta", self.eta)
        _positive("phi", self.phi)
        _nonnegative("psi", self.psi)
        _nonnegative("k_perm", self.k_perm)


@dataclass(frozen=True)
class LiquidationProblem:
    """Fully converted model inputs for one block liquidation.

    sigma_model is the arithmetic daily volatility in
    currency * share^-1 * day^-0.5; time is measured in trading days.
    """

    q0: float
    gamma: float
    sigma_model: float
    price_s0: float
    volume_curve: VolumeCurve
    impact: ImpactParams
    side: Side = Side.SELL

    def __post_init__(self) -> None:
        _positive("q0", self.q0)
        _positive("gamma", self.gamma)
        _positive("sigma_model", self.sigma_model)
        _positive("price_s0", self.price_s0)

    @property
    def notional(self) -> float:
        """Pre-trade mark-to-market value q0 * S0."""
        return self.q0 * self.price_s0


def sigma_model_from_market(spec: MarketSpec) -> float:
    """Arithmetic daily volatility from annualized fractional volatility.

    sigma_model = annualized_vol * price_s0 / sqrt(trading_days_per_year).
    Linear in price and in annualized_vol; scaling the day count by lam
    scales the result by lam**-0.5.
    """
    return spec.annualized_vol * spec.price_s0 / math.sqrt(spec.trading_days_per_year)


def build_problem(
    spec: MarketSpec,
    impact: ImpactParams,
    q0: float,
    gamma: float,
    curve: VolumeCurve,
    side: Side = Side.SELL,
) -> LiquidationProblem:
    """Validate inputs and convert market conventions into model units."""
    return LiquidationProblem(
        q0=float(q0),
        gamma=float(gamma),
        sigma_model=sigma_model_from_market(spec),
        price_s0=spec.price_s0,
        volume_curve=curve,
        impact=impact,
        side=Side(side),
    )
