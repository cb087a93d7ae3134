"""Optimal constant-participation-rate liquidation and block trade pricing.

A trader unwinding a block of q0 shares at a constant fraction rho of
market volume trades off execution costs (convex in rho) against price
risk over the liquidation horizon. This package computes the optimal
rate, prices blocks via the CARA certainty equivalent, decomposes the
risk-liquidity premium, compares against an unconstrained execution
strategy, and validates the analytic terminal-cash distribution by Monte
Carlo.
"""

from .block_pricing import (
    RATIO_LOWER_BOUND,
    PremiumReport,
    block_price,
    is_premium,
    phi_star,
    pov_premium,
    premium_ratio_bound,
)
from .errors import (
    BracketTooNarrow,
    InvalidConfig,
    InvalidVolumeProfile,
    NegativeTime,
    NonPositiveInput,
    NonPositivePhi,
    NonPositiveRate,
    ParseError,
    PovBlockError,
    RequiresFlatCurve,
    TooFewPaths,
    UnknownParameter,
    ZeroVolatility,
)
from .mc_validator import (
    DistributionTestReport,
    SimConfig,
    SimResult,
    distribution_test,
    simulate,
    write_paths_csv,
)
from .model_core import (
    ImpactParams,
    LiquidationProblem,
    MarketSpec,
    Side,
    build_problem,
    sigma_model_from_market,
)
from .pov_engine import (
    DEFAULT_BRACKET,
    CashDistribution,
    HighParticipationWarning,
    RateSolution,
    SolveMethod,
    objective,
    optimal_rate,
    optimal_rate_closed_form,
    optimal_rate_numeric,
    terminal_cash_distribution,
)
from .scenario import Scenario, load_scenario, scenario_from_dict, scenario_to_dict
from .volume_curve import VolumeCurve

__version__ = "0.1.0"

__all__ = [
    "BracketTooNarrow",
    "CashDistribution",
    "DEFAULT_BRACKET",
    "DistributionTestReport",
    "HighParticipationWarning",
    "ImpactParams",
    "InvalidConfig",
    "InvalidVolumeProfile",
    "LiquidationProblem",
    "MarketSpec",
    "NegativeTime",
    "NonPositiveInput",
    "NonPositivePhi",
    "NonPositiveRate",
    "ParseError",
    "PovBlockError",
    "PremiumReport",
    "RATIO_LOWER_BOUND",
    "RateSolution",
    "RequiresFlatCurve",
    "Scenario",
    "Side",
    "SimConfig",
    "SimResult",
    "SolveMethod",
    "TooFewPaths",
    "UnknownParameter",
    "VolumeCurve",
    "ZeroVolatility",
    "block_price",
    "build_problem",
    "distribution_test",
    "is_premium",
    "load_scenario",
    "objective",
    "optimal_rate",
    "optimal_rate_closed_form",
    "optimal_rate_numeric",
    "phi_star",
    "pov_premium",
    "premium_ratio_bound",
    "scenario_from_dict",
    "scenario_to_dict",
    "sigma_model_from_market",
    "simulate",
    "terminal_cash_distribution",
    "write_paths_csv",
]
