"""Command-line front end.

Six commands, all reading a JSON scenario file (see :mod:`povblock.scenario`
for the schema) except ``reproduce-table`` which uses built-in cases:

    rate             optimal participation rate
    price            block price and decomposed risk-liquidity premium
    compare          constant-rate premium vs unconstrained-strategy premium
    simulate         Monte Carlo check of the terminal-cash distribution
    sweep            comparative statics over one parameter, CSV output
    reproduce-table  recompute the built-in benchmark table and diff it
                     against the frozen reference values

Exit codes: 0 success, 1 validation or parse failure, 2 benchmark-table
deviation, 3 statistical test failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import block_pricing, mc_validator, pov_engine
from .errors import InvalidConfig, PovBlockError, UnknownParameter
from .model_core import ImpactParams, MarketSpec, Side
from .scenario import (
    SWEEPABLE_PARAMETERS,
    Scenario,
    load_scenario,
    with_parameter,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_TABLE_DIFF = 2
EXIT_STAT_FAIL = 3

# ---------------------------------------------------------------------------
# built-in benchmark: six liquidation cases with frozen reference values
# ---------------------------------------------------------------------------

BENCHMARK_GAMMA = 3e-6

BENCHMARK_STOCKS = {
    "Total": (
        MarketSpec(price_s0=40.0, adv=4e6, annualized_vol=0.18),
        ImpactParams(eta=0.116, phi=0.63, psi=0.002, k_perm=5.8e-7),
    ),
    "Axa": (
        MarketSpec(price_s0=13.0, adv=7e6, annualized_vol=0.22),
        ImpactParams(eta=0.046, phi=0.63, psi=0.0007, k_perm=1.9e-7),
    ),
    "Danone": (
        MarketSpec(price_s0=50.0, adv=1.7e6, annualized_vol=0.18),
        ImpactParams(eta=0.145, phi=0.63, psi=0.003, k_perm=2.7e-6),
    ),
}

BENCHMARK_CASES = (
    ("Total", 0.10),
    ("Total", 0.15),
    ("Axa", 0.10),
    ("Axa", 0.15),
    ("Danone", 0.10),
    ("Danone", 0.15),
)

TABLE_ROWS = (
    ("rate_percent", "Optimal rate (%)"),
    ("permanent_bps", "Permanent impact (bps)"),
    ("instantaneous_bps", "Instantaneous impact (bps)"),
    ("risk_bps", "Risk (bps)"),
    ("pov_bps", "POV premium (bps)"),
    ("is_bps", "IS premium (bps)"),
)

EXPECTED_TABLE = {
    "rate_percent": (17.1, 28.1, 13.7, 22.5, 11.6, 19.1),
    "permanent_bps": (29.0, 43.5, 51.2, 76.8, 45.9, 68.8),
    "instantaneous_bps": (10.1, 13.6, 10.7, 14.4, 8.0, 10.8),
    "risk_bps": (6.0, 8.2, 6.4, 8.7, 4.7, 6.4),
    "pov_bps": (45.1, 65.3, 68.3, 99.9, 58.6, 86.0),
    "is_bps": (43.0, 62.4, 66.0, 96.8, 57.0, 83.8),
}

#: reference values are rounded for display, hence the slack
RATE_TOLERANCE_PP = 0.1
BPS_TOLERANCE = 0.15


def benchmark_scenario(stock: str, adv_fraction: float) -> Scenario:
    """One of the built-in benchmark cases as a regular scenario."""
    market, impact = BENCHMARK_STOCKS[stock]
    return Scenario(
        market=market,
        impact=impact,
        gamma=BENCHMARK_GAMMA,
        q0_shares=None,
        q0_adv_fraction=adv_fraction,
        side=Side.SELL,
        profile="flat",
        name=f"{stock} {adv_fraction:.0%} ADV",
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_rate(args) -> int:
    scenario = load_scenario(args.scenario)
    solution = pov_engine.optimal_rate(scenario.problem())
    payload = {
        "rho_star": solution.rho_star,
        "rho_star_percent": 100.0 * solution.rho_star,
        "method": solution.method.value,
        "horizon_days": solution.horizon_t,
        "objective_value": solution.objective_value,
        "exceeds_market_volume": solution.exceeds_market_volume,
    }
    if args.output == "structured":
        _emit_json(payload)
    else:
        lines = [
            f"optimal participation rate: {100.0 * solution.rho_star:.1f}%",
            f"method: {solution.method.value}",
            f"horizon: {solution.horizon_t:.4f} days",
        ]
        if solution.exceeds_market_volume:
            lines.append("note: rate exceeds 100% of market volume")
        print("\n".join(lines))
    return EXIT_OK


def _zero_block_payload(scenario: Scenario) -> dict:
    return {
        "scenario": scenario.name,
        "side": scenario.side.value,
        "rho_star": 0.0,
        "block_price": 0.0,
        "notional": 0.0,
        "premium_total": 0.0,
        "permanent_component": 0.0,
        "instantaneous_component": 0.0,
        "risk_component": 0.0,
        "is_premium": 0.0,
        "premium_total_bps": 0.0,
        "permanent_bps": 0.0,
        "instantaneous_bps": 0.0,
        "risk_bps": 0.0,
        "is_premium_bps": 0.0,
    }


def _cmd_price(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.q0 == 0.0:
        payload = _zero_block_payload(scenario)
    else:
        report = block_pricing.pov_premium(scenario.problem())
        payload = {
            "scenario": scenario.name,
            "side": scenario.side.value,
            "rho_star": report.rho_star,
            "block_price": report.block_price,
            "notional": report.notional,
            "premium_total": report.premium_total,
            "permanent_component": report.permanent_component,
            "instantaneous_component": report.instantaneous_component,
            "risk_component": report.risk_component,
            "is_premium": report.is_premium,
            "premium_total_bps": report.premium_total_bps,
            "permanent_bps": report.permanent_bps,
            "instantaneous_bps": report.instantaneous_bps,
            "risk_bps": report.risk_bps,
            "is_premium_bps": report.is_premium_bps,
        }
    if args.output == "structured":
        _emit_json(payload)
        return EXIT_OK

    rows = [
        ("permanent impact", payload["permanent_bps"], payload["permanent_component"]),
        (
            "instantaneous impact",
            payload["instantaneous_bps"],
            payload["instantaneous_component"],
        ),
        ("risk", payload["risk_bps"], payload["risk_component"]),
        ("total (POV)", payload["premium_total_bps"], payload["premium_total"]),
    ]
    if payload["is_premium"] is not None:
        rows.append(("total (IS)", payload["is_premium_bps"], payload["is_premium"]))
    lines = []
    if payload["scenario"]:
        lines.append(f"scenario: {payload['scenario']}")
    lines += [
        f"side: {payload['side']}",
        f"optimal participation rate: {100.0 * payload['rho_star']:.1f}%",
        f"block price: {payload['block_price']:.2f}",
        "",
        f"{'risk-liquidity premium':<26}{'bps':>8}  {'currency':>14}",
    ]
    for label, bps, cur in rows:
        lines.append(f"  {label:<24}{bps:>8.1f}  {cur:>14.2f}")
    print("\n".join(lines))
    return EXIT_OK


def _cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    problem = scenario.problem()
    report = block_pricing.pov_premium(problem)
    l_is = block_pricing.is_premium(problem)
    ratio = l_is / report.premium_total
    bound = block_pricing.premium_ratio_bound(problem.impact.phi)
    savings_bps = report.premium_total_bps - l_is / report.notional * 1e4
    payload = {
        "scenario": scenario.name,
        "pov_premium": report.premium_total,
        "pov_premium_bps": report.premium_total_bps,
        "is_premium": l_is,
        "is_premium_bps": l_is / report.notional * 1e4,
        "ratio": ratio,
        "ratio_lower_bound": bound,
        "savings_bps": savings_bps,
    }
    if args.output == "structured":
        _emit_json(payload)
    else:
        print(
            "\n".join(
                [
                    f"POV premium: {report.premium_total:.2f} ({report.premium_total_bps:.1f} bps)",
                    f"IS premium:  {l_is:.2f} ({payload['is_premium_bps']:.1f} bps)",
                    f"ratio IS/POV: {ratio:.4f}",
                    f"lower bound g(phi={problem.impact.phi:g}): {bound:.4f}",
                    f"savings from an unconstrained strategy: {savings_bps:.1f} bps of notional",
                ]
            )
        )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    problem = scenario.problem()
    rho = args.rho if args.rho is not None else pov_engine.optimal_rate(problem).rho_star
    config = mc_validator.SimConfig(
        n_paths=args.paths, n_steps=args.steps, seed=args.seed, rho=rho
    )
    result = mc_validator.simulate(problem, config)
    test = mc_validator.distribution_test(result, confidence=0.99)
    if args.dump_paths:
        mc_validator.write_paths_csv(result, args.dump_paths)

    payload = {
        "scenario": scenario.name,
        "rho": rho,
        "n_paths": config.n_paths,
        "n_steps": config.n_steps,
        "seed": config.seed,
        "analytic_mean": result.analytic.mean,
        "analytic_variance": result.analytic.variance,
        "horizon_days": result.analytic.horizon_t,
        "sample_mean": result.sample_mean,
        "sample_variance": result.sample_variance,
        "std_error_mean": result.std_error_mean,
        "z_score_mean": result.z_score_mean,
        "variance_ratio": result.variance_ratio,
        "sample_skewness": result.sample_skewness,
        "sample_excess_kurtosis": result.sample_excess_kurtosis,
        "utility_estimate": result.utility_estimate,
        "confidence": test.confidence,
        "passed": test.passed,
        "checks": {
            "mean_ok": test.mean_ok,
            "variance_ok": test.variance_ok,
            "skewness_ok": test.skewness_ok,
            "kurtosis_ok": test.kurtosis_ok,
        },
    }
    if args.output == "structured":
        _emit_json(payload)
    else:
        print(
            "\n".join(
                [
                    f"paths: {config.n_paths}  steps: {config.n_steps}  seed: {config.seed}  rho: {rho:.6f}",
                    f"analytic mean: {result.analytic.mean:.2f}  sample mean: {result.sample_mean:.2f}",
                    f"z score (mean): {result.z_score_mean:.3f}  critical: {test.z_critical:.3f}",
                    f"variance ratio: {result.variance_ratio:.4f}  "
                    f"interval: [{test.variance_lo:.4f}, {test.variance_hi:.4f}]",
                    f"skewness: {result.sample_skewness:.4f} (bound {test.skewness_bound:.4f})",
                    f"excess kurtosis: {result.sample_excess_kurtosis:.4f} "
                    f"(bound {test.kurtosis_bound:.4f})",
                    f"{'PASS' if test.passed else 'FAIL'} at {test.confidence:.0%} confidence",
                ]
            )
        )
    return EXIT_OK if test.passed else EXIT_STAT_FAIL


def _cmd_sweep(args) -> int:
    if args.param not in SWEEPABLE_PARAMETERS:
        raise UnknownParameter(args.param, SWEEPABLE_PARAMETERS)
    if args.points < 1:
        raise InvalidConfig(f"sweep needs at least 1 point, got {args.points}")
    if not args.from_value < args.to_value:
        raise InvalidConfig(
            f"empty range: need from < to, got [{args.from_value}, {args.to_value}]"
        )
    if args.scale == "log":
        if args.from_value <= 0.0:
            raise InvalidConfig("log scale needs from > 0")
        grid = np.geomspace(args.from_value, args.to_value, args.points)
    else:
        grid = np.linspace(args.from_value, args.to_value, args.points)

    scenario = load_scenario(args.scenario)
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow([args.param, "rho_star", "pov_premium", "is_premium", "ratio"])
    for value in grid:
        swept = with_parameter(scenario, args.param, float(value))
        problem = swept.problem()
        report = block_pricing.pov_premium(problem)
        l_is = block_pricing.is_premium(problem)
        writer.writerow(
            [
                repr(float(value)),
                repr(report.rho_star),
                repr(report.premium_total),
                repr(l_is),
                repr(l_is / report.premium_total),
            ]
        )
    sys.stdout.write(out.getvalue())
    return EXIT_OK


def compute_benchmark_table() -> dict:
    """Recompute the six benchmark cases; returns rows keyed like EXPECTED_TABLE."""
    rows = {key: [] for key, _ in TABLE_ROWS}
    for stock, fraction in BENCHMARK_CASES:
        report = block_pricing.pov_premium(benchmark_scenario(stock, fraction).problem())
        rows["rate_percent"].append(100.0 * report.rho_star)
        rows["permanent_bps"].append(report.permanent_bps)
        rows["instantaneous_bps"].append(report.instantaneous_bps)
        rows["risk_bps"].append(report.risk_bps)
        rows["pov_bps"].append(report.premium_total_bps)
        rows["is_bps"].append(report.is_premium_bps)
    return {key: tuple(values) for key, values in rows.items()}


def benchmark_table_diff(computed: dict) -> list:
    """Cells deviating from the reference beyond tolerance, as (row, col, got, want)."""
    bad = []
    for key, _ in TABLE_ROWS:
        tol = RATE_TOLERANCE_PP if key == "rate_percent" else BPS_TOLERANCE
        for col, (got, want) in enumerate(zip(computed[key], EXPECTED_TABLE[key])):
            if abs(got - want) > tol:
                bad.append((key, col, got, want))
    return bad


def _cmd_reproduce_table(args) -> int:
    computed = compute_benchmark_table()
    bad = benchmark_table_diff(computed)
    case_labels = [f"{stock} {int(100 * frac)}%" for stock, frac in BENCHMARK_CASES]

    if args.output == "structured":
        _emit_json(
            {
                "cases": case_labels,
                "computed": {k: list(v) for k, v in computed.items()},
                "expected": {k: list(v) for k, v in EXPECTED_TABLE.items()},
                "tolerances": {
                    "rate_percent": RATE_TOLERANCE_PP,
                    "bps": BPS_TOLERANCE,
                },
                "cells_out_of_tolerance": [
                    {"row": row, "column": case_labels[col], "computed": got, "expected": want}
                    for row, col, got, want in bad
                ],
                "passed": not bad,
            }
        )
        return EXIT_OK if not bad else EXIT_TABLE_DIFF

    label_width = max(len(label) for _, label in TABLE_ROWS) + 2
    col_width = max(len(c) for c in case_labels) + 2
    lines = [" " * label_width + "".join(f"{c:>{col_width}}" for c in case_labels)]
    for key, label in TABLE_ROWS:
        cells = "".join(f"{v:>{col_width}.1f}" for v in computed[key])
        lines.append(f"{label:<{label_width}}{cells}")
    lines.append("")
    lines.append(
        f"reference check: rates within {RATE_TOLERANCE_PP} pp, "
        f"premia within {BPS_TOLERANCE} bps"
    )
    if bad:
        for row, col, got, want in bad:
            lines.append(
                f"  DEVIATION {row} / {case_labels[col]}: computed {got:.3f}, expected {want}"
            )
        lines.append(f"TABLE MISMATCH: {len(bad)} cell(s) out of tolerance")
    else:
        lines.append("TABLE MATCH: all 36 cells within tolerance")
    print("\n".join(lines))
    return EXIT_OK if not bad else EXIT_TABLE_DIFF


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _add_common(parser: argparse.ArgumentParser, scenario_required: bool = True) -> None:
    if scenario_required:
        parser.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    parser.add_argument(
        "--output",
        choices=("human", "structured"),
        default="human",
        help="human-readable text or full-precision JSON",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="povblock",
        description="Optimal constant-participation-rate liquidation and block pricing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("rate", help="optimal participation rate"))
    _add_common(sub.add_parser("price", help="block price and premium decomposition"))
    _add_common(sub.add_parser("compare", help="POV vs IS premium comparison"))

    sim = sub.add_parser("simulate", help="Monte Carlo distribution check")
    _add_common(sim)
    sim.add_argument("--paths", type=int, default=200_000, help="number of Monte Carlo paths")
    sim.add_argument("--steps", type=int, default=500, help="time steps per path")
    sim.add_argument("--seed", type=int, default=0, help="RNG seed")
    sim.add_argument(
        "--rho", type=float, default=None, help="participation rate (default: the optimum)"
    )
    sim.add_argument("--dump-paths", default=None, help="write per-path terminal cash CSV here")

    sweep = sub.add_parser("sweep", help="comparative statics sweep, CSV to stdout")
    _add_common(sweep)
    sweep.add_argument(
        "--param", required=True, help=f"one of {', '.join(SWEEPABLE_PARAMETERS)}"
    )
    sweep.add_argument("--from", dest="from_value", type=float, required=True)
    sweep.add_argument("--to", dest="to_value", type=float, required=True)
    sweep.add_argument("--points", type=int, default=20)
    sweep.add_argument("--scale", choices=("log", "linear"), default="log")

    table = sub.add_parser(
        "reproduce-table", help="recompute the built-in benchmark table and diff it"
    )
    _add_common(table, scenario_required=False)

    return parser


_HANDLERS = {
    "rate": _cmd_rate,
    "price": _cmd_price,
    "compare": _cmd_compare,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "reproduce-table": _cmd_reproduce_table,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except PovBlockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
