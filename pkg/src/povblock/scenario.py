"""Scenario files: the JSON schema the CLI reads and its validation.

A scenario is a JSON document with five sections, all numbers in market
conventions:

    {
      "name": "Total 10% ADV",                      // optional
      "market": {
        "price": 40.0,                              // currency/share
        "adv": 4000000,                             // shares/day
        "annualized_vol": 0.18,                     // fraction, not percent
        "trading_days_per_year": 252                // optional, default 252
      },
      "impact": {
        "eta": 0.116, "phi": 0.63,                  // execution cost power law
        "psi": 0.002,                               // fixed cost/share, default 0
        "k": 5.8e-7                                 // permanent impact, default 0
      },
      "trader": { "gamma": 3e-6 },                  // absolute risk aversion
      "order": {
        "q0_shares": 400000,                        // exactly one of q0_shares /
        "q0_adv_fraction": 0.10,                    //   q0_adv_fraction
        "side": "sell"                              // "sell" (default) or "buy"
      },
      "volume": {
        "profile": "flat"                           // or [[duration, rate], ...]
      }
    }

A non-flat profile lists [duration_fraction_of_day, rate_relative_to_adv]
pairs; durations must sum to 1 and the duration-weighted rates must
average to 1 so the profile integrates to ADV per day. Validation errors
are raised as :class:`ParseError` naming the offending dotted field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional, Union

from .errors import ParseError
from .model_core import (
    ImpactParams,
    LiquidationProblem,
    MarketSpec,
    Side,
    build_problem,
)
from .volume_curve import VolumeCurve

_SECTIONS = ("market", "impact", "trader", "order", "volume")
_PROFILE_TOL = 1e-9

ProfileSpec = Union[str, tuple[tuple[float, float], ...]]


@dataclass(frozen=True)
class Scenario:
    """Validated scenario contents, still in market conventions."""

    market: MarketSpec
    impact: ImpactParams
    gamma: float
    q0_shares: Optional[float]
    q0_adv_fraction: Optional[float]
    side: Side
    profile: ProfileSpec
    name: str = ""

    @property
    def q0(self) -> float:
        """Block size in shares, whichever way it was specified."""
        if self.q0_shares is not None:
            return self.q0_shares
        assert self.q0_adv_fraction is not None
        return self.q0_adv_fraction * self.market.adv

    def curve(self) -> VolumeCurve:
        """The volume curve in shares/day implied by the profile and ADV."""
        if self.profile == "flat":
            return VolumeCurve.flat(self.market.adv)
        return VolumeCurve.piecewise(
            [(d, r * self.market.adv) for d, r in self.profile]
        )

    def problem(self) -> LiquidationProblem:
        """Convert to model units; rejects q0 = 0 like any other non-positive input."""
        return build_problem(
            spec=self.market,
            impact=self.impact,
            q0=self.q0,
            gamma=self.gamma,
            curve=self.curve(),
            side=self.side,
        )


def load_scenario(path) -> Scenario:
    """Read and validate a scenario JSON file."""
    source = str(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ParseError("<file>", f"cannot read scenario: {exc}", source=source)
    except json.JSONDecodeError as exc:
        raise ParseError(
            "<document>", f"not valid JSON (line {exc.lineno}, column {exc.colno})",
            source=source,
        )
    return scenario_from_dict(raw, source=source)


def scenario_from_dict(raw, source: str = "<dict>") -> Scenario:
    """Validate a decoded scenario document."""
    if not isinstance(raw, dict):
        raise ParseError("<document>", "top level must be a JSON object", source=source)
    for section in _SECTIONS:
        if section not in raw:
            raise ParseError(section, "missing required section", source=source)
        if not isinstance(raw[section], dict):
            raise ParseError(section, "must be an object", source=source)

    market = raw["market"]
    impact = raw["impact"]
    trader = raw["trader"]
    order = raw["order"]
    volume = raw["volume"]

    price = _number(market, "market", "price", source, positive=True)
    adv = _number(market, "market", "adv", source, positive=True)
    vol = _number(market, "market", "annualized_vol", source, positive=True)
    days = _number(
        market, "market", "trading_days_per_year", source, positive=True, default=252.0
    )

    eta = _number(impact, "impact", "eta", source, positive=True)
    phi = _number(impact, "impact", "phi", source, positive=True)
    psi = _number(impact, "impact", "psi", source, nonnegative=True, default=0.0)
    k = _number(impact, "impact", "k", source, nonnegative=True, default=0.0)

    gamma = _number(trader, "trader", "gamma", source, positive=True)

    has_shares = "q0_shares" in order
    has_fraction = "q0_adv_fraction" in order
    if has_shares == has_fraction:
        raise ParseError(
            "order",
            "exactly one of q0_shares or q0_adv_fraction must be given",
            source=source,
        )
    q0_shares = (
        _number(order, "order", "q0_shares", source, nonnegative=True)
        if has_shares
        else None
    )
    q0_fraction = (
        _number(order, "order", "q0_adv_fraction", source, nonnegative=True)
        if has_fraction
        else None
    )
    side_raw = order.get("side", "sell")
    try:
        side = Side(side_raw)
    except ValueError:
        raise ParseError("order.side", f'must be "sell" or "buy", got {side_raw!r}', source=source)

    profile = _parse_profile(volume.get("profile"), source)

    name = raw.get("name", "")
    if not isinstance(name, str):
        raise ParseError("name", "must be a string", source=source)

    return Scenario(
        market=MarketSpec(
            price_s0=price, adv=adv, annualized_vol=vol, trading_days_per_year=days
        ),
        impact=ImpactParams(eta=eta, phi=phi, psi=psi, k_perm=k),
        gamma=gamma,
        q0_shares=q0_shares,
        q0_adv_fraction=q0_fraction,
        side=side,
        profile=profile,
        name=name,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of :func:`scenario_from_dict`, for round-tripping and sweeps."""
    order: dict = {"side": scenario.side.value}
    if scenario.q0_shares is not None:
        order["q0_shares"] = scenario.q0_shares
    else:
        order["q0_adv_fraction"] = scenario.q0_adv_fraction
    profile = scenario.profile
    return {
        "name": scenario.name,
        "market": {
            "price": scenario.market.price_s0,
            "adv": scenario.market.adv,
            "annualized_vol": scenario.market.annualized_vol,
            "trading_days_per_year": scenario.market.trading_days_per_year,
        },
        "impact": {
            "eta": scenario.impact.eta,
            "phi": scenario.impact.phi,
            "psi": scenario.impact.psi,
            "k": scenario.impact.k_perm,
        },
        "trader": {"gamma": scenario.gamma},
        "order": order,
        "volume": {
            "profile": profile if profile == "flat" else [list(p) for p in profile]
        },
    }


def with_parameter(scenario: Scenario, name: str, value: float) -> Scenario:
    """Return a copy of the scenario with one sweepable parameter replaced.

    Supported names: gamma, annualized_vol, q0, eta, phi, adv. ``q0`` sets
    the block size in absolute shares regardless of how the original
    scenario specified it.
    """
    if name == "gamma":
        return replace(scenario, gamma=value)
    if name == "annualized_vol":
        return replace(scenario, market=replace(scenario.market, annualized_vol=value))
    if name == "adv":
        return replace(scenario, market=replace(scenario.market, adv=value))
    if name == "eta":
        return replace(scenario, impact=replace(scenario.impact, eta=value))
    if name == "phi":
        return replace(scenario, impact=replace(scenario.impact, phi=value))
    if name == "q0":
        return replace(scenario, q0_shares=value, q0_adv_fraction=None)
    raise KeyError(name)


SWEEPABLE_PARAMETERS = ("gamma", "annualized_vol", "q0", "eta", "phi", "adv")


def _number(
    section: dict,
    section_name: str,
    key: str,
    source: str,
    positive: bool = False,
    nonnegative: bool = False,
    default: Optional[float] = None,
):
    field = f"{section_name}.{key}"
    if key not in section:
        if default is not None:
            return default
        raise ParseError(field, "missing required value", source=source)
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(field, f"must be a number, got {value!r}", source=source)
    value = float(value)
    if value != value:  # NaN
        raise ParseError(field, "must not be NaN", source=source)
    if positive and not value > 0.0:
        raise ParseError(field, f"must be > 0, got {value!r}", source=source)
    if nonnegative and not value >= 0.0:
        raise ParseError(field, f"must be >= 0, got {value!r}", source=source)
    return value


def _parse_profile(profile, source: str) -> ProfileSpec:
    if profile is None:
        raise ParseError("volume.profile", "missing required value", source=source)
    if profile == "flat":
        return "flat"
    if not isinstance(profile, list) or not profile:
        raise ParseError(
            "volume.profile",
            'must be "flat" or a non-empty list of [duration, rate] pairs',
            source=source,
        )
    pieces = []
    for i, entry in enumerate(profile):
        field = f"volume.profile[{i}]"
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ParseError(field, "must be a [duration, rate] pair", source=source)
        d, r = entry
        for label, x in (("duration", d), ("rate", r)):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"{field}.{label}", f"must be a number, got {x!r}", source=source)
        if not float(d) > 0.0:
            raise ParseError(f"{field}.duration", f"must be > 0, got {d!r}", source=source)
        if not float(r) > 0.0:
            raise ParseError(f"{field}.rate", f"must be > 0, got {r!r}", source=source)
        pieces.append((float(d), float(r)))
    total_duration = sum(d for d, _ in pieces)
    if abs(total_duration - 1.0) > _PROFILE_TOL:
        raise ParseError(
            "volume.profile",
            f"durations must sum to 1 day, got {total_duration!r}",
            source=source,
        )
    mean_rate = sum(d * r for d, r in pieces)
    if abs(mean_rate - 1.0) > _PROFILE_TOL:
        raise ParseError(
            "volume.profile",
            f"duration-weighted relative rates must average to 1, got {mean_rate!r}",
            source=source,
        )
    return tuple(pieces)
