"""Deterministic market-volume curves and their exact integrals.

A curve is a strictly positive, bounded volume rate V_t (shares per day)
given as a one-day piecewise-constant profile, extended periodically day
over day. Pieces are half-open intervals [start, end) so V_t is
single-valued at boundaries. Three quantities drive everything downstream:

* cumulative volume  ``int_0^t V_s ds``,
* the liquidation horizon T solving ``rho * int_0^T V_s ds = q0``,
* the risk integral ``int_0^T q_t^2 dt`` with residual inventory
  ``q_t = rho * int_t^T V_s ds``.

All three are evaluated in closed form: V is constant per piece, so the
cumulative volume is piecewise linear and q_t^2 integrates as a cubic on
each piece. No quadrature enters the core path.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .errors import (
    InvalidVolumeProfile,
    NegativeTime,
    NonPositiveInput,
    NonPositiveRate,
    RequiresFlatCurve,
)

#: absolute slack allowed on "durations sum to exactly one day"
_DAY_SUM_TOL = 1e-12


@dataclass(frozen=True)
class VolumeCurve:
    """One-day volume profile, periodically extended.

    ``durations`` are piece lengths in days (summing to 1), ``rates`` the
    corresponding volume rates in shares/day. Use :meth:`flat` or
    :meth:`piecewise` instead of the raw constructor.
    """

    durations: tuple[float, ...]
    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.durations or len(self.durations) != len(self.rates):
            raise InvalidVolumeProfile("profile needs at least one (duration, rate) piece")
        for i, (d, r) in enumerate(zip(self.durations, self.rates)):
            if not d > 0.0:
                raise NonPositiveInput(f"profile[{i}].duration", d)
            if not r > 0.0:
                raise NonPositiveInput(f"profile[{i}].rate", r)
        total = math.fsum(self.durations)
        if abs(total - 1.0) > _DAY_SUM_TOL:
            raise InvalidVolumeProfile(
                f"piece durations must sum to exactly 1 day, got {total!r}"
            )

    @classmethod
    def flat(cls, rate: float) -> "VolumeCurve":
        """Constant volume curve V_t = rate."""
        return cls(durations=(1.0,), rates=(float(rate),))

    @classmethod
    def piecewise(cls, profile: Sequence[tuple[float, float]]) -> "VolumeCurve":
        """Curve from (duration_days, shares_per_day) pieces covering one day."""
        durations = tuple(float(d) for d, _ in profile)
        rates = tuple(float(r) for _, r in profile)
        return cls(durations=durations, rates=rates)

    # -- derived structure ------------------------------------------------

    @cached_property
    def _bounds(self) -> tuple[float, ...]:
        """Piece start offsets within the day plus the closing 1.0."""
        b = [0.0]
        for d in self.durations:
            b.append(b[-1] + d)
        b[-1] = 1.0  # pin the day boundary despite rounding in the sum
        return tuple(b)

    @cached_property
    def _cum_in_day(self) -> tuple[float, ...]:
        """Cumulative volume at each piece start, ending with the daily total."""
        c = [0.0]
        for d, r in zip(self.durations, self.rates):
            c.append(c[-1] + d * r)
        return tuple(c)

    @property
    def daily_volume(self) -> float:
        """Total volume over one day, ``sum(duration * rate)``."""
        return self._cum_in_day[-1]

    @property
    def v_lower(self) -> float:
        return min(self.rates)

    @property
    def v_upper(self) -> float:
        return max(self.rates)

    @property
    def is_flat(self) -> bool:
        return self.v_lower == self.v_upper

    @property
    def flat_rate(self) -> float:
        """The constant rate V, available only on flat curves."""
        if not self.is_flat:
            raise RequiresFlatCurve(
                "this operation has a closed form only for a constant volume curve"
            )
        return self.rates[0]

    # -- operations --------------------------------------------------------

    def rate_at(self, t: float) -> float:
        """V_t, using the half-open piece convention and daily periodicity."""
        if t < 0.0:
            raise NegativeTime(t)
        frac = t % 1.0
        j = bisect_right(self._bounds, frac) - 1
        if j >= len(self.rates):  # frac rounded onto the closing boundary
            j = len(self.rates) - 1
        return self.rates[j]

    def cum_volume(self, t: float) -> float:
        """``int_0^t V_s ds``, exact per piece; strictly increasing in t."""
        if t < 0.0:
            raise NegativeTime(t)
        days = math.floor(t)
        frac = t - days
        j = bisect_right(self._bounds, frac) - 1
        if j >= len(self.rates):
            j = len(self.rates) - 1
        return (
            days * self.daily_volume
            + self._cum_in_day[j]
            + (frac - self._bounds[j]) * self.rates[j]
        )

    def completion_time(self, rho: float, q0: float) -> float:
        """The unique T with ``rho * cum_volume(T) = q0``.

        Exists and is unique because V_t >= v_lower > 0. Inverted
        analytically piece by piece, so the residual is at rounding level.
        """
        target = q0 / self._checked(rho, q0)
        days, rem = self._split_days(target)
        cum = self._cum_in_day
        j = bisect_right(cum, rem) - 1
        if j >= len(self.rates):
            j = len(self.rates) - 1
        return days + self._bounds[j] + (rem - cum[j]) / self.rates[j]

    def risk_integral(self, rho: float, q0: float) -> float:
        """``rho^2 * int_0^T (int_t^T V_s ds)^2 dt``, i.e. ``int_0^T q_t^2 dt``.

        q_t falls linearly within each piece, so each piece contributes a
        cubic evaluated exactly. Whole days are aggregated in closed form
        (the inventory at a given piece start is arithmetic across days),
        which keeps the cost O(pieces) regardless of how many days the
        liquidation spans.
        """
        target = q0 / self._checked(rho, q0)
        big_m = self.daily_volume
        full_days, rem = self._split_days(target)

        durations, rates = self.durations, self.rates
        cum = self._cum_in_day
        total = 0.0

        if full_days > 0:
            d_count = float(full_days)
            beta = rho * big_m
            s1 = d_count * (d_count - 1.0) / 2.0
            s2 = d_count * (d_count - 1.0) * (2.0 * d_count - 1.0) / 6.0
            for j, (dur, rate) in enumerate(zip(durations, rates)):
                alpha = q0 - rho * cum[j]  # inventory at this piece's start, day 0
                w = rho * dur * rate  # executed market share during the piece
                sum_a2 = alpha * alpha * d_count - 2.0 * alpha * beta * s1 + beta * beta * s2
                sum_a = alpha * d_count - beta * s1
                total += dur * (sum_a2 - w * sum_a + d_count * w * w / 3.0)

        # partial last day: walk pieces until the remaining inventory runs out
        q = rho * rem
        for dur, rate in zip(durations, rates):
            w = rho * dur * rate
            if q <= w:
                total += q * q * q / (3.0 * rho * rate)
                break
            total += dur * (q * q - q * w + w * w / 3.0)
            q -= w
        else:  # rounding residue past the last piece
            total += q * q * q / (3.0 * rho * rates[-1])
        return total

    # -- helpers -----------------------------------------------------------

    def _checked(self, rho: float, q0: float) -> float:
        if not rho > 0.0:
            raise NonPositiveRate(rho)
        if not q0 > 0.0:
            raise NonPositiveInput("q0", q0)
        return rho

    def _split_days(self, volume: float) -> tuple[int, float]:
        """Split a cumulative-volume target into full days plus a remainder."""
        big_m = self.daily_volume
        days = math.floor(volume / big_m)
        rem = volume - days * big_m
        if rem < 0.0:
            days -= 1
            rem = volume - days * big_m
        elif rem >= big_m:
            days += 1
            rem = volume - days * big_m
            rem = max(rem, 0.0)
        return days, rem
