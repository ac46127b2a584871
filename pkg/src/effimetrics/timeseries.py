"""Price and return series plus the rolling sub-period calendar.

Series are evenly spaced in event time: missing trading days are not imputed,
and a "year" is a configurable count of trading days (252 by default).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TRADING_DAYS_PER_YEAR = 252


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PriceSeries:
    market_id: str
    dates: tuple[dt.date, ...]
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "prices", _frozen(self.prices))
        if self.prices.ndim != 1 or len(self.prices) != len(self.dates):
            raise ValueError("dates and prices must be 1-d sequences of equal length")
        if len(self.prices) < 2:
            raise ValueError(f"{self.market_id}: a price series needs at least 2 observations")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise ValueError(f"{self.market_id}: dates not strictly increasing at {cur}")
        bad = np.flatnonzero(~(self.prices > 0))
        if bad.size:
            i = int(bad[0])
            raise ValueError(
                f"{self.market_id}: non-positive price {self.prices[i]!r} on {self.dates[i]}"
            )

    def __len__(self) -> int:
        return len(self.prices)


@dataclass(frozen=True)
class ReturnSeries:
    market_id: str
    dates: tuple[dt.date, ...]
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "returns", _frozen(self.returns))
        if self.returns.ndim != 1 or len(self.returns) != len(self.dates):
            raise ValueError("dates and returns must be 1-d sequences of equal length")

    def __len__(self) -> int:
        return len(self.returns)

    def segment(self, rng: tuple[int, int]) -> np.ndarray:
        lo, hi = rng
        return self.returns[lo:hi]


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """ln P(t) - ln P(t-1), dated by the later observation."""
    # PriceSeries already rejects non-positive prices by date.
    r = np.diff(np.log(prices.prices))
    return ReturnSeries(prices.market_id, prices.dates[1:], r)


def business_days(start: dt.date, n: int) -> tuple[dt.date, ...]:
    """`n` consecutive weekdays starting at (or after) `start`."""
    out = []
    d = start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return tuple(out)


def prices_from_returns(
    market_id: str,
    returns: Sequence[float],
    start_price: float = 100.0,
    start: dt.date = dt.date(1992, 1, 1),
) -> PriceSeries:
    """Inverse of :func:`log_returns`: compound returns onto ``start_price``."""
    r = np.asarray(returns, dtype=float)
    p = start_price * np.exp(np.concatenate(([0.0], np.cumsum(r))))
    return PriceSeries(market_id, business_days(start, len(p)), p)


@dataclass(frozen=True)
class WindowPlan:
    """Estimation / shift / prediction lengths, all in trading days."""

    estimation_len: int = 5 * TRADING_DAYS_PER_YEAR
    shift_len: int = TRADING_DAYS_PER_YEAR
    prediction_len: int = TRADING_DAYS_PER_YEAR
    allow_overlap: bool = False

    def __post_init__(self):
        for name in ("estimation_len", "shift_len", "prediction_len"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.prediction_len > self.shift_len and not self.allow_overlap:
            raise ValueError(
                "prediction_len > shift_len overlaps the next estimation span; "
                "set allow_overlap=True to permit it"
            )

    @classmethod
    def years(cls, estimation: int = 5, shift: int = 1, prediction: int = 1,
              days_per_year: int = TRADING_DAYS_PER_YEAR) -> "WindowPlan":
        return cls(estimation * days_per_year, shift * days_per_year, prediction * days_per_year)

    def check_scales(self, max_scale: int) -> None:
        if self.estimation_len < 4 * max_scale:
            raise ValueError(
                f"estimation_len={self.estimation_len} is shorter than 4 x largest "
                f"DFA scale ({max_scale})"
            )

    @property
    def min_obs(self) -> int:
        return self.estimation_len + self.prediction_len


@dataclass(frozen=True)
class SubPeriod:
    t: int
    estimation_range: tuple[int, int]
    prediction_range: tuple[int, int] = field(default=(0, 0))


def build_window_plan(n_obs: int, plan: WindowPlan) -> list[SubPeriod]:
    """Sub-periods anchored at the series start, stride ``shift_len``.

    Partial trailing windows are dropped.
    """
    if n_obs < plan.min_obs:
        raise ValueError(
            f"series of {n_obs} observations is too short: the plan needs at least "
            f"{plan.min_obs} (estimation {plan.estimation_len} + prediction {plan.prediction_len})"
        )
    count = (n_obs - plan.estimation_len - plan.prediction_len) // plan.shift_len + 1
    subs = []
    for k in range(count):
        lo = k * plan.shift_len
        mid = lo + plan.estimation_len
        subs.append(SubPeriod(k + 1, (lo, mid), (mid, mid + plan.prediction_len)))
    return subs


def final_estimation_period(n_obs: int, plan: WindowPlan) -> SubPeriod:
    """The estimation-only period t = T: the trailing ``estimation_len`` observations.

    It has no prediction range and is used only for the first-vs-last comparison.
    """
    count = len(build_window_plan(n_obs, plan))
    return SubPeriod(count + 1, (n_obs - plan.estimation_len, n_obs), (n_obs, n_obs))
