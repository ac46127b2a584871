"""Rolling per-market estimation and cross-market correlation.

For each sub-period t = 1 .. T-1 the Hurst exponent and ApEn are measured on
the estimation window and the NN hit-rate on the following prediction window.
Market means are taken over those T-1 periods. An extra estimation-only
period t = T (the trailing window) feeds the first-vs-last comparison.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .apen import ApEnConfig, compute_apen
from .dfa import DfaConfig, estimate_hurst
from .nn import EmbeddingConfig, walk_forward_hit_rate
from .timeseries import (PriceSeries, ReturnSeries, WindowPlan, build_window_plan,
                         final_estimation_period, log_returns)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubPeriodRow:
    t: int
    hurst: float
    apen: float
    hit_rate: float


@dataclass(frozen=True)
class MarketSummary:
    market_id: str
    per_subperiod: tuple[SubPeriodRow, ...]
    mean_hurst: float
    mean_apen: float
    mean_hit_rate: float
    # (H_1, A_1, H_T, A_T); None where that window was degenerate
    first_last: tuple[Optional[float], Optional[float], Optional[float], Optional[float]]
    excluded: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_subperiod"] = [asdict(r) for r in self.per_subperiod]
        d["first_last"] = dict(zip(("hurst_first", "apen_first", "hurst_last", "apen_last"),
                                   self.first_last))
        d["excluded"] = list(self.excluded)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MarketSummary":
        fl = d["first_last"]
        return cls(
            d["market_id"],
            tuple(SubPeriodRow(**r) for r in d["per_subperiod"]),
            d["mean_hurst"], d["mean_apen"], d["mean_hit_rate"],
            (fl["hurst_first"], fl["apen_first"], fl["hurst_last"], fl["apen_last"]),
            tuple(d.get("excluded", ())),
        )


@dataclass(frozen=True)
class CorrelationReport:
    rho_H_A: float
    rho_NN_H: float
    rho_NN_A: float
    n_markets: int

    def to_dict(self) -> dict:
        return asdict(self)


def _measure(window: np.ndarray, dfa: DfaConfig, apen_cfg: ApEnConfig):
    res = estimate_hurst(window, dfa)
    if res.degenerate:
        return None, None
    return res.hurst, compute_apen(window, apen_cfg).value


def run_returns(returns: ReturnSeries, plan: WindowPlan = WindowPlan(),
                dfa: DfaConfig = DfaConfig(), apen_cfg: ApEnConfig = ApEnConfig(),
                nn: EmbeddingConfig = EmbeddingConfig()) -> MarketSummary:
    """Rolling H, ApEn and hit-rate for one return series."""
    plan.check_scales(dfa.max_scale)
    x = returns.returns
    subs = build_window_plan(len(x), plan)
    rows, excluded = [], []
    first = (None, None)
    for sub in subs:
        lo, hi = sub.estimation_range
        h, a = _measure(x[lo:hi], dfa, apen_cfg)
        if sub.t == 1:
            first = (h, a)
        if h is None:
            log.info("%s: sub-period %d has a degenerate DFA window, excluded",
                     returns.market_id, sub.t)
            excluded.append(sub.t)
            continue
        nn_res = walk_forward_hit_rate(x, sub, nn)
        rows.append(SubPeriodRow(sub.t, h, a, nn_res.hit_rate))
    lo, hi = final_estimation_period(len(x), plan).estimation_range
    last = _measure(x[lo:hi], dfa, apen_cfg)
    if rows:
        means = tuple(math.fsum(getattr(r, f) for r in rows) / len(rows)
                      for f in ("hurst", "apen", "hit_rate"))
    else:
        means = (math.nan,) * 3
    return MarketSummary(returns.market_id, tuple(rows), *means,
                         first_last=(*first, *last), excluded=tuple(excluded))


def run_market(prices: PriceSeries, plan: WindowPlan = WindowPlan(),
               dfa: DfaConfig = DfaConfig(), apen_cfg: ApEnConfig = ApEnConfig(),
               nn: EmbeddingConfig = EmbeddingConfig()) -> MarketSummary:
    return run_returns(log_returns(prices), plan, dfa, apen_cfg, nn)


def mean_hit_rate(returns: ReturnSeries, plan: WindowPlan = WindowPlan(),
                  nn: EmbeddingConfig = EmbeddingConfig(),
                  skip: Sequence[int] = ()) -> float:
    """NN-bar alone, for sweeping embedding settings without re-estimating H and ApEn."""
    subs = [s for s in build_window_plan(len(returns), plan) if s.t not in set(skip)]
    return math.fsum(walk_forward_hit_rate(returns, s, nn).hit_rate for s in subs) / len(subs)


def _run_one(args):
    return run_returns(*args)


def run_panel(series: Sequence[ReturnSeries], plan: WindowPlan = WindowPlan(),
              dfa: DfaConfig = DfaConfig(), apen_cfg: ApEnConfig = ApEnConfig(),
              nn: EmbeddingConfig = EmbeddingConfig(), workers: int = 1) -> list[MarketSummary]:
    """Run every market; results come back in input order regardless of ``workers``."""
    jobs = [(r, plan, dfa, apen_cfg, nn) for r in series]
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-d sequences of equal length")
    if len(x) < 3:
        raise ValueError(f"pearson needs at least 3 points, got {len(x)}")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("correlation undefined for a constant input")
    return float(np.clip(float(dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))


def cross_market_correlations(summaries: Sequence[MarketSummary]) -> CorrelationReport:
    """Pearson coefficients across markets of (H-bar, A-bar, NN-bar)."""
    # canonical order makes the coefficients exactly permutation-invariant
    usable = sorted((s for s in summaries if not math.isnan(s.mean_hurst)),
                    key=lambda s: s.market_id)
    if len(usable) < 3:
        raise ValueError(f"need at least 3 markets with valid means, got {len(usable)}")
    h = [s.mean_hurst for s in usable]
    a = [s.mean_apen for s in usable]
    nn = [s.mean_hit_rate for s in usable]
    return CorrelationReport(pearson(h, a), pearson(nn, h), pearson(nn, a), len(usable))
