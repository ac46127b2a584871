"""Ground-truth series: exact fractional Gaussian noise and i.i.d. surrogates.

All randomness comes from numpy's PCG64 generator (``np.random.default_rng``),
so a given seed reproduces the same draws on every platform.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .timeseries import ReturnSeries, business_days

SERIES_START = dt.date(1992, 1, 2)


@dataclass(frozen=True)
class FgnSpec:
    hurst: float
    n: int
    seed: int = 0
    scale: float = 1.0
    market_id: str = "fgn"

    def __post_init__(self):
        if not 0 < self.hurst < 1:
            raise ValueError(f"hurst must lie strictly inside (0, 1), got {self.hurst!r}")
        if self.n < 64:
            raise ValueError(f"n must be >= 64, got {self.n}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


@dataclass(frozen=True)
class SurrogateSpec:
    mean: float
    std: float
    n: int
    seed: int = 0
    market_id: str = "surrogate"

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError("std must be positive")
        if self.n < 1:
            raise ValueError("n must be positive")


def fgn_autocovariance(hurst: float, k, scale: float = 1.0) -> np.ndarray:
    k = np.abs(np.asarray(k, dtype=float))
    h2 = 2.0 * hurst
    return 0.5 * scale**2 * (np.abs(k + 1) ** h2 - 2 * k**h2 + np.abs(k - 1) ** h2)


def _circulant_sample(gamma: np.ndarray, rng: np.random.Generator) -> np.ndarray | None:
    n = len(gamma) - 1
    row = np.concatenate((gamma, gamma[-2:0:-1]))
    lam = np.fft.fft(row).real
    if lam.min() < -1e-10 * lam.max():
        return None
    M = len(row)
    z = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    # real part of the transform has exactly the circulant covariance
    w = np.fft.fft(np.sqrt(np.clip(lam, 0, None) / M) * z)
    return w.real[:n]


def _cholesky_sample(gamma: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(gamma) - 1
    idx = np.arange(n)
    cov = gamma[np.abs(idx[:, None] - idx[None, :])]
    chol = np.linalg.cholesky(cov)
    return chol @ rng.standard_normal(n)


def gen_fgn(spec: FgnSpec) -> ReturnSeries:
    """Exact fGn by circulant embedding; Cholesky of the Toeplitz covariance if the
    embedding has negative eigenvalues."""
    rng = np.random.default_rng(spec.seed)
    gamma = fgn_autocovariance(spec.hurst, np.arange(spec.n + 1))
    x = _circulant_sample(gamma, rng)
    if x is None:
        try:
            x = _cholesky_sample(gamma, rng)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"fGn covariance for H={spec.hurst} is not embeddable") from exc
    return ReturnSeries(spec.market_id, business_days(SERIES_START, spec.n), spec.scale * x)


def gen_surrogate(spec: SurrogateSpec) -> ReturnSeries:
    rng = np.random.default_rng(spec.seed)
    x = rng.normal(spec.mean, spec.std, spec.n)
    return ReturnSeries(spec.market_id, business_days(SERIES_START, spec.n), x)


def moment_match(source: ReturnSeries, seed: int) -> ReturnSeries:
    """i.i.d. Gaussian series with the source's sample mean, std and length."""
    x = source.returns
    if len(x) < 2 or np.ptp(x) == 0:
        raise ValueError(f"{source.market_id}: cannot moment-match a constant or too-short series")
    sur = gen_surrogate(SurrogateSpec(float(x.mean()), float(x.std(ddof=1)), len(x), seed,
                                      market_id=source.market_id))
    return ReturnSeries(source.market_id, source.dates, sur.returns)


@dataclass(frozen=True)
class PanelMarket:
    market_id: str
    hurst_target: float
    returns: ReturnSeries


def fgn_panel(n_markets: int = 27, h_low: float = 0.45, h_high: float = 0.70,
              n_obs: int = 15 * 252, seed: int = 0, scale: float = 0.01) -> list[PanelMarket]:
    """Markets of fGn returns with H* drawn uniformly from [h_low, h_high]."""
    rng = np.random.default_rng(seed)
    hs = rng.uniform(h_low, h_high, n_markets)
    seeds = rng.integers(0, 2**63 - 1, n_markets)
    width = len(str(n_markets))
    out = []
    for j, (h, s) in enumerate(zip(hs, seeds)):
        mid = f"M{j + 1:0{width}d}"
        r = gen_fgn(FgnSpec(float(h), n_obs, int(s), scale, market_id=mid))
        out.append(PanelMarket(mid, float(h), r))
    return out


def surrogate_panel(panel: list[PanelMarket], seed: int = 0) -> list[PanelMarket]:
    """Moment-matched i.i.d. copy of every market in ``panel``."""
    seeds = np.random.default_rng(seed).integers(0, 2**63 - 1, len(panel))
    return [PanelMarket(p.market_id, 0.5, moment_match(p.returns, int(s)))
            for p, s in zip(panel, seeds)]
