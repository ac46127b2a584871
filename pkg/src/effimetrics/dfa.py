"""Hurst exponent by detrended fluctuation analysis (DFA).

The profile (mean-removed cumulative sum) is cut into non-overlapping boxes of
size n, a least-squares polynomial trend is removed inside each box, and the
root-mean-square residual F(n) is regressed on n in log-log coordinates:
F(n) ~ c * n**H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

DEFAULT_SCALES = (16, 32, 64, 128, 256)


def dyadic_scales(n_obs: int, min_scale: int = 16) -> tuple[int, ...]:
    """Powers of two from ``min_scale`` up to ``n_obs // 4``."""
    out = []
    s = min_scale
    while s <= n_obs // 4:
        out.append(s)
        s *= 2
    return tuple(out)


@dataclass(frozen=True)
class DfaConfig:
    scales: tuple[int, ...] = DEFAULT_SCALES
    detrend_degree: int = 1
    # inclusive (min_scale, max_scale) bounds for the log-log fit; None = all scales
    fit_range: Optional[tuple[int, int]] = None
    # also cover the tail remainder with boxes laid from the series end
    double_cover: bool = False

    def __post_init__(self):
        scales = tuple(int(s) for s in self.scales)
        object.__setattr__(self, "scales", scales)
        if not scales:
            raise ValueError("at least one scale is required")
        if list(scales) != sorted(set(scales)):
            raise ValueError(f"scales must be strictly ascending, got {scales}")
        if self.detrend_degree < 0:
            raise ValueError("detrend_degree must be >= 0")
        if scales[0] < self.detrend_degree + 2:
            raise ValueError(
                f"smallest scale {scales[0]} must be >= detrend_degree + 2 "
                f"= {self.detrend_degree + 2}"
            )
        if len(self.fit_scales) < 2:
            raise ValueError("fit_range must contain at least two scales")

    @property
    def max_scale(self) -> int:
        return self.scales[-1]

    @property
    def fit_scales(self) -> tuple[int, ...]:
        if self.fit_range is None:
            return self.scales
        lo, hi = self.fit_range
        return tuple(s for s in self.scales if lo <= s <= hi)


@dataclass(frozen=True)
class DfaResult:
    hurst: Optional[float]
    log_intercept: Optional[float]
    r_squared: Optional[float]
    per_scale: tuple[tuple[int, float], ...]
    degenerate: bool = False

    @property
    def ok(self) -> bool:
        return not self.degenerate


def profile(window: Sequence[float]) -> np.ndarray:
    """Cumulative sum of the mean-removed window."""
    x = np.asarray(window, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError(f"profile needs a 1-d window of at least 2 points, got {x.shape}")
    return np.cumsum(x - x.mean())


def _box_residual_ss(boxes: np.ndarray, degree: int) -> float:
    """Sum of squared OLS polynomial residuals over the rows of ``boxes``."""
    n = boxes.shape[1]
    # centred abscissa keeps the Vandermonde system well conditioned
    i = np.arange(n, dtype=float) - (n - 1) / 2.0
    X = np.vander(i, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(X, boxes.T, rcond=None)
    resid = boxes - (X @ coef).T
    return float(np.sum(resid * resid))


def fluctuation_at_scale(prof: Sequence[float], n: int, detrend_degree: int = 1,
                         double_cover: bool = False) -> float:
    """RMS residual of the profile after per-box polynomial detrending."""
    y = np.asarray(prof, dtype=float)
    if n < detrend_degree + 2:
        raise ValueError(f"scale {n} too small for detrend degree {detrend_degree}")
    nb = len(y) // n
    if nb < 1:
        raise ValueError(f"scale {n} exceeds profile length {len(y)}")
    ss = _box_residual_ss(y[: nb * n].reshape(nb, n), detrend_degree)
    covered = nb * n
    if double_cover:
        ss += _box_residual_ss(y[len(y) - nb * n:].reshape(nb, n), detrend_degree)
        covered *= 2
    return float(np.sqrt(ss / covered))


def _ols_line(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float, float]:
    xm, ym = xs.mean(), ys.mean()
    dx, dy = xs - xm, ys - ym
    sxx = float(dx @ dx)
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    syy = float(dy @ dy)
    r2 = 1.0 if syy == 0 else float(dx @ dy) ** 2 / (sxx * syy)
    return slope, intercept, r2


def estimate_hurst(window: Sequence[float], config: DfaConfig = DfaConfig()) -> DfaResult:
    """Slope of ln F(n) against ln n over the configured fit scales.

    A window whose fluctuation vanishes at some scale (e.g. identical returns)
    yields a result with ``degenerate=True`` and ``hurst=None``.
    """
    x = np.asarray(window, dtype=float)
    if len(x) < 4 * config.max_scale:
        raise ValueError(
            f"window of {len(x)} points is shorter than 4 x max scale ({config.max_scale})"
        )
    y = profile(x)
    per_scale = tuple(
        (n, fluctuation_at_scale(y, n, config.detrend_degree, config.double_cover))
        for n in config.scales
    )
    # relative zero: exact-constant windows leave only rounding residue in the profile
    floor = 1e-9 * float(np.max(np.abs(x)))
    if any(f <= floor for _, f in per_scale):
        return DfaResult(None, None, None, per_scale, degenerate=True)
    fit = [(n, f) for n, f in per_scale if n in config.fit_scales]
    ln_n = np.log([n for n, _ in fit])
    ln_f = np.log([f for _, f in fit])
    slope, intercept, r2 = _ols_line(ln_n, ln_f)
    return DfaResult(slope, intercept, r2, per_scale)
