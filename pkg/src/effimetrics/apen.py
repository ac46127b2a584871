"""Approximate Entropy (ApEn) of a return window.

ApEn(m, r) = phi(m) - phi(m + 1), where phi(m) averages ln C_i^m(r) over the
N - m + 1 length-m templates and C_i^m(r) is the fraction of templates within
Chebyshev distance r of template i (self-match included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# rows of the pairwise-closeness matrix processed per block
_BLOCK = 2048


@dataclass(frozen=True)
class ApEnConfig:
    m: int = 2
    r_fraction: float = 0.20

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not 0 < self.r_fraction < 1:
            raise ValueError(f"r_fraction must lie in (0, 1), got {self.r_fraction!r}")


@dataclass(frozen=True)
class ApEnResult:
    value: float
    phi_m: float
    phi_m_plus_1: float
    n_used: int
    r: float


def chebyshev_distance(u: Sequence[float], v: Sequence[float]) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1 or len(u) < 1:
        raise ValueError(f"vectors must be 1-d with equal length >= 1, got {u.shape} and {v.shape}")
    return float(np.max(np.abs(u - v)))


def correlation_fraction(window: Sequence[float], i: int, m: int, r: float) -> float:
    """C_i^m(r) for the 1-based template index ``i``."""
    x = np.asarray(window, dtype=float)
    n_templates = len(x) - m + 1
    if not 1 <= i <= n_templates:
        raise ValueError(f"template index {i} outside [1, {n_templates}]")
    if r <= 0:
        raise ValueError("tolerance r must be positive")
    templates = np.lib.stride_tricks.sliding_window_view(x, m)
    dist = np.max(np.abs(templates - templates[i - 1]), axis=1)
    return int(np.count_nonzero(dist <= r)) / n_templates


def match_counts(window: Sequence[float], m: int, r: float) -> np.ndarray:
    """B_i(r) for every length-m template, self-match included.

    Pairs of templates are close iff every aligned pair of points is within r,
    so a single N x N point-closeness matrix serves every dimension.
    """
    x = np.asarray(window, dtype=float)
    n_templates = len(x) - m + 1
    if n_templates < 1:
        raise ValueError(f"window of {len(x)} points has no templates of length {m}")
    counts = np.empty(n_templates, dtype=np.int64)
    for lo in range(0, n_templates, _BLOCK):
        hi = min(lo + _BLOCK, n_templates)
        # close[a, b]: |x[lo + a + k] - x[b + k]| <= r, accumulated over k
        match = np.ones((hi - lo, n_templates), dtype=bool)
        for k in range(m):
            rows = x[lo + k: hi + k, None]
            cols = x[None, k: k + n_templates]
            match &= np.abs(rows - cols) <= r
        counts[lo:hi] = match.sum(axis=1)
    return counts


def phi(window: Sequence[float], m: int, r: float) -> float:
    """Mean of ln C_i^m(r) over all templates; always finite (self-matches)."""
    counts = match_counts(window, m, r)
    n_templates = len(counts)
    # math.fsum keeps the reduction order-independent and bit-stable
    return math.fsum(np.log(counts / n_templates)) / n_templates


def compute_apen(window: Sequence[float], config: ApEnConfig = ApEnConfig()) -> ApEnResult:
    """ApEn with tolerance ``r_fraction`` x the window's sample standard deviation."""
    x = np.asarray(window, dtype=float)
    if len(x) < config.m + 2:
        raise ValueError(f"window of {len(x)} points too short for m={config.m}")
    sd = float(np.std(x, ddof=1))
    if np.ptp(x) == 0 or not sd > 0:
        raise ValueError("zero-variance window: ApEn tolerance degenerates")
    r = config.r_fraction * sd
    pm = phi(x, config.m, r)
    pm1 = phi(x, config.m + 1, r)
    return ApEnResult(pm - pm1, pm, pm1, len(x), r)
