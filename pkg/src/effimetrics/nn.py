"""Nearest-neighbour direction forecasting on delay-embedded return patterns.

For a target day the last m-dimensional delay vector [x_n, x_{n-tau}, ...] of
the trailing window is matched against every earlier vector that has a known
next-day return. The K closest (squared Euclidean distance) are confirmed at
dimension m + 1, and the surviving neighbours vote on the sign of tomorrow's
return.

Zero returns are classed as DOWN, both in neighbour votes and in outcomes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .timeseries import ReturnSeries, SubPeriod


class Direction(enum.Enum):
    UP = "UP"
    DOWN = "DOWN"

    @classmethod
    def of(cls, value: float) -> "Direction":
        return cls.UP if value > 0 else cls.DOWN


@dataclass(frozen=True)
class EmbeddingConfig:
    m: int = 2
    tau: int = 1
    k: int = 20

    def __post_init__(self):
        for name in ("m", "tau", "k"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")


def _sq_dist(vectors: np.ndarray, target: np.ndarray) -> np.ndarray:
    # fixed component order so every code path rounds identically
    shape = np.broadcast_shapes(vectors.shape, target.shape)[:-1]
    d = np.zeros(shape)
    for j in range(vectors.shape[-1]):
        diff = vectors[..., j] - target[..., j]
        d += diff * diff
    return d


def _embed(x: np.ndarray, dim: int, tau: int) -> np.ndarray:
    """Row p holds [x_p, x_{p-tau}, ...] for p = (dim-1)*tau ... len(x)-1."""
    start = (dim - 1) * tau
    if start >= len(x):
        return np.empty((0, dim))
    cols = [x[start - j * tau: len(x) - j * tau] for j in range(dim)]
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class PatternLibrary:
    """Delay vectors of one window, indexed by window-local position n.

    Only positions with n + 1 inside the window have a successor and are
    candidate matches.
    """

    window: np.ndarray
    m: int
    tau: int
    vectors_m: np.ndarray = field(repr=False)
    vectors_m1: np.ndarray = field(repr=False)

    @property
    def first_m(self) -> int:
        return (self.m - 1) * self.tau

    @property
    def first_m1(self) -> int:
        return self.m * self.tau

    @property
    def candidates(self) -> np.ndarray:
        return np.arange(self.first_m, len(self.window) - 1)

    def vector_m(self, n: int) -> np.ndarray:
        return self.vectors_m[n - self.first_m]

    def vector_m1(self, n: int) -> np.ndarray:
        if n < self.first_m1:
            raise IndexError(f"position {n} has no {self.m + 1}-dimensional vector")
        return self.vectors_m1[n - self.first_m1]

    def successor(self, n: int) -> float:
        if not self.first_m <= n < len(self.window) - 1:
            raise IndexError(f"position {n} has no successor in the window")
        return float(self.window[n + 1])

    def successors(self) -> dict[int, float]:
        return {int(n): float(self.window[n + 1]) for n in self.candidates}


def reconstruct(window: Sequence[float], config: EmbeddingConfig = EmbeddingConfig()) -> PatternLibrary:
    x = np.asarray(window, dtype=float)
    m, tau = config.m, config.tau
    if len(x) < (m - 1) * tau + 2:
        raise ValueError(
            f"window of {len(x)} points too short for m={m}, tau={tau} "
            f"(needs at least {(m - 1) * tau + 2})"
        )
    return PatternLibrary(x, m, tau, _embed(x, m, tau), _embed(x, m + 1, tau))


@dataclass(frozen=True)
class Neighbors:
    indices: np.ndarray
    distances: np.ndarray
    truncated: bool = False


def find_neighbors(target: Sequence[float], library: PatternLibrary, k: int) -> Neighbors:
    """The ``k`` candidates closest to ``target``, nearest first, ties to the older pattern."""
    t = np.asarray(target, dtype=float)
    if t.shape != (library.m,):
        raise ValueError(f"target must have dimension {library.m}, got {t.shape}")
    cand = library.candidates
    if len(cand) == 0:
        raise ValueError("library has no candidate patterns")
    d = _sq_dist(library.vectors_m[cand - library.first_m], t)
    order = np.argsort(d, kind="stable")
    truncated = k > len(cand)
    order = order[:k]
    return Neighbors(cand[order], d[order], truncated)


@dataclass(frozen=True)
class Refinement:
    indices: np.ndarray
    fallback: bool = False


def refine_matches(candidates: Sequence[int], target_m1: Sequence[float],
                   library: PatternLibrary) -> Refinement:
    """Keep candidates whose (m+1)-distance stays within the largest m-distance among them.

    Candidates too early in the window to have an (m+1)-vector cannot be
    confirmed. If nothing survives, the single best (m+1)-distance candidate
    is kept and the result is flagged.
    """
    cand = np.asarray(candidates, dtype=int)
    t1 = np.asarray(target_m1, dtype=float)
    if t1.shape != (library.m + 1,):
        raise ValueError(f"target must have dimension {library.m + 1}, got {t1.shape}")
    d_m = _sq_dist(library.vectors_m[cand - library.first_m], t1[: library.m])
    threshold = d_m.max()
    has_m1 = cand >= library.first_m1
    d_m1 = np.full(len(cand), np.inf)
    d_m1[has_m1] = _sq_dist(library.vectors_m1[cand[has_m1] - library.first_m1], t1)
    keep = has_m1 & (d_m1 <= threshold)
    if keep.any():
        return Refinement(cand[keep])
    if has_m1.any():
        return Refinement(cand[[int(np.argmin(d_m1))]], fallback=True)
    return Refinement(cand[:1], fallback=True)


@dataclass(frozen=True)
class DirectionForecast:
    direction: Direction
    up_votes: int
    down_votes: int
    neighbor_indices: tuple[int, ...]


def _vote(successors: np.ndarray) -> tuple[Direction, int, int]:
    up = int(np.count_nonzero(successors > 0))
    down = len(successors) - up
    if up != down:
        return (Direction.UP if up > down else Direction.DOWN), up, down
    return Direction.of(successors[0]), up, down


def forecast_direction(refined: Sequence[int], library: PatternLibrary) -> DirectionForecast:
    """Majority vote of the successors; a tie goes to the nearest neighbour's successor."""
    idx = np.asarray(refined, dtype=int)
    if len(idx) == 0:
        raise ValueError("no neighbours to vote")
    direction, up, down = _vote(library.window[idx + 1])
    return DirectionForecast(direction, up, down, tuple(int(i) for i in idx))


@dataclass(frozen=True)
class HitRateResult:
    hits: int
    total: int
    hit_rate: float
    days: tuple[int, ...] = ()
    predicted: tuple[Direction, ...] = ()
    actual: tuple[Direction, ...] = ()


def _result(days, predicted, actual) -> HitRateResult:
    hits = sum(p == a for p, a in zip(predicted, actual))
    total = len(days)
    return HitRateResult(hits, total, hits / total if total else float("nan"),
                         tuple(days), tuple(predicted), tuple(actual))


def predict_day(x: np.ndarray, d: int, estimation_len: int,
                config: EmbeddingConfig) -> DirectionForecast:
    """Forecast day ``d`` from a library rebuilt on x[d - estimation_len : d]."""
    _check_len(estimation_len, config)
    lib = reconstruct(x[d - estimation_len: d], config)
    last = estimation_len - 1
    nb = find_neighbors(lib.vector_m(last), lib, config.k)
    ref = refine_matches(nb.indices, lib.vector_m1(last), lib)
    return forecast_direction(ref.indices, lib)


def _check_len(L: int, config: EmbeddingConfig) -> None:
    # the target needs an (m+1)-vector and at least one candidate must have one too
    if L <= config.m * config.tau + 1:
        raise ValueError(f"window of {L} points too short for m={config.m}, tau={config.tau} "
                         f"(needs more than {config.m * config.tau + 1})")


def _check_sub(n_obs: int, sub: SubPeriod) -> tuple[int, int, int]:
    e_lo, e_hi = sub.estimation_range
    p_lo, p_hi = sub.prediction_range
    if not (0 <= e_lo < e_hi == p_lo <= p_hi <= n_obs):
        raise ValueError(f"sub-period {sub} does not fit a series of {n_obs} observations")
    return e_hi - e_lo, p_lo, p_hi


def walk_forward_hit_rate(series: ReturnSeries | Sequence[float], sub: SubPeriod,
                          config: EmbeddingConfig = EmbeddingConfig(),
                          method: str = "batch") -> HitRateResult:
    """One-day-ahead direction hit-rate over the sub-period's prediction range.

    Each day d is forecast from the ``estimation_len`` days ending at d - 1,
    so the library slides forward one day per forecast. ``method="rebuild"``
    reconstructs the library from scratch every day; ``"batch"`` slides index
    bounds over one shared embedding and evaluates all days together. The two
    agree exactly.
    """
    x = series.returns if isinstance(series, ReturnSeries) else np.asarray(series, dtype=float)
    L, p_lo, p_hi = _check_sub(len(x), sub)
    if method == "rebuild":
        days = range(p_lo, p_hi)
        predicted = [predict_day(x, d, L, config).direction for d in days]
    elif method == "batch":
        days = range(p_lo, p_hi)
        predicted = _batch_predict(x, L, p_lo, p_hi, config)
    else:
        raise ValueError(f"unknown method {method!r}")
    actual = [Direction.of(x[d]) for d in days]
    return _result(list(days), predicted, actual)


def _batch_predict(x: np.ndarray, L: int, p_lo: int, p_hi: int,
                   config: EmbeddingConfig) -> list[Direction]:
    m, tau, k = config.m, config.tau, config.k
    _check_len(L, config)
    if p_hi == p_lo:
        return []
    first_m, first_m1 = (m - 1) * tau, m * tau
    # every library vector used by any day in the range, by global position
    pool = np.arange(p_lo - L + first_m, p_hi - 1)
    targets = np.arange(p_lo, p_hi) - 1
    lag = np.arange(m + 1) * tau
    # lags before the series start only feed masked-out (m+1)-distances
    V = x[np.clip(pool[:, None] - lag[None, :], 0, None)]
    T = x[targets[:, None] - lag[None, :]]

    d_m = _sq_dist(V[None, :, :m], T[:, None, :m])
    lo = targets[:, None] + 1 - L + first_m
    valid = (pool[None, :] >= lo) & (pool[None, :] <= targets[:, None] - 1)
    d_m = np.where(valid, d_m, np.inf)
    n_valid = L - first_m - 1
    kk = min(k, n_valid)
    order = np.argsort(d_m, axis=1, kind="stable")[:, :kk]
    rows = np.arange(len(targets))[:, None]
    cand = pool[order]
    cd_m = d_m[rows, order]
    threshold = cd_m.max(axis=1, keepdims=True)

    last = V[order, m] - T[:, None, m]
    cd_m1 = cd_m + last * last
    has_m1 = cand >= lo - first_m + first_m1
    cd_m1 = np.where(has_m1, cd_m1, np.inf)
    keep = has_m1 & (cd_m1 <= threshold)

    succ = x[cand + 1]
    out = []
    for i in range(len(targets)):
        if keep[i].any():
            s = succ[i, keep[i]]
        elif has_m1[i].any():
            s = succ[i, [int(np.argmin(cd_m1[i]))]]
        else:
            s = succ[i, :1]
        out.append(_vote(s)[0])
    return out
