"""Comparator reduction of a bounded mean to a count, and MAP reconstruction.

Each path value ``x`` is compared against ``C = 2**c`` thresholds spaced
``delta = 2**(b - c)`` apart. The number of thresholds it strictly exceeds,
times ``delta``, approximates ``x``. Averaging over paths turns the mean into
``delta * S / 2**r`` with ``S`` the marked count of a Boolean oracle on
``N = 2**(r + c)`` ids (comparator index in the low bits).

By default the thresholds sit at half-steps ``delta * (y + 1/2)``, so each
``x`` is rounded to the nearest multiple of ``delta``. The mean error is then
below ``delta / 2`` and multiples of ``delta`` are reproduced exactly. With
``midpoint=False`` the thresholds are ``delta * y``, which rounds up: exact
on the same grid, but the error can approach a full ``delta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counting import (
    BooleanOracle,
    CountingConfig,
    CountingOutcome,
    count_from_theta,
    counting_circuit_pmf,
    fold_index,
    outcome_likelihood,
    sample_indices,
    theta_from_count,
)
from .errors import ConfigError

EXHAUSTIVE_LIMIT = 1 << 18
_REFINE_WIDTH = 4096


@dataclass(frozen=True)
class FixedPointFormat:
    b: int = 0
    c: int = 8
    midpoint: bool = True

    def __post_init__(self):
        if self.c < 1:
            raise ConfigError("comparator bits c must be >= 1")

    @property
    def C(self) -> int:
        return 1 << self.c

    @property
    def step(self) -> float:
        return math.ldexp(1.0, self.b - self.c)

    @property
    def upper(self) -> float:
        return math.ldexp(1.0, self.b)

    def thresholds(self) -> np.ndarray:
        y = np.arange(self.C, dtype=np.float64)
        return (y + 0.5) * self.step if self.midpoint else y * self.step


@dataclass(frozen=True, eq=False)
class ComparatorOracleSpec:
    color_table: np.ndarray
    format: FixedPointFormat

    def __post_init__(self):
        table = np.asarray(self.color_table, dtype=np.float64)
        if table.ndim != 1 or table.size < 1 or table.size & (table.size - 1):
            raise ConfigError(f"color table length must be a power of two, got {table.size}")
        object.__setattr__(self, "color_table", table)

    @property
    def r(self) -> int:
        return self.color_table.size.bit_length() - 1

    @property
    def N(self) -> int:
        return 1 << (self.r + self.format.c)


@dataclass(frozen=True)
class PosteriorEstimate:
    theta_map: float
    S_map: int
    mean: float  # S_map / N, the estimated marked fraction
    log_posterior: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class MeanDiagnostics:
    S_true: int
    S_map: int
    theta_map: float
    outcomes: tuple[int, ...]
    clamp_count: int
    clamp_bias: float


def comparator_f(x, y) -> int:
    return int(x > y)


def clamp_table(table, fmt: FixedPointFormat):
    """Clip to ``[0, 2**b]``; returns ``(clipped, n_out_of_range)``."""
    table = np.asarray(table, dtype=np.float64)
    out = (table < 0.0) | (table >= fmt.upper)
    return np.clip(table, 0.0, fmt.upper), int(np.count_nonzero(out))


def comparator_counts(table, fmt: FixedPointFormat) -> np.ndarray:
    """Per-path number of thresholds strictly below each value."""
    return np.searchsorted(fmt.thresholds(), np.asarray(table, dtype=np.float64), side="left")


def comparator_count(table, fmt: FixedPointFormat) -> int:
    """Marked count ``S`` of the comparator oracle, without materialising it."""
    return int(comparator_counts(table, fmt).sum())


def build_comparator_oracle(spec: ComparatorOracleSpec) -> BooleanOracle:
    """Id ``(p << c) | y`` is marked iff ``color_table[p]`` exceeds threshold ``y``."""
    thr = spec.format.thresholds()
    return BooleanOracle((spec.color_table[:, None] > thr[None, :]).ravel())


def mean_from_count(S, r: int, fmt: FixedPointFormat) -> float:
    if S < 0 or S > 1 << (r + fmt.c):
        raise ValueError(f"count {S} outside [0, 2**{r + fmt.c}]")
    return math.ldexp(float(S), fmt.b - r - fmt.c)


# ------------------------------------------------------------------ posterior

def _loglik_fn(outcomes, T: int):
    idx = np.array([o.index if isinstance(o, CountingOutcome) else int(o) for o in outcomes])
    if idx.size == 0:
        raise ValueError("need at least one outcome")
    if np.any(idx < 0) or np.any(idx > T // 2):
        raise ValueError("outcome outside the folded grid")
    uniq, mult = np.unique(idx, return_counts=True)

    def loglik(theta):
        theta = np.asarray(theta, dtype=np.float64)
        p = outcome_likelihood(uniq[:, None], theta[None, :], T)
        with np.errstate(divide="ignore"):
            return mult @ np.log(p)

    return loglik


def _best(S, ll, best):
    """Fold a candidate block into ``best = (value, S)``; ties go to the smaller S."""
    j = int(np.argmax(ll))
    val, s = float(ll[j]), int(S[j])
    if best is None or val > best[0] or (val == best[0] and s < best[1]):
        return (val, s)
    return best


def _scan(loglik, N, s_lo, s_hi, best, chunk=1 << 16):
    for start in range(s_lo, s_hi + 1, chunk):
        S = np.arange(start, min(s_hi, start + chunk - 1) + 1, dtype=np.int64)
        best = _best(S, loglik(theta_from_count(S, N)), best)
    return best


def _search(loglik, N, T):
    grid = np.linspace(0.0, 0.5, 32 * T + 1)
    ll = loglik(grid)
    top = ll.max()
    near = np.flatnonzero(ll >= top - 2.0) if np.isfinite(top) else np.arange(grid.size)
    clusters = np.split(near, np.flatnonzero(np.diff(near) > 1) + 1)
    best = None
    for cl in clusters:
        lo_t, hi_t = grid[max(cl[0] - 1, 0)], grid[min(cl[-1] + 1, grid.size - 1)]
        s_lo = max(0, int(math.floor(count_from_theta(lo_t, N))))
        s_hi = min(N, int(math.ceil(count_from_theta(hi_t, N))))
        while s_hi - s_lo > _REFINE_WIDTH:
            S = np.unique(np.rint(np.linspace(s_lo, s_hi, 1025)).astype(np.int64))
            vals = loglik(theta_from_count(S, N))
            j = int(np.argmax(vals))
            s_lo, s_hi = int(S[max(j - 1, 0)]), int(S[min(j + 1, S.size - 1)])
        best = _scan(loglik, N, s_lo, s_hi, best)
    return best


def bayesian_map(outcomes, N: int, T: int, exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> PosteriorEstimate:
    """MAP count under a uniform prior on ``S = 0..N``.

    Up to ``exhaustive_limit`` hypotheses every ``S`` is scored and the
    normalised log posterior is returned. Beyond that, a ``1/(64 T)`` grid in
    theta locates the near-optimal regions, and each region is narrowed to
    exact integer candidates.
    """
    loglik = _loglik_fn(outcomes, T)
    log_post = None
    if N + 1 <= exhaustive_limit:
        S = np.arange(N + 1, dtype=np.int64)
        ll = loglik(theta_from_count(S, N))
        best = _best(S, ll, None)
        finite = ll[np.isfinite(ll)]
        if finite.size:
            m = finite.max()
            log_post = ll - (m + np.log(np.exp(finite - m).sum()))
    else:
        best = _search(loglik, N, T)
    s_map = best[1]
    return PosteriorEstimate(theta_from_count(s_map, N), s_map, s_map / N, log_post)


# ------------------------------------------------------------------ end to end

def draw_outcomes(S: int, N: int, cfg: CountingConfig, rng: np.random.Generator,
                  oracle: BooleanOracle | None = None) -> np.ndarray:
    """``cfg.B`` folded outcome indices, analytic by default or from the statevector."""
    if oracle is None:
        return sample_indices(theta_from_count(S, N), cfg.T, cfg.B, rng)
    pmf = counting_circuit_pmf(oracle, cfg.t)
    m = rng.choice(cfg.T, size=cfg.B, p=pmf / pmf.sum())
    return np.array([fold_index(int(x), cfg.T) for x in m])


def estimate_mean(color_table, fmt: FixedPointFormat, cfg: CountingConfig, rng: np.random.Generator,
                  use_circuit: bool = False, exhaustive_limit: int = EXHAUSTIVE_LIMIT):
    """Comparator reduction, ``B`` counting runs and MAP reconstruction of the mean.

    Returns ``(mean, MeanDiagnostics)``.
    """
    raw = np.asarray(color_table, dtype=np.float64)
    table, clamped = clamp_table(raw, fmt)
    spec = ComparatorOracleSpec(table, fmt)
    if cfg.n != spec.r + fmt.c:
        raise ConfigError(f"counting register n={cfg.n} must equal r + c = {spec.r + fmt.c}")
    N = spec.N
    S_true = comparator_count(table, fmt)
    oracle = build_comparator_oracle(spec) if use_circuit else None
    outcomes = draw_outcomes(S_true, N, cfg, rng, oracle)
    post = bayesian_map(outcomes, N, cfg.T, exhaustive_limit)
    mean = mean_from_count(post.S_map, spec.r, fmt)
    diag = MeanDiagnostics(S_true, post.S_map, post.theta_map, tuple(int(o) for o in outcomes),
                           clamped, float(table.mean() - raw.mean()))
    return mean, diag
