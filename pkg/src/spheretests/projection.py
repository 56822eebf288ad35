"""Random-projection uniformity test.

Each random direction ``H`` reduces the sample to ``Y_i = U_i'H``, whose
null cdf is known; a Kolmogorov-Smirnov statistic checks it. The
aggregated version takes the smallest p-value over ``k`` directions and
calibrates it by Monte Carlo with the directions held fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .nulldist import kolmogorov_cdf
from .sample import SampleError, as_points

DIRECTION_STREAM = 0xD1EC


def default_k(p: int) -> int:
    return 25 if p == 2 else 100


@dataclass(frozen=True)
class ProjectionConfig:
    k: int
    seed: int = 0
    mc_replicates: int = 999

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("number of projections must be at least 1")


def random_directions(k: int, p: int, seed: int) -> np.ndarray:
    """``k`` directions uniform on ``S^{p-1}``, reproducible from ``seed``."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(DIRECTION_STREAM,)))
    h = rng.standard_normal((k, p))
    return h / np.linalg.norm(h, axis=1, keepdims=True)


def project(x, direction) -> np.ndarray:
    """Projections ``Y_i = U_i'H`` clamped to ``[-1, 1]``."""
    pts = as_points(x)
    h = np.asarray(direction, dtype=float)
    if h.shape[-1] != pts.shape[-1]:
        raise SampleError(f"direction has dimension {h.shape[-1]}, sample has {pts.shape[-1]}")
    if abs(np.linalg.norm(h) - 1.0) > 1e-10 and h.ndim == 1:
        raise SampleError("direction must have unit norm")
    return np.clip(pts @ h.T, -1.0, 1.0)


def projected_null_cdf(x, p: int):
    """Null cdf of one coordinate of a uniform vector on ``S^{p-1}``.

    ``(1 + Y)/2`` follows a symmetric Beta law with parameters ``(p-1)/2``;
    p=2 and p=3 reduce to ``1 - arccos(x)/pi`` and ``(1 + x)/2``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("projected values must lie in [-1, 1]")
    x = np.clip(x, -1.0, 1.0)
    if p == 2:
        out = 1.0 - np.arccos(x) / math.pi
    elif p == 3:
        out = (1.0 + x) / 2.0
    elif p > 3:
        a = (p - 1) / 2.0
        out = special.betainc(a, a, (1.0 + x) / 2.0)
    else:
        raise ValueError("dimension must be at least 2")
    return out[()]


def ks_distance(y, p: int):
    """Exact sup distance between the empirical cdf of ``y`` and the null cdf,
    taken over the jump points of the empirical cdf.

    ``y`` has shape ``(..., n)``; the sup is taken over the last axis.
    """
    y = np.sort(np.asarray(y, dtype=float), axis=-1)
    n = y.shape[-1]
    f0 = projected_null_cdf(y, p)
    i = np.arange(1, n + 1)
    return np.maximum(np.max(i / n - f0, axis=-1), np.max(f0 - (i - 1) / n, axis=-1))[()]


def ks_pvalue(d, n: int):
    """Asymptotic p-value ``1 - K(sqrt(n) d)``."""
    return (1.0 - np.asarray(kolmogorov_cdf(math.sqrt(n) * np.asarray(d))))[()]


def single_projection_test(x, direction):
    """``(KS distance, p-value)`` for one direction."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    d = ks_distance(project(pts, direction), p)
    return d, ks_pvalue(d, n)


def min_projection_pvalue(x, directions: np.ndarray):
    """Aggregated statistic ``min_j P_j`` over the given directions."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    y = np.clip(pts @ np.asarray(directions).T, -1.0, 1.0)  # (..., n, k)
    d = ks_distance(np.swapaxes(y, -1, -2), p)  # (..., k)
    return np.min(ks_pvalue(d, n), axis=-1)[()]


def multi_projection_test(x, cfg: ProjectionConfig, workers: int = 1):
    """Aggregated projection test calibrated by Monte Carlo.

    Returns the observed minimum p-value and the Monte Carlo p-value
    ``(b + 1)/(M + 1)``, where ``b`` counts null replicates whose minimum
    p-value is at or below the observed one.
    """
    from .montecarlo import McConfig, mc_pvalue

    if cfg.mc_replicates < 99:
        raise ValueError("aggregated projection test needs at least 99 Monte Carlo replicates")
    pts = as_points(x)
    p = pts.shape[-1]
    dirs = random_directions(cfg.k, p, cfg.seed)
    res = mc_pvalue(pts, lambda z: min_projection_pvalue(z, dirs),
                    McConfig(cfg.mc_replicates, cfg.seed, workers), tail="lower")
    return res.observed, res.pvalue
