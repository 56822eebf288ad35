"""Closed-form uniformity statistics for circular data.

All functions accept a :class:`DirectionalSample`, or an array of unit
vectors with shape ``(..., n, 2)``; leading axes are treated as a batch of
independent samples and the result has the batch shape.
"""

from __future__ import annotations

import math

import numpy as np

from .sample import TWO_PI, SampleError, as_points, gaps_of, sorted_angles


def _scalar(x):
    return x[()] if isinstance(x, np.ndarray) else x


def kuiper_parts(x):
    """One-sided parts ``(D_n^+, D_n^-)`` of Kuiper's statistic."""
    u = sorted_angles(x) / TWO_PI
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    d_plus = math.sqrt(n) * np.max(i / n - u, axis=-1)
    d_minus = math.sqrt(n) * np.max(u - (i - 1) / n, axis=-1)
    return _scalar(d_plus), _scalar(d_minus)


def kuiper(x):
    """Kuiper's rotation-invariant ``V_n = D_n^+ + D_n^-``."""
    d_plus, d_minus = kuiper_parts(x)
    return d_plus + d_minus


def watson(x):
    """Watson's ``U_n^2``."""
    u = sorted_angles(x) / TWO_PI
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    centred = (u - (i - 0.5) / n) - (u.mean(axis=-1, keepdims=True) - 0.5)
    return _scalar(np.sum(centred**2, axis=-1) + 1.0 / (12.0 * n))


def max_half_circle_count(x):
    """``sup_alpha N(alpha)``: most points in an open half-circle.

    The supremum is attained by an arc opening just before an observation,
    so it equals the largest count of points in ``[theta_i, theta_i + pi)``.
    Evaluated with one sorted search over the doubled angle sequence.
    """
    theta = sorted_angles(x)
    n = theta.shape[-1]
    batch = theta.shape[:-1]
    flat = theta.reshape(-1, n)
    ext = np.concatenate([flat, flat + TWO_PI], axis=1)
    # offset rows so a single searchsorted covers the whole batch
    offset = (np.arange(flat.shape[0]) * 4.0 * TWO_PI)[:, None]
    hay = (ext + offset).ravel()
    starts = np.searchsorted(hay, (flat + offset).ravel(), side="left")
    ends = np.searchsorted(hay, (flat + math.pi + offset).ravel(), side="left")
    counts = (ends - starts).reshape(flat.shape).max(axis=1)
    return _scalar(counts.reshape(batch))


def hodges_ajne(x):
    """Hodges-Ajne ``H_n = (2/sqrt(n)) (sup_alpha N(alpha) - n/2)``."""
    pts = as_points(x)
    n = pts.shape[-2]
    return (2.0 / math.sqrt(n)) * (max_half_circle_count(pts) - n / 2.0)


def _check_gaps(gaps, name):
    if gaps.shape[-1] < 2:
        raise SampleError(f"{name} needs n >= 2")


def circular_range(x):
    """Range ``T_n = 2*pi - max_i D_i``; small values indicate clustering."""
    gaps = gaps_of(x)
    _check_gaps(gaps, "circular range")
    return _scalar(TWO_PI - gaps.max(axis=-1))


def symmetric_spacing(x, h):
    """Generic symmetric-spacings functional ``(1/n) sum_i h(n D_i / (2 pi))``."""
    gaps = gaps_of(x)
    _check_gaps(gaps, "symmetric spacing statistic")
    n = gaps.shape[-1]
    vals = np.asarray(h(n * gaps / TWO_PI), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("spacing kernel returned a non-finite value")
    return _scalar(vals.mean(axis=-1))


def rao_spacings(x):
    """Rao's spacing statistic ``P_n``."""
    gaps = gaps_of(x)
    _check_gaps(gaps, "Rao spacings")
    n = gaps.shape[-1]
    s = 0.5 * np.abs(gaps - TWO_PI / n).sum(axis=-1)
    return _scalar(math.sqrt(n) * (s - TWO_PI / math.e))


def greenwood(x):
    """Greenwood's ``W_n = sqrt(n) (n sum D_i^2 / (4 pi^2) - 2)``."""
    gaps = gaps_of(x)
    _check_gaps(gaps, "Greenwood")
    n = gaps.shape[-1]
    return _scalar(math.sqrt(n) * (n * np.sum(gaps**2, axis=-1) / TWO_PI**2 - 2.0))


def ajne_circular(x):
    """Ajne's ``A_n`` from the circular distances, in ``O(n log n)``.

    For each ordered angle, later points within ``pi`` contribute their
    difference and the rest contribute ``2*pi`` minus it; prefix sums give
    the pair total without forming all pairs.
    """
    theta = sorted_angles(x)
    n = theta.shape[-1]
    flat = theta.reshape(-1, n)
    csum = np.concatenate([np.zeros((flat.shape[0], 1)), np.cumsum(flat, axis=1)], axis=1)
    offset = (np.arange(flat.shape[0]) * 4.0 * TWO_PI)[:, None]
    hay = (flat + offset).ravel()
    # first index j with theta_j > theta_i + pi, per row
    cut = np.searchsorted(hay, (flat + math.pi + offset).ravel(), side="right")
    cut = cut.reshape(flat.shape) - (np.arange(flat.shape[0]) * n)[:, None]
    idx = np.arange(n)[None, :]
    cut = np.maximum(cut, idx + 1)
    rows = np.arange(flat.shape[0])[:, None]
    near_cnt = cut - idx - 1
    near_sum = csum[rows, cut] - csum[rows, idx + 1] - near_cnt * flat
    far_cnt = n - cut
    far_sum = far_cnt * (TWO_PI + flat) - (csum[:, -1:] - csum[rows, cut])
    total = (near_sum + far_sum).sum(axis=1)
    out = n / 4.0 - total / (n * math.pi)
    return _scalar(out.reshape(theta.shape[:-1]))

