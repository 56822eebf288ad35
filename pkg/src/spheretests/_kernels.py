"""Compiled per-order Sobolev sums.

``order_sums`` returns ``T_k = sum_{i,j} <t_k(U_i), t_k(U_j)>`` for
``k = 1..K`` (diagonal included). Three routes share the same contract:
Fourier sums on the circle and spherical harmonics on ``S^2`` cost
``O(nK)`` and ``O(nK^2)``; other dimensions use pairwise Gegenbauer
recurrences in ``O(n^2 (p + K))``.
"""

from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _circle_sums(pts, K):
    B, n, _ = pts.shape
    out = np.zeros((B, K))
    for b in range(B):
        re = np.zeros(K)
        im = np.zeros(K)
        for i in range(n):
            c1 = pts[b, i, 0]
            s1 = pts[b, i, 1]
            r = math.hypot(c1, s1)
            c1 /= r
            s1 /= r
            c = 1.0
            s = 0.0
            for k in range(K):
                c, s = c * c1 - s * s1, s * c1 + c * s1
                re[k] += c
                im[k] += s
        for k in range(K):
            out[b, k] = 2.0 * (re[k] * re[k] + im[k] * im[k])
    return out


@numba.njit(cache=True)
def _sphere_coefficients(K):
    diag = np.empty(K + 1)
    first = np.empty(K + 1)
    a = np.zeros((K + 1, K + 1))
    b = np.zeros((K + 1, K + 1))
    for m in range(K + 1):
        diag[m] = math.sqrt((2.0 * m + 1.0) / (2.0 * m)) if m > 0 else 1.0
        first[m] = math.sqrt(2.0 * m + 3.0)
        for k in range(m + 2, K + 1):
            a[k, m] = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
            b[k, m] = math.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
    return diag, first, a, b


@numba.njit(cache=True)
def _sphere_sums(pts, K):
    # fully normalized associated Legendre functions times cos/sin(m phi)
    B, n, _ = pts.shape
    out = np.zeros((B, K))
    diag, first, ca, cb = _sphere_coefficients(K)
    inv_sqrt_4pi = 1.0 / math.sqrt(4.0 * math.pi)
    re = np.zeros((K + 1, K + 1))
    im = np.zeros((K + 1, K + 1))
    for bi in range(B):
        re[:, :] = 0.0
        im[:, :] = 0.0
        for i in range(n):
            x = pts[bi, i, 0]
            y = pts[bi, i, 1]
            z = pts[bi, i, 2]
            s = math.hypot(x, y)
            if s > 0.0:
                cphi = x / s
                sphi = y / s
            else:
                cphi = 1.0
                sphi = 0.0
            pmm = inv_sqrt_4pi
            cm = 1.0
            sm = 0.0
            for m in range(K + 1):
                if m > 0:
                    pmm *= diag[m] * s
                    cm, sm = cm * cphi - sm * sphi, sm * cphi + cm * sphi
                    re[m, m] += pmm * cm
                    im[m, m] += pmm * sm
                if m + 1 > K:
                    break
                p_prev = pmm
                p_cur = first[m] * z * pmm
                re[m + 1, m] += p_cur * cm
                im[m + 1, m] += p_cur * sm
                for k in range(m + 2, K + 1):
                    p_new = ca[k, m] * (z * p_cur - cb[k, m] * p_prev)
                    p_prev = p_cur
                    p_cur = p_new
                    re[k, m] += p_cur * cm
                    im[k, m] += p_cur * sm
        for k in range(1, K + 1):
            acc = re[k, 0] * re[k, 0] + im[k, 0] * im[k, 0]
            for m in range(1, k + 1):
                acc += 2.0 * (re[k, m] * re[k, m] + im[k, m] * im[k, m])
            out[bi, k - 1] = 4.0 * math.pi * acc
    return out


@numba.njit(cache=True)
def _pairwise_sums(pts, K, diag):
    B, n, p = pts.shape
    alpha = (p - 2) / 2.0
    scale = np.empty(K)
    a = np.empty(K + 1)
    c = np.empty(K + 1)
    for k in range(1, K + 1):
        scale[k - 1] = 1.0 + 2.0 * k / (p - 2)
        a[k] = 2.0 * (k + alpha - 1.0) / k
        c[k] = (k + 2.0 * alpha - 2.0) / k
    out = np.zeros((B, K))
    for b in range(B):
        acc = np.zeros(K)
        for i in range(n):
            for j in range(i + 1, n):
                z = 0.0
                for q in range(p):
                    z += pts[b, i, q] * pts[b, j, q]
                if z > 1.0:
                    z = 1.0
                elif z < -1.0:
                    z = -1.0
                g2 = 1.0
                g1 = 2.0 * alpha * z
                acc[0] += g1
                for k in range(2, K + 1):
                    g = a[k] * z * g1 - c[k] * g2
                    g2 = g1
                    g1 = g
                    acc[k - 1] += g
        for k in range(K):
            out[b, k] = n * diag[k] + 2.0 * scale[k] * acc[k]
    return out


def order_sums(points: np.ndarray, K: int, method: str = "auto") -> np.ndarray:
    """Per-order double sums for a batch of samples, shape ``(..., K)``.

    ``method`` is ``"auto"`` (fastest available route) or ``"pairwise"``.
    """
    from .sobolev import eigendim

    pts = np.ascontiguousarray(points, dtype=float)
    batch = pts.shape[:-2]
    n, p = pts.shape[-2:]
    flat = pts.reshape((-1, n, p))
    if K < 1:
        raise ValueError("truncation K must be at least 1")
    if p == 2:
        out = _circle_sums(flat, K)
    elif p == 3 and method == "auto":
        out = _sphere_sums(flat, K)
    else:
        diag = np.array([float(eigendim(p, k)) for k in range(1, K + 1)])
        out = _pairwise_sums(flat, K, diag)
    return out.reshape(batch + (K,))
