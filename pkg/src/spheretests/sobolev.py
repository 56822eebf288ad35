"""Sobolev uniformity statistics on the hypersphere and their named members.

A Sobolev test is fixed by a weight sequence ``v_1..v_K``; its statistic is

    S_n = (1/n) sum_{i,j} sum_k v_k^2 <t_k(U_i), t_k(U_j)>

and its null law is ``sum_k v_k^2 chi2(d_{p,k})``. Functions accept a
:class:`DirectionalSample` or a batch array of shape ``(..., n, p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import special

from ._kernels import order_sums
from .circular import ajne_circular
from .nulldist import ChiSqMixture
from .sample import TWO_PI, SampleError, as_points, require_circular, sorted_angles

DEFAULT_K = 5000
MIXTURE_TERMS = 2000


def _scalar(x):
    return x[()] if isinstance(x, np.ndarray) else x


def gegenbauer(k: int, alpha: float, z):
    """Gegenbauer polynomial ``C_k^alpha(z)`` by the three-term recurrence."""
    if alpha <= 0:
        raise ValueError("Gegenbauer index must be positive; the circle uses 2*cos(k*angle)")
    if k < 0:
        raise ValueError("order must be non-negative")
    z = np.clip(np.asarray(z, dtype=float), -1.0, 1.0)
    prev = np.ones_like(z)
    if k == 0:
        return prev[()]
    cur = 2.0 * alpha * z
    for j in range(2, k + 1):
        prev, cur = cur, (2.0 * z * (j + alpha - 1.0) * cur - (j + 2.0 * alpha - 2.0) * prev) / j
    return cur[()]


def eigendim(p: int, k: int) -> int:
    """Dimension ``d_{p,k}`` of the k-th Laplacian eigenspace on ``S^{p-1}``."""
    if p < 2 or k < 1:
        raise ValueError("need p >= 2 and k >= 1")
    return math.comb(p + k - 3, p - 2) + math.comb(p + k - 2, p - 2)


def inner_product(u, v, k: int, p: int | None = None):
    """``<t_k(u), t_k(v)>`` for unit vectors ``u`` and ``v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    p = u.shape[-1] if p is None else p
    z = np.clip(np.sum(u * v, axis=-1), -1.0, 1.0)
    if p == 2:
        return (2.0 * np.cos(k * np.arccos(z)))[()]
    return ((1.0 + 2.0 * k / (p - 2)) * gegenbauer(k, (p - 2) / 2.0, z))


@dataclass(frozen=True)
class SobolevWeights:
    """Weights ``v_1..v_K`` of a Sobolev test.

    ``tail`` is ``sum_{k>K} v_k^2 d_{2,k}`` for the circular families whose
    tail has a closed form, and zero for user-supplied sequences.
    """

    v: tuple
    label: str = "sobolev"
    tail: float = 0.0

    def __post_init__(self):
        v = tuple(float(x) for x in np.asarray(self.v, dtype=float).ravel())
        if not v:
            raise ValueError("need at least one weight")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "v", v)

    @property
    def K(self) -> int:
        return len(self.v)

    @property
    def squared(self) -> np.ndarray:
        return np.asarray(self.v) ** 2

    def truncated(self, K: int) -> "SobolevWeights":
        if K >= self.K:
            return self
        extra = float(np.sum(self.squared[K:]) * 2.0) if self.tail else 0.0
        return SobolevWeights(self.v[:K], self.label, self.tail + extra)

    def null_law(self, p: int, terms: int = MIXTURE_TERMS, replicates: int = 100_000,
                 seed: int = 0) -> ChiSqMixture:
        w = self.truncated(terms)
        dims = tuple(float(eigendim(p, k)) for k in range(1, w.K + 1))
        tail = w.tail if p == 2 else 0.0
        return ChiSqMixture(tuple(w.squared), dims, tail, replicates, seed)

    @classmethod
    def rayleigh(cls):
        return cls((1.0,), "rayleigh")

    @classmethod
    def bingham(cls):
        return cls((0.0, 1.0), "bingham")

    @classmethod
    def indicator(cls, ell: int):
        """``v_k = 1`` for ``k <= ell``: the score statistic of order ``ell``."""
        return cls((1.0,) * ell, f"order-{ell}")

    @classmethod
    def watson(cls, K: int = DEFAULT_K):
        """Weights ``1/(2 pi k)``, reproducing Watson's ``U_n^2`` on the circle."""
        k = np.arange(1, K + 1)
        tail = float(special.polygamma(1, K + 1)) / (2.0 * math.pi**2)
        return cls(1.0 / (2.0 * math.pi * k), "watson", tail)

    @classmethod
    def ajne(cls, K: int = DEFAULT_K):
        """Odd-order weights ``1/(pi k)``, reproducing Ajne's ``A_n``."""
        k = np.arange(1, K + 1)
        v = np.where(k % 2 == 1, 1.0 / (math.pi * k), 0.0)
        j0 = (K + 1) // 2  # first odd order beyond K is 2*j0 + 1
        tail = 2.0 * float(special.polygamma(1, j0 + 0.5)) / (4.0 * math.pi**2)
        return cls(v, "ajne", tail)

    @classmethod
    def rothman(cls, t: float, K: int = DEFAULT_K):
        """Weights ``sin(k pi t) / (k pi)`` of Rothman's ``A_n(t)``.

        ``tail`` replaces ``sin^2`` by its long-run average 1/2.
        """
        _check_t(t)
        k = np.arange(1, K + 1)
        tail = float(special.polygamma(1, K + 1)) / math.pi**2
        return cls(np.sin(k * math.pi * t) / (k * math.pi), f"rothman:{t:g}", tail)

    @classmethod
    def from_file(cls, path):
        """One weight per line (commas also accepted); ``#`` starts a comment line."""
        vals = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            for tok in s.replace(",", " ").split():
                try:
                    vals.append(float(tok))
                except ValueError:
                    raise SampleError(f"{path}: non-numeric weight {tok!r} on line {lineno}") \
                        from None
        if not vals:
            raise SampleError(f"{path}: no weights")
        return cls(vals, f"sobolev:{Path(path).name}")


def _check_t(t):
    if not 0.0 < t < 1.0:
        raise ValueError(f"Rothman parameter t must lie in (0, 1), got {t}")


def sobolev_statistic(x, weights: SobolevWeights, method: str = "auto"):
    """Sobolev statistic for the given weights (diagonal terms included)."""
    pts = as_points(x)
    n = pts.shape[-2]
    sq = weights.squared
    keep = int(np.flatnonzero(sq)[-1]) + 1 if np.any(sq) else 1
    sums = order_sums(pts, keep, method)
    return _scalar(sums @ sq[:keep] / n)


def order_statistics(x, K: int):
    """Per-order contributions ``S_k = T_k / n``, shape ``(..., K)``."""
    pts = as_points(x)
    return order_sums(pts, K) / pts.shape[-2]


def rayleigh(x):
    """Rayleigh statistic ``n p ||mean||^2``."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    mean = pts.mean(axis=-2)
    return _scalar(n * p * np.sum(mean**2, axis=-1))


def pair_dots(pts: np.ndarray) -> np.ndarray:
    """Clamped ``U_i'U_j`` over pairs ``i < j``, shape ``(..., n(n-1)/2)``."""
    n = pts.shape[-2]
    gram = pts @ np.swapaxes(pts, -1, -2)
    iu = np.triu_indices(n, 1)
    return np.clip(gram[..., iu[0], iu[1]], -1.0, 1.0)


def ajne(x):
    """Ajne's ``A_n = n/4 - (1/(n pi)) sum_{i<j} Psi_ij`` for any ``p``."""
    pts = as_points(x)
    if pts.shape[-1] == 2:
        return ajne_circular(pts)
    n = pts.shape[-2]
    psi = np.arccos(pair_dots(pts))
    return _scalar(n / 4.0 - psi.sum(axis=-1) / (n * math.pi))


def rothman(x, t: float = 0.5, K: int | None = None):
    """Rothman's ``A_n(t)`` on the circle.

    With ``K=None`` the exact arc-overlap form is used: two arcs of length
    ``2 pi t`` whose centres are ``d`` apart overlap on
    ``max(0, 2 pi t - d) + max(0, 2 pi t - 2 pi + d)``. Otherwise the
    Sobolev series is truncated at ``K`` terms.
    """
    _check_t(t)
    pts = as_points(x)
    require_circular(pts, "rothman")
    if K is not None:
        return sobolev_statistic(pts, SobolevWeights.rothman(t, K))
    n = pts.shape[-2]
    theta = sorted_angles(pts)
    d = np.abs(theta[..., :, None] - theta[..., None, :])
    arc = TWO_PI * t
    overlap = np.maximum(arc - d, 0.0) + np.maximum(arc - TWO_PI + d, 0.0)
    return _scalar(overlap.sum(axis=(-1, -2)) / (TWO_PI * n) - n * t * t)


def bingham(x):
    """Bingham's ``B_n = (n p (p+2) / 2) (tr(S^2) - 1/p)``."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    scatter = np.swapaxes(pts, -1, -2) @ pts / n
    tr2 = np.sum(scatter**2, axis=(-1, -2))
    return _scalar(n * p * (p + 2) / 2.0 * (tr2 - 1.0 / p))


def _gine_constant(p: int) -> float:
    return (p - 1) / 2.0 * math.exp(2.0 * (special.gammaln((p - 1) / 2.0)
                                          - special.gammaln(p / 2.0)))


def gine_g(x):
    """Gine's axial statistic ``G_n``."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    z = pair_dots(pts)
    sin_psi = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return _scalar(n / 2.0 - _gine_constant(p) / n * sin_psi.sum(axis=-1))


def gine_f(x):
    """Gine's omnibus ``F_n = A_n + G_n``."""
    pts = as_points(x)
    if pts.shape[-1] == 2:
        return ajne(pts) + gine_g(pts)
    n, p = pts.shape[-2:]
    z = pair_dots(pts)
    psi = np.arccos(z)
    a = n / 4.0 - psi.sum(axis=-1) / (n * math.pi)
    g = n / 2.0 - _gine_constant(p) / n * np.sin(psi).sum(axis=-1)
    return _scalar(a + g)


HR_CONSTANT = 2.895


def hermans_rasson(x, constant_free: bool = False):
    """Hermans-Rasson statistic ``(1/n) sum_{i,j} h(Theta_i - Theta_j)``.

    The kernel is taken as printed, including its ``(n-1)``-dependent
    additive term; ``constant_free`` drops that term.
    """
    pts = as_points(x)
    require_circular(pts, "hermans-rasson")
    n = pts.shape[-2]
    theta = sorted_angles(pts)
    d = theta[..., :, None] - theta[..., None, :]
    h = -math.pi / 2.0 + np.abs(math.pi - np.abs(d)) + HR_CONSTANT * np.abs(np.sin(d)) / 2.0
    if not constant_free:
        h = h + (n - 1) * HR_CONSTANT / math.pi
    return _scalar(h.sum(axis=(-1, -2)) / n)


def pycke(x):
    """Pycke's statistic ``(1/(n-1)) sum_{i<j} -2 log(2 - 2 cos(Theta_i - Theta_j))``."""
    pts = as_points(x)
    require_circular(pts, "pycke")
    n = pts.shape[-2]
    if n < 2:
        raise SampleError("pycke needs n >= 2")
    # 2 - 2cos(angle) is the squared chord |u - v|^2 = 2 - 2 u'v
    chord2 = 2.0 - 2.0 * pair_dots(pts)
    if np.any(chord2 <= 0.0):
        raise SampleError("pycke kernel is singular for coincident observations")
    return _scalar(-2.0 * np.log(chord2).sum(axis=-1) / (n - 1))


def circular_kernel_test(x, kernel: str, constant_free: bool = False):
    if kernel in ("hermans_rasson", "hermans-rasson"):
        return hermans_rasson(x, constant_free)
    if kernel == "pycke":
        return pycke(x)
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass(frozen=True)
class JuppResult:
    order: int
    statistic: float
    truncated: bool
    penalized: np.ndarray


def jupp_data_driven(x, max_order: int = 25):
    """Data-driven Sobolev test: pick the order maximizing the penalized score.

    The penalty for order ``l`` is ``(d_{p,1} + ... + d_{p,l}) log n``; ties
    go to the smallest order. ``truncated`` flags a maximizer sitting at
    ``max_order``, where a larger cap might have changed the choice. For a
    batch input, ``order``, ``statistic`` and ``truncated`` are arrays.
    """
    pts = as_points(x)
    n, p = pts.shape[-2:]
    if n < 2:
        raise SampleError("data-driven Sobolev test needs n >= 2")
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    cum = np.cumsum(order_statistics(pts, max_order), axis=-1)
    dims = np.array([float(eigendim(p, k)) for k in range(1, max_order + 1)])
    penalized = cum - np.cumsum(dims) * math.log(n)
    best = np.argmax(penalized, axis=-1)
    stat = np.take_along_axis(cum, best[..., None], axis=-1)[..., 0]
    return JuppResult(_scalar(best + 1), _scalar(stat), _scalar(best == max_order - 1),
                      penalized)
