"""Null distributions of the uniformity statistics.

Every law exposes ``sf`` (upper tail), ``cdf`` and ``pvalue``; the latter
applies the law's rejection direction, so small values always mean evidence
against uniformity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy import special

from .sample import TWO_PI

MAX_TERMS = 10_000


class SeriesTruncationWarning(RuntimeWarning):
    """A series hit the hard term cap before reaching its cutoff."""


def _cap_warning(name):
    warnings.warn(f"{name}: series truncated at {MAX_TERMS} terms", SeriesTruncationWarning,
                  stacklevel=3)


def _kolmogorov_alternating(x: float) -> float:
    s = 0.0
    for m in range(1, MAX_TERMS + 1):
        term = math.exp(-2.0 * m * m * x * x)
        s += term if m % 2 else -term
        if term < 1e-15:
            return 1.0 - 2.0 * s
    _cap_warning("kolmogorov_cdf")
    return 1.0 - 2.0 * s


def _kolmogorov_theta(x: float) -> float:
    c = math.pi**2 / (8.0 * x * x)
    s = 0.0
    for m in range(1, MAX_TERMS + 1):
        term = math.exp(-((2 * m - 1) ** 2) * c)
        s += term
        if term < 1e-15:
            break
    else:
        _cap_warning("kolmogorov_cdf")
    return math.sqrt(TWO_PI) / x * s


def _kolmogorov_scalar(x: float) -> float:
    if x <= 0.0:
        return 0.0
    val = _kolmogorov_theta(x) if x < 1.0 else _kolmogorov_alternating(x)
    return min(1.0, max(0.0, val))


def kolmogorov_cdf(x):
    """Kolmogorov distribution function ``K(x)``.

    Uses the theta-function form below ``x = 1`` and the alternating form
    above, each truncated once a term drops below ``1e-15``.
    """
    if np.ndim(x) == 0:
        return _kolmogorov_scalar(float(x))
    return np.vectorize(_kolmogorov_scalar, otypes=[float])(x)


def _kuiper_sf_scalar(v: float, n: float | None) -> float:
    if v <= 0.0:
        return 1.0
    v2 = v * v
    s1 = 0.0
    s2 = 0.0
    for m in range(1, MAX_TERMS + 1):
        m2 = m * m
        e = math.exp(-2.0 * m2 * v2)
        t1 = (4.0 * m2 * v2 - 1.0) * e
        t2 = m2 * (4.0 * m2 * v2 - 3.0) * e
        s1 += t1
        s2 += t2
        if abs(t1) < 1e-12 and abs(t2) < 1e-12 and 4.0 * m2 * v2 > 3.0:
            break
    else:
        _cap_warning("kuiper_pvalue")
    tail = 2.0 * s1
    if n is not None:
        tail -= 8.0 * v / (3.0 * math.sqrt(n)) * s2
    return min(1.0, max(0.0, tail))


def kuiper_pvalue(v, n=None):
    """Upper tail of Kuiper's ``V_n`` with the ``1/sqrt(n)`` correction term.

    ``n=None`` drops the correction and gives the limiting law.
    """
    if np.ndim(v) == 0:
        return _kuiper_sf_scalar(float(v), n)
    return np.vectorize(lambda t: _kuiper_sf_scalar(t, n), otypes=[float])(v)


def watson_pvalue(u):
    """Asymptotic upper tail of Watson's ``U_n^2``: ``1 - K(pi*sqrt(u))``."""
    u = np.asarray(u, dtype=float)
    out = 1.0 - kolmogorov_cdf(math.pi * np.sqrt(np.maximum(u, 0.0)))
    return np.where(u <= 0.0, 1.0, out)[()]


def _ajne_sf_scalar(a: float) -> float:
    if a <= 0.0:
        return 1.0
    s = 0.0
    for m in range(1, MAX_TERMS + 1):
        j = 2 * m - 1
        term = math.exp(-(math.pi**2) * j * j * a / 2.0) / j
        s += term if m % 2 else -term
        if term < 1e-14:
            break
    else:
        _cap_warning("ajne_pvalue")
    return min(1.0, max(0.0, 4.0 / math.pi * s))


def ajne_pvalue(a):
    """Asymptotic upper tail of Ajne's ``A_n`` on the circle."""
    if np.ndim(a) == 0:
        return _ajne_sf_scalar(float(a))
    return np.vectorize(_ajne_sf_scalar, otypes=[float])(a)


def hodges_ajne_pvalue(h):
    """Asymptotic upper tail of the Hodges-Ajne statistic: ``K(pi / (2h))``."""
    h = np.asarray(h, dtype=float)
    safe = np.where(h > 0.0, h, 1.0)
    out = kolmogorov_cdf(math.pi / (2.0 * safe))
    return np.where(h <= 0.0, 1.0, out)[()]


@lru_cache(maxsize=4096)
def _range_cdf_scalar(t: float, n: int) -> float:
    if t <= 0.0:
        return 0.0
    if t >= TWO_PI:
        return 1.0
    c = 1.0 - t / TWO_PI
    # alternating binomial sum: work at enough precision to absorb cancellation
    with mpmath.workdps(30 + int(0.31 * n)):
        mc = mpmath.mpf(1) - mpmath.mpf(t) / (2 * mpmath.pi)
        s = mpmath.mpf(0)
        for m in range(1, n + 1):
            base = 1 - m * mc
            if base <= 0 or m * c >= 1.0:
                break
            term = mpmath.binomial(n, m) * base ** (n - 1)
            s += term if m % 2 else -term
        val = float(s)
    return min(1.0, max(0.0, val))


def range_cdf(t, n: int):
    """Exact null cdf ``P[T_n <= t]`` of the circular range; this is its p-value."""
    if n < 2:
        raise ValueError("range law needs n >= 2")
    if np.ndim(t) == 0:
        return _range_cdf_scalar(float(t), int(n))
    return np.vectorize(lambda x: _range_cdf_scalar(float(x), int(n)), otypes=[float])(t)


def chisq_pvalue(x, df):
    """Upper tail of the chi-square law (regularized incomplete gamma)."""
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.0, 1.0, special.gammaincc(df / 2.0, np.maximum(x, 0.0) / 2.0))[()]


def normal_pvalue(x, mean=0.0, variance=1.0, tail="two-sided"):
    z = (np.asarray(x, dtype=float) - mean) / math.sqrt(variance)
    if tail == "upper":
        out = 0.5 * special.erfc(z / math.sqrt(2.0))
    elif tail == "lower":
        out = 0.5 * special.erfc(-z / math.sqrt(2.0))
    elif tail == "two-sided":
        out = special.erfc(np.abs(z) / math.sqrt(2.0))
    else:
        raise ValueError(f"unknown tail {tail!r}")
    return out[()]


@dataclass(frozen=True)
class Regime:
    """Growth regime of the dimension relative to the sample size."""

    kind: str  # "sub", "exp" or "super"
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in ("sub", "exp", "super"):
            raise ValueError(f"unknown regime {self.kind!r}")
        if self.kind == "exp" and not (self.beta is not None and self.beta > 0):
            raise ValueError("exponential regime needs beta > 0")

    def __str__(self):
        return f"exp:{self.beta:.17g}" if self.kind == "exp" else self.kind


def extreme_value_cdf(z, regime: Regime):
    """Extreme-value limit laws of the coherence statistics, by regime."""
    z = np.asarray(z, dtype=float)
    if regime.kind == "sub":
        rate = 1.0 / math.sqrt(8.0 * math.pi)
        shift = 0.0
    elif regime.kind == "exp":
        b = regime.beta
        rate = math.sqrt(b / (2.0 * math.pi * -math.expm1(-4.0 * b)))
        shift = 8.0 * b
    else:
        rate = 1.0 / math.sqrt(2.0 * math.pi)
        shift = 0.0
    with np.errstate(over="ignore"):
        out = -np.expm1(-rate * np.exp((z + shift) / 2.0))
    return out[()]


@lru_cache(maxsize=32)
def _mixture_draws(weights: tuple, dims: tuple, shift: float, replicates: int,
                   seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x4D1C,)))
    w = np.asarray(weights)
    d = np.asarray(dims, dtype=float)
    total = np.full(replicates, shift)
    block = max(1, 2_000_000 // replicates)
    for lo in range(0, w.size, block):
        ww, dd = w[lo:lo + block], d[lo:lo + block]
        total += rng.chisquare(dd, size=(replicates, ww.size)) @ ww
    total.sort()
    total.setflags(write=False)
    return total


def chisq_mixture_pvalue(x, weights, dims, tail_mass: float = 0.0,
                         replicates: int = 100_000, seed: int = 0):
    """Upper tail of ``sum_k w_k * chi2(d_k)`` by Monte Carlo.

    ``tail_mass`` is the mean of truncated-away terms and is added as a
    constant; the p-value is ``(b + 1) / (M + 1)`` with ``b`` the number of
    draws at or above ``x``.
    """
    w = np.asarray(weights, dtype=float).ravel()
    d = np.asarray(dims, dtype=float).ravel()
    if w.shape != d.shape:
        raise ValueError(f"weights ({w.size}) and dims ({d.size}) differ in length")
    keep = w != 0.0
    draws = _mixture_draws(tuple(w[keep]), tuple(d[keep]), float(tail_mass), int(replicates),
                           int(seed))
    x = np.asarray(x, dtype=float)
    b = draws.size - np.searchsorted(draws, x, side="left")
    out = (b + 1.0) / (draws.size + 1.0)
    return np.where(x <= 0.0, 1.0, out)[()]


# -- tagged law objects --------------------------------------------------------


@dataclass(frozen=True)
class NullLaw:
    kind = "law"
    tail = "upper"

    def sf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        return 1.0 - np.asarray(self.sf(x))

    def pvalue(self, x):
        if self.tail == "upper":
            return self.sf(x)
        return self.cdf(x)

    def describe(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Kolmogorov(NullLaw):
    kind = "kolmogorov"

    def cdf(self, x):
        return kolmogorov_cdf(x)

    def sf(self, x):
        return 1.0 - np.asarray(kolmogorov_cdf(x))


@dataclass(frozen=True)
class KuiperSeries(NullLaw):
    n: int | None = None
    kind = "kuiper"

    def sf(self, x):
        return kuiper_pvalue(x, self.n)

    def describe(self):
        return f"kuiper(n={self.n})"


@dataclass(frozen=True)
class WatsonAsym(NullLaw):
    kind = "watson"

    def sf(self, x):
        return watson_pvalue(x)


@dataclass(frozen=True)
class AjneSeries(NullLaw):
    kind = "ajne"

    def sf(self, x):
        return ajne_pvalue(x)


@dataclass(frozen=True)
class HodgesAjneAsym(NullLaw):
    kind = "hodges-ajne"

    def sf(self, x):
        return hodges_ajne_pvalue(x)


@dataclass(frozen=True)
class RangeExact(NullLaw):
    n: int = 2
    kind = "range"
    tail = "lower"

    def cdf(self, x):
        return range_cdf(x, self.n)

    def sf(self, x):
        return 1.0 - np.asarray(range_cdf(x, self.n))

    def describe(self):
        return f"range(n={self.n})"


@dataclass(frozen=True)
class Normal(NullLaw):
    mean: float = 0.0
    variance: float = 1.0
    side: str = "upper"
    kind = "normal"

    @property
    def tail(self):
        return self.side

    def sf(self, x):
        return normal_pvalue(x, self.mean, self.variance, "upper")

    def pvalue(self, x):
        return normal_pvalue(x, self.mean, self.variance, self.side)

    def describe(self):
        return f"normal(mean={self.mean:.17g}, variance={self.variance:.17g}, {self.side})"


@dataclass(frozen=True)
class ChiSq(NullLaw):
    df: float = 1.0
    kind = "chisq"

    def sf(self, x):
        return chisq_pvalue(x, self.df)

    def describe(self):
        return f"chisq(df={self.df:g})"


@dataclass(frozen=True)
class ChiSqMixture(NullLaw):
    weights: tuple = ()
    dims: tuple = ()
    tail_mass: float = 0.0
    replicates: int = 100_000
    seed: int = 0
    kind = "chisq-mixture"

    def sf(self, x):
        return chisq_mixture_pvalue(x, self.weights, self.dims, self.tail_mass,
                                    self.replicates, self.seed)

    def describe(self):
        return (f"chisq-mixture(K={len(self.weights)}, tail_mass={self.tail_mass:.3g}, "
                f"M={self.replicates})")


@dataclass(frozen=True)
class ExtremeValue(NullLaw):
    regime: Regime = field(default_factory=lambda: Regime("sub"))
    kind = "extreme-value"
    tail = "lower"

    def cdf(self, x):
        return extreme_value_cdf(x, self.regime)

    def sf(self, x):
        return 1.0 - np.asarray(extreme_value_cdf(x, self.regime))

    def describe(self):
        return f"extreme-value({self.regime})"
