"""Tests designed for dimensions comparable to, or larger than, the sample size."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numba
import numpy as np

from .nulldist import ExtremeValue, Regime
from .sample import SampleError, as_points

# Above this dimension dot products use compensated summation.
COMPENSATED_DIM = 10_000

SUB_THRESHOLD = 0.01
SUPER_THRESHOLD = 10.0
# round-off keeps a duplicated point's |cosine| a few ulps below 1
DEGENERATE_TOL = 1e-12

RegimeSpec = Regime


def rayleigh_standardized(x):
    """``(R_n - p)/sqrt(2p)`` computed as ``(sqrt(2p)/n) sum_{i<j} U_i'U_j``."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    s = pts.sum(axis=-2)
    # sum_{i<j} U_i'U_j = (|sum U_i|^2 - n) / 2
    pair_total = (np.einsum("...i,...i->...", s, s) - n) / 2.0
    return (math.sqrt(2.0 * p) / n * pair_total)[()]


@numba.njit(cache=True)
def _max_abs_dot_compensated(pts):
    n, p = pts.shape
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            c = 0.0
            for q in range(p):
                v = pts[i, q] * pts[j, q]
                t = s + v
                if abs(s) >= abs(v):
                    c += (s - t) + v
                else:
                    c += (v - t) + s
                s = t
            d = abs(s + c)
            if d > best:
                best = d
    return best


def coherence(x):
    """Largest absolute off-diagonal inner product ``max_{i<j} |U_i'U_j|``."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    if n < 2:
        raise SampleError("coherence needs n >= 2")
    if p > COMPENSATED_DIM:
        flat = pts.reshape((-1, n, p))
        out = np.array([_max_abs_dot_compensated(np.ascontiguousarray(f)) for f in flat])
        return np.minimum(out.reshape(pts.shape[:-2]), 1.0)[()]
    gram = np.abs(pts @ np.swapaxes(pts, -1, -2))
    iu = np.triu_indices(n, 1)
    return np.minimum(gram[..., iu[0], iu[1]].max(axis=-1), 1.0)[()]


def regime_classify(n: int, p: float, sub: float = SUB_THRESHOLD,
                    sup: float = SUPER_THRESHOLD) -> Regime:
    """Rule-of-thumb regime from ``r = log(p)/n``.

    ``r < sub`` is sub-exponential, ``r > sup`` super-exponential, and
    anything in between exponential with ``beta = r``.
    """
    r = math.log(p) / n
    if r < sub:
        return Regime("sub")
    if r > sup:
        return Regime("super")
    return Regime("exp", r)


def parse_regime(text: str) -> Regime | None:
    """``auto`` (None), ``sub``, ``super`` or ``exp:<beta>``."""
    if text == "auto":
        return None
    if text in ("sub", "super"):
        return Regime(text)
    if text.startswith("exp:"):
        try:
            beta = float(text[4:])
        except ValueError:
            raise ValueError(f"bad exponential rate in regime {text!r}") from None
        return Regime("exp", beta)
    raise ValueError(f"unknown regime {text!r}; use auto, sub, exp:<beta> or super")


@dataclass(frozen=True)
class CoherenceResult:
    statistic: float
    coherence: float
    regime: Regime
    law: ExtremeValue
    pvalue: float
    degenerate: bool
    convention: str


def _roles(n: int, p: int, convention: str):
    # (length of the vectors, number of vectors) as they enter the formula
    if convention == "columns":
        return p, n
    if convention == "rows":
        return n, p
    raise ValueError(f"unknown coherence convention {convention!r}")


def coherence_statistic(x, regime: Regime | None = None, convention: str = "columns"):
    """Normalized coherence statistic with its extreme-value null law.

    ``convention="columns"`` treats the observations as the columns of a
    ``p x n`` data matrix: the log-coherence is scaled by the dimension and
    the logarithmic centring uses the number of observations. ``"rows"``
    swaps the two roles. With formula length ``m`` and count ``q``::

        sub / exp:  m log(1 - l^2) + 4 log q - log log q
        super:      m log(1 - l^2) + (4m/(m-2)) log q - log m

    The p-value is the lower tail ``F(C)``: large coherence gives small
    ``C``. When ``regime`` is None it is chosen by :func:`regime_classify`
    on the formula roles.
    """
    pts = as_points(x)
    if pts.ndim != 2:
        raise SampleError("coherence_statistic takes a single sample")
    n, p = pts.shape
    m, q = _roles(n, p, convention)
    if q <= math.e:
        raise SampleError(f"coherence statistic needs more than e vectors in the log term (got {q})")
    if regime is None:
        regime = regime_classify(m, q) if m >= 3 else Regime("sub")
    if regime.kind == "super" and m <= 2:
        raise SampleError("super-exponential coherence statistic needs vector length > 2")
    ell = float(coherence(pts))
    law = ExtremeValue(regime)
    if ell >= 1.0 - DEGENERATE_TOL:
        warnings.warn("coherence equals 1 (duplicate or antipodal pair); p-value set to 0",
                      RuntimeWarning, stacklevel=2)
        return CoherenceResult(-math.inf, ell, regime, law, 0.0, True, convention)
    c = m * math.log1p(-ell * ell)
    if regime.kind == "super":
        stat = c + 4.0 * m / (m - 2) * math.log(q) - math.log(m)
    else:
        stat = c + 4.0 * math.log(q) - math.log(math.log(q))
    return CoherenceResult(stat, ell, regime, law, float(law.cdf(stat)), False, convention)


def coherence_values(x, regime: Regime, convention: str = "columns"):
    """Batched statistic for Monte Carlo work; no degeneracy handling."""
    pts = as_points(x)
    n, p = pts.shape[-2:]
    m, q = _roles(n, p, convention)
    ell = np.asarray(coherence(pts))
    with np.errstate(divide="ignore"):
        c = m * np.log1p(-ell * ell)
    if regime.kind == "super":
        return (c + 4.0 * m / (m - 2) * math.log(q) - math.log(m))[()]
    return (c + 4.0 * math.log(q) - math.log(math.log(q)))[()]
