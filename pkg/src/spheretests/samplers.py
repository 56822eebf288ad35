"""Samplers for the uniform law and common alternatives.

Every sampler takes a seed (int, ``SeedSequence`` or ``Generator``) and
is a pure function of its parameters and that seed. The ``draw_*``
helpers return raw arrays with optional leading batch axes and are what
the Monte Carlo engine uses; the ``sample_*`` wrappers return a
:class:`DirectionalSample`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sample import TWO_PI, DirectionalSample

FAMILIES = ("uniform", "vmf", "cardioid", "mixture8", "axial")


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _shape(size) -> tuple:
    return (size,) if np.isscalar(size) else tuple(size)


def _unit_mu(mu, p: int) -> np.ndarray:
    if mu is None:
        out = np.zeros(p)
        out[0] = 1.0
        return out
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (p,):
        raise ValueError(f"mean direction has dimension {mu.size}, expected {p}")
    norm = np.linalg.norm(mu)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError("mean direction must have unit norm")
    return mu / norm


def draw_uniform(rng, size, p: int) -> np.ndarray:
    """Uniform points of shape ``size + (p,)`` via normalized Gaussians."""
    x = rng.standard_normal(_shape(size) + (p,))
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def vmf_cosines(rng, size, p: int, kappa: float):
    """Cosines ``U'mu`` under a von Mises-Fisher law, with the acceptance rate.

    Rejection from a transformed Beta proposal; for ``kappa = 0`` every
    proposal is accepted and the output has the exact uniform cosine law.
    """
    if kappa < 0:
        raise ValueError("concentration kappa must be nonnegative")
    shape = _shape(size)
    total = int(np.prod(shape))
    d1 = p - 1.0
    b = d1 / (2.0 * kappa + math.sqrt(4.0 * kappa * kappa + d1 * d1))
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + d1 * math.log1p(-x0 * x0)
    out = np.empty(total)
    filled = proposed = 0
    while filled < total:
        m = max(16, int(1.2 * (total - filled)) + 8)
        z = rng.beta(d1 / 2.0, d1 / 2.0, size=m)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(m)
        with np.errstate(divide="ignore"):
            ok = kappa * w + d1 * np.log1p(-x0 * w) - c >= np.log(u)
        acc = w[ok]
        take = min(acc.size, total - filled)
        out[filled:filled + take] = acc[:take]
        # count proposals actually consumed up to the last accepted one used
        proposed += m if take == acc.size else int(np.flatnonzero(ok)[take - 1]) + 1
        filled += take
    return np.clip(out.reshape(shape), -1.0, 1.0), total / proposed


def _tangent(rng, mu: np.ndarray, shape) -> np.ndarray:
    v = rng.standard_normal(shape + (mu.size,))
    v -= (v @ mu)[..., None] * mu
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def draw_vmf(rng, size, p: int, mu=None, kappa: float = 1.0) -> np.ndarray:
    mu = _unit_mu(mu, p)
    shape = _shape(size)
    w, _ = vmf_cosines(rng, shape, p, kappa)
    v = _tangent(rng, mu, shape)
    x = w[..., None] * mu + np.sqrt(1.0 - w * w)[..., None] * v
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def draw_axial(rng, size, p: int, mu=None, kappa: float = 1.0) -> np.ndarray:
    x = draw_vmf(rng, size, p, mu, kappa)
    sign = np.where(rng.random(_shape(size)) < 0.5, -1.0, 1.0)
    return x * sign[..., None]


def _check_rho(rho):
    if not 0.0 <= rho <= 0.5:
        raise ValueError("cardioid rho must lie in [0, 1/2]")


def cardioid_angles(rng, size, mu: float = 0.0, rho: float = 0.5):
    """Angles from ``(1 + 2 rho cos(theta - mu))/(2 pi)`` with the acceptance rate."""
    _check_rho(rho)
    shape = _shape(size)
    total = int(np.prod(shape))
    out = np.empty(total)
    filled = proposed = 0
    bound = 1.0 + 2.0 * rho
    while filled < total:
        m = max(16, int(1.6 * (total - filled)) + 8)
        th = rng.random(m) * TWO_PI
        ok = rng.random(m) * bound <= 1.0 + 2.0 * rho * np.cos(th)
        acc = th[ok]
        take = min(acc.size, total - filled)
        out[filled:filled + take] = acc[:take]
        proposed += m if take == acc.size else int(np.flatnonzero(ok)[take - 1]) + 1
        filled += take
    return np.mod(out.reshape(shape) + mu, TWO_PI), total / proposed


def _angles_to_points(theta):
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _mu_angle(mu) -> float:
    if mu is None:
        return 0.0
    mu = _unit_mu(mu, 2)
    return math.atan2(mu[1], mu[0])


def draw_cardioid(rng, size, mu=None, rho: float = 0.5) -> np.ndarray:
    theta, _ = cardioid_angles(rng, size, _mu_angle(mu), rho)
    return _angles_to_points(theta)


def draw_mixture8(rng, size, base: "AlternativeSpec", mu=None, mix: float = 0.5) -> np.ndarray:
    """Circular mixture with density ``(1 - mix)/(2 pi) + mix f(theta + mu)``.

    ``base`` is a circular family (vMF or cardioid) with mode at angle 0;
    the shift ``f(theta + mu)`` moves its mode to ``-mu``.
    """
    if not 0.0 <= mix <= 1.0:
        raise ValueError("mixing weight must lie in [0, 1]")
    if base.family not in ("vmf", "cardioid"):
        raise ValueError("mixture base must be a circular vmf or cardioid family")
    shape = _shape(size)
    shift = _mu_angle(mu)
    centred = AlternativeSpec(base.family, kappa=base.kappa, rho=base.rho)
    pts = centred.draw(rng, shape, 2)
    theta = np.arctan2(pts[..., 1], pts[..., 0]) - shift
    uni = rng.random(shape) * TWO_PI
    pick = rng.random(shape) < mix
    return _angles_to_points(np.where(pick, theta, uni))


@dataclass(frozen=True)
class AlternativeSpec:
    """A sampling family with its parameters."""

    family: str
    kappa: float = 0.0
    rho: float = 0.0
    mix: float = 0.0
    mu: tuple | None = None
    base: "AlternativeSpec | None" = field(default=None, compare=True)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.kappa < 0:
            raise ValueError("concentration kappa must be nonnegative")
        if self.family == "cardioid":
            _check_rho(self.rho)
        if self.family == "mixture8":
            if self.base is None:
                raise ValueError("mixture8 needs a base family")
            if not 0.0 <= self.mix <= 1.0:
                raise ValueError("mixing weight must lie in [0, 1]")

    @property
    def circular_only(self) -> bool:
        return self.family in ("cardioid", "mixture8")

    def draw(self, rng, size, p: int) -> np.ndarray:
        if self.circular_only and p != 2:
            raise ValueError(f"{self.family} samples require p=2 (got p={p})")
        f = self.family
        if f == "uniform":
            return draw_uniform(rng, size, p)
        if f == "vmf":
            return draw_vmf(rng, size, p, self.mu, self.kappa)
        if f == "axial":
            return draw_axial(rng, size, p, self.mu, self.kappa)
        if f == "cardioid":
            return draw_cardioid(rng, size, self.mu, self.rho)
        return draw_mixture8(rng, size, self.base, self.mu, self.mix)

    def __str__(self):
        f = self.family
        if f == "uniform":
            return f
        if f in ("vmf", "axial"):
            return f"{f}:{self.kappa:g}"
        if f == "cardioid":
            return f"cardioid:{self.rho:g}"
        return f"mixture8:{self.base}:{self.mix:g}"


def parse_alternative(text: str) -> AlternativeSpec:
    """Parse ``uniform``, ``vmf:K``, ``axial:K``, ``cardioid:R`` or ``mixture8:BASE:W``."""
    parts = text.strip().split(":")
    try:
        f = parts[0]
        if f == "uniform" and len(parts) == 1:
            return AlternativeSpec("uniform")
        if f in ("vmf", "axial") and len(parts) == 2:
            return AlternativeSpec(f, kappa=float(parts[1]))
        if f == "cardioid" and len(parts) == 2:
            return AlternativeSpec(f, rho=float(parts[1]))
        if f == "mixture8" and len(parts) == 4:
            base = parse_alternative(":".join(parts[1:3]))
            return AlternativeSpec(f, mix=float(parts[3]), base=base)
    except ValueError as e:
        raise ValueError(f"bad alternative {text!r}: {e}") from None
    raise ValueError(f"bad alternative {text!r}; expected uniform, vmf:K, axial:K, "
                     "cardioid:R or mixture8:BASE:PARAM:W")


def sample_uniform(n: int, p: int, seed) -> DirectionalSample:
    if n < 1 or p < 2:
        raise ValueError("need n >= 1 and p >= 2")
    return DirectionalSample(draw_uniform(rng_from(seed), n, p))


def sample_vmf(n: int, p: int, mu, kappa: float, seed) -> DirectionalSample:
    return DirectionalSample(draw_vmf(rng_from(seed), n, p, mu, kappa))


def sample_cardioid(n: int, mu, rho: float, seed) -> DirectionalSample:
    return DirectionalSample(draw_cardioid(rng_from(seed), n, mu, rho))


def sample_mixture8(n: int, base: AlternativeSpec, mu, kappa_mix: float, seed) -> DirectionalSample:
    return DirectionalSample(draw_mixture8(rng_from(seed), n, base, mu, kappa_mix))


def sample_axial(n: int, p: int, mu, kappa: float, seed) -> DirectionalSample:
    return DirectionalSample(draw_axial(rng_from(seed), n, p, mu, kappa))
