"""Directional samples: validation, file ingestion/emission and circular views."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

TWO_PI = 2.0 * math.pi
NORM_TOL = 1e-10
_SPLIT = re.compile(r"[,\s]+")

FORMATS = ("angles-rad", "angles-deg", "vectors")


class SampleError(ValueError):
    """Raised for malformed input data."""


@dataclass(frozen=True)
class DirectionalSample:
    """``n`` unit vectors in ``R^p`` stored as an ``(n, p)`` read-only array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2:
            raise SampleError(f"points must be a 2-d array, got shape {pts.shape}")
        n, p = pts.shape
        if n < 1:
            raise SampleError("sample is empty")
        if p < 2:
            raise SampleError(f"dimension must be at least 2, got {p}")
        if not np.all(np.isfinite(pts)):
            raise SampleError("non-finite coordinates")
        dev = np.abs(np.linalg.norm(pts, axis=1) - 1.0)
        if dev.max() > NORM_TOL:
            i = int(dev.argmax())
            raise SampleError(f"row {i + 1} has norm {1 + dev[i]:.12g}, not unit")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def angles(self) -> np.ndarray:
        """Angles in ``[0, 2*pi)``; only defined for circular data."""
        if self.dim != 2:
            raise SampleError(f"angle view requires p=2, sample has p={self.dim}")
        return to_angles(self.points)

    @classmethod
    def from_angles(cls, theta) -> "DirectionalSample":
        theta = np.mod(np.asarray(theta, dtype=float).ravel(), TWO_PI)
        return cls(np.column_stack([np.cos(theta), np.sin(theta)]))

    @classmethod
    def from_vectors(cls, x, renormalize: bool = False, tolerance: float = 1e-3):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if renormalize:
            x = _renormalize(x, tolerance)
        return cls(x)


SampleLike = Union[DirectionalSample, np.ndarray]


def as_points(x) -> np.ndarray:
    """Return the ``(..., n, p)`` coordinate array behind ``x``."""
    if isinstance(x, DirectionalSample):
        return x.points
    arr = np.asarray(x, dtype=float)
    if arr.ndim < 2:
        raise SampleError("expected an array of unit vectors with shape (..., n, p)")
    return arr


def to_angles(points: np.ndarray) -> np.ndarray:
    """Angles in ``[0, 2*pi)`` of circular unit vectors with shape ``(..., n, 2)``."""
    theta = np.mod(np.arctan2(points[..., 1], points[..., 0]), TWO_PI)
    # mod can round tiny negative angles up to exactly 2*pi
    theta[theta >= TWO_PI] = 0.0
    return theta


def require_circular(points: np.ndarray, name: str) -> None:
    if points.shape[-1] != 2:
        raise SampleError(f"{name} requires p=2, got p={points.shape[-1]}")


def sorted_angles(x) -> np.ndarray:
    """Stable-sorted angles of circular data, shape ``(..., n)``."""
    pts = as_points(x)
    require_circular(pts, "circular statistic")
    return np.sort(to_angles(pts), axis=-1, kind="stable")


@dataclass(frozen=True)
class OrderedCircular:
    """Order statistics of a circular sample, normalized to ``[0, 1)``."""

    theta: np.ndarray
    u: np.ndarray = field(init=False)
    u_bar: float = field(init=False)

    def __post_init__(self):
        theta = np.sort(np.asarray(self.theta, dtype=float), kind="stable")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "u", theta / TWO_PI)
        object.__setattr__(self, "u_bar", float(np.mean(theta / TWO_PI)))

    @classmethod
    def from_sample(cls, sample: DirectionalSample) -> "OrderedCircular":
        return cls(sample.angles)

    @property
    def n(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class Spacings:
    """Arc gaps ``D_1..D_n`` (radians) between consecutive ordered angles.

    The first ``n - 1`` entries are consecutive differences of the ordered
    angles; the last is the wrap-around gap ``2*pi - (theta_(n) - theta_(1))``.
    """

    gaps: np.ndarray

    @property
    def n(self) -> int:
        return self.gaps.shape[-1]


def gaps_from_sorted(theta: np.ndarray) -> np.ndarray:
    wrap = TWO_PI - (theta[..., -1] - theta[..., 0])
    return np.concatenate([np.diff(theta, axis=-1), wrap[..., None]], axis=-1)


def spacings(x) -> Spacings:
    """Spacings of a circular sample (``n >= 2``)."""
    theta = sorted_angles(x)
    if theta.shape[-1] < 2:
        raise SampleError("spacings need at least 2 observations")
    return Spacings(gaps_from_sorted(theta))


def gaps_of(x) -> np.ndarray:
    if isinstance(x, Spacings):
        return x.gaps
    return spacings(x).gaps


def _renormalize(x: np.ndarray, tolerance: float) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    for i, r in enumerate(norms):
        if r == 0.0:
            raise SampleError(f"row {i + 1} has zero norm")
        if abs(r - 1.0) > tolerance:
            raise SampleError(
                f"row {i + 1} has norm {r:.12g}, outside the renormalization band "
                f"[1 - {tolerance:g}, 1 + {tolerance:g}]"
            )
    return x / norms[:, None]


def _parse_rows(text: str, source: str) -> list[list[float]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tokens = [t for t in _SPLIT.split(s) if t]
        row = []
        for col, tok in enumerate(tokens, start=1):
            try:
                val = float(tok)
            except ValueError:
                raise SampleError(
                    f"{source}: non-numeric token {tok!r} at row {lineno}, column {col}"
                ) from None
            if not math.isfinite(val):
                raise SampleError(f"{source}: non-finite value at row {lineno}, column {col}")
            row.append(val)
        rows.append(row)
    return rows


def parse(
    text: str,
    format: str = "vectors",
    renormalize: bool = False,
    tolerance: float = 1e-3,
    source: str = "<input>",
) -> DirectionalSample:
    """Parse sample text; see :func:`ingest`."""
    if format not in FORMATS:
        raise SampleError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
    rows = _parse_rows(text, source)
    if not rows:
        raise SampleError(f"{source}: no data rows")
    if format == "vectors":
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise SampleError(
                    f"{source}: inconsistent row widths ({len(r)} vs {width}) at data row {i + 1}"
                )
        if width < 2:
            raise SampleError(f"{source}: vectors need at least 2 columns")
        x = np.array(rows)
        norms = np.linalg.norm(x, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise SampleError(f"{source}: row {zero[0] + 1} has zero norm")
        if renormalize:
            x = _renormalize(x, tolerance)
        try:
            return DirectionalSample(x)
        except SampleError as exc:
            raise SampleError(f"{source}: {exc} (use renormalization for rounded input)") from None
    values = np.array([v for r in rows for v in r])
    if format == "angles-deg":
        values = values * (math.pi / 180.0)
    return DirectionalSample.from_angles(values)


def ingest(
    path,
    format: str = "vectors",
    renormalize: bool = False,
    tolerance: float = 1e-3,
) -> DirectionalSample:
    """Read a sample from a UTF-8 text file.

    Values may be separated by commas or whitespace, and lines starting with
    ``#`` are skipped. Angle formats accept any number of values per line;
    ``vectors`` requires a constant row width ``p >= 2``. With
    ``renormalize`` set, rows whose norm lies within ``tolerance`` of one are
    rescaled to unit length.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse(text, format, renormalize, tolerance, source=str(path))


def format_sample(sample: DirectionalSample, format: str = "vectors") -> str:
    if format == "vectors":
        rows = sample.points
    elif format == "angles-rad":
        rows = sample.angles[:, None]
    elif format == "angles-deg":
        rows = (sample.angles * (180.0 / math.pi))[:, None]
    else:
        raise SampleError(f"unknown format {format!r}")
    return "".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in rows)


def emit(sample: DirectionalSample, path, format: str = "vectors") -> None:
    """Write ``sample`` in an ingestible format with 17 significant digits."""
    Path(path).write_text(format_sample(sample, format), encoding="utf-8")
