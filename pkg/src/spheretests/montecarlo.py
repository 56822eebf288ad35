"""Seeded Monte Carlo calibration and level/power studies.

Replicate ``r`` draws its dataset from the stream
``SeedSequence(seed, spawn_key=(r,))``, so a run depends only on the seed
and the replicate count. Replicates are processed in fixed-size blocks; the
worker pool only changes which thread evaluates a block, never the numbers.
"""

from __future__ import annotations

import math
import os
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .sample import as_points
from .samplers import AlternativeSpec, draw_uniform

BLOCK = 64
TAILS = ("upper", "lower", "two-sided")
CACHE_MAGIC = b"SPHNULL1"
_ID_BYTES = 64
_HEADER = struct.Struct(f"<8s{_ID_BYTES}sqqqQ")


@dataclass(frozen=True)
class McConfig:
    replicates: int = 999
    seed: int = 0
    workers: int = 1
    statistic: str = ""
    cache: str | None = None

    def __post_init__(self):
        if self.replicates < 99:
            raise ValueError("Monte Carlo needs at least 99 replicates")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class McResult:
    observed: float
    exceedances: int
    pvalue: float
    replicates: int
    draws: np.ndarray | None = field(default=None, repr=False)
    wall_time: float = 0.0
    warnings: tuple = ()


def replicate_rng(seed: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))


def _run_blocks(task: Callable[[int, int], np.ndarray], total: int, workers: int) -> np.ndarray:
    bounds = [(lo, min(lo + BLOCK, total)) for lo in range(0, total, BLOCK)]
    if workers == 1 or len(bounds) == 1:
        parts = [task(lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: task(*b), bounds))
    return np.concatenate(parts)


def simulate(statistic: Callable, n: int, p: int, replicates: int, seed: int,
             workers: int = 1, alternative: AlternativeSpec | None = None) -> np.ndarray:
    """Statistic values on ``replicates`` simulated datasets, in replicate order."""

    def task(lo, hi):
        data = np.stack([
            draw_uniform(replicate_rng(seed, r), n, p) if alternative is None
            else alternative.draw(replicate_rng(seed, r), n, p)
            for r in range(lo, hi)
        ])
        return np.asarray(statistic(data), dtype=float).reshape(hi - lo)

    return _run_blocks(task, replicates, workers)


def _header(stat_id: str, n: int, p: int, m: int, seed: int) -> bytes:
    raw = stat_id.encode()
    if len(raw) > _ID_BYTES:
        raise ValueError("statistic id too long for the cache header")
    return _HEADER.pack(CACHE_MAGIC, raw, n, p, m, seed)


def load_cached(path, stat_id: str, n: int, p: int, m: int, seed: int) -> np.ndarray | None:
    """Sorted null draws from ``path`` if its header matches exactly, else None."""
    path = Path(path)
    if not path.is_file():
        return None
    blob = path.read_bytes()
    head = _header(stat_id, n, p, m, seed)
    if blob[:_HEADER.size] != head or len(blob) != _HEADER.size + 8 * m:
        return None
    return np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).copy()


def save_cached(path, draws: np.ndarray, stat_id: str, n: int, p: int, seed: int) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(_header(stat_id, n, p, draws.size, seed)
                    + np.sort(draws).astype("<f8").tobytes())
    os.replace(tmp, path)


def null_draws(statistic: Callable, n: int, p: int, cfg: McConfig) -> np.ndarray:
    """Null draws of ``statistic``; read from and written to ``cfg.cache`` when set."""
    if cfg.cache:
        hit = load_cached(cfg.cache, cfg.statistic, n, p, cfg.replicates, cfg.seed)
        if hit is not None:
            return hit
    draws = simulate(statistic, n, p, cfg.replicates, cfg.seed, cfg.workers)
    if cfg.cache:
        save_cached(cfg.cache, draws, cfg.statistic, n, p, cfg.seed)
    return draws


def tail_pvalue(observed: float, draws: np.ndarray, tail: str) -> tuple[int, float]:
    """Exceedance count and ``(b + 1)/(M + 1)``; ties count as exceedances."""
    m = draws.size
    up = int(np.count_nonzero(draws >= observed))
    lo = int(np.count_nonzero(draws <= observed))
    if tail == "upper":
        return up, (up + 1) / (m + 1)
    if tail == "lower":
        return lo, (lo + 1) / (m + 1)
    if tail == "two-sided":
        b = min(up, lo)
        return b, min(1.0, 2.0 * (b + 1) / (m + 1))
    raise ValueError(f"unknown tail {tail!r}; choose from {', '.join(TAILS)}")


def mc_pvalue(x, statistic: Callable, cfg: McConfig, tail: str = "upper") -> McResult:
    """Monte Carlo p-value of ``statistic`` for the sample ``x``."""
    if tail not in TAILS:
        raise ValueError(f"unknown tail {tail!r}; choose from {', '.join(TAILS)}")
    start = time.perf_counter()
    pts = as_points(x)
    n, p = pts.shape
    observed = float(statistic(pts))
    draws = np.sort(null_draws(statistic, n, p, cfg))
    b, pv = tail_pvalue(observed, draws, tail)
    return McResult(observed, b, pv, cfg.replicates, draws, time.perf_counter() - start)


# ---------------------------------------------------------------- studies

STUDY_STREAM = 0x57D1


@dataclass(frozen=True)
class StudyCell:
    test: str
    alternative: AlternativeSpec
    n: int
    p: int
    alpha: float = 0.05


@dataclass(frozen=True)
class StudyRow:
    cell: StudyCell
    replicates: int
    rejections: int

    @property
    def rate(self) -> float:
        return self.rejections / self.replicates

    @property
    def se(self) -> float:
        r = self.rate
        return math.sqrt(r * (1.0 - r) / self.replicates)


def _outer_seed(seed: int, cell_index: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(STUDY_STREAM, cell_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def study_pvalues(pvalues: Callable[[np.ndarray, int], np.ndarray], cell: StudyCell,
                  replicates: int, seed: int, workers: int = 1) -> np.ndarray:
    """P-values of ``replicates`` datasets drawn from the cell's alternative.

    ``pvalues(data, first)`` receives a block of datasets and the index of
    its first outer replicate (used to seed any inner Monte Carlo).
    """

    def task(lo, hi):
        data = np.stack([cell.alternative.draw(replicate_rng(seed, r), cell.n, cell.p)
                         for r in range(lo, hi)])
        return np.asarray(pvalues(data, lo), dtype=float).reshape(hi - lo)

    return _run_blocks(task, replicates, workers)


def level_power_study(cells: Sequence[StudyCell], replicates: int, seed: int = 0,
                      workers: int = 1, pvalue_factory: Callable | None = None) -> list[StudyRow]:
    """Rejection frequencies at each cell's level.

    ``pvalue_factory(cell, seed)`` returns the block p-value function for a
    cell; the default comes from the test catalog with each test's default
    p-value method.
    """
    if pvalue_factory is None:
        from .catalog import study_pvalue_function as pvalue_factory
    rows = []
    for i, cell in enumerate(cells):
        cell_seed = _outer_seed(seed, i)
        fn = pvalue_factory(cell, cell_seed)
        pv = study_pvalues(fn, cell, replicates, cell_seed, workers)
        rows.append(StudyRow(cell, replicates, int(np.count_nonzero(pv <= cell.alpha))))
    return rows
