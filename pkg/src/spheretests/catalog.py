"""Registry of named tests and the dispatch that turns a sample into a result."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import circular, highdim, nulldist, projection, sobolev
from .montecarlo import McConfig, mc_pvalue, simulate, tail_pvalue
from .nulldist import (AjneSeries, ChiSq, HodgesAjneAsym, KuiperSeries, Normal, NullLaw,
                       RangeExact, WatsonAsym)
from .sample import DirectionalSample, SampleError, as_points

METHODS = ("auto", "exact", "asymptotic", "mc")
METHOD_LABELS = {"exact": "exact", "asymptotic": "asymptotic", "mc": "monte-carlo"}
DEFAULT_ROTHMAN_T = 1.0 / 3.0
RAO_VARIANCE = 4.0 * math.pi**2 * (2.0 / math.e - 5.0 / math.e**2)
STUDY_INNER_REPLICATES = 99
_INNER_STREAM = 0x1AA3


@dataclass(frozen=True)
class TestOptions:
    """Per-test settings that do not come from the test id itself."""

    k: int | None = None
    regime: str = "auto"
    greenwood_tail: str = "two-sided"
    rao_normal: bool = False
    jupp_max_order: int = 25
    hr_constant_free: bool = False
    coherence_convention: str = "columns"
    mc_replicates: int = 999
    seed: int = 0
    workers: int = 1
    null_cache: str | None = None


@dataclass
class TestOutcome:
    test: str
    statistic: float
    p_value: float
    p_value_method: str
    n: int
    p: int
    config: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"test": self.test, "statistic": self.statistic, "p_value": self.p_value,
                "p_value_method": self.p_value_method, "n": self.n, "p": self.p,
                "config": self.config, "warnings": self.warnings}


@dataclass(frozen=True)
class Bound:
    """A test id resolved against data shape and options."""

    id: str
    statistic: Callable  # batched: (..., n, p) -> (...)
    tail: str  # Monte Carlo rejection direction
    exact: NullLaw | None = None
    asymptotic: NullLaw | None = None
    auto_asymptotic: bool = True
    config: dict = field(default_factory=dict)


# ---------------------------------------------------------------- binding


def _circular_only(name, p):
    if p != 2:
        raise SampleError(f"{name} requires p=2 (got p={p})")


def _min_n(name, n, lo):
    if n < lo:
        raise SampleError(f"{name} requires n >= {lo} (got n={n})")


def bind(test_id: str, n: int, p: int, opts: TestOptions) -> Bound:
    """Resolve ``test_id`` for data of shape ``(n, p)``.

    Raises :class:`SampleError` for dimension or size mismatches and
    ``ValueError`` for unknown ids.
    """
    name, _, arg = test_id.partition(":")
    if arg and name not in ("rothman", "sobolev"):
        raise ValueError(f"test {name!r} takes no parameter")

    if name == "kuiper":
        _circular_only(name, p)
        return Bound(name, circular.kuiper, "upper", asymptotic=KuiperSeries(n))
    if name == "watson":
        _circular_only(name, p)
        return Bound(name, circular.watson, "upper", asymptotic=WatsonAsym())
    if name == "hodges-ajne":
        _circular_only(name, p)
        return Bound(name, circular.hodges_ajne, "upper", asymptotic=HodgesAjneAsym())
    if name == "range":
        _circular_only(name, p)
        _min_n(name, n, 2)
        return Bound(name, circular.circular_range, "lower", exact=RangeExact(n))
    if name == "rao":
        _circular_only(name, p)
        _min_n(name, n, 2)
        return Bound(name, circular.rao_spacings, "upper",
                     asymptotic=Normal(0.0, RAO_VARIANCE, "upper"),
                     auto_asymptotic=opts.rao_normal, config={"rao_normal": opts.rao_normal})
    if name == "greenwood":
        _circular_only(name, p)
        _min_n(name, n, 2)
        tail = opts.greenwood_tail
        if tail not in ("upper", "lower", "two-sided"):
            raise ValueError(f"unknown Greenwood tail {tail!r}")
        return Bound(name, circular.greenwood, tail, asymptotic=Normal(0.0, 4.0, tail),
                     config={"tail": tail})
    if name == "rayleigh":
        return Bound(name, sobolev.rayleigh, "upper", asymptotic=ChiSq(p))
    if name == "bingham":
        return Bound(name, sobolev.bingham, "upper", asymptotic=ChiSq((p - 1) * (p + 2) / 2))
    if name == "ajne":
        law = AjneSeries() if p == 2 else None
        return Bound(name, sobolev.ajne, "upper", asymptotic=law)
    if name == "rothman":
        _circular_only(name, p)
        try:
            t = float(arg) if arg else DEFAULT_ROTHMAN_T
        except ValueError:
            raise ValueError(f"bad Rothman parameter {arg!r}") from None
        w = sobolev.SobolevWeights.rothman(t, sobolev.MIXTURE_TERMS)
        return Bound(f"rothman:{t:.17g}", lambda x: sobolev.rothman(x, t), "upper",
                     asymptotic=w.null_law(2), config={"t": t})
    if name == "sobolev":
        if not arg:
            raise ValueError("sobolev test needs a weights file: sobolev:<path>")
        w = sobolev.SobolevWeights.from_file(arg)
        return Bound(test_id, lambda x: sobolev.sobolev_statistic(x, w), "upper",
                     asymptotic=w.null_law(p), config={"weights": arg, "K": w.K})
    if name == "gine-g":
        return Bound(name, sobolev.gine_g, "upper")
    if name == "gine-f":
        return Bound(name, sobolev.gine_f, "upper")
    if name == "hermans-rasson":
        _circular_only(name, p)
        cf = opts.hr_constant_free
        return Bound(name, lambda x: sobolev.hermans_rasson(x, cf), "upper",
                     config={"constant_free": cf})
    if name == "pycke":
        _circular_only(name, p)
        _min_n(name, n, 2)
        return Bound(name, sobolev.pycke, "upper")
    if name == "jupp":
        _min_n(name, n, 2)
        cap = opts.jupp_max_order
        return Bound(name, lambda x: sobolev.jupp_data_driven(x, cap).statistic, "upper",
                     asymptotic=ChiSq(p), config={"max_order": cap})
    if name == "projection":
        k = opts.k if opts.k is not None else projection.default_k(p)
        if k < 1:
            raise ValueError("number of projections must be at least 1")
        dirs = projection.random_directions(k, p, opts.seed)
        if k == 1:
            h = dirs[0]
            stat = lambda x: projection.ks_distance(np.clip(as_points(x) @ h, -1, 1), p)  # noqa: E731
            return Bound(name, stat, "upper", asymptotic=_ScaledKolmogorov(n),
                         config={"k": 1})
        return Bound(name, lambda x: projection.min_projection_pvalue(x, dirs), "lower",
                     config={"k": k})
    if name == "rayleigh-hd":
        return Bound(name, highdim.rayleigh_standardized, "upper",
                     asymptotic=Normal(0.0, 1.0, "upper"))
    if name == "coherence":
        _min_n(name, n, 2)
        regime = highdim.parse_regime(opts.regime)
        m, q = highdim._roles(n, p, opts.coherence_convention)
        if q <= math.e:
            raise SampleError(f"coherence requires more than e vectors in the log term (got {q})")
        if regime is None:
            regime = highdim.regime_classify(m, q) if m >= 3 else nulldist.Regime("sub")
        if regime.kind == "super" and m <= 2:
            raise SampleError("super-exponential coherence statistic needs vector length > 2")
        conv = opts.coherence_convention
        return Bound(name, lambda x: highdim.coherence_values(x, regime, conv), "lower",
                     asymptotic=nulldist.ExtremeValue(regime),
                     config={"regime": str(regime), "convention": conv})
    raise ValueError(f"unknown test id {test_id!r}")


@dataclass(frozen=True)
class _ScaledKolmogorov(NullLaw):
    """KS distance ``d`` through ``sqrt(n) d -> Kolmogorov``."""

    n: int = 1
    kind = "kolmogorov"

    def sf(self, x):
        return projection.ks_pvalue(x, self.n)

    def describe(self):
        return f"kolmogorov(sqrt(n)*d, n={self.n})"


CIRCULAR_IDS = ("kuiper", "watson", "hodges-ajne", "range", "rao", "greenwood", "rothman",
                "hermans-rasson", "pycke")
SPHERE_IDS = ("rayleigh", "ajne", "bingham", "gine-g", "gine-f", "jupp", "projection")
HIGHDIM_IDS = ("rayleigh-hd", "coherence")
ALL_IDS = CIRCULAR_IDS + SPHERE_IDS + HIGHDIM_IDS


def expand_ids(spec: str, p: int, highdim_ok: bool = False) -> list[str]:
    """Split a comma list; ``all`` expands to every test applicable at ``p``."""
    out = []
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            raise ValueError("empty test id")
        if tok == "all":
            ids = (CIRCULAR_IDS if p == 2 else ()) + SPHERE_IDS
            out.extend(ids + (HIGHDIM_IDS if highdim_ok else ()))
        else:
            name = tok.partition(":")[0]
            if name not in ALL_IDS and name != "sobolev":
                raise ValueError(f"unknown test id {tok!r}")
            out.append(tok)
    return out


# ---------------------------------------------------------------- running


def resolve_method(b: Bound, requested: str) -> tuple[str, NullLaw | None, list]:
    """Pick the p-value route; unavailable requests fall back to Monte Carlo."""
    if requested not in METHODS:
        raise ValueError(f"unknown p-value method {requested!r}")
    notes = []
    if requested == "auto":
        if b.exact is not None:
            return "exact", b.exact, notes
        if b.asymptotic is not None and b.auto_asymptotic:
            return "asymptotic", b.asymptotic, notes
        return "mc", None, notes
    if requested == "mc":
        return "mc", None, notes
    law = b.exact if requested == "exact" else b.asymptotic
    if law is None:
        notes.append(f"no {requested} law for {b.id}; used Monte Carlo")
        return "mc", None, notes
    return requested, law, notes


def run_test(x, test_id: str, method: str = "auto", opts: TestOptions = TestOptions(),
             alpha: float | None = None) -> TestOutcome:
    """Run one named test on one sample."""
    sample = x if isinstance(x, DirectionalSample) else DirectionalSample(x)
    pts = sample.points
    n, p = pts.shape
    b = bind(test_id, n, p, opts)
    route, law, notes = resolve_method(b, method)
    config = dict(b.config)
    pvalue = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if b.id == "coherence":
            res = highdim.coherence_statistic(pts, b.asymptotic.regime,
                                              opts.coherence_convention)
            statistic = res.statistic
            config["coherence"] = res.coherence
            if res.degenerate:
                route, pvalue = "asymptotic", 0.0
                config["law"] = b.asymptotic.describe()
                config["degenerate"] = True
        else:
            statistic = float(b.statistic(pts))
        if b.id == "jupp":
            jr = sobolev.jupp_data_driven(pts, opts.jupp_max_order)
            config["order"] = int(jr.order)
            if jr.truncated:
                notes.append(f"jupp order selection hit the cap {opts.jupp_max_order}")
        if pvalue is not None:
            pass
        elif route == "mc":
            cfg = McConfig(opts.mc_replicates, opts.seed, opts.workers,
                           _cache_id(b), opts.null_cache)
            pvalue = mc_pvalue(pts, b.statistic, cfg, b.tail).pvalue
            config["mc_replicates"] = opts.mc_replicates
            config["seed"] = opts.seed
            config["tail"] = b.tail
        else:
            pvalue = float(law.pvalue(statistic))
            config["law"] = law.describe()
            config["tail"] = law.tail
    for w in caught:
        notes.append(str(w.message))
    pvalue = float(min(1.0, max(0.0, pvalue)))
    if alpha is not None:
        config["alpha"] = alpha
        config["reject"] = bool(pvalue <= alpha)
    return TestOutcome(b.id, float(statistic), pvalue, METHOD_LABELS[route], n, p, config, notes)


def _cache_id(b: Bound) -> str:
    extra = ",".join(f"{k}={v}" for k, v in sorted(b.config.items()))
    return f"{b.id}[{extra}]" if extra else b.id


# ---------------------------------------------------------------- studies


def _inner_seed(seed: int, r: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(_INNER_STREAM, r))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def study_pvalue_function(cell, seed: int, opts: TestOptions = TestOptions(),
                          method: str = "auto", inner: int = STUDY_INNER_REPLICATES):
    """Block p-value function for a level/power cell.

    Tests whose default route is Monte Carlo get a fresh inner simulation of
    ``inner`` replicates per outer dataset, seeded from the outer index; any
    direction-dependent test also redraws its directions from that seed.
    """
    n, p = cell.n, cell.p
    b0 = bind(cell.test, n, p, opts)
    route, law, _ = resolve_method(b0, method)

    if route != "mc":
        def block(data, first):
            return np.asarray(law.pvalue(np.asarray(b0.statistic(data))), dtype=float)
        return block

    def block(data, first):
        out = np.empty(data.shape[0])
        for i, x in enumerate(data):
            s = _inner_seed(seed, first + i)
            b = bind(cell.test, n, p, replace(opts, seed=s)) if cell.test.startswith(
                "projection") else b0
            obs = float(b.statistic(x))
            draws = simulate(b.statistic, n, p, inner, s)
            out[i] = tail_pvalue(obs, draws, b.tail)[1]
        return out

    return block
