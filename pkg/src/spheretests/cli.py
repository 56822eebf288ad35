"""Command-line interface: ``spheretests {test,power,sample,null}``.

Exit status is 0 when a command ran (whatever the test decisions) and 2 on
usage or input errors, with a one-line diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import nulldist
from .catalog import METHODS, TestOptions, bind, expand_ids, run_test
from .highdim import parse_regime
from .montecarlo import StudyCell, level_power_study
from .sample import FORMATS, DirectionalSample, SampleError, format_sample, ingest
from .samplers import FAMILIES, AlternativeSpec, parse_alternative, rng_from

LAWS = ("kolmogorov", "kuiper", "watson", "ajne", "hodges-ajne", "range", "normal", "chisq",
        "extreme-value")


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return "%.17g" % x


def to_json(obj) -> str:
    """JSON with floats at 17 significant digits; non-finite floats become null."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(float(obj)) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{to_json(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _int_list(text: str, what: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None
    return vals


def _float_list(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None


def _options(a) -> TestOptions:
    parse_regime(a.regime)  # validate early
    return TestOptions(k=a.k, regime=a.regime, greenwood_tail=a.greenwood_tail,
                       rao_normal=a.rao_normal, jupp_max_order=a.jupp_max_order,
                       hr_constant_free=a.hr_constant_free,
                       coherence_convention=a.coherence_convention,
                       mc_replicates=a.mc_replicates, seed=a.seed, workers=a.workers,
                       null_cache=getattr(a, "null_cache", None))


def cmd_test(a, out) -> None:
    sample = ingest(a.input, a.format, renormalize=a.renormalize)
    opts = _options(a)
    ids = expand_ids(a.test, sample.dim, a.highdim)
    # bind everything first so a bad id fails before any work is done
    for tid in ids:
        bind(tid, sample.n, sample.dim, opts)
    results = [run_test(sample, tid, a.pvalue, opts, a.alpha).as_dict() for tid in ids]
    out.write("[\n" + ",\n".join("  " + to_json(r) for r in results) + "\n]\n")


def cmd_power(a, out) -> None:
    opts = _options(a)
    tests = [t.strip() for t in a.tests.split(",")]
    try:
        alts = [parse_alternative(s) for s in a.alternatives.split(",")]
    except ValueError as e:
        raise UsageError(str(e)) from None
    ns = _int_list(a.n, "n")
    ps = _int_list(a.p, "p")
    alphas = _float_list(a.alpha, "alpha")
    if any(not 0 < x < 1 for x in alphas):
        raise UsageError("alpha must lie in (0, 1)")
    cells = []
    for t in tests:
        for alt in alts:
            for n in ns:
                for p in ps:
                    try:
                        bind(t, n, p, opts)
                        if alt.circular_only and p != 2:
                            raise SampleError(f"{alt.family} requires p=2")
                    except SampleError as e:
                        print(f"skipped {t} / {alt} / n={n} / p={p}: {e}", file=sys.stderr)
                        continue
                    cells.extend(StudyCell(t, alt, n, p, al) for al in alphas)
    if not cells:
        raise UsageError("power grid has no applicable cells")
    from .catalog import study_pvalue_function

    rows = level_power_study(
        cells, a.replicates, a.seed, a.workers,
        lambda cell, s: study_pvalue_function(cell, s, opts, a.pvalue))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["test", "alternative", "n", "p", "alpha", "replicates", "rejections", "rate",
                "se"])
    for r in rows:
        c = r.cell
        w.writerow([c.test, str(c.alternative), c.n, c.p, fmt(c.alpha), r.replicates,
                    r.rejections, fmt(r.rate), fmt(r.se)])


def _mu(text, p):
    if text is None:
        return None
    vals = _float_list(text, "mu")
    if len(vals) == 1 and p == 2:
        return (math.cos(vals[0]), math.sin(vals[0]))
    if len(vals) != p:
        raise UsageError(f"--mu needs {p} components (or one angle when p=2)")
    v = np.asarray(vals)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise UsageError("--mu must be nonzero")
    return tuple(v / norm)


def cmd_sample(a, out) -> None:
    if a.n < 1 or a.p < 2:
        raise UsageError("need --n >= 1 and --p >= 2")
    mu = _mu(a.mu, a.p)
    if a.family == "mixture8":
        base = parse_alternative(a.base)
        spec = AlternativeSpec("mixture8", mix=a.mix, mu=mu, base=base)
    else:
        spec = AlternativeSpec(a.family, kappa=a.kappa, rho=a.rho, mu=mu)
    pts = spec.draw(rng_from(a.seed), a.n, a.p)
    text = format_sample(DirectionalSample(pts), a.format)
    if a.out in (None, "-"):
        out.write(text)
    else:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _law(a) -> nulldist.NullLaw:
    name = a.law
    if name == "kolmogorov":
        return nulldist.Kolmogorov()
    if name == "kuiper":
        return nulldist.KuiperSeries(a.n)
    if name == "watson":
        return nulldist.WatsonAsym()
    if name == "ajne":
        return nulldist.AjneSeries()
    if name == "hodges-ajne":
        return nulldist.HodgesAjneAsym()
    if name == "range":
        if a.n is None or a.n < 2:
            raise UsageError("range law needs --n >= 2")
        return nulldist.RangeExact(a.n)
    if name == "normal":
        if a.variance <= 0:
            raise UsageError("--variance must be positive")
        return nulldist.Normal(a.mean, a.variance, "upper")
    if name == "chisq":
        if a.df is None or a.df <= 0:
            raise UsageError("chisq law needs --df > 0")
        return nulldist.ChiSq(a.df)
    regime = parse_regime(a.regime) or nulldist.Regime("sub")
    return nulldist.ExtremeValue(regime)


def cmd_null(a, out) -> None:
    law = _law(a)
    if not a.step > 0 or not math.isfinite(a.step):
        raise UsageError("--step must be positive")
    if a.to < a.start:
        raise UsageError("--to must be at least --from")
    count = int(math.floor((a.to - a.start) / a.step + 1e-9)) + 1
    if count > 10_000_000:
        raise UsageError("grid too large")
    xs = a.start + a.step * np.arange(count)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "cdf", "upper_tail"])
    for x in xs:
        sf = float(law.sf(float(x)))
        cdf = float(law.cdf(float(x)))
        w.writerow([fmt(float(x)), fmt(min(1.0, max(0.0, cdf))), fmt(min(1.0, max(0.0, sf)))])


def _add_test_options(sp):
    sp.add_argument("--pvalue", choices=METHODS, default="auto")
    sp.add_argument("--mc-replicates", type=int, default=999)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--k", type=int, default=None, help="number of random projections")
    sp.add_argument("--regime", default="auto", help="auto, sub, exp:<beta> or super")
    sp.add_argument("--greenwood-tail", choices=("two-sided", "upper", "lower"),
                    default="two-sided")
    sp.add_argument("--rao-normal", action="store_true",
                    help="use the normal approximation for Rao's test under --pvalue auto")
    sp.add_argument("--jupp-max-order", type=int, default=25)
    sp.add_argument("--hr-constant-free", action="store_true")
    sp.add_argument("--coherence-convention", choices=("columns", "rows"), default="columns")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spheretests",
                                 description="Uniformity tests on the circle and hypersphere.")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run tests on a data file and print JSON")
    t.add_argument("--input", required=True)
    t.add_argument("--format", choices=FORMATS, default="vectors")
    t.add_argument("--test", default="all", help="comma-separated test ids, or all")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--highdim", action="store_true",
                   help="include rayleigh-hd and coherence in --test all")
    t.add_argument("--renormalize", action="store_true")
    t.add_argument("--null-cache", default=None, help="file for reusable Monte Carlo null draws")
    _add_test_options(t)

    pw = sub.add_parser("power", help="level/power table as CSV")
    pw.add_argument("--tests", required=True)
    pw.add_argument("--alternatives", default="uniform")
    pw.add_argument("--n", default="100")
    pw.add_argument("--p", default="3")
    pw.add_argument("--alpha", default="0.05")
    pw.add_argument("--replicates", type=int, default=1000)
    _add_test_options(pw)

    s = sub.add_parser("sample", help="draw a sample")
    s.add_argument("--family", choices=FAMILIES, default="uniform")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, default=3)
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--rho", type=float, default=0.5)
    s.add_argument("--mix", type=float, default=0.5)
    s.add_argument("--base", default="vmf:1", help="mixture8 base family, vmf:K or cardioid:R")
    s.add_argument("--mu", default=None, help="mean direction (comma list, or one angle for p=2)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=FORMATS, default="vectors")

    nl = sub.add_parser("null", help="tabulate a null law as CSV")
    nl.add_argument("--law", choices=LAWS, required=True)
    nl.add_argument("--from", dest="start", type=float, required=True)
    nl.add_argument("--to", type=float, required=True)
    nl.add_argument("--step", type=float, required=True)
    nl.add_argument("--n", type=int, default=None)
    nl.add_argument("--df", type=float, default=None)
    nl.add_argument("--mean", type=float, default=0.0)
    nl.add_argument("--variance", type=float, default=1.0)
    nl.add_argument("--regime", default="sub")
    return ap


COMMANDS = {"test": cmd_test, "power": cmd_power, "sample": cmd_sample, "null": cmd_null}


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    for name in ("mc_replicates", "workers", "replicates", "jupp_max_order"):
        v = getattr(a, name, None)
        if v is not None and v < 1:
            ap.error(f"--{name.replace('_', '-')} must be positive")
    if getattr(a, "mc_replicates", 999) < 99:
        ap.error("--mc-replicates must be at least 99")
    if getattr(a, "seed", 0) < 0:
        ap.error("--seed must be nonnegative")
    if a.command == "test" and not 0 < a.alpha < 1:
        ap.error("--alpha must lie in (0, 1)")
    buf = io.StringIO()
    try:
        COMMANDS[a.command](a, buf)
    except (UsageError, SampleError, ValueError, OSError) as e:
        print(f"spheretests {a.command}: error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
