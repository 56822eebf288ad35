import csv
import io
import json
import math

import numpy as np
import pytest

from spheretests.cli import main, to_json
from spheretests.samplers import draw_uniform

FIELDS = {"test", "statistic", "p_value", "p_value_method", "n", "p", "config", "warnings"}


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as e:  # argparse usage errors
        code = e.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def sphere_file(tmp_path):
    path = tmp_path / "s3.txt"
    np.savetxt(path, draw_uniform(np.random.default_rng(0), 40, 3))
    return str(path)


@pytest.fixture
def circle_file(tmp_path):
    path = tmp_path / "c.txt"
    np.savetxt(path, np.random.default_rng(1).random(30) * 360)
    return str(path)


def test_json_schema_and_rayleigh_law(capsys, sphere_file):
    code, out, _ = run(capsys, "test", "--input", sphere_file, "--test", "rayleigh")
    assert code == 0
    (rec,) = json.loads(out)
    assert set(rec) == FIELDS
    assert rec["p_value_method"] == "asymptotic"
    assert rec["config"]["law"] == "chisq(df=3)"
    assert (rec["n"], rec["p"]) == (40, 3)


def test_circular_test_on_sphere_is_an_error(capsys, sphere_file):
    code, out, err = run(capsys, "test", "--input", sphere_file, "--test", "pycke")
    assert code == 2 and out == ""
    assert "pycke requires p=2" in err


def test_all_on_circle_in_degrees(capsys, circle_file):
    code, out, _ = run(capsys, "test", "--input", circle_file, "--format", "angles-deg",
                       "--test", "all", "--mc-replicates", "99")
    assert code == 0
    recs = json.loads(out)
    ids = {r["test"] for r in recs}
    assert {"kuiper", "watson", "range", "rayleigh", "pycke"} <= ids
    assert "coherence" not in ids
    assert all(0 <= r["p_value"] <= 1 for r in recs)


def test_sample_then_test_round_trip(capsys, tmp_path):
    path = tmp_path / "v.txt"
    code, _, _ = run(capsys, "sample", "--family", "vmf", "--kappa", "3", "--n", "60",
                     "--p", "4", "--seed", "5", "--out", str(path))
    assert code == 0
    pts = np.loadtxt(path, delimiter=",")
    assert pts.shape == (60, 4)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1, atol=1e-12)
    code, out, _ = run(capsys, "test", "--input", str(path), "--test", "rayleigh,bingham")
    rayleigh = json.loads(out)[0]
    assert rayleigh["p_value"] < 1e-6


def test_null_output_is_monotone(capsys):
    code, out, _ = run(capsys, "null", "--law", "kolmogorov", "--from", "0.2", "--to", "2",
                       "--step", "0.1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    cdf = np.array([float(r["cdf"]) for r in rows])
    up = np.array([float(r["upper_tail"]) for r in rows])
    assert len(rows) == 19
    assert np.all(np.diff(cdf) >= 0)
    np.testing.assert_allclose(cdf + up, 1, atol=1e-12)


def test_power_on_uniform(capsys):
    code, out, _ = run(capsys, "power", "--tests", "rayleigh", "--alternatives", "uniform",
                       "--n", "30", "--p", "3", "--replicates", "800")
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert int(row["replicates"]) == 800
    assert abs(float(row["rate"]) - 0.05) <= 3 * math.sqrt(0.05 * 0.95 / 800)


def test_power_skips_inapplicable_cells(capsys):
    code, out, err = run(capsys, "power", "--tests", "kuiper,rayleigh", "--n", "20",
                         "--p", "3", "--replicates", "100")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["test"] for r in rows] == ["rayleigh"]
    assert "kuiper" in err


@pytest.mark.parametrize("argv", [
    ["test"],
    ["test", "--input", "/nonexistent/file"],
    ["test", "--input", "{f}", "--test", "nope"],
    ["test", "--input", "{f}", "--alpha", "1.5"],
    ["test", "--input", "{f}", "--mc-replicates", "10", "--pvalue", "mc"],
    ["test", "--input", "{f}", "--regime", "exp:abc"],
    ["power", "--tests", "rayleigh", "--n", "ten"],
    ["power", "--tests", "rayleigh", "--alternatives", "vmf"],
    ["sample", "--n", "5", "--family", "cardioid", "--p", "3"],
    ["null", "--law", "chisq", "--from", "0", "--to", "1", "--step", "0.5"],
    ["null", "--law", "kolmogorov", "--from", "0", "--to", "1", "--step", "0"],
    ["bogus"],
])
def test_bad_arguments_exit_2(capsys, sphere_file, argv):
    argv = [a.replace("{f}", sphere_file) for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "error" in err


def test_unavailable_method_falls_back_to_mc(capsys, sphere_file):
    code, out, _ = run(capsys, "test", "--input", sphere_file, "--test", "gine-g",
                       "--pvalue", "exact", "--mc-replicates", "99")
    (rec,) = json.loads(out)
    assert rec["p_value_method"] == "monte-carlo"
    assert any("exact" in w for w in rec["warnings"])


def test_null_cache_reuse(capsys, sphere_file, tmp_path):
    cache = tmp_path / "null.bin"
    args = ("test", "--input", sphere_file, "--test", "gine-f", "--mc-replicates", "199",
            "--null-cache", str(cache))
    _, first, _ = run(capsys, *args)
    assert cache.is_file()
    stamp = cache.stat().st_mtime_ns
    _, second, _ = run(capsys, *args)
    assert first == second
    assert cache.stat().st_mtime_ns == stamp


def test_json_float_format():
    assert to_json({"a": 0.1, "b": float("nan"), "c": [1, math.inf]}) == \
        '{"a": 0.10000000000000001, "b": null, "c": [1, null]}'
