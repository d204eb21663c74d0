import json
import math
import os
import pathlib
import subprocess

import numpy as np
import pytest

import fgscan

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "tests" / "data"
SCHEMAS = ROOT / "schemas"
CLI = os.environ.get("FGSCAN_CLI") or None

BETA1 = [0.4, -0.4, 0.0, -0.5, 0.0, 0.6, 0.75, 0.0, 0.0, -0.8]
BETA2 = [-b for b in BETA1]


@pytest.fixture(scope="module")
def sample():
    ds, _ = fgscan.simulate(300, BETA1, BETA2, seed=5)
    return ds


def test_three_subject_toy():
    ds = fgscan.Dataset.from_csv(str(DATA / "three.csv"))
    assert (ds.n, ds.p) == (3, 1)
    out = fgscan.scan(ds, np.zeros(1))
    ref = fgscan.brute_force(ds, np.zeros(1))
    assert out["loglik"] == pytest.approx(ref["loglik"], abs=1e-12)
    assert np.allclose(out["gradient"], ref["gradient"], atol=1e-12)


def test_dataset_from_arrays_sorts_descending():
    ds = fgscan.Dataset([1.0, 3.0, 2.0], [1, 0, 2], np.array([[0.1], [0.2], [0.3]]))
    assert list(ds.time) == [3.0, 2.0, 1.0]
    assert ds.counts == {"censored": 1, "cause1": 1, "cause2": 1}
    with pytest.raises(ValueError):
        fgscan.Dataset([1.0, -1.0], [1, 0], np.zeros((2, 1)))


def test_simulate_reproducible():
    a, ra = fgscan.simulate(200, BETA1, BETA2, seed=9)
    b, rb = fgscan.simulate(200, BETA1, BETA2, seed=9)
    assert ra == rb
    assert np.array_equal(a.time, b.time)
    assert np.array_equal(a.covariates, b.covariates)


def test_scan_matches_brute_force(sample):
    beta = np.linspace(-0.3, 0.3, sample.p)
    fast = fgscan.scan(sample, beta)
    slow = fgscan.brute_force(sample, beta)
    assert fast["loglik"] == pytest.approx(slow["loglik"], rel=1e-10)
    assert np.allclose(fast["gradient"], slow["gradient"], rtol=1e-9, atol=1e-9)
    assert np.allclose(fast["hessian_diag"], slow["hessian_diag"], rtol=1e-9, atol=1e-9)


def test_fit_engines_agree(sample):
    a = fgscan.fit(sample)
    b = fgscan.fit(sample, engine="naive")
    assert a["converged"] and b["converged"]
    assert np.max(np.abs(a["coefficients"] - b["coefficients"])) < 1e-6
    assert fgscan.scan(sample, a["coefficients"])["loglik"] >= a["null_loglik"]


def test_fit_variance_independent_of_jobs(sample):
    one = fgscan.fit(sample, variance=True, B=15, seed=4, jobs=1)
    three = fgscan.fit(sample, variance=True, B=15, seed=4, jobs=3)
    assert np.array_equal(one["covariance"], three["covariance"])
    assert np.all(one["lower"] < one["coefficients"]) and np.all(one["coefficients"] < one["upper"])


def test_penfit_path_shape(sample):
    path = fgscan.penfit(sample, "lasso", lambdas=[1.0, 0.1, 0.01])
    assert path["coefficients"].shape == (sample.p, 3)
    assert np.all(path["coefficients"][:, 0] == 0.0)
    assert path["df"][0] <= path["df"][-1]
    with pytest.raises(ValueError):
        fgscan.penfit(sample, "elastic")


def test_cif_single_event():
    ds = fgscan.Dataset.from_csv(str(DATA / "single_event.csv"))
    out = fgscan.cif(ds, [0.0], 0.5, 1.0, B=10)
    assert out["grid_estimate"][0] == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)
    assert out["lower"][0] == pytest.approx(out["upper"][0], abs=1e-12)
    with pytest.raises(ValueError):
        fgscan.cif(ds, [0.0], 0.9, 0.2)


def test_cif_band_contains_pointwise(sample):
    out = fgscan.cif(sample, np.zeros(sample.p), 0.05, 0.5, B=40, band=True)
    lo, hi = np.array(out["lower"]), np.array(out["upper"])
    blo, bhi = np.array(out["band_lower"]), np.array(out["band_upper"])
    assert np.all(blo <= lo + 1e-12) and np.all(hi <= bhi + 1e-12)
    assert np.all(np.diff(out["estimate"]) >= 0)


def _cli(*args, cwd):
    return subprocess.run([CLI, *args], cwd=cwd, capture_output=True, text=True)


def _schema(name):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    return lambda doc: jsonschema.validate(doc, schema)


@pytest.mark.skipif(CLI is None, reason="command-line tool not built")
def test_cli_reports_match_schemas(tmp_path):
    b1 = ",".join(map(str, BETA1))
    b2 = ",".join(map(str, BETA2))
    runs = {
        "simulate": ["simulate", "--n", "200", "--beta1", b1, "--beta2", b2, "--out", "d.csv"],
        "fit": ["fit", "--data", "d.csv", "--variance", "--B", "10"],
        "penfit": ["penfit", "--data", "d.csv", "--penalty", "mcp", "--out", "p.csv"],
        "cif": ["cif", "--data", "d.csv", "--z0", ",".join(["0"] * 10), "--tl", "0.05", "--tu", "0.5",
                "--B", "20", "--band", "--out", "c.csv"],
        "bench": ["bench", "--sizes", "200,400", "--p", "4", "--engine", "both", "--out", "b.csv"],
    }
    for name, args in runs.items():
        res = _cli(*args, cwd=tmp_path)
        assert res.returncode == 0, res.stderr
        _schema(name)(json.loads(res.stdout))


@pytest.mark.skipif(CLI is None, reason="command-line tool not built")
def test_cli_error_body_and_exit_codes(tmp_path):
    check = _schema("error")
    res = _cli("fit", "--data", "absent.csv", cwd=tmp_path)
    assert res.returncode == 1
    check(json.loads(res.stdout))
    res = _cli("cif", "--data", str(DATA / "single_event.csv"), "--z0", "0", "--tl", "0.9", "--tu", "0.2",
               "--out", "c.csv", cwd=tmp_path)
    assert res.returncode == 2
    assert json.loads(res.stdout)["error"]["kind"] == "usage"
