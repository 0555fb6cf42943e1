import json
import math
import subprocess
import sys

import numpy as np
import pytest

from curlspec.cli import run
from curlspec.spectrum import spectrum_from_json


def ok(argv):
    code, out, err = run(argv)
    assert code == 0, err
    return out


def lines_of(out):
    return [(l["lambda_float"], l["multiplicity"]) for l in json.loads(out)["lines"]]


def test_spaceform_lens():
    doc = json.loads(ok(["spaceform", "--angles", "3:1,1", "--kmax", "0"]))
    assert [(l["lambda_exact"], l["multiplicity"]) for l in doc["lines"]] == [("-2", 3), ("2", 1)]
    assert doc["symmetric"] is False
    assert doc["group_order"] == 3


def test_sphere_and_torus():
    assert lines_of(ok(["sphere", "--n", "3", "--kmax", "1"])) == [(-3, 8), (-2, 3), (2, 3), (3, 8)]
    doc = json.loads(ok(["torus", "--basis", "identity3", "--lmax", "7"]))
    assert [(l["lambda_exact"], l["multiplicity"], l["shell_norm_sq"]) for l in doc["lines"]] == [
        ("-2*pi", 6, "1"),
        ("2*pi", 6, "1"),
    ]


def test_json_output_roundtrips():
    out = ok(["torus", "--basis", "identity3", "--lmax", "20"])
    spec = spectrum_from_json(out)
    assert spec.multiplicity(2 * math.pi * math.sqrt(2)) == 12


def test_csv():
    out = ok(["sphere", "--n", "5", "--kmax", "0", "--format", "csv"])
    assert out.splitlines() == ["lambda,multiplicity", "-3.0,10", "3.0,10"]


def test_matrices_file(tmp_path):
    path = tmp_path / "rp3.json"
    path.write_text(json.dumps({"type": "matrices", "generators": [(-np.eye(4)).ravel().tolist()]}))
    doc = json.loads(ok(["spaceform", "--matrices", str(path), "--kmax", "2"]))
    assert doc["symmetric"] is True
    assert (doc["multiplicity_at_2"], doc["multiplicity_at_minus_2"]) == (3, 3)


def test_analysis_commands():
    weyl = json.loads(ok(["weyl", "--n", "3", "--kmax", "100"]))
    assert weyl["coefficient_exact"] == "1/3"
    zeta = json.loads(ok(["zeta", "--basis", "identity3", "--lmax", "30", "--s", "4"]))
    assert (zeta["zeta_at_zero"], zeta["semi_characteristic"]) == (-2, 0)
    eta = json.loads(ok(["eta", "--angles", "3:1,1", "--kmax", "0", "--s", "4"]))
    assert eta["eta_partial"] == -2 * 2**-4
    bounds = json.loads(ok(["bounds", "--n", "3", "--kmax", "3", "--kind", "ricci-3d"]))
    assert bounds["pass"] and bounds["attained"]
    cross = json.loads(ok(["crosscheck", "--basis", "identity5", "--lmax", "6.3"]))
    assert cross["ok"] and cross["lhs"] == 60
    cross = json.loads(ok(["crosscheck", "--angles", "5:1,2", "--kmax", "12"]))
    assert cross["ok"]
    cross = json.loads(ok(["crosscheck", "--n", "3", "--kmax", "10"]))
    assert cross["ok"]


@pytest.mark.parametrize(
    "argv,code",
    [
        (["sphere", "--n", "4", "--kmax", "1"], 2),
        (["torus", "--basis", "identity3"], 2),
        (["sphere", "--n", "3", "--basis", "identity3"], 2),
        (["spaceform", "--angles", "3:1,0", "--kmax", "1"], 2),
        (["spaceform", "--angles", "1000:1,3", "--kmax", "1"], 0),
        (["zeta", "--n", "3", "--kmax", "5", "--s", "2"], 2),
        (["bogus"], 2),
        (["torus", "--basis", "identity5", "--lmax", "1e6"], 4),
        (["spaceform", "--angles", "3:1,1", "--format", "xml"], 2),
    ],
)
def test_exit_codes(argv, code):
    got, out, err = run(argv)
    assert got == code
    if code:
        record = json.loads(err)
        assert record["exit_code"] == code and record["message"]
        assert out == ""


def test_deterministic():
    argv = ["spaceform", "--angles", "7:1,3", "--kmax", "10"]
    assert ok(argv) == ok(argv)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "curlspec", "sphere", "--n", "3", "--kmax", "0"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["lines"][0]["multiplicity"] == 3
    proc = subprocess.run([sys.executable, "-m", "curlspec", "sphere", "--n", "2"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]
