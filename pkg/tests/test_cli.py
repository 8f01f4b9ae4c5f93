import io
import json
import subprocess
import sys

import pytest

from higherwp.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_coeffs_rows():
    code, text = run("coeffs", "--alpha", "0", "--order", "1")
    assert code == 0
    assert "A_1 = 5/3*s1" in text.splitlines()
    code, text = run("coeffs", "--alpha", "1", "--order", "1")
    assert "C_-1 = 7/120*s1" in text.splitlines()
    code, text = run("coeffs", "--alpha", "0", "--order", "5")
    row = next(line for line in text.splitlines() if line.startswith("A_5 ="))
    assert "1/495*s5" in row


def test_coeffs_json_schema():
    code, text = run("coeffs", "--alpha", "0", "--order", "2", "--format", "json")
    data = json.loads(text)
    assert data["schema"] == "higherwp/1"
    a1 = next(c for c in data["coefficients"] if c["name"] == "A_1")
    assert a1["terms"] == [{"monomial": {"s1": 1}, "coeff": "5/3"}]


def test_intersect_needs_cache(capsys):
    code, _ = run("intersect", "--alpha", "1", "--psi", "0,0,0")
    assert code == 2
    assert "--max-level 1" in capsys.readouterr().err


@pytest.mark.parametrize("alpha,psi,kappa,value,genus", [
    ("1", "0,0,0", None, "1", "0"),
    ("1", "1", None, "1/24", "1"),
    ("0", "0", None, "1/8", "1"),
    ("1", "0", "1", "1/24", "1"),
])
def test_intersect_after_tau(alpha, psi, kappa, value, genus):
    assert run("tau", "--alpha", alpha, "--max-level", "2", "--s-degree", "1")[0] == 0
    argv = ["intersect", "--alpha", alpha, "--psi", psi, "--format", "json"]
    if kappa:
        argv += ["--kappa", kappa]
    code, text = run(*argv)
    data = json.loads(text)
    assert code == 0
    assert (data["value"], data["genus"], data["status"]) == (value, genus, "ok")


def test_intersect_dimension_mismatch():
    code, text = run("intersect", "--alpha", "1", "--psi", "0,0")
    assert code == 0
    assert "value = 0" in text and "dimension mismatch" in text


def test_rejects_bad_indices(capsys):
    assert run("intersect", "--psi", "0,-1")[0] == 2
    assert run("intersect", "--kappa", "0")[0] == 2
    assert run("volume", "--genus", "0", "--npoints", "2")[0] == 2


def test_volume_text_and_csv(tmp_path):
    cache = str(tmp_path / "c")
    run("tau", "--alpha", "1", "--max-level", "1", "--s-degree", "1", "--cache", cache)
    code, text = run("volume", "--alpha", "1", "--genus", "1", "--npoints", "1", "--cache", cache)
    assert code == 0 and text == "V[1]_{1,1} = 1/48*L1sq + 1/12*pi2\n"
    code, text = run("volume", "--alpha", "1", "--genus", "1", "--npoints", "1", "--cache", cache,
                     "--format", "csv")
    assert text.splitlines() == ["pi2,L1sq,coeff", "0,1,1/48", "1,0,1/12"]


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "virasoro", "--alpha", "1", "--max-level", "4"],
    ["verify", "--suite", "dual", "--alpha", "0", "--max-level", "3"],
    ["verify", "--suite", "translation", "--alpha", "1", "--max-level", "2", "--s-degree", "2"],
    ["verify", "--suite", "closedform"],
])
def test_verify_suites_pass(argv):
    code, text = run(*argv, "--format", "json")
    assert code == 0
    assert json.loads(text)["passed"] is True


def test_output_is_byte_stable(tmp_path):
    argv = ["tau", "--alpha", "1", "--max-level", "3", "--s-degree", "2", "--cache", str(tmp_path), "--format", "json"]
    first = run(*argv)[1]
    second = run(*argv)[1]  # served from the cache
    assert first == second


def test_only_tau_writes_cache(tmp_path):
    cache = tmp_path / "c"
    run("verify", "--suite", "dual", "--max-level", "2", "--cache", str(cache))
    run("intersect", "--psi", "1", "--cache", str(cache))
    assert not cache.exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "higherwp", "coeffs", "--alpha", "0", "--order", "1"],
                          capture_output=True, text=True, check=True)
    assert "A_1 = 5/3*s1" in proc.stdout
