import json
import subprocess
import sys

import pytest

from jacobilift.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_basis_dimensions(capsys):
    code, out, _ = run(capsys, "basis", "--m", "1", "--n", "1", "--d", "2", "--S", "1")
    assert code == 0 and json.loads(out)["dimension"] == 0
    code, out, _ = run(capsys, "basis", "--m", "2", "--n", "1", "--d", "3", "--S", "identity")
    data = json.loads(out)
    assert code == 0 and data["dimension"] == 2 and data["order"] == "grlex"


@pytest.mark.parametrize("S", ["[[1, 2]]", "[[1, 2], [2, 1]]", "not-json", "[[0]]"])
def test_basis_bad_S_exit_2(capsys, S):
    code, _, err = run(capsys, "basis", "--m", "2", "--d", "1", "--S", S)
    assert code == 2 and err.startswith("error:")


def test_basis_from_file(capsys, tmp_path):
    f = tmp_path / "S.json"
    f.write_text(json.dumps({"S": [["2", "1"], ["1", "2"]]}))
    code, out, _ = run(capsys, "basis", "--m", "2", "--d", "2", "--S", str(f))
    assert code == 0 and json.loads(out)["dimension"] == 2


def test_theta_cusp(capsys):
    code, out, _ = run(capsys, "theta", "--Z", "100i", "--W", "0")
    data = json.loads(out)
    assert code == 0 and abs(data["value"][0] - 1) < 1e-12 and set(data) == {"value", "tail_bound", "terms_used"}


def test_theta_radius_self_convergence(capsys):
    _, a, _ = run(capsys, "theta", "--Z", "i", "--W", "0", "--radius", "20")
    _, b, _ = run(capsys, "theta", "--Z", "i", "--W", "0", "--radius", "30")
    a, b = json.loads(a), json.loads(b)
    diff = abs(complex(*a["value"]) - complex(*b["value"]))
    assert diff <= a["tail_bound"] + 1e-15


def test_theta_bad_lattice_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([[1, 0], [0, 1]]))
    assert run(capsys, "theta", "--lattice", str(bad))[0] == 2


def test_theta_truncation_exit_3(capsys):
    assert run(capsys, "theta", "--Z", "i", "--radius", "2")[0] == 3


def test_verify_main_theorem(capsys):
    code, out, _ = run(capsys, "verify", "main-theorem", "--form", "theta-e8", "--d", "1", "--tol", "1e-6")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(capsys, "verify", "main-theorem", "--form", "theta-e8", "--weight-off-by-one")
    assert code == 1 and json.loads(out)["pass"] is False


def test_verify_lemma43(capsys):
    code, out, _ = run(capsys, "verify", "lemma43", "--trials", "100", "--seed", "7")
    data = json.loads(out)
    assert code == 0 and data["max_residual"] < 1e-10 and data["metadata"]["seed"] == 7


@pytest.mark.parametrize("argv", [
    ["verify", "cocycle", "--trials", "10"],
    ["verify", "cocycle", "--n", "2", "--m", "2", "--trials", "5"],
    ["verify", "jacobi-invariance"],
    ["verify", "identity-I"],
    ["verify", "identity-II", "--cmax", "16", "--lmax", "10"],
    ["verify", "identity-II", "--cmax", "16", "--lmax", "10", "--direct"],
    ["verify", "jacobi-invariance", "--form", "eisenstein", "--cmax", "32", "--lmax", "12", "--tol", "1e-6"],
])
def test_verify_subtests_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out


def test_verify_invariance_negative_control(capsys):
    assert run(capsys, "verify", "jacobi-invariance", "--weight-off-by-one")[0] == 1


def test_unknown_subtest_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2


def test_out_file_and_determinism(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, out, _ = run(capsys, "verify", "lemma43", "--trials", "20", "--seed", "3", "--out", str(p))
        assert code == 0 and out.startswith("PASS")
    assert paths[0].read_bytes() == paths[1].read_bytes()
    _, x, _ = run(capsys, "verify", "main-theorem", "--trials", "3", "--seed", "5")
    _, y, _ = run(capsys, "verify", "main-theorem", "--trials", "3", "--seed", "5")
    assert x == y


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "jacobilift.cli", "basis", "--m", "1", "--d", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["dimension"] == 1
