import json

import numpy as np
import pytest

from jacobilift import exact
from jacobilift.polyharm import QuadFormS, pluriharmonic_basis
from jacobilift.report import VerificationReport, scaled_residual
from jacobilift.serialize import (
    basis_to_json,
    parse_complex,
    parse_complex_matrix_arg,
    parse_matrix_arg,
    poly_from_json,
)


@pytest.mark.parametrize("s,z", [("i", 1j), ("100i", 100j), ("0.3+1.1i", 0.3 + 1.1j), ("-2j", -2j),
                                 ("1.5", 1.5), ("1e-3-2e-2i", 1e-3 - 2e-2j), ("-i", -1j)])
def test_parse_complex(s, z):
    assert parse_complex(s) == z


@pytest.mark.parametrize("s", ["", "abc", "1+i+i"])
def test_parse_complex_rejects(s):
    with pytest.raises(ValueError):
        parse_complex(s)


def test_parse_matrix_arg():
    assert exact.mat_eq(parse_matrix_arg("identity", 2), exact.identity(2))
    assert parse_matrix_arg("3/2")[0, 0] == exact.parse_rational("3/2")
    assert exact.mat_eq(parse_matrix_arg('[["1/2", 0], [0, 1]]'), exact.qmat([["1/2", 0], [0, 1]]))
    with pytest.raises(ValueError):
        parse_matrix_arg("identity")


def test_parse_complex_matrix_arg():
    assert np.allclose(parse_complex_matrix_arg("2i", (2, 2), diagonal=True), 2j * np.eye(2))
    A = parse_complex_matrix_arg('[[[0.1, 1.0], "0.5"], ["0.5", "2i"]]', (2, 2))
    assert A[0, 0] == 0.1 + 1j and A[1, 1] == 2j
    with pytest.raises(ValueError):
        parse_complex_matrix_arg("[[1, 2]]", (2, 2))


def test_basis_json_roundtrip():
    B = pluriharmonic_basis(QuadFormS(exact.qmat([[2, 1], [1, 2]])), 3, 1)
    data = json.loads(json.dumps(basis_to_json(B)))
    assert data["dimension"] == len(B) and data["S"] == [["2/1", "1/1"], ["1/1", "2/1"]]
    assert tuple(poly_from_json(2, 1, p) for p in data["basis"]) == B.basis


def test_scaled_residual():
    assert scaled_residual(1e6, 1e6 + 1) == pytest.approx(1e-6)
    assert scaled_residual(0, 1e-3) == pytest.approx(1e-3)


def test_report_pass_fail_and_json():
    r = VerificationReport("x", 1e-6)
    r.add(1e-8)
    r.add(2e-6, tail=5e-6)
    assert r.passed and r.max_residual == 2e-6
    r.add(1.0)
    d = json.loads(r.to_json())
    assert d["pass"] is False and len(d["cases"]) == 3
    assert r.summary().startswith("FAIL")
