from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from jacobilift import exact
from jacobilift.errors import SingularError
from jacobilift.exact import GaussRational

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussRational, fracs, fracs)


def small_matrix(k):
    return st.lists(st.lists(st.integers(-4, 4), min_size=k, max_size=k), min_size=k, max_size=k)


@given(gauss, gauss, gauss)
def test_gauss_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b != 0:
        assert (a / b) * b == a


@given(gauss)
def test_gauss_matches_complex(a):
    z = complex(a)
    assert abs(complex(a * a) - z * z) < 1e-12
    assert complex(a.conjugate()) == z.conjugate()


def test_gauss_hash_agrees_with_fraction():
    assert hash(GaussRational(Fraction(3, 2), Fraction(0))) == hash(Fraction(3, 2))
    assert GaussRational(Fraction(3, 2), Fraction(0)) == Fraction(3, 2)


def test_parse_and_format_rational():
    assert exact.parse_rational(" -6/4 ") == Fraction(-3, 2)
    assert exact.format_rational(Fraction(-3, 2)) == "-3/2"
    assert exact.format_rational(4) == "4/1"
    with pytest.raises(ValueError):
        exact.parse_rational("1/x")


def test_qmat_rejects_inexact_float():
    with pytest.raises(TypeError):
        exact.qmat([[0.5]])
    assert exact.qmat([["1/3", 2]])[0, 0] == Fraction(1, 3)


@given(small_matrix(3))
def test_det_inverse_against_sympy(rows):
    A = exact.qmat(rows)
    ref = sp.Matrix(rows)
    assert exact.det(A) == Fraction(int(ref.det()))
    if ref.det() == 0:
        with pytest.raises(SingularError):
            exact.inv(A)
    else:
        Ai = exact.inv(A)
        assert exact.mat_eq(A.dot(Ai), exact.identity(3))
        assert all(Fraction(str(x)) == y for x, y in zip(ref.inv(), Ai.flat))


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=2, max_size=4))
def test_rref_and_nullspace_against_sympy(rows):
    A = exact.qmat(rows)
    R, piv = exact.rref(A)
    ref, refpiv = sp.Matrix(rows).rref()
    assert list(piv) == list(refpiv)
    assert all(Fraction(str(x)) == y for x, y in zip(ref, R.flat))
    ns = exact.nullspace(A)
    assert len(ns) == 4 - len(piv)
    for v in ns:
        assert exact.is_zero_matrix(A.dot(v))


def test_solve_consistent_and_inconsistent():
    A = exact.qmat([[1, 2], [2, 4], [0, 1]])
    X = exact.solve(A, exact.qmat([[3], [6], [1]]))
    assert exact.mat_eq(A.dot(X), exact.qmat([[3], [6], [1]]))
    with pytest.raises(ValueError):
        exact.solve(A, exact.qmat([[3], [7], [1]]))


def test_to_complex_roundtrip():
    A = exact.qmat([[GaussRational(Fraction(1, 2), Fraction(-1)), 3]])
    assert np.allclose(exact.to_complex(A), [[0.5 - 1j, 3]])
