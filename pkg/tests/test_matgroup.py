from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jacobilift import exact
from jacobilift.errors import DimensionError, DomainError, SingularError
from jacobilift.exact import GaussRational
from jacobilift.matgroup import (
    J,
    HeisenbergElement,
    JacobiDomainPoint,
    JacobiElement,
    SiegelPoint,
    SymplecticElement,
    automorphy_cz_d,
    canonical_factor,
    cocycle_residual,
    embed_jacobi,
    embed_parabolic,
    factor_decomposition,
    inversion,
    jacobi_action,
    jacobi_action_exact,
    jacobi_mul,
    psd_check_exact,
    siegel_action,
    symplectic_check,
    translation,
)
from jacobilift.sampling import (
    random_heisenberg,
    random_jacobi,
    random_siegel_point,
    random_symplectic,
    random_W,
)

T1 = translation([[1]])
S1 = inversion(1)


def test_symplectic_check_examples():
    assert symplectic_check(J(1))
    assert symplectic_check(exact.identity(2))
    assert symplectic_check((T1 @ S1 @ T1 @ T1 @ S1).M)
    assert not symplectic_check(exact.qmat([[1, 1], [1, 1]]))
    with pytest.raises(DimensionError):
        symplectic_check(exact.identity(3))


def test_symplectic_check_matches_defining_relation(rng):
    for n in (1, 2, 3):
        for _ in range(10):
            M = random_symplectic(rng, n, length=6).M
            assert exact.mat_eq(M.T.dot(J(n)).dot(M), J(n))
            bad = M.copy()
            bad[0, 0] = bad[0, 0] + 1
            assert symplectic_check(bad) == exact.mat_eq(bad.T.dot(J(n)).dot(bad), J(n))


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_closure_under_words(seed, length):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3))
    g1, g2 = random_symplectic(rng, n, length), random_symplectic(rng, n, length)
    assert symplectic_check((g1 @ g2).M)
    assert g1 @ g1.inverse() == SymplecticElement.identity(n)


def test_siegel_action_examples():
    i = SiegelPoint([[1j]])
    assert np.allclose(siegel_action(SymplecticElement.identity(1), i).Z, 1j)
    assert np.allclose(siegel_action(SymplecticElement([[0, -1], [1, 0]]), i).Z, 1j)
    assert np.allclose(siegel_action(T1, i).Z, 1 + 1j)


def test_siegel_point_validation():
    with pytest.raises(DomainError):
        SiegelPoint([[1.0 + 0j]])
    with pytest.raises(DomainError):
        SiegelPoint([[1j, 1], [0, 1j]])


def test_siegel_action_is_left_action(rng):
    for n in (1, 2):
        for _ in range(20):
            Z = SiegelPoint(random_siegel_point(rng, n, 0.5))
            a, b = random_symplectic(rng, n), random_symplectic(rng, n)
            lhs = siegel_action(a @ b, Z).Z
            rhs = siegel_action(a, siegel_action(b, Z)).Z
            # float error grows with the conditioning of CZ+D
            cond = np.linalg.cond(automorphy_cz_d(a @ b, Z.Z)) * np.linalg.cond(automorphy_cz_d(a, rhs))
            assert np.abs(lhs - rhs).max() / max(1, np.abs(lhs).max()) < 1e-12 * max(1.0, cond)
            assert np.linalg.eigvalsh(lhs.imag).min() > 0


def test_exact_siegel_action_gaussian_point():
    Z = exact.qmat([[GaussRational(Fraction(1, 3), Fraction(2))]])
    out = exact.to_complex(jacobi_action_exact(JacobiElement.from_symplectic(S1, 1), Z, exact.zeros(1, 1))[0])
    assert np.isclose(out[0, 0], -1 / (1 / 3 + 2j))


def test_jacobi_mul_examples():
    g = JacobiElement(S1, HeisenbergElement([[1]], [[0]]))
    assert jacobi_mul(g, JacobiElement.identity(1, 1)) == g
    h = JacobiElement.from_heisenberg(HeisenbergElement([[1]], [[0]]))
    prod = jacobi_mul(h, JacobiElement.from_symplectic(SymplecticElement([[0, -1], [1, 0]]), 1))
    assert prod.h.lam[0, 0] == 0 and prod.h.mu[0, 0] == -1
    with pytest.raises(DimensionError):
        jacobi_mul(g, JacobiElement.identity(1, 2))


@given(st.integers(0, 2**32 - 1))
def test_jacobi_mul_associative(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    a, b, c = (random_jacobi(rng, n, m) for _ in range(3))
    assert (a @ b) @ c == a @ (b @ c)


def test_jacobi_mul_matches_embedding(rng):
    for _ in range(10):
        a, b = random_jacobi(rng, 1, 2), random_jacobi(rng, 1, 2)
        assert exact.mat_eq(embed_jacobi(a @ b), embed_jacobi(a).dot(embed_jacobi(b)))


def test_jacobi_action_examples():
    p = JacobiDomainPoint([[1j]], [[0]])
    assert np.allclose(jacobi_action(JacobiElement.identity(1, 1), p).W, 0)
    g = JacobiElement.from_heisenberg(HeisenbergElement([[1]], [[0]]))
    q = jacobi_action(g, p)
    assert np.allclose(q.Z.Z, 1j) and np.allclose(q.W, 1j)


def test_jacobi_action_compatible(rng):
    p = JacobiDomainPoint([[2j]], [[0.3 + 0.1j]])
    for _ in range(30):
        a = JacobiElement(random_symplectic(rng, 1), random_heisenberg(rng, 1, 1, integral=False))
        b = JacobiElement(random_symplectic(rng, 1), random_heisenberg(rng, 1, 1, integral=False))
        lhs = jacobi_action(a @ b, p)
        rhs = jacobi_action(a, jacobi_action(b, p))
        assert np.abs(lhs.Z.Z - rhs.Z.Z).max() < 1e-12 * max(1, np.abs(lhs.Z.Z).max())
        assert np.abs(lhs.W - rhs.W).max() < 1e-12 * max(1, np.abs(lhs.W).max())


def test_jacobi_action_exact_compatible(rng):
    Z = exact.qmat([[GaussRational(Fraction(1, 5), Fraction(3, 2))]])
    W = exact.qmat([[GaussRational(Fraction(-1, 3), Fraction(1, 7))]])
    for _ in range(10):
        a, b = random_jacobi(rng, 1, 1), random_jacobi(rng, 1, 1)
        Z1, W1 = jacobi_action_exact(b, Z, W)
        lhs = jacobi_action_exact(a @ b, Z, W)
        rhs = jacobi_action_exact(a, Z1, W1)
        assert exact.mat_eq(lhs[0], rhs[0]) and exact.mat_eq(lhs[1], rhs[1])


def test_heisenberg_admissibility():
    with pytest.raises(DomainError):
        HeisenbergElement(exact.zeros(2, 1), exact.zeros(2, 1), [[0, 1], [0, 0]])
    lam = [[1], [0]]
    mu = [[0], [1]]
    # kappa + mu t(lam) symmetric requires kappa = sym - mu t(lam)
    HeisenbergElement(lam, mu, [[0, 0], [-1, 0]])
    assert not symplectic_check(embed_parabolic(SymplecticElement.identity(1), exact.identity(2),
                                                (lam, mu, exact.zeros(2, 2))))


def test_embed_parabolic_examples():
    G = embed_parabolic(SymplecticElement.identity(1), exact.identity(1), HeisenbergElement.zero(1, 1))
    assert exact.mat_eq(G, exact.identity(4))
    G = embed_parabolic(S1, exact.qmat([[-1]]), HeisenbergElement([[2]], [["1/2"]], [[3]]))
    assert symplectic_check(G)
    with pytest.raises(SingularError):
        embed_parabolic(S1, exact.zeros(1, 1), HeisenbergElement.zero(1, 1))


def test_factor_decomposition_examples():
    Z, W = np.array([[0.2 + 1.3j]]), np.array([[0.1 - 0.4j]])
    fd = factor_decomposition(JacobiElement.identity(1, 1), 1, 1, Z, W)
    assert np.allclose(fd.a, np.eye(1)) and np.allclose(fd.b, 0) and np.allclose(fd.c, 0)
    g = JacobiElement.from_heisenberg(HeisenbergElement([[3]], [[0]]))
    fd = factor_decomposition(g, 1, 1, Z, W)
    assert np.allclose(fd.b, 3 * Z)


def _c(g, Z, W):
    n, m = g.n, g.m
    return factor_decomposition(g, n, m, Z, W).c


def test_summand_of_automorphy(rng):
    for n, m in ((1, 1), (1, 2), (2, 1)):
        for _ in range(10):
            Z, W = random_siegel_point(rng, n), random_W(rng, m, n)
            g1, g2 = random_jacobi(rng, n, m), random_jacobi(rng, n, m)
            q = jacobi_action(g2, JacobiDomainPoint(Z, W))
            lhs = _c(g1 @ g2, Z, W)
            rhs = _c(g1, q.Z.Z, q.W) + _c(g2, Z, W)
            assert np.abs(lhs - rhs).max() / max(1, np.abs(lhs).max()) < 1e-10


def test_cocycle_examples(rng):
    def cz_d(g, Z):
        return automorphy_cz_d(g, Z.Z)

    Z = SiegelPoint([[1j]])
    g = random_symplectic(rng, 1)
    assert cocycle_residual(cz_d, g, SymplecticElement.identity(1), Z) == 0
    for _ in range(20):
        assert cocycle_residual(cz_d, random_symplectic(rng, 1), random_symplectic(rng, 1), Z,
                                relative=True) < 1e-12


def test_canonical_factor_cocycle(rng):
    def chi(g, p):
        return canonical_factor(g, p, exact.identity(1), 4)

    for _ in range(10):
        p = JacobiDomainPoint(random_siegel_point(rng, 1), random_W(rng, 1, 1))
        g1, g2 = random_jacobi(rng, 1, 1), random_jacobi(rng, 1, 1)
        assert cocycle_residual(chi, g1, g2, p, act=jacobi_action, relative=True) < 1e-10


def test_canonical_factor_matches_slash_factor():
    # for S the factor is z^{-k} e(-M w^2/z) inverted: det(X)^k chi(c)
    p = JacobiDomainPoint([[0.3 + 1.1j]], [[0.2 + 0.1j]])
    g = JacobiElement.from_symplectic(S1, 1)
    z, w = 0.3 + 1.1j, 0.2 + 0.1j
    expected = z ** -4 * np.exp(-2j * np.pi * w * w / z)
    assert np.isclose(canonical_factor(g, p, exact.identity(1), 4), expected, rtol=1e-12)


def test_psd_check_examples(rng):
    assert psd_check_exact([[1, 0], [0, 0]])
    assert not psd_check_exact([[0, 1], [1, 0]])
    assert psd_check_exact(exact.zeros(2, 2))
    for _ in range(20):
        A = exact.qmat(rng.integers(-3, 4, size=(2, 3)))
        assert psd_check_exact(A.T.dot(A))
    with pytest.raises(DomainError):
        psd_check_exact([[1, 2], [0, 1]])


def test_psd_matches_eigen_oracle(rng):
    checked = 0
    while checked < 60:
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        ev = rng.choice([-2.0, -1.0, 0.5, 1.0, 3.0], size=3)
        A = np.round((Q * ev) @ Q.T * 12) / 12
        w = np.linalg.eigvalsh(A)
        if np.min(np.abs(w)) < 1e-3:
            continue
        T = exact.qmat([[Fraction(round(x * 12), 12) for x in row] for row in A])
        assert psd_check_exact(T) == bool(w.min() > 0)
        checked += 1
