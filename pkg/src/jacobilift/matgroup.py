"""Symplectic, Heisenberg and Jacobi groups and their actions.

Group elements carry exact rational entries (numpy object arrays of
``Fraction``); points of H_n and H_{n,m} are complex float arrays.  The
Jacobi group element ``(M, (lam, mu, kappa))`` acts on ``(Z, W)`` by::

    (M<Z>, (W + lam Z + mu)(CZ + D)^{-1})

and embeds into Sp(n+m) as the parabolic block matrix ``[M, E_m, h]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exact
from .errors import DimensionError, DomainError, SingularError

__all__ = [
    "SIEGEL_TOL",
    "J",
    "symplectic_check",
    "SymplecticElement",
    "SiegelPoint",
    "JacobiDomainPoint",
    "HeisenbergElement",
    "JacobiElement",
    "translation",
    "inversion",
    "rotation",
    "moebius",
    "siegel_action",
    "siegel_action_exact",
    "jacobi_mul",
    "jacobi_action",
    "jacobi_action_exact",
    "embed_parabolic",
    "embed_jacobi",
    "FactorDecomposition",
    "factor_decomposition",
    "right_factor",
    "automorphy_cz_d",
    "canonical_factor",
    "cocycle_residual",
    "psd_check_exact",
]

#: Smallest admissible eigenvalue of Im Z.
SIEGEL_TOL = 1e-10
_COND_MAX = 1e12


def J(n: int) -> np.ndarray:
    out = exact.zeros(2 * n, 2 * n)
    for i in range(n):
        out[i, n + i] = Fraction(1)
        out[n + i, i] = Fraction(-1)
    return out


def symplectic_check(M) -> bool:
    """True iff ``tM J M == J`` holds exactly."""
    M = M.M if isinstance(M, SymplecticElement) else exact.qmat(M)
    r, c = M.shape
    if r != c or r % 2:
        raise DimensionError(f"symplectic matrices are square of even size, got {M.shape}")
    n = r // 2
    # block form of tM J M = J, over Python ints when M is integral
    M = exact.as_int_if_integral(M)
    A, B, C, D = M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]
    AtC, BtD = A.T.dot(C), B.T.dot(D)
    return (exact.mat_eq(AtC, AtC.T) and exact.mat_eq(BtD, BtD.T)
            and exact.mat_eq(A.T.dot(D) - C.T.dot(B), exact.identity(n)))


class SymplecticElement:
    """A 2n x 2n rational matrix with ``tM J_n M = J_n``."""

    __slots__ = ("M", "n")

    def __init__(self, M):
        M = exact.qmat(M)
        if not symplectic_check(M):
            raise DomainError("matrix is not symplectic")
        M.flags.writeable = False
        self.M = M
        self.n = M.shape[0] // 2

    @classmethod
    def identity(cls, n: int) -> SymplecticElement:
        return cls(exact.identity(2 * n))

    @property
    def A(self):
        return self.M[: self.n, : self.n]

    @property
    def B(self):
        return self.M[: self.n, self.n:]

    @property
    def C(self):
        return self.M[self.n:, : self.n]

    @property
    def D(self):
        return self.M[self.n:, self.n:]

    def blocks_complex(self):
        Mc = exact.to_complex(self.M)
        n = self.n
        return Mc[:n, :n], Mc[:n, n:], Mc[n:, :n], Mc[n:, n:]

    def __matmul__(self, other: SymplecticElement) -> SymplecticElement:
        if self.n != other.n:
            raise DimensionError(f"degree mismatch: {self.n} vs {other.n}")
        return SymplecticElement(self.M.dot(other.M))

    def inverse(self) -> SymplecticElement:
        # M^{-1} = -J tM J for symplectic M
        Jn = J(self.n)
        return SymplecticElement(-Jn.dot(self.M.T).dot(Jn))

    def __eq__(self, other):
        return isinstance(other, SymplecticElement) and exact.mat_eq(self.M, other.M)

    def __hash__(self):
        return hash(tuple(self.M.flat))

    def __repr__(self):
        return f"SymplecticElement({[[str(x) for x in row] for row in self.M]})"


def translation(S) -> SymplecticElement:
    """``[[E, S], [0, E]]`` for symmetric S (``Z -> Z + S``)."""
    S = exact.qmat(S)
    n = S.shape[0]
    M = exact.identity(2 * n)
    M[:n, n:] = S
    return SymplecticElement(M)


def inversion(n: int) -> SymplecticElement:
    """``[[0, -E], [E, 0]]`` (``Z -> -Z^{-1}``)."""
    return SymplecticElement(-J(n))


def rotation(U) -> SymplecticElement:
    """``[[U, 0], [0, tU^{-1}]]`` for invertible U (``Z -> U Z tU``)."""
    U = exact.qmat(U)
    n = U.shape[0]
    M = exact.zeros(2 * n, 2 * n)
    M[:n, :n] = U
    M[n:, n:] = exact.inv(U).T
    return SymplecticElement(M)


class SiegelPoint:
    """Z in the Siegel upper half space: symmetric with Im Z positive definite."""

    __slots__ = ("Z",)

    def __init__(self, Z, tol: float = SIEGEL_TOL):
        Z = np.array(Z, dtype=complex)
        if Z.ndim == 0:
            Z = Z.reshape(1, 1)
        if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
            raise DimensionError(f"Z must be square, got shape {Z.shape}")
        if not np.all(np.isfinite(Z)):
            raise DomainError("Z has non-finite entries")
        scale = max(1.0, float(np.abs(Z).max()))
        if np.abs(Z - Z.T).max() > 1e-8 * scale:
            raise DomainError("Z is not symmetric")
        Z = (Z + Z.T) / 2
        if np.linalg.eigvalsh(Z.imag).min() <= tol:
            raise DomainError("Im Z is not positive definite")
        Z.flags.writeable = False
        self.Z = Z

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    @property
    def y_min(self) -> float:
        return float(np.linalg.eigvalsh(self.Z.imag).min())

    def __repr__(self):
        return f"SiegelPoint({self.Z.tolist()})"


class JacobiDomainPoint:
    """(Z, W) in H_n x C^{(m,n)}."""

    __slots__ = ("Z", "W")

    def __init__(self, Z, W):
        Z = Z if isinstance(Z, SiegelPoint) else SiegelPoint(Z)
        W = np.array(W, dtype=complex)
        if W.ndim == 0:
            W = W.reshape(1, 1)
        if W.ndim != 2 or W.shape[1] != Z.n:
            raise DimensionError(f"W must be m x {Z.n}, got shape {W.shape}")
        if not np.all(np.isfinite(W)):
            raise DomainError("W has non-finite entries")
        W.flags.writeable = False
        self.Z = Z
        self.W = W

    @property
    def n(self) -> int:
        return self.Z.n

    @property
    def m(self) -> int:
        return self.W.shape[0]

    def __repr__(self):
        return f"JacobiDomainPoint(Z={self.Z.Z.tolist()}, W={self.W.tolist()})"


class HeisenbergElement:
    """(lam, mu, kappa) with lam, mu m x n and kappa m x m.

    Admissible iff the parabolic embedding ``[E_n, E_m, h]`` is
    symplectic, which amounts to ``kappa + mu t(lam)`` being symmetric.
    """

    __slots__ = ("lam", "mu", "kappa")

    def __init__(self, lam, mu, kappa=None):
        lam, mu = exact.qmat(lam), exact.qmat(mu)
        if lam.shape != mu.shape:
            raise DimensionError(f"lam {lam.shape} and mu {mu.shape} differ")
        m = lam.shape[0]
        kappa = exact.zeros(m, m) if kappa is None else exact.qmat(kappa)
        if kappa.shape != (m, m):
            raise DimensionError(f"kappa must be {m}x{m}, got {kappa.shape}")
        n = lam.shape[1]
        G = embed_parabolic(SymplecticElement.identity(n), exact.identity(m), (lam, mu, kappa))
        if not symplectic_check(G):
            raise DomainError("kappa + mu t(lam) is not symmetric")
        for a in (lam, mu, kappa):
            a.flags.writeable = False
        self.lam, self.mu, self.kappa = lam, mu, kappa

    @classmethod
    def zero(cls, n: int, m: int) -> HeisenbergElement:
        return cls(exact.zeros(m, n), exact.zeros(m, n), exact.zeros(m, m))

    @property
    def m(self) -> int:
        return self.lam.shape[0]

    @property
    def n(self) -> int:
        return self.lam.shape[1]

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for a in (self.lam, self.mu, self.kappa) for x in a.flat)

    def __eq__(self, other):
        return (isinstance(other, HeisenbergElement)
                and exact.mat_eq(self.lam, other.lam)
                and exact.mat_eq(self.mu, other.mu)
                and exact.mat_eq(self.kappa, other.kappa))

    def __repr__(self):
        f = lambda a: [[str(x) for x in row] for row in a]
        return f"HeisenbergElement(lam={f(self.lam)}, mu={f(self.mu)}, kappa={f(self.kappa)})"


@dataclass(frozen=True)
class JacobiElement:
    M: SymplecticElement
    h: HeisenbergElement

    def __post_init__(self):
        if self.M.n != self.h.n:
            raise DimensionError(f"Sp({self.M.n}) paired with Heisenberg of degree {self.h.n}")

    @classmethod
    def identity(cls, n: int, m: int) -> JacobiElement:
        return cls(SymplecticElement.identity(n), HeisenbergElement.zero(n, m))

    @classmethod
    def from_symplectic(cls, M: SymplecticElement, m: int) -> JacobiElement:
        return cls(M, HeisenbergElement.zero(M.n, m))

    @classmethod
    def from_heisenberg(cls, h: HeisenbergElement) -> JacobiElement:
        return cls(SymplecticElement.identity(h.n), h)

    @property
    def n(self) -> int:
        return self.M.n

    @property
    def m(self) -> int:
        return self.h.m

    def __matmul__(self, other: JacobiElement) -> JacobiElement:
        return jacobi_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, JacobiElement) and self.M == other.M and self.h == other.h

    def __hash__(self):
        return hash(self.M)


def jacobi_mul(g: JacobiElement, g2: JacobiElement) -> JacobiElement:
    """Group law ``(M,h)(M',h') = (MM', (lam~+lam', mu~+mu', ...))`` with ``(lam~,mu~) = (lam,mu)M'``."""
    if (g.n, g.m) != (g2.n, g2.m):
        raise DimensionError(f"(n,m) mismatch: {(g.n, g.m)} vs {(g2.n, g2.m)}")
    n = g.n
    lm = np.concatenate([g.h.lam, g.h.mu], axis=1).dot(g2.M.M)
    lt, mt = lm[:, :n], lm[:, n:]
    h2 = g2.h
    kappa = g.h.kappa + h2.kappa + lt.dot(h2.mu.T) - mt.dot(h2.lam.T)
    return JacobiElement(g.M @ g2.M, HeisenbergElement(lt + h2.lam, mt + h2.mu, kappa))


def _solve_right(X, Y):
    """Return ``X Y^{-1}`` for complex float matrices, guarding conditioning."""
    if np.linalg.cond(Y) > _COND_MAX:
        raise SingularError("CZ + D is numerically singular")
    return np.linalg.solve(Y.T, X.T).T


def moebius(M, Z):
    """``(AZ+B)(CZ+D)^{-1}`` for a 2n x 2n matrix M.

    Works exactly when both M and Z are object arrays, in floating point
    otherwise.  No validity check on Z.
    """
    Mx = M.M if isinstance(M, SymplecticElement) else M
    n = Mx.shape[0] // 2
    if exact.is_exact(Z) and exact.is_exact(Mx):
        A, B, C, D = Mx[:n, :n], Mx[:n, n:], Mx[n:, :n], Mx[n:, n:]
        den = C.dot(Z) + D
        if exact.det(den) == 0:
            raise SingularError("CZ + D is singular")
        return (A.dot(Z) + B).dot(exact.inv(den))
    Mc = exact.to_complex(Mx)
    Z = np.asarray(Z, dtype=complex)
    A, B, C, D = Mc[:n, :n], Mc[:n, n:], Mc[n:, :n], Mc[n:, n:]
    return _solve_right(A @ Z + B, C @ Z + D)


def automorphy_cz_d(M: SymplecticElement, Z) -> np.ndarray:
    """The matrix automorphy factor ``CZ + D``."""
    Zm = Z.Z if isinstance(Z, SiegelPoint) else Z
    if exact.is_exact(Zm):
        return M.C.dot(Zm) + M.D
    _, _, C, D = M.blocks_complex()
    return C @ Zm + D


def siegel_action(M: SymplecticElement, Z: SiegelPoint) -> SiegelPoint:
    if M.n != Z.n:
        raise DimensionError(f"Sp({M.n}) cannot act on H_{Z.n}")
    return SiegelPoint(moebius(M, Z.Z))


def siegel_action_exact(M: SymplecticElement, Z) -> np.ndarray:
    """Exact Moebius action on a point with Gaussian-rational entries."""
    Z = exact.qmat(Z) if not exact.is_exact(Z) else Z
    if Z.shape != (M.n, M.n):
        raise DimensionError(f"Sp({M.n}) cannot act on a {Z.shape} matrix")
    return moebius(M, Z)


def jacobi_action(g: JacobiElement, p: JacobiDomainPoint) -> JacobiDomainPoint:
    if (g.n, g.m) != (p.n, p.m):
        raise DimensionError(f"G^J of type {(g.n, g.m)} cannot act on a point of type {(p.n, p.m)}")
    lam, mu = exact.to_complex(g.h.lam), exact.to_complex(g.h.mu)
    Z, W = p.Z.Z, p.W
    shifted = W + lam @ Z + mu
    cz_d = automorphy_cz_d(g.M, Z)
    return JacobiDomainPoint(siegel_action(g.M, p.Z), _solve_right(shifted, cz_d))


def jacobi_action_exact(g: JacobiElement, Z, W):
    """Exact version of :func:`jacobi_action` for Gaussian-rational (Z, W)."""
    den = automorphy_cz_d(g.M, Z)
    if exact.det(den) == 0:
        raise SingularError("CZ + D is singular")
    Wt = (W + g.h.lam.dot(Z) + g.h.mu).dot(exact.inv(den))
    return moebius(g.M, Z), Wt


def embed_parabolic(sigma: SymplecticElement, u, h) -> np.ndarray:
    """The 2(n+m) square block matrix ``[sigma, u, (lam, mu, kappa)]``.

    Block rows and columns are ordered (n, m, n, m).  ``h`` may be a
    HeisenbergElement or a raw (lam, mu, kappa) triple, which lets callers
    embed inadmissible triples and observe that the result is not symplectic.
    """
    if isinstance(h, HeisenbergElement):
        lam, mu, kappa = h.lam, h.mu, h.kappa
    else:
        lam, mu, kappa = (exact.qmat(x) for x in h)
    u = exact.qmat(u)
    n, m = sigma.n, u.shape[0]
    if u.shape != (m, m) or lam.shape != (m, n) or mu.shape != (m, n) or kappa.shape != (m, m):
        raise DimensionError("inconsistent block sizes for the parabolic embedding")
    if exact.det(u) == 0:
        raise SingularError("u must be invertible")
    A, B, C, D = sigma.A, sigma.B, sigma.C, sigma.D
    N = n + m
    G = exact.zeros(2 * N, 2 * N)
    G[:n, :n] = A
    G[:n, N:N + n] = B
    G[:n, N + n:] = A.dot(mu.T) - B.dot(lam.T)
    G[n:N, :n] = u.dot(lam)
    G[n:N, n:N] = u
    G[n:N, N:N + n] = u.dot(mu)
    G[n:N, N + n:] = u.dot(kappa)
    G[N:N + n, :n] = C
    G[N:N + n, N:N + n] = D
    G[N:N + n, N + n:] = C.dot(mu.T) - D.dot(lam.T)
    G[N + n:, N + n:] = exact.inv(u).T
    return G


def embed_jacobi(g: JacobiElement) -> np.ndarray:
    return embed_parabolic(g.M, exact.identity(g.m), g.h)


@dataclass(frozen=True)
class FactorDecomposition:
    """Image ``(Z~, W~, T~)`` of ``(Z, W, T)`` and the extracted pieces.

    ``a`` is the (mn x mn) matrix of the linear part in W acting on
    row-major ``vec(W)``; ``b = W~|_{W=0}``; ``c = T~ - u T tu``.
    """

    Zt: np.ndarray
    Wt: np.ndarray
    Tt: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


def _block_point(Z, W, T):
    return np.block([[Z, W.T], [W, T]])


def _default_T(Z, W):
    m = W.shape[0]
    Y = Z.imag
    V = W.imag
    s = np.linalg.eigvalsh(V @ np.linalg.solve(Y, V.T)).max() if m else 0.0
    return 1j * (1.0 + s) * np.eye(m)


def factor_decomposition(G, n: int, m: int, Z, W, T=None) -> FactorDecomposition:
    """Apply the Sp(n+m) Moebius action of the parabolic matrix G to (Z, W, T)."""
    G = embed_jacobi(G) if isinstance(G, JacobiElement) else G
    if G.shape != (2 * (n + m), 2 * (n + m)):
        raise DimensionError(f"expected a {2 * (n + m)}-square matrix, got {G.shape}")
    Z = Z.Z if isinstance(Z, SiegelPoint) else np.asarray(Z, dtype=complex)
    W = np.asarray(W, dtype=complex).reshape(m, n)
    T = _default_T(Z, W) if T is None else np.asarray(T, dtype=complex)

    def act(Wv):
        out = moebius(G, _block_point(Z, Wv, T))
        return out[:n, :n], out[n:, :n], out[n:, n:]

    Zt, Wt, Tt = act(W)
    _, b, _ = act(np.zeros((m, n), dtype=complex))
    a = np.empty((m * n, m * n), dtype=complex)
    for idx in range(m * n):
        E = np.zeros(m * n, dtype=complex)
        E[idx] = 1.0
        a[:, idx] = (act(E.reshape(m, n))[1] - b).reshape(-1)
    u = exact.to_complex(G[n:n + m, n:n + m])
    c = Tt - u @ T @ u.T
    return FactorDecomposition(Zt, Wt, Tt, a, b, c)


def right_factor(a: np.ndarray, m: int, n: int) -> np.ndarray:
    """The n x n matrix X with ``a(W) = W X`` (rows read off ``a(E_{1l})``)."""
    X = np.empty((n, n), dtype=complex)
    for l in range(n):
        X[l, :] = a[:, l].reshape(m, n)[0, :]
    return X


def canonical_factor(g: JacobiElement, p: JacobiDomainPoint, index, k: int) -> complex:
    """``chi(c(g;Z,W)) * det(a(g;Z))^k`` with ``chi(x) = exp(2 pi i tr(index x))``.

    a(g;Z) is identified with the n x n matrix X of ``W -> W X``.
    """
    Mi = exact.to_complex(index) if exact.is_exact(np.asarray(index)) else np.asarray(index, dtype=complex)
    fd = factor_decomposition(embed_jacobi(g), p.n, p.m, p.Z.Z, p.W)
    X = right_factor(fd.a, p.m, p.n)
    return complex(np.exp(2j * np.pi * np.trace(Mi @ fd.c)) * np.linalg.det(X) ** k)


def _default_act(g):
    if isinstance(g, SymplecticElement):
        return siegel_action
    if isinstance(g, JacobiElement):
        return jacobi_action
    raise TypeError(f"no default action for {type(g).__name__}")


def cocycle_residual(Jf: Callable, g1, g2, x, act: Callable | None = None,
                     mul: Callable | None = None, relative: bool = False) -> float:
    """Max-norm of ``J(g1 g2, x) - J(g1, g2.x) J(g2, x)``.

    With ``relative`` the result is divided by ``max(1, |J(g1 g2, x)|)``.
    """
    act = act or _default_act(g1)
    mul = mul or (lambda a, b: a @ b)
    lhs = np.asarray(Jf(mul(g1, g2), x))
    J1, J2 = np.asarray(Jf(g1, act(g2, x))), np.asarray(Jf(g2, x))
    rhs = J1 @ J2 if lhs.ndim == 2 else J1 * J2
    err = float(np.abs(lhs - rhs).max())
    return err / max(1.0, float(np.abs(lhs).max())) if relative else err


def psd_check_exact(T) -> bool:
    """Exact positive-semidefiniteness test by symmetric pivoted elimination."""
    A = exact.qmat(T)
    k = A.shape[0]
    if A.shape != (k, k):
        raise DimensionError(f"expected a square matrix, got {A.shape}")
    if not exact.mat_eq(A, A.T):
        raise DomainError("matrix is not symmetric")
    A = A.copy()
    active = list(range(k))
    while active:
        p = max(active, key=lambda i: A[i, i])
        piv = A[p, p]
        if piv < 0:
            return False
        if piv == 0:
            # all remaining diagonal entries vanish: PSD iff the block is zero
            return all(A[i, j] == 0 for i in active for j in active)
        active.remove(p)
        for i in active:
            f = A[i, p] / piv
            if f:
                for j in active:
                    A[i, j] -= f * A[p, j]
    return True
