"""Sparse polynomials on C^{(m,n)}, constant-coefficient differential operators,
and pluriharmonic polynomials.

Variables are ``W[k, l]`` (0-based), flattened row-major, so the exponent
vector of a monomial has length m*n and position ``k*n + l``.  Monomials are
ordered graded-lexicographically with ``W[0,0] > W[0,1] > ... > W[m-1,n-1]``.

Coefficients are exact (:class:`~jacobilift.exact.GaussRational`) unless a
complex float enters, e.g. through :func:`gl_action` with a complex matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from numbers import Rational
from typing import Iterable, Mapping

import numpy as np

from . import exact
from .errors import DimensionError, DomainError, NotInSpanError
from .exact import GaussRational
from .matgroup import psd_check_exact

__all__ = [
    "SparsePoly",
    "QuadFormS",
    "PluriharmonicBasis",
    "monomials",
    "poly_eval",
    "poly_eval_many",
    "apply_diff_op",
    "bilinear_form",
    "laplacian_ij",
    "is_pluriharmonic",
    "is_harmonic",
    "pluriharmonic_basis",
    "gl_action",
    "tau_matrix",
    "lemma43_residual",
]


def _coerce(c):
    if isinstance(c, GaussRational):
        return c
    if isinstance(c, (bool,)):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, (int, np.integer, Rational)):
        return GaussRational(Fraction(int(c)) if isinstance(c, np.integer) else Fraction(c))
    if isinstance(c, (complex, float, np.complexfloating, np.floating)):
        return complex(c)
    if isinstance(c, str):
        return GaussRational(exact.parse_rational(c))
    raise TypeError(f"unsupported coefficient {c!r}")


def _grlex_key(e):
    return (sum(e), e)


class SparsePoly:
    """Polynomial in the m*n variables W[k,l], stored as monomial -> coefficient."""

    __slots__ = ("m", "n", "_terms")

    def __init__(self, m: int, n: int, terms: Mapping | Iterable = ()):
        self.m, self.n = m, n
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        N = m * n
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != N or any(x < 0 for x in e):
                raise DimensionError(f"exponent {e} invalid for {m}x{n} variables")
            acc[e] = acc[e] + _coerce(c) if e in acc else _coerce(c)
        self._terms = {e: c for e, c in acc.items() if c != 0}

    # construction helpers
    @classmethod
    def zero(cls, m, n):
        return cls(m, n)

    @classmethod
    def const(cls, m, n, c=1):
        return cls(m, n, {(0,) * (m * n): c})

    @classmethod
    def var(cls, m, n, k, l):
        if not (0 <= k < m and 0 <= l < n):
            raise DimensionError(f"variable W[{k},{l}] out of range for {m}x{n}")
        e = [0] * (m * n)
        e[k * n + l] = 1
        return cls(m, n, {tuple(e): 1})

    @classmethod
    def monomial(cls, m, n, exps, c=1):
        return cls(m, n, {tuple(exps): c})

    # accessors
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """(monomial, coefficient) pairs in descending grlex order."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def coeff(self, e):
        return self._terms.get(tuple(e), GaussRational(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def is_exact(self) -> bool:
        return all(isinstance(c, GaussRational) for c in self._terms.values())

    def homogeneous_parts(self) -> dict:
        parts: dict = {}
        for e, c in self._terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: SparsePoly(self.m, self.n, t) for d, t in parts.items()}

    def _check(self, other):
        if (self.m, self.n) != (other.m, other.n):
            raise DimensionError(f"polynomials on {self.m}x{self.n} and {other.m}x{other.n}")

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.m, self.n, other)
        self._check(other)
        return SparsePoly(self.m, self.n, itertools.chain(self._terms.items(), other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.m, self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s):
        s = _coerce(s)
        return SparsePoly(self.m, self.n, {e: c * s for e, c in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return SparsePoly(self.m, self.n, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = SparsePoly.const(self.m, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return (self.m, self.n) == (other.m, other.n) and self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.m, self.n, frozenset(self._terms.items())))

    def derivative(self, v: int) -> SparsePoly:
        """Partial derivative in the flattened variable index v."""
        out = {}
        for e, c in self._terms.items():
            if e[v]:
                e2 = list(e)
                e2[v] -= 1
                out[tuple(e2)] = c * e[v]
        return SparsePoly(self.m, self.n, out)

    def __call__(self, W):
        return poly_eval(self, W)

    def __repr__(self):
        if not self._terms:
            return f"SparsePoly({self.m}x{self.n}: 0)"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                f"W{i // self.n + 1}{i % self.n + 1}" + (f"^{x}" if x > 1 else "")
                for i, x in enumerate(e) if x
            )
            cs = str(c.re) if isinstance(c, GaussRational) and c.im == 0 else str(c)
            parts.append(f"{cs}*{mono}" if mono else cs)
        return f"SparsePoly({self.m}x{self.n}: {' + '.join(parts)})"


def monomials(nvars: int, d: int) -> list:
    """All exponent vectors of total degree d, descending grlex (= lex at fixed degree)."""
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for x in range(left, -1, -1):
            rec(prefix + (x,), left - x, slots - 1)

    if nvars == 0:
        return [()] if d == 0 else []
    rec((), d, nvars)
    return out


def _as_W(P: SparsePoly, W) -> np.ndarray:
    W = np.asarray(W, dtype=complex)
    if W.ndim == 0:
        W = W.reshape(1, 1)
    if W.shape != (P.m, P.n):
        raise DimensionError(f"W must be {P.m}x{P.n}, got {W.shape}")
    return W


def poly_eval(P: SparsePoly, W) -> complex:
    """Evaluate P at a complex m x n matrix, summing monomials in grlex order."""
    w = _as_W(P, W).reshape(-1)
    total = 0j
    for e, c in P.items():
        term = complex(c)
        for v, x in enumerate(e):
            if x:
                term *= w[v] ** x
        total += term
    return total


def poly_eval_many(P: SparsePoly, Ws) -> np.ndarray:
    """Vectorised evaluation at a stack of points of shape (N, m, n) or (N, m*n)."""
    Ws = np.asarray(Ws, dtype=complex).reshape(len(Ws), -1)
    if Ws.shape[1] != P.m * P.n:
        raise DimensionError(f"points have {Ws.shape[1]} coordinates, expected {P.m * P.n}")
    total = np.zeros(len(Ws), dtype=complex)
    for e, c in P.items():
        term = np.full(len(Ws), complex(c))
        for v, x in enumerate(e):
            if x:
                term *= Ws[:, v] ** x
        total += term
    return total


@lru_cache(maxsize=None)
def _falling(b: int, a: int) -> int:
    return factorial(b) // factorial(b - a)


def apply_diff_op(P: SparsePoly, Q: SparsePoly) -> SparsePoly:
    """``P(d/dW) Q`` computed monomial by monomial."""
    P._check(Q)
    out: dict = {}
    for a, pc in P._terms.items():
        for b, qc in Q._terms.items():
            if all(x <= y for x, y in zip(a, b)):
                f = prod(_falling(y, x) for x, y in zip(a, b))
                e = tuple(y - x for x, y in zip(a, b))
                t = pc * qc * f
                out[e] = out[e] + t if e in out else t
    return SparsePoly(P.m, P.n, out)


def bilinear_form(P: SparsePoly, Q: SparsePoly):
    """``<P, Q> = (P(d/dW) Q)(0) = sum_a p_a q_a a!``."""
    P._check(Q)
    total = GaussRational(0)
    for e, c in P._terms.items():
        if e in Q._terms:
            total = total + c * Q._terms[e] * prod(factorial(x) for x in e)
    return total


class QuadFormS:
    """Positive definite symmetric rational m x m matrix S with exact inverse."""

    __slots__ = ("S", "T_inv")

    def __init__(self, S):
        S = exact.qmat(S)
        m = S.shape[0]
        if S.shape != (m, m):
            raise DimensionError(f"S must be square, got {S.shape}")
        if not exact.mat_eq(S, S.T):
            raise DomainError("S is not symmetric")
        if not psd_check_exact(S) or exact.det(S) == 0:
            raise DomainError("S is not positive definite")
        S.flags.writeable = False
        T = exact.inv(S)
        T.flags.writeable = False
        self.S, self.T_inv = S, T

    @property
    def m(self) -> int:
        return self.S.shape[0]

    def __eq__(self, other):
        return isinstance(other, QuadFormS) and exact.mat_eq(self.S, other.S)

    def __hash__(self):
        return hash(tuple(self.S.flat))

    def __repr__(self):
        return f"QuadFormS({[[str(x) for x in r] for r in self.S]})"


def laplacian_ij(S: QuadFormS, i: int, j: int, P: SparsePoly) -> SparsePoly:
    """``sum_{p,q} t_pq d^2/(dW[p,i] dW[q,j]) P`` with (t_pq) = S^{-1}; i, j are 0-based."""
    m, n = P.m, P.n
    if S.m != m:
        raise DimensionError(f"S is {S.m}x{S.m} but P has {m} rows of variables")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"laplacian index ({i},{j}) out of range for n={n}")
    out = SparsePoly.zero(m, n)
    for p in range(m):
        dp = P.derivative(p * n + i)
        if dp.is_zero():
            continue
        for q in range(m):
            t = S.T_inv[p, q]
            if t:
                out = out + dp.derivative(q * n + j).scale(t)
    return out


def is_pluriharmonic(S: QuadFormS, P: SparsePoly) -> bool:
    return all(laplacian_ij(S, i, j, P).is_zero() for i in range(P.n) for j in range(P.n))


def is_harmonic(S: QuadFormS, P: SparsePoly) -> bool:
    total = SparsePoly.zero(P.m, P.n)
    for i in range(P.n):
        total = total + laplacian_ij(S, i, i, P)
    return total.is_zero()


@dataclass(frozen=True)
class PluriharmonicBasis:
    S: QuadFormS
    degree: int
    basis: tuple
    m: int
    n: int
    order: str = "grlex"

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __getitem__(self, i):
        return self.basis[i]

    def with_basis(self, polys) -> PluriharmonicBasis:
        """Same space, different ordered basis (validated)."""
        polys = tuple(polys)
        for P in polys:
            if not (P.is_homogeneous() and (P.is_zero() or P.degree() == self.degree)):
                raise DomainError("basis element has the wrong degree")
            if not is_pluriharmonic(self.S, P):
                raise DomainError("basis element is not pluriharmonic")
        M = _coeff_matrix(polys, self.m * self.n, self.degree)
        _, piv = exact.rref(M) if len(polys) else (None, [])
        if len(piv) != len(polys) or len(polys) != len(self.basis):
            raise DomainError("polynomials do not form a basis of the same space")
        return PluriharmonicBasis(self.S, self.degree, polys, self.m, self.n, self.order)


def _coeff_matrix(polys, nvars, d):
    monos = monomials(nvars, d)
    M = np.empty((len(monos), len(polys)), dtype=object)
    for j, P in enumerate(polys):
        for i, e in enumerate(monos):
            c = P.coeff(e)
            M[i, j] = c.re if isinstance(c, GaussRational) and c.im == 0 else c
    return M


def pluriharmonic_basis(S: QuadFormS, d: int, n: int) -> PluriharmonicBasis:
    """Kernel of all Laplacians on degree-d homogeneous polynomials on C^{(m,n)}.

    Exact Gaussian elimination; the basis is the reduced-echelon kernel basis
    with columns indexed by grlex-descending monomials.
    """
    if d < 0:
        raise ValueError("degree must be nonnegative")
    m = S.m
    N = m * n
    monos = monomials(N, d)
    targets = monomials(N, d - 2) if d >= 2 else []
    tindex = {e: r for r, e in enumerate(targets)}
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    A = np.empty((len(pairs) * len(targets), len(monos)), dtype=object)
    A.fill(Fraction(0))
    for col, e in enumerate(monos):
        mono = SparsePoly.monomial(m, n, e)
        for pi, (i, j) in enumerate(pairs):
            for e2, c in laplacian_ij(S, i, j, mono).terms.items():
                A[pi * len(targets) + tindex[e2], col] = c.re
    basis = []
    for v in exact.nullspace(A):
        basis.append(SparsePoly(m, n, {e: x for e, x in zip(monos, v) if x != 0}))
    return PluriharmonicBasis(S, d, tuple(basis), m, n)


@lru_cache(maxsize=4096)
def _linear_power(lin: SparsePoly, x: int) -> SparsePoly:
    return lin ** x


def gl_action(A, P: SparsePoly, B=None) -> SparsePoly:
    """``P(tB W A)``; B defaults to the identity (then this is ``tau(A)P``)."""
    m, n = P.m, P.n
    A = _scalar_matrix(A, n, n)
    B = exact.identity(m) if B is None else _scalar_matrix(B, m, m)
    # image of each variable W[k,l] as a linear form
    lins = []
    for k in range(m):
        for l in range(n):
            terms = {}
            for p in range(m):
                for q in range(n):
                    c = B[p, k] * A[q, l]
                    if c != 0:
                        e = [0] * (m * n)
                        e[p * n + q] = 1
                        terms[tuple(e)] = c
            lins.append(SparsePoly(m, n, terms))
    out = SparsePoly.zero(m, n)
    for e, c in P._terms.items():
        term = SparsePoly.const(m, n, c)
        for v, x in enumerate(e):
            if x:
                term = term * _linear_power(lins[v], x)
        out = out + term
    return out


def _scalar_matrix(A, r, c):
    A = np.asarray(A)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.shape != (r, c):
        raise DimensionError(f"expected a {r}x{c} matrix, got {A.shape}")
    if A.dtype == object:
        return exact.qmat(A) if all(not isinstance(x, GaussRational) for x in A.flat) else A
    if np.issubdtype(A.dtype, np.integer):
        return exact.qmat(A)
    return A.astype(complex)


def tau_matrix(A, basis: PluriharmonicBasis, rtol: float = 1e-9):
    """Matrix of ``P -> P(WA)`` in the given basis: ``tau(A) P_j = sum_i T[i,j] P_i``.

    Exact for rational/Gaussian-rational A, least squares (with a span
    check) for complex float A.
    """
    polys = basis.basis
    r = len(polys)
    images = [gl_action(A, P) for P in polys]
    M = _coeff_matrix(polys, basis.m * basis.n, basis.degree)
    rhs = _coeff_matrix(images, basis.m * basis.n, basis.degree)
    if r == 0:
        return np.zeros((0, 0), dtype=complex)
    if all(P.is_exact() for P in images):
        try:
            return exact.solve(M, rhs)
        except ValueError as exc:
            raise NotInSpanError("image of tau(A) leaves the span of the basis") from exc
    Mc, Rc = exact.to_complex(M), exact.to_complex(rhs)
    X, *_ = np.linalg.lstsq(Mc, Rc, rcond=None)
    resid = np.abs(Mc @ X - Rc).max() if Rc.size else 0.0
    if resid > rtol * max(1.0, float(np.abs(Rc).max())):
        raise NotInSpanError(f"image of tau(A) leaves the span of the basis (residual {resid:.3e})")
    return X


def _quadratic_trace_poly(C: np.ndarray, Sinv: np.ndarray, m: int, n: int) -> SparsePoly:
    """h(W) = tr(W C tW S^{-1}) = sum W[i,k] C[k,l] W[p,l] Sinv[p,i]."""
    terms: dict = {}
    for i in range(m):
        for k in range(n):
            for p in range(m):
                for l in range(n):
                    c = C[k, l] * Sinv[p, i]
                    if c == 0:
                        continue
                    e = [0] * (m * n)
                    e[i * n + k] += 1
                    e[p * n + l] += 1
                    e = tuple(e)
                    terms[e] = terms.get(e, 0) + c
    return SparsePoly(m, n, terms)


def lemma43_residual(P: SparsePoly, S: QuadFormS, C, Wpt) -> float:
    """``|P(d/dW) e^{h} - P(2 S^{-1} W C) e^{h}|`` at Wpt, h(W) = tr(W C tW S^{-1}).

    The left side is computed by formal differentiation of ``q * e^h`` pairs
    (``d(q e^h) = (dq + q dh) e^h``), which terminates after deg P steps.
    """
    m, n = P.m, P.n
    if S.m != m:
        raise DimensionError(f"S is {S.m}x{S.m} but P has {m} rows of variables")
    C = np.asarray(C, dtype=complex)
    if C.ndim == 0:
        C = C.reshape(1, 1)
    if C.shape != (n, n):
        raise DimensionError(f"C must be {n}x{n}, got {C.shape}")
    if np.abs(C - C.T).max() > 1e-14 * max(1.0, float(np.abs(C).max())):
        raise DomainError("C must be symmetric")
    W = _as_W(P, Wpt)
    Sinv = exact.to_complex(S.T_inv)
    h = _quadratic_trace_poly(C, Sinv, m, n)
    dh = [h.derivative(v) for v in range(m * n)]
    one = SparsePoly.const(m, n, 1)
    memo = {(0,) * (m * n): one}

    def q_of(e):
        # q_e with d^e (e^h) = q_e e^h
        if e in memo:
            return memo[e]
        v = next(i for i, x in enumerate(e) if x)
        prev = list(e)
        prev[v] -= 1
        q = q_of(tuple(prev))
        memo[e] = q.derivative(v) + q * dh[v]
        return memo[e]

    lhs_poly = 0j
    for e, c in P.items():
        lhs_poly += complex(c) * poly_eval(q_of(e), W)
    eh = np.exp(poly_eval(h, W))
    rhs_poly = poly_eval(P, 2 * Sinv @ W @ C)
    return float(abs(lhs_poly * eh - rhs_poly * eh))
