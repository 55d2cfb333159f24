"""Short-vector enumeration for integral positive definite quadratic forms and
rigorous tail majorants for the associated exponential sums.

Enumeration is Fincke-Pohst style: the box bounds come from an exact
rational LDL^t factorisation, are evaluated in floating point with outward
slack, and every candidate is then filtered with the exact integer form, so
the output is complete and exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact
from .errors import DimensionError, DomainError

__all__ = [
    "ldl_exact",
    "iter_short_vectors",
    "short_vectors",
    "lattice_points",
    "minimum_norm",
    "count_bound",
    "tail_majorant",
]

_CHUNK = 250_000
_SLACK = 1e-7


def ldl_exact(S):
    """``S[x] = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2`` with exact d, u.

    Raises DomainError unless S is positive definite.
    """
    A = exact.qmat(S)
    k = A.shape[0]
    d = [Fraction(0)] * k
    u = exact.zeros(k, k)
    A = A.copy()
    # eliminate from the last variable backwards so that x_i couples to j > i
    for i in range(k):
        piv = A[i, i]
        if piv <= 0:
            raise DomainError("quadratic form is not positive definite")
        d[i] = piv
        for j in range(i + 1, k):
            u[i, j] = A[i, j] / piv
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                A[r, c] -= A[r, i] * A[i, c] / piv
    return d, u


@lru_cache(maxsize=32)
def _ldl_float(key):
    S = np.array(key[1], dtype=object).reshape(key[0], key[0])
    d, u = ldl_exact(S)
    return np.array([float(x) for x in d]), exact.to_complex(u).real


def _key(S: np.ndarray):
    S = np.asarray(S)
    return (S.shape[0], tuple(int(x) for x in S.flat))


def _integral(S) -> np.ndarray:
    S = np.asarray(S)
    if S.dtype == object:
        if any(Fraction(x).denominator != 1 for x in S.flat):
            raise DomainError("enumeration needs an integral quadratic form")
        S = np.array([[int(x) for x in row] for row in S], dtype=np.int64)
    S = S.astype(np.int64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"expected a square Gram matrix, got {S.shape}")
    if not np.array_equal(S, S.T):
        raise DomainError("Gram matrix is not symmetric")
    return S


def iter_short_vectors(S, bound):
    """Yield int64 arrays (chunks) of all x in Z^k with ``x^t S x <= bound``.

    The zero vector is included.  Chunks come out in a deterministic order.
    """
    S = _integral(S)
    k = S.shape[0]
    if bound < 0:
        return
    d, u = _ldl_float(_key(S))
    budget_top = bound * (1 + _SLACK) + _SLACK
    # state: coords fixed so far, partial norm, accumulated centres for every index
    stack = [(k - 1, np.zeros((1, k), dtype=np.int64), np.zeros(1), np.zeros((1, k)))]
    while stack:
        i, X, part, cent = stack.pop()
        rem = np.maximum(budget_top - part, 0.0)
        half = np.sqrt(rem / d[i]) + _SLACK
        lo = np.ceil(-cent[:, i] - half).astype(np.int64)
        hi = np.floor(-cent[:, i] + half).astype(np.int64)
        lens = np.maximum(hi - lo + 1, 0)
        total = int(lens.sum())
        if total == 0:
            continue
        rep = np.repeat(np.arange(len(lens)), lens)
        starts = np.cumsum(lens) - lens
        xi = lo[rep] + (np.arange(total) - starts[rep])
        Xn = X[rep].copy()
        Xn[:, i] = xi
        pn = part[rep] + d[i] * (xi + cent[rep, i]) ** 2
        keep = pn <= budget_top
        Xn, pn = Xn[keep], pn[keep]
        if i == 0:
            if len(Xn):
                norms = np.einsum("ij,jk,ik->i", Xn, S, Xn)
                yield Xn[norms <= bound]
            continue
        cn = cent[rep][keep]
        cn[:, :i] += xi[keep][:, None] * u[:i, i][None, :]
        # push in reverse so chunks pop in ascending order of the current coordinate
        for s in reversed(range(0, len(Xn), _CHUNK)):
            stack.append((i - 1, Xn[s:s + _CHUNK], pn[s:s + _CHUNK], cn[s:s + _CHUNK]))


def short_vectors(S, bound) -> np.ndarray:
    """All x with ``x^t S x <= bound`` as one (N, k) int64 array."""
    S = _integral(S)
    chunks = list(iter_short_vectors(S, bound))
    if not chunks:
        return np.zeros((0, S.shape[0]), dtype=np.int64)
    return np.concatenate(chunks)


def lattice_points(S, bound, n: int = 1) -> np.ndarray:
    """All integral k x n matrices lam with ``tr(S lam t(lam)) <= bound``.

    For n = 1 returns shape (N, k); otherwise (N, k, n).
    """
    vecs = short_vectors(S, bound)
    if n == 1:
        return vecs
    S = _integral(S)
    norms = np.einsum("ij,jk,ik->i", vecs, S, vecs)
    order = np.argsort(norms, kind="stable")
    vecs, norms = vecs[order], norms[order]
    out = []

    def rec(cols, used):
        if len(cols) == n:
            out.append(np.stack(cols, axis=1))
            return
        for v, nv in zip(vecs, norms):
            if used + nv > bound:
                break
            rec(cols + [v], used + nv)

    rec([], 0)
    if not out:
        return np.zeros((0, S.shape[0], n), dtype=np.int64)
    return np.stack(out)


@lru_cache(maxsize=32)
def _minimum_norm(key) -> int:
    S = np.array(key[1], dtype=np.int64).reshape(key[0], key[0])
    bound = int(np.diag(S).min())
    vecs = short_vectors(S, bound)
    norms = np.einsum("ij,jk,ik->i", vecs, S, vecs)
    return int(norms[norms > 0].min())


def minimum_norm(S) -> int:
    """Exact minimum of x^t S x over nonzero integral x."""
    return _minimum_norm(_key(_integral(S)))


@lru_cache(maxsize=32)
def _inverse_diag(key):
    S = np.array(key[1], dtype=object).reshape(key[0], key[0])
    Si = exact.inv(exact.qmat(S))
    return np.array([float(Si[i, i]) for i in range(key[0])])


def count_bound(S, r: float, n: int = 1) -> float:
    """Upper bound for #{lam in Z^{(k,n)} : tr(S[lam]) <= r}.

    Minimum of the box count (|x_i| <= sqrt(r (S^{-1})_ii)) and the packing
    count ((sqrt r + rho)/rho)^k with rho half the minimal length.
    """
    if r < 0:
        return 0.0
    S = _integral(S)
    key = _key(S)
    k = key[0]
    box = float(np.prod(2 * np.floor(np.sqrt(r * _inverse_diag(key)) + 1e-12) + 1))
    rho = math.sqrt(_minimum_norm(key)) / 2
    pack = ((math.sqrt(r) + rho) / rho) ** k
    return min(box, pack) ** n


def tail_majorant(S, bound: float, y_min: float, lin: float = 0.0,
                  poly: tuple = (1.0,), n: int = 1) -> float:
    """Bound ``sum_{N(lam) > bound} g(N(lam))`` with N = tr(S[lam]) and

        g(r) = (sum_d poly[d] r^{d/2}) * exp(-pi y_min r + 2 pi lin sqrt(r)).

    Uses Abel summation against :func:`count_bound` on unit shells with the
    nonincreasing envelope of g, then a geometric bound for the remainder.
    """
    if y_min <= 0:
        raise DomainError("y_min must be positive")

    def logg(r):
        p = sum(c * r ** (d / 2) for d, c in enumerate(poly))
        if p <= 0:
            return -math.inf
        return math.log(p) - math.pi * y_min * r + 2 * math.pi * lin * math.sqrt(r)

    # past r_dec every factor of g is decreasing in r
    deg = len(poly) - 1
    r_dec = max(bound, (2 * lin / y_min) ** 2 + deg / (math.pi * y_min) + 1.0)
    r_end = r_dec + 60.0 / (math.pi * y_min) + 10.0
    steps = int(math.ceil(r_end - bound))
    grid = [bound + j for j in range(steps + 2)]
    lg = [logg(r) for r in grid]
    env = lg[:]
    for j in range(len(env) - 2, -1, -1):
        env[j] = max(env[j], env[j + 1])
    total = 0.0
    for j in range(steps + 1):
        # on (grid[j], grid[j+1]]: count <= count_bound(grid[j+1]), g <= envelope
        if env[j] == -math.inf:
            continue
        gj = math.exp(env[j])
        gj1 = math.exp(env[j + 1]) if env[j + 1] > -math.inf else 0.0
        total += count_bound(S, grid[j + 1], n) * (gj - gj1)
    # remainder past the grid: packing count and g are both log-concave there,
    # so consecutive term ratios decrease and a geometric bound applies
    r0 = grid[-1]
    rho = math.sqrt(_minimum_norm(_key(_integral(S)))) / 2
    k = np.asarray(S).shape[0]

    def pack(r):
        return ((math.sqrt(r) + rho) / rho) ** (k * n)

    t0 = pack(r0 + 1) * math.exp(logg(r0))
    t1 = pack(r0 + 2) * math.exp(logg(r0 + 1))
    q = t1 / t0 if t0 > 0 else 0.0
    if q >= 1:
        return math.inf
    total += t0 / (1 - q)
    return total
