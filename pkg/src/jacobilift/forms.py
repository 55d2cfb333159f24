"""Concrete Jacobi forms: lattice theta series and the degree-one Eisenstein
series, with truncation-controlled evaluation, exact Fourier tables and the
weight-k, index-M slash operator.

Theta series
    ``theta_{S,c}(Z, W) = sum_lam exp(pi i tr(S (lam Z t(lam) + 2 lam t(cW))))``
    over integral 2k x n matrices lam.  The sum is grouped by the pair
    ``(t(lam) S lam, t(c) S lam)`` so repeated evaluations cost one pass over
    a small table.

Eisenstein series (n = 1)
    ``sum_{(c,d)} (cz+d)^{-k} e(-c w'Mw/(cz+d)) sum_lam e(l'Ml gz + 2 l'Mw/(cz+d))``
    over coprime (c, d) modulo +-1 and lam in Z^m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exact, lattice
from .errors import DimensionError, DomainError, TruncationError
from .matgroup import (
    JacobiDomainPoint,
    JacobiElement,
    SiegelPoint,
    automorphy_cz_d,
    jacobi_action,
    psd_check_exact,
)
from .report import VerificationReport, complex_json, scaled_residual

__all__ = [
    "E8_GRAM",
    "EvenUnimodularForm",
    "HalfIntegralIndex",
    "ThetaForm",
    "TruncationPolicy",
    "SeriesValue",
    "FourierCoeffTable",
    "EisensteinSpec",
    "e8",
    "theta_table",
    "theta_radius",
    "theta_eval",
    "theta_fourier",
    "slash_action",
    "jacobi_invariance_check",
    "coset_reps",
    "eisenstein_eval",
]

# Cartan matrix of E8; nodes 0..7 with the branch at node 3.
_E8_EDGES = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
E8_GRAM = 2 * np.eye(8, dtype=np.int64)
for _i, _j in _E8_EDGES:
    E8_GRAM[_i, _j] = E8_GRAM[_j, _i] = -1
E8_GRAM.flags.writeable = False

_MAX_POINTS = 6e7


class EvenUnimodularForm:
    """Positive definite, even, unimodular integral Gram matrix of size 2k."""

    def __init__(self, S):
        Sq = exact.qmat(S)
        if Sq.ndim != 2 or Sq.shape[0] != Sq.shape[1]:
            raise DimensionError(f"Gram matrix must be square, got {Sq.shape}")
        if any(x.denominator != 1 for x in Sq.flat):
            raise DomainError("Gram matrix must be integral")
        if not exact.mat_eq(Sq, Sq.T):
            raise DomainError("Gram matrix must be symmetric")
        if any(Sq[i, i] % 2 for i in range(Sq.shape[0])):
            raise DomainError("Gram matrix must have even diagonal")
        if Sq.shape[0] % 2:
            raise DomainError("Gram matrix must have even size")
        lattice.ldl_exact(Sq)  # raises unless positive definite
        if exact.det(Sq) != 1:
            raise DomainError("Gram matrix must be unimodular")
        self.S = np.array([[int(x) for x in row] for row in Sq], dtype=np.int64)
        self.S.flags.writeable = False

    @property
    def k(self) -> int:
        return self.S.shape[0] // 2

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    def __eq__(self, other):
        return isinstance(other, EvenUnimodularForm) and np.array_equal(self.S, other.S)

    def __hash__(self):
        return hash(self.S.tobytes())

    def __repr__(self):
        return f"EvenUnimodularForm(rank={self.rank})"


def e8() -> EvenUnimodularForm:
    return EvenUnimodularForm(E8_GRAM)


class HalfIntegralIndex:
    """Symmetric M with 2M integral and even on the diagonal, M >= 0."""

    def __init__(self, M, definite: bool = False):
        Mq = exact.qmat(M)
        if Mq.ndim != 2 or Mq.shape[0] != Mq.shape[1]:
            raise DimensionError(f"index must be square, got {Mq.shape}")
        if not exact.mat_eq(Mq, Mq.T):
            raise DomainError("index must be symmetric")
        two = 2 * Mq
        if any(x.denominator != 1 for x in two.flat) or any(Mq[i, i].denominator != 1
                                                            for i in range(Mq.shape[0])):
            raise DomainError("index must be half-integral")
        if not psd_check_exact(Mq):
            raise DomainError("index must be positive semidefinite")
        if definite and exact.det(Mq) == 0:
            raise DomainError("index must be positive definite")
        Mq.flags.writeable = False
        self.M = Mq

    @property
    def m(self) -> int:
        return self.M.shape[0]

    @property
    def is_definite(self) -> bool:
        return exact.det(self.M) != 0

    def complex(self) -> np.ndarray:
        return exact.to_complex(self.M)

    def __eq__(self, other):
        return isinstance(other, HalfIntegralIndex) and exact.mat_eq(self.M, other.M)

    def __hash__(self):
        return hash(tuple(self.M.flat))

    def __repr__(self):
        return f"HalfIntegralIndex({[[str(x) for x in r] for r in self.M]})"


class ThetaForm:
    """theta_{S,c}: weight k = rank/2, index ``t(c) S c / 2``."""

    def __init__(self, lattice_form: EvenUnimodularForm, c):
        c = np.array(c, dtype=np.int64)
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        if c.shape[0] != lattice_form.rank:
            raise DimensionError(f"c must have {lattice_form.rank} rows, got {c.shape}")
        G = c.T @ lattice_form.S @ c
        if exact.det(exact.qmat(G)) == 0:
            raise DomainError("t(c) S c must be positive definite")
        c.flags.writeable = False
        self.lattice = lattice_form
        self.c = c
        self.index = HalfIntegralIndex(exact.qmat(G) / 2, definite=True)

    @classmethod
    def e8(cls, c=None) -> ThetaForm:
        if c is None:
            c = np.eye(8, 1, dtype=np.int64)
        return cls(e8(), c)

    @property
    def k(self) -> int:
        return self.lattice.k

    @property
    def m(self) -> int:
        return self.c.shape[1]

    @property
    def kappa(self) -> float:
        """sqrt of the top eigenvalue of t(c) S c; bounds |t(c) S lam| by kappa sqrt(N)."""
        G = (self.c.T @ self.lattice.S @ self.c).astype(float)
        return float(math.sqrt(np.linalg.eigvalsh(G).max()))

    def _key(self):
        return (self.lattice.S.tobytes(), self.lattice.rank, self.c.tobytes(), self.c.shape)

    def __call__(self, Z, W, policy: TruncationPolicy | None = None) -> SeriesValue:
        return theta_eval(self, Z, W, policy)

    def __repr__(self):
        return f"ThetaForm(rank={self.lattice.rank}, m={self.m})"


@dataclass(frozen=True)
class TruncationPolicy:
    """radius=None selects the smallest lattice radius meeting ``eps``."""

    radius: float | None = None
    cmax: int = 24
    lmax: int = 24
    eps: float = 1e-9
    max_radius: float = 200.0

    def __post_init__(self):
        if self.radius is not None and self.radius < 0:
            raise DomainError("radius must be nonnegative")
        if self.cmax < 1 or self.lmax < 1:
            raise DomainError("cmax and lmax must be positive")
        if not self.eps > 0:
            raise DomainError("eps must be positive")


@dataclass
class SeriesValue:
    """A truncated series value with an error estimate for the omitted part."""

    value: complex
    tail_bound: float
    terms_used: int
    radius: float = 0.0

    def __complex__(self):
        return complex(self.value)

    def to_dict(self) -> dict:
        return {"value": complex_json(self.value), "tail_bound": self.tail_bound,
                "terms_used": self.terms_used}


# ---------------------------------------------------------------- theta

_TABLES: dict = {}


@dataclass
class _ThetaTable:
    bound: float
    N2: np.ndarray      # (K, n, n) integer t(lam) S lam
    R: np.ndarray       # (K, m, n) integer t(c) S lam
    count: np.ndarray   # (K,)

    def restrict(self, bound: float) -> _ThetaTable:
        tr = np.trace(self.N2, axis1=1, axis2=2)
        keep = tr <= bound
        return _ThetaTable(bound, self.N2[keep], self.R[keep], self.count[keep])


def _group(keys: np.ndarray, weights: np.ndarray):
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    return uniq, np.bincount(inv.ravel(), weights=weights, minlength=len(uniq)).astype(np.int64)


def _build_table(f: ThetaForm, bound: float, n: int) -> _ThetaTable:
    S, c, m = f.lattice.S, f.c, f.m
    Sc = S @ c
    if n == 1:
        # pack (N, R) into one int64 so grouping is a 1-d unique
        off = int(math.ceil(f.kappa * math.sqrt(max(bound, 0.0)))) + 1
        base = 2 * off + 1
        keys, counts = [], []
        for X in lattice.iter_short_vectors(S, bound):
            code = np.einsum("ij,jk,ik->i", X, S, X)
            for col in (X @ Sc).T:
                code = code * base + (col + off)
            u, cnt = np.unique(code, return_counts=True)
            keys.append(u)
            counts.append(cnt)
        u, inv = np.unique(np.concatenate(keys), return_inverse=True)
        cnt = np.bincount(inv, weights=np.concatenate(counts)).astype(np.int64)
        R = np.empty((len(u), m), dtype=np.int64)
        for i in reversed(range(m)):
            u, R[:, i] = np.divmod(u, base)
        R -= off
        return _ThetaTable(bound, u.reshape(-1, 1, 1), R.reshape(-1, m, 1), cnt)
    L = lattice.lattice_points(S, bound, n)
    N2 = np.einsum("pia,ij,pjb->pab", L, S, L)
    R = np.einsum("ia,pib->pab", Sc, L)
    k, w = _group(np.concatenate([N2.reshape(len(L), -1), R.reshape(len(L), -1)], axis=1),
                  np.ones(len(L)))
    return _ThetaTable(bound, k[:, :n * n].reshape(-1, n, n), k[:, n * n:].reshape(-1, m, n), w)


def theta_table(f: ThetaForm, bound: float, n: int = 1) -> _ThetaTable:
    """Grouped lattice data for ``tr(t(lam) S lam) <= bound``, cached per form."""
    key = (f._key(), n)
    cached = _TABLES.get(key)
    if cached is not None and cached.bound >= bound:
        return cached.restrict(bound)
    est = lattice.count_bound(f.lattice.S, bound, n)
    if est > _MAX_POINTS and (n > 1 or bound > 64):
        raise TruncationError(f"radius {bound} would enumerate up to {est:.2e} lattice points")
    table = _build_table(f, bound, n)
    _TABLES[key] = table
    return table


def _poly_profile(P, scale: float) -> tuple:
    """Coefficients (by powers of sqrt N) bounding |P(x)| for ``|x|_F <= scale sqrt N``."""
    if P is None:
        return (1.0,)
    prof = {}
    for e, cf in P.items():
        d = sum(e)
        prof[d] = prof.get(d, 0.0) + abs(complex(cf)) * scale ** d
    top = max(prof, default=0)
    return tuple(prof.get(d, 0.0) for d in range(top + 1)) or (0.0,)


def theta_radius(f: ThetaForm, y_min: float, lin: float, eps: float,
                 poly: tuple = (1.0,), n: int = 1, max_radius: float = 200.0) -> float:
    """Smallest even radius whose tail majorant is at most eps."""
    S = f.lattice.S
    r = 0
    while r <= max_radius:
        if lattice.tail_majorant(S, r, y_min, lin, poly, n) <= eps:
            return float(r)
        r += 2
    raise TruncationError(f"no radius up to {max_radius} reaches tail {eps:g}")


def _lattice_sum(f: ThetaForm, Z, weight: Callable, lin: float, poly: tuple,
                 policy: TruncationPolicy | None) -> SeriesValue:
    """``sum count * weight(R) * exp(pi i tr(N2 Z))`` over the grouped table."""
    policy = policy or TruncationPolicy()
    Zp = Z if isinstance(Z, SiegelPoint) else SiegelPoint(Z)
    n = Zp.n
    y = Zp.y_min
    if policy.radius is None:
        radius = theta_radius(f, y, lin, policy.eps, poly, n, policy.max_radius)
    else:
        radius = float(policy.radius)
    tail = lattice.tail_majorant(f.lattice.S, radius, y, lin, poly, n)
    if tail > policy.eps:
        raise TruncationError(f"tail bound {tail:.3e} at radius {radius:g} exceeds "
                              f"{policy.eps:g}; increase the radius")
    t = theta_table(f, radius, n)
    phase = np.exp(1j * np.pi * np.einsum("pab,ba->p", t.N2.astype(float), Zp.Z))
    w = weight(t.R)
    value = complex(np.sum(t.count * w * phase))
    return SeriesValue(value, tail, int(t.count.sum()), radius)


def _as_W(W, m: int, n: int) -> np.ndarray:
    W = np.array(W, dtype=complex)
    if W.ndim == 0:
        W = W.reshape(1, 1)
    if W.ndim == 1 and n == 1:
        W = W.reshape(-1, 1)
    if W.shape != (m, n):
        raise DimensionError(f"W must be {m}x{n}, got {W.shape}")
    return W


def theta_eval(f: ThetaForm, Z, W, policy: TruncationPolicy | None = None) -> SeriesValue:
    """Truncated theta series with a rigorous tail majorant.

    Terms are bounded by ``exp(-pi y_min N + 2 pi kappa |Im W|_F sqrt N)`` with
    N = tr(t(lam) S lam), and the number of lattice points by box and packing
    counts (see :func:`lattice.tail_majorant`).
    """
    Zp = Z if isinstance(Z, SiegelPoint) else SiegelPoint(Z)
    W = _as_W(W, f.m, Zp.n)
    lin = f.kappa * float(np.linalg.norm(W.imag))
    return _lattice_sum(f, Zp, lambda R: np.exp(2j * np.pi * np.einsum("pab,ab->p", R, W)),
                        lin, (1.0,), policy)


@dataclass
class FourierCoeffTable:
    """c(T, R) keyed by (T, R) with T a Fraction (n = 1) and R an integer tuple."""

    index: HalfIntegralIndex
    T_bound: Fraction
    coeffs: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.coeffs.get(key, 0)

    def keys(self):
        return sorted(self.coeffs)

    def shell(self, T) -> dict:
        T = Fraction(T)
        return {R: v for (t, R), v in self.coeffs.items() if t == T}

    def block(self, T, R) -> np.ndarray:
        """``[[T, R/2], [t(R)/2, M]]`` as an exact matrix."""
        m = self.index.m
        B = exact.zeros(1 + m, 1 + m)
        B[0, 0] = Fraction(T)
        for i, r in enumerate(R):
            B[0, 1 + i] = B[1 + i, 0] = Fraction(r, 2)
        B[1:, 1:] = self.index.M
        return B

    def check_support(self) -> bool:
        return all(psd_check_exact(self.block(T, R)) for T, R in self.coeffs)

    def to_json(self) -> list:
        return [{"T": exact.format_rational(T), "R": list(R), "c": int(v)}
                for (T, R), v in sorted(self.coeffs.items())]


def theta_fourier(f: ThetaForm, T_bound) -> FourierCoeffTable:
    """Exact counts ``c(T,R) = #{lam : S[lam]/2 = T, t(c) S lam = R}`` for T <= T_bound."""
    T_bound = Fraction(T_bound)
    if T_bound < 0:
        raise DomainError("T_bound must be nonnegative")
    t = theta_table(f, float(2 * T_bound) + 1e-9, 1)
    table = FourierCoeffTable(f.index, T_bound)
    for N2, R, cnt in zip(t.N2[:, 0, 0], t.R[:, :, 0], t.count):
        if Fraction(int(N2), 2) > T_bound:
            continue
        table.coeffs[(Fraction(int(N2), 2), tuple(int(x) for x in R))] = int(cnt)
    for T, R in table.coeffs:
        if not psd_check_exact(table.block(T, R)):
            raise AssertionError(f"coefficient ({T}, {R}) violates the support condition")
    return table


# ---------------------------------------------------------------- slash operator


def _index_complex(index) -> np.ndarray:
    if isinstance(index, HalfIntegralIndex):
        return index.complex()
    A = np.asarray(index)
    return exact.to_complex(A) if exact.is_exact(A) else np.atleast_2d(np.asarray(A, dtype=complex))


def _value_tail(v):
    if isinstance(v, SeriesValue):
        return complex(v.value), float(v.tail_bound)
    return complex(v), 0.0


def slash_action(f: Callable, k: int, index, g: JacobiElement, p: JacobiDomainPoint,
                 return_tail: bool = False):
    """``(f|_{k,M}[g])(Z, W)`` for scalar weight det^k.

    The factor is ``exp(-2 pi i tr(M[W'] (CZ+D)^{-1} C))`` times
    ``exp(2 pi i tr(M (lam Z t(lam) + 2 lam t(W) + kappa + mu t(lam))))`` times
    ``det(CZ+D)^{-k}``, with ``W' = W + lam Z + mu``.
    """
    Mi = _index_complex(index)
    Z, W = p.Z.Z, p.W
    lam, mu, kap = (exact.to_complex(a) for a in (g.h.lam, g.h.mu, g.h.kappa))
    C = exact.to_complex(g.M.C)
    cz_d = automorphy_cz_d(g.M, Z)
    X = np.linalg.inv(cz_d)
    Wp = W + lam @ Z + mu
    e1 = np.exp(-2j * np.pi * np.trace(Wp.T @ Mi @ Wp @ X @ C))
    e2 = np.exp(2j * np.pi * np.trace(Mi @ (lam @ Z @ lam.T + 2 * lam @ W.T + kap + mu @ lam.T)))
    factor = e1 * e2 * np.linalg.det(cz_d) ** (-k)
    val, tail = _value_tail(f(jacobi_action(g, p)))
    out = complex(factor * val)
    if return_tail:
        return out, abs(factor) * tail
    return out


def jacobi_invariance_check(f: Callable, k: int, index, generators, points, tol: float,
                            name: str = "jacobi-invariance") -> VerificationReport:
    """Residuals ``|(f|[g])(p) - f(p)|`` (scaled) over generators x points."""
    rep = VerificationReport(name, tol)
    for gi, g in enumerate(generators):
        for p in points:
            lhs, t1 = slash_action(f, k, index, g, p, return_tail=True)
            rhs, t2 = _value_tail(f(p))
            rep.add(scaled_residual(lhs, rhs), t1 + t2, generator=gi,
                    M=[[str(x) for x in row] for row in g.M.M],
                    Z=complex_json(p.Z.Z[0, 0]) if p.n == 1 else p.Z.Z.tolist())
    return rep


# ---------------------------------------------------------------- Eisenstein


class EisensteinSpec:
    """Degree-one Eisenstein series of weight k and positive definite index M."""

    def __init__(self, k: int, index):
        if not isinstance(index, HalfIntegralIndex):
            index = HalfIntegralIndex(index, definite=True)
        if not index.is_definite:
            raise DomainError("Eisenstein index must be positive definite")
        k = int(k)
        if k % 2 or k < 4:
            raise DomainError("weight must be even and at least 4")
        if k <= index.m + 2:
            raise DomainError(f"weight must exceed m + 2 = {index.m + 2}")
        self.k = k
        self.index = index

    @property
    def m(self) -> int:
        return self.index.m

    def __call__(self, Z, W, policy: TruncationPolicy | None = None) -> SeriesValue:
        return eisenstein_eval(self, Z, W, policy)

    def __repr__(self):
        return f"EisensteinSpec(k={self.k}, index={self.index!r})"


def _completion(c: int, d: int) -> tuple:
    """(a, b) with ad - bc = 1 and |b| minimal (ties: smaller |a|, then larger b)."""
    if d == 0:
        return 0, -1
    if c == 0:
        return 1, 0
    g, x, y = _egcd(d, c)   # x d + y c = 1
    a0, b0 = x, -y
    t = round(-b0 / d)
    best = None
    for tt in (t - 1, t, t + 1):
        a, b = a0 + tt * c, b0 + tt * d
        key = (abs(b), abs(a), -b)
        if best is None or key < best[0]:
            best = (key, a, b)
    return best[1], best[2]


def _egcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def coset_reps(cmax: int, shift: int = 0) -> np.ndarray:
    """Representatives (a, b, c, d) of the cosets of Gamma_{1,0} in SL2(Z).

    Coprime bottom rows with c >= 0, d > 0 when c = 0, and ``max(c, |d|) <= cmax``;
    the top row is shifted by ``shift`` times the bottom row.
    """
    out = []
    for c in range(0, cmax + 1):
        for d in range(-cmax, cmax + 1):
            if c == 0 and d <= 0:
                continue
            if math.gcd(c, d) != 1:
                continue
            a, b = _completion(c, d)
            a, b = a + shift * c, b + shift * d
            if a * d - b * c != 1:
                raise AssertionError(f"bad completion for ({c}, {d})")
            out.append((a, b, c, d))
    return np.array(out, dtype=np.int64)


def coset_key(a: int, b: int, c: int, d: int) -> tuple:
    """Canonical bottom row of the coset of (a b; c d)."""
    if c < 0 or (c == 0 and d < 0):
        c, d = -c, -d
    return (c, d)


def _lambda_box(m: int, lmax: int) -> np.ndarray:
    r = np.arange(-lmax, lmax + 1)
    return np.stack(np.meshgrid(*([r] * m), indexing="ij"), axis=-1).reshape(-1, m)


def _eisenstein_grid(E: EisensteinSpec, z: complex, policy: TruncationPolicy, shift: int = 0,
                     reps=None):
    reps = coset_reps(policy.cmax, shift) if reps is None else np.asarray(reps)
    a, b, c, d = (reps[:, i].astype(float) for i in range(4))
    j = c * z + d
    gz = (a * z + b) / j
    lam = _lambda_box(E.m, policy.lmax)
    Mf = exact.to_complex(E.index.M).real
    q = np.einsum("li,ij,lj->l", lam, Mf, lam)
    return reps, j, gz, lam, q, Mf


def _outer(reps, lam, cmax, lmax):
    c_edge = np.maximum(reps[:, 2], np.abs(reps[:, 3])) == cmax
    l_edge = np.abs(lam).max(axis=1) == lmax
    return c_edge, l_edge


def eisenstein_eval(E: EisensteinSpec, Z, W, policy: TruncationPolicy | None = None,
                    shift: int = 0) -> SeriesValue:
    """Truncated Eisenstein series; the tail estimate is the outermost-shell mass."""
    policy = policy or TruncationPolicy()
    Zp = Z if isinstance(Z, SiegelPoint) else SiegelPoint(Z)
    if Zp.n != 1:
        raise DimensionError("Eisenstein series are implemented for n = 1 only")
    z = complex(Zp.Z[0, 0])
    w = _as_W(W, E.m, 1)[:, 0]
    reps, j, gz, lam, q, Mf = _eisenstein_grid(E, z, policy, shift)
    c = reps[:, 2].astype(float)
    Mw = Mf @ w
    outer = j ** (-E.k) * np.exp(-2j * np.pi * c / j * (w @ Mw))
    inner = np.exp(2j * np.pi * (np.outer(gz, q) + 2 * np.outer(1 / j, lam @ Mw)))
    terms = outer[:, None] * inner
    c_edge, l_edge = _outer(reps, lam, policy.cmax, policy.lmax)
    tail = float(np.abs(terms[c_edge]).sum() + np.abs(terms[~c_edge][:, l_edge]).sum())
    return SeriesValue(complex(terms.sum()), tail, int(terms.size))
