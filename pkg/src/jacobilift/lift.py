"""The lift ``f -> f_P(Z) = P(d/dW) f(Z, W)|_{W=0}`` and its certification.

For a Jacobi form f of weight det^k and index M, and a homogeneous
polynomial P that is pluriharmonic with respect to ``S = (2M)^{-1}``, the map
``P -> f_P`` satisfies

    f_{P~}(M<Z>) = det(CZ+D)^k f_P(Z),    P~(W) = P(W t(CZ+D)^{-1}).

Both sides are evaluated from truncated series and compared in the chosen
basis of pluriharmonic polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Union

import numpy as np

from . import exact
from .errors import DimensionError, DomainError
from .forms import (
    EisensteinSpec,
    SeriesValue,
    ThetaForm,
    TruncationPolicy,
    _eisenstein_grid,
    _lattice_sum,
    _outer,
    _poly_profile,
    _completion,
    coset_key,
    coset_reps,
    theta_eval,
)
from .matgroup import SiegelPoint, SymplecticElement, automorphy_cz_d, inversion, siegel_action, translation
from .polyharm import PluriharmonicBasis, QuadFormS, SparsePoly, is_pluriharmonic, poly_eval_many, tau_matrix
from .report import VerificationReport, complex_json, scaled_residual

__all__ = [
    "LiftSpec",
    "LiftValue",
    "lift_fP",
    "lift_fP_fd",
    "lift_ftau",
    "main_theorem_check",
    "identity_I_check",
    "identity_II_check",
    "gamma1_generators",
    "random_gamma1_word",
]

Source = Union[ThetaForm, EisensteinSpec]


@dataclass
class LiftSpec:
    """A Jacobi form together with a basis of pluriharmonic polynomials for ``(2M)^{-1}``."""

    source: Source
    basis: PluriharmonicBasis
    k: int | None = None
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)

    def __post_init__(self):
        M = self.source.index.M
        want = exact.inv(2 * M)
        if self.basis.m != M.shape[0]:
            raise DimensionError(f"basis has m={self.basis.m}, index has m={M.shape[0]}")
        if not exact.mat_eq(self.basis.S.S, want):
            raise DomainError("basis must be pluriharmonic with respect to (2M)^{-1}")
        if isinstance(self.source, EisensteinSpec) and self.basis.n != 1:
            raise DimensionError("Eisenstein lifts are implemented for n = 1 only")
        if self.k is None:
            self.k = self.source.k

    @classmethod
    def for_source(cls, source: Source, degree: int, n: int = 1, **kw) -> LiftSpec:
        from .polyharm import pluriharmonic_basis
        S = QuadFormS(exact.inv(2 * source.index.M))
        return cls(source, pluriharmonic_basis(S, degree, n), **kw)

    @property
    def n(self) -> int:
        return self.basis.n


@dataclass
class LiftValue:
    """Coordinates ``(f_{P_1}(Z), ..., f_{P_r}(Z))`` in the basis order."""

    values: list

    def __len__(self):
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.array([complex(v.value) for v in self.values])

    def to_dict(self) -> dict:
        return {"values": [v.to_dict() for v in self.values]}


def _check_poly(spec: LiftSpec, P: SparsePoly):
    if (P.m, P.n) != (spec.basis.m, spec.basis.n):
        raise DimensionError(f"P lives on C^({P.m},{P.n}), basis on C^({spec.basis.m},{spec.basis.n})")
    if not P.is_homogeneous():
        raise DomainError("P must be homogeneous")
    if not is_pluriharmonic(spec.basis.S, P):
        raise DomainError("P is not pluriharmonic with respect to (2M)^{-1}")


def _as_point(Z) -> SiegelPoint:
    return Z if isinstance(Z, SiegelPoint) else SiegelPoint(Z)


def _theta_lift(f: ThetaForm, P: SparsePoly, Z: SiegelPoint, policy, X=None) -> SeriesValue:
    """``sum_lam P(2 pi i t(c) S lam t(X)) e^{pi i tr(S[lam] Z)}``; X defaults to E."""
    xn = 1.0 if X is None else float(np.linalg.norm(X, 2))

    def weight(R):
        A = 2j * np.pi * R.astype(complex)
        if X is not None:
            A = A @ X.T
        return poly_eval_many(P, A)

    return _lattice_sum(f, Z, weight, 0.0, _poly_profile(P, 2 * np.pi * f.kappa * xn), policy)


def _eis_lift_terms(E: EisensteinSpec, P: SparsePoly, z: complex, reps, lmax: int,
                    extra_j: complex = 1.0):
    """Termwise ``j^{-k} P(4 pi i M lam / (j * extra_j)) e(lam'M lam g<z>)`` for P homogeneous.

    Pluriharmonicity of P kills the quadratic exponential, so only the
    linear part of the W-exponent survives differentiation.
    """
    pol = TruncationPolicy(cmax=max(1, int(np.abs(reps[:, 2:]).max())), lmax=lmax)
    _, j, gz, lam, q, Mf = _eisenstein_grid(E, z, pol, reps=reps)
    d = P.degree() if not P.is_zero() else 0
    pl = poly_eval_many(P, 4j * np.pi * (lam @ Mf).reshape(len(lam), -1, 1))
    scal = j ** (-E.k) * (j * extra_j) ** (-d)
    return scal[:, None] * pl[None, :] * np.exp(2j * np.pi * np.outer(gz, q)), lam


def _eis_lift(E: EisensteinSpec, P: SparsePoly, Z: SiegelPoint, policy: TruncationPolicy) -> SeriesValue:
    if Z.n != 1:
        raise DimensionError("Eisenstein lifts are implemented for n = 1 only")
    reps = coset_reps(policy.cmax)
    terms, lam = _eis_lift_terms(E, P, complex(Z.Z[0, 0]), reps, policy.lmax)
    c_edge, l_edge = _outer(reps, lam, policy.cmax, policy.lmax)
    tail = float(np.abs(terms[c_edge]).sum() + np.abs(terms[~c_edge][:, l_edge]).sum())
    return SeriesValue(complex(terms.sum()), tail, int(terms.size))


def lift_fP(spec: LiftSpec, P: SparsePoly, Z, check: bool = True) -> SeriesValue:
    """``P(d/dW) f(Z, W)`` at W = 0, differentiated analytically term by term."""
    if check:
        _check_poly(spec, P)
    Z = _as_point(Z)
    if Z.n != spec.n:
        raise DimensionError(f"Z has degree {Z.n}, basis has n={spec.n}")
    if isinstance(spec.source, ThetaForm):
        return _theta_lift(spec.source, P, Z, spec.policy)
    if check is False and not is_pluriharmonic(spec.basis.S, P):
        raise DomainError("Eisenstein lifts need a pluriharmonic P")
    return _eis_lift(spec.source, P, Z, spec.policy)


def lift_fP_fd(spec: LiftSpec, P: SparsePoly, Z, h: float = 1e-5) -> complex:
    """Central-difference approximation of ``P(d/dW) f(Z, W)|_{W=0}``.

    Each monomial ``d^e`` uses the tensor product of the order-e_v central
    stencils ``sum_j (-1)^j C(e,j) f(.. + (e/2 - j) h ..) / h^e``.
    """
    Z = _as_point(Z)
    m, n = spec.basis.m, spec.basis.n
    src = spec.source

    def f(W):
        if isinstance(src, ThetaForm):
            return complex(theta_eval(src, Z, W, spec.policy).value)
        return complex(src(Z, W, spec.policy).value)

    cache: dict = {}
    total = 0j
    for e, c in P.items():
        stencils = [[((x / 2 - j) * h, (-1) ** j * comb(x, j)) for j in range(x + 1)]
                    if x else [(0.0, 1)] for x in e]
        acc = 0j
        for combo in np.ndindex(*[len(s) for s in stencils]):
            shift = np.array([stencils[v][i][0] for v, i in enumerate(combo)])
            wgt = np.prod([stencils[v][i][1] for v, i in enumerate(combo)])
            key = tuple(np.round(shift / h * 2).astype(int))
            if key not in cache:
                cache[key] = f(shift.reshape(m, n).astype(complex))
            acc += wgt * cache[key]
        total += complex(c) * acc / h ** sum(e)
    return total


def lift_ftau(spec: LiftSpec, Z) -> LiftValue:
    """The vector ``(f_P(Z))_P`` over the basis, in basis order."""
    Z = _as_point(Z)
    return LiftValue([lift_fP(spec, P, Z) for P in spec.basis])


def _mat_json(M) -> list:
    A = M.M if isinstance(M, SymplecticElement) else M
    return [[str(x) for x in row] for row in A]


def _z_json(Z: SiegelPoint):
    return complex_json(Z.Z[0, 0]) if Z.n == 1 else [[complex_json(x) for x in r] for r in Z.Z]


def main_theorem_check(spec: LiftSpec, M: SymplecticElement, Z, tol: float,
                       k: int | None = None, report: VerificationReport | None = None) -> VerificationReport:
    """Check ``sum_j T_ji f_{P_j}(M<Z>) = det(CZ+D)^k f_{P_i}(Z)`` for every basis element.

    T is the matrix of ``P -> P(W t(CZ+D)^{-1})`` in the basis, so the left side
    is ``f_{P~_i}(M<Z>)``.  ``k`` overrides the weight (negative controls).
    """
    Z = _as_point(Z)
    k = spec.k if k is None else k
    rep = report or VerificationReport("main-theorem", tol)
    cz_d = automorphy_cz_d(M, Z.Z)
    X = np.linalg.inv(cz_d)
    T = tau_matrix(X.T, spec.basis)
    T = exact.to_complex(T) if exact.is_exact(np.asarray(T)) else np.asarray(T, dtype=complex)
    MZ = siegel_action(M, Z)
    at_MZ = lift_ftau(spec, MZ)
    at_Z = lift_ftau(spec, Z)
    vMZ, vZ = at_MZ.array(), at_Z.array()
    tMZ = np.array([v.tail_bound for v in at_MZ.values])
    tZ = np.array([v.tail_bound for v in at_Z.values])
    dk = np.linalg.det(cz_d) ** k
    for i in range(len(spec.basis)):
        lhs = complex(T[:, i] @ vMZ)
        rhs = complex(dk * vZ[i])
        tail = float(np.abs(T[:, i]) @ tMZ + abs(dk) * tZ[i])
        rep.add(scaled_residual(lhs, rhs), tail, M=_mat_json(M), Z=_z_json(Z), basis_index=i,
                lhs=complex_json(lhs), rhs=complex_json(rhs))
    rep.metadata.setdefault("weight", k)
    rep.metadata.setdefault("degree", spec.basis.degree)
    rep.metadata.setdefault("basis_size", len(spec.basis))
    return rep


def identity_I_check(theta: ThetaForm, P: SparsePoly, M: SymplecticElement, Z,
                     policy: TruncationPolicy | None = None, tol: float = 1e-7,
                     report: VerificationReport | None = None) -> VerificationReport:
    """``sum P(2 pi i t(c)S lam t(CZ+D)^{-1}) e^{pi i S[lam] M<Z>} = det(CZ+D)^k sum P(2 pi i t(c)S lam) e^{pi i S[lam] Z}``."""
    policy = policy or TruncationPolicy()
    Z = _as_point(Z)
    S = QuadFormS(exact.inv(2 * theta.index.M))
    if (P.m, P.n) != (theta.m, Z.n):
        raise DimensionError(f"P must live on C^({theta.m},{Z.n})")
    if not is_pluriharmonic(S, P):
        raise DomainError("P is not pluriharmonic with respect to (t(c) S c)^{-1}")
    rep = report or VerificationReport("identity-I", tol)
    cz_d = automorphy_cz_d(M, Z.Z)
    X = np.linalg.inv(cz_d)
    lhs = _theta_lift(theta, P, siegel_action(M, Z), policy, X=X)
    rhs = _theta_lift(theta, P, Z, policy)
    dk = np.linalg.det(cz_d) ** theta.k
    rv = dk * rhs.value
    rep.add(scaled_residual(lhs.value, rv), lhs.tail_bound + abs(dk) * rhs.tail_bound,
            M=_mat_json(M), Z=_z_json(Z), lhs=complex_json(lhs.value), rhs=complex_json(rv),
            radius=[lhs.radius, rhs.radius])
    return rep


def _int_matrix(M: SymplecticElement) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in M.M], dtype=np.int64)


def _reindexed_reps(reps: np.ndarray, M: SymplecticElement) -> np.ndarray:
    """Canonical representatives of the cosets of ``delta M^{-1}``, delta in reps."""
    Mi, Mm = _int_matrix(M.inverse()), _int_matrix(M)
    out = []
    for a, b, c, d in reps:
        cc, dd = coset_key(*(np.array([[a, b], [c, d]]) @ Mi).ravel())
        aa, bb = _completion(int(cc), int(dd))
        out.append((aa, bb, cc, dd))
    out = np.array(out, dtype=np.int64)
    back = {coset_key(*(r.reshape(2, 2) @ Mm).ravel()) for r in out}
    if back != {(int(r[2]), int(r[3])) for r in reps} or len(back) != len(reps):
        raise DomainError("truncation asymmetry: reindexed cosets do not match the original set")
    return out


def identity_II_check(E: EisensteinSpec, P: SparsePoly, M: SymplecticElement, Z,
                      policy: TruncationPolicy | None = None, tol: float = 1e-4,
                      reindex: bool = True, report: VerificationReport | None = None) -> VerificationReport:
    """The Eisenstein form of the lift identity for n = 1.

    Left: ``j(M,Z)^k sum_{gamma, lam} j(gamma,Z)^{-k} P(4 pi i M lam / j(gamma,Z)) e(M[lam] gamma<Z>)``.
    Right: ``sum j(gamma,M<Z>)^{-k} P(4 pi i M lam / j(gamma M,Z)) e(M[lam] gamma<M<Z>>)``.

    With ``reindex`` the right side runs over ``gamma = delta M^{-1}`` for the same
    truncated set of deltas as the left side, so both sides sum identical terms.
    Otherwise both sides use the same truncated coset set directly and the
    residual includes truncation error.
    """
    policy = policy or TruncationPolicy()
    Z = _as_point(Z)
    if Z.n != 1 or M.n != 1:
        raise DimensionError("identity II is implemented for n = 1 only")
    S = QuadFormS(exact.inv(2 * E.index.M))
    if (P.m, P.n) != (E.m, 1) or not P.is_homogeneous():
        raise DimensionError(f"P must be homogeneous on C^({E.m},1)")
    if not is_pluriharmonic(S, P):
        raise DomainError("P is not pluriharmonic with respect to (2M)^{-1}")
    rep = report or VerificationReport("identity-II", tol)
    z = complex(Z.Z[0, 0])
    jM = complex(automorphy_cz_d(M, Z.Z)[0, 0])
    Mz = complex(siegel_action(M, Z).Z[0, 0])
    reps = coset_reps(policy.cmax)
    left, lam = _eis_lift_terms(E, P, z, reps, policy.lmax)
    right_reps = _reindexed_reps(reps, M) if reindex else reps
    right, _ = _eis_lift_terms(E, P, Mz, right_reps, policy.lmax, extra_j=jM)
    c_edge, l_edge = _outer(reps, lam, policy.cmax, policy.lmax)

    def tail(t):
        return float(np.abs(t[c_edge]).sum() + np.abs(t[~c_edge][:, l_edge]).sum())

    lv = jM ** E.k * complex(left.sum())
    rv = complex(right.sum())
    rep.add(scaled_residual(lv, rv), 0.0, M=_mat_json(M), Z=_z_json(Z), lhs=complex_json(lv),
            rhs=complex_json(rv), tail_lhs=abs(jM) ** E.k * tail(left), tail_rhs=tail(right),
            cmax=policy.cmax, lmax=policy.lmax, reindex=reindex)
    return rep


def gamma1_generators() -> dict:
    return {"T": translation([[1]]), "T^-1": translation([[-1]]), "S": inversion(1)}


def random_gamma1_word(rng: np.random.Generator, Z, max_len: int = 3, min_imag: float = 0.4,
                       max_tries: int = 1000):
    """A random word of length 1..max_len in T, T^-1, S with ``Im M<Z> >= min_imag``.

    Returns (word, element).  Rejection sampling keeps the image away from
    the real axis, where the truncated series need impractically large radii.
    """
    gens = gamma1_generators()
    names = sorted(gens)
    Z = _as_point(Z)
    for _ in range(max_tries):
        length = int(rng.integers(1, max_len + 1))
        word = [names[int(i)] for i in rng.integers(0, len(names), size=length)]
        g = SymplecticElement.identity(1)
        for w in word:
            g = g @ gens[w]
        if siegel_action(g, Z).y_min >= min_imag:
            return word, g
    raise DomainError("could not sample a word with the requested image height")
