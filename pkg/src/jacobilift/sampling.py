"""Seeded random group elements, points and polynomials for property checks."""

from __future__ import annotations

import numpy as np

from . import exact
from .matgroup import (
    HeisenbergElement,
    JacobiElement,
    SymplecticElement,
    inversion,
    rotation,
    translation,
)
from .polyharm import PluriharmonicBasis, SparsePoly

__all__ = [
    "random_symmetric_int",
    "random_unimodular",
    "random_symplectic",
    "random_heisenberg",
    "random_jacobi",
    "random_siegel_point",
    "random_W",
    "z_grid",
    "random_in_span",
]


def random_symmetric_int(rng: np.random.Generator, n: int, bound: int = 2) -> np.ndarray:
    A = rng.integers(-bound, bound + 1, size=(n, n))
    return np.triu(A) + np.triu(A, 1).T


def random_unimodular(rng: np.random.Generator, n: int, steps: int = 3) -> np.ndarray:
    """Product of random elementary integer matrices and sign flips."""
    U = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        if n > 1:
            i, j = rng.choice(n, size=2, replace=False)
            E = np.eye(n, dtype=np.int64)
            E[i, j] = rng.integers(-2, 3)
            U = U @ E
        if rng.random() < 0.3:
            D = np.eye(n, dtype=np.int64)
            D[rng.integers(n)] *= -1
            U = U @ D
    return U


def random_symplectic(rng: np.random.Generator, n: int, length: int = 3, bound: int = 2) -> SymplecticElement:
    """Random word in translations, rotations and the inversion of Sp(n, Z)."""
    g = SymplecticElement.identity(n)
    for _ in range(length):
        kind = rng.integers(3)
        if kind == 0:
            g = g @ translation(random_symmetric_int(rng, n, bound))
        elif kind == 1:
            g = g @ rotation(random_unimodular(rng, n))
        else:
            g = g @ inversion(n)
    return g


def random_heisenberg(rng: np.random.Generator, n: int, m: int, bound: int = 2,
                      integral: bool = True) -> HeisenbergElement:
    """Random admissible (lam, mu, kappa): kappa = sym - mu t(lam)."""
    def draw(shape):
        A = rng.integers(-bound, bound + 1, size=shape)
        if integral:
            return exact.qmat(A)
        den = rng.integers(1, 4, size=shape)
        return exact.qmat([[f"{a}/{d}" for a, d in zip(ra, rd)] for ra, rd in zip(A, den)])

    lam, mu = draw((m, n)), draw((m, n))
    sym = exact.qmat(random_symmetric_int(rng, m, bound))
    return HeisenbergElement(lam, mu, sym - mu.dot(lam.T))


def random_jacobi(rng: np.random.Generator, n: int, m: int, length: int = 2,
                  bound: int = 2) -> JacobiElement:
    return JacobiElement(random_symplectic(rng, n, length, bound), random_heisenberg(rng, n, m, bound))


def random_siegel_point(rng: np.random.Generator, n: int, y_floor: float = 0.8) -> np.ndarray:
    X = rng.uniform(-0.5, 0.5, size=(n, n))
    A = rng.uniform(-0.5, 0.5, size=(n, n))
    Y = A @ A.T + y_floor * np.eye(n)
    return (X + X.T) / 2 + 1j * Y


def random_W(rng: np.random.Generator, m: int, n: int, scale: float = 0.5) -> np.ndarray:
    return scale * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))


def z_grid(k: int = 5, x=(-0.5, 0.5), y=(0.8, 2.0)) -> list:
    """k x k grid of points of H_1 near the fundamental domain."""
    return [complex(a, b) for a in np.linspace(*x, k) for b in np.linspace(*y, k)]


def random_in_span(rng: np.random.Generator, basis: PluriharmonicBasis, bound: int = 3) -> SparsePoly:
    """Random nonzero integer combination of the basis."""
    m, n = basis.m, basis.n
    if not len(basis):
        return SparsePoly.zero(m, n)
    while True:
        coeffs = rng.integers(-bound, bound + 1, size=len(basis))
        if coeffs.any():
            break
    out = SparsePoly.zero(m, n)
    for c, P in zip(coeffs, basis):
        if c:
            out = out + P.scale(int(c))
    return out
