"""Exact scalars and dense linear algebra over Q and Q(i).

Matrices are numpy object arrays whose entries are ``Fraction`` or
``GaussRational``; every routine here works over any exact field whose
elements support ``+ - * /`` and comparison with zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import DimensionError, SingularError

__all__ = [
    "GaussRational",
    "to_exact",
    "qmat",
    "identity",
    "zeros",
    "is_exact",
    "mat_eq",
    "is_zero_matrix",
    "det",
    "inv",
    "rref",
    "nullspace",
    "solve",
    "to_complex",
    "parse_rational",
    "format_rational",
]


@dataclass(frozen=True, slots=True)
class GaussRational:
    """Element ``re + i*im`` of Q(i)."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def coerce(x):
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, (int, Rational)):
            return GaussRational(Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRational")

    def __add__(self, other):
        if isinstance(other, (GaussRational, int, Rational)):
            o = GaussRational.coerce(other)
            return GaussRational(self.re + o.re, self.im + o.im)
        if isinstance(other, (complex, float, np.number)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (GaussRational, int, Rational)):
            o = GaussRational.coerce(other)
            return GaussRational(self.re * o.re - self.im * o.im,
                                 self.re * o.im + self.im * o.re)
        if isinstance(other, (complex, float, np.number)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        if isinstance(other, (GaussRational, int, Rational)):
            o = GaussRational.coerce(other)
            nrm = o.norm()
            if nrm == 0:
                raise ZeroDivisionError("GaussRational division by zero")
            num = self * o.conjugate()
            return GaussRational(num.re / nrm, num.im / nrm)
        if isinstance(other, (complex, float, np.number)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Rational)):
            return GaussRational.coerce(other) / self
        if isinstance(other, (complex, float, np.number)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return GaussRational(1) / (self ** (-e))
        out, base = GaussRational(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussRational({self.re})"
        return f"GaussRational({self.re}, {self.im})"


def to_exact(x):
    """Convert an int, Fraction, GaussRational or "p/q" string to an exact scalar."""
    if type(x) is Fraction:
        return x
    if isinstance(x, GaussRational):
        return x.re if x.im == 0 else x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        if not np.isfinite(x) or x != int(x):
            raise TypeError(f"refusing inexact float {x!r}; pass a Fraction or 'p/q'")
        return Fraction(int(x))
    raise TypeError(f"not an exact scalar: {x!r}")


def qmat(rows) -> np.ndarray:
    """Build an exact matrix (object array) from nested rows."""
    arr = np.array(rows, dtype=object)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of ndim {arr.ndim}")
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = to_exact(v)
    return out


def identity(k: int) -> np.ndarray:
    out = zeros(k, k)
    for i in range(k):
        out[i, i] = Fraction(1)
    return out


def zeros(r: int, c: int) -> np.ndarray:
    out = np.empty((r, c), dtype=object)
    out.fill(Fraction(0))
    return out


def as_int_if_integral(A) -> np.ndarray:
    """Object array of Python ints when every entry is an integral Fraction, else A."""
    if all(type(x) is Fraction and x.denominator == 1 for x in A.flat):
        out = np.empty(A.shape, dtype=object)
        for idx, x in np.ndenumerate(A):
            out[idx] = x.numerator
        return out
    return A


def is_exact(A) -> bool:
    return isinstance(A, np.ndarray) and A.dtype == object


def mat_eq(A, B) -> bool:
    if A.shape != B.shape:
        return False
    return all(a == b for a, b in zip(A.flat, B.flat))


def is_zero_matrix(A) -> bool:
    return all(a == 0 for a in A.flat)


def rref(A):
    """Reduced row echelon form. Returns (R, pivot_columns)."""
    R = np.array(A, dtype=object, copy=True)
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if R[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        piv = R[r, c]
        R[r, :] = [x / piv for x in R[r, :]]
        for i in range(rows):
            if i != r and R[i, c] != 0:
                f = R[i, c]
                R[i, :] = [x - f * y for x, y in zip(R[i, :], R[r, :])]
        pivots.append(c)
        r += 1
    return R, pivots


def nullspace(A) -> list:
    """Kernel basis read off the reduced echelon form, one vector per free column."""
    rows, cols = A.shape
    if rows == 0:
        R, pivots = np.empty((0, cols), dtype=object), []
    else:
        R, pivots = rref(A)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i, f]
        basis.append(v)
    return basis


def det(A):
    A = np.array(A, dtype=object, copy=True)
    k = A.shape[0]
    if A.shape != (k, k):
        raise DimensionError(f"det needs a square matrix, got {A.shape}")
    out = Fraction(1)
    for c in range(k):
        p = next((i for i in range(c, k) if A[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[[c, p]] = A[[p, c]]
            out = -out
        piv = A[c, c]
        out = out * piv
        for i in range(c + 1, k):
            if A[i, c] != 0:
                f = A[i, c] / piv
                A[i, c:] = [x - f * y for x, y in zip(A[i, c:], A[c, c:])]
    return out


def inv(A):
    k = A.shape[0]
    if A.shape != (k, k):
        raise DimensionError(f"inverse needs a square matrix, got {A.shape}")
    aug = np.concatenate([np.array(A, dtype=object), identity(k)], axis=1)
    R, pivots = rref(aug)
    if pivots[:k] != list(range(k)) or (len(pivots) > k and pivots[k] < k):
        raise SingularError("matrix is singular")
    return R[:, k:]


def solve(A, B):
    """Solve ``A X = B`` exactly; raises ValueError when inconsistent.

    Free variables (if any) are set to zero.
    """
    B = np.asarray(B, dtype=object)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    rows, cols = A.shape
    if B.shape[0] != rows:
        raise DimensionError(f"rhs has {B.shape[0]} rows, matrix has {rows}")
    R, pivots = rref(np.concatenate([np.array(A, dtype=object), B], axis=1))
    if any(p >= cols for p in pivots):
        raise ValueError("linear system is inconsistent")
    X = zeros(cols, B.shape[1])
    for i, pc in enumerate(pivots):
        X[pc, :] = R[i, cols:]
    return X[:, 0] if vec else X


def to_complex(A) -> np.ndarray:
    A = np.asarray(A)
    if A.dtype == object:
        return np.vectorize(complex, otypes=[complex])(A)
    return A.astype(complex)


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    try:
        return Fraction(s)
    except ValueError as exc:
        raise ValueError(f"malformed rational {s!r}") from exc


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
