"""JSON encodings and command-line value parsing.

Exact matrices are arrays of rows of "p/q" strings; complex numbers are
``[re, im]`` pairs; polynomials are lists of ``{exponents, coeff}`` with
``coeff = ["p/q", "r/s"]`` (real and imaginary parts) when exact.
"""

from __future__ import annotations

import json
import os

import numpy as np

from . import exact
from .exact import GaussRational
from .polyharm import PluriharmonicBasis, SparsePoly

__all__ = [
    "poly_to_json",
    "poly_from_json",
    "basis_to_json",
    "parse_complex",
    "load_json_arg",
    "parse_matrix_arg",
    "parse_complex_matrix_arg",
]


def _coeff_json(c):
    if isinstance(c, GaussRational):
        return [exact.format_rational(c.re), exact.format_rational(c.im)]
    c = complex(c)
    return [c.real, c.imag]


def poly_to_json(P: SparsePoly) -> list:
    return [{"exponents": list(e), "coeff": _coeff_json(c)} for e, c in P.items()]


def poly_from_json(m: int, n: int, data) -> SparsePoly:
    terms = {}
    for t in data:
        re_, im_ = t["coeff"]
        if isinstance(re_, str) and isinstance(im_, str):
            c = GaussRational(exact.parse_rational(re_), exact.parse_rational(im_))
        else:
            c = complex(re_, im_)
        terms[tuple(t["exponents"])] = c
    return SparsePoly(m, n, terms)


def basis_to_json(B: PluriharmonicBasis) -> dict:
    return {
        "m": B.m,
        "n": B.n,
        "degree": B.degree,
        "order": B.order,
        "S": [[exact.format_rational(x) for x in row] for row in B.S.S],
        "dimension": len(B),
        "basis": [poly_to_json(P) for P in B],
    }


def parse_complex(s) -> complex:
    """Accept "i", "100i", "0.3+1.1i", "-2j", "1.5" or numbers."""
    if isinstance(s, (int, float, complex)):
        return complex(s)
    t = s.strip().replace(" ", "").replace("j", "i")
    if not t:
        raise ValueError("empty complex literal")
    if t.endswith("i"):
        body = t[:-1]
        # split at the last sign that is not part of an exponent
        idx = max((k for k, ch in enumerate(body) if ch in "+-" and k > 0
                   and body[k - 1] not in "eE"), default=-1)
        re_s, im_s = (body[:idx], body[idx:]) if idx > 0 else ("0", body)
        if im_s in ("", "+"):
            im_s = "1"
        elif im_s == "-":
            im_s = "-1"
        try:
            return complex(float(re_s), float(im_s))
        except ValueError as exc:
            raise ValueError(f"malformed complex literal {s!r}") from exc
    try:
        return complex(float(t), 0.0)
    except ValueError as exc:
        raise ValueError(f"malformed complex literal {s!r}") from exc


def load_json_arg(arg: str):
    """Inline JSON, or the contents of a JSON file."""
    if os.path.exists(arg):
        with open(arg) as fh:
            return json.load(fh)
    return json.loads(arg)


def parse_matrix_arg(arg: str, m: int | None = None) -> np.ndarray:
    """Exact matrix from "identity", a scalar, a JSON file or inline JSON."""
    a = arg.strip()
    if a == "identity":
        if m is None:
            raise ValueError("'identity' needs --m")
        return exact.identity(m)
    try:
        return exact.qmat(exact.parse_rational(a))
    except ValueError:
        pass
    data = load_json_arg(a)
    if isinstance(data, dict):
        data = data.get("S", data.get("matrix"))
    return exact.qmat(data)


def parse_complex_matrix_arg(arg: str, shape: tuple, diagonal: bool = False) -> np.ndarray:
    """Complex matrix from a scalar literal, a JSON file or inline JSON.

    A scalar fills the matrix, or only its diagonal when ``diagonal``.  JSON
    entries may be numbers, complex literals, or ``[re, im]`` pairs.
    """
    try:
        z = parse_complex(arg)
        return z * np.eye(shape[0], dtype=complex) if diagonal else np.full(shape, z, dtype=complex)
    except ValueError:
        pass
    data = load_json_arg(arg)

    def conv(x):
        if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
            return complex(x[0], x[1])
        return parse_complex(x)

    A = np.array([[conv(x) for x in row] for row in data], dtype=complex)
    if A.shape != shape:
        raise ValueError(f"expected a {shape[0]}x{shape[1]} matrix, got {A.shape}")
    return A
