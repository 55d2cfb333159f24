"""Verification reports and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import exact

__all__ = ["scaled_residual", "VerificationReport", "complex_json", "matrix_json", "dumps"]


def scaled_residual(a, b) -> float:
    """``|a - b| / max(1, |a|, |b|)``: absolute near the unit scale, relative above it."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    den = max(1.0, float(np.abs(a).max(initial=0.0)), float(np.abs(b).max(initial=0.0)))
    return float(np.abs(a - b).max(initial=0.0)) / den


def complex_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_json(A):
    """Rows of "p/q" strings for exact matrices, rows of [re, im] otherwise."""
    A = np.asarray(A)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.dtype == object:
        return [[exact.format_rational(x) if not isinstance(x, exact.GaussRational)
                 else [exact.format_rational(x.re), exact.format_rational(x.im)]
                 for x in row] for row in A]
    return [[complex_json(x) for x in row] for row in A]


@dataclass
class VerificationReport:
    test: str
    tol: float
    cases: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, residual: float, tail: float = 0.0, **info):
        self.cases.append({**info, "residual": float(residual), "tail": float(tail)})

    @property
    def max_residual(self) -> float:
        return max((c["residual"] for c in self.cases), default=0.0)

    @property
    def passed(self) -> bool:
        return all(c["residual"] <= self.tol + c["tail"] for c in self.cases)

    def to_dict(self) -> dict:
        out = {
            "test": self.test,
            "cases": self.cases,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "pass": self.passed,
        }
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.test}: {len(self.cases)} cases, "
                f"max residual {self.max_residual:.3e} (tol {self.tol:.1e})")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
