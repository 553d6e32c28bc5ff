"""Hausdorff dimension: the unique ``d`` with Frobenius eigenvalue ``lambda_d = 1``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .clone_structure import CloneStructure, require_valid
from .errors import NotIrreducibleError, StructureError
from .spectral import build_matrix, frobenius, is_irreducible


@dataclass(frozen=True)
class DimensionResult:
    dimension: float
    eigenvalue_at_solution: float
    bracket: tuple[float, float]
    iterations: int
    eigenvector_left: np.ndarray
    eigenvector_right: np.ndarray

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "bracket": list(self.bracket),
            "eigenvalue_at_solution": self.eigenvalue_at_solution,
            "lambda_residual": self.eigenvalue_at_solution - 1.0,
            "iterations": self.iterations,
            "left_eigenvector": self.eigenvector_left.tolist(),
        }


def eigenvalue(s: CloneStructure, d: float) -> float:
    return frobenius(build_matrix(s, float(d))).eigenvalue


def _check_irreducible(s: CloneStructure) -> None:
    require_valid(s)
    info = is_irreducible(build_matrix(s, 0))
    if not info.strongly_connected:
        raise NotIrreducibleError(f"matrix not irreducible: persistent zeros at {list(info.zero_positions)}")


def solve_dimension(s: CloneStructure, tol: float = 1e-12) -> DimensionResult:
    return _solve_cached(s, float(tol))


@lru_cache(maxsize=256)
def _solve_cached(s: CloneStructure, tol: float) -> DimensionResult:
    if not tol > 0:
        raise ValueError("tol must be positive")
    _check_irreducible(s)
    lam0 = eigenvalue(s, 0.0)
    if not lam0 > 1:
        raise StructureError("structure violates m >= 2n premise: lambda_0 <= 1")
    lo, hi = 0.0, 1.0
    while True:
        lam = eigenvalue(s, hi)
        if lam < 1 - 1e-9:
            break
        if lam > 1:
            lo = hi
        hi = 2 * hi
        if hi > 64:
            raise StructureError("no upper bracket below d = 64; inverse scales too close to 1")
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        iterations += 1
        if eigenvalue(s, mid) > 1:
            lo = mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    fd = frobenius(build_matrix(s, d))
    left = fd.left_eigenvector.copy()
    right = fd.right_eigenvector.copy()
    left.flags.writeable = False
    right.flags.writeable = False
    return DimensionResult(d, fd.eigenvalue, (lo, hi), iterations, left, right)


def eigenvalue_curve(s: CloneStructure, d_grid) -> list[tuple[float, float]]:
    _check_irreducible(s)
    return [(float(d), eigenvalue(s, d)) for d in d_grid]
