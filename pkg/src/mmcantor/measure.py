"""Hausdorff-measure data at the dimension.

The direction of the model-measure vector is exact (left Frobenius
eigenvector at ``d*``).  Its normalisation, the measure of the whole set, is
only bracketed: the level-k clone covers give the upper bound ``K'`` and the
covering argument with constants ``Q`` and ``beta`` gives a lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clone_structure import CloneAddress, CloneStructure, check_address
from .dimension import DimensionResult, solve_dimension
from .errors import AddressError, ConvergenceError
from .spectral import build_matrix, power_limit, uniform_power_bound


@dataclass(frozen=True)
class Solution:
    """A structure together with its dimension and relative model measures."""

    structure: CloneStructure
    dimension: DimensionResult
    relative_measures: np.ndarray

    @property
    def d(self) -> float:
        return self.dimension.dimension


def solve(s: CloneStructure | Solution, tol: float = 1e-12) -> Solution:
    if isinstance(s, Solution):
        return s
    dim = solve_dimension(s, tol)
    v = np.array(dim.eigenvector_left, dtype=float)
    v = v / v.sum()
    v.flags.writeable = False
    return Solution(s, dim, v)


def transpose_residual(sol: Solution) -> float:
    """``|M_{d*}^T v - v|_1 / |v|_1`` for the relative-measure vector."""
    M = build_matrix(sol.structure, sol.d).as_float()
    v = sol.relative_measures
    return float(np.abs(M.T @ v - v).sum() / np.abs(v).sum())


def relative_measures(s: CloneStructure | Solution) -> np.ndarray:
    sol = solve(s)
    res = transpose_residual(sol)
    if res > 1e-10:
        raise ConvergenceError(f"relative measures fail the transpose fixed point (residual {res:.2e})",
                               best=sol.relative_measures)
    return sol.relative_measures


def clone_measure(s: CloneStructure | Solution, addr: CloneAddress) -> float:
    """Measure of a clone, with the whole set normalised to measure 1."""
    sol = solve(s)
    if not check_address(sol.structure, addr):
        raise AddressError(f"invalid address {addr.to_json()}")
    return float(addr.cumulative_inverse_scale) ** sol.d * float(sol.relative_measures[addr.type - 1])


def level_cover_sums(s: CloneStructure | Solution, k_max: int) -> np.ndarray:
    """``sums[k, i]`` = sum of diam**d* over level-k clones inside model i, k = 0..k_max."""
    sol = solve(s)
    st = sol.structure
    M = build_matrix(st, sol.d).as_float()
    diam_d = np.array([float(mdl.diameter) ** sol.d for mdl in st.models])
    out = np.empty((k_max + 1, st.n))
    P = np.eye(st.n)
    for k in range(k_max + 1):
        # a level-k clone of type t has diameter (scale product) * diam(A_t)
        out[k] = diam_d @ P
        P = M @ P
    return out


@dataclass(frozen=True)
class UpperBounds:
    bounds: np.ndarray
    K_prime: float
    converged_level: int
    level_sums: np.ndarray = field(repr=False)


def measure_upper_bounds(s: CloneStructure | Solution, rel_tol: float = 1e-10, k_cap: int = 60) -> UpperBounds:
    """``U_i = lim_k`` (level-k cover sum inside model i) and ``K' = sum U_i``."""
    sol = solve(s)
    st = sol.structure
    limit = power_limit(build_matrix(st, sol.d).as_float())
    diam_d = np.array([float(mdl.diameter) ** sol.d for mdl in st.models])
    U = diam_d @ limit
    sums = level_cover_sums(sol, k_cap).sum(axis=1)
    k0 = k_cap
    quiet = 0
    for k in range(1, k_cap + 1):
        if abs(sums[k] - sums[k - 1]) <= rel_tol * abs(sums[k]):
            quiet += 1
            if quiet >= 3:
                k0 = k
                break
        else:
            quiet = 0
    return UpperBounds(U, float(U.sum()), k0, sums[: k0 + 1])


@dataclass(frozen=True)
class LowerBounds:
    bounds: np.ndarray
    global_bound: float
    Q: float
    beta: float
    all_covers: bool

    @property
    def flag(self) -> str:
        return "all covers" if self.all_covers else "clone-covers only"


def measure_lower_bounds(s: CloneStructure | Solution, beta: float | None = None) -> LowerBounds:
    """``beta**-d * Q**-1 * K'/2``, split over models along the measure direction.

    Without ``beta`` (no embedding, so no minimum separation) the bound holds
    only for covers by clones and is flagged that way.
    """
    sol = solve(s)
    ub = measure_upper_bounds(sol)
    Q = uniform_power_bound(build_matrix(sol.structure, sol.d).as_float())
    b = 1.0 if beta is None else float(beta)
    if b < 1:
        raise ValueError("beta is a diameter ratio and cannot be below 1")
    L = b ** (-sol.d) * ub.K_prime / (2 * Q)
    return LowerBounds(L * sol.relative_measures, L, Q, b, beta is not None)


@dataclass(frozen=True)
class MeasureReport:
    dimension: float
    relative_measures: np.ndarray
    upper_bounds: np.ndarray
    lower_bounds: np.ndarray
    constants: dict
    cover: str

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "relative_measures": self.relative_measures.tolist(),
            "upper_bounds": self.upper_bounds.tolist(),
            "lower_bounds": self.lower_bounds.tolist(),
            "constants": dict(self.constants),
            "lower_bound_scope": self.cover,
        }


def measure_report(s: CloneStructure | Solution, beta: float | None = None) -> MeasureReport:
    sol = solve(s)
    rel = relative_measures(sol)
    ub = measure_upper_bounds(sol)
    lb = measure_lower_bounds(sol, beta)
    constants = {"K_prime": ub.K_prime, "Q": lb.Q, "beta": beta, "converged_level": ub.converged_level}
    return MeasureReport(sol.d, rel, ub.bounds, lb.bounds, constants, lb.flag)
