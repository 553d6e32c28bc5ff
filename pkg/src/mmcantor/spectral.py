"""The matrix ``M_d`` of a clone structure and its Frobenius eigendata.

Entry ``(i, j)`` of ``M_d`` is the sum of ``a**d`` over the inverse scale
factors ``a`` of the type-i level-1 clones inside model j.  With this
orientation a column vector of per-type d-quantities is pushed one level
down by ``v -> M_d v``, and the vector of model measures is a fixed point of
the transpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .clone_structure import CloneAddress, CloneMapSpec, CloneStructure, DQuantity, d_quantity, enumerate_level, require_valid
from .errors import ConvergenceError, NotIrreducibleError
from .numeric import PowerSum, integral_exponent, number_to_json, parse_number, power


@dataclass(frozen=True)
class SpectralMatrix:
    d: object
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    @property
    def symbolic(self) -> bool:
        return self.d is None

    def support(self) -> np.ndarray:
        return np.array([[bool(x) for x in row] for row in self.entries], dtype=bool)

    def as_float(self, d=None) -> np.ndarray:
        """Float entries; a symbolic matrix must be given the exponent ``d``."""
        if self.symbolic:
            if d is None:
                raise TypeError("symbolic matrix: pass an exponent to evaluate it")
            return np.array([[float(x.at(d)) for x in row] for row in self.entries])
        return np.array(self.entries, dtype=float)

    def at(self, d) -> "SpectralMatrix":
        if not self.symbolic:
            raise TypeError("matrix already has an exponent")
        exact = integral_exponent(d) is not None
        vals = [[x.at(d) for x in row] for row in self.entries]
        return SpectralMatrix(d, np.array(vals, dtype=object if exact else float))

    def to_json(self) -> dict:
        if self.symbolic:
            d = "symbolic"
            entries = [[repr(x) for x in row] for row in self.entries]
        else:
            d = "0" if self.d == 0 else number_to_json(self.d)
            entries = [[number_to_json(x) if self.exact else float(x) for x in row] for row in self.entries]
        return {"d": d, "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "SpectralMatrix":
        """Inverse of ``to_json`` for numeric matrices."""
        if data.get("d") == "symbolic":
            raise ValueError("symbolic matrices cannot be read back; evaluate at a numeric d first")
        d = parse_number(data["d"])
        rows = [[parse_number(x) for x in row] for row in data["entries"]]
        exact = all(isinstance(x, Fraction) for row in rows for x in row)
        return cls(d, np.array(rows, dtype=object if exact else float))

    def table(self) -> str:
        cells = [[repr(x) if self.symbolic else (str(x) if self.exact else f"{x:.15g}") for x in row]
                 for row in self.entries]
        width = max(len(c) for row in cells for c in row)
        return "\n".join("  ".join(c.rjust(width) for c in row) for row in cells)


def _zero_like(exact_symbolic: bool):
    return PowerSum() if exact_symbolic else Fraction(0)


def build_matrix(s: CloneStructure, d) -> SpectralMatrix:
    """``M_d`` for ``s``.  ``d=None`` keeps the exponent symbolic (exact)."""
    require_valid(s)
    if d is not None and d < 0:
        raise ValueError("d must be non-negative")
    n = s.n
    exact = d is None or (integral_exponent(d) is not None and s.is_exact)
    if d is None and not s.is_exact:
        raise TypeError("a symbolic matrix needs rational inverse scales")
    if exact:
        M = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                M[i, j] = _zero_like(d is None)
        for c in s.clones:
            M[c.target - 1, c.container - 1] = M[c.target - 1, c.container - 1] + power(c.inverse_scale, d)
        return SpectralMatrix(d, M)
    terms: dict[tuple[int, int], list[float]] = {}
    for c in s.clones:
        terms.setdefault((c.target - 1, c.container - 1), []).append(power(c.inverse_scale, d))
    M = np.zeros((n, n))
    for (i, j), vals in terms.items():
        M[i, j] = math.fsum(vals)
    return SpectralMatrix(d, M)


def _exact_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    n, k = A.shape[0], B.shape[1]
    symbolic = any(isinstance(x, PowerSum) for x in A.flat) or any(isinstance(x, PowerSum) for x in B.flat)
    C = np.empty((n, k), dtype=object)
    for i in range(n):
        for j in range(k):
            acc = _zero_like(symbolic)
            for t in range(A.shape[1]):
                if A[i, t] and B[t, j]:
                    acc = acc + A[i, t] * B[t, j]
            C[i, j] = acc
    return C


def matrix_power(M: SpectralMatrix, k: int) -> SpectralMatrix:
    if k < 0:
        raise ValueError("k must be non-negative")
    if not M.exact:
        return SpectralMatrix(M.d, np.linalg.matrix_power(M.entries, k))
    one = PowerSum.power(1) if M.symbolic else Fraction(1)
    out = np.empty(M.entries.shape, dtype=object)
    for i in range(M.n):
        for j in range(M.n):
            out[i, j] = one if i == j else _zero_like(M.symbolic)
    for _ in range(k):
        out = _exact_matmul(out, M.entries)
    return SpectralMatrix(M.d, out)


def apply_matrix(M: SpectralMatrix, v) -> list:
    """``M v`` on the numeric tower (``v`` a sequence of tower elements)."""
    if not M.exact:
        return list(M.entries @ np.asarray(v, dtype=float))
    col = np.empty((M.n, 1), dtype=object)
    for i, x in enumerate(v):
        col[i, 0] = x
    return list(_exact_matmul(M.entries, col)[:, 0])


def power_structure(s: CloneStructure, k: int) -> CloneStructure:
    """The structure whose level-1 clones are the level-k clones of ``s``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    require_valid(s)
    clones = []
    for idx, addr in enumerate(enumerate_level(s, k), start=1):
        placement = None
        maps = [s.clone(i).placement for i in addr.word]
        if all(p is not None for p in maps):
            placement = maps[0]
            for p in maps[1:]:
                placement = placement.compose(p)
        clones.append(CloneMapSpec(idx, addr.root, addr.type, addr.cumulative_inverse_scale, placement))
    name = f"{s.name}^{k}" if s.name else None
    return CloneStructure(s.models, tuple(clones), name)


# ------------------------------------------------------------- irreducibility

@dataclass(frozen=True)
class Irreducibility:
    """Support-pattern classification of a non-negative matrix.

    ``irreducible`` means some power is strictly positive.  A strongly
    connected but periodic pattern is reported with ``irreducible=False``,
    ``strongly_connected=True`` and its ``period``.
    """

    irreducible: bool
    witness_k: int | None
    strongly_connected: bool
    period: int | None
    zero_positions: tuple[tuple[int, int], ...]

    def __bool__(self):
        return self.irreducible

    def __iter__(self):
        yield self.irreducible
        yield self.witness_k if self.irreducible else self.zero_positions


def _support_of(M) -> np.ndarray:
    if isinstance(M, SpectralMatrix):
        return M.support()
    arr = np.asarray(M)
    if arr.dtype == object:
        return np.array([[bool(x) for x in row] for row in arr], dtype=bool)
    if np.any(arr < 0):
        raise ValueError("matrix has negative entries")
    return arr != 0


def _period(S: np.ndarray) -> int:
    n = S.shape[0]
    level = [-1] * n
    level[0] = 0
    queue = [0]
    g = 0
    while queue:
        u = queue.pop(0)
        for v in np.flatnonzero(S[:, u]):  # edge u -> v when S[v, u]
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = gcd(g, level[u] + 1 - level[v])
    return abs(g)


def is_irreducible(M) -> Irreducibility:
    S = _support_of(M)
    n = S.shape[0]
    B = S.astype(np.int64)
    P = B.copy()
    for k in range(1, n * n + 1):
        if P.all():
            return Irreducibility(True, k, True, 1, ())
        P = ((P @ B) > 0).astype(np.int64)
    reach = S.copy()
    P = B.copy()
    for _ in range(1, n):
        P = ((P @ B) > 0).astype(np.int64)
        reach |= P > 0
    if reach.all():
        return Irreducibility(False, None, True, _period(S), ())
    zeros = tuple((int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(~reach)))
    return Irreducibility(False, None, False, None, zeros)


# ---------------------------------------------------------- Frobenius data

@dataclass(frozen=True)
class FrobeniusData:
    eigenvalue: float
    right_eigenvector: np.ndarray
    left_eigenvector: np.ndarray
    witness_k: int | None
    residual: float
    iterations: int


def _float_matrix(M) -> np.ndarray:
    if isinstance(M, SpectralMatrix):
        return M.as_float()
    arr = np.asarray(M)
    if arr.dtype == object:
        return np.array(arr, dtype=float)
    return arr.astype(float)


def _norm1(A: np.ndarray) -> float:
    """Operator L1 norm (largest column sum)."""
    return float(np.abs(A).sum(axis=0).max())


def _power_vector(P: np.ndarray, tol: float, max_iter: int, stall: int = 500):
    """Positive L1-normalised dominant eigenvector of a primitive ``P``.

    Iterates ``v <- P v / |P v|_1``.  When progress stalls the iteration matrix
    is squared (same eigenvector, wider spectral gap).
    """
    n = P.shape[0]
    v = np.full(n, 1.0 / n)
    q_prev = None
    it = 0
    since_square = 0
    while it < max_iter:
        it += 1
        since_square += 1
        w = P @ v
        q = w.sum()
        w = w / q
        dv = np.abs(w - v).sum()
        v = w
        if q_prev is not None and dv <= tol and abs(q - q_prev) <= tol * q:
            return v, it
        q_prev = q
        if since_square >= stall:
            P = P @ P
            P = P / P.max()
            q_prev = None
            since_square = 0
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps", best=v)


def _polish(A: np.ndarray, v: np.ndarray, lam: float, residual: float, steps: int = 2):
    """A couple of inverse-iteration steps when power iteration stalls near the noise floor."""
    shift = lam * (1 + 1e-10)
    I = np.eye(A.shape[0])
    for _ in range(steps):
        try:
            w = np.linalg.solve(A - shift * I, v)
        except np.linalg.LinAlgError:
            break
        w = np.abs(w) / np.abs(w).sum()
        mu = float((A @ w).sum())
        res = float(np.abs(A @ w - mu * w).sum())
        if res >= residual:
            break
        v, lam, residual = w, mu, res
    return v, lam, residual


def frobenius(M, tol: float = 1e-14, max_iter: int = 100_000) -> FrobeniusData:
    A = _float_matrix(M)
    info = is_irreducible(A)
    if not info.strongly_connected:
        raise NotIrreducibleError("matrix not irreducible: zero pattern persists at "
                                  f"{list(info.zero_positions)}")
    n = A.shape[0]
    scale = _norm1(A)
    B = A / scale
    # a periodic pattern has several eigenvalues on the spectral circle;
    # B + I is primitive with the same eigenvectors
    P = B if info.irreducible else B + np.eye(n)
    right, it_r = _power_vector(P, tol, max_iter)
    left, it_l = _power_vector(P.T.copy(), tol, max_iter)
    lam = scale * float((B @ right).sum())
    residual = float(np.abs(A @ right - lam * right).sum())
    bound = 1e-13 * max(scale, 1e-300) * max(1, n)
    if residual > bound:
        right, lam, residual = _polish(A, right, lam, residual)
        left = _polish(A.T, left, lam, np.inf)[0]
    if residual > bound:
        raise ConvergenceError(f"eigen-residual {residual:.3e} too large", best=right)
    return FrobeniusData(lam, right, left, info.witness_k, residual, it_r + it_l)


def power_limit(M, tol: float = 1e-9) -> np.ndarray:
    """``lim M**k`` for an irreducible matrix whose Frobenius eigenvalue is 1."""
    A = _float_matrix(M)
    info = is_irreducible(A)
    if not info.irreducible:
        raise NotIrreducibleError("power limit needs a matrix with a strictly positive power")
    fd = frobenius(A)
    if abs(fd.eigenvalue - 1) > tol:
        raise ValueError(f"Frobenius eigenvalue {fd.eigenvalue!r} is not 1; powers tend to 0 or infinity")
    r, l = fd.right_eigenvector, fd.left_eigenvector
    limit = np.outer(r, l) / float(l @ r)
    if _norm1(A @ limit - limit) > 1e-10:
        raise ConvergenceError("power limit failed its fixed-point check", best=limit)
    return limit


def uniform_power_bound(M, tol: float = 1e-9, max_power: int = 100_000) -> float:
    """Empirical ``sup_p |M^p|_1`` (L1 operator norm) for eigenvalue-1 matrices.

    Powers are taken until they settle onto the limit matrix (three
    consecutive powers within 1e-13), after which the norms cannot grow.
    The matrix is first divided by its computed eigenvalue so that a
    solver residual of order 1e-13 does not make the powers drift.
    """
    A = _float_matrix(M)
    limit = power_limit(A, tol)
    A = A / frobenius(A).eigenvalue
    Q = max(1.0, _norm1(limit))
    P = np.eye(A.shape[0])
    settled = 0
    for _ in range(max_power):
        P = P @ A
        Q = max(Q, _norm1(P))
        if np.abs(P - limit).max() <= 1e-13 * max(1.0, np.abs(limit).max()):
            settled += 1
            if settled >= 3:
                return Q
        else:
            settled = 0
    raise ConvergenceError("powers did not settle onto the limit matrix", best=Q)


def predict_subdivision(s: CloneStructure, coll, d, k: int) -> DQuantity:
    """``v(J^(k))`` from matrix powers alone.

    With unequal model diameters the update is ``D M^k D^-1 v`` where
    ``D = diag(diam^d)``; the scale-only sums below are ``D^-1 v``.
    """
    unit = s.with_diameters([Fraction(1)] * s.n)
    base = d_quantity(unit, [CloneAddress(a.word, a.root, unit) for a in coll], d)
    w = apply_matrix(matrix_power(build_matrix(s, d), k), base.components)
    comps = tuple(power(mdl.diameter, d) * x for mdl, x in zip(s.models, w))
    return DQuantity(d, comps)
