"""Truncated clopen invariants and mass ratios.

The clopen invariant of a model is the set of measures of its clopen
subsets, taken up to a positive scalar.  Only a truncation is computable:
unions of at most ``S`` disjoint clones of level at most ``L``.  Comparing
two truncations can refute similarity or report consistency, never prove it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .clone_structure import CloneAddress, CloneStructure, check_address, children, enumerate_level
from .errors import AddressError, CapExceededError
from .measure import Solution, clone_measure, solve

MAX_LEVEL = 8
MAX_UNION = 4
MAX_VALUES = 2_000_000
DIMENSION_TOL = 1e-9


def _dedup(values: np.ndarray, depths: np.ndarray, tol: float):
    """Sort, merge values within relative ``tol``, keep the shallowest depth of each cluster."""
    if len(values) == 0:
        return values, depths
    order = np.lexsort((depths, values))
    v, dp = values[order], depths[order]
    new = np.empty(len(v), dtype=bool)
    new[0] = True
    new[1:] = np.diff(v) > tol * np.abs(v[1:])
    group = np.cumsum(new) - 1
    out_d = np.full(group[-1] + 1, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(out_d, group, dp)
    return v[new], out_d


@dataclass(frozen=True)
class TruncatedClopenInvariant:
    base_model: int
    level_cap: int
    union_cap: int
    values: np.ndarray
    depths: np.ndarray = field(repr=False)
    dimension: float
    rho_max: float
    dedup_tolerance: float = 1e-10

    def __len__(self):
        return len(self.values)

    def scaled(self, c: float) -> "TruncatedClopenInvariant":
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return replace(self, values=self.values * c)

    def to_json(self) -> dict:
        return {"base_model": self.base_model, "L": self.level_cap, "S": self.union_cap,
                "dimension": self.dimension, "values": self.values.tolist()}


def invariant_size_estimate(s: CloneStructure, j: int, L: int, S: int) -> int:
    """Upper bound on the number of unions: sum over s <= S of C(#clones of level <= L in model j, s)."""
    counts = np.zeros(s.n, dtype=object)
    counts[j - 1] = 1
    total = 1
    R = s.counts().astype(object)
    for _ in range(L):
        counts = R @ counts
        total += int(sum(counts))
    return sum(math.comb(total, k) for k in range(1, S + 1))


def clopen_invariant(s: CloneStructure | Solution, j: int, L: int, S: int,
                     dedup_tolerance: float = 1e-10, max_values: int = MAX_VALUES) -> TruncatedClopenInvariant:
    """Measures of unions of at most ``S`` disjoint clones of level at most ``L`` inside model ``j``.

    The whole model counts as the level-0 clone.  Each value carries the
    smallest depth at which it is realised, used by ``compare_invariants``
    to exempt values near the truncation frontier.
    """
    sol = solve(s)
    st = sol.structure
    if not 1 <= j <= st.n:
        raise ValueError(f"no model {j}")
    if L < 0 or S < 1:
        raise ValueError("need L >= 0 and S >= 1")
    if L > MAX_LEVEL or S > MAX_UNION:
        est = invariant_size_estimate(st, j, L, S)
        raise CapExceededError(f"caps are L <= {MAX_LEVEL}, S <= {MAX_UNION}; requested L={L}, S={S} "
                               f"(up to {est} unions)", estimate=est)
    d = sol.d
    mu = sol.relative_measures
    kids = {t: [(float(c.inverse_scale) ** d, c.target) for c in st.clones_in(t)] for t in range(1, st.n + 1)}

    @lru_cache(maxsize=None)
    def table(t: int, depth: int):
        # table[k] = (values, depths) for unions of exactly k disjoint clones inside a type-t piece
        out = {1: (np.array([mu[t - 1]]), np.array([0]))}
        if depth == 0:
            return out
        acc = {0: (np.array([0.0]), np.array([0]))}
        for w, target in kids[t]:
            sub = table(target, depth - 1)
            nxt: dict[int, list] = {}
            for k0, (v0, d0) in acc.items():
                nxt.setdefault(k0, []).append((v0, d0))
                for k1, (v1, d1) in sub.items():
                    if k0 + k1 > S:
                        continue
                    size = len(v0) * len(v1)
                    if size > max_values:
                        raise CapExceededError(f"more than {max_values} candidate values in one merge",
                                               estimate=invariant_size_estimate(st, j, L, S))
                    vals = np.add.outer(v0, w * v1).ravel()
                    deps = np.maximum.outer(d0, d1 + 1).ravel()
                    nxt.setdefault(k0 + k1, []).append((vals, deps))
            acc = {k: _dedup(np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]),
                             dedup_tolerance)
                   for k, parts in nxt.items()}
        for k, (v, dp) in acc.items():
            if k == 0:
                continue
            if k == 1:
                v, dp = _dedup(np.concatenate([out[1][0], v]), np.concatenate([out[1][1], dp]), dedup_tolerance)
            out[k] = (v, dp)
        return out

    full = table(j, L)
    values, depths = _dedup(np.concatenate([v for v, _ in full.values()]),
                            np.concatenate([dp for _, dp in full.values()]), dedup_tolerance)
    rho = max(w * mu[tg - 1] / mu[t - 1] for t, ks in kids.items() for w, tg in ks)
    values.flags.writeable = False
    depths.flags.writeable = False
    return TruncatedClopenInvariant(j, L, S, values, depths, d, float(rho), dedup_tolerance)


class Verdict(enum.Enum):
    CONSISTENT_WITH_SIMILAR = "CONSISTENT_WITH_SIMILAR"
    NOT_SIMILAR_AT_TRUNCATION = "NOT_SIMILAR_AT_TRUNCATION"
    INCOMPARABLE = "INCOMPARABLE"


@dataclass(frozen=True)
class Comparison:
    verdict: Verdict
    alpha: float | None = None
    beta: float | None = None
    witnesses: tuple = ()
    detail: str = ""

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "alpha": self.alpha, "beta": self.beta,
                "witnesses": [list(w) for w in self.witnesses], "detail": self.detail}


def _frontier_cutoff(A: TruncatedClopenInvariant, B: TruncatedClopenInvariant, alpha: float) -> int:
    """Deepest level of ``A`` whose image under ``alpha`` is still resolved by ``B``'s truncation."""
    shrink = abs(math.log(alpha * A.values[-1] / B.values[-1]))
    step = abs(math.log(min(A.rho_max, B.rho_max)))
    h = math.ceil(shrink / step - 1e-9) if step > 0 else 0
    return max(A.level_cap - h, 1)


MAX_WITNESSES = 16


def _misses(B: TruncatedClopenInvariant, probe: np.ndarray, tol: float) -> np.ndarray:
    """Which probe values have no partner in ``B`` within relative ``tol``."""
    pos = np.searchsorted(B.values, probe)
    last = len(B.values) - 1
    left, right = B.values[np.clip(pos - 1, 0, last)], B.values[np.clip(pos, 0, last)]
    return np.minimum(np.abs(left - probe), np.abs(right - probe)) > tol * probe


def _embed(A: TruncatedClopenInvariant, B: TruncatedClopenInvariant, tol: float):
    """Find ``alpha`` with ``alpha * A`` inside ``B`` off the frontier, else witnesses per candidate.

    The largest value of ``A`` is the whole model (depth 0, never exempt), so
    any admissible ``alpha`` maps it onto some ``b`` in ``B``: the candidates
    ``b / max(A)`` are exhaustive.  Values of depth <= 1 are never exempt, so
    they screen all candidates at once before the full check.
    """
    top = A.values[-1]
    alphas = B.values[::-1] / top
    core = A.values[A.depths <= 1]
    screen = np.empty((len(alphas), len(core)), dtype=bool)
    for lo in range(0, len(alphas), 4096):
        chunk = alphas[lo:lo + 4096]
        screen[lo:lo + 4096] = _misses(B, (chunk[:, None] * core[None, :]).ravel(), tol).reshape(len(chunk), -1)
    witnesses = [(float(alphas[k]), float(core[screen[k]][0]))
                 for k in np.nonzero(screen.any(axis=1))[0][:MAX_WITNESSES]]
    for k in np.nonzero(~screen.any(axis=1))[0]:
        alpha = alphas[k]
        cutoff = _frontier_cutoff(A, B, alpha)
        vals = A.values[A.depths <= cutoff]
        miss = _misses(B, alpha * vals, tol)
        if not miss.any():
            return float(alpha), []
        if len(witnesses) < MAX_WITNESSES:
            witnesses.append((float(alpha), float(vals[miss][0])))
    return None, witnesses


def compare_invariants(A: TruncatedClopenInvariant, B: TruncatedClopenInvariant, tol: float = 1e-9) -> Comparison:
    if (A.level_cap, A.union_cap) != (B.level_cap, B.union_cap):
        raise ValueError(f"caps differ: (L={A.level_cap}, S={A.union_cap}) vs (L={B.level_cap}, S={B.union_cap})")
    if abs(A.dimension - B.dimension) > DIMENSION_TOL:
        return Comparison(Verdict.INCOMPARABLE,
                          detail=f"dimensions differ: {A.dimension:.12g} vs {B.dimension:.12g}")
    alpha, wa = _embed(A, B, tol)
    beta, wb = _embed(B, A, tol)
    if alpha is not None and beta is not None:
        return Comparison(Verdict.CONSISTENT_WITH_SIMILAR, alpha, beta)
    # each witness is (candidate scalar, value with no partner under it)
    side = "alpha A in B" if alpha is None else "beta B in A"
    return Comparison(Verdict.NOT_SIMILAR_AT_TRUNCATION, alpha, beta, tuple(wa if alpha is None else wb),
                      detail=f"no scalar satisfies {side}")


# mass ratios

@dataclass(frozen=True)
class MassRatioMap:
    """Clone-to-clone pairing between two solved structures.

    Nested sources are allowed so parent/child quotients can be formed, but
    the pairing must respect inclusion: nested sources go to nested targets
    and disjoint sources to disjoint targets.
    """

    source: Solution
    target: Solution
    pairs: tuple[tuple[CloneAddress, CloneAddress], ...]

    def __post_init__(self):
        for u, v in self.pairs:
            if not check_address(self.source.structure, u):
                raise AddressError(f"invalid source address {u.to_json()}")
            if not check_address(self.target.structure, v):
                raise AddressError(f"invalid target address {v.to_json()}")
        srcs = [u for u, _ in self.pairs]
        if len(set(srcs)) != len(srcs):
            raise ValueError("a source clone is paired twice")
        for x, (u1, v1) in enumerate(self.pairs):
            for u2, v2 in self.pairs[x + 1:]:
                if u1.contains(u2) and not v1.contains(v2) or u2.contains(u1) and not v2.contains(v1):
                    raise ValueError(f"pairing breaks inclusion: {u1.to_json()}, {u2.to_json()}")
                if not (u1.contains(u2) or u2.contains(u1)) and (v1.contains(v2) or v2.contains(v1)):
                    raise ValueError(f"disjoint sources {u1.to_json()}, {u2.to_json()} map to nested targets")

    @classmethod
    def build(cls, source, target, pairs) -> "MassRatioMap":
        src, tgt = solve(source), solve(target)
        rows = []
        for u, v in pairs:
            if not isinstance(u, CloneAddress):
                u = _address_from_json(src.structure, u)
            if not isinstance(v, CloneAddress):
                v = _address_from_json(tgt.structure, v)
            rows.append((u, v))
        return cls(src, tgt, tuple(rows))

    @classmethod
    def from_json(cls, source, target, data: list) -> "MassRatioMap":
        """``data`` is a list of ``[source, target]`` pairs, each ``{"model": j, "word": [...]}`` or a bare word."""
        pairs = []
        for k, item in enumerate(data):
            if isinstance(item, dict):
                item = (item.get("source"), item.get("target"))
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ValueError(f"pair {k}: expected [source, target]")
            pairs.append(tuple(item))
        return cls.build(source, target, pairs)


def _address_from_json(s: CloneStructure, item) -> CloneAddress:
    if isinstance(item, dict):
        return s.address(item.get("word", []), item.get("model"))
    return s.address(item)


def identity_pairing(s: CloneStructure | Solution, level: int) -> MassRatioMap:
    """Every clone of level at most ``level`` paired with itself."""
    sol = solve(s)
    addrs = [a for k in range(level + 1) for a in enumerate_level(sol.structure, k)]
    return MassRatioMap(sol, sol, tuple((a, a) for a in addrs))


def _check_dimensions(m: MassRatioMap) -> None:
    if abs(m.source.d - m.target.d) > DIMENSION_TOL:
        raise ValueError(f"mass ratio needs equal dimensions, got {m.source.d:.12g} and {m.target.d:.12g}")


def mass_ratio(m: MassRatioMap, pair_index: int) -> float:
    _check_dimensions(m)
    u, v = m.pairs[pair_index]
    return clone_measure(m.target, v) / clone_measure(m.source, u)


def mass_ratios(m: MassRatioMap) -> np.ndarray:
    return np.array([mass_ratio(m, k) for k in range(len(m.pairs))])


def mass_ratio_spectrum(m: MassRatioMap, tol: float = 1e-10) -> list[float]:
    """Distinct quotients ``MR(child) / MR(parent)`` over paired sources one level apart."""
    mr = mass_ratios(m)
    index = {u: k for k, (u, _) in enumerate(m.pairs)}
    quotients = []
    for k, (u, _) in enumerate(m.pairs):
        if u.word:
            p = index.get(u.parent())
            if p is not None:
                quotients.append(mr[k] / mr[p])
    if not quotients:
        raise ValueError("the pairing has no parent/child source pair")
    q, _ = _dedup(np.array(quotients), np.zeros(len(quotients), dtype=np.int64), tol)
    return q.tolist()


def additivity_residuals(m: MassRatioMap) -> dict[CloneAddress, float]:
    """``|MR(parent) - sum mu(child) MR(child) / mu(parent)|`` wherever every child of a source is paired."""
    mr = mass_ratios(m)
    index = {u: k for k, (u, _) in enumerate(m.pairs)}
    out = {}
    for k, (u, _) in enumerate(m.pairs):
        kids = children(m.source.structure, u)
        if not all(c in index for c in kids):
            continue
        mu = clone_measure(m.source, u)
        avg = math.fsum(clone_measure(m.source, c) * mr[index[c]] for c in kids) / mu
        out[u] = abs(mr[k] - avg)
    return out
