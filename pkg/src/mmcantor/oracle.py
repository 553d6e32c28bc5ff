"""Brute-force reference computations.

Each routine reaches its answer by a route that shares no code with the main
pipeline: scalar root finding instead of eigen-iteration, a sign test on
the characteristic polynomial instead of power iteration, and explicit tree
enumeration instead of matrix powers.  The test suite pins its expected
values with these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .clone_structure import CloneAddress, CloneStructure, DQuantity
from .errors import CapExceededError, StructureError
from .numeric import PowerSum, integral_exponent, is_exact


@dataclass(frozen=True)
class OracleResult:
    quantity: str
    value: object
    method: str
    tolerance: float

    def to_json(self) -> dict:
        v = self.value
        if isinstance(v, DQuantity):
            v = [repr(c) if isinstance(c, PowerSum) else float(c) for c in v.components]
        return {"quantity": self.quantity, "value": v, "method": self.method, "tolerance": self.tolerance}


def _bisect_bool(above, lo: float, hi: float, tol: float) -> float:
    """Smallest-width bracket for the switch point of a monotone predicate.

    ``above(lo)`` must be True and ``above(hi)`` False.
    """
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if above(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def moran_solve(scales: Sequence[float], tol: float = 1e-13) -> float:
    """Root of ``sum(a**d) = 1`` for a single-model structure."""
    scales = [float(a) for a in scales]
    if len(scales) < 2:
        raise ValueError("need at least two scales")
    if not all(0 < a < 1 for a in scales):
        raise ValueError("scales must lie in (0, 1)")

    def above(d):
        return math.fsum(a ** d for a in scales) > 1

    hi = 1.0
    while above(hi):
        hi *= 2
    return _bisect_bool(above, 0.0, hi, tol)


def _entries_2x2(s: CloneStructure, d: float):
    m = [[0.0, 0.0], [0.0, 0.0]]
    for c in s.clones:
        m[c.target - 1][c.container - 1] += float(c.inverse_scale) ** d
    return m


def char_poly_root_2x2(s: CloneStructure, tol: float = 1e-13) -> float:
    """``d`` where the larger root of ``x^2 - tr x + det`` of ``M_d`` equals 1.

    The larger root exceeds 1 exactly when ``p(1) < 0`` (1 lies between the
    roots) or when ``p(1) > 0`` and ``tr/2 > 1`` (both roots above 1).
    """
    if s.n != 2:
        raise StructureError("char_poly_root_2x2 needs exactly two models")

    def p_at_one(d):
        (a, b), (c, e) = _entries_2x2(s, d)
        return 1 - (a + e) + (a * e - b * c), a + e

    def above(d):
        p1, tr = p_at_one(d)
        return p1 < 0 or (p1 > 0 and tr > 2)

    if not above(0.0):
        raise ValueError("larger root at d = 0 is not above 1; root not bracketed")
    hi = 1.0
    while above(hi):
        hi *= 2
        if hi > 1024:
            raise ValueError("root not bracketed")
    return _bisect_bool(above, 0.0, hi, tol)


def exhaustive_subdivision_sum(s: CloneStructure, coll: Sequence[CloneAddress], d, k: int,
                               cap: int = 10**6) -> DQuantity:
    """d-quantity of ``coll`` subdivided ``k`` times, by walking the clone tree.

    ``d=None`` sums formal powers exactly (rational inputs).
    """
    inside: dict[int, list] = {}
    for c in s.clones:
        inside.setdefault(c.container, []).append(c)
    scale = {c.id: c.inverse_scale for c in s.clones}
    target = {c.id: c.target for c in s.clones}
    diam = {mdl.id: mdl.diameter for mdl in s.models}
    exact_int = integral_exponent(d) is not None and d is not None

    # count first so the cap is checked before any work
    def count(t, depth):
        if depth == 0:
            return 1
        return sum(count(c.target, depth - 1) for c in inside.get(t, []))

    def leaf_type(a: CloneAddress):
        return target[a.word[-1]] if a.word else a.root

    def cum(a: CloneAddress):
        out = Fraction(1)
        for i in a.word:
            out = out * scale[i]
        return out

    total = sum(count(leaf_type(a), k) for a in coll)
    if total > cap:
        raise CapExceededError(f"{total} clones at level {k} exceeds the cap {cap}", estimate=total)

    buckets: list[list] = [[] for _ in range(s.n)]

    def walk(t, c_scale, depth):
        if depth == 0:
            buckets[t - 1].append(c_scale * diam[t])
            return
        for c in inside.get(t, []):
            walk(c.target, c_scale * c.inverse_scale, depth - 1)

    for a in coll:
        walk(leaf_type(a), cum(a), k)

    comps = []
    for vals in buckets:
        if d is None:
            if not all(is_exact(v) for v in vals):
                raise TypeError("exact enumeration needs rational scales and diameters")
            acc: dict = {}
            for v in vals:
                acc[v] = acc.get(v, 0) + 1
            comps.append(PowerSum(acc))
        elif exact_int and all(is_exact(v) for v in vals):
            comps.append(sum((Fraction(v) ** int(d) for v in vals), Fraction(0)))
        else:
            comps.append(math.fsum(float(v) ** float(d) for v in vals))
    return DQuantity(d, tuple(comps))
