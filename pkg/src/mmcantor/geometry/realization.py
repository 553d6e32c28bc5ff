"""Planar realizations of clone structures and finite-level point samples."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..clone_structure import (CloneAddress, CloneMapSpec, CloneStructure, Model, ValidationReport,
                               require_valid)
from ..errors import CapExceededError, StructureError
from ..similarity import PlanarSimilarity, Region, apply_complex, compose_complex

MAX_SAMPLE_LEVEL = 24
MAX_SAMPLE_POINTS = 5_000_000


@dataclass(frozen=True)
class EmbeddedRealization:
    structure: CloneStructure
    regions: tuple[Region, ...]
    placements: tuple[PlanarSimilarity, ...]

    @classmethod
    def from_structure(cls, s: CloneStructure) -> "EmbeddedRealization":
        """Read regions and placements stored in the structure file."""
        require_valid(s)
        missing = [f"model {m.id}" for m in s.models if m.region is None]
        missing += [f"clone {c.id}" for c in s.clones if c.placement is None]
        if missing:
            raise StructureError("structure has no planar embedding for " + ", ".join(missing))
        regions = tuple(s.model(j).region for j in range(1, s.n + 1))
        placements = tuple(s.clone(i).placement for i in range(1, s.m + 1))
        return cls(s, regions, placements)

    def transformed(self, g: PlanarSimilarity) -> "EmbeddedRealization":
        """Image of the whole realization under a global similarity ``g``."""
        ginv = g.inverse()
        regions = []
        for reg in self.regions:
            c = g.apply(reg.center)
            poly = None if reg.polygon is None else tuple(map(tuple, g.apply(np.array(reg.polygon))))
            regions.append(Region((c[0], c[1]), reg.radius * g.scale, poly))
        placements = tuple(g.compose(p).compose(ginv) for p in self.placements)
        s = self.structure
        models = tuple(Model(m.id, m.diameter * g.scale if g.scale != 1 else m.diameter, m.label, regions[k])
                       for k, m in enumerate(s.models))
        clones = tuple(CloneMapSpec(c.id, c.container, c.target, c.inverse_scale, placements[k])
                       for k, c in enumerate(s.clones))
        return EmbeddedRealization(CloneStructure(models, clones, s.name), tuple(regions), placements)

    # per-id lookup arrays (index 0 unused)
    @cached_property
    def _clone_arrays(self):
        s = self.structure
        a = np.zeros(s.m + 1, dtype=complex)
        b = np.zeros(s.m + 1, dtype=complex)
        r = np.zeros(s.m + 1, dtype=bool)
        scale = np.zeros(s.m + 1)
        target = np.zeros(s.m + 1, dtype=int)
        for c, p in zip(s.clones, self.placements):
            a[c.id], b[c.id], r[c.id] = p.linear, p.offset, p.reflect
            scale[c.id], target[c.id] = float(c.inverse_scale), c.target
        return a, b, r, scale, target

    @cached_property
    def centers(self) -> np.ndarray:
        return np.array([complex(*reg.center) for reg in self.regions])

    @cached_property
    def radii(self) -> np.ndarray:
        return np.array([reg.radius for reg in self.regions])

    @cached_property
    def cantor_anchors(self) -> np.ndarray:
        """One point of the Cantor set in each model, chosen so samples nest across levels.

        Model t follows its lowest-id clone ``c(t)``; the anchors solve
        ``x_t = phi_{c(t)}(x_{target(c(t))})``, so the anchor of a clone at
        level k is also the anchor of one of its children at level k + 1.
        """
        s = self.structure
        first = [s.clones_in(j)[0] for j in range(1, s.n + 1)]
        x = self.centers.copy()
        for _ in range(10_000):
            new = np.array([apply_complex(self.placements[c.id - 1].linear, self.placements[c.id - 1].offset,
                                          self.placements[c.id - 1].reflect, x[c.target - 1]) for c in first])
            if np.abs(new - x).max() <= 1e-15 * max(1.0, np.abs(new).max()):
                return new
            x = new
        return x


def validate_embedding(e: EmbeddedRealization, tol: float = 1e-12) -> ValidationReport:
    s = e.structure
    v: list[str] = []
    for c, p in zip(s.clones, e.placements):
        if abs(p.scale - float(c.inverse_scale)) > tol * max(1.0, float(c.inverse_scale)):
            v.append(f"clone {c.id}: placement scale {p.scale} != inverse scale {float(c.inverse_scale)}")
    images = {}
    for c, p in zip(s.clones, e.placements):
        center = apply_complex(p.linear, p.offset, p.reflect, e.centers[c.target - 1])
        radius = p.scale * e.radii[c.target - 1]
        images[c.id] = (center, radius)
        outer_c, outer_r = e.centers[c.container - 1], e.radii[c.container - 1]
        if abs(center - outer_c) + radius > outer_r + tol * outer_r:
            v.append(f"clone {c.id}: image disc is not inside model {c.container}")
    for j in range(1, s.n + 1):
        inside = s.clones_in(j)
        for x in range(len(inside)):
            for y in range(x + 1, len(inside)):
                (c1, r1), (c2, r2) = images[inside[x].id], images[inside[y].id]
                gap = abs(c1 - c2) - r1 - r2
                if gap <= tol:
                    v.append(f"clones {inside[x].id} and {inside[y].id} in model {j}: discs overlap or touch (gap {gap:.3g})")
    for x in range(s.n):
        for y in range(x + 1, s.n):
            gap = abs(e.centers[x] - e.centers[y]) - e.radii[x] - e.radii[y]
            if gap <= tol:
                v.append(f"models {x + 1} and {y + 1}: regions overlap or touch (gap {gap:.3g})")
    return ValidationReport(v, s.counts())


def require_embedding(e: EmbeddedRealization) -> None:
    report = validate_embedding(e)
    if not report.ok:
        raise StructureError("invalid embedding: " + "; ".join(report.violations))


@dataclass(frozen=True)
class PointSample:
    """One representative point per level-k clone, in lexicographic address order."""

    structure: CloneStructure
    level: int
    anchor: str
    roots: np.ndarray
    words: np.ndarray
    types: np.ndarray
    cum_scale: np.ndarray
    points: np.ndarray
    error_radii: np.ndarray

    @property
    def error_radius(self) -> float:
        return float(self.error_radii.max())

    @property
    def addresses(self) -> list[CloneAddress]:
        return [CloneAddress(tuple(int(i) for i in w), int(r), self.structure)
                for r, w in zip(self.roots, self.words)]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.addresses, self.points))


def _expand(e: EmbeddedRealization, level: int):
    """Composed maps for every clone of the given level."""
    s = e.structure
    ca, cb, cr, cs, ct = e._clone_arrays
    roots = np.arange(1, s.n + 1)
    types = roots.copy()
    words = np.zeros((s.n, 0), dtype=np.int32)
    a = np.ones(s.n, dtype=complex)
    b = np.zeros(s.n, dtype=complex)
    r = np.zeros(s.n, dtype=bool)
    cum = np.ones(s.n)
    kids = {j: np.array([c.id for c in s.clones_in(j)], dtype=np.int32) for j in range(1, s.n + 1)}
    nkids = np.array([0] + [len(kids[j]) for j in range(1, s.n + 1)])
    for _ in range(level):
        counts = nkids[types]
        total = int(counts.sum())
        if total > MAX_SAMPLE_POINTS:
            raise CapExceededError(f"{total} sample points exceeds the cap {MAX_SAMPLE_POINTS}", estimate=total)
        parent = np.repeat(np.arange(len(types)), counts)
        child = np.concatenate([kids[t] for t in types]) if len(types) else np.zeros(0, dtype=np.int32)
        a, b, r = compose_complex(a[parent], b[parent], r[parent], ca[child], cb[child], cr[child])
        cum = cum[parent] * cs[child]
        roots = roots[parent]
        words = np.hstack([words[parent], child[:, None]])
        types = ct[child]
    return roots, words, types, a, b, r, cum


def sample_points(e: EmbeddedRealization, level: int, anchor: str = "center") -> PointSample:
    """Representative points of every level-``level`` clone.

    ``anchor="center"`` maps the model disc centres; ``anchor="cantor"`` maps
    points of the Cantor set itself (see ``EmbeddedRealization.cantor_anchors``).
    The error radius bounds the distance from a clone's sample point to any
    point of the Cantor set inside that clone.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    if level > MAX_SAMPLE_LEVEL:
        raise CapExceededError(f"level {level} is deeper than the cap {MAX_SAMPLE_LEVEL}")
    require_embedding(e)
    roots, words, types, a, b, r, cum = _expand(e, level)
    if anchor == "center":
        base = e.centers[types - 1]
        reach = e.radii[types - 1]
    elif anchor == "cantor":
        base = e.cantor_anchors[types - 1]
        reach = e.radii[types - 1] + np.abs(e.cantor_anchors - e.centers)[types - 1]
    else:
        raise ValueError("anchor must be 'center' or 'cantor'")
    z = apply_complex(a, b, r, base)
    pts = np.stack([z.real, z.imag], axis=1)
    return PointSample(e.structure, level, anchor, roots, words, types, cum, pts, cum * reach)


def clone_discs(e: EmbeddedRealization, level: int):
    """Centres, radii and model types of the image discs of all level-k clones."""
    roots, words, types, a, b, r, cum = _expand(e, level)
    z = apply_complex(a, b, r, e.centers[types - 1])
    return roots, words, types, z, cum * e.radii[types - 1], (a, b, r)
