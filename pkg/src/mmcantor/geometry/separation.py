"""Separation statistics of an embedded Cantor set.

Separations are measured between Cantor-anchored samples (points that lie
on the set itself), so the sampled distance is an upper bound for the true
one and undershoots it by at most twice the sampling error radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from ..clone_structure import CloneAddress
from .realization import EmbeddedRealization, clone_discs, sample_points


@dataclass(frozen=True)
class CloneSeparation:
    address: CloneAddress
    sep: float
    sep_interval: tuple[float, float]
    diam: float
    diam_interval: tuple[float, float]
    rel: float
    rel_interval: tuple[float, float]

    def to_json(self) -> dict:
        return {"address": self.address.to_json(), "sep": _j(self.sep), "sep_interval": [_j(x) for x in self.sep_interval],
                "diam": self.diam, "diam_interval": list(self.diam_interval),
                "rel": _j(self.rel), "rel_interval": [_j(x) for x in self.rel_interval]}


def _j(x: float):
    return "inf" if math.isinf(x) else x


@dataclass(frozen=True)
class SeparationReport:
    clones: tuple[CloneSeparation, ...]
    min_separation_alpha: float
    alpha_interval: tuple[float, float]
    diameter: float
    diameter_interval: tuple[float, float]
    beta: float
    beta_interval: tuple[float, float]
    xi_bound: float
    error_radius: float
    sample_level: int

    def to_json(self) -> dict:
        return {
            "sample_level": self.sample_level,
            "error_radius": self.error_radius,
            "alpha": _j(self.min_separation_alpha),
            "alpha_interval": [_j(x) for x in self.alpha_interval],
            "diameter": self.diameter,
            "diameter_interval": list(self.diameter_interval),
            "beta": self.beta,
            "beta_interval": list(self.beta_interval),
            "xi_bound": _j(self.xi_bound),
            "clones": [c.to_json() for c in self.clones],
        }

    def table(self) -> str:
        rows = [f"{'address':<24}{'sep':>14}{'diam':>14}{'rel':>12}"]
        for c in self.clones:
            name = f"{c.address.root}:" + ".".join(map(str, c.address.word))
            rows.append(f"{name:<24}{c.sep:>14.8g}{c.diam:>14.8g}{c.rel:>12.6g}")
        rows.append(f"alpha = {self.min_separation_alpha:.10g}  in [{self.alpha_interval[0]:.10g}, {self.alpha_interval[1]:.10g}]")
        rows.append(f"beta  = {self.beta:.10g}  in [{self.beta_interval[0]:.10g}, {self.beta_interval[1]:.10g}]")
        rows.append(f"xi   >= {self.xi_bound:.10g}   (error radius {self.error_radius:.3g})")
        return "\n".join(rows)


def point_diameter(pts: np.ndarray) -> float:
    """Largest pairwise distance, via the convex hull when the points span the plane."""
    if len(pts) < 2:
        return 0.0
    try:
        hull = pts[ConvexHull(pts).vertices]
    except (QhullError, ValueError):
        # collinear: project on the principal direction
        centered = pts - pts.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        t = centered @ vt[0]
        return float(t.max() - t.min())
    diff = hull[:, None, :] - hull[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def _runs(roots: np.ndarray, words: np.ndarray, j: int):
    """Start/stop index pairs of consecutive samples sharing a level-j prefix."""
    key = np.hstack([roots[:, None], words[:, :j]])
    change = np.any(key[1:] != key[:-1], axis=1)
    starts = np.concatenate([[0], np.nonzero(change)[0] + 1])
    stops = np.concatenate([starts[1:], [len(roots)]])
    return starts, stops


def _separation(tree: cKDTree, pts: np.ndarray, lo: int, hi: int, center: np.ndarray, radius: float) -> float:
    n = len(pts)
    if hi - lo == n:
        return math.inf
    # an upper bound from one inside point, then a ball query for all candidates
    dist, idx = tree.query(pts[lo], k=min(n, hi - lo + 1))
    dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
    outside = (idx < lo) | (idx >= hi)
    ub = float(dist[outside][0])
    cand = np.array(tree.query_ball_point(center, radius + ub * (1 + 1e-12)), dtype=int)
    cand = cand[(cand < lo) | (cand >= hi)]
    d, _ = cKDTree(pts[cand]).query(pts[lo:hi], k=1)
    return float(min(ub, d.min()))


def separation_report(e: EmbeddedRealization, level: int, report_level: int = 1) -> SeparationReport:
    """sep, diam and rel for every clone of levels 1..report_level, from level-``level`` samples."""
    if not 1 <= report_level <= level:
        raise ValueError("need 1 <= report_level <= level")
    sample = sample_points(e, level, anchor="cantor")
    pts, eps = sample.points, sample.error_radius
    s = e.structure
    # samples are ordered by root, so each model piece is one contiguous block;
    # sep is measured inside the piece, since the relative position of pieces is arbitrary
    block = {t: np.nonzero(sample.roots == t)[0] for t in range(1, s.n + 1)}
    trees = {t: cKDTree(pts[idx]) for t, idx in block.items()}

    # diameter of each model piece, then of clones by scaling
    scale = {c.id: float(c.inverse_scale) for c in s.clones}
    model_diam = np.zeros(s.n)
    model_eps = np.zeros(s.n)
    for t in range(1, s.n + 1):
        mask = sample.roots == t
        model_diam[t - 1] = point_diameter(pts[mask])
        model_eps[t - 1] = sample.error_radii[mask].max()

    reports = []
    for j in range(1, report_level + 1):
        starts, stops = _runs(sample.roots, sample.words, j)
        _, words, types, z, rad, _ = clone_discs(e, j)
        assert len(starts) == len(z)
        for k, (lo, hi) in enumerate(zip(starts, stops)):
            addr = CloneAddress(tuple(int(i) for i in words[k]), int(sample.roots[lo]), s)
            cum = math.prod(scale[int(i)] for i in words[k])
            t = int(types[k])
            root = int(sample.roots[lo])
            off = int(block[root][0])
            sep = _separation(trees[root], pts[block[root]], int(lo) - off, int(hi) - off,
                              np.array([z[k].real, z[k].imag]), float(rad[k]))
            sep_iv = (max(sep - 2 * eps, 0.0), sep)
            diam = cum * model_diam[t - 1]
            diam_iv = (diam, cum * (model_diam[t - 1] + 2 * model_eps[t - 1]))
            rel = sep / diam if diam > 0 else math.inf
            rel_iv = (sep_iv[0] / diam_iv[1], sep_iv[1] / diam_iv[0] if diam_iv[0] > 0 else math.inf)
            reports.append(CloneSeparation(addr, sep, sep_iv, diam, diam_iv, rel, rel_iv))

    level1 = [c for c in reports if c.address.level == 1]
    alpha = min(c.sep for c in level1)
    alpha_iv = (min(c.sep_interval[0] for c in level1), min(c.sep_interval[1] for c in level1))
    # the largest model piece plays the role of the whole set
    diam_c = float(model_diam.max())
    diam_iv = (diam_c, diam_c + 2 * float(model_eps[model_diam.argmax()]))
    beta = diam_c / alpha if alpha > 0 else math.inf
    beta_iv = (diam_iv[0] / alpha_iv[1], diam_iv[1] / alpha_iv[0] if alpha_iv[0] > 0 else math.inf)
    finite = [c.rel for c in reports if 0 < c.rel < math.inf]
    xi = max((max(r, 1 / r) for r in finite), default=math.inf)
    return SeparationReport(tuple(reports), alpha, alpha_iv, diam_c, diam_iv, beta, beta_iv, xi, eps, level)


def clone_separation(e: EmbeddedRealization, addr: CloneAddress, level: int) -> float:
    """Sampled ``sep`` of a single clone inside its model piece; ``inf`` when it is the whole piece."""
    if addr.level > level:
        raise ValueError("sampling level must be at least the clone's level")
    sample = sample_points(e, level, anchor="cantor")
    prefix = np.asarray(addr.word, dtype=sample.words.dtype)
    piece = sample.roots == addr.root
    inside = piece & np.all(sample.words[:, : addr.level] == prefix, axis=1)
    outside = piece & ~inside
    if not outside.any():
        return math.inf
    d, _ = cKDTree(sample.points[outside]).query(sample.points[inside], k=1)
    return float(d.min())
