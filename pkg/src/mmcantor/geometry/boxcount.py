"""Box-counting estimate of the dimension from sampled points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .realization import EmbeddedRealization, sample_points


@dataclass(frozen=True)
class BoxCountResult:
    estimate: float
    scales: np.ndarray
    counts: np.ndarray
    intercept: float
    error_radius: float
    degenerate: bool

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "scales": self.scales.tolist(), "counts": self.counts.tolist(),
                "intercept": self.intercept, "error_radius": self.error_radius, "degenerate": self.degenerate}

    def __iter__(self):
        # (estimate, regression data) unpacking
        return iter((self.estimate, {"log_inv_scale": np.log(1 / self.scales), "log_count": np.log(self.counts)}))


def count_boxes(points: np.ndarray, scale: float, origin=None) -> int:
    """Number of occupied axis-aligned boxes of side ``scale``."""
    origin = points.min(axis=0) if origin is None else np.asarray(origin)
    cells = np.floor((points - origin) / scale).astype(np.int64)
    cells -= cells.min(axis=0)
    # one integer key per cell; a 1-d unique is far cheaper than a row-wise one
    keys = cells[:, 0] * (int(cells[:, 1].max()) + 1) + cells[:, 1]
    return len(np.unique(keys))


def default_scales(e: EmbeddedRealization, level: int, count: int = 12) -> np.ndarray:
    sample = sample_points(e, level)
    pts = sample.points
    span = float(np.ptp(pts, axis=0).max()) or 2 * float(e.radii.max())
    # at twice the error radius every sample tends to get its own box; stay one octave above
    finest = max(4 * sample.error_radius, span * 1e-6)
    coarsest = span / 2
    if finest >= coarsest:
        # too coarse a sample for a regression; one admissible scale gives a flagged result
        return np.array([max(coarsest, 2 * sample.error_radius)])
    return np.geomspace(coarsest, finest, count)


def box_counting_dimension(e: EmbeddedRealization, level: int, scales=None) -> BoxCountResult:
    """Least-squares slope of log N(s) against log(1/s) for the level-``level`` centre samples."""
    sample = sample_points(e, level)
    scales = default_scales(e, level) if scales is None else np.asarray(scales, dtype=float)
    if scales.ndim != 1 or len(scales) == 0:
        raise ValueError("scales must be a non-empty list")
    if np.any(scales <= 0) or np.any(np.diff(scales) >= 0):
        raise ValueError("scales must be positive and strictly decreasing")
    if scales[-1] < 2 * sample.error_radius:
        raise ValueError(f"finest scale {scales[-1]:.3g} is below twice the sampling error radius "
                         f"{sample.error_radius:.3g}; sample deeper or use coarser scales")
    origin = sample.points.min(axis=0)
    counts = np.array([count_boxes(sample.points, s, origin) for s in scales])
    degenerate = len(scales) < 2 or len(np.unique(counts)) == 1
    if len(scales) < 2:
        return BoxCountResult(0.0, scales, counts, float(np.log(counts[0])), sample.error_radius, True)
    slope, intercept = np.polyfit(np.log(1 / scales), np.log(counts), 1)
    return BoxCountResult(float(slope), scales, counts, float(intercept), sample.error_radius, degenerate)
