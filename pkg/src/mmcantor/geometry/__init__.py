from ..similarity import PlanarSimilarity, Region
from .boxcount import BoxCountResult, box_counting_dimension, count_boxes
from .realization import (EmbeddedRealization, PointSample, clone_discs, require_embedding, sample_points,
                          validate_embedding)
from .separation import CloneSeparation, SeparationReport, clone_separation, point_diameter, separation_report
from .svg import render_svg

__all__ = [
    "PlanarSimilarity", "Region", "EmbeddedRealization", "PointSample", "validate_embedding",
    "require_embedding", "sample_points", "clone_discs", "SeparationReport", "CloneSeparation",
    "separation_report", "clone_separation", "point_diameter", "BoxCountResult", "box_counting_dimension",
    "count_boxes", "render_svg",
]
