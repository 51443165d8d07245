"""Online trajectory segmentation, summary indexing, and fast queries.

The pipeline: raw position streams are segmented online into compact
centroid summaries (one point per dense local bout, ~min_r spacing along
locomotive stretches); the summaries double as a spatial-temporal index
over the raw store, powering range/KNN/pairwise queries and two-stage
hybrid refinement against the raw data.
"""

from .model import (
    LOCAL,
    LOCOMOTIVE,
    DisjointTimeError,
    Rect,
    SampledTrajectory,
    SamplePoint,
    Segmentation,
    SegmenterParams,
    SegmentSummary,
    TimestampRegressionError,
    summaries_as_trajectory,
    summary_from_json,
    summary_to_json,
    validate_segmentation,
)
from .density import (
    BoundingRectState,
    DensityEstimate,
    RunningCircleState,
    bounding_rect_density,
    bounding_rect_update,
    convex_hull,
    convex_hull_density,
    min_enclosing_circle,
    min_enclosing_circle_density,
    polygon_area,
    running_circle_density,
    running_circle_update,
)
from .segmenter import (
    SegmenterState,
    StreamEngine,
    estimate_compression,
    segment_hierarchy,
    segment_trajectory,
)
from .synth import BoutSpec, GenSpec, default_gen_spec, generate, heatmap_grid

__version__ = "0.1.0"

__all__ = [
    "LOCAL",
    "LOCOMOTIVE",
    "BoundingRectState",
    "BoutSpec",
    "DensityEstimate",
    "DisjointTimeError",
    "GenSpec",
    "Rect",
    "RunningCircleState",
    "SampledTrajectory",
    "SamplePoint",
    "Segmentation",
    "SegmenterParams",
    "SegmenterState",
    "SegmentSummary",
    "StreamEngine",
    "TimestampRegressionError",
    "bounding_rect_density",
    "bounding_rect_update",
    "convex_hull",
    "convex_hull_density",
    "default_gen_spec",
    "estimate_compression",
    "generate",
    "heatmap_grid",
    "min_enclosing_circle",
    "min_enclosing_circle_density",
    "polygon_area",
    "running_circle_density",
    "running_circle_update",
    "segment_hierarchy",
    "segment_trajectory",
    "summaries_as_trajectory",
    "summary_from_json",
    "summary_to_json",
    "validate_segmentation",
]
