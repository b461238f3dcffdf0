"""vectorforge: raster-to-vector conversion via segmentation and
Catmull-Rom spline approximation of region boundaries."""

from .boundary import (
    BoundaryPiece,
    SubpixelBoundaryImage,
    TopologyError,
    TraceResult,
    add_border_pieces,
    build_subpixel_edges,
    fill_gaps,
    mark_junctions,
    trace_pieces,
)
from .evaluate import DimensionError, Metrics, bpp, psnr, rasterize
from .pipeline import PipelineConfig, run_pipeline, vectorize
from .rastercore import (
    FormatError,
    RasterImage,
    channel_abs_diff,
    decode_ppm,
    encode_ppm,
    load_image,
)
from .segmentation import (
    CscParams,
    GraphParams,
    LabelImage,
    SrmParams,
    normalize_labels,
    segment_csc,
    segment_graph,
    segment_srm,
)
from .spline import (
    BEZIER_MATRIX,
    CATMULL_ROM_MATRIX,
    BezierSegment,
    ControlPolyline,
    catmull_segment_to_bezier,
    enforce_c1,
    eval_spline,
    fit_path,
    sample_control_points,
)
from .svgwriter import (
    BezierPath,
    ChainError,
    SvgDocument,
    build_document,
    chain_pieces,
    region_fill_color,
    scale_to_document,
    serialize_svg,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPiece",
    "SubpixelBoundaryImage",
    "TopologyError",
    "TraceResult",
    "add_border_pieces",
    "build_subpixel_edges",
    "fill_gaps",
    "mark_junctions",
    "trace_pieces",
    "DimensionError",
    "Metrics",
    "bpp",
    "psnr",
    "rasterize",
    "PipelineConfig",
    "run_pipeline",
    "vectorize",
    "FormatError",
    "RasterImage",
    "channel_abs_diff",
    "decode_ppm",
    "encode_ppm",
    "load_image",
    "CscParams",
    "GraphParams",
    "LabelImage",
    "SrmParams",
    "normalize_labels",
    "segment_csc",
    "segment_graph",
    "segment_srm",
    "BEZIER_MATRIX",
    "CATMULL_ROM_MATRIX",
    "BezierSegment",
    "ControlPolyline",
    "catmull_segment_to_bezier",
    "enforce_c1",
    "eval_spline",
    "fit_path",
    "sample_control_points",
    "BezierPath",
    "ChainError",
    "SvgDocument",
    "build_document",
    "chain_pieces",
    "region_fill_color",
    "scale_to_document",
    "serialize_svg",
]
