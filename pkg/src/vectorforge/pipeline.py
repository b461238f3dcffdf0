"""End-to-end orchestration: load -> segment -> boundaries -> splines
-> SVG, with optional metrics.

Per-piece sampling and fitting is the parallel unit (each fit is
independent); results are merged into an id-keyed map, so output bytes
are identical for any worker count.  Pieces are fitted once in their
stored orientation and reversed analytically during assembly, which
keeps the geometry of a boundary shared by two regions bit-identical
on both sides.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import boundary, evaluate, segmentation, spline, svgwriter
from .rastercore import RasterImage

_SEGMENTERS = ("srm", "graph", "csc")
_FILL_MODES = ("mean", "median")


@dataclass(frozen=True)
class PipelineConfig:
    segmenter: str = "graph"
    q: float = 32.0
    k: float = 500.0
    threshold: float = 40.0
    min_region_frac: float = 0.0005
    sampling_resolution: float = 1.0 / 20.0
    fill_mode: str = "mean"
    stroke: float | None = None
    workers: int = 1
    eval: bool = False
    debug_dumps: bool = False

    def __post_init__(self) -> None:
        if self.segmenter not in _SEGMENTERS:
            raise ValueError(f"segmenter must be one of {_SEGMENTERS}, got {self.segmenter!r}")
        if not 0.0 < self.sampling_resolution <= 1.0:
            raise ValueError(
                f"sampling resolution must be in (0, 1], got {self.sampling_resolution}"
            )
        if self.fill_mode not in _FILL_MODES:
            raise ValueError(f"fill mode must be one of {_FILL_MODES}, got {self.fill_mode!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.stroke is not None and self.stroke <= 0:
            raise ValueError(f"stroke width must be > 0, got {self.stroke}")


def segment(img: RasterImage, cfg: PipelineConfig) -> segmentation.LabelImage:
    if cfg.segmenter == "srm":
        params = segmentation.SrmParams(q=cfg.q, min_region_frac=cfg.min_region_frac)
        return segmentation.segment_srm(img, params)
    if cfg.segmenter == "graph":
        params = segmentation.GraphParams(k=cfg.k, min_region_frac=cfg.min_region_frac)
        return segmentation.segment_graph(img, params)
    params = segmentation.CscParams(threshold=cfg.threshold)
    return segmentation.segment_csc(img, params)


def extract_boundaries(labels: segmentation.LabelImage) -> boundary.TraceResult:
    s = boundary.build_subpixel_edges(labels)
    s = boundary.fill_gaps(s)
    s = boundary.mark_junctions(s)
    result = boundary.trace_pieces(s, labels)
    boundary.add_border_pieces(labels, result)
    return result


def _fit_piece(piece: boundary.BoundaryPiece, resolution: float) -> svgwriter.FittedPiece:
    if piece.synthetic:
        pts = [svgwriter.scale_to_document(p) for p in piece.points]
        return svgwriter.FittedPiece(line_points=pts)
    sampled = spline.sample_control_points(piece, resolution)
    scaled = [svgwriter.scale_to_document(p) for p in sampled.points]
    if len(scaled) == 2:
        return svgwriter.FittedPiece(line_points=scaled)
    polyline = spline.ControlPolyline(points=scaled, closed=sampled.closed)
    return svgwriter.FittedPiece(segments=spline.fit_path(polyline))


def fit_pieces(
    trace: boundary.TraceResult, resolution: float, workers: int = 1
) -> dict[int, svgwriter.FittedPiece]:
    """Sample and fit every piece; the map is keyed by piece id so the
    merge order never depends on completion order."""
    pieces = trace.pieces
    if workers <= 1 or len(pieces) < 2:
        return {p.id: _fit_piece(p, resolution) for p in pieces}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        fitted = pool.map(lambda p: _fit_piece(p, resolution), pieces)
        return {p.id: f for p, f in zip(pieces, fitted)}


def vectorize(img: RasterImage, cfg: PipelineConfig) -> svgwriter.SvgDocument:
    labels = segment(img, cfg)
    trace = extract_boundaries(labels)
    fitted = fit_pieces(trace, cfg.sampling_resolution, cfg.workers)
    return svgwriter.build_document(
        img, labels, trace, fitted, fill_mode=cfg.fill_mode, stroke_width=cfg.stroke
    )


def run_pipeline(img: RasterImage, cfg: PipelineConfig) -> tuple[bytes, evaluate.Metrics | None]:
    """Full conversion; returns the SVG bytes and, when cfg.eval is
    set, quality metrics computed against the source image."""
    start = time.perf_counter()
    doc = vectorize(img, cfg)
    svg_bytes = svgwriter.serialize_svg(doc)
    wall_ms = (time.perf_counter() - start) * 1000.0
    metrics = None
    if cfg.eval:
        rendered = evaluate.rasterize(doc, img.width, img.height)
        metrics = evaluate.Metrics(
            psnr_db=evaluate.psnr(img, rendered),
            bpp=evaluate.bpp(len(svg_bytes), img.width, img.height),
            wall_ms=wall_ms,
            path_count=len(doc.paths),
            segment_count=sum(len(p.segments) for p in doc.paths),
        )
    return svg_bytes, metrics
