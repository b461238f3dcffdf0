"""Command line front end.

Exit codes: 0 success, 1 usage/validation error, 2 I/O or format
error, 3 internal topology error.  An optional key=value config file
supplies defaults; explicit flags override it.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import boundary, pipeline, rastercore, svgwriter

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_IO = 2
_EXIT_TOPOLOGY = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we use 1
        raise _UsageError(message)


def _parse_sampling(text: str) -> float:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            value = float(num) / float(den)
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise _UsageError(f"cannot parse sampling resolution {text!r}") from exc
    if not 0.0 < value <= 1.0:
        raise _UsageError(f"sampling resolution must be in (0, 1], got {text!r}")
    return value


def _read_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _build_parser() -> _Parser:
    p = _Parser(prog="vectorforge", description="Convert a raster image to a closed-path SVG.")
    p.add_argument("input", help="input PNG or binary PPM image")
    p.add_argument("-o", "--output", help="output SVG path (default: input with .svg suffix)")
    p.add_argument("--segmenter", choices=["srm", "graph", "csc"], default=None)
    p.add_argument("--q", type=float, default=None, help="SRM statistical granularity")
    p.add_argument("--k", type=float, default=None, help="graph segmenter component scale")
    p.add_argument("--threshold", type=float, default=None, help="CSC color distance threshold")
    p.add_argument("--min-region-frac", type=float, default=None, dest="min_region_frac")
    p.add_argument("--sampling", default=None, help='control point resolution, e.g. 0.05 or "1/20"')
    p.add_argument("--fill", choices=["mean", "median"], default=None)
    p.add_argument("--stroke", type=float, default=None, help="stroke width (default: no stroke)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--eval", action="store_true", default=False)
    p.add_argument("--debug-dumps", action="store_true", default=False, dest="debug_dumps")
    p.add_argument("--config", default=None, help="key=value config file; flags override")
    return p


def _merge_config(args) -> pipeline.PipelineConfig:
    file_values = _read_config(args.config) if args.config else {}

    def pick(flag, key, default, conv=float):
        if flag is not None:
            return flag
        if key in file_values:
            try:
                return conv(file_values[key])
            except ValueError as exc:
                raise _UsageError(f"config {key}: bad value {file_values[key]!r}") from exc
        return default

    sampling = args.sampling
    if sampling is not None:
        sampling = _parse_sampling(sampling)
    elif "sampling" in file_values:
        sampling = _parse_sampling(file_values["sampling"])
    else:
        sampling = 1.0 / 20.0
    stroke = pick(args.stroke, "stroke", None)
    try:
        return pipeline.PipelineConfig(
            segmenter=pick(args.segmenter, "segmenter", "graph", str),
            q=pick(args.q, "q", 32.0),
            k=pick(args.k, "k", 500.0),
            threshold=pick(args.threshold, "threshold", 40.0),
            min_region_frac=pick(args.min_region_frac, "min_region_frac", 0.0005),
            sampling_resolution=sampling,
            fill_mode=pick(args.fill, "fill", "mean", str),
            stroke=stroke,
            workers=int(pick(args.workers, "workers", 1, int)),
            eval=args.eval or file_values.get("eval", "").lower() in ("1", "true", "yes"),
            debug_dumps=args.debug_dumps
            or file_values.get("debug_dumps", "").lower() in ("1", "true", "yes"),
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _write_debug_dumps(out_path: Path, labels, trace_s) -> None:
    pgm = rastercore.encode_pgm((labels.labels % 256).astype("uint8"))
    out_path.with_suffix(".labels.pgm").write_bytes(pgm)
    pbm = rastercore.encode_pbm(trace_s.edges)
    out_path.with_suffix(".edges.pbm").write_bytes(pbm)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merge_config(args)
    except _UsageError as exc:
        print(f"vectorforge: error: {exc}", file=sys.stderr)
        return _EXIT_USAGE

    out_path = Path(args.output) if args.output else Path(args.input).with_suffix(".svg")
    try:
        img = rastercore.load_image(args.input)
    except rastercore.FormatError as exc:
        print(f"vectorforge: format error: {exc}", file=sys.stderr)
        return _EXIT_IO
    except OSError as exc:
        print(f"vectorforge: cannot read {args.input}: {exc}", file=sys.stderr)
        return _EXIT_IO

    try:
        svg_bytes, metrics = pipeline.run_pipeline(img, cfg)
    except (boundary.TopologyError, svgwriter.ChainError) as exc:
        print(f"vectorforge: internal topology error: {exc}", file=sys.stderr)
        return _EXIT_TOPOLOGY

    try:
        out_path.write_bytes(svg_bytes)
        if cfg.debug_dumps:
            labels = pipeline.segment(img, cfg)
            s = boundary.build_subpixel_edges(labels)
            s = boundary.fill_gaps(s)
            s = boundary.mark_junctions(s)
            _write_debug_dumps(out_path, labels, s)
    except OSError as exc:
        print(f"vectorforge: cannot write {out_path}: {exc}", file=sys.stderr)
        return _EXIT_IO

    if metrics is not None:
        print(metrics.to_json())
    return _EXIT_OK


def run() -> None:
    raise SystemExit(main(sys.argv[1:]))
