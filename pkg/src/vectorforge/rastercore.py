"""Image containers, color arithmetic and file ingestion.

Arrays are indexed ``[row, col]`` (= ``[y, x]``); every public API that
speaks coordinates uses ``(x, y)`` pairs with ``x`` being the column.
Supported inputs are PNG (decoded through Pillow, alpha dropped) and
binary PPM (P6, maxval 255).  PPM is also the encode format so pixel
data can round-trip byte-for-byte in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class FormatError(ValueError):
    """Input bytes are not a decodable PNG / binary PPM image."""


@dataclass(eq=False)
class RasterImage:
    """W x H grid of 8-bit RGB triples.

    ``pixels`` has shape ``(height, width, 3)`` and dtype uint8.
    Instances are treated as immutable after construction and may be
    shared freely across workers.
    """

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise FormatError(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise FormatError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )

    @classmethod
    def from_array(cls, arr) -> "RasterImage":
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise FormatError(f"expected (H, W, 3) array, got shape {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], pixels=arr)

    def pixel(self, x: int, y: int) -> tuple[int, int, int]:
        r, g, b = self.pixels[y, x]
        return int(r), int(g), int(b)


def channel_abs_diff(p, q) -> int:
    """Max over {R,G,B} of the absolute channel difference.

    Symmetric, and zero exactly when the two pixels are equal.  This is
    the color metric used both for edge sorting in the segmenters and
    for graph edge weights.
    """
    return max(abs(int(a) - int(b)) for a, b in zip(p, q))


def _ppm_tokens(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    # Whitespace-separated integer header fields; '#' starts a comment
    # running to end of line.
    tokens: list[int] = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        j = i
        while j < n and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise FormatError("truncated PPM header")
        try:
            tokens.append(int(data[i:j]))
        except ValueError as exc:
            raise FormatError(f"bad PPM header field {data[i:j]!r}") from exc
        i = j
    return tokens, i


def decode_ppm(data: bytes) -> RasterImage:
    """Decode a binary PPM (P6) buffer with maxval 255."""
    if not data.startswith(b"P6"):
        raise FormatError("not a P6 PPM")
    (width, height, maxval), pos = _ppm_tokens(data, 3, 2)
    if maxval != 255:
        raise FormatError(f"unsupported PPM maxval {maxval}, expected 255")
    if width < 1 or height < 1:
        raise FormatError(f"bad PPM dimensions {width}x{height}")
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    need = width * height * 3
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise FormatError(f"truncated PPM raster: need {need} bytes, have {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3).copy()
    return RasterImage(width=width, height=height, pixels=pixels)


def encode_ppm(img: RasterImage) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def encode_pgm(gray: np.ndarray) -> bytes:
    """Binary PGM (P5) from a 2-D uint8 array; used for debug dumps."""
    gray = np.asarray(gray, dtype=np.uint8)
    h, w = gray.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + gray.tobytes()


def encode_pbm(bits: np.ndarray) -> bytes:
    """Binary PBM (P4) from a 2-D boolean array; used for debug dumps."""
    bits = np.asarray(bits, dtype=bool)
    h, w = bits.shape
    packed = np.packbits(bits, axis=1)
    return f"P4\n{w} {h}\n".encode("ascii") + packed.tobytes()


def load_image(path) -> RasterImage:
    """Load a PNG or binary PPM file into a RasterImage.

    Raises OSError for unreadable paths and FormatError for anything
    that is not a decodable PNG/P6 image.  Alpha channels are dropped;
    no other color transform is applied.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(_PNG_MAGIC):
        import io

        from PIL import Image, UnidentifiedImageError

        try:
            with Image.open(io.BytesIO(data)) as im:
                rgb = im.convert("RGB")
                arr = np.asarray(rgb, dtype=np.uint8)
        except UnidentifiedImageError as exc:
            raise FormatError(f"undecodable PNG: {path}") from exc
        if arr.size == 0:
            raise FormatError(f"zero-dimension PNG: {path}")
        return RasterImage.from_array(arr)
    if data.startswith(b"P6"):
        return decode_ppm(data)
    raise FormatError(f"unsupported image format (not PNG or P6 PPM): {path}")
