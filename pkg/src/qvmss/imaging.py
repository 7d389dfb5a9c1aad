"""Binary images, bit-exact PBM I/O, and deterministic test fixtures.

Bit value 1 is an opaque/black pixel and 0 is transparent/white, which is
exactly PBM's polarity, so nothing in the pipeline ever inverts pixel values.
Both netpbm variants are supported: P1 (ASCII) and P4 (bit-packed, the
canonical output format).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import rng

MAX_DIMENSION = 1 << 20
MAX_PIXELS = 1 << 26

_WHITESPACE = frozenset(b" \t\n\r\v\f")


class ShapeMismatchError(ValueError):
    """Two images that must share dimensions do not."""


class PbmParseError(ValueError):
    """Malformed PBM input; `offset` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class PbmVariant(Enum):
    P1_ASCII = "p1"
    P4_PACKED = "p4"


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Width x height grid of bits stored flat in row-major order."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensions must be positive, got {self.width}x{self.height}")
        bits = np.array(self.bits, dtype=np.uint8)
        if bits.shape != (self.width * self.height,):
            raise ValueError(
                f"expected {self.width * self.height} bits, got shape {bits.shape}"
            )
        if bits.max(initial=0) > 1:
            raise ValueError("bits must be 0 or 1")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.bits, other.bits)
        )

    def __xor__(self, other: "BinaryImage") -> "BinaryImage":
        require_same_shape(self, other)
        return BinaryImage(self.width, self.height, self.bits ^ other.bits)

    def complement(self) -> "BinaryImage":
        return BinaryImage(self.width, self.height, self.bits ^ 1)

    def ones_fraction(self) -> float:
        return float(self.bits.mean())

    def as_grid(self) -> np.ndarray:
        """(height, width) view of the bits."""
        return self.bits.reshape(self.height, self.width)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BinaryImage":
        grid = np.asarray(rows, dtype=np.uint8)
        if grid.ndim != 2:
            raise ValueError("from_rows expects a 2-D row layout")
        return cls(grid.shape[1], grid.shape[0], grid.reshape(-1))


def require_same_shape(a: BinaryImage, b: BinaryImage) -> None:
    if a.width != b.width or a.height != b.height:
        raise ShapeMismatchError(
            f"image dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def _skip_header_filler(data: bytes, pos: int) -> int:
    """Advance past whitespace and # comments between header tokens."""
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#'
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        else:
            break
    return pos

def _read_dimension(data: bytes, pos: int, name: str) -> tuple[int, int]:
    pos = _skip_header_filler(data, pos)
    if pos >= len(data):
        raise PbmParseError(f"unexpected end of input while reading {name}", pos)
    start = pos
    while pos < len(data) and 0x30 <= data[pos] <= 0x39:
        pos += 1
    if pos == start:
        raise PbmParseError(f"expected decimal {name}", start)
    value = int(data[start:pos])
    if value < 1 or value > MAX_DIMENSION:
        raise PbmParseError(f"{name} {value} out of supported range", start)
    return value, pos


def read_pbm(data: bytes) -> BinaryImage:
    """Parse a P1 or P4 PBM file into a BinaryImage.

    Header comments and arbitrary whitespace are accepted; P4 row padding
    bits are ignored.  Raises PbmParseError (with a byte offset) on bad
    magic, malformed dimensions, or truncated payload.
    """
    if len(data) < 2 or data[0] != 0x50 or data[1] not in (0x31, 0x34):
        magic = data[:2].decode("ascii", errors="replace") if data else "<empty>"
        raise PbmParseError(f"unsupported magic {magic!r}, expected P1 or P4", 0)
    variant = PbmVariant.P1_ASCII if data[1] == 0x31 else PbmVariant.P4_PACKED
    if len(data) < 3 or (data[2] not in _WHITESPACE and data[2] != 0x23):
        raise PbmParseError("expected whitespace after magic", 2)

    width, pos = _read_dimension(data, 2, "width")
    height, pos = _read_dimension(data, pos, "height")
    if width * height > MAX_PIXELS:
        raise PbmParseError(f"image {width}x{height} exceeds {MAX_PIXELS} pixels", 2)

    if variant is PbmVariant.P1_ASCII:
        bits = _read_p1_raster(data, pos, width * height)
    else:
        bits = _read_p4_raster(data, pos, width, height)
    return BinaryImage(width, height, bits)


def _read_p1_raster(data: bytes, pos: int, count: int) -> np.ndarray:
    bits = np.empty(count, dtype=np.uint8)
    filled = 0
    n = len(data)
    while filled < count:
        if pos >= n:
            raise PbmParseError(
                f"raster ended after {filled} of {count} pixels", pos
            )
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#'
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        elif c in (0x30, 0x31):
            bits[filled] = c - 0x30
            filled += 1
            pos += 1
        else:
            raise PbmParseError(f"unexpected raster byte {chr(c)!r}", pos)
    return bits


def _read_p4_raster(data: bytes, pos: int, width: int, height: int) -> np.ndarray:
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise PbmParseError("expected single whitespace before packed raster", pos)
    pos += 1
    row_bytes = (width + 7) // 8
    needed = row_bytes * height
    if len(data) - pos < needed:
        raise PbmParseError(
            f"packed raster truncated: need {needed} bytes, have {len(data) - pos}",
            len(data),
        )
    packed = np.frombuffer(data, dtype=np.uint8, count=needed, offset=pos)
    rows = np.unpackbits(packed.reshape(height, row_bytes), axis=1)[:, :width]
    return np.ascontiguousarray(rows).reshape(-1)


def write_pbm(image: BinaryImage, variant: PbmVariant = PbmVariant.P4_PACKED) -> bytes:
    """Serialize to PBM bytes; output is canonical and byte-reproducible."""
    header = f"{'P1' if variant is PbmVariant.P1_ASCII else 'P4'}\n{image.width} {image.height}\n"
    grid = image.as_grid()
    if variant is PbmVariant.P1_ASCII:
        body = "\n".join(" ".join(str(b) for b in row) for row in grid)
        return (header + body + "\n").encode("ascii")
    packed = np.packbits(grid, axis=1)  # zero-padded to whole bytes per row
    return header.encode("ascii") + packed.tobytes()


# 3x5 glyphs for the text_glyphs fixture, 1 = opaque.
_GLYPHS_3X5 = {
    "S": ["111", "100", "111", "001", "111"],
    "H": ["101", "101", "111", "101", "101"],
    "A": ["010", "101", "111", "101", "101"],
    "R": ["110", "101", "110", "101", "101"],
    "E": ["111", "100", "110", "100", "111"],
}
_GLYPH_TEXT = "SHARE"


def _text_tile() -> np.ndarray:
    rows = 7  # 5 glyph rows + blank line above and below
    cols = 4 * len(_GLYPH_TEXT) + 1  # 3-wide glyphs with 1-column gaps
    tile = np.zeros((rows, cols), dtype=np.uint8)
    for i, ch in enumerate(_GLYPH_TEXT):
        glyph = np.array([[int(b) for b in line] for line in _GLYPHS_3X5[ch]], dtype=np.uint8)
        tile[1:6, 1 + 4 * i : 4 + 4 * i] = glyph
    return tile


def make_fixture(kind: str, width: int, height: int, seed: int = 0) -> BinaryImage:
    """Deterministic test image: checkerboard, all_zero, all_one, random, or text_glyphs."""
    if width < 1 or height < 1:
        raise ValueError(f"dimensions must be positive, got {width}x{height}")
    if kind == "all_zero":
        bits = np.zeros(width * height, dtype=np.uint8)
    elif kind == "all_one":
        bits = np.ones(width * height, dtype=np.uint8)
    elif kind == "checkerboard":
        y, x = np.indices((height, width), dtype=np.uint32)
        bits = ((x + y) & 1).astype(np.uint8).reshape(-1)
    elif kind == "random":
        draws = rng.u64_array(seed, np.arange(width * height, dtype=np.uint64), 0)
        bits = (draws >> np.uint64(63)).astype(np.uint8)
    elif kind == "text_glyphs":
        tile = _text_tile()
        scale = max(1, min(width, height) // 64)
        tile = np.kron(tile, np.ones((scale, scale), dtype=np.uint8))
        reps = (height // tile.shape[0] + 1, width // tile.shape[1] + 1)
        bits = np.ascontiguousarray(np.tile(tile, reps)[:height, :width]).reshape(-1)
    else:
        raise ValueError(f"unknown fixture kind {kind!r}")
    return BinaryImage(width, height, bits)
