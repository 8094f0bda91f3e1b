"""8-bit grayscale images, netpbm PGM persistence, and block vectorization.

Only PGM (P2 ASCII / P5 binary, maxval <= 255) is supported, which keeps
the package free of image decoding dependencies; any grayscale input can
be converted with common tools (e.g. ImageMagick ``convert in.png out.pgm``).

Images are vectorized for the solver one column per block (column-major
traversal), since columns of natural images are DCT-compressible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PgmParseError(ValueError):
    """Malformed PGM input; ``offset`` is the byte position of the defect."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


@dataclass(frozen=True)
class GrayImage:
    """Immutable 8-bit grayscale raster, row-major ``(height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"pixels must be a non-empty 2-D array, got {arr.shape}")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(
                    f"pixels must be integers, got dtype {arr.dtype}; "
                    "round floats explicitly first"
                )
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError(
                    f"pixel values must lie in [0, 255], got range "
                    f"[{arr.min()}, {arr.max()}]"
                )
            arr = arr.astype(np.uint8)
        else:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def to_float(self) -> np.ndarray:
        """Pixels as a writable float64 array."""
        return self.pixels.astype(np.float64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.all(self.pixels == other.pixels)
        )


class _Scanner:
    """Byte-level PGM header scanner that tracks its offset."""

    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos
        self.last_token_at = pos

    def skip_separators(self):
        while self.pos < len(self.data):
            c = self.data[self.pos : self.pos + 1]
            if c.isspace():
                self.pos += 1
            elif c == b"#":
                # comment runs to end of line
                nl = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if nl < 0 else nl + 1
            else:
                return

    def read_int(self, what: str) -> int:
        self.skip_separators()
        start = self.pos
        self.last_token_at = start
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            raise PgmParseError(f"expected {what}", start)
        return int(self.data[start : self.pos])


def read_pgm(data: bytes) -> GrayImage:
    """Parse P2 (ASCII) or P5 (binary) PGM bytes, maxval up to 255."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"unsupported magic {magic!r}, expected P2 or P5", 0)
    sc = _Scanner(data, 2)
    width = sc.read_int("width")
    height = sc.read_int("height")
    if width < 1 or height < 1:
        raise PgmParseError(f"invalid dimensions {width}x{height}", sc.pos)
    maxval = sc.read_int("maxval")
    if maxval > 255:
        raise PgmParseError(f"maxval {maxval} exceeds 255", sc.last_token_at)
    if maxval < 1:
        raise PgmParseError(f"maxval must be >= 1, got {maxval}", sc.last_token_at)
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the payload
        if sc.pos >= len(data) or not data[sc.pos : sc.pos + 1].isspace():
            raise PgmParseError("expected single whitespace before pixel data", sc.pos)
        start = sc.pos + 1
        if len(data) - start < count:
            raise PgmParseError(
                f"truncated pixel payload: need {count} bytes, have {len(data) - start}",
                len(data),
            )
        flat = np.frombuffer(data, dtype=np.uint8, count=count, offset=start)
    else:
        values = []
        for _ in range(count):
            at = sc.pos
            try:
                values.append(sc.read_int("pixel value"))
            except PgmParseError:
                raise PgmParseError(
                    f"truncated pixel list: need {count} values, have {len(values)}",
                    at,
                ) from None
        flat = np.asarray(values, dtype=np.int64)
    if flat.max(initial=0) > maxval:
        raise PgmParseError(
            f"pixel value {int(flat.max())} exceeds maxval {maxval}", sc.pos
        )
    return GrayImage(flat.reshape(height, width).astype(np.uint8))


def write_pgm(img: GrayImage, binary: bool = True) -> bytes:
    """Serialize to P5 (binary=True) or P2 bytes with maxval 255.

    Output is bit-exact for a given image: P5 is header plus exactly
    width*height payload bytes; P2 wraps its value list at 70 columns.
    """
    if binary:
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        return header + img.pixels.tobytes(order="C")
    lines = [f"P2\n{img.width} {img.height}\n255"]
    current = ""
    for value in img.pixels.ravel(order="C"):
        token = str(int(value))
        if not current:
            current = token
        elif len(current) + 1 + len(token) <= 70:
            current += " " + token
        else:
            lines.append(current)
            current = token
    if current:
        lines.append(current)
    return ("\n".join(lines) + "\n").encode("ascii")


def read_pgm_file(path) -> GrayImage:
    return read_pgm(Path(path).read_bytes())


def write_pgm_file(path, img: GrayImage, binary: bool = True) -> None:
    Path(path).write_bytes(write_pgm(img, binary=binary))


def image_to_blocks(img: GrayImage, block_len: int) -> list[np.ndarray]:
    """Split the column-major pixel stream into float vectors of block_len.

    With ``block_len == img.height`` (the default pipeline choice) the
    blocks are exactly the image columns.
    """
    total = img.width * img.height
    if block_len < 1 or total % block_len != 0:
        raise ValueError(
            f"block length {block_len} does not divide pixel count {total}"
        )
    flat = img.to_float().ravel(order="F")
    return [flat[i : i + block_len].copy() for i in range(0, total, block_len)]


def blocks_to_image(blocks, width: int, height: int) -> GrayImage:
    """Rebuild an image from column-major blocks, rounding and clamping."""
    flat = np.concatenate([np.asarray(blk, dtype=np.float64) for blk in blocks])
    if flat.shape[0] != width * height:
        raise ValueError(
            f"blocks hold {flat.shape[0]} values, image needs {width * height}"
        )
    clamped = np.clip(np.rint(flat), 0, 255).astype(np.uint8)
    return GrayImage(clamped.reshape((height, width), order="F"))
