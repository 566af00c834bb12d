#! /usr/bin/env python3

import logging
import numpy as np
from pathlib import Path
from typing import Sequence, Union

from .utils.errors import FormatError, OutOfBounds
from .utils.config import _MAXVAL, _PGM_MAGIC

logger = logging.getLogger(__name__)

_WHITESPACE = b" \t\n\r\v\f"


class GrayImage:

    """
    `GrayImage Class`

    An 8-bit grayscale raster, the carrier of the whole
    toolkit: cover, stego and recovered images are all
    `GrayImage` instances.

    Pixels are held in a read-only `np.ndarray` of dtype
    uint8 and shape (height, width), row-major with the
    origin at the top-left corner. Once built the image
    never changes, so it can be shared freely between
    workers; the engine builds a new one for each output.

    Engine-facing accessors are 1-based, `pixel(i, j)` is
    the pixel on row i and column j. Serialized metadata
    speaks 0-based linear indices instead, see `linear`
    and `position`.

    Parameters
    -----------

    `pixels`:
       Either a 2-D array-like of shape (height, width), or
       a flat sequence in row-major order, in which case
       `width` and `height` are required. Every value must
       be an integer in [0, 255].

    `width`, `height`:
       Raster dimensions, both >= 1.
    """

    def __init__(
        self,
        pixels: Union[Sequence, np.ndarray],
        width: int = None,
        height: int = None,
    ):
        arr = np.asarray(pixels)

        if arr.ndim == 1:
            if width is None or height is None:
                msg = "Flat pixels need both `width` and `height`"
                raise ValueError(msg)
            if len(arr) != width * height:
                msg = f"Expected {width * height} pixels, got {len(arr)}"
                raise ValueError(msg)
            arr = arr.reshape(height, width)

        elif arr.ndim != 2:
            msg = "Pixels must be a flat or 2-D array"
            raise ValueError(msg)

        elif width is not None and height is not None:
            if arr.shape != (height, width):
                msg = f"Shape {arr.shape} disagrees with {width}x{height}"
                raise ValueError(msg)

        if arr.shape[0] < 1 or arr.shape[1] < 1:
            msg = "Image must be at least 1x1"
            raise ValueError(msg)

        if arr.dtype.kind not in "iu":
            msg = f"Pixel values must be integers, got dtype {arr.dtype}"
            raise ValueError(msg)

        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > _MAXVAL):
                msg = "Pixel values must lie in [0, 255]"
                raise ValueError(msg)
            arr = arr.astype(np.uint8)

        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)

        self.__array = arr

    def __repr__(self):
        return f"<{self.__class__.__name__} {self.width}x{self.height}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.__array, other.array)

    def __len__(self):
        return self.__array.size

    def pixel(self, i: int, j: int) -> int:
        if not (1 <= i <= self.height and 1 <= j <= self.width):
            msg = f"Pixel ({i}, {j}) outside {self.height}x{self.width} image"
            raise OutOfBounds(msg)

        return int(self.__array[i - 1, j - 1])

    def linear(self, i: int, j: int) -> int:
        """
        1-based (i, j) -> 0-based row-major index.
        """
        if not (1 <= i <= self.height and 1 <= j <= self.width):
            msg = f"Pixel ({i}, {j}) outside {self.height}x{self.width} image"
            raise OutOfBounds(msg)

        return (i - 1) * self.width + (j - 1)

    def position(self, index: int) -> tuple:
        """
        0-based row-major index -> 1-based (i, j).
        """
        if not 0 <= index < len(self):
            msg = f"Linear index {index} outside image"
            raise OutOfBounds(msg)

        return index // self.width + 1, index % self.width + 1

    @property
    def width(self) -> int:
        return self.__array.shape[1]

    @property
    def height(self) -> int:
        return self.__array.shape[0]

    @property
    def shape(self) -> tuple:
        return self.__array.shape

    @property
    def array(self) -> np.ndarray:
        return self.__array

    @property
    def pixels(self) -> np.ndarray:
        return self.__array.ravel()


def _next_token(data: bytes, pos: int) -> tuple:

    """
    Reads one whitespace separated header token starting
    at `pos`, skipping whitespace and '#' comments running
    to the end of their line. Returns the token and the
    position of the byte right after it.
    """

    size = len(data)

    while pos < size:
        byte = data[pos:pos + 1]
        if byte == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                msg = "Header comment runs to end of file"
                raise FormatError(msg)
            pos = end + 1
        elif byte in _WHITESPACE:
            pos += 1
        else:
            break

    start = pos
    while pos < size and data[pos:pos + 1] not in _WHITESPACE + b"#":
        pos += 1

    if start == pos:
        msg = "Truncated PGM header"
        raise FormatError(msg)

    return data[start:pos], pos


def _header_int(token: bytes, name: str) -> int:
    if not token.isdigit():
        msg = f"Non-numeric PGM {name}: {token!r}"
        raise FormatError(msg)
    return int(token)


def load_pgm(data: bytes) -> GrayImage:

    """
    `Load PGM Function`

    Decodes a binary PGM (P5) byte string: magic "P5", then
    width, height and maxval separated by whitespace (with
    '#' comments allowed in between), one whitespace byte,
    and width x height raw bytes. Only maxval 255 is read,
    the toolkit is strictly 8-bit.
    """

    data = bytes(data)

    magic, pos = _next_token(data, 0)
    if magic != _PGM_MAGIC:
        msg = f"Bad PGM magic {magic!r}"
        raise FormatError(msg)

    token, pos = _next_token(data, pos)
    width = _header_int(token, "width")
    token, pos = _next_token(data, pos)
    height = _header_int(token, "height")
    token, pos = _next_token(data, pos)
    maxval = _header_int(token, "maxval")

    if width < 1 or height < 1:
        msg = f"Bad PGM dimensions {width}x{height}"
        raise FormatError(msg)

    if maxval != _MAXVAL:
        msg = f"PGM maxval {maxval} not supported, expected 255"
        raise FormatError(msg)

    if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
        msg = "Missing whitespace after PGM header"
        raise FormatError(msg)

    start = pos + 1
    stop = start + width * height

    if len(data) < stop:
        msg = f"Truncated PGM raster: {len(data) - start} of {width * height} bytes"
        raise FormatError(msg)

    if len(data) > stop:
        logger.debug("Ignoring %d trailing bytes after PGM raster", len(data) - stop)

    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=start)

    return GrayImage(raster.reshape(height, width))


def save_pgm(img: GrayImage) -> bytes:

    """
    Canonical P5 form, no comments: "P5\\n<w> <h>\\n255\\n"
    followed by the raw pixel bytes.
    """

    if not isinstance(img, GrayImage):
        msg = "Arg `img` must be a GrayImage"
        raise TypeError(msg)

    header = f"P5\n{img.width} {img.height}\n{_MAXVAL}\n".encode("ascii")

    return header + img.array.tobytes()


def read_pgm(path: Union[str, Path]) -> GrayImage:
    return load_pgm(Path(path).read_bytes())


def write_pgm(path: Union[str, Path], img: GrayImage):
    Path(path).write_bytes(save_pgm(img))
