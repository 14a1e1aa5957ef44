# -*- coding: utf-8 -*-
"""
Image ingestion and output. Binary Netpbm files (P5 grey, P6 RGB) are parsed bit-exactly, comment lines included, and
8-bit PNG files (grey or RGB) are accepted as convenience input through ``pypng``. Output is always P5 or P6.

Sources declaring 6-bit depth (maxval 63, or ``bit_depth=6``) are left-shifted by 2 at load time so that every metric
runs on a single [0, 255] scale.
"""
import logging
import os
from typing import Optional, Union

import numpy as np
import png

from fusionqa.exceptions import ImageReadError
from fusionqa.raster_core import Band, MultibandImage

__all__ = ["read_image", "write_image", "read_pnm", "write_pnm", "read_png"]

logger = logging.getLogger(__name__)

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = b" \t\n\r\x0b\x0c"
# maxval -> left shift onto the 8-bit scale
_SUPPORTED_MAXVAL = {255: 0, 63: 2}


def read_image(path, label: Optional[str] = None, bit_depth: Optional[int] = None):
    """
    Read a P5, P6 or PNG file.

    :param path: file path
    :param label: method label given to RGB images (defaults to the file stem)
    :param bit_depth: declared source depth, 8 (default) or 6. A 6-bit source is left-shifted by 2.
    :returns: :class:`~fusionqa.raster_core.Band` for single-band files, else
              :class:`~fusionqa.raster_core.MultibandImage`
    :raises ImageReadError: if the file cannot be read or is of an unsupported format
    """
    if label is None:
        label = os.path.splitext(os.path.basename(str(path)))[0]
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise ImageReadError("Cannot read image file {}: {}".format(path, e.strerror or e)) from e

    if data.startswith(PNG_SIGNATURE):
        array = read_png(data, path)
        shift = 0
    elif data[:2] in (b"P5", b"P6"):
        array, shift = read_pnm(data, path)
    else:
        raise ImageReadError(
            "Unsupported image format for {}. Hint: binary PGM (P5), PPM (P6) or 8-bit PNG are accepted".format(path)
        )

    if bit_depth not in (None, 8, 6):
        raise ImageReadError("Unsupported bit depth {} for {}: only 8 or 6".format(bit_depth, path))
    if bit_depth == 6 and shift == 0:
        if array.max() > 63:
            raise ImageReadError(
                "{} declared 6-bit but holds values up to {}".format(path, int(array.max()))
            )
        shift = 2
    if shift:
        logger.debug("Scaling 6-bit source %s to 8 bits", path)
        array = (array.astype(np.uint16) << shift).astype(np.uint8)

    logger.debug("Read %s (%d x %d, %d band(s))", path, array.shape[1], array.shape[0], 1 if array.ndim == 2 else 3)
    if array.ndim == 2:
        return Band(array)
    return MultibandImage.from_array(array, label=label)


def read_pnm(data: bytes, path="<bytes>"):
    """
    Parse a binary P5/P6 file held in ``data``.

    :returns: tuple of (uint8 array of shape (h, w) or (h, w, 3), left shift needed for the declared depth)
    """
    magic = data[:2]
    tokens = []
    pos = 2
    # width, height, maxval separated by whitespace and comments
    while len(tokens) < 3:
        if pos >= len(data):
            raise ImageReadError("Truncated Netpbm header in {}".format(path))
        byte = data[pos : pos + 1]
        if byte in _WHITESPACE:
            pos += 1
        elif byte == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        else:
            start = pos
            while pos < len(data) and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
                pos += 1
            token = data[start:pos]
            if not token.isdigit():
                raise ImageReadError("Malformed Netpbm header field {!r} in {}".format(token, path))
            tokens.append(int(token))
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise ImageReadError("Missing whitespace after maxval in {}".format(path))
    pos += 1  # exactly one whitespace byte before the raster

    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise ImageReadError("Degenerate image dimensions {}x{} in {}".format(width, height, path))
    if maxval not in _SUPPORTED_MAXVAL:
        raise ImageReadError(
            "maxval {} not supported in {}. Hint: 8-bit (255) or 6-bit (63) sources only".format(maxval, path)
        )
    planes = 1 if magic == b"P5" else 3
    expected = width * height * planes
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise ImageReadError(
            "Truncated raster in {}: expected {} bytes, found {}".format(path, expected, len(raster))
        )
    array = np.frombuffer(raster, dtype=np.uint8)
    if array.max(initial=0) > maxval:
        raise ImageReadError("Sample exceeds maxval {} in {}".format(maxval, path))
    shape = (height, width) if planes == 1 else (height, width, 3)
    return array.reshape(shape).copy(), _SUPPORTED_MAXVAL[maxval]


def read_png(data: bytes, path="<bytes>") -> np.ndarray:
    """
    Decode an 8-bit grey or RGB PNG (palettes are expanded, alpha is dropped).
    """
    try:
        width, height, rows, info = png.Reader(bytes=data).asDirect()
        pixels = np.vstack([np.asarray(row, dtype=np.uint16) for row in rows])
    except png.Error as e:
        raise ImageReadError("Cannot decode PNG {}: {}".format(path, e)) from e
    if info["bitdepth"] != 8:
        raise ImageReadError("PNG {} has bit depth {}: only 8-bit PNG is accepted".format(path, info["bitdepth"]))
    planes = info["planes"]
    pixels = pixels.reshape(height, width, planes).astype(np.uint8)
    if info.get("alpha", False):
        pixels = pixels[:, :, :-1]
        planes -= 1
    if planes == 1:
        return pixels[:, :, 0]
    return pixels


def write_image(path, image: Union[Band, MultibandImage]):
    """
    Write a :class:`~fusionqa.raster_core.Band` as P5 or a :class:`~fusionqa.raster_core.MultibandImage` as P6.
    """
    if isinstance(image, Band):
        array = image.pixels
    elif isinstance(image, MultibandImage):
        array = image.to_array()
    else:
        raise TypeError("write_image expects Band or MultibandImage, got {}".format(type(image).__name__))
    with open(path, "wb") as f:
        f.write(write_pnm(array))
    logger.debug("Wrote %s", path)


def write_pnm(array: np.ndarray) -> bytes:
    """
    Encode a uint8 array as binary P5 (2-D) or P6 (3-D) bytes with maxval 255.
    """
    array = np.ascontiguousarray(array, dtype=np.uint8)
    magic = b"P5" if array.ndim == 2 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (array.shape[1], array.shape[0])
    return header + array.tobytes()
