# -*- coding: utf-8 -*-
"""
This module contains the fundamental raster types of *fusionqa* and the pixel operations shared by every metric module:
nearest-neighbour resampling, L-component derivation, block extraction and the population statistics (mean and
standard deviation) on which contrast, CSA and SNR are built.

All rasters hold 8-bit intensities in a read-only ``numpy`` array of shape (height, width). Objects are immutable after
construction and may be shared freely between worker threads.
"""
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from fusionqa.exceptions import (
    DimensionMismatchError,
    EmptyRegionError,
    RegionBoundsError,
)

__all__ = [
    "BAND_NAMES",
    "Band",
    "MultibandImage",
    "RegionSpec",
    "PixelStats",
    "create_band",
    "create_image",
    "create_region",
    "round_half_up",
    "upsample_nearest",
    "l_component",
    "extract_block",
    "pixel_stats",
    "as_band_mapping",
    "pooled_pixels",
]

BAND_NAMES = ("R", "G", "B")


def create_band(pixels, **kwargs):
    """
    User interface function to create a :class:`Band`.

    :param pixels: 2-D array-like of intensities in [0, 255], row-major (height, width)
    :keyword:

    * name (`str`): Optional band identifier used in reports (e.g. "R", "PAN")

    :returns: :class:`Band`
    """
    return Band(pixels=pixels, name=kwargs.get("name", None))


def create_image(**kwargs):
    """
    User interface function to create a :class:`MultibandImage`.

    :keyword:

    * r, g, b (:class:`Band` or array-like): the three colour bands. Alternatively
    * array (array-like): (height, width, 3) array of R, G, B intensities
    * label (`str`): method name (e.g. "HFA", "MS")

    :returns: :class:`MultibandImage`
    """
    label = kwargs.get("label", "image")
    array = kwargs.get("array", None)
    if array is not None:
        return MultibandImage.from_array(array, label=label)
    bands = [kwargs.get(key, None) for key in ("r", "g", "b")]
    if any(b is None for b in bands):
        raise ValueError("Missing one or more keyword arguments for r=, g=, b= (or array=)")
    r, g, b = [bd if isinstance(bd, Band) else Band(bd) for bd in bands]
    return MultibandImage(r=r, g=g, b=b, label=label)


def create_region(**kwargs):
    """
    User interface function to create a :class:`RegionSpec`.

    :keyword:

    * name (`str`): region name
    * x0, y0 (`int`): column and row origin
    * w, h (`int`): block width and height
    * group (`str`): pooling group - blocks sharing a group are evaluated as one population. Defaults to name.

    :returns: :class:`RegionSpec`
    """
    missing = [k for k in ("name", "x0", "y0", "w", "h") if kwargs.get(k, None) is None]
    if missing:
        raise ValueError("Missing keyword arguments for region: {}".format(missing))
    return RegionSpec(
        name=kwargs["name"],
        x0=kwargs["x0"],
        y0=kwargs["y0"],
        w=kwargs["w"],
        h=kwargs["h"],
        group=kwargs.get("group", None),
    )


def round_half_up(values) -> np.ndarray:
    """
    Round half up and clamp to [0, 255], returning ``uint8``. Every derived 8-bit pixel goes through this function.
    """
    values = np.asarray(values, dtype=np.float64)
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def _as_pixel_array(pixels) -> np.ndarray:
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ValueError("Band pixels must be a 2-D grid, got array of shape {}".format(arr.shape))
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("Band must have positive width and height, got shape {}".format(arr.shape))
    if arr.dtype == np.uint8:
        out = arr.copy()
    else:
        if arr.dtype == bool or not np.issubdtype(arr.dtype, np.number):
            raise ValueError("Band pixels must be numeric intensities, got dtype {}".format(arr.dtype))
        if not np.all(np.isfinite(arr)):
            raise ValueError("Band pixels contain non-finite values")
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError(
                "Band intensities must lie in [0, 255], got range [{}, {}]".format(arr.min(), arr.max())
            )
        if np.any(arr != np.floor(arr)):
            raise ValueError("Band intensities must be integers. Hint: use round_half_up() on derived values")
        out = arr.astype(np.uint8)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Band:
    """
    A single 8-bit raster band. ``pixels`` is a read-only ``uint8`` array of shape (height, width).
    """

    pixels: np.ndarray
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "pixels", _as_pixel_array(self.pixels))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def shape(self):
        return self.pixels.shape

    def renamed(self, name: str) -> "Band":
        """Return the same pixels under another band name."""
        return Band(self.pixels, name=name)

    def __eq__(self, other):
        if not isinstance(other, Band):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = object.__hash__

    def __repr__(self):
        return "Band(name={!r}, width={}, height={})".format(self.name, self.width, self.height)


@dataclass(frozen=True, eq=False)
class MultibandImage:
    """
    Ordered R, G, B bands of identical dimensions plus the method label (e.g. "HFA", "MS").
    The L band is derived on request via :func:`l_component`.
    """

    r: Band
    g: Band
    b: Band
    label: str = "image"

    def __post_init__(self):
        shapes = {self.r.shape, self.g.shape, self.b.shape}
        if len(shapes) != 1:
            raise DimensionMismatchError(
                "Bands of image '{}' differ in dimensions: {}".format(self.label, sorted(shapes))
            )
        # bands carry their colour name so reports can label them
        for name in BAND_NAMES:
            band = getattr(self, name.lower())
            if band.name != name:
                object.__setattr__(self, name.lower(), band.renamed(name))

    @classmethod
    def from_array(cls, array, label: str = "image") -> "MultibandImage":
        arr = np.asarray(array)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError("RGB array must have shape (height, width, 3), got {}".format(arr.shape))
        return cls(
            r=Band(arr[:, :, 0], "R"),
            g=Band(arr[:, :, 1], "G"),
            b=Band(arr[:, :, 2], "B"),
            label=label,
        )

    def to_array(self) -> np.ndarray:
        return np.dstack([self.r.pixels, self.g.pixels, self.b.pixels])

    @property
    def width(self) -> int:
        return self.r.width

    @property
    def height(self) -> int:
        return self.r.height

    @property
    def shape(self):
        return self.r.shape

    def bands(self, include_l: bool = False) -> Dict[str, Band]:
        """
        Return the bands keyed by name in R, G, B (, L) order.
        """
        out = {"R": self.r, "G": self.g, "B": self.b}
        if include_l:
            out["L"] = l_component(self)
        return out

    def relabel(self, label: str) -> "MultibandImage":
        return MultibandImage(r=self.r, g=self.g, b=self.b, label=label)

    def __eq__(self, other):
        if not isinstance(other, MultibandImage):
            return NotImplemented
        return all(getattr(self, k) == getattr(other, k) for k in ("r", "g", "b"))

    __hash__ = object.__hash__

    def __repr__(self):
        return "MultibandImage(label={!r}, width={}, height={})".format(self.label, self.width, self.height)


@dataclass(frozen=True)
class RegionSpec:
    """
    Named rectangular block [x0, x0+w) x [y0, y0+h). Blocks sharing a ``group`` are pooled into one population by the
    block-based metrics (the seven 10x10 blocks of "b3", for instance).
    """

    name: str
    x0: int
    y0: int
    w: int
    h: int
    group: Optional[str] = None

    def __post_init__(self):
        for key in ("x0", "y0", "w", "h"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValueError("Region '{}': {} must be an integer, got {!r}".format(self.name, key, value))
            object.__setattr__(self, key, int(value))
        if self.w < 1 or self.h < 1:
            raise ValueError("Region '{}': w and h must be >= 1, got {}x{}".format(self.name, self.w, self.h))
        if self.group is None:
            object.__setattr__(self, "group", self.name)

    def fits(self, width: int, height: int) -> bool:
        return self.x0 >= 0 and self.y0 >= 0 and self.x0 + self.w <= width and self.y0 + self.h <= height

    def check_bounds(self, width: int, height: int):
        if not self.fits(width, height):
            raise RegionBoundsError(
                "Region '{}' block [{}, {}) x [{}, {}) lies outside the {}x{} image".format(
                    self.name, self.x0, self.x0 + self.w, self.y0, self.y0 + self.h, width, height
                )
            )

    def to_dict(self) -> dict:
        return {"name": self.name, "x0": self.x0, "y0": self.y0, "w": self.w, "h": self.h, "group": self.group}


@dataclass(frozen=True)
class PixelStats:
    """Population statistics of a pixel collection: mean, standard deviation (divisor n), count, min and max."""

    mean: float
    std_dev: float
    n: int
    min: float
    max: float


def upsample_nearest(src: Band, factor: int) -> Band:
    """
    Nearest-neighbour upsampling by an integer factor. Output pixel (i, j) equals source pixel
    (floor(i / factor), floor(j / factor)).

    :param src: Band to upsample
    :type src: :class:`Band`
    :param factor: positive integer factor
    :type factor: int
    :returns: :class:`Band` of size (width x factor) x (height x factor)
    """
    if isinstance(factor, bool) or not isinstance(factor, (int, np.integer)) or factor < 1:
        raise ValueError("Upsampling factor must be a positive integer, got {!r}".format(factor))
    factor = int(factor)
    if factor == 1:
        return src
    out = np.repeat(np.repeat(src.pixels, factor, axis=0), factor, axis=1)
    return Band(out, name=src.name)


def l_component(img: MultibandImage) -> Band:
    """
    Luminosity band L = round((R + G + B) / 3), rounded half up and clamped to [0, 255].
    """
    total = (
        img.r.pixels.astype(np.float64)
        + img.g.pixels.astype(np.float64)
        + img.b.pixels.astype(np.float64)
    )
    return Band(round_half_up(total / 3.0), name="L")


def extract_block(band: Band, region: RegionSpec) -> Band:
    """
    Copy the w x h sub-grid of ``band`` covered by ``region``.

    :raises RegionBoundsError: if the region is not fully inside the band.
    """
    region.check_bounds(band.width, band.height)
    block = band.pixels[region.y0 : region.y0 + region.h, region.x0 : region.x0 + region.w]
    return Band(block, name=band.name)


def pixel_stats(pixels) -> PixelStats:
    """
    Mean and population standard deviation (divisor n, no Bessel correction) of a pixel collection.

    :param pixels: :class:`Band`, numpy array or any iterable of intensities
    :returns: :class:`PixelStats`
    :raises EmptyRegionError: if the collection is empty
    """
    values = _flat_values(pixels)
    if values.size == 0:
        raise EmptyRegionError("Pixel statistics requested over an empty region")
    data = values.astype(np.float64)
    mean = float(np.mean(data))
    std = float(np.sqrt(np.mean((data - mean) ** 2)))
    return PixelStats(mean=mean, std_dev=std, n=int(values.size), min=values.min().item(), max=values.max().item())


def _flat_values(pixels) -> np.ndarray:
    if isinstance(pixels, Band):
        return pixels.pixels.ravel()
    if not isinstance(pixels, (np.ndarray, list, tuple)):
        pixels = list(pixels)
    return np.asarray(pixels).ravel()


def as_band_mapping(img: Union[MultibandImage, Band]) -> Dict[str, Band]:
    """
    Return ``{band name: Band}`` for an RGB image, or ``{name: band}`` for a single-band image (PAN when unnamed).
    """
    if isinstance(img, MultibandImage):
        return img.bands()
    if isinstance(img, Band):
        return {img.name or "PAN": img}
    raise TypeError("Expected MultibandImage or Band, got {}".format(type(img).__name__))


def pooled_pixels(band: Band, regions: Iterable[RegionSpec]) -> np.ndarray:
    """
    Concatenate the pixels of every block in ``regions`` into one flat population.
    """
    blocks: List[np.ndarray] = [extract_block(band, region).pixels.ravel() for region in regions]
    if not blocks:
        raise EmptyRegionError("No regions given to pool")
    return np.concatenate(blocks)
