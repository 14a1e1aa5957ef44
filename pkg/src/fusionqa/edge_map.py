# -*- coding: utf-8 -*-
"""
This module labels pixels as edge or homogeneous points with the Sobel operator.

The gradient magnitude is sqrt(Gx^2 + Gy^2) with the standard 3x3 Sobel kernels on raw band values (no smoothing stage),
borders replicated so the gradient field keeps the band's dimensions. A pixel is an edge point when its magnitude is
strictly greater than the threshold. Magnitudes are not clamped.
"""
import logging
import numbers
from collections import namedtuple
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy import ndimage

from fusionqa.exceptions import DimensionMismatchError
from fusionqa.raster_core import Band, MultibandImage, as_band_mapping

__all__ = [
    "DEFAULT_THRESHOLDS",
    "GradientField",
    "EdgeMask",
    "SweepEntry",
    "sobel_magnitude",
    "label_edges",
    "edge_rate",
    "threshold_sweep",
    "check_thresholds",
    "edge_masks",
]

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS = (20, 40, 60, 80, 100)

SweepEntry = namedtuple("SweepEntry", ["threshold", "mask", "rate"])


@dataclass(frozen=True, eq=False)
class GradientField:
    """Sobel gradient magnitudes of one band, shape (height, width), all values >= 0."""

    magnitudes: np.ndarray
    source: Optional[str] = None

    def __post_init__(self):
        mags = np.asarray(self.magnitudes, dtype=np.float64)
        if mags.ndim != 2:
            raise ValueError("Gradient magnitudes must be 2-D, got shape {}".format(mags.shape))
        if np.any(mags < 0):
            raise ValueError("Gradient magnitudes must be non-negative")
        mags.setflags(write=False)
        object.__setattr__(self, "magnitudes", mags)

    @property
    def width(self) -> int:
        return int(self.magnitudes.shape[1])

    @property
    def height(self) -> int:
        return int(self.magnitudes.shape[0])


@dataclass(frozen=True, eq=False)
class EdgeMask:
    """
    Per-pixel edge labels (True = edge point) of one band at one threshold. The complement is the homogeneous region.
    """

    labels: np.ndarray
    threshold: float
    source: Optional[str] = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=bool)
        if labels.ndim != 2:
            raise ValueError("Edge labels must be 2-D, got shape {}".format(labels.shape))
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    @property
    def shape(self):
        return self.labels.shape

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.labels))

    @property
    def homogeneous_count(self) -> int:
        return int(self.labels.size - self.edge_count)

    @property
    def homogeneous(self) -> np.ndarray:
        return ~self.labels

    def check_shape(self, band: Band):
        if self.shape != band.shape:
            raise DimensionMismatchError(
                "Edge mask {}x{} (source {}) does not match band {}x{}".format(
                    self.width, self.height, self.source, band.width, band.height
                )
            )

    def to_band(self) -> Band:
        """Render the mask as a band: edge = 255, homogeneous = 0."""
        return Band(np.where(self.labels, 255, 0).astype(np.uint8), name=self.source)


def sobel_magnitude(band: Band) -> GradientField:
    """
    Sobel gradient magnitude sqrt(Gx^2 + Gy^2) with replicate padding at the borders.

    :param band: input band
    :type band: :class:`~fusionqa.raster_core.Band`
    :returns: :class:`GradientField`
    """
    data = band.pixels.astype(np.float64)
    gx = ndimage.sobel(data, axis=1, mode="nearest")
    gy = ndimage.sobel(data, axis=0, mode="nearest")
    return GradientField(magnitudes=np.hypot(gx, gy), source=band.name)


def label_edges(grad: GradientField, threshold) -> EdgeMask:
    """
    Label each pixel as edge (magnitude > threshold, strict) or homogeneous.

    :param grad: gradient field of a band
    :param threshold: intensity threshold in [0, 255]
    :returns: :class:`EdgeMask`
    """
    _check_threshold(threshold)
    return EdgeMask(labels=grad.magnitudes > threshold, threshold=threshold, source=grad.source)


def edge_rate(mask: EdgeMask) -> float:
    """Fraction of pixels labelled edge."""
    if mask.labels.size == 0:
        raise ValueError("Edge rate of an empty mask is undefined")
    return mask.edge_count / mask.labels.size


def _check_threshold(threshold):
    if isinstance(threshold, bool) or not isinstance(threshold, numbers.Real) or not 0 <= threshold <= 255:
        raise ValueError("Threshold must be an intensity in [0, 255], got {!r}".format(threshold))


def check_thresholds(thresholds: Sequence) -> List:
    """
    Validate a threshold list: non-empty, each in [0, 255], strictly increasing.
    """
    if isinstance(thresholds, (str, bytes)) or not isinstance(thresholds, Iterable):
        raise ValueError("Thresholds must be a list of numbers, got {!r}".format(thresholds))
    thresholds = list(thresholds)
    if not thresholds:
        raise ValueError("At least one threshold is required")
    for t in thresholds:
        _check_threshold(t)
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("Thresholds must be strictly increasing, got {}".format(thresholds))
    return thresholds


def threshold_sweep(band: Band, thresholds: Sequence = DEFAULT_THRESHOLDS) -> List[SweepEntry]:
    """
    Label ``band`` at every threshold from a single shared gradient field.

    :returns: list of ``SweepEntry(threshold, mask, rate)`` in threshold order
    """
    thresholds = check_thresholds(thresholds)
    grad = sobel_magnitude(band)
    sweep = []
    for t in thresholds:
        mask = label_edges(grad, t)
        sweep.append(SweepEntry(t, mask, edge_rate(mask)))
        logger.debug("Band %s threshold %s: edge rate %.4f", band.name, t, sweep[-1].rate)
    return sweep


def edge_masks(img: Union[MultibandImage, Band], thresholds: Sequence = DEFAULT_THRESHOLDS) -> Dict[str, List[EdgeMask]]:
    """
    Per-band edge masks, each band labelled from its own gradient.

    :returns: dict of band name to list of :class:`EdgeMask` in threshold order
    """
    return {
        name: [entry.mask for entry in threshold_sweep(band, thresholds)]
        for name, band in as_band_mapping(img).items()
    }
