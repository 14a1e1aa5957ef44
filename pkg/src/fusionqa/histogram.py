# -*- coding: utf-8 -*-
"""
Brightness histograms of the edge pixels (or the whole band) and a scalar measure of histogram shape difference.

The difference measure is the total-variation distance between normalised histograms,
0.5 * sum_v |h1[v] / n1 - h2[v] / n2|, which is symmetric, bounded in [0, 1] and insensitive to pixel counts.

In :func:`edge_histogram_suite` every image takes its edge pixels from its OWN Sobel mask, so intensities that only
the fused image has at its edges show up as histogram difference.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from fusionqa.edge_map import EdgeMask, label_edges, sobel_magnitude
from fusionqa.exceptions import DimensionMismatchError, EmptyHistogramError
from fusionqa.raster_core import Band, MultibandImage

__all__ = [
    "Histogram256",
    "HistogramSuite",
    "build_histogram",
    "histogram_delta",
    "edge_histogram_suite",
    "whole_histogram_suite",
    "write_histogram_csv",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Histogram256:
    """256 intensity counts of one band over one pixel population."""

    bins: np.ndarray
    band: Optional[str] = None
    scope: str = "whole"

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.int64)
        if bins.shape != (256,):
            raise ValueError("Histogram must have 256 bins, got shape {}".format(bins.shape))
        if np.any(bins < 0):
            raise ValueError("Histogram counts must be non-negative")
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)

    @property
    def total(self) -> int:
        return int(self.bins.sum())

    def normalized(self) -> np.ndarray:
        if self.total == 0:
            raise EmptyHistogramError("Histogram of band {} ({}) has no counts".format(self.band, self.scope))
        return self.bins / float(self.total)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"intensity": np.arange(256), "count": self.bins})

    def __eq__(self, other):
        if not isinstance(other, Histogram256):
            return NotImplemented
        return np.array_equal(self.bins, other.bins)

    __hash__ = object.__hash__


def build_histogram(band: Band, mask: Optional[EdgeMask] = None, population: str = "edges") -> Histogram256:
    """
    Count intensities of ``band`` over all pixels (no mask) or over the masked population.

    :param band: band to count
    :param mask: optional edge mask of matching dimensions
    :param population: with a mask, "edges" (default) counts edge pixels, "homogeneous" the complement
    :raises DimensionMismatchError: if the mask does not match the band
    """
    if mask is None:
        values = band.pixels.ravel()
        scope = "whole"
    else:
        mask.check_shape(band)
        if population == "edges":
            values = band.pixels[mask.labels]
        elif population == "homogeneous":
            values = band.pixels[mask.homogeneous]
        else:
            raise ValueError('population must be "edges" or "homogeneous", got {!r}'.format(population))
        scope = "{}@{}".format(population, mask.threshold)
    return Histogram256(np.bincount(values, minlength=256), band=band.name, scope=scope)


def histogram_delta(h1: Histogram256, h2: Histogram256) -> float:
    """
    Total-variation distance between the normalised histograms, in [0, 1].

    :raises EmptyHistogramError: if either histogram has no counts
    """
    return float(0.5 * np.abs(h1.normalized() - h2.normalized()).sum())


@dataclass
class HistogramSuite:
    """
    Histograms of a fused image and its MS reference for R, G, B and L, plus the per-band deltas.
    ``threshold`` is None for whole-band histograms. ``deltas[band]`` is None when either histogram is empty;
    ``markers[band]`` then says why.
    """

    fused_label: str
    reference_label: str
    threshold: Optional[float]
    pairs: Dict[str, Tuple[Histogram256, Histogram256]] = field(default_factory=dict)
    deltas: Dict[str, Optional[float]] = field(default_factory=dict)
    markers: Dict[str, Optional[str]] = field(default_factory=dict)

    @property
    def scope(self) -> str:
        return "whole" if self.threshold is None else "edges@{}".format(self.threshold)


def _histogram_suite(fused: MultibandImage, ms: MultibandImage, threshold) -> HistogramSuite:
    if fused.shape != ms.shape:
        raise DimensionMismatchError(
            "Fused image '{}' {} and MS '{}' {} differ in dimensions".format(fused.label, fused.shape, ms.label, ms.shape)
        )
    suite = HistogramSuite(fused_label=fused.label, reference_label=ms.label, threshold=threshold)
    fused_bands = fused.bands(include_l=True)
    ms_bands = ms.bands(include_l=True)
    for name in fused_bands:
        pair = []
        for band in (fused_bands[name], ms_bands[name]):
            mask = None if threshold is None else label_edges(sobel_magnitude(band), threshold)
            pair.append(build_histogram(band, mask))
        suite.pairs[name] = tuple(pair)
        try:
            suite.deltas[name] = histogram_delta(*pair)
            suite.markers[name] = None
        except EmptyHistogramError as e:
            logger.warning("Histogram delta %s/%s (%s): %s", fused.label, name, suite.scope, e)
            suite.deltas[name] = None
            suite.markers[name] = e.marker
    return suite


def edge_histogram_suite(fused: MultibandImage, ms: MultibandImage, threshold=20) -> HistogramSuite:
    """
    Histograms of the edge pixels of ``fused`` and ``ms`` for R, G, B and L, each image using its own Sobel mask
    at ``threshold``, and the histogram delta per band.

    :raises DimensionMismatchError: if the images differ in dimensions
    """
    return _histogram_suite(fused, ms, threshold)


def whole_histogram_suite(fused: MultibandImage, ms: MultibandImage) -> HistogramSuite:
    """
    Histograms of every pixel of ``fused`` and ``ms`` for R, G, B and L, and the histogram delta per band.
    Global brightness shifts show up here even where the edge histograms agree.

    :raises DimensionMismatchError: if the images differ in dimensions
    """
    return _histogram_suite(fused, ms, None)


def write_histogram_csv(hist: Histogram256, path):
    """Write 256 rows of ``intensity,count``."""
    hist.to_frame().to_csv(path, index=False)
