# -*- coding: utf-8 -*-
"""
Spectral quality metrics based on the signal-to-noise ratio, in two variants:

* region SNR (``region_a``): mu / sigma of a homogeneous block, the reciprocal of CSA;
* whole-image SNR (``whole_b``): sqrt(sum F^2 / sum (F - M)^2) of a fused band F against the upsampled MS band M,
  treating the change introduced by fusion as noise. Larger is better; identical images are the ideal limit and are
  reported as such rather than as a number.

All sums are accumulated in float64.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from fusionqa.contrast_metrics import group_regions
from fusionqa.exceptions import (
    DimensionMismatchError,
    FusionQAError,
    IdenticalImagesError,
    ZeroDeviationError,
)
from fusionqa.raster_core import Band, MultibandImage, RegionSpec, as_band_mapping, pixel_stats, pooled_pixels

__all__ = ["SnrResult", "snr_region", "snr_whole", "snr_region_report", "snr_whole_report"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SnrResult:
    """
    One SNR value. ``value`` is None when the entry carries a ``marker`` instead.

    :param variant: "region_a" or "whole_b"
    :param scope: region group name, or "whole"
    :param reference: label of the reference (MS) image for ``whole_b``
    """

    variant: str
    band: str
    scope: str
    value: Optional[float]
    n: int
    reference: Optional[str] = None
    marker: Optional[str] = None

    def __post_init__(self):
        if self.variant == "whole_b" and not self.reference:
            raise ValueError("whole_b SNR results must name their reference image")

    @property
    def is_marker(self) -> bool:
        return self.value is None


def snr_region(pixels) -> float:
    """
    Region SNR mu / sigma.

    :raises ZeroDeviationError: for a constant region (sigma = 0)
    """
    stats = pixel_stats(pixels)
    if stats.std_dev == 0:
        raise ZeroDeviationError("SNR undefined (constant region)")
    return stats.mean / stats.std_dev


def _band_array(band) -> np.ndarray:
    return np.asarray(band.pixels if isinstance(band, Band) else band, dtype=np.float64)


def snr_whole(fused, reference) -> float:
    """
    Whole-image SNR of a fused band against its reference band.

    :param fused: fused band F
    :param reference: reference band M (MS, already upsampled)
    :raises DimensionMismatchError: if the bands differ in dimensions
    :raises IdenticalImagesError: if F equals M everywhere (zero denominator)
    """
    f = _band_array(fused)
    m = _band_array(reference)
    if f.shape != m.shape:
        raise DimensionMismatchError(
            "Fused band shape {} does not match reference shape {}".format(f.shape, m.shape)
        )
    noise = np.sum((f - m) ** 2, dtype=np.float64)
    if noise == 0:
        raise IdenticalImagesError("Fused band is identical to the reference band")
    return float(np.sqrt(np.sum(f**2, dtype=np.float64) / noise))


def snr_region_report(img: MultibandImage, regions: Iterable[RegionSpec]) -> List[SnrResult]:
    """
    Region SNR per band and region group (blocks of a group pooled).

    :returns: list of :class:`SnrResult` ordered by band then group; constant regions carry the marker
              "undefined (constant region)"
    """
    bands = as_band_mapping(img)
    groups = group_regions(regions)
    results = []
    for name, band in bands.items():
        for group, members in groups.items():
            values = pooled_pixels(band, members)
            try:
                results.append(SnrResult("region_a", name, group, snr_region(values), int(values.size)))
            except FusionQAError as e:
                logger.warning("SNR_a %s/%s: %s", name, group, e)
                results.append(SnrResult("region_a", name, group, None, int(values.size), marker=e.marker))
    return results


def snr_whole_report(fused: MultibandImage, ms: MultibandImage) -> List[SnrResult]:
    """
    Whole-image SNR of each band of ``fused`` against the same band of ``ms``, in R, G, B order.

    :raises DimensionMismatchError: if the images differ in dimensions
    """
    if fused.shape != ms.shape:
        raise DimensionMismatchError(
            "Fused image '{}' is {}x{} but MS '{}' is {}x{}. Hint: upsample the MS first".format(
                fused.label, fused.width, fused.height, ms.label, ms.width, ms.height
            )
        )
    results = []
    reference_bands = ms.bands()
    for name, band in fused.bands().items():
        n = band.width * band.height
        try:
            value = snr_whole(band, reference_bands[name])
        except IdenticalImagesError as e:
            logger.info("SNR_b %s/%s: %s", fused.label, name, e)
            results.append(SnrResult("whole_b", name, "whole", None, n, reference=ms.label, marker=e.marker))
            continue
        results.append(SnrResult("whole_b", name, "whole", value, n, reference=ms.label))
    return results
