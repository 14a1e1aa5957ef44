# -*- coding: utf-8 -*-
"""
Spatial quality metrics: Michelson contrast over homogeneous blocks or the whole image, and Contrast Statistical
Analysis (CSA) over the edge and homogeneous pixel populations produced by the Sobel labelling.

CSA takes I_min = mu - sigma and I_max = mu + sigma in the Michelson formula, which reduces to sigma / mu.
Both metrics lie in [0, 1] for non-negative data; 0 for a constant population.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from fusionqa.edge_map import EdgeMask
from fusionqa.exceptions import (
    DegenerateRegionError,
    DimensionMismatchError,
    EmptyRegionError,
    FusionQAError,
    NO_EDGES,
    NO_HOMOGENEOUS,
)
from fusionqa.raster_core import Band, MultibandImage, RegionSpec, as_band_mapping, pixel_stats, pooled_pixels

__all__ = [
    "ContrastResult",
    "michelson",
    "csa",
    "csa_report",
    "michelson_report",
    "csa_region_report",
    "pan_gap_report",
    "group_regions",
    "edge_scope",
    "homogeneous_scope",
]

logger = logging.getLogger(__name__)


def edge_scope(threshold) -> str:
    return "edges@{}".format(threshold)


def homogeneous_scope(threshold) -> str:
    return "homogeneous@{}".format(threshold)


@dataclass(frozen=True)
class ContrastResult:
    """
    One contrast value. ``value`` is None when the entry carries a ``marker`` instead ("no edges", ...).

    :param metric: "michelson", "csa" or "csa_pan_gap"
    :param band: band name (R, G, B, L or PAN)
    :param scope: "whole", a region group name, "edges@<t>" or "homogeneous@<t>"
    """

    metric: str
    band: str
    scope: str
    value: Optional[float]
    n: int
    threshold: Optional[float] = None
    marker: Optional[str] = None

    @property
    def is_marker(self) -> bool:
        return self.value is None


def michelson(pixels) -> float:
    """
    Michelson contrast (I_max - I_min) / (I_max + I_min) of a pixel collection.

    :raises EmptyRegionError: for an empty collection
    :raises DegenerateRegionError: when I_max + I_min = 0 (all-black region)
    """
    values = np.asarray(pixels.pixels if isinstance(pixels, Band) else pixels, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptyRegionError("Michelson contrast requested over an empty region")
    i_min = float(values.min())
    i_max = float(values.max())
    if i_max + i_min == 0:
        raise DegenerateRegionError("Michelson contrast undefined for an all-black region")
    return (i_max - i_min) / (i_max + i_min)


def csa(pixels) -> float:
    """
    Contrast Statistical Analysis sigma / mu of a pixel collection (population statistics).

    :raises EmptyRegionError: for an empty collection
    :raises DegenerateRegionError: when mu = 0 (all-black population)
    """
    stats = pixel_stats(pixels)
    if stats.mean == 0:
        raise DegenerateRegionError("CSA undefined for an all-black population")
    return stats.std_dev / stats.mean


def _evaluate(metric_name, func, values, band_name, scope, threshold=None) -> ContrastResult:
    try:
        value = func(values)
    except FusionQAError as e:
        logger.warning("%s %s/%s: %s", metric_name, band_name, scope, e)
        return ContrastResult(metric_name, band_name, scope, None, int(np.size(values)), threshold, e.marker)
    return ContrastResult(metric_name, band_name, scope, value, int(np.size(values)), threshold)


def csa_report(
    img: Union[MultibandImage, Band], masks: Mapping[str, Sequence[EdgeMask]]
) -> List[ContrastResult]:
    """
    CSA over the edge and the homogeneous pixels of every band at every threshold.

    :param img: RGB image (or single PAN band)
    :param masks: dict of band name to that band's edge masks, one per threshold (see
                  :func:`~fusionqa.edge_map.edge_masks`)
    :returns: list of :class:`ContrastResult` ordered by band, threshold, then (edges, homogeneous). An empty
              population yields a result marked "no edges" / "no homogeneous pixels" rather than a value.
    :raises DimensionMismatchError: if a mask does not match its band, or a band has no masks
    """
    bands = as_band_mapping(img)
    missing = [name for name in bands if name not in masks]
    if missing:
        raise DimensionMismatchError("No edge masks given for band(s) {}".format(missing))
    thresholds = [m.threshold for m in masks[next(iter(bands))]]
    results = []
    for name, band in bands.items():
        band_masks = list(masks[name])
        if [m.threshold for m in band_masks] != thresholds:
            raise DimensionMismatchError(
                "Band {} masks cover thresholds {}, expected {}".format(
                    name, [m.threshold for m in band_masks], thresholds
                )
            )
        values = band.pixels
        for mask in band_masks:
            mask.check_shape(band)
            t = mask.threshold
            edge_values = values[mask.labels]
            if edge_values.size == 0:
                results.append(ContrastResult("csa", name, edge_scope(t), None, 0, t, NO_EDGES))
            else:
                results.append(_evaluate("csa", csa, edge_values, name, edge_scope(t), t))
            flat_values = values[mask.homogeneous]
            if flat_values.size == 0:
                results.append(ContrastResult("csa", name, homogeneous_scope(t), None, 0, t, NO_HOMOGENEOUS))
            else:
                results.append(_evaluate("csa", csa, flat_values, name, homogeneous_scope(t), t))
    return results


def group_regions(regions: Iterable[RegionSpec]) -> Dict[str, List[RegionSpec]]:
    """
    Group region blocks by their pooling group, in order of first appearance.
    """
    groups: Dict[str, List[RegionSpec]] = {}
    for region in regions:
        groups.setdefault(region.group, []).append(region)
    return groups


def _region_report(metric_name, func, img, regions, include_whole) -> List[ContrastResult]:
    bands = as_band_mapping(img)
    groups = group_regions(regions)
    # bounds are checked up front so a bad region fails the whole report, not one entry
    any_band = next(iter(bands.values()))
    for members in groups.values():
        for region in members:
            region.check_bounds(any_band.width, any_band.height)
    results = []
    for name, band in bands.items():
        if include_whole:
            results.append(_evaluate(metric_name, func, band.pixels, name, "whole"))
        for group, members in groups.items():
            results.append(_evaluate(metric_name, func, pooled_pixels(band, members), name, group))
    return results


def michelson_report(
    img: Union[MultibandImage, Band], regions: Iterable[RegionSpec] = (), include_whole: bool = True
) -> List[ContrastResult]:
    """
    Michelson contrast per band over each region group (blocks of a group pooled into one population) and,
    optionally, over the whole image.

    :param img: RGB image (or single PAN band)
    :param regions: region blocks, e.g. a :class:`~fusionqa.regions.RegionSet`
    :param include_whole: if True, report the whole image first for every band
    :returns: list of :class:`ContrastResult` ordered by band, then whole, then groups
    """
    return _region_report("michelson", michelson, img, regions, include_whole)


def csa_region_report(
    img: Union[MultibandImage, Band], regions: Iterable[RegionSpec] = (), include_whole: bool = True
) -> List[ContrastResult]:
    """
    CSA per band over each region group and, optionally, the whole image. Same layout as :func:`michelson_report`.
    """
    return _region_report("csa", csa, img, regions, include_whole)


def pan_gap_report(fused_results: Sequence[ContrastResult], pan_results: Sequence[ContrastResult]) -> List[ContrastResult]:
    """
    Distance of each fused band's edge-CSA to the PAN edge-CSA at the same threshold,
    |CSA_edges(fused) - CSA_edges(PAN)|. Smaller means the fused image kept more of the PAN's spatial detail.

    :param fused_results: output of :func:`csa_report` for a fused image
    :param pan_results: output of :func:`csa_report` for the PAN band
    :returns: list of :class:`ContrastResult` with metric "csa_pan_gap"; marker entries when either side is a marker
    """
    pan_edges = {r.threshold: r for r in pan_results if r.scope.startswith("edges@")}
    gaps = []
    for result in fused_results:
        if not result.scope.startswith("edges@") or result.threshold not in pan_edges:
            continue
        pan = pan_edges[result.threshold]
        if result.is_marker or pan.is_marker:
            marker = result.marker or "PAN: {}".format(pan.marker)
            gaps.append(ContrastResult("csa_pan_gap", result.band, result.scope, None, result.n, result.threshold, marker))
        else:
            gaps.append(
                ContrastResult(
                    "csa_pan_gap", result.band, result.scope, abs(result.value - pan.value), result.n, result.threshold
                )
            )
    return gaps
