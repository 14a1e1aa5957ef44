# -*- coding: utf-8 -*-
"""
This module contains :class:`FusionEvaluation`, which takes a PAN band, an MS image and any number of fused images and
runs the full quality assessment:

* spatial metrics (Michelson contrast, CSA over regions, edges and homogeneous pixels, edge rate) for PAN, MS and
  every fused image;
* spectral metrics (region SNR for MS and fused images, whole-image SNR and edge histogram difference of every fused
  image against the MS);
* the distance of every fused image's edge CSA to the PAN edge CSA.

The MS is upsampled to the PAN grid by nearest neighbour; the PAN / MS size ratio must be an exact integer.
Fused images are evaluated concurrently, results are collected in the order they were added.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple, Union

from fusionqa.contrast_metrics import csa_region_report, csa_report, michelson_report, pan_gap_report
from fusionqa.edge_map import DEFAULT_THRESHOLDS, check_thresholds, edge_masks, edge_rate
from fusionqa.exceptions import ConfigError, DimensionMismatchError
from fusionqa.histogram import edge_histogram_suite, whole_histogram_suite
from fusionqa.raster_core import Band, MultibandImage, upsample_nearest
from fusionqa.regions import RegionSet, load_region_set
from fusionqa.report import MetricEntry, MetricReport
from fusionqa.snr_metrics import snr_region_report, snr_whole_report

__all__ = [
    "FusionEvaluation",
    "create_evaluation",
    "DEFAULT_HISTOGRAM_THRESHOLD",
    "infer_upsample_factor",
    "worker_count",
]

logger = logging.getLogger(__name__)

DEFAULT_HISTOGRAM_THRESHOLD = 20
THREADS_ENV = "FUSIONQA_THREADS"


def create_evaluation(**kwargs) -> "FusionEvaluation":
    """
    User interface function to create a :class:`FusionEvaluation`.

    :keyword:

    * pan (:class:`~fusionqa.raster_core.Band`): PAN band. Required.
    * ms (:class:`~fusionqa.raster_core.MultibandImage`): MS image, at native or PAN resolution. Required.
    * fused (`dict` or `list`): fused images, either label -> image or a list of labelled images
    * regions (:class:`~fusionqa.regions.RegionSet`): evaluation regions. Default b1/b2/b3 set.
    * thresholds (`list`): Sobel thresholds. Default [20, 40, 60, 80, 100]
    * histogram_threshold (`int`): threshold of the edge histograms. Default 20
    * max_workers (`int`): worker cap. Default from the ``FUSIONQA_THREADS`` environment variable

    :returns: :class:`FusionEvaluation`
    """
    pan = kwargs.get("pan", None)
    ms = kwargs.get("ms", None)
    if pan is None or ms is None:
        raise ValueError("Missing keyword arguments pan= and/or ms=")
    fused = kwargs.pop("fused", None)
    evaluation = FusionEvaluation(**kwargs)
    if isinstance(fused, dict):
        for label, image in fused.items():
            evaluation.add_fused_image(image, label=label)
    elif fused is not None:
        for image in fused:
            evaluation.add_fused_image(image)
    return evaluation


def infer_upsample_factor(pan: Band, ms: MultibandImage) -> int:
    """
    Integer ratio between PAN and MS dimensions.

    :raises DimensionMismatchError: if the ratio is not an exact integer or differs between width and height
    """
    if pan.width % ms.width or pan.height % ms.height or pan.width // ms.width != pan.height // ms.height:
        raise DimensionMismatchError(
            "PAN {}x{} is not an integer multiple of MS {}x{}. Hint: the MS must be co-registered at an integer "
            "resolution ratio".format(pan.width, pan.height, ms.width, ms.height)
        )
    return pan.width // ms.width


def worker_count(max_workers: Optional[int] = None) -> int:
    """
    Number of worker threads: ``max_workers`` if given, else ``FUSIONQA_THREADS``, else the CPU count (minimum 1).
    """
    if max_workers is None:
        raw = os.environ.get(THREADS_ENV, None)
        if raw is None or raw.strip() == "":
            return max(1, os.cpu_count() or 1)
        try:
            max_workers = int(raw)
        except ValueError:
            raise ConfigError("{} must be a positive integer, got {!r}".format(THREADS_ENV, raw)) from None
    if max_workers < 1:
        raise ConfigError("Worker count must be >= 1, got {}".format(max_workers))
    return max_workers


class FusionEvaluation:
    """
    Main class to evaluate fused images against their PAN and MS sources. Fused images are added with
    :func:`add_fused_image`, :func:`analyze` computes every metric and :func:`get_results` returns the
    :class:`~fusionqa.report.MetricReport` (or one metric as a labelled grid).
    """

    def __init__(
        self,
        pan: Band,
        ms: MultibandImage,
        regions: Optional[RegionSet] = None,
        thresholds: Sequence = DEFAULT_THRESHOLDS,
        histogram_threshold=DEFAULT_HISTOGRAM_THRESHOLD,
        max_workers: Optional[int] = None,
        sources: Optional[Dict[str, str]] = None,
    ):
        """
        :param pan: PAN band
        :param ms: MS image at native resolution or already on the PAN grid
        :param regions: evaluation regions, validated against the PAN dimensions. Default b1/b2/b3 set.
        :param thresholds: strictly increasing Sobel thresholds
        :param histogram_threshold: threshold of the edge histograms
        :param max_workers: worker cap for concurrent evaluation of fused images
        :param sources: optional label -> file path mapping recorded in the report manifest
        """
        if not isinstance(pan, Band):
            raise TypeError("pan must be a Band, got {}".format(type(pan).__name__))
        if not isinstance(ms, MultibandImage):
            raise TypeError("ms must be a MultibandImage, got {}".format(type(ms).__name__))
        self.pan = pan if pan.name == "PAN" else pan.renamed("PAN")
        self.ms_native = ms
        self.factor = infer_upsample_factor(pan, ms)
        if self.factor == 1:
            self.ms = ms
        else:
            self.ms = MultibandImage(
                r=upsample_nearest(ms.r, self.factor),
                g=upsample_nearest(ms.g, self.factor),
                b=upsample_nearest(ms.b, self.factor),
                label=ms.label,
            )
        try:
            self.thresholds = check_thresholds(thresholds)
            check_thresholds([histogram_threshold])
        except ValueError as e:
            raise ConfigError(str(e)) from e
        self.histogram_threshold = histogram_threshold
        if regions is None:
            regions = load_region_set(None, (pan.width, pan.height))
        else:
            regions.check_bounds(pan.width, pan.height)
        self.regions = regions
        self.max_workers = worker_count(max_workers)
        self.sources = dict(sources or {})
        self.fused: Dict[str, MultibandImage] = {}
        self.report: Optional[MetricReport] = None

    def add_fused_image(self, image: MultibandImage, label: Optional[str] = None, path: Optional[str] = None):
        """
        Add a fused image to evaluate.

        :param image: fused image on the PAN grid
        :param label: method label. Defaults to ``image.label``
        :param path: source file recorded in the manifest
        :raises DimensionMismatchError: if the image is not on the PAN grid
        :raises ValueError: if the label is already taken
        """
        label = label or image.label
        if label in self.fused or label in ("PAN", self.ms.label):
            raise ValueError("Method label '{}' is already used. Hint: labels must be unique".format(label))
        if image.shape != self.pan.shape:
            raise DimensionMismatchError(
                "Fused image '{}' is {}x{} but PAN is {}x{}".format(
                    label, image.width, image.height, self.pan.width, self.pan.height
                )
            )
        self.fused[label] = image if image.label == label else image.relabel(label)
        if path is not None:
            self.sources[label] = path
        self.report = None

    def _spatial_entries(self, label: str, img: Union[Band, MultibandImage]) -> Tuple[List[MetricEntry], list]:
        results = michelson_report(img, self.regions)
        results += csa_region_report(img, self.regions)
        masks = edge_masks(img, self.thresholds)
        edge_csa = csa_report(img, masks)
        results += edge_csa
        entries = [MetricEntry.from_result(label, r) for r in results]
        for band_name, band_masks in masks.items():
            for mask in band_masks:
                entries.append(
                    MetricEntry(
                        label, "edge_rate", band_name, "edges@{}".format(mask.threshold), edge_rate(mask),
                        mask.labels.size, threshold=mask.threshold,
                    )
                )
        return entries, edge_csa

    def _evaluate_fused(self, label: str, img: MultibandImage, pan_csa) -> Tuple[List[MetricEntry], dict]:
        entries, edge_csa = self._spatial_entries(label, img)
        entries += [MetricEntry.from_result(label, r) for r in snr_region_report(img, self.regions)]
        entries += [MetricEntry.from_result(label, r) for r in snr_whole_report(img, self.ms)]
        entries += [MetricEntry.from_result(label, r) for r in pan_gap_report(edge_csa, pan_csa)]

        histograms = {}
        for suite in (
            edge_histogram_suite(img, self.ms, self.histogram_threshold),
            whole_histogram_suite(img, self.ms),
        ):
            stored = histograms.setdefault("edges" if suite.threshold is not None else "whole", {})
            for band_name, (fused_hist, ms_hist) in suite.pairs.items():
                entries.append(
                    MetricEntry(
                        label, "hist_delta", band_name, suite.scope, suite.deltas[band_name], fused_hist.total,
                        threshold=suite.threshold, reference=self.ms.label, marker=suite.markers[band_name],
                    )
                )
                stored[band_name] = {"fused": fused_hist.bins.tolist(), "reference": ms_hist.bins.tolist()}
        logger.info("Analysis: %s completed", label)
        return entries, histograms

    def _manifest(self) -> List[dict]:
        manifest = [
            {"role": "pan", "label": "PAN", "path": self.sources.get("PAN"), "width": self.pan.width,
             "height": self.pan.height},
            {"role": "ms", "label": self.ms.label, "path": self.sources.get(self.ms.label),
             "width": self.ms_native.width, "height": self.ms_native.height, "upsample_factor": self.factor},
        ]
        for label, img in self.fused.items():
            manifest.append(
                {"role": "fused", "label": label, "path": self.sources.get(label), "width": img.width,
                 "height": img.height}
            )
        return manifest

    def analyze(self) -> MetricReport:
        """
        Compute every metric for PAN, MS and all fused images.

        :returns: :class:`~fusionqa.report.MetricReport`
        :raises Exception: if no fused image was added
        """
        if not self.fused:
            raise Exception("No fused images were added. Hint: use add_fused_image()")
        from fusionqa import __version__

        pan_entries, pan_csa = self._spatial_entries("PAN", self.pan)
        logger.info("Analysis: PAN completed")
        ms_entries, _ = self._spatial_entries(self.ms.label, self.ms)
        ms_entries += [MetricEntry.from_result(self.ms.label, r) for r in snr_region_report(self.ms, self.regions)]
        logger.info("Analysis: %s completed", self.ms.label)

        workers = min(self.max_workers, len(self.fused))
        logger.debug("Evaluating %d fused image(s) on %d worker(s)", len(self.fused), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map keeps submission order, so the report does not depend on completion order
            outcomes = list(pool.map(lambda item: self._evaluate_fused(item[0], item[1], pan_csa), self.fused.items()))

        report = MetricReport(
            version=__version__,
            manifest=self._manifest(),
            regions=[r.to_dict() for r in self.regions],
            thresholds=list(self.thresholds),
            histogram_threshold=self.histogram_threshold,
            entries=pan_entries + ms_entries,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        for label, (entries, histograms) in zip(self.fused, outcomes):
            report.entries.extend(entries)
            report.histograms[label] = histograms["edges"]
            report.whole_histograms[label] = histograms["whole"]
        self.report = report
        return report

    def get_results(self, **kwargs):
        """
        Return the results of the last :func:`analyze` call (analysing first if needed).

        :keyword:

        * metric (`str`): if given, return this metric as an ``xarray.DataArray`` (see
          :func:`~fusionqa.report.MetricReport.get_results`); other keywords are passed on
        :returns: :class:`~fusionqa.report.MetricReport`, or ``xarray.DataArray`` when ``metric`` is given
        """
        if self.report is None:
            self.analyze()
        if kwargs.get("metric", None) is None:
            return self.report
        return self.report.get_results(**kwargs)
