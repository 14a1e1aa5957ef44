# -*- coding: utf-8 -*-
"""
This module contains :class:`MetricReport`, the container of every value computed by an evaluation run, and its
outputs: CSV table, JSON document, labelled ``xarray`` grids and SVG charts.

Each entry is keyed by (method, metric, band, scope). An entry holds either a value or a marker string explaining why
no value exists ("no edges", "identical images", ...). CSV values carry 6 significant digits, JSON keeps full
precision.
"""
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import matplotlib
import numpy as np
import pandas as pd
import xarray as xr
from matplotlib.figure import Figure

from fusionqa.histogram import Histogram256

__all__ = [
    "CSV_COLUMNS",
    "CHART_FAMILIES",
    "MetricEntry",
    "MetricReport",
    "format_value",
    "plot_histogram_pair",
]

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["method", "metric", "band", "scope", "threshold", "value", "n", "reference"]
BAND_ORDER = ["R", "G", "B", "L", "PAN"]
# metrics where a smaller value is better
ASCENDING_METRICS = ("csa_pan_gap", "hist_delta")

# fixed hash salt and no date so repeated runs give identical SVG bytes
_SVG_RC = {"svg.hashsalt": "fusionqa", "svg.fonttype": "path"}


def _is_region_scope(scope: str) -> bool:
    return not scope.startswith(("edges@", "homogeneous@"))


# family name -> (metric, scope filter, chart title)
CHART_FAMILIES = {
    "michelson": ("michelson", _is_region_scope, "Michelson contrast"),
    "csa_whole": ("csa", _is_region_scope, "CSA, whole image and regions"),
    "csa_edges": ("csa", lambda s: s.startswith("edges@"), "CSA of edge pixels per threshold"),
    "edge_rate": ("edge_rate", lambda s: True, "Edge rate per threshold"),
    "snr_a": ("snr_a", lambda s: True, "Region SNR"),
    "snr_b": ("snr_b", lambda s: True, "Whole-image SNR against MS"),
    "hist_delta": ("hist_delta", lambda s: True, "Histogram difference against MS, edges and whole band"),
}


def format_value(value: Optional[float], marker: Optional[str] = None) -> str:
    """CSV rendering of a value: 6 significant digits, or ``NaN (<marker>)`` for a marker entry."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "NaN ({})".format(marker or "missing")
    return "{:.6g}".format(value)


def _format_threshold(threshold) -> str:
    return "" if threshold is None else "{:g}".format(threshold)


@dataclass(frozen=True)
class MetricEntry:
    """One report cell. ``value`` is None exactly when ``marker`` is set."""

    method: str
    metric: str
    band: str
    scope: str
    value: Optional[float]
    n: int
    threshold: Optional[float] = None
    reference: Optional[str] = None
    marker: Optional[str] = None

    def __post_init__(self):
        if (self.value is None) == (self.marker is None):
            raise ValueError(
                "Entry {}/{}/{}/{} needs exactly one of value or marker".format(
                    self.method, self.metric, self.band, self.scope
                )
            )

    @property
    def key(self):
        return self.method, self.metric, self.band, self.scope

    @classmethod
    def from_result(cls, method: str, result) -> "MetricEntry":
        """
        Build an entry from a :class:`~fusionqa.contrast_metrics.ContrastResult` or
        :class:`~fusionqa.snr_metrics.SnrResult`.
        """
        if hasattr(result, "variant"):
            metric = "snr_a" if result.variant == "region_a" else "snr_b"
            threshold = None
            reference = result.reference
        else:
            metric = result.metric
            threshold = result.threshold
            reference = None
        return cls(method, metric, result.band, result.scope, result.value, result.n, threshold, reference, result.marker)


@dataclass
class MetricReport:
    """
    Results of one evaluation run.

    :param version: fusionqa version that produced the report
    :param manifest: one dict per input image (role, label, path, width, height)
    :param regions: region blocks used, as dicts
    :param thresholds: Sobel thresholds used
    :param histogram_threshold: threshold of the edge histograms
    :param entries: list of :class:`MetricEntry`
    :param histograms: edge histograms, method -> band -> {"fused": counts, "reference": counts}
    :param whole_histograms: whole-band histograms, same layout as ``histograms``
    :param notes: free-text notes (skipped charts, ...)
    :param timestamp: ISO 8601 creation time
    """

    version: str
    manifest: List[dict] = field(default_factory=list)
    regions: List[dict] = field(default_factory=list)
    thresholds: List[float] = field(default_factory=list)
    histogram_threshold: Optional[float] = None
    entries: List[MetricEntry] = field(default_factory=list)
    histograms: Dict[str, Dict[str, Dict[str, List[int]]]] = field(default_factory=dict)
    whole_histograms: Dict[str, Dict[str, Dict[str, List[int]]]] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    timestamp: Optional[str] = None

    @property
    def methods(self) -> List[str]:
        """Method labels in entry order."""
        return list(dict.fromkeys(e.method for e in self.entries))

    def select(self, **kwargs) -> List[MetricEntry]:
        """
        Filter entries by any of ``method``, ``metric``, ``band``, ``scope`` (exact match).
        """
        return [e for e in self.entries if all(getattr(e, k) == v for k, v in kwargs.items())]

    def get_entry(self, method, metric, band, scope) -> MetricEntry:
        for e in self.entries:
            if e.key == (method, metric, band, scope):
                return e
        raise KeyError((method, metric, band, scope))

    def to_frame(self) -> pd.DataFrame:
        """All entries as a DataFrame (CSV columns plus ``marker``), numeric values at full precision."""
        rows = [asdict(e) for e in self.entries]
        return pd.DataFrame(rows, columns=CSV_COLUMNS + ["marker"])

    def write_csv(self, path):
        """
        Write ``report.csv``: one row per entry, values at 6 significant digits, markers as ``NaN (<marker>)``.
        """
        frame = self.to_frame()
        frame["threshold"] = [_format_threshold(e.threshold) for e in self.entries]
        frame["value"] = [format_value(e.value, e.marker) for e in self.entries]
        frame["reference"] = [e.reference or "" for e in self.entries]
        frame[CSV_COLUMNS].to_csv(path, index=False)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "timestamp": self.timestamp,
            "manifest": self.manifest,
            "regions": self.regions,
            "thresholds": list(self.thresholds),
            "histogram_threshold": self.histogram_threshold,
            "entries": [asdict(e) for e in self.entries],
            "histograms": self.histograms,
            "whole_histograms": self.whole_histograms,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "MetricReport":
        return cls(
            version=data["version"],
            manifest=data.get("manifest", []),
            regions=data.get("regions", []),
            thresholds=data.get("thresholds", []),
            histogram_threshold=data.get("histogram_threshold", None),
            entries=[MetricEntry(**e) for e in data.get("entries", [])],
            histograms=data.get("histograms", {}),
            whole_histograms=data.get("whole_histograms", {}),
            notes=data.get("notes", []),
            timestamp=data.get("timestamp", None),
        )

    @classmethod
    def from_json(cls, text: str) -> "MetricReport":
        return cls.from_dict(json.loads(text))

    def write_json(self, path):
        with open(path, "w") as f:
            f.write(self.to_json())

    @classmethod
    def read_json(cls, path) -> "MetricReport":
        with open(path, "r") as f:
            return cls.from_json(f.read())

    def get_histogram(self, method: str, band: str, which: str = "fused", scope: str = "edges") -> Histogram256:
        """
        Rebuild a stored histogram. ``which`` is "fused" or "reference", ``scope`` is "edges" or "whole".
        """
        if scope == "edges":
            counts = self.histograms[method][band][which]
            return Histogram256(np.asarray(counts), band=band, scope="edges@{}".format(self.histogram_threshold))
        if scope == "whole":
            return Histogram256(np.asarray(self.whole_histograms[method][band][which]), band=band, scope="whole")
        raise ValueError('scope must be "edges" or "whole", got {!r}'.format(scope))

    def get_results(self, **kwargs) -> xr.DataArray:
        """
        Return the values of one metric as a labelled grid.

        :keyword:

        * metric (`str`): metric name, e.g. "csa", "snr_b". Required.
        * method (`str` or `list`): restrict to these method labels
        * scope (`str` or `list`): restrict to these scopes

        :returns: ``xarray.DataArray`` with dims ("Method", "Band", "Scope"); cells with a marker or no entry are NaN
        """
        metric = kwargs.get("metric", None)
        if metric is None:
            raise ValueError("Missing keyword argument metric=")
        entries = self.select(metric=metric)
        if not entries:
            raise ValueError("No entries for metric '{}'. Hint: available metrics are {}".format(
                metric, sorted({e.metric for e in self.entries})
            ))
        methods = list(dict.fromkeys(e.method for e in entries))
        bands = sorted({e.band for e in entries}, key=lambda b: BAND_ORDER.index(b) if b in BAND_ORDER else 99)
        scopes = list(dict.fromkeys(e.scope for e in entries))
        grid = np.full((len(methods), len(bands), len(scopes)), np.nan)
        for e in entries:
            if e.value is not None:
                grid[methods.index(e.method), bands.index(e.band), scopes.index(e.scope)] = e.value
        da = xr.DataArray(
            data=grid,
            dims=("Method", "Band", "Scope"),
            coords={"Method": methods, "Band": bands, "Scope": scopes},
            name=metric,
        )
        for key, dim in (("method", "Method"), ("scope", "Scope")):
            selection = kwargs.get(key, None)
            if selection is not None:
                if isinstance(selection, str):
                    selection = [selection]
                da = da.sel({dim: selection})
        return da

    def rank_methods(self, metric: str, scope: str, bands: Optional[Sequence[str]] = None) -> List[tuple]:
        """
        Rank methods by the mean of their finite values for ``metric`` at ``scope`` over ``bands`` (all bands by
        default). Larger is better except for "csa_pan_gap" and "hist_delta".

        :returns: list of (method, score), best first. Methods with no finite value are left out.
        """
        scores = {}
        for method in self.methods:
            values = [
                e.value
                for e in self.select(method=method, metric=metric, scope=scope)
                if e.value is not None and (bands is None or e.band in bands)
            ]
            if values:
                scores[method] = float(np.mean(values))
        descending = metric not in ASCENDING_METRICS
        return sorted(scores.items(), key=lambda item: -item[1] if descending else item[1])

    def render_charts(self, out_dir) -> List[str]:
        """
        Write one grouped bar chart per metric family (``<family>.svg``) into ``out_dir``: one panel per band,
        x = method, one bar series per scope (threshold or region). Families with no values are skipped and noted.

        :returns: list of written file paths
        """
        paths = []
        for family, (metric, keep_scope, title) in CHART_FAMILIES.items():
            entries = [e for e in self.select(metric=metric) if keep_scope(e.scope)]
            if not any(e.value is not None for e in entries):
                note = "chart {} skipped: no values".format(family)
                logger.info(note)
                if note not in self.notes:
                    self.notes.append(note)
                continue
            path = os.path.join(str(out_dir), "{}.svg".format(family))
            _bar_chart(entries, title, path)
            paths.append(path)
        return paths


def _bar_chart(entries: List[MetricEntry], title: str, path):
    methods = list(dict.fromkeys(e.method for e in entries))
    scopes = list(dict.fromkeys(e.scope for e in entries))
    bands = [b for b in BAND_ORDER if any(e.band == b for e in entries)]
    values = {(e.method, e.band, e.scope): e.value for e in entries}

    fig = Figure(figsize=(3.2 * len(bands) + 1, 3.6))
    axes = fig.subplots(1, len(bands), squeeze=False)[0]
    x = np.arange(len(methods))
    width = 0.8 / len(scopes)
    for ax, band in zip(axes, bands):
        for k, scope in enumerate(scopes):
            heights = [values.get((m, band, scope)) for m in methods]
            heights = [np.nan if h is None else h for h in heights]
            ax.bar(x - 0.4 + width * (k + 0.5), heights, width, label=scope)
        ax.set_xticks(x)
        ax.set_xticklabels(methods, rotation=45, ha="right", fontsize=8)
        ax.set_title(band)
    axes[0].legend(fontsize=7)
    fig.suptitle(title)
    fig.tight_layout()
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.debug("Wrote chart %s", path)


def plot_histogram_pair(fused: Histogram256, reference: Histogram256, path, title: Optional[str] = None):
    """
    Overlay the normalised histograms of a fused band and its MS reference in one SVG.
    """
    fig = Figure(figsize=(6, 3.6))
    ax = fig.subplots()
    intensity = np.arange(256)
    for hist, label in ((fused, "fused"), (reference, "MS")):
        counts = hist.bins / hist.total if hist.total else hist.bins.astype(np.float64)
        ax.step(intensity, counts, where="mid", label=label)
    ax.set_xlim(0, 255)
    ax.set_xlabel("Intensity")
    ax.set_ylabel("Fraction of pixels")
    ax.set_title(title or "Band {} ({})".format(fused.band, fused.scope))
    ax.legend()
    fig.tight_layout()
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
