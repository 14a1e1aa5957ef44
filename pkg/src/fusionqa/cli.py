# -*- coding: utf-8 -*-
"""
Command-line interface of *fusionqa*.

``fusionqa evaluate`` runs the full assessment and writes ``report.json``, ``report.csv`` and one SVG chart per metric
family. The single-metric subcommands (``edges``, ``csa``, ``mtf``, ``snr``, ``hist``) print CSV rows to standard
output. ``fixtures`` writes a synthetic PAN / MS / fused set.

Exit codes: 0 success, 2 unreadable image, 3 dimension mismatch, 4 malformed configuration, 64 usage error.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

import pandas as pd

from fusionqa.contrast_metrics import csa_region_report, csa_report, michelson_report
from fusionqa.edge_map import DEFAULT_THRESHOLDS, check_thresholds, edge_masks, threshold_sweep
from fusionqa.evaluation import DEFAULT_HISTOGRAM_THRESHOLD, FusionEvaluation, infer_upsample_factor
from fusionqa.exceptions import ConfigError, DimensionMismatchError, FusionQAError, ImageReadError
from fusionqa.histogram import edge_histogram_suite, whole_histogram_suite, write_histogram_csv
from fusionqa.raster_core import Band, MultibandImage, RegionSpec, upsample_nearest
from fusionqa.raster_io import read_image, write_image
from fusionqa.regions import RegionSet, auto_region_set, load_region_set, read_region_config, write_region_config
from fusionqa.report import CSV_COLUMNS, MetricEntry, format_value, plot_histogram_pair
from fusionqa.snr_metrics import snr_region_report, snr_whole_report
from fusionqa.synth_fusion import create_scene_params, generate_fixture_set

__all__ = ["main", "build_parser", "run_evaluate", "run_single_metric", "run_fixtures"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_READ = 2
EXIT_DIMENSION = 3
EXIT_CONFIG = 4
EXIT_USAGE = 64


class UsageArgumentParser(argparse.ArgumentParser):
    """Argument parser exiting with status 64 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "{}: error: {}\n".format(self.prog, message))


def number(s: str):
    try:
        value = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError("{0} is not a number".format(s))
    return int(value) if value.is_integer() else value


def number_list(s: str) -> List[float]:
    try:
        values = [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("{0} is not a comma separated list of numbers".format(s))
    return [int(v) if v.is_integer() else v for v in values]


def fused_source(s: str):
    if "=" in s:
        label, path = s.split("=", 1)
        if not label:
            raise argparse.ArgumentTypeError("{0} has an empty method label".format(s))
        return label, path
    return os.path.splitext(os.path.basename(s))[0], s


def region_arg(s: str) -> RegionSpec:
    name, _, coords = s.rpartition("=")
    try:
        x0, y0, w, h = [int(v) for v in coords.split(",")]
        return RegionSpec(name or "region", x0, y0, w, h)
    except ValueError:
        raise argparse.ArgumentTypeError("{0} is not of the form [NAME=]x0,y0,w,h".format(s))


def build_parser() -> argparse.ArgumentParser:
    parser = UsageArgumentParser(prog="fusionqa", description="Quality assessment of pan-sharpened (fused) images")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--quiet", help="Less output", action="store_const", dest="log_level", const=logging.WARNING)
    group.add_argument("--verbose", help="More output", action="store_const", dest="log_level", const=logging.DEBUG)
    parser.set_defaults(log_level=logging.INFO)
    parser.add_argument("--bit-depth", help="Declared depth of the input images (8 or 6)", type=int,
                        choices=[8, 6], default=None, dest="bit_depth")

    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("evaluate", help="Full assessment of one or more fused images")
    p.add_argument("--pan", required=True, help="PAN image (P5 or grey PNG)")
    p.add_argument("--ms", required=True, help="MS image (P6 or RGB PNG), native or PAN resolution")
    p.add_argument("--fused", required=True, action="append", type=fused_source, metavar="LABEL=PATH",
                   help="Fused image, repeatable")
    p.add_argument("--config", help="Region configuration JSON")
    p.add_argument("--out", default=".", help="Output directory (default: current directory)")
    p.add_argument("--thresholds", type=number_list, help="Sobel thresholds, e.g. 20,40,60,80,100")
    p.add_argument("--histogram-threshold", type=number, dest="histogram_threshold",
                   help="Threshold of the edge histograms (default 20)")
    p.add_argument("--auto-regions", action="store_true", dest="auto_regions",
                   help="Select the homogeneous regions automatically on the PAN")
    p.add_argument("--histogram-plots", action="store_true", dest="histogram_plots",
                   help="Also write fused vs MS histogram overlays per method and band")
    p.add_argument("--pan-bit-depth", type=int, choices=[8, 6], default=None, dest="pan_bit_depth",
                   help="Declared depth of the PAN only, overriding --bit-depth")
    p.set_defaults(func=run_evaluate)

    p = sub.add_parser("edges", help="Edge rate per band and threshold")
    p.add_argument("image")
    p.add_argument("--thresholds", type=number_list, default=list(DEFAULT_THRESHOLDS))
    p.add_argument("--out", help="Write edge masks as edges_<band>_t<threshold>.pgm into this directory")
    p.set_defaults(func=run_single_metric)

    p = sub.add_parser("csa", help="CSA of edge and homogeneous pixels, whole image and regions")
    p.add_argument("image")
    p.add_argument("--thresholds", type=number_list, default=list(DEFAULT_THRESHOLDS))
    p.add_argument("--config", help="Region configuration JSON")
    p.add_argument("--region", type=region_arg, action="append", metavar="[NAME=]x0,y0,w,h")
    p.set_defaults(func=run_single_metric)

    p = sub.add_parser("mtf", help="Michelson contrast of the whole image and regions")
    p.add_argument("image")
    p.add_argument("--config", help="Region configuration JSON")
    p.add_argument("--region", type=region_arg, action="append", metavar="[NAME=]x0,y0,w,h")
    p.set_defaults(func=run_single_metric)

    p = sub.add_parser("snr", help="Region SNR, or whole-image SNR against a reference")
    p.add_argument("image")
    p.add_argument("reference", nargs="?", help="Reference (MS) image for --whole")
    p.add_argument("--whole", action="store_true", help="Whole-image SNR of image against reference")
    p.add_argument("--config", help="Region configuration JSON")
    p.add_argument("--region", type=region_arg, action="append", metavar="[NAME=]x0,y0,w,h")
    p.set_defaults(func=run_single_metric)

    p = sub.add_parser("hist", help="Edge (or whole-band) histogram difference of a fused image against the MS")
    p.add_argument("fused")
    p.add_argument("ms")
    p.add_argument("--threshold", type=number, default=DEFAULT_HISTOGRAM_THRESHOLD)
    p.add_argument("--whole", action="store_true", help="Compare the histograms of all pixels instead of edge pixels")
    p.add_argument("--out", help="Write histogram CSVs and SVG overlays into this directory")
    p.set_defaults(func=run_single_metric)

    p = sub.add_parser("fixtures", help="Write a synthetic PAN / MS / fused fixture set")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--width", type=int, default=600)
    p.add_argument("--height", type=int, default=525)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, default=2.0, dest="detail_density")
    p.add_argument("--hf-gains", type=number_list, default=[0, 0.5, 1], dest="hf_gains")
    p.add_argument("--shift", type=number_list, default=[0, 0, 0], help="Per-band R,G,B offset of the fused images")
    p.add_argument("--blur-radius", type=int, default=2, dest="blur_radius")
    p.add_argument("--no-thin-lines", action="store_false", dest="thin_lines")
    p.set_defaults(func=run_fixtures)
    return parser


def _print_rows(rows: List[dict], columns: List[str]):
    pd.DataFrame(rows, columns=columns).to_csv(sys.stdout, index=False)


def _entry_rows(entries: List[MetricEntry]) -> List[dict]:
    return [
        {
            "method": e.method,
            "metric": e.metric,
            "band": e.band,
            "scope": e.scope,
            "threshold": "" if e.threshold is None else "{:g}".format(e.threshold),
            "value": format_value(e.value, e.marker),
            "n": e.n,
            "reference": e.reference or "",
        }
        for e in entries
    ]


def _image_label(path) -> str:
    return os.path.splitext(os.path.basename(str(path)))[0]


def _region_list(args, img) -> List[RegionSpec]:
    regions = list(args.region or [])
    if args.config:
        regions += list(load_region_set(read_region_config(args.config), (img.width, img.height)))
    if regions:
        return list(RegionSet(regions))
    return []


def _checked_thresholds(values):
    try:
        return check_thresholds(values)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _on_pan_grid(ms: MultibandImage, target: MultibandImage) -> MultibandImage:
    factor = infer_upsample_factor(target, ms)
    if factor == 1:
        return ms
    return MultibandImage(
        r=upsample_nearest(ms.r, factor), g=upsample_nearest(ms.g, factor), b=upsample_nearest(ms.b, factor),
        label=ms.label,
    )


def run_evaluate(args):
    """
    Run the full assessment for the ``evaluate`` subcommand and write the report files into ``args.out``.

    :returns: :class:`~fusionqa.report.MetricReport`
    """
    pan = read_image(args.pan, bit_depth=args.pan_bit_depth or args.bit_depth)
    if not isinstance(pan, Band):
        raise ImageReadError("PAN {} has three bands. Hint: the PAN must be a single-band image".format(args.pan))
    ms = read_image(args.ms, label="MS", bit_depth=args.bit_depth)
    if not isinstance(ms, MultibandImage):
        raise ImageReadError("MS {} is single-band. Hint: the MS must be an RGB image".format(args.ms))
    fused = []
    for label, path in args.fused:
        img = read_image(path, label=label, bit_depth=args.bit_depth)
        if not isinstance(img, MultibandImage):
            raise ImageReadError("Fused image {} is single-band. Hint: fused images must be RGB".format(path))
        fused.append((label, path, img))

    config = read_region_config(args.config) if args.config else {}
    if not isinstance(config, dict):
        raise ConfigError("Config {} must be a JSON object".format(args.config))
    thresholds = _checked_thresholds(args.thresholds or config.get("thresholds", DEFAULT_THRESHOLDS))
    histogram_threshold = args.histogram_threshold
    if histogram_threshold is None:
        histogram_threshold = config.get("histogram_threshold", DEFAULT_HISTOGRAM_THRESHOLD)
    if args.auto_regions:
        regions = auto_region_set(pan)
    else:
        regions = load_region_set(config, (pan.width, pan.height))

    evaluation = FusionEvaluation(
        pan, ms, regions=regions, thresholds=thresholds, histogram_threshold=histogram_threshold,
        sources={"PAN": args.pan, "MS": args.ms},
    )
    for label, path, img in fused:
        try:
            evaluation.add_fused_image(img, label=label, path=path)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    report = evaluation.analyze()

    os.makedirs(args.out, exist_ok=True)
    if args.auto_regions:
        write_region_config(
            regions, os.path.join(args.out, "regions.json"),
            thresholds=list(thresholds), histogram_threshold=histogram_threshold,
        )
    report.render_charts(args.out)
    if args.histogram_plots:
        for scope, prefix, kind in (("edges", "hist", "edge pixels"), ("whole", "hist_whole", "all pixels")):
            for label in report.histograms:
                for band in report.histograms[label]:
                    plot_histogram_pair(
                        report.get_histogram(label, band, "fused", scope),
                        report.get_histogram(label, band, "reference", scope),
                        os.path.join(args.out, "{}_{}_{}.svg".format(prefix, label, band)),
                        title="{} vs MS, band {}, {}".format(label, band, kind),
                    )
    report.write_csv(os.path.join(args.out, "report.csv"))
    report.write_json(os.path.join(args.out, "report.json"))
    logger.info("Wrote %d entries for %d method(s) to %s", len(report.entries), len(report.methods), args.out)
    return report


def _run_edges(args):
    img = read_image(args.image, bit_depth=args.bit_depth)
    label = _image_label(args.image)
    thresholds = _checked_thresholds(args.thresholds)
    bands = img.bands() if isinstance(img, MultibandImage) else {"PAN": img.renamed("PAN")}
    rows = []
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for name, band in bands.items():
        for entry in threshold_sweep(band, thresholds):
            rows.append({"method": label, "band": name, "threshold": "{:g}".format(entry.threshold),
                         "edge_rate": format_value(entry.rate), "edge_count": entry.mask.edge_count})
            if args.out:
                path = os.path.join(args.out, "edges_{}_t{:g}.pgm".format(name, entry.threshold))
                write_image(path, entry.mask.to_band())
    _print_rows(rows, ["method", "band", "threshold", "edge_rate", "edge_count"])


def _run_csa(args):
    img = read_image(args.image, bit_depth=args.bit_depth)
    label = _image_label(args.image)
    thresholds = _checked_thresholds(args.thresholds)
    results = csa_region_report(img, _region_list(args, img))
    results += csa_report(img, edge_masks(img, thresholds))
    _print_rows(_entry_rows([MetricEntry.from_result(label, r) for r in results]), CSV_COLUMNS)


def _run_mtf(args):
    img = read_image(args.image, bit_depth=args.bit_depth)
    label = _image_label(args.image)
    results = michelson_report(img, _region_list(args, img))
    _print_rows(_entry_rows([MetricEntry.from_result(label, r) for r in results]), CSV_COLUMNS)


def _run_snr(args):
    img = read_image(args.image, bit_depth=args.bit_depth)
    label = _image_label(args.image)
    if args.whole:
        if not args.reference:
            raise ConfigError("snr --whole needs a reference image. Hint: fusionqa snr --whole FUSED MS")
        reference = read_image(args.reference, label=_image_label(args.reference), bit_depth=args.bit_depth)
        if not isinstance(img, MultibandImage) or not isinstance(reference, MultibandImage):
            raise DimensionMismatchError("snr --whole compares two RGB images")
        results = snr_whole_report(img, _on_pan_grid(reference, img))
    else:
        if not isinstance(img, MultibandImage):
            raise DimensionMismatchError("Region SNR is computed on RGB images")
        regions = _region_list(args, img)
        if not regions:
            regions = list(load_region_set(None, (img.width, img.height)))
        results = snr_region_report(img, regions)
    _print_rows(_entry_rows([MetricEntry.from_result(label, r) for r in results]), CSV_COLUMNS)


def _run_hist(args):
    fused = read_image(args.fused, label=_image_label(args.fused), bit_depth=args.bit_depth)
    ms = read_image(args.ms, label="MS", bit_depth=args.bit_depth)
    if not isinstance(fused, MultibandImage) or not isinstance(ms, MultibandImage):
        raise DimensionMismatchError("hist compares two RGB images")
    ms = _on_pan_grid(ms, fused)
    if args.whole:
        suite = whole_histogram_suite(fused, ms)
        prefix = "hist_whole"
    else:
        suite = edge_histogram_suite(fused, ms, _checked_thresholds([args.threshold])[0])
        prefix = "hist"
    rows = []
    for band, (fused_hist, ms_hist) in suite.pairs.items():
        rows.append({"method": fused.label, "band": band, "scope": suite.scope,
                     "hist_delta": format_value(suite.deltas[band], suite.markers[band]),
                     "fused_n": fused_hist.total, "ms_n": ms_hist.total})
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            write_histogram_csv(fused_hist, os.path.join(args.out, "{}_{}_{}.csv".format(prefix, fused.label, band)))
            write_histogram_csv(ms_hist, os.path.join(args.out, "{}_MS_{}.csv".format(prefix, band)))
            plot_histogram_pair(
                fused_hist, ms_hist, os.path.join(args.out, "{}_{}_{}.svg".format(prefix, fused.label, band))
            )
    _print_rows(rows, ["method", "band", "scope", "hist_delta", "fused_n", "ms_n"])


_SINGLE_METRICS = {"edges": _run_edges, "csa": _run_csa, "mtf": _run_mtf, "snr": _run_snr, "hist": _run_hist}


def run_single_metric(args):
    """Print the values of one metric (``args.command``) as CSV rows to standard output."""
    try:
        handler = _SINGLE_METRICS[args.command]
    except KeyError:
        raise ValueError("Unknown metric subcommand '{}'".format(args.command)) from None
    handler(args)


def run_fixtures(args):
    """Write pan.pgm, ms.ppm (native resolution) and fused_<label>.ppm into ``args.out``."""
    try:
        params = create_scene_params(
            width=args.width, height=args.height, seed=args.seed, detail_density=args.detail_density,
            spectral_shift=tuple(args.shift), blur_radius=args.blur_radius, thin_lines=args.thin_lines,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    pan, ms, fused = generate_fixture_set(params, args.hf_gains)
    os.makedirs(args.out, exist_ok=True)
    write_image(os.path.join(args.out, "pan.pgm"), pan)
    write_image(os.path.join(args.out, "ms.ppm"), ms)
    for label, img in fused.items():
        write_image(os.path.join(args.out, "fused_{}.ppm".format(label)), img)
    logger.info("Wrote fixture set to %s", args.out)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("fusionqa").setLevel(args.log_level)
    try:
        args.func(args)
    except ImageReadError as e:
        sys.stderr.write("fusionqa: error: {}\n".format(e))
        return EXIT_READ
    except DimensionMismatchError as e:
        sys.stderr.write("fusionqa: error: {}\n".format(e))
        return EXIT_DIMENSION
    except ConfigError as e:
        sys.stderr.write("fusionqa: error: {}\n".format(e))
        return EXIT_CONFIG
    except (FusionQAError, OSError) as e:
        sys.stderr.write("fusionqa: error: {}\n".format(e))
        return EXIT_FAILURE
    return EXIT_OK
