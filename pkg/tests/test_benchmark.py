#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
This test checks the qualitative behaviour of the metrics on the default 600 x 525 synthetic scene: injecting PAN
detail raises the edge contrast while leaving the homogeneous regions alone, a spectral offset in one band lowers the
whole-image SNR and separates the edge histograms of that band only, constant inputs produce markers instead of
crashes, and a full evaluation is fast and reproducible.
"""
import time

from fixtures import *
from fusionqa.cli import main

sys.path.insert(0, os.path.abspath("../"))


def _csa_by_scope(img, threshold=20):
    results = fq.csa_report(img, fq.edge_masks(img, [threshold]))
    return {(r.band, r.scope): r.value for r in results}


def test_hf_injection_improves_edge_contrast_only(default_scene):
    _, pan, ms = default_scene
    hf0 = fq.simulate_fusion(pan, ms, 0.0)
    hf1 = fq.simulate_fusion(pan, ms, 1.0)
    ms_csa = _csa_by_scope(ms)
    hf0_csa = _csa_by_scope(hf0)
    hf1_csa = _csa_by_scope(hf1)
    for band in ("R", "G", "B"):
        edges = (band, "edges@20")
        homogeneous = (band, "homogeneous@20")
        assert hf0_csa[edges] == ms_csa[edges]
        assert hf1_csa[edges] > hf0_csa[edges]
        edge_change = hf1_csa[edges] - hf0_csa[edges]
        assert abs(hf1_csa[homogeneous] - hf0_csa[homogeneous]) < 0.1 * edge_change


def test_spectral_shift_sweep(default_scene):
    _, pan, ms = default_scene
    snr_b = []
    deltas = []
    whole_deltas = []
    for shift in (0, 5, 15, 30):
        fused = fq.simulate_fusion(pan, ms, 0.0, (0, 0, shift))
        snr_b.append({r.band: r for r in fq.snr_whole_report(fused, ms)})
        deltas.append(fq.edge_histogram_suite(fused, ms).deltas)
        whole_deltas.append(fq.whole_histogram_suite(fused, ms).deltas)

    # no shift: the fused image is the MS itself
    assert snr_b[0]["B"].marker == fq.IDENTICAL_IMAGES
    values = [s["B"].value for s in snr_b[1:]]
    assert values[0] > values[1] > values[2]
    # untouched bands stay identical to the MS
    assert all(s["R"].marker == fq.IDENTICAL_IMAGES and s["G"].marker == fq.IDENTICAL_IMAGES for s in snr_b)

    b = [d["B"] for d in deltas]
    assert b[0] == 0.0
    assert b[0] < b[1] < b[2] < b[3]
    assert all(d["R"] == 0.0 and d["G"] == 0.0 for d in deltas)
    assert all(d["R"] == 0.0 and d["G"] == 0.0 for d in whole_deltas)
    assert whole_deltas[0]["B"] == 0.0 and whole_deltas[3]["B"] > 0.0


def test_constant_images_give_markers(small_regions):
    pan = fq.create_band(np.full((40, 40), 100, dtype=np.uint8), name="PAN")
    ms = fq.create_image(array=np.full((8, 8, 3), 100, dtype=np.uint8), label="MS")
    fused = fq.create_image(array=np.full((40, 40, 3), 100, dtype=np.uint8), label="flat")
    report = fq.create_evaluation(pan=pan, ms=ms, fused=[fused], regions=small_regions).analyze()

    assert all(e.marker == fq.NO_EDGES for e in report.entries if e.metric == "csa" and e.scope.startswith("edges@"))
    assert all(e.value == 0.0 for e in report.select(method="flat", metric="csa", scope="whole"))
    assert all(e.marker == fq.CONSTANT_REGION for e in report.select(metric="snr_a"))
    assert all(e.marker == fq.IDENTICAL_IMAGES for e in report.select(metric="snr_b"))
    deltas = report.select(metric="hist_delta")
    assert all(e.marker == fq.EMPTY_HISTOGRAM for e in deltas if e.scope.startswith("edges@"))
    # the whole-band histograms of two equal constant images coincide
    assert [e.value for e in deltas if e.scope == "whole"] == [0.0] * 4
    assert all(e.value == 0.0 for e in report.select(metric="edge_rate"))


def test_black_images_give_markers(small_regions):
    pan = fq.create_band(np.zeros((40, 40), dtype=np.uint8), name="PAN")
    ms = fq.create_image(array=np.zeros((8, 8, 3), dtype=np.uint8), label="MS")
    fused = fq.create_image(array=np.zeros((40, 40, 3), dtype=np.uint8), label="black")
    report = fq.create_evaluation(pan=pan, ms=ms, fused=[fused], regions=small_regions).analyze()
    for metric in ("michelson", "csa"):
        entries = [e for e in report.select(metric=metric) if not e.scope.startswith("edges@")]
        assert entries and all(e.marker is not None for e in entries)


def test_default_scene_evaluation_is_fast():
    pan, ms_native, fused = fq.generate_fixture_set(fq.create_scene_params())
    evaluation = fq.create_evaluation(pan=pan, ms=ms_native, fused=fused)
    start = time.perf_counter()
    report = evaluation.analyze()
    assert time.perf_counter() - start < 5.0
    assert report.methods == ["PAN", "MS", "HF0", "HF0.5", "HF1"]


def test_evaluate_outputs_are_reproducible(tmp_path):
    d = tmp_path / "set"
    assert main(["--quiet", "fixtures", "--out", str(d)]) == 0
    for out in ("run1", "run2"):
        code = main([
            "--quiet", "evaluate", "--pan", str(d / "pan.pgm"), "--ms", str(d / "ms.ppm"),
            "--fused", "HF0={}".format(d / "fused_HF0.ppm"), "--fused", "HF0.5={}".format(d / "fused_HF0.5.ppm"),
            "--fused", "HF1={}".format(d / "fused_HF1.ppm"), "--out", str(tmp_path / out),
        ])
        assert code == 0

    names = sorted(os.listdir(tmp_path / "run1"))
    assert names == sorted(os.listdir(tmp_path / "run2"))
    for name in names:
        if name == "report.json":
            continue
        assert (tmp_path / "run1" / name).read_bytes() == (tmp_path / "run2" / name).read_bytes()

    first = fq.MetricReport.read_json(tmp_path / "run1" / "report.json")
    second = fq.MetricReport.read_json(tmp_path / "run2" / "report.json")
    assert first.entries == second.entries
    assert first.histograms == second.histograms
