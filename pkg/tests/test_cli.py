from fixtures import *
import io
import pandas as pd
import png

from fusionqa.cli import main

sys.path.insert(0, os.path.abspath("../"))


def _evaluate_args(d, *extra):
    return [
        "evaluate", "--pan", str(d / "pan.pgm"), "--ms", str(d / "ms.ppm"),
        "--fused", "HF0={}".format(d / "fused_HF0.ppm"), "--fused", "HF1={}".format(d / "fused_HF1.ppm"),
        "--out", str(d / "out"),
    ] + list(extra)


def _stdout_frame(capsys):
    return pd.read_csv(io.StringIO(capsys.readouterr().out), dtype=str, keep_default_na=False)


def test_evaluate_writes_report(fixture_dir):
    code = main(_evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"), "--histogram-plots"))
    assert code == 0
    out = fixture_dir / "out"
    report = fq.MetricReport.read_json(out / "report.json")
    assert report.methods == ["PAN", "MS", "HF0", "HF1"]
    assert report.manifest[0]["path"] == str(fixture_dir / "pan.pgm")
    frame = pd.read_csv(out / "report.csv", dtype=str, keep_default_na=False)
    assert len(frame) == len(report.entries)
    for family in fq.CHART_FAMILIES:
        assert (out / "{}.svg".format(family)).exists()
    assert (out / "hist_HF1_L.svg").exists()


def test_evaluate_thresholds_option(fixture_dir):
    code = main(_evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"), "--thresholds", "30,90"))
    assert code == 0
    report = fq.MetricReport.read_json(fixture_dir / "out" / "report.json")
    assert report.thresholds == [30, 90]
    assert {e.scope for e in report.select(metric="edge_rate")} == {"edges@30", "edges@90"}


def test_evaluate_exit_codes(fixture_dir):
    # default regions do not fit a 40 x 40 image
    assert main(_evaluate_args(fixture_dir)) == 4

    (fixture_dir / "bad.json").write_text("{not json")
    assert main(_evaluate_args(fixture_dir, "--config", str(fixture_dir / "bad.json"))) == 4

    args = _evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"))
    args[2] = str(fixture_dir / "missing.pgm")
    assert main(args) == 2

    fq.write_image(fixture_dir / "odd.ppm", fq.create_image(array=np.zeros((7, 7, 3), dtype=np.uint8)))
    args = _evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"))
    args[4] = str(fixture_dir / "odd.ppm")
    assert main(args) == 3

    args = _evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"), "--thresholds", "40,20")
    assert main(args) == 4

    args = _evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"))
    args[8] = "HF0={}".format(fixture_dir / "fused_HF1.ppm")
    assert main(args) == 4


def test_evaluate_rejects_mistyped_thresholds(fixture_dir):
    for extra in ({"thresholds": "20,40"}, {"thresholds": 20}, {"histogram_threshold": "20"}):
        config = dict(small_region_config, **extra)
        with open(fixture_dir / "typed.json", "w") as f:
            json.dump(config, f)
        assert main(_evaluate_args(fixture_dir, "--config", str(fixture_dir / "typed.json"))) == 4


def test_usage_errors_exit_64(fixture_dir):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 64
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 64
    with pytest.raises(SystemExit) as e:
        main(["evaluate", "--pan", str(fixture_dir / "pan.pgm")])
    assert e.value.code == 64


def test_edges_on_constant_image(tmp_path, flat_band, capsys):
    fq.write_image(tmp_path / "flat.pgm", flat_band)
    assert main(["--quiet", "edges", str(tmp_path / "flat.pgm"), "--thresholds", "20,40", "--out",
                 str(tmp_path / "masks")]) == 0
    frame = _stdout_frame(capsys)
    assert list(frame["edge_rate"]) == ["0", "0"]
    assert list(frame["band"]) == ["PAN", "PAN"]
    mask = fq.read_image(tmp_path / "masks" / "edges_PAN_t20.pgm")
    assert not mask.pixels.any()


def test_edges_on_step_image(tmp_path, step_image, capsys):
    fq.write_image(tmp_path / "step.ppm", step_image)
    assert main(["--quiet", "edges", str(tmp_path / "step.ppm"), "--thresholds", "20"]) == 0
    frame = _stdout_frame(capsys)
    assert list(frame["band"]) == ["R", "G", "B"]
    # two edge columns out of 40
    assert all(int(c) == 80 for c in frame["edge_count"])


def test_mtf_on_region(tmp_path, capsys):
    pixels = np.full((20, 20), 100, dtype=np.uint8)
    pixels[5:15, 5:10] = 50
    pixels[5:15, 10:15] = 150
    fq.write_image(tmp_path / "block.pgm", fq.create_band(pixels))
    assert main(["--quiet", "mtf", str(tmp_path / "block.pgm"), "--region", "blk=5,5,10,10"]) == 0
    frame = _stdout_frame(capsys)
    assert list(frame["scope"]) == ["whole", "blk"]
    assert float(frame["value"][1]) == 0.5
    assert float(frame["value"][0]) == 0.5


def test_csa_with_config(fixture_dir, capsys):
    assert main(["--quiet", "csa", str(fixture_dir / "fused_HF1.ppm"), "--config", str(fixture_dir / "regions.json"),
                 "--thresholds", "20"]) == 0
    frame = _stdout_frame(capsys)
    assert list(frame.columns) == fq.CSV_COLUMNS
    assert list(frame["scope"][:4]) == ["whole", "b1", "b2", "b3"]
    assert "edges@20" in set(frame["scope"])


def test_snr_whole_identical_images(fixture_dir, capsys):
    ms = str(fixture_dir / "ms.ppm")
    assert main(["--quiet", "snr", "--whole", ms, ms]) == 0
    frame = _stdout_frame(capsys)
    assert list(frame["value"]) == ["NaN (identical images)"] * 3


def test_snr_whole_upsamples_reference(fixture_dir, capsys):
    assert main(["--quiet", "snr", "--whole", str(fixture_dir / "fused_HF0.ppm"), str(fixture_dir / "ms.ppm")]) == 0
    frame = _stdout_frame(capsys)
    # gain 0 fused image is the upsampled MS
    assert list(frame["value"]) == ["NaN (identical images)"] * 3
    assert main(["--quiet", "snr", "--whole", str(fixture_dir / "fused_HF0.ppm")]) == 4


def test_snr_regions(fixture_dir, capsys):
    assert main(["--quiet", "snr", str(fixture_dir / "fused_HF1.ppm"), "--config", str(fixture_dir / "regions.json")]) == 0
    frame = _stdout_frame(capsys)
    assert set(frame["metric"]) == {"snr_a"}
    assert list(frame["band"]) == ["R"] * 3 + ["G"] * 3 + ["B"] * 3


def test_hist_subcommand(fixture_dir, capsys):
    fused = str(fixture_dir / "fused_HF1.ppm")
    assert main(["--quiet", "hist", fused, str(fixture_dir / "ms.ppm"), "--out", str(fixture_dir / "h")]) == 0
    frame = _stdout_frame(capsys)
    assert list(frame["band"]) == ["R", "G", "B", "L"]
    assert (fixture_dir / "h" / "hist_fused_HF1_L.csv").exists()
    assert (fixture_dir / "h" / "hist_MS_L.csv").exists()


def test_fixtures_then_auto_regions(tmp_path):
    d = tmp_path / "set"
    assert main(["--quiet", "fixtures", "--out", str(d), "--width", "100", "--height", "100", "--seed", "4"]) == 0
    names = sorted(os.listdir(d))
    assert names == ["fused_HF0.5.ppm", "fused_HF0.ppm", "fused_HF1.ppm", "ms.ppm", "pan.pgm"]
    assert fq.read_image(d / "ms.ppm").shape == (20, 20)
    assert fq.read_image(d / "pan.pgm").shape == (100, 100)

    code = main([
        "--quiet", "evaluate", "--pan", str(d / "pan.pgm"), "--ms", str(d / "ms.ppm"),
        "--fused", str(d / "fused_HF1.ppm"), "--out", str(d / "out"), "--auto-regions",
    ])
    assert code == 0
    config = fq.read_region_config(d / "out" / "regions.json")
    region_set = fq.load_region_set(config, (100, 100))
    assert region_set.group_names == ["b1", "b2", "b3"]
    report = fq.MetricReport.read_json(d / "out" / "report.json")
    # the label defaults to the file stem
    assert report.methods == ["PAN", "MS", "fused_HF1"]


def test_fixtures_bad_parameters(tmp_path):
    assert main(["--quiet", "fixtures", "--out", str(tmp_path), "--width", "101"]) == 4


def test_hist_whole_subcommand(fixture_dir, capsys):
    fused = str(fixture_dir / "fused_HF0.ppm")
    assert main(["--quiet", "hist", "--whole", fused, str(fixture_dir / "ms.ppm"), "--out", str(fixture_dir / "h")]) == 0
    frame = _stdout_frame(capsys)
    assert list(frame["scope"]) == ["whole"] * 4
    # HF0 is the upsampled MS, so every pixel histogram coincides
    assert list(frame["hist_delta"]) == ["0"] * 4
    assert list(frame["fused_n"]) == [str(40 * 40)] * 4
    assert (fixture_dir / "h" / "hist_whole_fused_HF0_R.csv").exists()
    assert (fixture_dir / "h" / "hist_whole_MS_R.csv").exists()


def test_evaluate_histogram_plots_cover_whole_bands(fixture_dir):
    code = main(_evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"), "--histogram-plots"))
    assert code == 0
    out = fixture_dir / "out"
    for band in ("R", "G", "B", "L"):
        assert (out / "hist_whole_HF1_{}.svg".format(band)).exists()
    report = fq.MetricReport.read_json(out / "report.json")
    assert [e.band for e in report.select(method="HF1", metric="hist_delta", scope="whole")] == ["R", "G", "B", "L"]


def test_evaluate_pan_bit_depth(fixture_dir):
    pixels = fq.read_image(fixture_dir / "pan.pgm").pixels
    png.from_array((pixels >> 2).tolist(), "L;8").save(str(fixture_dir / "pan6.png"))
    args = _evaluate_args(fixture_dir, "--config", str(fixture_dir / "regions.json"), "--pan-bit-depth", "6")
    args[2] = str(fixture_dir / "pan6.png")
    assert main(["--quiet"] + args) == 0

    # the PAN is scaled back onto the 8-bit range, the MS and fused images are read as 8-bit
    report = fq.MetricReport.read_json(fixture_dir / "out" / "report.json")
    scaled = fq.create_band((pixels >> 2) << 2, name="PAN")
    expected = [entry.rate for entry in fq.threshold_sweep(scaled)]
    assert [e.value for e in report.select(method="PAN", metric="edge_rate")] == expected
