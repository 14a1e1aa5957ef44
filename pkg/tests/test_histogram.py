from fixtures import *
import pandas as pd

sys.path.insert(0, os.path.abspath("../"))


def test_build_histogram_counts():
    band = fq.create_band([[0, 0], [255, 10]], name="R")
    hist = fq.build_histogram(band)
    assert hist.bins[0] == 2 and hist.bins[10] == 1 and hist.bins[255] == 1
    assert hist.total == 4
    assert hist.scope == "whole" and hist.band == "R"

    flat = fq.build_histogram(fq.create_band(np.full((6, 7), 42)))
    assert flat.bins[42] == 42 and flat.total == 42


def test_build_histogram_matches_naive_count(rng):
    for _ in range(50):
        pixels = rng.randint(0, 256, size=(32, 32))
        expected = [0] * 256
        for v in pixels.ravel():
            expected[v] += 1
        assert fq.build_histogram(fq.create_band(pixels)).bins.tolist() == expected


def test_edge_and_homogeneous_histograms_partition_the_band(step_band, small_scene):
    for band in (step_band, small_scene[0]):
        whole = fq.build_histogram(band)
        for t in (20, 60, 100):
            mask = fq.label_edges(fq.sobel_magnitude(band), t)
            edges = fq.build_histogram(band, mask)
            homogeneous = fq.build_histogram(band, mask, population="homogeneous")
            assert edges.total == mask.edge_count
            assert np.array_equal(edges.bins + homogeneous.bins, whole.bins)
            assert edges.scope == "edges@{}".format(t)


def test_zero_edge_mask_gives_empty_histogram(flat_band):
    mask = fq.label_edges(fq.sobel_magnitude(flat_band), 20)
    hist = fq.build_histogram(flat_band, mask)
    assert hist.total == 0 and not hist.bins.any()
    with pytest.raises(fq.EmptyHistogramError):
        fq.histogram_delta(hist, fq.build_histogram(flat_band))


def test_build_histogram_mask_mismatch(step_band):
    mask = fq.label_edges(fq.sobel_magnitude(step_band), 20)
    with pytest.raises(fq.DimensionMismatchError):
        fq.build_histogram(fq.create_band(np.zeros((3, 3))), mask)
    with pytest.raises(ValueError):
        fq.build_histogram(step_band, mask, population="all")


def test_histogram_delta_values():
    at_zero = np.zeros(256, dtype=int)
    at_zero[0] = 10
    at_top = np.zeros(256, dtype=int)
    at_top[255] = 3
    half = np.zeros(256, dtype=int)
    half[0] = 5
    half[255] = 5
    h0 = fq.Histogram256(at_zero)
    assert fq.histogram_delta(h0, h0) == 0.0
    assert fq.histogram_delta(h0, fq.Histogram256(at_top)) == 1.0
    assert fq.histogram_delta(h0, fq.Histogram256(half)) == 0.5


def test_histogram_delta_is_a_metric(rng):
    for _ in range(100):
        a, b, c = [fq.Histogram256(rng.randint(0, 20, size=256)) for _ in range(3)]
        ab = fq.histogram_delta(a, b)
        assert 0 <= ab <= 1
        assert np.isclose(ab, fq.histogram_delta(b, a))
        assert fq.histogram_delta(a, c) <= ab + fq.histogram_delta(b, c) + 1e-12


def test_histogram256_validation():
    with pytest.raises(ValueError):
        fq.Histogram256(np.zeros(255))
    with pytest.raises(ValueError):
        fq.Histogram256(np.full(256, -1))


def test_edge_histogram_suite_identical_images(step_image):
    suite = fq.edge_histogram_suite(step_image, step_image.relabel("MS"))
    assert list(suite.pairs) == ["R", "G", "B", "L"]
    assert suite.threshold == 20
    assert all(delta == 0.0 for delta in suite.deltas.values())


def test_edge_histogram_suite_shift_in_one_band(step_image):
    shifted = fq.create_image(array=step_image.to_array().astype(int) + [0, 0, 30], label="fused")
    suite = fq.edge_histogram_suite(shifted, step_image)
    assert suite.deltas["R"] == 0.0
    assert suite.deltas["G"] == 0.0
    assert suite.deltas["B"] > suite.deltas["R"]
    assert suite.deltas["L"] > 0


def test_edge_histogram_suite_marks_empty(flat_image):
    suite = fq.edge_histogram_suite(flat_image, flat_image)
    assert all(delta is None for delta in suite.deltas.values())
    assert all(marker == fq.EMPTY_HISTOGRAM for marker in suite.markers.values())


def test_edge_histogram_suite_dimension_mismatch(step_image):
    with pytest.raises(fq.DimensionMismatchError):
        fq.edge_histogram_suite(step_image, fq.create_image(array=np.zeros((3, 3, 3), dtype=np.uint8)))


def test_whole_histogram_suite(step_image, flat_image):
    shifted = fq.create_image(array=step_image.to_array().astype(int) + [0, 0, 30], label="fused")
    suite = fq.whole_histogram_suite(shifted, step_image)
    assert suite.threshold is None and suite.scope == "whole"
    assert all(fused.total == 40 * 40 and ms.total == 40 * 40 for fused, ms in suite.pairs.values())
    # B 40 | 140 becomes 70 | 170 and L 50 | 160 becomes 60 | 170: no shared intensity
    assert suite.deltas == {"R": 0.0, "G": 0.0, "B": 1.0, "L": 1.0}

    # a constant image has no edges but a full whole-band histogram
    suite = fq.whole_histogram_suite(flat_image, flat_image)
    assert all(delta == 0.0 for delta in suite.deltas.values())
    assert all(marker is None for marker in suite.markers.values())


def test_write_histogram_csv(tmp_path, step_band):
    fq.write_histogram_csv(fq.build_histogram(step_band), tmp_path / "h.csv")
    frame = pd.read_csv(tmp_path / "h.csv")
    assert list(frame.columns) == ["intensity", "count"]
    assert len(frame) == 256
    assert frame["count"][50] == 800 and frame["count"][200] == 800
