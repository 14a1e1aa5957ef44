from fixtures import *

sys.path.insert(0, os.path.abspath("../"))

SOBEL_X = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
SOBEL_Y = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]


def naive_sobel(pixels):
    # double loop reference with replicated borders
    h, w = pixels.shape
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            gx = gy = 0.0
            for di in range(3):
                for dj in range(3):
                    ii = min(max(i + di - 1, 0), h - 1)
                    jj = min(max(j + dj - 1, 0), w - 1)
                    v = float(pixels[ii, jj])
                    gx += SOBEL_X[di][dj] * v
                    gy += SOBEL_Y[di][dj] * v
            out[i, j] = (gx**2 + gy**2) ** 0.5
    return out


def test_sobel_constant_band_is_zero(flat_band):
    grad = fq.sobel_magnitude(flat_band)
    assert grad.magnitudes.shape == flat_band.shape
    assert np.all(grad.magnitudes == 0)
    mask = fq.label_edges(grad, 0)
    # strict comparison: magnitude 0 is not an edge at threshold 0
    assert mask.edge_count == 0
    assert fq.edge_rate(mask) == 0.0


def test_sobel_step_edge(step_band):
    grad = fq.sobel_magnitude(step_band)
    # step of 150: gx = 4 x 150 on both sides of the step
    assert np.allclose(grad.magnitudes[:, 19], 600)
    assert np.allclose(grad.magnitudes[:, 20], 600)
    assert np.all(grad.magnitudes[:, :19] == 0)
    assert np.all(grad.magnitudes[:, 21:] == 0)

    mask = fq.label_edges(grad, 20)
    assert mask.edge_count == 80
    assert mask.homogeneous_count == 40 * 40 - 80
    assert np.isclose(fq.edge_rate(mask), 80 / 1600)
    # 600 is above the largest admissible threshold
    assert fq.label_edges(grad, 255).edge_count == 80


def test_sobel_matches_naive_reference(rng):
    for _ in range(50):
        pixels = rng.randint(0, 256, size=(32, 32))
        grad = fq.sobel_magnitude(fq.create_band(pixels))
        np.testing.assert_allclose(grad.magnitudes, naive_sobel(pixels), rtol=1e-9, atol=1e-9)


def test_sobel_is_translation_equivariant(rng):
    pixels = rng.randint(0, 256, size=(32, 32)).astype(np.uint8)
    shifted = np.roll(pixels, (2, 3), axis=(0, 1))
    grad = fq.sobel_magnitude(fq.create_band(pixels)).magnitudes
    grad_shifted = fq.sobel_magnitude(fq.create_band(shifted)).magnitudes
    # compare only where neither the borders nor the wrapped rows and columns are in the 3 x 3 support
    np.testing.assert_allclose(grad_shifted[3:31, 4:31], grad[1:29, 1:28], rtol=1e-12, atol=0)


def test_threshold_sweep_is_nested(rng, step_band, flat_band, small_scene):
    bands = [fq.create_band(rng.randint(0, 256, size=(32, 32))) for _ in range(20)]
    bands += [step_band, flat_band, small_scene[0]]
    for band in bands:
        sweep = fq.threshold_sweep(band)
        assert [entry.threshold for entry in sweep] == [20, 40, 60, 80, 100]
        for lower, higher in zip(sweep, sweep[1:]):
            # edge set at the higher threshold is contained in the lower one
            assert not np.any(higher.mask.labels & ~lower.mask.labels)
            assert higher.rate <= lower.rate


def test_check_thresholds():
    assert fq.check_thresholds([20, 40]) == [20, 40]
    with pytest.raises(ValueError):
        fq.check_thresholds([])
    with pytest.raises(ValueError):
        fq.check_thresholds([40, 20])
    with pytest.raises(ValueError):
        fq.check_thresholds([20, 20])
    with pytest.raises(ValueError):
        fq.check_thresholds([-1])
    with pytest.raises(ValueError):
        fq.check_thresholds([256])
    # wrong types from a JSON config
    for bad in ("20,40", 20, ["20"], [True], None):
        with pytest.raises(ValueError):
            fq.check_thresholds(bad)
    assert fq.check_thresholds(np.array([20, 40])) == [20, 40]


def test_edge_masks_per_band(step_image):
    masks = fq.edge_masks(step_image, [20, 100])
    assert list(masks) == ["R", "G", "B"]
    assert [m.threshold for m in masks["R"]] == [20, 100]
    # band steps of 120, 110 and 100 give gradients of at least 400
    assert all(m.edge_count == 80 for band_masks in masks.values() for m in band_masks)


def test_edge_mask_to_band_and_shape_check(step_band):
    mask = fq.label_edges(fq.sobel_magnitude(step_band), 20)
    rendered = mask.to_band()
    assert set(np.unique(rendered.pixels)) == {0, 255}
    assert np.count_nonzero(rendered.pixels) == 80
    with pytest.raises(fq.DimensionMismatchError):
        mask.check_shape(fq.create_band(np.zeros((5, 5))))
