import pytest

import fusionqa
import fusionqa as fq
import sys, os
import json
import numpy as np

# small regions used with the 40 x 40 test images
small_region_config = {
    "regions": [
        {"name": "b1", "x0": 2, "y0": 2, "w": 8, "h": 8},
        {"name": "b2", "x0": 24, "y0": 24, "w": 8, "h": 8},
        {"name": "b3_1", "x0": 2, "y0": 30, "w": 4, "h": 4, "group": "b3"},
        {"name": "b3_2", "x0": 10, "y0": 30, "w": 4, "h": 4, "group": "b3"},
    ]
}


@pytest.fixture
def rng():
    return np.random.RandomState(42)


@pytest.fixture
def flat_band():
    # constant band, value 100
    return fq.create_band(np.full((40, 40), 100, dtype=np.uint8), name="PAN")


@pytest.fixture
def step_band():
    # vertical step edge 50 | 200 at column 20
    pixels = np.full((40, 40), 50, dtype=np.uint8)
    pixels[:, 20:] = 200
    return fq.create_band(pixels, name="PAN")


@pytest.fixture
def step_image():
    # RGB step edge with distinct levels per band
    array = np.zeros((40, 40, 3), dtype=np.uint8)
    array[:, :20] = (60, 50, 40)
    array[:, 20:] = (180, 160, 140)
    return fq.create_image(array=array, label="step")


@pytest.fixture
def flat_image():
    return fq.create_image(array=np.full((40, 40, 3), 100, dtype=np.uint8), label="flat")


@pytest.fixture
def random_image(rng):
    return fq.create_image(array=rng.randint(0, 256, size=(32, 32, 3)).astype(np.uint8), label="random")


@pytest.fixture
def small_regions():
    return fq.load_region_set(small_region_config, (40, 40))


@pytest.fixture
def small_scene():
    # 40 x 40 synthetic scene with its native 8 x 8 MS and fused images at hf gain 0 and 1
    params = fq.create_scene_params(width=40, height=40, detail_density=20, seed=3)
    pan, ms_native, fused = fq.generate_fixture_set(params, hf_gains=(0, 1))
    return pan, ms_native, fused


@pytest.fixture(scope="module")
def default_scene():
    # 600 x 525 default scene: PAN and MS upsampled to the PAN grid
    params = fq.create_scene_params()
    pan, ms = fq.generate_scene(params)
    return params, pan, ms


@pytest.fixture
def fixture_dir(tmp_path, small_scene):
    # fixture files on disk for the CLI tests
    pan, ms_native, fused = small_scene
    fq.write_image(tmp_path / "pan.pgm", pan)
    fq.write_image(tmp_path / "ms.ppm", ms_native)
    for label, img in fused.items():
        fq.write_image(tmp_path / "fused_{}.ppm".format(label), img)
    with open(tmp_path / "regions.json", "w") as f:
        json.dump(small_region_config, f)
    return tmp_path
