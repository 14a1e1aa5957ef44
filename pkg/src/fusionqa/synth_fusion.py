# -*- coding: utf-8 -*-
"""
Synthetic PAN / MS / fused fixtures, so the whole evaluation pipeline can be exercised without satellite data.

The PAN scene is a gently ramped background with flat rectangles aligned to the resolution ratio, plus optional 1-px
lines that the MS cannot resolve. The MS is derived from it per band: tint gain, box blur, block-mean downsampling by
the resolution ratio and nearest-neighbour upsampling back. A fused image is simulated by adding the PAN high
frequencies (PAN minus its box blur) to the MS, scaled by a gain, plus a per-band intensity offset.

Every stage rounds half up and clamps to [0, 255]. Identical parameters give bit-identical output.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import ndimage

from fusionqa.exceptions import DimensionMismatchError
from fusionqa.raster_core import Band, MultibandImage, round_half_up, upsample_nearest

__all__ = [
    "SceneParams",
    "create_scene_params",
    "box_blur",
    "generate_scene",
    "simulate_fusion",
    "generate_fixture_set",
    "fused_label",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SceneParams:
    """
    Parameters of a synthetic scene.

    :param width: PAN width, a multiple of ``factor``
    :param height: PAN height, a multiple of ``factor``
    :param detail_density: rectangles per 100x100 pixel area
    :param seed: random generator seed
    :param spectral_shift: per-band (R, G, B) intensity offset added by :func:`simulate_fusion`
    :param hf_gain: amount of PAN high frequency injected by :func:`simulate_fusion`
    :param blur_radius: box blur radius applied to the MS before downsampling
    :param tint: per-band (R, G, B) gains applied to the PAN to form the MS bands
    :param thin_lines: if True, draw 1-px lines into the PAN
    :param factor: PAN / MS resolution ratio
    """

    width: int = 600
    height: int = 525
    detail_density: float = 2.0
    seed: int = 0
    spectral_shift: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    hf_gain: float = 1.0
    blur_radius: int = 2
    tint: Tuple[float, float, float] = (1.0, 0.9, 0.75)
    thin_lines: bool = True
    factor: int = 5

    def __post_init__(self):
        object.__setattr__(self, "spectral_shift", tuple(float(s) for s in self.spectral_shift))
        object.__setattr__(self, "tint", tuple(float(t) for t in self.tint))
        if self.factor < 1:
            raise ValueError("Resolution factor must be >= 1, got {}".format(self.factor))
        if self.width < 2 * self.factor or self.height < 2 * self.factor:
            raise ValueError(
                "Scene {}x{} is degenerate for resolution factor {}".format(self.width, self.height, self.factor)
            )
        if self.width % self.factor or self.height % self.factor:
            raise ValueError(
                "Scene dimensions {}x{} must be multiples of the resolution factor {}".format(
                    self.width, self.height, self.factor
                )
            )
        if len(self.spectral_shift) != 3 or len(self.tint) != 3:
            raise ValueError("spectral_shift and tint need one value per R, G, B band")
        if any(t < 0 for t in self.tint):
            raise ValueError("Tint gains must be >= 0, got {}".format(self.tint))
        if self.detail_density < 0 or self.hf_gain < 0 or self.blur_radius < 0:
            raise ValueError("detail_density, hf_gain and blur_radius must be >= 0")


def create_scene_params(**kwargs) -> SceneParams:
    """
    User interface function to create :class:`SceneParams`. Accepts the same keywords as :class:`SceneParams`;
    omitted ones take the 600x525 default scene values.
    """
    unknown = set(kwargs) - set(SceneParams.__dataclass_fields__)
    if unknown:
        raise ValueError("Unknown scene keyword(s): {}".format(sorted(unknown)))
    return SceneParams(**kwargs)


def box_blur(data: np.ndarray, radius: int) -> np.ndarray:
    """Mean over a (2r+1) x (2r+1) window, borders replicated. Returns float64; radius 0 returns the input."""
    data = np.asarray(data, dtype=np.float64)
    if radius == 0:
        return data
    return ndimage.uniform_filter(data, size=2 * radius + 1, mode="nearest")


def _pan_pattern(params: SceneParams) -> np.ndarray:
    rng = np.random.default_rng(params.seed)
    f = params.factor
    rows, cols = params.height // f, params.width // f

    # background constant inside each factor x factor cell, steps of at most one level between cells
    cy, cx = np.indices((rows, cols))
    cells = 80.0 + 40.0 * cx / cols + 20.0 * cy / rows

    n_rect = int(round(params.detail_density * params.width * params.height / 10000.0))
    for _ in range(n_rect):
        rw = int(rng.integers(4, 21))
        rh = int(rng.integers(4, 21))
        c0 = int(rng.integers(0, max(1, cols - rw)))
        r0 = int(rng.integers(0, max(1, rows - rh)))
        cells[r0 : r0 + rh, c0 : c0 + rw] = rng.integers(20, 236)

    pan = np.repeat(np.repeat(round_half_up(cells), f, axis=0), f, axis=1)
    if params.thin_lines:
        n_lines = max(1, n_rect // 10)
        for _ in range(n_lines):
            value = int(rng.integers(200, 251))
            if rng.random() < 0.5:
                y = int(rng.integers(0, params.height))
                x0 = int(rng.integers(0, params.width // 2))
                pan[y, x0 : x0 + params.width // 3] = value
            else:
                x = int(rng.integers(0, params.width))
                y0 = int(rng.integers(0, params.height // 2))
                pan[y0 : y0 + params.height // 3, x] = value
    return pan


def _block_mean(data: np.ndarray, factor: int) -> np.ndarray:
    h, w = data.shape
    return data.reshape(h // factor, factor, w // factor, factor).mean(axis=(1, 3))


def generate_scene(params: SceneParams, native: bool = False) -> Tuple[Band, MultibandImage]:
    """
    Generate the PAN band and the MS image of a synthetic scene.

    :param params: scene parameters
    :type params: :class:`SceneParams`
    :param native: if True, return the MS at its native resolution (PAN size divided by ``factor``) instead of
                   upsampled back to the PAN grid
    :returns: tuple of (:class:`~fusionqa.raster_core.Band` PAN, :class:`~fusionqa.raster_core.MultibandImage` MS)
    """
    pan_pixels = _pan_pattern(params)
    pan = Band(pan_pixels, name="PAN")
    bands = []
    for gain in params.tint:
        tinted = round_half_up(pan_pixels * gain)
        blurred = round_half_up(box_blur(tinted, params.blur_radius))
        low = Band(round_half_up(_block_mean(blurred.astype(np.float64), params.factor)))
        bands.append(low if native else upsample_nearest(low, params.factor))
    ms = MultibandImage(r=bands[0], g=bands[1], b=bands[2], label="MS")
    logger.debug(
        "Generated scene %dx%d (seed %d, density %s), MS %dx%d",
        params.width, params.height, params.seed, params.detail_density, ms.width, ms.height,
    )
    return pan, ms


def simulate_fusion(
    pan: Band, ms: MultibandImage, hf_gain: float = 1.0, spectral_shift: Sequence[float] = (0, 0, 0), **kwargs
) -> MultibandImage:
    """
    Simulated high-frequency-addition fusion: per band, clamp(ms + hf_gain x (pan - boxblur(pan)) + shift).

    :param pan: PAN band
    :param ms: MS image upsampled to the PAN grid
    :param hf_gain: high-frequency gain (>= 0)
    :param spectral_shift: per-band (R, G, B) offsets
    :keyword:

    * radius (`int`): box blur radius of the high-frequency split. Default 2
    * label (`str`): label of the result. Default "fused"

    :returns: :class:`~fusionqa.raster_core.MultibandImage`
    :raises DimensionMismatchError: if PAN and MS differ in dimensions
    """
    if pan.shape != ms.shape:
        raise DimensionMismatchError(
            "PAN {}x{} and MS {}x{} differ in dimensions. Hint: upsample the MS first".format(
                pan.width, pan.height, ms.width, ms.height
            )
        )
    if hf_gain < 0:
        raise ValueError("hf_gain must be >= 0, got {}".format(hf_gain))
    shifts = list(spectral_shift)
    if len(shifts) != 3:
        raise ValueError("spectral_shift needs one value per R, G, B band, got {}".format(shifts))
    radius = kwargs.get("radius", 2)
    label = kwargs.get("label", "fused")

    pan_data = pan.pixels.astype(np.float64)
    detail = hf_gain * (pan_data - box_blur(pan_data, radius))
    fused = []
    for band, shift in zip(ms.bands().values(), shifts):
        fused.append(Band(round_half_up(band.pixels.astype(np.float64) + detail + shift)))
    return MultibandImage(r=fused[0], g=fused[1], b=fused[2], label=label)


def fused_label(hf_gain: float) -> str:
    return "HF{:g}".format(hf_gain)


def generate_fixture_set(
    params: SceneParams, hf_gains: Sequence[float] = (0.0, 0.5, 1.0)
) -> Tuple[Band, MultibandImage, Dict[str, MultibandImage]]:
    """
    Generate a PAN, its native-resolution MS and one simulated fused image per high-frequency gain, each using
    ``params.spectral_shift``.

    :returns: tuple of (PAN, native MS, dict of label "HF<gain>" to fused image)
    """
    pan, ms_native = generate_scene(params, native=True)
    ms_up = MultibandImage(
        r=upsample_nearest(ms_native.r, params.factor),
        g=upsample_nearest(ms_native.g, params.factor),
        b=upsample_nearest(ms_native.b, params.factor),
        label="MS",
    )
    fused = {}
    for gain in hf_gains:
        label = fused_label(gain)
        fused[label] = simulate_fusion(
            pan, ms_up, gain, params.spectral_shift, radius=max(1, params.factor // 2), label=label
        )
    logger.info("Generated %d fused fixture(s): %s", len(fused), ", ".join(fused))
    return pan, ms_native, fused
