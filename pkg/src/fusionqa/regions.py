# -*- coding: utf-8 -*-
"""
This module handles the homogeneous regions evaluated by the block-based metrics (Michelson contrast, region CSA and
region SNR). A region configuration is a JSON document of the form::

    {
        "regions": [
            {"name": "b1", "x0": 60, "y0": 60, "w": 30, "h": 30},
            {"name": "b3_1", "x0": 100, "y0": 400, "w": 10, "h": 10, "group": "b3"}
        ],
        "thresholds": [20, 40, 60, 80, 100],
        "histogram_threshold": 20
    }

Blocks sharing a ``group`` are pooled into one population. ``thresholds`` and ``histogram_threshold`` are optional and
only read by :class:`~fusionqa.evaluation.FusionEvaluation`.

The default set holds two 30x30 blocks (b1, b2) and seven 10x10 blocks pooled as b3, placed for the 600x525 default
scene. The coordinates are arbitrary defaults, not derived from any particular imagery.
"""
import json
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from fusionqa.exceptions import RegionBoundsError, RegionConfigError
from fusionqa.raster_core import Band, RegionSpec

__all__ = [
    "RegionSet",
    "create_region_set",
    "default_region_config",
    "read_region_config",
    "write_region_config",
    "load_region_set",
    "find_homogeneous_blocks",
    "auto_region_set",
]

logger = logging.getLogger(__name__)

_REQUIRED_KEYS = ("name", "x0", "y0", "w", "h")
_OPTIONAL_KEYS = ("group",)


class RegionSet:
    """
    Ordered collection of uniquely named :class:`~fusionqa.raster_core.RegionSpec` blocks. Iterating yields the blocks
    in configuration order.
    """

    def __init__(self, regions: Iterable[RegionSpec]):
        self.regions: Tuple[RegionSpec, ...] = tuple(regions)
        if not self.regions:
            raise RegionConfigError("A region set needs at least one region")
        seen = set()
        for region in self.regions:
            if not isinstance(region, RegionSpec):
                raise RegionConfigError("Region set entries must be RegionSpec, got {}".format(type(region).__name__))
            if region.name in seen:
                raise RegionConfigError("Duplicate region name '{}'".format(region.name))
            seen.add(region.name)

    def __iter__(self):
        return iter(self.regions)

    def __len__(self):
        return len(self.regions)

    def __getitem__(self, name: str) -> RegionSpec:
        for region in self.regions:
            if region.name == name:
                return region
        raise KeyError(name)

    def __eq__(self, other):
        if not isinstance(other, RegionSet):
            return NotImplemented
        return self.regions == other.regions

    __hash__ = None

    def __repr__(self):
        return "RegionSet(groups={})".format(self.group_names)

    @property
    def names(self) -> List[str]:
        return [r.name for r in self.regions]

    @property
    def group_names(self) -> List[str]:
        """Group names in order of first appearance."""
        return list(self.groups())

    def groups(self) -> Dict[str, List[RegionSpec]]:
        groups: Dict[str, List[RegionSpec]] = {}
        for region in self.regions:
            groups.setdefault(region.group, []).append(region)
        return groups

    def check_bounds(self, width: int, height: int):
        """
        :raises RegionBoundsError: naming the first block not fully inside a ``width`` x ``height`` image
        """
        for region in self.regions:
            region.check_bounds(width, height)

    def to_config(self) -> dict:
        return {"regions": [r.to_dict() for r in self.regions]}


def create_region_set(**kwargs) -> RegionSet:
    """
    User interface function to create a :class:`RegionSet`.

    :keyword:

    * regions (`list`): list of :class:`~fusionqa.raster_core.RegionSpec`, or
    * config (`dict` or `str`): region configuration document (or a path to one)
    * image_dims (`tuple`): (width, height) to validate the blocks against. Required with ``config``.

    With no keyword the default set is returned.
    """
    regions = kwargs.get("regions", None)
    if regions is not None:
        return RegionSet(regions)
    config = kwargs.get("config", None)
    if isinstance(config, str):
        config = read_region_config(config)
    image_dims = kwargs.get("image_dims", None)
    if image_dims is None:
        if config is not None:
            raise ValueError("Missing keyword argument image_dims=(width, height) for config=")
        return RegionSet(_parse_regions(default_region_config()["regions"]))
    return load_region_set(config, image_dims)


def default_region_config() -> dict:
    """
    Return the default region configuration: b1 and b2 (30x30) and seven 10x10 blocks pooled as b3.
    """
    regions = [
        {"name": "b1", "x0": 60, "y0": 60, "w": 30, "h": 30, "group": "b1"},
        {"name": "b2", "x0": 420, "y0": 300, "w": 30, "h": 30, "group": "b2"},
    ]
    for i, x0 in enumerate(range(100, 461, 60)):
        regions.append({"name": "b3_{}".format(i + 1), "x0": x0, "y0": 400, "w": 10, "h": 10, "group": "b3"})
    return {"regions": regions}


def read_region_config(path) -> dict:
    """
    Read a region configuration JSON file.

    :raises RegionConfigError: if the file is unreadable or not valid JSON
    """
    try:
        with open(path, "r") as f:
            return json.load(f)
    except OSError as e:
        raise RegionConfigError("Cannot read region config {}: {}".format(path, e.strerror or e)) from e
    except json.JSONDecodeError as e:
        raise RegionConfigError("Region config {} is not valid JSON: {}".format(path, e)) from e


def write_region_config(region_set: RegionSet, path, **extra):
    """
    Dump ``region_set`` (plus any extra top-level keys, e.g. ``thresholds``) to a JSON configuration file.
    """
    config = region_set.to_config()
    config.update(extra)
    with open(path, "w") as f:
        json.dump(config, f, indent=4)


def _parse_regions(entries) -> List[RegionSpec]:
    if not isinstance(entries, list):
        raise RegionConfigError('"regions" must be a list, got {}'.format(type(entries).__name__))
    regions = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise RegionConfigError("Region entry {} must be an object, got {!r}".format(i, entry))
        label = entry.get("name", "#{}".format(i))
        missing = [k for k in _REQUIRED_KEYS if k not in entry]
        if missing:
            raise RegionConfigError("Region '{}' is missing key(s) {}".format(label, missing))
        unknown = [k for k in entry if k not in _REQUIRED_KEYS + _OPTIONAL_KEYS]
        if unknown:
            raise RegionConfigError("Region '{}' has unknown key(s) {}".format(label, unknown))
        if not isinstance(entry["name"], str) or not entry["name"]:
            raise RegionConfigError("Region entry {}: name must be a non-empty string".format(i))
        group = entry.get("group", None)
        if group is not None and (not isinstance(group, str) or not group):
            raise RegionConfigError("Region '{}': group must be a non-empty string".format(label))
        try:
            regions.append(RegionSpec(entry["name"], entry["x0"], entry["y0"], entry["w"], entry["h"], group))
        except ValueError as e:
            raise RegionConfigError(str(e)) from e
    return regions


def load_region_set(config: Optional[dict], image_dims: Sequence[int]) -> RegionSet:
    """
    Validate a parsed region configuration against the target image dimensions.

    :param config: parsed JSON document. ``None`` or a document without a "regions" key selects the defaults.
    :param image_dims: (width, height) of the evaluated images
    :returns: :class:`RegionSet`
    :raises RegionConfigError: for malformed entries or duplicate names
    :raises RegionBoundsError: for a block not fully inside the image
    """
    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise RegionConfigError("Region config must be a JSON object, got {}".format(type(config).__name__))
    if "regions" in config:
        regions = _parse_regions(config["regions"])
    else:
        logger.debug("No regions configured, using the default b1/b2/b3 set")
        regions = _parse_regions(default_region_config()["regions"])
    region_set = RegionSet(regions)
    width, height = image_dims
    try:
        region_set.check_bounds(width, height)
    except RegionBoundsError:
        if "regions" not in config:
            logger.error("Default regions are placed for 600x525 images. Hint: pass a region config")
        raise
    return region_set


def _overlaps(x0, y0, w, h, region: RegionSpec) -> bool:
    return x0 < region.x0 + region.w and region.x0 < x0 + w and y0 < region.y0 + region.h and region.y0 < y0 + h


def find_homogeneous_blocks(
    band: Band, block_w: int, block_h: int, count: int, prefix: str = "auto", group=None, exclude=()
) -> List[RegionSpec]:
    """
    Find the ``count`` lowest-variance blocks of ``band`` on a block-aligned grid (stride = block size), so returned
    blocks never overlap. Ties are broken by (row, column) scan order.

    :param band: band to scan
    :param block_w: block width
    :param block_h: block height
    :param count: number of blocks to return
    :param prefix: block names are ``<prefix>_<k>``, k counting from 1
    :param group: pooling group of the returned blocks (defaults to each block's own name)
    :param exclude: regions the returned blocks must not overlap
    :returns: list of :class:`~fusionqa.raster_core.RegionSpec` in ascending variance order
    :raises RegionConfigError: if the block does not fit or ``count`` exceeds the available grid cells
    """
    if count < 1:
        raise RegionConfigError("Block count must be >= 1, got {}".format(count))
    if block_w < 1 or block_h < 1 or block_w > band.width or block_h > band.height:
        raise RegionConfigError(
            "Block {}x{} does not fit in the {}x{} band".format(block_w, block_h, band.width, band.height)
        )
    rows = band.height // block_h
    cols = band.width // block_w
    data = band.pixels[: rows * block_h, : cols * block_w].astype(np.float64)
    cells = data.reshape(rows, block_h, cols, block_w)
    variances = cells.var(axis=(1, 3))

    row_idx, col_idx = np.indices((rows, cols))
    # lexsort keys are applied last-first: variance, then row, then column
    order = np.lexsort((col_idx.ravel(), row_idx.ravel(), variances.ravel()))
    blocks = []
    for flat in order:
        r, c = divmod(int(flat), cols)
        x0, y0 = c * block_w, r * block_h
        if any(_overlaps(x0, y0, block_w, block_h, region) for region in exclude):
            continue
        name = "{}_{}".format(prefix, len(blocks) + 1)
        blocks.append(RegionSpec(name, x0, y0, block_w, block_h, group))
        if len(blocks) == count:
            return blocks
    raise RegionConfigError(
        "Requested {} blocks of {}x{} but only {} grid cells are available".format(
            count, block_w, block_h, len(blocks)
        )
    )


def auto_region_set(band: Band) -> RegionSet:
    """
    Build a b1/b2/b3 region set from the most homogeneous blocks of ``band`` (normally the PAN): b1 and b2 are the two
    lowest-variance 30x30 grid blocks, b3 pools the seven lowest-variance 10x10 grid blocks that do not overlap them.
    """
    large = find_homogeneous_blocks(band, 30, 30, 2, prefix="b")
    b1 = RegionSpec("b1", large[0].x0, large[0].y0, 30, 30)
    b2 = RegionSpec("b2", large[1].x0, large[1].y0, 30, 30)
    small = find_homogeneous_blocks(band, 10, 10, 7, prefix="b3", group="b3", exclude=(b1, b2))
    region_set = RegionSet([b1, b2] + small)
    logger.info("Selected homogeneous regions: %s", ", ".join(r.name for r in region_set))
    return region_set
