# -*- coding: utf-8 -*-
"""
This module holds the exception classes raised by *fusionqa*. Validation errors also derive from ``ValueError`` so
that callers catching the built-in type keep working.

Metric-level errors (e.g. :class:`ZeroDeviationError`) are raised by the scalar metric functions. The report functions
catch them and store an explicit marker string in the result entry instead of a number.
"""

__all__ = [
    "FusionQAError",
    "ImageReadError",
    "DimensionMismatchError",
    "ConfigError",
    "RegionConfigError",
    "RegionBoundsError",
    "EmptyRegionError",
    "DegenerateRegionError",
    "ZeroDeviationError",
    "IdenticalImagesError",
    "EmptyHistogramError",
    "NO_EDGES",
    "NO_HOMOGENEOUS",
    "DEGENERATE_REGION",
    "CONSTANT_REGION",
    "IDENTICAL_IMAGES",
    "EMPTY_HISTOGRAM",
]

# marker strings stored in report entries in place of a value
NO_EDGES = "no edges"
NO_HOMOGENEOUS = "no homogeneous pixels"
DEGENERATE_REGION = "degenerate region"
CONSTANT_REGION = "undefined (constant region)"
IDENTICAL_IMAGES = "identical images"
EMPTY_HISTOGRAM = "empty histogram"


class FusionQAError(Exception):
    """Base class of all *fusionqa* errors."""

    marker = None


class ImageReadError(FusionQAError, OSError):
    """Image file could not be read or has an unsupported format."""


class DimensionMismatchError(FusionQAError, ValueError):
    """Two rasters (or a raster and a mask) do not share the required dimensions."""


class ConfigError(FusionQAError, ValueError):
    """Configuration (thresholds, worker count, config document) is malformed."""


class RegionConfigError(ConfigError):
    """Region configuration is malformed (bad entry, duplicate name, bad grid request)."""


class RegionBoundsError(RegionConfigError):
    """A region block does not lie fully inside the target image."""


class EmptyRegionError(FusionQAError, ValueError):
    """Statistic requested over an empty pixel collection."""


class DegenerateRegionError(FusionQAError, ValueError):
    """Contrast undefined because the population is all black (zero mean / zero I_max + I_min)."""

    marker = DEGENERATE_REGION


class ZeroDeviationError(FusionQAError, ValueError):
    """Region SNR undefined because the region is constant (zero standard deviation)."""

    marker = CONSTANT_REGION


class IdenticalImagesError(FusionQAError):
    """Whole-image SNR has a zero denominator: the fused band equals its reference."""

    marker = IDENTICAL_IMAGES


class EmptyHistogramError(FusionQAError, ValueError):
    """Histogram comparison requested on a histogram with no counts."""

    marker = EMPTY_HISTOGRAM
