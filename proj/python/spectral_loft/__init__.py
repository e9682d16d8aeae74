"""Spectral-loft segmentation of 16-bit greyscale images."""

import json

from . import _spectral
from ._spectral import (
    NoLoftFound,
    SpectralError,
    dilate,
    erode,
    evaluate,
    find_loft,
    opening,
    read_image,
    write_image,
)

__version__ = _spectral.__version__


def generate_phantom(**spec):
    """Generate a phantom; keys follow the phantom spec JSON (``seed`` is required)."""
    return _spectral.generate_phantom(json.dumps(spec))


def preprocess(image, **params):
    """Ghost removal, diffusion and bias correction. Returns a dict of arrays and indices."""
    return _spectral.preprocess(image, json.dumps(params))


def segment(image, mode="tissue", **params):
    """Run the full pipeline. Overrides use the service names (lo, hi, smooth_window, ...)."""
    return _spectral.segment(image, mode, json.dumps(params))


__all__ = [
    "NoLoftFound",
    "SpectralError",
    "dilate",
    "erode",
    "evaluate",
    "find_loft",
    "generate_phantom",
    "opening",
    "preprocess",
    "read_image",
    "segment",
    "write_image",
]
