"""Built-in seeded test images: disk, concentric rings, smoothed blobs.

Stand-ins for licensed anatomy volumes. Every generator works in 2D and
3D, returns intensities in [0, 1], and is a pure function of its
arguments, so published seeds reproduce the exact images.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .fields import GridShape, ScalarField, normalize_intensity


def _radius_map(shape: GridShape) -> np.ndarray:
    coords = np.indices(shape.dims, dtype=np.float64)
    center = (np.asarray(shape.dims, dtype=np.float64) - 1.0) / 2.0
    sq = np.zeros(shape.dims)
    for axis in range(shape.ndim):
        sq += (coords[axis] - center[axis]) ** 2
    return np.sqrt(sq)


def disk(shape: GridShape, radius_frac: float = 0.35,
         intensity: float = 0.8) -> ScalarField:
    """Filled centered disk (2D) or ball (3D) on a zero background."""
    if not 0.0 < radius_frac <= 0.5:
        raise ValueError(f"radius_frac must be in (0, 0.5], got {radius_frac}")
    radius = radius_frac * min(shape.dims)
    data = np.where(_radius_map(shape) <= radius, float(intensity), 0.0)
    return ScalarField(shape, data)


def rings(shape: GridShape, period_frac: float = 0.15) -> ScalarField:
    """Concentric cosine rings around the grid center, range [0, 1]."""
    if period_frac <= 0:
        raise ValueError(f"period_frac must be positive, got {period_frac}")
    period = max(2.0, period_frac * min(shape.dims))
    data = 0.5 + 0.5 * np.cos(2.0 * np.pi * _radius_map(shape) / period)
    return ScalarField(shape, data)


def _taper_window(shape: GridShape, taper_frac: float) -> np.ndarray:
    """Separable cosine ramp from 0 at the border to 1 in the interior."""
    window = np.ones(shape.dims)
    for axis, size in enumerate(shape.dims):
        margin = max(1, int(round(taper_frac * size)))
        j = np.arange(size, dtype=np.float64)
        edge_dist = np.minimum(j, size - 1 - j)
        ramp = np.where(edge_dist >= margin, 1.0,
                        0.5 - 0.5 * np.cos(np.pi * edge_dist / margin))
        dims = [1] * shape.ndim
        dims[axis] = size
        window = window * ramp.reshape(dims)
    return window


def blobs(shape: GridShape, seed: int = 0, smooth_frac: float = 0.028,
          contrast: float = 0.02, taper_frac: float = 0.08) -> ScalarField:
    """Smoothed random blobs: high-contrast seeded noise structures.

    Gaussian white noise from a Philox stream is blurred to blob scale
    ``smooth_frac * min(size)``, pushed through a sigmoid of width
    ``contrast`` (small width gives near-binary blobs with smooth few-voxel
    edges, which is what gives the SSD term traction at desk-scale grids),
    stretched to [0, 1], and faded to zero over a border margin so
    replicate-border sampling does not manufacture structure at the edges.
    """
    if smooth_frac <= 0:
        raise ValueError(f"smooth_frac must be positive, got {smooth_frac}")
    if contrast <= 0:
        raise ValueError(f"contrast must be positive, got {contrast}")
    if not 0.0 < taper_frac < 0.5:
        raise ValueError(f"taper_frac must be in (0, 0.5), got {taper_frac}")
    rng = np.random.Generator(np.random.Philox(seed))
    noise = rng.normal(size=shape.dims)
    smoothed = gaussian_filter(noise, sigma=smooth_frac * min(shape.dims),
                               mode="nearest")
    flat = normalize_intensity(ScalarField(shape, smoothed)).data
    sharp = 1.0 / (1.0 + np.exp(-(flat - 0.5) / contrast))
    flat = normalize_intensity(ScalarField(shape, sharp)).data
    return ScalarField(shape, flat * _taper_window(shape, taper_frac))
