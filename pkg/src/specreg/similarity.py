"""Image warping, the SSD measure, and its displacement gradient."""

from __future__ import annotations

import numpy as np

from . import backend
from .fields import ScalarField, ShapeMismatchError, VectorField

#: A scalar field resampled at x + u(x). Alias kept for signature clarity.
WarpedImage = ScalarField


def _sample(data: np.ndarray, coords, kmod) -> np.ndarray:
    if data.ndim == 1:
        return kmod.interp_1d(data, coords[0])
    if data.ndim == 2:
        return kmod.interp_2d(data, coords[0], coords[1])
    return kmod.interp_3d(data, coords[0], coords[1], coords[2])


def _warp_coords(u: VectorField) -> list:
    """Absolute sample positions x + u(x), one array per axis."""
    grids = np.indices(u.shape.dims, dtype=np.float64)
    return [np.ascontiguousarray(grids[a] + u.components[a])
            for a in range(u.shape.ndim)]


def warp(image: ScalarField, u: VectorField) -> WarpedImage:
    """Resample ``image`` at x + u(x) by multilinear interpolation.

    Sample coordinates are clamped to the grid box first (replicate
    border), so output values always lie within the input's range.
    """
    if image.shape != u.shape:
        raise ShapeMismatchError(
            f"image grid {image.shape.dims} != field grid {u.shape.dims}")
    kmod = backend.kernels()
    return ScalarField(image.shape, _sample(image.data, _warp_coords(u), kmod))


def ssd(reference: ScalarField, warped: WarpedImage) -> float:
    """Sum of squared intensity differences over all voxels."""
    if reference.shape != warped.shape:
        raise ShapeMismatchError(
            f"grids differ: {reference.shape.dims} vs {warped.shape.dims}")
    diff = reference.data - warped.data
    return float(np.sum(diff * diff))


def image_gradient(image: ScalarField) -> VectorField:
    """Central-difference gradient, one-sided at the grid borders."""
    grads = np.gradient(image.data)
    if image.shape.ndim == 1:
        grads = [grads]
    return VectorField(image.shape, tuple(grads))


def ssd_gradient(reference: ScalarField, moving: ScalarField,
                 u: VectorField) -> VectorField:
    """Gradient of the SSD with respect to each displacement component.

    Per voxel and component a this is
    ``(moving(x + u) - reference(x)) * grad_a moving(x + u)``, where the
    image gradient is taken on the original moving image and then sampled
    at the warped coordinates. The constant factor 2 from differentiating
    the square is absorbed into the solver's step size.
    """
    if reference.shape != moving.shape:
        raise ShapeMismatchError(
            f"grids differ: {reference.shape.dims} vs {moving.shape.dims}")
    if reference.shape != u.shape:
        raise ShapeMismatchError(
            f"image grid {reference.shape.dims} != field grid {u.shape.dims}")
    kmod = backend.kernels()
    coords = _warp_coords(u)
    residual = _sample(moving.data, coords, kmod) - reference.data
    comps = []
    for g in image_gradient(moving).components:
        comps.append(residual * _sample(np.ascontiguousarray(g), coords, kmod))
    return VectorField(u.shape, tuple(comps))
