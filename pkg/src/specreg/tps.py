"""Synthetic ground-truth deformations: perturbed control grids densified
by thin-plate splines.

A uniform control lattice is perturbed with i.i.d. Gaussian offsets drawn
from a counter-based Philox generator (so published seeds reproduce across
platforms), the offsets are interpolated to every voxel by a polyharmonic
spline, and the image is resampled through the resulting field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .fields import GridShape, ScalarField, VectorField
from .similarity import warp

#: Voxel rows per dense-evaluation chunk (bounds the distance-matrix size).
EVAL_CHUNK = 65536


def _locked(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SynthConfig:
    """Control-point spacing, perturbation scale, and RNG seed."""

    sigma: float
    spacing_frac: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.spacing_frac <= 0.5:
            raise ValueError(
                f"spacing_frac must be in (0, 0.5], got {self.spacing_frac}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class TpsModel:
    """Fitted spline: control points, kernel weights, affine part.

    ``weights`` is (n_points, d) with one column per displacement
    component; ``affine`` is (d + 1, d) holding the constant term in row 0
    and the linear map below it. The weights satisfy the side conditions
    sum(w) = 0 and sum(w * p) = 0 per axis and component, and the model
    reproduces the prescribed displacement exactly at every control point.
    """

    points: np.ndarray
    weights: np.ndarray
    affine: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _locked(self.points))
        object.__setattr__(self, "weights", _locked(self.weights))
        object.__setattr__(self, "affine", _locked(self.affine))
        n, d = self.points.shape
        if self.weights.shape != (n, d):
            raise ValueError(
                f"weights shape {self.weights.shape} != ({n}, {d})")
        if self.affine.shape != (d + 1, d):
            raise ValueError(
                f"affine shape {self.affine.shape} != ({d + 1}, {d})")

    @property
    def ndim(self) -> int:
        return self.points.shape[1]


def _axis_ticks(size: int, spacing_frac: float) -> list:
    spacing = max(1, int(np.floor(size * spacing_frac)))
    ticks = list(range(0, size, spacing))
    if ticks[-1] != size - 1:
        ticks.append(size - 1)
    return ticks


def control_grid(shape: GridShape, spacing_frac: float = 0.15) -> np.ndarray:
    """Uniform control lattice over the grid, boundary faces included.

    Per-axis spacing is floor(size * spacing_frac) voxels (at least 1);
    returns an (n_points, d) coordinate array in voxel units.
    """
    if not 0.0 < spacing_frac <= 0.5:
        raise ValueError(f"spacing_frac must be in (0, 0.5], got {spacing_frac}")
    axes = [_axis_ticks(n, spacing_frac) for n in shape.dims]
    for n, ticks in zip(shape.dims, axes):
        if len(ticks) < 2:
            raise ValueError(
                f"spacing_frac {spacing_frac} yields {len(ticks)} control "
                f"points on an axis of length {n}")
    return np.array(list(itertools.product(*axes)), dtype=np.float64)


def perturb(points: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """I.i.d. zero-mean Gaussian offsets, std ``sigma``, per coordinate.

    Drawn from numpy's Philox generator: counter-based, so a fixed seed
    reproduces the same offsets on every platform.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.normal(0.0, sigma, size=points.shape)


def _kernel(r: np.ndarray, ndim: int) -> np.ndarray:
    if ndim == 2:
        # r^2 log r with the removable singularity pinned to 0
        safe = np.where(r > 0.0, r, 1.0)
        return r * r * np.log(safe)
    if ndim == 3:
        return r
    raise ValueError(f"spline kernel defined for 2D and 3D, got {ndim}D")


def tps_fit(points: np.ndarray, displacements: np.ndarray) -> TpsModel:
    """Fit the interpolating spline through the control-point offsets.

    Solves the (n + d + 1)-square system [[Phi, P], [P^T, 0]] [w; a] =
    [v; 0] once for all components; a singular system (degenerate control
    geometry) raises numpy's LinAlgError rather than being regularized.
    """
    points = np.asarray(points, dtype=np.float64)
    displacements = np.asarray(displacements, dtype=np.float64)
    n, d = points.shape
    if displacements.shape != (n, d):
        raise ValueError(
            f"displacements shape {displacements.shape} != ({n}, {d})")
    if n < d + 1:
        raise ValueError(f"need at least {d + 1} control points, got {n}")
    phi = _kernel(cdist(points, points), d)
    p = np.hstack([np.ones((n, 1)), points])
    lhs = np.zeros((n + d + 1, n + d + 1))
    lhs[:n, :n] = phi
    lhs[:n, n:] = p
    lhs[n:, :n] = p.T
    rhs = np.zeros((n + d + 1, d))
    rhs[:n] = displacements
    sol = np.linalg.solve(lhs, rhs)
    return TpsModel(points=points, weights=sol[:n], affine=sol[n:])


def _evaluate_at(model: TpsModel, coords: np.ndarray) -> np.ndarray:
    k = _kernel(cdist(coords, model.points), model.ndim)
    return model.affine[0] + coords @ model.affine[1:] + k @ model.weights


def tps_evaluate(model: TpsModel, shape: GridShape) -> VectorField:
    """Rasterize the spline to a dense displacement field on the grid."""
    if shape.ndim != model.ndim:
        raise ValueError(
            f"model is {model.ndim}D but the grid is {shape.ndim}D")
    coords = np.indices(shape.dims, dtype=np.float64).reshape(shape.ndim, -1).T
    total = coords.shape[0]
    out = np.empty((total, model.ndim))
    for start in range(0, total, EVAL_CHUNK):
        stop = min(start + EVAL_CHUNK, total)
        out[start:stop] = _evaluate_at(model, coords[start:stop])
    comps = tuple(out[:, a].reshape(shape.dims) for a in range(model.ndim))
    return VectorField(shape, comps)


def make_case(image: ScalarField, config: SynthConfig):
    """Synthesize one registration case: (source, u_true).

    ``u_true`` comes from control_grid -> perturb -> tps_fit ->
    tps_evaluate and ``source = warp(image, u_true)``, i.e. source(x) =
    image(x + u_true(x)). Registering with ``source`` as the reference and
    ``image`` as the moving input therefore has ``u_true`` as its exact
    data-term minimizer, which is what the harness scores against. The
    image is expected to be normalized to [0, 1] beforehand.
    """
    points = control_grid(image.shape, config.spacing_frac)
    offsets = perturb(points, config.sigma, config.seed)
    model = tps_fit(points, offsets)
    u_true = tps_evaluate(model, image.shape)
    return warp(image, u_true), u_true
