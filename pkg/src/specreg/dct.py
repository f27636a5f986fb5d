"""Orthonormal multidimensional cosine transform.

The forward transform projects onto the separable basis whose vectors along
an axis of length N are ``b_k[j] = s_k * cos(pi*k*(j+1/2)/N)`` with
``s_0 = sqrt(1/N)`` and ``s_k = sqrt(2/N)`` for k >= 1. These vectors are
the eigenvectors of the discrete Laplacian under zero-flux (Neumann)
boundaries, which is what makes the frequency-domain solver work. The basis
is orthonormal, so the inverse is the exact transpose and round trips are
lossless to machine precision.

Transforms run in O(N log N) via scipy.fft and are single-threaded, hence
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .fields import GridShape, ScalarField, ShapeMismatchError


def dct_nd(arr: np.ndarray) -> np.ndarray:
    """Forward orthonormal cosine transform of a raw array."""
    return _fft.dctn(arr, type=2, norm="ortho")


def idct_nd(arr: np.ndarray) -> np.ndarray:
    """Inverse (transpose) of ``dct_nd``."""
    return _fft.idctn(arr, type=2, norm="ortho")


@dataclass(frozen=True)
class DctPlan:
    """Transform plan bound to one grid shape.

    scipy.fft manages twiddle caches internally, so the plan only pins the
    shape contract: transforms through a plan reject fields of any other
    shape.
    """

    shape: GridShape


@dataclass(frozen=True)
class SpectralField:
    """Cosine-basis coefficients of a scalar field, one per frequency index."""

    shape: GridShape
    coefficients: np.ndarray

    def __post_init__(self):
        coef = np.array(self.coefficients, dtype=np.float64, order="C")
        coef.flags.writeable = False
        object.__setattr__(self, "coefficients", coef)
        if coef.shape != self.shape.dims:
            raise ShapeMismatchError(
                f"coefficients shape {coef.shape} != grid {self.shape.dims}")


def plan_for(shape: GridShape) -> DctPlan:
    return DctPlan(shape)


def forward_dct(plan: DctPlan, field: ScalarField) -> SpectralField:
    if field.shape != plan.shape:
        raise ShapeMismatchError(
            f"field grid {field.shape.dims} != plan grid {plan.shape.dims}")
    return SpectralField(plan.shape, dct_nd(field.data))


def inverse_dct(plan: DctPlan, spec: SpectralField) -> ScalarField:
    if spec.shape != plan.shape:
        raise ShapeMismatchError(
            f"spectrum grid {spec.shape.dims} != plan grid {plan.shape.dims}")
    return ScalarField(plan.shape, idct_nd(spec.coefficients))


def basis_matrix(n: int) -> np.ndarray:
    """Dense orthonormal 1D basis matrix (row k = basis vector k).

    Quadratic cost; intended for small-N oracles and diagnostics, not for
    transforming data.
    """
    j = np.arange(n)
    q = np.zeros((n, n))
    for k in range(n):
        s = np.sqrt(1.0 / n) if k == 0 else np.sqrt(2.0 / n)
        q[k] = s * np.cos(np.pi * k * (j + 0.5) / n)
    return q
