"""Frequency-domain regularization machinery.

Everything here operates on per-frequency eigenvalue arrays; no covariance
matrix is ever materialized. The model spectrum ``k`` holds the eigenvalues
of the discrete zero-flux Laplacian (separable sums of the 1D values). The
model prior penalizes the squared Laplacian, so its inverse-covariance
eigenvalues are ``k**2``; wherever those are meant below they are written
as ``k**2`` explicitly, while the plain ``k`` array is what enters the
per-iteration filter.

Given the displacement spectra of the current iterate, the prior eigenvalues
that minimize the joint objective have the closed form ``lambda = k / mag``
where ``mag`` is the across-component coefficient magnitude. Substituting
them back collapses the quadratic-plus-trace regularizer into the weighted
L1 penalty ``sum(k * mag)``, which is what ``adaptive_penalty`` reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dct import SpectralField
from .fields import GridShape, ShapeMismatchError

#: Default magnitude guard: 64-bit machine epsilon.
DEFAULT_EPS = float(np.finfo(np.float64).eps)


def _locked(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ModelSpectrum:
    """Laplacian eigenvalues, one per frequency index (unsquared)."""

    shape: GridShape
    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", _locked(self.k))
        if self.k.shape != self.shape.dims:
            raise ShapeMismatchError(
                f"spectrum shape {self.k.shape} != grid {self.shape.dims}")


@dataclass(frozen=True)
class AdaptiveSpectrum:
    """Estimated prior eigenvalues, one per frequency index."""

    shape: GridShape
    lam: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", _locked(self.lam))
        if self.lam.shape != self.shape.dims:
            raise ShapeMismatchError(
                f"spectrum shape {self.lam.shape} != grid {self.shape.dims}")


@dataclass(frozen=True)
class CoefficientMagnitude:
    """Across-component coefficient magnitude per frequency, guarded by eps."""

    shape: GridShape
    mag: np.ndarray
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "mag", _locked(self.mag))
        if self.mag.shape != self.shape.dims:
            raise ShapeMismatchError(
                f"magnitude shape {self.mag.shape} != grid {self.shape.dims}")


def laplacian_eigen_1d(n: int) -> np.ndarray:
    """Eigenvalues 2*(1 - cos(pi*m/n)), m = 0..n-1, of the 1D zero-flux Laplacian.

    Strictly increasing, starting at 0 (the constant mode).
    """
    if n < 2:
        raise ValueError(f"axis length must be >= 2, got {n}")
    return 2.0 * (1.0 - np.cos(np.pi * np.arange(n) / n))


def model_spectrum(shape: GridShape) -> ModelSpectrum:
    """Separable multidimensional eigenvalue array: sums of the 1D values."""
    k = laplacian_eigen_1d(shape.dims[0])
    for n in shape.dims[1:]:
        k = np.add.outer(k, laplacian_eigen_1d(n))
    return ModelSpectrum(shape, k)


def coefficient_magnitude(spectra: Sequence[SpectralField],
                          eps: float = DEFAULT_EPS) -> CoefficientMagnitude:
    """Per-frequency magnitude coupled across displacement components.

    Computes sqrt(sum_c coef_c^2 + eps); the additive guard keeps every
    entry at least sqrt(eps) so downstream divisions are safe.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if not spectra:
        raise ValueError("need at least one component spectrum")
    shape = spectra[0].shape
    for s in spectra[1:]:
        if s.shape != shape:
            raise ShapeMismatchError("component spectra on different grids")
    total = np.full(shape.dims, eps)
    for s in spectra:
        total = total + s.coefficients ** 2
    return CoefficientMagnitude(shape, np.sqrt(total), eps)


def solve_lambda(model: ModelSpectrum, mag: CoefficientMagnitude) -> AdaptiveSpectrum:
    """Closed-form prior eigenvalues for the current coefficient magnitudes.

    Per frequency the joint objective term is
    ``0.5*lambda*mag**2 + 0.5*k**2/lambda`` and its minimizer is
    ``lambda = k / mag``; positivity is automatic away from the constant
    mode, where k = 0 leaves that direction unpenalized.
    """
    if model.shape != mag.shape:
        raise ShapeMismatchError("model spectrum and magnitudes on different grids")
    return AdaptiveSpectrum(model.shape, model.k / mag.mag)


def adaptive_penalty(spectra: Sequence[SpectralField], model: ModelSpectrum) -> float:
    """Weighted-L1 regularizer value: sum_i k_i * sqrt(sum_c coef_c,i^2).

    Reported at eps = 0 so a zero field scores exactly zero.
    """
    shape = spectra[0].shape
    if model.shape != shape:
        raise ShapeMismatchError("model spectrum and spectra on different grids")
    for s in spectra[1:]:
        if s.shape != shape:
            raise ShapeMismatchError("component spectra on different grids")
    total = spectra[0].coefficients ** 2
    for s in spectra[1:]:
        total = total + s.coefficients ** 2
    return float(np.sum(model.k * np.sqrt(total)))


def quadratic_penalty(spectra: Sequence[SpectralField], model: ModelSpectrum) -> float:
    """Squared-Laplacian regularizer value: sum_i k_i^2 * sum_c coef_c,i^2."""
    shape = spectra[0].shape
    if model.shape != shape:
        raise ShapeMismatchError("model spectrum and spectra on different grids")
    total = spectra[0].coefficients ** 2
    for s in spectra[1:]:
        if s.shape != shape:
            raise ShapeMismatchError("component spectra on different grids")
        total = total + s.coefficients ** 2
    return float(np.sum(model.k ** 2 * total))


def kl_spectra(adaptive: AdaptiveSpectrum, model: ModelSpectrum) -> float:
    """Divergence between the estimated and model priors, spectral form.

    For commuting Gaussians this is
    ``0.5 * sum_i (k_i^2/lambda_i - log k_i^2 + log lambda_i - 1)``
    over frequencies with k > 0. The constant mode is excluded: both priors
    are flat (improper) along it, so it carries no divergence.
    """
    if adaptive.shape != model.shape:
        raise ShapeMismatchError("spectra on different grids")
    include = model.k > 0.0
    lam = adaptive.lam[include]
    ksq = model.k[include] ** 2
    if np.any(lam <= 0.0):
        raise ValueError("non-positive eigenvalue among the penalized frequencies")
    return float(0.5 * np.sum(ksq / lam - np.log(ksq) + np.log(lam) - 1.0))


def adaptive_filter_gains(mag: CoefficientMagnitude, model: ModelSpectrum,
                          gamma: float, w: float) -> np.ndarray:
    """Signal-dependent per-frequency gains mag / (mag + gamma*w*k).

    Every gain lies in (0, 1]; the constant mode (k = 0) passes unchanged.
    Recomputed each iteration from the current displacement spectra, this is
    a shrinkage filter of the same form as a Wiener filter with noise power
    gamma*w*k.
    """
    if gamma <= 0 or w <= 0:
        raise ValueError(f"gamma and w must be positive, got {gamma}, {w}")
    if mag.shape != model.shape:
        raise ShapeMismatchError("magnitudes and model spectrum on different grids")
    return mag.mag / (mag.mag + gamma * w * model.k)


def quadratic_filter_gains(model: ModelSpectrum, gamma: float, w: float) -> np.ndarray:
    """Fixed low-pass gains 1 / (1 + gamma*w*k^2), independent of the iterate."""
    if gamma <= 0 or w <= 0:
        raise ValueError(f"gamma and w must be positive, got {gamma}, {w}")
    return 1.0 / (1.0 + gamma * w * model.k ** 2)
