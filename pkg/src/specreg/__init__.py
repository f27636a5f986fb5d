"""Deterministic non-rigid image registration with adaptive spectral
regularization.

The displacement field is estimated by a semi-implicit iteration that is
explicit in the similarity term and implicit in the regularizer; because
the prior's covariance is diagonalized by the zero-flux cosine basis, the
implicit half-step is an elementwise per-frequency filter. The adaptive
mode re-estimates the prior spectrum from the current iterate each
iteration; the quadratic mode keeps the fixed squared-Laplacian low-pass.
"""

from .backend import ENV_VAR, active_backend, resolve_backend
from .dct import (DctPlan, SpectralField, basis_matrix, dct_nd, forward_dct,
                  idct_nd, inverse_dct, plan_for)
from .fields import (GridShape, MaskField, NdfError, NdfHeaderError,
                     NdfMagicError, NdfTruncatedError, PgmError, ScalarField,
                     ShapeMismatchError, VectorField, normalize_intensity,
                     read_ndf, read_pgm, write_ndf, write_pgm)
from .harness import (CSV_COLUMNS, DEFAULT_MASK_TAU, SweepRow, SweepSpec,
                      load_image, load_sweep_spec, mse_paper, rmse, run_sweep,
                      summarize_sweep, threshold_mask, write_sweep_csv)
from .phantoms import blobs, disk, rings
from .similarity import WarpedImage, image_gradient, ssd, ssd_gradient, warp
from .solver import (MODES, NonFiniteObjectiveError, RegistrationResult,
                     SolverConfig, objective, register, step)
from .spectrum import (DEFAULT_EPS, AdaptiveSpectrum, CoefficientMagnitude,
                       ModelSpectrum, adaptive_filter_gains, adaptive_penalty,
                       coefficient_magnitude, kl_spectra, laplacian_eigen_1d,
                       model_spectrum, quadratic_filter_gains,
                       quadratic_penalty, solve_lambda)
from .tps import (SynthConfig, TpsModel, control_grid, make_case, perturb,
                  tps_evaluate, tps_fit)

__version__ = "0.1.0"

__all__ = [
    "ENV_VAR", "active_backend", "resolve_backend",
    "DctPlan", "SpectralField", "basis_matrix", "dct_nd", "forward_dct",
    "idct_nd", "inverse_dct", "plan_for",
    "GridShape", "MaskField", "NdfError", "NdfHeaderError", "NdfMagicError",
    "NdfTruncatedError", "PgmError", "ScalarField", "ShapeMismatchError",
    "VectorField", "normalize_intensity", "read_ndf", "read_pgm",
    "write_ndf", "write_pgm",
    "CSV_COLUMNS", "DEFAULT_MASK_TAU", "SweepRow", "SweepSpec", "load_image",
    "load_sweep_spec", "mse_paper", "rmse", "run_sweep", "summarize_sweep",
    "threshold_mask", "write_sweep_csv",
    "blobs", "disk", "rings",
    "WarpedImage", "image_gradient", "ssd", "ssd_gradient", "warp",
    "MODES", "NonFiniteObjectiveError", "RegistrationResult", "SolverConfig",
    "objective", "register", "step",
    "DEFAULT_EPS", "AdaptiveSpectrum", "CoefficientMagnitude", "ModelSpectrum",
    "adaptive_filter_gains", "adaptive_penalty", "coefficient_magnitude",
    "kl_spectra", "laplacian_eigen_1d", "model_spectrum",
    "quadratic_filter_gains", "quadratic_penalty", "solve_lambda",
    "SynthConfig", "TpsModel", "control_grid", "make_case", "perturb",
    "tps_evaluate", "tps_fit",
    "__version__",
]
