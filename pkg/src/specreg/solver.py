"""Semi-implicit registration iteration with frequency-domain filtering.

Each step is explicit in the similarity term and implicit in the
regularizer: take a gradient step on the SSD, then apply a per-frequency
gain in the cosine basis. In adaptive mode the gains are recomputed every
iteration from the current displacement spectra; in quadratic mode they are
the fixed low-pass of the squared-Laplacian prior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dct import SpectralField, dct_nd, forward_dct, idct_nd, plan_for
from .fields import ScalarField, ShapeMismatchError, VectorField
from .similarity import ssd, ssd_gradient, warp
from .spectrum import (DEFAULT_EPS, ModelSpectrum, adaptive_filter_gains,
                       adaptive_penalty, coefficient_magnitude,
                       model_spectrum, quadratic_filter_gains,
                       quadratic_penalty)

MODES = ("adaptive", "quadratic")

#: Rejected-step retries (step halvings) before giving up on an iteration.
MAX_STEP_RETRIES = 10

#: Denominator floor for the relative objective-change test.
REL_CHANGE_FLOOR = 1e-30


class NonFiniteObjectiveError(RuntimeError):
    """The objective evaluated to NaN or infinity."""


@dataclass(frozen=True)
class SolverConfig:
    """Iteration mode and knobs; every numeric field must be positive."""

    mode: str = "adaptive"
    w: float = 1.0
    gamma: float = 0.2
    eps: float = DEFAULT_EPS
    max_iter: int = 1000
    rel_tol: float = 1e-8
    step_safeguard: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("w", "gamma", "eps", "rel_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class RegistrationResult:
    """Final field plus the objective trace of the accepted iterates.

    The trace has ``iterations + 1`` entries (the initial value included);
    with the safeguard on it is non-increasing. ``termination`` is one of
    ``max_iter``, ``tolerance``, ``stalled``.
    """

    u: VectorField
    objective_trace: tuple
    iterations: int
    termination: str


def _penalty(mode: str, spectra, model: ModelSpectrum, w: float) -> float:
    if mode == "adaptive":
        return adaptive_penalty(spectra, model)
    return w * quadratic_penalty(spectra, model)


def _objective_value(reference: ScalarField, moving: ScalarField,
                     u: VectorField, spectra, model: ModelSpectrum,
                     config: SolverConfig) -> float:
    data = ssd(reference, warp(moving, u))
    if config.mode == "adaptive":
        return data / config.w + _penalty(config.mode, spectra, model, config.w)
    return data + _penalty(config.mode, spectra, model, config.w)


def _component_spectra(u: VectorField):
    plan = plan_for(u.shape)
    return [forward_dct(plan, ScalarField(u.shape, c)) for c in u.components]


def objective(reference: ScalarField, moving: ScalarField, u: VectorField,
              config: SolverConfig) -> float:
    """Mode-consistent objective value.

    Adaptive mode scores ``ssd/w + sum(k * mag)``; quadratic mode scores
    ``ssd + w * sum(k^2 * coef^2)``. The two are used only for their own
    stopping tests and are not comparable across modes.
    """
    if reference.shape != u.shape or moving.shape != u.shape:
        raise ShapeMismatchError("images and field on different grids")
    model = model_spectrum(u.shape)
    return _objective_value(reference, moving, u, _component_spectra(u),
                            model, config)


def _gains(config: SolverConfig, gamma: float, model: ModelSpectrum, mag):
    if config.mode == "adaptive":
        return adaptive_filter_gains(mag, model, gamma, config.w)
    return quadratic_filter_gains(model, gamma, config.w)


def step(reference: ScalarField, moving: ScalarField, u_t: VectorField,
         config: SolverConfig) -> VectorField:
    """One semi-implicit update of the displacement field.

    Sequence: SSD gradient at the current iterate, explicit step
    ``v = u - gamma * g``, forward transform of each component of v,
    elementwise multiplication by the gain array (the same array for every
    component; adaptive gains come from the magnitudes of the CURRENT
    iterate's spectra, not the post-step intermediate), inverse transform.
    """
    if reference.shape != u_t.shape or moving.shape != u_t.shape:
        raise ShapeMismatchError("images and field on different grids")
    model = model_spectrum(u_t.shape)
    if config.mode == "adaptive":
        mag = coefficient_magnitude(_component_spectra(u_t), config.eps)
    else:
        mag = None
    gains = _gains(config, config.gamma, model, mag)
    grad = ssd_gradient(reference, moving, u_t)
    comps = []
    for c, g in zip(u_t.components, grad.components):
        v = c - config.gamma * g
        comps.append(idct_nd(gains * dct_nd(v)))
    return VectorField(u_t.shape, tuple(comps))


def register(reference: ScalarField, moving: ScalarField,
             u0: Optional[VectorField] = None,
             config: SolverConfig = SolverConfig(),
             log: Optional[Callable[[str], None]] = None) -> RegistrationResult:
    """Iterate semi-implicit steps from ``u0`` until a stopping rule fires.

    Stops at ``max_iter`` iterations or when the relative objective change
    drops below ``rel_tol``. With the safeguard on, a step that increases
    the objective is rejected and the step size halved (up to
    ``MAX_STEP_RETRIES`` retries, then termination is ``stalled``); a
    halved step size persists for later iterations. ``log``, when given,
    receives one plain-text record per accepted iteration.

    The result is a pure function of the inputs; repeated calls are
    bit-identical.
    """
    if reference.shape != moving.shape:
        raise ShapeMismatchError(
            f"grids differ: {reference.shape.dims} vs {moving.shape.dims}")
    if u0 is None:
        u0 = VectorField.zeros(reference.shape)
    if u0.shape != reference.shape:
        raise ShapeMismatchError("initial field on a different grid")

    shape = reference.shape
    model = model_spectrum(shape)
    u = u0
    spectra = _component_spectra(u0)
    energy = _objective_value(reference, moving, u, spectra, model, config)
    if not np.isfinite(energy):
        raise NonFiniteObjectiveError(
            f"initial objective is {energy!r} (mode={config.mode})")

    gamma = config.gamma
    trace = [energy]
    iterations = 0
    termination = "max_iter"

    while iterations < config.max_iter:
        grad = ssd_gradient(reference, moving, u)
        if config.mode == "adaptive":
            mag = coefficient_magnitude(spectra, config.eps)
        else:
            mag = None

        accepted = False
        gain_min = 1.0
        for _ in range(1 + MAX_STEP_RETRIES):
            gains = _gains(config, gamma, model, mag)
            cand_comps = []
            cand_spectra = []
            for c, g in zip(u.components, grad.components):
                filtered = gains * dct_nd(c - gamma * g)
                cand_spectra.append(SpectralField(shape, filtered))
                cand_comps.append(idct_nd(filtered))
            cand = VectorField(shape, tuple(cand_comps))
            cand_energy = _objective_value(reference, moving, cand,
                                           cand_spectra, model, config)
            if not np.isfinite(cand_energy):
                raise NonFiniteObjectiveError(
                    f"objective became {cand_energy!r} at iteration "
                    f"{iterations + 1} (mode={config.mode}, gamma={gamma})")
            if config.step_safeguard and cand_energy > energy:
                gamma *= 0.5
                continue
            accepted = True
            gain_min = float(np.min(gains))
            break
        if not accepted:
            termination = "stalled"
            break

        previous = energy
        u, spectra, energy = cand, cand_spectra, cand_energy
        iterations += 1
        trace.append(energy)
        if log is not None:
            log(f"iter={iterations} objective={energy:.12e} "
                f"gamma={gamma:.6g} gain_min={gain_min:.6g}")
        if abs(energy - previous) / max(abs(previous), REL_CHANGE_FLOOR) < config.rel_tol:
            termination = "tolerance"
            break

    return RegistrationResult(u=u, objective_trace=tuple(trace),
                              iterations=iterations, termination=termination)
