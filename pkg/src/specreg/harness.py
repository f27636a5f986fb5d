"""Evaluation metrics, threshold masking, and the weight-sweep driver.

The sweep synthesizes one case per (weight, seed) pair, registers it from
the zero field, and scores displacement error inside the threshold mask of
the reference image. Rows come out in deterministic (weight, seed) order
and the canonical CSV excludes wall time, so a repeated run of the same
spec is byte-identical.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.ndimage import binary_closing

from .fields import (GridShape, MaskField, ScalarField, ShapeMismatchError,
                     VectorField, normalize_intensity, read_ndf, read_pgm)
from .solver import MODES, SolverConfig, register
from .tps import SynthConfig, make_case

#: Canonical CSV column order. wall_time_seconds stays off this list on
#: purpose: it is measurement noise and would break rerun byte-identity.
CSV_COLUMNS = ("mode", "w", "seed", "initial_rmse", "final_rmse",
               "iterations", "termination")

DEFAULT_MASK_TAU = 0.1


def _squared_residual(u_true: VectorField, u_est: VectorField) -> np.ndarray:
    if u_true.shape != u_est.shape:
        raise ShapeMismatchError(
            f"fields on different grids: {u_true.shape.dims} vs {u_est.shape.dims}")
    sq = np.zeros(u_true.shape.dims)
    for t, e in zip(u_true.components, u_est.components):
        d = t - e
        sq += d * d
    return sq


def _masked_mean(sq: np.ndarray, ndim: int, mask: Optional[MaskField],
                 shape: GridShape) -> float:
    if mask is not None:
        if mask.shape != shape:
            raise ShapeMismatchError("mask on a different grid")
        picked = sq[mask.data]
        if picked.size == 0:
            raise ValueError("mask selects no voxels")
        return float(np.sum(picked)) / (ndim * picked.size)
    return float(np.sum(sq)) / (ndim * sq.size)


def rmse(u_true: VectorField, u_est: VectorField,
         mask: Optional[MaskField] = None) -> float:
    """Root-mean-square displacement error per component, in voxels.

    sqrt( sum over masked voxels of |u_true - u_est|^2 / (d * N_in) ).
    """
    sq = _squared_residual(u_true, u_est)
    return float(np.sqrt(_masked_mean(sq, u_true.shape.ndim, mask, u_true.shape)))


def mse_paper(u_true: VectorField, u_est: VectorField,
              mask: Optional[MaskField] = None) -> float:
    """Mean squared displacement error (no square root): rmse ** 2.

    Both normalizations are in common use for displacement-error tables;
    rmse is the default reporting metric here since it reads directly in
    voxels.
    """
    sq = _squared_residual(u_true, u_est)
    return _masked_mean(sq, u_true.shape.ndim, mask, u_true.shape)


def threshold_mask(image: ScalarField, tau: float = DEFAULT_MASK_TAU) -> MaskField:
    """Foreground mask: image > tau, then one morphological closing pass.

    The closing (full 3^d neighborhood) fills pinholes left by the raw
    threshold. The array is edge-padded before closing so border voxels
    are not eroded by the implicit zero outside the grid.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    raw = image.data > tau
    structure = np.ones((3,) * image.shape.ndim, dtype=bool)
    padded = np.pad(raw, 1, mode="edge")
    closed = binary_closing(padded, structure=structure)
    inner = tuple(slice(1, -1) for _ in range(image.shape.ndim))
    return MaskField(image.shape, closed[inner])


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a mode, its weight range, and the synthesis parameters."""

    mode: str
    weights: tuple
    trials: int
    sigma: float
    spacing_frac: float
    seeds: tuple
    image: str

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.weights:
            raise ValueError("weights must be non-empty")
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"weights must be positive, got {self.weights}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if len(self.seeds) != self.trials:
            raise ValueError(
                f"{len(self.seeds)} seeds for {self.trials} trials")

    def to_json(self) -> str:
        payload = {"mode": self.mode, "weights": list(self.weights),
                   "trials": self.trials, "sigma": self.sigma,
                   "spacing_frac": self.spacing_frac,
                   "seeds": list(self.seeds), "image": self.image}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_sweep_spec(path) -> SweepSpec:
    payload = json.loads(Path(path).read_text())
    try:
        return SweepSpec(mode=payload["mode"],
                         weights=tuple(payload["weights"]),
                         trials=int(payload["trials"]),
                         sigma=float(payload["sigma"]),
                         spacing_frac=float(payload["spacing_frac"]),
                         seeds=tuple(payload["seeds"]),
                         image=str(payload["image"]))
    except KeyError as missing:
        raise ValueError(f"{path}: sweep spec is missing key {missing}") from None


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one registration trial.

    ``wall_time_seconds`` is informational only and never serialized into
    the canonical CSV. On a failed trial ``termination`` records the
    error class and ``final_rmse`` is NaN; the finiteness expectation
    applies to rows that completed.
    """

    mode: str
    w: float
    seed: int
    initial_rmse: float
    final_rmse: float
    iterations: int
    termination: str
    wall_time_seconds: float


def load_image(path) -> ScalarField:
    """Read a scalar image from .pgm or .ndf by extension."""
    p = Path(path)
    if p.suffix.lower() == ".pgm":
        return read_pgm(p)
    field = read_ndf(p)
    if not isinstance(field, ScalarField):
        raise ValueError(f"{path}: expected a scalar image, found a vector field")
    return field


def run_sweep(spec: SweepSpec, gamma: float = 0.2, max_iter: int = 1000,
              rel_tol: float = 1e-8, tau: float = DEFAULT_MASK_TAU,
              log=None) -> list:
    """Synthesize, register, and score every (weight, seed) pair.

    The deformed image acts as the registration reference and the original
    image as the moving input, so the field that generated the case is the
    exact minimizer the solver is asked to recover (see tps.make_case).
    Per-trial failures are recorded in the row's termination field and
    never abort the sweep. Output is a pure function of the arguments.
    """
    image = normalize_intensity(load_image(spec.image))
    zero = VectorField.zeros(image.shape)
    rows = []
    for w in spec.weights:
        for seed in spec.seeds:
            synth = SynthConfig(sigma=spec.sigma,
                                spacing_frac=spec.spacing_frac, seed=seed)
            source, u_true = make_case(image, synth)
            mask = threshold_mask(source, tau)
            initial = rmse(u_true, zero, mask)
            config = SolverConfig(mode=spec.mode, w=w, gamma=gamma,
                                  max_iter=max_iter, rel_tol=rel_tol)
            started = time.perf_counter()
            try:
                result = register(source, image, zero, config)
                final = rmse(u_true, result.u, mask)
                iterations = result.iterations
                termination = result.termination
            except Exception as failure:  # recorded, sweep continues
                final = float("nan")
                iterations = 0
                termination = f"error:{type(failure).__name__}"
            wall = time.perf_counter() - started
            row = SweepRow(mode=spec.mode, w=float(w), seed=int(seed),
                           initial_rmse=initial, final_rmse=final,
                           iterations=iterations, termination=termination,
                           wall_time_seconds=wall)
            rows.append(row)
            if log is not None:
                log(f"w={row.w:g} seed={row.seed} initial={row.initial_rmse:.4f} "
                    f"final={row.final_rmse:.4f} iters={row.iterations} "
                    f"termination={row.termination}")
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    """Write rows in the canonical column order (RFC 4180, LF endings).

    Floats are serialized with repr (shortest round-trip form), so equal
    inputs produce byte-identical files on every platform.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([row.mode, repr(float(row.w)), row.seed,
                             repr(float(row.initial_rmse)),
                             repr(float(row.final_rmse)),
                             row.iterations, row.termination])


def summarize_sweep(rows: Sequence[SweepRow]) -> list:
    """Median and quartiles of final RMSE per (mode, weight).

    Failed trials (non-finite final RMSE) are dropped from the statistics;
    ``completed`` reports how many rows survived.
    """
    grouped = {}
    for row in rows:
        grouped.setdefault((row.mode, row.w), []).append(row)
    summary = []
    for (mode, w), bucket in sorted(grouped.items()):
        finals = np.array([r.final_rmse for r in bucket
                           if np.isfinite(r.final_rmse)])
        initials = np.array([r.initial_rmse for r in bucket])
        entry = {"mode": mode, "w": w, "trials": len(bucket),
                 "completed": int(finals.size)}
        if finals.size:
            q1, med, q3 = np.percentile(finals, [25.0, 50.0, 75.0])
            entry.update(median_initial_rmse=float(np.median(initials)),
                         median_final_rmse=float(med),
                         q1_final_rmse=float(q1), q3_final_rmse=float(q3))
        summary.append(entry)
    return summary
