"""Command-line interface.

Subcommands: ``synth`` (make a ground-truth case), ``register`` (estimate a
field), ``eval`` (score an estimate), ``sweep`` (weight-sweep CSV), and
``phantom`` (built-in test images). Every command exits 0 on success and 1
with a one-line diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .fields import (GridShape, MaskField, ScalarField, VectorField,
                     normalize_intensity, read_ndf, write_ndf, write_pgm)
from .harness import (DEFAULT_MASK_TAU, SweepSpec, load_image,
                      load_sweep_spec, mse_paper, rmse, run_sweep,
                      summarize_sweep, threshold_mask, write_sweep_csv)
from .phantoms import blobs, disk, rings
from .solver import MODES, SolverConfig, register
from .tps import SynthConfig, make_case


def _int_list(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _float_list(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _write_image(field: ScalarField, path: Path) -> None:
    if path.suffix.lower() == ".pgm":
        if field.shape.ndim != 2:
            raise ValueError("PGM output requires a 2D image; use .ndf")
        write_pgm(field, path)
    else:
        write_ndf(field, path)


def _read_vector(path) -> VectorField:
    field = read_ndf(path)
    if not isinstance(field, VectorField):
        raise ValueError(f"{path}: expected a vector field, found a scalar image")
    return field


def _cmd_synth(args) -> int:
    image = normalize_intensity(load_image(args.image))
    config = SynthConfig(sigma=args.sigma, spacing_frac=args.spacing_frac,
                         seed=args.seed)
    source, u_true = make_case(image, config)
    prefix = Path(args.out_prefix)
    if prefix.parent != Path(""):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    source_path = prefix.with_name(prefix.name + "_source.ndf")
    field_path = prefix.with_name(prefix.name + "_utrue.ndf")
    meta_path = prefix.with_name(prefix.name + "_meta.json")
    write_ndf(source, source_path)
    write_ndf(u_true, field_path)
    if args.pgm:
        _write_image(source, prefix.with_name(prefix.name + "_source.pgm"))
    meta = {"image": str(args.image), "sigma": args.sigma,
            "spacing_frac": args.spacing_frac, "seed": args.seed,
            "shape": list(image.shape.dims)}
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {source_path} {field_path} {meta_path}")
    return 0


def _cmd_register(args) -> int:
    reference = load_image(args.reference)
    moving = load_image(args.source)
    if args.normalize:
        reference = normalize_intensity(reference)
        moving = normalize_intensity(moving)
    config = SolverConfig(mode=args.mode, w=args.w, gamma=args.gamma,
                          max_iter=args.max_iter, rel_tol=args.tol)
    log_sink = None
    log_handle = None
    if args.log:
        log_handle = open(args.log, "w")
        log_sink = lambda line: print(line, file=log_handle)
    try:
        result = register(reference, moving, None, config, log=log_sink)
    finally:
        if log_handle is not None:
            log_handle.close()
    write_ndf(result.u, args.out)
    if args.result_json:
        payload = {"mode": args.mode, "w": args.w, "gamma": args.gamma,
                   "max_iter": args.max_iter, "rel_tol": args.tol,
                   "iterations": result.iterations,
                   "termination": result.termination,
                   "objective_initial": result.objective_trace[0],
                   "objective_final": result.objective_trace[-1]}
        Path(args.result_json).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"iterations={result.iterations} termination={result.termination} "
          f"objective={result.objective_trace[-1]:.12e}")
    return 0


def _cmd_eval(args) -> int:
    u_true = _read_vector(args.true_field)
    u_est = _read_vector(args.est)
    mask = None
    if args.mask:
        scalar = load_image(args.mask)
        mask = MaskField(scalar.shape, scalar.data > 0.5)
    elif args.image:
        mask = threshold_mask(load_image(args.image), args.tau)
    print(f"rmse={rmse(u_true, u_est, mask)!r}")
    print(f"mse_paper={mse_paper(u_true, u_est, mask)!r}")
    return 0


def _cmd_sweep(args) -> int:
    if args.spec:
        spec = load_sweep_spec(args.spec)
    else:
        required = {"mode": args.mode, "weights": args.weights,
                    "image": args.image, "sigma": args.sigma}
        missing = [name for name, value in required.items() if value is None]
        if missing:
            raise ValueError(
                "without --spec, these flags are required: "
                + ", ".join(f"--{m}" for m in missing))
        seeds = args.seeds
        trials = args.trials
        if seeds is None:
            seeds = tuple(range(trials if trials is not None else 1))
        if trials is None:
            trials = len(seeds)
        spec = SweepSpec(mode=args.mode, weights=args.weights, trials=trials,
                         sigma=args.sigma, spacing_frac=args.spacing_frac,
                         seeds=seeds, image=args.image)
    sink = (lambda line: print(line, file=sys.stderr)) if args.verbose else None
    rows = run_sweep(spec, gamma=args.gamma, max_iter=args.max_iter,
                     rel_tol=args.tol, tau=args.tau, log=sink)
    write_sweep_csv(rows, args.out)
    if args.summary:
        lines = [json.dumps(entry, sort_keys=True) for entry in summarize_sweep(rows)]
        Path(args.summary).write_text("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_phantom(args) -> int:
    shape = GridShape(args.size)
    if args.kind == "disk":
        image = disk(shape)
    elif args.kind == "rings":
        image = rings(shape)
    else:
        image = blobs(shape, seed=args.seed)
    _write_image(image, Path(args.out))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specreg",
        description="Deterministic non-rigid registration with adaptive "
                    "spectral regularization.")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="synthesize a ground-truth case")
    synth.add_argument("--image", required=True, help="input image (.ndf/.pgm)")
    synth.add_argument("--sigma", type=float, required=True,
                       help="control-point perturbation std, voxels")
    synth.add_argument("--spacing-frac", type=float, default=0.15)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--pgm", action="store_true",
                       help="also write the deformed image as PGM (2D only)")
    synth.add_argument("--out-prefix", required=True)
    synth.set_defaults(func=_cmd_synth)

    reg = sub.add_parser("register", help="register a source onto a reference")
    reg.add_argument("--reference", required=True, help="fixed image")
    reg.add_argument("--source", required=True,
                     help="moving image, resampled toward the reference")
    reg.add_argument("--mode", choices=MODES, default="adaptive")
    reg.add_argument("-w", type=float, default=1.0, help="regularization weight")
    reg.add_argument("--gamma", type=float, default=0.2, help="step size")
    reg.add_argument("--max-iter", type=int, default=1000)
    reg.add_argument("--tol", type=float, default=1e-8,
                     help="relative objective-change tolerance")
    reg.add_argument("--normalize", action="store_true",
                     help="rescale both images to [0, 1] before registering")
    reg.add_argument("--out", required=True, help="estimated field (.ndf)")
    reg.add_argument("--result-json", default=None)
    reg.add_argument("--log", default=None, help="per-iteration log file")
    reg.set_defaults(func=_cmd_register)

    ev = sub.add_parser("eval", help="score an estimated field")
    ev.add_argument("--true", dest="true_field", required=True,
                    help="ground-truth field (.ndf)")
    ev.add_argument("--est", required=True, help="estimated field (.ndf)")
    ev.add_argument("--mask", default=None,
                    help="mask image (.ndf/.pgm), nonzero = included")
    ev.add_argument("--image", default=None,
                    help="build the mask by thresholding this image")
    ev.add_argument("--tau", type=float, default=DEFAULT_MASK_TAU)
    ev.set_defaults(func=_cmd_eval)

    sweep = sub.add_parser("sweep", help="run a weight sweep, write CSV")
    sweep.add_argument("--spec", default=None, help="sweep spec JSON file")
    sweep.add_argument("--mode", choices=MODES, default=None)
    sweep.add_argument("--weights", type=_float_list, default=None,
                       help="comma-separated weights")
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument("--sigma", type=float, default=None)
    sweep.add_argument("--spacing-frac", type=float, default=0.15)
    sweep.add_argument("--seeds", type=_int_list, default=None,
                       help="comma-separated seeds (default: 0..trials-1)")
    sweep.add_argument("--image", default=None)
    sweep.add_argument("--gamma", type=float, default=0.2)
    sweep.add_argument("--max-iter", type=int, default=1000)
    sweep.add_argument("--tol", type=float, default=1e-8)
    sweep.add_argument("--tau", type=float, default=DEFAULT_MASK_TAU)
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--summary", default=None,
                       help="also write per-weight medians (JSON lines)")
    sweep.add_argument("--verbose", action="store_true",
                       help="progress lines on stderr")
    sweep.set_defaults(func=_cmd_sweep)

    ph = sub.add_parser("phantom", help="generate a built-in test image")
    ph.add_argument("--kind", choices=("disk", "rings", "blobs"), required=True)
    ph.add_argument("--size", type=_int_list, required=True,
                    help="comma-separated axis sizes, e.g. 64,64")
    ph.add_argument("--seed", type=int, default=0)
    ph.add_argument("--out", required=True, help="output image (.ndf/.pgm)")
    ph.set_defaults(func=_cmd_phantom)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as failure:
        print(f"error: {failure}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
