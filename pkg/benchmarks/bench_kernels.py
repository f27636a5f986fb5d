#!/usr/bin/env python3
"""Timing comparison of the numba and numpy interpolation backends.

Measures the two hot kernels (warp, SSD gradient) on square 2D grids and a
small 3D grid, plus the cosine transform for context (the transform always
goes through scipy.fft and is backend-independent).

Run:  python3 benchmarks/bench_kernels.py [--repeats N] [--sizes 64,128,256]
"""

import argparse
import time

import numpy as np

import specreg as sr
from specreg import backend
from specreg.similarity import _sample, _warp_coords


def time_call(fn, repeats):
    fn()  # warmup: JIT compilation and cache effects land here
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_case(dims, repeats):
    rng = np.random.Generator(np.random.Philox(0))
    image = sr.ScalarField.from_array(rng.random(dims))
    reference = sr.ScalarField.from_array(rng.random(dims))
    u = sr.VectorField.from_arrays(
        [rng.uniform(-2.0, 2.0, size=dims) for _ in range(len(dims))])
    coords = _warp_coords(u)

    label = "x".join(str(d) for d in dims)
    rows = []
    results = {}
    for name in ("numpy", "numba"):
        kmod = backend.kernels(name)
        t_warp = time_call(lambda: _sample(image.data, coords, kmod), repeats)
        results[name] = t_warp
        rows.append((label, name, "warp", t_warp))

    # full gradient includes d+1 samples and the residual product; time it
    # through the public API under each forced backend
    grad_results = {}
    for name in ("numpy", "numba"):
        kmod = backend.kernels(name)

        def gradient():
            res = _sample(image.data, coords, kmod) - reference.data
            for g in np.gradient(image.data):
                (res * _sample(np.ascontiguousarray(g), coords, kmod)).sum()

        t = time_call(gradient, repeats)
        grad_results[name] = t
        rows.append((label, name, "ssd_gradient", t))

    t_dct = time_call(lambda: sr.idct_nd(sr.dct_nd(image.data)), repeats)
    rows.append((label, "scipy.fft", "dct round trip", t_dct))
    return rows, results["numpy"] / results["numba"], \
        grad_results["numpy"] / grad_results["numba"]


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--sizes", default="64,128,256",
                        help="comma-separated square 2D sizes")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    cases = [(n, n) for n in sizes] + [(48, 48, 48)]

    print(f"active backend by default: {backend.active_backend()}")
    header = f"best of {args.repeats} (ms)"
    print(f"{'grid':>12} {'backend':>10} {'kernel':>16} {header:>20}")
    for dims in cases:
        rows, warp_speedup, grad_speedup = bench_case(dims, args.repeats)
        for label, name, kernel, seconds in rows:
            print(f"{label:>12} {name:>10} {kernel:>16} {1e3 * seconds:>20.3f}")
        print(f"{'':>12} numba speedup: warp {warp_speedup:.2f}x, "
              f"gradient {grad_speedup:.2f}x")


if __name__ == "__main__":
    main()
