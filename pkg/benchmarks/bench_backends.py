"""Time the fixpoint engine on its execution paths.

    python benchmarks/bench_backends.py [--size 96] [--small 24] [--repeat 3]

Paths compared, all returning the same grid (checked before printing):

* numba raster: jitted in-place row-major sweeps, the canonical schedule
* numba worklist: jitted, re-examines only neighbors of changed cells
* numpy sync: double-buffered vectorized rounds (what ``DALESCOPE_BACKEND=numpy`` uses for raster)
* python: the sweep source run uncompiled, in a child process with
  ``DALESCOPE_BACKEND=numpy`` so nothing is jitted; measured on the small grid
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from dalescope.engine import Schedule, run_fixpoint
from dalescope.fixtures import smooth_face
from dalescope.grid import Grid

KERNELS = [
    ("convex_hull4", False),
    ("convex_hull_oct", False),
    ("expand_1234_1236", False),
    ("minconvex_hull_oct", True),
    ("clean_all8", True),
]


def make_case(size, levels, seed=0):
    rng = np.random.default_rng(seed)
    face = smooth_face(size)
    noise = rng.integers(0, 8, face.shape)
    cells = np.clip(face.cells * (levels - 1) // 255 + noise, 0, levels - 1)
    g = Grid(cells, levels)
    hull, _ = run_fixpoint(g, "convex_hull_oct")
    return g, hull


def start_of(name, guarded, g, hull):
    # guarded kernels shrink a hull back toward the source
    return (hull, g) if guarded else (g, None)


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def python_child(size, levels):
    """Runs inside the child process: time every kernel once, uncompiled."""
    g, hull = make_case(size, levels)
    out = {}
    for name, guarded in KERNELS:
        start, ref = start_of(name, guarded, g, hull)
        t, (res, _) = best_time(lambda: run_fixpoint(start, name, ref=ref, schedule=Schedule.reverse()), 1)
        out[name] = {"seconds": t, "cells": res.cells.tolist()}
    json.dump(out, sys.stdout)


def main():
    parser = argparse.ArgumentParser(description="compare fixpoint engine backends")
    parser.add_argument("--size", type=int, default=96)
    parser.add_argument("--small", type=int, default=24, help="grid size for the uncompiled comparison")
    parser.add_argument("--levels", type=int, default=256)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--python-child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.python_child:
        python_child(args.small, args.levels)
        return

    g, hull = make_case(args.size, args.levels)
    sg, shull = make_case(args.small, args.levels)
    for name, guarded in KERNELS:  # warm the jit cache
        s_start, s_ref = start_of(name, guarded, sg, shull)
        for sched in (Schedule.raster(), Schedule.worklist()):
            run_fixpoint(s_start, name, ref=s_ref, schedule=sched)

    env = dict(os.environ, DALESCOPE_BACKEND="numpy")
    child = subprocess.run(
        [sys.executable, __file__, "--python-child", "--small", str(args.small), "--levels", str(args.levels)],
        env=env, capture_output=True, text=True, check=True,
    )
    py = json.loads(child.stdout)

    print(f"grid {args.size}x{args.size}, {args.levels} levels; python column on {args.small}x{args.small}")
    head = f"{'kernel':20s} {'numba raster':>13s} {'numba worklist':>15s} {'numpy sync':>11s}"
    print(head + f" {'python':>10s} {'numba':>9s} {'ratio':>7s}")
    for name, guarded in KERNELS:
        start, ref = start_of(name, guarded, g, hull)
        t_r, (a, _) = best_time(lambda: run_fixpoint(start, name, ref=ref, backend="numba"), args.repeat)
        t_w, (b, _) = best_time(
            lambda: run_fixpoint(start, name, ref=ref, schedule=Schedule.worklist(), backend="numba"), args.repeat
        )
        t_s, (c, _) = best_time(lambda: run_fixpoint(start, name, ref=ref, backend="numpy"), args.repeat)
        assert a == b == c, f"{name}: backends disagree"

        s_start, s_ref = start_of(name, guarded, sg, shull)
        t_small, (d, _) = best_time(lambda: run_fixpoint(s_start, name, ref=s_ref, backend="numba"), args.repeat)
        assert np.array_equal(np.array(py[name]["cells"]), d.cells), f"{name}: uncompiled run disagrees"
        t_py = py[name]["seconds"]
        print(
            f"{name:20s} {t_r * 1e3:11.2f}ms {t_w * 1e3:13.2f}ms {t_s * 1e3:9.2f}ms"
            f" {t_py * 1e3:8.1f}ms {t_small * 1e3:7.2f}ms {t_py / t_small:6.0f}x"
        )


if __name__ == "__main__":
    main()
