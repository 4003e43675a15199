"""``dalescope`` command line.

Exit status is 0 on success, 1 when input data is bad or a check fails,
and 2 for usage mistakes (unknown operation, missing reference, bad flags).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .components import label_components
from .engine import SCHEDULE_KINDS, Schedule, border_seeds, run_fixpoint, run_slope_ray, run_waterfall
from .features import DEFAULT_MIN_DALE_AREA, describe_image
from .fixtures import DATA_FILES, data_path
from .grid import BorderPolicy, Grid, UsageError, diff_directional, pointwise
from .kernels import kernel_names, lookup_kernel
from .pgm import PGMError, read_pgm, write_pgm
from .pipelines import DEFAULT_MARGIN, PIPELINES, lookup_pipeline, run_pipeline, write_pipeline

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2

SPECIAL_OPS = ("waterfall", "slope_ray", "diff", "minus_sat", "xor_mask", "threshold", "amplify", "box_blur")

# default bundled input per pipeline
PIPELINE_FIXTURES = {
    "alphabet": "glyph_sheet.pgm",
    "hieroglyph": "hieroglyph.pgm",
    "face": "face.pgm",
    "waterfall-border": "gradient.pgm",
}


class DataError(Exception):
    pass


def _load(path, levels: int | None = None) -> Grid:
    try:
        g = read_pgm(path)
    except (OSError, PGMError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if levels is not None and levels != g.levels:
        if levels < 2:
            raise UsageError(f"--levels must be at least 2, got {levels}")
        if g.max_level >= levels:
            raise DataError(f"{path} holds value {g.max_level}, which does not fit in {levels} levels")
        g = Grid(g.cells, levels)
    return g


def _save(path, g: Grid) -> None:
    try:
        write_pgm(path, g)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def cmd_apply(args) -> int:
    g = _load(args.input, args.levels)
    ref = _load(args.ref, g.levels) if args.ref else None
    border = BorderPolicy(args.border)
    op = args.op
    stats = None
    if op in SPECIAL_OPS:
        if op == "waterfall":
            out, stats = run_waterfall(ref if ref is not None else g, border_seeds(g.shape))
        elif op == "slope_ray":
            out = run_slope_ray(g, peak=args.arg if args.arg is not None else 5)
        elif op == "diff":
            out = diff_directional(g, args.arg if args.arg is not None else 6, border)
        elif op in ("minus_sat", "xor_mask"):
            if ref is None:
                raise UsageError(f"{op} needs a second image via --ref")
            out = pointwise(g, ref, op)
        else:
            if args.arg is None:
                raise UsageError(f"{op} needs --arg")
            out = pointwise(g, None, op, args.arg)
    else:
        try:
            schema = lookup_kernel(op)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        if schema.needs_ref and ref is None:
            raise UsageError(f"{op} is guarded; pass the reference image with --ref")
        out, stats = run_fixpoint(g, schema, ref=ref, schedule=Schedule(args.schedule, args.seed), border=border)
    _save(args.output, out)
    _print_json(stats.to_json() if stats is not None else {"op": op})
    if stats is not None and not stats.converged:
        print("warning: pass bound reached before convergence", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_pipeline(args) -> int:
    lookup_pipeline(args.name)
    src = args.input or data_path(PIPELINE_FIXTURES[args.name])
    g = _load(src, args.levels)
    results = run_pipeline(args.name, g, margin=args.margin)
    try:
        manifest = write_pipeline(args.name, results, args.out_dir, source_path=src)
    except OSError as exc:
        raise DataError(f"cannot write to {args.out_dir}: {exc}") from None
    for r in results:
        mark = "ok " if r.ok else "BAD"
        print(f"{mark} {r.spec.filename} passes={r.stats.passes} updates={r.stats.cell_updates}")
    print(f"manifest: {manifest}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_DATA


def cmd_describe(args) -> int:
    g = _load(args.input, args.levels)
    _print_json([d.to_json() for d in describe_image(g, args.min_dale_area)])
    return EXIT_OK


def cmd_label(args) -> int:
    g = _load(args.input, args.levels)
    cm = label_components(g, args.connectivity, args.background)
    if args.output:
        _save(args.output, cm.label_grid())
    _print_json(cm.to_json())
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok, _ = run_selftest(quick=args.quick, out_dir=args.out_dir)
    return EXIT_OK if ok else EXIT_DATA


def cmd_kernels(args) -> int:
    for name in kernel_names(include_aliases=args.aliases):
        k = lookup_kernel(name)
        wins = " ".join("{" + ",".join(map(str, w)) + "}" for w in k.windows)
        print(f"{name:28s} {k.mode.value:8s} {k.guard.value:7s} {wins}")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    for name, make in DATA_FILES.items():
        _save(os.path.join(args.out_dir, name), make())
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dalescope",
        description="Fixed-point min/max propagation on gray images: hulls, lakes, dales.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    levels = argparse.ArgumentParser(add_help=False)
    levels.add_argument("--levels", type=int, default=None, help="number of gray levels (default: maxval + 1)")

    p = sub.add_parser("apply", parents=[levels], help="run one kernel or image operation")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--op", required=True, help=f"kernel name or one of: {', '.join(SPECIAL_OPS)}")
    p.add_argument("--ref", help="reference image for guarded kernels, or second operand")
    p.add_argument("--border", type=int, default=0, help="value read outside the image (default 0)")
    p.add_argument("--schedule", choices=[k for k in SCHEDULE_KINDS if k != "synchronous"], default="raster")
    p.add_argument("--seed", type=int, default=0, help="seed for --schedule random")
    p.add_argument("--arg", type=int, default=None, help="parameter for threshold/amplify/box_blur/diff/slope_ray")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("pipeline", parents=[levels], help="run a named multi-stage cascade")
    p.add_argument("name", choices=sorted(PIPELINES))
    p.add_argument("input", nargs="?", help="input PGM (default: the bundled fixture)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--margin", type=int, default=DEFAULT_MARGIN, help="background padding around the image")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("describe", parents=[levels], help="lake/dale descriptor per glyph")
    p.add_argument("input")
    p.add_argument("--min-dale-area", type=int, default=DEFAULT_MIN_DALE_AREA)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("label", parents=[levels], help="connected components")
    p.add_argument("input")
    p.add_argument("--connectivity", choices=["4", "x", "8"], default="8")
    p.add_argument("--background", type=int, default=0)
    p.add_argument("--output", help="write the label raster as PGM")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("selftest", help="oracle sweeps and property checks")
    p.add_argument("--quick", action="store_true", help="thin the exhaustive sweeps")
    p.add_argument("--out-dir", default="selftest_failures", help="where counterexamples go")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("kernels", help="list the kernel catalog")
    p.add_argument("--aliases", action="store_true")
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("fixtures", help="write the bundled test images")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dalescope: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"dalescope: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
