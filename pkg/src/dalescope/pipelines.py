"""Named multi-stage cascades: alphabet, hieroglyph, face and waterfall-border.

A pipeline is an ordered list of stages.  Each stage reads the source image
or earlier stage outputs and is tagged like ``16_2_7`` so output files sort
in cascade order.  Kernel stages run on a copy padded with background so
that nothing grows into the image edge, and every stage is cropped back
before it is stored.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .engine import RunStats, border_seeds, run_fixpoint, run_waterfall
from .grid import Grid, UsageError, amplify, crop, minus_sat, pad, xor_mask
from .kernels import Mode, lookup_kernel
from .pgm import write_pgm

DEFAULT_MARGIN = 2
DEFAULT_AMPLIFY = 4


@dataclass(frozen=True)
class StageSpec:
    tag: str
    label: str
    op: str  # source | fix | minus | xor | amplify | waterfall
    inputs: tuple = ()
    kernels: tuple = ()
    ref: str | None = None
    factor: int = DEFAULT_AMPLIFY

    @property
    def filename(self) -> str:
        return f"{self.tag}_{self.label}.pgm"


@dataclass(frozen=True)
class PipelineSpec:
    name: str
    stages: tuple

    def __post_init__(self):
        seen = set()
        for st in self.stages:
            for name in st.inputs + ((st.ref,) if st.ref else ()):
                if name not in seen:
                    raise UsageError(f"{self.name}: stage {st.tag} reads {name!r} before it exists")
            seen.add(st.tag)


@dataclass
class StageResult:
    spec: StageSpec
    grid: Grid
    stats: RunStats = field(default_factory=RunStats)
    checks: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.stats.converged and all(self.checks.values())

    def to_json(self) -> dict:
        st = self.spec
        return {
            "tag": st.tag,
            "file": st.filename,
            "op": st.op,
            "kernels": list(st.kernels),
            "inputs": list(st.inputs),
            "ref": st.ref,
            "stats": self.stats.to_json(),
            "checks": dict(self.checks),
            "seconds": round(self.seconds, 4),
        }


def _fix(tag, label, src, *kernels, ref=None):
    return StageSpec(tag, label, "fix", (src,), tuple(kernels), ref)


def _minus(tag, label, a, b, factor=1):
    return StageSpec(tag, label, "minus", (a, b), factor=factor)


def _xor(tag, label, a, b):
    return StageSpec(tag, label, "xor", (a, b))


ALPHABET = PipelineSpec("alphabet", (
    StageSpec("15_1", "source", "source"),
    _fix("15_2", "hull", "15_1", "convex_hull_oct"),
    _fix("15_3", "lakes_filled", "15_2", "clean_all8", ref="15_1"),
    _fix("15_4", "dales_down_and_lakes", "15_1", "expand_1234_1236"),
    _fix("15_5", "dales_down_cleaned", "15_4", "clean_46", ref="15_1"),
    _fix("15_6", "dales_right_cleaned", "15_1", "expand_1247_1478", "clean_28", ref="15_1"),
    _fix("15_7", "dales_left_cleaned", "15_1", "expand_2369_3689", "clean_28", ref="15_1"),
))

HIEROGLYPH = PipelineSpec("hieroglyph", (
    StageSpec("16_2_1", "source", "source"),
    _fix("16_2_2", "hull", "16_2_1", "convex_hull_oct"),
    _fix("16_2_3", "minconvex", "16_2_2", "minconvex_hull_oct", ref="16_2_1"),
    _minus("16_2_4", "concavities", "16_2_3", "16_2_1"),
    _fix("16_2_5", "concavities_minconvex", "16_2_4", "convex_hull_oct", "minconvex_hull_oct", ref="16_2_4"),
    _fix("16_2_6", "concavities_cleaned", "16_2_5", "clean_all8", ref="16_2_4"),
    _minus("16_2_7", "lakes", "16_2_6", "16_2_4"),
    _fix("16_2_8a", "fill_down", "16_2_1", "expand_1234_1236"),
    _fix("16_2_9a", "fill_right", "16_2_1", "expand_1247_1478"),
    _fix("16_2_10a", "fill_left", "16_2_1", "expand_2369_3689"),
    _fix("16_2_11a", "fill_up", "16_2_1", "expand_4789_6789"),
    _minus("16_2_8", "dales_down", "16_2_8a", "16_2_1"),
    _minus("16_2_9", "dales_right", "16_2_9a", "16_2_1"),
    _minus("16_2_10", "dales_left", "16_2_10a", "16_2_1"),
    _minus("16_2_11", "dales_up", "16_2_11a", "16_2_1"),
))

FACE = PipelineSpec("face", (
    StageSpec("17_2_1", "source", "source"),
    StageSpec("17_2_2", "waterfall", "waterfall", ("17_2_1",)),
    _minus("17_2_3", "inner", "17_2_1", "17_2_2"),
    _fix("17_2_4", "hull", "17_2_3", "convex_hull_oct"),
    _fix("17_2_5", "hull_cleaned", "17_2_4", "clean_all8", ref="17_2_3"),
    _minus("17_2_6", "lakes_amplified", "17_2_5", "17_2_3", factor=DEFAULT_AMPLIFY),
    _xor("17_2_7", "xor_cleaned_hull", "17_2_5", "17_2_4"),
    _fix("17_2_8", "lakes_hull", "17_2_6", "convex_hull_oct"),
    _minus("17_2_9", "lakes_hull_minus_amplified", "17_2_8", "17_2_6", factor=DEFAULT_AMPLIFY),
    _xor("17_2_10", "xor_lakes_hull", "17_2_6", "17_2_8"),
    _fix("17_2_11", "dales_down_cleaned", "17_2_3", "expand_1234_1236", "clean_46", ref="17_2_3"),
    _minus("17_2_12", "dales_down_amplified", "17_2_11", "17_2_3", factor=DEFAULT_AMPLIFY),
    _xor("17_2_13", "xor_dales_down", "17_2_11", "17_2_3"),
    _fix("17_2_14", "dales_right_cleaned", "17_2_3", "expand_1247_1478", "clean_28", ref="17_2_3"),
    _minus("17_2_15", "dales_right", "17_2_14", "17_2_3"),
    _xor("17_2_16", "xor_dales_right", "17_2_15", "17_2_3"),
    _fix("17_2_17", "dales_left_cleaned", "17_2_3", "expand_2369_3689", "clean_28", ref="17_2_3"),
    _minus("17_2_18", "dales_left", "17_2_17", "17_2_3"),
    _xor("17_2_19", "xor_dales_left", "17_2_18", "17_2_3"),
))

WATERFALL_BORDER = PipelineSpec("waterfall-border", (
    StageSpec("12_3_1", "source", "source"),
    StageSpec("12_3_2", "waterfall", "waterfall", ("12_3_1",)),
    _minus("12_3_3", "difference", "12_3_1", "12_3_2"),
))

PIPELINES = {p.name: p for p in (ALPHABET, HIEROGLYPH, FACE, WATERFALL_BORDER)}


# Helper stages (tag ending in "a") feed later stages but are not written out.
def _is_helper(spec: StageSpec) -> bool:
    return spec.tag.endswith("a")


def lookup_pipeline(name: str) -> PipelineSpec:
    try:
        return PIPELINES[name]
    except KeyError:
        raise UsageError(f"unknown pipeline {name!r}; known: {', '.join(sorted(PIPELINES))}") from None


def _stage_checks(spec: StageSpec, out: Grid, grids: dict, steps=()) -> dict:
    """Local sanity checks, all on the padded working grids."""
    checks = {}
    if spec.op == "fix":
        for schema, before, after in steps:
            if schema.mode is Mode.EXPAND:
                key, ok = "hull_extensive", (after.cells >= before.cells).all()
            else:
                key, ok = "clean_anti_extensive", (after.cells <= before.cells).all()
            checks[key] = checks.get(key, True) and bool(ok)
    elif spec.op == "minus":
        checks["nonnegative"] = bool((out.cells >= 0).all())
    elif spec.op == "xor":
        a, b = (grids[t].cells for t in spec.inputs)
        checks["zero_iff_equal"] = bool(np.array_equal(out.cells == 0, a == b))
    elif spec.op == "waterfall":
        ref = grids[spec.inputs[0]].cells
        checks["fills_with_reference"] = bool(((out.cells == 0) | (out.cells == ref)).all())
    return checks


def run_pipeline(name: str, source: Grid, margin: int = DEFAULT_MARGIN) -> list[StageResult]:
    """Run every stage of pipeline ``name`` on ``source``; outputs are cropped."""
    spec = lookup_pipeline(name)
    work = pad(source, margin)
    grids: dict = {}
    helpers: dict = {}
    results = []
    for st in spec.stages:
        t0 = time.perf_counter()
        stats = RunStats()
        if st.op == "source":
            out = work
        elif st.op == "fix":
            out = grids[st.inputs[0]]
            ref = grids[st.ref] if st.ref else None
            steps = []
            for kernel in st.kernels:
                before = out
                out, s = run_fixpoint(out, kernel, ref=ref)
                stats += s
                steps.append((lookup_kernel(kernel), before, out))
        elif st.op == "minus":
            out = minus_sat(grids[st.inputs[0]], grids[st.inputs[1]])
            if st.factor != 1:
                out = amplify(out, st.factor)
        elif st.op == "xor":
            out = xor_mask(grids[st.inputs[0]], grids[st.inputs[1]])
        elif st.op == "amplify":
            out = amplify(grids[st.inputs[0]], st.factor)
        elif st.op == "waterfall":
            # seeds are the edge of the original image, not of the padding
            seeds = _inner_ring(margin, source.shape, work.shape)
            out, stats = run_waterfall(grids[st.inputs[0]], seeds)
        else:
            raise UsageError(f"unknown stage op {st.op!r}")
        grids[st.tag] = out
        checks = _stage_checks(st, out, grids, steps if st.op == "fix" else ())
        # a hidden helper's runs and checks are reported by the stage using it
        for tag in st.inputs:
            if tag in helpers:
                stats += helpers[tag].stats
                checks = {**helpers[tag].checks, **checks}
        res = StageResult(st, crop(out, margin), stats, checks, time.perf_counter() - t0)
        if _is_helper(st):
            helpers[st.tag] = res
        else:
            results.append(res)
    return results


def _inner_ring(margin: int, shape, padded_shape) -> np.ndarray:
    ring = np.zeros(padded_shape, dtype=bool)
    h, w = shape
    ring[margin:margin + h, margin:margin + w] = border_seeds(shape)
    return ring


def write_pipeline(name: str, results: list[StageResult], out_dir, source_path=None) -> str:
    """Write every stage as PGM plus ``<name>_manifest.json``; returns the manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    for r in results:
        write_pgm(os.path.join(out_dir, r.spec.filename), r.grid)
    manifest = {
        "pipeline": name,
        "source": None if source_path is None else str(source_path),
        "ok": all(r.ok for r in results),
        "stages": [r.to_json() for r in results],
    }
    path = os.path.join(out_dir, f"{name}_manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    return path
