"""Acceptance criteria 1-10, one status line each.

Run with ``pytest tests/test_acceptance.py -v``; the lines also appear in the
terminal summary.  Every check here is exact: no tolerance is involved.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from dalescope.components import label_mask
from dalescope.engine import Schedule, border_seeds, run_fixpoint, run_waterfall
from dalescope.features import DEFAULT_MIN_DALE_AREA, DIRECTIONS, glyph_descriptor
from dalescope.fixtures import data_path
from dalescope.grid import Grid, binarize, minus_sat
from dalescope.kernels import CATALOG, Guard, KernelSchema, Mode
from dalescope.oracle import ClosureSpec, df_closure, embed_pattern, waterfall_oracle
from dalescope.pgm import read_pgm, write_pgm
from dalescope.pipelines import PIPELINES, run_pipeline
from dalescope.selftest import pattern_order

pytestmark = pytest.mark.slow

GAP_DIR = Path(__file__).parent / "df8_gaps"
SCHEDULES = [Schedule.raster(), Schedule.reverse(), Schedule.worklist()] + [Schedule.random(s) for s in (1, 2, 3)]
PIPELINE_INPUT = {
    "alphabet": "glyph_sheet.pgm",
    "hieroglyph": "hieroglyph.pgm",
    "face": "face.pgm",
    "waterfall-border": "gradient.pgm",
}


def bundled(name):
    return read_pgm(data_path(name))


def start_and_ref(rng, schema, g):
    """Working grid and reference for one random case.

    Guarded contractions start from a hull above the reference, either the
    hull of the reference itself or an unrelated random grid.  Guarded
    expansions start sparse.
    """
    if not schema.needs_ref:
        return g, None
    levels = g.levels
    if schema.mode is Mode.CONTRACT:
        if rng.random() < 0.5:
            return run_fixpoint(g, "convex_hull_oct")[0], g
        return Grid(rng.integers(0, levels, g.shape), levels), g
    sparse = np.where(rng.random(g.shape) < 0.1, rng.integers(0, levels, g.shape), 0)
    return Grid(sparse, levels), g


def check_bound_and_idempotence(g, schema, ref, out, stats):
    bound = g.height * g.width * (g.levels - 1)
    if stats.cell_updates > bound or not stats.converged:
        return f"{schema.name}: {stats.cell_updates} updates exceed bound {bound}"
    again = run_fixpoint(out, schema, ref=ref)[1]
    if again.cell_updates:
        return f"{schema.name}: rerun on the fixpoint made {again.cell_updates} updates"
    return None


@pytest.fixture(scope="module")
def confluence_runs():
    rng = np.random.default_rng(2024)
    divergences, audit = [], []
    runs = 0
    t0 = time.perf_counter()
    for _ in range(100):
        g = Grid(rng.integers(0, 8, (16, 16)), 8)
        for schema in CATALOG.values():
            start, ref = start_and_ref(rng, schema, g)
            base, stats = run_fixpoint(start, schema, ref=ref)
            runs += 1
            for sched in SCHEDULES[1:]:
                runs += 1
                if run_fixpoint(start, schema, ref=ref, schedule=sched)[0] != base:
                    divergences.append(f"{schema.name}/{sched.kind}{sched.seed}")
            audit.append((start, schema, ref, base, stats))
    seconds = time.perf_counter() - t0
    problems = [p for p in (check_bound_and_idempotence(*a) for a in audit) if p]
    return {"divergences": divergences, "runs": runs, "seconds": seconds, "problems": problems}


@pytest.fixture(scope="module")
def flatness_runs():
    rng = np.random.default_rng(7)
    unguarded = [k for k in CATALOG.values() if not k.needs_ref]
    mismatches, problems = [], []
    checks = 0
    for _ in range(200):
        g = Grid(rng.integers(0, 8, (16, 16)), 8)
        for schema in unguarded:
            fix, stats = run_fixpoint(g, schema)
            p = check_bound_and_idempotence(g, schema, None, fix, stats)
            if p:
                problems.append(p)
            for t in range(1, 8):
                checks += 1
                if binarize(fix, t) != run_fixpoint(binarize(g, t), schema)[0]:
                    mismatches.append(f"{schema.name} t={t}")
    return {"mismatches": mismatches, "checks": checks, "problems": problems, "kernels": len(unguarded)}


def test_criterion_1_df4_theorem(report):
    t0 = time.perf_counter()
    codes = pattern_order()
    failures = []
    for bits in codes:
        g = embed_pattern(bits)
        if run_fixpoint(g, "convex_hull4")[0] != df_closure(g, ClosureSpec(4)):
            failures.append(bits)
    seconds = time.perf_counter() - t0
    ok = not failures and seconds < 120
    report(1, ok, f"convex_hull4 == DF4 closure on {len(codes) - len(failures)}/{len(codes)} patterns in {seconds:.1f}s")

    # all-pairs reading of the closure, for the record only
    pairwise = ClosureSpec(4, "pairwise")
    differ = connected_differ = 0
    for bits in codes:
        g = embed_pattern(bits)
        if run_fixpoint(g, "convex_hull4")[0] != df_closure(g, pairwise):
            differ += 1
            connected_differ += label_mask(g.cells > 0, 8).count <= 1
    report(
        1, True,
        f"all-pairs closure differs on {differ} patterns, {connected_differ} of them 8-connected",
        kind="REPORT",
    )
    assert not failures, f"first failing pattern bits={failures[0]}"
    assert seconds < 120
    assert connected_differ == 0


def test_criterion_2_df8_soundness(report):
    codes = pattern_order()
    hull88, oct_ = CATALOG["convex_hull8on8"], CATALOG["convex_hull_oct"]
    unsound = {hull88.name: [], oct_.name: []}
    equal = {hull88.name: 0, oct_.name: 0}
    gaps = []
    for bits in codes:
        g = embed_pattern(bits)
        want = df_closure(g, ClosureSpec(8)).cells.astype(bool)
        for k in (hull88, oct_):
            got = run_fixpoint(g, k)[0].cells.astype(bool)
            if (got & ~want).any():
                unsound[k.name].append(bits)
            same = np.array_equal(got, want)
            equal[k.name] += same
            if k is hull88 and not same:
                gaps.append((bits, g))
    for bits, g in gaps:
        GAP_DIR.mkdir(exist_ok=True)
        write_pgm(GAP_DIR / f"bits_{bits}.pgm", g)
    ok = not any(unsound.values())
    rates = ", ".join(f"{name} equal {n / len(codes):.2%}" for name, n in equal.items())
    report(2, ok, f"subset of DF8 closure on all {len(codes)} patterns for both kernels; {rates}; {len(gaps)} gaps saved")
    assert not unsound[hull88.name], f"convex_hull8on8 unsound, first bits={unsound[hull88.name][0]}"
    assert not unsound[oct_.name], f"convex_hull_oct unsound, first bits={unsound[oct_.name][0]}"


def test_criterion_3_schedule_confluence(report, confluence_runs):
    r = confluence_runs
    ok = not r["divergences"] and r["seconds"] < 60
    report(
        3, ok,
        f"100 grids x {len(CATALOG)} kernels x 4 schedules (random with 3 seeds): "
        f"{len(r['divergences'])} divergences, {r['runs']} runs in {r['seconds']:.1f}s",
    )
    assert not r["divergences"], r["divergences"][:5]
    assert r["seconds"] < 60


def test_criterion_4_threshold_commutation(report, flatness_runs):
    r = flatness_runs
    ok = not r["mismatches"]
    report(4, ok, f"200 grids x {r['kernels']} unguarded kernels x 7 thresholds: {len(r['mismatches'])} mismatches")
    assert not r["mismatches"], r["mismatches"][:5]


def test_criterion_5_disconnected_difference(report):
    g = bundled("cross.pgm")
    hull, _ = run_fixpoint(g, "convex_hull4")
    n = label_mask(minus_sat(hull, g).cells > 0, 8).count
    ok = n == 4
    report(5, ok, f"cross fixture: hull minus original has {n} 8-components (expected 4)")
    assert n == 4


GLYPH_TABLE = {
    "O": (1, {}),
    "C": (0, {"right": 1}),
    "E": (0, {"right": 2}),
    "H": (0, {"up": 1, "down": 1}),
    "U": (0, {"up": 1}),
    "A": (1, {"down": 1}),
}


def test_criterion_6_glyph_table(report):
    wrong = []
    for name, (lake_count, dale_counts) in GLYPH_TABLE.items():
        desc = glyph_descriptor(bundled(f"glyph_{name}.pgm"), DEFAULT_MIN_DALE_AREA)
        want = {d.value: 0 for d in DIRECTIONS}
        want.update(dale_counts)
        if desc.lakes != lake_count or desc.dales != want:
            wrong.append(f"{name}: lakes={desc.lakes} dales={desc.dales}")
        if name == "A" and ("lake1", "above", "dale-down1") not in desc.relations:
            wrong.append(f"A: relations {desc.relations}")
    ok = not wrong
    report(6, ok, f"{len(GLYPH_TABLE) - len(wrong)}/{len(GLYPH_TABLE)} glyphs match" + (f"; {wrong}" if wrong else ""))
    assert not wrong


def test_criterion_7_waterfall_oracle(report):
    rng = np.random.default_rng(12)
    bad = 0
    for _ in range(100):
        ref = Grid(rng.integers(0, 8, (32, 32)), 8)
        seeds = border_seeds(ref.shape)
        bad += run_waterfall(ref, seeds)[0] != waterfall_oracle(ref, seeds)
    report(7, bad == 0, f"{100 - bad}/100 random 32x32 references match the breadth-first oracle")
    assert bad == 0


def test_criterion_8_termination_and_idempotence(report, confluence_runs, flatness_runs):
    problems = confluence_runs["problems"] + flatness_runs["problems"]
    checked = len(CATALOG) * 100 + flatness_runs["kernels"] * 200
    report(8, not problems, f"{checked} kernel runs within the update bound and idempotent; {len(problems)} violations")
    assert not problems, problems[:5]


def test_criterion_9_non_composability(report):
    g = bundled("cross.pgm")
    a, b = CATALOG["minconvex_hull4"], CATALOG["minconvex_123_369_789_147"]
    merged = KernelSchema("minconvex_merged", Mode.CONTRACT, a.windows + b.windows, Guard.REF_GT)
    hull, _ = run_fixpoint(g, "convex_hull4")
    together, _ = run_fixpoint(hull, merged, ref=g)
    step, _ = run_fixpoint(hull, a, ref=g)
    sequential, _ = run_fixpoint(step, b, ref=g)
    differ = together != sequential
    cells = lambda x: int((x.cells > 0).sum())  # noqa: E731
    report(
        9, differ,
        f"cross fixture: merged kernel leaves {cells(together)} cells, sequential leaves {cells(sequential)} "
        f"(original {cells(g)})",
    )
    assert differ


def test_criterion_10_pipelines(report):
    t0 = time.perf_counter()
    bad = []
    stages = 0
    for name in PIPELINES:
        for r in run_pipeline(name, bundled(PIPELINE_INPUT[name])):
            stages += 1
            if not r.ok:
                bad.append(f"{name}:{r.spec.tag} {r.checks}")
    seconds = time.perf_counter() - t0
    ok = not bad and seconds < 60
    report(10, ok, f"{len(PIPELINES)} pipelines, {stages} stages, {len(bad)} failing, {seconds:.2f}s")
    assert not bad, bad
    assert seconds < 60


if __name__ == "__main__":
    raise SystemExit(pytest.main([os.path.abspath(__file__), "-v"]))
