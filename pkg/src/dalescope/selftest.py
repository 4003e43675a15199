"""Built-in consistency checks: registry sanity, exhaustive oracle sweeps and
randomized property checks.

Exhaustive sweeps visit the 4x4 patterns in order of foreground size and
then value, so the first failure found is also a smallest one.  Failures
are written out as a PGM plus a JSON note.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .engine import SCHEDULE_KINDS, Schedule, border_seeds, run_fixpoint, run_waterfall
from .grid import Grid, UsageError, binarize
from .kernels import CATALOG, D36_FIXED, D36_LITERAL, KernelSchema, Mode, hull8on8_literal
from .oracle import ClosureSpec, df_closure, embed_pattern, waterfall_oracle
from .pgm import write_pgm

N_PATTERNS = 1 << 16


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""
    flags: list = field(default_factory=list)
    counterexample: Grid | None = None
    info: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        flags = f" [{', '.join(self.flags)}]" if self.flags else ""
        return f"{status} {self.name}: {self.detail}{flags}"


def pattern_order(stride: int = 1) -> list[int]:
    """Pattern codes sorted by popcount, then value; every ``stride``-th kept."""
    codes = sorted(range(N_PATTERNS), key=lambda b: (bin(b).count("1"), b))
    return codes[::stride]


def _windows_ok(schema: KernelSchema, allow_d36_literal: bool) -> str | None:
    if not schema.windows:
        return "no windows"
    for w in schema.windows:
        if not w:
            return "empty window"
        if any(i not in range(1, 10) for i in w):
            return f"window {w} outside e1..e9"
        if 5 in w and not (allow_d36_literal and tuple(w) == D36_LITERAL):
            return f"window {w} includes e5"
    return None


def check_registry(catalog: dict | None = None) -> CheckResult:
    catalog = CATALOG if catalog is None else catalog
    problems = []
    flags = []
    for name, schema in catalog.items():
        if schema.name != name:
            problems.append(f"{name}: registered under a different name ({schema.name})")
        err = _windows_ok(schema, allow_d36_literal=(name == "convex_hull8on8"))
        if err:
            problems.append(f"{name}: {err}")
        if schema.needs_ref != (schema.guard.value != "none"):
            problems.append(f"{name}: guard/ref mismatch")
    h88 = catalog.get("convex_hull8on8")
    if h88 is not None and any(tuple(w) == D36_LITERAL for w in h88.windows):
        flags.append("literal-variant")
    if problems:
        return CheckResult("registry", False, "; ".join(problems), flags)
    return CheckResult("registry", True, f"{len(catalog)} kernels well-formed", flags)


def _fail_note(name: str, bits: int, g: Grid, extra: str) -> CheckResult:
    return CheckResult(name, False, f"pattern bits={bits}: {extra}", counterexample=g, info={"bits": bits})


def check_df4(catalog: dict | None = None, stride: int = 1) -> CheckResult:
    catalog = CATALOG if catalog is None else catalog
    kernel = catalog["convex_hull4"]
    spec = ClosureSpec(4)
    codes = pattern_order(stride)
    for bits in codes:
        g = embed_pattern(bits)
        got, _ = run_fixpoint(g, kernel)
        want = df_closure(g, spec)
        if got != want:
            return _fail_note("df4_equality", bits, g, "convex_hull4 fixpoint differs from DF4 closure")
    return CheckResult("df4_equality", True, f"{len(codes)} patterns equal")


def check_df8(catalog: dict | None = None, stride: int = 1) -> CheckResult:
    catalog = CATALOG if catalog is None else catalog
    kernels = [catalog["convex_hull8on8"], catalog["convex_hull_oct"]]
    spec = ClosureSpec(8)
    codes = pattern_order(stride)
    equal = {k.name: 0 for k in kernels}
    for bits in codes:
        g = embed_pattern(bits)
        want = df_closure(g, spec).cells.astype(bool)
        for k in kernels:
            got = run_fixpoint(g, k)[0].cells.astype(bool)
            if (got & ~want).any():
                return _fail_note("df8_soundness", bits, g, f"{k.name} adds a cell outside the DF8 closure")
            equal[k.name] += bool(np.array_equal(got, want))
    rates = {name: n / len(codes) for name, n in equal.items()}
    detail = ", ".join(f"{name} equality {rate:.2%}" for name, rate in rates.items())
    flags = ["literal-variant"] if any(tuple(w) == D36_LITERAL for w in kernels[0].windows) else []
    return CheckResult("df8_soundness", True, f"{len(codes)} patterns subset; {detail}", flags, info=rates)


def check_d36_inert(stride: int = 1) -> CheckResult:
    """The variant d36 window changes nothing: dropping it gives the same fixpoints."""
    literal = hull8on8_literal()
    dropped = KernelSchema(
        "convex_hull8on8_without_d36", Mode.EXPAND, tuple(w for w in literal.windows if w != D36_LITERAL)
    )
    fixed = CATALOG["convex_hull8on8"]
    codes = pattern_order(stride)
    differs_from_fixed = 0
    for bits in codes:
        g = embed_pattern(bits)
        a, _ = run_fixpoint(g, literal)
        if a != run_fixpoint(g, dropped)[0]:
            return _fail_note("d36_literal_inert", bits, g, "the variant d36 window changed a fixpoint")
        differs_from_fixed += a != run_fixpoint(g, fixed)[0]
    return CheckResult(
        "d36_literal_inert",
        True,
        f"{len(codes)} patterns; literal window inert, {differs_from_fixed} patterns need the {D36_FIXED} window",
        info={"differs_from_fixed": int(differs_from_fixed)},
    )


def _random_case(rng, schema: KernelSchema, size: int, levels: int):
    g = Grid(rng.integers(0, levels, (size, size)), levels)
    ref = None
    if schema.needs_ref:
        if schema.mode is Mode.CONTRACT:
            # constraint style: shrink from a hull toward the source
            ref = g
            g, _ = run_fixpoint(g, "convex_hull_oct")
        else:
            ref = Grid(rng.integers(0, levels, (size, size)), levels)
            g = Grid(np.where(rng.random((size, size)) < 0.1, g.cells, 0), levels)
    return g, ref


def check_confluence(catalog: dict | None = None, grids: int = 5, size: int = 12, levels: int = 8, seed: int = 0):
    catalog = CATALOG if catalog is None else catalog
    rng = np.random.default_rng(seed)
    schedules = [Schedule(k) for k in SCHEDULE_KINDS if k != "random"] + [Schedule.random(s) for s in (1, 2, 3)]
    for _ in range(grids):
        for schema in catalog.values():
            g, ref = _random_case(rng, schema, size, levels)
            base, stats = run_fixpoint(g, schema, ref=ref)
            if stats.cell_updates > size * size * (levels - 1):
                return CheckResult("confluence", False, f"{schema.name}: update bound exceeded", counterexample=g)
            if run_fixpoint(base, schema, ref=ref)[1].cell_updates:
                return CheckResult("confluence", False, f"{schema.name}: fixpoint not idempotent", counterexample=g)
            for sched in schedules[1:]:
                if run_fixpoint(g, schema, ref=ref, schedule=sched)[0] != base:
                    return CheckResult(
                        "confluence", False, f"{schema.name}: {sched.kind}/{sched.seed} differs from raster",
                        counterexample=g,
                    )
    return CheckResult("confluence", True, f"{grids} grids x {len(catalog)} kernels x {len(schedules)} schedules")


def check_flatness(catalog: dict | None = None, grids: int = 5, size: int = 12, levels: int = 8, seed: int = 1):
    catalog = CATALOG if catalog is None else catalog
    rng = np.random.default_rng(seed)
    unguarded = [k for k in catalog.values() if not k.needs_ref]
    for _ in range(grids):
        g = Grid(rng.integers(0, levels, (size, size)), levels)
        for schema in unguarded:
            fix, _ = run_fixpoint(g, schema)
            for t in range(1, levels):
                if binarize(fix, t) != run_fixpoint(binarize(g, t), schema)[0]:
                    return CheckResult("flatness", False, f"{schema.name} at t={t}", counterexample=g)
    return CheckResult("flatness", True, f"{grids} grids x {len(unguarded)} unguarded kernels x {levels - 1} thresholds")


def check_waterfall(grids: int = 10, size: int = 16, levels: int = 8, seed: int = 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    for _ in range(grids):
        ref = Grid(rng.integers(0, levels, (size, size)), levels)
        seeds = border_seeds(ref.shape)
        if run_waterfall(ref, seeds)[0] != waterfall_oracle(ref, seeds):
            return CheckResult("waterfall", False, "fill differs from the breadth-first oracle", counterexample=ref)
    return CheckResult("waterfall", True, f"{grids} grids match the breadth-first oracle")


def _persist(result: CheckResult, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, f"counterexample_{result.name}")
    if result.counterexample is not None:
        write_pgm(stem + ".pgm", result.counterexample)
    with open(stem + ".json", "w") as fh:
        json.dump({"check": result.name, "detail": result.detail, **result.info}, fh, indent=2)


def run_selftest(quick: bool = False, out_dir=None, catalog: dict | None = None, echo=print):
    """Run every check; returns ``(all_ok, results)``.

    ``quick`` thins the exhaustive sweeps to every 61st pattern and shrinks
    the random suites.
    """
    catalog = CATALOG if catalog is None else catalog
    stride = 61 if quick else 1
    n = 2 if quick else 10
    results = []
    reg = check_registry(catalog)
    results.append(reg)
    echo(reg.line())
    if reg.ok:
        steps = [
            lambda: check_df4(catalog, stride),
            lambda: check_df8(catalog, stride),
            lambda: check_d36_inert(stride),
            lambda: check_confluence(catalog, grids=n),
            lambda: check_flatness(catalog, grids=n),
            lambda: check_waterfall(grids=2 * n),
        ]
        for step in steps:
            t0 = time.perf_counter()
            try:
                res = step()
            except UsageError as exc:
                res = CheckResult(getattr(step, "__name__", "check"), False, str(exc))
            res.info.setdefault("seconds", round(time.perf_counter() - t0, 2))
            results.append(res)
            echo(res.line())
    ok = all(r.ok for r in results)
    if not ok and out_dir is not None:
        for r in results:
            if not r.ok:
                _persist(r, out_dir)
    echo(f"selftest: {sum(r.ok for r in results)}/{len(results)} checks passed")
    return ok, results
