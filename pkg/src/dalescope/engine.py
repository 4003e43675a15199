"""Run local rules to a global fixed point.

All catalog rules are monotone and either extensive (EXPAND) or
anti-extensive (CONTRACT), so chaotic iteration converges to the same grid
under every fair update order.  The schedules here exist to check that, and
``raster`` is the canonical one.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass

import numpy as np

from . import _loops
from ._jit import default_backend
from .grid import BorderPolicy, Grid, UsageError
from .kernels import KernelSchema, lookup_kernel

MAX_PASSES_ENV = "DALESCOPE_MAX_PASSES"

_ORDER = {"raster": _loops.ORDER_RASTER, "reverse": _loops.ORDER_REVERSE, "random": _loops.ORDER_RANDOM}
SCHEDULE_KINDS = ("raster", "reverse", "worklist", "random", "synchronous")


@dataclass(frozen=True)
class Schedule:
    kind: str = "raster"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise UsageError(f"unknown schedule {self.kind!r}; expected one of {', '.join(SCHEDULE_KINDS)}")

    @classmethod
    def raster(cls):
        return cls("raster")

    @classmethod
    def reverse(cls):
        return cls("reverse")

    @classmethod
    def worklist(cls):
        return cls("worklist")

    @classmethod
    def random(cls, seed: int = 0):
        return cls("random", seed)

    @classmethod
    def synchronous(cls):
        return cls("synchronous")


@dataclass
class RunStats:
    passes: int = 0
    cell_updates: int = 0
    undershoots: int = 0
    converged: bool = True

    def to_json(self) -> dict:
        return asdict(self)

    def __iadd__(self, other: RunStats):
        self.passes += other.passes
        self.cell_updates += other.cell_updates
        self.undershoots += other.undershoots
        self.converged = self.converged and other.converged
        return self


def _env_max_passes() -> int:
    raw = os.environ.get(MAX_PASSES_ENV, "").strip()
    if not raw:
        return 0
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{MAX_PASSES_ENV} must be an integer, got {raw!r}") from None
    return max(value, 0)


def _resolve(schema) -> KernelSchema:
    return lookup_kernel(schema) if isinstance(schema, str) else schema


def run_fixpoint(
    g: Grid,
    schema: KernelSchema | str,
    ref: Grid | None = None,
    schedule: Schedule | None = None,
    max_passes: int | None = None,
    border: BorderPolicy = BorderPolicy(),
    backend: str | None = None,
) -> tuple[Grid, RunStats]:
    """Apply ``schema`` everywhere until no cell changes.

    ``max_passes`` of ``None`` falls back to ``$DALESCOPE_MAX_PASSES`` and
    then to unbounded.  With the numpy backend the default raster schedule is
    served by synchronous vectorized rounds; the result is the same grid,
    only the pass and update counts differ.
    """
    schema = _resolve(schema)
    border.check(g.levels)
    if schema.needs_ref:
        if ref is None:
            raise UsageError(f"{schema.name} is guarded and needs a reference grid")
        if ref.shape != g.shape or ref.levels != g.levels:
            raise UsageError(
                f"reference grid {ref.height}x{ref.width}/{ref.levels} does not match "
                f"{g.height}x{g.width}/{g.levels}"
            )
        ref_cells = np.ascontiguousarray(ref.cells)
    else:
        ref_cells = np.zeros_like(g.cells) if ref is None else np.ascontiguousarray(ref.cells)
    if schedule is None:
        schedule = Schedule.raster()
    if max_passes is None:
        max_passes = _env_max_passes()
    backend = backend or default_backend()

    cur = np.array(g.cells, dtype=np.int32, copy=True)
    args = (schema.window_matrix, schema.mode_code, schema.guard_code, border.value, schema.floor_at_ref)
    kind = schedule.kind
    if backend == "numpy" and kind == "raster":
        kind = "synchronous"

    if kind == "synchronous":
        res = _loops.synchronous_fixpoint(cur, ref_cells, *args, max_passes)
    elif kind == "worklist":
        fn = _loops.worklist_fixpoint
        if backend == "numpy":
            fn = getattr(fn, "py_func", fn)
        res = fn(cur, ref_cells, *args, max_passes)
    else:
        fn = _loops.sweep_fixpoint
        if backend == "numpy":
            fn = getattr(fn, "py_func", fn)
        res = fn(cur, ref_cells, *args, _ORDER[kind], schedule.seed, max_passes)
    passes, updates, undershoots, converged = res
    stats = RunStats(int(passes), int(updates), int(undershoots), bool(converged))
    return g.with_cells(cur), stats


def run_sequence(g: Grid, steps, ref: Grid | None = None, **kw) -> tuple[Grid, RunStats]:
    """Run several kernels one after another, summing their stats."""
    total = RunStats()
    for name in steps:
        g, st = run_fixpoint(g, name, ref=ref, **kw)
        total += st
    return g, total


def _seed_mask(shape, seeds) -> np.ndarray:
    mask = np.zeros(shape, dtype=np.uint8)
    if isinstance(seeds, np.ndarray) and seeds.dtype == bool:
        if seeds.shape != shape:
            raise UsageError(f"seed mask shape {seeds.shape} does not match grid {shape}")
        mask[seeds] = 1
        return mask
    h, w = shape
    for r, c in seeds:
        if not (0 <= r < h and 0 <= c < w):
            raise UsageError(f"seed ({r}, {c}) outside {h}x{w} grid")
        mask[r, c] = 1
    return mask


def border_seeds(shape) -> np.ndarray:
    h, w = shape
    mask = np.zeros(shape, dtype=bool)
    mask[0, :] = mask[-1, :] = True
    mask[:, 0] = mask[:, -1] = True
    return mask


def run_waterfall(ref: Grid, seeds, connectivity: int = 4, max_passes: int | None = None) -> tuple[Grid, RunStats]:
    """Fill from ``seeds`` into every cell reachable by a non-increasing 4-path of ``ref``.

    Filled cells take their reference value; the rest stay 0.
    """
    if connectivity != 4:
        raise UsageError("waterfall is defined for 4-connectivity only")
    filled = _seed_mask(ref.shape, seeds)
    out = np.where(filled == 1, ref.cells, 0).astype(np.int32)
    if max_passes is None:
        max_passes = _env_max_passes()
    passes, updates, converged = _loops.waterfall_fill(np.ascontiguousarray(ref.cells), filled, out, max_passes)
    # seeds count as updates: they are filled too
    stats = RunStats(int(passes), int(filled.sum()), 0, bool(converged))
    return ref.with_cells(out), stats


def run_slope_ray(g: Grid, peak: int = 5, max_passes: int | None = None) -> Grid:
    """Staircase ray: ``e5 = e4 - 1`` while ``e4 > 1``; restart at ``peak`` above a 1."""
    if peak >= g.levels or peak < 2:
        raise UsageError(f"peak must be in [2, {g.levels - 1}], got {peak}")
    cur = np.array(g.cells, dtype=np.int32, copy=True)
    if max_passes is None:
        max_passes = _env_max_passes() or (g.height * g.width + 2)
    _loops.slope_ray(cur, peak, max_passes)
    return g.with_cells(cur)
