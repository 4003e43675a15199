"""Shape features built from fixpoint runs: lakes, dales, concavity depth, ridges.

All pipelines assume the glyph sits on a background of 0 with a free margin
around it.  Callers that cannot guarantee this should ``grid.pad`` first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .components import label_components, label_mask
from .engine import run_fixpoint
from .grid import Grid, UsageError, minus_sat

DEFAULT_MIN_DALE_AREA = 2


class Direction(enum.Enum):
    DOWN = "down"
    UP = "up"
    LEFT = "left"
    RIGHT = "right"

    @property
    def expand_kernel(self) -> str:
        return _DALE_KERNELS[self][0]

    @property
    def clean_kernel(self) -> str:
        return _DALE_KERNELS[self][1]

    def rotated(self, k: int = 1) -> Direction:
        """Direction after ``k`` clockwise quarter turns of the image."""
        order = [Direction.DOWN, Direction.LEFT, Direction.UP, Direction.RIGHT]
        return order[(order.index(self) + k) % 4]


_DALE_KERNELS = {
    Direction.DOWN: ("expand_1234_1236", "clean_46"),
    Direction.UP: ("expand_4789_6789", "clean_46"),
    Direction.RIGHT: ("expand_1247_1478", "clean_28"),
    Direction.LEFT: ("expand_2369_3689", "clean_28"),
}

DIRECTIONS = (Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT)


def _direction(d) -> Direction:
    return d if isinstance(d, Direction) else Direction(str(d).lower())


def lakes(g: Grid) -> Grid:
    """Enclosed concavities: hull, drained from outside, minus the glyph."""
    hull, _ = run_fixpoint(g, "convex_hull_oct")
    filled, _ = run_fixpoint(hull, "clean_all8", ref=g)
    return minus_sat(filled, g)


def dale_fill(g: Grid, direction, cleaned: bool = True) -> Grid:
    d = _direction(direction)
    out, _ = run_fixpoint(g, d.expand_kernel)
    if cleaned:
        out, _ = run_fixpoint(out, d.clean_kernel, ref=g)
    return out


def dales(g: Grid, direction, cleaned: bool = True) -> Grid:
    """Concavities open toward ``direction``; lakes show up here too."""
    return minus_sat(dale_fill(g, direction, cleaned), g)


def concavity_depth(g: Grid, max_rounds: int = 10_000) -> tuple[np.ndarray, int]:
    """Excavate the hull by alternating 4- and 8-style minconvex runs.

    Returns the per-cell index of the last round that changed the cell
    (0 if never) and the number of rounds run, the last one changing nothing.
    """
    cur, _ = run_fixpoint(g, "convex_hull_oct")
    depth = np.zeros(g.shape, dtype=np.int64)
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        a, _ = run_fixpoint(cur, "minconvex_hull4", ref=g)
        b, _ = run_fixpoint(a, "minconvex_123_369_789_147", ref=g)
        changed = (a.cells != cur.cells) | (b.cells != a.cells)
        if not changed.any():
            break
        depth[changed] = rounds
        cur = b
    return depth, rounds


def ridges(g: Grid, method: str = "A") -> Grid:
    method = method.upper()
    if method == "A":
        # stem bounded by a dale opened down and whatever its rays reach;
        # enclosed lakes are not part of the dale and would block the drain
        dale = dales(g, Direction.DOWN, cleaned=True)
        dale = dale.with_cells(np.where(lakes(g).cells > 0, 0, dale.cells))
        rays, _ = run_fixpoint(dale, "ray_268", ref=g)
        up, _ = run_fixpoint(rays, "expand_4789_6789")
        up, _ = run_fixpoint(up, "clean_46", ref=rays)
        return minus_sat(up, rays)
    if method == "B":
        left, _ = run_fixpoint(g, "expand_369")
        rays, _ = run_fixpoint(left, "ray_468", ref=g)
        right, _ = run_fixpoint(rays, "expand_147")
        return minus_sat(right, g)
    raise UsageError(f"ridge method must be 'A' or 'B', got {method!r}")


def _support_grid(mask: np.ndarray) -> Grid:
    return Grid(mask.astype(np.int32), levels=2)


def relation_matrix(parts) -> list[tuple[str, str, str]]:
    """``above`` by downward ray shadow, ``contains``/``within`` by hull cover.

    ``parts`` is a sequence of ``(id, Grid)``; a part is its nonzero support.
    """
    parts = list(parts)
    if not parts:
        return []
    shape = parts[0][1].shape
    for pid, p in parts:
        if p.shape != shape:
            raise UsageError(f"part {pid!r} is {p.shape}, expected {shape}")
    supports = {pid: p.cells != 0 for pid, p in parts}
    shadows = {}
    hulls = {}
    for pid, mask in supports.items():
        shadow, _ = run_fixpoint(_support_grid(mask), "ray_2")
        shadows[pid] = (shadow.cells != 0) & ~mask
        hull, _ = run_fixpoint(_support_grid(mask), "convex_hull_oct")
        hulls[pid] = hull.cells != 0
    out = []
    for p, _ in parts:
        for q, _ in parts:
            if p == q:
                continue
            if (shadows[p] & supports[q]).any():
                out.append((p, "above", q))
            if supports[q].any() and not (supports[q] & ~hulls[p]).any():
                out.append((p, "contains", q))
                out.append((q, "within", p))
    return out


@dataclass
class FeatureDescriptor:
    component_id: int = 1
    lakes: int = 0
    dales: dict = field(default_factory=lambda: {d.value: 0 for d in DIRECTIONS})
    relations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "component_id": self.component_id,
            "lakes": self.lakes,
            "dales": dict(self.dales),
            "relations": [list(r) for r in self.relations],
        }


def feature_parts(g: Grid, min_dale_area: int = DEFAULT_MIN_DALE_AREA) -> list[tuple[str, Grid]]:
    """Lake and dale components of one glyph as separate grids, named
    ``lake1``, ``dale-down1``, ... in raster order."""
    lake_img = lakes(g)
    lake_mask = lake_img.cells > 0
    parts = []
    lm = label_mask(lake_mask, 8)
    for i in range(1, lm.count + 1):
        parts.append((f"lake{i}", lake_img.with_cells(np.where(lm.labels == i, lake_img.cells, 0))))
    for d in DIRECTIONS:
        img = dales(g, d, cleaned=True)
        mask = (img.cells > 0) & ~lake_mask
        dm = label_mask(mask, 8)
        areas = dm.areas()
        n = 0
        for i in range(1, dm.count + 1):
            if areas[i] < min_dale_area:
                continue
            n += 1
            parts.append((f"dale-{d.value}{n}", img.with_cells(np.where(dm.labels == i, img.cells, 0))))
    return parts


def glyph_descriptor(g: Grid, min_dale_area: int = DEFAULT_MIN_DALE_AREA, component_id: int = 1) -> FeatureDescriptor:
    desc = FeatureDescriptor(component_id=component_id)
    if not (g.cells != 0).any():
        return desc
    parts = feature_parts(g, min_dale_area)
    for name, _ in parts:
        if name.startswith("lake"):
            desc.lakes += 1
        else:
            kind = name[len("dale-"):].rstrip("0123456789")
            desc.dales[kind] += 1
    desc.relations = relation_matrix(parts)
    return desc


def describe_image(g: Grid, min_dale_area: int = DEFAULT_MIN_DALE_AREA) -> list[FeatureDescriptor]:
    """One descriptor per 8-connected glyph on a 0 background."""
    cm = label_components(g, 8, 0)
    out = []
    for i in range(1, cm.count + 1):
        glyph = g.with_cells(np.where(cm.labels == i, g.cells, 0))
        out.append(glyph_descriptor(glyph, min_dale_area, component_id=i))
    return out
