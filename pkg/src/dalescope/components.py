"""Connected-component labeling under 4-, x- (diagonal only) and 8-adjacency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .grid import Grid, UsageError

_STEPS = {
    "4": np.array([[-1, 0], [0, -1], [0, 1], [1, 0]], dtype=np.int64),
    "x": np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=np.int64),
    "8": np.array([[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]], dtype=np.int64),
}


def _conn_key(connectivity) -> str:
    key = str(connectivity).lower()
    if key not in _STEPS:
        raise UsageError(f"connectivity must be 4, 'x' or 8, got {connectivity!r}")
    return key


@njit
def _flood_label(fg, steps):
    h, w = fg.shape
    labels = np.zeros((h, w), dtype=np.int32)
    stack = np.empty(h * w, dtype=np.int64)
    count = 0
    for r in range(h):
        for c in range(w):
            if not fg[r, c] or labels[r, c] != 0:
                continue
            count += 1
            labels[r, c] = count
            top = 0
            stack[top] = r * w + c
            top += 1
            while top > 0:
                top -= 1
                idx = stack[top]
                cr = idx // w
                cc = idx % w
                for s in range(steps.shape[0]):
                    rr = cr + steps[s, 0]
                    c2 = cc + steps[s, 1]
                    if 0 <= rr < h and 0 <= c2 < w and fg[rr, c2] and labels[rr, c2] == 0:
                        labels[rr, c2] = count
                        stack[top] = rr * w + c2
                        top += 1
    return labels, count


@dataclass(frozen=True, eq=False)
class ComponentMap:
    labels: np.ndarray
    count: int
    connectivity: str
    background: int

    def mask(self, component_id: int) -> np.ndarray:
        if not 1 <= component_id <= self.count:
            raise UsageError(f"component id {component_id} outside 1..{self.count}")
        return self.labels == component_id

    def areas(self) -> np.ndarray:
        """Cell count per component, index 0 unused."""
        return np.bincount(self.labels.ravel(), minlength=self.count + 1)

    def to_json(self) -> dict:
        return {"count": self.count, "connectivity": self.connectivity, "background": self.background}

    def label_grid(self) -> Grid:
        """Labels as a grid with ``levels = count + 1`` (for PGM export)."""
        return Grid(self.labels, levels=max(self.count + 1, 2))


def label_components(g: Grid, connectivity=8, background: int = 0) -> ComponentMap:
    """Number foreground components in first-encounter raster order."""
    key = _conn_key(connectivity)
    fg = np.ascontiguousarray(g.cells != background)
    labels, count = _flood_label(fg, _STEPS[key])
    labels.setflags(write=False)
    return ComponentMap(labels, int(count), key, background)


def label_mask(mask: np.ndarray, connectivity=8) -> ComponentMap:
    fg = np.ascontiguousarray(mask.astype(bool))
    labels, count = _flood_label(fg, _STEPS[_conn_key(connectivity)])
    return ComponentMap(labels, int(count), _conn_key(connectivity), 0)


def extract_component(g: Grid, m: ComponentMap, component_id: int) -> Grid:
    mask = m.mask(component_id)
    return g.with_cells(np.where(mask, g.cells, m.background))
