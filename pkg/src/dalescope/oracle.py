"""Brute-force references for the hull kernels.

These follow the set definitions directly: a distance figure is the union of
all shortest paths between pairs of foreground cells, and closing it means
repeating that union until nothing new appears.  A cell ``x`` lies on a
shortest ``u -> v`` path iff ``d(u, x) + d(x, v) == d(u, v)``, with ``d`` the
breadth-first path length inside the grid.

Speed is not a goal here.  Nothing in this module touches the engine.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Grid, UsageError

_STEPS = {
    4: ((-1, 0), (0, -1), (0, 1), (1, 0)),
    8: ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}


@dataclass(frozen=True)
class ClosureSpec:
    """Path connectivity and which pairs of cells get joined.

    ``scope="component"`` joins pairs that sit in the same 8-connected
    component of the current set, re-evaluated as the set grows.
    ``scope="pairwise"`` joins every pair regardless of connectedness.
    """

    connectivity: int = 4
    scope: str = "component"

    def __post_init__(self):
        if self.connectivity not in _STEPS:
            raise UsageError(f"closure connectivity must be 4 or 8, got {self.connectivity}")
        if self.scope not in ("component", "pairwise"):
            raise UsageError(f"closure scope must be 'component' or 'pairwise', got {self.scope!r}")


def _bfs(shape, start, steps) -> np.ndarray:
    h, w = shape
    dist = np.full(shape, -1, dtype=np.int64)
    dist[start] = 0
    queue = deque([start])
    while queue:
        r, c = queue.popleft()
        for dr, dc in steps:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and dist[rr, cc] < 0:
                dist[rr, cc] = dist[r, c] + 1
                queue.append((rr, cc))
    return dist.ravel()


@lru_cache(maxsize=16)
def distance_matrix(shape: tuple[int, int], connectivity: int) -> np.ndarray:
    """All-pairs path lengths over the grid graph, ``(n, n)`` for ``n = h * w``."""
    h, w = shape
    steps = _STEPS[connectivity]
    rows = [_bfs(shape, (r, c), steps) for r in range(h) for c in range(w)]
    out = np.array(rows)
    out.setflags(write=False)
    return out


def _components8(mask: np.ndarray) -> list[np.ndarray]:
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for r in range(h):
        for c in range(w):
            if not mask[r, c] or seen[r, c]:
                continue
            members = []
            seen[r, c] = True
            queue = deque([(r, c)])
            while queue:
                cr, cc = queue.popleft()
                members.append(cr * w + cc)
                for dr, dc in _STEPS[8]:
                    rr, c2 = cr + dr, cc + dc
                    if 0 <= rr < h and 0 <= c2 < w and mask[rr, c2] and not seen[rr, c2]:
                        seen[rr, c2] = True
                        queue.append((rr, c2))
            comps.append(np.array(members))
    return comps


def _paths_between(members: np.ndarray, dist: np.ndarray) -> np.ndarray:
    """Flat mask of every cell on some shortest path between two members."""
    du = dist[members]  # (k, n)
    duv = du[:, members]  # (k, k)
    on = (du[:, None, :] + du[None, :, :]) == duv[:, :, None]
    return on.any(axis=(0, 1))


def df_closure(binary: Grid, spec: ClosureSpec = ClosureSpec()) -> Grid:
    """Close the foreground under unions of shortest paths."""
    cells = binary.cells
    if cells.min() < 0 or cells.max() > 1:
        raise UsageError("df_closure needs a binary grid with values in {0, 1}")
    dist = distance_matrix(binary.shape, spec.connectivity)
    current = cells.astype(bool).ravel()
    while True:
        if spec.scope == "pairwise":
            groups = [np.flatnonzero(current)] if current.any() else []
        else:
            groups = _components8(current.reshape(binary.shape))
        grown = current.copy()
        for members in groups:
            grown |= _paths_between(members, dist)
        if np.array_equal(grown, current):
            break
        current = grown
    return Grid(current.reshape(binary.shape).astype(np.int32), binary.levels)


def gray_flat_oracle(g: Grid, spec: ClosureSpec = ClosureSpec()) -> Grid:
    """Stack the binary closures of every level set back into a gray grid."""
    out = np.zeros(g.shape, dtype=np.int32)
    for t in range(1, g.levels):
        level_set = g.cells >= t
        if not level_set.any():
            break
        closed = df_closure(Grid(level_set.astype(np.int32), 2), spec)
        out[closed.cells == 1] = t
    return g.with_cells(out)


def embed_pattern(bits: int, size: int = 4, margin: int = 2) -> Grid:
    """The ``size x size`` binary pattern encoded by ``bits`` (row-major, LSB first)."""
    flat = (bits >> np.arange(size * size)) & 1
    cells = np.zeros((size + 2 * margin, size + 2 * margin), dtype=np.int32)
    cells[margin:margin + size, margin:margin + size] = flat.reshape(size, size)
    return Grid(cells, levels=2)


def waterfall_oracle(ref: Grid, seeds: np.ndarray) -> Grid:
    """Breadth-first fill along 4-paths whose reference values never increase."""
    h, w = ref.shape
    filled = np.zeros(ref.shape, dtype=bool)
    queue = deque()
    for r, c in zip(*np.nonzero(seeds)):
        filled[r, c] = True
        queue.append((r, c))
    while queue:
        r, c = queue.popleft()
        for dr, dc in _STEPS[4]:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and not filled[rr, cc] and ref.cells[rr, cc] <= ref.cells[r, c]:
                filled[rr, cc] = True
                queue.append((rr, cc))
    return ref.with_cells(np.where(filled, ref.cells, 0))
