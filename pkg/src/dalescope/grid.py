"""Bounded grids of ordered levels and the pointwise arithmetic on them.

Cells are addressed ``(row, col)`` with rows increasing downward.  The
3x3 neighborhood of a cell is numbered::

    e1 e2 e3
    e4 e5 e6
    e7 e8 e9

with ``e5`` the cell itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# (drow, dcol) for e1..e9, index 0 is e1
OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 0), (0, 1),
    (1, -1), (1, 0), (1, 1),
)
PLUS = (2, 4, 6, 8)
CROSS = (1, 3, 7, 9)

DEFAULT_LEVELS = 256


class UsageError(ValueError):
    """Raised when an operation is called with invalid arguments."""


@dataclass(frozen=True, eq=False)
class Grid:
    """An immutable rectangular tiling with integer levels in ``[0, levels-1]``."""

    cells: np.ndarray
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        if self.levels < 2:
            raise UsageError(f"levels must be >= 2, got {self.levels}")
        cells = np.array(self.cells, dtype=np.int32, copy=True)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise UsageError(f"cells must be a non-empty 2-D array, got shape {cells.shape}")
        if cells.min() < 0 or cells.max() > self.levels - 1:
            raise UsageError(
                f"cell values must lie in [0, {self.levels - 1}], "
                f"got [{cells.min()}, {cells.max()}]"
            )
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def zeros(cls, height: int, width: int, levels: int = DEFAULT_LEVELS) -> Grid:
        return cls(np.zeros((height, width), dtype=np.int32), levels)

    @classmethod
    def from_rows(cls, rows, levels: int = DEFAULT_LEVELS) -> Grid:
        return cls(np.asarray(rows), levels)

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @property
    def max_level(self) -> int:
        return self.levels - 1

    def with_cells(self, cells: np.ndarray) -> Grid:
        return Grid(cells, self.levels)

    def support(self, background: int = 0) -> np.ndarray:
        """Boolean mask of cells that differ from ``background``."""
        return self.cells != background

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.levels == other.levels
            and self.shape == other.shape
            and bool(np.array_equal(self.cells, other.cells))
        )

    def __hash__(self):
        return hash((self.levels, self.shape, self.cells.tobytes()))

    def __repr__(self):
        return f"Grid({self.height}x{self.width}, levels={self.levels})"


@dataclass(frozen=True)
class BorderPolicy:
    """Out-of-bounds reads return ``value``."""

    value: int = 0

    def check(self, levels: int) -> None:
        if not 0 <= self.value <= levels - 1:
            raise UsageError(f"border value {self.value} outside [0, {levels - 1}]")


class Neighborhood(NamedTuple):
    e1: int
    e2: int
    e3: int
    e4: int
    e5: int
    e6: int
    e7: int
    e8: int
    e9: int

    def __getitem__(self, key):
        # allow n[5] style access by neighbor number as well as tuple slicing
        if isinstance(key, int):
            if not 1 <= key <= 9:
                raise IndexError(f"neighbor index must be in 1..9, got {key}")
            return tuple.__getitem__(self, key - 1)
        return tuple.__getitem__(self, key)

    def rotate90(self) -> Neighborhood:
        """The neighborhood seen after rotating the grid 90 degrees clockwise."""
        v = self
        # new eK takes the value that lands at position K after rotation
        return Neighborhood(v[7], v[4], v[1], v[8], v[5], v[2], v[9], v[6], v[3])


def neighborhood_at(g: Grid, row: int, col: int, policy: BorderPolicy = BorderPolicy()) -> Neighborhood:
    if not (0 <= row < g.height and 0 <= col < g.width):
        raise UsageError(f"cell ({row}, {col}) outside {g.height}x{g.width} grid")
    policy.check(g.levels)
    vals = []
    for dr, dc in OFFSETS:
        r, c = row + dr, col + dc
        if 0 <= r < g.height and 0 <= c < g.width:
            vals.append(int(g.cells[r, c]))
        else:
            vals.append(policy.value)
    return Neighborhood(*vals)


def shifted(cells: np.ndarray, k: int, border: int = 0) -> np.ndarray:
    """Array whose value at each cell is neighbor ``e{k}`` of that cell."""
    dr, dc = OFFSETS[k - 1]
    padded = np.pad(cells, 1, mode="constant", constant_values=border)
    h, w = cells.shape
    return padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]


def _check_pair(a: Grid, b: Grid | None, op: str) -> Grid:
    if b is None:
        raise UsageError(f"{op} needs a second grid")
    if a.shape != b.shape or a.levels != b.levels:
        raise UsageError(
            f"{op}: grids differ ({a.height}x{a.width}/{a.levels} vs "
            f"{b.height}x{b.width}/{b.levels})"
        )
    return b


def minus_sat(a: Grid, b: Grid) -> Grid:
    _check_pair(a, b, "minus_sat")
    return a.with_cells(np.maximum(a.cells - b.cells, 0))


def xor_mask(a: Grid, b: Grid) -> Grid:
    """Bitwise xor of level codes; zero exactly where the grids agree."""
    _check_pair(a, b, "xor_mask")
    out = np.bitwise_xor(a.cells, b.cells)
    # xor of two codes below a non power-of-two L can exceed L-1
    return a.with_cells(np.minimum(out, a.max_level))


def threshold(a: Grid, t: int) -> Grid:
    """Keep values ``>= t``, zero the rest."""
    if not 0 <= t < a.levels:
        raise UsageError(f"threshold {t} outside [0, {a.levels - 1}]")
    return a.with_cells(np.where(a.cells >= t, a.cells, 0))


def binarize(a: Grid, t: int) -> Grid:
    """Level set ``{a >= t}`` as a two-level grid."""
    return Grid((a.cells >= t).astype(np.int32), levels=2)


def amplify(a: Grid, k: int) -> Grid:
    if k <= 0:
        raise UsageError(f"amplify factor must be positive, got {k}")
    return a.with_cells(np.minimum(a.cells.astype(np.int64) * k, a.max_level))


def box_blur(a: Grid, r: int, policy: BorderPolicy = BorderPolicy()) -> Grid:
    if r < 0:
        raise UsageError(f"blur radius must be >= 0, got {r}")
    policy.check(a.levels)
    n = 2 * r + 1
    padded = np.pad(a.cells.astype(np.int64), r, mode="constant", constant_values=policy.value)
    s = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
    s[1:, 1:] = padded.cumsum(0).cumsum(1)
    h, w = a.shape
    total = s[n:n + h, n:n + w] - s[:h, n:n + w] - s[n:n + h, :w] + s[:h, :w]
    return a.with_cells(total // (n * n))


def pointwise(a: Grid, b: Grid | None = None, op: str = "minus_sat", arg: int | None = None) -> Grid:
    """Dispatch by name: minus_sat, xor_mask, threshold, amplify, box_blur."""
    if op == "minus_sat":
        return minus_sat(a, _check_pair(a, b, op))
    if op == "xor_mask":
        return xor_mask(a, _check_pair(a, b, op))
    if arg is None:
        raise UsageError(f"{op} needs an integer argument")
    if op == "threshold":
        return threshold(a, arg)
    if op == "amplify":
        return amplify(a, arg)
    if op == "box_blur":
        return box_blur(a, arg)
    raise UsageError(f"unknown pointwise op {op!r}")


def diff_directional(g: Grid, direction: int, policy: BorderPolicy = BorderPolicy()) -> Grid:
    """``neighbor - center`` where the neighbor in ``direction`` is larger, else 0."""
    if direction not in (1, 2, 3, 4, 6, 7, 8, 9):
        raise UsageError(f"direction must be one of e1..e9 except e5, got e{direction}")
    nb = shifted(g.cells, direction, policy.value)
    return g.with_cells(np.where(g.cells < nb, nb - g.cells, 0))


def rot90(g: Grid, k: int = 1) -> Grid:
    """Rotate clockwise by ``k`` quarter turns."""
    return g.with_cells(np.rot90(g.cells, -k))


def pad(g: Grid, margin: int, value: int = 0) -> Grid:
    return g.with_cells(np.pad(g.cells, margin, mode="constant", constant_values=value))


def crop(g: Grid, margin: int) -> Grid:
    if margin == 0:
        return g
    return g.with_cells(g.cells[margin:-margin, margin:-margin])
