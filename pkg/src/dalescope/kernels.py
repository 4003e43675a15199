"""Catalog of local min/max rules.

Every rule has the same shape.  An EXPAND rule raises the center to the
largest window minimum::

    e5 = max(e5, max_w min_{i in w} e_i)

and a CONTRACT rule lowers it to the smallest window maximum::

    e5 = min(e5, min_w max_{i in w} e_i)

A guard gates the update on a second, read-only reference grid: ``REF_GE``
applies only where ``e5 >= t5`` and ``REF_GT`` only where ``e5 > t5``.
Guarded CONTRACT results are floored at ``t5`` (see ``floor_at_ref``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _loops
from .grid import Neighborhood, UsageError


class Mode(enum.Enum):
    EXPAND = "expand"
    CONTRACT = "contract"


class Guard(enum.Enum):
    NONE = "none"
    REF_GE = "ref_ge"
    REF_GT = "ref_gt"


_MODE_CODE = {Mode.EXPAND: _loops.EXPAND, Mode.CONTRACT: _loops.CONTRACT}
_GUARD_CODE = {Guard.NONE: _loops.GUARD_NONE, Guard.REF_GE: _loops.GUARD_GE, Guard.REF_GT: _loops.GUARD_GT}

# clockwise quarter turn: the neighbor at position k moves to position ROT90[k]
ROT90 = {1: 3, 2: 6, 3: 9, 6: 8, 9: 7, 8: 4, 7: 1, 4: 2, 5: 5}


@dataclass(frozen=True)
class KernelSchema:
    name: str
    mode: Mode
    windows: tuple[tuple[int, ...], ...]
    guard: Guard = Guard.NONE
    floor_at_ref: bool = True
    allow_center: bool = False  # only for the variant hull8on8 listing

    def __post_init__(self):
        if not self.windows:
            raise UsageError(f"{self.name}: at least one window required")
        for w in self.windows:
            if not w:
                raise UsageError(f"{self.name}: empty window")
            if 5 in w and not self.allow_center:
                raise UsageError(f"{self.name}: window {w} includes the center e5")
            if any(i not in range(1, 10) for i in w):
                raise UsageError(f"{self.name}: window {w} has an index outside e1..e9")

    @property
    def needs_ref(self) -> bool:
        return self.guard is not Guard.NONE

    @cached_property
    def window_matrix(self) -> np.ndarray:
        m = np.zeros((len(self.windows), 9), dtype=np.uint8)
        for row, w in zip(m, self.windows):
            row[[i - 1 for i in w]] = 1
        return m

    @property
    def mode_code(self) -> int:
        return _MODE_CODE[self.mode]

    @property
    def guard_code(self) -> int:
        return _GUARD_CODE[self.guard]

    def rotated(self, k: int = 1, name: str | None = None) -> KernelSchema:
        """Same rule with every window turned ``k`` quarter turns clockwise."""
        wins = self.windows
        for _ in range(k % 4):
            wins = tuple(tuple(ROT90[i] for i in w) for w in wins)
        return KernelSchema(
            name or f"{self.name}@rot{k % 4}", self.mode, wins, self.guard, self.floor_at_ref, self.allow_center
        )

    def window_set(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(w) for w in self.windows)


def _k(name, mode, windows, guard=Guard.NONE):
    return KernelSchema(name, mode, tuple(tuple(w) for w in windows), guard)


E, C = Mode.EXPAND, Mode.CONTRACT
GE, GT = Guard.REF_GE, Guard.REF_GT

HULL4 = ((2, 4), (2, 6), (6, 8), (4, 8))
SIDES_123 = ((1, 2, 3), (3, 6, 9), (7, 8, 9), (1, 4, 7))
HULL8ON8 = SIDES_123 + (
    (2, 6, 8), (2, 4, 6), (4, 6, 8), (2, 4, 8),
    (2, 6, 9), (3, 6, 8), (2, 3, 4), (1, 2, 6),
    (6, 7, 8), (4, 8, 9), (2, 4, 7), (1, 4, 8),
)
HULL_OCT = (
    (4, 1, 2, 3), (1, 2, 3, 6), (2, 3, 6, 9), (3, 6, 9, 8),
    (6, 9, 8, 7), (9, 8, 7, 4), (8, 7, 4, 1), (7, 4, 1, 2),
)
RING = (1, 2, 3, 4, 6, 7, 8, 9)

_CATALOG = [
    _k("convex_hull4", E, HULL4),
    _k("convex_hull8on8", E, HULL8ON8),
    _k("expand_123_369_789_147", E, SIDES_123),
    _k("convex_hull_oct", E, HULL_OCT),
    _k("minconvex_hull4", C, HULL4, GT),
    _k("minconvex_123_369_789_147", C, SIDES_123, GT),
    _k("minconvex_hull_oct", C, HULL_OCT, GT),
    _k("minconvex_hull8on8", C, HULL8ON8, GT),
    _k("expand_1234_1236", E, [(1, 2, 3, 4), (1, 2, 3, 6)]),
    _k("expand_4789_6789", E, [(4, 7, 8, 9), (6, 7, 8, 9)]),
    _k("expand_1247_1478", E, [(1, 2, 4, 7), (1, 4, 7, 8)]),
    _k("expand_2369_3689", E, [(2, 3, 6, 9), (3, 6, 8, 9)]),
    _k("expand_369", E, [(3, 6, 9)]),
    _k("expand_689", E, [(6, 8, 9)]),
    _k("expand_147", E, [(1, 4, 7)]),
    _k("expand_247_148", E, [(2, 4, 7), (1, 4, 8)]),
    _k("clean_48_68", C, [(4, 8), (6, 8)], GT),
    _k("clean_46", C, [(4,), (6,)], GT),
    _k("clean_28", C, [(2,), (8,)], GT),
    _k("clean_all8", C, [(i,) for i in RING], GT),
    _k("ray_2", E, [(2,)]),
    _k("ray_12", E, [(1,), (2,)]),
    _k("ray_half", E, [(4,), (1,), (2,), (3,), (6,)]),
    _k("ray2_2", E, [(2,)], GE),
    _k("ray_268", E, [(2,), (6,), (8,)], GE),
    _k("ray_468", E, [(4,), (6,), (8,)], GE),
    _k("rayanti_8", C, [(8,)], GT),
]

CATALOG: dict[str, KernelSchema] = {k.name: k for k in _CATALOG}

# A variant listing of convex_hull8on8 has d36 = min(e5, e6, e7).  That
# window contains the center, so it can never raise e5; the registry uses
# the symmetric {6, 7, 8} instead.
D36_FIXED = (6, 7, 8)
D36_LITERAL = (5, 6, 7)


def hull8on8_literal() -> KernelSchema:
    """convex_hull8on8 in its variant form, with the center-including d36 window."""
    wins = tuple(D36_LITERAL if w == D36_FIXED else w for w in HULL8ON8)
    return KernelSchema("convex_hull8on8_literal", Mode.EXPAND, wins, allow_center=True)


ALIASES = {
    "convex_hull": "convex_hull_oct",
    "minconvex_hull": "minconvex_hull_oct",
    "clean_123456789": "clean_all8",
    "_clean_123456789": "clean_all8",
    "clean_12346789": "clean_all8",
    "_clean_12346789": "clean_all8",
    "expand_367": "expand_369",
}


def kernel_names(include_aliases: bool = False) -> list[str]:
    names = list(CATALOG)
    if include_aliases:
        names += sorted(ALIASES)
    return names


def lookup_kernel(name: str) -> KernelSchema:
    """Catalog entry by name or alias; a leading underscore is ignored."""
    key = name
    if key not in CATALOG and key not in ALIASES and key.startswith("_"):
        key = key[1:]
    key = ALIASES.get(key, key)
    try:
        return CATALOG[key]
    except KeyError:
        known = ", ".join(kernel_names(include_aliases=True))
        raise KeyError(f"unknown kernel {name!r}; known kernels: {known}") from None


def eval_kernel(schema: KernelSchema, n: Neighborhood, ref_center: int | None = None) -> int:
    """One application of ``schema`` at a single cell."""
    if schema.needs_ref and ref_center is None:
        raise UsageError(f"{schema.name} is guarded and needs a reference value")
    e5 = n[5]
    if schema.guard is Guard.REF_GT and not e5 > ref_center:
        return e5
    if schema.guard is Guard.REF_GE and not e5 >= ref_center:
        return e5
    if schema.mode is Mode.EXPAND:
        out = max(e5, max(min(n[i] for i in w) for w in schema.windows))
    else:
        out = min(e5, min(max(n[i] for i in w) for w in schema.windows))
        if schema.needs_ref and schema.floor_at_ref:
            out = max(out, ref_center)
    return out
