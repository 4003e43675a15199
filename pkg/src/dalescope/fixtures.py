"""Small hand-drawn test images.

Glyphs are drawn with ``#`` for the stroke level, ``+`` for a slightly darker
stroke and ``.`` for background, then padded with a background margin.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .grid import Grid, pad

STROKE = 240
DARK = 200
MARGIN = 3

GLYPHS = {
    "O": """
        ..#####..
        .#######.
        ###...###
        ##.....##
        ##.....##
        ##.....##
        ###...###
        .#######.
        ..#####..
    """,
    "C": """
        ..######
        .#######
        ###.....
        ##......
        ##......
        ##......
        ###.....
        .#######
        ..######
    """,
    "E": """
        ########
        ########
        ##......
        ##......
        ########
        ########
        ##......
        ##......
        ########
        ########
    """,
    "H": """
        ##....##
        ##....##
        ##....##
        ########
        ########
        ##....##
        ##....##
        ##....##
    """,
    "U": """
        ##....##
        ##....##
        ##....##
        ##....##
        ##....##
        ###..###
        .######.
        ..####..
    """,
    "A": """
        ....###....
        ...#####...
        ...##.##...
        ..##...##..
        ..##...##..
        .++++++++#.
        .+++++++++.
        ##.......##
        ##.......##
        ##.......##
        ##.......##
    """,
}

# pinwheel cross: a plus whose arm tips are bent clockwise
CROSS = """
    .....####
    .....#...
    .....#...
    .....#...
    #########
    ...#.....
    ...#.....
    ...#.....
    ####.....
"""

VBAR = """
    ##
    ##
    ##
    ##
    ##
    ##
    ##
    ##
"""

HIEROGLYPH = """
    ..##########..........
    ..##########..........
    ..##......##....####..
    ..##..##..##....####..
    ..##..##..##......##..
    ..##......##......##..
    ..##########......##..
    ..##########......##..
    ..........##......##..
    ####################..
    ####################..
    ....##....##....##....
    ....##....##....##....
    ...##.....##.....##...
    ..##......##......##..
    .##.......##.......##.
"""


def parse_ascii(art: str, stroke: int = STROKE, dark: int = DARK) -> np.ndarray:
    rows = [line.strip() for line in art.strip("\n").splitlines() if line.strip()]
    width = max(len(r) for r in rows)
    out = np.zeros((len(rows), width), dtype=np.int32)
    for i, row in enumerate(rows):
        for j, ch in enumerate(row):
            if ch == "#":
                out[i, j] = stroke
            elif ch == "+":
                out[i, j] = dark
    return out


def ascii_grid(art: str, margin: int = MARGIN, levels: int = 256, **kw) -> Grid:
    return pad(Grid(parse_ascii(art, **kw), levels), margin)


def glyph(name: str, margin: int = MARGIN) -> Grid:
    return ascii_grid(GLYPHS[name], margin)


def glyph_sheet(names=("O", "C", "E", "H", "U", "A"), gap: int = 3, margin: int = MARGIN) -> Grid:
    """Glyphs side by side, bottoms aligned, ``gap`` background columns apart."""
    arrays = [parse_ascii(GLYPHS[n]) for n in names]
    height = max(a.shape[0] for a in arrays)
    cols = []
    for i, a in enumerate(arrays):
        block = np.zeros((height, a.shape[1]), dtype=np.int32)
        block[height - a.shape[0]:, :] = a
        cols.append(block)
        if i < len(arrays) - 1:
            cols.append(np.zeros((height, gap), dtype=np.int32))
    return pad(Grid(np.hstack(cols)), margin)


def smooth_face(size: int = 48) -> Grid:
    """Synthetic smooth portrait-like image: head, eyes, nose, mouth as soft blobs."""
    y, x = np.mgrid[0:size, 0:size].astype(float) / (size - 1)

    def blob(cy, cx, ry, rx, amp):
        return amp * np.exp(-(((y - cy) / ry) ** 2 + ((x - cx) / rx) ** 2))

    img = blob(0.5, 0.5, 0.33, 0.27, 200.0)
    img -= blob(0.40, 0.36, 0.05, 0.07, 110.0)
    img -= blob(0.40, 0.64, 0.05, 0.07, 110.0)
    img += blob(0.55, 0.5, 0.10, 0.04, 40.0)
    img -= blob(0.72, 0.5, 0.035, 0.14, 90.0)
    img += 30.0 * np.exp(-((y - 0.15) / 0.25) ** 2)
    return Grid(np.clip(np.rint(img), 0, 255).astype(np.int32))


def gradient_with_bump(height: int = 24, width: int = 32) -> Grid:
    """Monotone ramp from the border toward a central bump, plus an inner pit."""
    y, x = np.mgrid[0:height, 0:width]
    cy, cx = (height - 1) / 2, (width - 1) / 2
    dist = np.maximum(np.abs(y - cy) / cy, np.abs(x - cx) / cx)
    img = 40 + 160 * (1 - dist)
    pit = (np.abs(y - cy) <= 2) & (np.abs(x - cx - 6) <= 2)
    img = np.where(pit, 30, img)
    return Grid(np.rint(img).astype(np.int32))


DATA_FILES = {
    "glyph_sheet.pgm": glyph_sheet,
    "hieroglyph.pgm": lambda: ascii_grid(HIEROGLYPH),
    "face.pgm": smooth_face,
    "gradient.pgm": gradient_with_bump,
    "cross.pgm": lambda: ascii_grid(CROSS, margin=2),
    **{f"glyph_{n}.pgm": (lambda n=n: glyph(n)) for n in GLYPHS},
}


def data_path(name: str):
    """Path of a bundled PGM file."""
    return resources.files("dalescope") / "data" / name
