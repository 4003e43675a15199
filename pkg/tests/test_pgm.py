import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dalescope.fixtures import DATA_FILES, data_path
from dalescope.grid import Grid
from dalescope.pgm import PGMError, decode, encode, read_pgm, write_pgm


@st.composite
def pgm_grids(draw):
    levels = draw(st.sampled_from([2, 16, 256, 1024, 65536]))
    shape = draw(st.tuples(st.integers(1, 7), st.integers(1, 7)))
    cells = draw(arrays(np.int32, shape, elements=st.integers(0, levels - 1)))
    return Grid(cells, levels)


@given(pgm_grids(), st.booleans())
def test_roundtrip_is_exact(g, binary):
    assert decode(encode(g, binary)) == g


def test_p2_with_comments():
    data = b"P2\n# a comment\n3 2 # trailing\n9\n0 1 2\n3 4 9\n"
    g = decode(data)
    assert g.levels == 10
    assert g.cells.tolist() == [[0, 1, 2], [3, 4, 9]]


def test_p5_two_byte_samples_are_big_endian():
    data = b"P5 2 1 1000\n" + bytes([0x01, 0x02, 0x00, 0x05])
    assert decode(data).cells.tolist() == [[258, 5]]


@pytest.mark.parametrize(
    "data",
    [
        b"",
        b"P6\n1 1\n255\n\x00\x00\x00",
        b"P5\n2 2\n255\n\x00",
        b"P2\n2 1\n5\n1 9\n",
        b"P2\n2 1\n5\n1 x\n",
        b"P2\n0 1\n5\n",
        b"P2\n1 1\n70000\n1\n",
    ],
)
def test_bad_input_raises(data):
    with pytest.raises(PGMError):
        decode(data)


def test_file_roundtrip(tmp_path):
    g = Grid.from_rows([[0, 200], [255, 7]])
    path = tmp_path / "x.pgm"
    write_pgm(path, g)
    assert read_pgm(path) == g
    write_pgm(path, g, binary=False)
    assert path.read_bytes().startswith(b"P2")
    assert read_pgm(path) == g


@pytest.mark.parametrize("name", sorted(DATA_FILES))
def test_bundled_files_match_their_generators(name):
    with data_path(name).open("rb") as fh:
        assert decode(fh.read()) == DATA_FILES[name]()
