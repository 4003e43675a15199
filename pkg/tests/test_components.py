import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import ndimage

from dalescope.components import extract_component, label_components, label_mask
from dalescope.grid import Grid, UsageError


@pytest.fixture
def ac_grid():
    # A at (0,0),(1,0),(1,1); C at (2,2),(2,3),(3,2)
    cells = np.zeros((4, 4), dtype=np.int32)
    cells[[0, 1, 1], [0, 0, 1]] = 1
    cells[[2, 2, 3], [2, 3, 2]] = 2
    return Grid(cells, levels=4)


@pytest.mark.parametrize("conn, count", [(4, 2), ("x", 3), (8, 1)])
def test_ac_counts(ac_grid, conn, count):
    assert label_components(ac_grid, conn).count == count


def test_extract_first(ac_grid):
    m = label_components(ac_grid, 4)
    out = extract_component(ac_grid, m, 1)
    assert sorted(zip(*np.nonzero(out.cells))) == [(0, 0), (1, 0), (1, 1)]
    assert label_components(out, 4).count == 1


def test_extract_out_of_range():
    g = Grid.zeros(3, 3)
    m = label_components(g)
    assert m.count == 0
    with pytest.raises(UsageError):
        extract_component(g, m, 1)


def test_bad_connectivity(ac_grid):
    with pytest.raises(UsageError):
        label_components(ac_grid, 6)


def test_first_encounter_order():
    g = Grid.from_rows([[0, 0, 1], [1, 0, 0], [0, 0, 1]], levels=2)
    assert label_components(g, 4).labels.tolist() == [[0, 0, 1], [2, 0, 0], [0, 0, 3]]


def test_background_value():
    g = Grid.from_rows([[5, 5, 3], [5, 3, 5]], levels=8)
    m = label_components(g, 4, background=5)
    assert m.count == 2 and m.background == 5


def test_json_and_label_grid(ac_grid):
    m = label_components(ac_grid, 4)
    assert m.to_json() == {"count": 2, "connectivity": "4", "background": 0}
    assert m.label_grid().levels == 3
    assert m.areas().tolist() == [10, 3, 3]


binary = st.tuples(st.integers(1, 9), st.integers(1, 9)).flatmap(lambda s: arrays(bool, s))


@given(binary)
def test_matches_scipy(mask):
    four, n4 = ndimage.label(mask)
    eight, n8 = ndimage.label(mask, structure=np.ones((3, 3)))
    m4 = label_mask(mask, 4)
    m8 = label_mask(mask, 8)
    assert (m4.count, m8.count) == (n4, n8)
    # same partition up to renaming
    for ours, theirs in ((m4.labels, four), (m8.labels, eight)):
        pairs = set(zip(ours[mask].tolist(), theirs[mask].tolist()))
        assert len(pairs) == len({a for a, _ in pairs}) == len({b for _, b in pairs})


@given(binary)
def test_partition_and_regime_order(mask):
    g = Grid(mask.astype(np.int32), 2)
    counts = {}
    for conn in (4, "x", 8):
        m = label_components(g, conn)
        assert np.array_equal(m.labels > 0, mask)
        assert set(np.unique(m.labels[mask]).tolist()) == set(range(1, m.count + 1))
        counts[str(conn)] = m.count
    assert counts["8"] <= counts["4"] and counts["8"] <= counts["x"]
