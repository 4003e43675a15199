import json

import numpy as np
import pytest

from dalescope.fixtures import DATA_FILES
from dalescope.grid import Grid, UsageError
from dalescope.pipelines import PIPELINES, PipelineSpec, StageSpec, lookup_pipeline, run_pipeline, write_pipeline

FIXTURE = {
    "alphabet": "glyph_sheet.pgm",
    "hieroglyph": "hieroglyph.pgm",
    "face": "face.pgm",
    "waterfall-border": "gradient.pgm",
}
EXPECTED_FILES = {"alphabet": 7, "hieroglyph": 11, "face": 19, "waterfall-border": 3}


@pytest.fixture(scope="module")
def runs():
    return {name: run_pipeline(name, DATA_FILES[FIXTURE[name]]()) for name in PIPELINES}


@pytest.mark.parametrize("name", sorted(PIPELINES))
def test_every_stage_ok(runs, name):
    results = runs[name]
    assert len(results) == EXPECTED_FILES[name]
    for r in results:
        assert r.stats.converged, r.spec.tag
        assert r.checks or r.spec.op in ("source", "amplify"), r.spec.tag
        assert r.ok, (r.spec.tag, r.checks)


@pytest.mark.parametrize("name", sorted(PIPELINES))
def test_outputs_keep_source_shape(runs, name):
    src = DATA_FILES[FIXTURE[name]]()
    for r in runs[name]:
        assert r.grid.shape == src.shape
    assert runs[name][0].grid == src


def test_hieroglyph_lakes_nonempty(runs):
    by_tag = {r.spec.tag: r for r in runs["hieroglyph"]}
    assert (by_tag["16_2_7"].grid.cells > 0).sum() == 4
    # helper fills are folded into the difference stages
    assert "hull_extensive" in by_tag["16_2_8"].checks
    assert by_tag["16_2_8"].stats.passes > 0


def test_waterfall_border_removes_monotone_border_area(runs):
    src, fill, diff = (r.grid for r in runs["waterfall-border"])
    assert fill.cells.any() and diff.cells.any()
    assert np.array_equal(np.maximum(src.cells - fill.cells, 0), diff.cells)


def test_write(tmp_path, runs):
    path = write_pipeline("hieroglyph", runs["hieroglyph"], tmp_path, source_path="hieroglyph.pgm")
    manifest = json.loads(open(path).read())
    assert manifest["ok"] and manifest["pipeline"] == "hieroglyph"
    names = sorted(p.name for p in tmp_path.glob("*.pgm"))
    assert len(names) == 11 and "16_2_7_lakes.pgm" in names
    assert [s["file"] for s in manifest["stages"]] == [r.spec.filename for r in runs["hieroglyph"]]


def test_unknown_pipeline():
    with pytest.raises(UsageError):
        lookup_pipeline("nope")
    with pytest.raises(UsageError):
        run_pipeline("nope", Grid.zeros(3, 3))


def test_forward_reference_rejected():
    with pytest.raises(UsageError):
        PipelineSpec("bad", (StageSpec("1", "a", "minus", ("1", "0")),))
