"""Whole-pipeline runs, the JSON report, and the flat-file artifacts."""

import csv
import json
import os

import pytest

from branchknot import (
    BraidWord,
    GenericityFailure,
    build_report,
    cyclically_equal,
    serialize_report,
    torus_alexander,
)
from branchknot.pipeline import write_artifacts, write_double_points_csv

from conftest import make_config, torus_config


def test_trefoil_pipeline_end_to_end(trefoil_run):
    res = trefoil_run.result
    assert len(res.double_points) == 1
    assert res.double_points[0].sign == 1
    assert cyclically_equal(res.traced.word, BraidWord.from_text("s1 s1 s1", 2))
    assert res.exponent_sum == 3
    assert res.predicted_exponent_sum == 3
    assert res.euler_characteristic == -1
    assert res.genus == 1
    assert res.is_knot
    assert res.alexander == torus_alexander(2, 3)
    assert res.validation.passed
    assert res.genericity.passed


def test_report_is_deterministic(trefoil_run):
    text1 = serialize_report(trefoil_run.result)
    text2 = serialize_report(trefoil_run.result)
    assert text1 == text2
    assert json.loads(text1) == build_report(trefoil_run.result)


def test_report_schema(trefoil_run):
    report = build_report(trefoil_run.result)
    assert set(report) == {
        "config", "perturbation_used", "double_points", "genericity",
        "loop", "braid", "band_form", "alexander",
    }
    assert report["config"]["n"] == 2
    assert report["config"]["h"] == "1 * w^3"
    assert report["braid"]["strands"] == 2
    assert report["braid"]["is_knot"] is True
    assert report["braid"]["exponent_sum"] == 3
    [dp] = report["double_points"]
    assert dp["sign"] == 1
    assert dp["base_point"] == pytest.approx([-0.1, 0.0], abs=1e-9)
    assert report["band_form"]["exponent_sum_identity"] is True
    assert report["band_form"]["genus"] == "1"
    assert report["alexander"]["coefficients"] == {"-1": 1, "0": -1, "1": 1}
    assert report["alexander"]["symmetric"] is True
    # The report must survive a strict JSON round trip.
    assert json.loads(json.dumps(report)) == report


def test_degenerate_regime_raises_genericity_failure():
    from branchknot.pipeline import run_pipeline

    cfg = make_config(2, (), lam=0.1, mu=0.1)
    with pytest.raises(GenericityFailure):
        run_pipeline(cfg)


def test_double_points_csv(trefoil_run, tmp_path):
    path = tmp_path / "dp.csv"
    with open(path, "w", newline="") as fh:
        write_double_points_csv(trefoil_run.result.double_points, fh)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "index", "pairing",
        "w1_re", "w1_im", "w2_re", "w2_im",
        "base_re", "base_im", "height_re", "height_im",
        "sign", "residual", "transversality_margin",
    ]
    assert len(rows) == 2
    record = rows[1]
    assert record[0] == "0" and record[1] == "1" and record[10] == "1"
    # repr round trip keeps every digit.
    assert float(record[6]) == complex(trefoil_run.result.double_points[0].image.z1).real


def test_write_artifacts(trefoil_run, tmp_path):
    outdir = tmp_path / "out"
    written = write_artifacts(trefoil_run.result, outdir)
    assert written == [
        "report.json", "double_points.csv", "braid_word.txt", "disk.svg", "braid.svg",
    ]
    for name in written:
        assert (outdir / name).stat().st_size > 0
    word_text = (outdir / "braid_word.txt").read_text().strip()
    assert word_text == trefoil_run.result.traced.word.to_text()
    report = json.loads((outdir / "report.json").read_text())
    assert report == build_report(trefoil_run.result)
    svg = (outdir / "disk.svg").read_text()
    assert svg.lstrip().startswith("<?xml")
    assert 'version="1.1"' in svg


def test_write_artifacts_without_figures(trefoil_run, tmp_path):
    outdir = tmp_path / "bare"
    written = write_artifacts(trefoil_run.result, outdir, figures=False)
    assert written == ["report.json", "double_points.csv", "braid_word.txt"]
    assert not os.path.exists(outdir / "disk.svg")


def test_torus_35_invariants(torus_run):
    res = torus_run(3, 5).result
    assert len(res.double_points) == 4
    assert res.exponent_sum == 10
    assert res.genus == 4
    assert res.alexander == torus_alexander(3, 5)
    assert res.alexander is not None and res.alexander.is_symmetric()
