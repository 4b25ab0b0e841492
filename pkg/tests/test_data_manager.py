import json

import pandas as pd
import pytest

from app.components.report import Report, checks_frame, render_checks_json, render_checks_text
from app.services import uqsl2 as uq
from app.services.builders import matrix_algebra
from app.services.data_manager import DataManager
from app.services.errors import NotAssociative, ParseError
from app.services.suites import SuiteCheck


@pytest.fixture
def manager(tmp_path):
    return DataManager(str(tmp_path))


def algebra_document(**overrides):
    data = {
        "field": {"kind": "rational"},
        "dimension": 2,
        "basis_labels": ["1", "x"],
        "unit": ["1", "0"],
        "structure": [[0, 0, 0, "1"], [0, 1, 1, "1"], [1, 0, 1, "1"], [1, 1, 0, "-1/2"]],
    }
    data.update(overrides)
    return data


def test_round_trip_with_form(manager, m2_diag):
    path = manager.save_algebra("m2.json", m2_diag.algebra, m2_diag.eps)
    loaded = manager.load_algebra(path)
    assert loaded.algebra.labels == m2_diag.algebra.labels
    assert list(loaded.algebra.structure_entries()) == list(m2_diag.algebra.structure_entries())
    assert loaded.form == list(m2_diag.eps)


def test_round_trip_over_a_cyclotomic_field(manager):
    taft = uq.taft(3)
    loaded = manager.load_algebra(manager.save_algebra("taft.json", taft))
    assert loaded.algebra.field == taft.field
    assert list(loaded.algebra.structure_entries()) == list(taft.structure_entries())
    assert loaded.form is None


def test_saved_file_format(manager):
    path = manager.save_algebra("m1.json", matrix_algebra(1))
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    assert data == {
        "field": {"kind": "rational"},
        "dimension": 1,
        "basis_labels": ["E11"],
        "unit": ["1"],
        "structure": [[0, 0, 0, "1"]],
    }


def test_duplicate_structure_entries_are_summed(manager):
    doc = algebra_document(structure=[[0, 0, 0, "1/2"], [0, 0, 0, "1/2"], [0, 1, 1, "1"], [1, 0, 1, "1"]])
    algebra, form = manager.parse_algebra(doc)
    assert algebra.basis(0) * algebra.basis(0) == algebra.one
    assert (algebra.basis(1) * algebra.basis(1)).is_zero()
    assert form is None


@pytest.mark.parametrize(
    "overrides",
    [
        {"dimension": 0},
        {"dimension": "2"},
        {"basis_labels": ["x", "x"]},
        {"unit": ["1"]},
        {"field": {"kind": "finite"}},
        {"field": {"kind": "cyclotomic", "order": 40}},
        {"structure": [[0, 0, 0]]},
        {"structure": [[0, 0, 2, "1"]]},
        {"structure": [[0, 0, 0, "one"]]},
        {"form": ["1"]},
    ],
)
def test_format_violations(manager, overrides):
    with pytest.raises(ParseError):
        manager.parse_algebra(algebra_document(**overrides))


def test_missing_keys_are_named(manager):
    doc = algebra_document()
    del doc["unit"]
    with pytest.raises(ParseError, match="unit"):
        manager.parse_algebra(doc)


def test_invalid_algebras_propagate(manager):
    # x x = y, x y = x, y x = 0 on the basis 1, x, y
    structure = [[0, j, j, "1"] for j in range(3)] + [[j, 0, j, "1"] for j in (1, 2)]
    structure += [[1, 1, 2, "1"], [1, 2, 1, "1"]]
    doc = algebra_document(dimension=3, basis_labels=["1", "x", "y"], unit=["1", "0", "0"], structure=structure)
    with pytest.raises(NotAssociative):
        manager.parse_algebra(doc)


def test_unreadable_files(manager, tmp_path):
    with pytest.raises(ParseError):
        manager.load_algebra(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        manager.load_algebra(str(broken))


def test_report_contents(m2_diag):
    report = Report.from_structure("matrix:2", m2_diag, terms=4)
    assert report.dims == ["3", "9/2", "27/4", "81/8"]
    data = report.to_json()
    assert data["classification"]["symmetric"] is False
    assert data["quasispecial_scale"] == "3/2"
    assert data["counit_scale"] == "3"
    assert data["closed_form"] == {"numerator": ["3"], "denominator": ["1", "-3/2"]}
    assert len(data["nakayama"]) == 4
    assert "elapsed_seconds" not in data
    assert "elapsed_seconds" in report.to_json(include_timing=True)
    text = report.render_text()
    assert "Symmetric:   no" in text
    assert "dims:        3, 9/2, 27/4, 81/8" in text
    assert "Time:" not in text


def test_workbook_export(manager, m2_diag):
    frames = Report.from_structure("matrix:2", m2_diag, terms=3).to_frames()
    path = manager.export("report.xlsx", "xlsx", "", frames)
    sheets = pd.read_excel(path, sheet_name=None)
    assert set(sheets) == {"summary", "dims", "nakayama"}
    assert list(sheets["dims"]["dim_j"].astype(str)) == ["3", "9/2", "27/4"]


def test_text_export(manager):
    path = manager.export("out.txt", "text", "hello", {})
    with open(path, encoding="utf-8") as f:
        assert f.read() == "hello\n"
    with pytest.raises(ParseError):
        manager.export("out.csv", "csv", "hello", {})


def test_check_rendering():
    checks = [SuiteCheck("a/ok", "1", "1", True), SuiteCheck("b/bad", "1", "2", False)]
    text = render_checks_text(checks)
    assert "FAIL  b/bad" in text and text.endswith("1/2 checks passed")
    assert "a/ok" not in render_checks_text(checks, only_failures=True)
    assert json.loads(render_checks_json(checks))["failed"] == ["b/bad"]
    assert list(checks_frame(checks)["passed"]) == [True, False]
