import io
import json
from fractions import Fraction

import pandas as pd
import pytest

from app.main_cli import MainCLI, resolve_twist
from app.services.builders import matrix_algebra, resolve_builtin
from app.services.data_manager import DataManager
from app.services.errors import ParseError


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = MainCLI(stdout=out, stderr=err).run(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_analyze_matrix_trace_form():
    code, out, _ = run("analyze", "--builtin", "matrix:2", "--terms", "4", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["dims"] == ["2", "4", "8", "16"]
    assert data["classification"]["symmetric"] is True
    assert data["classification"]["special"] is False
    assert data["quasispecial_scale"] == "2"
    assert "elapsed_seconds" not in data


def test_analyze_twisted_group_algebra():
    code, out, _ = run("analyze", "--builtin", "group:s3", "--twist", "(12)", "--terms", "4")
    assert code == 0
    assert "dims:        0, 2, 0, 72" in out


def test_twist_command_requires_a_twist():
    code, _, _ = run("twist", "--builtin", "group:s3")
    assert code == 2
    code, out, _ = run("twist", "--builtin", "group:s3", "--twist", "r", "--terms", "4")
    assert code == 0 and "0, 2, 0, 72" in out


def test_output_is_deterministic():
    first = run("analyze", "--builtin", "taft:3", "--format", "json")
    second = run("analyze", "--builtin", "taft:3", "--format", "json")
    assert first == second


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--builtin", "matrix:x"],
        ["analyze"],
        ["analyze", "--builtin", "matrix:2", "--terms", "0"],
        ["analyze", "--builtin", "matrix:2", "--format", "xlsx"],
        ["analyze", "--builtin", "group:s3", "--twist", "r +"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == 2


def test_error_message_goes_to_stderr():
    code, out, err = run("analyze", "--builtin", "sl3:2")
    assert code == 2
    assert out == ""
    assert err.startswith("Error:")


def test_singular_twist_is_degenerate():
    code, _, err = run("analyze", "--builtin", "group:s3", "--twist", "e - rs")
    assert code == 3
    assert "Error:" in err


def test_degenerate_form_file(tmp_path):
    manager = DataManager(str(tmp_path))
    algebra = matrix_algebra(2)
    path = manager.save_algebra(str(tmp_path / "zero.json"), algebra, [algebra.field.zero] * 4)
    code, _, _ = run("analyze", "--input", path)
    assert code == 3


def test_file_without_form(tmp_path):
    path = DataManager(str(tmp_path)).save_algebra(str(tmp_path / "m2.json"), matrix_algebra(2))
    code, _, err = run("analyze", "--input", path)
    assert code == 2
    assert "form" in err


def test_analyze_file_with_form(tmp_path, m2_diag):
    path = DataManager(str(tmp_path)).save_algebra(str(tmp_path / "m2.json"), m2_diag.algebra, m2_diag.eps)
    code, out, _ = run("analyze", "--input", path, "--terms", "2", "--format", "json")
    assert code == 0
    assert json.loads(out)["dims"] == ["3", "9/2"]


def test_series_command():
    code, out, _ = run("series", "--builtin", "matrix:2")
    assert code == 0
    assert out.strip() == "(2) / (1 + -2*x)"


def test_xlsx_output(tmp_path):
    target = str(tmp_path / "report.xlsx")
    code, out, _ = run("analyze", "--builtin", "matrix:2", "--format", "xlsx", "--output", target)
    assert code == 0 and out == ""
    sheets = pd.read_excel(target, sheet_name=None)
    assert {"summary", "dims", "nakayama"} <= set(sheets)


def test_builtin_listing():
    code, out, _ = run("builtin", "--list")
    assert code == 0
    assert "uqsl2:n" in out and "group:s3" in out
    code, out, _ = run("builtin", "--format", "json")
    assert "taft:n" in json.loads(out)


def test_spider_command():
    code, out, _ = run("spider", "--builtin", "matrix:2", "--count", "10", "--max-gens", "4", "--format", "json")
    assert code == 0
    summary = json.loads(out)
    assert summary["total"] == summary["passed"] == 10
    assert "first_failure" not in summary


def test_spider_rejects_bad_limits():
    assert run("spider", "--builtin", "matrix:2", "--count", "0")[0] == 2
    assert run("spider", "--builtin", "matrix:2", "--max-width", "1")[0] == 2


def test_verify_lemma_suite_on_one_builtin():
    code, out, _ = run("verify", "--suite", "lemma", "--builtin", "taft:3")
    assert code == 0
    assert "checks passed" in out


def test_verify_rejects_unknown_builtins():
    assert run("verify", "--suite", "lemma", "--builtin", "nope:1")[0] == 2


def test_resolve_twist_forms():
    builtin = resolve_builtin("group:s3")
    algebra = builtin.structure.algebra
    r = algebra.basis_element("r")
    assert resolve_twist("(12)", algebra, builtin.namespace) == r
    assert resolve_twist('[0, 1, 0, 0, 0, "1/2"]', algebra, builtin.namespace) == r + algebra.basis_element("sr") * Fraction(1, 2)
    assert resolve_twist("2r", algebra, builtin.namespace) == r * 2
    with pytest.raises(ParseError):
        resolve_twist("[1, 0]", algebra, builtin.namespace)
    with pytest.raises(ParseError):
        resolve_twist("[1, 0, 0, 0, 0, 0.5]", algebra, builtin.namespace)
