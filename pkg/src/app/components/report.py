# components/report.py
import json
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List

import pandas as pd

from app.config import CONFIG
from app.services.errors import ConsistencyError
from app.services.frobenius import FrobeniusStructure, classify, hilbert_series, nakayama, rational_closed_form
from app.services.scalars import format_scalar
from app.services.suites import SuiteCheck


@dataclass
class Report:
    """Analysis of one Frobenius structure, ready for rendering.

    Every number is kept as its exact scalar string; nothing is converted to
    a decimal.

    Attributes:
        description: What was analyzed (builtin name or input file, plus twist).
        dimension: Dimension of the algebra.
        field: Ground field name.
        classification: Flags and scalars from `classify`.
        dims: dim_0 .. dim_{J-1}.
        series: The rational closed form as numerator/denominator strings.
        series_text: Human-readable closed form.
        labels: Basis labels, for the Nakayama table.
        nakayama: Nakayama matrix entries; column i is zeta(e_i).
        elapsed: Wall-clock seconds spent computing the report.
    """

    description: str
    dimension: int
    field: str
    classification: Dict[str, object]
    dims: List[str]
    series: Dict[str, List[str]]
    series_text: str
    labels: List[str]
    nakayama: List[List[str]]
    elapsed: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_structure(cls, description: str, F: FrobeniusStructure, terms: int = CONFIG.DEFAULT_TERMS) -> "Report":
        """Runs the full analysis of F.

        Raises:
            ConsistencyError: If the closed form does not reproduce the listed
                dimensions.
        """
        started = time.perf_counter()
        kind = classify(F)
        dims = hilbert_series(F, terms)
        closed = rational_closed_form(F)
        if closed.expand(terms) != dims:
            raise ConsistencyError("closed form disagrees with the listed F-dimensions")
        Z = nakayama(F)
        return cls(
            description=description,
            dimension=F.dim,
            field=str(F.field),
            classification=kind.to_json(),
            dims=[format_scalar(d) for d in dims],
            series=closed.to_json(),
            series_text=str(closed),
            labels=list(F.algebra.labels),
            nakayama=[[format_scalar(x) for x in row] for row in Z.to_lists()],
            elapsed=time.perf_counter() - started,
        )

    @classmethod
    def series_only(cls, description: str, F: FrobeniusStructure) -> "Report":
        """Closed form alone, for `fwb series`."""
        started = time.perf_counter()
        closed = rational_closed_form(F)
        return cls(
            description=description,
            dimension=F.dim,
            field=str(F.field),
            classification={},
            dims=[],
            series=closed.to_json(),
            series_text=str(closed),
            labels=list(F.algebra.labels),
            nakayama=[],
            elapsed=time.perf_counter() - started,
        )

    def to_json(self, include_timing: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "input": self.description,
            "dimension": self.dimension,
            "field": self.field,
        }
        if self.classification:
            data["classification"] = self.classification
            data["quasispecial_scale"] = self.classification["quasispecial"]
            data["counit_scale"] = self.classification["counit_scale"]
        if self.dims:
            data["dims"] = self.dims
        data["closed_form"] = self.series
        if self.nakayama:
            data["nakayama"] = self.nakayama
        data.update(self.extra)
        if include_timing:
            data["elapsed_seconds"] = round(self.elapsed, 3)
        return data

    def render_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_json(include_timing), indent=2, ensure_ascii=False)

    def render_text(self, include_timing: bool = False) -> str:
        lines = [
            f"Input:       {self.description}",
            f"Algebra:     dimension {self.dimension} over {self.field}",
        ]
        if self.classification:
            c = self.classification
            lines += [
                f"Symmetric:   {_yes(c['symmetric'])}",
                f"Weakly sym.: {_yes(c['weakly_symmetric'])}",
                f"Special:     {_yes(c['special'])}",
                f"Quasispec.:  {c['quasispecial'] if c['quasispecial'] is not None else 'no'}",
                f"eps(1):      {c['counit_scale']}",
                f"dim_1:       {c['fdim']}",
            ]
        if self.dims:
            lines.append(f"dims:        {', '.join(self.dims)}")
        lines.append(f"dim_x:       {self.series_text}")
        if self.nakayama:
            lines.append("Nakayama:")
            lines.extend(_matrix_lines(self.labels, self.nakayama))
        for key, value in self.extra.items():
            lines.append(f"{key}: {value}")
        if include_timing:
            lines.append(f"Time:        {self.elapsed:.3f}s")
        return "\n".join(lines)

    def to_frames(self) -> Dict[str, pd.DataFrame]:
        """Sheets for the Excel export."""
        summary = {"input": self.description, "dimension": self.dimension, "field": self.field}
        summary.update({k: "" if v is None else str(v) for k, v in self.classification.items()})
        summary["closed_form"] = self.series_text
        summary["elapsed_seconds"] = round(self.elapsed, 3)
        frames = {
            "summary": pd.DataFrame({"key": list(summary), "value": [str(v) for v in summary.values()]}),
        }
        if self.dims:
            frames["dims"] = pd.DataFrame({"j": range(len(self.dims)), "dim_j": self.dims})
        if self.nakayama:
            frames["nakayama"] = pd.DataFrame(self.nakayama, index=self.labels, columns=self.labels)
        return frames


def _yes(flag: object) -> str:
    return "yes" if flag else "no"


def _matrix_lines(labels: List[str], rows: List[List[str]], limit: int = 12) -> List[str]:
    if len(labels) > limit:
        return [f"  {len(labels)}x{len(labels)} matrix (use --format json)"]
    frame = pd.DataFrame(rows, index=labels, columns=labels)
    return ["  " + line for line in frame.to_string().splitlines()]


def checks_frame(checks: List[SuiteCheck]) -> pd.DataFrame:
    return pd.DataFrame([c.to_json() for c in checks], columns=["id", "expected", "actual", "passed"])


def render_checks_text(checks: List[SuiteCheck], only_failures: bool = False) -> str:
    shown = [c for c in checks if not c.passed] if only_failures else checks
    lines = []
    for c in shown:
        mark = "PASS" if c.passed else "FAIL"
        lines.append(f"{mark}  {c.id}")
        if not c.passed:
            lines.append(f"      expected {c.expected}")
            lines.append(f"      actual   {c.actual}")
    passed = sum(1 for c in checks if c.passed)
    lines.append(f"{passed}/{len(checks)} checks passed")
    return "\n".join(lines)


def render_checks_json(checks: List[SuiteCheck]) -> str:
    return json.dumps(
        {
            "total": len(checks),
            "passed": sum(1 for c in checks if c.passed),
            "failed": [c.id for c in checks if not c.passed],
            "checks": [c.to_json() for c in checks],
        },
        indent=2,
        ensure_ascii=False,
    )
