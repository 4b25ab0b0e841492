# src/app/services/data_manager.py
import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from app.config import CONFIG
from app.services.algebra import Algebra, make_algebra
from app.services.errors import ParseError, WorkbenchError
from app.services.scalars import FieldSpec, Scalar, format_scalar, parse_scalar

logger = logging.getLogger(__name__)


@dataclass
class AlgebraFile:
    """Contents of a JSON algebra file.

    Attributes:
        path: Where the file was read from.
        algebra: The validated algebra.
        form: eps on the basis when the file carries a `form`, else None.
    """

    path: str
    algebra: Algebra
    form: Optional[List[Scalar]]


class DataManager:
    """Reads algebra definitions and writes analysis results.

    Algebra files are JSON documents with the keys `field`, `dimension`,
    `basis_labels`, `unit`, `structure` (sparse [i, j, k, scalar] quadruples,
    0-based) and an optional `form`. Results go to JSON, plain text or an
    Excel workbook written through pandas and openpyxl.

    Attributes:
        output_dir: Directory that relative output paths are resolved against.
    """

    REQUIRED_KEYS = ("field", "dimension", "basis_labels", "unit", "structure")

    def __init__(self, output_dir: Optional[str] = None) -> None:
        self.output_dir: str = output_dir or os.getcwd()

    # Loading ========================================================================

    def load_algebra(self, path: str) -> AlgebraFile:
        """Loads and validates an algebra file.

        Args:
            path: Location of the JSON file.

        Returns:
            The parsed algebra together with its optional form.

        Raises:
            ParseError: If the file is missing, is not JSON or violates the format.
            NotAssociative, BadUnit: If the structure constants are invalid.
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                data: Dict[str, Any] = json.load(f)
        except FileNotFoundError:
            raise ParseError(f"algebra file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ParseError(f"{path} is not valid JSON: {e.msg}", e.pos) from None
        algebra, form = self.parse_algebra(data)
        logger.debug("loaded %d-dimensional algebra from %s", algebra.dim, path)
        return AlgebraFile(path, algebra, form)

    def parse_algebra(self, data: Mapping[str, Any]) -> Tuple[Algebra, Optional[List[Scalar]]]:
        """Builds (algebra, form) from an already decoded JSON document."""
        if not isinstance(data, Mapping):
            raise ParseError("algebra file must hold a JSON object")
        missing = [key for key in self.REQUIRED_KEYS if key not in data]
        if missing:
            raise ParseError(f"algebra file lacks {', '.join(missing)}")
        try:
            field = FieldSpec.from_json(data["field"])
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"bad field description: {e}") from None

        dim = data["dimension"]
        labels = [str(label) for label in data["basis_labels"]]
        if not isinstance(dim, int) or dim < 1:
            raise ParseError("dimension must be a positive integer")
        if len(labels) != dim or len(set(labels)) != dim:
            raise ParseError(f"basis_labels must list {dim} distinct labels")

        unit = self._scalars(data["unit"], field, dim, "unit")
        structure: Dict[tuple, Dict[int, Scalar]] = {}
        for n, quad in enumerate(data["structure"]):
            if not isinstance(quad, (list, tuple)) or len(quad) != 4:
                raise ParseError(f"structure entry {n} must be [i, j, k, scalar]", n)
            i, j, k, value = quad
            if not all(isinstance(x, int) and 0 <= x < dim for x in (i, j, k)):
                raise ParseError(f"structure entry {n} has an index outside 0..{dim - 1}", n)
            scalar = parse_scalar(str(value), field)
            bucket = structure.setdefault((i, j), {})
            bucket[k] = bucket[k] + scalar if k in bucket else scalar

        form = None
        if data.get("form") is not None:
            form = self._scalars(data["form"], field, dim, "form")
        algebra = make_algebra(field, labels, structure, unit)
        return algebra, form

    @staticmethod
    def _scalars(values: Sequence[Any], field: FieldSpec, dim: int, what: str) -> List[Scalar]:
        if not isinstance(values, (list, tuple)) or len(values) != dim:
            raise ParseError(f"{what} must list {dim} scalars")
        return [parse_scalar(str(v), field) for v in values]

    def save_algebra(self, path: str, algebra: Algebra, form: Optional[Sequence[Scalar]] = None) -> str:
        """Writes an algebra (and optionally a form) in the file format above."""
        data: Dict[str, Any] = {
            "field": algebra.field.to_json(),
            "dimension": algebra.dim,
            "basis_labels": list(algebra.labels),
            "unit": [format_scalar(c) for c in algebra.unit],
            "structure": [[i, j, k, format_scalar(c)] for i, j, k, c in algebra.structure_entries()],
        }
        if form is not None:
            data["form"] = [format_scalar(c) for c in form]
        target = self._resolve(path)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
        return target

    # Exporting ======================================================================

    def _resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.output_dir, path)

    def write_text(self, path: str, text: str) -> str:
        target = self._resolve(path)
        with open(target, "w", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")
        return target

    def write_workbook(self, path: str, frames: Mapping[str, pd.DataFrame]) -> str:
        """Saves one sheet per DataFrame to an .xlsx workbook.

        Raises:
            WorkbenchError: If the workbook cannot be written.
        """
        target = self._resolve(path)
        try:
            with pd.ExcelWriter(target, engine="openpyxl") as writer:
                for sheet, frame in frames.items():
                    frame.to_excel(writer, sheet_name=sheet[:31], index=sheet == "nakayama")
        except (OSError, ValueError) as e:
            raise WorkbenchError(f"could not write {target}: {e}") from None
        logger.info("wrote %d sheet(s) to %s", len(frames), target)
        return target

    def export(self, path: str, fmt: str, text: str, frames: Mapping[str, pd.DataFrame]) -> str:
        """Writes a rendered result in the requested format."""
        if fmt not in CONFIG.REPORT_FORMATS:
            raise ParseError(f"unknown format {fmt!r}")
        if fmt == "xlsx":
            return self.write_workbook(path, frames)
        return self.write_text(path, text)
