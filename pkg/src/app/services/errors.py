# services/errors.py
"""
Exception hierarchy shared by every service module.

Each error carries the witness data needed to reproduce the failure; the CLI
maps the families below onto exit codes.
"""
from typing import Any, Optional, Sequence


class WorkbenchError(Exception):
    """Root of all errors raised by the workbench services."""


# Scalars ======================================================================


class DivisionByZero(WorkbenchError, ZeroDivisionError):
    """Raised when dividing by (or inverting) an exact zero."""


class FieldMismatch(WorkbenchError):
    """Raised when two operands live over different fields."""

    def __init__(self, left: Any, right: Any) -> None:
        super().__init__(f"field mismatch: {left} vs {right}")
        self.left = left
        self.right = right


class ParseError(WorkbenchError, ValueError):
    """Raised by every text parser; `position` is a 0-based character offset."""

    def __init__(self, message: str, position: int = 0) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


# Linear algebra ===============================================================


class NoSolution(WorkbenchError):
    """The linear system is inconsistent."""


class Singular(WorkbenchError):
    """A square matrix has no inverse."""


class NotFound(WorkbenchError):
    """A vector sequence is too short to exhibit a linear dependency."""


class ShapeMismatch(WorkbenchError):
    """Operands have incompatible shapes or leg counts."""


# Algebras =====================================================================


class NotAssociative(WorkbenchError):
    """Witness triple (i, j, k) with (e_i e_j) e_k != e_i (e_j e_k)."""

    def __init__(self, i: int, j: int, k: int) -> None:
        super().__init__(f"structure constants not associative at ({i}, {j}, {k})")
        self.witness = (i, j, k)


class BadUnit(WorkbenchError):
    """The declared unit fails the unit law on basis element i."""

    def __init__(self, i: int) -> None:
        super().__init__(f"unit law fails on basis element {i}")
        self.index = i


class AlgebraMismatch(WorkbenchError):
    """Elements of different algebras were combined."""


class NotInvertible(WorkbenchError):
    """The element (or twisting datum) has no two-sided inverse."""


# Frobenius structures =========================================================


class Degenerate(WorkbenchError):
    """The Gram matrix of the proposed Frobenius form is singular."""


class ConsistencyError(WorkbenchError):
    """Two independent computations of the same quantity disagree."""


# Builders =====================================================================


class BadGroupTable(WorkbenchError):
    """A Cayley table violates a group axiom; `witness` names the failure."""

    def __init__(self, message: str, witness: Sequence[int] = ()) -> None:
        super().__init__(f"{message}: {tuple(witness)}")
        self.witness = tuple(witness)


class UnknownBuiltin(WorkbenchError, ValueError):
    """A builtin name does not match any known family."""


# Diagrams =====================================================================


class InterfaceMismatch(WorkbenchError):
    """Adjacent slices disagree on the number of wires between them."""

    def __init__(self, slice_index: int, expected: int, got: int) -> None:
        super().__init__(
            f"slice {slice_index} expects {expected} input wires, got {got}"
        )
        self.slice_index = slice_index
        self.expected = expected
        self.got = got


class NotConnected(WorkbenchError):
    """The diagram has more than one connected component."""


class EmptyDiagram(WorkbenchError):
    """The diagram contains no generators."""


class WidthExceeded(WorkbenchError):
    """An interface is wider than the configured evaluation cap."""

    def __init__(self, width: int, limit: int) -> None:
        super().__init__(f"interface width {width} exceeds cap {limit}")
        self.width = width
        self.limit = limit


class GiveUp(WorkbenchError):
    """The random diagram sampler exhausted its retry budget."""


class IdentityFailed(WorkbenchError):
    """A diagrammatic identity evaluated to different tensors."""

    def __init__(self, tag: str, witness: Optional[Any] = None) -> None:
        super().__init__(f"identity {tag} failed: {witness}")
        self.tag = tag
        self.witness = witness
