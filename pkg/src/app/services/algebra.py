# services/algebra.py
"""
Finite-dimensional unital associative algebras given by structure constants.

Basis order is part of an algebra's identity: every coefficient vector
refers to the stored label order.
"""
import logging
import random
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from app.services.errors import (
    AlgebraMismatch,
    BadUnit,
    FieldMismatch,
    NoSolution,
    NotAssociative,
    NotInvertible,
    ShapeMismatch,
)
from app.services.linalg import Matrix, column_space, nullspace, solve
from app.services.scalars import FieldSpec, Scalar, format_scalar

logger = logging.getLogger(__name__)

SparseVector = Dict[int, Scalar]
StructureInput = Mapping[Tuple[int, int], Union[Sequence[Scalar], Mapping[int, Scalar]]]


class Algebra:
    """
    Structure-constant algebra: e_i * e_j = sum_k c_ij^k e_k.

    Attributes:
        field: Ground field of every structure constant.
        dim: Dimension N.
        labels: N basis labels, unique.
        unit: Coefficient vector of 1_A.
        trusted: True when associativity was not re-validated on construction.
    """

    def __init__(
        self,
        field: FieldSpec,
        labels: Sequence[str],
        table: Dict[Tuple[int, int], Tuple[Tuple[int, Scalar], ...]],
        unit: Sequence[Scalar],
        trusted: bool = False,
    ) -> None:
        self.field = field
        self.dim = len(labels)
        self.labels: Tuple[str, ...] = tuple(labels)
        self._index = {label: i for i, label in enumerate(self.labels)}
        if len(self._index) != self.dim:
            raise ShapeMismatch("basis labels must be unique")
        self._table = table
        self.unit: Tuple[Scalar, ...] = tuple(unit)
        self.trusted = trusted

    # -- basis access ---------------------------------------------------------------

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"no basis element labelled {label!r}") from None

    def basis_product(self, i: int, j: int) -> Tuple[Tuple[int, Scalar], ...]:
        """Nonzero (k, c_ij^k) pairs of e_i e_j."""
        return self._table.get((i, j), ())

    def structure_entries(self) -> Iterator[Tuple[int, int, int, Scalar]]:
        for (i, j), terms in sorted(self._table.items()):
            for k, c in terms:
                yield i, j, k, c

    def element(self, coeffs: Sequence[Scalar]) -> "Element":
        return Element(self, coeffs)

    def basis(self, i: int) -> "Element":
        zero, one = self.field.zero, self.field.one
        return Element(self, [one if k == i else zero for k in range(self.dim)])

    def basis_element(self, label: str) -> "Element":
        return self.basis(self.index(label))

    @property
    def one(self) -> "Element":
        return Element(self, self.unit)

    @property
    def zero(self) -> "Element":
        return Element(self, [self.field.zero] * self.dim)

    def scalar(self, value) -> "Element":
        return self.one * self.field.from_value(value)

    def is_commutative(self) -> bool:
        return all(
            _as_dict(self.basis_product(i, j)) == _as_dict(self.basis_product(j, i))
            for i in range(self.dim)
            for j in range(i)
        )

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim}, field={self.field})"

    # -- validation -------------------------------------------------------------------

    def _sparse_product(self, x: SparseVector, y: SparseVector) -> SparseVector:
        acc: SparseVector = {}
        for i, a in x.items():
            for j, b in y.items():
                terms = self._table.get((i, j))
                if not terms:
                    continue
                ab = a * b
                for k, c in terms:
                    term = ab * c
                    acc[k] = acc[k] + term if k in acc else term
        return {k: v for k, v in acc.items() if not v.is_zero()}

    def check_unit(self) -> None:
        unit = {k: c for k, c in enumerate(self.unit) if not c.is_zero()}
        for i in range(self.dim):
            expected = {i: self.field.one}
            if self._sparse_product(unit, expected) != expected or self._sparse_product(expected, unit) != expected:
                raise BadUnit(i)

    def check_associativity(self) -> None:
        """Exhaustive (e_i e_j) e_k == e_i (e_j e_k); raises NotAssociative with the first witness."""
        products = {key: dict(terms) for key, terms in self._table.items()}
        for i in range(self.dim):
            for j in range(self.dim):
                left_ij = products.get((i, j), {})
                for k in range(self.dim):
                    left = self._sparse_product(left_ij, {k: self.field.one}) if left_ij else {}
                    jk = products.get((j, k), {})
                    right = self._sparse_product({i: self.field.one}, jk) if jk else {}
                    if left != right:
                        raise NotAssociative(i, j, k)


def _as_dict(terms: Iterable[Tuple[int, Scalar]]) -> SparseVector:
    return {k: c for k, c in terms}


class Element:
    """An algebra element as a coefficient vector in the algebra's basis."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: Algebra, coeffs: Sequence[Scalar]) -> None:
        if len(coeffs) != algebra.dim:
            raise ShapeMismatch(f"{len(coeffs)} coefficients for a {algebra.dim}-dimensional algebra")
        self.algebra = algebra
        self.coeffs: Tuple[Scalar, ...] = tuple(algebra.field.from_value(c) for c in coeffs)

    def _same(self, other: "Element") -> None:
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("elements belong to different algebras")

    def sparse(self) -> SparseVector:
        return {k: c for k, c in enumerate(self.coeffs) if not c.is_zero()}

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def coefficient(self, label: str) -> Scalar:
        return self.coeffs[self.algebra.index(label)]

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "Element":
        return Element(self.algebra, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        factor = self.algebra.field.from_value(other)
        return Element(self.algebra, [a * factor for a in self.coeffs])

    def __rmul__(self, other):
        if isinstance(other, Element):
            return multiply(other, self)
        return self * other

    def __pow__(self, exponent: int) -> "Element":
        if exponent < 0:
            return element_inverse(self) ** (-exponent)
        result = self.algebra.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return other.algebra is self.algebra and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((id(self.algebra), self.coeffs))

    def __str__(self) -> str:
        terms = []
        for label, c in zip(self.algebra.labels, self.coeffs):
            if c.is_zero():
                continue
            terms.append(label if c == 1 else f"{format_scalar(c)}*{label}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"Element({self})"


# Construction =====================================================================


def make_algebra(
    field: FieldSpec,
    labels: Sequence[str],
    structure: StructureInput,
    unit: Sequence[Scalar],
    trusted: bool = False,
) -> Algebra:
    """
    Builds and validates an algebra from structure constants.

    Args:
        field: Ground field.
        labels: Basis labels in basis order.
        structure: (i, j) -> coefficients of e_i e_j, either a dense vector or
            a sparse {k: c} mapping. Missing pairs multiply to zero.
        unit: Coefficient vector of the unit.
        trusted: Skip the exhaustive associativity check (the unit law is
            always checked).

    Raises:
        NotAssociative: With the first failing triple.
        BadUnit: With the first basis index violating the unit law.
        FieldMismatch: If any constant lives over another field.
    """
    dim = len(labels)
    if len(unit) != dim:
        raise ShapeMismatch(f"unit has {len(unit)} coefficients, expected {dim}")
    table: Dict[Tuple[int, int], Tuple[Tuple[int, Scalar], ...]] = {}
    for (i, j), value in structure.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise ShapeMismatch(f"structure index ({i}, {j}) out of range for dimension {dim}")
        items = value.items() if isinstance(value, Mapping) else enumerate(value)
        terms = []
        for k, c in items:
            if not 0 <= k < dim:
                raise ShapeMismatch(f"structure index {k} out of range for dimension {dim}")
            if not isinstance(c, Scalar):
                c = field.from_value(c)
            elif c.field != field:
                raise FieldMismatch(field, c.field)
            if not c.is_zero():
                terms.append((k, c))
        if terms:
            table[(i, j)] = tuple(sorted(terms, key=lambda t: t[0]))
    unit_values = [field.from_value(c) for c in unit]
    algebra = Algebra(field, labels, table, unit_values, trusted=trusted)
    algebra.check_unit()
    if not trusted:
        algebra.check_associativity()
    logger.debug("algebra of dimension %d built (trusted=%s)", dim, trusted)
    return algebra


def multiply(a: Element, b: Element) -> Element:
    """Bilinear extension of the structure constants."""
    a._same(b)
    algebra = a.algebra
    product = algebra._sparse_product(a.sparse(), b.sparse())
    zero = algebra.field.zero
    return Element(algebra, [product.get(k, zero) for k in range(algebra.dim)])


def left_mult_matrix(a: Element) -> Matrix:
    """Matrix of x -> a x; column j is a e_j."""
    algebra = a.algebra
    columns = [(a * algebra.basis(j)).coeffs for j in range(algebra.dim)]
    return Matrix.from_columns(algebra.field, columns, algebra.dim)


def right_mult_matrix(a: Element) -> Matrix:
    """Matrix of x -> x a."""
    algebra = a.algebra
    columns = [(algebra.basis(j) * a).coeffs for j in range(algebra.dim)]
    return Matrix.from_columns(algebra.field, columns, algebra.dim)


def element_inverse(u: Element) -> Element:
    """
    Two-sided inverse of u.

    Solves L_u x = 1_A and verifies x u = 1_A as well.

    Raises:
        NotInvertible: If either equation fails.
    """
    algebra = u.algebra
    try:
        x = Element(algebra, solve(left_mult_matrix(u), list(algebra.unit)))
    except NoSolution:
        raise NotInvertible(f"{u} has no inverse") from None
    if x * u != algebra.one or u * x != algebra.one:
        raise NotInvertible(f"{u} has only a one-sided inverse")
    return x


def is_invertible(u: Element) -> bool:
    try:
        element_inverse(u)
    except NotInvertible:
        return False
    return True


def center(algebra: Algebra) -> List[Element]:
    """Basis of Z(A): nullspace of the stacked maps x -> x e_i - e_i x."""
    rows: List[List[Scalar]] = []
    for i in range(algebra.dim):
        e_i = algebra.basis(i)
        commutator = [
            (algebra.basis(j) * e_i - e_i * algebra.basis(j)).coeffs for j in range(algebra.dim)
        ]
        block = Matrix.from_columns(algebra.field, commutator, algebra.dim)
        rows.extend(block.to_lists())
    system = Matrix(algebra.field, rows, algebra.dim)
    return [Element(algebra, v) for v in nullspace(system)]


def commutator_subspace(algebra: Algebra) -> List[Element]:
    """Echelon basis of [A, A], spanned by the e_i e_j - e_j e_i."""
    vectors = []
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            c = algebra.basis(i) * algebra.basis(j) - algebra.basis(j) * algebra.basis(i)
            if not c.is_zero():
                vectors.append(c.coeffs)
    return [Element(algebra, v) for v in column_space(algebra.field, vectors, algebra.dim)]


def in_span(vector: Sequence[Scalar], basis: Sequence[Element]) -> bool:
    if all(c.is_zero() for c in vector):
        return True
    if not basis:
        return False
    field = basis[0].algebra.field
    system = Matrix.from_columns(field, [b.coeffs for b in basis], len(vector))
    try:
        solve(system, list(vector))
    except NoSolution:
        return False
    return True


def regular_trace(a: Element) -> Scalar:
    """Tr(L_a)."""
    return left_mult_matrix(a).trace()


def direct_sum(first: Algebra, second: Algebra) -> Algebra:
    return direct_sum_many([first, second])


def direct_sum_many(parts: Sequence[Algebra], prefixes: Optional[Sequence[str]] = None) -> Algebra:
    """
    Block-diagonal sum of algebras with unit (1, 1, ..., 1).

    Labels become "B{i}.{label}" unless explicit prefixes are given.
    """
    if not parts:
        raise ShapeMismatch("direct sum of no algebras")
    field = parts[0].field
    for part in parts:
        if part.field != field:
            raise FieldMismatch(field, part.field)
    prefixes = list(prefixes) if prefixes is not None else [f"B{i}." for i in range(len(parts))]
    labels: List[str] = []
    table: Dict[Tuple[int, int], Tuple[Tuple[int, Scalar], ...]] = {}
    unit: List[Scalar] = []
    offset = 0
    for prefix, part in zip(prefixes, parts):
        labels.extend(prefix + label for label in part.labels)
        for (i, j), terms in part._table.items():
            table[(i + offset, j + offset)] = tuple((k + offset, c) for k, c in terms)
        unit.extend(part.unit)
        offset += part.dim
    trusted = all(part.trusted for part in parts)
    return Algebra(field, labels, table, unit, trusted=trusted)


# Sampling =========================================================================


def random_scalar(rng: random.Random, field: FieldSpec, bound: int = 3, rational_only: bool = False) -> Scalar:
    """Small random scalar with integer coordinates in [-bound, bound]."""
    if rational_only or field.is_rational:
        return field.from_value(rng.randint(-bound, bound))
    return Scalar(field, [rng.randint(-bound, bound) for _ in range(field.degree)])


def random_element(rng: random.Random, algebra: Algebra, bound: int = 3, rational_only: bool = False) -> Element:
    return Element(
        algebra, [random_scalar(rng, algebra.field, bound, rational_only) for _ in range(algebra.dim)]
    )


def random_invertible(rng: random.Random, algebra: Algebra, bound: int = 3, attempts: int = 100) -> Element:
    for _ in range(attempts):
        u = random_element(rng, algebra, bound)
        if is_invertible(u):
            return u
    raise NotInvertible(f"no invertible sample in {attempts} draws")
