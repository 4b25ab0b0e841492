# services/linalg.py
"""Exact dense linear algebra and sparse index tensors over a Scalar field."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from app.services.errors import FieldMismatch, NoSolution, NotFound, ShapeMismatch, Singular
from app.services.scalars import FieldSpec, Scalar

logger = logging.getLogger(__name__)

Vector = List[Scalar]
Index = Tuple[int, ...]


class Matrix:
    """Dense matrix of Scalars, all over one field. Treated as immutable."""

    __slots__ = ("field", "rows", "cols", "_data")

    def __init__(self, field_spec: FieldSpec, data: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> None:
        rows = [list(row) for row in data]
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        for row in rows:
            if len(row) != width:
                raise ShapeMismatch(f"ragged matrix row of length {len(row)}, expected {width}")
            for entry in row:
                if entry.field != field_spec:
                    raise FieldMismatch(field_spec, entry.field)
        self.field = field_spec
        self.rows = len(rows)
        self.cols = width
        self._data = rows

    @classmethod
    def identity(cls, field_spec: FieldSpec, n: int) -> "Matrix":
        zero, one = field_spec.zero, field_spec.one
        return cls(field_spec, [[one if i == j else zero for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, field_spec: FieldSpec, rows: int, cols: int) -> "Matrix":
        zero = field_spec.zero
        return cls(field_spec, [[zero] * cols for _ in range(rows)], cols)

    @classmethod
    def from_columns(cls, field_spec: FieldSpec, columns: Sequence[Sequence[Scalar]], rows: int) -> "Matrix":
        return cls(field_spec, [[col[i] for col in columns] for i in range(rows)], len(columns))

    @property
    def entries(self) -> List[Scalar]:
        """Row-major flat view."""
        return [x for row in self._data for x in row]

    def __getitem__(self, key: Tuple[int, int]) -> Scalar:
        i, j = key
        return self._data[i][j]

    def row(self, i: int) -> List[Scalar]:
        return list(self._data[i])

    def column(self, j: int) -> List[Scalar]:
        return [row[j] for row in self._data]

    def to_lists(self) -> List[List[Scalar]]:
        return [list(row) for row in self._data]

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise FieldMismatch(self.field, other.field)
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        zero = self.field.zero
        out = [[zero] * other.cols for _ in range(self.rows)]
        for i, row in enumerate(self._data):
            target = out[i]
            for k, a in enumerate(row):
                if a.is_zero():
                    continue
                for j, b in enumerate(other._data[k]):
                    if not b.is_zero():
                        target[j] = target[j] + a * b
        return Matrix(self.field, out, other.cols)

    def apply(self, vector: Sequence[Scalar]) -> Vector:
        if len(vector) != self.cols:
            raise ShapeMismatch(f"vector of length {len(vector)} for {self.cols} columns")
        zero = self.field.zero
        out = []
        for row in self._data:
            acc = zero
            for a, x in zip(row, vector):
                if not a.is_zero() and not x.is_zero():
                    acc = acc + a * x
            out.append(acc)
        return out

    def trace(self) -> Scalar:
        if self.rows != self.cols:
            raise ShapeMismatch("trace of a non-square matrix")
        acc = self.field.zero
        for i in range(self.rows):
            acc = acc + self._data[i][i]
        return acc

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self._data[i][j] == self._data[j][i] for i in range(self.rows) for j in range(i)
        )

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self._data for x in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows and self._data == other._data

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols} over {self.field})"


# Elimination ==================================================================


def _rref(rows: List[List[Scalar]], ncols: int) -> List[int]:
    """In-place Gauss-Jordan elimination; pivots chosen as the first nonzero entry."""
    pivots: List[int] = []
    pivot_row = 0
    nrows = len(rows)
    for col in range(ncols):
        if pivot_row >= nrows:
            break
        found = next((r for r in range(pivot_row, nrows) if not rows[r][col].is_zero()), None)
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        prow = rows[pivot_row]
        inv = prow[col].inv()
        support = []
        for j in range(col, len(prow)):
            if not prow[j].is_zero():
                prow[j] = prow[j] * inv
                support.append(j)
        for r in range(nrows):
            if r == pivot_row:
                continue
            factor = rows[r][col]
            if factor.is_zero():
                continue
            target = rows[r]
            for j in support:
                target[j] = target[j] - factor * prow[j]
        pivots.append(col)
        pivot_row += 1
    return pivots


def rank(M: Matrix) -> int:
    return len(_rref(M.to_lists(), M.cols))


def solve(M: Matrix, b: Sequence[Scalar]) -> Vector:
    """
    Returns one solution x of M x = b (free variables set to zero).

    Raises:
        NoSolution: If the system is inconsistent.
        FieldMismatch: If b lives over another field.
    """
    if len(b) != M.rows:
        raise ShapeMismatch(f"right-hand side of length {len(b)} for {M.rows} rows")
    for entry in b:
        if entry.field != M.field:
            raise FieldMismatch(M.field, entry.field)
    rows = [row + [rhs] for row, rhs in zip(M.to_lists(), b)]
    pivots = _rref(rows, M.cols + 1)
    if pivots and pivots[-1] == M.cols:
        raise NoSolution("inconsistent linear system")
    solution = [M.field.zero] * M.cols
    for r, col in enumerate(pivots):
        solution[col] = rows[r][M.cols]
    return solution


def invert(M: Matrix) -> Matrix:
    """Exact inverse; raises Singular when M has no inverse."""
    if M.rows != M.cols:
        raise ShapeMismatch("only square matrices can be inverted")
    n = M.rows
    zero, one = M.field.zero, M.field.one
    rows = [row + [one if i == j else zero for j in range(n)] for i, row in enumerate(M.to_lists())]
    pivots = _rref(rows, n)
    if len(pivots) < n:
        raise Singular(f"matrix of rank {len(pivots)} < {n}")
    return Matrix(M.field, [row[n:] for row in rows], n)


def nullspace(M: Matrix) -> List[Vector]:
    """Basis of {x : M x = 0}, one vector per free column."""
    rows = M.to_lists()
    pivots = _rref(rows, M.cols)
    pivot_set = set(pivots)
    basis: List[Vector] = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        vec = [M.field.zero] * M.cols
        vec[free] = M.field.one
        for r, col in enumerate(pivots):
            vec[col] = -rows[r][free]
        basis.append(vec)
    return basis


def column_space(field_spec: FieldSpec, vectors: Sequence[Sequence[Scalar]], length: int) -> List[Vector]:
    """Echelon basis of the span of the given vectors."""
    if not vectors:
        return []
    rows = [list(v) for v in vectors]
    pivots = _rref(rows, length)
    return [rows[r] for r in range(len(pivots))]


def determinant(M: Matrix) -> Scalar:
    if M.rows != M.cols:
        raise ShapeMismatch("determinant of a non-square matrix")
    rows = M.to_lists()
    n = M.rows
    det = M.field.one
    for col in range(n):
        found = next((r for r in range(col, n) if not rows[r][col].is_zero()), None)
        if found is None:
            return M.field.zero
        if found != col:
            rows[col], rows[found] = rows[found], rows[col]
            det = -det
        pivot = rows[col][col]
        det = det * pivot
        inv = pivot.inv()
        for r in range(col + 1, n):
            factor = rows[r][col]
            if factor.is_zero():
                continue
            factor = factor * inv
            for j in range(col, n):
                if not rows[col][j].is_zero():
                    rows[r][j] = rows[r][j] - factor * rows[col][j]
    return det


def minimal_polynomial(vectors: Sequence[Sequence[Scalar]]) -> Vector:
    """
    Smallest linear recurrence closing the sequence v_0, v_1, ....

    Args:
        vectors: Successive images v, Mv, M^2 v, ... (or powers 1, B, B^2, ...)
            expressed in a fixed basis.

    Returns:
        Ascending monic coefficients [c_0, ..., c_{k-1}, 1] with
        v_k + c_{k-1} v_{k-1} + ... + c_0 v_0 = 0 for the smallest such k.

    Raises:
        NotFound: If no v_k lies in the span of its predecessors.
    """
    if not vectors:
        raise NotFound("empty vector sequence")
    field_spec = vectors[0][0].field
    length = len(vectors[0])
    if all(x.is_zero() for x in vectors[0]):
        return [field_spec.one]
    for k in range(1, len(vectors)):
        system = Matrix.from_columns(field_spec, vectors[:k], length)
        try:
            combination = solve(system, list(vectors[k]))
        except NoSolution:
            continue
        logger.debug("sequence closes at degree %d", k)
        return [-c for c in combination] + [field_spec.one]
    raise NotFound(f"no linear dependency among {len(vectors)} vectors")


# Sparse tensors =================================================================


class Tensor:
    """Sparse tensor with `rank` legs of dimension `dim`; zero entries are never stored."""

    __slots__ = ("field", "dim", "rank", "entries")

    def __init__(self, field_spec: FieldSpec, dim: int, rank: int, entries: Optional[Mapping[Index, Scalar]] = None) -> None:
        self.field = field_spec
        self.dim = dim
        self.rank = rank
        self.entries: Dict[Index, Scalar] = {}
        for idx, value in (entries or {}).items():
            if len(idx) != rank:
                raise ShapeMismatch(f"index {idx} for a {rank}-leg tensor")
            if not value.is_zero():
                self.entries[tuple(idx)] = value

    @classmethod
    def scalar(cls, value: Scalar) -> "Tensor":
        return cls(value.field, 0, 0, {(): value})

    @classmethod
    def from_vector(cls, vector: Sequence[Scalar]) -> "Tensor":
        return cls(vector[0].field, len(vector), 1, {(i,): x for i, x in enumerate(vector)})

    @classmethod
    def from_matrix(cls, M: Matrix) -> "Tensor":
        return cls(M.field, M.rows, 2, {(i, j): M[i, j] for i in range(M.rows) for j in range(M.cols)})

    @classmethod
    def identity(cls, field_spec: FieldSpec, dim: int, legs: int) -> "Tensor":
        """Identity map on A^{(x) legs}, stored with 2*legs legs (inputs then outputs)."""
        one = field_spec.one
        entries: Dict[Index, Scalar] = {}
        for idx in _all_indices(dim, legs):
            entries[idx + idx] = one
        return cls(field_spec, dim, 2 * legs, entries)

    def value(self, idx: Index) -> Scalar:
        return self.entries.get(tuple(idx), self.field.zero)

    def scalar_value(self) -> Scalar:
        if self.rank != 0:
            raise ShapeMismatch(f"{self.rank}-leg tensor is not a scalar")
        return self.value(())

    def to_vector(self) -> Vector:
        if self.rank != 1:
            raise ShapeMismatch(f"{self.rank}-leg tensor is not a vector")
        return [self.value((i,)) for i in range(self.dim)]

    def swap(self) -> "Tensor":
        if self.rank != 2:
            raise ShapeMismatch("swap needs a 2-leg tensor")
        return Tensor(self.field, self.dim, 2, {(j, i): v for (i, j), v in self.entries.items()})

    def scale(self, factor: Scalar) -> "Tensor":
        return Tensor(self.field, self.dim, self.rank, {k: v * factor for k, v in self.entries.items()})

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check(other)
        merged = dict(self.entries)
        for k, v in other.entries.items():
            merged[k] = merged[k] + v if k in merged else v
        return Tensor(self.field, self.dim, self.rank, merged)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + other.scale(-self.field.one)

    def is_zero(self) -> bool:
        return not self.entries

    def _check(self, other: "Tensor") -> None:
        if self.field != other.field:
            raise FieldMismatch(self.field, other.field)
        if (self.rank, self.dim) != (other.rank, other.dim) and self.rank:
            raise ShapeMismatch(f"{self.rank}-leg/{self.dim} vs {other.rank}-leg/{other.dim}")

    def first_difference(self, other: "Tensor") -> Optional[Tuple[Index, Scalar, Scalar]]:
        """A witness index where the two tensors differ, or None when equal."""
        self._check(other)
        for key in sorted(set(self.entries) | set(other.entries)):
            a, b = self.value(key), other.value(key)
            if a != b:
                return key, a, b
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.field == other.field and self.rank == other.rank and self.entries == other.entries

    def __repr__(self) -> str:
        return f"Tensor(rank={self.rank}, dim={self.dim}, nnz={len(self.entries)})"


def _all_indices(dim: int, legs: int) -> Iterator[Index]:
    if legs == 0:
        yield ()
        return
    for head in range(dim):
        for tail in _all_indices(dim, legs - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class GeneratorMap:
    """
    A small linear map A^{(x) in_arity} -> A^{(x) out_arity} given index-wise.

    `table` sends an input multi-index to the nonzero (output multi-index,
    coefficient) pairs of its image; missing keys map to zero.
    """

    name: str
    in_arity: int
    out_arity: int
    table: Dict[Index, Tuple[Tuple[Index, Scalar], ...]] = field(hash=False, compare=False)


def apply_generator(t: Tensor, position: int, gen: GeneratorMap) -> Tensor:
    """
    Contracts `gen` into legs position .. position+in_arity-1 of `t`.

    The generator's outputs take the place of the consumed legs, so the result
    has rank - in_arity + out_arity legs. Cost is proportional to the number
    of stored entries times the generator's fan-out.
    """
    if position < 0 or position + gen.in_arity > t.rank:
        raise ShapeMismatch(
            f"{gen.name} ({gen.in_arity} inputs) at leg {position} of a {t.rank}-leg tensor"
        )
    end = position + gen.in_arity
    acc: Dict[Index, Scalar] = {}
    table = gen.table
    for idx, value in t.entries.items():
        images = table.get(idx[position:end])
        if not images:
            continue
        head, tail = idx[:position], idx[end:]
        for out, coeff in images:
            key = head + out + tail
            term = value * coeff
            previous = acc.get(key)
            acc[key] = term if previous is None else previous + term
    result = Tensor(t.field, t.dim, t.rank - gen.in_arity + gen.out_arity)
    result.entries = {k: v for k, v in acc.items() if not v.is_zero()}
    return result


def identity_generator(field_spec: FieldSpec, dim: int) -> GeneratorMap:
    one = field_spec.one
    return GeneratorMap("id", 1, 1, {(i,): (((i,), one),) for i in range(dim)})


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    acc = None
    for a, b in zip(u, v):
        if a.is_zero() or b.is_zero():
            continue
        acc = a * b if acc is None else acc + a * b
    if acc is None:
        if not u:
            raise ShapeMismatch("dot product of empty vectors")
        return u[0].field.zero
    return acc


def vectors_equal(u: Iterable[Scalar], v: Iterable[Scalar]) -> bool:
    return list(u) == list(v)
