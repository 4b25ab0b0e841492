# services/builders.py
"""
Example families: matrix algebras, semisimple sums, group algebras.

Basis conventions: matrix units row-major; group elements in the supplied
label order. The u_q(sl2) and Taft families live in `uqsl2`.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from app.services.algebra import (
    Algebra,
    Element,
    center,
    direct_sum_many,
    element_inverse,
    make_algebra,
)
from app.services.errors import (
    BadGroupTable,
    ConsistencyError,
    NotInvertible,
    Singular,
    UnknownBuiltin,
)
from app.services.frobenius import (
    FrobeniusStructure,
    lollipop,
    make_frobenius,
    rational_closed_form,
    twist,
)
from app.services.linalg import Matrix, invert
from app.services.scalars import FieldSpec, Scalar
from app.services.series import RationalSeries

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, Scalar]
Q = FieldSpec.rational()


def _q(value: Number, field: FieldSpec = Q) -> Scalar:
    return field.from_value(value)


# Matrix algebras ====================================================================


def _unit_label(d: int, i: int, j: int) -> str:
    return f"E{i + 1}{j + 1}" if d < 10 else f"E{i + 1},{j + 1}"


def matrix_algebra(d: int, field: FieldSpec = Q) -> Algebra:
    """M_d with matrix units E_ij in row-major order; E_ij E_kl = delta_jk E_il."""
    if d < 1:
        raise ValueError("matrix size must be positive")
    labels = [_unit_label(d, i, j) for i in range(d) for j in range(d)]
    one = field.one
    structure = {}
    for i in range(d):
        for j in range(d):
            for l in range(d):
                structure[(i * d + j, j * d + l)] = {i * d + l: one}
    unit = [one if i == j else field.zero for i in range(d) for j in range(d)]
    return make_algebra(field, labels, structure, unit)


def as_matrix(u: Union[Matrix, Sequence[Sequence[Number]]], field: FieldSpec = Q) -> Matrix:
    if isinstance(u, Matrix):
        return u
    return Matrix(field, [[_q(x, field) for x in row] for row in u])


def matrix_element(algebra: Algebra, u: Union[Matrix, Sequence[Sequence[Number]]]) -> Element:
    """The element sum u_ij E_ij."""
    M = as_matrix(u, algebra.field)
    return algebra.element(M.entries)


def diagonal(entries: Sequence[Number], field: FieldSpec = Q) -> Matrix:
    d = len(entries)
    return Matrix(field, [[_q(entries[i], field) if i == j else field.zero for j in range(d)] for i in range(d)])


@dataclass(frozen=True)
class MatrixPrediction:
    """Closed-form values for eps = Tr(u .) on M_d."""

    quasispecial: Optional[Scalar]
    counit_scale: Scalar
    fdim: Scalar
    series: RationalSeries
    symmetric: bool


def matrix_frobenius(d: int, u: Union[Matrix, Sequence[Sequence[Number]]], field: FieldSpec = Q) -> FrobeniusStructure:
    """
    M_d with eps(a) = Tr(u a).

    Raises:
        NotInvertible: If u is singular.
    """
    M = as_matrix(u, field)
    try:
        invert(M)
    except Singular:
        raise NotInvertible("twisting matrix is singular") from None
    algebra = matrix_algebra(d, field)
    # Tr(u E_ij) = u_ji
    eps = [M[j, i] for i in range(d) for j in range(d)]
    return make_frobenius(algebra, eps, twist_element=matrix_element(algebra, M))


def matrix_prediction(u: Union[Matrix, Sequence[Sequence[Number]]], field: FieldSpec = Q) -> MatrixPrediction:
    M = as_matrix(u, field)
    tr_u = M.trace()
    tr_inv = invert(M).trace()
    d = M.rows
    scalar = all(
        M[i, j] == (M[0, 0] if i == j else 0) for i in range(d) for j in range(d)
    )
    return MatrixPrediction(
        quasispecial=None if tr_inv.is_zero() else tr_inv,
        counit_scale=tr_u,
        fdim=tr_u * tr_inv,
        series=RationalSeries.geometric(tr_u, tr_inv),
        symmetric=scalar,
    )


# Semisimple sums ====================================================================


def semisimple_algebra(dims: Sequence[int], field: FieldSpec = Q) -> Algebra:
    return direct_sum_many([matrix_algebra(d, field) for d in dims])


def _block_offsets(dims: Sequence[int]) -> List[int]:
    offsets, total = [], 0
    for d in dims:
        offsets.append(total)
        total += d * d
    return offsets


def _block_form(dims: Sequence[int], blocks: Sequence[Matrix], scales: Sequence[Scalar], field: FieldSpec) -> List[Scalar]:
    """eps = sum_i scale_i Tr(u_i .) on the blocks."""
    eps: List[Scalar] = []
    for d, M, scale in zip(dims, blocks, scales):
        eps.extend(M[j, i] * scale for i in range(d) for j in range(d))
    return eps


def semisimple_special_form(dims: Sequence[int], field: FieldSpec = Q) -> FrobeniusStructure:
    """The unique symmetric special form eps = (+) d_i Tr on (+) M_{d_i}."""
    algebra = semisimple_algebra(dims, field)
    blocks = [Matrix.identity(field, d) for d in dims]
    return make_frobenius(algebra, _block_form(dims, blocks, [_q(d, field) for d in dims], field))


def block_element(algebra: Algebra, dims: Sequence[int], blocks: Sequence[Union[Matrix, Sequence[Sequence[Number]]]]) -> Element:
    coeffs: List[Scalar] = []
    for d, u in zip(dims, blocks):
        M = as_matrix(u, algebra.field)
        if M.rows != d:
            raise ValueError(f"block of size {M.rows} for an M_{d} summand")
        coeffs.extend(M.entries)
    return algebra.element(coeffs)


def semisimple_block_twist(dims: Sequence[int], blocks: Sequence[Union[Matrix, Sequence[Sequence[Number]]]], field: FieldSpec = Q) -> FrobeniusStructure:
    """Twist of the special form by u = (+) u_i."""
    base = semisimple_special_form(dims, field)
    return twist(base, block_element(base.algebra, dims, blocks))


def block_twist_prediction(dims: Sequence[int], blocks: Sequence[Union[Matrix, Sequence[Sequence[Number]]]], field: FieldSpec = Q) -> Tuple[Scalar, RationalSeries]:
    """F-dimension sum Tr(u_i)Tr(u_i^-1) and series sum d_i Tr(u_i) / (1 - Tr(u_i^-1)/d_i x)."""
    total = field.zero
    series: Optional[RationalSeries] = None
    for d, u in zip(dims, blocks):
        M = as_matrix(u, field)
        tr_u, tr_inv = M.trace(), invert(M).trace()
        total = total + tr_u * tr_inv
        term = RationalSeries.geometric(tr_u * d, tr_inv / d)
        series = term if series is None else series + term
    return total, series


def traceless_inverse_block(d: int, field: FieldSpec = Q) -> Matrix:
    """u = diag(1, ..., 1, -1/(d-1)), whose inverse diag(1, ..., 1, 1-d) is traceless."""
    if d < 2:
        raise ValueError("a 1x1 block has no invertible element with traceless inverse")
    return diagonal([1] * (d - 1) + [Fraction(-1, d - 1)], field)


def _outside_block(i: int, d: int, traceless: Mapping[int, Union[Matrix, Sequence[Sequence[Number]]]], field: FieldSpec) -> Matrix:
    """u_i for a block outside I: the supplied one, else traceless_inverse_block(d)."""
    M = as_matrix(traceless[i], field) if i in traceless else traceless_inverse_block(d, field)
    try:
        inverse = invert(M)
    except Singular:
        raise NotInvertible(f"block {i} twist is singular") from None
    if not inverse.trace().is_zero():
        raise ValueError(f"block {i} twist has an inverse of nonzero trace")
    return M


def weakly_symmetric_block_form(
    dims: Sequence[int],
    symmetric_blocks: Sequence[int],
    mus: Optional[Mapping[int, Number]] = None,
    traceless: Optional[Mapping[int, Union[Matrix, Sequence[Sequence[Number]]]]] = None,
    field: FieldSpec = Q,
) -> FrobeniusStructure:
    """
    Weakly symmetric form: eps = (d_i / mu_i) Tr on blocks i in I, and
    Tr(u_i .) with Tr(u_i^-1) = 0 on the remaining blocks.

    Raises:
        NotInvertible: If a supplied u_i is singular.
        ValueError: If a block outside I has no traceless-inverse choice or
            the supplied one has an inverse of nonzero trace.
    """
    chosen = set(symmetric_blocks)
    mus = dict(mus or {})
    traceless = dict(traceless or {})
    blocks: List[Matrix] = []
    scales: List[Scalar] = []
    for i, d in enumerate(dims):
        if i in chosen:
            mu = _q(mus.get(i, 1), field)
            if mu.is_zero():
                raise ValueError(f"block {i} needs a nonzero scale")
            blocks.append(Matrix.identity(field, d))
            scales.append(_q(d, field) / mu)
            continue
        blocks.append(_outside_block(i, d, traceless, field))
        scales.append(field.one)
    algebra = semisimple_algebra(dims, field)
    return make_frobenius(algebra, _block_form(dims, blocks, scales, field))


def weakly_symmetric_prediction(
    dims: Sequence[int],
    symmetric_blocks: Sequence[int],
    mus: Optional[Mapping[int, Number]] = None,
    traceless: Optional[Mapping[int, Union[Matrix, Sequence[Sequence[Number]]]]] = None,
    field: FieldSpec = Q,
) -> Tuple[Scalar, RationalSeries]:
    """
    dim_1 = sum_{i in I} d_i^2; the series is sum_{i in I} d_i^2 mu_i^-1 / (1 - mu_i x)
    plus the constant sum_{i not in I} Tr(u_i), which blocks outside I add to dim_0 only.
    """
    chosen = set(symmetric_blocks)
    mus = dict(mus or {})
    traceless = dict(traceless or {})
    total = field.zero
    outside = field.zero
    series = RationalSeries.from_fraction([], [field.one], field)
    for i, d in enumerate(dims):
        if i not in chosen:
            outside = outside + _outside_block(i, d, traceless, field).trace()
            continue
        mu = _q(mus.get(i, 1), field)
        total = total + d * d
        series = series + RationalSeries.geometric(_q(d * d, field) / mu, mu)
    if not outside.is_zero():
        series = series + RationalSeries.from_fraction([outside], [field.one], field)
    return total, series


# Groups ===========================================================================


@dataclass(frozen=True)
class GroupTable:
    """Validated Cayley table; `mul[a][b]` is the index of ab."""

    labels: Tuple[str, ...]
    mul: Tuple[Tuple[int, ...], ...]
    identity: int
    inverse: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.mul[self.mul[g][x]][self.inverse[g]]


def make_group_table(labels: Sequence[str], mul: Sequence[Sequence[int]]) -> GroupTable:
    """
    Validates the group axioms on a Cayley table.

    Raises:
        BadGroupTable: With the failing indices as witness.
    """
    n = len(labels)
    if len(mul) != n or any(len(row) != n for row in mul):
        raise BadGroupTable("table is not square", (n,))
    for a in range(n):
        for b in range(n):
            if not 0 <= mul[a][b] < n:
                raise BadGroupTable("product out of range", (a, b))
    identity = next(
        (e for e in range(n) if all(mul[e][x] == x and mul[x][e] == x for x in range(n))), None
    )
    if identity is None:
        raise BadGroupTable("no identity element", ())
    for a in range(n):
        for b in range(n):
            ab = mul[a][b]
            for c in range(n):
                if mul[ab][c] != mul[a][mul[b][c]]:
                    raise BadGroupTable("table is not associative", (a, b, c))
    inverse = []
    for a in range(n):
        inv = next((b for b in range(n) if mul[a][b] == identity and mul[b][a] == identity), None)
        if inv is None:
            raise BadGroupTable("element has no inverse", (a,))
        inverse.append(inv)
    return GroupTable(tuple(labels), tuple(tuple(row) for row in mul), identity, tuple(inverse))


def permutation_group(labels: Sequence[str], perms: Sequence[Sequence[int]]) -> GroupTable:
    """Cayley table of permutations under composition (xy)(i) = x(y(i))."""
    index = {tuple(p): k for k, p in enumerate(perms)}
    mul = []
    for x in perms:
        row = []
        for y in perms:
            product = tuple(x[y[i]] for i in range(len(y)))
            if product not in index:
                raise BadGroupTable("permutations not closed under composition", (index[tuple(x)], index[tuple(y)]))
            row.append(index[product])
        mul.append(row)
    return make_group_table(labels, mul)


S3_ALIASES: Dict[str, str] = {"()": "e", "(12)": "r", "(23)": "s", "(13)": "t", "(123)": "rs", "(132)": "sr"}
"""Cycle-notation aliases of the S3 labels."""


def s3() -> GroupTable:
    """S3 on e, r=(12), s=(23), t=(13), rs, sr."""
    e, r, s, t = (0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0)
    compose = lambda x, y: tuple(x[y[i]] for i in range(3))
    return permutation_group(["e", "r", "s", "t", "rs", "sr"], [e, r, s, t, compose(r, s), compose(s, r)])


def cyclic(n: int) -> GroupTable:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    labels = ["e"] + ["g" if k == 1 else f"g^{k}" for k in range(1, n)]
    return make_group_table(labels, [[(a + b) % n for b in range(n)] for a in range(n)])


def group_algebra(G: GroupTable, field: FieldSpec = Q) -> Algebra:
    one = field.one
    structure = {(a, b): {G.mul[a][b]: one} for a in range(G.order) for b in range(G.order)}
    unit = [one if g == G.identity else field.zero for g in range(G.order)]
    # the validated table already certifies associativity
    return make_algebra(field, G.labels, structure, unit, trusted=True)


def group_standard_form(G: GroupTable, field: FieldSpec = Q) -> FrobeniusStructure:
    """eps = delta_e."""
    algebra = group_algebra(G, field)
    return make_frobenius(algebra, [field.one if g == G.identity else field.zero for g in range(G.order)])


def group_twist_lollipop(G: GroupTable, u: Element) -> Element:
    """sum_g g u^-1 g^-1."""
    algebra = u.algebra
    u_inv = element_inverse(u)
    acc = algebra.zero
    for g in range(G.order):
        acc = acc + algebra.basis(g) * u_inv * algebra.basis(G.inverse[g])
    return acc


def group_twist(G: GroupTable, u: Element, base: Optional[FrobeniusStructure] = None) -> FrobeniusStructure:
    """Twist of delta_e by u, with B cross-checked against the class-sum formula."""
    base = base if base is not None else group_standard_form(G, u.algebra.field)
    if u.algebra is not base.algebra:
        u = base.algebra.element(u.coeffs)
    twisted = twist(base, u)
    if lollipop(twisted) != group_twist_lollipop(G, u):
        raise ConsistencyError("group twist lollipop differs from sum g u^-1 g^-1")
    return twisted


def conjugacy_classes(G: GroupTable) -> List[List[int]]:
    """Orbits under conjugation, in order of first element."""
    seen = set()
    classes = []
    for x in range(G.order):
        if x in seen:
            continue
        orbit = sorted({G.conjugate(g, x) for g in range(G.order)})
        seen.update(orbit)
        classes.append(orbit)
    return classes


def class_sums(G: GroupTable, algebra: Algebra) -> List[Element]:
    sums = []
    for orbit in conjugacy_classes(G):
        acc = algebra.zero
        for x in orbit:
            acc = acc + algebra.basis(x)
        sums.append(acc)
    return sums


def commutator_subgroup(G: GroupTable) -> List[int]:
    generated = {G.identity}
    frontier = {
        G.mul[G.mul[a][b]][G.mul[G.inverse[a]][G.inverse[b]]] for a in range(G.order) for b in range(G.order)
    }
    generators = set(frontier)
    while frontier:
        generated |= frontier
        frontier = {G.mul[x][y] for x in generated for y in generators} - generated
    return sorted(generated)


def abelianization_order(G: GroupTable) -> int:
    """|G / [G, G]|."""
    return G.order // len(commutator_subgroup(G))


def group_class_function_series(G: GroupTable, field: FieldSpec = Q) -> Dict[str, RationalSeries]:
    """F-Hilbert series of the twist of delta_e by each group element."""
    base = group_standard_form(G, field)
    return {
        G.labels[g]: rational_closed_form(group_twist(G, base.algebra.basis(g), base))
        for g in range(G.order)
    }


def center_dimension(algebra: Algebra) -> int:
    return len(center(algebra))


# S3 parametrisations ================================================================


def _s3_combination(algebra: Algebra, weights: Mapping[str, Scalar]) -> Element:
    acc = algebra.zero
    for label, w in weights.items():
        acc = acc + algebra.basis_element(label) * w
    return acc


def s3_traceless_part(algebra: Algebra, a: Number, b: Number, c: Number) -> Element:
    """a(rs - sr) + b(r - t) + c(s - t)."""
    a, b, c = _q(a, algebra.field), _q(b, algebra.field), _q(c, algebra.field)
    return _s3_combination(algebra, {"rs": a, "sr": -a, "r": b, "s": c, "t": -b - c})


@dataclass(frozen=True)
class S3SpecialTwist:
    inverse: Element
    predicted: Element
    d: Scalar
    fdim: Scalar


def s3_special_inverse_twist(algebra: Algebra, a: Number, b: Number, c: Number) -> S3SpecialTwist:
    """
    The special family u^-1 = e/6 + a(rs - sr) + b(r - t) + c(s - t).

    The predicted inverse is fdim e + (6 - fdim)/2 (rs + sr) + 9(2 - fdim)(...)
    with d = 1 + 108(a^2 - (b^2 + bc + c^2)) and fdim = 2(2 + d)/d.

    Raises:
        NotInvertible: When d = 0.
    """
    field = algebra.field
    a, b, c = _q(a, field), _q(b, field), _q(c, field)
    d = 1 + 108 * (a * a - (b * b + b * c + c * c))
    if d.is_zero():
        raise NotInvertible("special S3 family needs d != 0")
    circle = 2 * (2 + d) / d
    traceless = s3_traceless_part(algebra, a, b, c)
    inverse = algebra.basis_element("e") * Fraction(1, 6) + traceless
    predicted = (
        algebra.basis_element("e") * circle
        + _s3_combination(algebra, {"rs": (6 - circle) / 2, "sr": (6 - circle) / 2})
        + traceless * (9 * (2 - circle))
    )
    return S3SpecialTwist(inverse, predicted, d, circle)


def s3_general_element(algebra: Algebra, alpha: Number, beta: Number, gamma: Number, a: Number = 0, b: Number = 0, c: Number = 0) -> Element:
    """alpha e + beta(r + s + t) + gamma(rs + sr) + a(rs - sr) + b(r - t) + c(s - t)."""
    field = algebra.field
    alpha, beta, gamma = _q(alpha, field), _q(beta, field), _q(gamma, field)
    central = _s3_combination(algebra, {"e": alpha, "r": beta, "s": beta, "t": beta, "rs": gamma, "sr": gamma})
    return central + s3_traceless_part(algebra, a, b, c)


def s3_general_twist(G: GroupTable, alpha: Number, beta: Number, gamma: Number, a: Number = 0, b: Number = 0, c: Number = 0) -> FrobeniusStructure:
    base = group_standard_form(G)
    u = s3_general_element(base.algebra, alpha, beta, gamma, a, b, c)
    return group_twist(G, u, base)


def s3_predicted_fdim(alpha: Number, beta: Number, gamma: Number, a: Number = 0, b: Number = 0, c: Number = 0) -> Scalar:
    """2 + 4(alpha - gamma)^2 / ((alpha - gamma)^2 + 3(a^2 - (b^2 + bc + c^2)))."""
    kappa = _q(alpha) - _q(gamma)
    a, b, c = _q(a), _q(b), _q(c)
    det = kappa * kappa + 3 * (a * a - (b * b + b * c + c * c))
    if det.is_zero():
        raise NotInvertible("two-dimensional block of the twisting element is singular")
    return 2 + 4 * kappa * kappa / det


def s3_predicted_series(alpha: Number, beta: Number, gamma: Number, a: Number = 0, b: Number = 0, c: Number = 0) -> RationalSeries:
    """
    Series of the twist by the general element: one simple fraction per
    irreducible block, p^2/(6(p - 6x)) for the trivial and sign values p and
    4 kappa^2 / (6(kappa + 3/2 (2 - fdim) x)) for the two-dimensional block.
    """
    alpha, beta, gamma = _q(alpha), _q(beta), _q(gamma)
    plus = alpha + 3 * beta + 2 * gamma
    minus = alpha - 3 * beta + 2 * gamma
    kappa = alpha - gamma
    if plus.is_zero() or minus.is_zero():
        raise NotInvertible("one-dimensional block of the twisting element vanishes")
    circle = s3_predicted_fdim(alpha, beta, gamma, a, b, c)
    series = RationalSeries.geometric(plus / 6, 6 / plus) + RationalSeries.geometric(minus / 6, 6 / minus)
    if not kappa.is_zero():
        series = series + RationalSeries.geometric(2 * kappa / 3, -Fraction(3, 2) * (2 - circle) / kappa)
    return series


# Builtins =========================================================================


@dataclass
class Builtin:
    """A named structure plus the identifiers its twist expressions may use."""

    name: str
    structure: FrobeniusStructure
    namespace: Dict[str, Element]
    description: str


_BUILTIN_RE = re.compile(r"^(matrix|blocks|group|uqsl2|taft):(.+)$")


def resolve_builtin(name: str) -> Builtin:
    """
    Builds a named example structure.

    Raises:
        UnknownBuiltin: On names outside the documented patterns.
    """
    from app.services import uqsl2

    match = _BUILTIN_RE.match(name.strip())
    if not match:
        raise UnknownBuiltin(f"unknown builtin {name!r}")
    family, arg = match.groups()
    try:
        if family == "matrix":
            d = int(arg)
            F = matrix_frobenius(d, Matrix.identity(Q, d))
            return Builtin(name, F, _label_namespace(F.algebra), f"M_{d} with the trace form")
        if family == "blocks":
            dims = [int(x) for x in arg.split("+")]
            F = semisimple_special_form(dims)
            return Builtin(name, F, _label_namespace(F.algebra), "special symmetric form on a semisimple sum")
        if family == "group":
            if arg == "s3":
                G = s3()
            elif arg.startswith("cyclic:"):
                G = cyclic(int(arg.split(":", 1)[1]))
            else:
                raise UnknownBuiltin(f"unknown group {arg!r}")
            F = group_standard_form(G)
            namespace = _label_namespace(F.algebra)
            if arg == "s3":
                namespace.update({alias: F.algebra.basis_element(label) for alias, label in S3_ALIASES.items()})
            return Builtin(name, F, namespace, f"group algebra of {arg} with delta_e")
        n = int(arg)
        if family == "uqsl2":
            F = uqsl2.uqsl2_integral_form(n)
            return Builtin(name, F, uqsl2.generator_namespace(F.algebra, n), f"u_q(sl2) at n={n} with the integral")
        F = uqsl2.taft_form(n)
        return Builtin(name, F, uqsl2.generator_namespace(F.algebra, n, with_e=False), f"Taft algebra at n={n}")
    except ValueError as exc:
        if isinstance(exc, UnknownBuiltin):
            raise
        raise UnknownBuiltin(f"malformed builtin {name!r}: {exc}") from None


def _label_namespace(algebra: Algebra) -> Dict[str, Element]:
    return {label: algebra.basis(i) for i, label in enumerate(algebra.labels)}
