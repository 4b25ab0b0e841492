# services/frobenius.py
"""
Frobenius structures on a structure-constant algebra.

The linear form eps is the primary datum; the bilinear form is always
(a, b) = eps(ab), with Gram matrix G_ij = eps(e_i e_j) and metric g whose
component matrix is G^-1.
"""
import logging
import weakref
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from app.config import CONFIG
from app.services.algebra import (
    Algebra,
    Element,
    commutator_subspace,
    element_inverse,
    regular_trace,
)
from app.services.errors import ConsistencyError, Degenerate, NoSolution, NotInvertible, ShapeMismatch, Singular
from app.services.linalg import Matrix, Tensor, dot, invert, minimal_polynomial, solve
from app.services.scalars import Scalar, format_scalar
from app.services.series import RationalSeries

logger = logging.getLogger(__name__)


class FrobeniusStructure:
    """
    An algebra together with a nondegenerate linear form.

    Gram matrix, metric and lollipop B = mu(g) are computed once on
    construction; powers of B are cached as they are requested.

    Attributes:
        algebra: The underlying Algebra.
        eps: eps(e_i) for each basis element.
        gram: G_ij = eps(e_i e_j).
        metric_matrix: G^-1, the components of g in A (x) A.
        metric: g as a 2-leg Tensor.
        twist_element: Composite twisting element relative to the form this
            structure was derived from (1_A for an untwisted structure).
    """

    def __init__(
        self,
        algebra: Algebra,
        eps: Sequence[Scalar],
        gram: Matrix,
        metric_matrix: Matrix,
        twist_element: Optional[Element] = None,
    ) -> None:
        self.algebra = algebra
        self.eps: Tuple[Scalar, ...] = tuple(eps)
        self.gram = gram
        self.metric_matrix = metric_matrix
        self.metric = Tensor.from_matrix(metric_matrix)
        self.twist_element = twist_element if twist_element is not None else algebra.one
        self._powers: List[Element] = [algebra.one]
        self._lollipop = _lollipop_from_metric(algebra, metric_matrix)
        self._dim_one_checked = False

    @classmethod
    def from_parts(
        cls, algebra: Algebra, eps: Sequence[Scalar], gram: Matrix, metric_matrix: Matrix
    ) -> "FrobeniusStructure":
        """Assembles a structure without any consistency check."""
        return cls(algebra, eps, gram, metric_matrix)

    @property
    def field(self):
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def epsilon(self, a: Element) -> Scalar:
        return dot(self.eps, a.coeffs)

    def pairing(self, a: Element, b: Element) -> Scalar:
        return self.epsilon(a * b)

    def power_of_lollipop(self, j: int) -> Element:
        while len(self._powers) <= j:
            self._powers.append(self._powers[-1] * self._lollipop)
        return self._powers[j]

    def __repr__(self) -> str:
        return f"FrobeniusStructure(dim={self.dim}, eps=[{', '.join(format_scalar(e) for e in self.eps)}])"


@dataclass(frozen=True)
class Classification:
    symmetric: bool
    weakly_symmetric: bool
    special: bool
    quasispecial: Optional[Scalar]
    counit_scale: Scalar
    fdim: Scalar

    def to_json(self) -> Dict[str, object]:
        return {
            "symmetric": self.symmetric,
            "weakly_symmetric": self.weakly_symmetric,
            "special": self.special,
            "quasispecial": format_scalar(self.quasispecial) if self.quasispecial is not None else None,
            "counit_scale": format_scalar(self.counit_scale),
            "fdim": format_scalar(self.fdim),
        }


_skipped_checks: "weakref.WeakKeyDictionary[Algebra, Set[str]]" = weakref.WeakKeyDictionary()
"""Self-checks already reported as skipped, per algebra."""


def _self_check_enabled(algebra: Algebra, what: str) -> bool:
    if algebra.dim <= CONFIG.SELF_CHECK_MAX_DIM:
        return True
    reported = _skipped_checks.setdefault(algebra, set())
    if what not in reported:
        reported.add(what)
        logger.warning("skipping %s self-check on a %d-dimensional algebra", what, algebra.dim)
    return False


def _lollipop_from_metric(algebra: Algebra, metric_matrix: Matrix) -> Element:
    acc: Dict[int, Scalar] = {}
    for k in range(algebra.dim):
        for l in range(algebra.dim):
            g = metric_matrix[k, l]
            if g.is_zero():
                continue
            for m, c in algebra.basis_product(k, l):
                term = g * c
                acc[m] = acc[m] + term if m in acc else term
    zero = algebra.field.zero
    return algebra.element([acc.get(m, zero) for m in range(algebra.dim)])


def gram_matrix(algebra: Algebra, eps: Sequence[Scalar]) -> Matrix:
    zero = algebra.field.zero
    rows = [[zero] * algebra.dim for _ in range(algebra.dim)]
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            acc = zero
            for k, c in algebra.basis_product(i, j):
                if not eps[k].is_zero():
                    acc = acc + c * eps[k]
            rows[i][j] = acc
    return Matrix(algebra.field, rows, algebra.dim)


# Construction =====================================================================


def make_frobenius(algebra: Algebra, eps: Sequence[Scalar], twist_element: Optional[Element] = None) -> FrobeniusStructure:
    """
    Builds the Frobenius structure of a linear form.

    Raises:
        Degenerate: If the Gram matrix is singular.
        ConsistencyError: If a snake identity fails.
    """
    if len(eps) != algebra.dim:
        raise ShapeMismatch(f"form has {len(eps)} values, algebra has dimension {algebra.dim}")
    eps = [algebra.field.from_value(e) for e in eps]
    gram = gram_matrix(algebra, eps)
    try:
        metric = invert(gram)
    except Singular:
        raise Degenerate("Gram matrix of the form is singular") from None
    logger.debug("Gram matrix of dimension %d inverted", algebra.dim)
    if _self_check_enabled(algebra, "snake"):
        identity = Matrix.identity(algebra.field, algebra.dim)
        if gram @ metric != identity or metric @ gram != identity:
            raise ConsistencyError("snake identities fail for the inverted Gram matrix")
    return FrobeniusStructure(algebra, eps, gram, metric, twist_element)


def trace_form(algebra: Algebra) -> FrobeniusStructure:
    """eps(a) = Tr(L_a); nondegenerate exactly on semisimple algebras."""
    return make_frobenius(algebra, [regular_trace(algebra.basis(i)) for i in range(algebra.dim)])


# Coalgebra ========================================================================


def coproduct(F: FrobeniusStructure, b: Element) -> Tensor:
    """Delta(b) = (b (x) 1) g, checked against g (1 (x) b)."""
    algebra = F.algebra
    left = _left_leg_action(F, b)
    if _self_check_enabled(algebra, "coproduct"):
        right = _right_leg_action(F, b)
        if left != right:
            raise ConsistencyError(f"(b x 1) g != g (1 x b) for b = {b}")
    return left


def _left_leg_action(F: FrobeniusStructure, b: Element) -> Tensor:
    acc: Dict[Tuple[int, int], Scalar] = {}
    images = [b * F.algebra.basis(k) for k in range(F.dim)]
    for (k, l), g in F.metric.entries.items():
        for m, c in images[k].sparse().items():
            term = g * c
            acc[(m, l)] = acc[(m, l)] + term if (m, l) in acc else term
    return Tensor(F.field, F.dim, 2, acc)


def _right_leg_action(F: FrobeniusStructure, b: Element) -> Tensor:
    acc: Dict[Tuple[int, int], Scalar] = {}
    images = [F.algebra.basis(l) * b for l in range(F.dim)]
    for (k, l), g in F.metric.entries.items():
        for m, c in images[l].sparse().items():
            term = g * c
            acc[(k, m)] = acc[(k, m)] + term if (k, m) in acc else term
    return Tensor(F.field, F.dim, 2, acc)


def lollipop(F: FrobeniusStructure) -> Element:
    """B = mu(g), asserted central."""
    B = F._lollipop
    if _self_check_enabled(F.algebra, "centrality"):
        for i in range(F.dim):
            e_i = F.algebra.basis(i)
            if B * e_i != e_i * B:
                raise ConsistencyError(f"lollipop does not commute with {F.algebra.labels[i]}")
    return B


def uloll(F: FrobeniusStructure) -> List[Scalar]:
    """The functional a -> eps(B a) on the basis."""
    B = F._lollipop
    return [F.epsilon(B * F.algebra.basis(i)) for i in range(F.dim)]


# Dimensions and series ============================================================


def fdim(F: FrobeniusStructure, j: int) -> Scalar:
    """dim_j = eps(B^j)."""
    if j < 0:
        raise ValueError("F-dimensions are indexed by nonnegative integers")
    value = F.epsilon(F.power_of_lollipop(j))
    if j == 1 and not F._dim_one_checked:
        contraction = dot(F.metric_matrix.entries, F.gram.entries)
        if contraction != value:
            raise ConsistencyError(f"dim_1 = {value} but contraction of the form with g is {contraction}")
        if _self_check_enabled(F.algebra, "Nakayama trace"):
            trace = nakayama(F).trace()
            if trace != value:
                raise ConsistencyError(f"dim_1 = {value} but Tr(Nakayama) = {trace}")
        F._dim_one_checked = True
    return value


def hilbert_series(F: FrobeniusStructure, terms: int) -> List[Scalar]:
    if terms < 1:
        raise ValueError("terms must be at least 1")
    return [fdim(F, j) for j in range(terms)]


def rational_closed_form(F: FrobeniusStructure) -> RationalSeries:
    """
    Exact F-Hilbert series from the minimal polynomial of B.

    The expansion is checked against dim_0 .. dim_{SERIES_CHECK_TERMS - 1}.
    """
    vectors = [list(F.power_of_lollipop(0).coeffs)]
    for j in range(1, F.dim + 2):
        vectors.append(list(F.power_of_lollipop(j).coeffs))
        try:
            system = Matrix.from_columns(F.field, vectors[:-1], F.dim)
            solve(system, vectors[-1])
            break
        except NoSolution:
            continue
    poly = minimal_polynomial(vectors)
    logger.debug("minimal polynomial of the lollipop has degree %d", len(poly) - 1)
    terms = max(CONFIG.SERIES_CHECK_TERMS, len(poly))
    dims = hilbert_series(F, terms)
    series = RationalSeries.from_recurrence(dims, poly)
    if series.expand(terms) != dims:
        raise ConsistencyError("closed form does not reproduce the computed F-dimensions")
    return series


def dim_via_beads(F: FrobeniusStructure, j: int) -> Scalar:
    """eps o (mu o Delta)^j o 1, computed through the coproduct."""
    x = F.algebra.one
    for _ in range(j):
        delta = coproduct(F, x)
        acc = F.algebra.zero
        for (m, l), c in delta.entries.items():
            acc = acc + (F.algebra.basis(m) * F.algebra.basis(l)) * c
        x = acc
    value = F.epsilon(x)
    if value != fdim(F, j):
        raise ConsistencyError(f"bead evaluation {value} differs from eps(B^{j})")
    return value


# Nakayama and twisting ============================================================


def nakayama(F: FrobeniusStructure) -> Matrix:
    """
    Matrix Z of the Nakayama automorphism, (zeta(a), b) = (b, a).

    Column i holds zeta(e_i); Z = (G^-1)^T G. The automorphism property is
    asserted on all basis pairs.
    """
    Z = F.metric_matrix.transpose() @ F.gram
    if _self_check_enabled(F.algebra, "Nakayama automorphism"):
        algebra = F.algebra
        images = [algebra.element(Z.column(i)) for i in range(F.dim)]
        if _apply(Z, algebra.one) != algebra.one:
            raise ConsistencyError("Nakayama map does not fix the unit")
        for i in range(F.dim):
            for j in range(F.dim):
                product = algebra.basis(i) * algebra.basis(j)
                if _apply(Z, product) != images[i] * images[j]:
                    raise ConsistencyError(
                        f"Nakayama map not multiplicative on ({algebra.labels[i]}, {algebra.labels[j]})"
                    )
    return Z


def _apply(M: Matrix, a: Element) -> Element:
    return a.algebra.element(M.apply(a.coeffs))


def apply_nakayama(F: FrobeniusStructure, a: Element) -> Element:
    return _apply(F.metric_matrix.transpose() @ F.gram, a)


def twist(F: FrobeniusStructure, u: Element) -> FrobeniusStructure:
    """
    The structure with eps_u(a) = eps(u a).

    Raises:
        NotInvertible: If u has no inverse.
    """
    algebra = F.algebra
    u_inv = element_inverse(u)
    eps_u = [F.epsilon(u * algebra.basis(i)) for i in range(F.dim)]
    twisted = make_frobenius(algebra, eps_u, twist_element=F.twist_element * u)
    if _self_check_enabled(F.algebra, "twist"):
        expected = _right_leg_multiply(F, u_inv)
        if expected != twisted.metric:
            raise ConsistencyError("twisted metric differs from sum g1 (x) u^-1 g2")
        Z = F.metric_matrix.transpose() @ F.gram
        Z_u = twisted.metric_matrix.transpose() @ twisted.gram
        for i in range(F.dim):
            e_i = algebra.basis(i)
            if _apply(Z_u, e_i) != u_inv * _apply(Z, e_i) * u:
                raise ConsistencyError(f"twisted Nakayama differs from Ad(u^-1) zeta on {algebra.labels[i]}")
    return twisted


def _right_leg_multiply(F: FrobeniusStructure, v: Element) -> Tensor:
    """sum g1 (x) v g2."""
    acc: Dict[Tuple[int, int], Scalar] = {}
    images = [v * F.algebra.basis(l) for l in range(F.dim)]
    for (k, l), g in F.metric.entries.items():
        for m, c in images[l].sparse().items():
            term = g * c
            acc[(k, m)] = acc[(k, m)] + term if (k, m) in acc else term
    return Tensor(F.field, F.dim, 2, acc)


def twisted_lollipop(F: FrobeniusStructure, u_inv: Element) -> Element:
    """B of the twist by u, read off as sum g1 u^-1 g2 without building the twist."""
    acc: Dict[int, Scalar] = {}
    images = [u_inv * F.algebra.basis(l) for l in range(F.dim)]
    for (k, l), g in F.metric.entries.items():
        product = F.algebra.basis(k) * images[l]
        for m, c in product.sparse().items():
            term = g * c
            acc[m] = acc[m] + term if m in acc else term
    zero = F.field.zero
    return F.algebra.element([acc.get(m, zero) for m in range(F.dim)])


def twist_element_between(F: FrobeniusStructure, eps2: Sequence[Scalar]) -> Element:
    """
    The element u with eps2(a) = eps(u a).

    Raises:
        NotInvertible: If eps2 is not a Frobenius form.
    """
    eps2 = [F.field.from_value(e) for e in eps2]
    u = F.algebra.element(solve(F.gram.transpose(), eps2))
    element_inverse(u)
    return u


def normalize_quasispecial(F: FrobeniusStructure) -> FrobeniusStructure:
    """Rescales eps by the quasispecial factor so that B = 1."""
    scale = quasispecial_factor(F)
    if scale is None:
        raise ConsistencyError("structure is not quasispecial")
    return make_frobenius(F.algebra, [e * scale for e in F.eps])


# Classification =====================================================================


def quasispecial_factor(F: FrobeniusStructure) -> Optional[Scalar]:
    """lambda with B = lambda 1_A, or None (also when B = 0)."""
    B = F._lollipop
    unit = F.algebra.unit
    pivot = next((k for k, c in enumerate(unit) if not c.is_zero()), None)
    if pivot is None:
        return None
    scale = B.coeffs[pivot] / unit[pivot]
    if scale.is_zero() or F.algebra.one * scale != B:
        return None
    return scale


def cocommutativity_check(F: FrobeniusStructure) -> bool:
    """(B (x) 1)(g - g_21) == 0."""
    difference = F.metric - F.metric.swap()
    acc: Dict[Tuple[int, int], Scalar] = {}
    images = [F._lollipop * F.algebra.basis(k) for k in range(F.dim)]
    for (k, l), c in difference.entries.items():
        for m, b in images[k].sparse().items():
            term = c * b
            acc[(m, l)] = acc[(m, l)] + term if (m, l) in acc else term
    return Tensor(F.field, F.dim, 2, acc).is_zero()


def vanishes_on_commutators(F: FrobeniusStructure) -> bool:
    functional = uloll(F)
    return all(dot(functional, c.coeffs).is_zero() for c in commutator_subspace(F.algebra))


def classify(F: FrobeniusStructure) -> Classification:
    """
    Symmetry and speciality flags.

    Weak symmetry is decided twice, by the commutator test and by
    cocommutativity; disagreement raises ConsistencyError.
    """
    symmetric = F.gram.is_symmetric()
    by_commutators = vanishes_on_commutators(F)
    by_cocommutativity = cocommutativity_check(F)
    if by_commutators != by_cocommutativity:
        raise ConsistencyError(
            f"weak symmetry tests disagree: commutators={by_commutators}, cocommutativity={by_cocommutativity}"
        )
    scale = quasispecial_factor(F)
    special = F._lollipop == F.algebra.one
    result = Classification(
        symmetric=symmetric,
        weakly_symmetric=by_commutators,
        special=special,
        quasispecial=scale,
        counit_scale=F.epsilon(F.algebra.one),
        fdim=fdim(F, 1),
    )
    if symmetric and not result.weakly_symmetric:
        raise ConsistencyError("symmetric structure failed the weak symmetry test")
    if scale is not None and result.weakly_symmetric and not symmetric:
        raise ConsistencyError("quasispecial structure classified as asymmetric weakly symmetric")
    return result


def is_nondegenerate(algebra: Algebra, eps: Sequence[Scalar]) -> bool:
    try:
        invert(gram_matrix(algebra, eps))
    except Singular:
        return False
    return True


def require_invertible(u: Element) -> Element:
    """Returns u^-1, raising NotInvertible with the element in the message."""
    try:
        return element_inverse(u)
    except NotInvertible:
        raise NotInvertible(f"twisting element {u} is not invertible") from None
