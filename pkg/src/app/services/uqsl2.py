# services/uqsl2.py
"""
Reduced quantum group u_q(sl2) and the Taft algebra at a primitive n-th root q.

Relations: EK = qKE, FK = q^-1 KF, [E, F] = (K - K^-1)/(q - q^-1),
K^n = 1, E^n = F^n = 0. The basis is K^i F^j E^k sorted by (i, j, k);
K^-1 is stored as K^(n-1).

Products are normal ordered by rewriting from the right: a normal monomial
times one generator is rewritten with a single relation (K moves left past
F and E; E^k F picks up the commutator terms), and longer words are folded
letter by letter.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple, Union

from app.services.algebra import Algebra, Element, center, commutator_subspace, element_inverse, make_algebra
from app.services.errors import NotInvertible, ParseError
from app.services.frobenius import FrobeniusStructure, gram_matrix, make_frobenius, twist
from app.services.linalg import Matrix, determinant, dot
from app.services.scalars import FieldSpec, Scalar, root_of_unity

logger = logging.getLogger(__name__)

Monomial = Tuple[int, int, int]
Terms = Dict[Monomial, Scalar]
Number = Union[int, Fraction, Scalar]

VALIDATE_MAX_ORDER = 3
"""u_q(sl2) tables up to this n are checked for associativity on construction."""


def monomials(n: int) -> List[Monomial]:
    return [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]


def _power_label(symbol: str, exponent: int) -> str:
    if exponent == 0:
        return ""
    return symbol if exponent == 1 else f"{symbol}^{exponent}"


def monomial_label(monomial: Monomial) -> str:
    i, j, k = monomial
    label = _power_label("K", i) + _power_label("F", j) + _power_label("E", k)
    return label or "1"


class _Rewriter:
    """Right multiplication of normal monomials by single generators."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.field = FieldSpec.cyclotomic(n)
        self.q = root_of_unity(self.field, 1)
        difference = self.q - self.q.inv()
        # at n = 2, K = K^-1 and the commutator [E, F] vanishes
        self.h = difference.inv() if not difference.is_zero() else None

    def q_power(self, exponent: int) -> Scalar:
        return root_of_unity(self.field, exponent)

    def _add(self, acc: Terms, key: Monomial, value: Scalar) -> None:
        if key in acc:
            acc[key] = acc[key] + value
        else:
            acc[key] = value

    def times_k(self, terms: Terms, power: int = 1) -> Terms:
        """E^k K = q^k K E^k and F^j K = q^-j K F^j."""
        acc: Terms = {}
        for (i, j, k), c in terms.items():
            self._add(acc, ((i + power) % self.n, j, k), c * self.q_power((k - j) * power))
        return acc

    def times_e(self, terms: Terms, power: int = 1) -> Terms:
        acc: Terms = {}
        for (i, j, k), c in terms.items():
            if k + power < self.n:
                self._add(acc, (i, j, k + power), c)
        return acc

    def times_f(self, terms: Terms) -> Terms:
        """E^k F = F E^k + (A_k K - B_k K^-1) E^(k-1) / (q - q^-1)."""
        acc: Terms = {}
        for (i, j, k), c in terms.items():
            if j + 1 < self.n:
                self._add(acc, (i, j + 1, k), c)
            if k == 0 or self.h is None:
                continue
            a_k = sum((self.q_power(m) for m in range(k)), self.field.zero)
            b_k = sum((self.q_power(-m) for m in range(k)), self.field.zero)
            self._add(acc, ((i + 1) % self.n, j, k - 1), c * a_k * self.h * self.q_power(-j))
            self._add(acc, ((i - 1) % self.n, j, k - 1), -(c * b_k * self.h * self.q_power(j)))
        return {key: v for key, v in acc.items() if not v.is_zero()}

    def times_letter(self, terms: Terms, letter: str) -> Terms:
        if letter == "K":
            return self.times_k(terms)
        if letter in ("K^-1", "Kinv", "K⁻¹"):
            return self.times_k(terms, self.n - 1)
        if letter == "E":
            return self.times_e(terms)
        if letter == "F":
            return self.times_f(terms)
        raise ParseError(f"unknown generator {letter!r}", 0)


@lru_cache(maxsize=None)
def _rewriter(n: int) -> _Rewriter:
    return _Rewriter(n)


def _monomial_product(n: int, left: Monomial, right: Monomial, f_cache: Dict[Tuple[int, int, int], Terms]) -> Terms:
    rw = _rewriter(n)
    i1, j1, k1 = left
    i2, j2, k2 = right
    # (K^i1 F^j1 E^k1) K^i2 is a single monomial
    factor = rw.q_power((k1 - j1) * i2)
    key = (j1, k1, j2)
    if key not in f_cache:
        terms: Terms = {(0, j1, k1): rw.field.one}
        for _ in range(j2):
            terms = rw.times_f(terms)
        f_cache[key] = terms
    shifted = {((i + i1 + i2) % n, j, k): c * factor for (i, j, k), c in f_cache[key].items()}
    return rw.times_e(shifted, k2) if k2 else shifted


@lru_cache(maxsize=None)
def uqsl2(n: int) -> Algebra:
    """
    u_q(sl2) over Q(zeta_n), dimension n^3.

    Tables with n <= VALIDATE_MAX_ORDER are validated for associativity;
    larger ones are built trusted.
    """
    if n < 2:
        raise ValueError("u_q(sl2) needs n >= 2")
    basis = monomials(n)
    index = {m: t for t, m in enumerate(basis)}
    field = _rewriter(n).field
    f_cache: Dict[Tuple[int, int, int], Terms] = {}
    structure = {}
    for a, left in enumerate(basis):
        for b, right in enumerate(basis):
            product = _monomial_product(n, left, right, f_cache)
            if product:
                structure[(a, b)] = {index[m]: c for m, c in product.items()}
    unit = [field.one if m == (0, 0, 0) else field.zero for m in basis]
    labels = [monomial_label(m) for m in basis]
    algebra = make_algebra(field, labels, structure, unit, trusted=n > VALIDATE_MAX_ORDER)
    logger.debug("u_q(sl2) at n=%d built with %d nonzero products", n, len(structure))
    return algebra


def monomial_element(algebra: Algebra, n: int, monomial: Monomial) -> Element:
    i, j, k = monomial
    return algebra.basis_element(monomial_label((i % n, j, k)))


def normal_order(n: int, word: Sequence[str], scalar: Number = 1) -> Element:
    """
    Normal orders scalar * w_1 w_2 ... over {K, K^-1, E, F}.

    Raises:
        ParseError: On letters outside the alphabet.
    """
    algebra = uqsl2(n)
    rw = _rewriter(n)
    terms: Terms = {(0, 0, 0): rw.field.from_value(scalar)}
    for letter in word:
        terms = rw.times_letter(terms, letter)
    coeffs = [rw.field.zero] * algebra.dim
    for (i, j, k), c in terms.items():
        coeffs[algebra.index(monomial_label((i, j, k)))] = coeffs[algebra.index(monomial_label((i, j, k)))] + c
    return algebra.element(coeffs)


def generator_namespace(algebra: Algebra, n: int, with_e: bool = True) -> Dict[str, Element]:
    """Identifiers K, E, F and the scalar q for expression parsing."""
    field = algebra.field
    namespace = {
        "K": algebra.basis_element("K"),
        "F": algebra.basis_element("F"),
        "q": algebra.one * root_of_unity(field, 1),
    }
    if with_e:
        namespace["E"] = algebra.basis_element("E")
    namespace.update({label: algebra.basis(i) for i, label in enumerate(algebra.labels) if label != "1"})
    return namespace


def q_of(algebra: Algebra) -> Scalar:
    return root_of_unity(algebra.field, 1)


# Frobenius forms =====================================================================


def integral_functional(n: int) -> List[Scalar]:
    """The integral on the basis: 1 on K F^(n-1) E^(n-1), 0 elsewhere."""
    algebra = uqsl2(n)
    top = algebra.index(monomial_label((1 % n, n - 1, n - 1)))
    return [algebra.field.one if t == top else algebra.field.zero for t in range(algebra.dim)]


def uqsl2_integral_form(n: int) -> FrobeniusStructure:
    """eps = integral, supported on K F^(n-1) E^(n-1)."""
    return make_frobenius(uqsl2(n), integral_functional(n))


def k_twisted_gram(n: int) -> Matrix:
    """Gram matrix of eps(K .), built without inverting anything."""
    algebra = uqsl2(n)
    K = algebra.basis_element("K")
    integral = integral_functional(n)
    eps_k = [dot(integral, (K * algebra.basis(t)).coeffs) for t in range(algebra.dim)]
    return gram_matrix(algebra, eps_k)


def uqsl2_symmetric_form(n: int) -> FrobeniusStructure:
    """The integral twisted by K."""
    base = uqsl2_integral_form(n)
    return twist(base, base.algebra.basis_element("K"))


def cartan_element(algebra: Algebra, coeffs: Sequence[Number]) -> Element:
    """sum u_i K^i."""
    acc = algebra.zero
    for i, c in enumerate(coeffs):
        acc = acc + algebra.basis_element(monomial_label((i, 0, 0))) * c
    return acc


def circulant_matrix(coeffs: Sequence[Scalar]) -> Matrix:
    """Entry (r, c) is u_{(r - c) mod n}."""
    n = len(coeffs)
    return Matrix(coeffs[0].field, [[coeffs[(r - c) % n] for c in range(n)] for r in range(n)])


def circulant_determinant(coeffs: Sequence[Scalar]) -> Scalar:
    return determinant(circulant_matrix(coeffs))


@dataclass(frozen=True)
class CartanPrediction:
    delta: Scalar
    eps_top: Tuple[Scalar, Scalar, Scalar]
    fdim: Scalar
    ratio: Scalar
    u1: Scalar

    def higher_dim(self, j: int) -> Scalar:
        """u1 (9 (u1^2 - u0 u2) / delta)^j, meaningful for j >= 2."""
        return self.u1 * self.ratio ** j


def cartan_prediction(u0: Number, u1: Number, u2: Number) -> CartanPrediction:
    field = FieldSpec.cyclotomic(3)
    u0, u1, u2 = (field.from_value(x) for x in (u0, u1, u2))
    delta = u0 ** 3 + u1 ** 3 + u2 ** 3 - 3 * u0 * u1 * u2
    if delta.is_zero():
        raise NotInvertible("Cartan element with delta = 0")
    core = u1 * u1 - u0 * u2
    return CartanPrediction(
        delta=delta,
        eps_top=(u1, u0, u2),
        fdim=27 * u1 * core / delta,
        ratio=9 * core / delta,
        u1=u1,
    )


def uqsl2_cartan_twist(u0: Number, u1: Number, u2: Number) -> FrobeniusStructure:
    """
    Integral form at n = 3 twisted by u0 + u1 K + u2 K^2.

    Raises:
        NotInvertible: When delta = u0^3 + u1^3 + u2^3 - 3 u0 u1 u2 vanishes.
    """
    cartan_prediction(u0, u1, u2)
    base = uqsl2_integral_form(3)
    return twist(base, cartan_element(base.algebra, [u0, u1, u2]))


def casimir(n: int = 3) -> Element:
    """c_q = K + q K^-1 - 3 q^2 FE at n = 3."""
    if n != 3:
        raise ValueError("the Casimir normalization is only provided for n = 3")
    algebra = uqsl2(3)
    q = q_of(algebra)
    K = algebra.basis_element("K")
    return K + algebra.basis_element("K^2") * q - algebra.basis_element("FE") * (3 * q * q)


def center_dimension(n: int) -> int:
    return len(center(uqsl2(n)))


def symmetric_form_count(n: int) -> int:
    """Dimension of the space of forms with eps(ab) = eps(ba), i.e. dim A/[A, A]."""
    algebra = uqsl2(n)
    return algebra.dim - len(commutator_subspace(algebra))


def degree(monomial: Monomial, n: int) -> int:
    """Number of F's minus number of E's, mod n."""
    _, j, k = monomial
    return (j - k) % n


def _parse_label(algebra: Algebra, t: int) -> Monomial:
    label = algebra.labels[t]
    exps = {"K": 0, "F": 0, "E": 0}
    if label != "1":
        pos = 0
        while pos < len(label):
            symbol = label[pos]
            pos += 1
            power = 1
            if pos < len(label) and label[pos] == "^":
                end = pos + 1
                while end < len(label) and label[end].isdigit():
                    end += 1
                power = int(label[pos + 1 : end])
                pos = end
            exps[symbol] = power
    return exps["K"], exps["F"], exps["E"]


def monomial_of(algebra: Algebra, t: int) -> Monomial:
    return _parse_label(algebra, t)


def _project(x: Element, keep) -> Element:
    algebra = x.algebra
    zero = algebra.field.zero
    return algebra.element([c if keep(monomial_of(algebra, t)) else zero for t, c in enumerate(x.coeffs)])


def degree_zero_part(x: Element) -> Element:
    """Projection onto the monomials with equal powers of F and E."""
    return _project(x, lambda m: m[1] == m[2])


def cartan_part(x: Element) -> Element:
    """Projection onto the span of 1, K, ..., K^(n-1)."""
    return _project(x, lambda m: m[1] == 0 and m[2] == 0)


def is_degree_zero(x: Element) -> bool:
    return degree_zero_part(x) == x


# Named families ======================================================================

N2_PARAMETER_ORDER: Tuple[str, ...] = ("1", "K", "FE", "KFE", "E", "KE", "F", "KF")
"""Basis order (1, K, EF, KEF, E, KE, F, KF) at n = 2, where EF = FE."""


@dataclass(frozen=True)
class N2Parameters:
    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar
    alpha: Scalar
    beta: Scalar
    gamma: Scalar
    delta: Scalar

    @classmethod
    def of(cls, *values: Number) -> "N2Parameters":
        field = FieldSpec.cyclotomic(2)
        return cls(*(field.from_value(v) for v in values))

    def as_list(self) -> List[Scalar]:
        return [self.a, self.b, self.c, self.d, self.alpha, self.beta, self.gamma, self.delta]


def n2_element(p: N2Parameters) -> Element:
    """a + bK + cEF + dKEF + alpha E + beta KE + gamma F + delta KF."""
    algebra = uqsl2(2)
    acc = algebra.zero
    for label, c in zip(N2_PARAMETER_ORDER, p.as_list()):
        acc = acc + algebra.basis_element(label) * c
    return acc


def n2_inverse_closed_form(p: N2Parameters) -> Element:
    algebra = uqsl2(2)
    a, b, c, d = p.a, p.b, p.c, p.d
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    norm = a * a - b * b
    if norm.is_zero():
        raise NotInvertible("n = 2 element with a^2 = b^2")
    ef = -((a * a + b * b) * c - 2 * a * (b * d + al * ga - be * de)) / norm
    kef = -((a * a + b * b) * d - 2 * b * (a * c - al * ga + be * de)) / norm
    values = [a, -b, ef, kef, -al, -be, -ga, -de]
    acc = algebra.zero
    for label, v in zip(N2_PARAMETER_ORDER, values):
        acc = acc + algebra.basis_element(label) * (v / norm)
    return acc


def n2_predicted_form(p: N2Parameters) -> List[Scalar]:
    """eps_u on the order (1, K, EF, KEF, E, KE, F, KF)."""
    return [p.d, p.c, p.b, p.a, p.delta, -p.gamma, p.beta, -p.alpha]


def n2_predicted_lollipop_factor(p: N2Parameters) -> Scalar:
    """B = (8b / (b^2 - a^2)) EF."""
    return 8 * p.b / (p.b * p.b - p.a * p.a)


def in_parameter_order(algebra: Algebra, values: Sequence[Scalar]) -> List[Scalar]:
    """Reorders a basis-indexed vector of u_{-1}(sl2) into N2_PARAMETER_ORDER."""
    return [values[algebra.index(label)] for label in N2_PARAMETER_ORDER]


def n3_weakly_symmetric_inverse(u0: Number, u6: Number, u7: Number, u8: Number) -> Element:
    """u^-1 = u0(1 + K) + (1/3)(-q u6 + (q+1) u7 - u8) K^2 + (u6 + K u7 + K^2 u8) F^2E^2."""
    algebra = uqsl2(3)
    field = algebra.field
    q = q_of(algebra)
    u0, u6, u7, u8 = (field.from_value(x) for x in (u0, u6, u7, u8))
    K = algebra.basis_element("K")
    K2 = algebra.basis_element("K^2")
    top = algebra.basis_element("F^2E^2")
    return (
        (algebra.one + K) * u0
        + K2 * ((-q * u6 + (q + 1) * u7 - u8) / 3)
        + (algebra.one * u6 + K * u7 + K2 * u8) * top
    )


def n3_example_twist_element() -> Element:
    """u = K (1 - 3/2 F^2 E^2)."""
    algebra = uqsl2(3)
    K = algebra.basis_element("K")
    return K * (algebra.one - algebra.basis_element("F^2E^2") * Fraction(3, 2))


def n3_example_uloll() -> Dict[str, Scalar]:
    """Nonzero values of the functional a -> eps(B a) for the example twist."""
    field = FieldSpec.cyclotomic(3)
    q = root_of_unity(field, 1)
    return {
        "1": field.from_value(18),
        "FE": field.from_value(6),
        "KFE": -18 * q / ((2 + q) * (2 + q)),
        "K^2FE": 6 * (q - 1) / (2 + q),
    }


def inverse_via_degree_zero(v: Element) -> Element:
    """(deg_0(v))^-1, raising NotInvertible when the projection is singular."""
    return element_inverse(degree_zero_part(v))


# Taft algebra ========================================================================


def taft_label(i: int, j: int) -> str:
    return (_power_label("K", i) + _power_label("F", j)) or "1"


@lru_cache(maxsize=None)
def taft(n: int) -> Algebra:
    """Subalgebra generated by K and F: basis K^i F^j, F^j K^i = q^(-ij) K^i F^j."""
    if n < 2:
        raise ValueError("the Taft algebra needs n >= 2")
    field = FieldSpec.cyclotomic(n)
    basis = [(i, j) for i in range(n) for j in range(n)]
    index = {m: t for t, m in enumerate(basis)}
    structure = {}
    for a, (i1, j1) in enumerate(basis):
        for b, (i2, j2) in enumerate(basis):
            if j1 + j2 < n:
                structure[(a, b)] = {index[((i1 + i2) % n, j1 + j2)]: root_of_unity(field, -j1 * i2)}
    unit = [field.one if m == (0, 0) else field.zero for m in basis]
    return make_algebra(field, [taft_label(i, j) for i, j in basis], structure, unit)


def taft_form(n: int) -> FrobeniusStructure:
    """eps supported on F^(n-1)."""
    algebra = taft(n)
    top = algebra.index(taft_label(0, n - 1))
    return make_frobenius(algebra, [algebra.field.one if t == top else algebra.field.zero for t in range(algebra.dim)])
