# services/series.py
"""Polynomials over a Scalar field and exact rational generating functions."""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from app.services.errors import DivisionByZero, FieldMismatch, ShapeMismatch
from app.services.scalars import FieldSpec, Scalar, format_scalar

logger = logging.getLogger(__name__)

Poly = List[Scalar]


def poly_trim(p: Sequence[Scalar]) -> Poly:
    out = list(p)
    while out and out[-1].is_zero():
        out.pop()
    return out


def poly_add(a: Sequence[Scalar], b: Sequence[Scalar], field: FieldSpec) -> Poly:
    n = max(len(a), len(b))
    zero = field.zero
    return poly_trim(
        [(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)]
    )


def poly_scale(a: Sequence[Scalar], factor: Scalar) -> Poly:
    return poly_trim([c * factor for c in a])


def poly_mul(a: Sequence[Scalar], b: Sequence[Scalar], field: FieldSpec) -> Poly:
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_divmod(num: Sequence[Scalar], den: Sequence[Scalar], field: FieldSpec) -> Tuple[Poly, Poly]:
    num = poly_trim(num)
    den = poly_trim(den)
    if not den:
        raise DivisionByZero("polynomial division by zero")
    quotient = [field.zero] * max(len(num) - len(den) + 1, 0)
    lead_inv = den[-1].inv()
    while len(num) >= len(den):
        shift = len(num) - len(den)
        factor = num[-1] * lead_inv
        quotient[shift] = factor
        for idx, c in enumerate(den):
            num[shift + idx] = num[shift + idx] - factor * c
        num = poly_trim(num)
    return poly_trim(quotient), num


def poly_gcd(a: Sequence[Scalar], b: Sequence[Scalar], field: FieldSpec) -> Poly:
    """Monic greatest common divisor (the zero polynomial when both vanish)."""
    a, b = poly_trim(a), poly_trim(b)
    while b:
        _, r = poly_divmod(a, b, field)
        a, b = b, r
    if not a:
        return []
    return poly_scale(a, a[-1].inv())


def poly_eval(p: Sequence[Scalar], x: Scalar) -> Scalar:
    acc = x.field.zero
    for c in reversed(p):
        acc = acc * x + c
    return acc


def format_poly(p: Sequence[Scalar], var: str = "x") -> str:
    terms = []
    for power, c in enumerate(p):
        if c.is_zero():
            continue
        coeff = format_scalar(c)
        if power == 0:
            terms.append(coeff)
        elif c == 1:
            terms.append(var if power == 1 else f"{var}^{power}")
        else:
            terms.append(f"{coeff}*{var}" if power == 1 else f"{coeff}*{var}^{power}")
    return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class RationalSeries:
    """
    Exact generating function P(x)/Q(x) in lowest terms with Q(0) = 1.

    The normalization makes structural equality coincide with equality of
    rational functions.
    """

    field: FieldSpec
    numerator: Tuple[Scalar, ...]
    denominator: Tuple[Scalar, ...]

    @classmethod
    def from_fraction(cls, numerator: Sequence[Scalar], denominator: Sequence[Scalar], field: FieldSpec) -> "RationalSeries":
        num, den = poly_trim(numerator), poly_trim(denominator)
        for c in num + den:
            if c.field != field:
                raise FieldMismatch(field, c.field)
        if not den:
            raise DivisionByZero("zero denominator")
        common = poly_gcd(num, den, field) if num else list(den)
        if len(common) > 1:
            num, _ = poly_divmod(num, common, field)
            den, _ = poly_divmod(den, common, field)
        if not num:
            den = [field.one]
        if den[0].is_zero():
            raise ShapeMismatch("denominator vanishes at x = 0; not a power series")
        scale = den[0].inv()
        return cls(field, tuple(poly_scale(num, scale)), tuple(poly_scale(den, scale)))

    @classmethod
    def geometric(cls, numerator: Scalar, ratio: Scalar) -> "RationalSeries":
        """numerator / (1 - ratio*x)."""
        field = numerator.field
        return cls.from_fraction([numerator], [field.one, -ratio], field)

    @classmethod
    def from_recurrence(cls, dims: Sequence[Scalar], minimal_poly: Sequence[Scalar]) -> "RationalSeries":
        """
        Closed form of a sequence satisfying the recurrence given by a monic
        polynomial p(t) = t^k + c_{k-1} t^{k-1} + ... + c_0.

        The denominator is the reversal Q(x) = 1 + c_{k-1} x + ... + c_0 x^k and
        the numerator is (Q * sum dims_j x^j) truncated below degree k.
        """
        k = len(minimal_poly) - 1
        if len(dims) < k:
            raise ShapeMismatch(f"need {k} terms to fix the numerator, got {len(dims)}")
        field = minimal_poly[-1].field
        denominator = list(reversed(minimal_poly))
        numerator = poly_mul(denominator, list(dims[:k]), field)[:k]
        return cls.from_fraction(numerator, denominator, field)

    def expand(self, terms: int) -> List[Scalar]:
        """First `terms` Taylor coefficients."""
        out: List[Scalar] = []
        zero = self.field.zero
        for n in range(terms):
            acc = self.numerator[n] if n < len(self.numerator) else zero
            for i in range(1, min(n, len(self.denominator) - 1) + 1):
                acc = acc - self.denominator[i] * out[n - i]
            out.append(acc)
        return out

    def is_polynomial(self) -> bool:
        return len(self.denominator) == 1

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        if self.field != other.field:
            raise FieldMismatch(self.field, other.field)
        f = self.field
        num = poly_add(
            poly_mul(self.numerator, other.denominator, f),
            poly_mul(other.numerator, self.denominator, f),
            f,
        )
        return RationalSeries.from_fraction(num, poly_mul(self.denominator, other.denominator, f), f)

    def to_json(self) -> dict:
        return {
            "numerator": [format_scalar(c) for c in self.numerator],
            "denominator": [format_scalar(c) for c in self.denominator],
        }

    def __str__(self) -> str:
        num = format_poly(self.numerator)
        if self.is_polynomial():
            return num
        return f"({num}) / ({format_poly(self.denominator)})"
