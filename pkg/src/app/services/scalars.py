# services/scalars.py
"""Exact scalars over Q and the cyclotomic fields Q(zeta_n).

A cyclotomic element is stored as its coefficient vector in the power basis
1, zeta, ..., zeta^(deg-1), fully reduced modulo the n-th cyclotomic
polynomial, so equality is plain coefficient equality.
"""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple, Union

from app.config import CONFIG
from app.services.errors import DivisionByZero, FieldMismatch, ParseError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]
_ZERO = Fraction(0)
_ONE = Fraction(1)


class FieldKind(Enum):
    RATIONAL = "rational"
    CYCLOTOMIC = "cyclotomic"


# Polynomial helpers over Q (ascending coefficient lists) =======================


def _trim(poly: List[Fraction]) -> List[Fraction]:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    """Exact long division in Q[x]."""
    num = _trim([Fraction(c) for c in num])
    den = _trim([Fraction(c) for c in den])
    if not den:
        raise DivisionByZero("polynomial division by zero")
    quotient = [_ZERO] * max(len(num) - len(den) + 1, 0)
    lead = den[-1]
    while len(num) >= len(den):
        shift = len(num) - len(den)
        factor = num[-1] / lead
        quotient[shift] = factor
        for idx, c in enumerate(den):
            num[shift + idx] -= factor * c
        _trim(num)
    return _trim(quotient), num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> Tuple[int, ...]:
    """Integer coefficients (ascending) of Phi_n via Phi_n = (x^n - 1) / prod_{d|n, d<n} Phi_d."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    numerator: List[Fraction] = [Fraction(-1)] + [_ZERO] * (n - 1) + [_ONE]
    for d in range(1, n):
        if n % d == 0:
            numerator, remainder = _poly_divmod(numerator, cyclotomic_polynomial(d))
            if remainder:
                raise ArithmeticError(f"Phi_{d} does not divide x^{n} - 1")
    coeffs = tuple(int(c) for c in numerator)
    logger.debug("Phi_%d = %s", n, coeffs)
    return coeffs


# Fields =======================================================================


@dataclass(frozen=True)
class FieldSpec:
    """Ground field: Q, or Q(zeta_n) for a primitive n-th root of unity."""

    kind: FieldKind
    order: int = 1

    def __post_init__(self) -> None:
        if self.kind is FieldKind.CYCLOTOMIC:
            if self.order < 2:
                raise ValueError("cyclotomic order must be at least 2")
            if self.order > CONFIG.MAX_CYCLOTOMIC_ORDER:
                raise ValueError(
                    f"cyclotomic order {self.order} exceeds {CONFIG.MAX_CYCLOTOMIC_ORDER}"
                )
        elif self.order != 1:
            raise ValueError("the rational field carries no order")

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls(FieldKind.RATIONAL)

    @classmethod
    def cyclotomic(cls, n: int) -> "FieldSpec":
        return cls(FieldKind.CYCLOTOMIC, n)

    @property
    def is_rational(self) -> bool:
        return self.kind is FieldKind.RATIONAL

    @property
    def modulus(self) -> Tuple[int, ...]:
        return (0, 1) if self.is_rational else cyclotomic_polynomial(self.order)

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def zero(self) -> "Scalar":
        return Scalar._raw(self, (_ZERO,) * self.degree)

    @property
    def one(self) -> "Scalar":
        return self.from_value(1)

    def from_value(self, value: Union[Number, "Scalar"]) -> "Scalar":
        """Embeds an int, Fraction or same-field Scalar."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatch(value.field, self)
            return value
        return Scalar._raw(self, (Fraction(value),) + (_ZERO,) * (self.degree - 1))

    def to_json(self) -> dict:
        if self.is_rational:
            return {"kind": "rational"}
        return {"kind": "cyclotomic", "order": self.order}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        kind = str(data.get("kind", "")).lower()
        if kind == "rational":
            return cls.rational()
        if kind == "cyclotomic":
            return cls.cyclotomic(int(data["order"]))
        raise ParseError(f"unknown field kind {kind!r}")

    def __str__(self) -> str:
        return "Q" if self.is_rational else f"Q(zeta_{self.order})"


# Scalars ======================================================================


class Scalar:
    """Immutable exact field element in canonical reduced form."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: FieldSpec, coeffs: Iterable[Number]) -> None:
        values = [Fraction(c) for c in coeffs]
        reduced = _reduce(field, values)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", reduced)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, field: FieldSpec, coeffs: Tuple[Fraction, ...]) -> "Scalar":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "coeffs", coeffs)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- coercion ---------------------------------------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(self.field, other.field)
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_value(other)
        return NotImplemented

    # -- predicates ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar._raw(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar._raw(self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self) -> "Scalar":
        return Scalar._raw(self.field, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) == 1:
            return Scalar._raw(self.field, (a[0] * b[0],))
        if not any(a[1:]):
            return Scalar._raw(self.field, tuple(a[0] * c for c in b))
        if not any(b[1:]):
            return Scalar._raw(self.field, tuple(b[0] * c for c in a))
        product = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        product[i + j] += x * y
        return Scalar._raw(self.field, _reduce(self.field, product))

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        """Multiplicative inverse; extended Euclid modulo Phi_n for cyclotomic fields."""
        if self.is_zero():
            raise DivisionByZero(f"cannot invert zero in {self.field}")
        if self.is_rational():
            return self.field.from_value(1 / self.coeffs[0])
        inverse = _inverse_mod(list(self.coeffs), [Fraction(c) for c in self.field.modulus])
        return Scalar(self.field, inverse)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inv()

    def __pow__(self, exponent: int) -> "Scalar":
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inv()
        result = self.field.one
        power = abs(exponent)
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    # -- comparison ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.field, self.coeffs)))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r}, {self.field})"

    def __str__(self) -> str:
        return format_scalar(self)


def _reduce(field: FieldSpec, values: List[Fraction]) -> Tuple[Fraction, ...]:
    degree = field.degree
    if field.is_rational:
        if len(values) != 1:
            raise ValueError("a rational scalar has exactly one coefficient")
        return (values[0],)
    modulus = field.modulus
    values = list(values)
    for top in range(len(values) - 1, degree - 1, -1):
        c = values[top]
        if c:
            base = top - degree
            for t in range(degree):
                if modulus[t]:
                    values[base + t] -= c * modulus[t]
            values[top] = _ZERO
    values = values[:degree]
    values += [_ZERO] * (degree - len(values))
    return tuple(values)


def _inverse_mod(a: List[Fraction], m: List[Fraction]) -> List[Fraction]:
    # Invariant: s_i * a == r_i (mod m).
    r0, r1 = _trim(list(m)), _trim(list(a))
    s0, s1 = [], [_ONE]
    while r1:
        q, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, rem
        qs = _poly_mul(q, s1)
        length = max(len(s0), len(qs))
        s_next = [
            (s0[i] if i < len(s0) else _ZERO) - (qs[i] if i < len(qs) else _ZERO)
            for i in range(length)
        ]
        s0, s1 = s1, _trim(s_next)
    if len(r0) != 1:
        raise DivisionByZero("element shares a factor with the modulus")
    return [c / r0[0] for c in s0]


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# Field operations ===============================================================


def root_of_unity(field: FieldSpec, power: int) -> Scalar:
    """Canonical representative of zeta^power in Q(zeta_n)."""
    if field.is_rational:
        raise FieldMismatch(field, "cyclotomic field")
    return _root_table(field)[power % field.order]


@lru_cache(maxsize=None)
def _root_table(field: FieldSpec) -> Tuple[Scalar, ...]:
    roots = []
    for k in range(field.order):
        monomial = [_ZERO] * k + [_ONE]
        roots.append(Scalar(field, monomial))
    return tuple(roots)


def field_ops(a: Scalar, b: Scalar) -> dict:
    """All binary field operations at once; the quotient is omitted when b is zero."""
    if a.field != b.field:
        raise FieldMismatch(a.field, b.field)
    results = {"add": a + b, "sub": a - b, "mul": a * b, "neg": -a}
    if not b.is_zero():
        results["div"] = a / b
        results["inv"] = b.inv()
    return results


# Text format ====================================================================

_RATIONAL_RE = re.compile(r"\s*([+\-−]?)\s*(\d+)(?:\s*/\s*(\d+))?\s*")


def _parse_rational(text: str, offset: int = 0) -> Fraction:
    match = _RATIONAL_RE.fullmatch(text)
    if not match:
        raise ParseError(f"malformed rational {text.strip()!r}", offset)
    sign, numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise ParseError("zero denominator", offset + text.find("/"))
    value = Fraction(int(numerator), int(denominator) if denominator else 1)
    return -value if sign in ("-", "−") else value


def parse_scalar(text: str, field: FieldSpec) -> Scalar:
    """
    Parses a rational literal or a bracketed coefficient list.

    Args:
        text: "-3/2" style rational, or "[c0, c1, ...]" giving the coefficients of
            zeta^0 .. zeta^(deg-1) (shorter lists are zero-padded).
        field: Target field.

    Returns:
        The canonical Scalar.

    Raises:
        ParseError: On malformed input, with the offending position.
    """
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty scalar literal", 0)
    if stripped.startswith("["):
        start = text.index("[")
        if not stripped.endswith("]"):
            raise ParseError("missing closing bracket", len(text))
        body = text[start + 1 : text.rindex("]")]
        if not body.strip():
            return field.zero
        coeffs: List[Fraction] = []
        offset = start + 1
        for piece in body.split(","):
            coeffs.append(_parse_rational(piece, offset))
            offset += len(piece) + 1
        if len(coeffs) > field.degree:
            raise ParseError(
                f"{len(coeffs)} coefficients given, {field} has degree {field.degree}",
                start,
            )
        return Scalar(field, coeffs + [_ZERO] * (field.degree - len(coeffs)))
    return field.from_value(_parse_rational(text))


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_scalar(s: Scalar) -> str:
    """Inverse of parse_scalar: bare rational when the value is rational, bracketed list otherwise."""
    if s.is_rational():
        return _format_rational(s.coeffs[0])
    return "[" + ", ".join(_format_rational(c) for c in s.coeffs) + "]"
