# services/expressions.py
"""
Tiny expression grammar for algebra elements.

    expr   := term (("+" | "-") term)*
    term   := power (["*"] power)*          juxtaposition multiplies
    power  := unary ("^" ["-"] digits)?
    unary  := "-" unary | atom
    atom   := rational | identifier | "(" expr ")"

Identifiers resolve through a namespace and must match an entry exactly;
write "E K" or "E*K" for products that are not basis labels.
"""
import re
from fractions import Fraction
from typing import List, Mapping, Tuple

from app.services.algebra import Algebra, Element
from app.services.errors import ParseError

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()−]))"
)

Token = Tuple[str, str, int]


def _tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos + len(text[pos:]) - len(text[pos:].lstrip()))
        kind = match.lastgroup
        value = match.group(kind)
        if value == "−":
            value = "-"
        tokens.append((kind, value, match.start(kind)))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str, algebra: Algebra, namespace: Mapping[str, Element]) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.algebra = algebra
        self.namespace = namespace

    def _peek(self) -> Tuple[str, str, int]:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return ("end", "", len(self.text))

    def _take(self) -> Tuple[str, str, int]:
        token = self._peek()
        self.pos += 1
        return token

    def parse(self) -> Element:
        if not self.tokens:
            raise ParseError("empty expression", 0)
        value = self._expr()
        kind, text, where = self._peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", where)
        return value

    def _expr(self) -> Element:
        value = self._term()
        while self._peek()[1] in ("+", "-") and self._peek()[0] == "op":
            _, op, _ = self._take()
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _starts_atom(self) -> bool:
        kind, text, _ = self._peek()
        return kind in ("number", "name") or (kind == "op" and text == "(")

    def _term(self) -> Element:
        value = self._power()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text == "*":
                self._take()
                value = value * self._power()
            elif self._starts_atom():
                value = value * self._power()
            else:
                return value

    def _power(self) -> Element:
        base = self._unary()
        kind, text, where = self._peek()
        if kind == "op" and text == "^":
            self._take()
            sign = 1
            if self._peek()[:2] == ("op", "-"):
                self._take()
                sign = -1
            kind, digits, where = self._take()
            if kind != "number" or "/" in digits:
                raise ParseError("exponent must be an integer", where)
            return base ** (sign * int(digits))
        return base

    def _unary(self) -> Element:
        kind, text, _ = self._peek()
        if kind == "op" and text == "-":
            self._take()
            return -self._unary()
        return self._atom()

    def _atom(self) -> Element:
        kind, text, where = self._take()
        if kind == "number":
            return self.algebra.one * Fraction(text)
        if kind == "name":
            return self._resolve(text, where)
        if kind == "op" and text == "(":
            value = self._expr()
            closing = self._take()
            if closing[:2] != ("op", ")"):
                raise ParseError("missing closing parenthesis", closing[2])
            return value
        raise ParseError(f"unexpected {text!r}" if text else "unexpected end of expression", where)

    def _resolve(self, name: str, where: int) -> Element:
        if name in self.namespace:
            return self.namespace[name]
        raise ParseError(f"unknown identifier {name!r}", where)


def parse_element(text: str, algebra: Algebra, namespace: Mapping[str, Element]) -> Element:
    """
    Parses an element expression such as "K*(1 - 3/2 F^2 E^2)".

    Raises:
        ParseError: With the character offset of the first problem.
        NotInvertible: For a negative power of a non-invertible element.
    """
    return _Parser(text, algebra, namespace).parse()
