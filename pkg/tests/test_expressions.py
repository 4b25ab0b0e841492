from fractions import Fraction

import pytest

from app.services import uqsl2 as uq
from app.services.builders import resolve_builtin
from app.services.errors import NotInvertible, ParseError
from app.services.expressions import parse_element


@pytest.fixture(scope="module")
def s3_builtin():
    return resolve_builtin("group:s3")


@pytest.fixture(scope="module")
def uq3_builtin():
    return resolve_builtin("uqsl2:3")


def parse(builtin, text):
    return parse_element(text, builtin.structure.algebra, builtin.namespace)


def test_sums_and_scalars(s3_builtin):
    algebra = s3_builtin.structure.algebra
    e, r = algebra.basis_element("e"), algebra.basis_element("r")
    assert parse(s3_builtin, "2*e + r") == e * 2 + r
    assert parse(s3_builtin, "2e - 1/3 r") == e * 2 - r * Fraction(1, 3)
    assert parse(s3_builtin, "−r") == -r
    assert parse(s3_builtin, "3") == algebra.one * 3


def test_juxtaposition_and_powers(s3_builtin):
    algebra = s3_builtin.structure.algebra
    r, s = algebra.basis_element("r"), algebra.basis_element("s")
    assert parse(s3_builtin, "2 r s") == r * s * 2
    assert parse(s3_builtin, "(r + s)^2") == (r + s) * (r + s)
    assert parse(s3_builtin, "rs^-1") == algebra.basis_element("sr")
    assert parse(s3_builtin, "r^-1") == r


def test_quantum_group_expressions(uq3_builtin):
    algebra = uq3_builtin.structure.algebra
    assert parse(uq3_builtin, "K*(1 - 3/2 F^2 E^2)") == uq.n3_example_twist_element()
    K, F, E = (algebra.basis_element(x) for x in ("K", "F", "E"))
    assert parse(uq3_builtin, "KFE") == K * F * E
    assert parse(uq3_builtin, "E K") == K * E * uq.q_of(algebra)
    assert parse(uq3_builtin, "q K") == K * uq.q_of(algebra)


def test_negative_power_of_nilpotent(uq3_builtin):
    with pytest.raises(NotInvertible):
        parse(uq3_builtin, "E^-1")


@pytest.mark.parametrize("text", ["", "2 +", "(r", "x", "r ^ 1/2", "r )", "r ^"])
def test_parse_errors(s3_builtin, text):
    with pytest.raises(ParseError):
        parse(s3_builtin, text)


def test_parse_error_position(s3_builtin):
    with pytest.raises(ParseError) as info:
        parse(s3_builtin, "e + $")
    assert info.value.position == 4
    with pytest.raises(ParseError) as info:
        parse(s3_builtin, "e + zz")
    assert info.value.position == 4


@pytest.mark.parametrize("text, position", [("KE2", 0), ("2 + KE2", 4), ("EK", 0)])
def test_unknown_labels_are_rejected(uq3_builtin, text, position):
    with pytest.raises(ParseError) as info:
        parse(uq3_builtin, text)
    assert info.value.position == position


def test_letters_do_not_fuse_into_products(s3_builtin):
    with pytest.raises(ParseError) as info:
        parse(s3_builtin, "e + rst")
    assert info.value.position == 4
    algebra = s3_builtin.structure.algebra
    r, s, t = (algebra.basis_element(x) for x in "rst")
    assert parse(s3_builtin, "r s t") == r * s * t
