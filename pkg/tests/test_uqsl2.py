from fractions import Fraction

import random

import pytest

from app.services import uqsl2 as uq
from app.services.algebra import element_inverse
from app.services.errors import NotInvertible, ParseError
from app.services.frobenius import (
    classify,
    fdim,
    hilbert_series,
    lollipop,
    twist,
    twisted_lollipop,
    uloll,
)


@pytest.mark.parametrize("n", [2, 3])
def test_dimension_is_n_cubed(n):
    algebra = uq.uqsl2(n)
    assert algebra.dim == n ** 3
    assert algebra.labels[0] == "1"
    assert algebra.field.order == n


def test_defining_relations_at_n3():
    algebra = uq.uqsl2(3)
    q = uq.q_of(algebra)
    K, E, F = (algebra.basis_element(x) for x in ("K", "E", "F"))
    assert E * K == K * E * q
    assert F * K == K * F * q ** -1
    assert K ** 3 == algebra.one
    assert E ** 3 == algebra.zero and F ** 3 == algebra.zero
    K_inv = algebra.basis_element("K^2")
    assert E * F - F * E == (K - K_inv) * (q - q ** -1).inv()


def test_normal_order():
    algebra = uq.uqsl2(3)
    assert uq.normal_order(3, ["E", "K"]) == uq.normal_order(3, ["K", "E"]) * uq.q_of(algebra)
    assert uq.normal_order(3, ["K", "K^-1"]) == algebra.one
    with pytest.raises(ParseError):
        uq.normal_order(3, ["X"])


def test_commutator_vanishes_at_n2():
    algebra = uq.uqsl2(2)
    E, F = algebra.basis_element("E"), algebra.basis_element("F")
    assert E * F == F * E


@pytest.mark.parametrize("n, expected", [(2, 3), (3, 4)])
def test_center_matches_symmetric_forms(n, expected):
    assert uq.center_dimension(n) == expected
    assert uq.symmetric_form_count(n) == expected


def test_casimir_is_central_with_cubic_relation():
    algebra = uq.uqsl2(3)
    q = uq.q_of(algebra)
    c = uq.casimir(3)
    for name in ("K", "E", "F"):
        g = algebra.basis_element(name)
        assert g * c == c * g
    assert c ** 3 == algebra.one * 2 + c * (3 * q)
    with pytest.raises(ValueError):
        uq.casimir(4)


def test_k_twist_at_n3(uq3_integral):
    F = uq.uqsl2_symmetric_form(3)
    assert classify(F).symmetric
    assert hilbert_series(F, 4) == [0, 27, 81, 729]
    algebra = F.algebra
    q = uq.q_of(algebra)
    c = uq.casimir(3)
    assert lollipop(F) == (c * c - algebra.one * q ** -2) * (3 / q)
    assert not uq3_integral.gram.is_symmetric()


@pytest.mark.parametrize("n", [2, 3])
def test_k_twisted_gram_is_symmetric(n):
    assert uq.k_twisted_gram(n).is_symmetric()


@pytest.mark.slow
@pytest.mark.parametrize("n", [4, 5])
def test_k_twisted_gram_is_symmetric_for_larger_orders(n):
    assert uq.k_twisted_gram(n).is_symmetric()


def test_n2_closed_forms(n2_generic):
    p = uq.N2Parameters.of(2, 1, 1, 1, 1, 1, 1, 1)
    algebra = n2_generic.algebra
    u = uq.n2_element(p)
    assert uq.in_parameter_order(algebra, list(n2_generic.eps)) == uq.n2_predicted_form(p)
    assert element_inverse(u) == uq.n2_inverse_closed_form(p)
    assert uq.n2_predicted_lollipop_factor(p) == Fraction(-8, 3)
    assert lollipop(n2_generic) == algebra.basis_element("FE") * Fraction(-8, 3)
    assert fdim(n2_generic, 1) == Fraction(-8, 3)
    assert [fdim(n2_generic, j) for j in (2, 3)] == [0, 0]
    result = classify(n2_generic)
    assert result.weakly_symmetric and not result.symmetric and not result.special


def test_n2_symmetric_when_odd_parameters_vanish():
    p = uq.N2Parameters.of(0, 1, 2, 3, 0, 0, 0, 0)
    F = twist(uq.uqsl2_integral_form(2), uq.n2_element(p))
    assert classify(F).symmetric
    assert fdim(F, 1) == 8
    with pytest.raises(NotInvertible):
        uq.n2_inverse_closed_form(uq.N2Parameters.of(1, 1, 0, 0, 0, 0, 0, 0))


def test_n3_example_twist(uq3_integral):
    F = twist(uq3_integral, uq.n3_example_twist_element())
    assert fdim(F, 0) == Fraction(-3, 2)
    assert fdim(F, 1) == 18
    assert [fdim(F, j) for j in (2, 3)] == [0, 0]
    values = uq.n3_example_uloll()
    zero = F.field.zero
    assert uloll(F) == [values.get(label, zero) for label in F.algebra.labels]
    result = classify(F)
    assert result.weakly_symmetric and not result.symmetric


def test_cartan_twist_matches_prediction():
    prediction = uq.cartan_prediction(1, 1, 0)
    assert prediction.delta == 2
    assert prediction.fdim == Fraction(27, 2)
    F = uq.uqsl2_cartan_twist(1, 1, 0)
    assert fdim(F, 1) == prediction.fdim
    assert fdim(F, 2) == prediction.higher_dim(2)
    with pytest.raises(NotInvertible):
        uq.cartan_prediction(1, 1, 1)


def test_degree_projections():
    algebra = uq.uqsl2(3)
    x = algebra.one + algebra.basis_element("K") + algebra.basis_element("E") + algebra.basis_element("KFE")
    assert uq.degree_zero_part(x) == algebra.one + algebra.basis_element("K") + algebra.basis_element("KFE")
    assert uq.cartan_part(x) == algebra.one + algebra.basis_element("K")
    assert not uq.is_degree_zero(x)
    assert uq.degree((0, 2, 1), 3) == 1
    assert uq.monomial_of(algebra, algebra.index("K^2F^2E")) == (2, 2, 1)


def test_graded_parts_do_not_change_the_lollipop(uq3_integral):
    algebra = uq3_integral.algebra
    v = algebra.one * 2 + algebra.basis_element("K") + algebra.basis_element("E") + algebra.basis_element("F^2E")
    assert twisted_lollipop(uq3_integral, v) == twisted_lollipop(uq3_integral, uq.degree_zero_part(v))


def test_cartan_part_of_inverse():
    algebra = uq.uqsl2(3)
    u_k = algebra.one * 2 + algebra.basis_element("K")
    u = u_k + algebra.basis_element("FE") - algebra.basis_element("K^2F^2E^2") * 2
    assert uq.cartan_part(element_inverse(u)) == element_inverse(u_k)
    assert uq.inverse_via_degree_zero(u + algebra.basis_element("E")) == element_inverse(u)


def test_circulant_determinant():
    field = uq.uqsl2(3).field
    assert uq.circulant_determinant([field.from_value(c) for c in (2, 1, 0)]) == 9
    assert uq.circulant_determinant([field.one] * 3) == 0


@pytest.mark.parametrize(
    "n, singular",
    [
        (3, [[1, 1, 1], [1, -1, 0]]),
        pytest.param(4, [[1, 1, 1, 1], [1, 0, 1, 0], [1, 0, -1, 0]], marks=pytest.mark.slow),
    ],
)
def test_cartan_elements_invert_exactly_when_the_circulant_does(n, singular):
    algebra = uq.uqsl2(n)
    field = algebra.field
    rng = random.Random(n)
    samples = singular + [[rng.randint(-2, 2) for _ in range(n)] for _ in range(8)]
    for coeffs in samples:
        u = uq.cartan_element(algebra, coeffs)
        nonzero = uq.circulant_determinant([field.from_value(c) for c in coeffs]) != 0
        try:
            element_inverse(u)
            invertible = True
        except NotInvertible:
            invertible = False
        assert invertible == nonzero, coeffs


def test_taft_form_has_vanishing_lollipop():
    base = uq.taft_form(3)
    algebra = base.algebra
    assert algebra.dim == 9
    u = algebra.one + algebra.basis_element("K") * 2 + algebra.basis_element("F")
    F = twist(base, u)
    assert lollipop(F) == algebra.zero
    assert uloll(F) == [0] * 9
    assert fdim(F, 1) == 0
