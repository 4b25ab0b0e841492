from fractions import Fraction

import pytest

from app.services.algebra import element_inverse
from app.services.builders import (
    S3_ALIASES,
    abelianization_order,
    block_twist_prediction,
    commutator_subgroup,
    conjugacy_classes,
    group_class_function_series,
    group_twist,
    make_group_table,
    matrix_frobenius,
    matrix_prediction,
    resolve_builtin,
    s3_general_element,
    s3_general_twist,
    s3_predicted_fdim,
    s3_predicted_series,
    s3_special_inverse_twist,
    semisimple_block_twist,
    semisimple_special_form,
    weakly_symmetric_block_form,
    weakly_symmetric_prediction,
)
from app.services.errors import BadGroupTable, NotInvertible, UnknownBuiltin
from app.services.frobenius import classify, fdim, rational_closed_form, trace_form
from app.services.series import RationalSeries


@pytest.mark.parametrize(
    "name, dim",
    [
        ("matrix:2", 4),
        ("blocks:1+1+2", 6),
        ("group:s3", 6),
        ("group:cyclic:4", 4),
        ("uqsl2:2", 8),
        ("taft:3", 9),
    ],
)
def test_resolve_builtin(name, dim):
    builtin = resolve_builtin(name)
    assert builtin.structure.dim == dim
    assert builtin.name == name
    assert builtin.namespace


@pytest.mark.parametrize("name", ["", "matrix", "matrix:x", "matrix:0", "group:a5", "sl3:2", "taft:1"])
def test_unknown_builtins(name):
    with pytest.raises(UnknownBuiltin):
        resolve_builtin(name)


def test_s3_aliases_name_basis_elements():
    builtin = resolve_builtin("group:s3")
    for alias, label in S3_ALIASES.items():
        assert builtin.namespace[alias] == builtin.namespace[label]


@pytest.mark.parametrize(
    "u",
    [
        [[1, 0], [0, 2]],
        [[1, 0, 0], [0, 2, 0], [0, 0, 3]],
        [[1, 1, 0], [0, 2, 0], [0, 0, -1]],
        [[2, 0, 0], [0, 2, 0], [0, 0, 2]],
    ],
)
def test_matrix_family_matches_closed_form(u):
    F = matrix_frobenius(len(u), u)
    predicted = matrix_prediction(u)
    result = classify(F)
    assert result.counit_scale == predicted.counit_scale
    assert result.fdim == predicted.fdim
    assert result.quasispecial == predicted.quasispecial
    assert result.symmetric == predicted.symmetric
    assert rational_closed_form(F) == predicted.series


def test_singular_matrix_twist():
    with pytest.raises(NotInvertible):
        matrix_frobenius(2, [[1, 1], [1, 1]])


def test_semisimple_special_form_is_the_trace_form():
    F = semisimple_special_form((1, 1, 2))
    result = classify(F)
    assert result.special and result.symmetric
    assert result.fdim == 6
    assert F.eps == trace_form(F.algebra).eps


def test_block_twist_prediction():
    dims = (1, 2)
    blocks = [[[2]], [[1, 1], [0, 3]]]
    F = semisimple_block_twist(dims, blocks)
    total, series = block_twist_prediction(dims, blocks)
    assert total == Fraction(19, 3)
    assert classify(F).fdim == total
    assert rational_closed_form(F) == series


def test_weakly_symmetric_block_form():
    dims, chosen = (1, 1, 2), (0, 1)
    F = weakly_symmetric_block_form(dims, chosen)
    result = classify(F)
    assert result.weakly_symmetric and not result.symmetric
    total, series = weakly_symmetric_prediction(dims, chosen)
    assert result.fdim == total == 2
    assert rational_closed_form(F) == series
    with pytest.raises(ValueError):
        weakly_symmetric_block_form(dims, chosen, traceless={2: [[1, 0], [0, 1]]})


def test_weakly_symmetric_blocks_outside_add_their_trace_to_dim0(Q):
    # block 1 carries u = diag(1, 1, -1/2), whose trace 3/2 lands on dim_0 only
    F = weakly_symmetric_block_form((2, 3), (0,))
    total, series = weakly_symmetric_prediction((2, 3), (0,))
    expected = RationalSeries.from_fraction([Q.from_value(Fraction(11, 2)), Q.from_value(Fraction(-3, 2))], [Q.one, -Q.one], Q)
    assert series == expected == rational_closed_form(F)
    assert total == fdim(F, 1) == 4
    assert fdim(F, 0) == Fraction(11, 2)


def test_twist_dimensions_are_conjugation_invariant(S3, s3_base):
    algebra = s3_base.algebra
    u = s3_general_element(algebra, 3, 2, 0, 1, 1, 0)
    reference = [fdim(group_twist(S3, u, s3_base), j) for j in range(5)]
    conjugates = [algebra.basis(g) * u * algebra.basis(S3.inverse[g]) for g in range(S3.order)]
    assert any(c != u for c in conjugates)
    for c in conjugates:
        assert [fdim(group_twist(S3, c, s3_base), j) for j in range(5)] == reference


def test_s3_group_structure(S3):
    assert conjugacy_classes(S3) == [[0], [1, 2, 3], [4, 5]]
    assert commutator_subgroup(S3) == [0, 4, 5]
    assert abelianization_order(S3) == 2


def test_group_table_validation():
    # a * b = b has identity 1 but no inverses
    with pytest.raises(BadGroupTable) as info:
        make_group_table(["x", "y"], [[0, 1], [0, 1]])
    assert info.value.witness == (0,)
    with pytest.raises(BadGroupTable):
        make_group_table(["x", "y"], [[0, 1]])
    with pytest.raises(BadGroupTable):
        make_group_table(["x", "y"], [[0, 2], [1, 0]])


def test_class_function_series(S3):
    series = group_class_function_series(S3)
    assert series["e"].expand(4) == [1, 6, 36, 216]
    assert series["r"].expand(4) == [0, 2, 0, 72]
    assert series["rs"].expand(4) == [0, 3, 9, 81]
    assert series["r"] == series["s"] == series["t"]
    assert series["rs"] == series["sr"]


def test_s3_special_family(S3, s3_base):
    family = s3_special_inverse_twist(s3_base.algebra, Fraction(1, 6), 0, 0)
    assert family.inverse * family.predicted == s3_base.algebra.one
    assert family.fdim == 3
    F = group_twist(S3, family.predicted, s3_base)
    result = classify(F)
    assert result.special
    assert result.counit_scale == family.fdim
    with pytest.raises(NotInvertible):
        # d = 1 - 108 * 3 / 18^2 = 0
        s3_special_inverse_twist(s3_base.algebra, 0, Fraction(1, 18), Fraction(1, 18))


@pytest.mark.parametrize("alpha, beta, gamma", [(2, 1, 0), (1, 0, 3), (3, 1, 1)])
def test_central_s3_twists(S3, alpha, beta, gamma):
    F = s3_general_twist(S3, alpha, beta, gamma)
    result = classify(F)
    assert result.symmetric
    assert result.fdim == s3_predicted_fdim(alpha, beta, gamma) == 6
    assert rational_closed_form(F) == s3_predicted_series(alpha, beta, gamma)


def test_group_twist_rejects_singular_elements(S3, s3_base):
    u = s3_base.algebra.one - s3_base.algebra.basis_element("rs")
    with pytest.raises(NotInvertible):
        group_twist(S3, u, s3_base)
    assert element_inverse(s3_base.algebra.one * 2 - s3_base.algebra.basis_element("rs"))
