import random
from fractions import Fraction

import pytest

from app.services.algebra import (
    center,
    commutator_subspace,
    direct_sum,
    element_inverse,
    in_span,
    is_invertible,
    make_algebra,
    random_invertible,
    regular_trace,
)
from app.services.builders import group_algebra, matrix_algebra, matrix_element, s3
from app.services.errors import AlgebraMismatch, BadUnit, NotAssociative, NotInvertible, ShapeMismatch
from app.services.scalars import FieldSpec

Q = FieldSpec.rational()


def test_matrix_units_multiply():
    M2 = matrix_algebra(2)
    E11, E12, E21 = (M2.basis_element(x) for x in ("E11", "E12", "E21"))
    assert E11 * E12 == E12
    assert E12 * E11 == M2.zero
    assert E12 * E21 == E11
    assert not M2.is_commutative()
    assert M2.one == E11 + M2.basis_element("E22")


def test_bad_unit_is_reported():
    labels = ["a", "b"]
    structure = {(0, 0): [1, 0], (1, 1): [0, 1]}
    with pytest.raises(BadUnit) as info:
        make_algebra(Q, labels, structure, [1, 0])
    assert info.value.index == 1


def test_non_associative_table_has_witness():
    # 1, x, y with x x = y, x y = x, y x = 0
    structure = {(0, j): {j: 1} for j in range(3)}
    structure.update({(j, 0): {j: 1} for j in range(1, 3)})
    structure[(1, 1)] = {2: 1}
    structure[(1, 2)] = {1: 1}
    with pytest.raises(NotAssociative) as info:
        make_algebra(Q, ["1", "x", "y"], structure, [1, 0, 0])
    assert info.value.witness == (1, 1, 1)
    trusted = make_algebra(Q, ["1", "x", "y"], structure, [1, 0, 0], trusted=True)
    assert trusted.trusted


def test_construction_shape_errors():
    with pytest.raises(ShapeMismatch):
        make_algebra(Q, ["a", "a"], {}, [1, 0])
    with pytest.raises(ShapeMismatch):
        make_algebra(Q, ["a"], {(0, 0): {3: 1}}, [1])
    with pytest.raises(ShapeMismatch):
        make_algebra(Q, ["a"], {(0, 0): [1]}, [1, 0])


def test_inverse_in_matrix_algebra():
    M2 = matrix_algebra(2)
    u = matrix_element(M2, [[1, 1], [0, 2]])
    u_inv = element_inverse(u)
    assert u * u_inv == M2.one
    assert u_inv == matrix_element(M2, [[1, Fraction(-1, 2)], [0, Fraction(1, 2)]])
    assert u ** -2 == u_inv * u_inv
    assert not is_invertible(M2.basis_element("E11"))
    with pytest.raises(NotInvertible):
        element_inverse(M2.basis_element("E12"))


def test_center_and_commutators():
    M2 = matrix_algebra(2)
    assert len(center(M2)) == 1
    S3 = group_algebra(s3())
    assert len(center(S3)) == 3
    commutators = commutator_subspace(S3)
    assert len(commutators) == 3
    rs, sr = S3.basis_element("rs"), S3.basis_element("sr")
    assert in_span((rs - sr).coeffs, commutators)
    assert not in_span(S3.one.coeffs, commutators)


def test_direct_sum_is_block_diagonal():
    A = direct_sum(matrix_algebra(1), matrix_algebra(2))
    assert A.dim == 5
    assert A.labels[:2] == ("B0.E11", "B1.E11")
    left, right = A.basis_element("B0.E11"), A.basis_element("B1.E12")
    assert left * right == A.zero
    assert A.one == left + A.basis_element("B1.E11") + A.basis_element("B1.E22")
    assert regular_trace(A.one) == 5


def test_elements_of_different_algebras_do_not_mix():
    with pytest.raises(AlgebraMismatch):
        matrix_algebra(2).one + matrix_algebra(2).one


def test_cyclotomic_structure_constants():
    field = FieldSpec.cyclotomic(4)
    A = make_algebra(field, ["1", "x"], {(0, 0): [1, 0], (0, 1): [0, 1], (1, 0): [0, 1], (1, 1): [-1, 0]}, [1, 0])
    x = A.basis_element("x")
    assert x * x == -A.one
    assert A.is_commutative()
    assert element_inverse(x) == -x


def test_random_invertible_is_reproducible():
    M2 = matrix_algebra(2)
    first = random_invertible(random.Random(7), M2)
    second = random_invertible(random.Random(7), M2)
    assert first == second
    assert is_invertible(first)
