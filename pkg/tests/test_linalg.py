from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from app.services.errors import NoSolution, NotFound, ShapeMismatch, Singular
from app.services.linalg import (
    GeneratorMap,
    Matrix,
    Tensor,
    apply_generator,
    determinant,
    dot,
    identity_generator,
    invert,
    minimal_polynomial,
    nullspace,
    rank,
    solve,
)
from app.services.scalars import FieldSpec, root_of_unity

Q = FieldSpec.rational()


def rational_matrix(rows):
    return Matrix(Q, [[Q.from_value(Fraction(x)) for x in row] for row in rows])


def int_matrices(max_size=4):
    return st.integers(min_value=1, max_value=max_size).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(min_value=-3, max_value=3), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )


@settings(max_examples=60, deadline=None)
@given(rows=int_matrices())
def test_rank_and_determinant_match_sympy(rows):
    M = rational_matrix(rows)
    oracle = sympy.Matrix(rows)
    assert rank(M) == oracle.rank()
    assert determinant(M) == Fraction(int(oracle.det()))


@settings(max_examples=60, deadline=None)
@given(rows=int_matrices())
def test_invert_is_two_sided(rows):
    M = rational_matrix(rows)
    if determinant(M).is_zero():
        with pytest.raises(Singular):
            invert(M)
        return
    identity = Matrix.identity(Q, M.rows)
    inverse = invert(M)
    assert M @ inverse == identity
    assert inverse @ M == identity


def test_solve_and_nullspace():
    M = rational_matrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    b = [Q.from_value(x) for x in (6, 12, 2)]
    x = solve(M, b)
    assert M.apply(x) == b
    kernel = nullspace(M)
    assert len(kernel) == 1
    assert all(v.is_zero() for v in M.apply(kernel[0]))
    with pytest.raises(NoSolution):
        solve(M, [Q.from_value(x) for x in (1, 1, 1)])
    with pytest.raises(ShapeMismatch):
        solve(M, b[:2])


def test_linear_algebra_over_cyclotomic_field():
    F = FieldSpec.cyclotomic(3)
    zeta = root_of_unity(F, 1)
    M = Matrix(F, [[F.one, zeta], [zeta * zeta, F.one]])
    assert determinant(M) == 0
    assert rank(M) == 1
    N = Matrix(F, [[F.one, zeta], [zeta, F.one]])
    assert N @ invert(N) == Matrix.identity(F, 2)


def test_minimal_polynomial_of_matrix_powers():
    # M = [[0, 1], [-2, 3]] has characteristic polynomial x^2 - 3x + 2.
    M = rational_matrix([[0, 1], [-2, 3]])
    v = [Q.one, Q.zero]
    powers = [v]
    for _ in range(3):
        powers.append(M.apply(powers[-1]))
    assert minimal_polynomial(powers) == [2, -3, 1]
    assert minimal_polynomial([[Q.zero, Q.zero]]) == [1]
    with pytest.raises(NotFound):
        minimal_polynomial(powers[:2])


def test_tensor_arithmetic_drops_zeros():
    t = Tensor.from_vector([Q.one, Q.zero, Q.from_value(2)])
    assert set(t.entries) == {(0,), (2,)}
    assert (t - t).is_zero()
    u = Tensor.from_matrix(rational_matrix([[1, 2], [3, 4]]))
    assert u.swap().value((1, 0)) == 2
    assert u.first_difference(u) is None
    index, left, right = u.first_difference(u.swap())
    assert index == (0, 1) and (left, right) == (2, 3)


def test_apply_generator_contracts_legs():
    # "add": A (x) A -> A on a 2-dimensional space with table (i, j) -> i + j mod 2.
    one = Q.one
    table = {(i, j): ((((i + j) % 2,), one),) for i in range(2) for j in range(2)}
    gen = GeneratorMap("add", 2, 1, table)
    t = Tensor(Q, 2, 3, {(0, 1, 1): one, (1, 1, 0): Q.from_value(5)})
    out = apply_generator(t, 1, gen)
    assert out.rank == 2
    assert out.entries == {(0, 0): one, (1, 1): Q.from_value(5)}
    assert apply_generator(t, 0, identity_generator(Q, 2)) == t
    with pytest.raises(ShapeMismatch):
        apply_generator(t, 2, gen)


def test_dot_product():
    assert dot([Q.one, Q.from_value(2)], [Q.from_value(3), Q.from_value(4)]) == 11
    assert dot([Q.zero], [Q.one]) == 0
