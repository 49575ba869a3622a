from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from superlin import DegenerateBasis, RatMatrix, SingularMatrix
from superlin.linalg import SpanBuilder, extend_basis, in_span, invert, krylov_span, rank_of_vectors
from superlin.linalg import rref_nullspace

from helpers import invertible_matrices, matrices


def sym(M):
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in M.to_rows()])


class TestNullspace:
    def test_rank_one_shape(self):
        assert rref_nullspace(RatMatrix([[0, 2], [0, 0]])) == [(1, 0)]

    def test_invertible(self):
        assert rref_nullspace(RatMatrix.identity(3)) == []

    def test_zero(self):
        assert rref_nullspace(RatMatrix.zeros(2, 2)) == [(1, 0), (0, 1)]

    def test_empty_rows(self):
        assert len(rref_nullspace(RatMatrix([], 3))) == 3


class TestKrylov:
    def test_stabilizes(self):
        K = krylov_span(RatMatrix([[-1, 0], [0, -1]]), (1, 0))
        assert K.columns() == [(1, 0)]

    def test_shift(self):
        K = krylov_span(RatMatrix([[0, 1], [0, 0]]), (0, 1))
        assert K.columns() == [(0, 1), (1, 0)]

    def test_zero_start(self):
        assert krylov_span(RatMatrix([[2, 1], [3, 4]]), (0, 0)).ncols == 0


class TestInvert:
    def test_identity(self):
        assert invert(RatMatrix.identity(3)) == RatMatrix.identity(3)

    def test_unipotent(self):
        assert invert(RatMatrix([[1, 1], [0, 1]])) == RatMatrix([[1, -1], [0, 1]])

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            invert(RatMatrix([[0, 2], [0, 0]]))


class TestExtendBasis:
    def test_first_standard_vector(self):
        assert extend_basis([(1, 0)], 2) == RatMatrix.identity(2)

    def test_empty(self):
        assert extend_basis([], 2) == RatMatrix.identity(2)

    def test_diagonal_direction(self):
        T = extend_basis([(1, 1)], 2)
        assert T == RatMatrix([[1, 1], [1, 0]]) and T.determinant() != 0

    def test_dependent_input(self):
        with pytest.raises(DegenerateBasis):
            extend_basis([(1, 1), (2, 2)], 2)


def test_determinant_and_products():
    A = RatMatrix([[2, 1], [1, 1]])
    assert A.determinant() == 1
    assert A @ invert(A) == RatMatrix.identity(2)
    assert A.power(3) == A @ A @ A
    assert RatMatrix([[Fraction(1, 2), 0], [0, 4]]).determinant() == 2


def test_span_builder():
    span = SpanBuilder(3)
    assert span.add((1, 0, 0)) and span.add((1, 1, 0))
    assert not span.add((2, 1, 0))
    assert span.contains((0, 5, 0)) and not span.contains((0, 0, 1))
    assert span.dim == 2
    assert in_span([(1, 2, 3)], (2, 4, 6))


# -- properties -----------------------------------------------------------

shapes = st.tuples(st.integers(1, 4), st.integers(1, 4))


@given(st.data())
def test_nullspace_and_rank(data):
    r, c = data.draw(shapes)
    M = data.draw(matrices(r, c))
    basis = rref_nullspace(M)
    for v in basis:
        assert all(x == 0 for x in M.apply(v))
    assert len(basis) + M.rank() == c
    assert M.rank() == sym(M).rank()
    assert rank_of_vectors(basis, c) == len(basis)


@given(st.data())
def test_determinant_matches_sympy(data):
    n = data.draw(st.integers(1, 4))
    M = data.draw(matrices(n, n, st.fractions(-4, 4, max_denominator=3)))
    assert M.determinant() == Fraction(str(sym(M).det()))


@given(st.data())
def test_invert_round_trip(data):
    n = data.draw(st.integers(1, 4))
    M = data.draw(invertible_matrices(n))
    inv = invert(M)
    assert M @ inv == RatMatrix.identity(n) == inv @ M


@given(st.data())
def test_krylov_properties(data):
    n = data.draw(st.integers(1, 4))
    A = data.draw(matrices(n, n))
    v = tuple(data.draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n)))
    K = krylov_span(A, v)
    cols = K.columns()
    assert rank_of_vectors(cols, n) == len(cols)
    if any(v):
        assert in_span(cols, v)
        for c in cols:
            assert in_span(cols, A.apply(c))


@settings(max_examples=60)
@given(st.data())
def test_extend_basis_properties(data):
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(0, n))
    vecs = []
    for _ in range(k):
        v = tuple(data.draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n)))
        if rank_of_vectors(vecs + [v], n) == len(vecs) + 1:
            vecs.append(v)
    T = extend_basis(vecs, n)
    assert T.determinant() != 0
    assert T.columns()[:len(vecs)] == [tuple(Fraction(x) for x in v) for v in vecs]
