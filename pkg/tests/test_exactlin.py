from fractions import Fraction as Q

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from opencospan.exactlin import (
    RationalMatrix,
    RationalSubspace,
    apply,
    contains,
    direct_sum,
    format_rational,
    image,
    intersect,
    kernel,
    rank,
    rref,
    subspace_sum,
    to_rational,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_rows=4, max_cols=5):
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(1, max_cols))
    rows = [[draw(st.one_of(st.just(Q(0)), small)) for _ in range(n)] for _ in range(m)]
    return RationalMatrix(rows, shape=(m, n))


def to_sympy(M: RationalMatrix):
    return sympy.Matrix(M.nrows, M.ncols, lambda i, j: sympy.Rational(M[i, j].numerator, M[i, j].denominator))


def span_sympy(vectors, n):
    if not vectors:
        return sympy.zeros(0, n)
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in v] for v in vectors])


def test_rationals_parse_and_print():
    assert to_rational("3/6") == Q(1, 2)
    assert to_rational(4) == Q(4)
    assert format_rational(Q(-2, 4)) == "-1/2"
    assert format_rational(Q(3)) == "3/1"
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


def test_matrix_arithmetic():
    A = RationalMatrix([[1, 2], [3, 4]])
    B = RationalMatrix([["1/2", 0], [0, "1/3"]])
    assert (A @ B).rows == ((Q(1, 2), Q(2, 3)), (Q(3, 2), Q(4, 3)))
    assert (A - A).is_zero()
    assert A.T[0, 1] == 3
    with pytest.raises(ValueError):
        A @ RationalMatrix([[1, 2, 3]])


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rref_agrees_with_sympy(M):
    ours = rref(M)
    theirs, _ = to_sympy(M).rref()
    r = rank(M)
    assert r == theirs.rank()
    assert to_sympy(ours)[:r, :] == theirs[:r, :]


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_kernel_agrees_with_sympy_nullspace(M):
    K = kernel(M)
    oracle = to_sympy(M).nullspace()
    assert K.dim == len(oracle)
    for v in K.vectors:
        assert all(x == 0 for x in M.apply_vector(v))
    if oracle:
        # same span: stacking the two bases does not raise the rank
        stacked = span_sympy(K.vectors, M.ncols).col_join(sympy.Matrix.hstack(*oracle).T)
        assert stacked.rank() == K.dim


def test_subspace_canonical_form_is_basis_independent():
    U = RationalSubspace(3, [[1, 1, 0], [0, 1, 1]])
    W = RationalSubspace(3, [[1, 2, 1], [2, 2, 0], [1, 0, -1]])
    assert U == W
    assert hash(U) == hash(W)
    assert (1, 0, -1) in U
    assert (1, 0, 0) not in U


@settings(max_examples=60, deadline=None)
@given(matrices(max_cols=4), matrices(max_cols=4))
def test_intersection_against_sympy_dimension(A, B):
    if A.ncols != B.ncols:
        B = RationalMatrix([list(r[: A.ncols]) + [0] * max(0, A.ncols - B.ncols) for r in B.rows],
                           shape=(B.nrows, A.ncols))
    U, W = RationalSubspace.from_matrix_rows(A), RationalSubspace.from_matrix_rows(B)
    I = intersect(U, W)
    # dim(U & W) = dim U + dim W - dim(U + W)
    assert I.dim == U.dim + W.dim - subspace_sum(U, W).dim
    assert contains(U, I) and contains(W, I)


def test_apply_and_image():
    M = RationalMatrix([[1, 0], [0, 0], [1, 1]])
    U = RationalSubspace(2, [[1, 0]])
    assert apply(M, U) == RationalSubspace(3, [[1, 0, 1]])
    assert image(M).dim == 2


def test_direct_sum_and_project():
    U = RationalSubspace(1, [[1]])
    W = RationalSubspace(2, [[1, 1]])
    D = direct_sum(U, W)
    assert D.dim == 2
    assert D.project([1, 2]) == W


def test_permute_checks_permutation():
    with pytest.raises(ValueError):
        RationalSubspace(2, [[1, 0]]).permute([0, 0])


def test_json_of_matrix():
    M = RationalMatrix([["2/4", -1]])
    assert M.to_json() == [["1/2", "-1/1"]]
    assert RationalMatrix.from_json(M.to_json()) == M
    assert RationalMatrix.from_json([], 3).shape == (0, 3)
