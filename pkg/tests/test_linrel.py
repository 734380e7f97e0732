from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from opencospan.exactlin import RationalMatrix, RationalSubspace
from opencospan.linrel import (
    LinearRelation,
    RelSquare,
    compose_relations,
    graph_of,
    identity_relation,
    is_rel_2morphism,
    paste_horizontal,
    paste_vertical,
    tensor_relations,
)

entries = st.sampled_from([Q(0), Q(0), Q(1), Q(-1), Q(2), Q(1, 2)])


@st.composite
def relations(draw, m=None, n=None):
    m = draw(st.integers(0, 3)) if m is None else m
    n = draw(st.integers(0, 3)) if n is None else n
    k = draw(st.integers(0, m + n))
    vecs = [[draw(entries) for _ in range(m + n)] for _ in range(k)]
    return LinearRelation(m, n, RationalSubspace(m + n, vecs))


@st.composite
def maps(draw, m, n):
    return RationalMatrix([[draw(entries) for _ in range(m)] for _ in range(n)], shape=(n, m))


def test_graph_composition_is_matrix_product():
    A = RationalMatrix([[1, 2], [0, 1], [3, 0]])  # Q^2 -> Q^3
    B = RationalMatrix([[1, 1, 1]])  # Q^3 -> Q^1
    assert compose_relations(graph_of(A), graph_of(B)) == graph_of(B @ A)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_graphs_compose_like_maps(data):
    a, b, c = (data.draw(st.integers(0, 3)) for _ in range(3))
    A = data.draw(maps(a, b))
    B = data.draw(maps(b, c))
    assert compose_relations(graph_of(A), graph_of(B)) == graph_of(B @ A)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_composition_associative_and_unital(data):
    a, b, c, d = (data.draw(st.integers(0, 3)) for _ in range(4))
    R = data.draw(relations(a, b))
    S = data.draw(relations(b, c))
    T = data.draw(relations(c, d))
    assert compose_relations(compose_relations(R, S), T) == compose_relations(R, compose_relations(S, T))
    assert compose_relations(identity_relation(a), R) == R
    assert compose_relations(R, identity_relation(b)) == R


def test_compose_by_witnesses():
    # R relates (x) ~ (x, x); S relates (y, z) ~ (y + z): the composite doubles
    R = LinearRelation(1, 2, RationalSubspace(3, [[1, 1, 1]]))
    S = graph_of(RationalMatrix([[1, 1]]))
    RS = compose_relations(R, S)
    assert RS.relates([1], [2])
    assert not RS.relates([1], [1])


def test_compose_dimension_mismatch():
    with pytest.raises(ValueError):
        compose_relations(identity_relation(1), identity_relation(2))


def test_converse_swaps_blocks():
    R = graph_of(RationalMatrix([[2]]))
    assert R.converse().relates([2], [1])
    assert R.converse().converse() == R


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_tensor_interchanges_with_composition(data):
    a, b, c, a2, b2, c2 = (data.draw(st.integers(0, 2)) for _ in range(6))
    R, S = data.draw(relations(a, b)), data.draw(relations(b, c))
    R2, S2 = data.draw(relations(a2, b2)), data.draw(relations(b2, c2))
    lhs = tensor_relations(compose_relations(R, S), compose_relations(R2, S2))
    rhs = compose_relations(tensor_relations(R, R2), tensor_relations(S, S2))
    assert lhs == rhs


def test_tensor_of_graphs_is_block_diagonal():
    A = RationalMatrix([[1, 2]])
    B = RationalMatrix([[3], [4]])
    assert tensor_relations(graph_of(A), graph_of(B)) == graph_of(A.block_diag(B))


def test_two_morphism_containment():
    R = identity_relation(1)
    f = RationalMatrix([[2]])
    assert is_rel_2morphism(RelSquare(f, f, R, R))
    assert not is_rel_2morphism(RelSquare(f, RationalMatrix([[3]]), R, R))


def test_pasting_keeps_2_morphisms():
    R = identity_relation(1)
    f = RationalMatrix([[2]])
    up = RelSquare(f, f, R, R)
    assert is_rel_2morphism(paste_vertical(up, up))
    assert is_rel_2morphism(paste_horizontal(up, up))


def test_json_roundtrip():
    R = LinearRelation(1, 2, RationalSubspace(3, [["1/2", 1, 0]]))
    assert LinearRelation.from_json(R.to_json()) == R
