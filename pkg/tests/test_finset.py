import itertools

import pytest
from hypothesis import given, settings, strategies as st

from opencospan.finset import (
    FinFunction,
    FinSet,
    SquareFS,
    compose,
    coproduct,
    copair,
    fiber_product,
    identity,
    is_pullback,
    pullback_matrix,
    pushforward_matrix,
    pushout,
)


def fn(dom, cod, table):
    return FinFunction(FinSet(dom), FinSet(cod), table)


@st.composite
def functions(draw, dom=None, cod=None, max_size=5):
    if dom is None:
        dom = FinSet(f"a{k}" for k in range(draw(st.integers(0, max_size))))
    if cod is None:
        cod = FinSet(f"b{k}" for k in range(draw(st.integers(1, max_size))))
    return FinFunction(dom, cod, [draw(st.sampled_from(cod.elements)) for _ in dom])


def test_finset_rejects_duplicates():
    with pytest.raises(ValueError):
        FinSet(["a", "a"])


def test_function_must_land_in_codomain():
    with pytest.raises(ValueError):
        fn(["a"], ["b"], {"a": "c"})


def test_function_needs_every_point():
    with pytest.raises(ValueError):
        fn(["a", "b"], ["c"], {"a": "c"})


def test_compose_is_first_then_second():
    f = fn(["a", "b"], ["x", "y"], {"a": "y", "b": "x"})
    g = fn(["x", "y"], ["p"], {"x": "p", "y": "p"})
    assert compose(f, g).mapping == {"a": "p", "b": "p"}
    with pytest.raises(ValueError):
        compose(g, f)


def test_pushout_glues_shared_point():
    # two 2-element sets glued along one point
    f = fn(["t"], ["x1", "x2"], {"t": "x2"})
    g = fn(["t"], ["y1", "y2"], {"t": "y1"})
    P, j, k = pushout(f, g)
    assert len(P) == 3
    assert j("x2") == k("y1")
    assert compose(f, j) == compose(g, k)


def test_pushout_labels_and_order():
    f = fn(["t"], ["x"], ["x"])
    g = fn(["t"], ["y", "z"], ["z"])
    P, j, k = pushout(f, g)
    assert P.elements == ("L:x", "R:y")
    assert k("z") == "L:x"


def _brute_pushout_classes(f, g):
    # connected components of the bipartite gluing graph, computed by closure
    nodes = [("L", x) for x in f.cod] + [("R", y) for y in g.cod]
    rel = {(a, a) for a in nodes}
    for t in f.dom:
        a, b = ("L", f(t)), ("R", g(t))
        rel |= {(a, b), (b, a)}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return {frozenset(b for (a2, b) in rel if a2 == a) for a in nodes}


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_pushout_matches_transitive_closure(data):
    T = FinSet(f"t{k}" for k in range(data.draw(st.integers(0, 4))))
    f = data.draw(functions(dom=T, max_size=4))
    g = data.draw(functions(dom=T, cod=FinSet(f"c{k}" for k in range(data.draw(st.integers(1, 4))))))
    P, j, k = pushout(f, g)
    classes = {frozenset([("L", x) for x in f.cod if j(x) == p] + [("R", y) for y in g.cod if k(y) == p])
               for p in P}
    assert classes == _brute_pushout_classes(f, g)
    assert compose(f, j) == compose(g, k)


def test_pushforward_and_pullback_matrices():
    f = fn(["a", "b", "c"], ["x", "y"], {"a": "x", "b": "x", "c": "y"})
    P = pushforward_matrix(f)
    assert P.to_json() == [["1/1", "1/1", "0/1"], ["0/1", "0/1", "1/1"]]
    assert pullback_matrix(f) == P.T
    assert P.apply_vector([1, 2, 3]) == (3, 3)


@settings(max_examples=50, deadline=None)
@given(functions(), st.data())
def test_pushforward_is_functorial(f, data):
    g = data.draw(functions(dom=f.cod))
    assert pushforward_matrix(compose(f, g)) == pushforward_matrix(g) @ pushforward_matrix(f)
    assert pushforward_matrix(identity(f.dom)) == pushforward_matrix(identity(f.dom)).T


def test_is_pullback_positive():
    B = FinSet(["b1", "b2"])
    D = FinSet(["d"])
    h = FinFunction(B, D, ["d", "d"])
    k = FinFunction(FinSet(["c"]), D, ["d"])
    A, pb, pc = fiber_product(h, k)
    assert is_pullback(SquareFS(top=pb, bottom=k, left=pc, right=h))


def test_is_pullback_rejects_collapsing_square():
    # commutes, but the apex has one point where the fiber product has two
    h = fn(["b1", "b2"], ["d"], ["d", "d"])
    k = fn(["c"], ["d"], ["d"])
    top = fn(["a"], ["b1", "b2"], ["b1"])
    left = fn(["a"], ["c"], ["c"])
    sq = SquareFS(top=top, bottom=k, left=left, right=h)
    assert sq.commutes()
    assert not is_pullback(sq)


def test_is_pullback_requires_commuting():
    h = fn(["b1", "b2"], ["d1", "d2"], ["d1", "d2"])
    k = fn(["c"], ["d1", "d2"], ["d1"])
    top = fn(["a"], ["b1", "b2"], ["b2"])
    left = fn(["a"], ["c"], ["c"])
    with pytest.raises(ValueError):
        is_pullback(SquareFS(top=top, bottom=k, left=left, right=h))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_beck_chevalley_on_fiber_products(data):
    D = FinSet(f"d{k}" for k in range(data.draw(st.integers(1, 4))))
    h = data.draw(functions(dom=FinSet(f"b{k}" for k in range(data.draw(st.integers(0, 4)))), cod=D))
    k = data.draw(functions(dom=FinSet(f"c{k}" for k in range(data.draw(st.integers(0, 4)))), cod=D))
    A, f, g = fiber_product(h, k)
    assert is_pullback(SquareFS(top=f, bottom=k, left=g, right=h))
    assert pushforward_matrix(g) @ pullback_matrix(f) == pullback_matrix(k) @ pushforward_matrix(h)


def test_beck_chevalley_fails_off_pullbacks():
    # the collapsing square above commutes but violates g_* f^* = k^* h_*
    h = fn(["b1", "b2"], ["d"], ["d", "d"])
    k = fn(["c"], ["d"], ["d"])
    f = fn(["a"], ["b1", "b2"], ["b1"])
    g = fn(["a"], ["c"], ["c"])
    assert pushforward_matrix(g) @ pullback_matrix(f) != pullback_matrix(k) @ pushforward_matrix(h)


def test_copair_and_coproduct():
    A, B = FinSet(["a"]), FinSet(["b", "c"])
    S, ia, ib = coproduct(A, B)
    assert S.elements == ("L:a", "R:b", "R:c")
    h = copair(fn(["a"], ["z"], ["z"]), fn(["b", "c"], ["z"], ["z", "z"]))
    assert compose(ia, h).mapping == {"a": "z"}


def test_function_json_roundtrip():
    f = fn(["a", "b"], ["x"], {"a": "x", "b": "x"})
    assert FinFunction.from_json(f.to_json()) == f
    assert FinSet.from_json(FinSet(["q", "r"]).to_json()) == FinSet(["q", "r"])
