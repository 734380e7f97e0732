import random
from fractions import Fraction as Q

import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, settings, strategies as st

from conftest import (
    four_state_process,
    lumped_process,
    lumping_map,
    lumping_process,
    open_markov,
    three_state_process,
)
from opencospan import laws
from opencospan import openmarkov as om
from opencospan.exactlin import RationalMatrix
from opencospan.finset import FinFunction, FinSet, identity, pushforward_matrix
from opencospan.linrel import compose_relations, identity_relation, is_rel_2morphism


# -- generators ---------------------------------------------------------------

def test_generator_rejects_negative_rate():
    with pytest.raises(om.NegativeOffDiagonal) as err:
        om.validate_generator(FinSet(["a", "b"]), [[1, 0], [-1, 0]])
    assert err.value.i == "b" and err.value.j == "a"


def test_generator_reports_bad_column():
    with pytest.raises(om.ColumnSumNonzero) as err:
        om.validate_generator(FinSet(["a", "b"]), [[-1, 0], [1, 1]])
    assert err.value.j == "b"
    assert "column b" in str(err.value)


def test_generator_shape():
    with pytest.raises(om.ShapeMismatch):
        om.Generator(FinSet(["a"]), RationalMatrix([[0, 0]]))


def test_legs_must_be_injective():
    X = FinSet(["x"])
    S = FinSet(["s1", "s2"])
    with pytest.raises(ValueError):
        om.OpenMarkov(S, FinSet(), om.Generator.zero(X), FinFunction(S, X, ["x", "x"]),
                      FinFunction(FinSet(), X, []))


def test_inputs_and_outputs_may_overlap():
    M = open_markov(["x"], [[0]], ["s"], {"s": "x"}, ["t"], {"t": "x"})
    assert M.i("s") == M.o("t")


# -- composition --------------------------------------------------------------

def test_intro_composite():
    comp = om.compose_open(four_state_process(), three_state_process())
    assert len(comp.states) == 6
    # the glued state d = x leaves at rate 2 (to c) plus 14 (to y, z)
    d = comp.states.index("L:d")
    col = comp.H.column(d)
    assert col[d] == -16
    assert col[comp.states.index("L:c")] == 2
    assert col[comp.states.index("R:y")] == 2
    assert col[comp.states.index("R:z")] == 12
    assert comp.inputs == FinSet(["a", "b"]) and comp.outputs == FinSet(["z"])


def test_composition_needs_matching_boundary():
    with pytest.raises(om.BoundaryMismatch):
        om.compose_open(three_state_process(), three_state_process())


def test_both_composition_formulas_agree():
    M, N = four_state_process(), three_state_process()
    _, j, k = om.compose_open_with_legs(M, N)
    assert om.odot(M.H, N.H, j, k) == om.odot_copair(M.H, N.H, j, k)


def test_tensor_is_block_diagonal():
    M, N = four_state_process(), three_state_process()
    T = om.tensor_open(M, N)
    assert T.H == M.H.block_diag(N.H)
    assert len(T.inputs) == 3 and len(T.outputs) == 2


def test_identity_is_zero_generator():
    S = FinSet(["p", "q"])
    M = om.identity_open(S)
    assert M.H.is_zero() and M.i == identity(S)


def test_master_equation_rhs():
    M = four_state_process()
    rhs = om.open_master_rhs(M, [1, 0, 0, 0], om.BoundaryData([2, 0], [1]))
    assert rhs == (Q(3, 2), 0, Q(1, 2), -1)
    with pytest.raises(om.ShapeMismatch):
        om.open_master_rhs(M, [1, 0], om.BoundaryData([0, 0], [0]))


# -- exponential --------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([0.1, 1.0, 10.0]))
def test_pade_expm_matches_scipy(seed, t):
    H = laws.rand_generator(random.Random(seed), laws.rand_finset(random.Random(seed).randint(1, 8), "x"))
    A = t * H.H.to_numpy()
    ours = om.expm_pade6(A)
    ref = scipy.linalg.expm(A)
    assert np.allclose(ours, ref, atol=1e-10, rtol=1e-8)
    assert om.matrix_exp_stochastic_check(H, t)


def test_expm_check_rejects_non_generator():
    # a negative off-diagonal entry drives an entry of exp(tA) below zero
    A = np.array([[1.0, 0.0], [-1.0, 0.0]])
    assert not om.matrix_exp_stochastic_check(A, 1.0)


def test_expm_empty():
    assert om.matrix_exp_stochastic_check(np.zeros((0, 0)), 1.0)


# -- black box ----------------------------------------------------------------

def sympy_black_box(M):
    """Steady states solved with sympy, then read off at the boundary."""
    X, S, T = M.states, M.inputs, M.outputs
    nx, ns, nt = len(X), len(S), len(T)
    A = sympy.zeros(nx, nx + ns + nt)
    for r in range(nx):
        for c in range(nx):
            A[r, c] = sympy.Rational(M.H[r, c].numerator, M.H[r, c].denominator)
    for a, s in enumerate(S):
        A[X.index(M.i(s)), nx + a] += 1
    for b, t in enumerate(T):
        A[X.index(M.o(t)), nx + ns + b] -= 1
    vecs = []
    for v in A.nullspace():
        vecs.append([v[X.index(M.i(s))] for s in S] + [v[nx + a] for a in range(ns)]
                    + [v[X.index(M.o(t))] for t in T] + [v[nx + ns + b] for b in range(nt)])
    return vecs


def assert_same_span(R, vecs):
    n = R.dom_dim + R.cod_dim
    for v in vecs:
        assert tuple(Q(int(x.p), int(x.q)) for x in v) in R.graph
    ours = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in v] for v in R.graph.vectors]) \
        if R.dim else sympy.zeros(0, n)
    theirs = sympy.Matrix(vecs) if vecs else sympy.zeros(0, n)
    assert ours.rank() == R.dim
    assert (theirs.rank() if vecs else 0) == R.dim


def test_black_box_of_lumping_process_matches_oracle():
    R = om.black_box(lumping_process())
    assert R.dom_dim == 2 and R.cod_dim == 2
    assert R.dim == 2
    assert_same_span(R, sympy_black_box(lumping_process()))
    # inflow I at a is balanced only if 15 v_a = I = outflow at c
    assert R.relates([1, 15], [0, 15])
    assert R.relates([0, 0], [1, 0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_black_box_matches_sympy_steady_states(seed):
    rng = random.Random(seed)
    M, _ = laws.rand_composable_pair(rng, 5)
    assert_same_span(om.black_box(M), sympy_black_box(M))


def test_black_box_is_functorial_on_intro_pair():
    M, N = four_state_process(), three_state_process()
    assert om.black_box(om.compose_open(M, N)) == compose_relations(om.black_box(M), om.black_box(N))


def test_black_box_of_identity():
    for n in range(5):
        S = FinSet(f"s{k}" for k in range(n))
        assert om.black_box(om.identity_open(S)) == identity_relation(2 * n)


def test_black_box_tensor_with_comparison():
    assert laws.blackbox_tensor_matches(four_state_process(), three_state_process())


def test_comparison_is_permutation():
    P = om.black_box_tensor_comparison(2, 1)
    assert P @ P.T == RationalMatrix.identity(6)
    assert P.apply_vector([1, 2, 3, 4, 5, 6]) == (1, 2, 5, 3, 4, 6)


# -- lumping ------------------------------------------------------------------

def test_lumping_example_exact():
    H, p = lumping_process().gen, lumping_map()
    s = om.stochastic_section(p, {"b1": Q(1, 3), "b2": Q(2, 3)})
    assert s == RationalMatrix([[1, 0, 0], [0, Q(1, 3), 0], [0, Q(2, 3), 0], [0, 0, 1]])
    assert om.pushforward_generator(H, p) == RationalMatrix([[-15, 0, 0, 0], [15, -6, -6, 0], [0, 6, 6, 0]])
    assert om.lump(H, p, s).H == RationalMatrix([[-15, 0, 0], [15, -6, 0], [0, 6, 0]])
    assert om.is_lumpable(H, p)


def test_perturbed_lumping_example_is_not_lumpable():
    M = lumping_process()
    rows = [list(r) for r in M.H.rows]
    rows[3][1], rows[1][1] = Q(5), Q(-9)  # b1 -> c now 5
    H = om.Generator(M.states, RationalMatrix(rows))
    p = lumping_map()
    assert not om.is_lumpable(H, p)
    s1 = om.stochastic_section(p, {"b1": 1, "b2": 0})
    s2 = om.stochastic_section(p, {"b1": 0, "b2": 1})
    assert om.lump(H, p, s1) != om.lump(H, p, s2)


def test_section_validation():
    p = lumping_map()
    with pytest.raises(om.BadWeights):
        om.stochastic_section(p, {"b1": Q(1, 2), "b2": Q(1, 3)})
    with pytest.raises(om.BadWeights):
        om.stochastic_section(p, {"zz": 1})
    not_onto = FinFunction(FinSet(["a"]), FinSet(["a", "b"]), ["a"])
    with pytest.raises(om.NotSurjective):
        om.stochastic_section(not_onto)
    bad = RationalMatrix([[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(om.SectionMismatch):
        om.lump(lumping_process().gen, p, bad)


def test_default_section_is_uniform():
    s = om.stochastic_section(lumping_map())
    assert s[1, 1] == s[2, 1] == Q(1, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_lumpable_construction_is_section_independent(seed):
    rng = random.Random(seed)
    H, p = laws.rand_lumpable_pair(rng, 6)
    assert om.is_lumpable(H, p)
    a = om.lump(H, p)
    w = {x: Q(rng.randint(1, 4)) for x in p.dom}
    norm = {x: w[x] / sum(w[y] for y in p.fiber(p(x))) for x in p.dom}
    assert om.lump(H, p, om.stochastic_section(p, norm)) == a
    P = pushforward_matrix(p)
    assert P @ H.H == a.H @ P


# -- morphisms ----------------------------------------------------------------

def lumping_morphism():
    M, Mp = lumping_process(), lumped_process()
    return om.MarkovMorphism(M, Mp, identity(M.inputs), lumping_map(), identity(M.outputs))


def test_lumping_morphism_and_black_box_containment():
    m = lumping_morphism()
    assert om.check_morphism(m)
    assert is_rel_2morphism(om.black_box_morphism(m))


def test_non_pullback_boundary_is_rejected():
    M = lumping_process()
    Mp = lumped_process()
    # outputs sent to the merged state b: the output square no longer commutes
    T2 = FinSet(["o1", "o2"])
    X = M.states
    M2 = om.OpenMarkov(M.inputs, T2, M.gen, M.i, FinFunction(T2, X, ["b1", "b2"]))
    Mp2 = om.OpenMarkov(Mp.inputs, FinSet(["o"]), Mp.gen, Mp.i, FinFunction(FinSet(["o"]), Mp.states, ["b"]))
    collapse = FinFunction(T2, FinSet(["o"]), ["o", "o"])
    assert om.check_morphism(om.MarkovMorphism(M2, Mp2, identity(M.inputs), lumping_map(), collapse))
    # but only one of b1, b2 exposed: fiber of p over b has two states, not one
    T1 = FinSet(["o1"])
    M3 = om.OpenMarkov(M.inputs, T1, M.gen, M.i, FinFunction(T1, X, ["b1"]))
    one = FinFunction(T1, FinSet(["o"]), ["o"])
    m = om.MarkovMorphism(M3, Mp2, identity(M.inputs), lumping_map(), one)
    assert not om.check_morphism(m)
    with pytest.raises(om.InvalidMorphism):
        om.black_box_morphism(m)


def test_generated_morphisms_black_box_to_2_morphisms():
    for seed in range(20):
        m = laws.rand_markov_morphism(random.Random(seed), 6)
        assert om.check_morphism(m)
        assert is_rel_2morphism(om.black_box_morphism(m))


def test_vertical_compose_requires_match():
    m = lumping_morphism()
    with pytest.raises(om.InvalidMorphism):
        om.vertical_compose(m, m)
    assert om.vertical_compose(om.identity_morphism(m.source), m) == m


def test_associator_and_unitors_on_intro_pair():
    M, N = four_state_process(), three_state_process()
    P = om.identity_open(N.outputs)
    a = om.associator(M, N, P)
    assert om.check_morphism(a) and a.p.is_bijective()
    for u in (om.left_unitor(M), om.right_unitor(M)):
        assert om.check_morphism(u) and u.p.is_bijective()


def test_chi_comparison_is_iso():
    m = laws.chi_markov(four_state_process(), three_state_process(), three_state_process(),
                        om.identity_open(FinSet(["z"])))
    assert om.check_morphism(m) and m.p.is_bijective()


def test_companion_and_conjoint():
    S = FinSet(["s", "t"])
    f = FinFunction(S, FinSet(["u", "v"]), ["v", "u"])
    for c in (om.companion_of(f), om.conjoint_of(f)):
        assert c.squares_valid()
        assert c.vertical_equation()
        assert c.horizontal_equation()
    with pytest.raises(om.NotBijection):
        om.companion_of(FinFunction(S, FinSet(["u"]), ["u", "u"]))


def test_json_roundtrip():
    M = four_state_process()
    assert om.OpenMarkov.from_json(M.to_json()) == M
