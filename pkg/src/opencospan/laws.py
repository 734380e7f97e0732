"""Seeded randomized checks of the double-categorical laws.

Every suite runs ``cases`` independent cases; case ``n`` of suite ``name`` with
seed ``seed`` draws from its own ``random.Random`` seeded with the string
``"name:seed:n"``, so a report is reproducible case by case.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import linrel as lr
from . import openmarkov as om
from . import opennet as on
from .exactlin import RationalMatrix, RationalSubspace, apply
from .finset import (
    FinFunction,
    FinSet,
    SquareFS,
    _UnionFind,
    compose,
    coproduct,
    fiber_product,
    identity,
    is_pullback,
    pullback_matrix,
    pushforward_matrix,
)

__all__ = [
    "SUITES",
    "GENERATORS",
    "LawReport",
    "Failure",
    "UnknownSuite",
    "UnknownKind",
    "run_suite",
    "generate",
]

MAX_NUM = 20
MAX_DEN = 10


class UnknownSuite(KeyError):
    pass


class UnknownKind(KeyError):
    pass


class CheckFailed(AssertionError):
    pass


# -- random building blocks ---------------------------------------------------

def rand_rational(rng: random.Random, lo: int = -MAX_NUM, hi: int = MAX_NUM) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, MAX_DEN))


def rand_rate(rng: random.Random, density: float = 0.6) -> Fraction:
    if rng.random() > density:
        return Fraction(0)
    return rand_rational(rng, 1, MAX_NUM)


def rand_finset(n: int, prefix: str) -> FinSet:
    return FinSet(f"{prefix}{k}" for k in range(n))


def rand_function(rng: random.Random, A: FinSet, B: FinSet) -> FinFunction:
    return FinFunction(A, B, [rng.choice(B.elements) for _ in A])


def rand_injection(rng: random.Random, A: FinSet, B: FinSet) -> FinFunction:
    return FinFunction(A, B, rng.sample(B.elements, len(A)))


def rand_surjection(rng: random.Random, A: FinSet, m: int, prefix: str) -> FinFunction:
    """A surjection onto a fresh ``m``-element set (requires ``m <= |A|``)."""
    B = rand_finset(m, prefix)
    order = list(A.elements)
    rng.shuffle(order)
    table = {x: B.elements[k] for k, x in enumerate(order[:m])}
    for x in order[m:]:
        table[x] = rng.choice(B.elements)
    return FinFunction(A, B, table)


def rand_bijection(rng: random.Random, A: FinSet, prefix: str) -> FinFunction:
    B = rand_finset(len(A), prefix)
    return FinFunction(A, B, rng.sample(B.elements, len(A)))


def rand_quotient(rng: random.Random, A: FinSet, merges: int) -> FinFunction:
    """A surjection onto a quotient of ``A`` named by least class members."""
    uf = _UnionFind(A.elements)
    for _ in range(merges):
        if len(A) >= 2:
            a, b = rng.sample(A.elements, 2)
            uf.union(a, b)
    return _quotient_map(A, uf)


def _quotient_map(A: FinSet, uf: _UnionFind) -> FinFunction:
    reps = []
    for a in A:
        r = uf.find(a)
        if r not in reps:
            reps.append(r)
    return FinFunction(A, FinSet(reps), [uf.find(a) for a in A])


def rand_generator_matrix(rng: random.Random, n: int, density: float = 0.6) -> RationalMatrix:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            if i != j:
                rows[i][j] = rand_rate(rng, density)
        rows[j][j] = -sum(rows[i][j] for i in range(n) if i != j)
    return RationalMatrix(rows, shape=(n, n))


def rand_generator(rng: random.Random, X: FinSet) -> om.Generator:
    return om.Generator(X, rand_generator_matrix(rng, len(X)))


def rand_open_markov(rng: random.Random, nx: int, S: FinSet, T: FinSet, prefix: str = "x") -> om.OpenMarkov:
    X = rand_finset(nx, prefix)
    return om.OpenMarkov(S, T, rand_generator(rng, X), rand_injection(rng, S, X), rand_injection(rng, T, X))


def rand_composable_pair(rng: random.Random, bound: int, max_boundary: int = 3):
    nx = rng.randint(1, bound)
    ny = rng.randint(1, bound)
    nb = min(max_boundary, nx, ny)
    S = rand_finset(rng.randint(0, min(max_boundary, nx)), "s")
    T = rand_finset(rng.randint(0, nb), "t")
    U = rand_finset(rng.randint(0, min(max_boundary, ny)), "u")
    return rand_open_markov(rng, nx, S, T, "x"), rand_open_markov(rng, ny, T, U, "y")


def rand_pullback_square(rng: random.Random, bound: int) -> SquareFS:
    """An explicit fiber product with its apex relabelled and reordered."""
    B = rand_finset(rng.randint(0, bound), "b")
    C = rand_finset(rng.randint(0, bound), "c")
    D = rand_finset(rng.randint(1, bound), "d")
    h = rand_function(rng, B, D)
    k = rand_function(rng, C, D)
    A, to_b, to_c = fiber_product(h, k)
    relabel = rand_bijection(rng, A, "a")
    back = relabel.inverse()
    order = list(relabel.cod.elements)
    rng.shuffle(order)
    A2 = FinSet(order)
    back = FinFunction(A2, A, back.mapping)
    return SquareFS(top=compose(back, to_b), bottom=k, left=compose(back, to_c), right=h)


def _split(rng: random.Random, total: Fraction, n: int) -> list[Fraction]:
    """Split ``total`` into ``n`` nonnegative rational shares."""
    w = [rng.randint(0, 4) for _ in range(n)]
    if not any(w):
        w[rng.randrange(n)] = 1
    s = sum(w)
    return [total * Fraction(x, s) for x in w]


def lift_open(rng: random.Random, Mp: om.OpenMarkov, sizes: dict[str, int]) -> om.MarkovMorphism:
    """Build ``M`` and a surjective morphism ``M -> Mp``.

    State ``x'`` of ``Mp`` gets a fiber ``x'~0 .. x'~(n-1)``. Each column of the
    new generator spreads the rates of the corresponding column of ``H'``
    across the target fibers, so ``p_* H = H' p_*`` by construction.
    """
    Xp = Mp.states
    fib = {x: [f"{x}~{k}" for k in range(sizes[x])] for x in Xp}
    X = FinSet([y for x in Xp for y in fib[x]])
    p = FinFunction(X, Xp, {y: x for x in Xp for y in fib[x]})
    n = len(X)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for xc in Xp:
        for jl in fib[xc]:
            j = X.index(jl)
            for yr in Xp:
                if yr == xc:
                    continue
                rate = Mp.gen.rate(yr, xc)
                for lab, share in zip(fib[yr], _split(rng, rate, len(fib[yr]))):
                    rows[X.index(lab)][j] = share
            inner = Fraction(0)
            for il in fib[xc]:
                if il != jl:
                    r = rand_rate(rng, 0.5)
                    rows[X.index(il)][j] = r
                    inner += r
            rows[j][j] = Mp.gen.rate(xc, xc) - inner
    gen = om.Generator(X, RationalMatrix(rows, shape=(n, n)))

    def boundary(foot: FinSet, leg: FinFunction):
        labels = [(b, k) for b in foot for k in range(sizes[leg(b)])]
        B = FinSet(f"{b}~{k}" for b, k in labels)
        return (B, FinFunction(B, X, [f"{leg(b)}~{k}" for b, k in labels]),
                FinFunction(B, foot, [b for b, _ in labels]))

    S, i, f = boundary(Mp.inputs, Mp.i)
    T, o, g = boundary(Mp.outputs, Mp.o)
    M = om.OpenMarkov(S, T, gen, i, o)
    return om.MarkovMorphism(M, Mp, f, p, g)


def extend_open(rng: random.Random, M: om.OpenMarkov, extra: int) -> om.MarkovMorphism:
    """Embed ``M`` into a larger process with ``extra`` new interior states.

    New columns may feed probability back into the old states; old columns are
    untouched, which keeps the inclusion a morphism.
    """
    W = rand_finset(extra, "w")
    Z, inj, winj = coproduct(M.states, W)
    n, m = len(M.states), extra
    K = rand_generator_matrix(rng, n + m)
    rows = [list(r) for r in M.H.block_diag(RationalMatrix.zeros(m, m)).rows]
    for c in range(n, n + m):
        for r in range(n + m):
            rows[r][c] = K[r, c]
    gen = om.Generator(Z, RationalMatrix(rows, shape=(n + m, n + m)))
    big = om.OpenMarkov(M.inputs, M.outputs, gen, compose(M.i, inj), compose(M.o, inj))
    return om.MarkovMorphism(M, big, identity(M.inputs), inj, identity(M.outputs))


def rand_fiber_sizes(rng: random.Random, X: FinSet, maxfib: int, fixed: dict[str, int] | None = None) -> dict[str, int]:
    sizes = {x: rng.randint(1, maxfib) for x in X}
    sizes.update(fixed or {})
    return sizes


def rand_markov_morphism(rng: random.Random, bound: int) -> om.MarkovMorphism:
    """Mix of coarse-grainings, embeddings, and their vertical composites."""
    nxp = rng.randint(1, max(1, bound // 2))
    S = rand_finset(rng.randint(0, min(2, nxp)), "s")
    T = rand_finset(rng.randint(0, min(2, nxp)), "t")
    Mp = rand_open_markov(rng, nxp, S, T, "x")
    shape = rng.choice(["lift", "extend", "both"])
    if shape == "extend":
        return extend_open(rng, Mp, rng.randint(0, 2))
    alpha = lift_open(rng, Mp, rand_fiber_sizes(rng, Mp.states, 2))
    if shape == "lift":
        return alpha
    beta = extend_open(rng, Mp, rng.randint(1, 2))
    return om.vertical_compose(alpha, beta)


def rand_lumpable_pair(rng: random.Random, bound: int) -> tuple[om.Generator, FinFunction]:
    m = rng.randint(1, max(1, bound // 2))
    Xp = rand_finset(m, "z")
    Mp = om.OpenMarkov(FinSet(), FinSet(), rand_generator(rng, Xp),
                       FinFunction(FinSet(), Xp, []), FinFunction(FinSet(), Xp, []))
    sizes = rand_fiber_sizes(rng, Xp, max(1, min(3, bound // m)))
    mor = lift_open(rng, Mp, sizes)
    return mor.source.gen, mor.p


def rand_relation(rng: random.Random, m: int, n: int) -> lr.LinearRelation:
    k = rng.randint(0, m + n)
    vecs = [[rng.choice([0, 0, 1, -1, 2, Fraction(1, 2)]) for _ in range(m + n)] for _ in range(k)]
    return lr.LinearRelation(m, n, RationalSubspace(m + n, vecs))


def rand_open_net(rng: random.Random, kind: str, nv: int, na: int, L: FinSet, R: FinSet,
                  prefix: str = "v") -> on.OpenNet:
    V = rand_finset(nv, prefix)
    A = rand_finset(na, prefix + "e")
    if kind == "petri":
        def ms():
            return {sp: rng.randint(1, 2) for sp in rng.sample(V.elements, rng.randint(0, min(2, nv)))}
        dec = on.PetriRates(V, A, {a: ms() for a in A}, {a: ms() for a in A},
                            {a: Fraction(rng.randint(0, 3)) for a in A})
    else:
        src = rand_function(rng, A, V)
        tgt = rand_function(rng, A, V)
        rate = tuple((a, Fraction(rng.randint(1, 3))) for a in A) if kind == "kgraph" else None
        dec = on.Graph(V, A, src, tgt, rate)
    return on.OpenNet(L, R, dec, rand_function(rng, L, V), rand_function(rng, R, V))


def quotient_square(rng: random.Random, M: on.OpenNet, f: FinFunction, g: FinFunction, merges: int) -> on.NetSquare:
    """A square out of ``M`` that merges vertices, compatible with the foot
    quotients ``f`` and ``g``."""
    uf = _UnionFind(M.vertices.elements)
    for leg, q in ((M.i, f), (M.o, g)):
        for b in q.cod:
            pre = q.fiber(b)
            for x in pre[1:]:
                uf.union(leg(pre[0]), leg(x))
    for _ in range(merges):
        if len(M.vertices) >= 2:
            a, b = rng.sample(M.vertices.elements, 2)
            uf.union(a, b)
    vq = _quotient_map(M.vertices, uf)
    V = vq.cod
    d = M.decoration
    if isinstance(d, on.PetriRates):
        dec = on.PetriRates(V, d.transitions,
                            {t: on.apply_monoid_map(vq, d.inputs_of(t)) for t in d.transitions},
                            {t: on.apply_monoid_map(vq, d.outputs_of(t)) for t in d.transitions},
                            {t: d.rate_of(t) for t in d.transitions})
    else:
        dec = on.Graph(V, d.edges, compose(d.src, vq), compose(d.tgt, vq), d.rate)
    i = FinFunction(f.cod, V, {b: vq(M.i(f.fiber(b)[0])) for b in f.cod})
    o = FinFunction(g.cod, V, {b: vq(M.o(g.fiber(b)[0])) for b in g.cod})
    target = on.OpenNet(f.cod, g.cod, dec, i, o)
    return on.NetSquare(M, target, f, g, vq, identity(M.arrows))


# -- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class Failure:
    case: int
    description: str
    counterexample: dict


@dataclass
class LawReport:
    suite: str
    seed: int
    size_bound: int
    cases: int
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "size_bound": self.size_bound,
            "cases": self.cases,
            "failures": [
                {"case": f.case, "description": f.description, "counterexample": f.counterexample}
                for f in sorted(self.failures, key=lambda f: f.case)
            ],
        }

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.failures)} FAILED"
        return f"{self.suite} seed={self.seed} cases={self.cases}: {status}"


def _ser(x):
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, om.MarkovMorphism):
        return {"source": x.source.to_json(), "target": x.target.to_json(),
                "f": x.f.to_json(), "p": x.p.to_json(), "g": x.g.to_json()}
    if isinstance(x, on.NetSquare):
        return {"source": x.source.to_json(), "target": x.target.to_json(), "f": x.f.to_json(),
                "g": x.g.to_json(), "vertex_map": x.vertex_map.to_json(), "arrow_map": x.arrow_map.to_json()}
    if isinstance(x, SquareFS):
        return {k: getattr(x, k).to_json() for k in ("top", "bottom", "left", "right")}
    if isinstance(x, (list, tuple)):
        return [_ser(y) for y in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CheckFailed(msg)


# -- suites -------------------------------------------------------------------

def _beck_chevalley(rng, bound, ctx, hooks):
    sq = rand_pullback_square(rng, bound)
    ctx["square"] = sq
    _require(is_pullback(sq), "constructed square is not a pullback")
    lhs = pushforward_matrix(sq.left) @ pullback_matrix(sq.top)
    rhs = pullback_matrix(sq.bottom) @ pushforward_matrix(sq.right)
    _require(lhs == rhs, "g_* f^* != k^* h_*")


def _push_pull_closure(rng, bound, ctx, hooks):
    X = rand_finset(rng.randint(0, bound), "x")
    Y = rand_finset(rng.randint(1, bound), "y")
    H = rand_generator(rng, X)
    f = rand_function(rng, X, Y)
    ctx.update(H=H.H, f=f)
    om.Generator(Y, pushforward_matrix(f) @ H.H @ pullback_matrix(f))


def _odot_equivalence(rng, bound, ctx, hooks):
    M, N = rand_composable_pair(rng, bound)
    ctx.update(M=M, N=N)
    comp, j, k = om.compose_open_with_legs(M, N)
    _require(om.odot(M.H, N.H, j, k) == om.odot_copair(M.H, N.H, j, k), "the two composition formulas differ")
    _require(comp.i.is_injective() and comp.o.is_injective(), "composite legs are not injective")


def _blackbox_functorial(rng, bound, ctx, hooks):
    M, N = rand_composable_pair(rng, bound)
    ctx.update(M=M, N=N)
    lhs = om.black_box(om.compose_open(M, N))
    rhs = lr.compose_relations(om.black_box(M), om.black_box(N))
    ctx.update(lhs=lhs, rhs=rhs)
    _require(lhs == rhs, "black box of the composite differs from the composite of black boxes")


def _blackbox_identity(rng, bound, ctx, hooks):
    S = rand_finset(rng.randint(0, min(4, bound)), "s")
    ctx["S"] = S
    _require(om.black_box(om.identity_open(S)) == lr.identity_relation(2 * len(S)),
             "black box of an identity is not the identity relation")


def blackbox_tensor_matches(M: om.OpenMarkov, N: om.OpenMarkov) -> bool:
    """``black_box(M (x) N)`` equals ``black_box(M) (x) black_box(N)`` once the
    monoidal comparison isomorphisms on both boundaries are applied."""
    lhs = om.black_box(om.tensor_open(M, N))
    tens = lr.tensor_relations(om.black_box(M), om.black_box(N))
    phi_in = om.black_box_tensor_comparison(len(M.inputs), len(N.inputs))
    phi_out = om.black_box_tensor_comparison(len(M.outputs), len(N.outputs))
    moved = apply(phi_in.block_diag(phi_out), tens.graph)
    return lhs.graph == moved


def _blackbox_monoidal(rng, bound, ctx, hooks):
    S1 = rand_finset(rng.randint(0, 3), "s")
    T1 = rand_finset(rng.randint(0, 3), "t")
    S2 = rand_finset(rng.randint(0, 3), "s")
    T2 = rand_finset(rng.randint(0, 3), "t")
    M = rand_open_markov(rng, rng.randint(max(1, len(S1), len(T1)), max(bound, 3)), S1, T1, "x")
    N = rand_open_markov(rng, rng.randint(max(1, len(S2), len(T2)), max(bound, 3)), S2, T2, "y")
    ctx.update(M=M, N=N)
    _require(blackbox_tensor_matches(M, N), "black box does not preserve the tensor product")


def _random_sections(rng, p: FinFunction, count: int, section_fn):
    out = []
    for _ in range(count):
        raw = {x: Fraction(rng.randint(0, 5)) for x in p.dom}
        for y in p.cod:
            fib = p.fiber(y)
            if not any(raw[x] for x in fib):
                raw[rng.choice(fib)] = Fraction(1)
        out.append(section_fn(p, raw))
    return out


def normalized_section(p: FinFunction, raw: dict) -> RationalMatrix:
    w = {}
    for y in p.cod:
        fib = p.fiber(y)
        tot = sum(raw[x] for x in fib)
        for x in fib:
            w[x] = raw[x] / tot
    return om.stochastic_section(p, w)


def _as_matrix(x) -> RationalMatrix:
    return x.H if isinstance(x, om.Generator) else x


def _point_weights(p: FinFunction, x0: str) -> dict:
    """All weight on ``x0`` in its fiber and on the first state of every other fiber."""
    firsts = {p.fiber(y)[0] for y in p.cod if y != p(x0)}
    return {x: Fraction(int(x == x0 or x in firsts)) for x in p.dom}


def _lumpability_equiv(rng, bound, ctx, hooks):
    section_fn = hooks.get("section_fn", normalized_section)
    lump_fn = hooks.get("lump_fn", lambda H, p, s: om.lump(H, p, s))
    mode = rng.choice(["lumpable", "perturbed", "random"])
    H, p = rand_lumpable_pair(rng, bound)
    if mode == "perturbed" and len(H.states) >= 2:
        # move rate from one off-diagonal entry to the diagonal of the same column
        rows = [list(r) for r in H.H.rows]
        j = rng.randrange(len(rows))
        i = rng.choice([r for r in range(len(rows)) if r != j])
        bump = rand_rational(rng, 1, MAX_NUM)
        rows[i][j] += bump
        rows[j][j] -= bump
        H = om.Generator(H.states, RationalMatrix(rows, shape=H.H.shape))
    elif mode == "random":
        H = rand_generator(rng, H.states)
    ctx.update(H=H.H, p=p, mode=mode)
    sections = _random_sections(rng, p, 10, section_fn)
    mats = [_as_matrix(lump_fn(H, p, s)) for s in sections]
    independent = all(m == mats[0] for m in mats)
    lumpable = om.is_lumpable(H, p)
    ctx.update(lumpable=lumpable, independent=independent)
    if lumpable:
        _require(independent, "lumpable but the lumped generator depends on the section")
        P = pushforward_matrix(p)
        _require(P @ H.H == mats[0] @ P, "lumpable but p_* H != H' p_*")
        om.Generator(p.cod, mats[0])
    else:
        # two sections concentrated on disagreeing columns must give different results
        pH = om.pushforward_generator(H, p)
        for y in p.cod:
            fib = p.fiber(y)
            cols = [pH.column(H.states.index(x)) for x in fib]
            if len(set(cols)) > 1:
                a = next(x for x, c in zip(fib, cols) if c != cols[0])
                m1 = _as_matrix(lump_fn(H, p, section_fn(p, _point_weights(p, fib[0]))))
                m2 = _as_matrix(lump_fn(H, p, section_fn(p, _point_weights(p, a))))
                _require(m1 != m2, "not lumpable, yet two point-mass sections agree")
                break


def _mark_quadruple(rng, bound):
    """Two rows of horizontally composable morphisms, stacked vertically."""
    nb = max(1, min(3, bound // 2))
    T2 = rand_finset(rng.randint(0, 2), "t")
    S2 = rand_finset(rng.randint(0, 2), "s")
    U2 = rand_finset(rng.randint(0, 2), "u")
    M2 = rand_open_markov(rng, rng.randint(max(1, len(S2), len(T2)), nb + 1), S2, T2, "x")
    N2 = rand_open_markov(rng, rng.randint(max(1, len(T2), len(U2)), nb + 1), T2, U2, "y")
    # shared fibers over the middle boundary keep the two lifts composable
    tsz = {t: rng.randint(1, 2) for t in T2}
    a2 = lift_open(rng, M2, rand_fiber_sizes(rng, M2.states, 2, {M2.o(t): n for t, n in tsz.items()}))
    b2 = lift_open(rng, N2, rand_fiber_sizes(rng, N2.states, 2, {N2.i(t): n for t, n in tsz.items()}))
    M1, N1 = a2.source, b2.source
    tsz = {t: rng.randint(1, 2) for t in M1.outputs}
    a1 = lift_open(rng, M1, rand_fiber_sizes(rng, M1.states, 1 + (len(M1.states) < 4),
                                             {M1.o(t): n for t, n in tsz.items()}))
    b1 = lift_open(rng, N1, rand_fiber_sizes(rng, N1.states, 1 + (len(N1.states) < 4),
                                             {N1.i(t): n for t, n in tsz.items()}))
    return a1, b1, a2, b2


def _interchange_mark(rng, bound, ctx, hooks):
    a1, b1, a2, b2 = _mark_quadruple(rng, bound)
    ctx.update(alpha=a1, beta=b1, alpha2=a2, beta2=b2)
    for m in (a1, b1, a2, b2):
        _require(om.check_morphism(m), "generated morphism is invalid")
    h1 = om.horizontal_compose(a1, b1)
    h2 = om.horizontal_compose(a2, b2)
    _require(om.check_morphism(h1) and om.check_morphism(h2), "horizontal composite is not a morphism")
    lhs = om.vertical_compose(h1, h2)
    rhs = om.horizontal_compose(om.vertical_compose(a1, a2), om.vertical_compose(b1, b2))
    _require(lhs == rhs, "interchange law fails")
    _require(om.check_morphism(lhs), "pasted square is not a morphism")


NET_KINDS = ("graph", "kgraph", "petri")


def _net_quadruple(rng, bound, kind):
    S = rand_finset(rng.randint(0, 3), "s")
    T = rand_finset(rng.randint(0, 3), "t")
    U = rand_finset(rng.randint(0, 3), "u")
    nv = max(2, min(bound, 5))
    M = rand_open_net(rng, kind, rng.randint(1, nv), rng.randint(0, 3), S, T, "m")
    N = rand_open_net(rng, kind, rng.randint(1, nv), rng.randint(0, 3), T, U, "n")
    f1, g1, h1 = (rand_quotient(rng, X, rng.randint(0, 2)) for X in (S, T, U))
    a1 = quotient_square(rng, M, f1, g1, rng.randint(0, 2))
    b1 = quotient_square(rng, N, g1, h1, rng.randint(0, 2))
    f2, g2, h2 = (rand_quotient(rng, X, rng.randint(0, 1)) for X in (f1.cod, g1.cod, h1.cod))
    a2 = quotient_square(rng, a1.target, f2, g2, rng.randint(0, 1))
    b2 = quotient_square(rng, b1.target, g2, h2, rng.randint(0, 1))
    return a1, b1, a2, b2


def _interchange_net(rng, bound, ctx, hooks):
    kind = rng.choice(NET_KINDS)
    a1, b1, a2, b2 = _net_quadruple(rng, bound, kind)
    ctx.update(kind=kind, alpha=a1, beta=b1, alpha2=a2, beta2=b2)
    for sq in (a1, b1, a2, b2):
        _require(on.check_net_square(sq), "generated square is invalid")
    h1 = on.horizontal_compose(a1, b1)
    h2 = on.horizontal_compose(a2, b2)
    _require(on.check_net_square(h1) and on.check_net_square(h2), "horizontal composite is not a square")
    lhs = on.vertical_compose(h1, h2)
    rhs = on.horizontal_compose(on.vertical_compose(a1, a2), on.vertical_compose(b1, b2))
    _require(lhs == rhs, "interchange law fails for open nets")
    _require(on.check_net_square(lhs), "pasted square is not valid")


def _is_iso_morphism(m: om.MarkovMorphism) -> bool:
    return om.check_morphism(m) and m.p.is_bijective() and m.f.is_bijective() and m.g.is_bijective()


def _small_triple_nets(rng, kind, max_each: int = 3):
    A, B, C, D = (rand_finset(rng.randint(0, 2), p) for p in "abcd")
    return (rand_open_net(rng, kind, rng.randint(1, max_each), rng.randint(0, 2), A, B, "m"),
            rand_open_net(rng, kind, rng.randint(1, max_each), rng.randint(0, 2), B, C, "n"),
            rand_open_net(rng, kind, rng.randint(1, max_each), rng.randint(0, 2), C, D, "q"))


def _unitors_associators(rng, bound, ctx, hooks):
    nb = max(1, min(bound, 4))
    S, T, U, V = (rand_finset(rng.randint(0, 2), p) for p in "stuv")
    M = rand_open_markov(rng, rng.randint(max(1, len(S), len(T)), max(nb, 2)), S, T, "x")
    N = rand_open_markov(rng, rng.randint(max(1, len(T), len(U)), max(nb, 2)), T, U, "y")
    P = rand_open_markov(rng, rng.randint(max(1, len(U), len(V)), max(nb, 2)), U, V, "z")
    ctx.update(M=M, N=N, P=P)
    _require(_is_iso_morphism(om.associator(M, N, P)), "associator is not an isomorphism of open Markov processes")
    _require(_is_iso_morphism(om.left_unitor(M)), "left unitor is not an isomorphism")
    _require(_is_iso_morphism(om.right_unitor(M)), "right unitor is not an isomorphism")

    kind = rng.choice(NET_KINDS)
    A, B, C = _small_triple_nets(rng, kind)
    ctx.update(kind=kind, A=A, B=B, C=C)
    left = on.compose_open_net(on.compose_open_net(A, B), C)
    right = on.compose_open_net(A, on.compose_open_net(B, C))
    _require(on.are_isomorphic(left, right) is not None, "no associator isomorphism found for open nets")
    _require(on.are_isomorphic(on.compose_open_net(on.identity_open_net(A.left_foot, kind), A), A) is not None,
             "no left unitor found for open nets")
    _require(on.are_isomorphic(on.compose_open_net(A, on.identity_open_net(A.right_foot, kind)), A) is not None,
             "no right unitor found for open nets")


def chi_markov(M1, M2, N1, N2) -> om.MarkovMorphism:
    """Comparison ``(M1 (x) N1);(M2 (x) N2) -> (M1;M2) (x) (N1;N2)``."""
    left, j, k = om.compose_open_with_legs(om.tensor_open(M1, N1), om.tensor_open(M2, N2))
    _, xa, ya = coproduct(M1.states, N1.states)
    _, xb, yb = coproduct(M2.states, N2.states)
    m_comp, mj, mk = om.compose_open_with_legs(M1, M2)
    n_comp, nj, nk = om.compose_open_with_legs(N1, N2)
    right = om.tensor_open(m_comp, n_comp)
    _, ml, nl = coproduct(m_comp.states, n_comp.states)
    legs = [compose(xa, j), compose(ya, j), compose(xb, k), compose(yb, k)]
    images = [compose(mj, ml), compose(nj, nl), compose(mk, ml), compose(nk, nl)]
    sigma = om.mediating_map(legs, images)
    return om.MarkovMorphism(left, right, identity(left.inputs), sigma, identity(left.outputs))


def _chi_mu_instances(rng, bound, ctx, hooks):
    nb = max(1, min(bound, 4))
    B1, B2 = rand_finset(rng.randint(0, 2), "b"), rand_finset(rng.randint(0, 2), "c")
    A1, A2 = rand_finset(rng.randint(0, 2), "a"), rand_finset(rng.randint(0, 2), "a")
    C1, C2 = rand_finset(rng.randint(0, 2), "e"), rand_finset(rng.randint(0, 2), "e")

    def proc(S, T, prefix):
        return rand_open_markov(rng, rng.randint(max(1, len(S), len(T)), max(nb, 2)), S, T, prefix)

    M1, M2 = proc(A1, B1, "x"), proc(B1, C1, "y")
    N1, N2 = proc(A2, B2, "z"), proc(B2, C2, "w")
    ctx.update(M1=M1, M2=M2, N1=N1, N2=N2)
    _require(_is_iso_morphism(chi_markov(M1, M2, N1, N2)), "chi is not an isomorphism of open Markov processes")
    _require(om.identity_open(coproduct(A1, A2)[0]) == om.tensor_open(om.identity_open(A1), om.identity_open(A2)),
             "mu fails: identity on a sum differs from the sum of identities")

    kind = rng.choice(NET_KINDS)
    m1 = rand_open_net(rng, kind, rng.randint(1, 2), rng.randint(0, 2), A1, B1, "m")
    m2 = rand_open_net(rng, kind, rng.randint(1, 2), rng.randint(0, 2), B1, C1, "n")
    n1 = rand_open_net(rng, kind, rng.randint(1, 2), rng.randint(0, 2), A2, B2, "p")
    n2 = rand_open_net(rng, kind, rng.randint(1, 2), rng.randint(0, 2), B2, C2, "q")
    ctx.update(kind=kind, m1=m1, m2=m2, n1=n1, n2=n2)
    lhs = on.compose_open_net(on.tensor_open_net(m1, n1), on.tensor_open_net(m2, n2))
    rhs = on.tensor_open_net(on.compose_open_net(m1, m2), on.compose_open_net(n1, n2))
    _require(on.are_isomorphic(lhs, rhs) is not None, "chi isomorphism not found for open nets")
    mu_l = on.identity_open_net(coproduct(A1, A2)[0], kind)
    mu_r = on.tensor_open_net(on.identity_open_net(A1, kind), on.identity_open_net(A2, kind))
    _require(on.are_isomorphic(mu_l, mu_r) is not None, "mu isomorphism not found for open nets")

    dims = [rng.randint(0, 3) for _ in range(6)]
    R, S = rand_relation(rng, dims[0], dims[1]), rand_relation(rng, dims[1], dims[2])
    R2, S2 = rand_relation(rng, dims[3], dims[4]), rand_relation(rng, dims[4], dims[5])
    ctx.update(R=R, S=S, R2=R2, S2=S2)
    _require(_linrel_chi(R, S, R2, S2), "chi fails for linear relations")
    _require(lr.identity_relation(dims[0] + dims[3]) == lr.tensor_relations(
        lr.identity_relation(dims[0]), lr.identity_relation(dims[3])), "mu fails for linear relations")


def _linrel_chi(R, S, R2, S2) -> bool:
    lhs = lr.tensor_relations(lr.compose_relations(R, S), lr.compose_relations(R2, S2))
    rhs = lr.compose_relations(lr.tensor_relations(R, R2), lr.tensor_relations(S, S2))
    return lhs == rhs


def _companion_equations(rng, bound, ctx, hooks):
    S = rand_finset(rng.randint(0, bound), "s")
    f = rand_bijection(rng, S, "r")
    ctx["f"] = f
    for witness in (om.companion_of(f), om.conjoint_of(f)):
        name = "conjoint" if witness.conjoint else "companion"
        _require(witness.squares_valid(), f"{name} squares are not morphisms")
        _require(witness.vertical_equation(), f"{name} vertical equation fails")
        _require(witness.horizontal_equation(), f"{name} horizontal equation fails")


SEMIGROUP_TIMES = (0.1, 1.0, 10.0)


def _semigroup_numeric(rng, bound, ctx, hooks):
    n = rng.randint(1, max(bound, 10))
    H = rand_generator(rng, rand_finset(n, "x"))
    ctx["H"] = H.H
    for t in SEMIGROUP_TIMES:
        _require(om.matrix_exp_stochastic_check(H, t, 1e-9), f"exp(tH) not stochastic at t={t}")


def _linrel_strictness(rng, bound, ctx, hooks):
    b = max(1, min(bound, 5))
    d = [rng.randint(0, b) for _ in range(4)]
    R, S, T = rand_relation(rng, d[0], d[1]), rand_relation(rng, d[1], d[2]), rand_relation(rng, d[2], d[3])
    ctx.update(R=R, S=S, T=T)
    _require(lr.compose_relations(lr.compose_relations(R, S), T)
             == lr.compose_relations(R, lr.compose_relations(S, T)), "composition is not associative")
    _require(lr.compose_relations(lr.identity_relation(d[0]), R) == R, "left unit law fails")
    _require(lr.compose_relations(R, lr.identity_relation(d[1])) == R, "right unit law fails")
    e = [rng.randint(0, b) for _ in range(3)]
    R2, S2 = rand_relation(rng, e[0], e[1]), rand_relation(rng, e[1], e[2])
    ctx.update(R2=R2, S2=S2)
    _require(_linrel_chi(R, S, R2, S2), "interchange with the tensor product fails")


Case = Callable[[random.Random, int, dict, dict], None]

SUITES: dict[str, Case] = {
    "beck_chevalley": _beck_chevalley,
    "push_pull_closure": _push_pull_closure,
    "odot_equivalence": _odot_equivalence,
    "blackbox_functorial": _blackbox_functorial,
    "blackbox_identity": _blackbox_identity,
    "blackbox_monoidal": _blackbox_monoidal,
    "lumpability_equiv": _lumpability_equiv,
    "interchange_mark": _interchange_mark,
    "interchange_net": _interchange_net,
    "unitors_associators": _unitors_associators,
    "chi_mu_instances": _chi_mu_instances,
    "companion_equations": _companion_equations,
    "semigroup_numeric": _semigroup_numeric,
    "linrel_strictness": _linrel_strictness,
}


def case_rng(name: str, seed: int, case: int) -> random.Random:
    return random.Random(f"{name}:{seed}:{case}")


def run_suite(name: str, seed: int = 0, size_bound: int = 6, cases: int = 100, **hooks) -> LawReport:
    """Run ``cases`` random instances of one law suite.

    ``hooks`` replace internals for mutation testing: ``lump_fn(H, p, s)`` and
    ``section_fn(p, raw_weights)`` in ``lumpability_equiv``.
    """
    if name not in SUITES:
        raise UnknownSuite(name)
    check = SUITES[name]
    report = LawReport(name, seed, size_bound, cases)
    for n in range(cases):
        ctx: dict = {}
        try:
            check(case_rng(name, seed, n), size_bound, ctx, hooks)
        except Exception as exc:  # any exception is a failed case, recorded for replay
            payload = {k: _ser(v) for k, v in ctx.items()}
            report.failures.append(Failure(n, f"{type(exc).__name__}: {exc}", payload))
    return report


# -- named generators ---------------------------------------------------------

def _gen_valid_generator(rng, bound):
    return rand_generator(rng, rand_finset(rng.randint(1, bound), "x"))


GENERATORS: dict[str, Callable] = {
    "valid_generator": _gen_valid_generator,
    "pullback_square": rand_pullback_square,
    "lumpable_pair": rand_lumpable_pair,
    "composable_pair": rand_composable_pair,
    "markov_morphism": rand_markov_morphism,
    "open_markov": lambda rng, b: rand_open_markov(
        rng, rng.randint(2, max(2, b)), rand_finset(rng.randint(0, 2), "s"), rand_finset(rng.randint(0, 2), "t")),
    "linear_relation": lambda rng, b: rand_relation(rng, rng.randint(0, b), rng.randint(0, b)),
    "bijection": lambda rng, b: rand_bijection(rng, rand_finset(rng.randint(0, b), "s"), "r"),
    "open_graph": lambda rng, b: rand_open_net(rng, "graph", rng.randint(1, b), rng.randint(0, b),
                                               rand_finset(rng.randint(0, 2), "s"), rand_finset(rng.randint(0, 2), "t")),
    "open_kgraph": lambda rng, b: rand_open_net(rng, "kgraph", rng.randint(1, b), rng.randint(0, b),
                                                rand_finset(rng.randint(0, 2), "s"), rand_finset(rng.randint(0, 2), "t")),
    "open_petri": lambda rng, b: rand_open_net(rng, "petri", rng.randint(1, b), rng.randint(0, b),
                                               rand_finset(rng.randint(0, 2), "s"), rand_finset(rng.randint(0, 2), "t")),
}


def generate(kind: str, seed: int = 0, size_bound: int = 6):
    """A deterministic pseudo-random instance of ``kind``."""
    if kind not in GENERATORS:
        raise UnknownKind(kind)
    return GENERATORS[kind](random.Random(f"generate:{kind}:{seed}"), size_bound)


def report_json(report: LawReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=2)
