"""Open Markov processes, coarse-graining, and black-boxing.

An open Markov process is a cospan of injections ``S -i-> X <-o- T`` whose
apex carries an infinitesimal stochastic generator ``H`` (nonnegative
off-diagonal entries, zero column sums). All rates are exact rationals; the
only floating point code is the matrix exponential sanity check.

Black-boxing sends ``S -> (X, H) <- T`` to the linear relation

    {(i* v, I, o* v, O) : H v + i_* I - o_* O = 0}  in  Q^S + Q^S + Q^T + Q^T

read as a relation from ``Q^S + Q^S`` to ``Q^T + Q^T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .exactlin import RationalMatrix, apply, kernel, to_rational
from .finset import (
    FinFunction,
    FinSet,
    SquareFS,
    compose,
    coproduct,
    copair,
    identity,
    is_pullback,
    pullback_matrix,
    pushforward_matrix,
    pushout,
)
from .linrel import LinearRelation, RelSquare

__all__ = [
    "GeneratorError",
    "NegativeOffDiagonal",
    "ColumnSumNonzero",
    "ShapeMismatch",
    "NotSurjective",
    "BadWeights",
    "SectionMismatch",
    "InvalidMorphism",
    "NotBijection",
    "BoundaryMismatch",
    "Generator",
    "OpenMarkov",
    "BoundaryData",
    "MarkovMorphism",
    "Companion",
    "validate_generator",
    "odot",
    "odot_copair",
    "compose_open",
    "compose_open_with_legs",
    "tensor_open",
    "identity_open",
    "empty_open",
    "open_master_rhs",
    "expm_pade6",
    "matrix_exp_stochastic_check",
    "stochastic_section",
    "is_stochastic_section",
    "pushforward_generator",
    "is_lumpable",
    "lump",
    "check_morphism",
    "identity_morphism",
    "vertical_identity",
    "vertical_compose",
    "horizontal_compose",
    "associator",
    "left_unitor",
    "right_unitor",
    "black_box",
    "black_box_map",
    "black_box_morphism",
    "black_box_tensor_comparison",
    "companion_of",
    "conjoint_of",
    "mediating_map",
]


class GeneratorError(ValueError):
    pass


class NegativeOffDiagonal(GeneratorError):
    def __init__(self, i: str, j: str, value: Fraction):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"NegativeOffDiagonal: H[{i},{j}] = {value} < 0")


class ColumnSumNonzero(GeneratorError):
    def __init__(self, j: str, total: Fraction):
        self.j, self.total = j, total
        super().__init__(f"ColumnSumNonzero: column {j} sums to {total}")


class ShapeMismatch(GeneratorError):
    pass


class NotSurjective(ValueError):
    pass


class BadWeights(ValueError):
    pass


class SectionMismatch(ValueError):
    pass


class InvalidMorphism(ValueError):
    pass


class NotBijection(ValueError):
    pass


class BoundaryMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    """An infinitesimal stochastic matrix indexed by ``states``.

    Construction validates; use :func:`validate_generator` for the same check
    with a more explicit name.
    """

    states: FinSet
    H: RationalMatrix

    def __post_init__(self):
        n = len(self.states)
        if self.H.shape != (n, n):
            raise ShapeMismatch(f"ShapeMismatch: H has shape {self.H.shape}, expected {(n, n)}")
        labels = self.states.elements
        for j in range(n):
            for i in range(n):
                if i != j and self.H[i, j] < 0:
                    raise NegativeOffDiagonal(labels[i], labels[j], self.H[i, j])
        for j in range(n):
            total = sum(self.H.column(j), Fraction(0))
            if total != 0:
                raise ColumnSumNonzero(labels[j], total)

    @classmethod
    def zero(cls, states: FinSet) -> "Generator":
        n = len(states)
        return cls(states, RationalMatrix.zeros(n, n))

    def rate(self, i: str, j: str) -> Fraction:
        """Entry ``H[i, j]``: the rate of jumping from ``j`` to ``i``."""
        return self.H[self.states.index(i), self.states.index(j)]


def validate_generator(states: FinSet, H) -> Generator:
    if not isinstance(H, RationalMatrix):
        n = len(states)
        H = RationalMatrix(H, shape=(len(H), len(H[0]) if len(H) else n))
    return Generator(states, H)


@dataclass(frozen=True)
class OpenMarkov:
    inputs: FinSet
    outputs: FinSet
    gen: Generator
    i: FinFunction
    o: FinFunction

    def __post_init__(self):
        X = self.gen.states
        if self.i.dom != self.inputs or self.i.cod != X:
            raise ValueError("input leg must map inputs into the states")
        if self.o.dom != self.outputs or self.o.cod != X:
            raise ValueError("output leg must map outputs into the states")
        if not self.i.is_injective():
            raise ValueError("input leg is not injective")
        if not self.o.is_injective():
            raise ValueError("output leg is not injective")

    @property
    def states(self) -> FinSet:
        return self.gen.states

    @property
    def H(self) -> RationalMatrix:
        return self.gen.H

    def to_json(self) -> dict:
        return {
            "states": self.states.to_json(),
            "inputs": self.inputs.to_json(),
            "outputs": self.outputs.to_json(),
            "i": self.i.mapping,
            "o": self.o.mapping,
            "H": self.H.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "OpenMarkov":
        X = FinSet(data["states"])
        S = FinSet(data["inputs"])
        T = FinSet(data["outputs"])
        n = len(X)
        H = RationalMatrix(data["H"], shape=(len(data["H"]), len(data["H"][0]) if data["H"] else n))
        return cls(S, T, validate_generator(X, H), FinFunction(S, X, data["i"]), FinFunction(T, X, data["o"]))


@dataclass(frozen=True)
class BoundaryData:
    """Instantaneous inflows at the inputs and outflows at the outputs."""

    inflows: tuple[Fraction, ...]
    outflows: tuple[Fraction, ...]

    def __init__(self, inflows: Sequence, outflows: Sequence):
        object.__setattr__(self, "inflows", tuple(to_rational(x) for x in inflows))
        object.__setattr__(self, "outflows", tuple(to_rational(x) for x in outflows))


# -- composition --------------------------------------------------------------

def odot(H: RationalMatrix, G: RationalMatrix, j: FinFunction, k: FinFunction) -> RationalMatrix:
    """``j_* H j^* + k_* G k^*``."""
    return (pushforward_matrix(j) @ H @ pullback_matrix(j)) + (pushforward_matrix(k) @ G @ pullback_matrix(k))


def odot_copair(H: RationalMatrix, G: RationalMatrix, j: FinFunction, k: FinFunction) -> RationalMatrix:
    """``l_* (H + G) l^*`` with ``l = [j, k] : X + Y -> X +_T Y``."""
    ell = copair(j, k)
    return pushforward_matrix(ell) @ H.block_diag(G) @ pullback_matrix(ell)


def compose_open_with_legs(M: OpenMarkov, N: OpenMarkov) -> tuple[OpenMarkov, FinFunction, FinFunction]:
    """Composite ``M ; N`` together with the pushout legs ``j : X -> P`` and
    ``k : Y -> P``."""
    if M.outputs != N.inputs:
        raise BoundaryMismatch(f"outputs {M.outputs} do not match inputs {N.inputs}")
    P, j, k = pushout(M.o, N.i)
    gen = Generator(P, odot(M.H, N.H, j, k))
    return OpenMarkov(M.inputs, N.outputs, gen, compose(M.i, j), compose(N.o, k)), j, k


def compose_open(M: OpenMarkov, N: OpenMarkov) -> OpenMarkov:
    return compose_open_with_legs(M, N)[0]


def tensor_open(M: OpenMarkov, N: OpenMarkov) -> OpenMarkov:
    X, jx, jy = coproduct(M.states, N.states)
    S, s1, s2 = coproduct(M.inputs, N.inputs)
    T, t1, t2 = coproduct(M.outputs, N.outputs)
    i = FinFunction(S, X, [jx(M.i(s)) for s in M.inputs] + [jy(N.i(s)) for s in N.inputs])
    o = FinFunction(T, X, [jx(M.o(t)) for t in M.outputs] + [jy(N.o(t)) for t in N.outputs])
    return OpenMarkov(S, T, Generator(X, M.H.block_diag(N.H)), i, o)


def identity_open(S: FinSet) -> OpenMarkov:
    return OpenMarkov(S, S, Generator.zero(S), identity(S), identity(S))


def empty_open() -> OpenMarkov:
    return identity_open(FinSet())


# -- dynamics -----------------------------------------------------------------

def open_master_rhs(M: OpenMarkov, v: Sequence, bd: BoundaryData) -> tuple[Fraction, ...]:
    """``H v + i_* I - o_* O``."""
    if len(v) != len(M.states):
        raise ShapeMismatch(f"state vector has length {len(v)}, expected {len(M.states)}")
    if len(bd.inflows) != len(M.inputs) or len(bd.outflows) != len(M.outputs):
        raise ShapeMismatch("boundary data does not match the inputs/outputs")
    hv = M.H.apply_vector(v)
    inflow = pushforward_matrix(M.i).apply_vector(bd.inflows)
    outflow = pushforward_matrix(M.o).apply_vector(bd.outflows)
    return tuple(a + b - c for a, b, c in zip(hv, inflow, outflow))


# Pade(6,6) numerator coefficients c_k = (12-k)! 6! / (12! k! (6-k)!)
_PADE6 = tuple(
    math.factorial(12 - k) * math.factorial(6) / (math.factorial(12) * math.factorial(k) * math.factorial(6 - k))
    for k in range(7)
)


def expm_pade6(A: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a (6,6) Pade approximant."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    norm = np.linalg.norm(A, np.inf)
    s = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    B = A / (2.0 ** s)
    ident = np.eye(n)
    powers = [ident, B]
    for _ in range(5):
        powers.append(powers[-1] @ B)
    num = sum(c * P for c, P in zip(_PADE6, powers))
    den = sum(c * (-1) ** k * P for k, (c, P) in enumerate(zip(_PADE6, powers)))
    R = np.linalg.solve(den, num)
    for _ in range(s):
        R = R @ R
    return R


def matrix_exp_stochastic_check(H, t: float, tol: float = 1e-9) -> bool:
    """Is ``exp(t H)`` stochastic to within ``tol``?

    ``H`` may be a :class:`Generator`, a :class:`RationalMatrix`, or an array;
    the latter two are not validated, which lets invalid matrices be probed.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if isinstance(H, Generator):
        A = H.H.to_numpy()
    elif isinstance(H, RationalMatrix):
        A = H.to_numpy()
    else:
        A = np.asarray(H, dtype=float)
    U = expm_pade6(t * A)
    if U.size == 0:
        return True
    return bool(np.all(U >= -tol) and np.all(np.abs(U.sum(axis=0) - 1.0) <= tol))


# -- coarse-graining ----------------------------------------------------------

def stochastic_section(p: FinFunction, weights: Mapping[str, object] | None = None) -> RationalMatrix:
    """A stochastic matrix ``s`` with ``p_* s = 1``.

    ``weights`` assigns each state of ``p.dom`` its share of its fiber; shares
    must be nonnegative and sum to one over every fiber. The default spreads
    each fiber uniformly.
    """
    if not p.is_surjective():
        raise NotSurjective(f"{p} is not surjective")
    X, Xp = p.dom, p.cod
    if weights is None:
        sizes = {y: len(p.fiber(y)) for y in Xp}
        w = {x: Fraction(1, sizes[p(x)]) for x in X}
    else:
        unknown = set(weights) - set(X.elements)
        if unknown:
            raise BadWeights(f"weights given for unknown states {sorted(unknown)}")
        w = {x: to_rational(weights.get(x, 0)) for x in X}
        for y in Xp:
            fib = p.fiber(y)
            if len(fib) == 1 and fib[0] not in weights:
                w[fib[0]] = Fraction(1)
            if any(w[x] < 0 for x in fib):
                raise BadWeights(f"negative weight in the fiber over {y}")
            total = sum((w[x] for x in fib), Fraction(0))
            if total != 1:
                raise BadWeights(f"weights over the fiber of {y} sum to {total}, not 1")
    rows = [[0] * len(Xp) for _ in X]
    for x in X:
        rows[X.index(x)][Xp.index(p(x))] = w[x]
    return RationalMatrix(rows, shape=(len(X), len(Xp)))


def is_stochastic_section(p: FinFunction, s: RationalMatrix) -> bool:
    if s.shape != (len(p.dom), len(p.cod)):
        return False
    if any(x < 0 for r in s.rows for x in r):
        return False
    return pushforward_matrix(p) @ s == RationalMatrix.identity(len(p.cod))


def pushforward_generator(H, p: FinFunction) -> RationalMatrix:
    """``p_* H``: rows of ``H`` summed over each fiber of ``p``."""
    Hm = H.H if isinstance(H, Generator) else H
    return pushforward_matrix(p) @ Hm


def is_lumpable(H: Generator, p: FinFunction) -> bool:
    """Within each fiber of ``p``, do all columns of ``p_* H`` agree?"""
    if not p.is_surjective():
        raise NotSurjective(f"{p} is not surjective")
    if p.dom != H.states:
        raise ValueError("p must be defined on the states of H")
    pH = pushforward_generator(H, p)
    for y in p.cod:
        cols = {pH.column(H.states.index(x)) for x in p.fiber(y)}
        if len(cols) > 1:
            return False
    return True


def lump(H: Generator, p: FinFunction, s: RationalMatrix | None = None) -> Generator:
    """``p_* H s`` on the states ``p.cod``; ``s`` defaults to the uniform section."""
    if not p.is_surjective():
        raise NotSurjective(f"{p} is not surjective")
    if p.dom != H.states:
        raise ValueError("p must be defined on the states of H")
    if s is None:
        s = stochastic_section(p)
    elif not is_stochastic_section(p, s):
        raise SectionMismatch("s is not a stochastic section of p")
    return Generator(p.cod, pushforward_matrix(p) @ H.H @ s)


# -- morphisms ----------------------------------------------------------------

@dataclass(frozen=True)
class MarkovMorphism:
    """A triple ``(f, p, g)`` from ``source`` to ``target``."""

    source: OpenMarkov
    target: OpenMarkov
    f: FinFunction
    p: FinFunction
    g: FinFunction

    def input_square(self) -> SquareFS:
        return SquareFS(top=self.source.i, bottom=self.target.i, left=self.f, right=self.p)

    def output_square(self) -> SquareFS:
        return SquareFS(top=self.source.o, bottom=self.target.o, left=self.g, right=self.p)


def check_morphism(m: MarkovMorphism) -> bool:
    """Both boundary squares are pullbacks and ``p_* H = H' p_*``."""
    src, tgt = m.source, m.target
    if (m.f.dom != src.inputs or m.f.cod != tgt.inputs or m.g.dom != src.outputs
            or m.g.cod != tgt.outputs or m.p.dom != src.states or m.p.cod != tgt.states):
        return False
    for sq in (m.input_square(), m.output_square()):
        if not sq.commutes() or not is_pullback(sq):
            return False
    P = pushforward_matrix(m.p)
    return P @ src.H == tgt.H @ P


def identity_morphism(M: OpenMarkov) -> MarkovMorphism:
    return MarkovMorphism(M, M, identity(M.inputs), identity(M.states), identity(M.outputs))


def vertical_identity(f: FinFunction) -> MarkovMorphism:
    """The square on ``f`` between identity processes."""
    return MarkovMorphism(identity_open(f.dom), identity_open(f.cod), f, f, f)


def vertical_compose(alpha: MarkovMorphism, beta: MarkovMorphism) -> MarkovMorphism:
    """``alpha`` then ``beta`` (pasting top to bottom)."""
    if alpha.target != beta.source:
        raise InvalidMorphism("vertical composition: target of the first is not the source of the second")
    return MarkovMorphism(alpha.source, beta.target, compose(alpha.f, beta.f),
                          compose(alpha.p, beta.p), compose(alpha.g, beta.g))


def mediating_map(legs: Sequence[FinFunction], images: Sequence[FinFunction]) -> FinFunction:
    """The map ``u`` out of a jointly surjective family with ``u . legs[n] == images[n]``.

    Raises ``ValueError`` if the family is not jointly surjective or the
    prescribed images disagree somewhere.
    """
    src = legs[0].cod
    tgt = images[0].cod
    table: dict[str, str] = {}
    for leg, img in zip(legs, images):
        if leg.cod != src or img.cod != tgt or leg.dom != img.dom:
            raise ValueError("legs and images are not a compatible family")
        for x in leg.dom:
            y, z = leg(x), img(x)
            if table.setdefault(y, z) != z:
                raise ValueError(f"mediating map is not well defined at {y}")
    if set(table) != set(src.elements):
        raise ValueError("legs are not jointly surjective")
    return FinFunction(src, tgt, table)


def horizontal_compose(alpha: MarkovMorphism, beta: MarkovMorphism) -> MarkovMorphism:
    """Side-by-side pasting; the middle state map is ``p +_g q``."""
    if alpha.g != beta.f:
        raise InvalidMorphism("horizontal composition needs a shared boundary map")
    top, j, k = compose_open_with_legs(alpha.source, beta.source)
    bot, j2, k2 = compose_open_with_legs(alpha.target, beta.target)
    mid = mediating_map([j, k], [compose(alpha.p, j2), compose(beta.p, k2)])
    return MarkovMorphism(top, bot, alpha.f, mid, beta.g)


def associator(M: OpenMarkov, N: OpenMarkov, P: OpenMarkov) -> MarkovMorphism:
    """The comparison ``(M;N);P -> M;(N;P)`` induced by the pushout universal property."""
    MN, j1, k1 = compose_open_with_legs(M, N)
    left, j2, k2 = compose_open_with_legs(MN, P)
    NP, j3, k3 = compose_open_with_legs(N, P)
    right, j4, k4 = compose_open_with_legs(M, NP)
    legs = [compose(j1, j2), compose(k1, j2), k2]
    images = [j4, compose(j3, k4), compose(k3, k4)]
    sigma = mediating_map(legs, images)
    return MarkovMorphism(left, right, identity(M.inputs), sigma, identity(P.outputs))


def left_unitor(M: OpenMarkov) -> MarkovMorphism:
    """``id_S ; M -> M``."""
    comp, _, k = compose_open_with_legs(identity_open(M.inputs), M)
    return MarkovMorphism(comp, M, identity(M.inputs), k.inverse(), identity(M.outputs))


def right_unitor(M: OpenMarkov) -> MarkovMorphism:
    """``M ; id_T -> M``."""
    comp, j, _ = compose_open_with_legs(M, identity_open(M.outputs))
    return MarkovMorphism(comp, M, identity(M.inputs), j.inverse(), identity(M.outputs))


# -- black-boxing -------------------------------------------------------------

def _block(M: RationalMatrix, r0: int, c0: int, shape: tuple[int, int]) -> list[list[Fraction]]:
    rows = [[Fraction(0)] * shape[1] for _ in range(shape[0])]
    for a, r in enumerate(M.rows):
        for b, x in enumerate(r):
            rows[r0 + a][c0 + b] = x
    return rows


def black_box(M: OpenMarkov) -> LinearRelation:
    """Steady-state relation ``(i* v, I) ~ (o* v, O)``."""
    nx, ns, nt = len(M.states), len(M.inputs), len(M.outputs)
    # constraint H v + i_* I - o_* O = 0 over the variables (v, I, O)
    A = M.H.hstack(pushforward_matrix(M.i), -pushforward_matrix(M.o))
    steady = kernel(A)
    # (v, I, O) -> (i* v, I, o* v, O)
    out = 2 * ns + 2 * nt
    L = [[Fraction(0)] * (nx + ns + nt) for _ in range(out)]
    for a, s in enumerate(M.inputs):
        L[a][M.states.index(M.i(s))] = Fraction(1)
        L[ns + a][nx + a] = Fraction(1)
    for b, t in enumerate(M.outputs):
        L[2 * ns + b][M.states.index(M.o(t))] = Fraction(1)
        L[2 * ns + nt + b][nx + ns + b] = Fraction(1)
    Lm = RationalMatrix(L, shape=(out, nx + ns + nt))
    return LinearRelation(2 * ns, 2 * nt, apply(Lm, steady))


def black_box_map(f: FinFunction) -> RationalMatrix:
    """``f_* + f_*``, the image of a boundary map."""
    P = pushforward_matrix(f)
    return P.block_diag(P)


def black_box_morphism(m: MarkovMorphism) -> RelSquare:
    if not check_morphism(m):
        raise InvalidMorphism("not a morphism of open Markov processes")
    return RelSquare(black_box_map(m.f), black_box_map(m.g), black_box(m.source), black_box(m.target))


def black_box_tensor_comparison(n1: int, n2: int) -> RationalMatrix:
    """Permutation ``(Q^S1 + Q^S1) + (Q^S2 + Q^S2) -> Q^(S1+S2) + Q^(S1+S2)``,
    i.e. ``(v1, I1, v2, I2) -> (v1, v2, I1, I2)``."""
    order = (list(range(n1)) + list(range(2 * n1, 2 * n1 + n2))
             + list(range(n1, 2 * n1)) + list(range(2 * n1 + n2, 2 * n1 + 2 * n2)))
    size = 2 * (n1 + n2)
    rows = [[int(order[r] == c) for c in range(size)] for r in range(size)]
    return RationalMatrix(rows, shape=(size, size))


# -- companions and conjoints -------------------------------------------------

@dataclass(frozen=True)
class Companion:
    """A horizontal cell standing in for a bijection ``f : S -> S'``, with the
    two squares that witness it."""

    f: FinFunction
    cell: OpenMarkov
    # from the cell down to id_{S'}: boundary maps (f, id)
    counit: MarkovMorphism
    # from id_S down to the cell: boundary maps (id, f)
    unit: MarkovMorphism
    conjoint: bool = False

    def vertical_equation(self) -> bool:
        """Pasting unit over counit gives the identity square on ``f``."""
        pasted = vertical_compose(self.unit, self.counit)
        return pasted == vertical_identity(self.f)

    def horizontal_equation(self) -> bool:
        """Side by side, unit and counit paste to the identity on the cell,
        modulo the unitors."""
        if self.conjoint:
            pasted = horizontal_compose(self.counit, self.unit)
        else:
            pasted = horizontal_compose(self.unit, self.counit)
        lam = left_unitor(self.cell)
        rho = right_unitor(self.cell)
        if self.conjoint:
            src_iso, tgt_iso = rho, lam
        else:
            src_iso, tgt_iso = lam, rho
        # tgt_iso . pasted == src_iso as maps of states; boundary maps are identities
        lhs = compose(pasted.p, tgt_iso.p)
        return (lhs == src_iso.p and pasted.f == identity(pasted.source.inputs)
                and pasted.g == identity(pasted.source.outputs))

    def squares_valid(self) -> bool:
        return check_morphism(self.unit) and check_morphism(self.counit)


def companion_of(f: FinFunction) -> Companion:
    if not f.is_bijective():
        raise NotBijection(f"{f} is not a bijection")
    S, Sp = f.dom, f.cod
    cell = OpenMarkov(S, Sp, Generator.zero(Sp), f, identity(Sp))
    counit = MarkovMorphism(cell, identity_open(Sp), f, identity(Sp), identity(Sp))
    unit = MarkovMorphism(identity_open(S), cell, identity(S), f, f)
    return Companion(f, cell, counit, unit)


def conjoint_of(f: FinFunction) -> Companion:
    """The reversed cell ``S' -> (S', 0) <- S`` with its two squares.

    Here ``counit`` goes from the cell to ``id_{S'}`` with boundary maps
    ``(id, f)`` and ``unit`` from ``id_S`` to the cell with ``(f, id)``.
    """
    if not f.is_bijective():
        raise NotBijection(f"{f} is not a bijection")
    S, Sp = f.dom, f.cod
    cell = OpenMarkov(Sp, S, Generator.zero(Sp), identity(Sp), f)
    counit = MarkovMorphism(cell, identity_open(Sp), identity(Sp), identity(Sp), f)
    unit = MarkovMorphism(identity_open(S), cell, f, f, identity(S))
    return Companion(f, cell, counit, unit, conjoint=True)
