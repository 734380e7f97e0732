"""Finite sets, functions between them, and the colimits used to glue open systems.

Elements are string labels. A :class:`FinSet` is an ordered tuple of distinct
labels; the order fixes the standard basis of ``Q^X`` used by the pushforward
and pullback matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .exactlin import RationalMatrix

__all__ = [
    "FinSet",
    "FinFunction",
    "CospanFS",
    "SquareFS",
    "compose",
    "identity",
    "coproduct",
    "copair",
    "pushout",
    "is_pullback",
    "fiber_product",
    "pushforward_matrix",
    "pullback_matrix",
    "NotPullbackError",
]

LEFT_TAG = "L:"
RIGHT_TAG = "R:"


class NotPullbackError(ValueError):
    pass


@dataclass(frozen=True)
class FinSet:
    elements: tuple[str, ...]

    def __init__(self, elements: Iterable[str] = ()):
        elems = tuple(str(e) for e in elements)
        if len(set(elems)) != len(elems):
            raise ValueError(f"duplicate labels in {elems!r}")
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __repr__(self) -> str:
        return "FinSet({%s})" % ", ".join(self.elements)

    @property
    def _index(self) -> dict[str, int]:
        # cached lazily; the dataclass is frozen so go through __dict__
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {e: n for n, e in enumerate(self.elements)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def index(self, x: str) -> int:
        return self._index[x]

    def is_isomorphic(self, other: "FinSet") -> bool:
        return len(self) == len(other)

    def to_json(self) -> list[str]:
        return list(self.elements)

    @classmethod
    def from_json(cls, data) -> "FinSet":
        return cls(data)


@dataclass(frozen=True)
class FinFunction:
    """A total function ``dom -> cod``."""

    dom: FinSet
    cod: FinSet
    table: tuple[str, ...]  # image of dom.elements[n]

    def __init__(self, dom: FinSet, cod: FinSet, mapping: Mapping[str, str] | Iterable[str]):
        if isinstance(mapping, Mapping):
            missing = [x for x in dom if x not in mapping]
            if missing:
                raise ValueError(f"function undefined on {missing!r}")
            extra = [x for x in mapping if x not in dom]
            if extra:
                raise ValueError(f"mapping has labels outside the domain: {extra!r}")
            table = tuple(str(mapping[x]) for x in dom)
        else:
            table = tuple(str(y) for y in mapping)
            if len(table) != len(dom):
                raise ValueError("table length does not match domain size")
        bad = [y for y in table if y not in cod]
        if bad:
            raise ValueError(f"image labels not in codomain: {bad!r}")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "table", table)

    def __call__(self, x: str) -> str:
        return self.table[self.dom.index(x)]

    @property
    def mapping(self) -> dict[str, str]:
        return dict(zip(self.dom.elements, self.table))

    def __repr__(self) -> str:
        body = ", ".join(f"{x}->{y}" for x, y in zip(self.dom, self.table))
        return f"FinFunction({{{body}}} : {len(self.dom)} -> {len(self.cod)})"

    def then(self, g: "FinFunction") -> "FinFunction":
        return compose(self, g)

    def fiber(self, y: str) -> list[str]:
        return [x for x, fx in zip(self.dom, self.table) if fx == y]

    def image(self) -> set[str]:
        return set(self.table)

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return set(self.table) == set(self.cod.elements)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "FinFunction":
        if not self.is_bijective():
            raise ValueError("only bijections have inverses")
        return FinFunction(self.cod, self.dom, {y: x for x, y in zip(self.dom, self.table)})

    def to_json(self) -> dict:
        return {"dom": self.dom.to_json(), "cod": self.cod.to_json(), "map": self.mapping}

    @classmethod
    def from_json(cls, data) -> "FinFunction":
        return cls(FinSet(data["dom"]), FinSet(data["cod"]), data["map"])


def identity(A: FinSet) -> FinFunction:
    return FinFunction(A, A, A.elements)


def compose(f: FinFunction, g: FinFunction) -> FinFunction:
    """Return ``g . f`` (first ``f``, then ``g``)."""
    if f.cod != g.dom:
        raise ValueError(f"cannot compose: codomain {f.cod} != domain {g.dom}")
    return FinFunction(f.dom, g.cod, [g(y) for y in f.table])


def coproduct(A: FinSet, B: FinSet) -> tuple[FinSet, FinFunction, FinFunction]:
    """Disjoint union ``A + B`` with labels tagged ``L:`` and ``R:``."""
    P = FinSet([LEFT_TAG + a for a in A] + [RIGHT_TAG + b for b in B])
    inj_a = FinFunction(A, P, [LEFT_TAG + a for a in A])
    inj_b = FinFunction(B, P, [RIGHT_TAG + b for b in B])
    return P, inj_a, inj_b


def copair(f: FinFunction, g: FinFunction, cop: FinSet | None = None) -> FinFunction:
    """The map ``[f, g] : A + B -> C`` out of the tagged coproduct."""
    if f.cod != g.cod:
        raise ValueError("copairing needs a common codomain")
    if cop is None:
        cop, _, _ = coproduct(f.dom, g.dom)
    return FinFunction(cop, f.cod, list(f.table) + list(g.table))


def coproduct_map(f: FinFunction, g: FinFunction) -> FinFunction:
    """``f + g : A + B -> A' + B'``."""
    src, _, _ = coproduct(f.dom, g.dom)
    tgt, ia, ib = coproduct(f.cod, g.cod)
    return FinFunction(src, tgt, [ia(y) for y in f.table] + [ib(y) for y in g.table])


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # lexicographically least label stays the representative
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra


def pushout(f: FinFunction, g: FinFunction) -> tuple[FinSet, FinFunction, FinFunction]:
    """Pushout of the span ``X <-f- T -g-> Y``.

    Returns ``(P, j, k)`` with ``j . f == k . g``. ``P`` is the quotient of the
    tagged coproduct ``X + Y``; each class is named by its least tagged label
    and classes are ordered by first appearance scanning ``X`` then ``Y``.
    """
    if f.dom != g.dom:
        raise ValueError("pushout needs a common domain")
    cop, ix, iy = coproduct(f.cod, g.cod)
    uf = _UnionFind(cop.elements)
    for t in f.dom:
        uf.union(ix(f(t)), iy(g(t)))
    reps: list[str] = []
    seen = set()
    for c in cop:
        r = uf.find(c)
        if r not in seen:
            seen.add(r)
            reps.append(r)
    P = FinSet(reps)
    j = FinFunction(f.cod, P, [uf.find(ix(x)) for x in f.cod])
    k = FinFunction(g.cod, P, [uf.find(iy(y)) for y in g.cod])
    return P, j, k


@dataclass(frozen=True)
class CospanFS:
    left_foot: FinSet
    apex: FinSet
    right_foot: FinSet
    i: FinFunction
    o: FinFunction

    def __post_init__(self):
        if self.i.dom != self.left_foot or self.o.dom != self.right_foot:
            raise ValueError("cospan legs must start at the feet")
        if self.i.cod != self.apex or self.o.cod != self.apex:
            raise ValueError("cospan legs must land in the apex")


@dataclass(frozen=True)
class SquareFS:
    """A square of finite sets::

        S --top--> X
        |          |
       left      right
        v          v
        S' -bottom-> X'
    """

    top: FinFunction
    bottom: FinFunction
    left: FinFunction
    right: FinFunction

    def commutes(self) -> bool:
        if (self.top.dom != self.left.dom or self.top.cod != self.right.dom
                or self.left.cod != self.bottom.dom or self.right.cod != self.bottom.cod):
            return False
        return compose(self.top, self.right) == compose(self.left, self.bottom)


def is_pullback(sq: SquareFS) -> bool:
    """Fiberwise bijection test: for every ``s'``, ``top`` restricts to a
    bijection from the fiber of ``left`` over ``s'`` onto the fiber of ``right``
    over ``bottom(s')``."""
    if not sq.commutes():
        raise ValueError("square does not commute")
    for s2 in sq.bottom.dom:
        src = sq.left.fiber(s2)
        tgt = set(sq.right.fiber(sq.bottom(s2)))
        img = [sq.top(s) for s in src]
        if len(set(img)) != len(img) or set(img) != tgt:
            return False
    return True


def fiber_product(h: FinFunction, k: FinFunction) -> tuple[FinSet, FinFunction, FinFunction]:
    """Pullback of the cospan ``B -h-> D <-k- C``: the set of pairs ``(b, c)``
    with ``h(b) == k(c)``, labelled ``"b|c"``, with its two projections."""
    if h.cod != k.cod:
        raise ValueError("fiber product needs a common codomain")
    pairs = [(b, c) for b, c in itertools.product(h.dom, k.dom) if h(b) == k(c)]
    A = FinSet(f"{b}|{c}" for b, c in pairs)
    to_b = FinFunction(A, h.dom, [b for b, _ in pairs])
    to_c = FinFunction(A, k.dom, [c for _, c in pairs])
    return A, to_b, to_c


def pushforward_matrix(f: FinFunction) -> RationalMatrix:
    """``|cod| x |dom|`` 0/1 matrix with a single 1 per column, at row ``f(j)``."""
    rows = [[0] * len(f.dom) for _ in f.cod]
    for j, y in enumerate(f.table):
        rows[f.cod.index(y)][j] = 1
    return RationalMatrix(rows, shape=(len(f.cod), len(f.dom)))


def pullback_matrix(f: FinFunction) -> RationalMatrix:
    return pushforward_matrix(f).T
