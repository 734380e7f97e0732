"""Open graphs, open k-graphs, and open Petri nets with rates.

Each is a structured cospan: discrete feet mapped into the vertices (species)
of a decorated apex. Composition glues the apexes along the shared foot by a
pushout of vertex sets and a disjoint union of edges (transitions).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

from .exactlin import format_rational, to_rational
from .finset import (
    FinFunction,
    FinSet,
    compose,
    coproduct,
    coproduct_map,
    identity,
    pushout,
)
from .openmarkov import mediating_map

__all__ = [
    "Multiset",
    "multiset",
    "Graph",
    "PetriRates",
    "OpenNet",
    "NetSquare",
    "KindMismatch",
    "SizeLimitExceeded",
    "apply_monoid_map",
    "compose_open_net",
    "tensor_open_net",
    "identity_open_net",
    "empty_open_net",
    "check_net_square",
    "identity_square",
    "vertical_compose",
    "horizontal_compose",
    "are_isomorphic",
    "MAX_ISO_VERTICES",
]

MAX_ISO_VERTICES = 9

# sorted (species, count) pairs with positive counts
Multiset = tuple[tuple[str, int], ...]


class KindMismatch(ValueError):
    pass


class SizeLimitExceeded(ValueError):
    pass


def multiset(coeffs: Mapping[str, int] | Multiset = ()) -> Multiset:
    items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
    acc: Counter = Counter()
    for sp, n in items:
        n = int(n)
        if n < 0:
            raise ValueError(f"negative multiplicity {n} for {sp}")
        acc[str(sp)] += n
    return tuple(sorted((sp, n) for sp, n in acc.items() if n))


def apply_monoid_map(f: FinFunction, m: Multiset) -> Multiset:
    """Push multiset coefficients forward along ``f``."""
    return multiset([(f(sp), n) for sp, n in m])


@dataclass(frozen=True)
class Graph:
    """Directed multigraph; with ``rate`` set on every edge it is a k-graph."""

    nodes: FinSet
    edges: FinSet
    src: FinFunction
    tgt: FinFunction
    rate: Optional[tuple[tuple[str, Fraction], ...]] = None

    def __post_init__(self):
        for leg in (self.src, self.tgt):
            if leg.dom != self.edges or leg.cod != self.nodes:
                raise ValueError("src/tgt must map edges to nodes")
        if self.rate is not None:
            rates = dict(self.rate)
            if set(rates) != set(self.edges.elements):
                raise ValueError("a k-graph needs a rate on every edge")
            if any(r <= 0 for r in rates.values()):
                raise ValueError("k-graph rates must be positive")
            object.__setattr__(self, "rate", tuple((e, to_rational(rates[e])) for e in self.edges))

    @classmethod
    def build(cls, nodes, edges: Mapping[str, tuple], rated: bool = False) -> "Graph":
        """``edges`` maps a name to ``(src, tgt)`` or ``(src, tgt, rate)``."""
        N = FinSet(nodes)
        E = FinSet(edges)
        src = FinFunction(E, N, {e: v[0] for e, v in edges.items()})
        tgt = FinFunction(E, N, {e: v[1] for e, v in edges.items()})
        rate = tuple((e, to_rational(v[2])) for e, v in edges.items()) if rated else None
        return cls(N, E, src, tgt, rate)

    @property
    def vertices(self) -> FinSet:
        return self.nodes

    @property
    def arrows(self) -> FinSet:
        return self.edges

    @property
    def kind(self) -> str:
        return "graph" if self.rate is None else "kgraph"

    def rate_of(self, e: str) -> Optional[Fraction]:
        return None if self.rate is None else dict(self.rate)[e]

    def arrow_key(self, e: str, vmap: FinFunction | None = None):
        s, t = self.src(e), self.tgt(e)
        if vmap is not None:
            s, t = vmap(s), vmap(t)
        return (s, t, self.rate_of(e))

    def to_json(self) -> dict:
        edges = []
        for e in self.edges:
            d = {"name": e, "src": self.src(e), "tgt": self.tgt(e)}
            if self.rate is not None:
                d["rate"] = format_rational(self.rate_of(e))
            edges.append(d)
        return {"nodes": self.nodes.to_json(), "edges": edges}

    @classmethod
    def from_json(cls, data) -> "Graph":
        rated = any("rate" in e for e in data["edges"])
        edges = {e["name"]: (e["src"], e["tgt"], e.get("rate")) for e in data["edges"]}
        return cls.build(data["nodes"], edges, rated=rated)


@dataclass(frozen=True)
class PetriRates:
    species: FinSet
    transitions: FinSet
    src: tuple[tuple[str, Multiset], ...]
    tgt: tuple[tuple[str, Multiset], ...]
    rate: tuple[tuple[str, Fraction], ...]

    def __init__(self, species: FinSet, transitions: FinSet, src: Mapping, tgt: Mapping, rate: Mapping):
        for name, table in (("src", src), ("tgt", tgt), ("rate", rate)):
            if set(table) != set(transitions.elements):
                raise ValueError(f"{name} must be given for every transition")
        s = tuple((t, multiset(src[t])) for t in transitions)
        g = tuple((t, multiset(tgt[t])) for t in transitions)
        for _, m in s + g:
            bad = [sp for sp, _ in m if sp not in species]
            if bad:
                raise ValueError(f"unknown species {bad}")
        r = tuple((t, to_rational(rate[t])) for t in transitions)
        if any(x < 0 for _, x in r):
            raise ValueError("transition rates must be nonnegative")
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "src", s)
        object.__setattr__(self, "tgt", g)
        object.__setattr__(self, "rate", r)

    @property
    def vertices(self) -> FinSet:
        return self.species

    @property
    def arrows(self) -> FinSet:
        return self.transitions

    @property
    def kind(self) -> str:
        return "petri"

    def inputs_of(self, t: str) -> Multiset:
        return dict(self.src)[t]

    def outputs_of(self, t: str) -> Multiset:
        return dict(self.tgt)[t]

    def rate_of(self, t: str) -> Fraction:
        return dict(self.rate)[t]

    def arrow_key(self, t: str, vmap: FinFunction | None = None):
        s, g = self.inputs_of(t), self.outputs_of(t)
        if vmap is not None:
            s, g = apply_monoid_map(vmap, s), apply_monoid_map(vmap, g)
        return (s, g, self.rate_of(t))

    def to_json(self) -> dict:
        return {
            "species": self.species.to_json(),
            "transitions": [
                {"name": t, "src": dict(self.inputs_of(t)), "tgt": dict(self.outputs_of(t)),
                 "rate": format_rational(self.rate_of(t))}
                for t in self.transitions
            ],
        }

    @classmethod
    def from_json(cls, data) -> "PetriRates":
        ts = data["transitions"]
        return cls(FinSet(data["species"]), FinSet(t["name"] for t in ts),
                   {t["name"]: t["src"] for t in ts}, {t["name"]: t["tgt"] for t in ts},
                   {t["name"]: t["rate"] for t in ts})


Decoration = Union[Graph, PetriRates]


def _relabel(d: Decoration, vmap: FinFunction, amap: FinFunction):
    """Push a decoration forward along a vertex map; ``amap`` renames arrows
    injectively."""
    if isinstance(d, Graph):
        src = {amap(e): vmap(d.src(e)) for e in d.edges}
        tgt = {amap(e): vmap(d.tgt(e)) for e in d.edges}
        rate = None if d.rate is None else tuple((amap(e), r) for e, r in d.rate)
        return src, tgt, rate
    src = {amap(t): apply_monoid_map(vmap, d.inputs_of(t)) for t in d.transitions}
    tgt = {amap(t): apply_monoid_map(vmap, d.outputs_of(t)) for t in d.transitions}
    rate = {amap(t): d.rate_of(t) for t in d.transitions}
    return src, tgt, rate


def _assemble(kind: str, vertices: FinSet, arrows: FinSet, parts) -> Decoration:
    src: dict = {}
    tgt: dict = {}
    rate: dict = {}
    rated = True
    for s, t, r in parts:
        src.update(s)
        tgt.update(t)
        if r is None:
            rated = False
        else:
            rate.update(dict(r))
    if kind == "petri":
        return PetriRates(vertices, arrows, src, tgt, rate)
    return Graph(vertices, arrows, FinFunction(arrows, vertices, src), FinFunction(arrows, vertices, tgt),
                 tuple((e, rate[e]) for e in arrows) if kind == "kgraph" and rated else None)


def _discrete(kind: str, vertices: FinSet) -> Decoration:
    E = FinSet()
    if kind == "petri":
        return PetriRates(vertices, E, {}, {}, {})
    empty = FinFunction(E, vertices, [])
    return Graph(vertices, E, empty, empty, () if kind == "kgraph" else None)


@dataclass(frozen=True)
class OpenNet:
    left_foot: FinSet
    right_foot: FinSet
    decoration: Decoration
    i: FinFunction
    o: FinFunction

    def __post_init__(self):
        V = self.decoration.vertices
        if self.i.dom != self.left_foot or self.i.cod != V:
            raise ValueError("left leg must map the left foot into the vertices")
        if self.o.dom != self.right_foot or self.o.cod != V:
            raise ValueError("right leg must map the right foot into the vertices")

    @property
    def kind(self) -> str:
        return self.decoration.kind

    @property
    def vertices(self) -> FinSet:
        return self.decoration.vertices

    @property
    def arrows(self) -> FinSet:
        return self.decoration.arrows

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "left_foot": self.left_foot.to_json(),
            "right_foot": self.right_foot.to_json(),
            "decoration": self.decoration.to_json(),
            "i": self.i.mapping,
            "o": self.o.mapping,
        }

    @classmethod
    def from_json(cls, data) -> "OpenNet":
        kind = data.get("kind") or ("petri" if "species" in data["decoration"] else "graph")
        dec = PetriRates.from_json(data["decoration"]) if kind == "petri" else Graph.from_json(data["decoration"])
        if kind == "kgraph" and dec.rate is None:
            dec = Graph(dec.nodes, dec.edges, dec.src, dec.tgt, ())
        L, R = FinSet(data["left_foot"]), FinSet(data["right_foot"])
        return cls(L, R, dec, FinFunction(L, dec.vertices, data["i"]), FinFunction(R, dec.vertices, data["o"]))


def _same_kind(M: OpenNet, N: OpenNet) -> None:
    if M.kind != N.kind:
        raise KindMismatch(f"cannot combine a {M.kind} with a {N.kind}")


def _compose_with_legs(M: OpenNet, N: OpenNet):
    _same_kind(M, N)
    if M.right_foot != N.left_foot:
        raise ValueError(f"boundary mismatch: {M.right_foot} vs {N.left_foot}")
    V, j, k = pushout(M.o, N.i)
    A, ea, eb = coproduct(M.arrows, N.arrows)
    dec = _assemble(M.kind, V, A, [_relabel(M.decoration, j, ea), _relabel(N.decoration, k, eb)])
    net = OpenNet(M.left_foot, N.right_foot, dec, compose(M.i, j), compose(N.o, k))
    return net, j, k, ea, eb


def compose_open_net(M: OpenNet, N: OpenNet) -> OpenNet:
    return _compose_with_legs(M, N)[0]


def tensor_open_net(M: OpenNet, N: OpenNet) -> OpenNet:
    _same_kind(M, N)
    V, va, vb = coproduct(M.vertices, N.vertices)
    A, ea, eb = coproduct(M.arrows, N.arrows)
    dec = _assemble(M.kind, V, A, [_relabel(M.decoration, va, ea), _relabel(N.decoration, vb, eb)])
    L, _, _ = coproduct(M.left_foot, N.left_foot)
    R, _, _ = coproduct(M.right_foot, N.right_foot)
    i = FinFunction(L, V, [va(x) for x in M.i.table] + [vb(x) for x in N.i.table])
    o = FinFunction(R, V, [va(x) for x in M.o.table] + [vb(x) for x in N.o.table])
    return OpenNet(L, R, dec, i, o)


def identity_open_net(S: FinSet, kind: str = "graph") -> OpenNet:
    return OpenNet(S, S, _discrete(kind, S), identity(S), identity(S))


def empty_open_net(kind: str = "graph") -> OpenNet:
    return identity_open_net(FinSet(), kind)


@dataclass(frozen=True)
class NetSquare:
    """A map of open nets: foot maps ``f``, ``g`` and a structure-preserving
    map of decorations (``vertex_map``, ``arrow_map``)."""

    source: OpenNet
    target: OpenNet
    f: FinFunction
    g: FinFunction
    vertex_map: FinFunction
    arrow_map: FinFunction


def check_net_square(sq: NetSquare) -> bool:
    M, N = sq.source, sq.target
    if M.kind != N.kind:
        return False
    if (sq.f.dom != M.left_foot or sq.f.cod != N.left_foot or sq.g.dom != M.right_foot
            or sq.g.cod != N.right_foot or sq.vertex_map.dom != M.vertices
            or sq.vertex_map.cod != N.vertices or sq.arrow_map.dom != M.arrows
            or sq.arrow_map.cod != N.arrows):
        return False
    if compose(M.i, sq.vertex_map) != compose(sq.f, N.i):
        return False
    if compose(M.o, sq.vertex_map) != compose(sq.g, N.o):
        return False
    for a in M.arrows:
        if M.decoration.arrow_key(a, sq.vertex_map) != N.decoration.arrow_key(sq.arrow_map(a)):
            return False
    return True


def identity_square(M: OpenNet) -> NetSquare:
    return NetSquare(M, M, identity(M.left_foot), identity(M.right_foot), identity(M.vertices), identity(M.arrows))


def vertical_compose(sq1: NetSquare, sq2: NetSquare) -> NetSquare:
    if sq1.target != sq2.source:
        raise ValueError("vertical composition: bottom of the first is not the top of the second")
    return NetSquare(sq1.source, sq2.target, compose(sq1.f, sq2.f), compose(sq1.g, sq2.g),
                     compose(sq1.vertex_map, sq2.vertex_map), compose(sq1.arrow_map, sq2.arrow_map))


def horizontal_compose(sq1: NetSquare, sq2: NetSquare) -> NetSquare:
    if sq1.g != sq2.f:
        raise ValueError("horizontal composition needs a shared middle foot map")
    top, j, k, _, _ = _compose_with_legs(sq1.source, sq2.source)
    bot, j2, k2, _, _ = _compose_with_legs(sq1.target, sq2.target)
    vmap = mediating_map([j, k], [compose(sq1.vertex_map, j2), compose(sq2.vertex_map, k2)])
    amap = coproduct_map(sq1.arrow_map, sq2.arrow_map)
    return NetSquare(top, bot, sq1.f, sq2.g, vmap, amap)


def _vertex_signature(d: Decoration, v: str):
    out, inn = [], []
    for a in d.arrows:
        s, t, r = d.arrow_key(a)
        if isinstance(d, Graph):
            if s == v:
                out.append((t == v, r))
            if t == v:
                inn.append((s == v, r))
        else:
            cs, ct = dict(s).get(v, 0), dict(t).get(v, 0)
            if cs:
                out.append((cs, ct, r))
            if ct:
                inn.append((ct, cs, r))
    key = lambda x: repr(x)
    return (tuple(sorted(out, key=key)), tuple(sorted(inn, key=key)))


def are_isomorphic(M: OpenNet, N: OpenNet) -> Optional[NetSquare]:
    """Search for an isomorphism of open nets that is the identity on feet.

    Brute force over vertex bijections with signature pruning; the legs pin
    boundary vertices. Capped at ``MAX_ISO_VERTICES`` vertices.
    """
    if M.left_foot != N.left_foot or M.right_foot != N.right_foot:
        raise ValueError("isomorphism search needs identical feet")
    if M.kind != N.kind:
        return None
    n = len(M.vertices)
    if max(n, len(N.vertices)) > MAX_ISO_VERTICES:
        raise SizeLimitExceeded(f"{max(n, len(N.vertices))} vertices exceeds the limit of {MAX_ISO_VERTICES}")
    if n != len(N.vertices) or len(M.arrows) != len(N.arrows):
        return None
    dm, dn = M.decoration, N.decoration
    sig_m = {v: _vertex_signature(dm, v) for v in M.vertices}
    sig_n = {v: _vertex_signature(dn, v) for v in N.vertices}
    if sorted(map(repr, sig_m.values())) != sorted(map(repr, sig_n.values())):
        return None

    forced: dict[str, str] = {}
    for leg_m, leg_n in ((M.i, N.i), (M.o, N.o)):
        for x in leg_m.dom:
            a, b = leg_m(x), leg_n(x)
            if forced.setdefault(a, b) != b:
                return None
    if len(set(forced.values())) != len(forced):
        return None
    if any(sig_m[a] != sig_n[b] for a, b in forced.items()):
        return None

    target_keys = Counter(dn.arrow_key(a) for a in dn.arrows)
    free = [v for v in M.vertices if v not in forced]
    # most constrained first: rarest signature
    sig_count = Counter(sig_n.values())
    free.sort(key=lambda v: sig_count[sig_m[v]])
    used = set(forced.values())
    assign = dict(forced)

    def arrows_match() -> Optional[FinFunction]:
        vmap = FinFunction(M.vertices, N.vertices, assign)
        keys = Counter(dm.arrow_key(a, vmap) for a in dm.arrows)
        if keys != target_keys:
            return None
        pool: dict = {}
        for a in dn.arrows:
            pool.setdefault(dn.arrow_key(a), []).append(a)
        table = {a: pool[dm.arrow_key(a, vmap)].pop(0) for a in dm.arrows}
        return FinFunction(M.arrows, N.arrows, table)

    def search(idx: int) -> Optional[FinFunction]:
        if idx == len(free):
            return arrows_match()
        v = free[idx]
        for w in N.vertices:
            if w in used or sig_n[w] != sig_m[v]:
                continue
            assign[v] = w
            used.add(w)
            found = search(idx + 1)
            if found is not None:
                return found
            used.discard(w)
            del assign[v]
        return None

    amap = search(0)
    if amap is None:
        return None
    sq = NetSquare(M, N, identity(M.left_foot), identity(M.right_foot),
                   FinFunction(M.vertices, N.vertices, assign), amap)
    assert check_net_square(sq)
    return sq
