"""Linear relations over Q and the squares between them.

A relation ``R : Q^m -/-> Q^n`` is stored as its graph, a subspace of
``Q^(m+n)`` whose first ``m`` coordinates are the domain block. Equality is
equality of canonical bases, so composition is strictly associative and unital.

Tensor convention: ``R1 (x) R2`` has domain ``Q^(m1+m2)`` and codomain
``Q^(n1+n2)``, i.e. graph coordinates ``(v1, v2 | w1, w2)``; the direct sum of
graphs ``(v1, w1, v2, w2)`` is shuffled into that order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactlin import (
    RationalMatrix,
    RationalSubspace,
    apply,
    contains,
    direct_sum,
    intersect,
)

__all__ = [
    "LinearRelation",
    "RelSquare",
    "identity_relation",
    "graph_of",
    "compose_relations",
    "tensor_relations",
    "is_rel_2morphism",
    "paste_vertical",
    "paste_horizontal",
    "direct_sum_maps",
]


@dataclass(frozen=True)
class LinearRelation:
    dom_dim: int
    cod_dim: int
    graph: RationalSubspace

    def __post_init__(self):
        if self.graph.ambient_dim != self.dom_dim + self.cod_dim:
            raise ValueError(
                f"graph lives in Q^{self.graph.ambient_dim}, expected Q^{self.dom_dim + self.cod_dim}")

    @property
    def dim(self) -> int:
        return self.graph.dim

    def converse(self) -> "LinearRelation":
        m, n = self.dom_dim, self.cod_dim
        perm = list(range(m, m + n)) + list(range(m))
        return LinearRelation(n, m, self.graph.permute(perm))

    def relates(self, v, w) -> bool:
        return tuple(v) + tuple(w) in self.graph

    def to_json(self) -> dict:
        return {"dom_dim": self.dom_dim, "cod_dim": self.cod_dim, "basis": self.graph.to_json()}

    @classmethod
    def from_json(cls, data) -> "LinearRelation":
        m, n = int(data["dom_dim"]), int(data["cod_dim"])
        return cls(m, n, RationalSubspace(m + n, data["basis"]))


def identity_relation(n: int) -> LinearRelation:
    return graph_of(RationalMatrix.identity(n))


def graph_of(M: RationalMatrix) -> LinearRelation:
    """The relation ``{(v, M v)}`` of a linear map ``Q^cols -> Q^rows``."""
    m, n = M.ncols, M.nrows
    vecs = [e + M.column(j) for j, e in enumerate(RationalMatrix.identity(m).rows)]
    return LinearRelation(m, n, RationalSubspace(m + n, vecs))


def compose_relations(R: LinearRelation, S: LinearRelation) -> LinearRelation:
    """``S . R = {(v, u) : (v, w) in R and (w, u) in S for some w}``."""
    if R.cod_dim != S.dom_dim:
        raise ValueError(f"cannot compose: R lands in Q^{R.cod_dim}, S starts at Q^{S.dom_dim}")
    v, w, u = R.dom_dim, R.cod_dim, S.cod_dim
    # both graphs pulled back into Q^v + Q^w + Q^u
    r_ext = direct_sum(R.graph, RationalSubspace.full(u))
    s_ext = direct_sum(RationalSubspace.full(v), S.graph)
    meet = intersect(r_ext, s_ext)
    keep = list(range(v)) + list(range(v + w, v + w + u))
    return LinearRelation(v, u, meet.project(keep))


def _tensor_perm(m1: int, n1: int, m2: int, n2: int) -> list[int]:
    # (v1, w1, v2, w2) -> (v1, v2, w1, w2)
    v1 = list(range(m1))
    w1 = list(range(m1, m1 + n1))
    v2 = list(range(m1 + n1, m1 + n1 + m2))
    w2 = list(range(m1 + n1 + m2, m1 + n1 + m2 + n2))
    return v1 + v2 + w1 + w2


def tensor_relations(R1: LinearRelation, R2: LinearRelation) -> LinearRelation:
    graph = direct_sum(R1.graph, R2.graph).permute(
        _tensor_perm(R1.dom_dim, R1.cod_dim, R2.dom_dim, R2.cod_dim))
    return LinearRelation(R1.dom_dim + R2.dom_dim, R1.cod_dim + R2.cod_dim, graph)


def direct_sum_maps(*maps: RationalMatrix) -> RationalMatrix:
    out = maps[0]
    for M in maps[1:]:
        out = out.block_diag(M)
    return out


@dataclass(frozen=True)
class RelSquare:
    """A frame ``top : V1 -/-> V2`` over ``bottom : W1 -/-> W2`` with vertical
    maps ``f : V1 -> W1`` and ``g : V2 -> W2``. It is a 2-morphism exactly when
    ``(f + g) top`` is contained in ``bottom``."""

    f: RationalMatrix
    g: RationalMatrix
    top: LinearRelation
    bottom: LinearRelation

    def __post_init__(self):
        if (self.f.ncols != self.top.dom_dim or self.g.ncols != self.top.cod_dim
                or self.f.nrows != self.bottom.dom_dim or self.g.nrows != self.bottom.cod_dim):
            raise ValueError("square frame dimensions do not match")


def is_rel_2morphism(sq: RelSquare) -> bool:
    return contains(sq.bottom.graph, apply(direct_sum_maps(sq.f, sq.g), sq.top.graph))


def paste_vertical(upper: RelSquare, lower: RelSquare) -> RelSquare:
    if upper.bottom != lower.top:
        raise ValueError("upper bottom edge differs from lower top edge")
    return RelSquare(lower.f @ upper.f, lower.g @ upper.g, upper.top, lower.bottom)


def paste_horizontal(left: RelSquare, right: RelSquare) -> RelSquare:
    if left.g != right.f:
        raise ValueError("shared vertical edge differs")
    return RelSquare(left.f, right.g,
                     compose_relations(left.top, right.top),
                     compose_relations(left.bottom, right.bottom))
