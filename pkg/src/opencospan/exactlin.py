"""Exact dense linear algebra over the rationals.

Entries are :class:`fractions.Fraction`, so every operation is exact and
subspaces have a unique canonical form (the reduced row echelon form of any
spanning set). Desk scale only: matrices up to a few dozen rows and columns.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Rational",
    "RationalMatrix",
    "RationalSubspace",
    "to_rational",
    "format_rational",
    "rref",
    "rank",
    "kernel",
    "image",
    "intersect",
    "subspace_sum",
    "apply",
    "contains",
    "direct_sum",
]

Rational = Fraction


def to_rational(x) -> Fraction:
    """Parse ints, Fractions, and ``"p/q"`` strings. Floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (np.integer,)):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class RationalMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "shape")

    def __init__(self, rows: Iterable[Iterable], shape: tuple[int, int] | None = None):
        data = tuple(tuple(to_rational(x) for x in r) for r in rows)
        if shape is None:
            if not data:
                raise ValueError("shape required for a matrix with no rows")
            shape = (len(data), len(data[0]))
        m, n = shape
        if len(data) != m or any(len(r) != n for r in data):
            raise ValueError(f"ragged or mis-shaped rows for shape {shape}")
        object.__setattr__(self, "rows", data)
        object.__setattr__(self, "shape", (m, n))

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    @classmethod
    def zeros(cls, m: int, n: int) -> "RationalMatrix":
        return cls([[0] * n for _ in range(m)], shape=(m, n))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], shape=(n, n))

    @classmethod
    def _raw(cls, rows: tuple[tuple[Fraction, ...], ...], shape: tuple[int, int]) -> "RationalMatrix":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "rows", rows)
        object.__setattr__(obj, "shape", shape)
        return obj

    @property
    def nrows(self) -> int:
        return self.shape[0]

    @property
    def ncols(self) -> int:
        return self.shape[1]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"RationalMatrix[{self.shape[0]}x{self.shape[1]}]({body})"

    @property
    def T(self) -> "RationalMatrix":
        m, n = self.shape
        return RationalMatrix._raw(tuple(tuple(self.rows[i][j] for i in range(m)) for j in range(n)), (n, m))

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return RationalMatrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.shape)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix._raw(tuple(tuple(-a for a in r) for r in self.rows), self.shape)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def scale(self, c) -> "RationalMatrix":
        c = to_rational(c)
        return RationalMatrix._raw(tuple(tuple(c * a for a in r) for r in self.rows), self.shape)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.T.rows
        zero = Fraction(0)
        out = []
        for r in self.rows:
            nz = [(a, t) for a, t in enumerate(r) if t]
            out.append(tuple(sum((t * c[a] for a, t in nz), zero) for c in cols))
        return RationalMatrix._raw(tuple(out), (m, n))

    def apply_vector(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.ncols:
            raise ValueError("vector length does not match matrix columns")
        v = [to_rational(x) for x in v]
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    def hstack(self, *others: "RationalMatrix") -> "RationalMatrix":
        mats = (self,) + others
        m = self.nrows
        if any(M.nrows != m for M in mats):
            raise ValueError("hstack needs equal row counts")
        rows = tuple(sum((M.rows[i] for M in mats), ()) for i in range(m))
        return RationalMatrix._raw(rows, (m, sum(M.ncols for M in mats)))

    def vstack(self, *others: "RationalMatrix") -> "RationalMatrix":
        mats = (self,) + others
        n = self.ncols
        if any(M.ncols != n for M in mats):
            raise ValueError("vstack needs equal column counts")
        rows = sum((M.rows for M in mats), ())
        return RationalMatrix._raw(rows, (sum(M.nrows for M in mats), n))

    def block_diag(self, other: "RationalMatrix") -> "RationalMatrix":
        m1, n1 = self.shape
        m2, n2 = other.shape
        top = self.hstack(RationalMatrix.zeros(m1, n2))
        bot = RationalMatrix.zeros(m2, n1).hstack(other)
        return top.vstack(bot)

    def select_columns(self, cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix._raw(tuple(tuple(r[j] for j in cols) for r in self.rows), (self.nrows, len(cols)))

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float).reshape(self.shape)

    def to_json(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data, ncols: int | None = None) -> "RationalMatrix":
        if not data:
            return cls.zeros(0, ncols or 0)
        return cls(data)


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Gauss-Jordan elimination in place; returns (rows, pivot columns).

    Pivot choice: leftmost column with a nonzero entry at or below the current
    row, and the first such row.
    """
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        if lead != 1:
            rows[r] = [x / lead for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(M: RationalMatrix) -> RationalMatrix:
    """Reduced row echelon form (same shape, zero rows at the bottom)."""
    rows, _ = _rref_rows([list(r) for r in M.rows], M.ncols)
    return RationalMatrix._raw(tuple(tuple(r) for r in rows), M.shape)


def rank(M: RationalMatrix) -> int:
    _, piv = _rref_rows([list(r) for r in M.rows], M.ncols)
    return len(piv)


class RationalSubspace:
    """A subspace of ``Q^n`` stored by its canonical RREF basis (rows).

    Two subspaces are equal iff their bases are identical entrywise.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, spanning: Iterable[Iterable] = ()):
        vecs = [[to_rational(x) for x in v] for v in spanning]
        if any(len(v) != ambient_dim for v in vecs):
            raise ValueError(f"spanning vectors must have length {ambient_dim}")
        rows, piv = _rref_rows(vecs, ambient_dim)
        basis = RationalMatrix._raw(tuple(tuple(r) for r in rows[: len(piv)]), (len(piv), ambient_dim))
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("RationalSubspace is immutable")

    @classmethod
    def full(cls, n: int) -> "RationalSubspace":
        return cls(n, RationalMatrix.identity(n).rows)

    @classmethod
    def zero(cls, n: int) -> "RationalSubspace":
        return cls(n)

    @classmethod
    def from_matrix_rows(cls, M: RationalMatrix) -> "RationalSubspace":
        return cls(M.ncols, M.rows)

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def vectors(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.basis.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSubspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        vecs = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vectors)
        return f"RationalSubspace(dim={self.dim} in Q^{self.ambient_dim}: {vecs})"

    def __contains__(self, v) -> bool:
        return contains(self, RationalSubspace(self.ambient_dim, [v]))

    def permute(self, perm: Sequence[int]) -> "RationalSubspace":
        """Reorder coordinates: new coordinate ``k`` is old coordinate ``perm[k]``."""
        if sorted(perm) != list(range(self.ambient_dim)):
            raise ValueError("not a permutation of the coordinates")
        return RationalSubspace(self.ambient_dim, [[v[p] for p in perm] for v in self.vectors])

    def project(self, coords: Sequence[int]) -> "RationalSubspace":
        return RationalSubspace(len(coords), [[v[c] for c in coords] for v in self.vectors])

    def to_json(self) -> list[list[str]]:
        return self.basis.to_json()


def kernel(M: RationalMatrix) -> RationalSubspace:
    """``{v : M v = 0}``."""
    m, n = M.shape
    rows, piv = _rref_rows([list(r) for r in M.rows], n)
    free = [c for c in range(n) if c not in set(piv)]
    vecs = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -rows[r][fcol]
        vecs.append(v)
    return RationalSubspace(n, vecs)


def image(M: RationalMatrix) -> RationalSubspace:
    """Column space of ``M``."""
    return RationalSubspace(M.nrows, M.T.rows)


def _check_ambient(U: RationalSubspace, W: RationalSubspace) -> None:
    if U.ambient_dim != W.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {U.ambient_dim} vs {W.ambient_dim}")


def subspace_sum(U: RationalSubspace, W: RationalSubspace) -> RationalSubspace:
    _check_ambient(U, W)
    return RationalSubspace(U.ambient_dim, U.vectors + W.vectors)


def intersect(U: RationalSubspace, W: RationalSubspace) -> RationalSubspace:
    """``U & W`` via the kernel of ``[B_U^T | -B_W^T]``."""
    _check_ambient(U, W)
    n = U.ambient_dim
    if U.dim == 0 or W.dim == 0:
        return RationalSubspace.zero(n)
    stacked = U.basis.T.hstack(-W.basis.T)
    coeffs = kernel(stacked)
    a = [v[: U.dim] for v in coeffs.vectors]
    if not a:
        return RationalSubspace.zero(n)
    return RationalSubspace(n, (RationalMatrix(a) @ U.basis).rows)


def apply(M: RationalMatrix, U: RationalSubspace) -> RationalSubspace:
    """Image of ``U`` under the linear map ``M``."""
    if M.ncols != U.ambient_dim:
        raise ValueError(f"map with {M.ncols} columns applied to a subspace of Q^{U.ambient_dim}")
    if U.dim == 0:
        return RationalSubspace.zero(M.nrows)
    return RationalSubspace(M.nrows, (U.basis @ M.T).rows)


def contains(U: RationalSubspace, W: RationalSubspace) -> bool:
    """True iff ``W`` is a subspace of ``U``."""
    _check_ambient(U, W)
    if W.dim == 0:
        return True
    if W.dim > U.dim:
        return False
    piv = [next(j for j, x in enumerate(r) if x) for r in U.vectors]
    for w in W.vectors:
        w = list(w)
        for row, pc in zip(U.vectors, piv):
            c = w[pc]
            if c:
                w = [a - c * b for a, b in zip(w, row)]
        if any(w):
            return False
    return True


def direct_sum(U: RationalSubspace, W: RationalSubspace) -> RationalSubspace:
    """``U (+) W`` inside ``Q^(m+n)``, ``U`` in the leading block."""
    m, n = U.ambient_dim, W.ambient_dim
    zero_m = (Fraction(0),) * m
    zero_n = (Fraction(0),) * n
    vecs = [u + zero_n for u in U.vectors] + [zero_m + w for w in W.vectors]
    return RationalSubspace(m + n, vecs)
