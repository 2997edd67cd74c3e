"""F_q-subspaces of extension fields and of pairs of field elements.

A subspace keeps its basis as ints in canonical reduced row echelon form
over F_q, so equal subspaces compare equal bit for bit.  Coordinates are the
base-``q`` digits of the int encoding; a pair ``(a, b)`` over a field ``F``
is encoded as ``a + b * |F|``, which puts the coordinates of ``a`` first.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _batch
from .errors import InputError
from .field_tower import (
    Field,
    FieldTower,
    element_from_json,
    element_to_json,
    from_digits,
    int_log,
    to_digits,
)

# --------------------------------------------------------------------------
# Dense linear algebra over F_q (q may be a prime power)


def rref_fq(rows: Sequence[Sequence[int]], Fq: Field) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form with leftmost pivots; zero rows dropped."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    if Fq.base is None:
        E, piv = _batch.rref_fp(rows, Fq.p)
        return E.tolist(), piv
    ncols = len(rows[0])
    M = rows
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        i = next((i for i in range(r, len(M)) if M[i][c]), None)
        if i is None:
            continue
        M[r], M[i] = M[i], M[r]
        inv = Fq.inv(M[r][c])
        M[r] = [Fq.mul(inv, x) for x in M[r]]
        for j in range(len(M)):
            if j != r and M[j][c]:
                f = M[j][c]
                M[j] = [Fq.sub(x, Fq.mul(f, y)) for x, y in zip(M[j], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace_fq(M: Sequence[Sequence[int]], Fq: Field, ncols: int | None = None) -> list[list[int]]:
    """Basis of ``{x : M x = 0}``."""
    if ncols is None:
        ncols = len(M[0]) if M else 0
    E, piv = rref_fq(M, Fq) if M else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for i, c in enumerate(piv):
            x[c] = Fq.neg(E[i][f])
        out.append(x)
    return out


def solve_fq(M: Sequence[Sequence[int]], rhs: Sequence[int], Fq: Field) -> list[int] | None:
    """One solution of ``M x = rhs`` or None."""
    ncols = len(M[0])
    aug = [list(r) + [b] for r, b in zip(M, rhs)]
    E, piv = rref_fq(aug, Fq)
    if ncols in piv:
        return None
    x = [0] * ncols
    for i, c in enumerate(piv):
        x[c] = E[i][ncols]
    return x


def rank_fq(rows: Sequence[Sequence[int]], Fq: Field) -> int:
    return len(rref_fq(rows, Fq)[1])


# --------------------------------------------------------------------------
# Ambient spaces


@dataclass(frozen=True)
class Ambient:
    """``field`` (or ``field**2`` when ``pair``) viewed as an F_q-space."""

    field: Field
    q: int
    pair: bool = False
    name: str = dc_field(default="field", compare=False)

    @classmethod
    def top(cls, tower: FieldTower) -> "Ambient":
        return cls(tower.top, tower.q, False, "top")

    @classmethod
    def mid_pairs(cls, tower: FieldTower) -> "Ambient":
        return cls(tower.mid, tower.q, True, "mid2")

    @classmethod
    def top_pairs(cls, tower: FieldTower) -> "Ambient":
        return cls(tower.top, tower.q, True, "top2")

    @property
    def Fq(self) -> Field:
        return self.field.subfield(self.q)

    @property
    def field_degree(self) -> int:
        return self.field.degree_over(self.q)

    @property
    def dim(self) -> int:
        return self.field_degree * (2 if self.pair else 1)

    @property
    def order(self) -> int:
        return self.field.order ** (2 if self.pair else 1)

    def join(self, a: int, b: int) -> int:
        return a + b * self.field.order

    def split(self, v: int) -> tuple[int, int]:
        b, a = divmod(v, self.field.order)
        return a, b

    def coords(self, v: int) -> list[int]:
        return to_digits(v, self.q, self.dim)

    def from_coords(self, cs: Sequence[int]) -> int:
        return from_digits(cs, self.q)

    def check(self, v: int) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.order:
            raise InputError(f"{v!r} is not a vector of {self.name}")
        return int(v)

    def map(self, fn, v: int) -> int:
        """Apply a map of the field componentwise."""
        if self.pair:
            a, b = self.split(v)
            return self.join(fn(a), fn(b))
        return fn(v)

    def mul(self, alpha: int, v: int) -> int:
        F = self.field
        return self.map(lambda x: F.mul(alpha, x), v)

    def add(self, u: int, v: int) -> int:
        F = self.field
        if self.pair:
            a, b = self.split(u)
            c, d = self.split(v)
            return self.join(F.add(a, c), F.add(b, d))
        return F.add(u, v)

    def combine(self, cs: Sequence[int], vectors: Sequence[int]) -> int:
        """``sum(c_i * v_i)`` with ``c_i`` in F_q."""
        out = 0
        for c, v in zip(cs, vectors):
            if c:
                out = self.add(out, self.mul(c, v))
        return out

    def element_to_json(self, v: int):
        if self.pair:
            a, b = self.split(v)
            return [element_to_json(self.field, a, self.q), element_to_json(self.field, b, self.q)]
        return element_to_json(self.field, v, self.q)

    def element_from_json(self, data) -> int:
        if self.pair:
            if not isinstance(data, list) or len(data) != 2:
                raise InputError(f"expected a pair, got {data!r}")
            return self.join(*(element_from_json(self.field, x, self.q) for x in data))
        return element_from_json(self.field, data, self.q)


# --------------------------------------------------------------------------
# Subspaces


class FqSubspace:
    __slots__ = ("ambient", "basis", "_pivots")

    def __init__(self, ambient: Ambient, basis: Sequence[int], pivots: Sequence[int]):
        # Use span() to construct; this assumes canonical input.
        self.ambient = ambient
        self.basis = tuple(basis)
        self._pivots = tuple(pivots)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def field(self) -> Field:
        return self.ambient.field

    @property
    def q(self) -> int:
        return self.ambient.q

    def __eq__(self, other):
        return isinstance(other, FqSubspace) and self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient.name, self.ambient.field.key, self.basis))

    def __repr__(self):
        return f"FqSubspace(dim={self.dim}, ambient={self.ambient.name}, basis={list(self.basis)})"

    def __len__(self):
        return self.q**self.dim

    def coord_matrix(self) -> list[list[int]]:
        return [self.ambient.coords(b) for b in self.basis]

    def _reduce(self, cs: list[int]) -> list[int]:
        Fq = self.ambient.Fq
        cs = list(cs)
        for b, c in zip(self.basis, self._pivots):
            f = cs[c]
            if f:
                row = self.ambient.coords(b)
                cs = [Fq.sub(x, Fq.mul(f, y)) for x, y in zip(cs, row)]
        return cs

    def __contains__(self, v: int) -> bool:
        return not any(self._reduce(self.ambient.coords(self.ambient.check(v))))

    def contains_subspace(self, other: "FqSubspace") -> bool:
        _same(self, other)
        return all(b in self for b in other.basis)

    def combination(self, cs: Sequence[int]) -> int:
        return self.ambient.combine(cs, self.basis)

    def elements(self) -> Iterator[int]:
        for i in range(self.q**self.dim):
            yield self.combination(to_digits(i, self.q, self.dim))

    def projective_points(self) -> list[int]:
        """One nonzero vector per 1-dim subspace: coefficient vectors whose
        first nonzero entry is 1, in increasing coefficient order."""
        if self.dim == 0:
            return []
        T = _batch.projective_transversal(self.q, self.dim)
        if self.q == self.ambient.field.p:
            p = self.q
            C = np.array(self.coord_matrix(), dtype=np.int64)
            D = _batch.digit_array(T, p, self.dim)
            return _batch.from_digit_array(D @ C % p, p).tolist()
        return [self.combination(to_digits(int(t), self.q, self.dim)) for t in T]

    # convenience wrappers
    def intersect(self, other):
        return intersect(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def __add__(self, other):
        return subspace_sum(self, other)

    def scale(self, alpha: int):
        return scale(self, alpha)

    def to_dict(self) -> dict:
        return {
            "ambient": self.ambient.name,
            "dim": self.dim,
            "basis": [self.ambient.element_to_json(b) for b in self.basis],
        }


def _same(A: FqSubspace, B: FqSubspace):
    if A.ambient != B.ambient:
        raise InputError("subspaces live in different ambients")


def span(ambient: Ambient, vectors: Iterable[int]) -> FqSubspace:
    vs = [ambient.check(v) for v in vectors]
    rows = [ambient.coords(v) for v in vs if v]
    E, piv = rref_fq(rows, ambient.Fq)
    return FqSubspace(ambient, [ambient.from_coords(r) for r in E], piv)


def zero_subspace(ambient: Ambient) -> FqSubspace:
    return FqSubspace(ambient, [], [])


def whole_space(ambient: Ambient) -> FqSubspace:
    return span(ambient, [ambient.q**i for i in range(ambient.dim)])


def subspace_from_dict(ambient: Ambient, d: dict) -> FqSubspace:
    if d.get("ambient", ambient.name) != ambient.name:
        raise InputError(f"subspace ambient {d.get('ambient')} does not match {ambient.name}")
    S = span(ambient, [ambient.element_from_json(x) for x in d["basis"]])
    if "dim" in d and S.dim != d["dim"]:
        raise InputError(f"basis spans dimension {S.dim}, file says {d['dim']}")
    return S


def subspace_sum(A: FqSubspace, B: FqSubspace) -> FqSubspace:
    _same(A, B)
    return span(A.ambient, A.basis + B.basis)


def intersect(A: FqSubspace, B: FqSubspace) -> FqSubspace:
    """Zassenhaus: reduce ``[a | a]`` and ``[b | 0]`` rows together."""
    _same(A, B)
    amb = A.ambient
    if A.dim == 0 or B.dim == 0:
        return zero_subspace(amb)
    N = amb.dim
    rows = [amb.coords(a) * 2 for a in A.basis] + [amb.coords(b) + [0] * N for b in B.basis]
    E, piv = rref_fq(rows, amb.Fq)
    inter = [r[N:] for r, c in zip(E, piv) if c >= N]
    out = span(amb, [amb.from_coords(r) for r in inter])
    assert A.dim + B.dim == out.dim + subspace_sum(A, B).dim
    return out


def scale(A: FqSubspace, alpha: int) -> FqSubspace:
    if alpha == 0:
        raise InputError("cannot scale by 0")
    return span(A.ambient, [A.ambient.mul(alpha, b) for b in A.basis])


def apply_frobenius(A: FqSubspace, i: int) -> FqSubspace:
    """Image under ``x -> x**(q**i)`` (componentwise on pairs)."""
    F = A.field
    return span(A.ambient, [A.ambient.map(lambda x: F.frob(x, A.q, i), b) for b in A.basis])


def apply_automorphism(A: FqSubspace, j: int) -> FqSubspace:
    """Image under ``x -> x**(p**j)``; the result is again an F_q-space."""
    F = A.field
    return span(A.ambient, [A.ambient.map(lambda x: F.frob(x, F.p, j), b) for b in A.basis])


def product_space(A: FqSubspace, B: FqSubspace) -> FqSubspace:
    _same(A, B)
    if A.ambient.pair:
        raise InputError("products are defined for subspaces of a field")
    F = A.field
    return span(A.ambient, [F.mul(a, b) for a in A.basis for b in B.basis])


def fp_rows(A: FqSubspace) -> np.ndarray:
    """Flattened F_p-basis of ``A`` (F_q-basis times an F_p-basis of F_q)."""
    if A.ambient.pair:
        raise InputError("expected a subspace of a field")
    F, p = A.field, A.field.p
    h = int_log(A.q, p)
    rows = [F.flat(F.mul(p**j, b)) for b in A.basis for j in range(h)]
    return np.array(rows, dtype=np.int64).reshape(len(rows), F.prime_degree)


def residue_ranks(V: FqSubspace, W: FqSubspace, alphas) -> np.ndarray:
    """For each ``alpha``: ``dim(alpha W + V) - dim V`` over F_q.

    Hence ``dim(V & alpha W) = dim W - rank`` and ``alpha W <= V`` iff the
    rank is zero.  Vectorised over the ``alphas`` array.
    """
    _same(V, W)
    F, p = V.field, V.field.p
    N = F.prime_degree
    h = int_log(V.q, p)
    alphas = np.asarray(alphas, dtype=np.int64)
    if W.dim == 0:
        return np.zeros(len(alphas), dtype=np.int64)
    Red = _batch.reduction_matrix(fp_rows(V), p, N) if V.dim else np.eye(N, dtype=np.int64)
    K = np.stack([_batch.mult_matrix(F, F.mul(p**j, w)) @ Red % p for w in W.basis for j in range(h)])
    out = np.empty(len(alphas), dtype=np.int64)
    for s in range(0, len(alphas), _batch.CHUNK):
        X = _batch.digit_array(alphas[s : s + _batch.CHUNK], p, N)
        G = np.einsum("bn,inm->bim", X, K) % p
        out[s : s + _batch.CHUNK] = _batch.batched_rank(G, p)
    return out // h


def normalize_projective(F: Field, q: int, x: int) -> int:
    """Representative of ``x F_q^*`` whose lowest nonzero F_q-digit is 1."""
    if x == 0:
        return 0
    y = x
    while y % q == 0:
        y //= q
    return F.mul(F.inv(y % q), x)


def normalize_projective_array(F: Field, q: int, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    if len(xs) == 0:
        return xs
    n = F.degree_over(q)
    D = _batch.digit_array(xs, q, n)
    nz = D != 0
    lead = D[np.arange(len(xs)), np.argmax(nz, axis=1)]
    if q == F.p:
        inv = _batch.inverse_table(q)
        return _batch.from_digit_array(D * inv[lead][:, None] % q, q)
    out = xs.copy()
    p, N = F.p, F.prime_degree
    Fq = F.subfield(q)
    for d in range(2, q):
        sel = lead == d
        if sel.any():
            M = _batch.mult_matrix(F, Fq.inv(d))
            out[sel] = _batch.from_digit_array(_batch.digit_array(xs[sel], p, N) @ M % p, p)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def subfield_generator(F: Field, q: int, t: int) -> int:
    """A generator of the multiplicative group of ``F_{q^t}`` inside ``F``."""
    g = F.primitive_element()
    return F.pow(g, (F.order - 1) // (q**t - 1))


def stabilizer_field_degree(A: FqSubspace) -> int:
    if A.ambient.pair:
        raise InputError("stabilizer degree is defined for subspaces of a field")
    if A.dim == 0:
        raise InputError("the zero subspace is stable under everything")
    F, q = A.field, A.q
    for t in sorted(divisors(A.ambient.field_degree), reverse=True):
        if t == 1 or scale(A, subfield_generator(F, q, t)) == A:
            return t
    return 1


def subfield_subspace(ambient: Ambient, order: int) -> FqSubspace:
    """The chain subfield of the given order as a subspace of the ambient."""
    return span(ambient, [ambient.q**i for i in range(int_log(order, ambient.q))])


__all__ = [
    "Ambient",
    "FqSubspace",
    "apply_automorphism",
    "apply_frobenius",
    "divisors",
    "intersect",
    "normalize_projective",
    "normalize_projective_array",
    "nullspace_fq",
    "residue_ranks",
    "fp_rows",
    "product_space",
    "rank_fq",
    "rref_fq",
    "scale",
    "solve_fq",
    "span",
    "stabilizer_field_degree",
    "subfield_generator",
    "subfield_subspace",
    "subspace_from_dict",
    "subspace_sum",
    "whole_space",
    "zero_subspace",
]
