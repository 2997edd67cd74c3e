"""Linearized q-polynomials ``f(x) = sum f_i x**(q**i)`` over a finite field."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _batch
from .errors import InputError
from .field_tower import Field, element_from_json, element_to_json, int_log
from .fq_linear import Ambient, FqSubspace, nullspace_fq, span


@dataclass(frozen=True)
class LinearizedPoly:
    field: Field
    q: int
    coeffs: tuple[int, ...]
    name: str = "field"

    def __post_init__(self):
        cs = list(self.coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(int(c) for c in cs))

    @classmethod
    def monomial(cls, field: Field, q: int, i: int, coeff: int = 1, name: str = "field"):
        return cls(field, q, (0,) * i + (coeff,), name)

    @classmethod
    def from_terms(cls, field: Field, q: int, terms: Mapping[int, int], name: str = "field"):
        size = max(terms, default=-1) + 1
        cs = [0] * size
        for i, c in terms.items():
            cs[i] = field.add(cs[i], c)
        return cls(field, q, tuple(cs), name)

    @property
    def qdeg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        """Degree of the field over F_q."""
        return self.field.degree_over(self.q)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _like(self, coeffs):
        return LinearizedPoly(self.field, self.q, tuple(coeffs), self.name)

    def _check(self, other: "LinearizedPoly"):
        if self.field != other.field or self.q != other.q:
            raise InputError("polynomials over different fields")

    def evaluate(self, x: int, field: Field | None = None) -> int:
        """Evaluate at ``x``; ``field`` may be any chain extension of ours."""
        F = self.field if field is None else field
        if field is not None and self.field.order not in (f.order for f in F.chain()):
            raise InputError("evaluation field does not contain the coefficient field")
        if not 0 <= x < F.order:
            raise InputError(f"{x} is not an element of {F!r}")
        acc, xp = 0, x
        for c in self.coeffs:
            if c:
                acc = F.add(acc, F.mul(c, xp))
            xp = F.pow(xp, self.q)
        return acc

    __call__ = evaluate

    def add(self, other: "LinearizedPoly") -> "LinearizedPoly":
        self._check(other)
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return self._like(F.add(x, y) for x, y in zip(a, b))

    def scale(self, c: int) -> "LinearizedPoly":
        """``c * f(x)``."""
        return self._like(self.field.mul(c, x) for x in self.coeffs)

    def neg(self) -> "LinearizedPoly":
        return self._like(self.field.neg(x) for x in self.coeffs)

    def sub(self, other: "LinearizedPoly") -> "LinearizedPoly":
        return self.add(other.neg())

    def compose(self, other: "LinearizedPoly") -> "LinearizedPoly":
        """``f(g(x))``: ``f_i x^{q^i} o g_j x^{q^j} = f_i g_j^{q^i} x^{q^{i+j}}``."""
        self._check(other)
        F, q = self.field, self.q
        if self.is_zero() or other.is_zero():
            return self._like(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, fi in enumerate(self.coeffs):
            if fi:
                for j, gj in enumerate(other.coeffs):
                    if gj:
                        out[i + j] = F.add(out[i + j], F.mul(fi, F.pow(gj, q**i)))
        return self._like(out)

    __add__ = add
    __sub__ = sub
    __matmul__ = compose

    def reduce_mod(self, d: int | None = None) -> "LinearizedPoly":
        """Fold exponents modulo ``d`` (default: the field degree)."""
        d = self.degree if d is None else d
        out = [0] * min(d, len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            out[i % d] = self.field.add(out[i % d], c)
        return self._like(out)

    def frobenius_coeffs(self, j: int, r: int | None = None) -> "LinearizedPoly":
        """Apply ``c -> c**(r**j)`` to every coefficient (``r`` defaults to q)."""
        r = self.q if r is None else r
        return self._like(self.field.frob(c, r, j) for c in self.coeffs)

    # -- linear algebra ------------------------------------------------------
    def ambient(self) -> Ambient:
        return Ambient(self.field, self.q, False, self.name)

    def matrix(self) -> list[list[int]]:
        """Row ``i`` holds the F_q-coordinates of ``f(q**i)``."""
        amb = self.ambient()
        return [amb.coords(self.evaluate(self.q**i)) for i in range(amb.dim)]

    def kernel(self) -> FqSubspace:
        if self.is_zero():
            raise InputError("the zero polynomial has the whole field as kernel")
        amb = self.ambient()
        rows = self.matrix()
        MT = [list(col) for col in zip(*rows)]
        K = nullspace_fq(MT, amb.Fq, amb.dim)
        out = span(amb, [amb.from_coords(c) for c in K])
        reduced = self.reduce_mod()
        if not reduced.is_zero():
            assert out.dim <= reduced.qdeg
        return out

    def rank(self) -> int:
        return self.degree - self.kernel().dim

    def image(self) -> FqSubspace:
        amb = self.ambient()
        return span(amb, [self.evaluate(self.q**i) for i in range(amb.dim)])

    def to_dict(self) -> dict:
        return {
            "coeff_field": self.name,
            "coeffs": [element_to_json(self.field, c, self.q) for c in self.coeffs],
        }

    def __repr__(self):
        terms = [f"{c}*x^q^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"LinearizedPoly({' + '.join(terms) or '0'})"


def poly_from_dict(field: Field, q: int, d: dict) -> LinearizedPoly:
    return LinearizedPoly(
        field, q, tuple(element_from_json(field, c, q) for c in d["coeffs"]), d.get("coeff_field", "field")
    )


def graph_subspace(f: LinearizedPoly) -> FqSubspace:
    """``U_f = {(x, f(x))}`` as a subspace of pairs."""
    amb = Ambient(f.field, f.q, True, "mid2" if f.name == "mid" else f"{f.name}2")
    return span(amb, [amb.join(f.q**i, f.evaluate(f.q**i)) for i in range(f.degree)])


def subspace_polynomial(V: FqSubspace) -> LinearizedPoly:
    """Monic polynomial of q-degree ``dim V`` whose kernel is ``V``."""
    if V.ambient.pair:
        raise InputError("subspace polynomials are defined for subspaces of a field")
    F, q = V.field, V.q
    f = LinearizedPoly(F, q, (1,), V.ambient.name)
    for b in V.basis:
        c = F.pow(f.evaluate(b), q - 1)
        fq = LinearizedPoly(F, q, (0,) + tuple(F.pow(x, q) for x in f.coeffs), f.name)
        f = fq.sub(f.scale(c))
    for b in V.basis:
        assert f.evaluate(b) == 0
    return f


def s_set(f: LinearizedPoly, x0: int) -> FqSubspace:
    """``{lam : lam * (x0, f(x0)) in U_f}``, the kernel of
    ``lam -> f(lam x0) - lam f(x0)``."""
    if x0 == 0:
        raise InputError("x0 must be nonzero")
    F = f.field
    fx0 = f.evaluate(x0)
    g = lambda lam: F.sub(f.evaluate(F.mul(lam, x0)), F.mul(lam, fx0))
    amb = f.ambient()
    rows = [amb.coords(g(f.q**i)) for i in range(amb.dim)]
    MT = [list(col) for col in zip(*rows)]
    K = nullspace_fq(MT, amb.Fq, amb.dim)
    return span(amb, [amb.from_coords(c) for c in K])


def _s_operator_stack(f: LinearizedPoly) -> np.ndarray:
    """``L[j]`` is the F_p-matrix of ``x0 -> f(p^j x0) - p^j f(x0)``."""
    F, p = f.field, f.field.p
    N = F.prime_degree
    fb = [f.evaluate(p**r) for r in range(N)]
    L = np.zeros((N, N, N), dtype=np.int64)
    for j in range(N):
        lam = p**j
        for r in range(N):
            v = F.sub(f.evaluate(F.mul(lam, p**r)), F.mul(lam, fb[r]))
            L[j, r] = F.flat(v)
    return L


def s_set_dims(f: LinearizedPoly, xs: Sequence[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """F_q-dimensions of ``s_set(f, x0)`` for many ``x0`` at once.

    Defaults to a transversal of the nonzero classes modulo F_q^*.  Returns
    ``(xs, dims)``.
    """
    F, p = f.field, f.field.p
    N = F.prime_degree
    h = int_log(f.q, p)
    if xs is None:
        xs = _batch.projective_transversal(f.q, f.degree)
    xs = np.asarray(xs, dtype=np.int64)
    L = _s_operator_stack(f)
    X = _batch.digit_array(xs, p, N)
    dims = np.empty(len(xs), dtype=np.int64)
    for s in range(0, len(xs), _batch.CHUNK):
        G = np.einsum("br,jrt->bjt", X[s : s + _batch.CHUNK], L) % p
        dims[s : s + _batch.CHUNK] = N - _batch.batched_rank(G, p)
    return xs, dims // h


def s_set_lambdas(f: LinearizedPoly, xs: Sequence[int]) -> np.ndarray:
    """For each ``x0`` some ``lam`` in ``s_set(f, x0)`` outside F_q (0 if none)."""
    F, p = f.field, f.field.p
    N = F.prime_degree
    h = int_log(f.q, p)
    xs = np.asarray(xs, dtype=np.int64)
    L = _s_operator_stack(f)
    out = np.zeros(len(xs), dtype=np.int64)
    pw = _batch.powers(p, N)
    for s in range(0, len(xs), _batch.CHUNK):
        X = _batch.digit_array(xs[s : s + _batch.CHUNK], p, N)
        # lam (digits c) is in the set iff c @ G = 0, i.e. G^T c = 0
        G = np.einsum("br,jrt->btj", X, L) % p
        E, piv = _batch.batched_rref(G, p)
        for b in range(len(X)):
            pivots = [c for c in piv[b] if c >= 0]
            free = [c for c in range(h, N) if c not in pivots]
            if not free:
                continue
            fc = free[0]
            vec = np.zeros(N, dtype=np.int64)
            vec[fc] = 1
            for i, c in enumerate(pivots):
                vec[c] = -E[b, i, fc] % p
            out[s + b] = int(vec @ pw)
    return out


def is_scattered(f: LinearizedPoly) -> tuple[bool, int | None]:
    """``(True, None)`` or ``(False, x0)`` with ``dim s_set(f, x0) > 1``."""
    xs, dims = s_set_dims(f)
    bad = np.nonzero(dims > 1)[0]
    if len(bad):
        return False, int(xs[bad[0]])
    return True, None


# --------------------------------------------------------------------------
# Compact text syntax:  "x^q + d*x^q^3",  "g^5*x^q^2 - x",  "[1,2,0,0]*x"

_TERM = re.compile(r"^(?:(?P<coef>[^*]+)\*)?x(?:\^\{?q(?:\^(?P<exp>\d+))?\}?)?$")


def parse_coefficient(text: str, field: Field, q: int, names: Mapping[str, int] | None = None) -> int:
    text = text.strip()
    names = names or {}
    if text in names:
        return names[text]
    m = re.fullmatch(r"g\^(-?\d+)", text)
    if m:
        return field.pow(field.primitive_element(), int(m.group(1)))
    if text.startswith("["):
        import json

        return element_from_json(field, json.loads(text), q)
    if re.fullmatch(r"-?\d+", text):
        return field.scalar(int(text))
    raise InputError(f"cannot parse coefficient {text!r}")


def parse_polynomial(
    text: str, field: Field, q: int, names: Mapping[str, int] | None = None, name: str = "field"
) -> LinearizedPoly:
    """Parse a sum of terms ``c*x^q^i`` (``c`` optional; ``x^q`` means i=1)."""
    s = text.replace(" ", "")
    if not s:
        raise InputError("empty polynomial")
    parts = re.split(r"(?<![\[,^])(?=[+-])", s)
    terms: dict[int, int] = {}
    for part in parts:
        if not part:
            continue
        sign = 1
        while part and part[0] in "+-":
            sign = -sign if part[0] == "-" else sign
            part = part[1:]
        m = _TERM.match(part)
        if not m:
            raise InputError(f"cannot parse term {part!r}")
        exp = 0
        if "q" in part.split("*")[-1]:
            exp = int(m.group("exp")) if m.group("exp") else 1
        c = parse_coefficient(m.group("coef"), field, q, names) if m.group("coef") else 1
        if sign < 0:
            c = field.neg(c)
        terms[exp] = field.add(terms.get(exp, 0), c)
    return LinearizedPoly.from_terms(field, q, terms, name)
