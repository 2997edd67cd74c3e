"""Sidon space constructions together with the expectation their governing
rule predicts.

Every builder returns a :class:`Construction`.  ``expected`` is ``"yes"``,
``"no"`` or ``"unknown"``, derived only from hypotheses that are re-checked
here; ``rule`` names the statement the expectation rests on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import _batch
from .errors import InputError, PreconditionError
from .field_tower import Field, FieldTower, extension_field, lex_least_irreducible
from .fq_linear import (
    Ambient,
    FqSubspace,
    intersect,
    residue_ranks,
    solve_fq,
    span,
)
from .linpoly import LinearizedPoly, graph_subspace, is_scattered
from .sidon_core import (
    ORBIT_CAP,
    SidonVerdict,
    check_sidon_orbit,
    gamma_degree,
    intersection_dims,
    nontrivial_transversal,
    v_subspace,
)

YES, NO, UNKNOWN = "yes", "no", "unknown"


@dataclass
class Construction:
    family: str
    params: dict
    subspace: FqSubspace
    expected: str
    rule: str
    tower: FieldTower | None = None
    poly: LinearizedPoly | None = None
    poly_expected: str | None = None
    extra: dict = field(default_factory=dict)

    def verify(self, cap: int = ORBIT_CAP) -> SidonVerdict:
        return check_sidon_orbit(self.subspace, cap)

    def provenance(self, verdict: SidonVerdict | None = None) -> dict:
        out = {
            "family": self.family,
            "params": self.params,
            "governing_rule": self.rule,
            "expected": self.expected,
            "verified": None if verdict is None else verdict.is_sidon,
        }
        if self.poly_expected is not None:
            out["polynomial_expected"] = self.poly_expected
        return out


def norm_to(F: Field, x: int, big: int, small: int) -> int:
    """Norm from the subfield of order ``big`` to the one of order ``small``."""
    return F.pow(x, (big - 1) // (small - 1))


def _mid_poly(tower: FieldTower, terms: dict[int, int]) -> LinearizedPoly:
    """Polynomial over the middle field with exponents folded modulo k."""
    k = tower.k
    f = LinearizedPoly.from_terms(tower.mid, tower.q, terms, "mid")
    return f.reduce_mod(k) if f.qdeg >= k else f


def _check_gamma(tower: FieldTower, gamma: int | None) -> int:
    g = tower.gamma if gamma is None else gamma
    if not 0 <= g < tower.top.order:
        raise InputError("gamma is not an element of the top field")
    if g < tower.mid.order:
        raise PreconditionError("gamma lies in the middle field")
    return g


# --------------------------------------------------------------------------
# coset form


def build_coset_form(tower: FieldTower, U_or_f, gamma: int | None = None) -> FqSubspace:
    """``{u + v gamma : (u, v) in U}``, or ``{u + f(u) gamma}`` for a polynomial."""
    g = _check_gamma(tower, gamma)
    U = graph_subspace(U_or_f) if isinstance(U_or_f, LinearizedPoly) else U_or_f
    return v_subspace(U, g, tower)


def _coset_coords(tower: FieldTower, g: int, x: int):
    T, M = tower.top, tower.mid
    k, q = tower.k, tower.q
    amb = Ambient.top(tower)
    basis = [q**i for i in range(k)]
    rows = [amb.coords(b) for b in basis] + [amb.coords(T.mul(b, g)) for b in basis]
    MT = [list(c) for c in zip(*rows)]
    sol = solve_fq(MT, amb.coords(x), tower.base)
    if sol is None:
        return None
    u = amb.from_coords(sol[:k])
    v = amb.from_coords(sol[k:])
    return u, v


def extract_pair_form(V: FqSubspace, tower: FieldTower, gamma: int | None = None):
    """Recover ``U`` (and ``f`` when ``U`` is a graph) from ``V = V_{U,gamma}``."""
    g = _check_gamma(tower, gamma)
    amb2 = Ambient.mid_pairs(tower)
    pairs = []
    for x in V.basis:
        uv = _coset_coords(tower, g, x)
        if uv is None:
            raise InputError("V is not contained in F_{q^k} + gamma F_{q^k}")
        pairs.append(amb2.join(*uv))
    U = span(amb2, pairs)
    k, q, M = tower.k, tower.q, tower.mid
    if U.dim != k:
        return U, None
    vertical = span(amb2, [amb2.join(0, q**i) for i in range(k)])
    if intersect(U, vertical).dim:
        return U, None
    # f(b_i) for the F_q-basis b_i = q**i of F_{q^k}
    us = [amb2.split(w)[0] for w in U.basis]
    vs = [amb2.split(w)[1] for w in U.basis]
    Uc = [M.digits(u, q) if k > 1 else [u] for u in us]
    images = []
    for i in range(k):
        target = [1 if j == i else 0 for j in range(k)]
        c = solve_fq([list(col) for col in zip(*Uc)], target, tower.base)
        images.append(M.sum(M.mul(ci, v) for ci, v in zip(c, vs)))
    basis = [q**i for i in range(k)]
    moore = [[M.frob(b, q, j) for j in range(k)] for b in basis]
    coeffs = solve_fq(moore, images, M)
    f = LinearizedPoly(M, q, tuple(coeffs), "mid")
    assert all(f.evaluate(b) == y for b, y in zip(basis, images))
    return U, f


# --------------------------------------------------------------------------
# polynomial families


def table1_polynomial(tower: FieldTower, row: str, s: int = 1, delta: int | None = None) -> LinearizedPoly:
    """Known scattered polynomials over the middle field, with their conditions
    re-checked.  Rows are ``i`` .. ``vi``."""
    k, q, M = tower.k, tower.q, tower.mid
    Q = M.order
    if delta is not None and not 0 <= delta < Q:
        raise InputError("delta must be an element of the middle field")
    if row in ("ii", "iii", "iv", "v", "vi") and delta is None:
        raise InputError(f"row {row} needs delta")
    if row == "i":
        if gcd(s, k) != 1:
            raise PreconditionError("gcd(s, k) must be 1")
        return _mid_poly(tower, {s: 1})
    if row == "ii":
        if gcd(s, k) != 1:
            raise PreconditionError("gcd(s, k) must be 1")
        if norm_to(M, delta, Q, q) == 1:
            raise PreconditionError("the norm of delta over F_q must differ from 1")
        return _mid_poly(tower, {s: 1, s * (k - 1): delta})
    if row == "iii":
        if k % 2 or q % 2 == 0:
            raise PreconditionError("needs k = 2*ell and q odd")
        l = k // 2
        if gcd(s, l) != 1:
            raise PreconditionError("gcd(s, ell) must be 1")
        if norm_to(M, delta, Q, q**l) != M.neg(1):
            raise PreconditionError("the norm of delta over F_{q^ell} must be -1")
        terms: dict[int, int] = {}
        for e, c in (
            (s, 1),
            (s * (l - 1), 1),
            (s * (l + 1), M.pow(delta, q**l + 1)),
            (s * (2 * l - 1), M.pow(delta, 1 - q ** (2 * l - 1))),
        ):
            terms[e % k] = M.add(terms.get(e % k, 0), c)
        return _mid_poly(tower, terms)
    if row == "iv":
        if k != 6 or q <= 4:
            raise PreconditionError("needs k = 6 and q > 4")
        return _mid_poly(tower, {1: 1, 4: delta})
    if row == "v":
        if k != 6 or q % 2 == 0:
            raise PreconditionError("needs k = 6 and q odd")
        if M.add(M.mul(delta, delta), delta) != 1:
            raise PreconditionError("delta must satisfy delta^2 + delta = 1")
        return _mid_poly(tower, {1: 1, 3: 1, 5: delta})
    if row == "vi":
        if k != 8 or q % 2 == 0:
            raise PreconditionError("needs k = 8 and q odd")
        if M.mul(delta, delta) != M.neg(1):
            raise PreconditionError("delta must satisfy delta^2 = -1")
        return _mid_poly(tower, {1: 1, 5: delta})
    raise InputError(f"unknown row {row!r}")


def table1_delta(tower: FieldTower, row: str) -> int:
    """Smallest delta meeting the algebraic condition of rows v and vi."""
    M = tower.mid
    cond = {
        "v": lambda d: M.add(M.mul(d, d), d) == 1,
        "vi": lambda d: M.mul(d, d) == M.neg(1),
        "iii": lambda d: norm_to(M, d, M.order, tower.q ** (tower.k // 2)) == M.neg(1),
    }[row]
    for d in range(1, M.order):
        if cond(d):
            return d
    raise PreconditionError(f"no delta satisfies the row {row} condition")


def _poly_to_subspace_expectation(tower: FieldTower, poly_expected: str) -> str:
    if poly_expected == NO:
        return NO
    if poly_expected == YES and tower.ell > 2:
        return YES
    return UNKNOWN


def coset_poly(tower: FieldTower, f: LinearizedPoly, gamma: int | None = None,
               poly_expected: str = UNKNOWN, rule: str = "none", family: str = "coset_poly",
               params: dict | None = None) -> Construction:
    g = _check_gamma(tower, gamma)
    V = build_coset_form(tower, f, g)
    exp = _poly_to_subspace_expectation(tower, poly_expected)
    if exp != poly_expected and poly_expected == YES:
        rule = f"{rule}; quadratic top extension leaves it open"
    return Construction(family, dict(params or {}, gamma=g), V, exp, rule, tower, f, poly_expected)


def scattered_family(tower: FieldTower, row: str, s: int = 1, delta: int | None = None,
                     gamma: int | None = None) -> Construction:
    f = table1_polynomial(tower, row, s, delta)
    if row == "iv":
        ok, _ = is_scattered(f)
        pe = YES if ok else UNKNOWN
        rule = "scattered-implies-sidon (scatteredness checked directly)"
    else:
        pe, rule = YES, "scattered-implies-sidon"
    return coset_poly(tower, f, gamma, pe, rule, "table1", {"row": row, "s": s, "delta": delta})


def binomial_expectation(tower: FieldTower, i: int, j: int, delta: int) -> tuple[str, str]:
    """Expectation for ``x^{q^i} + delta x^{q^j}`` being a Sidon space polynomial."""
    k, q, M = tower.k, tower.q, tower.mid
    t = gcd(k, j - i)
    if t == 1:
        return YES, "binomial-coprime-gap"
    if gcd(i, t) != 1:
        return NO, "binomial-subfield-linear"
    s = (j - i) // t
    if gcd(s, k) != 1:
        return UNKNOWN, "binomial-gap-outside-hypotheses"
    if norm_to(M, delta, M.order, q**t) == M.pow(M.neg(1), k // t):
        return NO, "binomial-kernel-subfield-coset"
    f = _mid_poly(tower, {i: 1, j: delta})
    ok, _ = is_scattered(f)
    return (YES if ok else NO), "binomial-sidon-iff-scattered"


def binomial_family(tower: FieldTower, i: int, j: int, delta: int, gamma: int | None = None) -> Construction:
    k = tower.k
    if not 1 <= i < j < k:
        raise InputError("need 1 <= i < j < k")
    if not 0 < delta < tower.mid.order:
        raise InputError("delta must be a nonzero element of the middle field")
    f = _mid_poly(tower, {i: 1, j: delta})
    pe, rule = binomial_expectation(tower, i, j, delta)
    return coset_poly(tower, f, gamma, pe, rule, "binomial", {"i": i, "j": j, "delta": delta})


def lunardon_polverino(tower: FieldTower, s: int, delta: int, gamma: int | None = None) -> Construction:
    """``x^{q^s} + delta x^{q^{s(k-1)}}``: Sidon polynomial iff the norm of delta
    differs from 1 or k is odd."""
    k, q, M = tower.k, tower.q, tower.mid
    if gcd(s, k) != 1:
        raise PreconditionError("gcd(s, k) must be 1")
    f = _mid_poly(tower, {s: 1, s * (k - 1): delta})
    pe = YES if (norm_to(M, delta, M.order, q) != 1 or k % 2) else NO
    return coset_poly(tower, f, gamma, pe, "lunardon-polverino-norm-or-odd", "lunardon_polverino",
                      {"s": s, "delta": delta})


def monomial_quadratic(tower: FieldTower, s: int = 1, gamma: int | None = None) -> Construction:
    """``V_{x^{q^s}, gamma}`` in a quadratic top extension; Sidon iff the norm of
    gamma over F_q differs from 1."""
    if tower.ell != 2:
        raise PreconditionError("needs n = 2k")
    if gcd(s, tower.k) != 1:
        raise PreconditionError("gcd(s, k) must be 1")
    g = _check_gamma(tower, gamma)
    T = tower.top
    f = _mid_poly(tower, {s: 1})
    V = build_coset_form(tower, f, g)
    N = norm_to(T, g, T.order, tower.q)
    if N != 1:
        exp, rule = YES, "quadratic-norm-criterion"
    elif tower.k >= 3:
        exp, rule = NO, "quadratic-norm-criterion (square dimension bound)"
    else:
        # the square bound behind the negative direction needs dimension >= 3
        exp, rule = UNKNOWN, "quadratic-norm-criterion (negative direction needs k >= 3)"
    return Construction("monomial_quadratic", {"s": s, "gamma": g, "norm": N}, V, exp, rule, tower, f, YES)


# --------------------------------------------------------------------------
# direct sums in an extension of the top field


def check_mutual_condition(V1: FqSubspace, V2: FqSubspace, cap: int = ORBIT_CAP):
    """``dim(V1 & alpha V2) <= 1`` for every nonzero alpha; ``(ok, alpha)``."""
    if V1.ambient != V2.ambient:
        raise InputError("subspaces live in different ambients")
    T = _batch.projective_transversal(V1.q, V1.ambient.field_degree)
    if len(T) > cap:
        from .errors import BudgetExceeded

        raise BudgetExceeded("mutual condition scan", len(T), cap)
    dims = V2.dim - residue_ranks(V1, V2, T)
    bad = np.nonzero(dims >= 2)[0]
    if len(bad):
        return False, int(T[bad[0]])
    return True, None


def extension_for_direct_sum(top: Field, ratio: int) -> Field:
    return extension_field(top, lex_least_irreducible(top, ratio))


def direct_sum(V1: FqSubspace, V2: FqSubspace, ratio: int = 3, ext: Field | None = None,
               delta: int | None = None, verify_inputs: bool = True, cap: int = ORBIT_CAP) -> Construction:
    """``{v1 + delta v2}`` inside an extension of degree ``ratio`` > 2."""
    if ratio <= 2:
        raise PreconditionError("the extension degree must exceed 2")
    if V1.ambient != V2.ambient or V1.ambient.pair:
        raise InputError("V1 and V2 must be subspaces of the same field")
    F, q = V1.field, V1.q
    if V1 == V2:
        # V & alpha V is a line for some alpha outside F_q, and then
        # T + delta T sits in both the sum and its alpha-multiple
        alphas = nontrivial_transversal(V1.ambient)
        dims = intersection_dims(V1, alphas)
        hit = np.nonzero(dims == 1)[0]
        alpha = int(alphas[hit[0]]) if len(hit) else None
        raise PreconditionError("V1 = V2: V + delta V is never Sidon", {"alpha": alpha})
    if verify_inputs:
        for name, V in (("V1", V1), ("V2", V2)):
            verdict = check_sidon_orbit(V, cap)
            if not verdict:
                raise PreconditionError(f"{name} is not Sidon", verdict.witness)
        ok, alpha = check_mutual_condition(V1, V2, cap)
        if not ok:
            raise PreconditionError("mutual condition fails", {"alpha": alpha})
    E = extension_for_direct_sum(F, ratio) if ext is None else ext
    d = F.order if delta is None else delta
    amb = Ambient(E, q, False, "ext")
    vecs = list(V1.basis) + [E.mul(d, v) for v in V2.basis]
    V = span(amb, vecs)
    if V.dim != V1.dim + V2.dim:
        raise PreconditionError("delta does not separate the summands")
    params = {"ratio": ratio, "ext_poly": list(getattr(E, "modulus", ())), "delta": d}
    return Construction("direct_sum", params, V, YES, "direct-sum", None, extra={"V1": V1, "V2": V2})


def pseudoregulus(tower: FieldTower, gamma: int, w: int = 1) -> FqSubspace:
    """``{x + x^q gamma w : x in F_{q^k}}``."""
    T, q = tower.top, tower.q
    return span(Ambient.top(tower), [T.add(b, T.mul(T.mul(T.pow(b, q), gamma), w)) for b in (q**i for i in range(tower.k))])


def double_pseudoregulus(tower: FieldTower, ratio: int = 3, gamma: int | None = None, w: int | None = None,
                         cap: int = ORBIT_CAP) -> Construction:
    """Direct sum of ``{x + x^q gamma}`` and ``{y + y^q gamma w}``, ``w`` primitive
    in F_{q^k}.

    When the top extension is quadratic, extra conditions on gamma live
    outside this package; with ``gamma`` unset the smallest gamma for which
    both summands are Sidon and mutually compatible is used, and the family
    expectation is left unknown.
    """
    if tower.q < 3:
        raise PreconditionError("needs q >= 3")
    M = tower.mid
    w = M.primitive_element() if w is None else w
    if M.order_of(w) != M.order - 1:
        raise PreconditionError("w must be primitive in F_{q^k}")
    if gamma is None and tower.ell == 2:
        for g in range(tower.mid.order, tower.top.order):
            V1, V2 = pseudoregulus(tower, g), pseudoregulus(tower, g, w)
            if check_sidon_orbit(V1, cap) and check_sidon_orbit(V2, cap) and check_mutual_condition(V1, V2, cap)[0]:
                gamma = g
                break
        else:
            raise PreconditionError("no gamma makes the summands compatible")
    g = _check_gamma(tower, gamma)
    V1, V2 = pseudoregulus(tower, g), pseudoregulus(tower, g, w)
    c = direct_sum(V1, V2, ratio, cap=cap)
    c.family = "double_pseudoregulus"
    c.params.update(gamma=g, w=w)
    c.tower = tower
    if tower.ell == 2:
        c.expected = UNKNOWN
        c.rule = "double-pseudoregulus (quadratic case: gamma conditions external; direct-sum hypotheses verified)"
    else:
        c.rule = "double-pseudoregulus"
    return c
