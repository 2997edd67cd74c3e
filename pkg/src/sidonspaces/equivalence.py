"""Semilinear equivalence ``V = alpha * W^sigma`` of subspaces of a field.

Automorphisms are ``x -> x**(q**i)`` in linear mode and ``x -> x**(p**j)``
in semilinear mode.  For coset-form spaces ``V_{U,gamma}`` the search is
reduced to a 2x2 matrix over F_{q^k}: with ``A = [[c, d], [a, b]]`` acting on
row vectors, ``(w, w') A = (c w + a w', d w + b w')``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _batch
from .errors import BudgetExceeded, InputError
from .field_tower import Field, FieldTower, int_log, to_digits
from .fq_linear import (
    Ambient,
    FqSubspace,
    apply_automorphism,
    fp_rows,
    nullspace_fq,
    residue_ranks,
    scale,
    solve_fq,
    span,
)
from .linpoly import LinearizedPoly, graph_subspace
from .sidon_core import v_subspace

EQUIV_CAP = 2**24  # transversal size times automorphism count


@dataclass(frozen=True)
class EquivWitness:
    """``first = alpha * second^sigma`` with ``sigma = x -> x**(r**sigma_exp)``
    where ``r`` is p in wide mode and q otherwise.

    For coset-form witnesses ``matrix = (c, d, a, b)``, ``coset_sigma`` and
    ``lam`` record the data with ``V_{W,xi} = lam * V_{U,gamma}^coset_sigma``.
    """

    alpha: int
    sigma_exp: int
    wide: bool = False
    matrix: tuple | None = None
    lam: int | None = None
    coset_sigma: int | None = None

    def to_dict(self, F: Field | None = None) -> dict:
        out = {"alpha": self.alpha, "sigma_exp": self.sigma_exp, "wide": self.wide}
        if self.matrix is not None:
            out.update(matrix=[list(self.matrix[:2]), list(self.matrix[2:])], lam=self.lam,
                       coset_sigma=self.coset_sigma)
        return out


def automorphism_count(ambient: Ambient, wide: bool) -> int:
    F = ambient.field
    return F.prime_degree if wide else F.degree_over(ambient.q)


def _radix(ambient: Ambient, wide: bool) -> int:
    return ambient.field.p if wide else ambient.q


def apply_sigma(A: FqSubspace, e: int, wide: bool) -> FqSubspace:
    return apply_automorphism(A, e * (1 if wide else int_log(A.q, A.field.p)))


def validate_witness(V: FqSubspace, W: FqSubspace, w: EquivWitness) -> bool:
    return scale(apply_sigma(W, w.sigma_exp, w.wide), w.alpha) == V


def are_equivalent_bruteforce(V: FqSubspace, W: FqSubspace, mode: str = "linear",
                              cap: int = EQUIV_CAP) -> EquivWitness | None:
    """Search every automorphism, then every alpha class, for ``alpha W^sigma = V``."""
    if V.ambient != W.ambient or V.ambient.pair:
        raise InputError("subspaces must live in the same field")
    if mode not in ("linear", "semilinear"):
        raise InputError(f"unknown mode {mode!r}")
    if V.dim != W.dim:
        return None
    wide = mode == "semilinear"
    amb = V.ambient
    T = _batch.projective_transversal(amb.q, amb.field_degree)
    n_aut = automorphism_count(amb, wide)
    if len(T) * n_aut > cap:
        raise BudgetExceeded("equivalence search", len(T) * n_aut, cap)
    seen = set()
    for e in range(n_aut):
        Ws = apply_sigma(W, e, wide)
        if Ws in seen:
            continue
        seen.add(Ws)
        hits = np.nonzero(residue_ranks(V, Ws, T) == 0)[0]
        if len(hits):
            w = EquivWitness(int(T[hits[0]]), e, wide)
            assert validate_witness(V, W, w)
            return w
    return None


# --------------------------------------------------------------------------
# coset form


def _in_one_coset(V: FqSubspace, tower: FieldTower) -> bool:
    T = tower.top
    inv = T.inv(V.basis[0])
    return all(T.mul(inv, b) < tower.mid.order for b in V.basis)


def _pair_image(U: FqSubspace, fn) -> FqSubspace:
    amb = U.ambient
    out = []
    for w in U.basis:
        a, b = amb.split(w)
        out.append(amb.join(*fn(a, b)))
    return span(amb, out)


def pair_times_matrix(W: FqSubspace, A: tuple, field: Field) -> FqSubspace:
    """``W . A`` for ``A = (c, d, a, b)`` meaning rows ``[c, d]`` and ``[a, b]``."""
    c, d, a, b = A
    M = field
    return _pair_image(W, lambda w, w2: (M.add(M.mul(c, w), M.mul(a, w2)), M.add(M.mul(d, w), M.mul(b, w2))))


def validate_coset_witness(U, gamma, W, xi, tower: FieldTower, sigma: int, A: tuple, wide: bool = False) -> bool:
    """Re-check ``xi = (a + b g)/(c + d g)`` with ``g = gamma^sigma`` and
    ``U^sigma = W . A``."""
    T, M = tower.top, tower.mid
    r = tower.p if wide else tower.q
    c, d, a, b = A
    if M.sub(M.mul(c, b), M.mul(d, a)) == 0:
        return False
    gs = T.frob(gamma, r, sigma)
    den = T.add(c, T.mul(d, gs))
    if den == 0 or T.mul(xi, den) != T.add(a, T.mul(b, gs)):
        return False
    Us = _pair_image(U, lambda u, u2: (M.frob(u, r, sigma), M.frob(u2, r, sigma)))
    return Us == pair_times_matrix(W, A, M)


def coset_matrix_candidates(gamma_s: int, xi: int, tower: FieldTower):
    """All ``(c, d, a, b)`` over F_{q^k} with ``xi (c + d g) = a + b g``, nonzero."""
    T, q, k = tower.top, tower.q, tower.k
    amb = Ambient.top(tower)
    basis = [q**i for i in range(k)]
    # unknown order: c, d, a, b, each expanded over the F_q-basis of F_{q^k}
    cols = []
    for coef in (xi, T.mul(xi, gamma_s), T.neg(1), T.neg(gamma_s)):
        for e in basis:
            cols.append(amb.coords(T.mul(coef, e)))
    Mx = [list(r) for r in zip(*cols)]
    K = nullspace_fq(Mx, tower.base, 4 * k)
    Fq = tower.base
    for coeffs in itertools.product(range(q), repeat=len(K)):
        if not any(coeffs):
            continue
        vec = [0] * (4 * k)
        for c, kv in zip(coeffs, K):
            if c:
                vec = [Fq.add(x, Fq.mul(c, y)) for x, y in zip(vec, kv)]
        yield tuple(amb.from_coords(vec[i * k : (i + 1) * k]) for i in range(4))


def are_equivalent_coset_form(U: FqSubspace, gamma: int, W: FqSubspace, xi: int, tower: FieldTower,
                              mode: str = "linear", all_witnesses: bool = False):
    """Decide ``V_{U,gamma} ~ V_{W,xi}`` through the 2x2 matrix reduction.

    Returns a witness in the ``first = alpha * second^sigma`` convention with
    ``first = V_{U,gamma}``; or the list of every ``(sigma, A)`` when
    ``all_witnesses`` is set.
    """
    if U.dim != W.dim:
        return [] if all_witnesses else None
    M, T = tower.mid, tower.top
    for g in (gamma, xi):
        if g < M.order:
            raise InputError("gamma and xi must lie outside F_{q^k}")
    V1, V2 = v_subspace(U, gamma, tower), v_subspace(W, xi, tower)
    if _in_one_coset(V1, tower) or _in_one_coset(V2, tower):
        raise InputError("a space lies in a single multiplicative coset of F_{q^k}")
    wide = mode == "semilinear"
    r = tower.p if wide else tower.q
    n_aut = T.degree_over(r)
    found = []
    for s in range(n_aut):
        gs = T.frob(gamma, r, s)
        Us = _pair_image(U, lambda u, u2: (M.frob(u, r, s), M.frob(u2, r, s)))
        for A in coset_matrix_candidates(gs, xi, tower):
            c, d, a, b = A
            if M.sub(M.mul(c, b), M.mul(d, a)) == 0:
                continue
            if pair_times_matrix(W, A, M) != Us:
                continue
            lam = T.inv(T.add(c, T.mul(d, gs)))
            if all_witnesses:
                found.append((s, A))
                continue
            # V_{W,xi} = lam V1^s, so V1 = sigma^{-1}(lam^{-1}) V_{W,xi}^{sigma^{-1}}
            back = (-s) % n_aut
            alpha = T.frob(T.inv(lam), r, back)
            w = EquivWitness(alpha, back, wide, A, lam, s)
            assert validate_witness(V1, V2, w)
            return w
    return found if all_witnesses else None


def zhang_pair_subspace(tower: FieldTower, ell: int, a: int, b: int) -> FqSubspace:
    """``{(x, (x^{q^ell} + a x) b)}``."""
    M, q = tower.mid, tower.q
    amb = Ambient.mid_pairs(tower)
    vecs = []
    for x in (q**i for i in range(tower.k)):
        y = M.mul(M.add(M.frob(x, q, ell), M.mul(a, x)), b)
        vecs.append(amb.join(x, y))
    return span(amb, vecs)


# --------------------------------------------------------------------------
# subspace polynomials


def transform_subspace_polynomial(F: LinearizedPoly, lam: int, sigma: int, wide: bool = False) -> LinearizedPoly:
    """Monic polynomial with kernel ``lam * (ker F)^sigma``:
    coefficient ``i`` becomes ``lam^{q^k} sigma(F_i) lam^{-q^i}``."""
    if lam == 0:
        raise InputError("lambda must be nonzero")
    K = F.field
    q, k = F.q, F.qdeg
    r = K.p if wide else q
    lk = K.pow(lam, q**k)
    out = []
    for i, c in enumerate(F.coeffs):
        out.append(K.mul(K.mul(lk, K.frob(c, r, sigma)), K.pow(lam, -(q**i))))
    return LinearizedPoly(K, q, tuple(out), F.name)


def explicit_monomial_subspace_poly(tower: FieldTower, gamma: int | None = None) -> LinearizedPoly:
    """Closed-form polynomial (not monic) whose kernel is ``{u + u^q gamma}``."""
    T, q, k = tower.top, tower.q, tower.k
    g = tower.gamma if gamma is None else gamma
    if k < 2:
        raise InputError("needs k >= 2")
    if g < tower.mid.order:
        raise InputError("gamma must lie outside F_{q^k}")
    sign = lambda e: 1 if e % 2 == 0 else T.neg(1)
    gpow = lambda lo, hi: T.pow(g, sum(q**j for j in range(lo, hi + 1)))  # gamma^{q^lo + ... + q^hi}
    diff = T.sub(T.frob(g, q, k), g)
    delta = T.sub(1, T.mul(sign(k - 2), gpow(0, k - 1)))
    coeffs = [0] * (k + 1)
    coeffs[0] = T.neg(T.pow(delta, q))
    coeffs[1] = T.neg(diff)
    for i in range(2, k):
        coeffs[i] = T.mul(T.mul(sign(i), gpow(1, i - 1)), diff)
    coeffs[k] = delta
    return LinearizedPoly(T, q, tuple(coeffs), "top")


def monic(F: LinearizedPoly) -> LinearizedPoly:
    return F.scale(F.field.inv(F.coeffs[-1]))


def trinomial_search(V: FqSubspace) -> list[tuple[int, int, int]]:
    """All ``(ell, a, b)`` with ``ker(a x + b x^{q^ell} + x^{q^m}) = V``, ``m = dim V``,
    ``0 < ell < m``.  Solved as a linear system in ``(a, b)`` over the field."""
    K, q, m = V.field, V.q, V.dim
    out = []
    for ell in range(1, m):
        rows = [[v, K.frob(v, q, ell)] for v in V.basis]
        rhs = [K.neg(K.frob(v, q, m)) for v in V.basis]
        sol = solve_fq(rows, rhs, K)
        if sol is None:
            continue
        # the solution is unique when the two columns are independent
        null = nullspace_fq(rows, K, 2)
        if null:
            raise AssertionError("underdetermined trinomial system")
        out.append((ell, sol[0], sol[1]))
    return out


def _composed_coefficients(g: LinearizedPoly, gamma: int, tower: FieldTower, ell: int):
    """Folded coefficient vectors of ``x``, ``x^{q^ell}`` and ``x^{q^k}``
    composed with ``u + gamma g(u)``."""
    T, q, k = tower.top, tower.q, tower.k
    h = [0] * k
    h[0] = 1
    for i, c in enumerate(g.coeffs):
        h[i % k] = T.add(h[i % k], T.mul(gamma, c))

    def shifted(e):
        v = [0] * k
        for i, c in enumerate(h):
            if c:
                v[(i + e) % k] = T.add(v[(i + e) % k], T.frob(c, q, e))
        return v

    return shifted(0), shifted(ell), shifted(k)


def trinomial_obstruction(g: LinearizedPoly, gamma: int, tower: FieldTower) -> dict:
    """Certify that no monic ``a x + b x^{q^ell} + x^{q^k}`` has kernel ``V_{g,gamma}``.

    Two independent linear systems are solved for every ``ell``: the folded
    coefficients of the composition, and vanishing on a basis of the space.
    """
    T, k = tower.top, tower.k
    nz = [i for i, c in enumerate(g.coeffs) if c]
    if len(nz) != 2 or nz[0] == 0 or nz[1] >= k or g.coeffs[nz[0]] != 1:
        raise InputError("g must be x^{q^i} + delta x^{q^j} with 0 < i < j < k")
    if gamma < tower.mid.order:
        raise InputError("gamma must lie outside F_{q^k}")
    V = v_subspace(graph_subspace(g), gamma, tower)
    by_coeffs = []
    for ell in range(1, k):
        ca, cb, c0 = _composed_coefficients(g, gamma, tower, ell)
        sol = solve_fq([[x, y] for x, y in zip(ca, cb)], [T.neg(z) for z in c0], T)
        if sol is not None:
            by_coeffs.append((ell, sol[0], sol[1]))
    by_basis = trinomial_search(V)
    assert sorted(by_coeffs) == sorted(by_basis), "the two trinomial systems disagree"
    return {"obstructed": not by_basis, "solutions": by_basis, "ells_checked": k - 1}


def trinomial_bruteforce(V: FqSubspace, cap: int = 2**20) -> list[tuple[int, int, int]]:
    """Exhaustive ``(ell, a, b)`` search; only for tiny fields."""
    K, q, m = V.field, V.q, V.dim
    if (m - 1) * K.order**2 > cap:
        raise BudgetExceeded("trinomial brute force", (m - 1) * K.order**2, cap)
    out = []
    for ell in range(1, m):
        pw = [(v, K.frob(v, q, ell), K.frob(v, q, m)) for v in V.basis]
        for a in range(K.order):
            for b in range(K.order):
                if all(K.add(K.add(K.mul(a, x), K.mul(b, y)), z) == 0 for x, y, z in pw):
                    out.append((ell, a, b))
    return out


# --------------------------------------------------------------------------
# classification


def _least_multiple(V: FqSubspace, T: np.ndarray) -> int:
    """The ``alpha`` in ``T`` whose ``alpha V`` has the lex-least F_p echelon form."""
    F, p = V.field, V.field.p
    N = F.prime_degree
    mats = [_batch.mult_matrix(F, int(r)) for r in _batch.from_digit_array(fp_rows(V), p)]
    best_key, best = None, None
    for s in range(0, len(T), _batch.CHUNK):
        X = _batch.digit_array(T[s : s + _batch.CHUNK], p, N)
        G = np.stack([X @ Mr % p for Mr in mats], axis=1)
        R, _ = _batch.batched_rref(G, p)
        flat = R.reshape(len(R), -1)
        i = np.lexsort(flat.T[::-1])[0]
        key = tuple(flat[i])
        if best_key is None or key < best_key:
            best_key, best = key, int(T[s + i])
    return best


def orbit_canonical(V: FqSubspace, mode: str = "linear") -> tuple:
    """Canonical basis of the least member of ``{alpha V^sigma}``; equal for
    equivalent inputs."""
    wide = mode == "semilinear"
    amb = V.ambient
    T = _batch.projective_transversal(amb.q, amb.field_degree)
    best = None
    for e in range(automorphism_count(amb, wide)):
        Vs = apply_sigma(V, e, wide)
        b = scale(Vs, _least_multiple(Vs, T)).basis
        if best is None or b < best:
            best = b
    return best


def classify_inequivalent(instances: list[FqSubspace], mode: str = "linear", canonical: bool = True) -> list[dict]:
    """Union-find over pairwise brute-force equivalence."""
    n = len(instances)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = find(i), find(j)
            if ri == rj:
                continue
            if are_equivalent_bruteforce(instances[i], instances[j], mode) is not None:
                parent[max(ri, rj)] = min(ri, rj)
    classes: dict[int, list[int]] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    out = []
    for root, members in sorted(classes.items()):
        entry = {"members": members}
        if canonical:
            entry["representative"] = list(orbit_canonical(instances[root], mode))
        out.append(entry)
    return out
