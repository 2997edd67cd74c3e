import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sidonspaces.errors import InputError
from sidonspaces.field_tower import build_tower
from sidonspaces.fq_linear import (
    Ambient,
    apply_automorphism,
    apply_frobenius,
    intersect,
    normalize_projective,
    normalize_projective_array,
    nullspace_fq,
    product_space,
    rank_fq,
    residue_ranks,
    rref_fq,
    scale,
    solve_fq,
    span,
    stabilizer_field_degree,
    subfield_subspace,
    subspace_from_dict,
    subspace_sum,
    whole_space,
    zero_subspace,
)

T64 = build_tower(2, 1, 3, 2)
T4 = build_tower(2, 2, 2, 2)  # q = 4, field F_{4^4}


def elements_of(V):
    return set(V.elements())


def random_subspace(amb, dim, rng):
    return span(amb, [rng.randrange(1, amb.order) for _ in range(dim)])


def test_span_basics(ex_tower):
    amb = Ambient.top(ex_tower)
    assert span(amb, []).dim == 0
    assert span(amb, [7, ex_tower.top.mul(2, 7)]).dim == 1
    T = ex_tower.top
    V = span(amb, [T.add(u, T.mul(T.pow(u, 3), ex_tower.gamma)) for u in (1, 3, 9, 27)])
    assert V.dim == 4


@pytest.mark.parametrize("tower", [T64, T4], ids=["q2", "q4"])
def test_intersection_and_sum_against_element_sets(tower, rng):
    amb = Ambient.top(tower)
    for _ in range(25):
        A = random_subspace(amb, rng.randint(0, 3), rng)
        B = random_subspace(amb, rng.randint(0, 3), rng)
        I = intersect(A, B)
        assert elements_of(I) == elements_of(A) & elements_of(B)
        S = subspace_sum(A, B)
        assert S.dim + I.dim == A.dim + B.dim
        assert A.contains_subspace(I) and S.contains_subspace(A)


def test_trivial_identities(ex_tower, rng):
    amb = Ambient.top(ex_tower)
    T = ex_tower.top
    A = random_subspace(amb, 3, rng)
    Z = zero_subspace(amb)
    assert intersect(A, A) == A
    assert intersect(A, Z) == Z
    assert scale(A, 1) == A
    a = rng.randrange(1, T.order)
    assert scale(scale(A, a), T.inv(a)) == A
    assert apply_frobenius(A, ex_tower.n) == A
    assert apply_automorphism(A, 1) == apply_frobenius(A, 1)
    assert product_space(A, span(amb, [1])) == A
    with pytest.raises(InputError):
        scale(A, 0)


def test_membership_and_points(rng):
    amb = Ambient.top(T4)
    V = random_subspace(amb, 3, rng)
    els = elements_of(V)
    assert len(els) == 4**3
    pts = V.projective_points()
    assert len(pts) == (4**3 - 1) // 3
    assert len({normalize_projective(T4.top, 4, x) for x in pts}) == len(pts)
    assert all(x in V for x in pts)
    outside = next(x for x in range(amb.order) if x not in els)
    assert outside not in V


def test_normalize_projective_array_matches_scalar(rng):
    for tower, q in ((T64, 2), (T4, 4), (build_tower(3, 1, 2, 2), 3)):
        F = tower.top
        xs = np.array([rng.randrange(1, F.order) for _ in range(200)])
        fast = normalize_projective_array(F, q, xs)
        assert fast.tolist() == [normalize_projective(F, q, int(x)) for x in xs]
        # every F_q-multiple lands on the same representative
        Fq = F.subfield(q)
        for x in xs[:20]:
            for c in range(1, q):
                assert normalize_projective(F, q, F.mul(c, int(x))) == normalize_projective(F, q, int(x))


def test_residue_ranks_direct(ex_tower, rng):
    amb = Ambient.top(ex_tower)
    V = random_subspace(amb, 4, rng)
    W = random_subspace(amb, 2, rng)
    alphas = [rng.randrange(1, amb.order) for _ in range(30)]
    got = residue_ranks(V, W, alphas)
    for a, r in zip(alphas, got):
        assert r == subspace_sum(V, scale(W, a)).dim - V.dim


def test_linear_algebra_over_f4(rng):
    Fq = T4.base
    for _ in range(30):
        rows = [[rng.randrange(4) for _ in range(5)] for _ in range(3)]
        N = nullspace_fq(rows, Fq, 5)
        for x in N:
            for r in rows:
                assert Fq.sum(Fq.mul(a, b) for a, b in zip(r, x)) == 0
        assert len(N) + rank_fq(rows, Fq) == 5
        x0 = [rng.randrange(4) for _ in range(5)]
        rhs = [Fq.sum(Fq.mul(a, b) for a, b in zip(r, x0)) for r in rows]
        x = solve_fq(rows, rhs, Fq)
        assert [Fq.sum(Fq.mul(a, b) for a, b in zip(r, x)) for r in rows] == rhs
    E, piv = rref_fq([[0, 0], [0, 0]], Fq)
    assert piv == []


def test_stabilizer_degree(ex_tower):
    t = ex_tower
    amb = Ambient.top(t)
    assert stabilizer_field_degree(subfield_subspace(amb, t.mid.order)) == t.k
    T = t.top
    V = span(amb, [T.add(u, T.mul(T.pow(u, 3), t.gamma)) for u in (1, 3, 9, 27)])
    assert stabilizer_field_degree(V) == 1
    # x^{q^2} over F_{q^4}: V_{f,gamma} is an F_{q^2}-space
    W = span(amb, [T.add(u, T.mul(T.pow(u, 9), t.gamma)) for u in (1, 3, 9, 27)])
    assert stabilizer_field_degree(W) % 2 == 0
    assert stabilizer_field_degree(whole_space(amb)) == t.n


def test_pair_ambient_round_trip(ex_tower, rng):
    amb = Ambient.mid_pairs(ex_tower)
    U = random_subspace(amb, 3, rng)
    assert subspace_from_dict(amb, U.to_dict()) == U
    with pytest.raises(InputError):
        subspace_from_dict(Ambient.top(ex_tower), U.to_dict())


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 63), min_size=1, max_size=4), st.integers(1, 63))
def test_scale_is_a_bijection_on_elements(vecs, a):
    amb = Ambient.top(T64)
    V = span(amb, vecs)
    F = T64.top
    assert elements_of(scale(V, a)) == {F.mul(a, x) for x in elements_of(V)}
