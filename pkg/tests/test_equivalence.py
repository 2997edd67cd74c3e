import pytest

from sidonspaces.constructions import build_coset_form, norm_to, table1_polynomial
from sidonspaces.equivalence import (
    EquivWitness,
    apply_sigma,
    are_equivalent_bruteforce,
    are_equivalent_coset_form,
    classify_inequivalent,
    explicit_monomial_subspace_poly,
    monic,
    orbit_canonical,
    pair_times_matrix,
    transform_subspace_polynomial,
    trinomial_bruteforce,
    trinomial_obstruction,
    trinomial_search,
    validate_coset_witness,
    validate_witness,
    zhang_pair_subspace,
)
from sidonspaces.errors import BudgetExceeded, InputError
from sidonspaces.field_tower import build_tower
from sidonspaces.fq_linear import Ambient, apply_automorphism, apply_frobenius, scale, span
from sidonspaces.linpoly import LinearizedPoly, graph_subspace, subspace_polynomial
from sidonspaces.sidon_core import v_subspace


def random_subspace(amb, dim, rng):
    while True:
        V = span(amb, [rng.randrange(1, amb.order) for _ in range(dim)])
        if V.dim == dim:
            return V


def mono(t, s=1, c=1):
    return LinearizedPoly.monomial(t.mid, t.q, s, c, name="mid")


def test_identity_witness(t2_3_2, rng):
    V = random_subspace(Ambient.top(t2_3_2), 3, rng)
    w = are_equivalent_bruteforce(V, V)
    assert w is not None and validate_witness(V, V, w)


@pytest.mark.parametrize("mode", ["linear", "semilinear"])
def test_planted_witness_is_found(mode, rng):
    t = build_tower(2, 2, 2, 2)
    amb = Ambient.top(t)
    for _ in range(5):
        W = random_subspace(amb, 2, rng)
        alpha = rng.randrange(1, amb.order)
        V = scale(apply_frobenius(W, 1), alpha)
        w = are_equivalent_bruteforce(V, W, mode)
        assert w is not None and validate_witness(V, W, w)


def test_p_power_twist_needs_semilinear_mode():
    t = build_tower(2, 2, 2, 2)
    amb = Ambient.top(t)
    hits = 0
    for a in range(2, 60):
        W = span(amb, [1, a])
        V = apply_automorphism(W, 1)
        lin = are_equivalent_bruteforce(V, W, "linear")
        semi = are_equivalent_bruteforce(V, W, "semilinear")
        assert semi is not None and semi.wide
        hits += lin is None
    # some planes are genuinely moved off their F_q-linear class by x -> x^2
    assert hits > 0


def test_bruteforce_rejects_bad_input(t2_3_2):
    amb = Ambient.top(t2_3_2)
    V = span(amb, [1, 5])
    with pytest.raises(InputError):
        are_equivalent_bruteforce(V, V, "other")
    with pytest.raises(BudgetExceeded):
        are_equivalent_bruteforce(V, V, cap=10)
    assert are_equivalent_bruteforce(V, span(amb, [1])) is None


def test_witness_symmetry_and_transitivity(t2_3_2, rng):
    amb = Ambient.top(t2_3_2)
    T = t2_3_2.top
    A = random_subspace(amb, 3, rng)
    B = scale(apply_frobenius(A, 2), 7)
    C = scale(apply_frobenius(B, 5), 11)
    for X, Y in ((A, B), (B, A), (A, C), (C, A), (B, C)):
        w = are_equivalent_bruteforce(X, Y)
        assert w is not None and validate_witness(X, Y, w)
    # compose by hand: C = 11 * (7 * A^{q^2})^{q^5} = 11 * 7^{q^5} * A^{q^7}
    alpha = T.mul(11, T.frob(7, 2, 5))
    assert validate_witness(C, A, EquivWitness(alpha, 7 % 6, False))


def test_row_i_and_row_ii_are_inequivalent():
    t = build_tower(3, 1, 4, 2)
    M = t.mid
    d = next(d for d in range(1, M.order) if norm_to(M, d, M.order, 3) != 1)
    V1 = build_coset_form(t, table1_polynomial(t, "i"))
    V2 = build_coset_form(t, table1_polynomial(t, "ii", delta=d))
    assert are_equivalent_bruteforce(V1, V2, "semilinear") is None
    classes = classify_inequivalent([V1, V2, scale(V1, 5)], "linear", canonical=False)
    assert classes == [{"members": [0, 2]}, {"members": [1]}]


def test_classify_orbit_mates(t2_3_2, rng):
    V = random_subspace(Ambient.top(t2_3_2), 2, rng)
    mates = [V, scale(V, 9), apply_frobenius(V, 1), scale(apply_frobenius(V, 4), 33)]
    classes = classify_inequivalent(mates)
    assert [c["members"] for c in classes] == [[0, 1, 2, 3]]
    assert classes[0]["representative"] == list(orbit_canonical(mates[3]))


def _random_graph(t, rng):
    return graph_subspace(LinearizedPoly(t.mid, t.q, tuple(rng.randrange(t.mid.order) for _ in range(t.k)), "mid"))


@pytest.mark.parametrize("spec,mode", [((2, 1, 3, 2), "linear"), ((2, 2, 2, 2), "semilinear"), ((3, 1, 2, 2), "linear")])
def test_coset_form_agrees_with_bruteforce(spec, mode, rng):
    t = build_tower(*spec)
    T, M = t.top, t.mid
    done = 0
    while done < 12:
        U = _random_graph(t, rng)
        if done % 3 == 0:
            # planted: W . A = U for an invertible A, xi from the matching Mobius map
            c, d, a, b = 1, rng.randrange(M.order), rng.randrange(M.order), rng.randrange(1, M.order)
            if M.sub(M.mul(c, b), M.mul(d, a)) == 0:
                continue
            inv = M.inv(M.sub(M.mul(c, b), M.mul(d, a)))
            Ai = (M.mul(b, inv), M.neg(M.mul(d, inv)), M.neg(M.mul(a, inv)), M.mul(c, inv))
            W = pair_times_matrix(U, Ai, M)
            gu = t.gamma
            den = T.add(c, T.mul(d, gu))
            if den == 0:
                continue
            gw = T.mul(T.add(a, T.mul(b, gu)), T.inv(den))
            if gw < M.order:
                continue
        else:
            W = _random_graph(t, rng)
            gu, gw = rng.randrange(M.order, T.order), rng.randrange(M.order, T.order)
        try:
            cf = are_equivalent_coset_form(U, gu, W, gw, t, mode)
        except InputError:
            continue
        V1, V2 = v_subspace(U, gu, t), v_subspace(W, gw, t)
        bf = are_equivalent_bruteforce(V1, V2, mode)
        assert (cf is None) == (bf is None)
        if cf is not None:
            assert validate_witness(V1, V2, cf)
            assert validate_coset_witness(U, gu, W, gw, t, cf.coset_sigma, cf.matrix, mode == "semilinear")
        if done % 3 == 0:
            assert cf is not None
        done += 1


def test_coset_form_rejects_single_coset(t2_3_2):
    t = t2_3_2
    U = graph_subspace(LinearizedPoly(t.mid, 2, (), "mid"))
    with pytest.raises(InputError):
        are_equivalent_coset_form(U, t.gamma, U, t.gamma, t)
    with pytest.raises(InputError):
        are_equivalent_coset_form(graph_subspace(mono(t)), 3, U, t.gamma, t)


def test_zhang_space_matches_monomial(t2_3_3):
    t = t2_3_3
    M, T, g = t.mid, t.top, t.gamma
    for a, b in ((3, 5), (0, 6), (7, 1)):
        Z = zhang_pair_subspace(t, 1, a, b)
        U = graph_subspace(mono(t))
        xi = T.mul(T.inv(b), T.mul(g, T.inv(T.sub(1, T.mul(a, g)))))
        ws = are_equivalent_coset_form(U, g, Z, xi, t, all_witnesses=True)
        assert (0, (1, M.neg(a), 0, M.inv(b))) in ws
        assert are_equivalent_bruteforce(v_subspace(U, g, t), v_subspace(Z, xi, t)) is not None


def test_transform_identity(t2_3_2, rng):
    V = random_subspace(Ambient.top(t2_3_2), 3, rng)
    F = subspace_polynomial(V)
    assert transform_subspace_polynomial(F, 1, 0) == F


@pytest.mark.parametrize("wide", [False, True])
def test_transform_matches_kernel(wide, rng):
    t = build_tower(2, 2, 2, 2)
    amb = Ambient.top(t)
    for _ in range(50):
        V = random_subspace(amb, rng.randrange(1, 4), rng)
        F = subspace_polynomial(V)
        lam, s = rng.randrange(1, amb.order), rng.randrange(8 if wide else 4)
        G = transform_subspace_polynomial(F, lam, s, wide)
        target = scale(apply_sigma(V, s, wide), lam)
        assert G == subspace_polynomial(target)
        assert G.kernel() == target
        support = lambda P: [i for i, c in enumerate(P.coeffs) if c]
        assert support(G) == support(F)


def test_transform_rejects_zero(t2_3_2):
    with pytest.raises(InputError):
        transform_subspace_polynomial(subspace_polynomial(span(Ambient.top(t2_3_2), [1])), 0, 0)


@pytest.mark.parametrize("spec", [(2, 1, 3, 2), (2, 1, 3, 3), (3, 1, 3, 2), (2, 1, 4, 2)])
def test_explicit_monomial_polynomial(spec):
    t = build_tower(*spec)
    V = build_coset_form(t, mono(t))
    E = explicit_monomial_subspace_poly(t)
    assert E.qdeg == t.k and all(E.coeffs)
    assert monic(E) == subspace_polynomial(V)


def test_explicit_polynomial_input_checks(t2_3_2):
    with pytest.raises(InputError):
        explicit_monomial_subspace_poly(t2_3_2, gamma=3)
    with pytest.raises(InputError):
        explicit_monomial_subspace_poly(build_tower(2, 1, 1, 3))


def test_trinomial_search_matches_bruteforce(rng):
    t = build_tower(2, 1, 3, 2)
    amb = Ambient.top(t)
    for dim in (2, 3):
        for _ in range(6):
            V = random_subspace(amb, dim, rng)
            assert sorted(trinomial_search(V)) == sorted(trinomial_bruteforce(V))


def test_trinomial_planted_kernel():
    t = build_tower(2, 1, 3, 2)
    V = LinearizedPoly(t.top, 2, (1, 1, 1), "top").kernel()
    assert V.dim == 2
    assert trinomial_search(V) == [(1, 1, 1)]


def test_trinomial_obstruction_agrees_with_bruteforce():
    t = build_tower(2, 1, 3, 2)
    for d in range(1, 8):
        g = LinearizedPoly.from_terms(t.mid, 2, {1: 1, 2: d}, "mid")
        for gamma in (t.gamma, t.gamma + 1, 63):
            res = trinomial_obstruction(g, gamma, t)
            V = v_subspace(graph_subspace(g), gamma, t)
            assert res["obstructed"] == (not trinomial_bruteforce(V))
            assert res["ells_checked"] == 2


def test_trinomial_obstruction_input_checks(t2_3_2):
    with pytest.raises(InputError):
        trinomial_obstruction(mono(t2_3_2), t2_3_2.gamma, t2_3_2)
    g = LinearizedPoly.from_terms(t2_3_2.mid, 2, {1: 1, 2: 3}, "mid")
    with pytest.raises(InputError):
        trinomial_obstruction(g, 2, t2_3_2)


@pytest.mark.parametrize("mode", ["linear", "semilinear"])
def test_orbit_canonical_is_a_class_invariant(mode, rng):
    t = build_tower(2, 2, 2, 2)
    amb = Ambient.top(t)
    for _ in range(4):
        V = random_subspace(amb, 2, rng)
        W = scale(apply_sigma(V, rng.randrange(8 if mode == "semilinear" else 4), mode == "semilinear"),
                  rng.randrange(1, amb.order))
        assert orbit_canonical(V, mode) == orbit_canonical(W, mode)
        assert span(amb, orbit_canonical(V, mode)).dim == 2
