import pytest
from hypothesis import given, settings, strategies as st

from sidonspaces.constructions import norm_to
from sidonspaces.errors import InputError
from sidonspaces.field_tower import build_tower
from sidonspaces.fq_linear import Ambient, span, subfield_generator, subfield_subspace, zero_subspace
from sidonspaces.linpoly import (
    LinearizedPoly,
    graph_subspace,
    is_scattered,
    parse_polynomial,
    poly_from_dict,
    s_set,
    s_set_dims,
    s_set_lambdas,
    subspace_polynomial,
)

M8 = build_tower(2, 1, 3, 2).mid
M81 = build_tower(3, 1, 4, 2).mid


def P(M, q, terms):
    return LinearizedPoly.from_terms(M, q, terms, "mid")


def test_evaluate_basics():
    x = P(M81, 3, {0: 1})
    assert all(x(a) == a for a in range(81))
    xq = P(M81, 3, {1: 1})
    assert all(xq(c) == c for c in range(3))
    with pytest.raises(InputError):
        xq(81)


def test_composition_rule():
    a, b = 5, 17
    f, g = P(M81, 3, {1: a}), P(M81, 3, {1: b})
    assert (f @ g).coeffs == (0, 0, M81.mul(a, M81.pow(b, 3)))
    x = P(M81, 3, {0: 1})
    assert f @ x == f and x @ f == f


def test_composition_matches_nested_evaluation(rng):
    for _ in range(10):
        f = P(M8, 2, {i: rng.randrange(8) for i in range(3)})
        g = P(M8, 2, {i: rng.randrange(8) for i in range(3)})
        h = f @ g
        assert all(h(x) == f(g(x)) for x in range(8))


def test_kernels():
    assert P(M81, 3, {0: 1}).kernel().dim == 0
    K = P(M81, 3, {1: 1, 0: M81.neg(1)}).kernel()
    assert K == subfield_subspace(K.ambient, 3)
    with pytest.raises(InputError):
        LinearizedPoly(M81, 3, ()).kernel()


def test_binomial_kernel_is_subfield_coset():
    # x^q + delta x^{q^3} over F_{q^4}, t = 2: kernel x0 F_{q^2} when N_{q^4/q^2}(delta) = 1
    M, q = M81, 3
    delta = next(d for d in range(1, 81) if norm_to(M, d, 81, 9) == 1)
    K = P(M, q, {1: 1, 3: delta}).kernel()
    assert K.dim == 2
    x0 = K.basis[0]
    w = subfield_generator(M, 3, 2)
    assert K == span(K.ambient, [M.mul(x0, M.pow(w, e)) for e in range(8)])


def test_graph_of_row_ii_has_dim_k():
    delta = next(d for d in range(1, 81) if norm_to(M81, d, 81, 3) != 1)
    assert graph_subspace(P(M81, 3, {1: 1, 3: delta})).dim == 4


def test_subspace_polynomial_trivial_cases():
    T = build_tower(3, 1, 2, 2).top
    amb = Ambient(T, 3, False, "top")
    Fq = subfield_subspace(amb, 3)
    assert subspace_polynomial(Fq).coeffs == (T.neg(1), 1)
    assert subspace_polynomial(zero_subspace(amb)).coeffs == (1,)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 63), min_size=1, max_size=5))
def test_subspace_polynomial_kernel_round_trip(vecs):
    T = build_tower(2, 1, 3, 2).top
    V = span(Ambient(T, 2, False, "top"), vecs)
    F = subspace_polynomial(V)
    assert F.qdeg == V.dim and F.coeffs[-1] == 1
    assert F.kernel() == V


def test_s_sets():
    f = P(M81, 3, {1: 1})
    for x0 in (1, 5, 40):
        assert s_set(f, x0).dim == 1
    g = P(M81, 3, {1: 1, 2: 1})
    for x0 in (7, 20):
        assert s_set(g, x0) == s_set(g, M81.mul(2, x0))
    with pytest.raises(InputError):
        s_set(f, 0)


def test_batched_s_set_dims_match_pointwise(rng):
    for _ in range(4):
        f = P(M81, 3, {i: rng.randrange(81) for i in range(4)})
        if f.is_zero():
            continue
        xs, dims = s_set_dims(f)
        lams = s_set_lambdas(f, xs)
        for x, d, lam in zip(xs[::7], dims[::7], lams[::7]):
            S = s_set(f, int(x))
            assert S.dim == d
            assert (lam in S and lam >= 3) if d >= 2 else lam == 0


@pytest.mark.parametrize("q,d", [(2, 2), (3, 2), (2, 3)])
def test_large_s_set_in_short_binomials(q, d):
    # k = (d-1)d + 1 with d-1 a power of p: some x0 has a d-dimensional set
    k = (d - 1) * d + 1
    M = build_tower(q, 1, k, 2).mid
    f = P(M, q, {1: 1, d: 1})
    assert s_set_dims(f)[1].max() == d


def test_scatteredness():
    assert is_scattered(P(M81, 3, {1: 1})) == (True, None)
    assert is_scattered(P(M81, 3, {3: 1}))[0]
    one = next(d for d in range(1, 81) if norm_to(M81, d, 81, 3) == 1)
    ok, x0 = is_scattered(P(M81, 3, {1: 1, 3: one}))
    assert not ok and s_set(P(M81, 3, {1: 1, 3: one}), x0).dim > 1
    M = build_tower(2, 1, 5, 2).mid
    assert not is_scattered(P(M, 2, {1: 1, 2: 1}))[0]


def test_parse_polynomial():
    g = M81.primitive_element()
    f = parse_polynomial("x^q + g^5*x^q^2 - x", M81, 3, name="mid")
    assert f.coeffs == (M81.neg(1), 1, M81.pow(g, 5))
    h = parse_polynomial("[0,1,0,0]*x^q^3", M81, 3)
    assert h.coeffs == (0, 0, 0, 3)
    assert parse_polynomial("d*x", M81, 3, {"d": 7}).coeffs == (7,)
    with pytest.raises(InputError):
        parse_polynomial("x^^q", M81, 3)
    assert poly_from_dict(M81, 3, f.to_dict()) == f
