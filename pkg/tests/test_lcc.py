"""Σ_f ⊣ f* ⊣ Π_f, local exponentials, and Beck–Chevalley."""

from toposdesk.cat import terminal_category
from toposdesk.generate import (
    fibrant_fibers,
    product_fibration,
    random_base,
    random_natmap,
    rng_for,
)
from toposdesk.lcc import (
    SliceObject,
    beck_chevalley_check,
    exp_transpose,
    identity_slice,
    local_exp,
    pi,
    pi_counit,
    pi_transpose_in,
    pi_transpose_out,
    pullback_along,
    sections_of,
    sigma,
    slice_maps,
)
from toposdesk.limits import initial_presheaf, terminal_map, terminal_presheaf
from toposdesk.presheaf import (
    NatMap,
    Presheaf,
    find_iso,
    nat_equal,
    nat_identity,
    validate_natmap,
    validate_presheaf,
)
from toposdesk.simplicial import SSite


def setps(*ids):
    T = terminal_category()
    ids = tuple(sorted(ids))
    return Presheaf(T, {"*": ids}, {"id:*": {x: x for x in ids}})


def setmap(X, Y, table):
    return NatMap(X, Y, {"*": table})


def test_pullback_along_fiber_count():
    B = setps("b1", "b2")
    E = setps("x1", "x2", "y1", "y2", "y3")
    proj = setmap(E, B, {"x1": "b1", "x2": "b1", "y1": "b2", "y2": "b2", "y3": "b2"})
    A = setps("a")
    f = setmap(A, B, {"a": "b2"})
    res = pullback_along(f, SliceObject(E, B, proj))
    assert res.slice.total.size() == 3


def test_pullback_along_identity_and_initial():
    B = setps("b1", "b2")
    E = setps("e1", "e2", "e3")
    proj = setmap(E, B, {"e1": "b1", "e2": "b2", "e3": "b2"})
    Esl = SliceObject(E, B, proj)
    res = pullback_along(nat_identity(B), Esl)
    assert find_iso(res.slice.total, E) is not None
    nothing = initial_presheaf(B.base)
    res2 = pullback_along(NatMap(nothing, B, {"*": {}}), Esl)
    assert res2.slice.total.size() == 0


def test_pi_fiber_product():
    # f: {a1,a2} → {b}, fibers 2 and 3: the sections form the product, 6
    A, B = setps("a1", "a2"), setps("b")
    f = setmap(A, B, {"a1": "b", "a2": "b"})
    E = setps("e1", "e2", "f1", "f2", "f3")
    proj = setmap(E, A, {"e1": "a1", "e2": "a1", "f1": "a2", "f2": "a2", "f3": "a2"})
    res = pi(f, SliceObject(E, A, proj))
    assert res.slice.total.size() == 6
    assert not validate_presheaf(res.slice.total)


def test_pi_identity_is_identity():
    A = setps("a1", "a2")
    E = setps("e1", "e2", "e3")
    proj = setmap(E, A, {"e1": "a1", "e2": "a2", "e3": "a2"})
    res = pi(nat_identity(A), SliceObject(E, A, proj))
    assert find_iso(res.slice.total, E) is not None


def test_sigma_then_forget():
    A = setps("a1", "a2")
    E = setps("e1", "e2")
    proj = setmap(E, A, {"e1": "a1", "e2": "a2"})
    t = setps("t")
    f = setmap(A, t, {"a1": "t", "a2": "t"})
    out = sigma(f, SliceObject(E, A, proj))
    assert out.total is E and out.base is t


def test_adjunction_counts_random_delta1():
    """|Hom_{/B}(Σ_f X, Y)| = |Hom_{/A}(X, f*Y)| and the Π analogue, with the
    two sides enumerated independently."""
    rng = rng_for(3)
    ssite = SSite.simplicial(1)
    hits = 0
    for k in range(50):
        A = random_base(ssite, rng)
        B = random_base(ssite, rng)
        f = random_natmap(A, B, rng)
        if f is None:
            continue
        hits += 1
        X = product_fibration(ssite, A, fibrant_fibers(1)[k % 3])
        Y = product_fibration(ssite, B, fibrant_fibers(1)[(k + 1) % 3])
        fY = pullback_along(f, Y)
        assert len(slice_maps(sigma(f, X), Y)) == len(slice_maps(X, fY.slice))
        res = pi(f, X)
        assert len(slice_maps(Y, res.slice)) == len(slice_maps(fY.slice, X))
        for m in slice_maps(Y, res.slice):
            psi = pi_transpose_out(res, Y.proj, fY, m)
            assert nat_equal(pi_transpose_in(res, Y.proj, fY, psi), m)
    assert hits >= 25


def test_local_exp_function_set():
    pt = setps("b")
    E1 = setps("u1", "u2")
    E2 = setps("v1", "v2", "v3")
    ex = local_exp(
        SliceObject(E1, pt, setmap(E1, pt, {"u1": "b", "u2": "b"})),
        SliceObject(E2, pt, setmap(E2, pt, {"v1": "b", "v2": "b", "v3": "b"})),
    )
    assert ex.fun.total.size() == 9


def test_local_exp_unit_object():
    B = setps("b1", "b2")
    E = setps("e1", "e2", "e3")
    proj = setmap(E, B, {"e1": "b1", "e2": "b2", "e3": "b2"})
    Esl = SliceObject(E, B, proj)
    ex = local_exp(identity_slice(B), Esl)
    assert find_iso(ex.fun.total, E) is not None


def test_exp_lifts_biject_with_slice_maps():
    """Lifts of g through Fun_B(E1,E2) correspond to maps g*E1 → g*E2."""
    rng = rng_for(5)
    ssite = SSite.simplicial(1)
    for k in range(10):
        B = random_base(ssite, rng)
        A = random_base(ssite, rng)
        g = random_natmap(A, B, rng)
        if g is None:
            continue
        E1 = product_fibration(ssite, B, fibrant_fibers(1)[k % 2])
        E2 = product_fibration(ssite, B, fibrant_fibers(1)[(k + 1) % 3])
        ex = local_exp(E1, E2)
        lifts = slice_maps(SliceObject(A, B, g), ex.fun)
        gE1 = pullback_along(g, E1)
        gE2 = pullback_along(g, E2)
        assert len(lifts) == len(slice_maps(gE1.slice, gE2.slice))


def test_exp_transpose_recovers_map():
    B = setps("b")
    E1 = setps("x1", "x2")
    proj1 = setmap(E1, B, {"x1": "b", "x2": "b"})
    sl1 = SliceObject(E1, B, proj1)
    ex = local_exp(sl1, sl1)
    swap = setmap(E1, E1, {"x1": "x2", "x2": "x1"})
    k = exp_transpose(ex, swap)
    assert not validate_natmap(k)
    # pulling the universal family back along k gives the original map
    for c in B.base.objects:
        for e1 in E1.level[c]:
            kb = k.components[c]["b"]
            u = ex.universal.components[c][f"({kb},{e1})"]
            assert u == swap.components[c][e1]


def test_pi_counit_projection():
    A, B = setps("a1", "a2"), setps("b")
    f = setmap(A, B, {"a1": "b", "a2": "b"})
    E = setps("e1", "e2", "f1")
    proj = setmap(E, A, {"e1": "a1", "e2": "a1", "f1": "a2"})
    res = pi(f, SliceObject(E, A, proj))
    pb, eps = pi_counit(res)
    assert not validate_natmap(eps)


def test_beck_chevalley_identity_and_initial():
    rng = rng_for(9)
    ssite = SSite.simplicial(1)
    B = random_base(ssite, rng)
    C = random_base(ssite, rng)
    f = random_natmap(C, B, rng)
    if f is None:
        f = terminal_map(C, terminal_presheaf(ssite.cat))
        B = f.dst
    E = product_fibration(ssite, C, fibrant_fibers(1)[1])
    assert beck_chevalley_check(nat_identity(B), f, E)
    nothing = initial_presheaf(ssite.cat)
    g0 = NatMap(nothing, B, {c: {} for c in ssite.cat.objects})
    assert beck_chevalley_check(g0, f, E)


def test_beck_chevalley_random():
    rng = rng_for(13)
    ssite = SSite.simplicial(1)
    done = 0
    for k in range(60):
        B = random_base(ssite, rng)
        A = random_base(ssite, rng)
        C = random_base(ssite, rng)
        g = random_natmap(A, B, rng)
        f = random_natmap(C, B, rng)
        if g is None or f is None:
            continue
        E = product_fibration(ssite, C, fibrant_fibers(1)[k % 3])
        assert beck_chevalley_check(g, f, E)
        done += 1
        if done >= 25:
            break
    assert done >= 10


from hypothesis import given, settings, strategies as st


@given(st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=16, deadline=None)
def test_pi_counts_product_of_fibers(a, b):
    """Over the terminal category, Π along a two-point fold has |fiber₁|·|fiber₂|
    sections; the count is analytic, the computation is the search."""
    A = setps("a1", "a2")
    B = setps("b")
    f = setmap(A, B, {"a1": "b", "a2": "b"})
    ids = [f"p{i}" for i in range(a)] + [f"q{i}" for i in range(b)]
    E = setps(*ids) if ids else setps()
    proj = setmap(
        E, A,
        {**{f"p{i}": "a1" for i in range(a)}, **{f"q{i}": "a2" for i in range(b)}},
    )
    res = pi(f, SliceObject(E, A, proj))
    assert res.slice.total.size() == a * b
