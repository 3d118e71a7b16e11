"""Internal homotopical predicates: path objects, mapping path fibrations,
iscontr, isequiv, Eq objects, the weak-equivalence test, and the lift
extension along cofibrations into Eq.

Weak equivalence is defined operationally: factor f through its mapping path
fibration and test the fibration leg for the boundary lifting property in the
requested range.  All constructions demand fibration preconditions within the
configured range and refuse otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoLift, PreconditionError, ToposError
from .lcc import (
    ExpResult,
    PiResult,
    SliceObject,
    exp_transpose,
    local_exp,
    pi,
    slice_object,
)
from .limits import _tuple_id, pullback
from .presheaf import (
    NatMap,
    Presheaf,
    nat_compose,
    nat_equal,
    nat_identity,
    nat_search,
)
from .simplicial import (
    Cotensor,
    LiftingProblem,
    SSite,
    cotensor_interval,
    is_acyclic_fibration,
    is_fibration,
    solve_lift,
)


def _require_fibration(ssite, E: SliceObject, rng, what: str, check: bool):
    if not check:
        return
    lo, hi = rng
    if hi < 1:
        return
    if not is_fibration(E.proj, ssite, (max(lo, 1), hi)):
        raise PreconditionError(f"{what} must be a fibration in range {rng}")


@dataclass(eq=False)
class PathObject:
    slice: SliceObject  # P_B E over B
    unit: NatMap  # E → P_B E
    ev: NatMap  # P_B E → E ×_B E
    ev0: NatMap
    ev1: NatMap
    exbe: tuple[Presheaf, NatMap, NatMap]
    cotensor: Cotensor


def path_object(ssite: SSite, E: SliceObject, rng=None, check: bool = True) -> PathObject:
    """Factor the diagonal E → P_B E → E ×_B E through the interval cotensor."""
    rng = rng if rng is not None else (1, ssite.N)
    _require_fibration(ssite, E, rng, "path_object input", check)
    ct = cotensor_interval(ssite, E)
    return PathObject(ct.slice, ct.unit, ct.ev, ct.ev0, ct.ev1, ct.exbe, ct)


@dataclass(eq=False)
class PathFactorization:
    slice: SliceObject  # P_B f over B
    r: NatMap  # E1 → P_B f
    p: NatMap  # P_B f → E2
    q: NatMap  # P_B f → E1
    to_paths: NatMap  # P_B f → P_B E2
    to_prod: NatMap  # P_B f → E1 ×_B E2
    path_obj: PathObject

    def check_identities(self, f: NatMap) -> list[str]:
        out = []
        if not nat_equal(nat_compose(self.q, self.r), nat_identity(self.q.dst)):
            out.append("q∘r is not the identity")
        if not nat_equal(nat_compose(self.p, self.r), f):
            out.append("p∘r is not f")
        return out


def mapping_path(
    ssite: SSite,
    f: NatMap,
    E1: SliceObject,
    E2: SliceObject,
    rng=None,
    check: bool = True,
) -> PathFactorization:
    """P_B f: pull the path object of E2 back along (f×1): E1×_BE2 → E2×_BE2."""
    rng = rng if rng is not None else (1, ssite.N)
    _require_fibration(ssite, E2, rng, "mapping_path codomain", check)
    po = path_object(ssite, E2, rng, check=False)
    EE2 = po.exbe[0]
    P12, a1, a2 = pullback(E1.proj, E2.proj)
    fx1 = NatMap(
        P12,
        EE2,
        {
            c: {
                pid: _tuple_id(
                    [
                        f.components[c][a1.components[c][pid]],
                        a2.components[c][pid],
                    ]
                )
                for pid in P12.level.get(c, ())
            }
            for c in P12.base.objects
        },
    )
    PF, b1, b2 = pullback(fx1, po.ev)
    q = nat_compose(a1, b1)
    p = nat_compose(a2, b1)
    proj = nat_compose(E1.proj, q)
    r_comps = {}
    for c in P12.base.objects:
        tab = {}
        for e1 in E1.total.level.get(c, ()):
            fe1 = f.components[c][e1]
            pair = _tuple_id([e1, fe1])
            path = po.unit.components[c][fe1]
            tab[e1] = _tuple_id([pair, path])
        r_comps[c] = tab
    r = NatMap(E1.total, PF, r_comps)
    fact = PathFactorization(
        slice_object(PF, E1.base, proj), r, p, q, b1, b2, po
    )
    bad = fact.check_identities(f)
    if bad:
        raise ToposError("mapping_path postcondition failed: " + "; ".join(bad))
    return fact


@dataclass(eq=False)
class IscontrResult:
    slice: SliceObject  # iscontr_B(E) over B
    pi_res: PiResult
    path_obj: PathObject


def iscontr(ssite: SSite, E: SliceObject, rng=None, check: bool = True) -> IscontrResult:
    """iscontr_B(E) = Σ_p Π_{π₂}(P_B E), internal fiberwise contractibility."""
    rng = rng if rng is not None else (1, ssite.N)
    _require_fibration(ssite, E, rng, "iscontr input", check)
    po = path_object(ssite, E, rng, check=False)
    EE, pi1, pi2 = po.exbe
    paths_over_EE = slice_object(po.slice.total, EE, po.ev)
    pires = pi(pi2, paths_over_EE)
    total = pires.slice.total
    proj = nat_compose(E.proj, pires.slice.proj)
    return IscontrResult(slice_object(total, E.base, proj), pires, po)


@dataclass(eq=False)
class IsequivResult:
    slice: SliceObject  # isequiv_B(f) over B
    iscontr_res: IscontrResult
    fact: PathFactorization
    pi_res: PiResult


def isequiv(
    ssite: SSite,
    f: NatMap,
    E1: SliceObject,
    E2: SliceObject,
    rng=None,
    check: bool = True,
) -> IsequivResult:
    """isequiv_B(f) = Π_{p₂} iscontr_{E₂}(P_B f)."""
    rng = rng if rng is not None else (1, ssite.N)
    _require_fibration(ssite, E1, rng, "isequiv domain", check)
    _require_fibration(ssite, E2, rng, "isequiv codomain", check)
    fact = mapping_path(ssite, f, E1, E2, rng, check=False)
    over_e2 = slice_object(fact.slice.total, E2.total, fact.p)
    ic = iscontr(ssite, over_e2, rng, check=False)
    pires = pi(E2.proj, ic.slice)
    return IsequivResult(pires.slice, ic, fact, pires)


def is_weq(
    ssite: SSite,
    f: NatMap,
    E1: SliceObject,
    E2: SliceObject,
    rng=None,
    check: bool = True,
) -> bool:
    """f is a weak equivalence iff its mapping-path fibration leg p is an
    acyclic fibration in the given range (0-based for the boundary tests)."""
    rng = rng if rng is not None else (0, ssite.N)
    fib_rng = (1, rng[1]) if rng[1] >= 1 else None
    if check and fib_rng is not None:
        _require_fibration(ssite, E1, fib_rng, "is_weq domain", True)
        _require_fibration(ssite, E2, fib_rng, "is_weq codomain", True)
    fact = mapping_path(ssite, f, E1, E2, fib_rng, check=False)
    return is_acyclic_fibration(fact.p, ssite, rng)


@dataclass(eq=False)
class EqResult:
    slice: SliceObject  # Eq_B(E1, E2) over B
    exp: ExpResult
    ie: IsequivResult
    fun_slice: SliceObject


def eq_object(
    ssite: SSite, E1: SliceObject, E2: SliceObject, rng=None, check: bool = True
) -> EqResult:
    """Eq_B(E1,E2) = Σ_{Fun} isequiv_{Fun}(h), h the universal family."""
    rng = rng if rng is not None else (1, ssite.N)
    _require_fibration(ssite, E1, rng, "eq_object first argument", check)
    _require_fibration(ssite, E2, rng, "eq_object second argument", check)
    ex = local_exp(E1, E2)
    fun = ex.fun
    FE1, f1, _ = ex.fun_x_e1
    FE2, g1, _ = ex.fun_x_e2
    E1f = slice_object(FE1, fun.total, f1)
    E2f = slice_object(FE2, fun.total, g1)
    ie = isequiv(ssite, ex.h, E1f, E2f, rng, check=False)
    total = ie.slice.total
    proj = nat_compose(fun.proj, ie.slice.proj)
    return EqResult(slice_object(total, E1.base, proj), ex, ie, fun)


def eq_lifts_of(ssite: SSite, eq: EqResult, g: NatMap, **kw) -> list[NatMap]:
    """All lifts of g: A → B through Eq_B(E1,E2) ↠ B."""
    proj = eq.slice.proj
    fiber = lambda c, a: [
        e
        for e in eq.slice.total.level.get(c, ())
        if proj.components[c][e] == g.components[c][a]
    ]
    return [
        NatMap(g.src, eq.slice.total, comps)
        for comps in nat_search(g.src, eq.slice.total, fiber=fiber, **kw)
    ]


@dataclass(eq=False)
class EqliftResult:
    lift: NatMap  # B → Eq_B(D1, D2)
    k: NatMap  # B → Fun_B(D1, D2), the classifier of v


def eqlift(
    ssite: SSite,
    i: NatMap,
    v: NatMap,
    D1: SliceObject,
    D2: SliceObject,
    partial: NatMap,
    eq: EqResult | None = None,
    rng=None,
    max_nodes: int = 10**6,
) -> EqliftResult:
    """Extend a partial lift along a mono i: A↪B so the result classifies v.

    The partial lift must land over k∘i, where k classifies v; the extension
    is a solved lifting problem against the pullback of isequiv_{Fun}(h)
    along k, which is an acyclic fibration because v is a weak equivalence.
    """
    rng = rng if rng is not None else (0, ssite.N)
    if eq is None:
        eq = eq_object(ssite, D1, D2, (1, ssite.N) if ssite.N >= 1 else None)
    if not is_weq(ssite, v, D1, D2, rng, check=False):
        raise NoLift("eqlift: v is not a weak equivalence in range " + str(rng))
    k = exp_transpose(eq.exp, v)
    ie_proj = eq.ie.slice.proj  # isequiv_Fun(h) ↠ Fun
    # coherence of the partial lift over k∘i
    for c in i.src.base.objects:
        for a in i.src.level.get(c, ()):
            want = k.components[c][i.components[c][a]]
            got = ie_proj.components[c][partial.components[c][a]]
            if want != got:
                raise PreconditionError(
                    f"partial lift does not classify i*(v) at {c}:{a}"
                )
    K, h1, h2 = pullback(k, ie_proj)  # k*(isequiv_Fun(h)) over B
    top = NatMap(
        i.src,
        K,
        {
            c: {
                a: _tuple_id(
                    [i.components[c][a], partial.components[c][a]]
                )
                for a in i.src.level.get(c, ())
            }
            for c in i.src.base.objects
        },
    )
    problem = LiftingProblem(
        left=i, right=h1, top=top, bottom=nat_identity(i.dst)
    )
    ell = solve_lift(problem, max_nodes)
    if ell is None:
        raise ToposError(
            "eqlift: no lift found although v is a weak equivalence; "
            "the acyclicity surrogate failed in this range"
        )
    lift = nat_compose(h2, ell)
    if not nat_equal(nat_compose(lift, i), partial):
        raise ToposError("eqlift postcondition: lift does not extend partial")
    if not nat_equal(nat_compose(ie_proj, lift), k):
        raise ToposError("eqlift postcondition: lift does not classify v")
    return EqliftResult(lift, k)


def slice_iso(E1: SliceObject, E2: SliceObject, max_nodes=None) -> NatMap | None:
    """An explicit iso E1 ≅ E2 over the shared base, if one exists."""
    for c in E1.base.base.objects:
        if len(E1.total.level.get(c, ())) != len(E2.total.level.get(c, ())):
            return None
    p2 = E2.proj.components
    fiber = lambda c, x: [
        e
        for e in E2.total.level.get(c, ())
        if p2[c][e] == E1.proj.components[c][x]
    ]
    for comps in nat_search(
        E1.total, E2.total, fiber=fiber, injective=True, max_results=1,
        max_nodes=max_nodes,
    ):
        return NatMap(E1.total, E2.total, comps)
    return None
