"""Reedy structures: degree functions, latching/matching objects, the Reedy
(co)fibration comparisons, generating acyclic cofibrations, and elegance
evidence.

Latching and matching slice categories are materialized as FiniteCategory
values so the generic (co)limit engine does all the work.  Presheaves over
C×Δ_{≤N} are consumed through a small diagram interface (`CDiagram`) so the
inductive extension algorithm can reuse everything on partially built data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cat import FiniteCategory, opposite_category, simplex_obj
from .errors import PreconditionError
from .limits import (
    ColimitResult,
    DiagramShape,
    LimitResult,
    _tuple_id,
    colimit,
    induced_from_colimit,
    induced_into_limit,
    limit,
    pullback,
    pushout,
    pushout_induced,
    subpresheaf,
)
from .presheaf import NatMap, Presheaf, is_mono
from .simplicial import (
    SSite,
    c_representable,
    delta_restriction,
    delta_restriction_map,
    horn_ps,
    is_fibration,
    pushout_product,
    simplex_ps,
)


@dataclass(eq=False)
class ReedyStructure:
    cat: FiniteCategory
    degree: dict[str, int]
    plus: frozenset[str]
    minus: frozenset[str]
    _factor_cache: dict[str, tuple[str, str]] = field(default_factory=dict, repr=False)

    def factor(self, m: str) -> tuple[str, str]:
        """The unique (α⁺, α⁻) with α = α⁺∘α⁻; raises if not unique."""
        if m not in self._factor_cache:
            found = []
            for p in self.plus:
                for q in self.minus:
                    if (
                        self.cat.cod(q) == self.cat.dom(p)
                        and self.cat.dom(q) == self.cat.dom(m)
                        and self.cat.cod(p) == self.cat.cod(m)
                        and self.cat.compose(p, q) == m
                    ):
                        found.append((p, q))
            if len(found) != 1:
                raise PreconditionError(
                    f"morphism {m} has {len(found)} (plus,minus) factorizations"
                )
            self._factor_cache[m] = found[0]
        return self._factor_cache[m]


@dataclass
class ReedyReport:
    ok: bool
    problems: list[str]
    is_direct: bool
    is_inverse: bool


def validate_reedy(R: ReedyStructure) -> ReedyReport:
    problems = []
    cat = R.cat
    ids = set(cat.identities.values())
    for o in cat.objects:
        if o not in R.degree:
            problems.append(f"object {o} has no degree")
    for sub, name in ((R.plus, "plus"), (R.minus, "minus")):
        if not ids <= sub:
            problems.append(f"{name} subcategory misses some identities")
        for f in sub:
            for g in sub:
                if cat.cod(f) == cat.dom(g) and cat.compose(g, f) not in sub:
                    problems.append(f"{name} not closed under composition at ({g},{f})")
    for m, (d, c) in cat.morphisms.items():
        if m in ids:
            continue
        if m in R.plus and not R.degree.get(d, 0) < R.degree.get(c, 0):
            problems.append(f"plus morphism {m} does not raise degree")
        if m in R.minus and not R.degree.get(c, 0) < R.degree.get(d, 0):
            problems.append(f"minus morphism {m} does not lower degree")
    for m in cat.morphisms:
        found = []
        for p in R.plus:
            for q in R.minus:
                if (
                    cat.cod(q) == cat.dom(p)
                    and cat.dom(q) == cat.dom(m)
                    and cat.cod(p) == cat.cod(m)
                    and cat.compose(p, q) == m
                ):
                    found.append((p, q))
        if len(found) != 1:
            problems.append(
                f"morphism {m} has {len(found)} (plus,minus) factorizations"
            )
    is_direct = R.minus <= ids
    is_inverse = R.plus <= ids
    return ReedyReport(not problems, problems, is_direct, is_inverse)


def delta_reedy(N: int) -> ReedyStructure:
    """Δ_{≤N} with injections raising and surjections lowering degree."""
    from .cat import simplex_category, simplex_values

    cat = simplex_category(N)
    plus, minus = set(), set()
    for m in cat.morphisms:
        vals = simplex_values(cat, m)
        if len(set(vals)) == len(vals):
            plus.add(m)
        n_target = int(cat.cod(m)[1:-1])
        if set(vals) == set(range(n_target + 1)):
            minus.add(m)
    degree = {o: int(o[1:-1]) for o in cat.objects}
    return ReedyStructure(cat, degree, frozenset(plus), frozenset(minus))


def direct_reedy(cat: FiniteCategory, degree: dict[str, int]) -> ReedyStructure:
    return ReedyStructure(
        cat, degree, frozenset(cat.morphisms), frozenset(cat.identities.values())
    )


def inverse_reedy(cat: FiniteCategory, degree: dict[str, int]) -> ReedyStructure:
    return ReedyStructure(
        cat, degree, frozenset(cat.identities.values()), frozenset(cat.morphisms)
    )


# ---------------------------------------------------------------------------
# C-indexed diagram view of a presheaf over C×Δ_{≤N}


class CDiagram:
    """A presheaf over the product site, read object-by-object in C."""

    def __init__(self, ssite: SSite, X: Presheaf):
        self.ssite = ssite
        self.X = X
        self._nodes: dict[str, Presheaf] = {}

    def node(self, c: str) -> Presheaf:
        if c not in self._nodes:
            self._nodes[c] = delta_restriction(self.ssite, self.X, c)
        return self._nodes[c]

    def edge(self, gamma: str) -> NatMap:
        """X(γ): node(cod γ) → node(dom γ) for γ a C-morphism."""
        ss = self.ssite
        d, c = ss.C.dom(gamma), ss.C.cod(gamma)
        src, dst = self.node(c), self.node(d)
        comps = {}
        for n in range(ss.N + 1):
            m = ss.mor(gamma, ss.delta.identities[simplex_obj(n)])
            comps[simplex_obj(n)] = {
                x: self.X.action[m][x] for x in src.level[simplex_obj(n)]
            }
        return NatMap(src, dst, comps)


# ---------------------------------------------------------------------------
# latching and matching


def latching_category(R: ReedyStructure, c: str):
    """∂(c↓C⁻): non-identity degree-lowering maps out of c."""
    cat = R.cat
    objs = tuple(
        sorted(
            m
            for m in R.minus
            if cat.dom(m) == c and not cat.is_identity(m)
        )
    )
    return _slice_cat(R, objs, lambda alpha: cat.cod(alpha), R.minus)


def matching_category(R: ReedyStructure, c: str):
    """∂(C⁺↓c): non-identity degree-raising maps into c."""
    cat = R.cat
    objs = tuple(
        sorted(
            m
            for m in R.plus
            if cat.cod(m) == c and not cat.is_identity(m)
        )
    )
    return _slice_cat(R, objs, lambda beta: cat.dom(beta), R.plus, over=True)


def _slice_cat(R, objs, carrier_of, sub, over=False):
    cat = R.cat
    morphisms: dict[str, tuple[str, str]] = {}
    comp_data: dict[str, str] = {}
    for a in objs:
        for b in objs:
            ca, cb = carrier_of(a), carrier_of(b)
            for gamma in sub:
                if cat.dom(gamma) != ca or cat.cod(gamma) != cb:
                    continue
                if over:
                    ok = cat.compose(b, gamma) == a  # β'∘γ = β
                else:
                    ok = cat.compose(gamma, a) == b  # γ∘α = α'
                if ok:
                    mid = f"{gamma}@{a}>{b}"
                    morphisms[mid] = (a, b)
                    comp_data[mid] = gamma
    identities = {a: f"{cat.identities[carrier_of(a)]}@{a}>{a}" for a in objs}
    composition = {}
    for m1, (a, b) in morphisms.items():
        for m2, (b2, c2) in morphisms.items():
            if b != b2:
                continue
            g = cat.compose(comp_data[m2], comp_data[m1])
            composition[(m2, m1)] = f"{g}@{a}>{c2}"
    J = FiniteCategory(objs, morphisms, identities, composition)
    return J, comp_data


@dataclass(eq=False)
class LatchData:
    ob: Presheaf
    colres: ColimitResult
    J: FiniteCategory


@dataclass(eq=False)
class MatchData:
    ob: Presheaf
    limres: LimitResult
    J: FiniteCategory


def latching_ob(R: ReedyStructure, cd: CDiagram, c: str) -> LatchData:
    """L_c X = colim over ∂(c↓C⁻)^op of the restriction of X."""
    J, gammas = latching_category(R, c)
    shape = opposite_category(J)
    nodes = {alpha: cd.node(R.cat.cod(alpha)) for alpha in J.objects}
    edges = {}
    for mid, (a, b) in J.morphisms.items():
        # in the opposite shape mid: b -> a, realized by X(γ): node(b) → node(a)
        edges[mid] = cd.edge(gammas[mid])
    D = DiagramShape(shape, nodes, edges)
    res = colimit(D, base=cd.ssite.delta)
    return LatchData(res.apex, res, J)


def matching_ob(R: ReedyStructure, cd: CDiagram, c: str) -> MatchData:
    """M_c X = lim over ∂(C⁺↓c)^op of the restriction of X."""
    J, gammas = matching_category(R, c)
    shape = opposite_category(J)
    nodes = {beta: cd.node(R.cat.dom(beta)) for beta in J.objects}
    edges = {}
    for mid, (a, b) in J.morphisms.items():
        # slice morphism γ: dom(β)->dom(β') with β'∘γ = β gives X(γ): node(β')→node(β)
        edges[mid] = cd.edge(gammas[mid])
    D = DiagramShape(shape, nodes, edges)
    res = limit(D, base=cd.ssite.delta)
    return MatchData(res.apex, res, J)


def latching_to_level(R: ReedyStructure, cd: CDiagram, c: str, L: LatchData) -> NatMap:
    """The canonical comparison L_c X → X_c."""
    legs = {alpha: cd.edge(alpha) for alpha in L.J.objects}
    return induced_from_colimit(L.colres, legs, cd.node(c))


def level_to_matching(R: ReedyStructure, cd: CDiagram, c: str, M: MatchData) -> NatMap:
    """The canonical comparison X_c → M_c X."""
    legs = {beta: cd.edge(beta) for beta in M.J.objects}
    return induced_into_limit(M.limres, legs, cd.node(c))


def latching_map(L_src: LatchData, L_dst: LatchData, f_by_obj, R: ReedyStructure) -> NatMap:
    """L_c f: functorial action on latching objects; f_by_obj maps C-objects
    to the per-object delta-level components of f."""
    legs = {}
    for alpha in L_src.J.objects:
        e = R.cat.cod(alpha)
        legs[alpha] = _compose_plain(f_by_obj(e), L_dst.colres.injections[alpha])
    return induced_from_colimit(L_src.colres, legs, L_dst.ob)


def matching_map(M_src: MatchData, M_dst: MatchData, f_by_obj, R: ReedyStructure) -> NatMap:
    """M_c f: functorial action on matching objects."""
    jobs = tuple(sorted(M_dst.J.objects))
    comps = {}
    for s in M_src.ob.base.objects:
        tab = {}
        for x in M_src.ob.level.get(s, ()):
            fam = M_src.limres.coords[s][x]
            moved = [
                f_by_obj(R.cat.dom(beta)).components[s][fam[beta]] for beta in jobs
            ]
            eid = _tuple_id(moved)
            if eid not in M_dst.limres.coords[s]:
                raise PreconditionError("matching_map image is not a matching family")
            tab[x] = eid
        comps[s] = tab
    return NatMap(M_src.ob, M_dst.ob, comps)


def latching_to_matching(
    R: ReedyStructure, cd, c: str, L: LatchData, M: MatchData
) -> NatMap:
    """The canonical L_c X → M_c X, computable without X_c itself.

    A latching member (α: c→e, q) has matching coordinate at β: d→c equal to
    X(α∘β)(q); both e and d sit below c, so only lower data is used.
    """
    jobs = tuple(sorted(M.J.objects))
    comps = {}
    for s in L.ob.base.objects:
        tab = {}
        for rep in L.ob.level.get(s, ()):
            alpha, q = L.colres.member[s][rep]
            coords = []
            for beta in jobs:
                comp = R.cat.compose(alpha, beta)  # d → e
                coords.append(cd.edge(comp).components[s][q])
            eid = _tuple_id(coords)
            if eid not in M.limres.coords[s]:
                raise PreconditionError("latching member has no matching image")
            tab[rep] = eid
        comps[s] = tab
    return NatMap(L.ob, M.ob, comps)


def _compose_plain(f: NatMap, g: NatMap) -> NatMap:
    comps = {
        c: {x: g.components[c][f.components[c][x]] for x in f.src.level.get(c, ())}
        for c in f.src.base.objects
    }
    return NatMap(f.src, g.dst, comps)


# ---------------------------------------------------------------------------
# Reedy predicates


def reedy_comparison_fib(
    R: ReedyStructure, ssite: SSite, f: NatMap, c: str
):
    """The relative matching map A_c → B_c ×_{M_cB} M_cA and its target."""
    cdA, cdB = CDiagram(ssite, f.src), CDiagram(ssite, f.dst)
    MA = matching_ob(R, cdA, c)
    MB = matching_ob(R, cdB, c)
    fc = delta_restriction_map(ssite, f, c, cdA.node(c), cdB.node(c))
    f_by = lambda d: delta_restriction_map(ssite, f, d, cdA.node(d), cdB.node(d))
    Mf = matching_map(MA, MB, f_by, R)
    canB = level_to_matching(R, cdB, c, MB)
    canA = level_to_matching(R, cdA, c, MA)
    T, t1, t2 = pullback(canB, Mf)
    comps = {
        s: {
            a: _tuple_id(
                [fc.components[s][a], canA.components[s][a]]
            )
            for a in cdA.node(c).level.get(s, ())
        }
        for s in cdA.node(c).base.objects
    }
    cmp = NatMap(cdA.node(c), T, comps)
    return cmp, T


def is_reedy_fibration(
    R: ReedyStructure,
    ssite: SSite,
    f: NatMap,
    rng: tuple[int, int] | None = None,
    max_nodes: int = 10**6,
) -> bool:
    """Every relative matching map is a fibration of truncated simplicial sets."""
    plain = SSite.simplicial(ssite.N)
    for c in R.cat.objects:
        cmp, _ = reedy_comparison_fib(R, ssite, f, c)
        if not is_fibration(cmp, plain, rng, max_nodes):
            return False
    return True


def reedy_fibration_witness(R, ssite, f, rng=None, max_nodes: int = 10**6):
    plain = SSite.simplicial(ssite.N)
    for c in R.cat.objects:
        cmp, _ = reedy_comparison_fib(R, ssite, f, c)
        if not is_fibration(cmp, plain, rng, max_nodes):
            return c
    return None


def reedy_comparison_cofib(R: ReedyStructure, ssite: SSite, f: NatMap, c: str):
    """The relative latching map A_c ⊔_{L_cA} L_cB → B_c."""
    cdA, cdB = CDiagram(ssite, f.src), CDiagram(ssite, f.dst)
    LA = latching_ob(R, cdA, c)
    LB = latching_ob(R, cdB, c)
    f_by = lambda d: delta_restriction_map(ssite, f, d, cdA.node(d), cdB.node(d))
    Lf = latching_map(LA, LB, f_by, R)
    toA = latching_to_level(R, cdA, c, LA)
    P, i1, i2 = pushout(toA, Lf)  # A_c ⊔_{L_cA} L_cB
    fc = f_by(c)
    toBc = latching_to_level(R, cdB, c, LB)
    induced = pushout_induced(P, i1, i2, fc, toBc)
    return induced


def is_reedy_cofibration(R: ReedyStructure, ssite: SSite, f: NatMap) -> bool:
    return all(
        is_mono(reedy_comparison_cofib(R, ssite, f, c)) for c in R.cat.objects
    )


# ---------------------------------------------------------------------------
# generating acyclic cofibrations


def latching_subrepresentable(R: ReedyStructure, ssite: SSite, c: str):
    """The degenerate part of the representable: C-maps whose plus part is
    non-identity.  This is the latching object of the Yoneda diagram at c,
    realized as a subpresheaf of Hom_C(-, c)."""
    Yc = c_representable(ssite, c)
    chosen = {}
    for s in Yc.base.objects:
        keep = set()
        for alpha in Yc.level.get(s, ()):
            p, _ = R.factor(alpha)
            if not R.cat.is_identity(p):
                keep.add(alpha)
        chosen[s] = keep
    return subpresheaf(Yc, chosen), Yc


def generating_acyclic_cofibrations(
    R: ReedyStructure, ssite: SSite, rng: tuple[int, int] | None = None
) -> list[NatMap]:
    """The pushout products (Λⁿ_k⊗Y_c) ∪_{Λⁿ_k⊗L_cY} (Δⁿ⊗L_cY) → Δⁿ⊗Y_c."""
    rng = rng if rng is not None else (1, ssite.N)
    out = []
    for c in R.cat.objects:
        (LY, inc), Yc = latching_subrepresentable(R, ssite, c)
        for n in range(max(1, rng[0]), rng[1] + 1):
            for k in range(n + 1):
                horn, hinc = horn_ps(ssite.N, n, k)
                _, induced = pushout_product(
                    ssite, (horn, simplex_ps(ssite.N, n), hinc), inc
                )
                out.append(induced)
    return out


# ---------------------------------------------------------------------------
# elegance evidence


@dataclass
class EleganceReport:
    ok: bool
    split_epi_failures: list[str]
    latching_mono_failures: list[tuple[str, int]]
    samples_checked: int


def elegance_evidence(
    R: ReedyStructure, ssite: SSite, samples: list[Presheaf]
) -> EleganceReport:
    """Necessary-condition checks: every C⁻ map is split epic, and latching
    comparisons are monos on the supplied sample presheaves."""
    cat = R.cat
    split_failures = []
    for m in sorted(R.minus):
        if cat.is_identity(m):
            continue
        d, c = cat.dom(m), cat.cod(m)
        if not any(
            cat.compose(m, s) == cat.identities[c] for s in cat.hom(c, d)
        ):
            split_failures.append(m)
    mono_failures = []
    for i, X in enumerate(samples):
        cd = CDiagram(ssite, X)
        for c in cat.objects:
            L = latching_ob(R, cd, c)
            to_level = latching_to_level(R, cd, c, L)
            if not is_mono(to_level):
                mono_failures.append((c, i))
    return EleganceReport(
        ok=not split_failures and not mono_failures,
        split_epi_failures=split_failures,
        latching_mono_failures=mono_failures,
        samples_checked=len(samples),
    )
