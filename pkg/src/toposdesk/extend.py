"""Extension of Reedy fibrations along levelwise acyclic cofibrations by
well-founded induction on degree.

Given an elegant Reedy fixture R, a mono i: A↪B that is a levelwise weak
equivalence, and a κ-small Reedy fibration P↠A, this builds Q↠B with
i*Q ≅ P.  Per object c (ascending degree):

  (1) latching/matching data for the partial Q and the comparison objects
      T_A = A_c ×_{M_cA} M_cP and T_B = B_c ×_{M_cB} M_cQ;
  (2) the fibration P_c → T_A is classified code-wise; its latching section
      is extended along L_cP → L_cQ by bounded code search;
  (3) D = T_A ⊔_{L_cP} L_cQ, whose induced map to T_B must be a mono;
  (4) the classifier on D is extended along D ↪ T_B by bounded code search;
  (5) Q_c is the classified fibration; the new level's structure maps come
      from the matching projections and the latching section.

A truncated fibration-in-range need not be a genuine Kan fibration, so a
locally valid stage choice can dead-end later; the driver therefore
backtracks across stages, searching the whole extension problem under one
node budget.  Running out of budget aborts with the offending object and
dimension, never a silent wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cat import simplex_obj
from .errors import BoundsExceeded, PreconditionError, SmallnessError
from .lcc import SliceObject, slice_object
from .limits import (
    _tuple_id,
    is_pullback_square,
    pullback,
    pushout,
    pushout_induced,
)
from .presheaf import (
    NatMap,
    Presheaf,
    is_mono,
    nat_compose,
    validate_natmap,
    validate_presheaf,
)
from .reedy import (
    CDiagram,
    ReedyStructure,
    is_reedy_fibration,
    latching_map,
    latching_ob,
    latching_to_level,
    latching_to_matching,
    level_to_matching,
    matching_map,
    matching_ob,
)
from .simplicial import (
    LiftingProblem,
    SSite,
    delta_restriction_map,
    is_fibration,
    solve_lift,
)
from .universe import (
    element_code,
    extend_codes_along_mono,
    glued_total,
    smallness_check,
    well_order,
)


RETRACTION_BUDGET = 30000


def _retraction(mono: NatMap, max_nodes: int) -> NatMap | None:
    """A natural r with r∘mono = id, if one exists within a small budget.

    The budget is deliberately tight: a retraction is only an optimization,
    and proving nonexistence exhaustively is not worth the time.
    """
    from .limits import terminal_map, terminal_presheaf

    X, Z = mono.src, mono.dst
    T = terminal_presheaf(X.base)
    ident = NatMap(X, X, {c: {x: x for x in X.level.get(c, ())} for c in X.base.objects})
    problem = LiftingProblem(
        left=mono,
        right=terminal_map(X, T),
        top=ident,
        bottom=terminal_map(Z, T),
    )
    try:
        return solve_lift(problem, min(max_nodes, RETRACTION_BUDGET))
    except BoundsExceeded:
        return None


def _codes_along(codes: dict, r: NatMap) -> dict:
    """Precompose a codes-valued map with r (strict naturality is preserved)."""
    return {
        (c, z): codes[(c, r.components[c][z])]
        for c in r.src.base.objects
        for z in r.src.level.get(c, ())
    }


class PartialCD:
    """CDiagram duck-type over the already-processed degrees of Q."""

    def __init__(self, ssite: SSite, R: ReedyStructure):
        self.ssite = ssite
        self.R = R
        self.nodes: dict[str, Presheaf] = {}
        # primitive structure maps
        self.plus_act: dict[str, NatMap] = {}  # β: d→c in C⁺, Q_c → Q_d
        self.minus_act: dict[str, NatMap] = {}  # α: c→e in C⁻, Q_e → Q_c

    def node(self, c: str) -> Presheaf:
        return self.nodes[c]

    def edge(self, gamma: str) -> NatMap:
        """Q(γ): node(cod γ) → node(dom γ), via the (plus, minus) factorization."""
        cat = self.R.cat
        if cat.is_identity(gamma):
            X = self.nodes[cat.dom(gamma)]
            return NatMap(
                X, X, {s: {x: x for x in X.level[s]} for s in X.base.objects}
            )
        p, m = self.R.factor(gamma)
        legs = []
        if not cat.is_identity(p):
            legs.append(self.plus_act[p])
        if not cat.is_identity(m):
            legs.append(self.minus_act[m])
        if len(legs) == 2:
            return nat_compose(legs[1], legs[0])
        return legs[0]


@dataclass
class StageReport:
    c: str
    latching_mono: bool
    comparison_mono: bool
    induced_mono: bool
    square_pullback: bool
    comparison_to_q_mono: bool
    matching_fibration: bool


@dataclass(eq=False)
class ExtensionResult:
    Q: SliceObject  # Q ↠ B over the product site
    P_to_Q: NatMap  # the comparison P.total → Q.total over i
    stages: list[StageReport]

    def pullback_ok(self, i: NatMap, P: SliceObject) -> bool:
        return is_pullback_square(
            p=P.proj, q=self.P_to_Q, f=i, g=self.Q.proj
        )


def extend_reedy_fibration(
    R: ReedyStructure,
    ssite: SSite,
    i: NatMap,
    P: SliceObject,
    kappa: int,
    rng=None,
    max_nodes: int = 10**6,
    stage_width: int = 24,
    check_preconditions: bool = True,
) -> ExtensionResult:
    """Build Q ↠ B with i*Q ≅ P, per the inductive plan in the module doc.

    stage_width caps how many alternative lifts each stage offers to the
    cross-stage backtracking before giving up.
    """
    rng = rng if rng is not None else (1, ssite.N)
    cat = R.cat
    sp = SSite.simplicial(ssite.N)
    A, B = i.src, i.dst
    if check_preconditions:
        if not is_mono(i):
            raise PreconditionError("extend_reedy_fibration: i must be monic")
        if not smallness_check(P.proj, kappa):
            raise SmallnessError("extend_reedy_fibration: P is not κ-small")
        if not is_reedy_fibration(R, ssite, P.proj, rng):
            raise PreconditionError(
                "extend_reedy_fibration: P is not a Reedy fibration in range"
            )
    cdA, cdB = CDiagram(ssite, A), CDiagram(ssite, B)
    cdP = CDiagram(ssite, P.total)
    cdQ = PartialCD(ssite, R)
    PtoQ: dict[str, NatMap] = {}
    QtoB: dict[str, NatMap] = {}
    stages: dict[str, StageReport] = {}
    deepest: list = [None]

    order = sorted(cat.objects, key=lambda c: (R.degree[c], c))

    def stage_candidates(c: str):
        """Yield applied-and-rollbackable stage choices for object c."""
        Ac, Bc, Pc = cdA.node(c), cdB.node(c), cdP.node(c)
        ic = delta_restriction_map(ssite, i, c, Ac, Bc)
        projPc = delta_restriction_map(ssite, P.proj, c, Pc, Ac)

        LP = latching_ob(R, cdP, c)
        LQ = latching_ob(R, cdQ, c)
        lam = latching_map(LP, LQ, lambda d: PtoQ[d], R)
        lat_mono = is_mono(lam)

        MP = matching_ob(R, cdP, c)
        MQ = matching_ob(R, cdQ, c)
        MA = matching_ob(R, cdA, c)
        MB = matching_ob(R, cdB, c)
        Mproj = matching_map(MP, MA, lambda d: delta_restriction_map(
            ssite, P.proj, d, cdP.node(d), cdA.node(d)), R)
        MQB = matching_map(MQ, MB, lambda d: QtoB[d], R)
        # mid-induction check: the matching comparison of the partial Q over
        # B is a fibration (latching/matching preservation applies even to
        # partially defined diagrams)
        matching_fib = is_fibration(MQB, sp, rng)
        canA = level_to_matching(R, cdA, c, MA)
        canB = level_to_matching(R, cdB, c, MB)

        TA, ta_level, ta_match = pullback(canA, Mproj)
        TB, tb_level, tb_match = pullback(canB, MQB)
        canP = level_to_matching(R, cdP, c, MP)
        cp = NatMap(
            Pc,
            TA,
            {
                s: {
                    x: _tuple_id(
                        [projPc.components[s][x], canP.components[s][x]]
                    )
                    for x in Pc.level.get(s, ())
                }
                for s in Pc.base.objects
            },
        )
        Mf = matching_map(MP, MQ, lambda d: PtoQ[d], R)
        ta_to_tb = NatMap(
            TA,
            TB,
            {
                s: {
                    t: _tuple_id(
                        [
                            ic.components[s][ta_level.components[s][t]],
                            Mf.components[s][ta_match.components[s][t]],
                        ]
                    )
                    for t in TA.level.get(s, ())
                }
                for s in TA.base.objects
            },
        )
        cmp_mono = is_mono(ta_to_tb)

        # classify P_c → T_A; set up the latching lift problem
        W = well_order(slice_object(Pc, TA, cp))
        codes_TA = {
            (s, t): element_code(sp, W, s, t)
            for s in TA.base.objects
            for t in TA.level.get(s, ())
        }
        sigmaP = latching_to_level(R, cdP, c, LP)
        ellA = nat_compose(cp, sigmaP)
        codes_LP = {
            (s, z): codes_TA[(s, ellA.components[s][z])]
            for s in LP.ob.base.objects
            for z in LP.ob.level.get(s, ())
        }
        sec_LP = {}
        for s in LP.ob.base.objects:
            for z in LP.ob.level.get(s, ()):
                t = ellA.components[s][z]
                sec_LP[(s, z)] = W.orders[(s, t)].index(sigmaP.components[s][z])

        def latching_lifts():
            # a natural retraction gives an artifact-free lift; try it first
            rho = _retraction(lam, max_nodes)
            if rho is not None:
                yield (
                    _codes_along(codes_LP, rho),
                    {
                        (s, z): sec_LP[(s, rho.components[s][z])]
                        for s in LQ.ob.base.objects
                        for z in LQ.ob.level.get(s, ())
                    },
                )
            yield from extend_codes_along_mono(
                sp, lam, codes_LP, kappa, rng,
                section_on_X=sec_LP, max_nodes=max_nodes,
                first_only=False, max_results=stage_width,
            )

        for codes_LQ, sec_LQ in latching_lifts():
            # D = T_A ⊔_{L_cP} L_cQ with its induced map into T_B
            D, inTA, inLQ = pushout(ellA, lam)
            lmQ = latching_to_matching(R, cdQ, c, LQ, MQ)
            LQB = latching_ob(R, cdB, c)
            lQB = latching_map(LQ, LQB, lambda d: QtoB[d], R)
            bcQ = nat_compose(latching_to_level(R, cdB, c, LQB), lQB)
            leg2 = NatMap(
                LQ.ob,
                TB,
                {
                    s: {
                        z: _tuple_id(
                            [bcQ.components[s][z], lmQ.components[s][z]]
                        )
                        for z in LQ.ob.level.get(s, ())
                    }
                    for s in LQ.ob.base.objects
                },
            )
            induced = pushout_induced(D, inTA, inLQ, ta_to_tb, leg2)
            if not is_mono(induced):
                raise PreconditionError(
                    f"induced map D → T_B is not monic at {c}; "
                    "elegance evidence does not cover this fixture"
                )
            codes_D: dict = {}
            compatible = True
            for s in TA.base.objects:
                for t in TA.level.get(s, ()):
                    codes_D[(s, inTA.components[s][t])] = codes_TA[(s, t)]
            for s in LQ.ob.base.objects:
                for z in LQ.ob.level.get(s, ()):
                    key = (s, inLQ.components[s][z])
                    if key in codes_D and codes_D[key] != codes_LQ[(s, z)]:
                        compatible = False
                    codes_D[key] = codes_LQ[(s, z)]
            if not compatible:
                continue

            def classifier_exts(codes_D=codes_D, induced=induced):
                r = _retraction(induced, max_nodes)
                if r is not None:
                    yield (_codes_along(codes_D, r), None)
                yield from extend_codes_along_mono(
                    sp, induced, codes_D, kappa, rng,
                    max_nodes=max_nodes, first_only=False,
                    max_results=stage_width,
                )

            for codes_TB, _ in classifier_exts():
                yield (
                    c, TA, TB, tb_level, tb_match, ta_to_tb, cp, W,
                    codes_TB, leg2, sec_LQ, LQ, MQ,
                    lat_mono, cmp_mono, matching_fib, ic, projPc, Pc, Bc,
                )

    def apply_stage(data) -> None:
        (
            c, TA, TB, tb_level, tb_match, ta_to_tb, cp, W,
            codes_TB, leg2, sec_LQ, LQ, MQ,
            lat_mono, cmp_mono, matching_fib, ic, projPc, Pc, Bc,
        ) = data
        Qc_slice = glued_total(sp, TB, codes_TB)
        Qc = Qc_slice.total
        cdQ.nodes[c] = Qc
        QtoB[c] = NatMap(
            Qc,
            Bc,
            {
                s: {
                    e: tb_level.components[s][Qc_slice.proj.components[s][e]]
                    for e in Qc.level.get(s, ())
                }
                for s in Qc.base.objects
            },
        )
        ptoq_comps = {}
        for s in Pc.base.objects:
            tab = {}
            for x in Pc.level.get(s, ()):
                t = cp.components[s][x]
                tab[x] = f"{ta_to_tb.components[s][t]}#{W.orders[(s, t)].index(x)}"
            ptoq_comps[s] = tab
        PtoQ[c] = NatMap(Pc, Qc, ptoq_comps)
        sq_ok = is_pullback_square(p=projPc, q=PtoQ[c], f=ic, g=QtoB[c])
        cat_ = R.cat
        for beta in R.plus:
            if cat_.cod(beta) != c or cat_.is_identity(beta):
                continue
            d = cat_.dom(beta)
            comps = {}
            for s in Qc.base.objects:
                tab = {}
                for e in Qc.level.get(s, ()):
                    t = Qc_slice.proj.components[s][e]
                    m = tb_match.components[s][t]
                    tab[e] = MQ.limres.coords[s][m][beta]
                comps[s] = tab
            cdQ.plus_act[beta] = NatMap(Qc, cdQ.nodes[d], comps)
        for alpha in R.minus:
            if cat_.dom(alpha) != c or cat_.is_identity(alpha):
                continue
            e_obj = cat_.cod(alpha)
            inj = LQ.colres.injections[alpha]
            comps = {}
            for s in Qc.base.objects:
                tab = {}
                for q in cdQ.nodes[e_obj].level.get(s, ()):
                    z = inj.components[s][q]
                    tab[q] = f"{leg2.components[s][z]}#{sec_LQ[(s, z)]}"
                comps[s] = tab
            cdQ.minus_act[alpha] = NatMap(cdQ.nodes[e_obj], Qc, comps)
        stages[c] = StageReport(
            c, lat_mono, cmp_mono, True, sq_ok, is_mono(PtoQ[c]), matching_fib
        )

    def rollback_stage(c: str) -> None:
        cat_ = R.cat
        cdQ.nodes.pop(c, None)
        PtoQ.pop(c, None)
        QtoB.pop(c, None)
        stages.pop(c, None)
        for beta in list(cdQ.plus_act):
            if cat_.cod(beta) == c:
                del cdQ.plus_act[beta]
        for alpha in list(cdQ.minus_act):
            if cat_.dom(alpha) == c:
                del cdQ.minus_act[alpha]

    def run(k: int) -> bool:
        if k == len(order):
            return True
        c = order[k]
        if deepest[0] is None or k > deepest[0][0]:
            deepest[0] = (k, c)
        for data in stage_candidates(c):
            apply_stage(data)
            if run(k + 1):
                return True
            rollback_stage(c)
        return False

    if not run(0):
        k, c = deepest[0] if deepest[0] else (0, order[0])
        raise BoundsExceeded(
            f"no extension found; search dead-ended at object {c}",
            object=c,
            stage=k,
        )

    # assemble the site presheaf
    level, action = {}, {}
    for c in cat.objects:
        for n in range(ssite.N + 1):
            level[ssite.obj(c, n)] = cdQ.nodes[c].level[simplex_obj(n)]
    for m, (dsite, csite) in ssite.cat.morphisms.items():
        gamma, sigma = ssite.parts[m]
        gdom = ssite.C.dom(gamma)
        edge = cdQ.edge(gamma)  # node(cod γ) → node(dom γ)
        tab = {}
        sm = simplex_obj(ssite.sdim(csite))
        for x in level[csite]:
            moved = edge.components[sm][x]
            tab[x] = cdQ.nodes[gdom].action[sigma][moved]
        action[m] = tab
    Qfull = Presheaf(ssite.cat, level, action)
    bad = validate_presheaf(Qfull)
    if bad:
        raise PreconditionError(
            "assembled Q is not functorial: " + "; ".join(bad[:3])
        )
    proj = NatMap(
        Qfull,
        B,
        {
            ssite.obj(c, n): dict(QtoB[c].components[simplex_obj(n)])
            for c in cat.objects
            for n in range(ssite.N + 1)
        },
    )
    ptoq = NatMap(
        P.total,
        Qfull,
        {
            ssite.obj(c, n): dict(PtoQ[c].components[simplex_obj(n)])
            for c in cat.objects
            for n in range(ssite.N + 1)
        },
    )
    if validate_natmap(proj) or validate_natmap(ptoq):
        raise PreconditionError("assembled projection/comparison not natural")
    return ExtensionResult(
        SliceObject(Qfull, B, proj), ptoq, [stages[c] for c in order]
    )


# ---------------------------------------------------------------------------
# independent certification


@dataclass
class VerifyReport:
    ok: bool
    checks: dict[str, bool]
    failed_at: str | None


def verify_extension(
    R: ReedyStructure,
    ssite: SSite,
    i: NatMap,
    P: SliceObject,
    Q: SliceObject,
    P_to_Q: NatMap,
    kappa: int,
    rng=None,
) -> VerifyReport:
    """Certify an extension: κ-smallness, Reedy fibrancy of Q, the global
    pullback square, and the per-object pasted pullback rectangles."""
    rng = rng if rng is not None else (1, ssite.N)
    cat = R.cat
    checks: dict[str, bool] = {}
    failed_at = None
    bad_proj = validate_natmap(Q.proj)
    checks["projection_natural"] = not bad_proj
    checks["kappa_small"] = smallness_check(Q.proj, kappa)
    if bad_proj:
        # a corrupt candidate: nothing downstream is meaningful
        return VerifyReport(False, checks, "projection")
    checks["reedy_fibration"] = is_reedy_fibration(R, ssite, Q.proj, rng)
    checks["global_square_pullback"] = is_pullback_square(
        p=P.proj, q=P_to_Q, f=i, g=Q.proj
    )
    cdA, cdB = CDiagram(ssite, i.src), CDiagram(ssite, i.dst)
    cdP, cdQ = CDiagram(ssite, P.total), CDiagram(ssite, Q.total)
    for c in cat.objects:
        try:
            _verify_at(
                R, ssite, i, P, Q, P_to_Q, c, cdA, cdB, cdP, cdQ, checks
            )
        except (KeyError, PreconditionError):
            checks[f"level_{c}_pullback"] = False
            checks[f"comparison_{c}_pullback"] = False
            checks[f"tsquare_{c}_pullback"] = False
        if failed_at is None and not all(
            checks.get(f"{kind}_{c}_pullback", True)
            for kind in ("level", "comparison", "tsquare")
        ):
            failed_at = c
    checks_ok = all(checks.values())
    return VerifyReport(checks_ok, checks, failed_at)


def _verify_at(R, ssite, i, P, Q, P_to_Q, c, cdA, cdB, cdP, cdQ, checks):
        Pc, Qc = cdP.node(c), cdQ.node(c)
        ic = delta_restriction_map(ssite, i, c, cdA.node(c), cdB.node(c))
        pq_c = delta_restriction_map(ssite, P_to_Q, c, Pc, Qc)
        projP = delta_restriction_map(ssite, P.proj, c, Pc, cdA.node(c))
        projQ = delta_restriction_map(ssite, Q.proj, c, Qc, cdB.node(c))
        lvl_ok = is_pullback_square(p=projP, q=pq_c, f=ic, g=projQ)
        MP, MQ = matching_ob(R, cdP, c), matching_ob(R, cdQ, c)
        MA, MB = matching_ob(R, cdA, c), matching_ob(R, cdB, c)
        canA, canB = level_to_matching(R, cdA, c, MA), level_to_matching(R, cdB, c, MB)
        MprojA = matching_map(MP, MA, lambda d: delta_restriction_map(
            ssite, P.proj, d, cdP.node(d), cdA.node(d)), R)
        MprojB = matching_map(MQ, MB, lambda d: delta_restriction_map(
            ssite, Q.proj, d, cdQ.node(d), cdB.node(d)), R)
        TA, ta_level, ta_match = pullback(canA, MprojA)
        TB, tb_level, tb_match = pullback(canB, MprojB)
        canP = level_to_matching(R, cdP, c, MP)
        canQ = level_to_matching(R, cdQ, c, MQ)
        Mf = matching_map(MP, MQ, lambda d: delta_restriction_map(
            ssite, P_to_Q, d, cdP.node(d), cdQ.node(d)), R)
        cpP = NatMap(Pc, TA, {
            s: {x: _tuple_id([projP.components[s][x], canP.components[s][x]])
                for x in Pc.level.get(s, ())}
            for s in Pc.base.objects})
        cpQ = NatMap(Qc, TB, {
            s: {x: _tuple_id([projQ.components[s][x], canQ.components[s][x]])
                for x in Qc.level.get(s, ())}
            for s in Qc.base.objects})
        ta_to_tb = NatMap(TA, TB, {
            s: {t: _tuple_id([
                    ic.components[s][ta_level.components[s][t]],
                    Mf.components[s][ta_match.components[s][t]],
                ])
                for t in TA.level.get(s, ())}
            for s in TA.base.objects})
        lower_ok = is_pullback_square(p=pq_c, q=cpP, f=cpQ, g=ta_to_tb)
        tsq_ok = is_pullback_square(p=ta_to_tb, q=ta_level, f=tb_level, g=ic)
        checks[f"level_{c}_pullback"] = lvl_ok
        checks[f"comparison_{c}_pullback"] = lower_ok
        checks[f"tsquare_{c}_pullback"] = tsq_ok
