"""Slice categories and the locally cartesian closed structure.

Σ_f is composition, f* the canonical pullback, Π_f the dependent product.
Π-elements are encoded by their assignment tables (a section over each key
pair), deduplicated and compressed to short ids; the tables survive in the
returned result so adjunction transposes stay computable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BaseMismatch, PreconditionError
from .presheaf import (
    NatMap,
    Presheaf,
    nat_compose,
    nat_identity,
    nat_search,
    is_iso,
    validate_natmap,
    yoneda,
    yoneda_classify,
)
from .limits import pullback, _tuple_id


@dataclass(eq=False)
class SliceObject:
    """An object of M/B: a presheaf with a chosen map to the base."""

    total: Presheaf
    base: Presheaf
    proj: NatMap

    def fiber(self, c: str, b: str) -> tuple[str, ...]:
        return tuple(
            e for e in self.total.level.get(c, ()) if self.proj.components[c][e] == b
        )


def slice_object(total: Presheaf, base: Presheaf, proj: NatMap) -> SliceObject:
    if proj.src is not total or proj.dst is not base:
        raise BaseMismatch("projection endpoints disagree with slice data")
    return SliceObject(total, base, proj)


def identity_slice(B: Presheaf) -> SliceObject:
    return SliceObject(B, B, nat_identity(B))


def slice_maps(E1: SliceObject, E2: SliceObject, **kw) -> list[NatMap]:
    """All maps E1 -> E2 over the shared base."""
    if E1.base is not E2.base and E1.base.level != E2.base.level:
        raise BaseMismatch("slice hom between different bases")
    p2 = E2.proj.components
    fiber = lambda c, x: [
        e
        for e in E2.total.level.get(c, ())
        if p2[c][e] == E1.proj.components[c][x]
    ]
    return [
        NatMap(E1.total, E2.total, comps)
        for comps in nat_search(E1.total, E2.total, fiber=fiber, **kw)
    ]


def sections_of(E: SliceObject, **kw) -> list[NatMap]:
    """All sections of proj: maps B -> total with proj∘s = id."""
    return slice_maps(identity_slice(E.base), E, **kw)


def slice_product(E1: SliceObject, E2: SliceObject):
    """E1 ×_B E2 with its two projections, as a slice over B."""
    P, p1, p2 = pullback(E1.proj, E2.proj)
    proj = nat_compose(E1.proj, p1)
    return SliceObject(P, E1.base, proj), p1, p2


# ---------------------------------------------------------------------------
# Σ_f and f*


def sigma(f: NatMap, E: SliceObject) -> SliceObject:
    """Compose with f: A→B; the total space is unchanged."""
    if E.base is not f.src and E.base.level != f.src.level:
        raise BaseMismatch("sigma: slice not over dom(f)")
    return SliceObject(E.total, f.dst, nat_compose(f, E.proj))


@dataclass(eq=False)
class PullbackAlong:
    slice: SliceObject  # f*E over A
    to_total: NatMap  # f*E.total -> E.total
    # pair decoding: (object, pair id) -> (a, e)
    pieces: dict[str, dict[str, tuple[str, str]]]


def pullback_along(f: NatMap, E: SliceObject) -> PullbackAlong:
    """Canonical pullback of E along f: A→B; elements are pairs (a, e)."""
    if E.base is not f.dst and E.base.level != f.dst.level:
        raise BaseMismatch("pullback_along: slice not over cod(f)")
    P, p1, p2 = pullback(f, E.proj)
    pieces = {
        c: {
            eid: (p1.components[c][eid], p2.components[c][eid])
            for eid in P.level.get(c, ())
        }
        for c in P.base.objects
    }
    return PullbackAlong(SliceObject(P, f.src, p1), p2, pieces)


# ---------------------------------------------------------------------------
# Π_f


def _canon_table(table: dict) -> tuple:
    return tuple(sorted(table.items()))


@dataclass(eq=False)
class PiResult:
    slice: SliceObject  # Π_f E over B
    f: NatMap
    E: SliceObject
    # (object, element) -> assignment table {key pair id "(α,a)" -> E element}
    tables: dict[tuple[str, str], dict[str, str]]
    # (object, base element, canonical table) -> element id
    index: dict[tuple[str, str, tuple], str]
    # per (object, base element): key decoding "(α,a)" -> (α, a)
    keys: dict[tuple[str, str], dict[str, tuple[str, str]]]


def pi(f: NatMap, E: SliceObject) -> PiResult:
    """Dependent product Π_f E over B for f: A→B, E a slice over A.

    An element over b ∈ B(s) is a natural section assigning, to each key
    (α: s'→s, a ∈ A(s') with f(a) = b·α), an element of E over a, compatibly
    with restriction.  Keys form the presheaf y(s) ×_B A, so sections are
    found by the generic natural-map search.
    """
    if E.base is not f.src and E.base.level != f.src.level:
        raise BaseMismatch("pi: slice not over dom(f)")
    A, B = f.src, f.dst
    base = B.base
    proj_comps = E.proj.components
    tables: dict[tuple[str, str], dict[str, str]] = {}
    index: dict[tuple[str, str, tuple], str] = {}
    keydec: dict[tuple[str, str], dict[str, tuple[str, str]]] = {}
    level: dict[str, tuple[str, ...]] = {}
    owner: dict[tuple[str, str], str] = {}  # (s, element id) -> base element
    reps = {s: yoneda(base, s) for s in base.objects}
    for s in base.objects:
        found: list[tuple[str, str, dict]] = []
        for b in B.level.get(s, ()):
            bhat = yoneda_classify(B, reps[s], s, b)
            Keys, k1, k2 = pullback(bhat, f)  # elements (α, a)
            dec = {
                c: {
                    kid: (k1.components[c][kid], k2.components[c][kid])
                    for kid in Keys.level.get(c, ())
                }
                for c in base.objects
            }
            fiber = lambda c, kid, dec=dec: [
                e
                for e in E.total.level.get(c, ())
                if proj_comps[c][e] == dec[c][kid][1]
            ]
            for comps in nat_search(Keys, E.total, fiber=fiber):
                table = {
                    kid: comps[c][kid]
                    for c in base.objects
                    for kid in Keys.level.get(c, ())
                }
                eid = f"S[{b}]{_canon_table(table)}"
                found.append((eid, b, table))
                keydec[(s, eid)] = {
                    kid: dec[c][kid]
                    for c in base.objects
                    for kid in Keys.level.get(c, ())
                }
        short = {eid: f"s{i}" for i, (eid, _, _) in enumerate(sorted(found))}
        level[s] = tuple(sorted(short.values()))
        for eid, b, table in found:
            sid = short[eid]
            tables[(s, sid)] = table
            index[(s, b, _canon_table(table))] = sid
            owner[(s, sid)] = b
            keydec[(s, sid)] = keydec.pop((s, eid))
    action = {}
    for m, (d, c) in base.morphisms.items():
        tab = {}
        for sid in level[c]:
            b2 = B.action[m][owner[(c, sid)]]
            table = tables[(c, sid)]
            # restrict: target key (α', a) pulls its value from (m∘α', a)
            newt = {
                kid2: table[src_kid]
                for kid2, src_kid in _restriction_plan(base, m, keydec[(c, sid)]).items()
            }
            tab[sid] = index[(d, b2, _canon_table(newt))]
        action[m] = tab
    P = Presheaf(base, level, action)
    proj = NatMap(
        P, B, {s: {sid: owner[(s, sid)] for sid in level[s]} for s in base.objects}
    )
    return PiResult(SliceObject(P, B, proj), f, E, tables, index, keydec)


def _restriction_plan(base, m, dec) -> dict[str, str]:
    """For restriction along m: d→c, map each target key id to its source key id.

    The source decoding holds every key (α, a) with α into c; the target key
    (α', a) for α' into d pulls from (m∘α', a), present by construction.
    """
    seen = {(alpha, a): kid for kid, (alpha, a) in dec.items()}
    out = {}
    for alphap in base.morphisms_into(base.dom(m)):
        comp = base.compose(m, alphap)
        for (alpha, a), kid in seen.items():
            if alpha == comp:
                out[_tuple_id([alphap, a])] = kid
    return out


def pi_counit(res: PiResult) -> tuple[PullbackAlong, NatMap]:
    """ε: f*(Π_f E) -> E over A; evaluation of the table at the identity key."""
    pb = pullback_along(res.f, res.slice)
    base = res.f.src.base
    comps = {}
    for c in base.objects:
        tab = {}
        for pid, (a, sid) in pb.pieces[c].items():
            table = res.tables[(c, sid)]
            tab[pid] = table[_tuple_id([base.identities[c], a])]
        comps[c] = tab
    return pb, NatMap(pb.slice.total, res.E.total, comps)


def pi_transpose_in(
    res: PiResult, q: NatMap, fstar_q: PullbackAlong, psi: NatMap
) -> NatMap:
    """Transpose ψ: f*X → E over A into φ: X → Π_f E over B.

    q: X→B presents the slice, fstar_q its pullback along f, ψ the slice map.
    """
    base = q.src.base
    B = q.dst
    pair_index = {
        c: {pair: pid for pid, pair in fstar_q.pieces[c].items()}
        for c in base.objects
    }
    comps = {}
    for s in base.objects:
        tab = {}
        for x in q.src.level.get(s, ()):
            b = q.components[s][x]
            table = {}
            for kid, (alpha, a) in _keys_over(res, s, b).items():
                xa = q.src.action[alpha][x]
                c2 = base.dom(alpha)
                pid = pair_index[c2][(a, xa)]
                table[kid] = psi.components[c2][pid]
            sid = res.index.get((s, b, _canon_table(table)))
            if sid is None:
                raise PreconditionError("transpose produced a non-section table")
            tab[x] = sid
        comps[s] = tab
    return NatMap(q.src, res.slice.total, comps)


def _keys_over(res: PiResult, s: str, b: str) -> dict[str, tuple[str, str]]:
    """Key decoding for base element b at s (shared by all sections over b)."""
    for (s2, sid), dec in res.keys.items():
        if s2 == s and res.slice.proj.components[s][sid] == b:
            return dec
    # no section over b exists: rebuild the key set directly
    base = res.slice.base.base
    B, f = res.slice.base, res.f
    rep = yoneda(base, s)
    bhat = yoneda_classify(B, rep, s, b)
    Keys, k1, k2 = pullback(bhat, f)
    return {
        kid: (k1.components[c][kid], k2.components[c][kid])
        for c in base.objects
        for kid in Keys.level.get(c, ())
    }


def pi_transpose_out(res: PiResult, q: NatMap, fstar_q: PullbackAlong, phi: NatMap) -> NatMap:
    """Transpose φ: X → Π_f E over B into ψ: f*X → E over A."""
    base = q.src.base
    comps = {}
    for c in base.objects:
        tab = {}
        for pid, (a, x) in fstar_q.pieces[c].items():
            sid = phi.components[c][x]
            table = res.tables[(c, sid)]
            tab[pid] = table[_tuple_id([base.identities[c], a])]
        comps[c] = tab
    return NatMap(fstar_q.slice.total, res.E.total, comps)


def pi_map(res: PiResult, res2: PiResult, w: NatMap) -> NatMap:
    """Π_f applied to w: E → E' over A: postcompose every table with w."""
    base = res.slice.base.base
    comps = {}
    for s in base.objects:
        tab = {}
        for sid in res.slice.total.level.get(s, ()):
            b = res.slice.proj.components[s][sid]
            table = res.tables[(s, sid)]
            dec = res.keys[(s, sid)]
            newt = {
                kid: w.components[base.dom(dec[kid][0])][e]
                for kid, e in table.items()
            }
            tab[sid] = res2.index[(s, b, _canon_table(newt))]
        comps[s] = tab
    return NatMap(res.slice.total, res2.slice.total, comps)


def pi_unit(res: PiResult, q: NatMap, fstar_q: PullbackAlong) -> NatMap:
    """η: X → Π_f f*X over B, the unit of f* ⊣ Π_f at the slice q: X→B."""
    return pi_transpose_in(res, q, fstar_q, nat_identity(fstar_q.slice.total))


# ---------------------------------------------------------------------------
# local exponentials


@dataclass(eq=False)
class ExpResult:
    fun: SliceObject  # Fun_B(E1, E2) over B
    pi_res: PiResult
    pb_res: PullbackAlong  # p1*E2 over E1.total
    fun_x_e1: tuple[Presheaf, NatMap, NatMap]  # Fun ×_B E1 and its projections
    universal: NatMap  # Fun ×_B E1 -> E2.total
    fun_x_e2: tuple[Presheaf, NatMap, NatMap]
    h: NatMap  # Fun ×_B E1 -> Fun ×_B E2 over Fun


def local_exp(E1: SliceObject, E2: SliceObject) -> ExpResult:
    """Fun_B(E1,E2) = Π_{p1}(p1* E2), with the universal evaluation map."""
    if E1.base is not E2.base and E1.base.level != E2.base.level:
        raise BaseMismatch("local_exp: bases disagree")
    p1 = E1.proj
    pb = pullback_along(p1, E2)
    pires = pi(p1, pb.slice)
    fun = pires.slice
    FE1, f1, f2 = pullback(fun.proj, E1.proj)
    base = E1.base.base
    comps = {}
    for c in base.objects:
        tab = {}
        for pid in FE1.level.get(c, ()):
            phi, e1 = f1.components[c][pid], f2.components[c][pid]
            table = pires.tables[(c, phi)]
            val = table[_tuple_id([base.identities[c], e1])]  # a (e1', e2) pair
            tab[pid] = pb.to_total.components[c][val]
        comps[c] = tab
    universal = NatMap(FE1, E2.total, comps)
    FE2, g1, g2 = pullback(fun.proj, E2.proj)
    hcomps = {
        c: {
            pid: _tuple_id([f1.components[c][pid], universal.components[c][pid]])
            for pid in FE1.level.get(c, ())
        }
        for c in base.objects
    }
    h = NatMap(FE1, FE2, hcomps)
    return ExpResult(fun, pires, pb, (FE1, f1, f2), universal, (FE2, g1, g2), h)


def exp_transpose(res: ExpResult, w: NatMap) -> NatMap:
    """Exponential transpose of w: E1 → E2 over B: the map k: B → Fun_B(E1,E2)
    whose pullback of the universal family is w.
    """
    p1 = res.pi_res.f  # E1.total -> B
    base = p1.src.base
    B = p1.dst
    q = nat_identity(B)
    # p1*(B over B) has pairs (e1, b) with p1(e1) = b
    fstar_q = pullback_along(p1, identity_slice(B))
    psi_comps = {
        c: {
            pid: _tuple_id(
                [
                    fstar_q.pieces[c][pid][0],
                    w.components[c][fstar_q.pieces[c][pid][0]],
                ]
            )
            for pid in fstar_q.slice.total.level.get(c, ())
        }
        for c in base.objects
    }
    psi = NatMap(fstar_q.slice.total, res.pb_res.slice.total, psi_comps)
    return pi_transpose_in(res.pi_res, q, fstar_q, psi)


# ---------------------------------------------------------------------------
# Beck–Chevalley


def beck_chevalley_check(g: NatMap, f: NatMap, E: SliceObject) -> bool:
    """Does the canonical map g*(Π_f E) → Π_{g*f}(pulled-back E) invert?

    g: A→B, f: C→B, E a slice over C.
    """
    P, pA, pC = pullback(g, f)
    pires = pi(f, E)
    lhs = pullback_along(g, pires.slice)
    Estar = pullback_along(pC, E)
    rhs = pi(pA, Estar.slice)
    base = g.src.base
    pair_index = {
        c: {pair: pid for pid, pair in Estar.pieces[c].items()} for c in base.objects
    }
    P_index = {
        c: {}
        for c in base.objects
    }
    for c in base.objects:
        for pid in P.level.get(c, ()):
            a = pA.components[c][pid]
            cc = pC.components[c][pid]
            P_index[c][(a, cc)] = pid
    comps = {}
    for s in base.objects:
        tab = {}
        for lid in lhs.slice.total.level.get(s, ()):
            a, phi = lhs.pieces[s][lid]
            src_table = pires.tables[(s, phi)]
            src_dec = pires.keys[(s, phi)]
            src_lookup = {dec: kid for kid, dec in src_dec.items()}
            newt = {}
            for kid2, (alpha, p) in _keys_over(rhs, s, a).items():
                c2 = base.dom(alpha)
                a2 = pA.components[c2][p]
                cc2 = pC.components[c2][p]
                e = src_table[src_lookup[(alpha, cc2)]]
                newt[kid2] = pair_index[c2][(p, e)]
            sid = rhs.index.get((s, a, _canon_table(newt)))
            if sid is None:
                return False
            tab[lid] = sid
        comps[s] = tab
    cmp = NatMap(lhs.slice.total, rhs.slice.total, comps)
    return is_iso(cmp) and not validate_natmap(cmp)
