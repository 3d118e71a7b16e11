"""Finite (co)limits of presheaves, computed levelwise.

Limits reduce to products cut down by equalizer conditions; colimits to
coproducts quotiented by the zig-zag relation (union-find, least-id
representatives).  Binary pullbacks/pushouts get canonical composite ids so
downstream constructions are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cat import FiniteCategory
from .errors import BaseMismatch
from .presheaf import (
    NatMap,
    Presheaf,
    is_iso,
)


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # least id wins, for deterministic representatives
            lo, hi = (ra, rb) if ra < rb else (rb, ra)
            self.parent[hi] = lo

    def classes(self):
        out: dict[str, list] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(eq=False)
class DiagramShape:
    """A finite diagram of presheaves over a fixed base.

    `shape` is the indexing category J; `nodes` assigns a presheaf to each
    J-object and `edges` a natural map to every J-morphism (functorially).
    """

    shape: FiniteCategory
    nodes: dict[str, Presheaf]
    edges: dict[str, NatMap]

    def base(self) -> FiniteCategory:
        for X in self.nodes.values():
            return X.base
        raise BaseMismatch("empty diagram has no intrinsic base; pass one explicitly")


def validate_diagram(D: DiagramShape) -> list[str]:
    problems = []
    J = D.shape
    bases = {id(X.base) for X in D.nodes.values()}
    if len(bases) > 1:
        problems.append("nodes over mismatched bases")
    for m, (j, k) in J.morphisms.items():
        e = D.edges.get(m)
        if e is None:
            problems.append(f"missing edge for {m}")
            continue
        if e.src is not D.nodes[j] or e.dst is not D.nodes[k]:
            problems.append(f"edge {m} endpoints disagree with nodes")
    for o in J.objects:
        i = J.identities[o]
        e = D.edges.get(i)
        if e is not None:
            for c, comp in e.components.items():
                if any(comp[x] != x for x in comp):
                    problems.append(f"edge at id_{o} is not the identity")
                    break
    for (g, f), h in J.composition.items():
        if f in D.edges and g in D.edges and h in D.edges:
            ef, eg, eh = D.edges[f], D.edges[g], D.edges[h]
            for c in ef.src.base.objects:
                for x in ef.src.level.get(c, ()):
                    if eg.components[c][ef.components[c][x]] != eh.components[c][x]:
                        problems.append(f"diagram functoriality fails at ({g},{f})")
                        break
    return problems


def _tuple_id(parts) -> str:
    return "(" + ",".join(parts) + ")"


@dataclass(eq=False)
class LimitResult:
    apex: Presheaf
    projections: dict[str, NatMap]
    # element id -> {J-object -> coordinate}
    coords: dict[str, dict[str, dict[str, str]]]


def limit(D: DiagramShape, base: FiniteCategory | None = None) -> LimitResult:
    """Levelwise compatible families; the empty diagram gives the terminal."""
    if base is None:
        base = D.base() if D.nodes else None
    if base is None:
        raise BaseMismatch("limit of empty diagram needs an explicit base")
    J = D.shape
    jobs = tuple(sorted(J.objects))
    nonid = [
        (m, j, k) for m, (j, k) in J.morphisms.items() if not J.is_identity(m)
    ]
    level: dict[str, tuple[str, ...]] = {}
    coords: dict[str, dict[str, dict[str, str]]] = {c: {} for c in base.objects}
    for c in base.objects:
        fams = []
        pools = [D.nodes[j].level.get(c, ()) for j in jobs]
        for combo in itertools.product(*pools):
            fam = dict(zip(jobs, combo))
            if all(
                D.edges[m].components[c][fam[j]] == fam[k] for m, j, k in nonid
            ):
                fams.append(fam)
        ids = []
        for fam in fams:
            eid = _tuple_id([fam[j] for j in jobs])
            ids.append(eid)
            coords[c][eid] = fam
        if len(set(ids)) != len(ids):
            raise ValueError("limit id collision; rename inputs")
        level[c] = tuple(sorted(ids))
    action = {}
    for m, (d, c) in base.morphisms.items():
        tab = {}
        for eid in level[c]:
            fam = coords[c][eid]
            moved = [D.nodes[j].action[m][fam[j]] for j in jobs]
            tab[eid] = _tuple_id(moved)
        action[m] = tab
    apex = Presheaf(base, level, action)
    projections = {
        j: NatMap(
            apex,
            D.nodes[j],
            {
                c: {eid: coords[c][eid][j] for eid in level[c]}
                for c in base.objects
            },
        )
        for j in jobs
    }
    return LimitResult(apex, projections, coords)


@dataclass(eq=False)
class ColimitResult:
    apex: Presheaf
    injections: dict[str, NatMap]
    # representative id -> one (J-object, element) member
    member: dict[str, dict[str, tuple[str, str]]]


def colimit(D: DiagramShape, base: FiniteCategory | None = None) -> ColimitResult:
    """Levelwise quotient of the coproduct by the zig-zag relation."""
    if base is None:
        base = D.base() if D.nodes else None
    if base is None:
        raise BaseMismatch("colimit of empty diagram needs an explicit base")
    J = D.shape
    jobs = tuple(sorted(J.objects))
    tag = lambda j, x: f"{j}:{x}"
    level = {}
    member: dict[str, dict[str, tuple[str, str]]] = {}
    rep_of: dict[str, dict[tuple[str, str], str]] = {}
    for c in base.objects:
        items = [tag(j, x) for j in jobs for x in D.nodes[j].level.get(c, ())]
        origin = {
            tag(j, x): (j, x) for j in jobs for x in D.nodes[j].level.get(c, ())
        }
        uf = UnionFind(items)
        for m, (j, k) in J.morphisms.items():
            if J.is_identity(m):
                continue
            e = D.edges[m]
            for x in D.nodes[j].level.get(c, ()):
                uf.union(tag(j, x), tag(k, e.components[c][x]))
        classes = uf.classes()
        level[c] = tuple(sorted(classes))
        member[c] = {rep: origin[rep] for rep in classes}
        rep_of[c] = {origin[t]: uf.find(t) for t in items}
    action = {}
    for m, (d, c) in base.morphisms.items():
        tab = {}
        for rep in level[c]:
            j, x = member[c][rep]
            tab[rep] = rep_of[d][(j, D.nodes[j].action[m][x])]
        action[m] = tab
    apex = Presheaf(base, level, action)
    injections = {
        j: NatMap(
            D.nodes[j],
            apex,
            {
                c: {
                    x: rep_of[c][(j, x)] for x in D.nodes[j].level.get(c, ())
                }
                for c in base.objects
            },
        )
        for j in jobs
    }
    return ColimitResult(apex, injections, member)


def induced_from_colimit(res: ColimitResult, legs: dict[str, NatMap], target: Presheaf) -> NatMap:
    """The unique map out of a colimit given a compatible cocone."""
    comps = {}
    for c in res.apex.base.objects:
        tab = {}
        for rep in res.apex.level[c]:
            j, x = res.member[c][rep]
            tab[rep] = legs[j].components[c][x]
        comps[c] = tab
    return NatMap(res.apex, target, comps)


def induced_into_limit(res: LimitResult, legs: dict[str, NatMap], source: Presheaf) -> NatMap:
    """The unique map into a limit given a compatible cone."""
    jobs = tuple(sorted(res.projections))
    comps = {}
    for c in source.base.objects:
        tab = {}
        for x in source.level.get(c, ()):
            eid = _tuple_id([legs[j].components[c][x] for j in jobs])
            if eid not in res.coords[c]:
                raise ValueError(f"cone at {c}:{x} is not compatible")
            tab[x] = eid
        comps[c] = tab
    return NatMap(source, res.apex, comps)


# ---------------------------------------------------------------------------
# constant presheaves and canonical binary (co)limits


def initial_presheaf(base: FiniteCategory) -> Presheaf:
    return Presheaf(
        base,
        {c: () for c in base.objects},
        {m: {} for m in base.morphisms},
    )


def terminal_presheaf(base: FiniteCategory) -> Presheaf:
    return Presheaf(
        base,
        {c: ("()",) for c in base.objects},
        {m: {"()": "()"} for m in base.morphisms},
    )


def terminal_map(X: Presheaf, T: Presheaf | None = None) -> NatMap:
    T = T if T is not None else terminal_presheaf(X.base)
    one = {c: T.level[c][0] for c in X.base.objects}
    return NatMap(
        X, T, {c: {x: one[c] for x in X.level.get(c, ())} for c in X.base.objects}
    )


def initial_map(X: Presheaf, I: Presheaf | None = None) -> NatMap:
    I = I if I is not None else initial_presheaf(X.base)
    return NatMap(I, X, {c: {} for c in X.base.objects})


def product2(X: Presheaf, Y: Presheaf):
    """Binary product with canonical pair ids (x,y)."""
    base = X.base
    level, action = {}, {}
    for c in base.objects:
        level[c] = tuple(
            sorted(
                _tuple_id([x, y])
                for x in X.level.get(c, ())
                for y in Y.level.get(c, ())
            )
        )
    pieces = {
        c: {
            _tuple_id([x, y]): (x, y)
            for x in X.level.get(c, ())
            for y in Y.level.get(c, ())
        }
        for c in base.objects
    }
    for m, (d, c) in base.morphisms.items():
        action[m] = {
            e: _tuple_id([X.action[m][p[0]], Y.action[m][p[1]]])
            for e, p in pieces[c].items()
        }
    P = Presheaf(base, level, action)
    p1 = NatMap(P, X, {c: {e: p[0] for e, p in pieces[c].items()} for c in base.objects})
    p2 = NatMap(P, Y, {c: {e: p[1] for e, p in pieces[c].items()} for c in base.objects})
    return P, p1, p2


def pair_into_product(f: NatMap, g: NatMap, P: Presheaf) -> NatMap:
    """⟨f,g⟩: W -> X×Y for f: W→X, g: W→Y and P the canonical product."""
    comps = {
        c: {
            w: _tuple_id([f.components[c][w], g.components[c][w]])
            for w in f.src.level.get(c, ())
        }
        for c in f.src.base.objects
    }
    return NatMap(f.src, P, comps)


def pullback(f: NatMap, g: NatMap):
    """Canonical pullback of X --f--> Z <--g-- Y: pairs (x,y) with f(x)=g(y)."""
    if f.dst is not g.dst and f.dst.level != g.dst.level:
        raise BaseMismatch("pullback cospan targets disagree")
    X, Y = f.src, g.src
    base = X.base
    level, pieces = {}, {}
    for c in base.objects:
        pairs = [
            (x, y)
            for x in X.level.get(c, ())
            for y in Y.level.get(c, ())
            if f.components[c][x] == g.components[c][y]
        ]
        pieces[c] = {_tuple_id([x, y]): (x, y) for x, y in pairs}
        level[c] = tuple(sorted(pieces[c]))
    action = {}
    for m, (d, c) in base.morphisms.items():
        action[m] = {
            e: _tuple_id([X.action[m][p[0]], Y.action[m][p[1]]])
            for e, p in pieces[c].items()
        }
    P = Presheaf(base, level, action)
    p1 = NatMap(P, X, {c: {e: p[0] for e, p in pieces[c].items()} for c in base.objects})
    p2 = NatMap(P, Y, {c: {e: p[1] for e, p in pieces[c].items()} for c in base.objects})
    return P, p1, p2


def coproduct2(X: Presheaf, Y: Presheaf):
    """Binary coproduct with tags 0:x / 1:y."""
    base = X.base
    level = {
        c: tuple(
            sorted(
                [f"0:{x}" for x in X.level.get(c, ())]
                + [f"1:{y}" for y in Y.level.get(c, ())]
            )
        )
        for c in base.objects
    }
    action = {}
    for m, (d, c) in base.morphisms.items():
        tab = {}
        for x, v in X.action[m].items():
            tab[f"0:{x}"] = f"0:{v}"
        for y, v in Y.action[m].items():
            tab[f"1:{y}"] = f"1:{v}"
        action[m] = tab
    P = Presheaf(base, level, action)
    i1 = NatMap(X, P, {c: {x: f"0:{x}" for x in X.level.get(c, ())} for c in base.objects})
    i2 = NatMap(Y, P, {c: {y: f"1:{y}" for y in Y.level.get(c, ())} for c in base.objects})
    return P, i1, i2


def coproduct_many(Xs: list[Presheaf], base: FiniteCategory):
    """n-ary coproduct with tags "{index}:{x}"; returns (apex, injections)."""
    level = {
        c: tuple(
            sorted(
                f"{i}:{x}" for i, X in enumerate(Xs) for x in X.level.get(c, ())
            )
        )
        for c in base.objects
    }
    action = {}
    for m, (d, c) in base.morphisms.items():
        tab = {}
        for i, X in enumerate(Xs):
            for x, v in X.action[m].items():
                tab[f"{i}:{x}"] = f"{i}:{v}"
        action[m] = tab
    P = Presheaf(base, level, action)
    injections = [
        NatMap(
            X,
            P,
            {c: {x: f"{i}:{x}" for x in X.level.get(c, ())} for c in base.objects},
        )
        for i, X in enumerate(Xs)
    ]
    return P, injections


def copair(maps: list[NatMap], P: Presheaf, injections: list[NatMap], target: Presheaf) -> NatMap:
    """[f_i]: ⊔X_i → T from compatible legs through a canonical coproduct."""
    comps: dict[str, dict[str, str]] = {c: {} for c in target.base.objects}
    for mp, inj in zip(maps, injections):
        for c in target.base.objects:
            for x in mp.src.level.get(c, ()):
                comps[c][inj.components[c][x]] = mp.components[c][x]
    return NatMap(P, target, comps)


def pushout(f: NatMap, g: NatMap):
    """Canonical pushout of X <--f-- Z --g--> Y, least-id representatives."""
    if f.src is not g.src and f.src.level != g.src.level:
        raise BaseMismatch("pushout span sources disagree")
    X, Y, Z = f.dst, g.dst, f.src
    base = X.base
    level, member, rep_of = {}, {}, {}
    for c in base.objects:
        items = [f"0:{x}" for x in X.level.get(c, ())] + [
            f"1:{y}" for y in Y.level.get(c, ())
        ]
        uf = UnionFind(items)
        for z in Z.level.get(c, ()):
            uf.union(f"0:{f.components[c][z]}", f"1:{g.components[c][z]}")
        classes = uf.classes()
        level[c] = tuple(sorted(classes))
        member[c] = {}
        for rep, mem in classes.items():
            member[c][rep] = mem
        rep_of[c] = {t: uf.find(t) for t in items}
    action = {}
    for m, (d, c) in base.morphisms.items():
        tab = {}
        for rep in level[c]:
            t = rep  # the representative is itself a member tag
            side, x = t[0], t[2:]
            moved = (
                f"0:{X.action[m][x]}" if side == "0" else f"1:{Y.action[m][x]}"
            )
            tab[rep] = rep_of[d][moved]
        action[m] = tab
    P = Presheaf(base, level, action)
    i1 = NatMap(
        X, P, {c: {x: rep_of[c][f"0:{x}"] for x in X.level.get(c, ())} for c in base.objects}
    )
    i2 = NatMap(
        Y, P, {c: {y: rep_of[c][f"1:{y}"] for y in Y.level.get(c, ())} for c in base.objects}
    )
    return P, i1, i2


def pushout_induced(P: Presheaf, i1: NatMap, i2: NatMap, u: NatMap, v: NatMap) -> NatMap:
    """Map out of a canonical pushout given legs u (from X) and v (from Y)."""
    comps = {}
    for c in P.base.objects:
        tab = {}
        for x, rep in i1.components[c].items():
            tab[rep] = u.components[c][x]
        for y, rep in i2.components[c].items():
            if rep in tab and tab[rep] != v.components[c][y]:
                raise ValueError(f"pushout legs disagree at {c}:{rep}")
            tab[rep] = v.components[c][y]
        comps[c] = tab
    return NatMap(P, u.dst, comps)


def equalizer(f: NatMap, g: NatMap):
    """Subpresheaf of the common source where f = g; ids kept."""
    X = f.src
    base = X.base
    level = {
        c: tuple(
            x
            for x in X.level.get(c, ())
            if f.components[c][x] == g.components[c][x]
        )
        for c in base.objects
    }
    action = {
        m: {x: X.action[m][x] for x in level[base.cod(m)]}
        for m in base.morphisms
    }
    E = Presheaf(base, level, action)
    inc = NatMap(E, X, {c: {x: x for x in level[c]} for c in base.objects})
    return E, inc


def coequalizer(f: NatMap, g: NatMap):
    """Quotient of the common target by f(x) ~ g(x); least-id representatives."""
    Y = f.dst
    base = Y.base
    level, rep_of = {}, {}
    for c in base.objects:
        uf = UnionFind(list(Y.level.get(c, ())))
        for x in f.src.level.get(c, ()):
            uf.union(f.components[c][x], g.components[c][x])
        classes = uf.classes()
        level[c] = tuple(sorted(classes))
        rep_of[c] = {y: uf.find(y) for y in Y.level.get(c, ())}
    action = {
        m: {rep: rep_of[d][Y.action[m][rep]] for rep in level[c]}
        for m, (d, c) in base.morphisms.items()
    }
    Q = Presheaf(base, level, action)
    q = NatMap(Y, Q, {c: dict(rep_of[c]) for c in base.objects})
    return Q, q


# ---------------------------------------------------------------------------
# subobjects and images


def subpresheaf(X: Presheaf, chosen: dict[str, set[str]]):
    """The subpresheaf on `chosen` elements (must be action-closed); ids kept."""
    base = X.base
    level = {
        c: tuple(x for x in X.level.get(c, ()) if x in chosen.get(c, set()))
        for c in base.objects
    }
    action = {}
    for m, (d, c) in base.morphisms.items():
        tab = {}
        for x in level[c]:
            y = X.action[m][x]
            if y not in chosen.get(d, set()):
                raise ValueError(f"chosen elements not action-closed at {m}:{x}")
            tab[x] = y
        action[m] = tab
    S = Presheaf(base, level, action)
    inc = NatMap(S, X, {c: {x: x for x in level[c]} for c in base.objects})
    return S, inc


def subpresheaf_generated(X: Presheaf, seeds):
    """Close a set of (object, element) seeds under all actions."""
    chosen: dict[str, set[str]] = {c: set() for c in X.base.objects}
    stack = list(seeds)
    while stack:
        c, x = stack.pop()
        if x in chosen[c]:
            continue
        chosen[c].add(x)
        for m, (d, cc) in X.base.morphisms.items():
            if cc == c:
                stack.append((d, X.action[m][x]))
    return subpresheaf(X, chosen)


def image_subpresheaf(f: NatMap):
    """Image of f as a subpresheaf of the target."""
    chosen = {
        c: set(f.components[c][x] for x in f.src.level.get(c, ()))
        for c in f.src.base.objects
    }
    return subpresheaf(f.dst, chosen)


# ---------------------------------------------------------------------------
# universal-property predicates


def is_pullback_square(p: NatMap, q: NatMap, f: NatMap, g: NatMap) -> bool:
    """Is W --p--> X, W --q--> Y a pullback of X --f--> Z <--g-- Y?

    Checked by comparing W with the canonical pullback via the induced map.
    """
    for c in p.src.base.objects:
        for w in p.src.level.get(c, ()):
            if f.components[c][p.components[c][w]] != g.components[c][q.components[c][w]]:
                return False
    P, _, _ = pullback(f, g)
    seen = {c: set() for c in p.src.base.objects}
    for c in p.src.base.objects:
        for w in p.src.level.get(c, ()):
            eid = _tuple_id([p.components[c][w], q.components[c][w]])
            if eid not in P.level[c] or eid in seen[c]:
                return False
            seen[c].add(eid)
        if len(seen[c]) != len(P.level[c]):
            return False
    return True


def is_pushout_square(f: NatMap, g: NatMap, u: NatMap, v: NatMap) -> bool:
    """Is X --u--> W <--v-- Y a pushout of X <--f-- Z --g--> Y?"""
    for c in f.src.base.objects:
        for z in f.src.level.get(c, ()):
            if u.components[c][f.components[c][z]] != v.components[c][g.components[c][z]]:
                return False
    P, i1, i2 = pushout(f, g)
    try:
        cmp = pushout_induced(P, i1, i2, u, v)
    except ValueError:
        return False
    return is_iso(cmp)


def is_coproduct_cocone(maps: list[NatMap]) -> bool:
    """Do the given maps X_i -> Z exhibit Z as the coproduct of their sources?"""
    if not maps:
        return False
    Z = maps[0].dst
    for c in Z.base.objects:
        seen = set()
        for mp in maps:
            for x in mp.src.level.get(c, ()):
                y = mp.components[c][x]
                if y in seen:
                    return False
                seen.add(y)
        if seen != set(Z.level.get(c, ())):
            return False
    return True
