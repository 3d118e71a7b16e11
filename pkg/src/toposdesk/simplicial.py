"""Truncated simplicial presheaves and the lifting-problem machinery.

Everything here is exact in the presheaf topos over C×Δ_{≤N}.  Homotopical
conclusions are reliable only up to the configured margin below N, because
dimension-(N+1) data that would constrain the top dimensions is truncated
away; predicates therefore take explicit dimension ranges and the reports
carry them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cat import (
    FiniteCategory,
    pair_mor,
    pair_obj,
    product_category,
    simplex_category,
    simplex_mor,
    simplex_obj,
    simplex_values,
    terminal_category,
)
from .errors import BaseMismatch, PreconditionError
from .lcc import SliceObject, slice_object
from .limits import pushout, pushout_induced, pullback, subpresheaf, _tuple_id
from .presheaf import (
    NatMap,
    Presheaf,
    nat_compose,
    nat_search,
    yoneda,
)

DEFAULT_MAX_NODES = 10**6


@dataclass(frozen=True)
class TruncationConfig:
    """Maximum simplicial dimension plus the advisory reliable dimension."""

    N: int
    reliable_margin: int = 2

    @property
    def reliable_dim(self) -> int:
        return max(0, self.N - self.reliable_margin)

    def fib_range(self) -> tuple[int, int]:
        return (1, self.N)

    def acyclic_range(self) -> tuple[int, int]:
        return (0, self.N)


@dataclass(eq=False)
class SSite:
    """The site C×Δ_{≤N}, with bookkeeping to split morphisms into parts.

    For the plain simplicial case (C terminal) the product is not materialized:
    the site category *is* Δ_{≤N} and the C-part of every morphism is the
    identity of the unique C-object.
    """

    C: FiniteCategory
    N: int
    delta: FiniteCategory
    cat: FiniteCategory
    plain: bool
    # site morphism -> (C-part, Δ-part)
    parts: dict[str, tuple[str, str]]
    _gen_cache: dict = field(default_factory=dict, repr=False)

    @staticmethod
    def simplicial(N: int) -> "SSite":
        delta = simplex_category(N)
        parts = {m: ("id:*", m) for m in delta.morphisms}
        return SSite(terminal_category(), N, delta, delta, True, parts)

    @staticmethod
    def product(C: FiniteCategory, N: int) -> "SSite":
        delta = simplex_category(N)
        cat = product_category(C, delta)
        parts = {
            pair_mor(f, g): (f, g)
            for f in C.morphisms
            for g in delta.morphisms
        }
        return SSite(C, N, delta, cat, False, parts)

    def obj(self, c: str, n: int) -> str:
        return simplex_obj(n) if self.plain else pair_obj(c, simplex_obj(n))

    def mor(self, cf: str, sf: str) -> str:
        return sf if self.plain else pair_mor(cf, sf)

    def c_objects(self) -> tuple[str, ...]:
        return self.C.objects

    def sdim(self, site_obj: str) -> int:
        name = site_obj if self.plain else site_obj.rsplit("|", 1)[1]
        return int(name[1:-1])


# ---------------------------------------------------------------------------
# standard objects over Δ_{≤N}


def simplex_ps(N: int, n: int) -> Presheaf:
    """Δⁿ as a truncated simplicial set (the representable at [n])."""
    if not 0 <= n <= N:
        raise PreconditionError(f"simplex dimension {n} outside [0, {N}]")
    return yoneda(simplex_category(N), simplex_obj(n))


def boundary_ps(N: int, n: int):
    """∂Δⁿ: the non-surjective maps into [n].  Empty when n = 0."""
    if not 0 <= n <= N:
        raise PreconditionError(f"boundary dimension {n} outside [0, {N}]")
    delta = simplex_category(N)
    X = simplex_ps(N, n)
    chosen = {
        c: {
            e
            for e in X.level[c]
            if set(simplex_values(delta, e)) != set(range(n + 1))
        }
        for c in X.level
    }
    return subpresheaf(X, chosen)


def horn_ps(N: int, n: int, k: int):
    """Λⁿ_k: the maps into [n] whose image together with k misses something."""
    if not 1 <= n <= N:
        raise PreconditionError(f"horn dimension {n} outside [1, {N}]")
    if not 0 <= k <= n:
        raise PreconditionError(f"horn index {k} outside [0, {n}]")
    delta = simplex_category(N)
    X = simplex_ps(N, n)
    chosen = {
        c: {
            e
            for e in X.level[c]
            if set(simplex_values(delta, e)) | {k} != set(range(n + 1))
        }
        for c in X.level
    }
    return subpresheaf(X, chosen)


def const_delta_mor(n_from: int, value: int) -> str:
    """The constant map [n_from] -> [1] at `value`."""
    return simplex_mor(n_from, 1, tuple([value] * (n_from + 1)))


# ---------------------------------------------------------------------------
# tensor and friends


@dataclass(eq=False)
class Tensored:
    ps: Presheaf
    # (site object, pair id) -> (K element, X element)
    pieces: dict[str, dict[str, tuple[str, str]]]


def tensor(ssite: SSite, K: Presheaf, X: Presheaf) -> Tensored:
    """K⊗X: the levelwise product (K_n × X(c,[n])), K a truncated sSet."""
    if K.base is not ssite.delta:
        raise BaseMismatch("tensor: left factor must live over Δ_{≤N}")
    if X.base is not ssite.cat:
        raise BaseMismatch("tensor: right factor must live over the site")
    level, pieces = {}, {}
    for s in ssite.cat.objects:
        dn = simplex_obj(ssite.sdim(s))
        pieces[s] = {
            _tuple_id([k, x]): (k, x)
            for k in K.level.get(dn, ())
            for x in X.level.get(s, ())
        }
        level[s] = tuple(sorted(pieces[s]))
    action = {}
    for m, (d, c) in ssite.cat.morphisms.items():
        _, sf = ssite.parts[m]
        action[m] = {
            pid: _tuple_id([K.action[sf][k], X.action[m][x]])
            for pid, (k, x) in pieces[c].items()
        }
    return Tensored(Presheaf(ssite.cat, level, action), pieces)


def constant_in_c(ssite: SSite, K: Presheaf) -> Presheaf:
    """K viewed over the site, constant in the C-direction; ids kept."""
    if ssite.plain:
        return K
    level = {
        s: K.level.get(simplex_obj(ssite.sdim(s)), ()) for s in ssite.cat.objects
    }
    action = {}
    for m, (d, c) in ssite.cat.morphisms.items():
        _, sf = ssite.parts[m]
        action[m] = {k: K.action[sf][k] for k in level[c]}
    return Presheaf(ssite.cat, level, action)


def c_representable(ssite: SSite, c: str) -> Presheaf:
    """Hom_C(-, c) viewed over the site, constant simplicially."""
    level = {
        s: tuple(sorted(ssite.C.hom(_c_of(ssite, s), c))) for s in ssite.cat.objects
    }
    action = {}
    for m, (d, cc) in ssite.cat.morphisms.items():
        cf, _ = ssite.parts[m]
        action[m] = {h: ssite.C.compose(h, cf) for h in level[cc]}
    return Presheaf(ssite.cat, level, action)


def _c_of(ssite: SSite, site_obj: str) -> str:
    return "*" if ssite.plain else site_obj.rsplit("|", 1)[0]


def sset_over_site(ssite: SSite, X: Presheaf) -> Presheaf:
    """Reinterpret a Δ_{≤N}-presheaf over the site (identity when plain)."""
    return X if ssite.plain else constant_in_c(ssite, X)


def delta_restriction(ssite: SSite, X: Presheaf, c: str) -> Presheaf:
    """X(c, -) as a truncated simplicial set."""
    level = {
        simplex_obj(n): X.level.get(ssite.obj(c, n), ()) for n in range(ssite.N + 1)
    }
    idc = ssite.C.identities[c]
    action = {}
    for sf, (d, e) in ssite.delta.morphisms.items():
        action[sf] = {
            x: X.action[ssite.mor(idc, sf)][x]
            for x in level[e]
        }
    return Presheaf(ssite.delta, level, action)


def delta_restriction_map(ssite: SSite, f: NatMap, c: str, Xc: Presheaf, Yc: Presheaf) -> NatMap:
    comps = {
        simplex_obj(n): {
            x: f.components[ssite.obj(c, n)][x] for x in Xc.level[simplex_obj(n)]
        }
        for n in range(ssite.N + 1)
    }
    return NatMap(Xc, Yc, comps)


# ---------------------------------------------------------------------------
# generating (acyclic) cofibrations with representable codomains


@dataclass(eq=False)
class Generator:
    dom: Tensored
    cod: Tensored
    inclusion: NatMap
    c: str
    n: int
    k: int | None  # None for boundary generators


def _generator(ssite: SSite, c: str, n: int, k: int | None) -> Generator:
    key = (c, n, k)
    if key in ssite._gen_cache:
        return ssite._gen_cache[key]
    K_cod = simplex_ps(ssite.N, n)
    if k is None:
        K_dom, _ = boundary_ps(ssite.N, n)
    else:
        K_dom, _ = horn_ps(ssite.N, n, k)
    Yc = c_representable(ssite, c)
    dom = tensor(ssite, K_dom, Yc)
    cod = tensor(ssite, K_cod, Yc)
    inclusion = NatMap(
        dom.ps,
        cod.ps,
        {s: {e: e for e in dom.ps.level[s]} for s in ssite.cat.objects},
    )
    gen = Generator(dom, cod, inclusion, c, n, k)
    ssite._gen_cache[key] = gen
    return gen


def horn_generator(ssite: SSite, c: str, n: int, k: int) -> Generator:
    return _generator(ssite, c, n, k)


def boundary_generator(ssite: SSite, c: str, n: int) -> Generator:
    return _generator(ssite, c, n, None)


# ---------------------------------------------------------------------------
# lifting problems


@dataclass(eq=False)
class LiftingProblem:
    left: NatMap  # i: X → Y
    right: NatMap  # f: E → B
    top: NatMap  # X → E
    bottom: NatMap  # Y → B

    def validate(self) -> list[str]:
        problems = []
        lhs = nat_compose(self.right, self.top)
        rhs = nat_compose(self.bottom, self.left)
        for c in self.left.src.base.objects:
            for x in self.left.src.level.get(c, ()):
                if lhs.components[c][x] != rhs.components[c][x]:
                    problems.append(f"square does not commute at {c}:{x}")
        return problems


def solve_lift(p: LiftingProblem, max_nodes: int = DEFAULT_MAX_NODES) -> NatMap | None:
    """A diagonal filler Y → E, or None when exhaustive search proves none.

    Exceeding the node budget raises BoundsExceeded; that is never a None.
    Search order is element order, first solution returned.
    """
    bad = p.validate()
    if bad:
        raise PreconditionError("; ".join(bad))
    E, Y = p.right.src, p.left.dst
    pre = {}
    for c in p.left.src.base.objects:
        for x in p.left.src.level.get(c, ()):
            pre[(c, p.left.components[c][x])] = p.top.components[c][x]
    fib = lambda c, y: [
        e
        for e in E.level.get(c, ())
        if p.right.components[c][e] == p.bottom.components[c][y]
    ]
    for comps in nat_search(
        Y, E, fiber=fib, preassigned=pre, max_results=1, max_nodes=max_nodes
    ):
        lift = NatMap(Y, E, comps)
        # soundness: both triangles must commute (cheap, asserted post-hoc)
        for c in Y.base.objects:
            for x in p.left.src.level.get(c, ()):
                assert (
                    lift.components[c][p.left.components[c][x]]
                    == p.top.components[c][x]
                )
            for y in Y.level.get(c, ()):
                assert (
                    p.right.components[c][lift.components[c][y]]
                    == p.bottom.components[c][y]
                )
        return lift
    return None


def _check_range(rng: tuple[int, int], lo_min: int, N: int) -> None:
    lo, hi = rng
    if lo < lo_min or hi > N:
        raise PreconditionError(f"range {rng} outside [{lo_min}, {N}]")


def _rlp_against_generator(
    f: NatMap, ssite: SSite, gen: Generator, max_nodes: int
):
    """All squares on gen vs f solvable?  Returns None or a witness square.

    Bottoms correspond to elements of the codomain level (the generator's
    codomain is representable); fillers are elements over them with matching
    restrictions, so no generic search is needed for the filler.
    """
    E, X = f.src, f.dst
    s_top = ssite.obj(gen.c, gen.n)
    dom_elems = [
        (s, pid, kx)
        for s in ssite.cat.objects
        for pid, kx in gen.dom.pieces[s].items()
    ]
    for x in X.level.get(s_top, ()):
        # bottom map: generator-cod element (k, γ) ↦ x·(γ,k)
        bottom_val = {}
        for s in ssite.cat.objects:
            for pid, (k, gamma) in gen.cod.pieces[s].items():
                bottom_val[(s, pid)] = X.action[ssite.mor(gamma, k)][x]
        fiber = lambda s, pid: [
            e
            for e in E.level.get(s, ())
            if f.components[s][e] == bottom_val[(s, pid)]
        ]
        for comps in nat_search(
            gen.dom.ps, E, fiber=fiber, max_nodes=max_nodes
        ):
            filler = None
            for e in E.level.get(s_top, ()):
                if f.components[s_top][e] != x:
                    continue
                if all(
                    E.action[ssite.mor(gamma, k)][e] == comps[s][pid]
                    for s, pid, (k, gamma) in dom_elems
                ):
                    filler = e
                    break
            if filler is None:
                return (x, comps)
    return None


def is_fibration(
    f: NatMap,
    ssite: SSite,
    rng: tuple[int, int] | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> bool:
    """RLP against the horn generators Λⁿ_k⊗Y_c ↪ Δⁿ⊗Y_c for n in range."""
    return fibration_witness(f, ssite, rng, max_nodes) is None


def fibration_witness(
    f: NatMap,
    ssite: SSite,
    rng: tuple[int, int] | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
):
    rng = rng if rng is not None else (1, ssite.N)
    _check_range(rng, 1, ssite.N)
    for c in ssite.c_objects():
        for n in range(max(1, rng[0]), rng[1] + 1):
            for k in range(n + 1):
                gen = horn_generator(ssite, c, n, k)
                w = _rlp_against_generator(f, ssite, gen, max_nodes)
                if w is not None:
                    return (c, n, k, w)
    return None


def is_acyclic_fibration(
    f: NatMap,
    ssite: SSite,
    rng: tuple[int, int] | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> bool:
    """RLP against the boundary generators ∂Δⁿ⊗Y_c ↪ Δⁿ⊗Y_c, n ≥ 0."""
    rng = rng if rng is not None else (0, ssite.N)
    _check_range(rng, 0, ssite.N)
    for c in ssite.c_objects():
        for n in range(rng[0], rng[1] + 1):
            gen = boundary_generator(ssite, c, n)
            if _rlp_against_generator(f, ssite, gen, max_nodes) is not None:
                return False
    return True


def pushout_product(ssite: SSite, K_incl, mono: NatMap):
    """(K' ↪ K) ⊗̂ (X ↪ Y): the induced map from the pushout corner.

    K_incl is a pair (K_dom, K_cod, delta-level inclusion natmap).
    Returns (corner presheaf, induced map into K_cod⊗Y).
    """
    K_dom, K_cod, kinc = K_incl
    X, Y = mono.src, mono.dst
    KdX = tensor(ssite, K_dom, X)
    KdY = tensor(ssite, K_dom, Y)
    KcX = tensor(ssite, K_cod, X)
    KcY = tensor(ssite, K_cod, Y)

    def tensored_map(src: Tensored, dst: Tensored, kmap, xmap) -> NatMap:
        comps = {}
        for s in ssite.cat.objects:
            tab = {}
            for pid, (k, x) in src.pieces[s].items():
                dn = simplex_obj(ssite.sdim(s))
                k2 = kmap.components[dn][k] if kmap is not None else k
                x2 = xmap.components[s][x] if xmap is not None else x
                tab[pid] = _tuple_id([k2, x2])
            comps[s] = tab
        return NatMap(src.ps, dst.ps, comps)

    left = tensored_map(KdX, KdY, None, mono)  # K'⊗X -> K'⊗Y
    top = tensored_map(KdX, KcX, kinc, None)  # K'⊗X -> K⊗X
    corner, c1, c2 = pushout(top, left)  # (K⊗X) ⊔_{K'⊗X} (K'⊗Y)
    into_KcY_from_KcX = tensored_map(KcX, KcY, None, mono)
    into_KcY_from_KdY = tensored_map(KdY, KcY, kinc, None)
    induced = pushout_induced(corner, c1, c2, into_KcY_from_KcX, into_KcY_from_KdY)
    return corner, induced


# ---------------------------------------------------------------------------
# the interval cotensor in a slice


@dataclass(eq=False)
class Cotensor:
    slice: SliceObject  # P_B E over B
    unit: NatMap  # E.total -> P (constant paths)
    ev0: NatMap  # P -> E.total
    ev1: NatMap  # P -> E.total
    exbe: tuple[Presheaf, NatMap, NatMap]  # E ×_B E and projections
    ev: NatMap  # P -> E ×_B E
    # (site object, element) -> path table {(k, α) pair id -> E element}
    tables: dict[tuple[str, str], dict[str, str]]
    index: dict[tuple[str, tuple], str]
    keys: dict[str, dict[str, tuple[str, str]]]  # per site object


def slice_tensor_interval(ssite: SSite, E: SliceObject):
    """Δ¹ ⊗_B E: the slice tensor by the interval, over the same base."""
    K = simplex_ps(ssite.N, 1)
    t = tensor(ssite, K, E.total)
    comps = {
        s: {
            pid: E.proj.components[s][x] for pid, (k, x) in t.pieces[s].items()
        }
        for s in ssite.cat.objects
    }
    proj = NatMap(t.ps, E.base, comps)
    return slice_object(t.ps, E.base, proj), t


def cotensor_interval(ssite: SSite, E: SliceObject) -> Cotensor:
    """P_B E = (E↠B)^{Δ¹}: right adjoint to the interval slice tensor.

    An element over b ∈ B(s) is a natural family on Δ¹⊗y(s) valued in E over
    the restrictions of b; the two endpoint evaluations and the constant-path
    unit come with it.
    """
    if E.base.base is not ssite.cat:
        raise BaseMismatch("cotensor_interval: slice not over the site")
    cat = ssite.cat
    B = E.base
    interval = simplex_ps(ssite.N, 1)
    reps = {s: yoneda(cat, s) for s in cat.objects}
    tens = {s: tensor(ssite, interval, reps[s]) for s in cat.objects}
    keydec = {
        s: {
            pid: kx
            for c in cat.objects
            for pid, kx in tens[s].pieces[c].items()
        }
        for s in cat.objects
    }
    # which level a key of Δ¹⊗y(s) lives at
    keylvl = {
        s: {
            pid: c
            for c in cat.objects
            for pid in tens[s].pieces[c]
        }
        for s in cat.objects
    }
    proj_comps = E.proj.components
    level = {}
    tables: dict[tuple[str, str], dict[str, str]] = {}
    index: dict[tuple[str, tuple], str] = {}
    owner: dict[tuple[str, str], str] = {}
    for s in cat.objects:
        found = []
        for b in B.level.get(s, ()):
            fiber = lambda c, pid: [
                e
                for e in E.total.level.get(c, ())
                if proj_comps[c][e]
                == B.action[keydec[s][pid][1]][b]
            ]
            for comps in nat_search(tens[s].ps, E.total, fiber=fiber):
                table = {
                    pid: comps[c][pid]
                    for c in cat.objects
                    for pid in tens[s].pieces[c]
                }
                found.append((f"P[{b}]{tuple(sorted(table.items()))}", b, table))
        short = {eid: f"p{i}" for i, (eid, _, _) in enumerate(sorted(found))}
        level[s] = tuple(sorted(short.values()))
        for eid, b, table in found:
            sid = short[eid]
            tables[(s, sid)] = table
            index[(s, tuple(sorted(table.items())))] = sid
            owner[(s, sid)] = b
    action = {}
    for m, (d, c) in cat.morphisms.items():
        tab = {}
        for sid in level[c]:
            table = tables[(c, sid)]
            newt = {}
            for pid2, (k2, alpha2) in keydec[d].items():
                src_pid = _tuple_id([k2, cat.compose(m, alpha2)])
                newt[pid2] = table[src_pid]
            tab[sid] = index[(d, tuple(sorted(newt.items())))]
        action[m] = tab
    P = Presheaf(cat, level, action)
    proj = NatMap(
        P, B, {s: {sid: owner[(s, sid)] for sid in level[s]} for s in cat.objects}
    )
    pslice = slice_object(P, B, proj)
    # constant-path unit
    unit_comps = {}
    for s in cat.objects:
        tab = {}
        for e in E.total.level.get(s, ()):
            table = {
                pid: E.total.action[alpha][e]
                for pid, (k, alpha) in keydec[s].items()
            }
            tab[e] = index[(s, tuple(sorted(table.items())))]
        unit_comps[s] = tab
    unit = NatMap(E.total, P, unit_comps)
    # endpoint evaluations
    def ev_at(vertex: int) -> NatMap:
        comps = {}
        for s in cat.objects:
            n = ssite.sdim(s)
            key = _tuple_id([const_delta_mor(n, vertex), cat.identities[s]])
            comps[s] = {sid: tables[(s, sid)][key] for sid in level[s]}
        return NatMap(P, E.total, comps)

    ev0, ev1 = ev_at(0), ev_at(1)
    EE, q1, q2 = pullback(E.proj, E.proj)
    ev = NatMap(
        P,
        EE,
        {
            s: {
                sid: _tuple_id([ev0.components[s][sid], ev1.components[s][sid]])
                for sid in level[s]
            }
            for s in cat.objects
        },
    )
    return Cotensor(pslice, unit, ev0, ev1, (EE, q1, q2), ev, tables, index, keydec)
