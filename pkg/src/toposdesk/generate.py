"""Deterministic random instance generators for the property suites.

Everything is seeded: identical (kind, seed, size) gives identical output.
Fibrations are generated by construction (glued fibration codes, products
with fibrant fibers), monos as subcomplex inclusions, weak equivalences as
sheet permutations or unit inclusions into contractible fibers — so the
generated corpus carries its advertised properties by design, and the suites
re-verify them with the predicates.
"""

from __future__ import annotations

import itertools
import random

from .cat import (
    arrow_category,
    simplex_category,
    simplex_obj,
    simplex_values,
)
from .errors import ToposError
from .lcc import SliceObject
from .limits import (
    copair,
    coproduct_many,
    initial_presheaf,
    pushout,
    subpresheaf_generated,
)
from .presheaf import (
    NatMap,
    Presheaf,
    nat_identity,
    nat_search,
    rename_elements,
    yoneda,
)
from .simplicial import SSite
from .universe import extend_codes_along_mono, glued_total


def rng_for(seed: int) -> random.Random:
    return random.Random(seed)


# ---------------------------------------------------------------------------
# fixed fibrant fibers


def discrete_sset(N: int, k: int) -> Presheaf:
    """k points as a truncated simplicial set."""
    delta = simplex_category(N)
    level = {simplex_obj(n): tuple(f"d{i}" for i in range(k)) for n in range(N + 1)}
    action = {m: {f"d{i}": f"d{i}" for i in range(k)} for m in delta.morphisms}
    return Presheaf(delta, level, action)


def iso_groupoid_nerve(N: int) -> Presheaf:
    """The nerve of the walking isomorphism, truncated: contractible and Kan.

    An n-simplex is a word of length n+1 in the two objects.
    """
    delta = simplex_category(N)
    level = {
        simplex_obj(n): tuple(
            "".join(w) for w in itertools.product("ab", repeat=n + 1)
        )
        for n in range(N + 1)
    }
    action = {}
    for m, (d, c) in delta.morphisms.items():
        vals = simplex_values(delta, m)
        action[m] = {w: "".join(w[v] for v in vals) for w in level[c]}
    return Presheaf(delta, level, action)


def fibrant_fibers(N: int) -> list[Presheaf]:
    """Fibers whose structure maps to the point are honest fibrations in
    range and whose homotopical content survives truncation."""
    return [
        discrete_sset(N, 1),
        discrete_sset(N, 2),
        discrete_sset(N, 3),
        iso_groupoid_nerve(N),
    ]


# ---------------------------------------------------------------------------
# random presheaves by cell attachment


def random_complex(ssite: SSite, rng: random.Random, cells: int, prefix: str = "g") -> Presheaf:
    """Attach `cells` representable cells along random subobjects."""
    X = initial_presheaf(ssite.cat)
    for _ in range(cells):
        s = rng.choice(ssite.cat.objects)
        rep = yoneda(ssite.cat, s)
        elems = [(c, e) for c in rep.base.objects for e in rep.level.get(c, ())]
        proper = [
            (c, e) for (c, e) in elems if e != ssite.cat.identities[s]
        ]
        k = rng.randrange(0, len(proper) + 1) if proper else 0
        seeds = rng.sample(proper, k) if k else []
        S, inc = subpresheaf_generated(rep, seeds)
        attach = None
        for comps in nat_search(S, X, rng=rng, max_results=1):
            attach = NatMap(S, X, comps)
        if attach is None:
            if S.size() == 0:
                attach = NatMap(S, X, {c: {} for c in ssite.cat.objects})
            else:
                continue
        X, _, _ = pushout(attach, inc)
    X, _ = rename_elements(X, prefix)
    return X


def random_subcomplex(X: Presheaf, rng: random.Random):
    """A random action-closed subobject with its inclusion."""
    elems = [(c, e) for c in X.base.objects for e in X.level.get(c, ())]
    k = rng.randrange(0, len(elems) + 1) if elems else 0
    seeds = rng.sample(elems, k) if k else []
    return subpresheaf_generated(X, seeds)


def random_natmap(X: Presheaf, Y: Presheaf, rng: random.Random) -> NatMap | None:
    for comps in nat_search(X, Y, rng=rng, max_results=1):
        return NatMap(X, Y, comps)
    return None


# ---------------------------------------------------------------------------
# fibrations and fiberwise maps


def product_fibration(ssite: SSite, B: Presheaf, F: Presheaf) -> SliceObject:
    """B × F → B for a fiber F given over Δ_{≤N} (constant in C)."""
    from .simplicial import tensor

    t = tensor(ssite, F, B)
    proj = NatMap(
        t.ps,
        B,
        {
            s: {pid: kx[1] for pid, kx in t.pieces[s].items()}
            for s in ssite.cat.objects
        },
    )
    return SliceObject(t.ps, B, proj)


def random_code_fibration(
    ssite: SSite, B: Presheaf, rng: random.Random, kappa: int, rng_range=None
) -> SliceObject | None:
    """A random κ-small fibration over B glued from fibration codes."""
    empty = initial_presheaf(ssite.cat)
    mono = NatMap(empty, B, {c: {} for c in ssite.cat.objects})
    for codes, _ in extend_codes_along_mono(
        ssite, mono, {}, kappa, rng_range, first_only=True, rng_shuffle=rng
    ):
        return glued_total(ssite, B, codes)
    return None


def sheet_permutation(E: Presheaf, n_sheets: int, perm: list[int]) -> NatMap:
    """Permute the sheets of an n-fold coproduct tagged "i:x"."""
    comps = {}
    for c in E.base.objects:
        tab = {}
        for e in E.level.get(c, ()):
            i, x = e.split(":", 1)
            tab[e] = f"{perm[int(i)]}:{x}"
        comps[c] = tab
    return NatMap(E, E, comps)


def disjoint_sheets(ssite: SSite, B: Presheaf, n: int):
    """The n-fold coproduct of B over itself, with the fold projection."""
    parts = [B] * n
    E, injs = coproduct_many(parts, ssite.cat)
    proj = copair([nat_identity(B)] * n, E, injs, B)
    return SliceObject(E, B, proj), injs


# ---------------------------------------------------------------------------
# specific instance families for the suites


def small_sites(N_terminal: int = 2, N_other: int = 1) -> list[SSite]:
    return [
        SSite.simplicial(N_terminal),
        SSite.product(arrow_category(), N_other),
        SSite.product(simplex_category(1), N_other),
    ]


def random_base(ssite: SSite, rng: random.Random, cells=None) -> Presheaf:
    cells = cells if cells is not None else rng.randrange(1, 4)
    X = random_complex(ssite, rng, cells)
    if X.size() == 0:
        from .simplicial import simplex_ps, sset_over_site

        X = sset_over_site(ssite, simplex_ps(ssite.N, 0))
    return X


def random_fibration_instance(ssite: SSite, rng: random.Random):
    """(B, E↠B) with the projection a fibration by construction."""
    B = random_base(ssite, rng, cells=rng.randrange(1, 3))
    fibers = fibrant_fibers(ssite.N)
    F = rng.choice(fibers)
    return product_fibration(ssite, B, F), F


def random_weq_instance(ssite: SSite, rng: random.Random):
    """(f, E1, E2 over B, expected: bool) — fiberwise map with known status."""
    B = random_base(ssite, rng, cells=rng.randrange(1, 3))
    kind = rng.choice(["perm", "unit", "fold", "not_weq", "collapse"])
    if kind == "perm":
        n = rng.choice([2, 3])
        E, _ = disjoint_sheets(ssite, B, n)
        perm = list(range(n))
        rng.shuffle(perm)
        return sheet_permutation(E.total, n, perm), E, E, True
    if kind == "unit":
        # B×pt ↪ B×J at a vertex of the groupoid nerve
        J = iso_groupoid_nerve(ssite.N)
        pt = discrete_sset(ssite.N, 1)
        E1 = product_fibration(ssite, B, pt)
        E2 = product_fibration(ssite, B, J)
        comps = {}
        for s in ssite.cat.objects:
            n = ssite.sdim(s)
            word = "a" * (n + 1)
            tab = {}
            for e in E1.total.level.get(s, ()):
                x = e[1:].split(",", 1)[1][:-1]
                tab[e] = f"({word},{x})"
            comps[s] = tab
        return NatMap(E1.total, E2.total, comps), E1, E2, True
    if kind == "collapse":
        # B×J → B×pt: the projection is still a fiberwise equivalence
        J = iso_groupoid_nerve(ssite.N)
        pt = discrete_sset(ssite.N, 1)
        E1 = product_fibration(ssite, B, J)
        E2 = product_fibration(ssite, B, pt)
        comps = {}
        for s in ssite.cat.objects:
            tab = {}
            for e in E1.total.level.get(s, ()):
                x = e[1:].split(",", 1)[1][:-1]
                tab[e] = f"(d0,{x})"
            comps[s] = tab
        return NatMap(E1.total, E2.total, comps), E1, E2, True
    if kind == "fold":
        E2, _ = disjoint_sheets(ssite, B, 1)
        E1, injs = disjoint_sheets(ssite, B, 2)
        f = NatMap(
            E1.total,
            E2.total,
            {
                c: {
                    e: "0:" + e.split(":", 1)[1]
                    for e in E1.total.level.get(c, ())
                }
                for c in ssite.cat.objects
            },
        )
        return f, E1, E2, False
    # not_weq: include one sheet into two
    E1, _ = disjoint_sheets(ssite, B, 1)
    E2, _ = disjoint_sheets(ssite, B, 2)
    f = NatMap(
        E1.total,
        E2.total,
        {
            c: {e: e for e in E1.total.level.get(c, ())}
            for c in ssite.cat.objects
        },
    )
    return f, E1, E2, False


# ---------------------------------------------------------------------------
# the keyed dispatcher used by the suites and the CLI


def generate_random(kind: str, seed: int, size: int = 2, ssite: SSite | None = None):
    """Deterministic instance generation by kind.

    kinds: presheaf, mono, natmap, fibration, reedy_fibration, weq.
    Identical (kind, seed, size) always yields identical output.
    """
    rng = rng_for(seed)
    ssite = ssite if ssite is not None else SSite.simplicial(1)
    if kind == "presheaf":
        return random_complex(ssite, rng, size)
    if kind == "mono":
        X = random_complex(ssite, rng, size)
        if X.size() == 0:
            X = random_base(ssite, rng)
        S, inc = subpresheaf_generated(
            X, [(c, x) for c in X.base.objects for x in X.level[c][:1]]
        )
        return inc
    if kind == "natmap":
        X = random_base(ssite, rng, cells=size)
        Y = random_base(ssite, rng, cells=size)
        return random_natmap(X, Y, rng)
    if kind == "fibration":
        B = random_base(ssite, rng, cells=size)
        E = random_code_fibration(ssite, B, rng, kappa=size + 1)
        if E is None:
            E = product_fibration(ssite, B, fibrant_fibers(ssite.N)[0])
        return E
    if kind == "reedy_fibration":
        # disjoint sheets are Reedy fibrations by construction: every
        # relative matching comparison has constant-sheet fibers
        from .reedy import delta_reedy

        R = delta_reedy(1)
        ssx = SSite.product(R.cat, ssite.N)
        B = random_base(ssx, rng, cells=max(1, size - 1))
        E, _ = disjoint_sheets(ssx, B, max(1, size))
        return R, ssx, E
    if kind == "weq":
        return random_weq_instance(ssite, rng)
    raise ToposError(f"unknown generation kind {kind!r}")
