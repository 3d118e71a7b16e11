"""Finite-set-valued presheaves and natural transformations.

Element ids are strings, unique per level.  Presheaf equality is never by id
coincidence: use `find_iso` to compare up to bijective renaming.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cat import FiniteCategory
from .errors import BaseMismatch, BoundsExceeded, UnknownObject


@dataclass(eq=False)
class Presheaf:
    base: FiniteCategory
    # object id -> sorted tuple of element ids
    level: dict[str, tuple[str, ...]]
    # morphism id -> {element of level(cod) -> element of level(dom)}
    # (contravariance: α: c→d acts level(d) -> level(c))
    action: dict[str, dict[str, str]]

    def act(self, m: str, x: str) -> str:
        return self.action[m][x]

    def elements(self):
        for c in sorted(self.level):
            for x in self.level[c]:
                yield c, x

    def size(self) -> int:
        return sum(len(v) for v in self.level.values())

    def level_of(self, c: str) -> tuple[str, ...]:
        if c not in self.level:
            raise UnknownObject(f"no level for object {c!r}")
        return self.level[c]


def make_presheaf(base: FiniteCategory, level, action) -> Presheaf:
    """Normalize levels to sorted tuples and check id uniqueness."""
    norm = {}
    for c in base.objects:
        elems = tuple(sorted(level.get(c, ())))
        if len(set(elems)) != len(elems):
            raise ValueError(f"duplicate element ids at level {c}")
        norm[c] = elems
    return Presheaf(base, norm, action)


def validate_presheaf(X: Presheaf) -> list[str]:
    """Functoriality report: identity and composition laws, typing."""
    problems = []
    cat = X.base
    for c in cat.objects:
        if c not in X.level:
            problems.append(f"missing level for {c}")
    for m, (d, c) in cat.morphisms.items():
        tab = X.action.get(m)
        if tab is None:
            problems.append(f"missing action for {m}")
            continue
        if set(tab.keys()) != set(X.level.get(c, ())):
            problems.append(f"action {m}: domain is not level({c})")
            continue
        for x, y in tab.items():
            if y not in X.level.get(d, ()):
                problems.append(f"action {m}: value {y} not in level({d})")
    for o in cat.objects:
        i = cat.identities[o]
        tab = X.action.get(i, {})
        for x in X.level.get(o, ()):
            if tab.get(x) != x:
                problems.append(f"action of id_{o} moves {x}")
    for (g, f), h in cat.composition.items():
        # g∘f acts as action(f)∘action(g)
        tg, tf, th = X.action.get(g), X.action.get(f), X.action.get(h)
        if tg is None or tf is None or th is None:
            continue
        for x in X.level.get(X.base.cod(g), ()):
            if tf[tg[x]] != th[x]:
                problems.append(f"functoriality fails: ({g},{f}) at {x}")
    return problems


@dataclass(eq=False)
class NatMap:
    src: Presheaf
    dst: Presheaf
    # object id -> {src element -> dst element}
    components: dict[str, dict[str, str]]

    def __call__(self, c: str, x: str) -> str:
        return self.components[c][x]


def make_natmap(src: Presheaf, dst: Presheaf, components) -> NatMap:
    if src.base is not dst.base:
        raise BaseMismatch("NatMap endpoints live over different base categories")
    return NatMap(src, dst, components)


def validate_natmap(f: NatMap) -> list[str]:
    problems = []
    X, Y = f.src, f.dst
    for c in X.base.objects:
        comp = f.components.get(c)
        if comp is None:
            problems.append(f"missing component at {c}")
            continue
        for x in X.level.get(c, ()):
            if comp.get(x) not in Y.level.get(c, ()):
                problems.append(f"component at {c}: {x} has no valid image")
    for m, (d, c) in X.base.morphisms.items():
        for x in X.level.get(c, ()):
            lhs = Y.action[m][f.components[c][x]]
            rhs = f.components[d][X.action[m][x]]
            if lhs != rhs:
                problems.append(f"naturality fails at {m} on {x}")
    return problems


def nat_identity(X: Presheaf) -> NatMap:
    return NatMap(X, X, {c: {x: x for x in X.level[c]} for c in X.base.objects})


def nat_compose(g: NatMap, f: NatMap) -> NatMap:
    """g∘f for f: X→Y, g: Y→Z."""
    if f.dst is not g.src:
        # allow structurally identical intermediates produced by rebuilds
        if f.dst.level != g.src.level:
            raise BaseMismatch("nat_compose: middle objects disagree")
    comps = {
        c: {x: g.components[c][f.components[c][x]] for x in f.src.level[c]}
        for c in f.src.base.objects
    }
    return NatMap(f.src, g.dst, comps)


def nat_equal(f: NatMap, g: NatMap) -> bool:
    return all(
        f.components.get(c) == g.components.get(c)
        for c in f.src.base.objects
    )


def is_mono(f: NatMap) -> bool:
    """Levelwise injectivity."""
    for c in f.src.base.objects:
        comp = f.components[c]
        if len(set(comp.values())) != len(comp):
            return False
    return True


def is_iso(f: NatMap) -> bool:
    """Levelwise bijectivity."""
    for c in f.src.base.objects:
        comp = f.components[c]
        if len(set(comp.values())) != len(comp):
            return False
        if len(comp) != len(f.dst.level.get(c, ())):
            return False
    return True


def inverse_iso(f: NatMap) -> NatMap:
    comps = {
        c: {y: x for x, y in f.components[c].items()} for c in f.src.base.objects
    }
    return NatMap(f.dst, f.src, comps)


def yoneda(cat: FiniteCategory, c: str) -> Presheaf:
    """Representable presheaf Hom(-, c); element ids are morphism ids."""
    if c not in cat.identities:
        raise UnknownObject(f"no such object: {c!r}")
    level = {d: tuple(sorted(cat.hom(d, c))) for d in cat.objects}
    action = {}
    for m, (d, e) in cat.morphisms.items():
        # α: d→e acts Hom(e,c) -> Hom(d,c) by precomposition
        action[m] = {h: cat.compose(h, m) for h in level[e]}
    return Presheaf(cat, level, action)


def yoneda_classify(X: Presheaf, rep: Presheaf, c: str, x: str) -> NatMap:
    """The map y(c) -> X classifying x ∈ X(c), on a given representable copy."""
    comps = {
        d: {h: X.act(h, x) for h in rep.level[d]} for d in X.base.objects
    }
    return NatMap(rep, X, comps)


# ---------------------------------------------------------------------------
# the generic natural-map search engine


def _search_items(X: Presheaf):
    return [(c, x) for c in sorted(X.level) for x in X.level[c]]


def nat_search(
    X: Presheaf,
    Y: Presheaf,
    *,
    fiber=None,
    preassigned=None,
    injective: bool = False,
    max_nodes: int | None = None,
    max_results: int | None = None,
    rng=None,
):
    """Enumerate natural transformations X -> Y by backtracking.

    Assigning an element immediately forces the images of all its restrictions,
    so the branching happens only on generating elements.

    fiber(c, x) restricts candidate images (used for slice homs and lifts).
    preassigned maps (c, x) pairs to forced images.
    injective prunes to levelwise-injective maps.
    max_nodes caps candidate attempts; exceeding it raises BoundsExceeded.
    Yields component dicts; callers wrap them in NatMap.
    """
    if X.base is not Y.base and X.base.morphisms.keys() != Y.base.morphisms.keys():
        raise BaseMismatch("nat_search endpoints over different bases")
    cat = X.base
    items = _search_items(X)
    nodes = 0
    results = 0

    # non-identity morphisms grouped by cod for propagation
    arrows_by_cod: dict[str, list[tuple[str, str]]] = {c: [] for c in cat.objects}
    for m, (d, c) in cat.morphisms.items():
        if not cat.is_identity(m):
            arrows_by_cod[c].append((m, d))

    assign: dict[tuple[str, str], str] = {}

    def propagate(c, x, y, trail) -> bool:
        """Set assign[(c,x)]=y and push all forced consequences; False on clash."""
        stack = [(c, x, y)]
        while stack:
            c1, x1, y1 = stack.pop()
            cur = assign.get((c1, x1))
            if cur is not None:
                if cur != y1:
                    return False
                continue
            assign[(c1, x1)] = y1
            trail.append((c1, x1))
            for m, d in arrows_by_cod[c1]:
                stack.append((d, X.action[m][x1], Y.action[m][y1]))
        return True

    def undo(trail):
        for key in trail:
            del assign[key]

    init_trail: list = []
    ok = True
    if preassigned:
        for (c, x), y in preassigned.items():
            if not propagate(c, x, y, init_trail):
                ok = False
                break
    if not ok:
        undo(init_trail)
        return

    def used_at(c):
        return {v for (c1, _), v in assign.items() if c1 == c}

    def rec(i):
        nonlocal nodes, results
        if max_results is not None and results >= max_results:
            return
        while i < len(items) and items[i] in assign:
            i += 1
        if i == len(items):
            if injective:
                for c in cat.objects:
                    vals = [assign[(c, x)] for x in X.level[c]]
                    if len(set(vals)) != len(vals):
                        return
            results += 1
            yield {
                c: {x: assign[(c, x)] for x in X.level[c]} for c in cat.objects
            }
            return
        c, x = items[i]
        cands = list(fiber(c, x)) if fiber is not None else list(Y.level[c])
        if injective:
            taken = used_at(c)
            cands = [y for y in cands if y not in taken]
        if rng is not None:
            rng.shuffle(cands)
        for y in cands:
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                raise BoundsExceeded(
                    "nat_search budget exhausted", nodes=nodes, at=(c, x)
                )
            trail: list = []
            if propagate(c, x, y, trail):
                yield from rec(i + 1)
                if max_results is not None and results >= max_results:
                    undo(trail)
                    return
            undo(trail)

    yield from rec(0)
    undo(init_trail)


def hom_enumerate(X: Presheaf, Y: Presheaf, max_nodes: int | None = None) -> list[NatMap]:
    """All natural transformations X -> Y, no duplicates."""
    return [
        NatMap(X, Y, comps) for comps in nat_search(X, Y, max_nodes=max_nodes)
    ]


def hom_exists(X: Presheaf, Y: Presheaf, **kw) -> NatMap | None:
    for comps in nat_search(X, Y, max_results=1, **kw):
        return NatMap(X, Y, comps)
    return None


def find_iso(X: Presheaf, Y: Presheaf, max_nodes: int | None = None) -> NatMap | None:
    """An explicit levelwise bijection X ≅ Y natural in the base, if one exists."""
    for c in X.base.objects:
        if len(X.level.get(c, ())) != len(Y.level.get(c, ())):
            return None
    for comps in nat_search(X, Y, injective=True, max_results=1, max_nodes=max_nodes):
        return NatMap(X, Y, comps)
    return None


def rename_elements(X: Presheaf, prefix: str = "x") -> tuple[Presheaf, dict]:
    """Deterministically compress element ids to short ones, level by level.

    The renaming is a function of the sorted id order, so structurally equal
    inputs rename identically.  Returns (renamed presheaf, old->new per level).
    """
    mapping = {
        c: {x: f"{prefix}{i}" for i, x in enumerate(X.level[c])} for c in X.level
    }
    level = {c: tuple(sorted(mapping[c].values())) for c in X.level}
    action = {}
    for m, (d, c) in X.base.morphisms.items():
        action[m] = {
            mapping[c][x]: mapping[d][y] for x, y in X.action[m].items()
        }
    return Presheaf(X.base, level, action), mapping


def rename_natmap(f: NatMap, new_src, src_map, new_dst, dst_map) -> NatMap:
    comps = {}
    for c in f.src.base.objects:
        sm = src_map[c] if src_map else {x: x for x in f.src.level[c]}
        dm = dst_map[c] if dst_map else {y: y for y in f.dst.level[c]}
        comps[c] = {sm[x]: dm[y] for x, y in f.components[c].items()}
    return NatMap(new_src or f.src, new_dst or f.dst, comps)
