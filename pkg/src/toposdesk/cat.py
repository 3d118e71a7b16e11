"""Finite categories presented by explicit composition tables.

Objects and morphisms are opaque string ids.  A category value is immutable
after construction and safe to share; every operation in the package treats
it as read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import UnknownObject


@dataclass(eq=False)
class FiniteCategory:
    objects: tuple[str, ...]
    # morphism id -> (dom, cod)
    morphisms: dict[str, tuple[str, str]]
    # object id -> identity morphism id
    identities: dict[str, str]
    # (g, f) -> g∘f, defined exactly for cod(f) == dom(g)
    composition: dict[tuple[str, str], str]
    _hom_cache: dict[tuple[str, str], tuple[str, ...]] = field(
        default_factory=dict, repr=False
    )
    _into_cache: dict[str, tuple[str, ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.objects = tuple(self.objects)

    def dom(self, m: str) -> str:
        return self.morphisms[m][0]

    def cod(self, m: str) -> str:
        return self.morphisms[m][1]

    def id_of(self, obj: str) -> str:
        if obj not in self.identities:
            raise UnknownObject(f"no such object: {obj!r}")
        return self.identities[obj]

    def is_identity(self, m: str) -> bool:
        return self.identities.get(self.morphisms[m][0]) == m and (
            self.morphisms[m][0] == self.morphisms[m][1]
        )

    def compose(self, g: str, f: str) -> str:
        """g∘f for f: a→b, g: b→c."""
        return self.composition[(g, f)]

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        key = (a, b)
        if key not in self._hom_cache:
            self._hom_cache[key] = tuple(
                sorted(m for m, (d, c) in self.morphisms.items() if d == a and c == b)
            )
        return self._hom_cache[key]

    def morphisms_into(self, b: str) -> tuple[str, ...]:
        if b not in self._into_cache:
            self._into_cache[b] = tuple(
                sorted(m for m, (_, c) in self.morphisms.items() if c == b)
            )
        return self._into_cache[b]

    def arrow_count(self) -> int:
        return len(self.morphisms)


@dataclass
class CategoryReport:
    ok: bool
    problems: list[str]


def validate_category(cat: FiniteCategory) -> CategoryReport:
    """Exhaustively check the category laws; report every violation found."""
    problems: list[str] = []
    objset = set(cat.objects)
    if len(cat.objects) != len(objset):
        problems.append("duplicate object ids")
    for m, (d, c) in cat.morphisms.items():
        if d not in objset:
            problems.append(f"morphism {m}: unknown dom {d}")
        if c not in objset:
            problems.append(f"morphism {m}: unknown cod {c}")
    for o in cat.objects:
        i = cat.identities.get(o)
        if i is None:
            problems.append(f"object {o}: no identity")
            continue
        if cat.morphisms.get(i) != (o, o):
            problems.append(f"object {o}: identity {i} is not an endomorphism of {o}")
    # composition totality and typing
    for (g, f), h in cat.composition.items():
        if f not in cat.morphisms or g not in cat.morphisms or h not in cat.morphisms:
            problems.append(f"composition ({g},{f})->{h}: unknown morphism")
            continue
        if cat.cod(f) != cat.dom(g):
            problems.append(f"composition defined on non-composable pair ({g},{f})")
        elif (cat.dom(h), cat.cod(h)) != (cat.dom(f), cat.cod(g)):
            problems.append(f"composite {h} of ({g},{f}) has wrong dom/cod")
    for f in cat.morphisms:
        for g in cat.morphisms:
            if cat.cod(f) == cat.dom(g) and (g, f) not in cat.composition:
                problems.append(f"missing composite for composable pair ({g},{f})")
    # identity laws
    for f, (d, c) in cat.morphisms.items():
        idd, idc = cat.identities.get(d), cat.identities.get(c)
        if idd and cat.composition.get((f, idd)) != f:
            problems.append(f"identity law fails: {f}∘{idd} != {f}")
        if idc and cat.composition.get((idc, f)) != f:
            problems.append(f"identity law fails: {idc}∘{f} != {f}")
    # associativity over all composable triples
    for f in cat.morphisms:
        for g in cat.morphisms:
            if cat.cod(f) != cat.dom(g):
                continue
            for h in cat.morphisms:
                if cat.cod(g) != cat.dom(h):
                    continue
                left = cat.composition.get((h, cat.composition.get((g, f))))
                right = cat.composition.get((cat.composition.get((h, g)), f))
                if left != right:
                    problems.append(f"associativity fails on ({h},{g},{f})")
    return CategoryReport(ok=not problems, problems=problems)


# ---------------------------------------------------------------------------
# builders


def terminal_category() -> FiniteCategory:
    return FiniteCategory(
        objects=("*",),
        morphisms={"id:*": ("*", "*")},
        identities={"*": "id:*"},
        composition={("id:*", "id:*"): "id:*"},
    )


def discrete_category(names: tuple[str, ...]) -> FiniteCategory:
    morphisms = {f"id:{o}": (o, o) for o in names}
    return FiniteCategory(
        objects=tuple(names),
        morphisms=morphisms,
        identities={o: f"id:{o}" for o in names},
        composition={(f"id:{o}", f"id:{o}"): f"id:{o}" for o in names},
    )


def arrow_category() -> FiniteCategory:
    morphisms = {"id:0": ("0", "0"), "id:1": ("1", "1"), "a:0>1": ("0", "1")}
    composition = {
        ("id:0", "id:0"): "id:0",
        ("id:1", "id:1"): "id:1",
        ("a:0>1", "id:0"): "a:0>1",
        ("id:1", "a:0>1"): "a:0>1",
    }
    return FiniteCategory(
        objects=("0", "1"),
        morphisms=morphisms,
        identities={"0": "id:0", "1": "id:1"},
        composition=composition,
    )


def monotone_maps(m: int, n: int) -> list[tuple[int, ...]]:
    """All order-preserving maps [m] -> [n] as value tuples."""
    if m < 0 or n < 0:
        return []
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], lo: int):
        if len(prefix) == m + 1:
            out.append(prefix)
            return
        for v in range(lo, n + 1):
            rec(prefix + (v,), v)

    rec((), 0)
    return out


def simplex_obj(n: int) -> str:
    return f"[{n}]"


def simplex_mor(m: int, n: int, values: tuple[int, ...]) -> str:
    return f"{m}>{n}:" + "".join(map(str, values))


@lru_cache(maxsize=None)
def simplex_category(N: int) -> FiniteCategory:
    """The full subcategory Δ_{≤N}: objects [0]..[N], all monotone maps."""
    objects = tuple(simplex_obj(n) for n in range(N + 1))
    morphisms: dict[str, tuple[str, str]] = {}
    values: dict[str, tuple[int, ...]] = {}
    for m in range(N + 1):
        for n in range(N + 1):
            for v in monotone_maps(m, n):
                mid = simplex_mor(m, n, v)
                morphisms[mid] = (simplex_obj(m), simplex_obj(n))
                values[mid] = v
    identities = {
        simplex_obj(n): simplex_mor(n, n, tuple(range(n + 1))) for n in range(N + 1)
    }
    composition: dict[tuple[str, str], str] = {}
    dims = {simplex_obj(n): n for n in range(N + 1)}
    for f, (fd, fc) in morphisms.items():
        for g, (gd, gc) in morphisms.items():
            if fc != gd:
                continue
            vf, vg = values[f], values[g]
            comp = tuple(vg[i] for i in vf)
            composition[(g, f)] = simplex_mor(dims[fd], dims[gc], comp)
    cat = FiniteCategory(objects, morphisms, identities, composition)
    cat_values = values
    cat.simplex_values = cat_values  # type: ignore[attr-defined]
    return cat


def simplex_values(delta: FiniteCategory, m: str) -> tuple[int, ...]:
    return delta.simplex_values[m]  # type: ignore[attr-defined]


def face_mor(delta: FiniteCategory, n: int, i: int) -> str:
    """δ_i: [n-1] -> [n], the injection missing i."""
    vals = tuple(v for v in range(n + 1) if v != i)
    return simplex_mor(n - 1, n, vals)


def degeneracy_mor(delta: FiniteCategory, n: int, j: int) -> str:
    """σ_j: [n+1] -> [n], the surjection repeating j."""
    vals = tuple(list(range(j + 1)) + list(range(j, n + 1)))
    return simplex_mor(n + 1, n, vals)


def pair_obj(a: str, b: str) -> str:
    return f"{a}|{b}"


def pair_mor(f: str, g: str) -> str:
    return f"{f}|{g}"


def product_category(A: FiniteCategory, B: FiniteCategory) -> FiniteCategory:
    objects = tuple(pair_obj(a, b) for a in A.objects for b in B.objects)
    morphisms = {
        pair_mor(f, g): (pair_obj(fd, gd), pair_obj(fc, gc))
        for f, (fd, fc) in A.morphisms.items()
        for g, (gd, gc) in B.morphisms.items()
    }
    identities = {
        pair_obj(a, b): pair_mor(A.identities[a], B.identities[b])
        for a in A.objects
        for b in B.objects
    }
    composition = {}
    for (g1, f1), h1 in A.composition.items():
        for (g2, f2), h2 in B.composition.items():
            composition[(pair_mor(g1, g2), pair_mor(f1, f2))] = pair_mor(h1, h2)
    return FiniteCategory(objects, morphisms, identities, composition)


def opposite_category(C: FiniteCategory) -> FiniteCategory:
    morphisms = {m: (c, d) for m, (d, c) in C.morphisms.items()}
    composition = {(f, g): h for (g, f), h in C.composition.items()}
    return FiniteCategory(C.objects, morphisms, dict(C.identities), composition)
