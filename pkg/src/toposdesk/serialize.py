"""Workspace JSON formats: categories, presheaves, natural maps, Reedy
structures, and universe snapshots.

Every document carries a schema tag and a content hash over its canonical
form (sorted keys, hash field excluded), so fixtures are stable across runs
and corruption is detectable.  Parsing validates: a malformed document
raises SchemaError with a JSON-path diagnostic.
"""

from __future__ import annotations

import hashlib
import json

from .cat import FiniteCategory, validate_category
from .errors import SchemaError
from .presheaf import NatMap, Presheaf, validate_natmap, validate_presheaf
from .reedy import ReedyStructure, validate_reedy
from .universe import Code, Universe, universe_from_codes

SCHEMAS = {
    "category": "toposdesk/category/v1",
    "presheaf": "toposdesk/presheaf/v1",
    "natmap": "toposdesk/natmap/v1",
    "reedy": "toposdesk/reedy/v1",
    "universe": "toposdesk/universe/v1",
}


def canonical_json(doc: dict) -> str:
    body = {k: v for k, v in doc.items() if k != "content_hash"}
    return json.dumps(body, sort_keys=True, separators=(",", ":"))


def content_hash(doc: dict) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def stamp(doc: dict) -> dict:
    doc["content_hash"] = content_hash(doc)
    return doc


def _need(doc, key, path):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}", path)
    return doc[key]


def _check_schema(doc, kind, path="$"):
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", path)
    if doc.get("schema") != SCHEMAS[kind]:
        raise SchemaError(
            f"expected schema {SCHEMAS[kind]!r}, got {doc.get('schema')!r}",
            path + ".schema",
        )


# ---------------------------------------------------------------------------
# categories


def print_category(cat: FiniteCategory) -> dict:
    return stamp(
        {
            "schema": SCHEMAS["category"],
            "objects": list(cat.objects),
            "morphisms": {m: list(dc) for m, dc in sorted(cat.morphisms.items())},
            "identities": dict(sorted(cat.identities.items())),
            "composition": [
                [g, f, h] for (g, f), h in sorted(cat.composition.items())
            ],
        }
    )


def parse_category(doc: dict, path="$") -> FiniteCategory:
    _check_schema(doc, "category", path)
    objects = tuple(_need(doc, "objects", path))
    morphisms = {}
    for m, dc in _need(doc, "morphisms", path).items():
        if not isinstance(dc, list) or len(dc) != 2:
            raise SchemaError("morphism value must be [dom, cod]", f"{path}.morphisms.{m}")
        if dc[0] not in objects:
            raise SchemaError(f"dangling dom {dc[0]!r}", f"{path}.morphisms.{m}")
        if dc[1] not in objects:
            raise SchemaError(f"dangling cod {dc[1]!r}", f"{path}.morphisms.{m}")
        morphisms[m] = (dc[0], dc[1])
    identities = dict(_need(doc, "identities", path))
    composition = {}
    for row in _need(doc, "composition", path):
        if not isinstance(row, list) or len(row) != 3:
            raise SchemaError("composition row must be [g, f, h]", f"{path}.composition")
        composition[(row[0], row[1])] = row[2]
    cat = FiniteCategory(objects, morphisms, identities, composition)
    rep = validate_category(cat)
    if not rep.ok:
        raise SchemaError("; ".join(rep.problems[:3]), path)
    return cat


# ---------------------------------------------------------------------------
# presheaves and natural maps


def print_presheaf(X: Presheaf) -> dict:
    return stamp(
        {
            "schema": SCHEMAS["presheaf"],
            "base": print_category(X.base),
            "level": {c: list(v) for c, v in sorted(X.level.items())},
            "action": {
                m: dict(sorted(tab.items())) for m, tab in sorted(X.action.items())
            },
        }
    )


def parse_presheaf(doc: dict, path="$", base: FiniteCategory | None = None) -> Presheaf:
    _check_schema(doc, "presheaf", path)
    cat = base if base is not None else parse_category(_need(doc, "base", path), path + ".base")
    level = {c: tuple(v) for c, v in _need(doc, "level", path).items()}
    action = {m: dict(tab) for m, tab in _need(doc, "action", path).items()}
    X = Presheaf(cat, level, action)
    bad = validate_presheaf(X)
    if bad:
        raise SchemaError("; ".join(bad[:3]), path)
    return X


def print_natmap(f: NatMap) -> dict:
    return stamp(
        {
            "schema": SCHEMAS["natmap"],
            "src": print_presheaf(f.src),
            "dst": print_presheaf(f.dst),
            "components": {
                c: dict(sorted(tab.items()))
                for c, tab in sorted(f.components.items())
            },
        }
    )


def parse_natmap(doc: dict, path="$") -> NatMap:
    _check_schema(doc, "natmap", path)
    src = parse_presheaf(_need(doc, "src", path), path + ".src")
    dst = parse_presheaf(
        _need(doc, "dst", path), path + ".dst", base=src.base
    )
    comps = {c: dict(t) for c, t in _need(doc, "components", path).items()}
    f = NatMap(src, dst, comps)
    bad = validate_natmap(f)
    if bad:
        raise SchemaError("; ".join(bad[:3]), path)
    return f


# ---------------------------------------------------------------------------
# Reedy structures


def print_reedy(R: ReedyStructure) -> dict:
    return stamp(
        {
            "schema": SCHEMAS["reedy"],
            "category": print_category(R.cat),
            "degree": dict(sorted(R.degree.items())),
            "plus": sorted(R.plus),
            "minus": sorted(R.minus),
        }
    )


def parse_reedy(doc: dict, path="$") -> ReedyStructure:
    _check_schema(doc, "reedy", path)
    cat = parse_category(_need(doc, "category", path), path + ".category")
    R = ReedyStructure(
        cat,
        dict(_need(doc, "degree", path)),
        frozenset(_need(doc, "plus", path)),
        frozenset(_need(doc, "minus", path)),
    )
    rep = validate_reedy(R)
    if not rep.ok:
        raise SchemaError("; ".join(rep.problems[:3]), path)
    return R


# ---------------------------------------------------------------------------
# universe snapshots


def _print_code(code: Code) -> dict:
    return {
        "over": code.s0,
        "sizes": {b: n for b, n in code.sizes},
        "actions": {f"{g} {b}": list(t) for (g, b), t in code.actions},
    }


def _parse_code(doc: dict, path="$") -> Code:
    sizes = dict(_need(doc, "sizes", path))
    actions = {}
    for key, t in _need(doc, "actions", path).items():
        g, b = key.split(" ", 1)
        actions[(g, b)] = tuple(t)
    return Code(_need(doc, "over", path), sizes, actions)


def print_universe(u: Universe) -> dict:
    codes = {}
    for s in u.ssite.cat.objects:
        codes[s] = [
            _print_code(u.id_to_code[(s, cid)]) for cid in u.U.level.get(s, ())
        ]
    return stamp(
        {
            "schema": SCHEMAS["universe"],
            "kappa": u.kappa,
            "N": u.ssite.N,
            "plain": u.ssite.plain,
            "C": print_category(u.ssite.C),
            "range": list(u.rng),
            "codes": codes,
        }
    )


def parse_universe(doc: dict, path="$") -> Universe:
    _check_schema(doc, "universe", path)
    from .simplicial import SSite

    C = parse_category(_need(doc, "C", path), path + ".C")
    N = _need(doc, "N", path)
    ssite = SSite.simplicial(N) if _need(doc, "plain", path) else SSite.product(C, N)
    codes = {
        s: [_parse_code(d, f"{path}.codes.{s}[{i}]") for i, d in enumerate(lst)]
        for s, lst in _need(doc, "codes", path).items()
    }
    return universe_from_codes(
        ssite,
        _need(doc, "kappa", path),
        tuple(_need(doc, "range", path)),
        codes,
    )


# ---------------------------------------------------------------------------
# file helpers


def load_doc(path: str) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}", "$")


def dump_doc(doc: dict, path: str | None = None) -> str:
    text = json.dumps(doc, sort_keys=True, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


# ---------------------------------------------------------------------------
# SOA builder state snapshots


def _natmap_components_doc(f: NatMap) -> dict:
    return {c: dict(sorted(t.items())) for c, t in sorted(f.components.items())}


def print_soa_state(state) -> dict:
    stages = []
    for st in state.stages:
        stages.append(
            {
                "U": print_presheaf(st.U),
                "Ut": print_presheaf(st.Ut),
                "p": _natmap_components_doc(st.p),
            }
        )
    return stamp(
        {
            "schema": "toposdesk/soa-state/v1",
            "kappa": state.kappa,
            "N": state.ssite.N,
            "plain": state.ssite.plain,
            "C": print_category(state.ssite.C),
            "range": list(state.rng),
            "stages": stages,
            "inclusions": [
                [_natmap_components_doc(a), _natmap_components_doc(b)]
                for a, b in state.inclusions
            ],
            "triples_log": list(state.triples_log),
        }
    )


def parse_soa_state(doc: dict, path="$"):
    from .simplicial import SSite, boundary_generator
    from .universe import SoaStage, SoaState

    if doc.get("schema") != "toposdesk/soa-state/v1":
        raise SchemaError("expected a soa-state document", path + ".schema")
    C = parse_category(_need(doc, "C", path), path + ".C")
    N = _need(doc, "N", path)
    ssite = SSite.simplicial(N) if _need(doc, "plain", path) else SSite.product(C, N)
    stages = []
    for i, sd in enumerate(_need(doc, "stages", path)):
        U = parse_presheaf(sd["U"], f"{path}.stages[{i}].U")
        Ut = parse_presheaf(sd["Ut"], f"{path}.stages[{i}].Ut", base=U.base)
        p = NatMap(Ut, U, {c: dict(t) for c, t in sd["p"].items()})
        stages.append(SoaStage(U, Ut, p))
    inclusions = []
    for i, (da, db) in enumerate(_need(doc, "inclusions", path)):
        a = NatMap(stages[i].U, stages[i + 1].U, {c: dict(t) for c, t in da.items()})
        b = NatMap(stages[i].Ut, stages[i + 1].Ut, {c: dict(t) for c, t in db.items()})
        inclusions.append((a, b))
    gens = [
        boundary_generator(ssite, c, n)
        for c in ssite.c_objects()
        for n in range(N + 1)
    ]
    return SoaState(
        ssite,
        _need(doc, "kappa", path),
        tuple(_need(doc, "range", path)),
        gens,
        stages,
        inclusions,
        list(_need(doc, "triples_log", path)),
    )
