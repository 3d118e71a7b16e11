"""Command-line surface: one verb per construction, scriptable reports.

Exit codes: 0 pass, 1 property/verification failure, 2 invalid input,
3 bounds exceeded.  All caps are flags; reports go to stdout (human), to
--json-out (machine), to --csv-out (delimited per-check rows), and to
--fig-out (a rendered summary figure).
"""

from __future__ import annotations

import argparse
import csv
import sys

from .errors import BoundsExceeded, SchemaError, ToposError
from .presheaf import is_mono
from .serialize import (
    dump_doc,
    load_doc,
    parse_category,
    parse_natmap,
    parse_presheaf,
    parse_reedy,
    parse_universe,
    print_natmap,
    print_presheaf,
    print_universe,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_BOUNDS = 3


def _emit(doc: dict, args) -> None:
    text = dump_doc(doc, getattr(args, "json_out", None))
    if not getattr(args, "quiet", False):
        print(text)


def _site(args):
    from .simplicial import SSite

    N = args.trunc_dim
    if getattr(args, "base_category", None):
        C = parse_category(load_doc(args.base_category))
        return SSite.product(C, N)
    return SSite.simplicial(N)


def _align_presheaf(cat, X):
    """Rebase a freshly parsed presheaf onto the session's category instance.

    Parsing rebuilds the base category; site-bound operations compare base
    identity, so structural agreement is required and then safe.
    """
    from .presheaf import Presheaf

    if X.base is cat:
        return X
    if set(X.base.morphisms) != set(cat.morphisms):
        raise SchemaError("presheaf base does not match the requested site")
    return Presheaf(cat, X.level, X.action)


def _align_natmap(cat, f):
    from .presheaf import NatMap

    return NatMap(
        _align_presheaf(cat, f.src), _align_presheaf(cat, f.dst), f.components
    )


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_cat_validate(args):
    from .cat import validate_category

    cat = parse_category(load_doc(args.file))
    rep = validate_category(cat)
    _emit({"ok": rep.ok, "problems": rep.problems}, args)
    return EXIT_PASS if rep.ok else EXIT_FAIL


def cmd_psh(args):
    from .limits import limit
    from .lcc import SliceObject, local_exp, pi, sigma
    from .presheaf import hom_enumerate

    if args.verb == "hom":
        X = parse_presheaf(load_doc(args.inputs[0]))
        Y = parse_presheaf(load_doc(args.inputs[1]), base=X.base)
        maps = hom_enumerate(X, Y)
        _emit({"count": len(maps)}, args)
        return EXIT_PASS
    if args.verb in ("limit", "colimit"):
        docs = [load_doc(p) for p in args.inputs]
        X = parse_presheaf(docs[0])
        maps = [parse_natmap(d) for d in docs[1:]]
        from .cat import FiniteCategory

        # span/cospan shapes from the arrow list
        names = tuple(str(i) for i in range(len(maps) + 1))
        if args.verb == "limit":
            from .limits import pullback

            if len(maps) == 2:
                P, p1, p2 = pullback(maps[0], maps[1])
                _emit(print_presheaf(P), args)
                return EXIT_PASS
        else:
            from .limits import pushout

            if len(maps) == 2:
                P, i1, i2 = pushout(maps[0], maps[1])
                _emit(print_presheaf(P), args)
                return EXIT_PASS
        raise SchemaError("limit/colimit verbs take a cospan/span of two maps")
    if args.verb in ("pi", "sigma", "exp"):
        f = parse_natmap(load_doc(args.inputs[0]))
        proj = parse_natmap(load_doc(args.inputs[1]))
        E = SliceObject(proj.src, proj.dst, proj)
        if args.verb == "sigma":
            out = sigma(f, E)
            _emit(print_natmap(out.proj), args)
        elif args.verb == "pi":
            out = pi(f, E)
            _emit(print_natmap(out.slice.proj), args)
        else:
            proj2 = parse_natmap(load_doc(args.inputs[2]))
            E2 = SliceObject(proj2.src, proj2.dst, proj2)
            out = local_exp(E, E2)
            _emit(print_natmap(out.fun.proj), args)
        return EXIT_PASS
    raise SchemaError(f"unknown psh verb {args.verb!r}")


def cmd_sset(args):
    from .simplicial import (
        LiftingProblem,
        boundary_ps,
        horn_ps,
        is_acyclic_fibration,
        is_fibration,
        simplex_ps,
        solve_lift,
        tensor,
    )

    ssite = _site(args)
    if args.verb == "object":
        kind, n = args.kind, args.n
        if kind == "simplex":
            X = simplex_ps(ssite.N, n)
        elif kind == "boundary":
            X, _ = boundary_ps(ssite.N, n)
        else:
            X, _ = horn_ps(ssite.N, n, args.k)
        _emit(print_presheaf(X), args)
        return EXIT_PASS
    if args.verb == "tensor":
        K = _align_presheaf(ssite.delta, parse_presheaf(load_doc(args.inputs[0])))
        X = _align_presheaf(ssite.cat, parse_presheaf(load_doc(args.inputs[1])))
        t = tensor(ssite, K, X)
        _emit(print_presheaf(t.ps), args)
        return EXIT_PASS
    if args.verb == "cotensor":
        from .lcc import SliceObject
        from .simplicial import cotensor_interval

        proj = _align_natmap(ssite.cat, parse_natmap(load_doc(args.inputs[0])))
        ct = cotensor_interval(ssite, SliceObject(proj.src, proj.dst, proj))
        _emit(print_natmap(ct.slice.proj), args)
        return EXIT_PASS
    if args.verb == "lift":
        left = parse_natmap(load_doc(args.inputs[0]))
        right = parse_natmap(load_doc(args.inputs[1]))
        top = parse_natmap(load_doc(args.inputs[2]))
        bottom = parse_natmap(load_doc(args.inputs[3]))
        lift = solve_lift(
            LiftingProblem(left, right, top, bottom), args.max_nodes
        )
        if lift is None:
            _emit({"lift": None}, args)
            return EXIT_FAIL
        _emit(print_natmap(lift), args)
        return EXIT_PASS
    if args.verb in ("fib", "acyclic-fib"):
        f = parse_natmap(load_doc(args.inputs[0]))
        rng = (args.range_lo, args.range_hi) if args.range_hi is not None else None
        pred = is_fibration if args.verb == "fib" else is_acyclic_fibration
        ok = pred(f, ssite, rng, args.max_nodes)
        _emit({"result": ok, "range": rng or "default"}, args)
        return EXIT_PASS if ok else EXIT_FAIL
    raise SchemaError(f"unknown sset verb {args.verb!r}")


def cmd_reedy(args):
    from .reedy import (
        CDiagram,
        elegance_evidence,
        generating_acyclic_cofibrations,
        is_reedy_cofibration,
        is_reedy_fibration,
        latching_ob,
        latching_to_level,
        level_to_matching,
        matching_ob,
        validate_reedy,
    )
    from .simplicial import SSite

    R = parse_reedy(load_doc(args.reedy))
    ssite = SSite.product(R.cat, args.trunc_dim)
    if args.verb == "validate":
        rep = validate_reedy(R)
        _emit(
            {
                "ok": rep.ok,
                "problems": rep.problems,
                "direct": rep.is_direct,
                "inverse": rep.is_inverse,
            },
            args,
        )
        return EXIT_PASS if rep.ok else EXIT_FAIL
    if args.verb in ("latching", "matching"):
        X = parse_presheaf(load_doc(args.inputs[0]))
        cd = CDiagram(ssite, X)
        if args.verb == "latching":
            L = latching_ob(R, cd, args.at)
            _emit(print_natmap(latching_to_level(R, cd, args.at, L)), args)
        else:
            M = matching_ob(R, cd, args.at)
            _emit(print_natmap(level_to_matching(R, cd, args.at, M)), args)
        return EXIT_PASS
    if args.verb in ("fib", "cofib"):
        f = parse_natmap(load_doc(args.inputs[0]))
        if args.verb == "fib":
            rng = (args.range_lo, args.range_hi) if args.range_hi is not None else None
            ok = is_reedy_fibration(R, ssite, f, rng)
        else:
            ok = is_reedy_cofibration(R, ssite, f)
        _emit({"result": ok}, args)
        return EXIT_PASS if ok else EXIT_FAIL
    if args.verb == "generators":
        gens = generating_acyclic_cofibrations(R, ssite)
        _emit({"count": len(gens), "all_mono": all(is_mono(g) for g in gens)}, args)
        return EXIT_PASS
    if args.verb == "elegance":
        from .generate import random_base, rng_for

        rng = rng_for(args.seed)
        samples = [random_base(ssite, rng) for _ in range(args.samples)]
        ev = elegance_evidence(R, ssite, samples)
        _emit(
            {
                "ok": ev.ok,
                "split_epi_failures": ev.split_epi_failures,
                "latching_mono_failures": [list(x) for x in ev.latching_mono_failures],
                "samples": ev.samples_checked,
            },
            args,
        )
        return EXIT_PASS if ev.ok else EXIT_FAIL
    raise SchemaError(f"unknown reedy verb {args.verb!r}")


def cmd_equiv(args):
    from .equiv import (
        eq_object,
        eqlift,
        is_weq,
        iscontr,
        isequiv,
        mapping_path,
        path_object,
    )
    from .lcc import SliceObject, sections_of

    ssite = _site(args)

    def load_slice(path):
        proj = _align_natmap(ssite.cat, parse_natmap(load_doc(path)))
        return SliceObject(proj.src, proj.dst, proj)

    if args.verb == "path":
        E = load_slice(args.inputs[0])
        po = path_object(ssite, E)
        _emit(print_natmap(po.slice.proj), args)
        return EXIT_PASS
    if args.verb == "mpath":
        f = _align_natmap(ssite.cat, parse_natmap(load_doc(args.inputs[0])))
        E1, E2 = load_slice(args.inputs[1]), load_slice(args.inputs[2])
        fact = mapping_path(ssite, f, E1, E2)
        _emit(print_natmap(fact.slice.proj), args)
        return EXIT_PASS
    if args.verb in ("iscontr", "isequiv", "eq"):
        if args.verb == "iscontr":
            out = iscontr(ssite, load_slice(args.inputs[0]))
        elif args.verb == "isequiv":
            f = _align_natmap(ssite.cat, parse_natmap(load_doc(args.inputs[0])))
            out = isequiv(
                ssite, f, load_slice(args.inputs[1]), load_slice(args.inputs[2])
            )
        else:
            out = eq_object(
                ssite, load_slice(args.inputs[0]), load_slice(args.inputs[1])
            )
        n_sections = len(sections_of(out.slice, max_results=1))
        _emit(
            {
                "projection": print_natmap(out.slice.proj),
                "has_section": n_sections > 0,
            },
            args,
        )
        return EXIT_PASS
    if args.verb == "weq":
        from .simplicial import TruncationConfig

        f = _align_natmap(ssite.cat, parse_natmap(load_doc(args.inputs[0])))
        E1, E2 = load_slice(args.inputs[1]), load_slice(args.inputs[2])
        if args.range_hi is not None:
            rng = (args.range_lo or 0, args.range_hi)
        else:
            # homotopical conclusions default to the reliable range
            cfg = TruncationConfig(ssite.N, args.reliable_margin)
            rng = (0, min(ssite.N, cfg.reliable_dim + 1))
        ok = is_weq(ssite, f, E1, E2, rng)
        _emit({"result": ok, "range": list(rng)}, args)
        return EXIT_PASS if ok else EXIT_FAIL
    if args.verb == "eqlift":
        i = _align_natmap(ssite.cat, parse_natmap(load_doc(args.inputs[0])))
        v = _align_natmap(ssite.cat, parse_natmap(load_doc(args.inputs[1])))
        D1, D2 = load_slice(args.inputs[2]), load_slice(args.inputs[3])
        partial = parse_natmap(load_doc(args.inputs[4]))
        res = eqlift(ssite, i, v, D1, D2, partial, max_nodes=args.max_nodes)
        _emit(print_natmap(res.lift), args)
        return EXIT_PASS
    raise SchemaError(f"unknown equiv verb {args.verb!r}")


def cmd_univ(args):
    from .universe import (
        classify,
        equivalence_extension,
        extend_classifier,
        saturation_check,
        soa_init,
        soa_invariants,
        soa_step,
        universe_build,
        well_order,
    )
    from .lcc import SliceObject, pullback_along
    from .serialize import parse_soa_state, print_soa_state
    from .simplicial import boundary_generator

    ssite = _site(args)
    if args.verb == "build":
        u = universe_build(ssite, args.kappa, max_codes_per_object=args.max_codes)
        _emit(print_universe(u), args)
        return EXIT_PASS
    if args.verb == "classify":
        u = parse_universe(load_doc(args.universe))
        proj = _align_natmap(u.ssite.cat, parse_natmap(load_doc(args.inputs[0])))
        res = classify(
            u.ssite, well_order(SliceObject(proj.src, proj.dst, proj)),
            u.kappa, univ=u,
        )
        _emit(print_natmap(res.chi), args)
        return EXIT_PASS
    if args.verb == "extend":
        # strict extension: i: A↪B, Q over B; f classifies i*Q
        u = parse_universe(load_doc(args.universe))
        i = _align_natmap(u.ssite.cat, parse_natmap(load_doc(args.inputs[0])))
        qproj = _align_natmap(u.ssite.cat, parse_natmap(load_doc(args.inputs[1])))
        Q = SliceObject(qproj.src, qproj.dst, qproj)
        iQ = pullback_along(i, Q)
        res_f = classify(u.ssite, well_order(iQ.slice), u.kappa)
        from .presheaf import inverse_iso

        ext = extend_classifier(
            u.ssite, i, res_f.codes, Q, inverse_iso(res_f.iso), u.kappa, univ=u
        )
        _emit(
            {"chi": print_natmap(ext.chi), "pullback_square_ok": ext.square_ok},
            args,
        )
        return EXIT_PASS if ext.square_ok else EXIT_FAIL
    if args.verb == "equiv-extend":
        i = parse_natmap(load_doc(args.inputs[0]))
        d2proj = parse_natmap(load_doc(args.inputs[1]))
        D2 = SliceObject(d2proj.src, d2proj.dst, d2proj)
        E2 = pullback_along(i, D2)
        if len(args.inputs) > 2:
            w = parse_natmap(load_doc(args.inputs[2]))
            e1proj = parse_natmap(load_doc(args.inputs[3]))
            E1 = SliceObject(e1proj.src, e1proj.dst, e1proj)
        else:
            from .presheaf import nat_identity as _nid

            w = _nid(E2.slice.total)
            E1 = E2.slice
        res = equivalence_extension(
            ssite, i, D2, w, E1, E2, args.kappa,
            (0, ssite.N),
        )
        _emit(
            {
                "checks": res.checks,
                "v": print_natmap(res.v),
                "ok": all(res.checks.values()),
            },
            args,
        )
        return EXIT_PASS if all(res.checks.values()) else EXIT_FAIL
    if args.verb == "soa-init":
        gens = [boundary_generator(ssite, c, n)
                for c in ssite.c_objects() for n in range(ssite.N + 1)]
        st = soa_init(ssite, args.kappa, gens)
        _emit(print_soa_state(st), args)
        return EXIT_PASS
    if args.verb == "soa-step":
        st = parse_soa_state(load_doc(args.state))
        try:
            st = soa_step(st, max_triples=args.max_triples)
        except BoundsExceeded as e:
            _emit({"error": "BOUNDS", "detail": str(e), "context": e.context}, args)
            return EXIT_BOUNDS
        inv = soa_invariants(st)
        doc = print_soa_state(st)
        doc["invariants"] = inv
        doc["ok"] = all(inv.values())
        _emit(doc, args)
        return EXIT_PASS if all(inv.values()) else EXIT_FAIL
    if args.verb == "saturation":
        u = parse_universe(load_doc(args.universe))
        rep = saturation_check(u.ssite, u, u.kappa)
        _emit({"ok": rep.ok, "outcomes": rep.outcomes, "detail": rep.detail}, args)
        return EXIT_PASS if rep.ok else EXIT_FAIL
    raise SchemaError(f"unknown univ verb {args.verb!r}")


def cmd_extend_reedy(args):
    from .extend import extend_reedy_fibration, verify_extension
    from .lcc import SliceObject
    from .simplicial import SSite

    R = parse_reedy(load_doc(args.reedy))
    ssite = SSite.product(R.cat, args.trunc_dim)
    i = parse_natmap(load_doc(args.inputs[0]))
    proj = parse_natmap(load_doc(args.inputs[1]))
    P = SliceObject(proj.src, proj.dst, proj)
    if args.verb == "run":
        try:
            res = extend_reedy_fibration(
                R, ssite, i, P, args.kappa, max_nodes=args.max_nodes
            )
        except BoundsExceeded as e:
            _emit({"error": "BOUNDS", "detail": str(e), "context": e.context}, args)
            return EXIT_BOUNDS
        rep = verify_extension(R, ssite, i, P, res.Q, res.P_to_Q, args.kappa)
        _emit(
            {
                "ok": rep.ok,
                "checks": rep.checks,
                "Q": print_natmap(res.Q.proj),
                "comparison": print_natmap(res.P_to_Q),
            },
            args,
        )
        return EXIT_PASS if rep.ok else EXIT_FAIL
    if args.verb == "verify":
        qproj = parse_natmap(load_doc(args.inputs[2]))
        Q = SliceObject(qproj.src, qproj.dst, qproj)
        ptoq = parse_natmap(load_doc(args.inputs[3]))
        rep = verify_extension(R, ssite, i, P, Q, ptoq, args.kappa)
        _emit({"ok": rep.ok, "checks": rep.checks, "failed_at": rep.failed_at}, args)
        return EXIT_PASS if rep.ok else EXIT_FAIL
    raise SchemaError(f"unknown extend-reedy verb {args.verb!r}")


# ---------------------------------------------------------------------------
# the suite runner with report rendering


def write_report_csv(report: dict, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["suite", "check", "ok", "info"])
        for c in report["checks"]:
            w.writerow([report["suite"], c["id"], int(c["ok"]), c["info"]])


def write_report_figure(report: dict, path: str) -> None:
    """Render pass/fail counts per check group to an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups: dict[str, list[int]] = {}
    for c in report["checks"]:
        group = c["id"].rsplit("_", 1)[0]
        groups.setdefault(group, [0, 0])
        groups[group][0 if c["ok"] else 1] += 1
    names = sorted(groups)
    passed = [groups[g][0] for g in names]
    failed = [groups[g][1] for g in names]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(names) + 2), 3.2))
    xs = range(len(names))
    ax.bar(xs, passed, color="#2a9d8f", label="pass")
    ax.bar(xs, failed, bottom=passed, color="#e76f51", label="fail")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("checks")
    ax.set_title(f"{report['suite']} (seed {report['seed']})")
    ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_props(args):
    from .suites import SUITES, run_suite

    if args.suite != "all" and args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; known: {', '.join(sorted(SUITES))}",
              file=sys.stderr)
        return EXIT_INVALID
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    worst = EXIT_PASS
    for name in names:
        caps = {}
        if args.instances is not None and name in (
            "topos-laws", "exactness", "lemma-4-2", "lemma-4-3",
            "thm-4-1", "eqlift",
        ):
            caps["instances"] = args.instances
        if name == "soa-invariants":
            caps["max_triples"] = args.max_triples
            caps["steps"] = args.max_stages
        if name == "extend-reedy":
            caps["kappa"] = args.kappa if args.kappa != 3 else 4
        try:
            report = run_suite(name, seed=args.seed, **caps)
        except BoundsExceeded as e:
            print(f"{name}: BOUNDS exceeded: {e} {e.context}")
            worst = max(worst, EXIT_BOUNDS)
            continue
        status = "PASS" if report["ok"] else "FAIL"
        print(
            f"{name}: {status} "
            f"({report['counts']['passed']}/{report['counts']['total']} checks)"
        )
        if not report["ok"]:
            for c in report["checks"]:
                if not c["ok"]:
                    print(f"  FAIL {c['id']} {c['info']}")
            worst = max(worst, EXIT_FAIL)
        if args.json_out:
            dump_doc(report, _suffixed(args.json_out, name, len(names) > 1))
        if args.csv_out:
            write_report_csv(report, _suffixed(args.csv_out, name, len(names) > 1))
        if args.fig_out:
            write_report_figure(report, _suffixed(args.fig_out, name, len(names) > 1))
    return worst


def _suffixed(path: str, name: str, multi: bool) -> str:
    """Insert the suite name before the extension when running several."""
    if not multi:
        return path
    import os.path

    root, ext = os.path.splitext(path)
    return f"{root}.{name}{ext}"


# ---------------------------------------------------------------------------
# argument wiring


def _common_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kappa", type=int, default=3)
    p.add_argument("--trunc-dim", dest="trunc_dim", type=int, default=1)
    p.add_argument("--reliable-margin", dest="reliable_margin", type=int, default=2)
    p.add_argument("--max-nodes", dest="max_nodes", type=int, default=10**6)
    p.add_argument("--max-stages", dest="max_stages", type=int, default=2)
    p.add_argument("--max-triples", dest="max_triples", type=int, default=4000)
    p.add_argument("--max-codes", dest="max_codes", type=int, default=5000)
    p.add_argument("--range-lo", dest="range_lo", type=int, default=None)
    p.add_argument("--range-hi", dest="range_hi", type=int, default=None)
    p.add_argument("--base-category", dest="base_category", default=None,
                   help="JSON file for C; omitted means the terminal category")
    p.add_argument("--json-out", dest="json_out", default=None)
    p.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="toposdesk",
        description="desk-scale computations in finite simplicial presheaf toposes",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("cat", help="finite category operations")
    p.add_argument("verb", choices=["validate"])
    p.add_argument("file")
    _common_flags(p)
    p.set_defaults(fn=cmd_cat_validate)

    p = sub.add_parser("psh", help="presheaf operations")
    p.add_argument("verb", choices=["limit", "colimit", "hom", "pi", "sigma", "exp"])
    p.add_argument("inputs", nargs="+")
    _common_flags(p)
    p.set_defaults(fn=cmd_psh)

    p = sub.add_parser("sset", help="truncated simplicial operations")
    p.add_argument(
        "verb",
        choices=["object", "tensor", "cotensor", "lift", "fib", "acyclic-fib"],
    )
    p.add_argument("inputs", nargs="*")
    p.add_argument("--kind", choices=["simplex", "boundary", "horn"], default="simplex")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int, default=0)
    _common_flags(p)
    p.set_defaults(fn=cmd_sset)

    p = sub.add_parser("reedy", help="Reedy structure operations")
    p.add_argument(
        "verb",
        choices=["validate", "latching", "matching", "fib", "cofib",
                 "generators", "elegance"],
    )
    p.add_argument("--reedy", required=True, help="Reedy structure JSON file")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--at", default=None, help="object for latching/matching")
    p.add_argument("--samples", type=int, default=5)
    _common_flags(p)
    p.set_defaults(fn=cmd_reedy)

    p = sub.add_parser("equiv", help="internal equivalence constructions")
    p.add_argument(
        "verb",
        choices=["path", "mpath", "iscontr", "isequiv", "eq", "weq", "eqlift"],
    )
    p.add_argument("inputs", nargs="+")
    _common_flags(p)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("univ", help="micro-universe operations")
    p.add_argument(
        "verb",
        choices=["build", "classify", "extend", "equiv-extend",
                 "soa-init", "soa-step", "saturation"],
    )
    p.add_argument("inputs", nargs="*")
    p.add_argument("--universe", default=None, help="universe snapshot JSON")
    p.add_argument("--state", default=None, help="soa state snapshot JSON")
    _common_flags(p)
    p.set_defaults(fn=cmd_univ)

    p = sub.add_parser("extend-reedy", help="the Reedy-fibration extension")
    p.add_argument("verb", choices=["run", "verify"])
    p.add_argument("--reedy", required=True)
    p.add_argument("inputs", nargs="+")
    _common_flags(p)
    p.set_defaults(fn=cmd_extend_reedy)

    p = sub.add_parser("props", help="run a property/acceptance suite")
    p.add_argument("verb", choices=["run"])
    p.add_argument("--suite", required=True)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--csv-out", dest="csv_out", default=None)
    p.add_argument("--fig-out", dest="fig_out", default=None)
    _common_flags(p)
    p.set_defaults(fn=cmd_props)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except BoundsExceeded as e:
        print(f"bounds exceeded: {e} {e.context}", file=sys.stderr)
        return EXIT_BOUNDS
    except ToposError as e:
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
