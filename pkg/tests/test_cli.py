"""The command-line surface: exit codes, report artifacts, determinism."""

import json
import os

import pytest

from toposdesk.cat import simplex_category
from toposdesk.cli import main
from toposdesk.presheaf import nat_identity, yoneda
from toposdesk.reedy import delta_reedy
from toposdesk.serialize import (
    dump_doc,
    print_category,
    print_natmap,
    print_presheaf,
    print_reedy,
)
from toposdesk.simplicial import simplex_ps


@pytest.fixture()
def workdir(tmp_path):
    return str(tmp_path)


def _write(path, doc):
    dump_doc(doc, path)
    return path


def test_cat_validate(workdir):
    f = _write(os.path.join(workdir, "c.json"), print_category(simplex_category(2)))
    assert main(["cat", "validate", f, "--quiet"]) == 0


def test_cat_validate_invalid_input(workdir):
    f = os.path.join(workdir, "bad.json")
    with open(f, "w") as fh:
        fh.write("{не json")
    assert main(["cat", "validate", f, "--quiet"]) == 2


def test_psh_hom_count(workdir, delta1, capsys):
    d0 = _write(os.path.join(workdir, "d0.json"), print_presheaf(yoneda(delta1, "[0]")))
    d1 = _write(os.path.join(workdir, "d1.json"), print_presheaf(yoneda(delta1, "[1]")))
    out = os.path.join(workdir, "hom.json")
    assert main(["psh", "hom", d0, d1, "--json-out", out, "--quiet"]) == 0
    assert json.load(open(out))["count"] == 2


def test_sset_object_and_fib(workdir):
    out = os.path.join(workdir, "horn.json")
    assert (
        main(
            ["sset", "object", "--kind", "horn", "--n", "1", "--k", "0",
             "--trunc-dim", "1", "--json-out", out, "--quiet"]
        )
        == 0
    )
    horn = json.load(open(out))
    assert len(horn["level"]["[0]"]) == 1
    idm = _write(
        os.path.join(workdir, "idm.json"),
        print_natmap(nat_identity(simplex_ps(1, 1))),
    )
    assert main(["sset", "fib", idm, "--trunc-dim", "1", "--quiet"]) == 0


def test_reedy_cli(workdir):
    rf = _write(os.path.join(workdir, "r.json"), print_reedy(delta_reedy(2)))
    assert main(["reedy", "validate", "--reedy", rf, "--quiet"]) == 0
    assert main(["reedy", "generators", "--reedy", rf, "--trunc-dim", "1",
                 "--quiet"]) == 0
    assert main(["reedy", "elegance", "--reedy", rf, "--trunc-dim", "1",
                 "--samples", "2", "--quiet"]) == 0


def test_univ_build_and_soa_cycle(workdir):
    u = os.path.join(workdir, "u.json")
    assert main(["univ", "build", "--kappa", "2", "--trunc-dim", "0",
                 "--json-out", u, "--quiet"]) == 0
    doc = json.load(open(u))
    assert len(doc["codes"]["[0]"]) == 2
    s0 = os.path.join(workdir, "soa0.json")
    s1f = os.path.join(workdir, "soa1.json")
    assert main(["univ", "soa-init", "--kappa", "3", "--trunc-dim", "1",
                 "--json-out", s0, "--quiet"]) == 0
    assert main(["univ", "soa-step", "--state", s0, "--kappa", "3",
                 "--trunc-dim", "1", "--json-out", s1f, "--quiet"]) == 0
    assert json.load(open(s1f))["ok"]


def test_props_unknown_suite_exit_2():
    assert main(["props", "run", "--suite", "unknown-suite"]) == 2


def test_props_run_artifacts(workdir, capsys):
    jout = os.path.join(workdir, "rep.json")
    cout = os.path.join(workdir, "rep.csv")
    fout = os.path.join(workdir, "rep.png")
    rc = main(
        ["props", "run", "--suite", "exactness", "--seed", "0",
         "--instances", "4", "--json-out", jout, "--csv-out", cout,
         "--fig-out", fout]
    )
    assert rc == 0
    rep = json.load(open(jout))
    assert rep["ok"] and rep["suite"] == "exactness"
    text = open(cout).read()
    assert text.splitlines()[0] == "suite,check,ok,info"
    assert os.path.getsize(fout) > 0
    out = capsys.readouterr().out
    assert "exactness: PASS" in out


def test_props_reports_deterministic(workdir):
    a = os.path.join(workdir, "a.json")
    b = os.path.join(workdir, "b.json")
    for path in (a, b):
        assert main(
            ["props", "run", "--suite", "exactness", "--seed", "3",
             "--instances", "4", "--json-out", path, "--quiet"]
        ) == 0
    assert open(a).read() == open(b).read()


def test_props_soa_tiny_caps_exit_3(capsys):
    rc = main(
        ["props", "run", "--suite", "soa-invariants", "--max-triples", "1",
         "--quiet"]
    )
    assert rc == 3
    assert "BOUNDS" in capsys.readouterr().out


def test_sset_fib_negative_exit_1(workdir):
    """A vertex inclusion into the interval is no fibration: exit code 1."""
    from toposdesk.presheaf import NatMap
    from toposdesk.simplicial import horn_ps

    horn, _ = horn_ps(1, 1, 0)
    d1 = simplex_ps(1, 1)
    inc = NatMap(horn, d1, {c: {e: e for e in horn.level[c]} for c in d1.base.objects})
    f = _write(os.path.join(workdir, "inc.json"), print_natmap(inc))
    assert main(["sset", "fib", f, "--trunc-dim", "1", "--quiet"]) == 1


def test_extend_reedy_cli_roundtrip(workdir):
    from toposdesk.cat import discrete_category
    from toposdesk.generate import disjoint_sheets
    from toposdesk.presheaf import NatMap
    from toposdesk.reedy import direct_reedy
    from toposdesk.serialize import print_reedy
    from toposdesk.simplicial import SSite, c_representable, horn_ps, tensor

    C = discrete_category(("u", "v"))
    R = direct_reedy(C, {"u": 0, "v": 1})
    ss = SSite.product(C, 1)
    hornT = tensor(ss, horn_ps(1, 1, 0)[0], c_representable(ss, "u"))
    fullT = tensor(ss, simplex_ps(1, 1), c_representable(ss, "u"))
    i = NatMap(
        hornT.ps, fullT.ps,
        {c: {e: e for e in hornT.ps.level[c]} for c in ss.cat.objects},
    )
    P, _ = disjoint_sheets(ss, hornT.ps, 2)
    rf = _write(os.path.join(workdir, "reedy.json"), print_reedy(R))
    inf = _write(os.path.join(workdir, "i.json"), print_natmap(i))
    pf = _write(os.path.join(workdir, "p.json"), print_natmap(P.proj))
    out = os.path.join(workdir, "ext.json")
    rc = main(
        ["extend-reedy", "run", "--reedy", rf, inf, pf,
         "--kappa", "4", "--trunc-dim", "1", "--json-out", out, "--quiet"]
    )
    assert rc == 0
    assert json.load(open(out))["ok"]


def test_univ_extend_cli(workdir):
    from toposdesk.generate import disjoint_sheets
    from toposdesk.presheaf import NatMap
    from toposdesk.simplicial import horn_ps

    from toposdesk.simplicial import SSite

    s1 = SSite.simplicial(1)
    horn, _ = horn_ps(1, 1, 0)
    d1 = simplex_ps(1, 1)
    i = NatMap(horn, d1, {c: {e: e for e in horn.level[c]} for c in s1.cat.objects})
    Q, _ = disjoint_sheets(s1, d1, 2)
    uf = os.path.join(workdir, "u.json")
    assert main(["univ", "build", "--kappa", "3", "--trunc-dim", "1",
                 "--json-out", uf, "--quiet"]) == 0
    inf = _write(os.path.join(workdir, "i.json"), print_natmap(i))
    qf = _write(os.path.join(workdir, "q.json"), print_natmap(Q.proj))
    out = os.path.join(workdir, "ext.json")
    rc = main(["univ", "extend", inf, qf, "--universe", uf,
               "--kappa", "3", "--trunc-dim", "1", "--json-out", out, "--quiet"])
    assert rc == 0
    assert json.load(open(out))["pullback_square_ok"]


def test_equiv_weq_cli_reports_range(workdir):
    from toposdesk.generate import disjoint_sheets
    from toposdesk.limits import terminal_presheaf, terminal_map
    from toposdesk.presheaf import nat_identity as nid
    from toposdesk.simplicial import SSite

    s1 = SSite.simplicial(1)
    term = terminal_presheaf(s1.cat)
    D, _ = disjoint_sheets(s1, term, 2)
    f = _write(os.path.join(workdir, "f.json"), print_natmap(nid(D.total)))
    e = _write(os.path.join(workdir, "e.json"), print_natmap(D.proj))
    out = os.path.join(workdir, "weq.json")
    rc = main(["equiv", "weq", f, e, e, "--trunc-dim", "1",
               "--json-out", out, "--quiet"])
    assert rc == 0
    doc = json.load(open(out))
    assert doc["result"] is True and "range" in doc


def test_props_all_artifact_naming(workdir):
    """Running several suites inserts the suite name before the extension,
    keeping renderable figure paths."""
    from toposdesk.cli import _suffixed

    assert _suffixed("rep.png", "eqlift", True) == "rep.eqlift.png"
    assert _suffixed("rep.png", "eqlift", False) == "rep.png"
    assert _suffixed("out/rep.json", "topos-laws", True) == "out/rep.topos-laws.json"
