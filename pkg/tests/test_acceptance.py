"""The acceptance gate: every criterion at its stated scale, exact checks,
one pass/fail line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines live; the
same suites back `toposdesk props run`.
"""

import pytest

from toposdesk.suites import run_suite

RESULTS = []


def _gate(number, title, name, **caps):
    report = run_suite(name, seed=0, **caps)
    status = "PASS" if report["ok"] else "FAIL"
    line = (
        f"criterion {number:>2} [{status}] {title}: "
        f"{report['counts']['passed']}/{report['counts']['total']} checks"
    )
    print(line)
    RESULTS.append(line)
    if not report["ok"]:
        failures = [c for c in report["checks"] if not c["ok"]][:5]
        pytest.fail(f"{title}: {failures}")


def test_criterion_01_topos_laws():
    _gate(1, "topos laws on 200 seeded instances", "topos-laws", instances=200)


def test_criterion_02_exactness():
    _gate(2, "extensivity and adhesivity on 100 instances each",
          "exactness", instances=100)


def test_criterion_03_lemma_4_2_and_4_4():
    _gate(3, "iscontr/isequiv section equivalences at N=2, reliable_dim=1",
          "lemma-4-2", instances=50, N=2, reliable=1)
    _gate(3, "iscontr/isequiv section equivalences at N=2, reliable_dim=0",
          "lemma-4-2", instances=50, N=2, reliable=0)


def test_criterion_04_lemma_4_3_and_4_5():
    _gate(4, "Beck–Chevalley and Eq pullback isos on 50 instances",
          "lemma-4-3", instances=50)


def test_criterion_05_theorem_4_1():
    _gate(5, "equivalence extension on 30 instances", "thm-4-1", instances=30)


def test_criterion_06_eqlift():
    _gate(6, "lift extension into Eq on 30 instances", "eqlift", instances=30)


def test_criterion_07_universe_strictness():
    _gate(7, "classification and strict extension over the enumerated family",
          "universe-strict")


def test_criterion_08_soa_builder():
    _gate(8, "SOA stages, invariants, colimit stage, saturation",
          "soa-invariants")


def test_criterion_09_reedy_suite():
    _gate(9, "matching/latching oracles, latching-preserves-monos, elegance evidence",
          "reedy-suite")


def test_criterion_10_extension_algorithm():
    _gate(10, "degreewise extension on 10 curated instances", "extend-reedy")


def test_zz_summary():
    print()
    for line in RESULTS:
        print(line)
    assert len(RESULTS) >= 10
