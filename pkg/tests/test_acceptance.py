"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when the module is run as a script.
"""

from __future__ import annotations

import functools
import json
import math
import sys
import time
import traceback
from pathlib import Path

from mereocheck.bridge import roundtrip_F, roundtrip_P
from mereocheck.batch import encode
from mereocheck.enumerator import (
    brute_codes,
    canonical_codes,
    count_models,
    enumerate_aem_canonical,
    enumerate_brute,
    filter_codes,
    induce_atc,
)
from mereocheck.evaluator import DefinednessError, evaluate, expand_definitions
from mereocheck.formula import Not, conj, format_formula, parse_formula
from mereocheck.model import load_structure, parse_assignment
from mereocheck.search import find_countermodel, run_experiment
from mereocheck.theories import FORMULA_TEXT, check_theory, formula, lemma_suite, registry

ROOT = Path(__file__).resolve().parent
DATA = ROOT / "data"
GOLDENS = ROOT / "goldens"
ARTIFACTS = ROOT.parent / "artifacts"

RESULTS: dict[str, str] = {}


def criterion(label: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*a, **kw):
            start = time.time()
            try:
                detail = fn(*a, **kw)
            except BaseException as e:
                msg = str(e).splitlines()[0] if str(e) else type(e).__name__
                RESULTS[label] = f"FAIL  {label}  ({msg[:240]})"
                print(RESULTS[label])
                raise
            extra = f"; {detail}" if detail else ""
            RESULTS[label] = f"PASS  {label}  ({time.time() - start:.1f}s{extra})"
            print(RESULTS[label])

        return run

    return wrap


def model(name):
    return load_structure(DATA / f"{name}.json")


def golden(name):
    return json.loads((GOLDENS / f"{name}.json").read_text())


def canonical_models(max_atoms=3, max_composites=3):
    out = []
    for k in range(1, max_atoms + 1):
        for m in range(0, min(max_composites, 2 ** k - k - 1) + 1):
            out.extend(enumerate_aem_canonical(k, m))
    return out


_cache: dict = {}


def brute_atc_models():
    if "atc" not in _cache:
        _cache["atc"] = [s for n in (1, 2, 3) for s in enumerate_brute(n, "F", "ATC")]
    return _cache["atc"]


# --------------------------------------------------------------------------


@criterion("AC1 golden models")
def test_ac1_golden_models():
    m1, m1f, m2f, m3 = model("m1"), model("m1f"), model("m2f"), model("m3")
    assert check_theory(m1, "AEM").to_json() == golden("m1_AEM")
    assert check_theory(m1f, "ATC").to_json() == golden("m1f_ATC")
    assert check_theory(m2f, "ATC").to_json() == golden("m2f_ATC")
    assert lemma_suite(m2f).to_json() == golden("m2f_lemmas")
    assert roundtrip_F(m2f).to_json() == golden("m2f_roundtrip")
    assert check_theory(m3, "PO").to_json() == golden("m3_PO")
    assert evaluate(m3, formula("wsp"))
    rep = check_theory(m3, "EM")
    assert rep.to_json() == golden("m3_EM")
    # the witness instance really falsifies the ssp body
    w = rep.verdict("ssp").witness
    body = parse_formula("~P(x,y) -> exists z. (P(z,x) & ~O(z,y))")
    assert not evaluate(m3, body, parse_assignment([f"{n}={d}" for n, d in w]))


@criterion("AC2 oracle equivalence")
def test_ac2_oracle_equivalence():
    problems = []
    for n in range(1, 5):
        b, c = brute_codes(n, "P", "AEM"), canonical_codes(n, "P")
        if b != c:
            problems.append(f"P n={n}: brute {len(b)} vs canonical {len(c)}")
    sizes, mismatch = [], False
    for n in range(1, 4):
        b = {encode(s) for s in brute_atc_models() if s.size == n}
        c = canonical_codes(n, "F")
        sizes.append(f"{len(b)}/{len(c)}")
        mismatch |= b != c
    if mismatch:
        # diagnostic: forbid composition from the empty plurality and compare again
        fixed = all(brute_codes(n, "F", "ATC_NE") == canonical_codes(n, "F") for n in range(1, 4))
        problems.append(f"F brute/induced at n=1..3: {' '.join(sizes)}; with F_nonempty added brute == induced: {fixed}")
    assert not problems, "; ".join(problems)
    return "F brute/induced " + " ".join(sizes)


@criterion("AC3 model counts")
def test_ac3_counting():
    checked = 0
    for k in range(1, 5):
        for m in range(0, 4):
            if m > 2 ** k - k - 1:
                continue
            want = math.comb(2 ** k - k - 1, m)
            assert count_models(k, m) == want
            assert sum(1 for _ in enumerate_aem_canonical(k, m)) == want
            checked += 1
    assert count_models(3, 2) == 6 and count_models(4, 3) == 165
    # labelled brute models with k atoms must be the canonical ones relabelled
    for n in range(1, 5):
        assert brute_codes(n, "P", "AEM") == canonical_codes(n, "P")
    return f"{checked} (k,m) pairs"


@criterion("AC4 lemma suites and round trips")
def test_ac4_lemma_suites():
    failures = []
    aem = canonical_models()
    for s in aem:
        rep = lemma_suite(s)
        extra = [n for n in ("ATC2", "Lemma5") if not evaluate(s, formula(n))]
        if not rep.passed or extra or not roundtrip_P(s).passed:
            failures.append(f"AEM {s.domain}")
    atc = [induce_atc(s) for s in aem] + brute_atc_models()
    for s in atc:
        rep = lemma_suite(s)
        rt = roundtrip_F(s)
        if not rep.passed or not rt.passed:
            bad = [v.axiom for v in rep.failures()] or [rt.first_failure.name]
            failures.append(f"ATC {sorted(s.pairs())} fails {bad}")
    assert not failures, f"{len(failures)} failing models, first: {failures[0]}"
    return f"{len(aem)} AEM and {len(atc)} ATC models"


@criterion("AC5 AT2 iff AT1 over ref+trans")
def test_ac5_atomicity_equivalence():
    premise = [formula("ref"), formula("trans")]
    goal = conj(*(formula(n) for n in (
        "at2_implies_at1_sum", "at2_implies_at1_fusion",
        "at1_sum_implies_at2", "at1_fusion_implies_at2",
    )))
    counts = []
    for n in range(1, 4):
        models = filter_codes("P", n, premise)
        counts.append(len(models))
        assert filter_codes("P", n, premise + [Not(goal)]) == []
    # labelled preorders on 1, 2, 3 points
    assert counts == [1, 4, 29]
    assert not find_countermodel(["ref", "trans"], goal, 3, "P").found
    return f"preorders {counts}"


@criterion("AC6 sum/fusion equivalence and uniqueness under ssp")
def test_ac6_ssp_consequences():
    em = [formula(n) for n in ("ref", "trans", "ants", "ssp")]
    total = 0
    for n in range(1, 5):
        total += len(filter_codes("P", n, em))
        for goal in ("sum_fusion_equiv", "sum_unique", "fusion_unique"):
            assert filter_codes("P", n, em + [Not(formula(goal))]) == [], (goal, n)
    return f"{total} EM structures"


@criterion("AC7 nonemptiness of aa, zz and at[zz] in ATC models")
def test_ac7_nonemptiness():
    names = ("aa_nonempty", "F_nonempty", "F_atoms_nonempty")
    induced = [induce_atc(s) for s in canonical_models()]
    for s in induced:
        for n in names:
            assert evaluate(s, formula(n)), (n, s)
    failures = {n: 0 for n in names}
    brute = brute_atc_models()
    for s in brute:
        for n in names:
            if not evaluate(s, formula(n)):
                failures[n] += 1
    bad = {n: c for n, c in failures.items() if c}
    assert not bad, f"over {len(brute)} brute ATC models (n<=3) failures per invariant: {bad}"
    return f"{len(induced)} induced and {len(brute)} brute models"


@criterion("AC8 wsp searches")
def test_ac8_search():
    out = ARTIFACTS / "experiments"
    out.mkdir(parents=True, exist_ok=True)
    rep = run_experiment("wsp-vs-ssp", out)
    assert rep.result.found and rep.result.model.size == 4
    assert not find_countermodel(["ref", "trans", "ants", "wsp"], "ssp", 3, "P").found
    uniq = run_experiment("wsp-uniqueness", out)
    for r in (rep, uniq):
        (out / f"{r.experiment.name}.report.json").write_text(json.dumps(r.to_json(), indent=2, sort_keys=True) + "\n")
    # outcome recorded, not asserted
    return uniq.verdict


@criterion("AC9 parser round trip and expansion agreement")
def test_ac9_parser_and_expansion():
    reg = registry()
    for name in FORMULA_TEXT:
        f = reg[name]
        assert parse_formula(format_formula(f)) == f, name
    p_models = [model("m1"), model("m3")] + canonical_models()
    p_models += [s for n in range(1, 5) for s in enumerate_brute(n, "P", "AEM")]
    f_models = [model("m1f"), model("m2f")] + [induce_atc(s) for s in canonical_models()] + brute_atc_models()
    checks = 0
    for sig, models in (("P", p_models), ("F", f_models)):
        for name in FORMULA_TEXT:
            f = formula(name)
            g = expand_definitions(f, sig)
            for s in models:
                try:
                    want = evaluate(s, f)
                except DefinednessError:
                    continue
                assert evaluate(s, g, memo=True) == want, (name, s)
                checks += 1
    return f"{len(FORMULA_TEXT)} formulas, {checks} evaluations"


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_ac")]
    failed = 0
    for t in tests:
        try:
            t()
        except BaseException:
            failed += 1
            traceback.print_exc(limit=1, file=sys.stderr)
    print("\n".join(RESULTS.values()))
    sys.exit(1 if failed else 0)
