import json

import pytest

from mereocheck.enumerator import aem_models_up_to, induce_atc
from mereocheck.evaluator import evaluate
from mereocheck.formula import And, Atom, Exists, ForAll, Implies, IndVar, Not, alpha_equal, format_formula, free_variables, parse_formula
from mereocheck.model import Structure, parse_assignment
from mereocheck.theories import (
    FORMULA_TEXT,
    SignatureMismatch,
    Theory,
    check_theory,
    check_with_premise,
    formula,
    lemma_suite,
    registry,
    resolve_formula,
    theories,
)

from conftest import GOLDENS

CLI_THEORIES = ["PO", "EM", "AEM", "ATC", "ATC_THESES", "AEM_THESES", "VARZI", "SHIVER"]


def golden(name):
    return json.loads((GOLDENS / f"{name}.json").read_text())


def test_registry_contains_cli_theories():
    reg = registry()
    for name in CLI_THEORIES:
        assert isinstance(reg[name], Theory)


def test_registry_formulas_closed_and_well_sorted():
    for name in FORMULA_TEXT:
        f = formula(name)
        assert free_variables(f) == (set(), set()), name


def test_atc1_closed():
    assert free_variables(formula("ATC1")) == (set(), set())


def test_ssp_matches_display():
    x, y, z = IndVar("x"), IndVar("y"), IndVar("z")
    P = lambda a, b: Atom("P", (a, b))
    O = lambda a, b: Atom("O", (a, b))
    display = ForAll(x, ForAll(y, Implies(Not(P(x, y)), Exists(z, And(P(z, x), Not(O(z, y)))))))
    assert alpha_equal(formula("ssp"), display)


def test_t2_text():
    assert format_formula(formula("T2")) == "forall z. forall y. ((z in aa & O(z,y)) -> z in at[y])"


def test_theory_signatures():
    t = theories()
    assert t["PO"].axiom_names == ["ref", "trans", "ants"]
    assert t["EM"].axiom_names == ["ref", "trans", "ants", "ssp"]
    assert t["AEM"].axiom_names == ["ref", "trans", "ants", "ssp", "AT2_P"]
    assert t["ATC"].axiom_names == ["ATC1", "ATC2"]
    assert t["ATC"].signature == "F" and t["AEM"].signature == "P"


def test_goldens(m1, m1f, m2f, m3):
    assert check_theory(m1, "AEM").to_json() == golden("m1_AEM")
    assert check_theory(m1f, "ATC").to_json() == golden("m1f_ATC")
    assert check_theory(m2f, "ATC").to_json() == golden("m2f_ATC")
    assert check_theory(m3, "EM").to_json() == golden("m3_EM")
    assert check_theory(m3, "PO").to_json() == golden("m3_PO")
    assert lemma_suite(m2f).to_json() == golden("m2f_lemmas")
    assert lemma_suite(m1f).to_json() == golden("m1f_lemmas")
    assert lemma_suite(m3).to_json() == golden("m3_lemmas")


def test_fail_witness_is_confirmed(m3):
    v = check_theory(m3, "EM").verdict("ssp")
    assert v.status == "fail"
    # the instance named by the witness falsifies the body
    inst = parse_formula("~P(x,y) -> exists z. (P(z,x) & ~O(z,y))")
    assert not evaluate(m3, inst, parse_assignment([f"{n}={d}" for n, d in v.witness]))


def test_signature_mismatch(m1):
    with pytest.raises(SignatureMismatch):
        check_theory(m1, "ATC")


def test_undefined_verdict():
    s = Structure.f(["a", "b"], [("a", ["a"]), ("b", ["a"])])
    rep = check_theory(s, "ATC_THESES", bridge=True)
    assert rep.verdict("ref").status == "undefined"
    assert not rep.passed


def test_premise_gate(m3):
    rep = check_with_premise(m3, "SHIVER")
    assert not rep.applicable and "AEM" in rep.reason


def test_resolve_prefers_registry():
    g = resolve_formula("ssp")
    assert g.formula == formula("ssp") and g.warnings == []
    g = resolve_formula("forall x. P(x,x)")
    assert g.formula == formula("ref")


def test_defined_symbol_definitions_hold(m1, m2f, m3):
    for s in (m1, m3):
        for n in ["Df.O", "Df.PP", "Df.F", "Df.Fstar", "Df.A_P", "Df.aa_P", "Df.S", "Df.among", "Df.eq",
                  "Df.at_ind_P", "Df.at_pl_P"]:
            assert evaluate(s, formula(n)), n
    for n in ["Df.aa_F", "Df.at_pl_F", "Df.at_ind_F", "Df.P_F", "Df.A_F"]:
        assert evaluate(m2f, formula(n)), n


# ------------------------------------------------- model-class properties

AEM_MODELS = list(aem_models_up_to(3, 3))


@pytest.mark.parametrize("s", AEM_MODELS, ids=lambda s: "-".join(s.domain))
def test_properties_on_aem_models(s):
    assert check_theory(s, "AEM").passed
    for n in ["sum_fusion_equiv", "sum_unique", "fusion_unique", "at2_implies_at1_sum",
              "at2_implies_at1_fusion", "atomism_S", "general_atomicity"]:
        assert evaluate(s, formula(n)), n
    assert check_with_premise(s, "SHIVER").passed
    assert check_with_premise(s, "AEM_THESES").passed


@pytest.mark.parametrize("s", AEM_MODELS, ids=lambda s: "-".join(s.domain))
def test_lemmas_on_induced_atc_models(s):
    f = induce_atc(s)
    assert lemma_suite(f).passed
    assert check_with_premise(f, "ATC_THESES").passed
    for n in ["F_nonempty", "F_atoms_nonempty", "aa_nonempty"]:
        assert evaluate(f, formula(n)), n
