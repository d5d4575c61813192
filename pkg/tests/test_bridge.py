import json

import pytest

from mereocheck.bridge import derive_F_from_P, derive_P_from_F, roundtrip, roundtrip_F, roundtrip_P
from mereocheck.enumerator import aem_models_up_to, enumerate_aem_canonical, induce_atc
from mereocheck.evaluator import DefinednessError
from mereocheck.model import Structure

from conftest import GOLDENS

NOT_ATC = Structure.f(["a", "b"], [("a", ["a"]), ("b", ["a"])])


def ident(domain):
    return {(x, x) for x in domain}


def test_derive_p_from_m2f(m2f):
    assert derive_P_from_F(m2f).parthood == ident("abs") | {("a", "s"), ("b", "s")}


def test_derive_p_from_m1f(m1f):
    assert derive_P_from_F(m1f).parthood == {("a", "a")}


def test_derive_p_disjoint_singletons():
    s = Structure.f(["a", "b"], [("a", ["a"]), ("b", ["b"])])
    assert derive_P_from_F(s).parthood == ident("ab")


def test_derive_p_undefined():
    with pytest.raises(DefinednessError):
        derive_P_from_F(NOT_ATC)


def test_derive_f_round_trip_m2f(m2f):
    p = derive_P_from_F(m2f)
    assert derive_F_from_P(p, "sum").composition == m2f.composition
    assert derive_F_from_P(p, "fusion").composition == m2f.composition


def test_derive_f_from_m1(m1):
    assert derive_F_from_P(m1).composition == {("a", frozenset({"a"}))}


def test_derive_f_from_m3_has_two_sums(m3):
    comp = derive_F_from_P(m3).composition
    assert ("x", frozenset("ab")) in comp and ("y", frozenset("ab")) in comp


def test_sum_never_composes_from_empty(m3):
    assert all(zz for _, zz in derive_F_from_P(m3).composition)


def test_roundtrip_f_golden(m1f, m2f):
    assert roundtrip_F(m2f).to_json() == json.loads((GOLDENS / "m2f_roundtrip.json").read_text())
    assert roundtrip_F(m1f).passed


def test_roundtrip_f_failure_stage():
    rep = roundtrip_F(NOT_ATC)
    first = rep.first_failure
    assert first.name == "ATC" and "ATC1" in first.detail
    # a is the first falsifier in domain order; b falsifies too
    assert first.witness == (("x", "a"),)
    assert [st.status for st in rep.stages] == ["fail", "skipped", "skipped", "skipped"]


def test_roundtrip_p(m1, m3):
    assert roundtrip_P(m1).passed
    fam = next(enumerate_aem_canonical(2, 1))
    assert roundtrip(fam).passed
    rep = roundtrip_P(m3)
    assert rep.first_failure.name == "AEM" and "ssp" in rep.first_failure.detail


@pytest.mark.parametrize("s", list(aem_models_up_to(3, 3)), ids=lambda s: ",".join(s.domain))
def test_translations_are_mutually_inverse(s):
    assert roundtrip_P(s).passed
    assert derive_F_from_P(s, "sum") == derive_F_from_P(s, "fusion")
    assert derive_P_from_F(derive_F_from_P(s)) == s
    f = induce_atc(s)
    assert roundtrip_F(f).passed
    assert derive_F_from_P(derive_P_from_F(f)) == f
