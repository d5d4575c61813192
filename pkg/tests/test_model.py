import json

import pytest
from hypothesis import given, settings

from mereocheck.model import (
    Assignment,
    FamilySpec,
    InvalidStructure,
    ModelFormatError,
    Structure,
    dump_structure,
    load_structure,
    loads_structure,
    parse_assignment,
    save_structure,
    validate,
)

from strategies import structures


def test_validate_m1(m1):
    assert validate(m1) == []


def test_validate_unknown_element():
    assert validate(Structure.p(["a"], [("a", "b")])) == ["unknown element b"]


def test_validate_m2f(m2f):
    assert validate(m2f) == []


def test_validate_duplicates_and_empty():
    assert validate(Structure.p([], [])) != []
    assert any("duplicate" in v for v in validate(Structure.p(["a", "a"], [])))


def test_load_m1(m1):
    assert m1 == Structure.p(["a"], [("a", "a")])


def test_load_single_atom_f():
    s = loads_structure('{"domain": ["a"], "F": [["a", ["a"]]]}')
    assert s.signature == "F"
    assert s.composition == frozenset({("a", frozenset({"a"}))})


def test_empty_subset_serialised_as_empty_list():
    s = Structure.f(["a"], [("a", []), ("a", ["a"])])
    assert json.loads(dump_structure(s))["F"] == [["a", []], ["a", ["a"]]]


def test_save_load_m3(tmp_path, m3):
    p = tmp_path / "m3.json"
    save_structure(m3, p)
    back = load_structure(p)
    assert back == m3
    assert back.domain == ("a", "b", "x", "y")


def test_normalised_output_is_a_fixpoint(m3):
    text = dump_structure(m3)
    assert dump_structure(loads_structure(text)) == text


@given(structures("P", 4))
@settings(max_examples=100, deadline=None)
def test_p_serialisation_roundtrip(s):
    assert loads_structure(dump_structure(s)) == s


@given(structures("F", 3))
@settings(max_examples=100, deadline=None)
def test_f_serialisation_roundtrip(s):
    text = dump_structure(s)
    assert loads_structure(text) == s
    assert dump_structure(loads_structure(text)) == text


@pytest.mark.parametrize("text,fragment", [
    ("{", "<string>:1:2"),
    ("[]", "top level"),
    ('{"domain": "a"}', "domain"),
    ('{"domain": ["a"], "signature": "Q"}', "signature"),
    ('{"domain": ["a"], "P": [["a"]]}', "P[0]"),
    ('{"domain": ["a"], "signature": "F", "F": [["a", "a"]]}', "F[0]"),
])
def test_format_errors(text, fragment):
    with pytest.raises(ModelFormatError) as e:
        loads_structure(text)
    assert fragment in str(e.value)


def test_load_rejects_invalid_structure():
    with pytest.raises(InvalidStructure) as e:
        loads_structure('{"domain": ["a"], "P": [["a", "b"]]}')
    assert "unknown element b" in str(e.value)


def test_parse_assignment():
    a = parse_assignment(["x=a", "zz={a,b}", "yy={}"])
    assert a == Assignment({"x": "a"}, {"zz": frozenset({"a", "b"}), "yy": frozenset()})


def test_assignment_validation(m1):
    assert parse_assignment(["x=q"]).validate(m1) != []
    assert parse_assignment(["zz={a}"]).validate(m1) == []


def test_family_spec_structure():
    s = FamilySpec(2, frozenset({frozenset({1, 2})})).to_structure()
    assert s.domain == ("a1", "a2", "c1")
    assert s.parthood == {("a1", "a1"), ("a2", "a2"), ("c1", "c1"), ("a1", "c1"), ("a2", "c1")}


@pytest.mark.parametrize("k,composites", [(2, [{1}]), (2, [{1, 3}]), (0, [])])
def test_family_spec_invariants(k, composites):
    with pytest.raises(ValueError):
        FamilySpec(k, frozenset(frozenset(c) for c in composites))
