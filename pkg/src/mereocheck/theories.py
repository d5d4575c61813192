"""Registry of named formulas and theories, and per-axiom checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

from .evaluator import DefinednessError, evaluate, explain
from .formula import Formula, close, parse_formula
from .model import Structure

# Displayed open formulas are stored universally closed.
FORMULA_TEXT: dict[str, str] = {
    # partial order and supplementation
    "ref": "forall x. P(x,x)",
    "trans": "forall x. forall y. forall z. ((P(x,y) & P(y,z)) -> P(x,z))",
    "ants": "forall x. forall y. ((P(x,y) & P(y,x)) -> x = y)",
    "ssp": "forall x. forall y. (~P(x,y) -> exists z. (P(z,x) & ~O(z,y)))",
    "wsp": "forall x. forall y. (PP(x,y) -> exists z. (P(z,y) & ~O(z,x)))",
    # definitions over parthood
    "Df.O": "forall x. forall y. (O(x,y) <-> exists z. (P(z,x) & P(z,y)))",
    "Df.PP": "forall x. forall y. (PP(x,y) <-> (P(x,y) & ~x = y))",
    "Df.F": "forall zz. forall x. (F(zz,x) <-> ((forall z. (z in zz -> P(z,x))) "
            "& forall y. (P(y,x) -> exists z. (z in zz & O(z,y)))))",
    "Df.Fstar": "forall zz. forall x. (Fstar(zz,x) <-> forall y. (O(y,x) <-> exists z. (z in zz & O(z,y))))",
    "Df.A_P": "forall x. (A(x) <-> forall y. (P(y,x) -> x = y))",
    "AT2_P": "forall x. exists y. (P(y,x) & A(y))",
    "Df.aa_P": "forall x. (x in aa <-> A(x))",
    "Df.S": "forall x. (S(x) <-> exists yy. (yy among aa & Fstar(yy,x)))",
    "Df.among": "forall xx. forall yy. (xx among yy <-> ((forall z. (z in xx -> z in yy)) & exists x. x in xx))",
    "Df.eq": "forall zz. forall yy. (zz eq yy <-> forall x. (x in zz <-> x in yy))",
    "Df.at_ind_P": "forall x. forall y. (y in at[x] <-> (P(y,x) & y in aa))",
    "Df.at_pl_P": "forall xx. forall y. (y in at[xx] <-> exists z. (z in xx & (P(y,z) & y in aa)))",
    # atomism
    "AT1_F": "forall x. F(at[x],x)",
    "AT1_Fstar": "forall x. Fstar(at[x],x)",
    "atoms_fusion": "forall x. forall y. (O(y,x) <-> exists z. (z in at[x] & O(y,z)))",
    "atoms_sum": "forall x. ((forall y. (y in at[x] -> P(y,x))) & forall y. (P(y,x) -> exists z. (z in at[x] & O(y,z))))",
    "at2_implies_at1_sum": "((forall x. exists y. (P(y,x) & A(y))) -> forall x. F(at[x],x))",
    "at2_implies_at1_fusion": "((forall x. exists y. (P(y,x) & A(y))) -> forall x. Fstar(at[x],x))",
    "at1_sum_implies_at2": "((forall x. F(at[x],x)) -> forall x. exists y. (P(y,x) & A(y)))",
    "at1_fusion_implies_at2": "((forall x. Fstar(at[x],x)) -> forall x. exists y. (P(y,x) & A(y)))",
    "atomism_S": "forall x. S(x)",
    "general_atomicity": "forall x. exists y. (P(x,y) & S(y))",
    "general_atomicity_sum": "forall x. exists y. exists zz. (zz among aa & (P(x,y) & F(zz,y)))",
    # sums and fusions under supplementation
    "sum_fusion_equiv": "forall zz. forall x. (F(zz,x) <-> Fstar(zz,x))",
    "sum_unique": "forall zz. forall x. forall y. ((F(zz,x) & F(zz,y)) -> x = y)",
    "fusion_unique": "forall zz. forall x. forall y. ((Fstar(zz,x) & Fstar(zz,y)) -> x = y)",
    # composition-primitive theory
    "ATC1": "forall x. exists zz. (zz among aa & F(zz,x) & (forall yy. (yy among aa -> (F(yy,x) <-> zz eq yy))) "
            "& forall y. (F(zz,y) -> x = y))",
    "ATC2": "forall zz. forall x. (F(zz,x) <-> F(at[zz],x))",
    "Df.aa_F": "forall x. (x in aa <-> forall yy. forall z. (z in yy -> (F(yy,x) -> z = x)))",
    "Df.at_pl_F": "forall zz. forall x. (x in at[zz] <-> exists y. (y in zz & exists yy. (yy among aa & F(yy,y) & x in yy)))",
    "Df.at_ind_F": "forall x. (at[x] among aa & F(at[x],x) & (forall yy. (yy among aa -> (F(yy,x) <-> yy eq at[x]))) "
                   "& forall y. (F(at[x],y) -> x = y))",
    "Df.P_F": "forall x. forall y. (P(x,y) <-> at[x] among at[y])",
    "Df.A_F": "forall x. (A(x) <-> x in aa)",
    "T1": "forall z. forall x. ((z in aa & z in at[x]) -> at[z] among at[x])",
    "T2": "forall z. forall y. ((z in aa & O(z,y)) -> z in at[y])",
    "Lemma3": "forall zz. forall x. (((forall z. (z in zz -> P(z,x))) & forall y. (P(y,x) -> exists z. (z in zz & O(z,y)))) -> F(zz,x))",
    "Lemma4": "forall zz. forall x. (F(zz,x) -> ((forall z. (z in zz -> P(z,x))) & forall y. (P(y,x) -> exists z. (z in zz & O(z,y)))))",
    "Lemma5": "forall xx. forall yy. forall z. ((xx eq yy & F(xx,z)) -> F(yy,z))",
    "Lemma7": "forall zz. forall x. (F(at[zz],x) -> F(zz,x))",
    "Lemma8": "forall zz. forall x. (F(zz,x) -> F(at[zz],x))",
    "F_nonempty": "forall zz. forall x. (F(zz,x) -> exists y. y in zz)",
    "F_atoms_nonempty": "forall zz. forall x. (F(zz,x) -> exists y. y in at[zz])",
    "aa_nonempty": "exists x. x in aa",
}


@lru_cache(maxsize=None)
def formula(name: str) -> Formula:
    return close(parse_formula(FORMULA_TEXT[name]))


@dataclass(frozen=True)
class Theory:
    name: str
    axioms: tuple[tuple[str, Formula], ...]
    signature: str
    premise: str | None = None  # theory a structure must satisfy first

    @property
    def axiom_names(self) -> list[str]:
        return [n for n, _ in self.axioms]


def _theory(name: str, names: list[str], signature: str, premise: str | None = None) -> Theory:
    return Theory(name, tuple((n, formula(n)) for n in names), signature, premise)


PO_AXIOMS = ["ref", "trans", "ants"]
LEMMAS_F = PO_AXIOMS + ["ssp", "Lemma3", "Lemma4", "T1", "T2"]
LEMMAS_P = ["Lemma5", "ATC1", "Lemma7", "Lemma8"]


@lru_cache(maxsize=None)
def theories() -> Mapping[str, Theory]:
    t = {
        "PO": _theory("PO", PO_AXIOMS, "P"),
        "EM": _theory("EM", PO_AXIOMS + ["ssp"], "P"),
        "AEM": _theory("AEM", PO_AXIOMS + ["ssp", "AT2_P"], "P"),
        "ATC": _theory("ATC", ["ATC1", "ATC2"], "F"),
        # parthood theses that hold in every ATC model
        "ATC_THESES": _theory(
            "ATC_THESES",
            LEMMAS_F + ["AT2_P", "Df.aa_P", "Df.at_ind_P", "Df.at_pl_P", "Df.A_P"],
            "F", premise="ATC",
        ),
        # composition theses that hold in every AEM model
        "AEM_THESES": _theory(
            "AEM_THESES",
            LEMMAS_P + ["ATC2", "Df.aa_F", "Df.at_pl_F", "Df.at_ind_F", "Df.P_F", "Df.A_F"],
            "P", premise="AEM",
        ),
        "VARZI": _theory(
            "VARZI",
            ["at2_implies_at1_sum", "at2_implies_at1_fusion",
             "at1_sum_implies_at2", "at1_fusion_implies_at2"],
            "P", premise="REFTRANS",
        ),
        "SHIVER": _theory(
            "SHIVER",
            ["AT1_F", "AT1_Fstar", "atomism_S", "general_atomicity", "general_atomicity_sum"],
            "P", premise="AEM",
        ),
        "REFTRANS": _theory("REFTRANS", ["ref", "trans"], "P"),
        "ATC_NE": _theory("ATC_NE", ["ATC1", "ATC2", "F_nonempty"], "F"),
    }
    return MappingProxyType(t)


def registry() -> Mapping[str, Formula | Theory]:
    """Every named formula and theory; names are stable."""
    out: dict[str, Formula | Theory] = {name: formula(name) for name in FORMULA_TEXT}
    out.update(theories())
    return MappingProxyType(out)


def theory(name: str) -> Theory:
    try:
        return theories()[name]
    except KeyError:
        raise KeyError(f"unknown theory {name!r}; known: {', '.join(theories())}") from None


# ------------------------------------------------------------- reports


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    axiom: str
    status: str  # "pass" | "fail" | "undefined"
    witness: tuple[tuple[str, str], ...] = ()
    reason: str = ""

    def to_json(self) -> dict:
        out: dict = {"axiom": self.axiom, "status": self.status}
        if self.status == "fail":
            out["witness"] = [list(w) for w in self.witness]
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class TheoryReport:
    theory: str
    verdicts: tuple[Verdict, ...] = ()
    applicable: bool = True
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.applicable and all(v.status == "pass" for v in self.verdicts)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status != "pass"]

    def verdict(self, axiom: str) -> Verdict:
        for v in self.verdicts:
            if v.axiom == axiom:
                return v
        raise KeyError(axiom)

    def to_json(self) -> dict:
        out: dict = {"theory": self.theory, "applicable": self.applicable, "passed": self.passed}
        if not self.applicable:
            out["reason"] = self.reason
        out["verdicts"] = [v.to_json() for v in self.verdicts]
        return out


def check_axiom(s: Structure, name: str, f: Formula) -> Verdict:
    try:
        value, chain = explain(s, f)
    except DefinednessError as e:
        return Verdict(name, "undefined", reason=str(e))
    if value:
        return Verdict(name, "pass")
    return Verdict(name, "fail", tuple(chain))


def check_theory(s: Structure, t: Theory | str, *, bridge: bool = False) -> TheoryReport:
    """Evaluate every axiom of ``t`` on ``s``.

    The evaluator reads every predicate on both signatures, so with
    ``bridge`` a theory may be checked on the other signature.
    """
    if isinstance(t, str):
        t = theory(t)
    if s.signature != t.signature and not bridge:
        raise SignatureMismatch(
            f"theory {t.name} is stated for {t.signature}-structures, got a {s.signature}-structure"
        )
    verdicts = tuple(check_axiom(s, name, f) for name, f in t.axioms)
    return TheoryReport(t.name, verdicts)


def check_with_premise(s: Structure, t: Theory | str) -> TheoryReport:
    """Check ``t`` only if ``s`` satisfies its premise theory."""
    if isinstance(t, str):
        t = theory(t)
    if t.premise is not None:
        pre = check_theory(s, t.premise, bridge=True)
        if not pre.passed:
            bad = ", ".join(v.axiom for v in pre.failures())
            return TheoryReport(t.name, applicable=False, reason=f"structure is not a model of {t.premise} ({bad})")
    return check_theory(s, t, bridge=True)


def lemma_suite(s: Structure) -> TheoryReport:
    """The equivalence lemmas for the structure's own signature.

    F-structures must be ATC models and get the partial order axioms,
    ssp, both directions of the sum definition, T1 and T2; P-structures
    must be AEM models and get ATC1, sum extensionality and both
    directions of F_zz x <-> F_at[zz] x.
    """
    premise, names = ("ATC", LEMMAS_F) if s.signature == "F" else ("AEM", LEMMAS_P)
    pre = check_theory(s, premise)
    if not pre.passed:
        bad = ", ".join(v.axiom for v in pre.failures())
        return TheoryReport("lemmas", applicable=False, reason=f"not a model of {premise} ({bad})")
    verdicts = tuple(check_axiom(s, n, formula(n)) for n in names)
    return TheoryReport("lemmas", verdicts)


@dataclass
class ParsedGoal:
    name: str
    formula: Formula
    warnings: list[str] = field(default_factory=list)


def resolve_formula(text: str) -> ParsedGoal:
    """A registry name or inline formula text; names win on collision."""
    warnings = []
    if text in FORMULA_TEXT:
        try:
            parse_formula(text)
            warnings.append(f"{text!r} is both a registry name and a formula; using the registry entry")
        except ValueError:
            pass
        return ParsedGoal(text, formula(text), warnings)
    return ParsedGoal(text, parse_formula(text), warnings)
