"""Translations between the parthood and composition signatures.

``derive_P_from_F`` reads parthood off an F-structure as inclusion of
atom pluralities; ``derive_F_from_P`` collects every (x, zz) that is a
sum (or fusion) in a P-structure.  The round trips compare relations
literally over the same labelled domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .evaluator import DefinednessError, semantics
from .model import Structure, check_valid
from .theories import check_theory


def derive_P_from_F(s: Structure) -> Structure:
    """P(x,y) iff at[x] is nonempty and included in at[y].

    Raises DefinednessError if some at[x] has no referent.
    """
    if s.signature != "F":
        raise ValueError("derive_P_from_F expects an F-structure")
    sem = semantics(check_valid(s))
    ats = [sem.at_ind(i) for i in range(s.size)]
    pairs = [
        (s.domain[x], s.domain[y])
        for x in range(s.size)
        for y in range(s.size)
        if ats[x] and ats[x] & ~ats[y] == 0
    ]
    return Structure.p(s.domain, pairs)


def derive_F_from_P(s: Structure, mode: str = "sum") -> Structure:
    if s.signature != "P":
        raise ValueError("derive_F_from_P expects a P-structure")
    if mode not in ("sum", "fusion"):
        raise ValueError(f"mode must be 'sum' or 'fusion', got {mode!r}")
    sem = semantics(check_valid(s))
    test = sem.F if mode == "sum" else sem.Fstar
    pairs = [
        (s.domain[x], s.names(zz))
        for x in range(s.size)
        for zz in range(1 << s.size)
        if test(zz, x)
    ]
    return Structure.f(s.domain, pairs)


@dataclass(frozen=True)
class Stage:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    detail: str = ""
    witness: tuple = ()

    def to_json(self) -> dict:
        out: dict = {"stage": self.name, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        if self.witness:
            out["witness"] = [list(w) if isinstance(w, tuple) else w for w in self.witness]
        return out


@dataclass
class RoundTripReport:
    kind: str
    stages: list[Stage] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(st.status == "pass" for st in self.stages)

    @property
    def first_failure(self) -> Stage | None:
        return next((st for st in self.stages if st.status == "fail"), None)

    def to_json(self) -> dict:
        return {"roundtrip": self.kind, "passed": self.passed, "stages": [st.to_json() for st in self.stages]}


def _theory_stage(name: str, s: Structure, theory: str) -> Stage:
    rep = check_theory(s, theory)
    if rep.passed:
        return Stage(name, "pass")
    bad = rep.failures()[0]
    detail = f"{bad.axiom} {bad.status}" + (f": {bad.reason}" if bad.reason else "")
    return Stage(name, "fail", detail, bad.witness)


def _diff_stage(name: str, got: Structure, want: Structure) -> Stage:
    if got.signature == "P":
        a, b = got.parthood, want.parthood
        fmt = lambda p: f"P({p[0]},{p[1]})"
    else:
        a, b = got.composition, want.composition
        fmt = lambda p: f"F({{{','.join(sorted(p[1], key=want.index.get))}}},{p[0]})"
    if a == b:
        return Stage(name, "pass")
    extra = sorted(fmt(p) for p in a - b)
    missing = sorted(fmt(p) for p in b - a)
    detail = []
    if extra:
        detail.append("extra " + ", ".join(extra))
    if missing:
        detail.append("missing " + ", ".join(missing))
    return Stage(name, "fail", "; ".join(detail), tuple(extra + missing)[:1])


def _run(kind: str, steps) -> RoundTripReport:
    rep = RoundTripReport(kind)
    failed = False
    for name, thunk in steps:
        if failed:
            rep.stages.append(Stage(name, "skipped"))
            continue
        st = thunk()
        rep.stages.append(st)
        failed = st.status != "pass"
    return rep


def roundtrip_F(s: Structure) -> RoundTripReport:
    """ATC model -> derived parthood is an AEM model -> sums and fusions give back ``s``."""
    ctx: dict = {}

    def derive():
        try:
            ctx["p"] = derive_P_from_F(s)
        except DefinednessError as e:
            return Stage("derived P is AEM", "fail", str(e), (e.element,))
        return _theory_stage("derived P is AEM", ctx["p"], "AEM")

    steps = [
        ("ATC", lambda: _theory_stage("ATC", s, "ATC")),
        ("derived P is AEM", derive),
        ("sum round trip", lambda: _diff_stage("sum round trip", derive_F_from_P(ctx["p"], "sum"), s)),
        ("fusion round trip", lambda: _diff_stage("fusion round trip", derive_F_from_P(ctx["p"], "fusion"), s)),
    ]
    return _run("F", steps)


def roundtrip_P(s: Structure) -> RoundTripReport:
    """AEM model -> derived sums form an ATC model -> derived parthood is ``s``."""
    ctx: dict = {}

    def derive():
        ctx["f"] = derive_F_from_P(s, "sum")
        return _theory_stage("derived F is ATC", ctx["f"], "ATC")

    steps = [
        ("AEM", lambda: _theory_stage("AEM", s, "AEM")),
        ("derived F is ATC", derive),
        ("parthood round trip", lambda: _diff_stage("parthood round trip", derive_P_from_F(ctx["f"]), s)),
    ]
    return _run("P", steps)


def roundtrip(s: Structure) -> RoundTripReport:
    return roundtrip_F(s) if s.signature == "F" else roundtrip_P(s)
