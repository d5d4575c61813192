"""Bounded countermodel search over labelled structures.

Sizes are tried in ascending order; within a size the candidate with the
lowest relation code wins, so results are reproducible across worker
counts.  "None" only means the bound was exhausted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .batch import BRUTE_MAX, BoundError, decode
from .enumerator import filter_codes
from .evaluator import DefinednessError, evaluate
from .formula import Formula, FormulaSortError, Not, conj, format_formula, free_vars
from .model import Structure, check_valid, dump_structure, save_structure
from .theories import formula, resolve_formula


class SearchError(ValueError):
    pass


@dataclass
class SearchResult:
    axioms: list[str]
    goal: str
    signature: str
    max_size: int
    sizes_searched: list[int] = field(default_factory=list)
    model: Structure | None = None
    code: int | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.model is not None

    def to_json(self) -> dict:
        out = {
            "axioms": self.axioms,
            "goal": self.goal,
            "signature": self.signature,
            "max_size": self.max_size,
            "sizes_searched": self.sizes_searched,
            "found": self.found,
        }
        if self.model is not None:
            out["size"] = self.model.size
            out["model"] = json.loads(dump_structure(self.model))
        return out


def _resolve(item: str | Formula, warnings: list[str]) -> tuple[str, Formula]:
    if not isinstance(item, str):
        return format_formula(item), item
    try:
        goal = resolve_formula(item)
    except FormulaSortError as e:
        raise SearchError(f"ill-sorted formula {item!r}: {e}") from e
    warnings.extend(goal.warnings)
    return goal.name, goal.formula


def _verify(s: Structure, axioms: Sequence[Formula], goal: Formula) -> bool:
    check_valid(s)
    try:
        return all(evaluate(s, a) for a in axioms) and not evaluate(s, goal)
    except DefinednessError:
        return False


def find_countermodel(axioms: Sequence[str | Formula], goal: str | Formula, max_size: int,
                      signature: str = "P", *, jobs: int = 1, min_size: int = 1) -> SearchResult:
    """Smallest structure satisfying ``axioms`` on which ``goal`` is false."""
    if signature not in BRUTE_MAX:
        raise SearchError(f"unknown signature {signature!r}")
    if max_size > BRUTE_MAX[signature]:
        raise BoundError(
            f"search over {signature}-structures supports sizes up to {BRUTE_MAX[signature]}, got {max_size}"
        )
    warnings: list[str] = []
    named = [_resolve(a, warnings) for a in axioms]
    goal_name, goal_f = _resolve(goal, warnings)
    for name, f in named + [(goal_name, goal_f)]:
        if free_vars(f):
            raise SearchError(f"formula {name!r} is not closed")
    forms = [f for _, f in named]
    result = SearchResult([n for n, _ in named], goal_name, signature, max_size, warnings=warnings)
    for n in range(min_size, max_size + 1):
        result.sizes_searched.append(n)
        hits = filter_codes(signature, n, forms + [Not(goal_f)], jobs=jobs, first_only=True)
        if hits:
            s = decode(signature, n, hits[0])
            if not _verify(s, forms, goal_f):
                raise AssertionError(f"countermodel candidate {hits[0]} failed re-verification")
            result.model, result.code = s, hits[0]
            break
    return result


# ------------------------------------------------------------ experiments


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    axioms: tuple[str, ...]
    goal: str
    signature: str
    max_size: int


_PO_WSP = ("ref", "trans", "ants", "wsp")
_EM = ("ref", "trans", "ants", "ssp")
_AT_EQUIV_GOAL = (
    "at2_implies_at1_sum",
    "at2_implies_at1_fusion",
    "at1_sum_implies_at2",
    "at1_fusion_implies_at2",
)

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment("wsp-vs-ssp", "weak supplementation does not yield strong supplementation",
                   _PO_WSP, "ssp", "P", 4),
        Experiment("wsp-uniqueness", "does weak supplementation make sums unique?",
                   _PO_WSP, "sum_unique", "P", 4),
        Experiment("varzi-at2-implies-at1", "over reflexive transitive parthood, AT2 holds iff every x "
                   "is the sum (and the fusion) of its atoms", ("ref", "trans"), "&".join(_AT_EQUIV_GOAL), "P", 3),
        Experiment("sum-fusion-under-ssp", "under strong supplementation sums and fusions coincide",
                   _EM, "sum_fusion_equiv", "P", 4),
        Experiment("sum-uniqueness-under-ssp", "under strong supplementation sums are unique",
                   _EM, "sum_unique", "P", 4),
        Experiment("atc-empty-composition", "do the composition axioms forbid the empty plurality "
                   "from composing something?", ("ATC1", "ATC2"), "F_nonempty", "F", 3),
        Experiment("atc-atoms-nonempty", "the composition axioms force at least one atom",
                   ("ATC1", "ATC2"), "aa_nonempty", "F", 3),
    ]
}


def experiment_goal(e: Experiment) -> str | Formula:
    parts = e.goal.split("&")
    if len(parts) == 1:
        return parts[0]
    return conj(*(formula(p) for p in parts))


@dataclass
class ExperimentReport:
    experiment: Experiment
    result: SearchResult
    model_path: str | None = None

    @property
    def verdict(self) -> str:
        e, r = self.experiment, self.result
        if r.found:
            where = f" (written to {self.model_path})" if self.model_path else ""
            return f"{e.name}: countermodel of size {r.model.size} found{where}"
        return f"{e.name}: none up to size {e.max_size}"

    def to_json(self) -> dict:
        out = {"experiment": self.experiment.name, "description": self.experiment.description,
               "verdict": self.verdict, **self.result.to_json()}
        out["goal"] = self.experiment.goal
        if self.model_path:
            out["model_path"] = self.model_path
        return out


def run_experiment(name: str, out_dir: str | Path | None = None, *, jobs: int = 1) -> ExperimentReport:
    try:
        e = EXPERIMENTS[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}; known: {', '.join(EXPERIMENTS)}") from None
    result = find_countermodel(list(e.axioms), experiment_goal(e), e.max_size, e.signature, jobs=jobs)
    report = ExperimentReport(e, result)
    if result.found and out_dir is not None:
        path = Path(out_dir) / f"{e.name}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        save_structure(result.model, path)
        report.model_path = str(path)
    return report
