"""Command-line entry point.

Exit codes: 0 pass / true / found, 1 fail / false / none, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .batch import BoundError
from .bridge import derive_F_from_P, derive_P_from_F, roundtrip
from .enumerator import (
    TheoryViolation,
    count_models,
    enumerate_aem_canonical,
    enumerate_brute,
    induce_atc,
)
from .evaluator import DefinednessError, DomainTooLarge, UnboundVariable, expand_definitions, explain, semantics
from .formula import FormulaSortError, FormulaSyntaxError, format_formula
from .model import InvalidStructure, ModelFormatError, Structure, dump_structure, load_structure, parse_assignment, save_structure
from .search import EXPERIMENTS, SearchError, find_countermodel, run_experiment
from .theories import FORMULA_TEXT, SignatureMismatch, check_theory, lemma_suite, resolve_formula, theories

OK, FAIL, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _warn(messages: list[str]) -> None:
    for m in messages:
        print(f"warning: {m}", file=sys.stderr)


def _report_text(rep) -> str:
    if not rep.applicable:
        return f"{rep.theory}: not applicable ({rep.reason})"
    lines = [f"{rep.theory}: {'pass' if rep.passed else 'fail'}"]
    for v in rep.verdicts:
        line = f"  {v.axiom}: {v.status}"
        if v.witness:
            line += "  [" + ", ".join(f"{n}={d}" for n, d in v.witness) + "]"
        if v.reason:
            line += f"  ({v.reason})"
        lines.append(line)
    return "\n".join(lines)


# ------------------------------------------------------------ subcommands


def cmd_check(args) -> int:
    s = load_structure(args.model)
    rep = lemma_suite(s) if args.lemmas else check_theory(s, args.theory, bridge=args.bridge)
    _emit(args, rep.to_json(), _report_text(rep))
    return OK if rep.passed else FAIL


def cmd_eval(args) -> int:
    s = load_structure(args.model)
    goal = resolve_formula(args.formula)
    _warn(goal.warnings)
    f = goal.formula
    if args.expand:
        f = expand_definitions(f, s.signature, among_strict=args.among_strict)
    a = parse_assignment(args.assign or [])
    try:
        value, chain = explain(s, f, a)
    except DefinednessError as e:
        _emit(args, {"formula": goal.name, "value": None, "undefined": str(e)}, f"undefined: {e}")
        return ERROR
    payload = {"formula": goal.name, "value": value, "witness": [list(w) for w in chain]}
    text = "true" if value else "false"
    if chain:
        text += "  [" + ", ".join(f"{n}={d}" for n, d in chain) + "]"
    _emit(args, payload, text)
    return OK if value else FAIL


def cmd_derive(args) -> int:
    s = load_structure(args.model)
    if args.to == "P":
        if s.signature != "F":
            raise UsageError("--to P needs an F-structure")
        out = derive_P_from_F(s)
    else:
        if s.signature != "P":
            raise UsageError(f"--to {args.to} needs a P-structure")
        out = derive_F_from_P(s, "sum" if args.to == "F-sum" else "fusion")
    if args.out:
        save_structure(out, args.out)
    else:
        sys.stdout.write(dump_structure(out))
    return OK


def cmd_roundtrip(args) -> int:
    rep = roundtrip(load_structure(args.model))
    lines = [f"roundtrip {rep.kind}: {'pass' if rep.passed else 'fail'}"]
    for st in rep.stages:
        lines.append(f"  {st.name}: {st.status}" + (f"  ({st.detail})" if st.detail else ""))
    _emit(args, rep.to_json(), "\n".join(lines))
    return OK if rep.passed else FAIL


def _enumerated(args) -> list[Structure]:
    if args.brute:
        n = args.size if args.size is not None else None
        if n is None:
            if args.atoms is None or args.composites is None:
                raise UsageError("--brute needs --size or both --atoms and --composites")
            n = args.atoms + args.composites
        theory = theories()[args.theory or ("ATC" if args.signature == "F" else "AEM")]
        models = list(enumerate_brute(n, theory.signature, theory, jobs=args.jobs))
        if args.atoms is not None:
            models = [m for m in models if semantics(m).atoms.bit_count() == args.atoms]
        return models
    if args.atoms is None or args.composites is None:
        raise UsageError("--canonical needs --atoms and --composites")
    theory = args.theory or "AEM"
    if theory not in ("AEM", "ATC"):
        raise UsageError("canonical enumeration builds AEM models or their induced ATC models")
    models = list(enumerate_aem_canonical(args.atoms, args.composites, up_to_iso=args.iso,
                                          atom_symmetry=args.atom_symmetry))
    if theory == "ATC":
        models = [induce_atc(m) for m in models]
    return models


def cmd_enumerate(args) -> int:
    if args.count_only and not args.brute and args.iso:
        n = count_models(args.atoms, args.composites, atom_symmetry=args.atom_symmetry)
        print(json.dumps({"count": n}) if args.json else n)
        return OK
    models = _enumerated(args)
    if args.count_only:
        print(json.dumps({"count": len(models)}) if args.json else len(models))
        return OK
    width = max(4, len(str(len(models))))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, m in enumerate(models):
            save_structure(m, out / f"model_{i:0{width}d}.json")
        _emit(args, {"count": len(models), "out": str(out)}, f"{len(models)} models written to {out}")
    else:
        for m in models:
            sys.stdout.write(dump_structure(m))
    return OK


def cmd_search(args) -> int:
    axioms = [a.strip() for a in args.axioms.split(",") if a.strip()]
    res = find_countermodel(axioms, args.goal, args.max_size, args.signature, jobs=args.jobs)
    _warn(res.warnings)
    if res.found and args.out:
        save_structure(res.model, args.out)
    if res.found:
        text = f"countermodel of size {res.model.size}:\n{dump_structure(res.model).rstrip()}"
    else:
        text = f"none up to size {res.max_size}"
    _emit(args, res.to_json(), text)
    return OK if res.found else FAIL


def cmd_experiment(args) -> int:
    if args.list:
        for name, e in EXPERIMENTS.items():
            print(f"{name}: {e.description}")
        return OK
    if not args.name:
        raise UsageError("experiment needs --name or --list")
    rep = run_experiment(args.name, args.out_dir, jobs=args.jobs)
    _emit(args, rep.to_json(), rep.verdict)
    return OK


def cmd_fmt(args) -> int:
    goal = resolve_formula(args.formula)
    _warn(goal.warnings)
    f = goal.formula
    if args.expand:
        f = expand_definitions(f, args.signature, among_strict=args.among_strict)
    print(format_formula(f))
    return OK


def cmd_registry(args) -> int:
    if args.json:
        payload = {
            "formulas": {n: format_formula(resolve_formula(n).formula) for n in FORMULA_TEXT},
            "theories": {n: {"signature": t.signature, "axioms": t.axiom_names, "premise": t.premise}
                         for n, t in theories().items()},
        }
        print(json.dumps(payload, sort_keys=True))
        return OK
    for n in FORMULA_TEXT:
        print(f"{n}: {format_formula(resolve_formula(n).formula)}")
    for n, t in theories().items():
        print(f"{n} [{t.signature}]: {', '.join(t.axiom_names)}")
    return OK


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mereocheck", description="Finite model checking for plural mereology.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for enumerate/search")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check a model against a theory")
    c.add_argument("--model", required=True)
    c.add_argument("--theory", default="AEM", choices=list(theories()))
    c.add_argument("--lemmas", action="store_true", help="run the lemma suite for the model's signature")
    c.add_argument("--bridge", action="store_true", help="allow a theory stated for the other signature")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("eval", parents=[common], help="evaluate a formula on a model")
    e.add_argument("--model", required=True)
    e.add_argument("--formula", required=True, help="registry name or formula text")
    e.add_argument("--assign", action="append", metavar="BINDING", help="x=a, zz={a,b} or yy={}")
    e.add_argument("--expand", action="store_true", help="evaluate the primitive-only expansion")
    e.add_argument("--among-strict", action="store_true")
    e.set_defaults(func=cmd_eval)

    d = sub.add_parser("derive", parents=[common], help="translate between signatures")
    d.add_argument("--model", required=True)
    d.add_argument("--to", required=True, choices=["P", "F-sum", "F-fusion"])
    d.add_argument("--out")
    d.set_defaults(func=cmd_derive)

    r = sub.add_parser("roundtrip", parents=[common], help="definitional round trip of a model")
    r.add_argument("--model", required=True)
    r.set_defaults(func=cmd_roundtrip)

    n = sub.add_parser("enumerate", parents=[common], help="enumerate finite models")
    n.add_argument("--atoms", type=int)
    n.add_argument("--composites", type=int)
    n.add_argument("--size", type=int, help="domain size for --brute")
    mode = n.add_mutually_exclusive_group()
    mode.add_argument("--canonical", action="store_true", default=True)
    mode.add_argument("--brute", action="store_true")
    n.add_argument("--iso", action="store_true", help="one model per composite family")
    n.add_argument("--atom-symmetry", action="store_true", help="also identify atom permutations")
    n.add_argument("--count-only", action="store_true")
    n.add_argument("--theory", choices=list(theories()))
    n.add_argument("--signature", default="P", choices=["P", "F"])
    n.add_argument("--out", help="directory for one model file per result")
    n.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("search", parents=[common], help="bounded countermodel search")
    s.add_argument("--axioms", required=True, help="comma-separated registry names")
    s.add_argument("--goal", required=True)
    s.add_argument("--max-size", type=int, required=True)
    s.add_argument("--signature", default="P", choices=["P", "F"])
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    x = sub.add_parser("experiment", parents=[common], help="run a catalogued search")
    x.add_argument("--name", choices=list(EXPERIMENTS))
    x.add_argument("--list", action="store_true")
    x.add_argument("--out-dir")
    x.set_defaults(func=cmd_experiment)

    f = sub.add_parser("fmt", parents=[common], help="parse and print a formula")
    f.add_argument("--formula", required=True)
    f.add_argument("--expand", action="store_true")
    f.add_argument("--signature", default="P", choices=["P", "F"])
    f.add_argument("--among-strict", action="store_true")
    f.set_defaults(func=cmd_fmt)

    g = sub.add_parser("registry", parents=[common], help="list named formulas and theories")
    g.set_defaults(func=cmd_registry)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError, ModelFormatError, InvalidStructure, FormulaSyntaxError, FormulaSortError,
            SignatureMismatch, BoundError, SearchError, TheoryViolation, DomainTooLarge, UnboundVariable,
            DefinednessError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
