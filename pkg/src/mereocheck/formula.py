"""Two-sorted plural language: syntax tree, parser, printer and sort checker.

Concrete syntax (ASCII)::

    forall x. exists y. (P(y,x) & A(y))
    forall zz. forall x. (F(zz,x) <-> F(at[zz],x))
    x in at[zz]      zz among aa      xx eq yy      x = y

Plural variables are recognised lexically: one letter repeated at least
twice (``xx``, ``zz``, optionally followed by digits or primes), or any
identifier carrying the ``#`` sigil (``stuff#``).  ``aa`` is the constant
for the plurality of all atoms and ``at[t]`` the atoms of ``t``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Union


class Sort(enum.Enum):
    IND = "Individual"
    PLU = "Plural"

    def __str__(self) -> str:
        return self.value


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


class FormulaSortError(ValueError):
    def __init__(self, issues: list[SortIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class IndVar:
    name: str
    sort = Sort.IND


@dataclass(frozen=True)
class PluralVar:
    name: str
    sort = Sort.PLU


@dataclass(frozen=True)
class AtomsConst:
    sort = Sort.PLU


@dataclass(frozen=True)
class AtomsOf:
    """``at[arg]``: atoms of an individual or of a plurality."""

    arg: Term
    sort = Sort.PLU

    @property
    def of_individual(self) -> bool:
        return self.arg.sort is Sort.IND


Var = Union[IndVar, PluralVar]
Term = Union[IndVar, PluralVar, AtomsConst, AtomsOf]

AA = AtomsConst()

# ------------------------------------------------------------- formulas

# predicate -> expected argument sorts
PREDICATES: dict[str, tuple[Sort, ...]] = {
    "P": (Sort.IND, Sort.IND),
    "F": (Sort.PLU, Sort.IND),
    "Fstar": (Sort.PLU, Sort.IND),
    "O": (Sort.IND, Sort.IND),
    "PP": (Sort.IND, Sort.IND),
    "A": (Sort.IND,),
    "S": (Sort.IND,),
    "=": (Sort.IND, Sort.IND),
    "in": (Sort.IND, Sort.PLU),
    "among": (Sort.PLU, Sort.PLU),
    "eq": (Sort.PLU, Sort.PLU),
}
INFIX = ("=", "in", "among", "eq")


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForAll:
    var: Var
    body: Formula


@dataclass(frozen=True)
class Exists:
    var: Var
    body: Formula


Binary = Union[And, Or, Implies, Iff]
Quantifier = Union[ForAll, Exists]
Formula = Union[Atom, Not, And, Or, Implies, Iff, ForAll, Exists]

BINARY_SYMBOLS = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction, as the parser builds ``a & b & c``."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def forall(var: Var, *more: Var, body: Formula) -> Formula:
    for v in reversed((var,) + more):
        body = ForAll(v, body)
    return body


def is_plural_name(name: str) -> bool:
    if name.endswith("#"):
        return True
    return re.fullmatch(r"([a-z])\1+[0-9']*", name) is not None and name != "aa"


def var(name: str) -> Var:
    return PluralVar(name) if is_plural_name(name) else IndVar(name)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"\s*(?:(?P<sym><->|->|[()\[\],.~&|=])|(?P<id>[A-Za-z_][A-Za-z0-9_']*#?))"
)
KEYWORDS = {"forall", "exists", "in", "among", "eq", "aa", "at"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start("sym") if m.group("sym") else m.start("id")
        tokens.append((m.group("sym") or m.group("id"), start))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> str:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)][0]

    def advance(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def error(self, message: str) -> FormulaSyntaxError:
        return FormulaSyntaxError(message, self.text, self.tokens[self.i][1])

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise self.error(f"expected {tok!r}, found {self.peek()!r}")
        self.advance()

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek() != "<eof>":
            raise self.error(f"unexpected {self.peek()!r}")
        return f

    def formula(self) -> Formula:
        if self.peek() in ("forall", "exists"):
            return self.quant()
        return self.iff()

    def quant(self) -> Formula:
        kind = self.advance()
        name = self.advance()
        if not re.match(r"[A-Za-z_]", name) or name in KEYWORDS:
            self.i -= 1
            raise self.error(f"expected a variable, found {name!r}")
        self.expect(".")
        body = self.formula()
        return (ForAll if kind == "forall" else Exists)(var(name), body)

    def iff(self) -> Formula:
        left = self.imp()
        while self.peek() == "<->":
            self.advance()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.advance()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek() == "|":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.advance()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            return self.quant()
        if tok == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok in PREDICATES and tok not in INFIX and self.peek(1) == "(":
            self.advance()
            self.advance()
            args = [self.term()]
            while self.peek() == ",":
                self.advance()
                args.append(self.term())
            self.expect(")")
            if len(args) != len(PREDICATES[tok]):
                self.i -= 1
                raise self.error(f"{tok} takes {len(PREDICATES[tok])} argument(s), got {len(args)}")
            return Atom(tok, tuple(args))
        left = self.term()
        op = self.peek()
        if op not in INFIX:
            raise self.error(f"expected one of = in among eq, found {op!r}")
        self.advance()
        return Atom(op, (left, self.term()))

    def term(self) -> Term:
        tok = self.peek()
        if tok == "aa":
            self.advance()
            return AA
        if tok == "at":
            self.advance()
            self.expect("[")
            inner = self.term()
            self.expect("]")
            return AtomsOf(inner)
        if not re.match(r"[A-Za-z_]", tok) or tok in KEYWORDS:
            raise self.error(f"expected a term, found {tok!r}")
        self.advance()
        return var(tok)


def parse_formula(text: str, *, lenient: bool = False) -> Formula:
    """Parse ``text`` into a formula whose binders are renamed apart.

    Raises FormulaSyntaxError on malformed input and, unless ``lenient``,
    FormulaSortError when an argument has the wrong sort.
    """
    f = rename_apart(_Parser(text).parse())
    if not lenient:
        issues = check_sorts(f)
        if issues:
            raise FormulaSortError(issues)
    return f


# -------------------------------------------------------------- printer


def format_term(t: Term) -> str:
    if isinstance(t, (IndVar, PluralVar)):
        return t.name
    if isinstance(t, AtomsConst):
        return "aa"
    return f"at[{format_term(t.arg)}]"


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        if f.pred in INFIX:
            return f"{format_term(f.args[0])} {f.pred} {format_term(f.args[1])}"
        return f"{f.pred}({','.join(format_term(a) for a in f.args)})"
    if isinstance(f, Not):
        inner = format_formula(f.body)
        if isinstance(f.body, (ForAll, Exists)):
            inner = f"({inner})"
        return "~" + inner
    if isinstance(f, (ForAll, Exists)):
        kw = "forall" if isinstance(f, ForAll) else "exists"
        return f"{kw} {f.var.name}. {format_formula(f.body)}"
    left = format_formula(f.left)
    if isinstance(f.left, (ForAll, Exists)):
        left = f"({left})"
    return f"({left} {BINARY_SYMBOLS[type(f)]} {format_formula(f.right)})"


# ---------------------------------------------------------- sorts/vars


@dataclass(frozen=True)
class SortIssue:
    node: str
    position: int
    expected: Sort
    actual: Sort

    def __str__(self) -> str:
        return (
            f"{self.node} expects {self.expected} at position {self.position}, "
            f"got {self.actual}"
        )


def check_sorts(f: Formula) -> list[SortIssue]:
    """All sort errors in ``f``, in left-to-right order (empty iff well-sorted)."""
    issues: list[SortIssue] = []
    for node in subformulas(f):
        if isinstance(node, Atom):
            for pos, (arg, want) in enumerate(zip(node.args, PREDICATES[node.pred]), 1):
                if arg.sort is not want:
                    issues.append(SortIssue(node.pred, pos, want, arg.sort))
    return issues


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (ForAll, Exists)):
        yield from subformulas(f.body)
    elif not isinstance(f, Atom):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def term_vars(t: Term) -> Iterator[Var]:
    if isinstance(t, (IndVar, PluralVar)):
        yield t
    elif isinstance(t, AtomsOf):
        yield from term_vars(t.arg)


def free_vars(f: Formula) -> frozenset[Var]:
    if isinstance(f, Atom):
        return frozenset(v for a in f.args for v in term_vars(a))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (ForAll, Exists)):
        return free_vars(f.body) - {f.var}
    return free_vars(f.left) | free_vars(f.right)


def free_variables(f: Formula) -> tuple[set[str], set[str]]:
    """Names of the free variables of ``f``, split as (individual, plural)."""
    fv = free_vars(f)
    return (
        {v.name for v in fv if isinstance(v, IndVar)},
        {v.name for v in fv if isinstance(v, PluralVar)},
    )


def all_var_names(f: Formula) -> set[str]:
    names = set()
    for node in subformulas(f):
        if isinstance(node, Atom):
            names.update(v.name for a in node.args for v in term_vars(a))
        elif isinstance(node, (ForAll, Exists)):
            names.add(node.var.name)
    return names


def fresh_name(base: str, taken: set[str]) -> str:
    """Deterministic variant of ``base`` not in ``taken``, preserving its sort."""
    stem, sigil = (base[:-1], "#") if base.endswith("#") else (base, "")
    stem = stem.rstrip("0123456789")
    i = 1
    while f"{stem}{i}{sigil}" in taken:
        i += 1
    return f"{stem}{i}{sigil}"


def _same_kind(v: Var, name: str) -> Var:
    return type(v)(name)


def substitute_term(t: Term, mapping: dict[Var, Term]) -> Term:
    if isinstance(t, (IndVar, PluralVar)):
        return mapping.get(t, t)
    if isinstance(t, AtomsOf):
        return AtomsOf(substitute_term(t.arg, mapping))
    return t


def substitute(f: Formula, mapping: dict[Var, Term]) -> Formula:
    """Capture-naive substitution; callers keep bound names disjoint from the image."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(substitute_term(a, mapping) for a in f.args))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, (ForAll, Exists)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return type(f)(f.var, substitute(f.body, inner))
    return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))


def rename_apart(f: Formula) -> Formula:
    """Rename any binder that shadows an enclosing binder on the same branch."""
    taken = all_var_names(f)

    def go(g: Formula, bound: frozenset[str], ren: dict[Var, Term]) -> Formula:
        if isinstance(g, Atom):
            return substitute(g, ren) if ren else g
        if isinstance(g, Not):
            return Not(go(g.body, bound, ren))
        if isinstance(g, (ForAll, Exists)):
            v = g.var
            if v.name in bound:
                new = fresh_name(v.name, taken)
                taken.add(new)
                nv = _same_kind(v, new)
                return type(g)(nv, go(g.body, bound | {new}, {**ren, v: nv}))
            inner = {k: t for k, t in ren.items() if k != v}
            return type(g)(v, go(g.body, bound | {v.name}, inner))
        return type(g)(go(g.left, bound, ren), go(g.right, bound, ren))

    return go(f, frozenset(), {})


def alpha_equal(f: Formula, g: Formula) -> bool:
    """Structural equality up to consistent renaming of bound variables."""

    def go(a: Formula, b: Formula, ma: dict[Var, int], mb: dict[Var, int], depth: int) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Atom):
            return a.pred == b.pred and all(
                term_eq(x, y, ma, mb) for x, y in zip(a.args, b.args)
            )
        if isinstance(a, Not):
            return go(a.body, b.body, ma, mb, depth)
        if isinstance(a, (ForAll, Exists)):
            if a.var.sort is not b.var.sort:
                return False
            return go(a.body, b.body, {**ma, a.var: depth}, {**mb, b.var: depth}, depth + 1)
        return go(a.left, b.left, ma, mb, depth) and go(a.right, b.right, ma, mb, depth)

    def term_eq(x: Term, y: Term, ma: dict[Var, int], mb: dict[Var, int]) -> bool:
        if type(x) is not type(y):
            return False
        if isinstance(x, (IndVar, PluralVar)):
            if x in ma or y in mb:
                return ma.get(x) == mb.get(y)
            return x == y
        if isinstance(x, AtomsOf):
            return term_eq(x.arg, y.arg, ma, mb)
        return True

    return go(f, g, {}, {}, 0)


def close(f: Formula) -> Formula:
    """Universal closure, binding free variables in order of first occurrence."""
    order: list[Var] = []
    fv = free_vars(f)
    for node in subformulas(f):
        if isinstance(node, Atom):
            for a in node.args:
                for v in term_vars(a):
                    if v in fv and v not in order:
                        order.append(v)
    for v in reversed(order):
        f = ForAll(v, f)
    return f


def mentions(f: Formula, *, preds: set[str] = frozenset(), terms: bool = False) -> bool:
    """Does ``f`` use any predicate in ``preds`` (or, with ``terms``, at[x] of an individual)?"""
    for node in subformulas(f):
        if isinstance(node, Atom):
            if node.pred in preds:
                return True
            if terms and any(_has_ind_atoms(a) for a in node.args):
                return True
    return False


def _has_ind_atoms(t: Term) -> bool:
    if isinstance(t, AtomsOf):
        return t.of_individual or _has_ind_atoms(t.arg)
    return False
