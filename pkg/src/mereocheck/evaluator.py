"""Tarskian evaluation over finite structures.

Plural quantifiers range over every subset of the domain, the empty one
included.  Defined symbols are interpreted natively per signature:

* on a P-structure, ``F``/``Fstar`` are sum and fusion defined from P,
  ``A`` is having no proper parts, ``at[x]`` the atomic parts of x;
* on an F-structure, ``aa`` holds the elements composed of nothing but
  themselves, ``at[x]`` is the unique atom plurality composing x (a
  definite description, undefined when it has no referent), and
  ``P(x,y)`` is ``at[x] among at[y]``.

``expand_definitions`` rewrites the same symbols into primitive syntax;
it exists to cross-check the native tables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Mapping

from .formula import (
    AA,
    And,
    Atom,
    AtomsConst,
    AtomsOf,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    IndVar,
    Not,
    Or,
    PluralVar,
    Term,
    Var,
    all_var_names,
    conj,
    free_vars,
    mentions,
)
from .model import Assignment, Structure, check_valid

# predicates whose F-side reading goes through at[x]
AT_DEPENDENT = {"P", "O", "PP", "Fstar", "S"}


class DefinednessError(Exception):
    """``at[x]`` has no referent because the uniqueness clause of ATC1 fails."""

    def __init__(self, element: str):
        super().__init__(f"at[{element}] is undefined: no unique atom plurality composes {element}")
        self.element = element


class SignatureError(Exception):
    pass


class DomainTooLarge(ValueError):
    pass


class UnboundVariable(ValueError):
    pass


def max_domain() -> int:
    return int(os.environ.get("MEREOCHECK_MAX_DOMAIN", "8"))


def submasks(mask: int) -> Iterator[int]:
    """Nonempty submasks of ``mask`` in decreasing order."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class Semantics:
    """Memoized interpretation tables for one structure (bit-level)."""

    def __init__(self, s: Structure):
        self.s = s
        self.n = s.size
        self.full = (1 << self.n) - 1
        self.signature = s.signature
        if s.signature == "P":
            self.parts_of = list(s.parts_of)
        elif s.signature == "F":
            self.comps = s.compositions
            self._init_f()
        else:
            raise SignatureError(f"unknown signature {s.signature!r}")
        self._overlaps: list[int] | None = None

    # ---- F-side primitives
    def _init_f(self) -> None:
        n = self.n
        aa = 0
        for x in range(n):
            if all(zz & ~(1 << x) == 0 for zz in self.comps[x]):
                aa |= 1 << x
        self.aa = aa
        referent: list[int | None] = []
        for x in range(n):
            atomic = [zz for zz in self.comps[x] if zz and zz & ~aa == 0]
            ok = None
            if len(atomic) == 1:
                zz = atomic[0]
                if all(zz not in self.comps[y] for y in range(n) if y != x):
                    ok = zz
            referent.append(ok)
        self.referent = referent
        atom_pl = [0] * n
        for y in range(n):
            for zz in self.comps[y]:
                if zz and zz & ~aa == 0:
                    atom_pl[y] |= zz
        self._atom_pl = atom_pl
        self.parts_of = None

    def _f_parts(self) -> list[int]:
        rows = [0] * self.n
        ats = [self.at_ind(i) for i in range(self.n)]
        for x in range(self.n):
            for y in range(self.n):
                if ats[x] and ats[x] & ~ats[y] == 0:
                    rows[y] |= 1 << x
        return rows

    # ---- shared derived relations
    def parts(self, y: int) -> int:
        if self.parts_of is None:
            self.parts_of = self._f_parts()
        return self.parts_of[y]

    def overlaps(self, y: int) -> int:
        if self._overlaps is None:
            rows = [self.parts(i) for i in range(self.n)]
            self._overlaps = [
                sum(1 << z for z in range(self.n) if rows[z] & rows[x]) for x in range(self.n)
            ]
        return self._overlaps[y]

    def P(self, x: int, y: int) -> bool:
        if self.parts_of is None:
            # only the two referents involved are needed
            ax = self.at_ind(x)
            return bool(ax) and ax & ~self.at_ind(y) == 0
        return bool(self.parts_of[y] >> x & 1)

    def O(self, x: int, y: int) -> bool:
        return bool(self.overlaps(y) >> x & 1)

    def PP(self, x: int, y: int) -> bool:
        return x != y and self.P(x, y)

    def A(self, x: int) -> bool:
        if self.signature == "F":
            return bool(self.aa >> x & 1)
        return self.parts_of[x] & ~(1 << x) == 0

    def F(self, zz: int, x: int) -> bool:
        if self.signature == "F":
            return zz in self.comps[x]
        parts = self.parts_of[x]
        if zz & ~parts:
            return False
        for y in _bits(parts):
            if not self.overlaps(y) & zz:
                return False
        return True

    def Fstar(self, zz: int, x: int) -> bool:
        ox = self.overlaps(x)
        for y in range(self.n):
            if bool(ox >> y & 1) != bool(self.overlaps(y) & zz):
                return False
        return True

    def S(self, x: int) -> bool:
        return any(self.Fstar(yy, x) for yy in submasks(self.atoms))

    # ---- plural terms
    @property
    def atoms(self) -> int:
        if self.signature == "F":
            return self.aa
        if not hasattr(self, "_aa"):
            self._aa = sum(1 << x for x in range(self.n) if self.A(x))
        return self._aa

    def at_ind(self, x: int) -> int:
        if self.signature == "F":
            r = self.referent[x]
            if r is None:
                raise DefinednessError(self.s.domain[x])
            return r
        return self.parts_of[x] & self.atoms

    def at_ind_defined(self, x: int) -> bool:
        return self.signature == "P" or self.referent[x] is not None

    def at_pl(self, zz: int) -> int:
        out = 0
        if self.signature == "F":
            for y in _bits(zz):
                out |= self._atom_pl[y]
        else:
            for y in _bits(zz):
                out |= self.parts_of[y] & self.atoms
        return out

    def all_defined(self) -> bool:
        return all(self.at_ind_defined(x) for x in range(self.n))


@lru_cache(maxsize=8192)
def semantics(s: Structure) -> Semantics:
    return Semantics(s)


# ------------------------------------------------------------ compilation

Env = dict
Check = Callable[[Semantics, Env], bool]


def _term(t: Term) -> Callable[[Semantics, Env], int]:
    if isinstance(t, (IndVar, PluralVar)):
        def get(sem, env, v=t):
            try:
                return env[v]
            except KeyError:
                raise UnboundVariable(f"free variable {v.name} is not bound") from None
        return get
    if isinstance(t, AtomsConst):
        return lambda sem, env: sem.atoms
    inner = _term(t.arg)
    if t.of_individual:
        return lambda sem, env: sem.at_ind(inner(sem, env))
    return lambda sem, env: sem.at_pl(inner(sem, env))


def _atom(f: Atom) -> Check:
    a = [_term(t) for t in f.args]
    p = f.pred
    if p == "=":
        return lambda sem, env: a[0](sem, env) == a[1](sem, env)
    if p == "in":
        return lambda sem, env: bool(a[1](sem, env) >> a[0](sem, env) & 1)
    if p == "among":
        def among(sem, env):
            xx = a[0](sem, env)
            return xx != 0 and xx & ~a[1](sem, env) == 0
        return among
    if p == "eq":
        return lambda sem, env: a[0](sem, env) == a[1](sem, env)
    if len(a) == 1:
        return lambda sem, env: getattr(sem, p)(a[0](sem, env))
    return lambda sem, env: getattr(sem, p)(a[0](sem, env), a[1](sem, env))


def compile_formula(f: Formula, memo: bool = False) -> Check:
    """Compile ``f`` to a closure ``(semantics, env) -> bool``.

    With ``memo`` every compound node caches its value per binding of its
    free variables; that keeps heavily expanded formulas tractable.  A
    memoized closure must only be used with one structure.
    """

    def go(g: Formula) -> Check:
        if isinstance(g, Atom):
            return _atom(g)
        if isinstance(g, Not):
            b = go(g.body)
            fn = lambda sem, env: not b(sem, env)
        elif isinstance(g, And):
            l, r = go(g.left), go(g.right)
            fn = lambda sem, env: l(sem, env) and r(sem, env)
        elif isinstance(g, Or):
            l, r = go(g.left), go(g.right)
            fn = lambda sem, env: l(sem, env) or r(sem, env)
        elif isinstance(g, Implies):
            l, r = go(g.left), go(g.right)
            fn = lambda sem, env: (not l(sem, env)) or r(sem, env)
        elif isinstance(g, Iff):
            l, r = go(g.left), go(g.right)
            fn = lambda sem, env: l(sem, env) == r(sem, env)
        else:
            b = go(g.body)
            v = g.var
            plural = isinstance(v, PluralVar)
            universal = isinstance(g, ForAll)

            def fn(sem, env, b=b, v=v, plural=plural, universal=universal):
                saved = env.get(v, _MISSING)
                try:
                    for val in range(1 << sem.n if plural else sem.n):
                        env[v] = val
                        if b(sem, env) != universal:
                            return not universal
                    return universal
                finally:
                    if saved is _MISSING:
                        del env[v]
                    else:
                        env[v] = saved

        if memo:
            keys = tuple(sorted(free_vars(g), key=lambda v: v.name))
            cache: dict = {}
            inner = fn

            def fn(sem, env, inner=inner, keys=keys, cache=cache):
                k = tuple(env[v] for v in keys)
                hit = cache.get(k)
                if hit is None:
                    hit = cache[k] = inner(sem, env)
                return hit
        return fn

    return go(f)


_MISSING = object()


def _env(s: Structure, a: Assignment | None) -> Env:
    env: Env = {}
    if a is None:
        return env
    bad = a.validate(s)
    if bad:
        raise ValueError("; ".join(bad))
    for name, e in a.individuals.items():
        env[IndVar(name)] = s.index[e]
    for name, zz in a.plurals.items():
        env[PluralVar(name)] = s.mask(zz)
    return env


def _prepare(s: Structure, f: Formula, a: Assignment | None) -> tuple[Semantics, Env]:
    if s.size > max_domain():
        raise DomainTooLarge(
            f"domain size {s.size} exceeds MEREOCHECK_MAX_DOMAIN={max_domain()}"
        )
    env = _env(s, a)
    missing = sorted(v.name for v in free_vars(f) if v not in env)
    if missing:
        raise UnboundVariable("unbound free variable(s): " + ", ".join(missing))
    return semantics(s), env


def evaluate(s: Structure, f: Formula, a: Assignment | None = None, *, memo: bool = False) -> bool:
    """Truth value of ``f`` in ``s`` under ``a``.

    Raises DefinednessError when an F-side at[x] without a referent is
    reached during evaluation.
    """
    sem, env = _prepare(s, f, a)
    return compile_formula(f, memo=memo)(sem, env)


def display(s: Structure, v: Var, value: int) -> str:
    if isinstance(v, PluralVar):
        return "{" + ",".join(s.domain[i] for i in _bits(value)) + "}"
    return s.domain[value]


def explain(s: Structure, f: Formula, a: Assignment | None = None) -> tuple[bool, list[tuple[str, str]]]:
    """Truth value plus the outermost witness chain.

    For a false formula the chain lists falsifying instances of leading
    universal quantifiers; for a true one, satisfying instances of
    leading existentials.  The chain stops at the first alternation.
    """
    sem, env = _prepare(s, f, a)
    value = compile_formula(f)(sem, env)
    chain: list[tuple[str, str]] = []
    want = ForAll if not value else Exists
    g = f
    while isinstance(g, want):
        body = compile_formula(g.body)
        size = 1 << sem.n if isinstance(g.var, PluralVar) else sem.n
        for val in range(size):
            env[g.var] = val
            if body(sem, env) == value:
                break
        chain.append((g.var.name, display(s, g.var, val)))
        g = g.body
    return value, chain


@dataclass(frozen=True)
class DerivedSets:
    atoms: frozenset[str]
    atoms_of_ind: Mapping[str, frozenset[str] | None]

    @property
    def defined(self) -> dict[str, bool]:
        return {x: v is not None for x, v in self.atoms_of_ind.items()}


def derived_sets(s: Structure) -> DerivedSets:
    sem = semantics(check_valid(s))
    at = {}
    for i, x in enumerate(s.domain):
        at[x] = s.names(sem.at_ind(i)) if sem.at_ind_defined(i) else None
    return DerivedSets(s.names(sem.atoms), at)


def atoms_of_plural(s: Structure, zz) -> frozenset[str]:
    """Atoms of a plurality (by comprehension on the F-side, union of atomic parts on the P-side)."""
    sem = semantics(check_valid(s))
    return s.names(sem.at_pl(s.mask(zz)))


def needs_referents(f: Formula, signature: str) -> bool:
    return signature == "F" and mentions(f, preds=AT_DEPENDENT, terms=True)


# -------------------------------------------------------------- expansion

_IND_STEMS = ["z", "w", "v", "u", "t", "s", "r", "q"]
_PLU_STEMS = ["zz", "ww", "vv", "uu", "tt", "ss", "rr", "qq"]


class _Expander:
    def __init__(self, signature: str, strict: bool, taken: set[str]):
        self.sig = signature
        self.strict = strict
        self.taken = set(taken)

    def _fresh(self, stems: list[str]) -> str:
        for i in range(10_000):
            for stem in stems:
                name = stem if i == 0 else f"{stem}{i}"
                if name not in self.taken:
                    self.taken.add(name)
                    return name
        raise RuntimeError("ran out of fresh names")

    def ind(self) -> IndVar:
        return IndVar(self._fresh(_IND_STEMS))

    def plu(self) -> PluralVar:
        return PluralVar(self._fresh(_PLU_STEMS))

    # membership in a (possibly defined) plural term
    def mem(self, u: IndVar, t: Term) -> Formula:
        if isinstance(t, PluralVar):
            return Atom("in", (u, t))
        if isinstance(t, AtomsConst):
            if self.sig == "P":
                return self.atom(Atom("A", (u,)))
            yy, z = self.plu(), self.ind()
            return ForAll(yy, ForAll(z, Implies(
                Atom("in", (z, yy)),
                Implies(Atom("F", (yy, u)), Atom("=", (z, u))),
            )))
        if t.of_individual:
            x = t.arg
            if self.sig == "P":
                return And(self.atom(Atom("P", (u, x))), self.mem(u, AA))
            xx = self.plu()
            return Exists(xx, And(self.describes(x, xx), Atom("in", (u, xx))))
        inner = t.arg
        if self.sig == "P":
            z = self.ind()
            guard = self.mem(z, inner)
            if self.strict:
                w = self.ind()
                guard = And(guard, Exists(w, self.mem(w, inner)))
            return Exists(z, conj(guard, self.atom(Atom("P", (u, z))), self.mem(u, AA)))
        y, yy = self.ind(), self.plu()
        return Exists(y, And(self.mem(y, inner), Exists(yy, conj(
            self.among(yy, AA), Atom("F", (yy, y)), Atom("in", (u, yy)),
        ))))

    def describes(self, x: IndVar, xx: PluralVar) -> Formula:
        """``xx`` is the atom plurality that at[x] denotes on the F-side."""
        yy, y = self.plu(), self.ind()
        return conj(
            self.among(xx, AA),
            Atom("F", (xx, x)),
            ForAll(yy, Implies(self.among(yy, AA), Iff(Atom("F", (yy, x)), Atom("eq", (yy, xx))))),
            ForAll(y, Implies(Atom("F", (xx, y)), Atom("=", (x, y)))),
        )

    def among(self, t1: Term, t2: Term) -> Formula:
        if isinstance(t1, PluralVar) and isinstance(t2, PluralVar):
            return Atom("among", (t1, t2))
        u, w = self.ind(), self.ind()
        return And(
            ForAll(u, Implies(self.mem(u, t1), self.mem(u, t2))),
            Exists(w, self.mem(w, t1)),
        )

    def with_plural(self, t: Term, build: Callable[[PluralVar], Formula]) -> Formula:
        if isinstance(t, PluralVar):
            return build(t)
        ww, u = self.plu(), self.ind()
        return Exists(ww, And(
            ForAll(u, Iff(Atom("in", (u, ww)), self.mem(u, t))),
            build(ww),
        ))

    def atom(self, f: Atom) -> Formula:
        p, args = f.pred, f.args
        if p == "=":
            return f
        if p == "in":
            return self.mem(args[0], args[1])
        if p == "among":
            return self.among(args[0], args[1])
        if p == "eq":
            t1, t2 = args
            if isinstance(t1, PluralVar) and isinstance(t2, PluralVar):
                return f
            u = self.ind()
            return ForAll(u, Iff(self.mem(u, t1), self.mem(u, t2)))
        if p == "P":
            if self.sig == "P":
                return f
            return self.among(AtomsOf(args[0]), AtomsOf(args[1]))
        if p == "O":
            z = self.ind()
            return Exists(z, And(self.atom(Atom("P", (z, args[0]))), self.atom(Atom("P", (z, args[1])))))
        if p == "PP":
            return And(self.atom(Atom("P", args)), Not(Atom("=", args)))
        if p == "A":
            if self.sig == "F":
                return self.mem(args[0], AA)
            z = self.ind()
            return ForAll(z, Implies(Atom("P", (z, args[0])), Atom("=", (z, args[0]))))
        if p == "S":
            yy = self.plu()
            return Exists(yy, And(self.among(yy, AA), self.atom(Atom("Fstar", (yy, args[0])))))
        if p == "F":
            t, x = args
            if self.sig == "F":
                return self.with_plural(t, lambda ww: Atom("F", (ww, x)))
            z, y, z2 = self.ind(), self.ind(), self.ind()
            return And(
                ForAll(z, Implies(self.mem(z, t), Atom("P", (z, x)))),
                ForAll(y, Implies(Atom("P", (y, x)), Exists(z2, And(
                    self.mem(z2, t), self.atom(Atom("O", (z2, y))),
                )))),
            )
        if p == "Fstar":
            t, x = args
            y, z = self.ind(), self.ind()
            return ForAll(y, Iff(
                self.atom(Atom("O", (y, x))),
                Exists(z, And(self.mem(z, t), self.atom(Atom("O", (z, y))))),
            ))
        raise SignatureError(f"cannot resolve predicate {p}")

    def formula(self, f: Formula) -> Formula:
        if isinstance(f, Atom):
            return self.atom(f)
        if isinstance(f, Not):
            return Not(self.formula(f.body))
        if isinstance(f, (ForAll, Exists)):
            return type(f)(f.var, self.formula(f.body))
        return type(f)(self.formula(f.left), self.formula(f.right))


def expand_definitions(f: Formula, signature: str = "P", *, among_strict: bool = False) -> Formula:
    """Replace aa, at[.], O, PP, A, Fstar, S (and P or F, whichever is
    defined on ``signature``) by their defining conditions."""
    if signature not in ("P", "F"):
        raise SignatureError(f"unknown signature {signature!r}")
    return _Expander(signature, among_strict, all_var_names(f)).formula(f)
