"""Reference interpretation written directly from the definitions over Python sets.

Slow and independent of the bitmask tables used by the package; used as an
oracle in tests only.
"""

from __future__ import annotations

from itertools import chain, combinations

from mereocheck.formula import (
    And,
    Atom,
    AtomsConst,
    AtomsOf,
    Exists,
    ForAll,
    Iff,
    Implies,
    IndVar,
    Not,
    Or,
    PluralVar,
)


class Undefined(Exception):
    pass


def powerset(xs):
    xs = list(xs)
    return [frozenset(c) for c in chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))]


class Naive:
    def __init__(self, s):
        self.s = s
        self.D = list(s.domain)
        self.subsets = powerset(self.D)
        if s.signature == "P":
            self.Prel = set(s.parthood)
        else:
            self.Frel = set(s.composition)
            self.Prel = None

    # -- F-side definitions
    def atoms_F(self):
        # x is an atom iff every yy composing x has only x as members
        return frozenset(x for x in self.D if all(zz <= {x} for (y, zz) in self.Frel if y == x))

    def at_ind_F(self, x):
        aa = self.atoms_F()
        cands = [zz for zz in self.subsets if zz and zz <= aa and (x, zz) in self.Frel]
        if len(cands) != 1:
            raise Undefined(x)
        zz = cands[0]
        if any((y, zz) in self.Frel for y in self.D if y != x):
            raise Undefined(x)
        return zz

    def at_pl_F(self, zz):
        aa = self.atoms_F()
        return frozenset(
            a for a in self.D
            if any(a in yy and (y, yy) in self.Frel for y in zz for yy in self.subsets if yy and yy <= aa)
        )

    # -- parthood on either side
    def P(self, x, y):
        if self.Prel is not None:
            return (x, y) in self.Prel
        ax, ay = self.at_ind_F(x), self.at_ind_F(y)
        return bool(ax) and ax <= ay

    def O(self, x, y):
        return any(self.P(z, x) and self.P(z, y) for z in self.D)

    def A(self, x):
        if self.Prel is None:
            return x in self.atoms_F()
        return all(z == x for z in self.D if self.P(z, x))

    def atoms(self):
        return self.atoms_F() if self.Prel is None else frozenset(x for x in self.D if self.A(x))

    def at_ind(self, x):
        if self.Prel is None:
            return self.at_ind_F(x)
        return frozenset(y for y in self.D if self.P(y, x) and self.A(y))

    def at_pl(self, zz):
        if self.Prel is None:
            return self.at_pl_F(zz)
        return frozenset(y for y in self.D if self.A(y) and any(self.P(y, z) for z in zz))

    def F(self, zz, x):
        if self.Prel is None:
            return (x, zz) in self.Frel
        return all(self.P(z, x) for z in zz) and all(
            any(self.O(z, y) for z in zz) for y in self.D if self.P(y, x)
        )

    def Fstar(self, zz, x):
        return all(self.O(y, x) == any(self.O(z, y) for z in zz) for y in self.D)

    def S(self, x):
        aa = self.atoms()
        return any(yy and yy <= aa and self.Fstar(yy, x) for yy in self.subsets)

    # -- formulas
    def term(self, t, env):
        if isinstance(t, (IndVar, PluralVar)):
            return env[t]
        if isinstance(t, AtomsConst):
            return self.atoms()
        assert isinstance(t, AtomsOf)
        v = self.term(t.arg, env)
        return self.at_ind(v) if t.of_individual else self.at_pl(v)

    def holds(self, f, env=None):
        env = env or {}
        if isinstance(f, Atom):
            a = [self.term(t, env) for t in f.args]
            p = f.pred
            if p in ("=", "eq"):
                return a[0] == a[1]
            if p == "in":
                return a[0] in a[1]
            if p == "among":
                return bool(a[0]) and a[0] <= a[1]
            if p == "PP":
                return self.P(*a) and a[0] != a[1]
            return getattr(self, p)(*a)
        if isinstance(f, Not):
            return not self.holds(f.body, env)
        if isinstance(f, (ForAll, Exists)):
            dom = self.D if isinstance(f.var, IndVar) else self.subsets
            test = all if isinstance(f, ForAll) else any
            return test(self.holds(f.body, {**env, f.var: v}) for v in dom)
        l = self.holds(f.left, env)
        r = self.holds(f.right, env)
        if isinstance(f, And):
            return l and r
        if isinstance(f, Or):
            return l or r
        if isinstance(f, Implies):
            return (not l) or r
        if isinstance(f, Iff):
            return l == r
        raise TypeError(f)
