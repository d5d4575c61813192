"""Vectorized evaluation of closed formulas over batches of structures.

One batch holds ``B`` structures of the same signature and domain size as
a boolean array: ``rel[b, x, y] = P(x,y)`` for P-structures and
``rel[b, zz, x] = F(zz,x)`` for F-structures (``zz`` a subset bitmask).
Every bound variable becomes one array axis, so a formula with ``k``
nested binders evaluates to shape ``(B, d1, ..., dk)`` before reduction.

Candidate relations are numbered by integer codes: bit ``x*n + y`` is
P(x,y) and bit ``zz*n + x`` is F(zz,x).  Code order is the canonical
output order of the brute-force generators.
"""

from __future__ import annotations

from functools import cached_property
from string import ascii_lowercase

import numpy as np

from .evaluator import needs_referents
from .formula import (
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
)
from .model import Structure

BRUTE_MAX = {"P": 4, "F": 3}


class BoundError(ValueError):
    pass


def element_names(n: int) -> list[str]:
    return list(ascii_lowercase[:n])


def relation_bits(signature: str, n: int) -> int:
    return n * n if signature == "P" else n << n


def check_brute_bound(signature: str, n: int) -> None:
    if signature not in BRUTE_MAX:
        raise BoundError(f"unknown signature {signature!r}")
    if not 1 <= n <= BRUTE_MAX[signature]:
        raise BoundError(
            f"brute force over {signature}-structures supports 1 <= n <= {BRUTE_MAX[signature]}, got {n}"
        )


def candidates(signature: str, n: int, lo: int, hi: int) -> np.ndarray:
    codes = np.arange(lo, hi, dtype=np.int64)
    bits = relation_bits(signature, n)
    shifts = np.arange(bits, dtype=np.int64)
    flat = ((codes[:, None] >> shifts[None, :]) & 1).astype(bool)
    if signature == "P":
        return flat.reshape(len(codes), n, n)
    return flat.reshape(len(codes), 1 << n, n)


def decode(signature: str, n: int, code: int, names: list[str] | None = None) -> Structure:
    names = names or element_names(n)
    if signature == "P":
        pairs = [(names[x], names[y]) for x in range(n) for y in range(n) if code >> (x * n + y) & 1]
        return Structure.p(names, pairs)
    pairs = []
    for zz in range(1 << n):
        for x in range(n):
            if code >> (zz * n + x) & 1:
                pairs.append((names[x], [names[i] for i in range(n) if zz >> i & 1]))
    return Structure.f(names, pairs)


def encode(s: Structure) -> int:
    n = s.size
    code = 0
    if s.signature == "P":
        for y, row in enumerate(s.parts_of):
            for x in range(n):
                if row >> x & 1:
                    code |= 1 << (x * n + y)
    else:
        for x, comps in enumerate(s.compositions):
            for zz in comps:
                code |= 1 << (zz * n + x)
    return code


def _subset_union(per_elem: np.ndarray, n: int) -> np.ndarray:
    """out[b, zz] = OR of per_elem[b, z] over members z of zz."""
    out = np.zeros((per_elem.shape[0], 1 << n), dtype=np.int64)
    for zz in range(1, 1 << n):
        low = zz & -zz
        out[:, zz] = out[:, zz ^ low] | per_elem[:, low.bit_length() - 1]
    return out


class Batch:
    def __init__(self, signature: str, n: int, rel: np.ndarray):
        self.signature = signature
        self.n = n
        self.rel = rel
        self.B = rel.shape[0]
        idx = np.arange(1 << n)
        self.mem = ((idx[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
        self.weights = (1 << np.arange(n)).astype(np.int64)

    # ---- parthood-based tables
    @cached_property
    def P(self) -> np.ndarray:
        if self.signature == "P":
            return self.rel
        at = self.at_ind
        nonempty = at != 0
        return nonempty[:, :, None] & ((at[:, :, None] & ~at[:, None, :]) == 0)

    @cached_property
    def O(self) -> np.ndarray:
        P = self.P
        return (P[:, :, :, None] & P[:, :, None, :]).any(axis=1)

    @cached_property
    def PP(self) -> np.ndarray:
        return self.P & ~np.eye(self.n, dtype=bool)[None]

    @cached_property
    def A(self) -> np.ndarray:
        if self.signature == "F":
            return ((self.aa[:, None] >> np.arange(self.n)) & 1).astype(bool)
        eye = np.eye(self.n, dtype=bool)
        return (~self.P | eye[None]).all(axis=1)

    @cached_property
    def aa(self) -> np.ndarray:
        if self.signature == "P":
            return (self.A * self.weights).sum(axis=1)
        idx = np.arange(1 << self.n)
        notsub = (idx[:, None] & ~(1 << np.arange(self.n))[None, :]) != 0
        atom = ~(self.rel & notsub[None]).any(axis=1)
        return (atom * self.weights).sum(axis=1)

    @cached_property
    def among_aa(self) -> np.ndarray:
        idx = np.arange(1 << self.n)[None, :]
        return (idx != 0) & ((idx & ~self.aa[:, None]) == 0)

    @cached_property
    def _atomic(self) -> np.ndarray:
        return self.rel & self.among_aa[:, :, None]

    @cached_property
    def defined(self) -> np.ndarray:
        if self.signature == "P":
            return np.ones((self.B, self.n), dtype=bool)
        atomic = self._atomic
        count = atomic.sum(axis=1)
        lonely = self.rel.sum(axis=2) == 1
        return (count == 1) & (atomic & lonely[:, :, None]).any(axis=1)

    @cached_property
    def at_ind(self) -> np.ndarray:
        if self.signature == "P":
            return ((self.P & self.A[:, :, None]) * self.weights[None, :, None]).sum(axis=1)
        ref = self._atomic.argmax(axis=1).astype(np.int64)
        return np.where(self.defined, ref, 0)

    @cached_property
    def at_pl(self) -> np.ndarray:
        if self.signature == "P":
            return _subset_union(self.at_ind, self.n)
        idx = np.arange(1 << self.n, dtype=np.int64)[None, :, None]
        atom_pl = np.bitwise_or.reduce(np.where(self._atomic, idx, 0), axis=1)
        return _subset_union(atom_pl, self.n)

    @cached_property
    def _cover(self) -> np.ndarray:
        # cover[b, zz, y]: some member of zz overlaps y
        return (self.mem[None, :, :, None] & self.O[:, None, :, :]).any(axis=2)

    @cached_property
    def F(self) -> np.ndarray:
        if self.signature == "F":
            return self.rel
        P = self.P
        inside = ~(self.mem[None, :, :, None] & ~P[:, None, :, :]).any(axis=2)
        covered = ~(P[:, None, :, :] & ~self._cover[:, :, :, None]).any(axis=2)
        return inside & covered

    @cached_property
    def Fstar(self) -> np.ndarray:
        return (self.O[:, None, :, :] == self._cover[:, :, :, None]).all(axis=2)

    @cached_property
    def S(self) -> np.ndarray:
        return (self.among_aa[:, :, None] & self.Fstar).any(axis=1)

    @cached_property
    def undefined_rows(self) -> np.ndarray:
        return ~self.defined.all(axis=1)

    # ---- formula evaluation
    def _shape(self, k: int, pos: int, size: int) -> tuple[int, ...]:
        shape = [1] * (k + 1)
        shape[pos + 1] = size
        return tuple(shape)

    def _bidx(self, k: int) -> np.ndarray:
        return np.arange(self.B).reshape((self.B,) + (1,) * k)

    def _term(self, t: Term, scope: list[Var], env: dict) -> np.ndarray:
        k = len(scope)
        if isinstance(t, (IndVar, PluralVar)):
            for pos in range(k - 1, -1, -1):
                if scope[pos] == t:
                    size = self.n if isinstance(t, IndVar) else 1 << self.n
                    return np.arange(size).reshape(self._shape(k, pos, size))
            return np.full((1,) * (k + 1), env[t], dtype=np.int64)
        if isinstance(t, AtomsConst):
            return self.aa.reshape((self.B,) + (1,) * k)
        inner = self._term(t.arg, scope, env)
        table = self.at_ind if t.of_individual else self.at_pl
        return table[self._bidx(k), inner]

    def _atom(self, f: Atom, scope: list[Var], env: dict) -> np.ndarray:
        args = [self._term(t, scope, env) for t in f.args]
        p = f.pred
        if p in ("=", "eq"):
            return args[0] == args[1]
        if p == "in":
            return ((args[1] >> args[0]) & 1).astype(bool)
        if p == "among":
            return (args[0] != 0) & ((args[0] & ~args[1]) == 0)
        table = getattr(self, p)
        b = self._bidx(len(scope))
        if len(args) == 1:
            return table[b, args[0]]
        return table[b, args[0], args[1]]

    def _eval(self, f: Formula, scope: list[Var], env: dict) -> np.ndarray:
        if isinstance(f, Atom):
            return self._atom(f, scope, env)
        if isinstance(f, Not):
            return ~self._eval(f.body, scope, env)
        if isinstance(f, (ForAll, Exists)):
            body = self._eval(f.body, scope + [f.var], env)
            return body.all(axis=-1) if isinstance(f, ForAll) else body.any(axis=-1)
        left = self._eval(f.left, scope, env)
        right = self._eval(f.right, scope, env)
        if isinstance(f, And):
            return left & right
        if isinstance(f, Or):
            return left | right
        if isinstance(f, Implies):
            return ~left | right
        if isinstance(f, Iff):
            return left == right
        raise TypeError(f"not a formula: {f!r}")

    def select(self, keep: np.ndarray) -> Batch:
        return Batch(self.signature, self.n, self.rel[keep])

    def holds(self, f: Formula, env: dict | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Per-row truth values and a mask of rows whose value is undefined.

        A row is undefined when ``f`` reads at[x] on the F-side and some
        element lacks a referent; such rows need the scalar evaluator.
        """
        value = np.broadcast_to(self._eval(f, [], env or {}), (self.B,)).copy()
        if needs_referents(f, self.signature):
            undefined = self.undefined_rows
            value &= ~undefined
        else:
            undefined = np.zeros(self.B, dtype=bool)
        return value, undefined.copy()


def satisfying_rows(batch: Batch, f: Formula, budget: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Rows where closed ``f`` holds, and rows the batch could not decide.

    Leading universal quantifiers and top-level conjunctions are unrolled
    (up to ``budget`` instances) so rows drop out as soon as one instance
    fails.  Undecided rows read an undefined at[x] and go to the scalar
    evaluator.
    """
    undecided: list[np.ndarray] = []

    def go(b: Batch, rows: np.ndarray, g: Formula, env: dict, budget: int) -> tuple[Batch, np.ndarray]:
        if isinstance(g, And):
            b, rows = go(b, rows, g.left, env, budget)
            return go(b, rows, g.right, env, budget)
        if isinstance(g, ForAll):
            size = b.n if isinstance(g.var, IndVar) else 1 << b.n
            if size <= budget:
                for val in range(size):
                    if not len(rows):
                        break
                    b, rows = go(b, rows, g.body, {**env, g.var: val}, budget // size)
                return b, rows
        value, undefined = b.holds(g, env)
        if undefined.any():
            undecided.append(rows[undefined])
        return b.select(value), rows[value]

    _, rows = go(batch, np.arange(batch.B), f, {}, budget)
    pending = np.unique(np.concatenate(undecided)) if undecided else np.zeros(0, dtype=np.int64)
    return rows, pending
