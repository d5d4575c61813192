"""Finite structures for the parthood (P) and composition (F) signatures."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Union

HARD_MAX_DOMAIN = 16

Subset = frozenset[str]
Value = Union[str, Subset]


class ModelFormatError(ValueError):
    pass


class InvalidStructure(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class Structure:
    """A finite domain with parthood pairs (signature ``"P"``) or
    composition pairs ``(element, subset)`` (signature ``"F"``).

    Subsets in ``composition`` may be empty.  Internally elements are
    addressed by their index in ``domain`` and subsets by bitmask.
    """

    domain: tuple[str, ...]
    signature: str
    parthood: frozenset[tuple[str, str]] = frozenset()
    composition: frozenset[tuple[str, Subset]] = frozenset()

    @classmethod
    def p(cls, domain: Iterable[str], pairs: Iterable[tuple[str, str]]) -> Structure:
        return cls(tuple(domain), "P", parthood=frozenset(map(tuple, pairs)))

    @classmethod
    def f(cls, domain: Iterable[str], pairs: Iterable[tuple[str, Iterable[str]]]) -> Structure:
        return cls(
            tuple(domain), "F", composition=frozenset((x, frozenset(zz)) for x, zz in pairs)
        )

    @property
    def size(self) -> int:
        return len(self.domain)

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.domain)}

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index[name]
        return m

    def names(self, mask: int) -> Subset:
        return frozenset(self.domain[i] for i in range(self.size) if mask >> i & 1)

    @cached_property
    def parts_of(self) -> tuple[int, ...]:
        """``parts_of[y]`` is the mask of all x with P(x,y)."""
        rows = [0] * self.size
        for x, y in self.parthood:
            rows[self.index[y]] |= 1 << self.index[x]
        return tuple(rows)

    @cached_property
    def compositions(self) -> tuple[frozenset[int], ...]:
        """``compositions[x]`` is the set of subset masks zz with F(zz,x)."""
        rows: list[set[int]] = [set() for _ in self.domain]
        for x, zz in self.composition:
            rows[self.index[x]].add(self.mask(zz))
        return tuple(frozenset(r) for r in rows)

    def pairs(self) -> list:
        """The relation data in normalized (sorted, by domain index) order."""
        key = self.index.__getitem__
        if self.signature == "P":
            return sorted(self.parthood, key=lambda p: (key(p[0]), key(p[1])))
        return sorted(
            ((x, sorted(zz, key=key)) for x, zz in self.composition),
            key=lambda p: (key(p[0]), [key(e) for e in p[1]]),
        )


def validate(s: Structure) -> list[str]:
    """Human-readable invariant violations of ``s`` (empty when valid)."""
    out = []
    if not s.domain:
        out.append("empty domain")
    if len(set(s.domain)) != len(s.domain):
        dupes = sorted({d for d in s.domain if s.domain.count(d) > 1})
        out.append("duplicate element(s) " + ", ".join(dupes))
    if len(s.domain) > HARD_MAX_DOMAIN:
        out.append(f"domain size {len(s.domain)} exceeds the hard cap {HARD_MAX_DOMAIN}")
    if s.signature not in ("P", "F"):
        out.append(f"unknown signature {s.signature!r}")
        return out
    known = set(s.domain)
    mentioned: list[str] = []
    if s.signature == "P":
        if s.composition:
            out.append("composition data present on a P-structure")
        for x, y in s.parthood:
            mentioned += [x, y]
    else:
        if s.parthood:
            out.append("parthood data present on an F-structure")
        for x, zz in s.composition:
            mentioned += [x, *zz]
    seen = set()
    for name in mentioned:
        if name not in known and name not in seen:
            seen.add(name)
            out.append(f"unknown element {name}")
    return out


def check_valid(s: Structure) -> Structure:
    violations = validate(s)
    if violations:
        raise InvalidStructure(violations)
    return s


# ----------------------------------------------------------- assignments


@dataclass(frozen=True)
class Assignment:
    individuals: Mapping[str, str] = field(default_factory=dict)
    plurals: Mapping[str, Subset] = field(default_factory=dict)

    def validate(self, s: Structure) -> list[str]:
        known = set(s.domain)
        out = [f"{v} bound to unknown element {e}" for v, e in self.individuals.items() if e not in known]
        for v, zz in self.plurals.items():
            out += [f"{v} contains unknown element {e}" for e in sorted(zz - known)]
        return out


_BINDING = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*#?)\s*=\s*(\{[^}]*\}|[^\s,{}]+)\s*")


def parse_assignment(items: Iterable[str]) -> Assignment:
    """Parse CLI bindings such as ``x=a``, ``zz={a,b}``, ``yy={}``."""
    from .formula import is_plural_name

    ind: dict[str, str] = {}
    plu: dict[str, Subset] = {}
    for item in items:
        m = _BINDING.fullmatch(item)
        if not m:
            raise ValueError(f"bad binding {item!r}; expected name=element or name={{a,b}}")
        name, value = m.groups()
        if value.startswith("{"):
            if not is_plural_name(name):
                raise ValueError(f"{name} is an individual variable but got a set")
            plu[name] = frozenset(e.strip() for e in value[1:-1].split(",") if e.strip())
        else:
            if is_plural_name(name):
                raise ValueError(f"{name} is a plural variable; write {name}={{...}}")
            ind[name] = value
    return Assignment(ind, plu)


# ------------------------------------------------------ atom-set families


@dataclass(frozen=True)
class FamilySpec:
    """A finite AEM model as ``k`` atoms plus distinct composite atom-sets.

    Atoms are numbered ``1..k``; every composite has at least two atoms.
    """

    k: int
    composites: frozenset[frozenset[int]]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("atom count must be positive")
        for c in self.composites:
            if len(c) < 2:
                raise ValueError(f"composite {sorted(c)} has fewer than two atoms")
            if not c <= set(range(1, self.k + 1)):
                raise ValueError(f"composite {sorted(c)} mentions atoms outside 1..{self.k}")

    @staticmethod
    def encode(c: Iterable[int]) -> int:
        return sum(1 << (a - 1) for a in c)

    def ordered_composites(self) -> list[frozenset[int]]:
        return sorted(self.composites, key=self.encode)

    def to_structure(self, order: list[frozenset[int]] | None = None) -> Structure:
        """Atoms ``a1..ak`` then composites ``c1..cm``; P is atom-set inclusion."""
        comps = order if order is not None else self.ordered_composites()
        atoms = [f"a{i}" for i in range(1, self.k + 1)]
        names = atoms + [f"c{j}" for j in range(1, len(comps) + 1)]
        atom_sets = [frozenset([i]) for i in range(1, self.k + 1)] + list(comps)
        pairs = [
            (names[i], names[j])
            for i, si in enumerate(atom_sets)
            for j, sj in enumerate(atom_sets)
            if si <= sj
        ]
        return Structure.p(names, pairs)


# ------------------------------------------------------------- file format


def dump_structure(s: Structure) -> str:
    payload: dict = {"domain": list(s.domain), "signature": s.signature}
    if s.signature == "P":
        payload["P"] = [list(p) for p in s.pairs()]
    else:
        payload["F"] = [[x, zz] for x, zz in s.pairs()]
    return json.dumps(payload, ensure_ascii=False) + "\n"


def save_structure(s: Structure, path: str | Path) -> None:
    Path(path).write_text(dump_structure(check_valid(s)), encoding="utf-8")


def loads_structure(text: str, source: str = "<string>") -> Structure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        raise ModelFormatError(f"{source}: top level must be an object")
    domain = data.get("domain")
    if not isinstance(domain, list) or not all(isinstance(d, str) for d in domain):
        raise ModelFormatError(f"{source}: 'domain' must be a list of strings")
    sig = data.get("signature")
    if sig is None:
        sig = "F" if "F" in data else "P"
    if sig not in ("P", "F"):
        raise ModelFormatError(f"{source}: 'signature' must be \"P\" or \"F\"")
    rows = data.get(sig, [])
    if not isinstance(rows, list):
        raise ModelFormatError(f"{source}: {sig!r} must be a list")
    if sig == "P":
        for i, r in enumerate(rows):
            if not (isinstance(r, list) and len(r) == 2 and all(isinstance(e, str) for e in r)):
                raise ModelFormatError(f"{source}: P[{i}] must be a pair of element names")
        s = Structure.p(domain, [tuple(r) for r in rows])
    else:
        for i, r in enumerate(rows):
            ok = (
                isinstance(r, list) and len(r) == 2 and isinstance(r[0], str)
                and isinstance(r[1], list) and all(isinstance(e, str) for e in r[1])
            )
            if not ok:
                raise ModelFormatError(f"{source}: F[{i}] must be [element, [elements...]]")
        s = Structure.f(domain, [(x, zz) for x, zz in rows])
    return check_valid(s)


def load_structure(path: str | Path) -> Structure:
    p = Path(path)
    return loads_structure(p.read_text(encoding="utf-8"), str(p))
