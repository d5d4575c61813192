"""Finite models of AEM and ATC: canonical construction and brute force.

The canonical constructor builds AEM models directly from families of
composite atom-sets.  The brute-force oracle walks every relation over a
labelled domain and keeps those the batch evaluator accepts, then
re-checks the survivors with the scalar evaluator.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Iterator, Sequence

import numpy as np

from .batch import Batch, BoundError, satisfying_rows, candidates, check_brute_bound, decode, element_names, encode, relation_bits
from .evaluator import DefinednessError, evaluate, semantics
from .formula import Formula
from .model import FamilySpec, HARD_MAX_DOMAIN, Structure
from .theories import Theory, check_theory, theory as lookup_theory

MAX_ISO_ATOMS = 8
CHUNK = 1 << 16


class TheoryViolation(ValueError):
    pass


# --------------------------------------------------------------- canonical


def composite_candidates(k: int) -> list[int]:
    """Atom-set masks with at least two atoms, in increasing order."""
    return [m for m in range(1 << k) if m.bit_count() >= 2]


def _check_family_bounds(k: int, m: int) -> None:
    if k < 1:
        raise BoundError(f"need at least one atom, got k={k}")
    if m < 0:
        raise BoundError(f"composite count must be nonnegative, got m={m}")
    limit = 2 ** k - k - 1
    if m > limit:
        raise BoundError(
            f"k={k} atoms admit at most {limit} composites (each needs two or more atoms), got m={m}"
        )
    if k + m > HARD_MAX_DOMAIN:
        raise BoundError(f"domain k+m={k + m} exceeds the hard cap {HARD_MAX_DOMAIN}")


def _permuted_masks(k: int) -> list[list[int]]:
    """For each atom permutation, the image of every mask."""
    out = []
    for perm in itertools.permutations(range(k)):
        image = [0] * (1 << k)
        for mask in range(1, 1 << k):
            low = mask & -mask
            image[mask] = image[mask ^ low] | (1 << perm[low.bit_length() - 1])
        out.append(image)
    return out


def canonical_families(k: int, m: int, up_to_iso: bool = True, atom_symmetry: bool = False) -> Iterator[tuple[int, ...]]:
    """Composite masks per model, as tuples in composite-slot order.

    ``up_to_iso`` yields one family per unordered set of composites;
    without it every ordering of the composite slots is produced.
    ``atom_symmetry`` further identifies families that differ by a
    permutation of the atoms (the lexicographically least image wins).
    """
    _check_family_bounds(k, m)
    if atom_symmetry and k > MAX_ISO_ATOMS:
        raise BoundError(f"atom-permutation reduction supports k <= {MAX_ISO_ATOMS}")
    images = _permuted_masks(k) if atom_symmetry else None
    for combo in itertools.combinations(composite_candidates(k), m):
        if images is not None:
            if any(tuple(sorted(img[c] for c in combo)) < combo for img in images):
                continue
        if up_to_iso:
            yield combo
        else:
            yield from itertools.permutations(combo)


def family_structure(k: int, masks: Sequence[int]) -> Structure:
    order = [frozenset(i + 1 for i in range(k) if c >> i & 1) for c in masks]
    return FamilySpec(k, frozenset(order)).to_structure(order)


def enumerate_aem_canonical(k: int, m: int, up_to_iso: bool = True, *, atom_symmetry: bool = False) -> Iterator[Structure]:
    """AEM P-structures with atoms a1..ak and composites c1..cm."""
    for masks in canonical_families(k, m, up_to_iso, atom_symmetry):
        yield family_structure(k, masks)


def count_models(k: int, m: int, *, atom_symmetry: bool = False) -> int:
    """Number of families of m composites over k labelled atoms."""
    _check_family_bounds(k, m)
    if atom_symmetry:
        return sum(1 for _ in canonical_families(k, m, True, True))
    return math.comb(2 ** k - k - 1, m)


def aem_models_up_to(max_atoms: int, max_composites: int, up_to_iso: bool = True) -> Iterator[Structure]:
    for k in range(1, max_atoms + 1):
        for m in range(0, min(max_composites, 2 ** k - k - 1) + 1):
            yield from enumerate_aem_canonical(k, m, up_to_iso)


def induce_atc(s: Structure) -> Structure:
    """The ATC model over the same domain whose derived parthood is ``s``:
    F(zz,x) iff the atoms of zz are exactly the atoms of x."""
    rep = check_theory(s, "AEM")
    if not rep.passed:
        bad = rep.failures()[0]
        raise TheoryViolation(f"not an AEM model: {bad.axiom} fails")
    sem = semantics(s)
    ats = [sem.at_ind(i) for i in range(s.size)]
    pairs = [
        (s.domain[x], s.names(zz))
        for zz in range(1 << s.size)
        for x in range(s.size)
        if sem.at_pl(zz) == ats[x]
    ]
    return Structure.f(s.domain, pairs)


def relabel(s: Structure, names: Sequence[str], domain: Sequence[str] | None = None) -> Structure:
    """Rename ``s.domain[i]`` to ``names[i]``; ``domain`` fixes the new element order."""
    ren = dict(zip(s.domain, names))
    order = list(domain) if domain is not None else list(names)
    if s.signature == "P":
        return Structure.p(order, [(ren[x], ren[y]) for x, y in s.parthood])
    return Structure.f(order, [(ren[x], [ren[e] for e in zz]) for x, zz in s.composition])


def labelled_codes(models: Iterable[Structure], n: int) -> set[int]:
    """Codes of every relabelling of ``models`` onto the brute-force domain."""
    names = element_names(n)
    out = set()
    for s in models:
        if s.size != n:
            continue
        for perm in itertools.permutations(names):
            out.add(encode(relabel(s, perm, names)))
    return out


def canonical_codes(n: int, signature: str) -> set[int]:
    """Labelled P (AEM) or induced F (ATC) models of size ``n`` from the canonical builder."""
    models = []
    for k in range(1, n + 1):
        m = n - k
        if m <= 2 ** k - k - 1:
            models.extend(enumerate_aem_canonical(k, m))
    if signature == "F":
        models = [induce_atc(s) for s in models]
    return labelled_codes(models, n)


# -------------------------------------------------------------- brute force


def _filter_chunk(args) -> list[int]:
    signature, n, formulas, lo, hi = args
    codes = np.arange(lo, hi, dtype=np.int64)
    rel = candidates(signature, n, lo, hi)
    for f in formulas:
        if not len(codes):
            break
        rows, pending = satisfying_rows(Batch(signature, n, rel), f)
        extra = []
        for i in pending:
            try:
                if evaluate(decode(signature, n, int(codes[i])), f):
                    extra.append(i)
            except DefinednessError:
                pass
        keep = np.sort(np.concatenate([rows, np.array(extra, dtype=np.int64)]))
        codes, rel = codes[keep], rel[keep]
    return codes.tolist()


def filter_codes(signature: str, n: int, formulas: Sequence[Formula], *, jobs: int = 1,
                 chunk: int = CHUNK, first_only: bool = False) -> list[int]:
    """Codes of every candidate relation satisfying all ``formulas``, ascending.

    The candidate space is split into contiguous code ranges; results do
    not depend on ``jobs``.  With ``first_only`` only the lowest code is
    returned (or none).
    """
    check_brute_bound(signature, n)
    total = 1 << relation_bits(signature, n)
    tasks = [(signature, n, tuple(formulas), lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            if first_only:
                # map yields in task order, so the first hit is the lowest code
                for part in pool.map(_filter_chunk, tasks):
                    if part:
                        pool.shutdown(cancel_futures=True)
                        return part[:1]
                return []
            parts = list(pool.map(_filter_chunk, tasks))
    else:
        parts = []
        for t in tasks:
            part = _filter_chunk(t)
            if first_only and part:
                return part[:1]
            parts.append(part)
    return sorted(c for part in parts for c in part)


def enumerate_brute(n: int, signature: str, theory: Theory | str, *, jobs: int = 1) -> Iterator[Structure]:
    """Every labelled ``signature``-structure on ``n`` elements that models ``theory``.

    Elements are named a, b, c, ...; output is ordered by relation code.
    """
    t = lookup_theory(theory) if isinstance(theory, str) else theory
    codes = filter_codes(signature, n, [f for _, f in t.axioms], jobs=jobs)
    for code in codes:
        s = decode(signature, n, code)
        rep = check_theory(s, t, bridge=True)
        if not rep.passed:
            raise AssertionError(f"batch and scalar evaluators disagree on code {code}: {rep.to_json()}")
        yield s


def brute_codes(n: int, signature: str, theory: Theory | str, *, jobs: int = 1) -> set[int]:
    return {encode(s) for s in enumerate_brute(n, signature, theory, jobs=jobs)}
