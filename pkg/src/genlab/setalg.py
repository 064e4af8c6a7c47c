"""Decidable algebra of countable subsets of a fixed countable universe.

Elements are natural-number codes.  The Cantor pairing
``pair(a, j) = (a + j)(a + j + 1)/2 + j`` splits the codes into disjoint
columns: atom ``a`` (with ``a >= 1``) owns the infinite set
``{pair(a, j) : j >= 0}``.  Codes on the ``a = 0`` diagonal belong to no
atom and are not elements of any universe.

A :class:`CountableSet` is a normal form with three parts: an atom
selector (finitely many atoms, or all but finitely many of an open
universe), a finite ``minus`` of codes removed from the selected atoms,
and a finite ``plus`` of codes added outside them.  The family is closed
under intersection, union and difference, and membership, cardinality
and ordered enumeration are exact and total.

Values are immutable; anything here may be shared freely between
concurrent readers.
"""

from __future__ import annotations

import heapq
import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import MismatchedUniverse

INFINITE = math.inf

DEFAULT_SCAN_BOUND = 10_000


def scan_bound() -> int:
    """Brute-force scan bound B used by test oracles (env-overridable)."""
    return int(os.environ.get("GENLAB_SCAN_BOUND", DEFAULT_SCAN_BOUND))


def pair(atom_id: int, rank: int) -> int:
    """Code of the element of atom ``atom_id`` at position ``rank``."""
    s = atom_id + rank
    return s * (s + 1) // 2 + rank


def unpair(code: int) -> tuple[int, int]:
    """Inverse of :func:`pair`; total on the naturals."""
    s = (math.isqrt(8 * code + 1) - 1) // 2
    rank = code - s * (s + 1) // 2
    return s - rank, rank


def atom_of(code: int) -> int:
    return unpair(code)[0]


def rank_of(code: int) -> int:
    return unpair(code)[1]


def is_element(code: int) -> bool:
    """True iff the code lies in some atom (the ``a = 0`` diagonal does not)."""
    return code >= 0 and atom_of(code) >= 1


@dataclass(frozen=True)
class Universe:
    """Declared atom table for one hypothesis class or document.

    A *closed* universe contains exactly the declared atoms.  An *open*
    universe contains every atom id >= 1; the table then only attaches
    display labels to a few of them.
    """

    atoms: tuple[tuple[int, str], ...] = ()
    closed: bool = False
    name: str = field(default="universe", compare=False)

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for atom_id, _ in self.atoms:
            if atom_id < 1:
                raise ValueError(f"atom id must be >= 1, got {atom_id}")
            if atom_id in seen:
                raise ValueError(f"atom id {atom_id} declared twice")
            seen.add(atom_id)
        object.__setattr__(self, "atoms", tuple(sorted(self.atoms)))

    @property
    def declared_ids(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.atoms)

    def has_atom(self, atom_id: int) -> bool:
        return atom_id >= 1 and (not self.closed or atom_id in self.declared_ids)

    def label(self, atom_id: int) -> str:
        for a, lbl in self.atoms:
            if a == atom_id:
                return lbl
        return f"A{atom_id}"

    def iter_atom_ids(self) -> Iterator[int]:
        """All atom ids of this universe, ascending."""
        if self.closed:
            yield from sorted(self.declared_ids)
        else:
            yield from itertools.count(1)

    def contains_code(self, code: int) -> bool:
        return is_element(code) and self.has_atom(atom_of(code))

    # -- set constructors -------------------------------------------------

    def empty_set(self) -> CountableSet:
        return _build(self, False, frozenset(), {})

    def full_set(self) -> CountableSet:
        return _build(self, True, frozenset(), {})

    def atom_set(self, *atom_ids: int) -> CountableSet:
        return make_set(self, include_atoms=atom_ids)

    def finite_set(self, codes: Iterable[int]) -> CountableSet:
        return make_set(self, plus=codes)

    def cofinite_atom_set(self, excluded_ids: Iterable[int]) -> CountableSet:
        return make_set(self, cofinite_excluding=excluded_ids)


@dataclass(frozen=True)
class CountableSet:
    """Canonical-form subset of a universe.

    ``cofinite`` selects the interpretation of ``atom_ids``: the included
    atoms are either exactly ``atom_ids`` or all universe atoms except
    ``atom_ids``.  ``minus`` lies inside the included atoms, ``plus``
    outside them, and the two never overlap.  Construct instances through
    :func:`make_set` or the :class:`Universe` helpers, which canonicalize.
    """

    universe: Universe
    cofinite: bool
    atom_ids: frozenset[int]
    minus: frozenset[int]
    plus: frozenset[int]

    # -- membership --------------------------------------------------------

    def _atom_included(self, atom_id: int) -> bool:
        if not self.universe.has_atom(atom_id):
            return False
        if self.cofinite:
            return atom_id not in self.atom_ids
        return atom_id in self.atom_ids

    def __contains__(self, code: int) -> bool:
        if code in self.plus:
            return True
        if code in self.minus:
            return False
        return is_element(code) and self._atom_included(atom_of(code))

    def member(self, code: int) -> bool:
        return code in self

    # -- size ---------------------------------------------------------------

    def has_included_atoms(self) -> bool:
        # A cofinite selector only survives canonicalization in an open
        # universe, where infinitely many atoms always remain.
        return self.cofinite or bool(self.atom_ids)

    def cardinality(self) -> int | float:
        """Exact size: an int, or ``INFINITE``."""
        if self.has_included_atoms():
            return INFINITE
        return len(self.plus)

    def is_finite(self) -> bool:
        return not self.has_included_atoms()

    def is_empty(self) -> bool:
        return self.cardinality() == 0

    # -- algebra -----------------------------------------------------------

    def _check_same_universe(self, other: CountableSet) -> None:
        if self.universe != other.universe:
            raise MismatchedUniverse(
                f"sets live in different universes: "
                f"{self.universe.name!r} vs {other.universe.name!r}"
            )

    def intersect(self, other: CountableSet) -> CountableSet:
        self._check_same_universe(other)
        if self.cofinite and other.cofinite:
            sel = (True, self.atom_ids | other.atom_ids)
        elif self.cofinite:
            sel = (False, other.atom_ids - self.atom_ids)
        elif other.cofinite:
            sel = (False, self.atom_ids - other.atom_ids)
        else:
            sel = (False, self.atom_ids & other.atom_ids)
        return self._overlay(other, sel, lambda a, b: a and b)

    def union(self, other: CountableSet) -> CountableSet:
        self._check_same_universe(other)
        if self.cofinite and other.cofinite:
            sel = (True, self.atom_ids & other.atom_ids)
        elif self.cofinite:
            sel = (True, self.atom_ids - other.atom_ids)
        elif other.cofinite:
            sel = (True, other.atom_ids - self.atom_ids)
        else:
            sel = (False, self.atom_ids | other.atom_ids)
        return self._overlay(other, sel, lambda a, b: a or b)

    def difference(self, other: CountableSet) -> CountableSet:
        self._check_same_universe(other)
        if self.cofinite and other.cofinite:
            sel = (False, other.atom_ids - self.atom_ids)
        elif self.cofinite:
            sel = (True, self.atom_ids | other.atom_ids)
        elif other.cofinite:
            sel = (False, self.atom_ids & other.atom_ids)
        else:
            sel = (False, self.atom_ids - other.atom_ids)
        return self._overlay(other, sel, lambda a, b: a and not b)

    def _overlay(self, other, sel, op) -> CountableSet:
        # The atom selector fixes membership everywhere except at the
        # finitely many exception codes of either operand; those are
        # corrected pointwise, so the result is extensionally exact.
        cofinite, atom_ids = sel
        exceptional = self.minus | self.plus | other.minus | other.plus
        overrides = {x: op(x in self, x in other) for x in exceptional}
        return _build(self.universe, cofinite, atom_ids, overrides)

    __and__ = intersect
    __or__ = union
    __sub__ = difference

    # -- enumeration ---------------------------------------------------------

    def _iter_atom_part(self) -> Iterator[int]:
        """Codes of the included atoms in ascending order, minus removed."""
        ids = iter(sorted(a for a in self.atom_ids if self.universe.has_atom(a))
                   if not self.cofinite
                   else (a for a in self.universe.iter_atom_ids()
                         if a not in self.atom_ids))
        first = next(ids, None)
        if first is None:
            return
        # Lazily seeded heap: atom a's column starts at pair(a, 0), which
        # grows with a, so the next atom is seeded only once the current
        # column head has been consumed.
        heap: list[tuple[int, int, int]] = [(pair(first, 0), first, 0)]
        pending = next(ids, None)
        while heap:
            code, a, j = heapq.heappop(heap)
            heapq.heappush(heap, (pair(a, j + 1), a, j + 1))
            if j == 0 and pending is not None:
                heapq.heappush(heap, (pair(pending, 0), pending, 0))
                pending = next(ids, None)
            if code not in self.minus:
                yield code

    def iter_elements(self) -> Iterator[int]:
        """All elements in ascending code order (lazy, possibly infinite)."""
        return heapq.merge(self._iter_atom_part(), iter(sorted(self.plus)))

    def enumerate(self, k: int) -> list[int]:
        """The ``k`` smallest elements (fewer if the set is smaller)."""
        return list(itertools.islice(self.iter_elements(), k))

    def first_excluding(self, used: Iterable[int]) -> int | None:
        """Smallest element not in ``used``; None if the set is exhausted."""
        used = set(used)
        for x in self.iter_elements():
            if x not in used:
                return x
        return None

    def __repr__(self) -> str:
        sel = ("all atoms except" if self.cofinite else "atoms") + " {%s}" % (
            ",".join(map(str, sorted(self.atom_ids))))
        parts = [sel]
        if self.minus:
            parts.append("minus {%s}" % ",".join(map(str, sorted(self.minus))))
        if self.plus:
            parts.append("plus {%s}" % ",".join(map(str, sorted(self.plus))))
        return f"<CountableSet {' '.join(parts)}>"


def _build(universe: Universe, cofinite: bool, atom_ids: frozenset[int],
           overrides: dict[int, bool]) -> CountableSet:
    """Canonicalize and construct.

    ``overrides`` pins membership of finitely many codes; entries already
    decided by the atom selector are dropped, so the result satisfies the
    normal-form invariants by construction.
    """
    if cofinite and universe.closed:
        atom_ids = universe.declared_ids - atom_ids
        cofinite = False
    if not cofinite:
        atom_ids = frozenset(a for a in atom_ids if universe.has_atom(a))

    def included(code: int) -> bool:
        a = atom_of(code)
        if not universe.has_atom(a):
            return False
        return (a not in atom_ids) if cofinite else (a in atom_ids)

    minus, plus = set(), set()
    for code, inside in overrides.items():
        if inside and not included(code):
            plus.add(code)
        elif not inside and included(code):
            minus.add(code)
    return CountableSet(universe, cofinite, frozenset(atom_ids),
                        frozenset(minus), frozenset(plus))


def make_set(universe: Universe,
             include_atoms: Iterable[int] = (),
             cofinite_excluding: Iterable[int] | None = None,
             minus: Iterable[int] = (),
             plus: Iterable[int] = ()) -> CountableSet:
    """Public constructor from the raw normal-form description.

    ``plus`` wins over ``minus`` when a code appears in both, matching the
    membership rule.  Atom references and ``plus`` codes must exist in the
    universe.
    """
    if cofinite_excluding is not None:
        cofinite, atom_ids = True, frozenset(cofinite_excluding)
        if include_atoms:
            raise ValueError("give include_atoms or cofinite_excluding, not both")
    else:
        cofinite, atom_ids = False, frozenset(include_atoms)
    for a in atom_ids:
        if not universe.has_atom(a):
            raise ValueError(f"atom {a} is not part of universe {universe.name!r}")
    overrides: dict[int, bool] = {}
    for code in minus:
        if not is_element(code):
            raise ValueError(f"code {code} is not an element")
        overrides[code] = False
    for code in plus:
        if not universe.contains_code(code):
            raise ValueError(f"code {code} is not an element of universe "
                             f"{universe.name!r}")
        overrides[code] = True
    return _build(universe, cofinite, atom_ids, overrides)
