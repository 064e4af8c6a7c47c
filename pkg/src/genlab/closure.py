"""Consistent families, closure operators, and closure dimensions.

For a class ``H``, a prefix of observed elements and a noise level ``n``,
the *consistent family* holds every hypothesis that misses at most ``n``
of the distinct observed elements, and the *closure* is the intersection
of the consistent supports (``BOT`` when no hypothesis is consistent).

The noisy closure dimension at level ``n`` is the largest ``d`` for which
some ``d`` distinct elements give a nonempty consistent family whose
closure is finite.  Exact values for finite classes come from a cell
decomposition (the partition of the universe by support-membership
pattern) plus an exact integer packing over the cells; a brute-force
oracle and a budgeted witness search cover cross-checking and indexed
families.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

from .classes import FiniteClass, HypothesisClass, IndexedFamily
from .errors import TooManyHypotheses
from .setalg import INFINITE, CountableSet

CELL_LIMIT = 16


class _BotType:
    """Closure of a prefix no hypothesis is consistent with."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Bot"


BOT = _BotType()


@dataclass(frozen=True)
class DimValue:
    """A dimension: exact natural, exact infinity, or a budget-limited bound."""

    kind: str  # "finite" | "infinite" | "at_least"
    value: int | None = None

    @classmethod
    def finite(cls, d: int) -> "DimValue":
        return cls("finite", d)

    @classmethod
    def infinite(cls) -> "DimValue":
        return cls("infinite")

    @classmethod
    def at_least(cls, d: int) -> "DimValue":
        return cls("at_least", d)

    @classmethod
    def from_number(cls, v: int | float) -> "DimValue":
        return cls.infinite() if v == INFINITE else cls.finite(int(v))

    def known_less_than(self, d: int) -> bool:
        """True iff the dimension is certainly below ``d``."""
        if self.kind == "finite":
            return self.value < d
        if self.kind == "infinite":
            return False
        if self.value >= d:
            return False
        raise ValueError(f"{self} is a lower bound; cannot certify < {d}")

    def __str__(self) -> str:
        if self.kind == "finite":
            return str(self.value)
        if self.kind == "infinite":
            return "inf"
        return f">={self.value}"

    def to_json(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class CofiniteIndexSet:
    """Consistent family of an indexed family: all indices except these."""

    excluded: frozenset[int]


@dataclass(frozen=True)
class Cell:
    """One block of the support-membership partition of the universe."""

    pattern: frozenset[str]  # ids of the hypotheses whose support contains it
    region: CountableSet
    size: int | float


def distinct_elements(prefix) -> frozenset[int]:
    return frozenset(prefix)


def consistent_family(c: HypothesisClass, prefix, n: int):
    """Hypotheses missing at most ``n`` of the distinct prefix elements.

    Returns an explicit tuple of hypotheses for a finite class, and a
    :class:`CofiniteIndexSet` for an indexed family.
    """
    elements = distinct_elements(prefix)
    if isinstance(c, FiniteClass):
        return tuple(h for h in c.hypotheses
                     if sum(x not in h.support for x in elements) <= n)
    misses = c.misfits(elements)
    return CofiniteIndexSet(frozenset(i for i, m in misses.items() if m > n))


def closure(c: HypothesisClass, prefix, n: int):
    """Intersection of the consistent supports; ``BOT`` if none consistent."""
    family = consistent_family(c, prefix, n)
    if isinstance(family, CofiniteIndexSet):
        # a cofinite family over an infinite index set is never empty
        return c.cofinite_intersection(family.excluded)
    if not family:
        return BOT
    result = family[0].support
    for h in family[1:]:
        result = result & h.support
    return result


# --- cell decomposition -------------------------------------------------------


def _check_cell_limit(c: FiniteClass, limit: int) -> None:
    if c.size > limit:
        raise TooManyHypotheses(
            f"{c.size} hypotheses exceed the cell limit {limit}")


@functools.lru_cache(maxsize=None)
def cell_decomposition(c: FiniteClass, limit: int = CELL_LIMIT) -> tuple[Cell, ...]:
    """All ``2^q`` membership-pattern cells, in pattern-bitmask order.

    Cell regions are pairwise disjoint and cover the universe; sizes are
    exact.  The all-hypotheses cell equals the common intersection, so a
    finite common intersection shows up as a finite (possibly empty) cell.
    """
    if c.size < 1:
        raise ValueError("cell decomposition needs at least one hypothesis")
    _check_cell_limit(c, limit)
    cells = []
    for mask in range(2 ** c.size):
        region = c.universe.full_set()
        for i, h in enumerate(c.hypotheses):
            if mask >> i & 1:
                region = region & h.support
            else:
                region = region - h.support
        pattern = frozenset(h.id for i, h in enumerate(c.hypotheses)
                            if mask >> i & 1)
        cells.append(Cell(pattern, region, region.cardinality()))
    return tuple(cells)


# --- exact integer packing over miss patterns ---------------------------------
#
# For a fixed candidate family T, elements outside the common intersection
# of T each miss a nonempty subset of T; a witness prefix may spend at most
# ``n`` misses per member of T.  The per-T optimum is therefore an integer
# packing: maximize the number of tokens, each token consuming one unit of
# budget at every index in its pattern, subject to per-pattern capacities.


def _pairs_triangle(r1: int, r2: int, r3: int) -> int:
    # max v12+v13+v23 with pairwise loads bounded by r; verified by brute
    # force in the tests
    return min((r1 + r2 + r3) // 2, r1 + r2, r1 + r3, r2 + r3)


def _pack_unbounded(patterns: frozenset[frozenset], budgets: dict[int, int]) -> int:
    """Exact packing when every pattern here has unlimited capacity.

    ``patterns`` is an antichain (supersets of another unlimited pattern
    are dominated and must be dropped by the caller).
    """
    if not patterns:
        return 0
    singles = [p for p in patterns if len(p) == 1]
    if singles:
        # A token on a superset of {h} can always be moved down to {h},
        # freeing the other budgets, so {h} soaks up its whole budget.
        h = next(iter(singles[0]))
        rest = frozenset(p for p in patterns if h not in p)
        remaining = {k: v for k, v in budgets.items() if k != h}
        return budgets[h] + _pack_unbounded(rest, remaining)
    support = sorted({h for p in patterns for h in p})
    if len(support) == 2:
        # only the pattern {h1, h2} is possible here
        return min(budgets[h] for h in support)
    if len(support) == 3:
        if frozenset(support) in patterns:
            # an antichain containing the triple is the triple alone
            return min(budgets[h] for h in support)
        pairs = sorted(patterns, key=sorted)
        if len(pairs) == 2:
            (shared,) = set(pairs[0]) & set(pairs[1])
            others = [h for h in support if h != shared]
            return min(budgets[shared], sum(budgets[h] for h in others))
        return _pairs_triangle(*(budgets[h] for h in support))
    # Rare shape (four or more indices, no singletons): bounded search.
    return _pack_search(tuple(sorted(patterns, key=sorted)),
                        {p: min(budgets[h] for h in p) for p in patterns},
                        budgets)


def _pack_search(order, caps, budgets) -> int:
    """Plain depth-first exact search, used off the structured fast paths."""
    best = 0

    def rec(i: int, total: int, budgets: dict[int, int]) -> None:
        nonlocal best
        if total + sum(budgets.values()) <= best:
            return
        if i == len(order):
            best = max(best, total)
            return
        p = order[i]
        hi = min(caps[p], *(budgets[h] for h in p))
        for v in range(hi, -1, -1):
            if v:
                rec(i + 1, total + v,
                    {h: (b - v if h in p else b) for h, b in budgets.items()})
            else:
                rec(i + 1, total, budgets)
    rec(0, 0, dict(budgets))
    return best


def _pack(caps: dict[frozenset, int | float],
          budgets: dict[int, int]) -> int:
    """Exact maximum token count for miss-pattern capacities.

    Finite-capacity patterns are exhausted by search (capacities are tiny
    in practice: they are sizes of finite cells); the unlimited remainder
    has closed forms.
    """
    caps = {p: cap for p, cap in caps.items() if cap and p}
    if not caps or any(b < 0 for b in budgets.values()):
        return 0
    unlimited = {p for p, cap in caps.items() if cap == INFINITE}
    # unlimited patterns dominated by an unlimited subset never help:
    # a token always moves down to the subset, freeing budget
    minimal = frozenset(p for p in unlimited
                        if not any(q < p for q in unlimited))
    finite = [(p, int(cap)) for p, cap in caps.items() if cap != INFINITE]
    best = 0

    def rec(i: int, total: int, budgets: dict[int, int]) -> None:
        nonlocal best
        if i == len(finite):
            score = total + _pack_unbounded(
                frozenset(p for p in minimal
                          if all(budgets[h] > 0 for h in p)),
                budgets)
            best = max(best, score)
            return
        if total + sum(budgets.values()) <= best:
            return
        p, cap = finite[i]
        hi = min([cap] + [budgets[h] for h in p])
        for v in range(hi, -1, -1):
            rec(i + 1, total + v,
                {h: (b - v if h in p else b) for h, b in budgets.items()})

    rec(0, 0, dict(budgets))
    return best


def _pack_uniform(caps: dict[frozenset, int | float], n: int) -> int:
    if n <= 0:
        return 0
    indexes = {h for p in caps for h in p}
    return _pack(caps, {h: n for h in indexes})


# --- exact dimension -----------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _subset_intersections(c: FiniteClass) -> dict[frozenset, int | float]:
    """Size of the support intersection of every nonempty index subset."""
    _check_cell_limit(c, CELL_LIMIT)
    sets: dict[frozenset, CountableSet] = {}
    sizes: dict[frozenset, int | float] = {}
    for mask in range(1, 2 ** c.size):
        idx = frozenset(i for i in range(c.size) if mask >> i & 1)
        low = mask & (mask - 1)
        i = (mask ^ low).bit_length() - 1
        s = c.hypotheses[i].support
        if low:
            s = sets[frozenset(j for j in range(c.size) if low >> j & 1)] & s
        sets[idx] = s
        sizes[idx] = s.cardinality()
    return sizes


def d_max(c: FiniteClass) -> int:
    """Largest finite support-intersection size over nonempty subsets."""
    finite = [v for v in _subset_intersections(c).values() if v != INFINITE]
    return int(max(finite)) if finite else 0


def _miss_caps(c: FiniteClass, T: frozenset) -> dict[frozenset, int | float]:
    """Capacities of the T-miss patterns, aggregated from the cells."""
    caps: dict[frozenset, int | float] = {}
    for cell in cell_decomposition(c):
        missed = _miss_set(c, cell, T)
        if not missed:
            continue  # inside the common intersection of T: counted as base
        prev = caps.get(missed, 0)
        caps[missed] = (INFINITE if INFINITE in (prev, cell.size)
                        else prev + cell.size)
    return caps


@functools.lru_cache(maxsize=None)
def _nc_exact_detail(c: FiniteClass, n: int) -> tuple[int, frozenset | None]:
    """(exact dimension value, winning candidate family indexes or None)."""
    if c.size == 0:
        return 0, None
    _check_cell_limit(c, CELL_LIMIT)
    sizes = _subset_intersections(c)
    best, best_T = 0, None
    for mask in range(1, 2 ** c.size):
        T = frozenset(i for i in range(c.size) if mask >> i & 1)
        base = sizes[T]
        if base == INFINITE:
            continue
        total = int(base) + _pack_uniform(_miss_caps(c, T), n)
        if total > best:
            best, best_T = total, T
    return best, best_T


def nc_dim_exact(c: FiniteClass, n: int) -> DimValue:
    """Exact noisy closure dimension of a finite class at noise level ``n``.

    Finite classes always have a finite value: with ``q`` hypotheses and
    ``d`` the largest finite subset-intersection size, every witness
    spends at most ``n`` misses per consistent hypothesis, so the value
    stays below ``n*q + d + 1``.
    """
    value, _ = _nc_exact_detail(c, n)
    return DimValue.finite(value)


def _miss_set(c: FiniteClass, cell: Cell, T: frozenset) -> frozenset:
    pattern_idx = frozenset(i for i in range(c.size)
                            if c.hypotheses[i].id in cell.pattern)
    return T - pattern_idx


def nc_witness_vector(c: FiniteClass, n: int, total: int) -> list[int] | None:
    """Per-cell counts of a witness with ``total`` distinct elements.

    Deterministic: the winning candidate family is the first maximizer in
    subset order and the vector is the lexicographically smallest one (in
    cell order) that reaches ``total`` for it.
    """
    value, T = _nc_exact_detail(c, n)
    if total > value or total < 1 or T is None:
        return None
    cells = cell_decomposition(c)

    def achievable(fixed: list[int], want: int) -> bool:
        budgets = {h: n for h in T}
        for count, cell in zip(fixed, cells):
            for h in _miss_set(c, cell, T):
                budgets[h] -= count
                if budgets[h] < 0:
                    return False
        caps: dict[frozenset, int | float] = {}
        headroom = 0
        for cell in cells[len(fixed):]:
            missed = _miss_set(c, cell, T)
            if missed:
                prev = caps.get(missed, 0)
                caps[missed] = (INFINITE if INFINITE in (prev, cell.size)
                                else prev + cell.size)
            else:
                headroom += cell.size  # inside the finite common intersection
        return headroom + _pack(caps, budgets) >= want

    vector: list[int] = []
    remaining = total
    for cell in cells:
        cap = int(min(cell.size, remaining))
        for v in range(cap + 1):
            if achievable(vector + [v], remaining - v):
                vector.append(v)
                remaining -= v
                break
        else:
            return None
    return vector if remaining == 0 else None


def realize_witness(c: FiniteClass, n: int, total: int) -> list[int] | None:
    """Distinct elements witnessing dimension >= total, or None."""
    vector = nc_witness_vector(c, n, total)
    if vector is None:
        return None
    cells = cell_decomposition(c)
    out: list[int] = []
    for count, cell in zip(vector, cells):
        out.extend(cell.region.enumerate(count))
    return out


# --- brute-force oracle ---------------------------------------------------------


def _compositions(total: int, caps: list[int | float]):
    """All count vectors over the caps summing to ``total``."""
    if not caps:
        if total == 0:
            yield []
        return
    hi = int(min(caps[0], total))
    for v in range(hi + 1):
        for rest in _compositions(total - v, caps[1:]):
            yield [v] + rest


def nc_dim_oracle(c: FiniteClass, n: int, bound: int) -> DimValue:
    """Brute-force dimension search, straight off the definition.

    Enumerates count vectors over the cells, realizes distinct elements,
    and evaluates the closure directly.  Witness prefixes are downward
    closed (dropping an element grows the consistent family and shrinks
    the closure, preserving nonemptiness and finiteness), so the first
    witness-free length settles the exact value; a witness at ``bound``
    only certifies a lower bound.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if c.size == 0:
        return DimValue.finite(0)
    cells = cell_decomposition(c)
    caps = [cell.size for cell in cells]
    cache: dict[frozenset, bool] = {}

    def witnessed(vector) -> bool:
        elements: list[int] = []
        for count, cell in zip(vector, cells):
            elements.extend(cell.region.enumerate(count))
        family = consistent_family(c, elements, n)
        key = frozenset(h.id for h in family)
        if key not in cache:
            cl = closure(c, elements, n)
            cache[key] = cl is not BOT and cl.is_finite()
        return cache[key]

    best = 0
    for d in range(1, bound + 1):
        if not any(witnessed(v) for v in _compositions(d, caps)):
            return DimValue.finite(best)
        best = d
    return DimValue.at_least(bound)


# --- budgeted computation and derived quantities --------------------------------


def nc_dim_budgeted(c: HypothesisClass, n: int, budget: int) -> DimValue:
    """Dimension by witness search up to ``budget`` distinct elements.

    Finite classes defer to the exact computation.  An indexed family must
    ship a canonical witness schedule; witnesses along the schedule are
    nested, so the largest witnessed length is found by descending search.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if isinstance(c, FiniteClass):
        return nc_dim_exact(c, n)
    if c.witness_schedule is None:
        raise ValueError(f"family {c.name!r} has no witness schedule")
    for d in range(budget, 0, -1):
        cl = closure(c, c.witness_schedule(d), n)
        if cl is not BOT and cl.is_finite():
            return DimValue.at_least(d)
    return DimValue.finite(0)


def closure_dim(c: HypothesisClass, budget: int = 16) -> DimValue:
    """Dimension of the noiseless closure operator (noise level zero)."""
    if isinstance(c, FiniteClass):
        return nc_dim_exact(c, 0)
    return nc_dim_budgeted(c, 0, budget)


def nc_witness(c: HypothesisClass, n: int, d: int) -> list[int] | None:
    """Some ``d`` distinct elements with nonempty family and finite closure."""
    if isinstance(c, FiniteClass):
        return realize_witness(c, n, d)
    if c.witness_schedule is None:
        return None
    prefix = c.witness_schedule(d)
    cl = closure(c, prefix, n)
    if cl is not BOT and cl.is_finite():
        return prefix
    return None


def sup_gap_check(c: FiniteClass, n_max: int) -> DimValue:
    """Largest value of (dimension at level n) - n over ``n <= n_max``.

    Exact per level.  Reported as finite only when the maximizing family
    and the per-level increment stabilize across two probe levels beyond
    ``n_max`` with increments at most one per level (then the gap can
    never grow again); otherwise the result is a lower bound.
    """
    details = {n: _nc_exact_detail(c, n) for n in range(n_max + 3)}
    gap = max(details[n][0] - n for n in range(n_max + 1))
    values = [details[n][0] for n in range(n_max + 3)]
    teams = [details[n][1] for n in range(n_max + 3)]
    deltas = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    stabilized = (len(set(teams[-3:])) == 1 and deltas[-1] == deltas[-2]
                  and deltas[-1] <= 1)
    return DimValue.finite(gap) if stabilized else DimValue.at_least(gap)


def cor_bound(c: FiniteClass, n: int) -> int:
    """Strict upper bound ``n*q + d + 1`` on the level-``n`` dimension."""
    return n * c.size + d_max(c) + 1
