"""Set algebra: pairing codec, normal forms, and agreement with brute force."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genlab.errors import MismatchedUniverse
from genlab.setalg import (
    INFINITE,
    CountableSet,
    Universe,
    atom_of,
    is_element,
    make_set,
    pair,
    rank_of,
    scan_bound,
    unpair,
)

OPEN = Universe(((1, "E"), (2, "O")), name="open2")
CLOSED = Universe(((1, "E"), (2, "O")), closed=True, name="closed2")


# --- pairing codec ----------------------------------------------------------

def test_pair_forced_values():
    assert [pair(1, j) for j in range(3)] == [1, 4, 8]
    assert pair(2, 0) == 3


def test_unpair_roundtrip_is_total_and_injective():
    seen = {}
    for code in range(2000):
        a, j = unpair(code)
        assert pair(a, j) == code
        assert (a, j) not in seen
        seen[(a, j)] = code


def test_atoms_are_disjoint_columns():
    col1 = {pair(1, j) for j in range(50)}
    col2 = {pair(2, j) for j in range(50)}
    assert not col1 & col2
    assert all(atom_of(c) == 1 for c in col1)


def test_diagonal_codes_are_not_elements():
    assert not is_element(0)
    assert not is_element(2)
    assert is_element(1)
    assert rank_of(8) == 2


# --- membership -------------------------------------------------------------

def test_member_included_atom():
    s = OPEN.atom_set(1)
    assert pair(1, 3) in s


def test_member_explicit_exclusion():
    s = make_set(OPEN, include_atoms=[1], minus=[pair(1, 0)])
    assert pair(1, 0) not in s
    assert pair(1, 1) in s


def test_member_explicit_inclusion():
    s = make_set(OPEN, plus=[pair(2, 5)])
    assert pair(2, 5) in s
    assert pair(2, 4) not in s


# --- intersection / union ---------------------------------------------------

def test_intersect_disjoint_atom_algebra():
    u = Universe(((1, "a"), (2, "b"), (3, "c")), name="u3")
    s = u.atom_set(1, 2) & u.atom_set(2, 3)
    assert s == u.atom_set(2)


def test_intersect_exceptional_codes():
    s1 = make_set(OPEN, include_atoms=[1], minus=[pair(1, 0)])
    s2 = make_set(OPEN, include_atoms=[1], plus=[pair(2, 0)])
    expected = make_set(OPEN, include_atoms=[1], minus=[pair(1, 0)])
    got = s1 & s2
    assert got == expected
    for code in range(200):
        assert (code in got) == ((code in s1) and (code in s2))


def test_intersect_cofinite_complement_law():
    got = OPEN.cofinite_atom_set([1]) & OPEN.cofinite_atom_set([2])
    assert got == OPEN.cofinite_atom_set([1, 2])


def test_union_atoms():
    assert OPEN.atom_set(1) | OPEN.atom_set(2) == OPEN.atom_set(1, 2)


def test_union_absorbs_contained_singleton():
    s = make_set(OPEN, plus=[pair(1, 1)]) | OPEN.atom_set(1)
    assert s == OPEN.atom_set(1)


def test_union_cancels_exclusion():
    s = make_set(OPEN, include_atoms=[1], minus=[pair(1, 2)])
    t = make_set(OPEN, plus=[pair(1, 2)])
    assert s | t == OPEN.atom_set(1)


def test_mismatched_universe_rejected():
    with pytest.raises(MismatchedUniverse):
        OPEN.atom_set(1) & CLOSED.atom_set(1)


# --- cardinality ------------------------------------------------------------

def test_cardinality_atom_infinite():
    assert OPEN.atom_set(1).cardinality() == INFINITE


def test_cardinality_empty():
    assert OPEN.empty_set().cardinality() == 0


def test_cardinality_counts_plus():
    s = make_set(OPEN, plus=[pair(1, 0), pair(2, 0)])
    assert s.cardinality() == 2


def test_cofinite_over_closed_universe_normalizes_to_finite():
    s = CLOSED.cofinite_atom_set([1])
    assert not s.cofinite
    assert s.atom_ids == frozenset({2})


# --- enumeration ------------------------------------------------------------

def test_enumerate_atom_prefix():
    assert OPEN.atom_set(1).enumerate(3) == [1, 4, 8]


def test_enumerate_exhausts_finite_set():
    s = make_set(OPEN, plus=[7, 3])
    assert s.enumerate(5) == [3, 7]


def test_enumerate_two_atoms_with_exclusion():
    s = make_set(OPEN, include_atoms=[1, 2], minus=[1])
    # brute-force scan of ascending codes
    expected = [c for c in range(200) if c in s][:2]
    assert s.enumerate(2) == expected


def test_enumerate_cofinite_skips_excluded_atoms():
    s = OPEN.cofinite_atom_set([1])
    got = s.enumerate(5)
    assert got == [c for c in range(100) if c in s][:5]
    assert all(atom_of(c) != 1 for c in got)


def test_cardinality_contract_with_enumerate():
    s = make_set(OPEN, plus=[3, 7, 12])
    k = s.cardinality()
    assert len(s.enumerate(k + 1)) == k
    inf = OPEN.atom_set(2)
    for k in (1, 5, 20):
        assert len(inf.enumerate(k)) == k


# --- brute-force oracle -----------------------------------------------------

def _random_set(rng: random.Random, universe: Universe) -> CountableSet:
    ids = universe.declared_ids
    if rng.random() < 0.5 and not universe.closed:
        kwargs = {"cofinite_excluding": rng.sample(sorted(ids), rng.randint(0, len(ids)))}
    else:
        kwargs = {"include_atoms": rng.sample(sorted(ids), rng.randint(0, len(ids)))}
    s = make_set(universe, **kwargs)
    # sprinkle exceptional codes via the algebra so the result stays canonical
    for _ in range(rng.randint(0, 3)):
        code = pair(rng.choice(sorted(ids)), rng.randint(0, 5))
        single = make_set(universe, plus=[code])
        s = (s | single) if rng.random() < 0.5 else (s - single)
    return s


def _brute_members(s: CountableSet, bound: int) -> set[int]:
    """Expand included atoms up to ``bound`` and apply minus/plus explicitly."""
    out = set()
    for a in s.universe.iter_atom_ids():
        if pair(a, 0) >= bound:
            break
        if (a in s.atom_ids) != s.cofinite:
            j = 0
            while pair(a, j) < bound:
                out.add(pair(a, j))
                j += 1
    out -= set(s.minus)
    out |= {c for c in s.plus if c < bound}
    return out


@pytest.mark.parametrize("seed", range(12))
def test_member_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    universe = CLOSED if seed % 3 == 0 else OPEN
    s = _random_set(rng, universe)
    bound = 400
    brute = _brute_members(s, bound)
    for code in range(bound):
        assert (code in s) == (code in brute), (s, code)


def test_default_scan_bound_and_env_override(monkeypatch):
    monkeypatch.delenv("GENLAB_SCAN_BOUND", raising=False)
    assert scan_bound() == 10_000
    monkeypatch.setenv("GENLAB_SCAN_BOUND", "123")
    assert scan_bound() == 123


def test_member_agrees_with_brute_force_at_scan_bound(monkeypatch):
    monkeypatch.delenv("GENLAB_SCAN_BOUND", raising=False)
    rng = random.Random(99)
    s = _random_set(rng, OPEN)
    bound = scan_bound()
    brute = _brute_members(s, bound)
    hits = [c for c in range(bound) if c in s]
    assert hits == sorted(brute)


# --- algebraic properties ---------------------------------------------------

sets_strategy = st.integers(min_value=0, max_value=10_000).map(
    lambda seed: _random_set(random.Random(seed), OPEN))


@given(sets_strategy, sets_strategy)
@settings(max_examples=40, deadline=None)
def test_intersect_commutative_extensionally(s1, s2):
    a, b = s1 & s2, s2 & s1
    for code in range(150):
        assert (code in a) == (code in b)


@given(sets_strategy, sets_strategy, sets_strategy)
@settings(max_examples=25, deadline=None)
def test_intersect_associative_extensionally(s1, s2, s3):
    a, b = (s1 & s2) & s3, s1 & (s2 & s3)
    for code in range(150):
        assert (code in a) == (code in b)


@given(sets_strategy)
@settings(max_examples=25, deadline=None)
def test_intersect_idempotent(s):
    assert s & s == s


@given(sets_strategy, sets_strategy)
@settings(max_examples=40, deadline=None)
def test_operations_preserve_canonical_form(s1, s2):
    for result in (s1 & s2, s1 | s2, s1 - s2):
        assert result.minus.isdisjoint(result.plus)
        for m in result.minus:
            assert result._atom_included(atom_of(m))
        for p in result.plus:
            assert not result._atom_included(atom_of(p)) or p in result.minus
        # re-canonicalizing is the identity
        rebuilt = make_set(result.universe,
                           include_atoms=() if result.cofinite else result.atom_ids,
                           cofinite_excluding=result.atom_ids if result.cofinite else None,
                           minus=result.minus, plus=result.plus)
        assert rebuilt == result


@given(sets_strategy, sets_strategy)
@settings(max_examples=40, deadline=None)
def test_difference_semantics(s1, s2):
    d = s1 - s2
    for code in range(150):
        assert (code in d) == ((code in s1) and code not in s2)


def test_enumerate_is_sorted_and_member_consistent():
    rng = random.Random(5)
    for _ in range(10):
        s = _random_set(rng, OPEN)
        prefix = s.enumerate(25)
        assert prefix == sorted(prefix)
        assert all(x in s for x in prefix)
