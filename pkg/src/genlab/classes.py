"""Hypothesis classes: representations, built-ins, and the class-spec format.

A hypothesis is an id plus an infinite support (every class here satisfies
the uniformly-unbounded-support requirement: no support is finite, so
fresh positive examples can never run out).  Classes come in two shapes:

* :class:`FiniteClass` -- an explicit list of hypotheses;
* :class:`IndexedFamily` -- a countable family ``h_1, h_2, ...`` exposed
  through symbolic hooks: per-index supports, per-prefix misfit counts
  (which indices miss how many of the observed elements -- always a
  finite map), and a closed form for the intersection of all supports
  outside a finite index set.

Class-spec documents are JSON, one document per file; see
:func:`parse_class_spec` for the schema.
"""

from __future__ import annotations

import functools
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import (
    DuplicateId,
    EmptyClass,
    MismatchedUniverse,
    ParseError,
    UnknownBuiltin,
    UUSViolation,
)
from .setalg import (
    INFINITE,
    CountableSet,
    Universe,
    atom_of,
    is_element,
    make_set,
    pair,
    unpair,
)


@dataclass(frozen=True)
class Hypothesis:
    id: str
    support: CountableSet

    def __post_init__(self) -> None:
        if self.support.is_finite():
            raise UUSViolation(
                f"hypothesis {self.id!r} has a finite support "
                f"(size {self.support.cardinality()})")


@dataclass(frozen=True)
class FiniteClass:
    """An explicit finite list of hypotheses over one universe."""

    name: str
    universe: Universe
    hypotheses: tuple[Hypothesis, ...]
    groups: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self) -> None:
        ids = [h.id for h in self.hypotheses]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise DuplicateId(f"duplicate hypothesis ids: {dup}")
        for h in self.hypotheses:
            if h.support.universe != self.universe:
                raise MismatchedUniverse(
                    f"hypothesis {h.id!r} lives in a different universe")
        known = set(ids)
        for gname, members in self.groups:
            for m in members:
                if m not in known:
                    raise ParseError(f"group {gname!r} references unknown id {m!r}")

    @property
    def size(self) -> int:
        return len(self.hypotheses)

    def ids(self) -> tuple[str, ...]:
        return tuple(h.id for h in self.hypotheses)

    def get(self, hyp_id: str) -> Hypothesis:
        for h in self.hypotheses:
            if h.id == hyp_id:
                return h
        raise KeyError(hyp_id)

    def restrict(self, ids: Iterable[str], name: str | None = None) -> "FiniteClass":
        wanted = list(ids)
        hyps = tuple(self.get(i) for i in wanted)
        return FiniteClass(name or f"{self.name}|{','.join(wanted)}",
                           self.universe, hyps)

    def group_classes(self) -> list[tuple[str, "FiniteClass"]]:
        """One sub-class per declared group; singletons when none declared."""
        if self.groups:
            return [(g, self.restrict(members, name=f"{self.name}:{g}"))
                    for g, members in self.groups]
        return [(h.id, self.restrict([h.id], name=f"{self.name}:{h.id}"))
                for h in self.hypotheses]


@dataclass(frozen=True, eq=False)
class IndexedFamily:
    """A countable family ``h_1, h_2, ...`` given by symbolic hooks.

    ``misfits(elements)`` returns, for a set of distinct observed
    elements, the finite map {index: number of those elements outside
    support_at(index)}; indices absent from the map miss nothing.
    ``cofinite_intersection(excluded)`` is the intersection of
    ``support_at(i)`` over every ``i`` outside the finite ``excluded``
    set, in closed form.

    Optional hooks: ``nc_formula(n)`` / ``prefix_nc(i, n)`` give exact
    dimension values (an ``int`` or ``math.inf``) for the family and its
    prefix classes, and ``witness_schedule(d)`` names the canonical
    length-``d`` prefix that budgeted dimension search probes.
    """

    name: str
    universe: Universe
    support_at: Callable[[int], CountableSet]
    misfits: Callable[[frozenset[int]], dict[int, int]]
    cofinite_intersection: Callable[[frozenset[int]], CountableSet]
    id_prefix: str = "h"
    nc_formula: Callable[[int], int | float] | None = None
    prefix_nc: Callable[[int, int], int | float] | None = None
    witness_schedule: Callable[[int], list[int]] | None = None
    support_union: CountableSet | None = None

    def hypothesis_id(self, index: int) -> str:
        return f"{self.id_prefix}{index}"

    def index_of(self, hyp_id: str) -> int:
        if not hyp_id.startswith(self.id_prefix):
            raise KeyError(hyp_id)
        try:
            index = int(hyp_id[len(self.id_prefix):])
        except ValueError:
            raise KeyError(hyp_id) from None
        if index < 1:
            raise KeyError(hyp_id)
        return index

    def hypothesis(self, index: int) -> Hypothesis:
        return Hypothesis(self.hypothesis_id(index), self.support_at(index))

    def get(self, hyp_id: str) -> Hypothesis:
        return self.hypothesis(self.index_of(hyp_id))

    def prefix(self, n: int) -> FiniteClass:
        """The finite class of the first ``n`` members."""
        hyps = tuple(self.hypothesis(i) for i in range(1, n + 1))
        return FiniteClass(f"{self.name}[:{n}]", self.universe, hyps)


HypothesisClass = FiniteClass | IndexedFamily


def common_intersection(c: FiniteClass) -> CountableSet:
    """Intersection of the supports of every hypothesis in the class."""
    if c.size == 0:
        raise EmptyClass("common intersection of an empty class is undefined")
    result = c.hypotheses[0].support
    for h in c.hypotheses[1:]:
        result = result & h.support
    return result


# --- built-in classes --------------------------------------------------------

PARITY_UNIVERSE = Universe(((1, "E"), (2, "O")), name="parity")
PRIME_POWERS_UNIVERSE = Universe(((1, "P"),), name="prime_powers")
UNION_DEMO_UNIVERSE = Universe(
    ((1, "E"), (2, "O"), (3, "S3"), (4, "S4")), name="union_demo")

BUILTIN_NAMES = ("parity", "prime_powers", "union_demo")


def _parity() -> FiniteClass:
    u = PARITY_UNIVERSE
    return FiniteClass("parity", u, (
        Hypothesis("h_e", u.atom_set(1)),
        Hypothesis("h_o", u.atom_set(2)),
    ))


def _prime_powers() -> IndexedFamily:
    # Atom 1 plays the ground sequence p_1, p_2, ...; atom 1 + i plays the
    # tail set attached to the i-th ground element.  Member i keeps every
    # ground element except the i-th and every tail set except its own.
    u = PRIME_POWERS_UNIVERSE

    @functools.lru_cache(maxsize=None)
    def support_at(i: int) -> CountableSet:
        if i < 1:
            raise IndexError(i)
        return make_set(u, cofinite_excluding=[1 + i], minus=[pair(1, i - 1)])

    def misfits(elements: frozenset[int]) -> dict[int, int]:
        counts: dict[int, int] = {}
        for x in elements:
            a, j = unpair(x)
            idx = j + 1 if a == 1 else a - 1
            counts[idx] = counts.get(idx, 0) + 1
        return counts

    def cofinite_intersection(excluded: frozenset[int]) -> CountableSet:
        # Index i contributes its own ground element and its own tail atom
        # to the intersection of everyone else's supports.
        return make_set(u,
                        include_atoms=[1 + i for i in excluded],
                        plus=[pair(1, i - 1) for i in excluded])

    def witness_schedule(d: int) -> list[int]:
        return [pair(1, j) for j in range(d)]

    return IndexedFamily(
        name="prime_powers",
        universe=u,
        support_at=support_at,
        misfits=misfits,
        cofinite_intersection=cofinite_intersection,
        id_prefix="h_p",
        nc_formula=lambda n: 0 if n == 0 else INFINITE,
        prefix_nc=lambda i, n: 0,
        witness_schedule=witness_schedule,
        support_union=u.full_set(),
    )


def _union_demo() -> FiniteClass:
    u = UNION_DEMO_UNIVERSE
    return FiniteClass("union_demo", u, (
        Hypothesis("h_e1", u.atom_set(1, 3)),
        Hypothesis("h_e2", u.atom_set(1, 4)),
        Hypothesis("h_o1", u.atom_set(2, 3)),
        Hypothesis("h_o2", u.atom_set(2, 4)),
    ), groups=(("g1", ("h_e1", "h_e2")), ("g2", ("h_o1", "h_o2"))))


@functools.lru_cache(maxsize=None)
def builtin(name: str) -> HypothesisClass:
    if name == "parity":
        return _parity()
    if name == "prime_powers":
        return _prime_powers()
    if name == "union_demo":
        return _union_demo()
    raise UnknownBuiltin(f"no built-in class named {name!r}; "
                         f"known: {', '.join(BUILTIN_NAMES)}")


def random_finite_class(seed: int, q: int, num_atoms: int) -> FiniteClass:
    """Seed-deterministic random class; every support includes an atom."""
    if q < 1 or num_atoms < 1:
        raise ValueError("q and num_atoms must be >= 1")
    rng = random.Random(seed)
    universe = Universe(tuple((i, f"A{i}") for i in range(1, num_atoms + 1)),
                        name=f"rand{seed}")
    all_atoms = list(range(1, num_atoms + 1))
    hyps = []
    for k in range(1, q + 1):
        included = sorted(rng.sample(all_atoms, rng.randint(1, num_atoms)))
        excluded = [a for a in all_atoms if a not in included]
        minus = [pair(rng.choice(included), rng.randint(0, 4))
                 for _ in range(rng.randint(0, 2))]
        plus = ([pair(rng.choice(excluded), rng.randint(0, 4))
                 for _ in range(rng.randint(0, 2))] if excluded else [])
        support = make_set(universe, include_atoms=included,
                           minus=minus, plus=plus)
        hyps.append(Hypothesis(f"h{k}", support))
    return FiniteClass(f"rand{seed}", universe, tuple(hyps))


# --- class-spec file format --------------------------------------------------

def _parse_support(universe: Universe, declared: frozenset[int],
                   doc, where: str) -> CountableSet:
    if not isinstance(doc, dict) or "include_atoms" not in doc:
        raise ParseError(f"{where}: support must carry include_atoms")
    sel = doc["include_atoms"]
    if isinstance(sel, dict) and set(sel) == {"finite"}:
        include, cofinite = sel["finite"], None
    elif isinstance(sel, dict) and set(sel) == {"cofinite_excluding"}:
        include, cofinite = (), sel["cofinite_excluding"]
    else:
        raise ParseError(f"{where}: include_atoms must be "
                         "{'finite': [...]} or {'cofinite_excluding': [...]}")
    referenced = set(include or ()) | set(cofinite or ())
    minus = doc.get("minus", [])
    plus = doc.get("plus", [])
    for code in list(minus) + list(plus):
        if not isinstance(code, int) or code < 0:
            raise ParseError(f"{where}: element codes must be naturals")
        if not is_element(code):
            raise ParseError(f"{where}: code {code} lies in no atom")
        referenced.add(atom_of(code))
    undeclared = referenced - declared
    if undeclared:
        raise ParseError(f"{where}: undeclared atoms {sorted(undeclared)}")
    try:
        return make_set(universe, include_atoms=include,
                        cofinite_excluding=cofinite, minus=minus, plus=plus)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def parse_class_spec(text: str) -> HypothesisClass:
    """Parse one class-spec document.

    Schema (JSON, one object per file)::

        {"name": str?,                      # default "class"
         "atoms": [{"id": int, "label": str}, ...],
         "closed_universe": bool?,          # default false (open universe)
         "kind": "finite" | "indexed:prime_powers" | <built-in name>,
         "hypotheses": [{"id": str, "support": {
             "include_atoms": {"finite": [ids]} | {"cofinite_excluding": [ids]},
             "minus": [codes], "plus": [codes]}}, ...],
         "groups": {name: [hypothesis ids], ...}?}

    Atom references anywhere in the document must appear in the ``atoms``
    table.  Every declared support must be infinite.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document root must be an object")
    for key in ("atoms", "kind"):
        if key not in doc:
            raise ParseError(f"missing required key {key!r}")

    atoms = []
    for entry in doc["atoms"]:
        if not isinstance(entry, dict) or set(entry) != {"id", "label"}:
            raise ParseError("atoms entries must be {'id': ..., 'label': ...}")
        atoms.append((entry["id"], entry["label"]))
    try:
        universe = Universe(tuple(atoms), closed=bool(doc.get("closed_universe", False)),
                            name=doc.get("name", "class"))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc

    kind = doc["kind"]
    if kind == "indexed:prime_powers":
        return builtin("prime_powers")
    if kind in BUILTIN_NAMES:
        return builtin(kind)
    if kind != "finite":
        raise ParseError(f"unknown kind {kind!r}")

    declared = universe.declared_ids
    hyps = []
    for i, h in enumerate(doc.get("hypotheses", [])):
        if not isinstance(h, dict) or "id" not in h or "support" not in h:
            raise ParseError(f"hypothesis #{i}: need 'id' and 'support'")
        support = _parse_support(universe, declared, h["support"],
                                 f"hypothesis {h['id']!r}")
        hyps.append(Hypothesis(h["id"], support))

    groups = tuple(sorted(
        (gname, tuple(members))
        for gname, members in doc.get("groups", {}).items()))
    return FiniteClass(doc.get("name", "class"), universe, tuple(hyps), groups)


def serialize_class_spec(c: FiniteClass) -> str:
    """Render a finite class back into the class-spec format."""
    def support_doc(s: CountableSet):
        sel = ({"cofinite_excluding": sorted(s.atom_ids)} if s.cofinite
               else {"finite": sorted(s.atom_ids)})
        return {"include_atoms": sel,
                "minus": sorted(s.minus), "plus": sorted(s.plus)}

    doc = {
        "name": c.name,
        "atoms": [{"id": a, "label": lbl} for a, lbl in c.universe.atoms],
        "closed_universe": c.universe.closed,
        "kind": "finite",
        "hypotheses": [{"id": h.id, "support": support_doc(h.support)}
                       for h in c.hypotheses],
        "groups": {g: list(members) for g, members in c.groups},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
