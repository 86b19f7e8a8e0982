"""
Indexing systems of admissible sets

An IndexingSystem records, for each conjugacy class of subgroups H, which
orbits H/K are admissible. A general H-set is admissible exactly when all of
its orbits are. Pairs are stored canonically: H is the G-class representative
and K the representative of its H-class.

validate() checks the seven closure axioms directly with G-set operations.
generate() computes closures by forward chaining over implication tables
that are built once per group; enumerate_all() walks the poset of systems by
adding one norm at a time.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from config import DEFAULT_CONFIG, EngineConfig
from errors import (
    CapExceededError,
    GroupMismatchError,
    InadmissibleError,
    InputError,
    NotASubgroupError,
)
from group_core import FiniteGroup, Permutation, Subgroup, SubgroupLattice, make_group, subgroups
from gsets import (
    GSet,
    all_gsets,
    conjugate_gset,
    coproduct,
    induce,
    orbit,
    product,
    realize,
    restrict,
    sub_gsets,
)

logger = logging.getLogger(__name__)

Pair = Tuple[Subgroup, Subgroup]

AXIOMS = (
    "trivial-sets",
    "truncation",
    "coproduct-closure",
    "restriction-functoriality",
    "conjugation",
    "self-induction",
    "cartesian-product",
)

# Rule families applied by generate(); truncation and coproducts add nothing
# beyond what orbitwise storage already records.
DEFAULT_RULE_ORDER = ("conjugation", "restriction", "truncation", "self-induction", "product")


def canonical_pair(lattice: SubgroupLattice, h: Subgroup, k: Subgroup) -> Pair:
    """Move (H, K) to (G-class representative of H, class representative of K inside it)"""
    if not k.member_set <= h.member_set:
        raise NotASubgroupError(f"{lattice.label(k)} is not contained in {lattice.label(h)}")
    g = lattice.witness_to_representative(h)
    h_rep = lattice.conjugate(h, g)
    k_conj = lattice.conjugate(k, g)
    return h_rep, lattice.representative_within(h_rep, k_conj)


@lru_cache(maxsize=None)
def candidate_pairs(group: FiniteGroup) -> Tuple[Pair, ...]:
    """Every canonical (H, K), H over G-class representatives, in lattice order"""
    lattice = subgroups(group)
    pairs = []
    for h in lattice.representatives():
        for k in lattice.classes_within(h):
            pairs.append((h, k))
    return tuple(pairs)


def _pair_key(lattice: SubgroupLattice, pair: Pair) -> Tuple[int, int]:
    return lattice.index(pair[0]), lattice.index(pair[1])


@dataclass(frozen=True)
class IndexingSystem:
    """Admissible orbits H/K as a set of canonical (H, K) pairs"""
    group: FiniteGroup
    admissible: FrozenSet[Pair]
    name: Optional[str] = field(default=None, compare=False)

    @property
    def lattice(self) -> SubgroupLattice:
        return subgroups(self.group)

    def admits(self, h: Subgroup, k: Subgroup) -> bool:
        """Is the orbit H/K admissible (H, K any subgroups with K <= H)"""
        return canonical_pair(self.lattice, h, k) in self.admissible

    def admits_gset(self, t: GSet) -> bool:
        """Orbitwise admissibility; the empty set is admissible"""
        return all(self.admits(t.level, k) for k, _ in t.counts)

    def pairs_at(self, h: Subgroup) -> List[Subgroup]:
        """Admissible stabilizers at the class of H, on H's representative"""
        h_rep = self.lattice.representative(h)
        return [k for (hh, k) in self.sorted_pairs() if hh == h_rep]

    def sorted_pairs(self) -> List[Pair]:
        lattice = self.lattice
        return sorted(self.admissible, key=lambda p: _pair_key(lattice, p))

    def nontrivial_pairs(self) -> List[Pair]:
        return [(h, k) for h, k in self.sorted_pairs() if h != k]

    @property
    def size(self) -> int:
        """Number of admissible non-trivial orbits"""
        return len(self.nontrivial_pairs())

    def sort_key(self):
        lattice = self.lattice
        return self.size, [_pair_key(lattice, p) for p in self.nontrivial_pairs()]

    def to_dict(self):
        lattice = self.lattice
        table: Dict[str, List[str]] = {lattice.label(h): [] for h in lattice.representatives()}
        for h, k in self.sorted_pairs():
            table[lattice.label(h)].append(lattice.label(k))
        data = {"group": self.group.name, "admissible": table}
        if self.name:
            data["name"] = self.name
        return data

    def describe(self) -> str:
        """One line per subgroup class: 'H: K1, K2'"""
        lattice = self.lattice
        lines = []
        for h in lattice.representatives():
            ks = [lattice.label(k) for hh, k in self.nontrivial_pairs() if hh == h]
            lines.append(f"{lattice.label(h)}: {', '.join(ks) if ks else '-'}")
        return "\n".join(lines)

    def __str__(self) -> str:
        lattice = self.lattice
        norms = [f"{lattice.label(h)}/{lattice.label(k)}" for h, k in self.nontrivial_pairs()]
        return "{" + ", ".join(norms) + "}"


def _check_same_group(a: IndexingSystem, b: IndexingSystem) -> None:
    if a.group != b.group:
        raise GroupMismatchError(f"indexing systems over {a.group.name} and {b.group.name}")


def trivial_pairs(group: FiniteGroup) -> FrozenSet[Pair]:
    return frozenset((h, h) for h in subgroups(group).representatives())


def trivial_system(group: FiniteGroup) -> IndexingSystem:
    return IndexingSystem(group, trivial_pairs(group), "trivial")


def complete_system(group: FiniteGroup) -> IndexingSystem:
    return IndexingSystem(group, frozenset(candidate_pairs(group)), "complete")


def from_pairs(group: FiniteGroup, pairs: Iterable[Pair], name: Optional[str] = None) -> IndexingSystem:
    """Canonicalize raw (H, K) pairs; nothing is added, so the result may fail validate"""
    lattice = subgroups(group)
    return IndexingSystem(group, frozenset(canonical_pair(lattice, h, k) for h, k in pairs), name)


def indexing_from_dict(data: dict, group: FiniteGroup) -> IndexingSystem:
    """
    Read {"group": name, "admissible": {H: [K, ...]}}.

    Raises:
        InputError: unknown subgroup labels or a group name mismatch
    """
    if data.get("group") not in (None, group.name):
        raise GroupMismatchError(f"indexing system is for {data.get('group')}, not {group.name}")
    lattice = subgroups(group)
    admissible = data.get("admissible")
    if not isinstance(admissible, dict):
        raise InputError("indexing system needs an 'admissible' object")
    pairs = []
    for h_label, k_labels in admissible.items():
        h = lattice.by_label(h_label)
        for k_label in k_labels:
            pairs.append((h, lattice.by_label(k_label)))
    return from_pairs(group, pairs, data.get("name"))


# ==============================================================================
# VALIDATION
# ==============================================================================

@dataclass
class AxiomResult:
    """Outcome of one closure axiom"""
    axiom: str
    passed: bool
    checked: int = 0
    counterexample: Optional[str] = None

    def to_dict(self):
        return {"axiom": self.axiom, "passed": self.passed, "checked": self.checked,
                "counterexample": self.counterexample}


@dataclass
class ValidationReport:
    """Every axiom exactly once, in AXIOMS order"""
    group: str
    results: List[AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[AxiomResult]:
        return [r for r in self.results if not r.passed]

    def result(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def to_dict(self):
        return {"group": self.group, "passed": self.passed, "axioms": [r.to_dict() for r in self.results]}


def _admissible_orbits(ix: IndexingSystem) -> List[GSet]:
    return [orbit(h, k) for h, k in ix.sorted_pairs()]


def validate(ix: IndexingSystem) -> ValidationReport:
    """
    Check every closure axiom over all subgroups and all admissible orbits.

    Each failed axiom carries the first counterexample found.
    """
    lattice = ix.lattice
    group = ix.group
    label = lattice.label
    admissible = _admissible_orbits(ix)
    by_level: Dict[Subgroup, List[GSet]] = {}
    for t in admissible:
        by_level.setdefault(t.level, []).append(t)

    def run(axiom: str, cases) -> AxiomResult:
        checked = 0
        for ok, describe in cases:
            checked += 1
            if not ok:
                return AxiomResult(axiom, False, checked, describe())
        return AxiomResult(axiom, True, checked)

    def trivial_cases():
        for h in lattice.representatives():
            yield (h, h) in ix.admissible, lambda h=h: f"{label(h)}/{label(h)} is not admissible"

    def truncation_cases():
        for s in admissible:
            for t in by_level.get(s.level, []):
                both = coproduct(s, product(s, t))
                for sub in sub_gsets(both):
                    yield ix.admits_gset(sub), lambda s=s, sub=sub: f"subobject {sub} of admissible {s} is not admissible"

    def coproduct_cases():
        for s in admissible:
            for t in by_level.get(s.level, []):
                u = coproduct(s, t)
                yield ix.admits_gset(u), lambda u=u: f"disjoint union {u} is not admissible"

    def restriction_cases():
        for t in admissible:
            for k in lattice.subgroups_of(t.level):
                r = restrict(t, k)
                yield ix.admits_gset(r), lambda t=t, k=k, r=r: (
                    f"H={label(t.level)}, T={t}: restriction to {label(k)} gives {r}, which is not admissible")

    def conjugation_cases():
        for t in admissible:
            for g in range(group.order):
                c = conjugate_gset(t, g)
                yield ix.admits_gset(c), lambda t=t, c=c, g=g: (
                    f"H={label(t.level)}, T={t}: conjugate by element {g} gives {c}, which is not admissible")

    def induction_cases():
        for t in admissible:
            h, k = t.level, t.counts[0][0]
            for j in lattice.classes_within(k):
                if not ix.admits(k, j):
                    continue
                induced = induce(orbit(k, j), h)
                yield ix.admits_gset(induced), lambda h=h, k=k, j=j, induced=induced: (
                    f"{label(h)}/{label(k)} and {label(k)}/{label(j)} admissible but {induced} is not")

    def product_cases():
        for s in admissible:
            for t in by_level.get(s.level, []):
                p = product(s, t)
                yield ix.admits_gset(p), lambda s=s, t=t, p=p: f"product of {s} and {t} is {p}, which is not admissible"

    results = [
        run("trivial-sets", trivial_cases()),
        run("truncation", truncation_cases()),
        run("coproduct-closure", coproduct_cases()),
        run("restriction-functoriality", restriction_cases()),
        run("conjugation", conjugation_cases()),
        run("self-induction", induction_cases()),
        run("cartesian-product", product_cases()),
    ]
    report = ValidationReport(group.name, results)
    if not report.passed:
        logger.debug(f"[Indexing] {ix} fails {[r.axiom for r in report.failures()]}")
    return report


# ==============================================================================
# CLOSURE
# ==============================================================================

@dataclass(frozen=True)
class ImplicationTables:
    """Consequences of admitting pairs, precomputed per group"""
    conjugation: Dict[Pair, FrozenSet[Pair]]
    restriction: Dict[Pair, FrozenSet[Pair]]
    induction: Dict[Pair, Tuple[Tuple[Pair, Pair], ...]]
    products: Dict[Tuple[Pair, Pair], FrozenSet[Pair]]


def _orbit_pairs(lattice: SubgroupLattice, t: GSet) -> FrozenSet[Pair]:
    return frozenset(canonical_pair(lattice, t.level, k) for k, _ in t.counts)


@lru_cache(maxsize=None)
def implication_tables(group: FiniteGroup) -> ImplicationTables:
    lattice = subgroups(group)
    pairs = candidate_pairs(group)
    conjugation, restriction, induction = {}, {}, {}
    for h, k in pairs:
        t = orbit(h, k)
        conj = set()
        for g in range(group.order):
            conj |= _orbit_pairs(lattice, conjugate_gset(t, g))
        conjugation[(h, k)] = frozenset(conj)

        res = set()
        for l in lattice.classes_within(h):
            res |= _orbit_pairs(lattice, restrict(t, l))
        restriction[(h, k)] = frozenset(res)

        induction[(h, k)] = tuple(
            (canonical_pair(lattice, k, j), canonical_pair(lattice, h, j))
            for j in lattice.classes_within(k)
        )

    products = {}
    for (h1, k1), (h2, k2) in itertools.product(pairs, repeat=2):
        if h1 == h2:
            products[((h1, k1), (h2, k2))] = _orbit_pairs(lattice, product(orbit(h1, k1), orbit(h1, k2)))
    logger.debug(f"[Indexing] implication tables for {group.name}: {len(pairs)} candidate orbits")
    return ImplicationTables(conjugation, restriction, induction, products)


def _close(group: FiniteGroup, start: Iterable[Pair], order: Sequence[str]) -> Tuple[FrozenSet[Pair], int]:
    tables = implication_tables(group)
    current: Set[Pair] = set(start) | set(trivial_pairs(group))
    passes = 0
    while True:
        passes += 1
        before = len(current)
        for family in order:
            if family == "conjugation":
                for p in list(current):
                    current |= tables.conjugation[p]
            elif family == "restriction":
                for p in list(current):
                    current |= tables.restriction[p]
            elif family == "self-induction":
                for p in list(current):
                    for needed, implied in tables.induction[p]:
                        if needed in current:
                            current.add(implied)
            elif family == "product":
                snapshot = list(current)
                for p in snapshot:
                    for q in snapshot:
                        if p[0] == q[0]:
                            current |= tables.products[(p, q)]
            elif family not in ("truncation", "coproduct"):
                raise InputError(f"unknown rule family '{family}'")
        if len(current) == before:
            return frozenset(current), passes


def generate(group: FiniteGroup, declared: Iterable[Pair],
             order: Sequence[str] = DEFAULT_RULE_ORDER, name: Optional[str] = None) -> IndexingSystem:
    """
    Least indexing system admitting every declared orbit H/K.

    Args:
        group: Ambient group
        declared: (H, K) pairs with K <= H (any subgroups, canonicalized here)
        order: Rule families per pass; any permutation reaches the same fixed point
        name: Optional label for the result

    Returns:
        IndexingSystem
    """
    lattice = subgroups(group)
    start = [canonical_pair(lattice, h, k) for h, k in declared]
    closed, passes = _close(group, start, order)
    logger.debug(f"[Indexing] generate reached fixed point after {passes} passes")
    return IndexingSystem(group, closed, name)


def meet(a: IndexingSystem, b: IndexingSystem) -> IndexingSystem:
    _check_same_group(a, b)
    return IndexingSystem(a.group, a.admissible & b.admissible)


def join(a: IndexingSystem, b: IndexingSystem) -> IndexingSystem:
    _check_same_group(a, b)
    return generate(a.group, a.admissible | b.admissible)


def leq(a: IndexingSystem, b: IndexingSystem) -> bool:
    _check_same_group(a, b)
    return a.admissible <= b.admissible


# ==============================================================================
# ENUMERATION
# ==============================================================================

def _check_enumeration_cap(group: FiniteGroup, config: EngineConfig) -> None:
    classes = len(subgroups(group, config).conjugacy_classes)
    if classes > config.max_enumeration_classes:
        raise CapExceededError("subgroup conjugacy classes for enumeration", config.max_enumeration_classes, classes)


def enumerate_all(group: FiniteGroup, config: EngineConfig = DEFAULT_CONFIG) -> List[IndexingSystem]:
    """
    All indexing systems, smallest first.

    Breadth-first from the trivial system: each step admits one more orbit
    and closes. Every system is reached because closing a subset of its
    pairs never leaves it.
    """
    _check_enumeration_cap(group, config)
    candidates = [p for p in candidate_pairs(group) if p[0] != p[1]]
    start, _ = _close(group, [], DEFAULT_RULE_ORDER)
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for p in candidates:
            if p in current:
                continue
            closed, _ = _close(group, current | {p}, DEFAULT_RULE_ORDER)
            if closed not in seen:
                seen.add(closed)
                queue.append(closed)
    systems = sorted((IndexingSystem(group, s) for s in seen), key=lambda ix: ix.sort_key())
    logger.info(f"[Indexing] {group.name}: {len(systems)} indexing systems")
    return systems


def enumerate_brute_force(group: FiniteGroup, config: EngineConfig = DEFAULT_CONFIG) -> List[IndexingSystem]:
    """Every subset of candidate norms that passes validate (oracle)"""
    candidates = [p for p in candidate_pairs(group) if p[0] != p[1]]
    if len(candidates) > config.max_brute_force_pairs:
        raise CapExceededError("candidate norms for brute-force enumeration", config.max_brute_force_pairs,
                               len(candidates))
    base = trivial_pairs(group)
    systems = []
    for size in range(len(candidates) + 1):
        for subset in itertools.combinations(candidates, size):
            ix = IndexingSystem(group, base | frozenset(subset))
            if validate(ix).passed:
                systems.append(ix)
    return sorted(systems, key=lambda ix: ix.sort_key())


def leq_table(systems: Sequence[IndexingSystem]) -> List[List[bool]]:
    return [[leq(a, b) for b in systems] for a in systems]


# ==============================================================================
# GRAPH SUBGROUPS
# ==============================================================================

@lru_cache(maxsize=None)
def product_with_symmetric(group: FiniteGroup, n: int) -> FiniteGroup:
    """G x S_n acting on degree(G) + n points"""
    d = group.degree
    gens = [tuple(g.images) + tuple(range(d, d + n)) for g in group.generators]
    for i in range(n - 1):
        images = list(range(d + n))
        images[d + i], images[d + i + 1] = images[d + i + 1], images[d + i]
        gens.append(tuple(images))
    return make_group(d + n, gens, f"{group.name}xS{n}")


@dataclass(frozen=True)
class GraphSubgroup:
    """The graph {(h, sigma_h)} of the action of H on an ordered n-point H-set"""
    level: Subgroup
    gset: GSet
    ambient: FiniteGroup
    members: Tuple[int, ...]

    @property
    def n(self) -> int:
        return self.gset.cardinality

    @property
    def order(self) -> int:
        return len(self.members)

    def elements(self) -> List[Permutation]:
        return [self.ambient.elements[m] for m in self.members]

    def meets_symmetric_trivially(self) -> bool:
        """Intersection with {1} x S_n is trivial"""
        d = self.level.parent.degree
        for perm in self.elements():
            if perm.images[:d] == tuple(range(d)) and not perm.is_identity():
                return False
        return True

    def restricted_to(self, k: Subgroup) -> "GraphSubgroup":
        """The subgroup of the graph lying over K <= H"""
        d = self.level.parent.degree
        heads = {tuple(self.level.parent.elements[x].images) for x in k.members}
        kept = tuple(m for m in self.members if self.ambient.elements[m].images[:d] in heads)
        return GraphSubgroup(k, restrict(self.gset, k), self.ambient, kept)

    @property
    def class_key(self) -> Tuple[int, ...]:
        """Least conjugate member tuple in G x S_n; equal keys mean conjugate subgroups"""
        return _class_key(self.ambient, self.members)


@lru_cache(maxsize=None)
def _class_key(ambient: FiniteGroup, members: Tuple[int, ...]) -> Tuple[int, ...]:
    best = None
    for g in range(ambient.order):
        image = tuple(sorted(ambient.conjugate_element(g, m) for m in members))
        if best is None or image < best:
            best = image
    return best


def graph_subgroup(ix: Optional[IndexingSystem], h: Subgroup, t: GSet) -> GraphSubgroup:
    """
    Graph of H -> S_n given by the point order of realize(T).

    Raises:
        InadmissibleError: T is not admissible in ix (skip the check with ix=None)
    """
    if ix is not None and not ix.admits_gset(t):
        raise InadmissibleError(f"{t} is not admissible at {ix.lattice.label(h)}", (h, t))
    if t.level != h:
        raise NotASubgroupError("the G-set must live at H")
    group = h.parent
    n = t.cardinality
    ambient = product_with_symmetric(group, n)
    r = realize(t)
    d = group.degree
    members = []
    for x in h.members:
        images = tuple(group.elements[x].images) + tuple(d + r.image(x, p) for p in range(n))
        members.append(ambient.index_of(Permutation(images)))
    return GraphSubgroup(h, t, ambient, tuple(sorted(members)))


def family_of(ix: IndexingSystem, n: int) -> List[GraphSubgroup]:
    """
    One graph subgroup per conjugacy class in G x S_n, over all subgroup
    classes H and all admissible H-sets of cardinality n.
    """
    lattice = ix.lattice
    found: Dict[Tuple[int, ...], GraphSubgroup] = {}
    for h in lattice.representatives():
        for t in all_gsets(h, n):
            if t.cardinality != n or not ix.admits_gset(t):
                continue
            graph = graph_subgroup(ix, h, t)
            found.setdefault(graph.class_key, graph)
    family = sorted(found.values(), key=lambda gr: (gr.order, gr.class_key))
    logger.debug(f"[Indexing] family of {ix} at n={n}: {len(family)} classes")
    return family
