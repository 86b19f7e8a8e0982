"""
Finite G-sets

A GSet is an orbit multiset at a level H (a subgroup of the ambient group):
each orbit H/K is keyed by the representative of K's H-conjugacy class. The
operations here (restriction, induction, products, marks) work on that
canonical form. The element-level side (Realization, GMap and the element_*
functions) materializes points and actions and is what the tests use as an
independent oracle.
"""

import itertools
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from errors import (
    InputError,
    InvariantViolation,
    LevelMismatchError,
    NotASubgroupError,
    ParseError,
)
from group_core import Subgroup, SubgroupLattice, double_cosets, lattice_of

logger = logging.getLogger(__name__)


# ==============================================================================
# ORBIT-MULTISET MODEL
# ==============================================================================

@lru_cache(maxsize=None)
def canonical_stabilizer(level: Subgroup, stabilizer: Subgroup) -> Subgroup:
    """Representative of the level-conjugacy class of a subgroup of level"""
    return lattice_of(level).representative_within(level, stabilizer)


@dataclass(frozen=True)
class Orbit:
    """The transitive H-set H/K"""
    level: Subgroup
    stabilizer: Subgroup

    @property
    def cardinality(self) -> int:
        return self.level.order // self.stabilizer.order

    def __str__(self) -> str:
        lattice = lattice_of(self.level)
        return f"{lattice.label(self.level)}/{lattice.label(self.stabilizer)}"


@dataclass(frozen=True)
class GSet:
    """
    A finite H-set as a multiset of orbits.

    counts holds (stabilizer representative, multiplicity) pairs sorted by the
    stabilizer's canonical_id; multiplicities are positive. Build values with
    gset(), orbit(), point() or empty() rather than directly.
    """
    level: Subgroup
    counts: Tuple[Tuple[Subgroup, int], ...] = ()

    @property
    def orbits(self) -> List[Orbit]:
        result = []
        for stabilizer, multiplicity in self.counts:
            result.extend([Orbit(self.level, stabilizer)] * multiplicity)
        return result

    @property
    def cardinality(self) -> int:
        return sum(m * (self.level.order // k.order) for k, m in self.counts)

    def __len__(self) -> int:
        return self.cardinality

    @property
    def is_empty(self) -> bool:
        return not self.counts

    @property
    def orbit_count(self) -> int:
        return sum(m for _, m in self.counts)

    def multiplicity(self, stabilizer: Subgroup) -> int:
        rep = canonical_stabilizer(self.level, stabilizer)
        for k, m in self.counts:
            if k == rep:
                return m
        return 0

    def scaled(self, factor: int) -> "GSet":
        """factor copies of this set"""
        return gset(self.level, [(k, m * factor) for k, m in self.counts])

    def is_trivial(self) -> bool:
        """Every orbit is a fixed point"""
        return all(k == self.level for k, _ in self.counts)

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        lattice = lattice_of(self.level)
        level_label = lattice.label(self.level)
        terms = []
        for k, m in self.counts:
            term = f"{level_label}/{lattice.label(k)}"
            terms.append(term if m == 1 else f"{m}*{term}")
        return ", ".join(terms)

    def to_dict(self):
        """Canonical JSON form: level and sorted (stabilizer, multiplicity) list"""
        lattice = lattice_of(self.level)
        return {
            "level": lattice.label(self.level),
            "level_id": list(self.level.canonical_id),
            "orbits": [
                {"stabilizer": lattice.label(k), "stabilizer_id": list(k.canonical_id), "multiplicity": m}
                for k, m in self.counts
            ],
        }


def gset(level: Subgroup, orbits: Iterable[Tuple[Subgroup, int]]) -> GSet:
    """
    Build a GSet from (stabilizer, multiplicity) pairs.

    Stabilizers may be any subgroups of level; they are replaced by their
    class representatives and merged.
    """
    merged: Dict[Subgroup, int] = {}
    for k, m in orbits:
        if k.parent != level.parent or not k.member_set <= level.member_set:
            raise NotASubgroupError(f"stabilizer {list(k.members)} is not contained in the level")
        if m < 0:
            raise InputError("orbit multiplicities must be non-negative")
        if m == 0:
            continue
        rep = canonical_stabilizer(level, k)
        merged[rep] = merged.get(rep, 0) + m
    counts = tuple(sorted(merged.items(), key=lambda item: item[0].canonical_id))
    return GSet(level, counts)


def orbit(level: Subgroup, stabilizer: Subgroup, multiplicity: int = 1) -> GSet:
    return gset(level, [(stabilizer, multiplicity)])


def point(level: Subgroup) -> GSet:
    """The one-point set H/H"""
    return GSet(level, ((level, 1),))


def empty(level: Subgroup) -> GSet:
    return GSet(level, ())


def _check_same_level(s: GSet, t: GSet) -> None:
    if s.level != t.level:
        raise LevelMismatchError("G-sets live at different levels")


def _check_contained(k: Subgroup, h: Subgroup) -> None:
    if k.parent != h.parent or not k.member_set <= h.member_set:
        raise NotASubgroupError(
            f"{lattice_of(h).describe(k) if k.parent == h.parent else list(k.members)} "
            f"is not contained in {lattice_of(h).describe(h)}"
        )


def coproduct(s: GSet, t: GSet) -> GSet:
    _check_same_level(s, t)
    return gset(s.level, list(s.counts) + list(t.counts))


def restrict(t: GSet, k: Subgroup) -> GSet:
    """
    Restrict an H-set to K <= H.

    Each orbit H/L splits over the double cosets K g L of H as
    the disjoint union of K/(K n gLg^-1).
    """
    _check_contained(k, t.level)
    lattice = lattice_of(t.level)
    pieces = []
    for stabilizer, multiplicity in t.counts:
        decomposition = double_cosets(k, stabilizer, ambient=t.level)
        for g in decomposition.representatives:
            conjugate = lattice.conjugate(stabilizer, g)
            pieces.append((lattice.intersection(k, conjugate), multiplicity))
    return gset(k, pieces)


def induce(t: GSet, h: Subgroup) -> GSet:
    """H x_K T for T at K <= H; each K/J becomes H/J"""
    _check_contained(t.level, h)
    return gset(h, list(t.counts))


def product(s: GSet, t: GSet) -> GSet:
    """
    Cartesian product with the diagonal action.

    Uses H/A x T = H x_A (T restricted to A) orbit by orbit; tests compare
    this with the orbit decomposition of the realized product.
    """
    _check_same_level(s, t)
    level = s.level
    pieces = []
    for a, m in s.counts:
        restricted = restrict(t, a)
        for j, n in restricted.counts:
            pieces.append((j, m * n))
    return gset(level, pieces)


def conjugate_gset(t: GSet, g: int) -> GSet:
    """The set g.T at level g H g^-1, with g acting through conjugation"""
    lattice = lattice_of(t.level)
    level = lattice.conjugate(t.level, g)
    return gset(level, [(lattice.conjugate(k, g), m) for k, m in t.counts])


def sub_gsets(t: GSet) -> List[GSet]:
    """All subobjects up to isomorphism (sub-multisets of the orbits), smallest first"""
    ranges = [range(m + 1) for _, m in t.counts]
    result = []
    for picks in itertools.product(*ranges):
        result.append(gset(t.level, [(k, n) for (k, _), n in zip(t.counts, picks)]))
    result.sort(key=lambda s: (s.cardinality, [(k.canonical_id, m) for k, m in s.counts]))
    return result


# ==============================================================================
# MARKS
# ==============================================================================

@lru_cache(maxsize=None)
def mark_subgroups(level: Subgroup) -> Tuple[Subgroup, ...]:
    """Columns of the table of marks at level: class representatives of subgroups"""
    return tuple(lattice_of(level).classes_within(level))


@lru_cache(maxsize=None)
def orbit_marks(level: Subgroup, stabilizer: Subgroup) -> Tuple[int, ...]:
    """|(H/K)^J| for every column J: the number of x in H with x^-1 J x <= K, over |K|"""
    lattice = lattice_of(level)
    group = level.parent
    k_index = lattice.index(stabilizer)
    row = []
    for j in mark_subgroups(level):
        j_index = lattice.index(j)
        hits = 0
        for x in level.members:
            conjugated = lattice.conjugation_table[group.inv(x)][j_index]
            if (conjugated, k_index) in lattice.inclusion:
                hits += 1
        row.append(hits // stabilizer.order)
    return tuple(row)


@dataclass(frozen=True)
class MarkVector:
    """Fixed-point counts |T^J| for each conjugacy class of subgroups J <= H"""
    level: Subgroup
    subgroups: Tuple[Subgroup, ...]
    values: Tuple[int, ...]

    def __getitem__(self, subgroup: Subgroup) -> int:
        rep = canonical_stabilizer(self.level, subgroup)
        return self.values[self.subgroups.index(rep)]

    def __add__(self, other: "MarkVector") -> "MarkVector":
        self._check(other)
        return MarkVector(self.level, self.subgroups, tuple(a + b for a, b in zip(self.values, other.values)))

    def __mul__(self, other: "MarkVector") -> "MarkVector":
        self._check(other)
        return MarkVector(self.level, self.subgroups, tuple(a * b for a, b in zip(self.values, other.values)))

    def _check(self, other: "MarkVector") -> None:
        if self.level != other.level:
            raise LevelMismatchError("mark vectors at different levels")

    def to_dict(self):
        lattice = lattice_of(self.level)
        return {lattice.label(j): v for j, v in zip(self.subgroups, self.values)}


def marks(t: GSet) -> MarkVector:
    columns = mark_subgroups(t.level)
    totals = [0] * len(columns)
    for k, m in t.counts:
        for i, value in enumerate(orbit_marks(t.level, k)):
            totals[i] += m * value
    return MarkVector(t.level, columns, tuple(totals))


def is_isomorphic(s: GSet, t: GSet) -> bool:
    """Decide by mark vectors; the orbit multisets must agree with the verdict"""
    _check_same_level(s, t)
    by_marks = marks(s).values == marks(t).values
    by_orbits = s.counts == t.counts
    if by_marks != by_orbits:
        raise InvariantViolation(f"marks and orbit multisets disagree on {s} vs {t}")
    return by_marks


def table_of_marks(level: Subgroup) -> pd.DataFrame:
    """Rows H/K, columns J, entries |(H/K)^J|"""
    lattice = lattice_of(level)
    columns = mark_subgroups(level)
    level_label = lattice.label(level)
    rows = {f"{level_label}/{lattice.label(k)}": orbit_marks(level, k) for k in columns}
    return pd.DataFrame.from_dict(rows, orient="index", columns=[lattice.label(j) for j in columns])


# ==============================================================================
# LITERALS
# ==============================================================================

_TERM = re.compile(r"^\s*(?:(\d+)\s*[*·]\s*|(\d+)\s+)?([^/\s]+)\s*/\s*([^/\s]+)\s*$")
_EMPTY_LITERALS = {"", "{}", "0", "empty"}


def parse_gset(text: str, lattice: SubgroupLattice, level: Optional[Subgroup] = None) -> GSet:
    """
    Parse a literal such as "2*C4/C2, C4/e" (terms may also be joined by '+').

    The numerator of every term names the level; "H" stands for the level
    passed in. Without a level the first numerator decides it.
    """
    stripped = text.strip()
    if stripped in _EMPTY_LITERALS:
        if level is None:
            raise ParseError("empty G-set literal needs an explicit level", 0, text)
        return empty(level)

    pieces = []
    offset = 0
    for raw in re.split(r"[,+]", text):
        match = _TERM.match(raw)
        if not match:
            raise ParseError(f"expected an orbit term like 'H/K', got '{raw.strip()}'", offset, text)
        multiplicity = int(match.group(1) or match.group(2) or 1)
        numerator, denominator = match.group(3), match.group(4)
        if numerator == "H":
            if level is None:
                raise ParseError("'H' needs an explicit level", offset, text)
            term_level = level
        else:
            term_level = lattice.by_label(numerator)
        if level is None:
            level = term_level
        elif term_level != level:
            raise LevelMismatchError(
                f"orbit term '{raw.strip()}' is at {lattice.label(term_level)}, expected {lattice.label(level)}"
            )
        stabilizer = level if denominator == "H" else lattice.by_label(denominator)
        pieces.append((stabilizer, multiplicity))
        offset += len(raw) + 1
    return gset(level, pieces)


def gset_from_dict(data: dict, lattice: SubgroupLattice) -> GSet:
    """Inverse of GSet.to_dict; accepts labels or canonical ids"""
    def resolve(label_key, id_key, entry):
        if id_key in entry:
            return lattice.find(entry[id_key])
        return lattice.by_label(entry[label_key])

    level = resolve("level", "level_id", data)
    return gset(level, [(resolve("stabilizer", "stabilizer_id", o), int(o["multiplicity"])) for o in data["orbits"]])


# ==============================================================================
# ELEMENT LEVEL
# ==============================================================================

@dataclass(frozen=True)
class Realization:
    """
    Points with an explicit action of the level group.

    action[i][p] is the image of point p under level.members[i].
    """
    level: Subgroup
    labels: Tuple[object, ...]
    action: Tuple[Tuple[int, ...], ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    def image(self, h: int, p: int) -> int:
        return self.action[self.level.position[h]][p]

    def orbits(self) -> List[Tuple[int, ...]]:
        """Orbits in order of their least point"""
        seen = set()
        result = []
        for start in range(self.size):
            if start in seen:
                continue
            members = {start}
            queue = deque([start])
            while queue:
                p = queue.popleft()
                for row in self.action:
                    q = row[p]
                    if q not in members:
                        members.add(q)
                        queue.append(q)
            seen |= members
            result.append(tuple(sorted(members)))
        return result

    def stabilizer(self, p: int) -> Subgroup:
        fixing = [h for i, h in enumerate(self.level.members) if self.action[i][p] == p]
        return lattice_of(self.level).find(fixing)

    def fixed_points(self, subgroup: Subgroup) -> List[int]:
        rows = [self.action[self.level.position[h]] for h in subgroup.members]
        return [p for p in range(self.size) if all(row[p] == p for row in rows)]


def _left_cosets(level: Subgroup, stabilizer: Subgroup) -> Tuple[List[int], Dict[int, int]]:
    """Least representatives of the cosets xK in level, and element -> coset index"""
    table = level.parent.multiplication_table
    reps: List[int] = []
    owner: Dict[int, int] = {}
    for x in level.members:
        if x in owner:
            continue
        for k in stabilizer.members:
            owner[table[x][k]] = len(reps)
        reps.append(x)
    return reps, owner


def realize(t: GSet) -> Realization:
    """
    Points are (orbit number, coset representative); H acts by left translation.

    Orbits appear in counts order, copies consecutively, cosets by least
    representative.
    """
    level = t.level
    table = level.parent.multiplication_table
    labels: List[object] = []
    blocks = []
    orbit_number = 0
    for stabilizer, multiplicity in t.counts:
        reps, owner = _left_cosets(level, stabilizer)
        for _ in range(multiplicity):
            start = len(labels)
            labels.extend((orbit_number, x) for x in reps)
            blocks.append((start, reps, owner))
            orbit_number += 1

    rows = []
    for h in level.members:
        row = [0] * len(labels)
        for start, reps, owner in blocks:
            for c, x in enumerate(reps):
                row[start + c] = start + owner[table[h][x]]
        rows.append(tuple(row))
    return Realization(level, tuple(labels), tuple(rows))


def decompose(r: Realization) -> GSet:
    """Orbit decomposition of a realization, stabilizers taken at least points"""
    return gset(r.level, [(r.stabilizer(o[0]), 1) for o in r.orbits()])


def element_restrict(r: Realization, k: Subgroup) -> Realization:
    _check_contained(k, r.level)
    rows = tuple(r.action[r.level.position[h]] for h in k.members)
    return Realization(k, r.labels, rows)


def element_induce(r: Realization, h: Subgroup) -> Realization:
    """Balanced product H x_K R, points (coset representative, point of R)"""
    k = r.level
    _check_contained(k, h)
    group = h.parent
    table = group.multiplication_table
    reps, owner = _left_cosets(h, k)
    n = r.size
    labels = tuple((x, label) for x in reps for label in r.labels)
    rows = []
    for g in h.members:
        row = [0] * len(labels)
        for c, x in enumerate(reps):
            y = table[g][x]
            target = owner[y]
            kk = table[group.inv(reps[target])][y]
            k_row = r.action[k.position[kk]]
            for p in range(n):
                row[c * n + p] = target * n + k_row[p]
        rows.append(tuple(row))
    return Realization(h, labels, tuple(rows))


def element_product(r1: Realization, r2: Realization) -> Realization:
    if r1.level != r2.level:
        raise LevelMismatchError("realizations at different levels")
    n2 = r2.size
    labels = tuple((a, b) for a in r1.labels for b in r2.labels)
    rows = []
    for row1, row2 in zip(r1.action, r2.action):
        rows.append(tuple(row1[p] * n2 + row2[q] for p in range(r1.size) for q in range(n2)))
    return Realization(r1.level, labels, tuple(rows))


def element_coproduct(r1: Realization, r2: Realization) -> Realization:
    if r1.level != r2.level:
        raise LevelMismatchError("realizations at different levels")
    shift = r1.size
    labels = tuple((0, a) for a in r1.labels) + tuple((1, b) for b in r2.labels)
    rows = [tuple(row1) + tuple(q + shift for q in row2) for row1, row2 in zip(r1.action, r2.action)]
    return Realization(r1.level, labels, tuple(rows))


@dataclass(frozen=True)
class GMap:
    """A function between realizations at the same level"""
    source: Realization
    target: Realization
    assignment: Tuple[int, ...]

    def __post_init__(self):
        if self.source.level != self.target.level:
            raise LevelMismatchError("G-map endpoints at different levels")
        if len(self.assignment) != self.source.size:
            raise InputError("assignment length does not match the source")

    def __call__(self, p: int) -> int:
        return self.assignment[p]

    def is_equivariant(self) -> bool:
        for row_s, row_t in zip(self.source.action, self.target.action):
            for p in range(self.source.size):
                if self.assignment[row_s[p]] != row_t[self.assignment[p]]:
                    return False
        return True

    @property
    def is_mono(self) -> bool:
        return len(set(self.assignment)) == len(self.assignment)

    @property
    def is_epi(self) -> bool:
        return set(self.assignment) == set(range(self.target.size))

    @property
    def is_iso(self) -> bool:
        return self.is_mono and self.is_epi

    def compose(self, first: "GMap") -> "GMap":
        """self after first"""
        if first.target != self.source:
            raise LevelMismatchError("G-maps are not composable")
        return GMap(first.source, self.target, tuple(self.assignment[q] for q in first.assignment))

    @classmethod
    def identity(cls, r: Realization) -> "GMap":
        return cls(r, r, tuple(range(r.size)))


def equivariant_maps(source: Realization, target: Realization) -> List[GMap]:
    """
    Every G-map source -> target.

    A map is fixed by where it sends the least point x of each source orbit;
    the admissible images are the points y with Stab(x) <= Stab(y).
    """
    if source.level != target.level:
        raise LevelMismatchError("realizations at different levels")
    level = source.level
    per_orbit = []
    for members in source.orbits():
        x = members[0]
        stab = source.stabilizer(x)
        options = []
        for y in target.fixed_points(stab):
            partial = {}
            for h in level.members:
                partial[source.image(h, x)] = target.image(h, y)
            options.append(partial)
        per_orbit.append(options)

    maps = []
    for combo in itertools.product(*per_orbit):
        assignment = [0] * source.size
        for partial in combo:
            for p, q in partial.items():
                assignment[p] = q
        maps.append(GMap(source, target, tuple(assignment)))
    return maps


def gmaps(s: GSet, t: GSet) -> List[GMap]:
    _check_same_level(s, t)
    return equivariant_maps(realize(s), realize(t))


def brute_force_maps(source: Realization, target: Realization) -> List[GMap]:
    """All functions filtered by equivariance; oracle for small sets only"""
    maps = []
    for assignment in itertools.product(range(target.size), repeat=source.size):
        f = GMap(source, target, tuple(assignment))
        if f.is_equivariant():
            maps.append(f)
    return maps


def orbit_count(r: Realization) -> int:
    return len(r.orbits())


def all_gsets(level: Subgroup, max_cardinality: int) -> List[GSet]:
    """Every GSet at level with 1 <= |T| <= max_cardinality, in a fixed order"""
    stabilizers = mark_subgroups(level)
    sizes = [level.order // k.order for k in stabilizers]
    result = []

    def extend(i: int, remaining: int, chosen: List[Tuple[Subgroup, int]]):
        if i == len(stabilizers):
            if chosen:
                result.append(gset(level, chosen))
            return
        for m in range(remaining // sizes[i] + 1):
            extend(i + 1, remaining - m * sizes[i], chosen + ([(stabilizers[i], m)] if m else []))

    extend(0, max_cardinality, [])
    result.sort(key=lambda s: (s.cardinality, [(k.canonical_id, m) for k, m in s.counts]))
    return result
