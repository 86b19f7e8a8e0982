"""
Finite groups as permutation groups

Elements are Permutation values; a FiniteGroup stores the full element list in
a deterministic order and answers products by index through a multiplication
table. Subgroups are sorted tuples of element indices. The SubgroupLattice
holds every subgroup together with inclusion, conjugacy classes, explicit
conjugation witnesses and a printable label for each subgroup.

Conventions:
    - (p * q)(x) = p(q(x)); a permutation acts on points from the left.
    - Element 0 is always the identity.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from config import DEFAULT_CONFIG, EngineConfig
from errors import (
    CapExceededError,
    GroupMismatchError,
    InputError,
    InvalidPermutationError,
    NotASubgroupError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..degree-1}, stored as its image list"""
    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise InvalidPermutationError(f"not a bijection on 0..{len(images) - 1}: {list(images)}")
        object.__setattr__(self, "images", images)

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build a permutation from disjoint cycles, e.g. [(0, 1, 2)]"""
        images = list(range(degree))
        for cycle in cycles:
            for i, point in enumerate(cycle):
                if not 0 <= point < degree:
                    raise InvalidPermutationError(f"point {point} outside degree {degree}")
                images[point] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other"""
        if other.degree != self.degree:
            raise InvalidPermutationError("cannot compose permutations of different degree")
        return Permutation(tuple(self.images[i] for i in other.images))

    __mul__ = compose

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, image in enumerate(self.images):
            inv[image] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.images))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Non-trivial cycles, each starting at its least point"""
        seen = set()
        result = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            point = self.images[start]
            while point != start:
                cycle.append(point)
                seen.add(point)
                point = self.images[point]
            result.append(tuple(cycle))
        return result

    def __str__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)


@dataclass(frozen=True)
class FiniteGroup:
    """A permutation group with its full, deterministically ordered element list"""
    name: str
    degree: int
    generators: Tuple[Permutation, ...]
    elements: Tuple[Permutation, ...] = field(compare=False, repr=False)

    def __hash__(self):
        return hash((self.name, self.degree, self.generators))

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def _index(self) -> Dict[Permutation, int]:
        return {perm: i for i, perm in enumerate(self.elements)}

    def index_of(self, perm: Permutation) -> int:
        try:
            return self._index[perm]
        except KeyError:
            raise InputError(f"{perm} is not an element of {self.name}") from None

    @cached_property
    def multiplication_table(self) -> Tuple[Tuple[int, ...], ...]:
        """table[i][j] = index of elements[i] * elements[j]"""
        index = self._index
        return tuple(
            tuple(index[a.compose(b)] for b in self.elements)
            for a in self.elements
        )

    @cached_property
    def inverse_table(self) -> Tuple[int, ...]:
        index = self._index
        return tuple(index[a.inverse()] for a in self.elements)

    @cached_property
    def generator_indices(self) -> Tuple[int, ...]:
        return tuple(self._index[g] for g in self.generators)

    def mul(self, i: int, j: int) -> int:
        return self.multiplication_table[i][j]

    def inv(self, i: int) -> int:
        return self.inverse_table[i]

    def conjugate_element(self, g: int, x: int) -> int:
        """g x g^-1"""
        table = self.multiplication_table
        return table[table[g][x]][self.inverse_table[g]]

    def element_order(self, i: int) -> int:
        order, x = 1, i
        while x != 0:
            x = self.mul(i, x)
            order += 1
        return order

    def closure(self, generators: Iterable[int]) -> FrozenSet[int]:
        """Element indices of the subgroup generated by the given indices"""
        gens = [g for g in dict.fromkeys(generators) if g != 0]
        table = self.multiplication_table
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for s in gens:
                y = table[s][x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, (0,))

    def __str__(self) -> str:
        return f"{self.name} (order {self.order}, degree {self.degree})"


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a FiniteGroup, as a sorted tuple of element indices"""
    parent: FiniteGroup = field(repr=False)
    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        object.__setattr__(self, "members", members)
        parent = self.parent
        if not members or members[0] != 0 or members[-1] >= parent.order:
            raise NotASubgroupError(f"{list(members)} must contain the identity 0 and lie in {parent.name}")
        if parent.order % len(members):
            raise NotASubgroupError(
                f"order {len(members)} does not divide |{parent.name}| = {parent.order}")
        # the whole group and the trivial subgroup need no closure check
        if 1 < len(members) < parent.order:
            table = parent.multiplication_table
            member_set = frozenset(members)
            for a in members:
                if any(table[a][b] not in member_set for b in members):
                    raise NotASubgroupError(f"{list(members)} is not closed under multiplication in {parent.name}")

    def __hash__(self):
        return hash((self.parent.name, self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def canonical_id(self) -> Tuple[int, ...]:
        return self.members

    @cached_property
    def member_set(self) -> FrozenSet[int]:
        return frozenset(self.members)

    @cached_property
    def position(self) -> Dict[int, int]:
        """element index -> position inside members"""
        return {m: i for i, m in enumerate(self.members)}

    def __contains__(self, element: int) -> bool:
        return element in self.member_set

    def issubset(self, other: "Subgroup") -> bool:
        return self.parent == other.parent and self.member_set <= other.member_set

    @property
    def is_whole(self) -> bool:
        return self.order == self.parent.order

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @cached_property
    def generators(self) -> Tuple[int, ...]:
        """
        Element indices generating this subgroup.

        The whole group uses its declared generators (so matrix
        representations line up with group files); other subgroups take a
        greedy generating set in member order.
        """
        if self.is_whole:
            return self.parent.generator_indices
        gens: List[int] = []
        reached = frozenset([0])
        for m in self.members:
            if m not in reached:
                gens.append(m)
                reached = self.parent.closure(gens)
        return tuple(gens)

    def elements(self) -> List[Permutation]:
        return [self.parent.elements[m] for m in self.members]


@dataclass(frozen=True)
class DoubleCosetDecomposition:
    """K \\ ambient / H with one representative per double coset K g H"""
    left: Subgroup
    right: Subgroup
    representatives: Tuple[int, ...]
    cosets: Tuple[FrozenSet[int], ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.representatives)

    def representative_elements(self) -> List[Permutation]:
        group = self.left.parent
        return [group.elements[g] for g in self.representatives]


@dataclass(frozen=True, eq=False)
class SubgroupLattice:
    """All subgroups of a group with inclusion, conjugacy and labels"""
    group: FiniteGroup
    subgroups: Tuple[Subgroup, ...]
    inclusion: FrozenSet[Tuple[int, int]]
    conjugacy_classes: Tuple[Tuple[int, ...], ...]
    conjugation_witnesses: Dict[Tuple[int, int], int] = field(repr=False)
    conjugation_table: Tuple[Tuple[int, ...], ...] = field(repr=False)
    labels: Tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.subgroups)

    @cached_property
    def _by_members(self) -> Dict[Tuple[int, ...], int]:
        return {s.members: i for i, s in enumerate(self.subgroups)}

    @cached_property
    def _class_of(self) -> Tuple[int, ...]:
        owner = [0] * len(self.subgroups)
        for c, members in enumerate(self.conjugacy_classes):
            for s in members:
                owner[s] = c
        return tuple(owner)

    @cached_property
    def _by_label(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, subgroup: Subgroup) -> int:
        if subgroup.parent != self.group:
            raise GroupMismatchError(f"subgroup of {subgroup.parent.name} used with {self.group.name}")
        try:
            return self._by_members[subgroup.members]
        except KeyError:
            raise NotASubgroupError(f"{list(subgroup.members)} is not a subgroup of {self.group.name}") from None

    def find(self, members: Iterable[int]) -> Subgroup:
        """The lattice's Subgroup with exactly these member indices"""
        key = tuple(sorted(set(members)))
        if key not in self._by_members:
            raise NotASubgroupError(f"{list(key)} is not a subgroup of {self.group.name}")
        return self.subgroups[self._by_members[key]]

    def generated_by(self, elements: Iterable) -> Subgroup:
        """Subgroup generated by element indices or Permutation values"""
        indices = [e if isinstance(e, int) else self.group.index_of(e) for e in elements]
        return self.find(self.group.closure(indices))

    def label(self, subgroup: Subgroup) -> str:
        return self.labels[self.index(subgroup)]

    def by_label(self, label: str) -> Subgroup:
        """
        Resolve a subgroup id.

        Accepts lattice labels, "G" for the whole group, "e" for the trivial
        subgroup and "#k" for the k-th subgroup in lattice order.
        """
        label = label.strip()
        if label == "G":
            return self.subgroups[-1]
        if label.startswith("#") and label[1:].isdigit():
            k = int(label[1:])
            if k < len(self.subgroups):
                return self.subgroups[k]
        if label in self._by_label:
            return self.subgroups[self._by_label[label]]
        raise InputError(f"unknown subgroup '{label}' in {self.group.name}; known: {', '.join(self.labels)}")

    @property
    def trivial(self) -> Subgroup:
        return self.subgroups[0]

    @property
    def whole(self) -> Subgroup:
        return self.subgroups[-1]

    def leq(self, a: Subgroup, b: Subgroup) -> bool:
        """a is contained in b"""
        return (self.index(a), self.index(b)) in self.inclusion

    def subgroups_of(self, h: Subgroup) -> List[Subgroup]:
        return [s for s in self.subgroups if s.member_set <= h.member_set]

    def intersection(self, a: Subgroup, b: Subgroup) -> Subgroup:
        return self.find(a.member_set & b.member_set)

    def join(self, a: Subgroup, b: Subgroup) -> Subgroup:
        return self.find(self.group.closure(a.generators + b.generators))

    def conjugate(self, subgroup: Subgroup, g: int) -> Subgroup:
        """g subgroup g^-1"""
        return self.subgroups[self.conjugation_table[g][self.index(subgroup)]]

    def class_index(self, subgroup: Subgroup) -> int:
        return self._class_of[self.index(subgroup)]

    def representative(self, subgroup: Subgroup) -> Subgroup:
        """G-conjugacy class representative (least in lattice order)"""
        return self.subgroups[self.conjugacy_classes[self.class_index(subgroup)][0]]

    def representatives(self) -> List[Subgroup]:
        return [self.subgroups[c[0]] for c in self.conjugacy_classes]

    def class_members(self, subgroup: Subgroup) -> List[Subgroup]:
        return [self.subgroups[i] for i in self.conjugacy_classes[self.class_index(subgroup)]]

    def conjugation_witness(self, a: Subgroup, b: Subgroup) -> Optional[int]:
        """Least g with g a g^-1 = b, or None when a and b are not conjugate"""
        return self.conjugation_witnesses.get((self.index(a), self.index(b)))

    def witness_to_representative(self, subgroup: Subgroup) -> int:
        return self.conjugation_witnesses[(self.index(subgroup), self.index(self.representative(subgroup)))]

    def is_normal(self, subgroup: Subgroup) -> bool:
        return len(self.class_members(subgroup)) == 1

    def representative_within(self, h: Subgroup, k: Subgroup) -> Subgroup:
        """Least subgroup (lattice order) among the h-conjugates of k"""
        k_index = self.index(k)
        best = min(self.conjugation_table[x][k_index] for x in h.members)
        return self.subgroups[best]

    def classes_within(self, h: Subgroup) -> List[Subgroup]:
        """Representatives of the h-conjugacy classes of subgroups of h"""
        reps = {self.index(self.representative_within(h, k)) for k in self.subgroups_of(h)}
        return [self.subgroups[i] for i in sorted(reps)]

    def witness_within(self, h: Subgroup, a: Subgroup, b: Subgroup) -> Optional[int]:
        """Least x in h with x a x^-1 = b"""
        a_index, b_index = self.index(a), self.index(b)
        for x in h.members:
            if self.conjugation_table[x][a_index] == b_index:
                return x
        return None

    def describe(self, subgroup: Subgroup) -> str:
        return f"{self.label(subgroup)} (order {subgroup.order})"


def make_group(degree: int, generators: Sequence, name: str,
               config: EngineConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """
    Build the permutation group generated by the given permutations.

    Elements are listed breadth-first from the identity (each element of the
    next layer is s * x for a generator s and an element x of the current
    layer); every layer is then sorted lexicographically by image list.

    Args:
        degree: Number of points acted on
        generators: Permutations or image lists (0-based)
        name: Identifier used in labels and file formats
        config: Caps; max_group_elements bounds the closure

    Returns:
        FiniteGroup
    """
    gens = []
    for g in generators:
        perm = g if isinstance(g, Permutation) else Permutation(tuple(g))
        if perm.degree != degree:
            raise InvalidPermutationError(f"generator {list(perm.images)} has degree {perm.degree}, expected {degree}")
        gens.append(perm)

    identity = Permutation.identity(degree)
    elements = [identity]
    seen = {identity}
    frontier = [identity]
    while frontier:
        layer = []
        for x in frontier:
            for s in gens:
                y = s.compose(x)
                if y not in seen:
                    seen.add(y)
                    layer.append(y)
                    if len(seen) > config.max_group_elements:
                        raise CapExceededError("group order", config.max_group_elements, len(seen))
        layer.sort(key=lambda p: p.images)
        elements.extend(layer)
        frontier = layer

    group = FiniteGroup(name=name, degree=degree, generators=tuple(gens), elements=tuple(elements))
    logger.debug(f"[Group] built {name}: order {group.order}, degree {degree}")
    return group


def group_from_cayley_table(table: Sequence[Sequence[int]], name: str,
                            config: EngineConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """
    Convert a Cayley table into its right regular permutation representation.

    table[a][b] is the index of the product a*b; row/column 0 need not be the
    identity. Every element g becomes the permutation x -> x*g^-1, so that
    composing the images of a and b gives the image of table[a][b] under the
    left-action convention used throughout.
    """
    n = len(table)
    if any(len(row) != n for row in table):
        raise InputError("Cayley table must be square")
    identity = next((e for e in range(n) if all(table[e][x] == x for x in range(n))), None)
    if identity is None:
        raise InputError("Cayley table has no identity row")
    generators = []
    for g in range(n):
        inverse = next((h for h in range(n) if table[g][h] == identity), None)
        if inverse is None:
            raise InputError(f"Cayley table element {g} has no inverse")
        images = tuple(table[x][inverse] for x in range(n))
        generators.append(Permutation(images))
    return make_group(n, generators, name, config)


_LATTICE_MEMO: Dict[Tuple[FiniteGroup, int], SubgroupLattice] = {}


def register_lattice(lattice: SubgroupLattice, config: EngineConfig = DEFAULT_CONFIG) -> None:
    """Seed the in-process lattice memo (used when a lattice is loaded from cache)"""
    _LATTICE_MEMO[(lattice.group, config.max_lattice_order)] = lattice


def subgroups(group: FiniteGroup, config: EngineConfig = DEFAULT_CONFIG) -> SubgroupLattice:
    """
    Enumerate every subgroup of a group.

    Cyclic subgroups are generated first and then closed under pairwise joins
    until nothing new appears. Subgroups are ordered by (order, canonical_id).

    Raises:
        CapExceededError: group order above config.max_lattice_order
    """
    key = (group, config.max_lattice_order)
    if key in _LATTICE_MEMO:
        return _LATTICE_MEMO[key]
    if group.order > config.max_lattice_order:
        raise CapExceededError("group order for subgroup enumeration", config.max_lattice_order, group.order)

    found = set()
    for g in range(group.order):
        found.add(group.closure([g]))

    frontier = list(found)
    while frontier:
        current = list(found)
        fresh = []
        for a in frontier:
            for b in current:
                if a <= b or b <= a:
                    continue
                joined = group.closure(list(a) + list(b))
                if joined not in found:
                    found.add(joined)
                    fresh.append(joined)
        frontier = fresh

    subs = sorted((Subgroup(group, tuple(sorted(s))) for s in found),
                  key=lambda s: (s.order, s.members))
    lattice = _assemble_lattice(group, subs)
    _LATTICE_MEMO[key] = lattice
    logger.info(f"[Lattice] {group.name}: {len(subs)} subgroups in {len(lattice.conjugacy_classes)} conjugacy classes")
    return lattice


def _assemble_lattice(group: FiniteGroup, subs: List[Subgroup]) -> SubgroupLattice:
    by_members = {s.members: i for i, s in enumerate(subs)}

    inclusion = set()
    for i, a in enumerate(subs):
        for j, b in enumerate(subs):
            if a.order <= b.order and b.order % a.order == 0 and a.member_set <= b.member_set:
                inclusion.add((i, j))

    conj_rows = []
    for g in range(group.order):
        row = []
        for s in subs:
            image = tuple(sorted(group.conjugate_element(g, m) for m in s.members))
            row.append(by_members[image])
        conj_rows.append(tuple(row))

    witnesses: Dict[Tuple[int, int], int] = {}
    for i in range(len(subs)):
        for g in range(group.order):
            witnesses.setdefault((i, conj_rows[g][i]), g)

    classes = []
    assigned = set()
    for i in range(len(subs)):
        if i in assigned:
            continue
        members = tuple(sorted({conj_rows[g][i] for g in range(group.order)}))
        assigned.update(members)
        classes.append(members)

    labels = _label_subgroups(group, subs)
    return SubgroupLattice(
        group=group,
        subgroups=tuple(subs),
        inclusion=frozenset(inclusion),
        conjugacy_classes=tuple(classes),
        conjugation_witnesses=witnesses,
        conjugation_table=tuple(conj_rows),
        labels=tuple(labels),
    )


def _label_subgroups(group: FiniteGroup, subs: List[Subgroup]) -> List[str]:
    """e for the trivial subgroup, the group name for G, C<n>/H<n> otherwise"""
    bases = []
    for s in subs:
        if s.is_trivial:
            bases.append("e")
        elif s.is_whole:
            bases.append(group.name)
        elif any(group.element_order(m) == s.order for m in s.members):
            bases.append(f"C{s.order}")
        else:
            bases.append(f"H{s.order}")
    counts: Dict[str, int] = {}
    for b in bases:
        counts[b] = counts.get(b, 0) + 1
    seen: Dict[str, int] = {}
    labels = []
    for b in bases:
        if counts[b] == 1:
            labels.append(b)
        else:
            seen[b] = seen.get(b, 0) + 1
            labels.append(f"{b}.{seen[b]}")
    return labels


def lattice_of(subgroup: Subgroup, config: EngineConfig = DEFAULT_CONFIG) -> SubgroupLattice:
    """Lattice of the parent group of a subgroup"""
    return subgroups(subgroup.parent, config)


def _check_same_parent(a: Subgroup, b: Subgroup) -> None:
    if a.parent != b.parent:
        raise GroupMismatchError(f"subgroups belong to different groups ({a.parent.name}, {b.parent.name})")


def double_cosets(k: Subgroup, h: Subgroup, ambient: Optional[Subgroup] = None) -> DoubleCosetDecomposition:
    """
    Decompose ambient (default: the whole group) into double cosets K g H.

    Representatives are chosen as the least element index not yet covered.
    """
    _check_same_parent(k, h)
    group = k.parent
    if ambient is None:
        ambient = group.whole
    else:
        _check_same_parent(k, ambient)
        if not (k.member_set <= ambient.member_set and h.member_set <= ambient.member_set):
            raise NotASubgroupError("double coset factors must lie in the ambient subgroup")
    table = group.multiplication_table
    covered = set()
    reps = []
    cosets = []
    for g in ambient.members:
        if g in covered:
            continue
        coset = frozenset(table[table[x][g]][y] for x in k.members for y in h.members)
        covered |= coset
        reps.append(g)
        cosets.append(coset)
    return DoubleCosetDecomposition(left=k, right=h, representatives=tuple(reps), cosets=tuple(cosets))


def is_subconjugate(k: Subgroup, h: Subgroup) -> Optional[int]:
    """Least g with g K g^-1 contained in H, or None"""
    _check_same_parent(k, h)
    group = k.parent
    for g in range(group.order):
        if all(group.conjugate_element(g, m) in h.member_set for m in k.members):
            return g
    return None


def normalizer(h: Subgroup) -> Subgroup:
    group = h.parent
    members = [g for g in range(group.order)
               if all(group.conjugate_element(g, m) in h.member_set for m in h.members)]
    return Subgroup(group, tuple(members))


def weyl_order(h: Subgroup) -> int:
    """|N_G H| / |H|"""
    return normalizer(h).order // h.order


def brute_force_subgroups(group: FiniteGroup, config: EngineConfig = DEFAULT_CONFIG) -> List[Tuple[int, ...]]:
    """
    All subgroups by filtering every subset that contains the identity.

    Only used as an oracle against subgroups(); refuses groups above
    config.brute_force_order.
    """
    if group.order > config.brute_force_order:
        raise CapExceededError("group order for brute-force subgroup search", config.brute_force_order, group.order)
    table = group.multiplication_table
    others = list(range(1, group.order))
    result = []
    for size in range(len(others) + 1):
        for combo in itertools.combinations(others, size):
            members = (0,) + combo
            if group.order % len(members):
                continue
            member_set = set(members)
            if all(table[a][b] in member_set for a in members for b in members):
                result.append(members)
    return sorted(result, key=lambda m: (len(m), m))
