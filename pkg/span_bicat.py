"""
Spans of G-sets

Objects are finite H-sets held as realizations, 1-cells are spans
S <- A -> T composed by fiber product, and 2-cells are isomorphisms of spans
(only their existence is tracked). Translation groupoids and the coverings
induced by G-maps live here too, with the pullback-square comparison used to
check that products of G-sets pull back translation categories.
"""

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from config import DEFAULT_CONFIG, EngineConfig
from errors import BoundaryMismatchError, CapExceededError, InputError
from group_core import Subgroup, subgroups
from gsets import (
    GMap,
    GSet,
    Realization,
    all_gsets,
    decompose,
    element_product,
    equivariant_maps,
    gset,
    gset_from_dict,
    orbit,
    realize,
)
from indexing_systems import IndexingSystem

logger = logging.getLogger(__name__)


# ==============================================================================
# SPANS
# ==============================================================================

@dataclass(frozen=True)
class Span:
    """
    A span S <- A -> T of realizations at one level.

    admissible is filled in by compose() when it is given an indexing
    system; None means nobody checked.
    """
    left: GMap
    right: GMap
    admissible: Optional[bool] = field(default=None, compare=False)

    def __post_init__(self):
        if self.left.source != self.right.source:
            raise BoundaryMismatchError("span legs do not share an apex")

    @property
    def apex(self) -> Realization:
        return self.left.source

    @property
    def source(self) -> Realization:
        return self.left.target

    @property
    def target(self) -> Realization:
        return self.right.target

    @property
    def level(self) -> Subgroup:
        return self.apex.level

    def is_equivariant(self) -> bool:
        return self.left.is_equivariant() and self.right.is_equivariant()

    def is_admissible(self, ix: IndexingSystem) -> bool:
        """Both ends and the apex are admissible sets"""
        return all(ix.admits_gset(decompose(r)) for r in (self.source, self.apex, self.target))

    def describe(self) -> str:
        return f"{decompose(self.source)} <- {decompose(self.apex)} -> {decompose(self.target)}"

    def to_dict(self):
        """Standardized objects as G-set dicts and the legs as assignment arrays"""
        s = standardize(self)
        return {
            "source": decompose(s.source).to_dict(),
            "apex": decompose(s.apex).to_dict(),
            "target": decompose(s.target).to_dict(),
            "left": list(s.left.assignment),
            "right": list(s.right.assignment),
        }


def span_from_dict(data: dict, lattice) -> Span:
    """
    Rebuild a span from its JSON form.

    Raises:
        InputError: missing keys, or a leg that is not equivariant
    """
    try:
        source = realize(gset_from_dict(data["source"], lattice))
        apex = realize(gset_from_dict(data["apex"], lattice))
        target = realize(gset_from_dict(data["target"], lattice))
        left = GMap(apex, source, tuple(int(i) for i in data["left"]))
        right = GMap(apex, target, tuple(int(i) for i in data["right"]))
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed span: {e}") from None
    span = Span(left, right)
    if not span.is_equivariant():
        raise InputError("span legs are not equivariant")
    return span


def as_realization(x: Union[GSet, Realization]) -> Realization:
    return realize(x) if isinstance(x, GSet) else x


def identity_span(t: Union[GSet, Realization]) -> Span:
    r = as_realization(t)
    ident = GMap.identity(r)
    return Span(ident, ident)


def _isomorphisms(source: Realization, target: Realization) -> List[GMap]:
    return [f for f in equivariant_maps(source, target) if f.is_iso]


def _identification(left: Realization, right: Realization, given: Optional[GMap]) -> GMap:
    if given is not None:
        if given.source != left or given.target != right or not (given.is_iso and given.is_equivariant()):
            raise BoundaryMismatchError("the supplied identification is not an isomorphism of the boundaries")
        return given
    if left == right:
        return GMap.identity(left)
    if left.level != right.level:
        raise BoundaryMismatchError("spans meet at different levels")
    isos = _isomorphisms(left, right)
    if not isos:
        raise BoundaryMismatchError(f"boundaries {decompose(left)} and {decompose(right)} are not isomorphic")
    return isos[0]


def fiber_count(first: GMap, second: GMap) -> int:
    """|{(a, b) : first(a) = second(b)}| counted through fibers"""
    left_fibers: Dict[int, int] = {}
    for q in first.assignment:
        left_fibers[q] = left_fibers.get(q, 0) + 1
    right_fibers: Dict[int, int] = {}
    for q in second.assignment:
        right_fibers[q] = right_fibers.get(q, 0) + 1
    return sum(n * right_fibers.get(q, 0) for q, n in left_fibers.items())


def compose(s1: Span, s2: Span, identification: Optional[GMap] = None,
            ix: Optional[IndexingSystem] = None, config: EngineConfig = DEFAULT_CONFIG) -> Span:
    """
    Compose S <- A -> T with T <- B -> U by fiber product.

    Args:
        s1: First span
        s2: Second span
        identification: Isomorphism from s1.target to s2.source; found by
            search when omitted and the two are not identical
        ix: When given, the result records whether its apex is admissible
        config: Caps (max_apex_points)

    Returns:
        Span with apex {(a, b) : right(a) = left(b)} and projection legs

    Raises:
        BoundaryMismatchError: the middle objects cannot be identified
        CapExceededError: the apex would exceed config.max_apex_points
    """
    iso = _identification(s1.target, s2.source, identification)
    right1 = iso.compose(s1.right)
    size = fiber_count(right1, s2.left)
    if size > config.max_apex_points:
        raise CapExceededError("span composite apex", config.max_apex_points, size)

    by_target: Dict[int, List[int]] = {}
    for b, q in enumerate(s2.left.assignment):
        by_target.setdefault(q, []).append(b)
    pairs: List[Tuple[int, int]] = []
    for a, q in enumerate(right1.assignment):
        pairs.extend((a, b) for b in by_target.get(q, []))
    index = {p: i for i, p in enumerate(pairs)}

    a_rows, b_rows = s1.apex.action, s2.apex.action
    rows = tuple(tuple(index[(ra[a], rb[b])] for a, b in pairs) for ra, rb in zip(a_rows, b_rows))
    apex = Realization(s1.level, tuple(pairs), rows)
    left = GMap(apex, s1.source, tuple(s1.left.assignment[a] for a, _ in pairs))
    right = GMap(apex, s2.target, tuple(s2.right.assignment[b] for _, b in pairs))

    admissible = None
    if ix is not None:
        admissible = ix.admits_gset(decompose(apex))
        if not admissible:
            logger.warning(f"[Span] composite apex {decompose(apex)} is not admissible")
    logger.debug(f"[Span] composed apex has {apex.size} points")
    return Span(left, right, admissible)


def span_isomorphism(s1: Span, s2: Span) -> Optional[GMap]:
    """
    An isomorphism of apexes commuting with both legs, or None.

    Raises:
        BoundaryMismatchError: the spans do not share both ends
    """
    if s1.source != s2.source or s1.target != s2.target:
        raise BoundaryMismatchError("spans have different ends")
    a, b = s1.apex, s2.apex
    if a.size != b.size or decompose(a) != decompose(b):
        return None

    level = a.level
    source_orbits = a.orbits()
    target_orbits = b.orbits()
    orbit_of = {p: i for i, members in enumerate(target_orbits) for p in members}

    # per source orbit: (target orbit, partial assignment) choices
    options = []
    for members in source_orbits:
        x = members[0]
        stab = a.stabilizer(x)
        choices = []
        for y in b.fixed_points(stab):
            if b.stabilizer(y) != stab:
                continue
            if s2.left(y) != s1.left(x) or s2.right(y) != s1.right(x):
                continue
            partial = {a.image(h, x): b.image(h, y) for h in level.members}
            choices.append((orbit_of[y], partial))
        if not choices:
            return None
        options.append(choices)

    assignment = [0] * a.size
    used = set()

    def search(i: int) -> bool:
        if i == len(options):
            return True
        for target_orbit, partial in options[i]:
            if target_orbit in used:
                continue
            used.add(target_orbit)
            for p, q in partial.items():
                assignment[p] = q
            if search(i + 1):
                return True
            used.discard(target_orbit)
        return False

    if not search(0):
        return None
    return GMap(a, b, tuple(assignment))


def spans_isomorphic(s1: Span, s2: Span) -> bool:
    return span_isomorphism(s1, s2) is not None


def check_units(s: Span, config: EngineConfig = DEFAULT_CONFIG) -> Dict[str, bool]:
    return {
        "left-unit": spans_isomorphic(compose(identity_span(s.source), s, config=config), s),
        "right-unit": spans_isomorphic(compose(s, identity_span(s.target), config=config), s),
    }


def check_associativity(s1: Span, s2: Span, s3: Span, config: EngineConfig = DEFAULT_CONFIG) -> bool:
    one = compose(compose(s1, s2, config=config), s3, config=config)
    two = compose(s1, compose(s2, s3, config=config), config=config)
    return spans_isomorphic(one, two)


def _standard_iso(r: Realization) -> GMap:
    """Isomorphism from realize(decompose(r)) onto r"""
    standard = realize(decompose(r))
    level = r.level
    assignment = [0] * standard.size
    used = set()
    orbits = r.orbits()
    for members in standard.orbits():
        x = members[0]
        stab = standard.stabilizer(x)
        for i, candidate in enumerate(orbits):
            if i in used:
                continue
            hits = [p for p in candidate if r.stabilizer(p) == stab]
            if hits:
                used.add(i)
                for h in level.members:
                    assignment[standard.image(h, x)] = r.image(h, hits[0])
                break
    return GMap(standard, r, tuple(assignment))


def _inverse(f: GMap) -> GMap:
    inverse = [0] * f.target.size
    for p, q in enumerate(f.assignment):
        inverse[q] = p
    return GMap(f.target, f.source, tuple(inverse))


def standardize(s: Span) -> Span:
    """The same span with apex and both ends on standard realizations"""
    apex = _standard_iso(s.apex)
    source = _inverse(_standard_iso(s.source))
    target = _inverse(_standard_iso(s.target))
    left = source.compose(s.left.compose(apex))
    right = target.compose(s.right.compose(apex))
    return Span(left, right, s.admissible)


def random_span(level: Subgroup, rng: random.Random, max_cardinality: int = 4,
                ix: Optional[IndexingSystem] = None, source: Optional[Realization] = None,
                attempts: int = 20) -> Span:
    """
    A random span on standard realizations, starting at source when given.

    Falls back to the identity span of the source when no legs turn up.
    """
    pool = [t for t in all_gsets(level, max_cardinality) if ix is None or ix.admits_gset(t)]
    if source is None:
        source = realize(rng.choice(pool))
    for _ in range(attempts):
        apex = realize(rng.choice(pool))
        target = realize(rng.choice(pool))
        lefts = equivariant_maps(apex, source)
        rights = equivariant_maps(apex, target)
        if lefts and rights:
            return Span(rng.choice(lefts), rng.choice(rights))
    return identity_span(source)


# ==============================================================================
# TRANSLATION GROUPOIDS
# ==============================================================================

Morphism = Tuple[int, int]


@dataclass(frozen=True)
class TranslationGroupoid:
    """Objects are the points of a realization, morphisms (t, g): t -> g.t"""
    realization: Realization

    @property
    def level(self) -> Subgroup:
        return self.realization.level

    @property
    def objects(self) -> range:
        return range(self.realization.size)

    @property
    def morphisms(self) -> List[Morphism]:
        return [(t, g) for t in self.objects for g in self.level.members]

    @property
    def object_count(self) -> int:
        return self.realization.size

    @property
    def morphism_count(self) -> int:
        return self.realization.size * self.level.order

    def source(self, m: Morphism) -> int:
        return m[0]

    def target(self, m: Morphism) -> int:
        return self.realization.image(m[1], m[0])

    def identity(self, t: int) -> Morphism:
        return (t, 0)

    def then(self, first: Morphism, second: Morphism) -> Morphism:
        """first followed by second"""
        if self.target(first) != second[0]:
            raise InputError("morphisms are not composable")
        return (first[0], self.level.parent.mul(second[1], first[1]))

    def inverse(self, m: Morphism) -> Morphism:
        return (self.target(m), self.level.parent.inv(m[1]))

    def hom(self, t: int, u: int) -> List[Morphism]:
        return [(t, g) for g in self.level.members if self.realization.image(g, t) == u]

    def components(self) -> List[List[int]]:
        """Connected components by search along morphisms"""
        seen = set()
        result = []
        for start in self.objects:
            if start in seen:
                continue
            component = [start]
            seen.add(start)
            queue = deque([start])
            while queue:
                t = queue.popleft()
                for g in self.level.members:
                    u = self.realization.image(g, t)
                    if u not in seen:
                        seen.add(u)
                        component.append(u)
                        queue.append(u)
            result.append(sorted(component))
        return result

    def vertex_group(self, t: int) -> Subgroup:
        return subgroups(self.level.parent).find(g for _, g in self.hom(t, t))

    def is_groupoid(self) -> bool:
        for m in self.morphisms:
            inv = self.inverse(m)
            if self.then(m, inv) != self.identity(m[0]) or self.then(inv, m) != self.identity(self.target(m)):
                return False
        return True


def translation_groupoid(t: Union[GSet, Realization]) -> TranslationGroupoid:
    return TranslationGroupoid(as_realization(t))


@dataclass(frozen=True)
class Covering:
    """The functor B_T H -> B_S H induced by a G-map T -> S"""
    gmap: GMap

    @property
    def source(self) -> TranslationGroupoid:
        return TranslationGroupoid(self.gmap.source)

    @property
    def target(self) -> TranslationGroupoid:
        return TranslationGroupoid(self.gmap.target)

    def on_object(self, t: int) -> int:
        return self.gmap(t)

    def on_morphism(self, m: Morphism) -> Morphism:
        return (self.gmap(m[0]), m[1])

    def is_functor(self) -> bool:
        """Identities, endpoints and every composable pair are respected"""
        src, tgt = self.source, self.target
        for t in src.objects:
            if self.on_morphism(src.identity(t)) != tgt.identity(self.on_object(t)):
                return False
        for m in src.morphisms:
            image = self.on_morphism(m)
            if tgt.source(image) != self.on_object(src.source(m)) or tgt.target(image) != self.on_object(src.target(m)):
                return False
            for g in src.level.members:
                n = (src.target(m), g)
                if self.on_morphism(src.then(m, n)) != tgt.then(image, self.on_morphism(n)):
                    return False
        return True

    def has_unique_lifting(self) -> bool:
        """Each morphism out of f(t) lifts to exactly one morphism out of t"""
        src, tgt = self.source, self.target
        for t in src.objects:
            lifts: Dict[Morphism, int] = {}
            for g in src.level.members:
                image = self.on_morphism((t, g))
                lifts[image] = lifts.get(image, 0) + 1
            expected = [(self.on_object(t), g) for g in tgt.level.members]
            if sorted(lifts) != sorted(expected) or any(n != 1 for n in lifts.values()):
                return False
        return True

    def then(self, after: "Covering") -> "Covering":
        """This covering followed by after"""
        return Covering(after.gmap.compose(self.gmap))

    def fiber_sizes(self) -> List[int]:
        sizes = [0] * self.gmap.target.size
        for q in self.gmap.assignment:
            sizes[q] += 1
        return sizes


def covering_of(f: GMap) -> Covering:
    return Covering(f)


def indexed_product_exponent(c: Covering) -> GSet:
    """
    Exponent of the indexed product along a covering over a one-object groupoid.

    One orbit per connected component of the source, with the vertex group of
    its least object as stabilizer.

    Raises:
        InputError: the target groupoid has more than one object
    """
    if c.target.object_count != 1:
        raise InputError("indexed products are read off coverings of a one-object groupoid")
    src = c.source
    return gset(src.level, [(src.vertex_group(component[0]), 1) for component in src.components()])


def pullback_square_check(h: Subgroup, t: Union[GSet, Realization]) -> bool:
    """
    Compare B(G/H x T) with the pullback of B(T) -> B(pt) <- B(G/H).

    Builds the comparison functor (p, g) -> ((x, g), (y, g)) for p = (x, y)
    and checks that it is a functor and bijective on objects and morphisms.
    """
    r_t = as_realization(t)
    level = r_t.level
    if not h.member_set <= level.member_set:
        raise InputError("the subgroup must lie in the level of T")
    r_h = realize(orbit(level, h))
    product_groupoid = translation_groupoid(element_product(r_h, r_t))
    left, right = translation_groupoid(r_h), translation_groupoid(r_t)
    n = r_t.size

    def on_object(p: int) -> Tuple[int, int]:
        return divmod(p, n)

    def on_morphism(m: Morphism) -> Tuple[Morphism, Morphism]:
        x, y = on_object(m[0])
        return (x, m[1]), (y, m[1])

    # pullback over the one-object groupoid: pairs of morphisms with the same group element
    pullback_objects = {(x, y) for x in left.objects for y in right.objects}
    pullback_morphisms = {((x, g), (y, g)) for x in left.objects for y in right.objects for g in level.members}

    objects = [on_object(p) for p in product_groupoid.objects]
    morphisms = [on_morphism(m) for m in product_groupoid.morphisms]
    if set(objects) != pullback_objects or len(set(objects)) != len(objects):
        return False
    if set(morphisms) != pullback_morphisms or len(set(morphisms)) != len(morphisms):
        return False

    for m in product_groupoid.morphisms:
        (mx, my) = on_morphism(m)
        if (left.target(mx), right.target(my)) != on_object(product_groupoid.target(m)):
            return False
        for g in level.members:
            nxt = (product_groupoid.target(m), g)
            composite = on_morphism(product_groupoid.then(m, nxt))
            (nx, ny) = on_morphism(nxt)
            if composite != (left.then(mx, nx), right.then(my, ny)):
                return False
    return True
