"""
Exact rational representations and universes

Reps are given by one sparse matrix over QQ per generator of the acting
subgroup. Element matrices are produced by walking the Cayley graph, which
also checks that the generator matrices respect the group's relations.

V has only constituents of W exactly when the images of the equivariant maps
W -> V together span V; constituents_contained returns that basis of maps, or
a vector outside their span with a functional separating it. The annihilator
test (every a in QQ[H] with rho_W(a) = 0 also has rho_V(a) = 0) gives the same
verdict far more cheaply and is used for bulk admissibility questions.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from errors import (
    GroupMismatchError,
    InputError,
    InvalidRepresentationError,
    InvariantViolation,
    NotASubgroupError,
    UnknownPresetError,
)
from group_core import FiniteGroup, Subgroup, subgroups
from gsets import GSet, gset_from_dict, orbit, parse_gset, realize
from indexing_systems import IndexingSystem, candidate_pairs, validate

logger = logging.getLogger(__name__)

Dok = Dict[Tuple[int, int], object]


# ==============================================================================
# SPARSE HELPERS
# ==============================================================================

def sparse(dok: Dok, shape: Tuple[int, int]) -> DomainMatrix:
    return DomainMatrix.from_dok({k: v for k, v in dok.items() if v}, shape, QQ)


def identity(n: int) -> DomainMatrix:
    return DomainMatrix.eye(n, QQ).to_sparse()


def kron(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    rows_b, cols_b = b.shape
    dok = {}
    b_entries = b.to_dok().items()
    for (i, j), x in a.to_dok().items():
        for (k, l), y in b_entries:
            dok[(i * rows_b + k, j * cols_b + l)] = x * y
    return sparse(dok, (a.shape[0] * rows_b, a.shape[1] * cols_b))


def block_sum(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    ra, ca = a.shape
    dok = dict(a.to_dok())
    for (i, j), y in b.to_dok().items():
        dok[(ra + i, ca + j)] = y
    return sparse(dok, (ra + b.shape[0], ca + b.shape[1]))


def same_matrix(a: DomainMatrix, b: DomainMatrix) -> bool:
    if a.shape != b.shape:
        return False
    return {k: v for k, v in a.to_dok().items() if v} == {k: v for k, v in b.to_dok().items() if v}


def _rank(dok: Dok, shape: Tuple[int, int]) -> int:
    if not dok or 0 in shape:
        return 0
    return sparse(dok, shape).rank()


def _nullspace(dok: Dok, shape: Tuple[int, int]) -> List[Dict[int, object]]:
    """Basis of {x : A x = 0} as sparse coefficient dicts"""
    nrows, ncols = shape
    if ncols == 0:
        return []
    if not dok or nrows == 0:
        return [{j: QQ.one} for j in range(ncols)]
    basis = sparse(dok, shape).nullspace().to_dok()
    rows: Dict[int, Dict[int, object]] = {}
    for (r, c), v in basis.items():
        rows.setdefault(r, {})[c] = v
    return [rows[r] for r in sorted(rows)]


def to_rational(entry) -> object:
    """Parse "p/q", an int or a Fraction into QQ"""
    try:
        value = Fraction(entry) if not isinstance(entry, Fraction) else entry
    except (ValueError, TypeError, ZeroDivisionError):
        raise InvalidRepresentationError(f"matrix entry {entry!r} is not a rational number") from None
    return QQ(value.numerator, value.denominator)


def rational_str(x) -> str:
    return f"{QQ.numer(x)}/{QQ.denom(x)}"


# ==============================================================================
# REPRESENTATIONS
# ==============================================================================

@dataclass(frozen=True, eq=False)
class Rep:
    """A rational representation of a subgroup, one matrix per subgroup generator"""
    group: Subgroup
    dimension: int
    generator_matrices: Tuple[DomainMatrix, ...] = field(repr=False)
    name: str = ""

    def __post_init__(self):
        if len(self.generator_matrices) != len(self.group.generators):
            raise InvalidRepresentationError(
                f"{len(self.generator_matrices)} matrices for {len(self.group.generators)} generators")
        for m in self.generator_matrices:
            if m.shape != (self.dimension, self.dimension):
                raise InvalidRepresentationError(f"matrix of shape {m.shape}, expected dimension {self.dimension}")
            if m.domain != QQ:
                raise InvalidRepresentationError("matrices must be over QQ")

    @cached_property
    def element_matrices(self) -> Dict[int, DomainMatrix]:
        """
        rho(x) for every element x of the subgroup, from rho(s x) = rho(s) rho(x).

        Raises:
            InvalidRepresentationError: two words for the same element disagree
        """
        group = self.group.parent
        table = group.multiplication_table
        gens = list(zip(self.group.generators, [m.to_sparse() for m in self.generator_matrices]))
        result = {0: identity(self.dimension)}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for s, m in gens:
                y = table[s][x]
                image = m.matmul(result[x])
                if y in result:
                    if not same_matrix(result[y], image):
                        raise InvalidRepresentationError(
                            f"matrices for {self.name or 'rep'} do not satisfy the group relations")
                else:
                    result[y] = image
                    queue.append(y)
        if len(result) != self.group.order:
            raise InvariantViolation("generators did not reach every element of the subgroup")
        return result

    @cached_property
    def element_doks(self) -> Dict[int, Dok]:
        return {x: m.to_dok() for x, m in self.element_matrices.items()}

    def matrix(self, element: int) -> DomainMatrix:
        if element not in self.group.member_set:
            raise NotASubgroupError(f"element {element} is not in the acting subgroup")
        return self.element_matrices[element]

    @cached_property
    def annihilator(self) -> List[Dict[int, object]]:
        """
        Basis of the kernel of QQ[H] -> End(V), as dicts from member position
        to coefficient.
        """
        d = self.dimension
        dok = {}
        for p, x in enumerate(self.group.members):
            for (i, j), v in self.element_doks[x].items():
                dok[(i * d + j, p)] = v
        return _nullspace(dok, (d * d, self.group.order))

    def act_algebra(self, coefficients: Dict[int, object]) -> Dok:
        """rho(a) for a = sum of coefficients[p] * members[p], as a sparse dict"""
        total: Dok = {}
        for p, c in coefficients.items():
            for key, v in self.element_doks[self.group.members[p]].items():
                total[key] = total.get(key, QQ.zero) + c * v
        return {k: v for k, v in total.items() if v}

    def is_trivial(self) -> bool:
        return all(same_matrix(m, identity(self.dimension)) for m in self.generator_matrices)

    def to_dict(self):
        return {
            "kind": "matrix",
            "dimension": self.dimension,
            "matrices": [[[rational_str(x) for x in row] for row in m.to_list()] for m in self.generator_matrices],
        }


def _check_same_group(v: Rep, w: Rep) -> None:
    if v.group != w.group:
        raise GroupMismatchError("representations of different subgroups")


def trivial_rep(h: Subgroup, dimension: int = 1) -> Rep:
    return Rep(h, dimension, tuple(identity(dimension) for _ in h.generators), "trivial")


def matrix_rep(h: Subgroup, matrices: Sequence[Sequence[Sequence]], name: str = "") -> Rep:
    """Build a Rep from nested lists of rationals (ints, Fractions or "p/q" strings)"""
    if not matrices and h.generators:
        raise InvalidRepresentationError("no matrices given")
    dimension = len(matrices[0]) if matrices else 1
    built = []
    for m in matrices:
        if len(m) != dimension or any(len(row) != dimension for row in m):
            raise InvalidRepresentationError(f"matrices must all be {dimension}x{dimension}")
        dok = {(i, j): to_rational(x) for i, row in enumerate(m) for j, x in enumerate(row)}
        built.append(sparse(dok, (dimension, dimension)))
    return Rep(h, dimension, tuple(built), name)


def perm_rep(t: GSet) -> Rep:
    """R{T}: permutation matrices P[h.x][x] = 1 from realize(T)"""
    r = realize(t)
    matrices = []
    for s in t.level.generators:
        dok = {(r.image(s, x), x): QQ.one for x in range(r.size)}
        matrices.append(sparse(dok, (r.size, r.size)))
    return Rep(t.level, r.size, tuple(matrices), f"R{{{t}}}")


def tensor(v: Rep, w: Rep) -> Rep:
    _check_same_group(v, w)
    mats = tuple(kron(a, b) for a, b in zip(v.generator_matrices, w.generator_matrices))
    return Rep(v.group, v.dimension * w.dimension, mats, f"{v.name} x {w.name}")


def direct_sum(v: Rep, w: Rep) -> Rep:
    _check_same_group(v, w)
    mats = tuple(block_sum(a, b) for a, b in zip(v.generator_matrices, w.generator_matrices))
    return Rep(v.group, v.dimension + w.dimension, mats, f"{v.name} + {w.name}")


def restrict_rep(v: Rep, k: Subgroup) -> Rep:
    """Matrices of K's generators, each read off the element matrices of V"""
    if k.parent != v.group.parent or not k.member_set <= v.group.member_set:
        raise NotASubgroupError("restriction target is not a subgroup of the acting group")
    if k == v.group:
        return v
    return Rep(k, v.dimension, tuple(v.matrix(s) for s in k.generators), v.name)


def hom_space(v: Rep, w: Rep) -> List[DomainMatrix]:
    """
    Basis of equivariant maps V -> W.

    Solves M rho_V(g) = rho_W(g) M over the generators g; M is dim W x dim V.
    """
    dok, shape = _intertwiner_system(v, w)
    basis = _nullspace(dok, shape)
    dv, dw = v.dimension, w.dimension
    return [sparse({(idx // dv, idx % dv): c for idx, c in vec.items()}, (dw, dv)) for vec in basis]


def _intertwiner_system(v: Rep, w: Rep) -> Tuple[Dok, Tuple[int, int]]:
    _check_same_group(v, w)
    dv, dw = v.dimension, w.dimension
    dok: Dok = {}
    row = 0
    for a, b in zip(v.generator_matrices, w.generator_matrices):
        a_by_col: Dict[int, List[Tuple[int, object]]] = {}
        for (k, j), x in a.to_dok().items():
            a_by_col.setdefault(j, []).append((k, x))
        b_by_row: Dict[int, List[Tuple[int, object]]] = {}
        for (i, k), y in b.to_dok().items():
            b_by_row.setdefault(i, []).append((k, y))
        for i in range(dw):
            for j in range(dv):
                coefficients: Dict[int, object] = {}
                for k, x in a_by_col.get(j, []):
                    var = i * dv + k
                    coefficients[var] = coefficients.get(var, QQ.zero) + x
                for k, y in b_by_row.get(i, []):
                    var = k * dv + j
                    coefficients[var] = coefficients.get(var, QQ.zero) - y
                for var, c in coefficients.items():
                    if c:
                        dok[(row, var)] = c
                row += 1
    return dok, (row, dv * dw)


def hom_dim(v: Rep, w: Rep) -> int:
    dok, shape = _intertwiner_system(v, w)
    return shape[1] - _rank(dok, shape)


def annihilator_contained(v: Rep, w: Rep) -> bool:
    """Every a in QQ[H] with rho_W(a) = 0 also has rho_V(a) = 0"""
    _check_same_group(v, w)
    return all(not v.act_algebra(a) for a in w.annihilator)


def _joint_image(maps: Sequence[DomainMatrix], rows: int) -> Tuple[Dok, Tuple[int, int]]:
    """Columns of every map side by side"""
    dok: Dok = {}
    offset = 0
    for m in maps:
        for (i, j), x in m.to_dok().items():
            dok[(i, offset + j)] = x
        offset += m.shape[1]
    return dok, (rows, offset)


def is_intertwiner(m: DomainMatrix, w: Rep, v: Rep) -> bool:
    """m rho_W(g) = rho_V(g) m for every generator g"""
    if m.shape != (v.dimension, w.dimension):
        return False
    return all(same_matrix(m.matmul(a), b.matmul(m))
               for a, b in zip(w.generator_matrices, v.generator_matrices))


def _independent(maps: Sequence[DomainMatrix]) -> bool:
    if not maps:
        return True
    rows, cols = maps[0].shape
    dok = {(k, i * cols + j): x for k, m in enumerate(maps) for (i, j), x in m.to_dok().items()}
    return _rank(dok, (len(maps), rows * cols)) == len(maps)


@dataclass(frozen=True, eq=False)
class ConstituentRelation:
    """
    Verdict of constituents_contained(V, W) with its certificate.

    maps is a basis of the equivariant maps W -> V, each dim V x dim W.
    contained: the columns of the maps span V.
    not contained: functional vanishes on every column of every map but not
    on witness_vector, so witness_vector lies outside their joint image.
    """
    contained: bool
    maps: Tuple[DomainMatrix, ...] = field(repr=False)
    witness_vector: Optional[Dict[int, object]] = field(default=None, repr=False)
    functional: Optional[Dict[int, object]] = field(default=None, repr=False)

    def verify(self, v: Rep, w: Rep) -> bool:
        """Recheck equivariance, rank and the separating functional by direct products"""
        if not all(is_intertwiner(m, w, v) for m in self.maps):
            return False
        dok, shape = _joint_image(self.maps, v.dimension)
        if self.contained:
            return _rank(dok, shape) == v.dimension
        if not self.witness_vector or not self.functional:
            return False
        # maps must be a full basis of the hom space
        if len(self.maps) != hom_dim(w, v) or not _independent(self.maps):
            return False
        columns: Dict[int, object] = {}
        for (i, j), x in dok.items():
            if i in self.functional:
                columns[j] = columns.get(j, QQ.zero) + self.functional[i] * x
        if any(columns.values()):
            return False
        pairing = sum((self.functional.get(i, QQ.zero) * x for i, x in self.witness_vector.items()), QQ.zero)
        return bool(pairing)

    def summary(self) -> str:
        if self.contained:
            return f"contained ({len(self.maps)} equivariant maps W -> V span V)"
        terms = ", ".join(f"{rational_str(c)}*v{i}" for i, c in sorted(self.witness_vector.items()))
        return f"not contained: {terms} lies outside the images of all {len(self.maps)} equivariant maps W -> V"

    def to_dict(self):
        data = {
            "contained": self.contained,
            "maps": [[[rational_str(x) for x in row] for row in m.to_list()] for m in self.maps],
        }
        if not self.contained:
            data["witness_vector"] = {str(i): rational_str(c) for i, c in sorted(self.witness_vector.items())}
            data["functional"] = {str(i): rational_str(c) for i, c in sorted(self.functional.items())}
        return data


def constituents_contained(v: Rep, w: Rep) -> ConstituentRelation:
    """
    Every irreducible constituent of V occurs in W, decided by whether the
    images of the equivariant maps W -> V span V.

    Raises:
        InvariantViolation: the certificate does not re-verify, or the
            annihilator test disagrees
    """
    _check_same_group(v, w)
    maps = tuple(hom_space(w, v))
    dok, shape = _joint_image(maps, v.dimension)
    if _rank(dok, shape) == v.dimension:
        relation = ConstituentRelation(True, maps)
    else:
        transposed = {(j, i): x for (i, j), x in dok.items()}
        functional = _nullspace(transposed, (shape[1], shape[0]))[0]
        relation = ConstituentRelation(False, maps, {min(functional): QQ.one}, functional)
    if relation.contained != annihilator_contained(v, w):
        raise InvariantViolation(f"image-span and annihilator tests disagree for {v.name} in {w.name}")
    if not relation.verify(v, w):
        raise InvariantViolation(f"constituent certificate for {v.name} in {w.name} failed to re-verify")
    return relation


# ==============================================================================
# UNIVERSES
# ==============================================================================

@dataclass(frozen=True, eq=False)
class Universe:
    """
    Finitely many rational reps, each taken with infinite multiplicity.

    The trivial rep is always present; it is prepended when missing.
    """
    level: Subgroup
    generators: Tuple[Rep, ...]
    name: str = ""

    def __post_init__(self):
        for rep in self.generators:
            if rep.group != self.level:
                raise GroupMismatchError("universe generators must act through the universe's group")
        if not any(rep.dimension == 1 and rep.is_trivial() for rep in self.generators):
            object.__setattr__(self, "generators", (trivial_rep(self.level),) + tuple(self.generators))

    @property
    def group(self) -> FiniteGroup:
        return self.level.parent

    @cached_property
    def finite_witness(self) -> Rep:
        """U_fin: one copy of each generator"""
        total = self.generators[0]
        for rep in self.generators[1:]:
            total = direct_sum(total, rep)
        return total

    @cached_property
    def _restricted(self) -> Dict[Subgroup, Rep]:
        return {}

    def at(self, h: Subgroup) -> Rep:
        """U_fin restricted to H (memoized per universe)"""
        if h not in self._restricted:
            self._restricted[h] = restrict_rep(self.finite_witness, h)
        return self._restricted[h]

    def to_dict(self):
        lattice = subgroups(self.group)
        return {"group": self.group.name, "level": lattice.label(self.level),
                "generators": [rep.to_dict() for rep in self.generators]}


def restrict_universe(u: Universe, h: Subgroup) -> Universe:
    return Universe(h, tuple(restrict_rep(rep, h) for rep in u.generators), f"{u.name}|{subgroups(u.group).label(h)}")


def universe_leq(u1: Universe, u2: Universe) -> bool:
    """Every generator of u1 has only constituents of u2"""
    return all(annihilator_contained(rep, u2.finite_witness) for rep in u1.generators)


def _check_level(u: Universe, h: Subgroup, t: GSet) -> None:
    if not h.member_set <= u.level.member_set or h.parent != u.level.parent:
        raise NotASubgroupError("H must be a subgroup of the universe's group")
    if t.level != h:
        raise InputError("the G-set must live at H")


def admissibility_relation(u: Universe, h: Subgroup, t: GSet) -> ConstituentRelation:
    """Constituent test of R{T} x U_fin against U_fin at H"""
    _check_level(u, h, t)
    if t.is_empty:
        raise InputError("admissibility of the empty set is a convention, not a test")
    w = u.at(h)
    return constituents_contained(tensor(perm_rep(t), w), w)


def admissible_for_universe(u: Universe, h: Subgroup, t: GSet) -> bool:
    """The verdict of admissibility_relation, by the annihilator test"""
    _check_level(u, h, t)
    if t.is_empty:
        raise InputError("admissibility of the empty set is a convention, not a test")
    w = u.at(h)
    return annihilator_contained(tensor(perm_rep(t), w), w)


def indexing_system_of_universe(u: Universe) -> IndexingSystem:
    """
    Admissible orbits of a universe on the whole group.

    Raises:
        InvariantViolation: the result fails an indexing-system axiom
    """
    group = u.group
    pairs = []
    for h, k in candidate_pairs(group):
        if h == k or admissible_for_universe(u, h, orbit(h, k)):
            pairs.append((h, k))
    ix = IndexingSystem(group, frozenset(pairs), u.name or None)
    report = validate(ix)
    if not report.passed:
        raise InvariantViolation(f"universe {u.name} produced a non-indexing system: "
                                 f"{[r.counterexample for r in report.failures()]}")
    logger.info(f"[Universe] {u.name or group.name}: {ix}")
    return ix


def unisum_check(u: Universe, h: Subgroup, t: GSet) -> bool:
    """R{T} x U_fin and U_fin have the same constituents at H (T admissible)"""
    if not admissible_for_universe(u, h, t):
        raise InputError(f"{t} is not admissible for {u.name or 'the universe'}")
    w = u.at(h)
    return annihilator_contained(w, tensor(perm_rep(t), w))


# ==============================================================================
# PRESETS AND FILES
# ==============================================================================

# mixed universe: trivial + R{G/N} for the first normal subgroup N of this order
MIXED_QUOTIENT_ORDER = {
    "C4": 2, "C6": 2, "C8": 2, "C9": 3, "C27": 3,
    "S3": 3, "D4": 2, "Q8": 2, "A4": 4, "S4": 12,
}

# mixed universe given directly by matrices for the declared generators
MIXED_MATRICES = {
    "C2": [[[-1]]],
    "C3": [[[0, -1], [1, -1]]],
}

UNIVERSE_KINDS = ("trivial", "complete", "mixed")


def split_universe_name(name: str) -> Tuple[str, str]:
    """'C4-mixed' and 'mixed-C4' both give ('mixed', 'C4')"""
    first, _, second = name.strip().partition("-")
    if first.lower() in UNIVERSE_KINDS:
        return first.lower(), second
    if second.lower() in UNIVERSE_KINDS:
        return second.lower(), first
    raise UnknownPresetError(f"universe preset '{name}' should look like <kind>-<group>, kind in {UNIVERSE_KINDS}")


def universe_preset(kind: str, group: FiniteGroup) -> Universe:
    whole = group.whole
    label = f"{kind}-{group.name}"
    if kind == "trivial":
        return Universe(whole, (trivial_rep(whole),), label)
    if kind == "complete":
        return Universe(whole, (perm_rep(orbit(whole, group.trivial)),), label)
    if kind != "mixed":
        raise UnknownPresetError(f"unknown universe kind '{kind}'")
    if group.order == 1:
        return Universe(whole, (trivial_rep(whole),), label)
    if group.name in MIXED_MATRICES:
        return Universe(whole, (matrix_rep(whole, MIXED_MATRICES[group.name], "sign"),), label)
    if group.name in MIXED_QUOTIENT_ORDER:
        lattice = subgroups(group)
        order = MIXED_QUOTIENT_ORDER[group.name]
        normal = next(s for s in lattice.subgroups if s.order == order and lattice.is_normal(s))
        return Universe(whole, (perm_rep(orbit(whole, normal)),), label)
    raise UnknownPresetError(f"no mixed universe is defined for {group.name}")


def universe_from_dict(data: dict, group: FiniteGroup) -> Universe:
    """
    Read {"group", "generators": [{"kind": "perm", "gset": ...} | {"kind": "matrix", ...}]}.

    Matrix entries are rationals written as "p/q" strings (ints also accepted).
    """
    if data.get("group") not in (None, group.name):
        raise GroupMismatchError(f"universe is for {data.get('group')}, not {group.name}")
    lattice = subgroups(group)
    whole = group.whole
    reps = []
    for i, entry in enumerate(data.get("generators", [])):
        if not isinstance(entry, dict):
            raise InputError(f"universe generator {i} must be an object")
        kind = entry.get("kind")
        if kind == "perm":
            gset_entry = entry.get("gset")
            if isinstance(gset_entry, str):
                t = parse_gset(gset_entry, lattice, whole)
            else:
                t = gset_from_dict(gset_entry, lattice)
            if t.level != whole:
                raise InputError("universe permutation generators must be G-sets for the whole group")
            reps.append(perm_rep(t))
        elif kind == "matrix":
            rep = matrix_rep(whole, entry.get("matrices", []), entry.get("name", f"generator {i}"))
            if rep.dimension != int(entry.get("dimension", rep.dimension)):
                raise InvalidRepresentationError("declared dimension does not match the matrices")
            reps.append(rep)
        else:
            raise InputError(f"unknown universe generator kind {kind!r}")
    return Universe(whole, tuple(reps), data.get("name", ""))
