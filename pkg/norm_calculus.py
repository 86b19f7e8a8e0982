"""
Norm calculus

Expressions over restriction, norm, smash and internal norm (Npow) are
immutable trees. Their meaning at one level H is the exponent: a map from each
variable to an H-set, so that the expression is the indexed smash of copies of
the variable over that set. normalize() rewrites an expression into a sorted
smash of atoms

    X | res[J](X) | norm[L](res[J](X))

one atom per orbit of each exponent, and cross-checks the atoms against the
exponents computed structurally. Two expressions are equivalent exactly when
their exponents are isomorphic.

Grammar:

    e := X | res[K](e) | norm[H](e) | norm[H;R](e) | smash(e, ...)
       | Npow[T](e) | Npow[T;R](e) | unit[H]

K, H are subgroup labels (G is the whole group); T is a G-set literal such as
"2*C4/C2, C4/e" in which H names the level of e.
"""

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from errors import (
    InadmissibleError,
    InputError,
    InvariantViolation,
    LevelMismatchError,
    ParseError,
    RuleNotApplicableError,
    TypeCheckError,
)
from group_core import FiniteGroup, Subgroup, SubgroupLattice, double_cosets, subgroups
from gsets import (
    GMap,
    GSet,
    Realization,
    conjugate_gset,
    coproduct,
    decompose,
    element_coproduct,
    element_induce,
    element_product,
    element_restrict,
    empty,
    gset,
    induce,
    is_isomorphic,
    mark_subgroups,
    orbit,
    parse_gset,
    point,
    product,
    realize,
    restrict,
)
from indexing_systems import IndexingSystem

logger = logging.getLogger(__name__)

KEYWORDS = ("res", "norm", "smash", "Npow", "unit")


# ==============================================================================
# EXPRESSIONS
# ==============================================================================

class NormExpr:
    """Base class of expression nodes"""

    def children(self) -> Tuple["NormExpr", ...]:
        return ()


@dataclass(frozen=True)
class Var(NormExpr):
    symbol: str


@dataclass(frozen=True)
class Res(NormExpr):
    target: Subgroup
    body: NormExpr

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Norm(NormExpr):
    target: Subgroup
    body: NormExpr
    ring: Optional[str] = None

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Smash(NormExpr):
    """Smash product of factors at a common level; no factors is the unit"""
    factors: Tuple[NormExpr, ...]
    level: Subgroup

    def children(self):
        return self.factors


@dataclass(frozen=True)
class InternalNorm(NormExpr):
    exponent: GSet
    body: NormExpr
    ring: Optional[str] = None

    def children(self):
        return (self.body,)


def with_children(e: NormExpr, children: Sequence[NormExpr]) -> NormExpr:
    if isinstance(e, Var):
        return e
    if isinstance(e, Res):
        return Res(e.target, children[0])
    if isinstance(e, Norm):
        return Norm(e.target, children[0], e.ring)
    if isinstance(e, Smash):
        return Smash(tuple(children), e.level)
    if isinstance(e, InternalNorm):
        return InternalNorm(e.exponent, children[0], e.ring)
    raise TypeError(f"not an expression: {e!r}")


def subterm(e: NormExpr, path: Sequence[int]) -> NormExpr:
    for i in path:
        e = e.children()[i]
    return e


def replace_at(e: NormExpr, path: Sequence[int], new: NormExpr) -> NormExpr:
    if not path:
        return new
    kids = list(e.children())
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(e, kids)


def depth(e: NormExpr) -> int:
    kids = e.children()
    return 0 if not kids else 1 + max(depth(k) for k in kids)


def variables(e: NormExpr) -> List[str]:
    if isinstance(e, Var):
        return [e.symbol]
    seen: List[str] = []
    for k in e.children():
        for v in variables(k):
            if v not in seen:
                seen.append(v)
    return sorted(seen)


@lru_cache(maxsize=65536)
def level_of(e: NormExpr, group: FiniteGroup) -> Subgroup:
    """
    Level of a well-typed expression.

    Raises:
        TypeCheckError: a subgroup constraint fails
    """
    if isinstance(e, Var):
        return group.whole
    if isinstance(e, Res):
        inner = level_of(e.body, group)
        if not e.target.member_set <= inner.member_set:
            raise TypeCheckError(f"res[{_label(group, e.target)}] applied to an expression at {_label(group, inner)}")
        return e.target
    if isinstance(e, Norm):
        inner = level_of(e.body, group)
        if not inner.member_set <= e.target.member_set:
            raise TypeCheckError(f"norm[{_label(group, e.target)}] applied to an expression at {_label(group, inner)}")
        return e.target
    if isinstance(e, Smash):
        for f in e.factors:
            if level_of(f, group) != e.level:
                raise TypeCheckError(f"smash factors must all live at {_label(group, e.level)}")
        return e.level
    if isinstance(e, InternalNorm):
        inner = level_of(e.body, group)
        if e.exponent.level != inner:
            raise TypeCheckError(f"Npow exponent lives at {_label(group, e.exponent.level)}, "
                                 f"body at {_label(group, inner)}")
        return inner
    raise TypeError(f"not an expression: {e!r}")


def _label(group: FiniteGroup, h: Subgroup) -> str:
    return subgroups(group).label(h)


def typecheck(e: NormExpr, group: FiniteGroup, ix: Optional[IndexingSystem] = None) -> Subgroup:
    """
    Level of e, enforcing admissibility of every norm when ix is given.

    Raises:
        TypeCheckError: levels do not fit
        InadmissibleError: a norm H/K or an exponent T is not admissible in ix
    """
    level = level_of(e, group)
    if ix is None:
        return level
    if ix.group != group:
        raise LevelMismatchError("indexing system belongs to another group")
    for node in walk(e):
        if isinstance(node, Norm):
            inner = level_of(node.body, group)
            if not ix.admits(node.target, inner):
                raise InadmissibleError(
                    f"norm {_label(group, node.target)}/{_label(group, inner)} is not admissible",
                    (node.target, inner))
        elif isinstance(node, InternalNorm):
            if not ix.admits_gset(node.exponent):
                raise InadmissibleError(
                    f"Npow[{node.exponent}] is not admissible at {_label(group, node.exponent.level)}",
                    (node.exponent.level, node.exponent))
    return level


def walk(e: NormExpr) -> Iterator[NormExpr]:
    yield e
    for k in e.children():
        yield from walk(k)


# ==============================================================================
# RENDERING AND PARSING
# ==============================================================================

def render(e: NormExpr, group: FiniteGroup) -> str:
    lattice = subgroups(group)

    def ring(r):
        return f";{r}" if r else ""

    def go(x: NormExpr) -> str:
        if isinstance(x, Var):
            return x.symbol
        if isinstance(x, Res):
            return f"res[{lattice.label(x.target)}]({go(x.body)})"
        if isinstance(x, Norm):
            return f"norm[{lattice.label(x.target)}{ring(x.ring)}]({go(x.body)})"
        if isinstance(x, Smash):
            if not x.factors:
                return f"unit[{lattice.label(x.level)}]"
            return "smash(" + ", ".join(go(f) for f in x.factors) + ")"
        if isinstance(x, InternalNorm):
            literal = str(x.exponent) if not x.exponent.is_empty else "{}"
            return f"Npow[{literal}{ring(x.ring)}]({go(x.body)})"
        raise TypeError(f"not an expression: {x!r}")

    return go(e)


class _Parser:
    """Recursive descent over the expression grammar"""

    def __init__(self, text: str, group: FiniteGroup):
        self.text = text
        self.pos = 0
        self.group = group
        self.lattice: SubgroupLattice = subgroups(group)

    def fail(self, message: str, position: Optional[int] = None):
        raise ParseError(message, self.pos if position is None else position, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail(f"expected '{ch}'")
        self.pos += 1

    def identifier(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            self.fail("expected an identifier")
        return self.text[start:self.pos]

    def bracket(self) -> Tuple[str, Optional[str], int]:
        """Raw text inside [...] split at ';' into (content, ring)"""
        self.expect("[")
        start = self.pos
        end = self.text.find("]", start)
        if end < 0:
            self.fail("unclosed '['", start)
        self.pos = end + 1
        content, _, ring = self.text[start:end].partition(";")
        return content.strip(), (ring.strip() or None), start

    def subgroup(self, label: str, position: int) -> Subgroup:
        try:
            return self.lattice.by_label(label)
        except InputError as e:
            raise ParseError(str(e), position, self.text) from None

    def expression(self) -> NormExpr:
        start = self.pos
        name = self.identifier()
        if name == "res":
            label, ring, where = self.bracket()
            if ring:
                self.fail("res[...] takes no ring annotation", where)
            target = self.subgroup(label, where)
            return Res(target, self.argument())
        if name == "norm":
            label, ring, where = self.bracket()
            target = self.subgroup(label, where)
            return Norm(target, self.argument(), ring)
        if name == "unit":
            label, ring, where = self.bracket()
            return Smash((), self.subgroup(label, where))
        if name == "Npow":
            literal, ring, where = self.bracket()
            body = self.argument()
            level = self.level(body, where)
            try:
                exponent = parse_gset(literal, self.lattice, level)
            except ParseError as e:
                raise ParseError(str(e).split(" at position")[0], where + e.position, self.text) from None
            except InputError as e:
                raise ParseError(str(e), where, self.text) from None
            return InternalNorm(exponent, body, ring)
        if name == "smash":
            self.expect("(")
            factors = [self.expression()]
            while self.peek() == ",":
                self.pos += 1
                factors.append(self.expression())
            self.expect(")")
            return Smash(tuple(factors), self.level(factors[0], start))
        if name in KEYWORDS:
            self.fail(f"'{name}' needs arguments", start)
        return Var(name)

    def argument(self) -> NormExpr:
        self.expect("(")
        e = self.expression()
        self.expect(")")
        return e

    def level(self, e: NormExpr, position: int) -> Subgroup:
        try:
            return level_of(e, self.group)
        except TypeCheckError as err:
            raise ParseError(str(err), position, self.text) from None

    def parse(self) -> NormExpr:
        e = self.expression()
        if self.peek():
            self.fail("unexpected trailing input")
        return e


def parse(text: str, group: FiniteGroup) -> NormExpr:
    """Parse an expression over group; the result still needs typecheck()"""
    return _Parser(text, group).parse()


# ==============================================================================
# EXPONENTS
# ==============================================================================

@dataclass(frozen=True)
class CanonicalForm:
    """Per-variable exponent G-sets at a level; empty exponents are dropped"""
    level: Subgroup
    exponents: Tuple[Tuple[str, GSet], ...]

    def exponent(self, symbol: str) -> GSet:
        for s, t in self.exponents:
            if s == symbol:
                return t
        return empty(self.level)

    def same_as(self, other: "CanonicalForm") -> bool:
        """Equal level and isomorphic exponents for every variable"""
        if self.level != other.level:
            return False
        symbols = {s for s, _ in self.exponents} | {s for s, _ in other.exponents}
        return all(is_isomorphic(self.exponent(s), other.exponent(s)) for s in symbols)

    def to_expression(self) -> NormExpr:
        """One atom per orbit: X, res[J](X) or norm[H](res[J](X))"""
        whole = self.level.parent.whole
        atoms: List[NormExpr] = []
        for symbol, t in self.exponents:
            x = Var(symbol)
            for k, m in t.counts:
                restricted = x if k == whole else Res(k, x)
                atom = restricted if k == self.level else Norm(self.level, restricted)
                atoms.extend([atom] * m)
        atoms.sort(key=sort_key)
        if len(atoms) == 1:
            return atoms[0]
        return Smash(tuple(atoms), self.level)

    def render(self) -> str:
        return render(self.to_expression(), self.level.parent)

    def to_dict(self):
        lattice = subgroups(self.level.parent)
        return {"level": lattice.label(self.level),
                "exponents": {s: t.to_dict() for s, t in self.exponents}}


def _form(level: Subgroup, exponents: Dict[str, GSet]) -> CanonicalForm:
    return CanonicalForm(level, tuple(sorted((s, t) for s, t in exponents.items() if not t.is_empty)))


@lru_cache(maxsize=65536)
def exponents(e: NormExpr, group: FiniteGroup) -> CanonicalForm:
    """Structural exponents: Res restricts, Norm induces, smash adds, Npow multiplies"""
    level = level_of(e, group)
    if isinstance(e, Var):
        return _form(level, {e.symbol: point(level)})
    if isinstance(e, Res):
        inner = exponents(e.body, group)
        return _form(level, {s: restrict(t, level) for s, t in inner.exponents})
    if isinstance(e, Norm):
        inner = exponents(e.body, group)
        return _form(level, {s: induce(t, level) for s, t in inner.exponents})
    if isinstance(e, Smash):
        total: Dict[str, GSet] = {}
        for f in e.factors:
            for s, t in exponents(f, group).exponents:
                total[s] = coproduct(total[s], t) if s in total else t
        return _form(level, total)
    if isinstance(e, InternalNorm):
        inner = exponents(e.body, group)
        return _form(level, {s: product(e.exponent, t) for s, t in inner.exponents})
    raise TypeError(f"not an expression: {e!r}")


def element_exponents(e: NormExpr, group: FiniteGroup) -> Dict[str, Realization]:
    """Exponents computed on realized point sets, without marks or double cosets"""
    level = level_of(e, group)
    if isinstance(e, Var):
        return {e.symbol: realize(point(level))}
    if isinstance(e, Res):
        return {s: element_restrict(r, level) for s, r in element_exponents(e.body, group).items()}
    if isinstance(e, Norm):
        return {s: element_induce(r, level) for s, r in element_exponents(e.body, group).items()}
    if isinstance(e, Smash):
        total: Dict[str, Realization] = {}
        for f in e.factors:
            for s, r in element_exponents(f, group).items():
                total[s] = element_coproduct(total[s], r) if s in total else r
        return total
    if isinstance(e, InternalNorm):
        base = realize(e.exponent)
        return {s: element_product(base, r) for s, r in element_exponents(e.body, group).items()}
    raise TypeError(f"not an expression: {e!r}")


def oracle_form(e: NormExpr, group: FiniteGroup) -> CanonicalForm:
    """CanonicalForm read off the orbit decomposition of element_exponents"""
    level = level_of(e, group)
    return _form(level, {s: decompose(r) for s, r in element_exponents(e, group).items() if r.size})


# ==============================================================================
# REWRITE RULES
# ==============================================================================

def sort_key(e: NormExpr):
    if isinstance(e, Var):
        return (0, e.symbol)
    if isinstance(e, Res):
        return (1, (e.target.order, e.target.members), sort_key(e.body))
    if isinstance(e, Norm):
        return (2, (e.target.order, e.target.members), sort_key(e.body), e.ring or "")
    if isinstance(e, Smash):
        return (3, (e.level.order, e.level.members), tuple(sort_key(f) for f in e.factors))
    if isinstance(e, InternalNorm):
        t = e.exponent
        key = tuple((k.order, k.members, m) for k, m in t.counts)
        return (4, (t.level.order, t.level.members), key, sort_key(e.body), e.ring or "")
    raise TypeError(f"not an expression: {e!r}")


def conjugate_expr(e: NormExpr, g: int, group: FiniteGroup) -> NormExpr:
    """The conjugate g.e, living at g level(e) g^-1; variables are G-objects"""
    lattice = subgroups(group)
    if isinstance(e, Var):
        return e
    if isinstance(e, Res):
        return Res(lattice.conjugate(e.target, g), conjugate_expr(e.body, g, group))
    if isinstance(e, Norm):
        return Norm(lattice.conjugate(e.target, g), conjugate_expr(e.body, g, group), e.ring)
    if isinstance(e, Smash):
        return Smash(tuple(conjugate_expr(f, g, group) for f in e.factors), lattice.conjugate(e.level, g))
    if isinstance(e, InternalNorm):
        return InternalNorm(conjugate_gset(e.exponent, g), conjugate_expr(e.body, g, group), e.ring)
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True)
class Rule:
    """A named rewrite at the root of an expression; apply returns None when it does not match"""
    name: str
    identity: str
    apply: Callable[[NormExpr, FiniteGroup], Optional[NormExpr]] = field(repr=False, compare=False)


def _smash_flatten(e, group):
    if isinstance(e, Smash) and any(isinstance(f, Smash) for f in e.factors):
        flat: List[NormExpr] = []
        for f in e.factors:
            flat.extend(f.factors if isinstance(f, Smash) else [f])
        return Smash(tuple(flat), e.level)
    return None


def _smash_unit(e, group):
    if isinstance(e, Smash) and len(e.factors) == 1:
        return e.factors[0]
    return None


def _res_id(e, group):
    if isinstance(e, Res) and level_of(e.body, group) == e.target:
        return e.body
    return None


def _norm_id(e, group):
    if isinstance(e, Norm) and level_of(e.body, group) == e.target:
        return e.body
    return None


def _res_res(e, group):
    if isinstance(e, Res) and isinstance(e.body, Res):
        return Res(e.target, e.body.body)
    return None


def _norm_norm(e, group):
    if isinstance(e, Norm) and isinstance(e.body, Norm):
        return Norm(e.target, e.body.body, e.ring or e.body.ring)
    return None


def _res_smash(e, group):
    if isinstance(e, Res) and isinstance(e.body, Smash):
        return Smash(tuple(Res(e.target, f) for f in e.body.factors), e.target)
    return None


def _norm_smash(e, group):
    if isinstance(e, Norm) and isinstance(e.body, Smash):
        return Smash(tuple(Norm(e.target, f, e.ring) for f in e.body.factors), e.target)
    return None


def _double_coset(e, group):
    if not (isinstance(e, Res) and isinstance(e.body, Norm)):
        return None
    lattice = subgroups(group)
    k = e.target
    norm = e.body
    h = norm.target
    j = level_of(norm.body, group)
    factors = []
    for g in double_cosets(k, j, ambient=h).representatives:
        conjugate = conjugate_expr(norm.body, g, group)
        meet = lattice.intersection(k, lattice.conjugate(j, g))
        factors.append(Norm(k, Res(meet, conjugate), norm.ring))
    return Smash(tuple(factors), k)


def _npow_expand(e, group):
    if not isinstance(e, InternalNorm):
        return None
    t = e.exponent
    factors = []
    for k, m in t.counts:
        factors.extend([Norm(t.level, Res(k, e.body), e.ring)] * m)
    return Smash(tuple(factors), t.level)


def _conj_canon(e, group):
    if not (isinstance(e, Norm) and isinstance(e.body, Res)):
        return None
    h = e.target
    j = e.body.target
    inner = level_of(e.body.body, group)
    if not h.member_set <= inner.member_set:
        return None
    rep = subgroups(group).representative_within(h, j)
    if rep == j:
        return None
    return Norm(h, Res(rep, e.body.body), e.ring)


def _smash_sort(e, group):
    if isinstance(e, Smash):
        ordered = tuple(sorted(e.factors, key=sort_key))
        if ordered != e.factors:
            return Smash(ordered, e.level)
    return None


def _npow_product(e, group):
    if isinstance(e, InternalNorm) and isinstance(e.body, InternalNorm):
        return InternalNorm(product(e.exponent, e.body.exponent), e.body.body, e.ring or e.body.ring)
    return None


def _res_npow(e, group):
    if isinstance(e, Res) and isinstance(e.body, InternalNorm):
        inner = e.body
        return InternalNorm(restrict(inner.exponent, e.target), Res(e.target, inner.body), inner.ring)
    return None


def _norm_res_fold(e, group):
    if not (isinstance(e, Norm) and isinstance(e.body, Res)):
        return None
    h = e.target
    inner = e.body.body
    if not h.member_set <= level_of(inner, group).member_set:
        return None
    body = inner if level_of(inner, group) == h else Res(h, inner)
    return InternalNorm(orbit(h, e.body.target), body, e.ring)


RULES: Dict[str, Rule] = {r.name: r for r in [
    Rule("smash-flatten", "a ^ (b ^ c) = a ^ b ^ c", _smash_flatten),
    Rule("smash-unit", "a smash of one factor is that factor", _smash_unit),
    Rule("res-id", "res[H] of an H-object is the object", _res_id),
    Rule("norm-id", "norm[H] of an H-object is the object", _norm_id),
    Rule("res-res", "res[K] res[H] e = res[K] e", _res_res),
    Rule("norm-norm", "norm[L] norm[H] e = norm[L] e", _norm_norm),
    Rule("res-smash", "res[K](a ^ b) = res[K] a ^ res[K] b", _res_smash),
    Rule("norm-smash", "norm[H](a ^ b) = norm[H] a ^ norm[H] b", _norm_smash),
    Rule("double-coset", "res[K] norm[H] e = smash over K\\H/J of norm[K] res[K n gJg^-1] (g.e)", _double_coset),
    Rule("npow-expand", "Npow[H/K1 + ... + H/Km] e = smash of norm[H] res[Ki] e", _npow_expand),
    Rule("conj-canon", "norm[H] res[J] e = norm[H] res[hJh^-1] e for h in H", _conj_canon),
    Rule("smash-sort", "smash is symmetric", _smash_sort),
    Rule("npow-product", "Npow[S] Npow[T] e = Npow[S x T] e", _npow_product),
    Rule("res-npow", "res[K] Npow[T] e = Npow[res[K] T] res[K] e", _res_npow),
    Rule("norm-res-fold", "norm[H] res[K] e = Npow[H/K] res[H] e", _norm_res_fold),
]}

STRATEGY = (
    "smash-flatten", "smash-unit", "res-id", "norm-id", "res-res", "norm-norm",
    "res-smash", "norm-smash", "double-coset", "npow-expand", "conj-canon", "smash-sort",
)


def step_rewrite(e: NormExpr, rule: str, group: FiniteGroup) -> NormExpr:
    """
    Apply one named rule at the root.

    Raises:
        RuleNotApplicableError: the rule does not match e
    """
    if rule not in RULES:
        raise RuleNotApplicableError(f"unknown rule '{rule}'")
    level_of(e, group)
    result = RULES[rule].apply(e, group)
    if result is None:
        raise RuleNotApplicableError(f"rule '{rule}' does not apply to {render(e, group)}")
    return result


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    identity: str
    path: Tuple[int, ...]
    before: NormExpr
    after: NormExpr


@dataclass
class RewriteTrace:
    """Every rewrite applied by normalize, in order"""
    start: NormExpr
    steps: List[RewriteStep] = field(default_factory=list)

    def replay(self, group: FiniteGroup) -> NormExpr:
        """
        Re-apply every step from the start expression.

        Raises:
            InvariantViolation: a step does not reproduce its recorded result
        """
        current = self.start
        for step in self.steps:
            if current != step.before:
                raise InvariantViolation(f"trace diverged before rule {step.rule}")
            rewritten = step_rewrite(subterm(current, step.path), step.rule, group)
            current = replace_at(current, step.path, rewritten)
            if current != step.after:
                raise InvariantViolation(f"rule {step.rule} did not reproduce its recorded result")
        return current

    def rules_used(self) -> List[str]:
        return [s.rule for s in self.steps]

    def to_dict(self, group: FiniteGroup):
        return {"start": render(self.start, group),
                "steps": [{"rule": s.rule, "identity": s.identity, "path": list(s.path),
                           "before": render(s.before, group), "after": render(s.after, group)}
                          for s in self.steps]}


def _innermost(e: NormExpr, group: FiniteGroup, path: Tuple[int, ...] = ()):
    """Leftmost-innermost redex as (path, rule name, replacement)"""
    for i, child in enumerate(e.children()):
        found = _innermost(child, group, path + (i,))
        if found:
            return found
    for name in STRATEGY:
        result = RULES[name].apply(e, group)
        if result is not None:
            return path, name, result
    return None


@dataclass(frozen=True)
class Normalization:
    form: CanonicalForm
    expression: NormExpr
    trace: RewriteTrace = field(compare=False)


def read_atoms(e: NormExpr, group: FiniteGroup) -> CanonicalForm:
    """
    Exponents of a smash of atoms.

    Raises:
        InvariantViolation: e is not a smash of atoms
    """
    level = level_of(e, group)
    factors = e.factors if isinstance(e, Smash) else (e,)
    pieces: Dict[str, List[Tuple[Subgroup, int]]] = {}
    for f in factors:
        if isinstance(f, Var):
            pieces.setdefault(f.symbol, []).append((level, 1))
        elif isinstance(f, Res) and isinstance(f.body, Var):
            pieces.setdefault(f.body.symbol, []).append((f.target, 1))
        elif isinstance(f, Norm) and isinstance(f.body, Res) and isinstance(f.body.body, Var):
            pieces.setdefault(f.body.body.symbol, []).append((f.body.target, 1))
        else:
            raise InvariantViolation(f"normal form factor {render(f, group)} is not an atom")
    return _form(level, {s: gset(level, p) for s, p in pieces.items()})


def normalize(e: NormExpr, group: FiniteGroup, ix: Optional[IndexingSystem] = None,
              max_steps: int = 100_000) -> Normalization:
    """
    Rewrite e to its normal form, recording every step.

    Args:
        e: Expression (typechecked here, gated by ix when given)
        group: Ambient group
        ix: Indexing system for admissibility gating; None is ungated
        max_steps: Guard against a rewriting loop

    Returns:
        Normalization with the canonical form, normal expression and trace
    """
    typecheck(e, group, ix)
    structural = exponents(e, group)
    trace = RewriteTrace(e)
    current = e
    for _ in range(max_steps):
        found = _innermost(current, group)
        if found is None:
            break
        path, name, replacement = found
        after = replace_at(current, path, replacement)
        trace.steps.append(RewriteStep(name, RULES[name].identity, path, current, after))
        current = after
    else:
        raise InvariantViolation(f"normalization did not terminate within {max_steps} steps")

    from_atoms = read_atoms(current, group)
    if from_atoms != structural:
        raise InvariantViolation(
            f"normal form {render(current, group)} disagrees with the exponents of {render(e, group)}")
    logger.debug(f"[Norm] {render(e, group)} -> {render(current, group)} in {len(trace.steps)} steps")
    return Normalization(structural, current, trace)


def equivalent(e1: NormExpr, e2: NormExpr, group: FiniteGroup, ix: Optional[IndexingSystem] = None) -> bool:
    """
    Canonical forms agree.

    Raises:
        LevelMismatchError: the expressions live at different levels
    """
    l1, l2 = typecheck(e1, group, ix), typecheck(e2, group, ix)
    if l1 != l2:
        raise LevelMismatchError(f"expressions live at {_label(group, l1)} and {_label(group, l2)}")
    return normalize(e1, group, ix).form.same_as(normalize(e2, group, ix).form)


@dataclass(frozen=True)
class OracleComparison:
    """Rewriting, structural exponents and the element-level oracle side by side"""
    rewrite_equal: bool
    canonical_equal: bool
    oracle_equal: bool

    @property
    def consistent(self) -> bool:
        return self.rewrite_equal == self.canonical_equal == self.oracle_equal


def compare_with_oracle(e1: NormExpr, e2: NormExpr, group: FiniteGroup) -> OracleComparison:
    """Report whether normal forms, canonical forms and oracle forms agree; never raises on disagreement"""
    n1, n2 = normalize(e1, group), normalize(e2, group)
    # ring annotations ride along on the rewritten expression but carry no exponent
    result = OracleComparison(
        rewrite_equal=read_atoms(n1.expression, group).same_as(read_atoms(n2.expression, group)),
        canonical_equal=n1.form.same_as(n2.form),
        oracle_equal=oracle_form(e1, group) == oracle_form(e2, group),
    )
    if not result.consistent:
        logger.warning(f"[Norm] rewriting and oracle disagree on {render(e1, group)} vs {render(e2, group)}")
    return result


# ==============================================================================
# NORM MAPS
# ==============================================================================

@dataclass(frozen=True)
class NormMap:
    """
    Formal morphism between indexed powers of a commutative ring R.

    A G-map f: S -> T yields N^T R -> N^S R, so source carries the exponent T
    and target the exponent S.
    """
    source: CanonicalForm
    target: CanonicalForm
    gmap: Optional[GMap] = field(default=None, compare=False)
    kind: str = "induced"

    def then(self, after: "NormMap") -> "NormMap":
        """This map followed by after"""
        if self.target != after.source:
            raise LevelMismatchError("norm maps are not composable")
        gmap = None
        if self.gmap is not None and after.gmap is not None:
            gmap = self.gmap.compose(after.gmap)
        return NormMap(self.source, after.target, gmap, "composite")

    def describe(self) -> str:
        return f"{self.source.render()} -> {self.target.render()}"


def _ring_form(t: GSet, ring: str) -> CanonicalForm:
    return _form(t.level, {ring: t})


def norm_map_of(f: GMap, ix: Optional[IndexingSystem] = None, ring: str = "R") -> NormMap:
    """
    Descriptor N^T R -> N^S R of a G-map f: S -> T.

    Raises:
        InadmissibleError: S or T is not admissible in ix
    """
    s, t = decompose(f.source), decompose(f.target)
    if ix is not None:
        for x in (s, t):
            if not ix.admits_gset(x):
                raise InadmissibleError(f"{x} is not admissible", (x.level, x))
    return NormMap(_ring_form(t, ring), _ring_form(s, ring), f)


def counit_of(t: GSet, ring: str = "R") -> NormMap:
    """The structure map N^T R -> R"""
    return NormMap(_ring_form(t, ring), _ring_form(point(t.level), ring), None, "counit")


def multiplication(t: GSet, copies: int, ring: str = "R") -> NormMap:
    """copies of N^T R smashed together, multiplied to one: (N^T R)^copies -> N^T R"""
    return NormMap(_ring_form(t.scaled(copies), ring), _ring_form(t, ring), None, "multiplication")


def triangle_checks(s: GSet, t: GSet, k: Optional[Subgroup] = None, ring: str = "R") -> Dict[str, bool]:
    """
    Compatibility triangles of counits, checked on canonical forms.

    disjoint-union: N^{S+T} R = N^S R ^ N^T R -> R ^ R -> R equals the counit of S+T.
    product: N^{SxT} R = N^S N^T R -> N^T R -> R equals the counit of SxT.
    restriction (when k is given and S, T restrict to isomorphic K-sets):
    res[K] N^S R and res[K] N^T R have the same form and the same counit.
    """
    group = s.level.parent
    x = Var(ring)
    level = s.level
    results: Dict[str, bool] = {}

    union = coproduct(s, t)
    split = Smash((InternalNorm(s, Res(level, x) if level != group.whole else x),
                   InternalNorm(t, Res(level, x) if level != group.whole else x)), level)
    split_form = exponents(split, group)
    counit_pair = NormMap(split_form, _ring_form(point(level).scaled(2), ring), None, "counit")
    via_pair = counit_pair.then(multiplication(point(level), 2, ring))
    results["disjoint-union"] = split_form == _ring_form(union, ring) and \
        via_pair.target == counit_of(union, ring).target and via_pair.source == counit_of(union, ring).source

    body = Res(level, x) if level != group.whole else x
    nested = InternalNorm(s, InternalNorm(t, body))
    nested_form = exponents(nested, group)
    inner_counit = NormMap(nested_form, _ring_form(t, ring), None, "counit")
    via_t = inner_counit.then(counit_of(t, ring))
    whole = counit_of(product(s, t), ring)
    results["product"] = nested_form == whole.source and via_t.source == whole.source and via_t.target == whole.target

    if k is not None:
        if is_isomorphic(restrict(s, k), restrict(t, k)):
            lhs = exponents(Res(k, InternalNorm(s, body)), group)
            rhs = exponents(Res(k, InternalNorm(t, body)), group)
            results["restriction"] = lhs == rhs
        else:
            results["restriction"] = True
    return results


# ==============================================================================
# GENERATORS
# ==============================================================================

def _overgroups(lattice: SubgroupLattice, h: Subgroup) -> List[Subgroup]:
    return [m for m in lattice.subgroups if h.member_set < m.member_set]


def _admissible_below(lattice: SubgroupLattice, h: Subgroup, ix: Optional[IndexingSystem]) -> List[Subgroup]:
    return [k for k in lattice.subgroups_of(h) if k != h and (ix is None or ix.admits(h, k))]


def _leaf(level: Subgroup, symbol: str) -> NormExpr:
    return Var(symbol) if level.is_whole else Res(level, Var(symbol))


def random_expression(group: FiniteGroup, rng: random.Random, max_depth: int = 4,
                      ix: Optional[IndexingSystem] = None, level: Optional[Subgroup] = None,
                      symbols: Sequence[str] = ("X",)) -> NormExpr:
    """
    A random well-typed expression (gated by ix when given) at level, or at
    a random level.
    """
    lattice = subgroups(group)
    if level is None:
        level = rng.choice(lattice.subgroups)

    def gen(h: Subgroup, budget: int) -> NormExpr:
        symbol = rng.choice(list(symbols))
        if budget == 0:
            return _leaf(h, symbol)
        choices = ["leaf", "smash", "npow"]
        if _overgroups(lattice, h):
            choices.append("res")
        if _admissible_below(lattice, h, ix):
            choices.append("norm")
        pick = rng.choice(choices)
        if pick == "leaf":
            return _leaf(h, symbol)
        if pick == "res":
            return Res(h, gen(rng.choice(_overgroups(lattice, h)), budget - 1))
        if pick == "norm":
            return Norm(h, gen(rng.choice(_admissible_below(lattice, h, ix)), budget - 1))
        if pick == "smash":
            return Smash(tuple(gen(h, budget - 1) for _ in range(rng.randint(2, 3))), h)
        stabilizers = [k for k in mark_subgroups(h) if ix is None or ix.admits(h, k)]
        t = gset(h, [(rng.choice(stabilizers), rng.randint(1, 2)) for _ in range(rng.randint(1, 2))])
        return InternalNorm(t, gen(h, budget - 1))

    return gen(level, rng.randint(0, max_depth))


def enumerate_expressions(group: FiniteGroup, max_depth: int, ix: Optional[IndexingSystem] = None,
                          symbol: str = "X", limit: int = 5000) -> List[NormExpr]:
    """
    Every single-variable expression up to max_depth, at every level.

    Smash is binary and unordered, Npow exponents are single orbits; the
    list is cut at limit expressions in generation order.
    """
    lattice = subgroups(group)
    by_level: Dict[Subgroup, List[NormExpr]] = {h: [_leaf(h, symbol)] for h in lattice.subgroups}
    for _ in range(max_depth):
        previous = {h: list(es) for h, es in by_level.items()}
        for h in lattice.subgroups:
            new: List[NormExpr] = []
            for m in _overgroups(lattice, h):
                new.extend(Res(h, e) for e in previous[m])
            for k in _admissible_below(lattice, h, ix):
                new.extend(Norm(h, e) for e in previous[k])
            level_exprs = previous[h]
            for i, a in enumerate(level_exprs):
                for b in level_exprs[i:]:
                    new.append(Smash((a, b), h))
            for k in mark_subgroups(h):
                if k != h and (ix is None or ix.admits(h, k)):
                    new.extend(InternalNorm(orbit(h, k), e) for e in level_exprs)
            seen = set(by_level[h])
            for e in new:
                if e not in seen:
                    seen.add(e)
                    by_level[h].append(e)
    result: List[NormExpr] = []
    for h in lattice.subgroups:
        result.extend(by_level[h])
    return result[:limit]
