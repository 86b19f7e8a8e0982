"""
Property Harness for seeded law checks

This module provides the framework for running the engine's property suites
(universe axioms, double coset formula, enumeration oracles, Burnside counts,
span laws, ...) over preset groups, and for saving and comparing their results.
Every suite draws its random cases from a seeded random.Random, so a suite
name plus a seed reproduces a run exactly.
"""

import json
import logging
import random
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import pandas as pd

from config import DEFAULT_CONFIG, EngineConfig
from errors import NormCalcError
from group_core import FiniteGroup, subgroups
from gsets import (
    all_gsets,
    element_product,
    gset,
    mark_subgroups,
    orbit,
    orbit_count,
    product,
    realize,
    restrict,
)
from indexing_systems import complete_system, enumerate_all, enumerate_brute_force, trivial_system, validate
from norm_calculus import (
    InternalNorm,
    Norm,
    Res,
    enumerate_expressions,
    level_of,
    normalize,
    oracle_form,
    random_expression,
    render,
)
from presets import get_preset
from rep_universe import hom_dim, indexing_system_of_universe, perm_rep, unisum_check, universe_preset
from span_bicat import check_associativity, check_units, pullback_square_check, random_span

logger = logging.getLogger(__name__)

Check = Callable[[], Tuple[bool, str]]


@dataclass
class PropertySuite:
    """Configuration for one property suite"""
    name: str
    description: str
    groups: List[str]

    # cases per group: quick runs by default, full with --full
    quick_samples: int = 20
    full_samples: int = 500

    extra_config: dict = field(default_factory=dict)

    def to_dict(self):
        """Convert to dictionary for serialization"""
        return asdict(self)


@dataclass
class PropertyResult:
    """Outcome of one case of one suite"""
    suite: str
    group: str
    case_id: str
    passed: bool
    detail: str = ""
    latency_seconds: float = 0.0
    error: Optional[str] = None

    def to_dict(self):
        """Convert to dictionary for serialization"""
        return asdict(self)


@dataclass
class PropertySummary:
    """Summary statistics for a suite across its groups"""
    suite: str
    seed: int = 0
    total_cases: int = 0
    passed: int = 0
    failed: int = 0
    pass_rate: float = 0.0
    avg_latency: float = 0.0
    failed_by_group: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self):
        """Convert to dictionary for serialization"""
        return asdict(self)


# ==============================================================================
# CASE BUILDERS
# ==============================================================================

def _universe_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    for kind in ("trivial", "complete", "mixed"):
        def check(kind=kind):
            ix = indexing_system_of_universe(universe_preset(kind, group))
            report = validate(ix)
            failed = ", ".join(r.axiom for r in report.failures())
            return report.passed, failed or str(ix)
        yield kind, check


def _extreme_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    def trivial():
        ix = indexing_system_of_universe(universe_preset("trivial", group))
        return ix.admissible == trivial_system(group).admissible, str(ix)

    def complete():
        ix = indexing_system_of_universe(universe_preset("complete", group))
        return ix.admissible == complete_system(group).admissible, str(ix)

    yield "trivial", trivial
    yield "complete", complete


def _unisum_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    for kind in ("trivial", "complete", "mixed"):
        u = universe_preset(kind, group)
        ix = indexing_system_of_universe(u)
        lattice = subgroups(group)
        for h, k in ix.sorted_pairs():
            for t in (orbit(h, k), orbit(h, k, 2), gset(h, [(k, 1), (h, 1)])):
                def check(u=u, h=h, t=t):
                    return unisum_check(u, h, t), str(t)
                yield f"{kind}:{lattice.label(h)}:{t}", check


def _random_gset(level, rng: random.Random):
    stabilizers = mark_subgroups(level)
    return gset(level, [(rng.choice(stabilizers), rng.randint(1, 2)) for _ in range(rng.randint(1, 2))])


def _double_coset_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    lattice = subgroups(group)
    for i in range(samples):
        e = random_expression(group, rng, max_depth=4)
        h = level_of(e, group)
        t = _random_gset(h, rng)
        k = rng.choice(lattice.subgroups_of(h))

        def check(e=e, h=h, t=t, k=k):
            lhs = Res(k, InternalNorm(t, e))
            rhs = InternalNorm(restrict(t, k), Res(k, e))
            form = normalize(lhs, group).form
            same = form == normalize(rhs, group).form and form == oracle_form(lhs, group)
            return same, render(lhs, group)
        yield f"{i}", check


def _product_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    lattice = subgroups(group)
    for i in range(samples):
        e = random_expression(group, rng, max_depth=3)
        h = level_of(e, group)
        t1, t2 = _random_gset(h, rng), _random_gset(h, rng)
        middle = rng.choice([m for m in lattice.subgroups if h.member_set <= m.member_set])
        top = rng.choice([m for m in lattice.subgroups if middle.member_set <= m.member_set])

        def check(e=e, t1=t1, t2=t2, middle=middle, top=top):
            fused = normalize(InternalNorm(product(t1, t2), e), group).form
            nested = normalize(InternalNorm(t1, InternalNorm(t2, e)), group).form
            one_step = normalize(Norm(top, e), group).form
            two_steps = normalize(Norm(top, Norm(middle, e)), group).form
            return fused == nested and one_step == two_steps, render(e, group)
        yield f"{i}", check


def _oracle_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    max_depth = 3 if samples >= 100 else 2
    for i, e in enumerate(enumerate_expressions(group, max_depth, limit=20_000)):
        def check(e=e):
            return normalize(e, group).form == oracle_form(e, group), render(e, group)
        yield f"{i}", check


def _enumeration_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    def check():
        fast = [ix.admissible for ix in enumerate_all(group)]
        slow = [ix.admissible for ix in enumerate_brute_force(group)]
        return len(fast) == len(slow) and set(fast) == set(slow), f"{len(fast)} systems"
    yield "all", check


def _burnside_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    max_cardinality = 8 if samples >= 100 else 4
    sets = all_gsets(group.whole, max_cardinality)
    for a, x in enumerate(sets):
        for b, y in enumerate(sets[a:], start=a):
            def check(x=x, y=y):
                dim = hom_dim(perm_rep(x), perm_rep(y))
                count = orbit_count(element_product(realize(x), realize(y)))
                return dim == count, f"{x} | {y}: {dim} vs {count}"
            yield f"{a}-{b}", check


def _span_cases(group: FiniteGroup, samples: int, rng: random.Random) -> Iterator[Tuple[str, Check]]:
    whole = group.whole
    for i in range(samples):
        s1 = random_span(whole, rng, 3)
        s2 = random_span(whole, rng, 3, source=s1.target)
        s3 = random_span(whole, rng, 3, source=s2.target)

        def check(s1=s1, s2=s2, s3=s3):
            units = check_units(s1)
            return all(units.values()) and check_associativity(s1, s2, s3), s1.describe()
        yield f"laws-{i}", check
    lattice = subgroups(group)
    for h in lattice.subgroups:
        for t in all_gsets(whole, 6):
            def check(h=h, t=t):
                return pullback_square_check(h, t), f"{lattice.label(h)} x {t}"
            yield f"square-{lattice.label(h)}-{t}", check


CASE_BUILDERS: Dict[str, Callable[[FiniteGroup, int, random.Random], Iterator[Tuple[str, Check]]]] = {
    "universe-axioms": _universe_cases,
    "universe-extremes": _extreme_cases,
    "unisum": _unisum_cases,
    "double-coset": _double_coset_cases,
    "product-composition": _product_cases,
    "oracle-consistency": _oracle_cases,
    "enumeration": _enumeration_cases,
    "burnside": _burnside_cases,
    "span-laws": _span_cases,
}

DESK_GROUPS = ["C2", "C3", "C4", "C6", "C8", "S3", "D4", "Q8", "A4"]
UP_TO_ORDER_8 = ["C2", "C3", "C4", "C5", "C6", "C8", "S3", "D4", "Q8"]
UP_TO_ORDER_12 = UP_TO_ORDER_8 + ["C9", "A4"]

SUITES: Dict[str, PropertySuite] = {s.name: s for s in [
    PropertySuite("universe-axioms", "indexing systems of preset universes pass every axiom", DESK_GROUPS),
    PropertySuite("universe-extremes", "trivial and complete universes give the extreme systems",
                  ["trivial"] + DESK_GROUPS),
    PropertySuite("unisum", "admissible T leaves the constituents of the universe unchanged", DESK_GROUPS),
    PropertySuite("double-coset", "restriction of an internal norm equals the internal norm of the restriction",
                  DESK_GROUPS),
    PropertySuite("product-composition", "Npow of a product nests; norms along a chain fuse",
                  DESK_GROUPS),
    PropertySuite("oracle-consistency", "normal forms agree with the element-level orbit oracle",
                  ["C4", "S3"], quick_samples=10, full_samples=100),
    PropertySuite("enumeration", "breadth-first enumeration equals the brute-force filter",
                  ["trivial", "C3", "C9", "C27", "S3", "C6"], quick_samples=1, full_samples=1),
    PropertySuite("burnside", "hom dimension of permutation reps equals the orbit count of the product",
                  UP_TO_ORDER_12, quick_samples=10, full_samples=100),
    PropertySuite("span-laws", "unit, associativity and pullback-square laws for spans",
                  UP_TO_ORDER_8, quick_samples=10, full_samples=200),
]}


# ==============================================================================
# HARNESS
# ==============================================================================

class PropertyHarness:
    """Main framework for running property suites"""

    def __init__(self, results_dir: str = "property_results", config: EngineConfig = DEFAULT_CONFIG):
        """
        Initialize the property harness.

        Args:
            results_dir: Directory to store suite results
            config: Engine caps for building preset groups
        """
        self.results_dir = Path(results_dir)
        self.config = config

    def run_suite(self, suite: PropertySuite, seed: int = 0, full: bool = False,
                  groups: Optional[List[str]] = None) -> List[PropertyResult]:
        """
        Run every case of a suite.

        Args:
            suite: Suite to run
            seed: Seed for the suite's random.Random
            full: Use full_samples instead of quick_samples
            groups: Restrict to these preset names

        Returns:
            List of PropertyResult objects, in generation order
        """
        builder = CASE_BUILDERS[suite.name]
        samples = suite.full_samples if full else suite.quick_samples
        results = []
        logger.info(f"[Properties] {suite.name}: {suite.description} (seed {seed}, {samples} samples)")

        for name in groups or suite.groups:
            group = get_preset(name, self.config)
            rng = random.Random(f"{suite.name}:{name}:{seed}")
            for case_id, check in builder(group, samples, rng):
                start_time = time.time()
                try:
                    passed, detail = check()
                    error = None
                except NormCalcError as e:
                    passed, detail, error = False, "", f"{type(e).__name__}: {e}"
                latency = time.time() - start_time
                if not passed:
                    logger.warning(f"[Properties] {suite.name} {name} case {case_id} failed: {error or detail}")
                results.append(PropertyResult(suite.name, name, case_id, passed, detail, latency, error))
        return results

    def compute_summary(self, suite: PropertySuite, results: List[PropertyResult], seed: int = 0) -> PropertySummary:
        summary = PropertySummary(suite=suite.name, seed=seed)
        summary.total_cases = len(results)
        summary.passed = sum(1 for r in results if r.passed)
        summary.failed = summary.total_cases - summary.passed
        summary.pass_rate = summary.passed / summary.total_cases if summary.total_cases else 0.0
        summary.avg_latency = sum(r.latency_seconds for r in results) / len(results) if results else 0.0
        for r in results:
            if not r.passed:
                summary.failed_by_group[r.group] = summary.failed_by_group.get(r.group, 0) + 1
        return summary

    def save_results(self, suite: PropertySuite, results: List[PropertyResult], summary: PropertySummary) -> Path:
        """
        Save suite results to a timestamped directory.

        Returns:
            The directory holding config.json, results.json and summary.json
        """
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        run_dir = self.results_dir / f"{suite.name}_{timestamp}"
        run_dir.mkdir(parents=True, exist_ok=True)

        with open(run_dir / "config.json", "w") as f:
            json.dump(suite.to_dict(), f, indent=2)
        with open(run_dir / "results.json", "w") as f:
            json.dump([r.to_dict() for r in results], f, indent=2)
        with open(run_dir / "summary.json", "w") as f:
            json.dump(summary.to_dict(), f, indent=2)

        logger.info(f"[Properties] Results saved to: {run_dir}")
        return run_dir

    def compare_suites(self, summaries: List[PropertySummary], save_to: Optional[Path] = None) -> str:
        """
        Create a comparison table of several suite summaries.

        Args:
            summaries: List of PropertySummary objects
            save_to: Optional file path to save the table

        Returns:
            Formatted comparison table as string
        """
        frame = pd.DataFrame([{
            "suite": s.suite,
            "seed": s.seed,
            "cases": s.total_cases,
            "passed": s.passed,
            "failed": s.failed,
            "pass rate": f"{s.pass_rate * 100:.0f}%",
            "ok": "yes" if s.ok else "no",
        } for s in summaries], columns=["suite", "seed", "cases", "passed", "failed", "pass rate", "ok"])
        table = frame.to_string(index=False)

        if save_to:
            Path(save_to).write_text(table + "\n")
            logger.info(f"[Properties] Comparison saved to: {save_to}")
        return table
