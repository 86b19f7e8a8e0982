"""
Command-line front end

    python cli.py group list|subgroups|marks|doublecosets ...
    python cli.py universe admissible|indexing ...
    python cli.py indexing validate|generate|enumerate|compare ...
    python cli.py norm normalize|equiv|trace ...
    python cli.py span compose|check-assoc|pullback-square ...
    python cli.py properties run ...
    python cli.py report replay FILE

Exit codes: 0 success, 1 negative answer, 2 input error, 3 cap exceeded,
4 internal invariant violation. stdout is deterministic for identical inputs;
logging goes to stderr.
"""

import argparse
import json
import logging
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from config import TOOL_NAME, TOOL_VERSION, EngineConfig
from errors import (
    EXIT_INVARIANT,
    EXIT_NEGATIVE,
    EXIT_OK,
    InputError,
    NormCalcError,
    exit_code_for,
)
from group_core import FiniteGroup, SubgroupLattice, double_cosets, register_lattice
from gsets import marks, parse_gset
from indexing_systems import (
    DEFAULT_RULE_ORDER,
    IndexingSystem,
    enumerate_all,
    generate,
    indexing_from_dict,
    join,
    leq,
    meet,
    validate,
)
from norm_calculus import equivalent, normalize, parse, render
from presets import get_preset, load_group_file, preset_catalog
from property_harness import SUITES, PropertyHarness
from rep_universe import (
    admissibility_relation,
    indexing_system_of_universe,
    split_universe_name,
    universe_from_dict,
    universe_preset,
)
from span_bicat import (
    check_associativity,
    check_units,
    compose,
    pullback_square_check,
    random_span,
    span_from_dict,
)
from workspace import Report, Workspace, file_hash, replay

logger = logging.getLogger(__name__)


@dataclass
class Context:
    """Parsed arguments plus everything a command writes"""
    args: argparse.Namespace
    config: EngineConfig
    workspace: Workspace
    inputs: Dict[str, str] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)

    def emit(self, text: str) -> None:
        self.lines.append(text)

    def emit_json(self, data) -> None:
        self.lines.append(json.dumps(data, indent=2, sort_keys=True))

    def read_json(self, path: str, kind: str) -> dict:
        resolved = self.workspace.resolve(path, kind)
        self.inputs[str(resolved)] = file_hash(resolved)
        try:
            data = json.loads(resolved.read_text())
        except json.JSONDecodeError as e:
            raise InputError(f"{resolved} is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise InputError(f"{resolved} must hold a JSON object")
        return data

    @property
    def stdout(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")


# ==============================================================================
# SHARED LOADERS
# ==============================================================================

def _prepare(ctx: Context, group: FiniteGroup) -> SubgroupLattice:
    """Cap-checked, cached lattice, registered for the rest of the run"""
    lattice = ctx.workspace.cache.lattice(group, ctx.config)
    register_lattice(lattice)
    return lattice


def load_group(ctx: Context, name: Optional[str] = None) -> FiniteGroup:
    args = ctx.args
    if getattr(args, "file", None):
        resolved = ctx.workspace.resolve(args.file, "groups")
        ctx.inputs[str(resolved)] = file_hash(resolved)
        group = load_group_file(resolved, ctx.config)
    else:
        group = get_preset(name or getattr(args, "preset", None) or "trivial", ctx.config)
    _prepare(ctx, group)
    return group


def load_indexing(ctx: Context, path: str, group: Optional[FiniteGroup] = None) -> IndexingSystem:
    data = ctx.read_json(path, "indexing")
    if group is None:
        group = load_group(ctx, data.get("group"))
    return indexing_from_dict(data, group)


def load_universe(ctx: Context):
    args = ctx.args
    if getattr(args, "file", None):
        data = ctx.read_json(args.file, "universes")
        group = get_preset(data.get("group") or "trivial", ctx.config)
        _prepare(ctx, group)
        return universe_from_dict(data, group)
    if not args.preset:
        raise InputError("give a universe with --preset <kind>-<group> or --file")
    kind, group_name = split_universe_name(args.preset)
    group = get_preset(group_name, ctx.config)
    _prepare(ctx, group)
    return universe_preset(kind, group)


def _gating(ctx: Context, group: Optional[FiniteGroup]) -> Tuple[Optional[IndexingSystem], Optional[FiniteGroup]]:
    args = ctx.args
    if args.ix and not args.ungated:
        ix = load_indexing(ctx, args.ix[0], group if args.preset or args.file else None)
        return ix, ix.group
    return None, group


def _table(rows: List[dict], columns: Sequence[str]) -> str:
    return pd.DataFrame(rows, columns=list(columns)).to_string(index=False)


def _verdict(ctx: Context, value: bool, payload: Optional[dict] = None) -> int:
    if ctx.args.json:
        data = {"result": value}
        data.update(payload or {})
        ctx.emit_json(data)
    else:
        ctx.emit("true" if value else "false")
    return EXIT_OK if value else EXIT_NEGATIVE


# ==============================================================================
# GROUP
# ==============================================================================

def cmd_group_list(ctx: Context) -> int:
    rows = preset_catalog()
    if ctx.args.json:
        ctx.emit_json(rows)
    else:
        ctx.emit(_table(rows, ["name", "order", "degree", "aliases", "description"]))
    return EXIT_OK


def cmd_group_subgroups(ctx: Context) -> int:
    group = load_group(ctx)
    lattice = _prepare(ctx, group)
    rows = []
    for i, s in enumerate(lattice.subgroups):
        rows.append({
            "id": f"#{i}",
            "label": lattice.label(s),
            "order": s.order,
            "class": lattice.class_index(s),
            "normal": lattice.is_normal(s),
            "members": list(s.members),
        })
    if ctx.args.json:
        ctx.emit_json({
            "group": group.name,
            "order": group.order,
            "subgroups": rows,
            "conjugacy_classes": [[lattice.labels[i] for i in c] for c in lattice.conjugacy_classes],
        })
    else:
        ctx.emit(_table(rows, ["id", "label", "order", "class", "normal"]))
        ctx.emit(f"{len(rows)} subgroups, {len(lattice.conjugacy_classes)} conjugacy classes")
    return EXIT_OK


def cmd_group_marks(ctx: Context) -> int:
    group = load_group(ctx)
    lattice = _prepare(ctx, group)
    level = lattice.by_label(ctx.args.at) if ctx.args.at else group.whole
    if ctx.args.gset is None:
        table = ctx.workspace.cache.marks(level)
        if ctx.args.json:
            rows = {i: [int(v) for v in r] for i, r in table.iterrows()}
            ctx.emit_json({"level": lattice.label(level), "rows": rows, "columns": list(table.columns)})
        else:
            ctx.emit(table.to_string())
        return EXIT_OK
    vector = marks(parse_gset(ctx.args.gset, lattice, level))
    if ctx.args.json:
        ctx.emit_json({"level": lattice.label(level), "marks": vector.to_dict()})
    else:
        ctx.emit("(" + ", ".join(str(v) for v in vector.values) + ")")
    return EXIT_OK


def cmd_group_doublecosets(ctx: Context) -> int:
    group = load_group(ctx)
    lattice = _prepare(ctx, group)
    args = ctx.args
    k, h = lattice.by_label(args.left), lattice.by_label(args.right)
    ambient = lattice.by_label(args.at) if args.at else None
    decomposition = double_cosets(k, h, ambient)
    rows = [{"representative": str(group.elements[g]), "index": g, "size": len(c)}
            for g, c in zip(decomposition.representatives, decomposition.cosets)]
    if args.json:
        ctx.emit_json({"left": args.left, "right": args.right, "double_cosets": rows})
    else:
        ctx.emit(_table(rows, ["index", "representative", "size"]))
        ctx.emit(f"{len(rows)} double cosets {args.left}\\{lattice.label(ambient or group.whole)}/{args.right}")
    return EXIT_OK


# ==============================================================================
# UNIVERSE
# ==============================================================================

def cmd_universe_admissible(ctx: Context) -> int:
    u = load_universe(ctx)
    lattice = _prepare(ctx, u.group)
    h = lattice.by_label(ctx.args.at) if ctx.args.at else u.level
    if ctx.args.gset is None:
        raise InputError("universe admissible needs --gset")
    t = parse_gset(ctx.args.gset, lattice, h)
    relation = admissibility_relation(u, h, t)
    if ctx.args.json:
        return _verdict(ctx, relation.contained, {"certificate": relation.to_dict()})
    code = _verdict(ctx, relation.contained)
    ctx.emit(relation.summary())
    return code


def cmd_universe_indexing(ctx: Context) -> int:
    ix = indexing_system_of_universe(load_universe(ctx))
    if ctx.args.json:
        ctx.emit_json(ix.to_dict())
    else:
        ctx.emit(str(ix))
        ctx.emit(ix.describe())
    return EXIT_OK


# ==============================================================================
# INDEXING
# ==============================================================================

def _require_ix(ctx: Context, count: int = 1) -> List[IndexingSystem]:
    paths = ctx.args.ix or []
    if len(paths) < count:
        raise InputError(f"this command needs {count} --ix file(s)")
    group = load_group(ctx) if (ctx.args.preset or ctx.args.file) else None
    return [load_indexing(ctx, p, group) for p in paths[:count]]


def cmd_indexing_validate(ctx: Context) -> int:
    ix = _require_ix(ctx)[0]
    report = validate(ix)
    if ctx.args.json:
        ctx.emit_json(report.to_dict())
    else:
        rows = [{"axiom": r.axiom, "passed": r.passed, "checked": r.checked,
                 "counterexample": r.counterexample or ""} for r in report.results]
        ctx.emit(_table(rows, ["axiom", "passed", "checked", "counterexample"]))
        ctx.emit("valid" if report.passed else "invalid")
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def _parse_norm(lattice: SubgroupLattice, text: str):
    h_label, sep, k_label = text.partition("/")
    if not sep:
        raise InputError(f"norms are written H/K, got {text!r}")
    h, k = lattice.by_label(h_label), lattice.by_label(k_label)
    if not k.member_set <= h.member_set:
        raise InputError(f"{k_label} is not contained in {h_label}")
    return h, k


def cmd_indexing_generate(ctx: Context) -> int:
    group = load_group(ctx)
    lattice = _prepare(ctx, group)
    declared = [_parse_norm(lattice, n) for n in ctx.args.norm or []]
    order = tuple(ctx.args.order.split(",")) if ctx.args.order else DEFAULT_RULE_ORDER
    if sorted(order) != sorted(DEFAULT_RULE_ORDER):
        raise InputError(f"--order must be a permutation of {','.join(DEFAULT_RULE_ORDER)}")
    ix = generate(group, declared, order)
    if ctx.args.json:
        ctx.emit_json(ix.to_dict())
    else:
        ctx.emit(str(ix))
        ctx.emit(ix.describe())
    return EXIT_OK


def cmd_indexing_enumerate(ctx: Context) -> int:
    group = load_group(ctx)
    systems = enumerate_all(group, ctx.config)
    if ctx.args.json:
        ctx.emit_json({"group": group.name, "count": len(systems), "systems": [ix.to_dict() for ix in systems]})
    else:
        for i, ix in enumerate(systems):
            ctx.emit(f"{i}: {ix}")
        ctx.emit(f"{len(systems)} indexing systems")
    return EXIT_OK


def cmd_indexing_compare(ctx: Context) -> int:
    a, b = _require_ix(ctx, 2)
    result = {
        "first_leq_second": leq(a, b),
        "second_leq_first": leq(b, a),
        "meet": meet(a, b).to_dict(),
        "join": join(a, b).to_dict(),
    }
    if ctx.args.json:
        ctx.emit_json(result)
    else:
        ctx.emit(f"first <= second: {str(result['first_leq_second']).lower()}")
        ctx.emit(f"second <= first: {str(result['second_leq_first']).lower()}")
        ctx.emit(f"meet: {meet(a, b)}")
        ctx.emit(f"join: {join(a, b)}")
    return EXIT_OK


# ==============================================================================
# NORM
# ==============================================================================

def _norm_setup(ctx: Context):
    group = load_group(ctx) if (ctx.args.preset or ctx.args.file) else None
    ix, group = _gating(ctx, group)
    if group is None:
        group = load_group(ctx)
    return group, ix


def cmd_norm_normalize(ctx: Context) -> int:
    group, ix = _norm_setup(ctx)
    result = normalize(parse(ctx.args.expressions[0], group), group, ix)
    if ctx.args.json:
        ctx.emit_json({"normal_form": render(result.expression, group), "canonical": result.form.to_dict(),
                       "steps": len(result.trace.steps)})
    else:
        ctx.emit(render(result.expression, group))
    return EXIT_OK


def cmd_norm_equiv(ctx: Context) -> int:
    if len(ctx.args.expressions) != 2:
        raise InputError("norm equiv takes two expressions")
    group, ix = _norm_setup(ctx)
    e1, e2 = (parse(text, group) for text in ctx.args.expressions)
    return _verdict(ctx, equivalent(e1, e2, group, ix))


def cmd_norm_trace(ctx: Context) -> int:
    group, ix = _norm_setup(ctx)
    result = normalize(parse(ctx.args.expressions[0], group), group, ix)
    if ctx.args.json:
        ctx.emit_json(result.trace.to_dict(group))
        return EXIT_OK
    for i, step in enumerate(result.trace.steps, start=1):
        ctx.emit(f"{i:>3}. {step.rule:<14} {render(step.after, group)}")
    ctx.emit(f"normal form: {render(result.expression, group)}")
    return EXIT_OK


# ==============================================================================
# SPAN
# ==============================================================================

def _load_spans(ctx: Context, group: FiniteGroup) -> list:
    lattice = _prepare(ctx, group)
    return [span_from_dict(ctx.read_json(p, "spans"), lattice) for p in ctx.args.span or []]


def cmd_span_compose(ctx: Context) -> int:
    group = load_group(ctx)
    spans = _load_spans(ctx, group)
    if len(spans) < 2:
        raise InputError("span compose needs at least two --span files")
    ix, _ = _gating(ctx, group)
    result = spans[0]
    for s in spans[1:]:
        result = compose(result, s, ix=ix, config=ctx.config)
    if ctx.args.json:
        data = result.to_dict()
        data["admissible"] = result.admissible
        ctx.emit_json(data)
    else:
        ctx.emit(result.describe())
        if result.admissible is not None:
            ctx.emit(f"apex admissible: {str(result.admissible).lower()}")
    return EXIT_OK


def cmd_span_check_assoc(ctx: Context) -> int:
    group = load_group(ctx)
    spans = _load_spans(ctx, group)
    triples = []
    if spans:
        if len(spans) != 3:
            raise InputError("span check-assoc takes exactly three --span files")
        triples.append(tuple(spans))
    else:
        rng = random.Random(ctx.args.seed)
        for _ in range(ctx.args.samples):
            s1 = random_span(group.whole, rng, 3)
            s2 = random_span(group.whole, rng, 3, source=s1.target)
            s3 = random_span(group.whole, rng, 3, source=s2.target)
            triples.append((s1, s2, s3))
    passed = 0
    for s1, s2, s3 in triples:
        units = check_units(s1, ctx.config)
        if all(units.values()) and check_associativity(s1, s2, s3, ctx.config):
            passed += 1
    ok = passed == len(triples)
    if ctx.args.json:
        ctx.emit_json({"checked": len(triples), "passed": passed, "result": ok})
    else:
        ctx.emit(f"unit and associativity laws: {passed}/{len(triples)} passed")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_span_pullback_square(ctx: Context) -> int:
    group = load_group(ctx)
    lattice = _prepare(ctx, group)
    h = lattice.by_label(ctx.args.at) if ctx.args.at else group.whole
    t = parse_gset(ctx.args.gset or "G/G", lattice, group.whole)
    return _verdict(ctx, pullback_square_check(h, t))


# ==============================================================================
# PROPERTIES AND REPORTS
# ==============================================================================

def cmd_properties_run(ctx: Context) -> int:
    args = ctx.args
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise InputError(f"unknown suite '{name}'; available: {', '.join(SUITES)}")
    results_dir = args.results_dir or str(ctx.workspace.root / "property_results")
    harness = PropertyHarness(results_dir, ctx.config)
    summaries = []
    for name in names:
        suite = SUITES[name]
        results = harness.run_suite(suite, seed=args.seed, full=args.full)
        summary = harness.compute_summary(suite, results, args.seed)
        if not args.no_save:
            harness.save_results(suite, results, summary)
        summaries.append(summary)
    if args.json:
        ctx.emit_json([s.to_dict() | {"avg_latency": None} for s in summaries])
    else:
        ctx.emit(harness.compare_suites(summaries))
    return EXIT_OK if all(s.ok for s in summaries) else EXIT_NEGATIVE


def cmd_report_replay(ctx: Context) -> int:
    path = ctx.workspace.resolve(ctx.args.path)
    outcome = replay(Report.load(path), run)
    if ctx.args.json:
        ctx.emit_json({"matches": outcome.matches, "stale_inputs": outcome.stale_inputs,
                       "exit_code": outcome.exit_code})
    else:
        ctx.emit("match" if outcome.matches else "mismatch")
        for stale in outcome.stale_inputs:
            ctx.emit(f"changed input: {stale}")
    return EXIT_OK if outcome.matches else EXIT_NEGATIVE


COMMANDS = {
    ("group", "list"): cmd_group_list,
    ("group", "subgroups"): cmd_group_subgroups,
    ("group", "marks"): cmd_group_marks,
    ("group", "doublecosets"): cmd_group_doublecosets,
    ("universe", "admissible"): cmd_universe_admissible,
    ("universe", "indexing"): cmd_universe_indexing,
    ("indexing", "validate"): cmd_indexing_validate,
    ("indexing", "generate"): cmd_indexing_generate,
    ("indexing", "enumerate"): cmd_indexing_enumerate,
    ("indexing", "compare"): cmd_indexing_compare,
    ("norm", "normalize"): cmd_norm_normalize,
    ("norm", "equiv"): cmd_norm_equiv,
    ("norm", "trace"): cmd_norm_trace,
    ("span", "compose"): cmd_span_compose,
    ("span", "check-assoc"): cmd_span_check_assoc,
    ("span", "pullback-square"): cmd_span_pullback_square,
    ("properties", "run"): cmd_properties_run,
    ("report", "replay"): cmd_report_replay,
}


# ==============================================================================
# ARGUMENTS
# ==============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="Preset group (or <kind>-<group> universe for universe commands)")
    common.add_argument("--file", help="Group JSON file (universe JSON for universe commands)")
    common.add_argument("--json", action="store_true", help="Emit canonical JSON instead of text")
    common.add_argument("--ix", "--indexing", action="append", dest="ix", help="Indexing-system JSON file")
    common.add_argument("--ungated", action="store_true", help="Ignore --ix and allow every norm")
    common.add_argument("--cache-dir", help="Lattice cache directory (default <workspace>/.cache)")
    common.add_argument("--workspace", help="Workspace root (default $NORMCALC_WORKSPACE or .)")
    common.add_argument("--cap-group-order", type=int, help="Largest group order for subgroup enumeration")
    common.add_argument("--seed", type=int, default=0, help="Seed for randomized commands")
    common.add_argument("--report", help="Write a replayable report of this run to PATH")
    common.add_argument("--verbose", action="store_true", help="Log progress to stderr")

    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Symbolic engine for equivariant norms")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    areas = parser.add_subparsers(dest="area", required=True)

    group = areas.add_parser("group", help="Groups, subgroup lattices and marks").add_subparsers(
        dest="action", required=True)
    group.add_parser("list", parents=[common], help="List preset groups")
    group.add_parser("subgroups", parents=[common], help="Subgroup lattice table")
    marks_parser = group.add_parser("marks", parents=[common], help="Table of marks or marks of one G-set")
    marks_parser.add_argument("--gset", help="G-set literal such as '2*C4/C2, C4/e'")
    marks_parser.add_argument("--at", help="Level subgroup (default G)")
    dc = group.add_parser("doublecosets", parents=[common], help="Double cosets K\\G/H")
    dc.add_argument("--left", required=True, help="Subgroup K")
    dc.add_argument("--right", required=True, help="Subgroup H")
    dc.add_argument("--at", help="Ambient subgroup (default G)")

    universe = areas.add_parser("universe", help="Representation universes").add_subparsers(
        dest="action", required=True)
    adm = universe.add_parser("admissible", parents=[common], help="Is T admissible at H")
    adm.add_argument("--at", help="Subgroup H (default G)")
    adm.add_argument("--gset", help="G-set literal at H")
    universe.add_parser("indexing", parents=[common], help="Indexing system of a universe")

    indexing = areas.add_parser("indexing", help="Indexing systems").add_subparsers(dest="action", required=True)
    indexing.add_parser("validate", parents=[common], help="Check every closure axiom")
    gen = indexing.add_parser("generate", parents=[common], help="Least system admitting the given norms")
    gen.add_argument("--norm", action="append", help="Admissible orbit H/K (repeatable)")
    gen.add_argument("--order", help="Comma-separated rule order for the closure passes")
    indexing.add_parser("enumerate", parents=[common], help="All indexing systems")
    indexing.add_parser("compare", parents=[common], help="Order, meet and join of two systems")

    norm = areas.add_parser("norm", help="Norm calculus").add_subparsers(dest="action", required=True)
    for action, text in (("normalize", "Normal form"), ("equiv", "Equivalence of two expressions"),
                         ("trace", "Rewrite trace")):
        p = norm.add_parser(action, parents=[common], help=text)
        p.add_argument("expressions", nargs="+", help="Expression(s)")

    span = areas.add_parser("span", help="Span bicategory").add_subparsers(dest="action", required=True)
    sc = span.add_parser("compose", parents=[common], help="Compose spans by pullback")
    sc.add_argument("--span", action="append", help="Span JSON file (repeatable)")
    sa = span.add_parser("check-assoc", parents=[common], help="Unit and associativity laws")
    sa.add_argument("--span", action="append", help="Three span JSON files (default: random triples)")
    sa.add_argument("--samples", type=int, default=20, help="Random triples to check")
    sq = span.add_parser("pullback-square", parents=[common], help="Translation-category pullback square")
    sq.add_argument("--at", help="Subgroup H (default G)")
    sq.add_argument("--gset", help="G-set literal T (default G/G)")

    props = areas.add_parser("properties", help="Seeded property suites").add_subparsers(
        dest="action", required=True)
    pr = props.add_parser("run", parents=[common], help="Run a property suite")
    pr.add_argument("--suite", default="all", help=f"Suite name or 'all' ({', '.join(SUITES)})")
    pr.add_argument("--full", action="store_true", help="Full sample counts")
    pr.add_argument("--results-dir", help="Where results are saved")
    pr.add_argument("--no-save", action="store_true", help="Do not write result files")

    report = areas.add_parser("report", help="Saved reports").add_subparsers(dest="action", required=True)
    rr = report.add_parser("replay", parents=[common], help="Re-run a report and compare outputs")
    rr.add_argument("path", help="Report JSON file")

    return parser


def _strip_report(argv: Sequence[str]) -> List[str]:
    stripped, skip = [], False
    for arg in argv:
        if skip:
            skip = False
        elif arg == "--report":
            skip = True
        elif not arg.startswith("--report="):
            stripped.append(arg)
    return stripped


def run(argv: Sequence[str]) -> Tuple[int, str]:
    """
    Execute one command.

    Returns:
        (exit code, stdout text)
    """
    args = build_parser().parse_args(list(argv))
    start_time = time.time()
    config = EngineConfig.from_env().with_overrides(max_lattice_order=args.cap_group_order)
    ctx = Context(args, config, Workspace(args.workspace, args.cache_dir))
    try:
        code = COMMANDS[(args.area, args.action)](ctx)
    except NormCalcError as e:
        code = exit_code_for(e)
        label = "internal error" if code == EXIT_INVARIANT else "error"
        sys.stderr.write(f"{TOOL_NAME}: {label}: {e}\n")
    stdout = ctx.stdout

    if args.report:
        report = Report(
            command=_strip_report(argv),
            inputs=dict(sorted(ctx.inputs.items())),
            stdout=stdout,
            exit_code=code,
            elapsed_seconds=round(time.time() - start_time, 3),
        )
        report.save(Path(args.report))
    return code, stdout


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(
        level=logging.DEBUG if "--verbose" in argv else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    code, stdout = run(argv)
    sys.stdout.write(stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
