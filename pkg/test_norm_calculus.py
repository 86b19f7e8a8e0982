"""
Tests for the norm calculus: parsing, normalization, rewriting and norm maps

Run with: pytest test_norm_calculus.py -v
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import (
    InadmissibleError,
    InvariantViolation,
    LevelMismatchError,
    ParseError,
    RuleNotApplicableError,
    TypeCheckError,
)
from group_core import subgroups
from gsets import GMap, coproduct, gmaps, orbit, point, product, realize, restrict
from indexing_systems import complete_system, trivial_system
from norm_calculus import (
    RULES,
    STRATEGY,
    InternalNorm,
    Norm,
    Res,
    Smash,
    Var,
    compare_with_oracle,
    counit_of,
    depth,
    enumerate_expressions,
    equivalent,
    exponents,
    level_of,
    multiplication,
    norm_map_of,
    normalize,
    oracle_form,
    parse,
    random_expression,
    render,
    step_rewrite,
    triangle_checks,
    typecheck,
    variables,
)
from presets import get_preset
from rep_universe import indexing_system_of_universe, universe_preset


@pytest.fixture(scope="module")
def c4():
    return get_preset("C4")


@pytest.fixture(scope="module")
def s3():
    return get_preset("S3")


@pytest.fixture(scope="module")
def mixed_c4(c4):
    return indexing_system_of_universe(universe_preset("mixed", c4))


class TestParsing:
    """Tests for parse, render and typecheck"""

    def test_variable(self, c4):
        e = parse("X", c4)
        assert e == Var("X")
        assert typecheck(e, c4) == c4.whole

    def test_restriction_of_norm(self, c4, mixed_c4):
        e = parse("res[C2](norm[C4](res[C2](X)))", c4)
        assert typecheck(e, c4, mixed_c4) == subgroups(c4).by_label("C2")
        assert depth(e) == 3

    def test_inadmissible_norm(self, c4, mixed_c4):
        e = parse("norm[C4](res[e](X))", c4)
        with pytest.raises(InadmissibleError) as info:
            typecheck(e, c4, mixed_c4)
        assert "C4/e" in str(info.value)

    def test_inadmissible_exponent(self, c4):
        e = parse("Npow[C4/e](X)", c4)
        with pytest.raises(InadmissibleError):
            typecheck(e, c4, trivial_system(c4))
        assert typecheck(e, c4, complete_system(c4)) == c4.whole

    def test_ill_typed_norm(self, c4):
        with pytest.raises(TypeCheckError):
            typecheck(parse("norm[C2](X)", c4), c4)

    def test_smash_levels_must_agree(self, c4):
        with pytest.raises(TypeCheckError):
            typecheck(parse("smash(X, res[C2](X))", c4), c4)

    @pytest.mark.parametrize("text", ["res[C3](X)", "smash(X", "X Y", "norm[C4]", "res[C2;R](X)", "Npow[C4/C9](X)"])
    def test_parse_errors(self, c4, text):
        with pytest.raises(ParseError):
            parse(text, c4)

    def test_parse_error_position(self, c4):
        with pytest.raises(ParseError) as info:
            parse("smash(X, Y", c4)
        assert info.value.position == len("smash(X, Y")

    @pytest.mark.parametrize("text", [
        "res[C2](norm[C4;R](res[e](X)))",
        "smash(X, Npow[2*C4/C2](Y))",
        "unit[C2]",
        "Npow[C4/e, C4/C2](X)",
    ])
    def test_render_round_trip(self, c4, text):
        assert render(parse(text, c4), c4) == text

    def test_variables(self, c4):
        assert variables(parse("smash(Y, X, Npow[C4/e](Y))", c4)) == ["X", "Y"]


class TestNormalize:
    """Tests for normalize()"""

    def test_trivial_exponent_is_identity(self, c4):
        result = normalize(InternalNorm(point(c4.whole), Var("X")), c4)
        assert result.expression == Var("X")
        assert result.form.exponent("X") == point(c4.whole)

    def test_restricted_norm_splits(self, c4):
        lattice = subgroups(c4)
        c2 = lattice.by_label("C2")
        e = Res(c2, InternalNorm(orbit(c4.whole, c2), Var("X")))
        result = normalize(e, c4)
        assert result.form.exponent("X") == point(c2).scaled(2)
        assert render(result.expression, c4) == "smash(res[C2](X), res[C2](X))"

    def test_norm_matches_internal_norm(self, c4):
        lattice = subgroups(c4)
        c2 = lattice.by_label("C2")
        a = normalize(Norm(c4.whole, Res(c2, Var("X"))), c4)
        b = normalize(InternalNorm(orbit(c4.whole, c2), Var("X")), c4)
        assert a.form == b.form
        assert a.expression == b.expression
        assert render(a.expression, c4) == "norm[C4](res[C2](X))"

    def test_unit_has_no_exponents(self, c4):
        result = normalize(parse("unit[C4]", c4), c4)
        assert result.form.exponents == ()

    def test_normal_form_is_fixed(self, s3):
        e = parse("res[C2.1](Npow[S3/C3](smash(X, Npow[S3/C2.2](Y))))", s3)
        first = normalize(e, s3)
        second = normalize(first.expression, s3)
        assert second.expression == first.expression
        assert second.trace.steps == []

    def test_trace_replays(self, s3):
        e = parse("res[C2.1](norm[S3](res[C2.2](X)))", s3)
        result = normalize(e, s3)
        assert result.trace.replay(s3) == result.expression
        assert "double-coset" in result.trace.rules_used()
        assert result.trace.to_dict(s3)["start"] == render(e, s3)

    def test_tampered_trace_is_detected(self, c4):
        result = normalize(parse("Npow[C4/C2](smash(X, X))", c4), c4)
        result.trace.steps[0] = result.trace.steps[-1]
        with pytest.raises(InvariantViolation):
            result.trace.replay(c4)

    def test_conjugate_norms_agree(self, s3):
        a = parse("norm[S3](res[C2.1](X))", s3)
        b = parse("norm[S3](res[C2.3](X))", s3)
        assert normalize(a, s3).expression == normalize(b, s3).expression

    @pytest.mark.parametrize("name", ["C4", "S3"])
    def test_enumerated_expressions_match_oracle(self, name):
        group = get_preset(name)
        for e in enumerate_expressions(group, 2, limit=400):
            assert normalize(e, group).form == oracle_form(e, group), render(e, group)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=100_000))
    def test_random_expressions_match_oracle(self, seed):
        group = get_preset("S3")
        e = random_expression(group, random.Random(seed), max_depth=3, symbols=("X", "Y"))
        result = normalize(e, group)
        assert result.form == oracle_form(e, group)
        assert result.form == exponents(e, group)
        assert level_of(result.expression, group) == level_of(e, group)

    def test_gated_random_expressions_typecheck(self, mixed_c4, c4):
        rng = random.Random(7)
        for _ in range(25):
            e = random_expression(c4, rng, max_depth=3, ix=mixed_c4)
            typecheck(e, c4, mixed_c4)


class TestEquivalence:
    """Tests for equivalent() and the oracle comparison"""

    def test_internal_norms_compose(self, s3):
        lattice = subgroups(s3)
        t1 = orbit(s3.whole, lattice.by_label("C2.1"))
        t2 = orbit(s3.whole, lattice.by_label("C3"))
        x = Var("X")
        assert equivalent(InternalNorm(product(t1, t2), x), InternalNorm(t1, InternalNorm(t2, x)), s3)

    def test_restriction_commutes_with_internal_norm(self, s3):
        lattice = subgroups(s3)
        k = lattice.by_label("C2.2")
        t = orbit(s3.whole, lattice.by_label("C3")).scaled(2)
        x = Var("X")
        assert equivalent(Res(k, InternalNorm(t, x)), InternalNorm(restrict(t, k), Res(k, x)), s3)

    def test_cardinality_differs(self, c4):
        assert not equivalent(Var("X"), Smash((Var("X"), Var("X")), c4.whole), c4)

    def test_level_mismatch(self, c4):
        with pytest.raises(LevelMismatchError):
            equivalent(Var("X"), parse("res[C2](X)", c4), c4)

    def test_gated_equivalence(self, c4, mixed_c4):
        a = parse("norm[C4](res[C2](X))", c4)
        b = parse("Npow[C4/C2](X)", c4)
        assert equivalent(a, b, c4, mixed_c4)

    def test_oracle_comparison_is_consistent(self, s3):
        pairs = [
            ("res[C2.1](norm[S3](res[C3](X)))", "norm[C2.1](res[e](X))"),
            ("Npow[S3/C2.1](X)", "Npow[S3/C2.2](X)"),
            ("smash(X, X)", "Npow[S3/C3](X)"),
        ]
        for left, right in pairs:
            comparison = compare_with_oracle(parse(left, s3), parse(right, s3), s3)
            assert comparison.consistent, f"{left} vs {right}"
        assert compare_with_oracle(parse("smash(X, X)", s3), parse("Npow[2*S3/S3](X)", s3), s3).oracle_equal

    def test_oracle_comparison_ignores_ring_annotation(self, c4):
        annotated = parse("norm[C4;R](res[e](X))", c4)
        plain = parse("norm[C4](res[e](X))", c4)
        assert normalize(annotated, c4).expression != normalize(plain, c4).expression
        comparison = compare_with_oracle(annotated, plain, c4)
        assert comparison.rewrite_equal and comparison.canonical_equal and comparison.oracle_equal
        assert comparison.consistent


class TestRewriteRules:
    """Tests for step_rewrite()"""

    def test_strategy_names_are_rules(self):
        assert set(STRATEGY) <= set(RULES)

    def test_res_res(self, c4):
        e = parse("res[e](res[C2](X))", c4)
        assert render(step_rewrite(e, "res-res", c4), c4) == "res[e](X)"

    def test_norm_norm(self, c4):
        e = parse("norm[C4](norm[C2](res[e](X)))", c4)
        assert render(step_rewrite(e, "norm-norm", c4), c4) == "norm[C4](res[e](X))"

    def test_double_coset(self, s3):
        e = parse("res[C2.1](norm[S3](res[C2.1](X)))", s3)
        rewritten = step_rewrite(e, "double-coset", s3)
        assert isinstance(rewritten, Smash)
        assert len(rewritten.factors) == 2
        assert exponents(rewritten, s3) == exponents(e, s3)

    def test_norm_res_fold(self, c4):
        e = parse("norm[C4](res[C2](X))", c4)
        folded = step_rewrite(e, "norm-res-fold", c4)
        assert render(folded, c4) == "Npow[C4/C2](X)"

    def test_every_rule_preserves_exponents(self, s3):
        for e in enumerate_expressions(s3, 2, limit=300):
            for name in RULES:
                try:
                    rewritten = step_rewrite(e, name, s3)
                except RuleNotApplicableError:
                    continue
                assert exponents(rewritten, s3) == exponents(e, s3), f"{name} on {render(e, s3)}"

    def test_not_applicable(self, c4):
        with pytest.raises(RuleNotApplicableError):
            step_rewrite(Var("X"), "res-res", c4)
        with pytest.raises(RuleNotApplicableError):
            step_rewrite(Var("X"), "no-such-rule", c4)


class TestNormMaps:
    """Tests for norm map descriptors"""

    def test_identity(self, c4):
        t = orbit(c4.whole, subgroups(c4).by_label("C2"))
        f = GMap.identity(realize(t))
        described = norm_map_of(f)
        assert described.source == described.target

    def test_fold(self, c4):
        t = orbit(c4.whole, subgroups(c4).by_label("C2"))
        fold = gmaps(coproduct(t, t), t)[0]
        described = norm_map_of(fold)
        assert described.source.exponent("R") == t
        assert described.target.exponent("R") == t.scaled(2)

    def test_projection(self, s3):
        lattice = subgroups(s3)
        s = orbit(s3.whole, lattice.by_label("C3"))
        t = orbit(s3.whole, lattice.by_label("C2.1"))
        projection = gmaps(product(s, t), t)[0]
        described = norm_map_of(projection)
        assert described.source.exponent("R") == t
        assert described.target.exponent("R") == product(s, t)

    def test_composition_runs_backwards(self, c4):
        lattice = subgroups(c4)
        free = orbit(c4.whole, lattice.trivial)
        half = orbit(c4.whole, lattice.by_label("C2"))
        f = gmaps(free, half)[0]
        g = gmaps(half, point(c4.whole))[0]
        composite = norm_map_of(g).then(norm_map_of(f))
        assert composite.source.exponent("R") == point(c4.whole)
        assert composite.target.exponent("R") == free
        assert composite.gmap == g.compose(f)
        with pytest.raises(LevelMismatchError):
            norm_map_of(f).then(norm_map_of(f))

    def test_gated_norm_map(self, c4):
        lattice = subgroups(c4)
        free = orbit(c4.whole, lattice.trivial)
        f = gmaps(free, point(c4.whole))[0]
        with pytest.raises(InadmissibleError):
            norm_map_of(f, trivial_system(c4))

    def test_counit_and_multiplication(self, c4):
        t = orbit(c4.whole, subgroups(c4).by_label("C2"))
        assert counit_of(t).target.exponent("R") == point(c4.whole)
        assert multiplication(t, 3).source.exponent("R") == t.scaled(3)
        assert "->" in counit_of(t).describe()

    @pytest.mark.parametrize("name", ["C4", "S3"])
    def test_triangles(self, name):
        group = get_preset(name)
        lattice = subgroups(group)
        orbits = [orbit(group.whole, k) for k in lattice.classes_within(group.whole)]
        for s in orbits:
            for t in orbits:
                for k in lattice.subgroups:
                    checks = triangle_checks(s, t, k)
                    assert set(checks) == {"disjoint-union", "product", "restriction"}
                    assert all(checks.values()), f"{name}: {s}, {t} at {lattice.label(k)}: {checks}"


class TestGenerators:
    """Tests for expression generators"""

    def test_enumeration_at_depth_one(self):
        group = get_preset("C2")
        assert len(enumerate_expressions(group, 1)) == 6
        assert len(enumerate_expressions(group, 1, ix=trivial_system(group))) == 4

    def test_enumeration_limit(self, s3):
        assert len(enumerate_expressions(s3, 2, limit=50)) == 50

    def test_random_expression_is_seeded(self, s3):
        a = random_expression(s3, random.Random(11), max_depth=4)
        b = random_expression(s3, random.Random(11), max_depth=4)
        assert a == b
