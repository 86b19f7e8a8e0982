"""
Tests for indexing systems: validation, generation, enumeration and graph subgroups

Run with: pytest test_indexing_systems.py -v
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import EngineConfig
from errors import CapExceededError, GroupMismatchError, InadmissibleError, InputError
from group_core import subgroups
from gsets import orbit, point
from indexing_systems import (
    AXIOMS,
    DEFAULT_RULE_ORDER,
    candidate_pairs,
    complete_system,
    enumerate_all,
    enumerate_brute_force,
    family_of,
    from_pairs,
    generate,
    graph_subgroup,
    indexing_from_dict,
    join,
    leq,
    leq_table,
    meet,
    trivial_system,
    validate,
)
from presets import get_preset


@pytest.fixture(scope="module")
def c4():
    return get_preset("C4")


class TestValidation:
    """Tests for validate()"""

    @pytest.mark.parametrize("name", ["C2", "C4", "S3", "D4"])
    def test_extremes_are_valid(self, name):
        group = get_preset(name)
        assert validate(trivial_system(group)).passed
        assert validate(complete_system(group)).passed

    def test_report_lists_every_axiom(self, c4):
        report = validate(trivial_system(c4))
        assert [r.axiom for r in report.results] == list(AXIOMS)

    def test_missing_restriction(self, c4):
        lattice = subgroups(c4)
        pairs = [(h, h) for h in lattice.subgroups] + [(lattice.whole, lattice.trivial)]
        report = validate(from_pairs(c4, pairs))
        assert not report.passed
        assert [r.axiom for r in report.failures()] == ["restriction-functoriality"]
        print(f"\n✓ Counterexample: {report.result('restriction-functoriality').counterexample}")
        assert "restriction to" in report.result("restriction-functoriality").counterexample

    def test_missing_trivial_sets(self, c4):
        lattice = subgroups(c4)
        report = validate(from_pairs(c4, [(lattice.whole, lattice.whole)]))
        assert not report.result("trivial-sets").passed

    def test_admits_gset(self, c4):
        lattice = subgroups(c4)
        ix = trivial_system(c4)
        assert ix.admits_gset(point(lattice.whole).scaled(3))
        assert not ix.admits_gset(orbit(lattice.whole, lattice.trivial))


class TestGenerate:
    """Tests for generate()"""

    def test_c4_free_orbit(self, c4):
        lattice = subgroups(c4)
        ix = generate(c4, [(lattice.whole, lattice.trivial)])
        assert str(ix) == "{C2/e, C4/e}"
        assert validate(ix).passed

    def test_generated_system_is_least(self, c4):
        lattice = subgroups(c4)
        ix = generate(c4, [(lattice.whole, lattice.trivial)])
        for other in enumerate_all(c4):
            if other.admits(lattice.whole, lattice.trivial):
                assert leq(ix, other)

    def test_s3_conjugates_collapse(self):
        group = get_preset("S3")
        lattice = subgroups(group)
        a = generate(group, [(lattice.whole, lattice.by_label("C2.1"))])
        b = generate(group, [(lattice.whole, lattice.by_label("C2.3"))])
        assert a == b

    @settings(max_examples=20, deadline=None)
    @given(st.permutations(list(DEFAULT_RULE_ORDER)))
    def test_rule_order_does_not_matter(self, order):
        group = get_preset("S3")
        lattice = subgroups(group)
        declared = [(lattice.whole, lattice.trivial), (lattice.by_label("C3"), lattice.trivial)]
        assert generate(group, declared, order=order) == generate(group, declared)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(["C2", "C4", "C6", "S3", "D4"]), st.data())
    def test_generate_is_a_closure_operator(self, name, data):
        group = get_preset(name)
        pairs = candidate_pairs(group)
        smaller = data.draw(st.sets(st.sampled_from(pairs)), label="declared")
        larger = smaller | data.draw(st.sets(st.sampled_from(pairs)), label="extra")
        closed = generate(group, smaller)
        assert all(closed.admits(h, k) for h, k in smaller)
        assert leq(closed, generate(group, larger))
        assert generate(group, closed.admissible) == closed

    def test_unknown_rule_family(self, c4):
        lattice = subgroups(c4)
        with pytest.raises(InputError):
            generate(c4, [(lattice.whole, lattice.trivial)], order=["conjugation", "bogus"])


class TestLattice:
    """Tests for meet, join and the partial order"""

    def test_meet_and_join_stay_in_the_lattice(self):
        group = get_preset("C9")
        systems = enumerate_all(group)
        for a in systems:
            for b in systems:
                assert meet(a, b) in systems
                assert join(a, b) in systems
                assert leq(meet(a, b), a) and leq(a, join(a, b))

    def test_leq_table(self, c4):
        systems = enumerate_all(c4)
        table = leq_table(systems)
        assert all(table[0])
        assert all(row[-1] for row in table)

    def test_group_mismatch(self, c4):
        with pytest.raises(GroupMismatchError):
            meet(trivial_system(c4), trivial_system(get_preset("C2")))


class TestEnumeration:
    """Tests for enumerate_all()"""

    @pytest.mark.parametrize("name,count", [
        ("trivial", 1), ("C2", 2), ("C3", 2), ("C4", 5), ("C9", 5), ("C27", 14),
    ])
    def test_cyclic_counts(self, name, count):
        systems = enumerate_all(get_preset(name))
        assert len(systems) == count, f"{name}: {len(systems)} indexing systems"
        assert systems[0] == trivial_system(get_preset(name))

    @pytest.mark.parametrize("name", ["C2", "C4", "C9", "S3", "C27"])
    def test_matches_brute_force(self, name):
        group = get_preset(name)
        fast = enumerate_all(group)
        slow = enumerate_brute_force(group)
        assert [ix.admissible for ix in fast] == [ix.admissible for ix in slow]

    def test_every_enumerated_system_validates(self):
        for ix in enumerate_all(get_preset("S3")):
            assert validate(ix).passed, f"{ix} failed"

    def test_enumeration_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_all(get_preset("S4"), EngineConfig(max_enumeration_classes=5))

    def test_brute_force_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_brute_force(get_preset("D4"), EngineConfig(max_brute_force_pairs=4))


class TestFiles:
    """Tests for the JSON form"""

    def test_round_trip(self, c4):
        lattice = subgroups(c4)
        ix = generate(c4, [(lattice.whole, lattice.trivial)], name="free")
        assert indexing_from_dict(ix.to_dict(), c4) == ix

    def test_wrong_group(self, c4):
        with pytest.raises(GroupMismatchError):
            indexing_from_dict({"group": "S3", "admissible": {}}, c4)

    def test_missing_admissible(self, c4):
        with pytest.raises(InputError):
            indexing_from_dict({"group": "C4"}, c4)


class TestGraphSubgroups:
    """Tests for graph subgroups of G x S_n"""

    def test_family_sizes(self):
        group = get_preset("C2")
        assert len(family_of(trivial_system(group), 2)) == 2
        assert len(family_of(complete_system(group), 2)) == 3

    def test_graphs_meet_symmetric_trivially(self):
        group = get_preset("S3")
        for graph in family_of(complete_system(group), 3):
            assert graph.meets_symmetric_trivially()
            assert graph.order == graph.level.order

    def test_inadmissible_graph(self, c4):
        lattice = subgroups(c4)
        with pytest.raises(InadmissibleError):
            graph_subgroup(trivial_system(c4), lattice.whole, orbit(lattice.whole, lattice.trivial))

    def test_restriction_of_graph(self, c4):
        lattice = subgroups(c4)
        graph = graph_subgroup(None, lattice.whole, orbit(lattice.whole, lattice.trivial))
        c2 = lattice.by_label("C2")
        restricted = graph.restricted_to(c2)
        assert restricted.order == 2
        assert restricted.gset.cardinality == 4

    @pytest.mark.parametrize("name", ["C2", "C4", "S3"])
    def test_families_are_indexing_families(self, name):
        group = get_preset(name)
        lattice = subgroups(group)
        d = group.degree
        for ix in enumerate_all(group):
            for n in range(1, 5):
                family = family_of(ix, n)
                keys = {graph.class_key for graph in family}
                for graph in family:
                    assert graph.meets_symmetric_trivially()
                    for k in lattice.subgroups_of(graph.level):
                        assert graph.restricted_to(k).class_key in keys, f"{ix} n={n}: {lattice.label(k)}"
                for h in lattice.subgroups:
                    fixed = graph_subgroup(None, h, point(h).scaled(n))
                    assert fixed.class_key in keys, f"{ix} n={n}: {lattice.label(h)} x 1"
                    assert all(p.images[d:] == tuple(range(d, d + n)) for p in fixed.elements())
