"""
Tests for finite groups and subgroup lattices

Run with: pytest test_group_core.py -v
"""

import pytest

from config import EngineConfig
from errors import CapExceededError, InputError, InvalidPermutationError, NotASubgroupError
from group_core import (
    Permutation,
    Subgroup,
    brute_force_subgroups,
    double_cosets,
    group_from_cayley_table,
    is_subconjugate,
    make_group,
    normalizer,
    subgroups,
    weyl_order,
)
from presets import get_preset


class TestPermutation:
    """Tests for Permutation"""

    def test_rejects_non_bijection(self):
        with pytest.raises(InvalidPermutationError):
            Permutation((0, 0, 1))

    def test_composition_applies_right_factor_first(self):
        p = Permutation.from_cycles(3, [(0, 1)])
        q = Permutation.from_cycles(3, [(1, 2)])
        # (p*q)(x) = p(q(x))
        assert (p * q)(1) == p(q(1)) == 0
        assert (p * q)(2) == 1

    def test_inverse_and_cycles(self):
        p = Permutation.from_cycles(4, [(0, 1, 2)])
        assert (p * p.inverse()).is_identity()
        assert p.cycles() == [(0, 1, 2)]
        assert str(p) == "(0 1 2)"
        assert str(Permutation.identity(3)) == "()"


class TestFiniteGroup:
    """Tests for group construction"""

    @pytest.mark.parametrize("name,order", [
        ("trivial", 1), ("C2", 2), ("C4", 4), ("C6", 6), ("C27", 27),
        ("S3", 6), ("D4", 8), ("Q8", 8), ("A4", 12), ("S4", 24),
    ])
    def test_preset_orders(self, name, order):
        group = get_preset(name)
        assert group.order == order, f"{name} has order {group.order}, expected {order}"

    def test_identity_is_element_zero(self):
        for name in ("S3", "Q8", "A4"):
            group = get_preset(name)
            assert group.elements[0].is_identity()
            assert all(group.mul(0, g) == g == group.mul(g, 0) for g in range(group.order))

    def test_inverse_table(self):
        group = get_preset("D4")
        for g in range(group.order):
            assert group.mul(g, group.inv(g)) == 0

    def test_element_cap(self):
        with pytest.raises(CapExceededError):
            make_group(4, [(1, 2, 3, 0), (1, 0, 2, 3)], "S4", EngineConfig(max_group_elements=10))

    def test_degree_mismatch(self):
        with pytest.raises(InvalidPermutationError):
            make_group(3, [(1, 0)], "bad")

    def test_cayley_table(self):
        table = [[(a + b) % 3 for b in range(3)] for a in range(3)]
        group = group_from_cayley_table(table, "Z3")
        assert group.order == 3
        assert len(subgroups(group)) == 2

    def test_cayley_table_must_be_square(self):
        with pytest.raises(InputError):
            group_from_cayley_table([[0, 1], [1]], "bad")

    def test_cayley_table_products_compose(self):
        s3 = get_preset("S3").multiplication_table
        # relabel so that the identity sits at index 1
        shift = [(x + 1) % 6 for x in range(6)]
        table = [[0] * 6 for _ in range(6)]
        for a in range(6):
            for b in range(6):
                table[shift[a]][shift[b]] = shift[s3[a][b]]
        group = group_from_cayley_table(table, "S3t")
        assert group.order == 6
        perms = group.generators
        for a in range(6):
            for b in range(6):
                assert perms[a].compose(perms[b]) == perms[table[a][b]], f"{a}*{b}"
        assert perms[1].is_identity()

    def test_cayley_table_without_identity(self):
        with pytest.raises(InputError):
            group_from_cayley_table([[1, 0], [1, 0]], "bad")


class TestSubgroupLattice:
    """Tests for subgroups()"""

    def test_s3_lattice(self):
        lattice = subgroups(get_preset("S3"))
        assert len(lattice) == 6
        assert len(lattice.conjugacy_classes) == 4
        assert [s.order for s in lattice.subgroups] == [1, 2, 2, 2, 3, 6]
        print(f"\n✓ S3 labels: {lattice.labels}")

    def test_cyclic_labels(self):
        lattice = subgroups(get_preset("C4"))
        assert lattice.labels == ("e", "C2", "C4")
        assert lattice.by_label("G") == lattice.whole
        assert lattice.by_label("#1").order == 2

    def test_duplicate_labels_are_numbered(self):
        lattice = subgroups(get_preset("S3"))
        assert {"C2.1", "C2.2", "C2.3"} <= set(lattice.labels)

    def test_unknown_label(self):
        with pytest.raises(InputError):
            subgroups(get_preset("C4")).by_label("C3")

    @pytest.mark.parametrize("name", ["trivial", "C2", "C4", "C6", "S3", "D4", "Q8", "A4"])
    def test_matches_brute_force(self, name):
        group = get_preset(name)
        fast = sorted(s.members for s in subgroups(group).subgroups)
        slow = sorted(brute_force_subgroups(group))
        assert fast == slow, f"{name}: {len(fast)} vs {len(slow)} subgroups"

    @pytest.mark.parametrize("name,count,classes", [
        ("D4", 10, 8), ("Q8", 6, 6), ("A4", 10, 5), ("S4", 30, 11),
    ])
    def test_known_counts(self, name, count, classes):
        lattice = subgroups(get_preset(name))
        assert len(lattice) == count
        assert len(lattice.conjugacy_classes) == classes

    def test_lattice_cap(self):
        with pytest.raises(CapExceededError):
            subgroups(get_preset("S4"), EngineConfig(max_lattice_order=12))

    def test_find_rejects_non_subgroup(self):
        with pytest.raises(NotASubgroupError):
            subgroups(get_preset("S3")).find([0, 1, 2])

    @pytest.mark.parametrize("members", [
        (), (1, 2), (0, 1, 2), (0, 1, 2, 3), (0, 6),
    ])
    def test_subgroup_constructor_validates(self, members):
        with pytest.raises(NotASubgroupError):
            Subgroup(get_preset("S3"), members)

    def test_subgroup_constructor_accepts_lattice_members(self):
        group = get_preset("D4")
        for sub in subgroups(group).subgroups:
            assert Subgroup(group, tuple(reversed(sub.members))) == sub

    def test_normality(self):
        lattice = subgroups(get_preset("S3"))
        c3 = lattice.by_label("C3")
        assert lattice.is_normal(c3)
        assert not lattice.is_normal(lattice.by_label("C2.1"))
        assert weyl_order(c3) == 2
        assert normalizer(lattice.by_label("C2.1")) == lattice.by_label("C2.1")

    def test_conjugation_witness(self):
        lattice = subgroups(get_preset("S3"))
        a, b = lattice.by_label("C2.1"), lattice.by_label("C2.2")
        g = lattice.conjugation_witness(a, b)
        assert g is not None
        assert lattice.conjugate(a, g) == b

    def test_join_and_intersection(self):
        lattice = subgroups(get_preset("S3"))
        a, b = lattice.by_label("C2.1"), lattice.by_label("C2.2")
        assert lattice.join(a, b) == lattice.whole
        assert lattice.intersection(a, b) == lattice.trivial

    def test_representative_within(self):
        lattice = subgroups(get_preset("S3"))
        c3 = lattice.by_label("C3")
        # inside C3 no subgroup of order 2 exists; every C2 is its own class inside itself
        c2 = lattice.by_label("C2.3")
        assert lattice.representative_within(c2, c2) == c2
        assert lattice.representative_within(lattice.whole, c2) == lattice.by_label("C2.1")
        assert len(lattice.classes_within(lattice.whole)) == 4
        assert len(lattice.classes_within(c3)) == 2


class TestDoubleCosets:
    """Tests for double coset decompositions"""

    def test_cosets_partition_the_group(self):
        group = get_preset("S3")
        lattice = subgroups(group)
        c2 = lattice.by_label("C2.1")
        decomposition = double_cosets(c2, c2)
        assert len(decomposition.representatives) == 2
        assert sum(len(c) for c in decomposition.cosets) == group.order
        assert sorted(len(c) for c in decomposition.cosets) == [2, 4]

    def test_normal_subgroup_cosets(self):
        lattice = subgroups(get_preset("C4"))
        c2 = lattice.by_label("C2")
        assert len(double_cosets(c2, c2).representatives) == 2
        assert len(double_cosets(lattice.trivial, lattice.trivial).representatives) == 4

    def test_ambient(self):
        lattice = subgroups(get_preset("S3"))
        c3 = lattice.by_label("C3")
        decomposition = double_cosets(lattice.trivial, lattice.trivial, ambient=c3)
        assert len(decomposition.representatives) == 3
        with pytest.raises(NotASubgroupError):
            double_cosets(lattice.by_label("C2.1"), lattice.trivial, ambient=c3)

    def test_subconjugacy(self):
        lattice = subgroups(get_preset("S3"))
        assert is_subconjugate(lattice.by_label("C2.2"), lattice.by_label("C2.1")) is not None
        assert is_subconjugate(lattice.by_label("C3"), lattice.by_label("C2.1")) is None
