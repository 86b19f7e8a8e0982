"""
Tests for rational representations and representation universes

Run with: pytest test_rep_universe.py -v
"""

from fractions import Fraction

import pytest
from sympy import QQ

from errors import GroupMismatchError, InputError, InvalidRepresentationError, UnknownPresetError
from group_core import subgroups
from gsets import all_gsets, orbit, point
from indexing_systems import complete_system, enumerate_all, trivial_system
from presets import get_preset
from rep_universe import (
    ConstituentRelation,
    Universe,
    admissibility_relation,
    admissible_for_universe,
    annihilator_contained,
    constituents_contained,
    direct_sum,
    hom_dim,
    hom_space,
    indexing_system_of_universe,
    is_intertwiner,
    matrix_rep,
    perm_rep,
    restrict_rep,
    restrict_universe,
    split_universe_name,
    tensor,
    trivial_rep,
    unisum_check,
    universe_from_dict,
    universe_leq,
    universe_preset,
)


@pytest.fixture(scope="module")
def c4():
    return get_preset("C4")


@pytest.fixture(scope="module")
def sign_c2():
    group = get_preset("C2")
    return matrix_rep(group.whole, [[[-1]]], "sign")


class TestReps:
    """Tests for Rep construction and linear algebra"""

    def test_perm_rep_dimension(self, c4):
        lattice = subgroups(c4)
        rep = perm_rep(orbit(lattice.whole, lattice.trivial))
        assert rep.dimension == 4
        assert len(rep.element_matrices) == 4

    def test_rejects_bad_relations(self):
        group = get_preset("C2")
        rep = matrix_rep(group.whole, [[[2]]], "bad")
        with pytest.raises(InvalidRepresentationError):
            rep.element_matrices

    def test_rejects_non_square(self):
        group = get_preset("C2")
        with pytest.raises(InvalidRepresentationError):
            matrix_rep(group.whole, [[[1, 0]]])

    def test_rational_entries(self):
        group = get_preset("C2")
        rep = matrix_rep(group.whole, [[["0", "1/2"], [2, Fraction(0)]]], "swap")
        assert rep.dimension == 2
        assert rep.element_matrices

    def test_rejects_non_rational(self):
        group = get_preset("C2")
        with pytest.raises(InvalidRepresentationError):
            matrix_rep(group.whole, [[["x"]]])

    def test_hom_dim_counts_double_cosets(self):
        group = get_preset("S3")
        lattice = subgroups(group)
        r = perm_rep(orbit(lattice.whole, lattice.by_label("C2.1")))
        assert hom_dim(r, r) == 2
        free = perm_rep(orbit(lattice.whole, lattice.trivial))
        assert hom_dim(free, free) == 6
        assert len(hom_space(r, free)) == 3

    def test_sign_is_not_in_trivial(self, sign_c2):
        whole = sign_c2.group
        relation = constituents_contained(sign_c2, trivial_rep(whole))
        assert not relation.contained
        assert relation.maps == ()
        assert relation.witness_vector == {0: QQ.one}
        assert relation.verify(sign_c2, trivial_rep(whole))
        assert relation.summary().startswith("not contained")
        assert constituents_contained(trivial_rep(whole), direct_sum(trivial_rep(whole), sign_c2)).contained

    def test_restriction(self, c4):
        lattice = subgroups(c4)
        c2 = lattice.by_label("C2")
        rep = restrict_rep(perm_rep(orbit(lattice.whole, c2)), c2)
        assert rep.is_trivial()

    def test_group_mismatch(self, c4, sign_c2):
        with pytest.raises(GroupMismatchError):
            tensor(trivial_rep(c4.whole), sign_c2)


class TestConstituentCertificates:
    """The spanning-maps certificate and its independent recheck"""

    @pytest.fixture
    def c2_reps(self):
        group = get_preset("C2")
        whole = group.whole
        return trivial_rep(whole), perm_rep(orbit(whole, group.trivial))

    def test_contained_carries_spanning_maps(self, c2_reps):
        trivial, regular = c2_reps
        relation = constituents_contained(trivial, regular)
        assert relation.contained
        assert len(relation.maps) == hom_dim(regular, trivial) == 1
        assert all(is_intertwiner(m, regular, trivial) for m in relation.maps)
        assert relation.verify(trivial, regular)
        assert relation.witness_vector is None

    def test_missing_constituent_gives_vector_outside_span(self, c2_reps):
        trivial, regular = c2_reps
        relation = constituents_contained(regular, trivial)
        assert not relation.contained
        # the single map sends the trivial line onto the diagonal
        [[a], [b]] = relation.maps[0].to_list()
        assert a == b != 0
        f = relation.functional
        assert f.get(0, QQ.zero) + f.get(1, QQ.zero) == 0
        assert relation.verify(regular, trivial)
        data = relation.to_dict()
        assert data["contained"] is False
        assert len(data["maps"]) == 1 and data["witness_vector"]

    def test_verify_rejects_tampered_certificates(self, c2_reps):
        trivial, regular = c2_reps
        relation = constituents_contained(regular, trivial)
        inside = ConstituentRelation(False, relation.maps, {0: QQ.one, 1: QQ.one}, relation.functional)
        assert not inside.verify(regular, trivial), "the diagonal lies in the image"
        partial = ConstituentRelation(False, (), relation.witness_vector, relation.functional)
        assert not partial.verify(regular, trivial), "an empty list is not a basis of the hom space"
        bogus = ConstituentRelation(True, ())
        assert not bogus.verify(trivial, regular)

    def test_span_agrees_with_annihilator(self, sign_c2):
        whole = sign_c2.group
        regular = perm_rep(orbit(whole, whole.parent.trivial))
        pairs = [(sign_c2, regular), (sign_c2, trivial_rep(whole)), (tensor(sign_c2, sign_c2), trivial_rep(whole)),
                 (regular, direct_sum(sign_c2, trivial_rep(whole)))]
        for v, w in pairs:
            assert constituents_contained(v, w).contained == annihilator_contained(v, w)

    def test_admissibility_verdicts_match_certificates(self, c4):
        lattice = subgroups(c4)
        u = universe_preset("mixed", c4)
        for k in lattice.subgroups:
            t = orbit(lattice.whole, k)
            assert admissibility_relation(u, lattice.whole, t).contained == admissible_for_universe(u, lattice.whole, t)


class TestUniverses:
    """Tests for admissibility and the induced indexing systems"""

    def test_trivial_rep_is_prepended(self, sign_c2):
        u = Universe(sign_c2.group, (sign_c2,))
        assert len(u.generators) == 2
        assert u.generators[0].is_trivial()

    @pytest.mark.parametrize("name", ["C2", "C4", "S3", "D4"])
    def test_extreme_universes(self, name):
        group = get_preset(name)
        assert indexing_system_of_universe(universe_preset("trivial", group)) == trivial_system(group)
        assert indexing_system_of_universe(universe_preset("complete", group)) == complete_system(group)

    def test_mixed_c4(self, c4):
        ix = indexing_system_of_universe(universe_preset("mixed", c4))
        assert str(ix) == "{C4/C2}"

    def test_mixed_c2_is_complete(self):
        group = get_preset("C2")
        assert indexing_system_of_universe(universe_preset("mixed", group)) == complete_system(group)

    @pytest.mark.parametrize("name", ["C3", "C9", "S3", "Q8"])
    def test_mixed_universes_give_indexing_systems(self, name):
        group = get_preset(name)
        ix = indexing_system_of_universe(universe_preset("mixed", group))
        assert ix in enumerate_all(group)

    def test_certificate_for_free_orbit(self, c4):
        lattice = subgroups(c4)
        u = universe_preset("mixed", c4)
        t = orbit(lattice.whole, lattice.trivial)
        relation = admissibility_relation(u, lattice.whole, t)
        assert not relation.contained
        assert relation.verify(tensor(perm_rep(t), u.at(lattice.whole)), u.at(lattice.whole))
        assert relation.to_dict()["contained"] is False

    def test_empty_set_is_not_tested(self, c4):
        lattice = subgroups(c4)
        with pytest.raises(InputError):
            admissible_for_universe(universe_preset("complete", c4), lattice.whole, orbit(lattice.whole, lattice.whole, 0))

    def test_gset_must_live_at_h(self, c4):
        lattice = subgroups(c4)
        with pytest.raises(InputError):
            admissible_for_universe(universe_preset("complete", c4), lattice.by_label("C2"), point(lattice.whole))

    @pytest.mark.parametrize("name", ["C4", "S3"])
    def test_unisum_for_admissible_sets(self, name):
        group = get_preset(name)
        u = universe_preset("complete", group)
        for t in all_gsets(group.whole, 3):
            assert unisum_check(u, group.whole, t), f"{name}: {t}"

    def test_unisum_rejects_inadmissible(self, c4):
        lattice = subgroups(c4)
        with pytest.raises(InputError):
            unisum_check(universe_preset("trivial", c4), lattice.whole, orbit(lattice.whole, lattice.trivial))

    def test_universe_order(self, c4):
        trivial = universe_preset("trivial", c4)
        mixed = universe_preset("mixed", c4)
        complete = universe_preset("complete", c4)
        assert universe_leq(trivial, mixed)
        assert universe_leq(mixed, complete)
        assert not universe_leq(complete, mixed)

    def test_restricted_universe(self, c4):
        lattice = subgroups(c4)
        c2 = lattice.by_label("C2")
        u = restrict_universe(universe_preset("mixed", c4), c2)
        assert all(rep.is_trivial() for rep in u.generators)
        assert admissible_for_universe(u, c2, point(c2).scaled(2))
        assert not admissible_for_universe(u, c2, orbit(c2, lattice.trivial))


class TestUniverseFiles:
    """Tests for universe presets and JSON files"""

    @pytest.mark.parametrize("text,expected", [
        ("C4-mixed", ("mixed", "C4")), ("mixed-C4", ("mixed", "C4")), ("complete-S3", ("complete", "S3")),
    ])
    def test_split_name(self, text, expected):
        assert split_universe_name(text) == expected

    def test_bad_name(self):
        with pytest.raises(UnknownPresetError):
            split_universe_name("C4-huge")

    def test_perm_generator(self, c4):
        u = universe_from_dict({"group": "C4", "generators": [{"kind": "perm", "gset": "C4/C2"}]}, c4)
        assert indexing_system_of_universe(u) == indexing_system_of_universe(universe_preset("mixed", c4))

    def test_matrix_generator(self):
        group = get_preset("C2")
        u = universe_from_dict({"generators": [{"kind": "matrix", "dimension": 1, "matrices": [[["-1"]]]}]}, group)
        assert indexing_system_of_universe(u) == complete_system(group)

    def test_dimension_mismatch(self):
        group = get_preset("C2")
        with pytest.raises(InvalidRepresentationError):
            universe_from_dict({"generators": [{"kind": "matrix", "dimension": 2, "matrices": [[["-1"]]]}]}, group)

    def test_unknown_kind(self, c4):
        with pytest.raises(InputError):
            universe_from_dict({"generators": [{"kind": "virtual"}]}, c4)
