import numpy as np
import pytest

from subfitlab.core.exceptions import CycleDetectedError, InvalidInputError, MissingBottomError
from subfitlab.models.core import PosetDocument
from subfitlab.services.enumeration import enumerate_lattices
from subfitlab.services.order import (
    FinitePoset,
    as_join_semilattice,
    covers,
    dual,
    dual_lattice,
    infimum,
    is_antichain,
    is_boolean,
    is_distributive_join_semilattice,
    is_distributive_lattice,
    mask_of,
    poset_from_cover_pairs,
    poset_from_document,
    poset_to_document,
    principal_downset,
    principal_upset,
    supremum,
    to_dot,
    try_join_semilattice,
    try_lattice,
)
from tests.conftest import INTRO_COVERS, INTRO_LABELS


class TestConstruction:
    def test_intro_lattice_order(self):
        P = poset_from_cover_pairs(6, INTRO_COVERS, INTRO_LABELS)
        assert P.le_count == 16
        assert P.le(P.index("t"), P.index("1"))
        assert not P.le(P.index("a"), P.index("s"))
        assert P.bottom == 0 and P.top == 5

    def test_cycle_rejected(self):
        with pytest.raises(CycleDetectedError):
            poset_from_cover_pairs(3, [(0, 1), (1, 2), (2, 0)])

    def test_self_loop_rejected(self):
        with pytest.raises(CycleDetectedError):
            poset_from_cover_pairs(2, [(1, 1)])

    def test_out_of_range_pair(self):
        with pytest.raises(InvalidInputError):
            poset_from_cover_pairs(2, [(0, 2)])

    def test_too_many_elements(self):
        with pytest.raises(InvalidInputError):
            poset_from_cover_pairs(65, [])

    def test_empty_poset(self):
        P = poset_from_cover_pairs(0, [])
        assert P.n == 0
        assert try_join_semilattice(P) is None

    def test_covers_drop_transitive_pairs(self):
        P = poset_from_cover_pairs(3, [(0, 1), (1, 2), (0, 2)])
        assert covers(P) == [(0, 1), (1, 2)]

    def test_le_matrix_matches_le(self, intro_lattice):
        P = intro_lattice.poset
        M = P.le_matrix()
        assert M.sum() == P.le_count
        assert all(M[i, j] == P.le(i, j) for i in range(P.n) for j in range(P.n))
        assert np.all(np.diag(M))

    def test_index_resolution(self, intro_lattice):
        P = intro_lattice.poset
        assert P.index("s") == 4
        assert P.index("3") == 3
        with pytest.raises(InvalidInputError):
            P.index("nope")
        with pytest.raises(InvalidInputError):
            P.index("9")


class TestDocuments:
    def test_round_trip(self):
        doc = PosetDocument(n=6, covers=sorted(INTRO_COVERS), labels=INTRO_LABELS)
        assert poset_to_document(poset_from_document(doc)) == doc

    def test_json_is_stable(self):
        doc = PosetDocument(n=3, covers=[(0, 1), (0, 2)])
        text = poset_to_document(poset_from_document(doc)).model_dump_json()
        assert text == '{"n":3,"covers":[[0,1],[0,2]],"labels":null}'

    @pytest.mark.parametrize(
        "payload",
        [
            {"n": 2, "covers": [[0, 5]]},
            {"n": 2, "covers": [], "labels": ["a"]},
            {"n": 2, "covers": [], "labels": ["a", "a"]},
            {"n": 2, "covers": [], "extra": 1},
        ],
    )
    def test_invalid_documents(self, payload):
        with pytest.raises(ValueError):
            PosetDocument.model_validate(payload)


class TestStructures:
    def test_join_semilattice_requires_all_joins(self):
        # two maximal points have no join
        assert try_join_semilattice(poset_from_cover_pairs(3, [(0, 1), (0, 2)])) is None

    def test_join_semilattice_without_bottom(self):
        P = poset_from_cover_pairs(3, [(0, 2), (1, 2)])
        A = try_join_semilattice(P)
        assert A is not None and A.bottom is None and A.top == 2
        assert try_lattice(P) is None
        with pytest.raises(MissingBottomError):
            A.join_all(0)

    def test_lattice_tables_agree_with_order(self, intro_lattice):
        P = intro_lattice.poset
        for x in range(P.n):
            for y in range(P.n):
                both = mask_of([x, y])
                assert intro_lattice.j(x, y) == supremum(P, both)
                assert intro_lattice.m(x, y) == infimum(P, both)

    def test_dual_is_involution(self, intro_lattice):
        P = intro_lattice.poset
        assert dual(dual(P)) == P
        assert dual(P).top == P.bottom

    def test_dual_lattice_swaps_operations(self, n5):
        D = dual_lattice(n5)
        assert D.top == n5.bottom
        assert D.j(1, 3) == n5.m(1, 3)

    def test_principal_restrictions(self, intro_lattice):
        sub, indices = principal_downset(intro_lattice, 4)
        assert indices == (0, 3, 4)
        assert sub.top == 2
        up, up_indices = principal_upset(intro_lattice, 3)
        assert up_indices == (3, 4, 5)
        assert up.n == 3

    def test_antichain(self):
        assert is_antichain(poset_from_cover_pairs(3, []))
        assert not is_antichain(poset_from_cover_pairs(2, [(0, 1)]))

    def test_to_dot(self, boolean2):
        dot = to_dot(boolean2.poset, "b2")
        assert dot.startswith("digraph b2 {")
        assert 'n1 [label="p"];' in dot
        assert "n0 -> n1;" in dot


class TestDistributivity:
    def test_examples(self, intro_lattice, m3, n5, boolean3, chain):
        assert not is_distributive_lattice(intro_lattice)
        assert not is_distributive_lattice(m3)
        assert not is_distributive_lattice(n5)
        assert is_distributive_lattice(boolean3)
        assert is_distributive_lattice(chain(4))

    def test_three_way_equivalence(self):
        for L in enumerate_lattices(6):
            flag = is_distributive_lattice(L)
            assert flag == is_distributive_join_semilattice(as_join_semilattice(L))
            assert flag == is_distributive_join_semilattice(dual_lattice(L))
            assert flag == is_distributive_lattice(dual_lattice(L))

    def test_boolean(self, boolean3, chain, m3):
        assert is_boolean(boolean3)
        assert not is_boolean(chain(3))
        # complemented but not distributive
        assert not is_boolean(m3)

    def test_singleton_lattice(self):
        L = try_lattice(FinitePoset(1, (1,)))
        assert L.top == L.bottom == 0
        assert is_distributive_lattice(L)
