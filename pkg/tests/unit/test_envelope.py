import pytest

from subfitlab.core.exceptions import ConditionsNotMetError, MissingBottomError, NotAnEmbeddingError
from subfitlab.services.enumeration import enumerate_lattices, is_isomorphic
from subfitlab.services.envelope import (
    JoinEmbedding,
    admissible_closure,
    admissible_subsets,
    build_envelope,
    check_prop41,
    check_prop41_transfer,
    condition_a_generators,
    envelope_of_downset_mismatch,
    is_admissible,
    verify_thm42,
)
from subfitlab.services.order import (
    is_distributive_lattice,
    poset_from_cover_pairs,
    try_join_semilattice,
)
from subfitlab.services.subfit import is_join_subfit


class TestAdmissible:
    def test_empty_family(self, m3):
        assert is_admissible(m3, 0)
        assert (0, m3.top) in admissible_subsets(m3)

    def test_m3_pair_is_not_admissible(self, m3):
        # joining z does not distribute over x ^ y
        assert not is_admissible(m3, 0b0110)

    def test_m3_atoms_are_admissible(self, m3):
        assert is_admissible(m3, 0b1110)

    def test_distributive_lattice_admits_everything(self, boolean2):
        assert len(admissible_subsets(boolean2)) == 16

    def test_closure(self, m3):
        assert admissible_closure(m3, 0b0110) == 0b10110
        assert admissible_closure(m3, 0b1110) == 0b11111
        assert admissible_closure(m3, 0) == 0b10000


class TestEnvelope:
    def test_distributive_lattice_is_its_own_envelope(self, boolean2):
        env = build_envelope(boolean2)
        assert env.E.n == 4
        assert env.L.n == 4
        assert is_isomorphic(env.E.poset, boolean2.poset)

    def test_eta_respects_bounds(self, intro_lattice):
        env = build_envelope(intro_lattice)
        assert env.eta[intro_lattice.bottom] == env.E.bottom
        assert env.eta[intro_lattice.top] == env.E.top
        assert len(set(env.eta)) == intro_lattice.n
        assert is_distributive_lattice(env.E)

    def test_elements_hold_upsets(self, chain):
        env = build_envelope(chain(3))
        top = env.elements[env.eta[2]]
        assert 2 in top and 1 not in top

    def test_needs_bottom(self):
        A = try_join_semilattice(poset_from_cover_pairs(3, [(0, 2), (1, 2)]))
        with pytest.raises(MissingBottomError):
            build_envelope(A)

    @pytest.mark.parametrize("name", ["m3", "n5", "intro_lattice", "boolean3"])
    def test_subfitness_transfers(self, name, request):
        assert verify_thm42(request.getfixturevalue(name))

    def test_small_lattices(self):
        for L in enumerate_lattices(5):
            env = build_envelope(L)
            assert is_join_subfit(env.L) == is_join_subfit(L)

    def test_downsets_of_boolean_lattice(self, boolean3):
        assert envelope_of_downset_mismatch(boolean3) is None


class TestEmbeddingConditions:
    def test_identity(self, intro_lattice):
        emb = JoinEmbedding.identity(intro_lattice)
        assert check_prop41(emb) == (True, True)
        assert check_prop41_transfer(emb)

    def test_generators_for_identity(self, boolean2):
        gens = condition_a_generators(JoinEmbedding.identity(boolean2))
        assert gens[1] == (1,)
        assert all(g is not None for g in gens.values())

    def test_chain_into_longer_chain(self, chain):
        emb = JoinEmbedding.of(chain(2), chain(3), (0, 2))
        assert check_prop41(emb) == (False, True)
        with pytest.raises(ConditionsNotMetError):
            check_prop41_transfer(emb)

    @pytest.mark.parametrize("mapping", [(0, 1), (0, 0), (0, 5)])
    def test_rejects_non_embeddings(self, chain, mapping):
        with pytest.raises(NotAnEmbeddingError):
            check_prop41(JoinEmbedding.of(chain(2), chain(3), mapping))

    def test_chain_onto_a_boolean_diagonal(self, chain, boolean2):
        # 0 < p < 1 inside 2x2: q has no generating family
        emb = JoinEmbedding.of(chain(3), boolean2, (0, 1, 3))
        assert check_prop41(emb) == (False, True)
        gens = condition_a_generators(emb)
        assert gens[2] is None
        assert gens[1] is not None
        with pytest.raises(ConditionsNotMetError):
            check_prop41_transfer(emb)


class TestEnvelopeStructure:
    def test_intro_lattice_sizes(self, intro_lattice):
        # only {a, b, t} forces the bottom, so every nonempty upset but
        # the one it generates is closed, and L reaches all of them
        env = build_envelope(intro_lattice)
        assert env.E.n == 12
        assert env.L.n == 12
        assert not is_join_subfit(intro_lattice)
        assert not is_join_subfit(env.L)

    @pytest.mark.parametrize("name", ["m3", "n5", "intro_lattice", "boolean3"])
    def test_elements_form_a_closure_system(self, name, request):
        A = request.getfixturevalue(name)
        members = {el.members for el in build_envelope(A).elements}
        for U in members:
            assert admissible_closure(A, U) == U
            for V in members:
                assert U & V in members

    @pytest.mark.parametrize("name", ["m3", "n5", "intro_lattice"])
    def test_eta_is_an_order_embedding(self, name, request):
        A = request.getfixturevalue(name)
        env = build_envelope(A)
        for a in range(A.n):
            for b in range(A.n):
                assert A.poset.le(a, b) == env.E.poset.le(env.eta[a], env.eta[b])
