from collections import Counter
from itertools import permutations, product

import pytest

from subfitlab.core.exceptions import InvalidInputError
from subfitlab.services.enumeration import (
    downsets,
    enumerate_lattices,
    enumerate_posets,
    find_isomorphism,
    is_isomorphic,
    lattices_of_size,
    posets_of_size,
)
from subfitlab.services.order import FinitePoset, dual, poset_from_cover_pairs, try_lattice


def _canonical(P: FinitePoset):
    pairs = [(i, j) for i in range(P.n) for j in range(P.n) if P.le(i, j)]
    return min(tuple(sorted((perm[i], perm[j]) for i, j in pairs)) for perm in permutations(range(P.n)))


def _labelled_lattice_classes(n):
    """Brute force: every partial order on the inner points, wrapped in bounds."""
    if n == 1:
        return {_canonical(FinitePoset(1, (1,)))}
    k = n - 2
    off_diagonal = [(i, j) for i in range(k) for j in range(k) if i != j]
    classes = set()
    for choice in product((False, True), repeat=len(off_diagonal)):
        rel = {p for p, keep in zip(off_diagonal, choice) if keep}
        if any((j, i) in rel for i, j in rel):
            continue
        if any((i, l) not in rel for i, j in rel for jj, l in rel if j == jj and i != l):
            continue
        top = n - 1
        rows = [(1 << n) - 1]
        for i in range(k):
            row = (1 << (i + 1)) | (1 << top)
            for j in range(k):
                if (i, j) in rel:
                    row |= 1 << (j + 1)
            rows.append(row)
        rows.append(1 << top)
        P = FinitePoset(n, tuple(rows))
        if try_lattice(P) is not None:
            classes.add(_canonical(P))
    return classes


class TestLatticeEnumeration:
    def test_counts_per_size(self):
        counts = Counter(L.n for L in enumerate_lattices(7))
        assert [counts[n] for n in range(1, 8)] == [1, 1, 1, 2, 5, 15, 53]

    def test_max_one(self):
        assert len(list(enumerate_lattices(1))) == 1

    def test_bound_enforced(self):
        with pytest.raises(InvalidInputError):
            list(enumerate_lattices(9))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_matches_labelled_oracle(self, n):
        found = {_canonical(L.poset) for L in lattices_of_size(n)}
        assert len(found) == len(lattices_of_size(n))
        assert found == _labelled_lattice_classes(n)

    def test_no_duplicates(self):
        lattices = list(enumerate_lattices(6))
        for i, L in enumerate(lattices):
            for M in lattices[i + 1:]:
                if L.n == M.n:
                    assert not is_isomorphic(L.poset, M.poset)


class TestPosetEnumeration:
    def test_counts(self):
        counts = Counter(P.n for P in enumerate_posets(5))
        assert [counts[n] for n in range(6)] == [1, 1, 2, 5, 16, 63]

    @pytest.mark.slow
    def test_six_points(self):
        assert len(posets_of_size(6)) == 318


class TestIsomorphism:
    def test_identity(self, intro_lattice):
        assert is_isomorphic(intro_lattice.poset, intro_lattice.poset)

    def test_chain_vs_antichain(self):
        assert not is_isomorphic(poset_from_cover_pairs(2, [(0, 1)]), poset_from_cover_pairs(2, []))

    def test_intro_is_self_dual(self, intro_lattice):
        P = intro_lattice.poset
        mapping = find_isomorphism(P, dual(P))
        assert mapping is not None
        Q = dual(P)
        assert all(P.le(i, j) == Q.le(mapping[i], mapping[j]) for i in range(P.n) for j in range(P.n))

    def test_different_sizes(self, chain):
        assert find_isomorphism(chain(2).poset, chain(3).poset) is None


class TestDownsets:
    def test_chain(self, chain):
        assert downsets(chain(2).poset) == [0b00, 0b01, 0b11]

    def test_antichain_gives_all_subsets(self, antichain_space):
        assert len(downsets(antichain_space(3).poset)) == 8
