"""Enumeration of finite posets and lattices up to isomorphism."""

from collections import defaultdict
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx
import structlog

from subfitlab.core.exceptions import InvalidInputError
from subfitlab.services.order import FiniteLattice, FinitePoset, covers, popcount, try_lattice

logger = structlog.get_logger()

MAX_LATTICE_SIZE = 8

Signature = Tuple[Tuple[int, int], ...]


def signature(P: FinitePoset) -> Signature:
    """Isomorphism invariant: sorted (down-size, up-size) pairs."""
    return tuple(sorted((popcount(P.down[i]), popcount(P.up[i])) for i in range(P.n)))


def cover_graph(P: FinitePoset) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(range(P.n))
    G.add_edges_from(covers(P))
    return G


def find_isomorphism(P: FinitePoset, Q: FinitePoset) -> Optional[Dict[int, int]]:
    """An order-isomorphism P -> Q as an index map, or None."""
    if P.n != Q.n or signature(P) != signature(Q):
        return None
    matcher = nx.algorithms.isomorphism.DiGraphMatcher(cover_graph(P), cover_graph(Q))
    for mapping in matcher.isomorphisms_iter():
        return dict(mapping)
    return None


def is_isomorphic(P: FinitePoset, Q: FinitePoset) -> bool:
    if P.n != Q.n or signature(P) != signature(Q):
        return False
    return nx.is_isomorphic(cover_graph(P), cover_graph(Q))


def downsets(P: FinitePoset) -> List[int]:
    """All downsets of P as bitmasks, sorted by size then value."""
    seen = {0}
    frontier = [0]
    while frontier:
        grown = []
        for D in frontier:
            for x in range(P.n):
                bit = 1 << x
                if D & bit:
                    continue
                if P.down[x] & ~bit & ~D == 0:
                    E = D | bit
                    if E not in seen:
                        seen.add(E)
                        grown.append(E)
        frontier = grown
    return sorted(seen, key=lambda m: (popcount(m), m))


def _extend(P: FinitePoset, below: int) -> FinitePoset:
    """P plus a new maximal element above exactly the downset ``below``."""
    new = P.n
    rows = [row | (1 << new) if (below >> i) & 1 else row for i, row in enumerate(P.up)]
    rows.append(1 << new)
    return FinitePoset(P.n + 1, tuple(rows))


class _Catalogue:
    """Isomorphism-class representatives, bucketed by signature."""

    def __init__(self):
        self._buckets: Dict[Signature, List[nx.DiGraph]] = defaultdict(list)
        self.members: List[FinitePoset] = []

    def add(self, P: FinitePoset) -> bool:
        bucket = self._buckets[signature(P)]
        G = cover_graph(P)
        if any(nx.is_isomorphic(G, H) for H in bucket):
            return False
        bucket.append(G)
        self.members.append(P)
        return True


def posets_of_size(n: int, smaller: Optional[List[FinitePoset]] = None) -> List[FinitePoset]:
    """
    One representative per isomorphism class of posets with exactly n elements.

    Every poset arises from one with n-1 elements by adding a maximal element
    over some downset, so it suffices to extend each smaller representative.
    """
    if n == 0:
        return [FinitePoset(0, ())]
    if smaller is None:
        smaller = posets_of_size(n - 1)
    catalogue = _Catalogue()
    for P in smaller:
        for D in downsets(P):
            catalogue.add(_extend(P, D))
    return catalogue.members


def enumerate_posets(max_n: int) -> Iterator[FinitePoset]:
    """All posets with at most ``max_n`` elements up to isomorphism, by size."""
    level = [FinitePoset(0, ())]
    yield from level
    for n in range(1, max_n + 1):
        level = posets_of_size(n, level)
        logger.debug("posets_enumerated", n=n, count=len(level))
        yield from level


def _bounded_extension(P: FinitePoset) -> FinitePoset:
    """New bottom and top around P; P's elements become 1..n."""
    n = P.n + 2
    top = n - 1
    rows = [(1 << n) - 1]
    for row in P.up:
        rows.append((row << 1) | (1 << top))
    rows.append(1 << top)
    return FinitePoset(n, tuple(rows))


def lattices_of_size(n: int, inner: Optional[List[FinitePoset]] = None) -> List[FiniteLattice]:
    """
    One representative per isomorphism class of lattices with exactly n elements.

    A finite lattice with n >= 2 elements is its inner poset wrapped in a new
    bottom and top, and non-isomorphic inner posets give non-isomorphic lattices.
    """
    if n < 1:
        return []
    if n == 1:
        return [try_lattice(FinitePoset(1, (1,)))]
    if inner is None:
        inner = posets_of_size(n - 2)
    out = []
    for P in inner:
        L = try_lattice(_bounded_extension(P))
        if L is not None:
            out.append(L)
    return out


def enumerate_lattices(max_n: int) -> Iterator[FiniteLattice]:
    """All lattices with at most ``max_n`` elements up to isomorphism, by size."""
    if max_n > MAX_LATTICE_SIZE:
        raise InvalidInputError(f"lattice enumeration is bounded by {MAX_LATTICE_SIZE} elements, got {max_n}")
    inner_levels: List[List[FinitePoset]] = [[FinitePoset(0, ())]]
    for n in range(1, max_n + 1):
        if n >= 3:
            inner_levels.append(posets_of_size(n - 2, inner_levels[-1]))
        inner = inner_levels[n - 2] if n >= 2 else None
        level = lattices_of_size(n, inner)
        logger.debug("lattices_enumerated", n=n, count=len(level))
        yield from level
