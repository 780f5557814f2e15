"""
Finite posets, join-semilattices and lattices.

Elements are the indices 0..n-1. The order is stored as one bitmask row per
element: bit j of ``up[i]`` is set iff i <= j. Joins and meets are tables of
indices. Everything here is immutable and pure.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from subfitlab.core.exceptions import CycleDetectedError, InvalidInputError, MissingBottomError
from subfitlab.models.core import PosetDocument

logger = structlog.get_logger()

MAX_ELEMENTS = 64


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Sequence[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class FinitePoset:
    """A finite partial order on 0..n-1, one up-set bitmask per element."""

    n: int
    up: Tuple[int, ...]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.n > MAX_ELEMENTS:
            raise InvalidInputError(f"at most {MAX_ELEMENTS} elements supported, got {self.n}")
        if len(self.up) != self.n:
            raise InvalidInputError("one up-set row per element required")
        if self.labels is not None and len(self.labels) != self.n:
            raise InvalidInputError("one label per element required")

    @cached_property
    def down(self) -> Tuple[int, ...]:
        rows = [0] * self.n
        for i, row in enumerate(self.up):
            for j in bits(row):
                rows[j] |= 1 << i
        return tuple(rows)

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def le(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.le(i, j)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def index(self, label: str) -> int:
        """Resolve a label, or a bare index when the poset is unlabelled."""
        if self.labels is not None and label in self.labels:
            return self.labels.index(label)
        try:
            i = int(label)
        except ValueError:
            raise InvalidInputError(f"unknown element label {label!r}")
        if not 0 <= i < self.n:
            raise InvalidInputError(f"element index {i} out of range for n={self.n}")
        return i

    def describe(self, mask: int) -> List[str]:
        return [self.label(i) for i in bits(mask)]

    @property
    def le_count(self) -> int:
        """Number of true entries of the order relation."""
        return sum(popcount(row) for row in self.up)

    def le_matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=bool)
        for i, row in enumerate(self.up):
            for j in bits(row):
                out[i, j] = True
        return out

    @cached_property
    def bottom(self) -> Optional[int]:
        for i, row in enumerate(self.up):
            if row == self.all_mask:
                return i
        return None

    @cached_property
    def top(self) -> Optional[int]:
        for i, row in enumerate(self.down):
            if row == self.all_mask:
                return i
        return None

    @cached_property
    def maximal(self) -> int:
        return mask_of([i for i, row in enumerate(self.up) if row == 1 << i])

    @cached_property
    def minimal(self) -> int:
        return mask_of([i for i, row in enumerate(self.down) if row == 1 << i])

    def upset(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def downset(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def is_upset(self, mask: int) -> bool:
        return self.upset(mask) == mask

    def is_downset(self, mask: int) -> bool:
        return self.downset(mask) == mask

    @cached_property
    def up_index(self) -> Dict[int, int]:
        return {row: i for i, row in enumerate(self.up)}

    @cached_property
    def down_index(self) -> Dict[int, int]:
        return {row: i for i, row in enumerate(self.down)}

    def restrict(self, indices: Sequence[int]) -> "FinitePoset":
        """Induced order on ``indices``; local index k is ``indices[k]``."""
        position = {g: k for k, g in enumerate(indices)}
        rows = []
        for g in indices:
            rows.append(mask_of([position[h] for h in bits(self.up[g]) if h in position]))
        labels = tuple(self.label(g) for g in indices) if self.labels is not None else None
        return FinitePoset(len(indices), tuple(rows), labels)


def _closure_rows(n: int, pairs: Sequence[Tuple[int, int]]) -> Tuple[int, ...]:
    rel = np.eye(n, dtype=bool)
    for i, j in pairs:
        if i == j:
            raise CycleDetectedError(f"self-loop on element {i}", details={"pair": [i, j]})
        rel[i, j] = True
    # Warshall
    for k in range(n):
        rel |= rel[:, k, None] & rel[None, k, :]
    both = rel & rel.T
    np.fill_diagonal(both, False)
    if both.any():
        i, j = (int(v) for v in np.argwhere(both)[0])
        raise CycleDetectedError(
            f"elements {i} and {j} lie on a common cycle",
            details={"elements": [i, j]},
        )
    return tuple(mask_of(np.flatnonzero(rel[i]).tolist()) for i in range(n))


def poset_from_cover_pairs(
    n: int,
    covers: Sequence[Tuple[int, int]],
    labels: Optional[Sequence[str]] = None,
) -> FinitePoset:
    """Reflexive-transitive closure of ``covers`` on 0..n-1."""
    if n < 0 or n > MAX_ELEMENTS:
        raise InvalidInputError(f"element count must be in 0..{MAX_ELEMENTS}, got {n}")
    for i, j in covers:
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidInputError(f"cover pair ({i}, {j}) out of range for n={n}")
    rows = _closure_rows(n, covers)
    logger.debug("poset_built", n=n, covers=len(covers))
    return FinitePoset(n, rows, tuple(labels) if labels is not None else None)


def poset_from_document(doc: PosetDocument) -> FinitePoset:
    return poset_from_cover_pairs(doc.n, [tuple(p) for p in doc.covers], doc.labels)


def poset_to_document(P: FinitePoset) -> PosetDocument:
    return PosetDocument(
        n=P.n,
        covers=sorted(covers(P)),
        labels=list(P.labels) if P.labels is not None else None,
    )


def covers(P: FinitePoset) -> List[Tuple[int, int]]:
    """Cover pairs (i, j): i < j with nothing strictly between."""
    out = []
    for i in range(P.n):
        strict = P.up[i] & ~(1 << i)
        for j in bits(strict):
            if P.down[j] & strict == 1 << j:
                out.append((i, j))
    return out


def dual(P: FinitePoset) -> FinitePoset:
    return FinitePoset(P.n, P.down, P.labels)


def is_antichain(P: FinitePoset) -> bool:
    return all(row == 1 << i for i, row in enumerate(P.up))


def supremum(P: FinitePoset, mask: int) -> Optional[int]:
    """Least upper bound of the elements in ``mask``, if it exists."""
    ub = P.all_mask
    for i in bits(mask):
        ub &= P.up[i]
    return P.up_index.get(ub)


def infimum(P: FinitePoset, mask: int) -> Optional[int]:
    """Greatest lower bound of the elements in ``mask``, if it exists."""
    lb = P.all_mask
    for i in bits(mask):
        lb &= P.down[i]
    return P.down_index.get(lb)


def to_dot(P: FinitePoset, name: str = "poset") -> str:
    """Hasse diagram as DOT text, edges pointing upward."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(P.n):
        lines.append(f'  n{i} [label="{P.label(i)}"];')
    for i, j in covers(P):
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines)


@dataclass(frozen=True)
class FiniteJoinSemilattice:
    poset: FinitePoset
    join: Tuple[Tuple[int, ...], ...]
    bottom: Optional[int]
    top: Optional[int]

    @property
    def n(self) -> int:
        return self.poset.n

    def j(self, x: int, y: int) -> int:
        return self.join[x][y]

    def join_all(self, mask: int) -> int:
        """Join of a set of elements; the empty join is the bottom."""
        elems = list(bits(mask))
        if not elems:
            if self.bottom is None:
                raise MissingBottomError("empty join needs a bottom element")
            return self.bottom
        acc = elems[0]
        for x in elems[1:]:
            acc = self.join[acc][x]
        return acc


@dataclass(frozen=True)
class FiniteLattice:
    semilattice: FiniteJoinSemilattice
    meet: Tuple[Tuple[int, ...], ...]

    @property
    def poset(self) -> FinitePoset:
        return self.semilattice.poset

    @property
    def n(self) -> int:
        return self.semilattice.n

    @property
    def join(self) -> Tuple[Tuple[int, ...], ...]:
        return self.semilattice.join

    @property
    def bottom(self) -> int:
        return self.semilattice.bottom

    @property
    def top(self) -> int:
        return self.semilattice.top

    def j(self, x: int, y: int) -> int:
        return self.semilattice.join[x][y]

    def m(self, x: int, y: int) -> int:
        return self.meet[x][y]


JoinStructure = Union[FiniteJoinSemilattice, FiniteLattice]


def as_join_semilattice(A: JoinStructure) -> FiniteJoinSemilattice:
    return A.semilattice if isinstance(A, FiniteLattice) else A


def _pair_table(n: int, index: Dict[int, int], rows: Tuple[int, ...]) -> Optional[Tuple[Tuple[int, ...], ...]]:
    table = []
    for x in range(n):
        row = []
        for y in range(n):
            z = index.get(rows[x] & rows[y])
            if z is None:
                return None
            row.append(z)
        table.append(tuple(row))
    return tuple(table)


def try_join_semilattice(P: FinitePoset) -> Optional[FiniteJoinSemilattice]:
    """The join-semilattice on P, or None if some pair has no least upper bound."""
    if P.n == 0:
        return None
    # lub(x, y) is the element whose up-set is exactly up[x] & up[y]
    join = _pair_table(P.n, P.up_index, P.up)
    if join is None:
        return None
    return FiniteJoinSemilattice(P, join, P.bottom, P.top)


def try_lattice(P: FinitePoset) -> Optional[FiniteLattice]:
    semilattice = try_join_semilattice(P)
    if semilattice is None:
        return None
    meet = _pair_table(P.n, P.down_index, P.down)
    if meet is None:
        return None
    return FiniteLattice(semilattice, meet)


def dual_lattice(L: FiniteLattice) -> FiniteLattice:
    flipped = FiniteJoinSemilattice(dual(L.poset), L.meet, L.top, L.bottom)
    return FiniteLattice(flipped, L.join)


def restrict_join_semilattice(A: FiniteJoinSemilattice, indices: Sequence[int]) -> FiniteJoinSemilattice:
    """Sub-semilattice on ``indices`` (which must be join-closed), re-indexed."""
    position = {g: k for k, g in enumerate(indices)}
    P = A.poset.restrict(indices)
    try:
        join = tuple(tuple(position[A.join[g][h]] for h in indices) for g in indices)
    except KeyError:
        raise InvalidInputError("restriction is not closed under joins")
    return FiniteJoinSemilattice(P, join, P.bottom, P.top)


def restrict_lattice(L: FiniteLattice, indices: Sequence[int]) -> FiniteLattice:
    position = {g: k for k, g in enumerate(indices)}
    semilattice = restrict_join_semilattice(L.semilattice, indices)
    try:
        meet = tuple(tuple(position[L.meet[g][h]] for h in indices) for g in indices)
    except KeyError:
        raise InvalidInputError("restriction is not closed under meets")
    return FiniteLattice(semilattice, meet)


def principal_downset(A: JoinStructure, a: int) -> Tuple[FiniteJoinSemilattice, Tuple[int, ...]]:
    """The join-semilattice below ``a`` with top ``a``, plus local-to-global indices."""
    A = as_join_semilattice(A)
    indices = tuple(bits(A.poset.down[a]))
    return restrict_join_semilattice(A, indices), indices


def principal_upset(L: FiniteLattice, a: int) -> Tuple[FiniteLattice, Tuple[int, ...]]:
    indices = tuple(bits(L.poset.up[a]))
    return restrict_lattice(L, indices), indices


def lattice_from_family(
    family: Sequence[int],
    join_of: Callable[[int, int], int],
    meet_of: Callable[[int, int], int],
    reverse: bool = False,
    labels: Optional[Sequence[str]] = None,
) -> FiniteLattice:
    """
    Lattice on a family of sets (bitmasks) ordered by inclusion, or by
    reverse inclusion when ``reverse``. ``join_of`` and ``meet_of`` combine two
    members and must land back in the family.
    """
    index = {member: i for i, member in enumerate(family)}
    if len(index) != len(family):
        raise InvalidInputError("family members must be distinct")
    n = len(family)
    up = []
    for i, a in enumerate(family):
        row = 0
        for j, b in enumerate(family):
            below = (b & ~a == 0) if reverse else (a & ~b == 0)
            if below:
                row |= 1 << j
        up.append(row)
    P = FinitePoset(n, tuple(up), tuple(labels) if labels is not None else None)
    try:
        join = tuple(tuple(index[join_of(a, b)] for b in family) for a in family)
        meet = tuple(tuple(index[meet_of(a, b)] for b in family) for a in family)
    except KeyError:
        raise InvalidInputError("family is not closed under the lattice operations")
    return FiniteLattice(FiniteJoinSemilattice(P, join, P.bottom, P.top), meet)


def set_family_lattice(family: Sequence[int], labels: Optional[Sequence[str]] = None) -> FiniteLattice:
    """Lattice of a union- and intersection-closed family ordered by inclusion."""
    return lattice_from_family(family, lambda a, b: a | b, lambda a, b: a & b, labels=labels)


def is_distributive_join_semilattice(A: JoinStructure) -> bool:
    """Every c <= a v b splits as a' v b' with a' <= a and b' <= b."""
    A = as_join_semilattice(A)
    down = A.poset.down
    for a in range(A.n):
        for b in range(a, A.n):
            for c in bits(down[A.join[a][b]]):
                left = down[a] & down[c]
                right = down[b] & down[c]
                if not any(A.join[x][y] == c for x in bits(left) for y in bits(right)):
                    return False
    return True


def distributivity_violation(L: FiniteLattice) -> Optional[Tuple[int, int, int]]:
    """A triple (x, y, z) with x ^ (y v z) != (x ^ y) v (x ^ z), if any."""
    J = np.asarray(L.join, dtype=np.int64)
    M = np.asarray(L.meet, dtype=np.int64)
    for x in range(L.n):
        diff = M[x, J] != J[np.ix_(M[x, :], M[x, :])]
        if diff.any():
            y, z = (int(v) for v in np.argwhere(diff)[0])
            logger.debug("distributivity_violation", n=L.n, triple=(x, y, z))
            return x, y, z
    return None


def is_distributive_lattice(L: FiniteLattice) -> bool:
    return distributivity_violation(L) is None


def complement_of(L: FiniteLattice, x: int) -> Optional[int]:
    for y in range(L.n):
        if L.meet[x][y] == L.bottom and L.join[x][y] == L.top:
            return y
    return None


def is_boolean(L: FiniteLattice) -> bool:
    """Complemented and distributive."""
    return is_distributive_lattice(L) and all(complement_of(L, x) is not None for x in range(L.n))
