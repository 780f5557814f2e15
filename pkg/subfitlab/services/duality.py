"""
Finite T0 spaces and their lattices of compact opens.

A finite space is given by its specialization order: p <= q means q lies in
the closure of p. Opens are downsets, closed sets are upsets and the closed
points are the maximal points. Point sets are bitmasks.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import structlog

from subfitlab.core.exceptions import BadInclusionError, NotDistributiveError, NotOpenError
from subfitlab.services.enumeration import downsets
from subfitlab.services.order import (
    FiniteLattice,
    FinitePoset,
    bits,
    dual,
    is_antichain,
    is_boolean,
    is_distributive_lattice,
    mask_of,
    set_family_lattice,
)
from subfitlab.services.subfit import is_join_subfit, is_meet_subfit

logger = structlog.get_logger()


@dataclass(frozen=True)
class FiniteSpace:
    poset: FinitePoset

    @property
    def n(self) -> int:
        return self.poset.n

    @property
    def points(self) -> int:
        return self.poset.all_mask

    @cached_property
    def opens(self) -> Tuple[int, ...]:
        return tuple(downsets(self.poset))

    @cached_property
    def patch_basis(self) -> Tuple[int, ...]:
        """Distinct nonempty differences U minus V of compact opens."""
        basis = {U & ~V for U in self.opens for V in self.opens}
        basis.discard(0)
        return tuple(sorted(basis))

    def is_open(self, U: int) -> bool:
        return U & ~self.points == 0 and self.poset.is_downset(U)

    def closure(self, S: int) -> int:
        return self.poset.upset(S)

    def interior(self, S: int) -> int:
        return sum(1 << p for p in bits(S) if self.poset.down[p] & ~S == 0)

    def describe(self, S: int) -> List[str]:
        return self.poset.describe(S)


def _require_open(X: FiniteSpace, U: int) -> None:
    if not X.is_open(U):
        raise NotOpenError("point set is not open", details={"points": X.describe(U)})


def open_sets(X: FiniteSpace) -> Tuple[int, ...]:
    return X.opens


def qcop_with_opens(X: FiniteSpace) -> Tuple[FiniteLattice, Tuple[int, ...]]:
    """The lattice of compact opens and the open set behind each element."""
    opens = X.opens
    labels = ["{" + ",".join(X.describe(U)) + "}" for U in opens]
    return set_family_lattice(opens, labels), opens


def qcop(X: FiniteSpace) -> FiniteLattice:
    return qcop_with_opens(X)[0]


def join_irreducibles(L: FiniteLattice) -> List[int]:
    """Elements with exactly one lower cover."""
    out = []
    for x in range(L.n):
        strict = L.poset.down[x] & ~(1 << x)
        lower_covers = [y for y in bits(strict) if L.poset.up[y] & strict == 1 << y]
        if len(lower_covers) == 1:
            out.append(x)
    return out


def birkhoff_space(L: FiniteLattice) -> FiniteSpace:
    """Join-irreducibles of L with the induced order."""
    if not is_distributive_lattice(L):
        raise NotDistributiveError("Birkhoff duality needs a distributive lattice")
    points = join_irreducibles(L)
    logger.debug("birkhoff_space", lattice_size=L.n, points=len(points))
    return FiniteSpace(L.poset.restrict(points))


def closed_points(X: FiniteSpace) -> int:
    return X.poset.maximal


def patch_interior(X: FiniteSpace, S: int) -> int:
    out = 0
    for B in X.patch_basis:
        if B & ~S == 0:
            out |= B
    return out


def patch_closure(X: FiniteSpace, S: int) -> int:
    """Closure of S in the topology generated by the sets U minus V."""
    return X.points & ~patch_interior(X, X.points & ~S)


def is_patch_open(X: FiniteSpace, S: int) -> bool:
    return patch_interior(X, S) == S


def patch_open_sets(X: FiniteSpace) -> List[int]:
    return [S for S in range(1 << X.n) if is_patch_open(X, S)]


def is_cp_patch_dense(X: FiniteSpace) -> bool:
    return patch_closure(X, closed_points(X)) == X.points


def check_prop52(X: FiniteSpace) -> bool:
    """Compact opens are join-subfit iff the closed points are patch-dense."""
    return is_join_subfit(qcop(X)) == is_cp_patch_dense(X)


def inverse_space(X: FiniteSpace) -> FiniteSpace:
    return FiniteSpace(dual(X.poset))


def is_regular_open(X: FiniteSpace, U: int) -> bool:
    _require_open(X, U)
    return X.interior(X.closure(U)) == U


def check_cor53(X: FiniteSpace) -> bool:
    """Compact opens are meet-subfit iff every compact open is regular open."""
    return is_meet_subfit(qcop(X)) == all(is_regular_open(X, U) for U in X.opens)


def subspace(X: FiniteSpace, U: int) -> Tuple[FiniteSpace, Tuple[int, ...]]:
    """Subspace on U with the induced order, plus local-to-global points."""
    points = tuple(bits(U))
    return FiniteSpace(X.poset.restrict(points)), points


def _localize(points: Tuple[int, ...], S: int) -> int:
    return mask_of([k for k, p in enumerate(points) if (S >> p) & 1])


def check_union_theorem(X: FiniteSpace, U: int, V: int) -> bool:
    """If closed points are patch-dense in U and in V then also in U | V."""
    _require_open(X, U)
    _require_open(X, V)
    hypotheses = is_cp_patch_dense(subspace(X, U)[0]) and is_cp_patch_dense(subspace(X, V)[0])
    return not hypotheses or is_cp_patch_dense(subspace(X, U | V)[0])


def check_star_property(X: FiniteSpace, O1: int, O2: int) -> bool:
    """Each patch-open C of O2 meets O1 emptily or in a set with nonempty patch interior."""
    _require_open(X, O1)
    _require_open(X, O2)
    if O1 & ~O2:
        raise BadInclusionError("O1 must be contained in O2", details={"O1": X.describe(O1), "O2": X.describe(O2)})
    outer, outer_points = subspace(X, O2)
    inner, inner_points = subspace(X, O1)
    for C in patch_open_sets(outer):
        trace = _localize(inner_points, sum(1 << outer_points[k] for k in bits(C)))
        if trace and not patch_interior(inner, trace):
            return False
    return True


def check_closed_point_in_closed_sets(X: FiniteSpace) -> bool:
    """Every nonempty closed set contains a closed point."""
    cp = closed_points(X)
    return all(C & cp for C in downsets(dual(X.poset)) if C)


def is_join_subfit_qcop_oracle(X: FiniteSpace) -> bool:
    """Antichain order, Boolean compact opens and join-subfit compact opens agree."""
    L = qcop(X)
    return is_antichain(X.poset) == is_boolean(L) == is_join_subfit(L)


def is_patch_discrete(X: FiniteSpace) -> bool:
    return all(patch_closure(X, S) == S for S in range(1 << X.n))


def open_pairs(X: FiniteSpace) -> List[Tuple[int, int]]:
    opens = X.opens
    return [(U, V) for U in opens for V in opens]


def nested_open_pairs(X: FiniteSpace) -> List[Tuple[int, int]]:
    return [(U, V) for U, V in open_pairs(X) if U & ~V == 0]
