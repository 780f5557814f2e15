"""
Subfitness of finite join-semilattices.

A bounded join-semilattice is join-subfit when distinct elements have
distinct sets {c : a v c = top}. The witness algorithm for two subfit
elements follows the proof that subfit elements of a distributive lattice
are closed under joins.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import structlog

from subfitlab.core.exceptions import (
    InvalidInputError,
    MissingBottomError,
    MissingTopError,
    NotComparableError,
    NotDistributiveError,
    PreconditionViolatedError,
    PropertyCheckFailedError,
)
from subfitlab.services.order import (
    FiniteJoinSemilattice,
    FiniteLattice,
    FinitePoset,
    JoinStructure,
    as_join_semilattice,
    bits,
    dual,
    is_distributive_lattice,
    principal_downset,
    try_join_semilattice,
)
from subfitlab.services.enumeration import downsets

logger = structlog.get_logger()


@dataclass(frozen=True)
class SubfitWitness:
    """c separates u and v: exactly one of u v c, v v c is the top."""

    u: int
    v: int
    c: int


@dataclass(frozen=True)
class SubfitElementReport:
    subfit_set: int
    is_downset: bool
    is_ideal: bool
    offending_pair: Optional[Tuple[int, int]]

    @property
    def members(self) -> List[int]:
        return list(bits(self.subfit_set))


@dataclass(frozen=True)
class WitnessTrace:
    """Every intermediate value of one run of the join witness construction."""

    a: int
    b: int
    swapped: bool
    y: int
    w: Optional[int]
    x: Optional[int]
    z: int
    branch: str


def _require_top(A: FiniteJoinSemilattice) -> int:
    if A.top is None:
        raise MissingTopError("join-subfitness needs a top element")
    return A.top


def coannihilators(A: JoinStructure) -> Tuple[int, ...]:
    """Per element a, the bitmask of all c with a v c = top."""
    A = as_join_semilattice(A)
    top = _require_top(A)
    out = []
    for a in range(A.n):
        row = A.join[a]
        out.append(sum(1 << c for c in range(A.n) if row[c] == top))
    return tuple(out)


def is_join_subfit(A: JoinStructure) -> bool:
    co = coannihilators(A)
    return len(set(co)) == len(co)


def separating_witness(A: JoinStructure, a: int, b: int) -> Optional[SubfitWitness]:
    """First c (by index) with exactly one of a v c, b v c equal to the top."""
    co = coannihilators(A)
    diff = co[a] ^ co[b]
    if not diff:
        return None
    return SubfitWitness(a, b, next(bits(diff)))


def join_subfit_witness(A: JoinStructure, u: int, v: int) -> Optional[SubfitWitness]:
    """First z (by index) with u v z = top and v v z < top; needs u not below v."""
    A = as_join_semilattice(A)
    if A.poset.le(u, v):
        raise NotComparableError(
            f"no witness exists for {A.poset.label(u)} <= {A.poset.label(v)}",
            details={"u": u, "v": v},
        )
    co = coannihilators(A)
    candidates = co[u] & ~co[v]
    if not candidates:
        return None
    return SubfitWitness(u, v, next(bits(candidates)))


def is_meet_subfit(A: Union[FinitePoset, JoinStructure]) -> bool:
    """Join-subfitness of the order dual; the bottom plays the absorbing role."""
    P = A if isinstance(A, FinitePoset) else as_join_semilattice(A).poset
    if P.bottom is None:
        raise MissingBottomError("meet-subfitness needs a bottom element")
    flipped = try_join_semilattice(dual(P))
    if flipped is None:
        raise InvalidInputError("structure is not a meet-semilattice")
    return is_join_subfit(flipped)


def _is_ideal(A: FiniteJoinSemilattice, mask: int) -> Tuple[bool, Optional[Tuple[int, int]]]:
    members = list(bits(mask))
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if not (mask >> A.join[a][b]) & 1:
                return False, (a, b)
    return bool(mask), None


def subfit_elements(A: JoinStructure) -> SubfitElementReport:
    """The set S of elements a whose principal downset is join-subfit."""
    A = as_join_semilattice(A)
    S = 0
    for a in range(A.n):
        sub, _ = principal_downset(A, a)
        if is_join_subfit(sub):
            S |= 1 << a
    is_downset = A.poset.is_downset(S)
    closed, pair = _is_ideal(A, S)
    is_ideal = is_downset and closed
    offending = pair if is_downset and not is_ideal else None
    return SubfitElementReport(S, is_downset, is_ideal, offending)


def _downset_witness(A: FiniteJoinSemilattice, a: int, u: int, v: int) -> Optional[int]:
    """join_subfit_witness inside the principal downset of a, in global indices."""
    sub, indices = principal_downset(A, a)
    local = {g: k for k, g in enumerate(indices)}
    found = join_subfit_witness(sub, local[u], local[v])
    return None if found is None else indices[found.c]


def thm21_join_witness_trace(
    L: FiniteLattice,
    a: int,
    b: int,
    s: int,
    t: int,
    assume_distributive: bool = False,
) -> WitnessTrace:
    """
    Find z with s v z < 1 and t v z = 1, given a v b = 1, t not below s and
    join-subfit principal downsets of a and b.

    The b side is tried first; a and b swap when b ^ t <= b ^ s. A witness y
    below b separates b ^ t from b ^ s. If s v y v a < 1 then z = y v a,
    otherwise w = (b ^ s) v y and a witness x below a separating a ^ t from
    a ^ (s v w) gives z = w v x.
    """
    P = L.poset
    one = L.top
    if L.j(a, b) != one:
        raise PreconditionViolatedError(
            "a v b must be the top", details={"a": a, "b": b, "join": L.j(a, b)}
        )
    if P.le(t, s):
        raise PreconditionViolatedError("t must not lie below s", details={"s": s, "t": t})
    if not assume_distributive and not is_distributive_lattice(L):
        raise NotDistributiveError("the witness construction needs a distributive lattice")
    for e in (a, b):
        sub, _ = principal_downset(L, e)
        if not is_join_subfit(sub):
            raise PreconditionViolatedError(
                f"the downset of {P.label(e)} is not join-subfit", details={"element": e}
            )

    swapped = False
    if P.le(L.m(b, t), L.m(b, s)):
        a, b = b, a
        swapped = True
        if P.le(L.m(b, t), L.m(b, s)):
            raise PropertyCheckFailedError(
                "neither a ^ t nor b ^ t escapes below s", details={"a": a, "b": b, "s": s, "t": t}
            )

    y = _downset_witness(L, b, L.m(b, t), L.m(b, s))
    if y is None:
        raise PropertyCheckFailedError("no witness below b", details={"b": b})

    w = x = None
    if L.j(L.j(s, y), a) != one:
        z = L.j(y, a)
        branch = "y_join_a"
    else:
        w = L.j(L.m(b, s), y)
        u2, v2 = L.m(a, t), L.m(a, L.j(s, w))
        if P.le(u2, v2):
            raise PropertyCheckFailedError("a ^ t lies below a ^ (s v w)", details={"a": a, "w": w})
        x = _downset_witness(L, a, u2, v2)
        if x is None:
            raise PropertyCheckFailedError("no witness below a", details={"a": a})
        z = L.j(w, x)
        branch = "w_join_x"

    if L.j(s, z) == one or L.j(t, z) != one:
        raise PropertyCheckFailedError(
            "witness fails its postcondition",
            details={"s": s, "t": t, "z": z, "branch": branch},
        )
    logger.debug("join_witness", a=a, b=b, s=s, t=t, z=z, branch=branch, swapped=swapped)
    return WitnessTrace(a=a, b=b, swapped=swapped, y=y, w=w, x=x, z=z, branch=branch)


def thm21_join_witness(L: FiniteLattice, a: int, b: int, s: int, t: int) -> int:
    return thm21_join_witness_trace(L, a, b, s, t).z


def verify_thm21(L: FiniteLattice) -> bool:
    """Whether the subfit elements of a distributive lattice form an ideal."""
    if not is_distributive_lattice(L):
        raise NotDistributiveError("ideal property is only claimed for distributive lattices")
    return subfit_elements(L).is_ideal


def ideals(A: JoinStructure) -> List[int]:
    """All ideals (nonempty join-closed downsets) as bitmasks."""
    A = as_join_semilattice(A)
    return [D for D in downsets(A.poset) if D and _is_ideal(A, D)[0]]


def ideal_join(A: FiniteJoinSemilattice, I: int, J: int) -> int:
    """Smallest ideal containing both ideals."""
    acc = I | J
    while True:
        grown = acc
        for x in bits(acc):
            for y in bits(acc):
                grown |= A.poset.down[A.join[x][y]]
        if grown == acc:
            return acc
        acc = grown


def is_ideally_subfit(A: JoinStructure) -> bool:
    """For all u not below v some ideal W has (down u) v W = A and (down v) v W != A."""
    A = as_join_semilattice(A)
    _require_top(A)
    everything = A.poset.all_mask
    all_ideals = ideals(A)
    down = A.poset.down
    for u in range(A.n):
        for v in range(A.n):
            if A.poset.le(u, v):
                continue
            if not any(
                ideal_join(A, down[u], W) == everything and ideal_join(A, down[v], W) != everything
                for W in all_ideals
            ):
                return False
    return True
