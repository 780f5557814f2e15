"""
The compactly based space X whose compact opens mirror A upside down.

Points are p_i for i >= 3 together with x, y and z. Every point is closed
except z, whose closure also holds y, so an open set containing y contains z.
A compact open is a finite or cofinite set of p-points plus some of x, y, z;
it must be cofinite on P whenever it holds x or z, and finite when it holds
none of x, y, z.
"""

from dataclasses import dataclass
from itertools import permutations
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np
import structlog

from subfitlab.core.exceptions import InvalidInputError, NotInAError, PropertyCheckFailedError
from subfitlab.services.cofinite import FinOrCofin
from subfitlab.services.counterexample import (
    A_CLASSES,
    CLASS_TRACE,
    ELEMENT_A,
    ELEMENT_B,
    ELEMENT_C,
    TraceClass,
    claim1_witness,
    in_A,
    in_up_a,
    in_up_c,
    sample_in_class,
)

logger = structlog.get_logger()

EXTRA_POINTS = ("x", "y", "z")

# 0 <-> x, 1 <-> y, 2 <-> z; confirmed unique by derive_point_identification
POINT_OF = {0: "x", 1: "y", 2: "z"}
INDEX_OF = {v: k for k, v in POINT_OF.items()}

# all p-points
P = FinOrCofin.cofinite([0, 1, 2])
NO_POINTS = FinOrCofin.empty()


@dataclass(frozen=True)
class SymbolicOpen:
    """A subset of X: p-points as a set of indices >= 3, plus extra points."""

    p_part: FinOrCofin
    extra: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if not self.extra <= set(EXTRA_POINTS):
            raise InvalidInputError(f"unknown points {sorted(self.extra - set(EXTRA_POINTS))}")
        if self.p_part.tail() != self.p_part:
            raise InvalidInputError("p-part must only use indices from 3 on")

    @classmethod
    def of(cls, p_part: FinOrCofin, *extra: str) -> "SymbolicOpen":
        return cls(p_part.tail(), frozenset(extra))

    def union(self, other: "SymbolicOpen") -> "SymbolicOpen":
        return SymbolicOpen(self.p_part | other.p_part, self.extra | other.extra)

    def inter(self, other: "SymbolicOpen") -> "SymbolicOpen":
        return SymbolicOpen(self.p_part & other.p_part, self.extra & other.extra)

    def difference(self, other: "SymbolicOpen") -> "SymbolicOpen":
        return SymbolicOpen(self.p_part - other.p_part, self.extra - other.extra)

    def subseteq(self, other: "SymbolicOpen") -> bool:
        return self.p_part <= other.p_part and self.extra <= other.extra

    __or__ = union
    __and__ = inter
    __sub__ = difference
    __le__ = subseteq

    @property
    def is_empty(self) -> bool:
        return self.p_part == NO_POINTS and not self.extra

    def __str__(self) -> str:
        if self.p_part == P:
            head = "P"
        elif self.p_part == NO_POINTS:
            head = ""
        else:
            head = f"p{self.p_part}"
        parts = [head] if head else []
        if self.extra:
            parts.append("{" + ",".join(sorted(self.extra)) + "}")
        return " u ".join(parts) if parts else "{}"


WHOLE_X = SymbolicOpen(P, frozenset(EXTRA_POINTS))


def in_qcop_X(U: SymbolicOpen) -> bool:
    """Open (y forces z), cofinite on P when holding x or z, finite on P when holding nothing extra."""
    if "y" in U.extra and "z" not in U.extra:
        return False
    if U.extra & {"x", "z"} and not U.p_part.is_cofinite:
        return False
    if not U.extra and not U.p_part.is_finite:
        return False
    return True


def qcopX_inter(U: SymbolicOpen, V: SymbolicOpen) -> Optional[SymbolicOpen]:
    """Intersection when it is again a compact open, otherwise None."""
    out = U & V
    return out if in_qcop_X(out) else None


def qcopX_union(U: SymbolicOpen, V: SymbolicOpen) -> SymbolicOpen:
    out = U | V
    if not in_qcop_X(out):
        raise PropertyCheckFailedError("compact opens are not closed under this union", details={"U": str(U), "V": str(V)})
    return out


def _relabel(E: FinOrCofin, point_of: Dict[int, str]) -> SymbolicOpen:
    C = ~E
    return SymbolicOpen(C.tail(), frozenset(point_of[i] for i in range(3) if i in C))


def antiiso(E: FinOrCofin) -> SymbolicOpen:
    """Complement of E, reading 0, 1, 2 as x, y, z and i >= 3 as p_i."""
    if not in_A(E):
        raise NotInAError(f"{E} is not an element of A", details={"set": str(E)})
    return _relabel(E, POINT_OF)


def antiiso_inverse(U: SymbolicOpen) -> FinOrCofin:
    if not in_qcop_X(U):
        raise InvalidInputError(f"{U} is not a compact open of X")
    low = FinOrCofin.finite(INDEX_OF[p] for p in U.extra)
    return ~(U.p_part | low)


def _skeleton_opens() -> List[Tuple[bool, FrozenSet[str]]]:
    """(cofinite P-part, extra) shapes of all compact opens."""
    out = []
    for cofinite in (False, True):
        for size in range(4):
            for extra in permutations(EXTRA_POINTS, size):
                key = (cofinite, frozenset(extra))
                U = SymbolicOpen(P if cofinite else NO_POINTS, key[1])
                if key not in out and in_qcop_X(U):
                    out.append(key)
    return out


def derive_point_identification() -> Dict[int, str]:
    """
    The bijection {0,1,2} -> {x,y,z} under which complements of A's trace
    classes land exactly on the compact-open shapes. Raises unless unique.
    """
    shapes = set(_skeleton_opens())
    found = []
    for image in permutations(EXTRA_POINTS):
        point_of = dict(enumerate(image))
        hit = set()
        ok = True
        for cls in A_CLASSES:
            trace = 0b111 if cls is TraceClass.C012 else CLASS_TRACE[cls]
            U_cofinite = cls is not TraceClass.C012
            extra = frozenset(point_of[i] for i in range(3) if not (trace >> i) & 1)
            key = (U_cofinite, extra)
            if key not in shapes:
                ok = False
                break
            hit.add(key)
        if ok and hit == shapes:
            found.append(point_of)
    if len(found) != 1:
        raise PropertyCheckFailedError("point identification is not unique", details={"candidates": len(found)})
    return found[0]


Point = Union[str, int]

# p_3 and p_4 stand for every p-point; the basis can tell them apart
SAMPLE_POINTS: Tuple[Point, ...] = ("x", "y", "z", 3, 4)
P_SAMPLE = 3


def _holds(U: SymbolicOpen, point: Point) -> bool:
    return point in U.extra if isinstance(point, str) else point in U.p_part


def basic_opens() -> List[SymbolicOpen]:
    """Every compact-open shape with each p-part that separates the sample p-points."""
    parts = [FinOrCofin.finite(s) for s in ((), (3,), (4,), (3, 4))]
    out = []
    for cofinite, extra in _skeleton_opens():
        for part in parts:
            U = SymbolicOpen(P - part if cofinite else part, extra)
            if in_qcop_X(U) and U not in out:
                out.append(U)
    return out


def specialization_closure(point: Point) -> FrozenSet[Point]:
    """Sample points r with point in every basic open around r, i.e. r in cl{point}."""
    basis = basic_opens()
    return frozenset(r for r in SAMPLE_POINTS if all(_holds(U, point) for U in basis if _holds(U, r)))


def closed_sample_points() -> FrozenSet[Point]:
    return frozenset(q for q in SAMPLE_POINTS if specialization_closure(q) == {q})


@dataclass(frozen=True)
class XSubfitReport:
    patch_open: SymbolicOpen
    closure_of_z: FrozenSet[Point]
    z_is_closed: bool
    closed_point_free: bool
    transported_pair: Tuple[SymbolicOpen, SymbolicOpen]
    shapes_checked: int
    separating_shapes: int

    @property
    def refuted(self) -> bool:
        return self.closed_point_free and not self.z_is_closed and self.separating_shapes == 0


def check_X_not_join_subfit() -> XSubfitReport:
    """The patch-open {z} holds no closed point, and the pair from A fails to separate."""
    upper = SymbolicOpen(P, frozenset({"z"}))
    lower = SymbolicOpen(P, frozenset({"x"}))
    patch_open = upper - lower
    closed = closed_sample_points()
    p_closed = P_SAMPLE in closed
    closed_point_free = not (patch_open.extra & closed) and (patch_open.p_part == NO_POINTS or not p_closed)
    u, v = antiiso(ELEMENT_B), antiiso(ELEMENT_C)
    if u <= v:
        raise PropertyCheckFailedError("transported pair is comparable", details={"u": str(u), "v": str(v)})
    # W joins u to the top iff W holds y, and then W holds z and also joins v to the top
    shapes = _skeleton_opens()
    separating = 0
    for cofinite, extra in shapes:
        W = SymbolicOpen(P if cofinite else NO_POINTS, extra)
        if (u | W) == WHOLE_X and (v | W) != WHOLE_X:
            separating += 1
    report = XSubfitReport(
        patch_open=patch_open,
        closure_of_z=specialization_closure("z"),
        z_is_closed="z" in closed,
        closed_point_free=closed_point_free,
        transported_pair=(u, v),
        shapes_checked=len(shapes),
        separating_shapes=separating,
    )
    logger.debug("x_not_join_subfit", patch_open=str(patch_open), separating=separating)
    return report


def w_side_witness(x: FinOrCofin, y: FinOrCofin) -> SymbolicOpen:
    """
    For x, y above {0} with y not in x: an open Z inside W with
    antiiso(x) | Z = W and antiiso(y) | Z != W.
    """
    W = antiiso(ELEMENT_A)
    Z = antiiso(claim1_witness(x, y))
    if (antiiso(x) | Z) != W or (antiiso(y) | Z) == W or not Z <= W:
        raise PropertyCheckFailedError("W-side witness invalid", details={"x": str(x), "y": str(y)})
    return Z


def v_side_witness_traced(x: FinOrCofin, y: FinOrCofin) -> Tuple[FinOrCofin, str]:
    """z = {1, 2, n} for the least n >= 3 in y minus x."""
    if not (in_up_c(x) and in_up_c(y)) or y <= x:
        raise InvalidInputError("x and y must contain {1, 2}, with y not inside x")
    gap = y - x
    first = gap.least_member()
    branch = "direct" if first is not None and first >= 3 else "fresh"
    n = gap.least_member(3)
    if n is None:
        raise PropertyCheckFailedError("y minus x has no element from 3 on", details={"x": str(x), "y": str(y)})
    z = FinOrCofin.finite([1, 2, n])
    if not (x & z == ELEMENT_C and ELEMENT_C < (y & z)):
        raise PropertyCheckFailedError("V-side witness invalid", details={"x": str(x), "y": str(y)})
    return z, branch


def v_side_witness(x: FinOrCofin, y: FinOrCofin) -> SymbolicOpen:
    """For x, y above {1, 2}: an open Z inside V separating antiiso(x) from antiiso(y)."""
    V = antiiso(ELEMENT_C)
    z, _ = v_side_witness_traced(x, y)
    Z = antiiso(z)
    if (antiiso(x) | Z) != V or (antiiso(y) | Z) == V or not Z <= V:
        raise PropertyCheckFailedError("V-side witness invalid", details={"x": str(x), "y": str(y)})
    return Z


@dataclass(frozen=True)
class VWReport:
    V: SymbolicOpen
    W: SymbolicOpen
    V_open: bool
    W_open: bool
    covers_X: bool


def check_V_W_join_subfit() -> VWReport:
    """V = P u {x} and W = P u {y, z} are compact opens covering X."""
    V, W = antiiso(ELEMENT_C), antiiso(ELEMENT_A)
    return VWReport(V=V, W=W, V_open=in_qcop_X(V), W_open=in_qcop_X(W), covers_X=(V | W) == WHOLE_X)


def sample_up_a_pair(bound: int, rng: np.random.Generator) -> Tuple[FinOrCofin, FinOrCofin]:
    return _sample_pair(bound, rng, in_up_a, (TraceClass.F0, TraceClass.F01, TraceClass.C012))


def sample_up_c_pair(bound: int, rng: np.random.Generator) -> Tuple[FinOrCofin, FinOrCofin]:
    return _sample_pair(bound, rng, in_up_c, (TraceClass.F12, TraceClass.C012))


def _sample_pair(bound, rng, member, classes) -> Tuple[FinOrCofin, FinOrCofin]:
    while True:
        x = sample_in_class(classes[int(rng.integers(len(classes)))], bound, rng)
        y = sample_in_class(classes[int(rng.integers(len(classes)))], bound, rng)
        if member(x) and member(y) and not y <= x:
            return x, y
