"""
The meet-semilattice A of finite and cofinite subsets of the naturals.

A holds the finite sets whose trace on {0, 1, 2} lies in A012 and the cofinite
sets containing {0, 1, 2}. It is distributive, its upsets of {0} and {1} are
meet-subfit, yet A itself is not. The witness constructors below produce the
sets the corresponding arguments ask for and check them on the spot.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import chain, combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from subfitlab.core.exceptions import NotInAError, PreconditionViolatedError, PropertyCheckFailedError
from subfitlab.services.cofinite import FinOrCofin

logger = structlog.get_logger()

# traces on {0, 1, 2}: {}, {0}, {1}, {0,1}, {1,2}
A012 = frozenset({0b000, 0b001, 0b010, 0b011, 0b110})

ZERO = FinOrCofin.empty()
ONE = FinOrCofin.naturals()
ELEMENT_A = FinOrCofin.finite([0])
ELEMENT_B = FinOrCofin.finite([1])
ELEMENT_C = FinOrCofin.finite([1, 2])
LOW = FinOrCofin.finite([0, 1, 2])
HIGH = FinOrCofin.cofinite([0, 1, 2])


class TraceClass(str, Enum):
    F = "F"
    F0 = "F0"
    F1 = "F1"
    F01 = "F01"
    F12 = "F12"
    C012 = "C012"
    F012 = "F012"


_FINITE_CLASS = {
    0b000: TraceClass.F,
    0b001: TraceClass.F0,
    0b010: TraceClass.F1,
    0b011: TraceClass.F01,
    0b110: TraceClass.F12,
    0b111: TraceClass.F012,
}

CLASS_TRACE = {cls: trace for trace, cls in _FINITE_CLASS.items()}

A_CLASSES = (
    TraceClass.F,
    TraceClass.F0,
    TraceClass.F1,
    TraceClass.F01,
    TraceClass.F12,
    TraceClass.C012,
)
UP_A_CLASSES = (TraceClass.F0, TraceClass.F01, TraceClass.C012)
UP_B_CLASSES = (TraceClass.F1, TraceClass.F01, TraceClass.F12, TraceClass.C012)
UP_C_CLASSES = (TraceClass.F12, TraceClass.C012)


def trace_class(E: FinOrCofin) -> Optional[TraceClass]:
    """Class of E within the envelope B, or None when E lies outside B."""
    if E.is_cofinite:
        return TraceClass.C012 if E.bits & 7 == 0 else None
    return _FINITE_CLASS.get(E.trace)


def in_A(E: FinOrCofin) -> bool:
    if E.is_finite:
        return E.trace in A012
    return E.bits & 7 == 0


def in_B(E: FinOrCofin) -> bool:
    return in_A(E) or (E.is_finite and E.trace == 0b111)


def in_up_a(E: FinOrCofin) -> bool:
    return in_A(E) and 0 in E


def in_up_b(E: FinOrCofin) -> bool:
    return in_A(E) and 1 in E


def in_up_c(E: FinOrCofin) -> bool:
    return in_A(E) and 1 in E and 2 in E


def _require_A(*sets: FinOrCofin) -> None:
    for E in sets:
        if not in_A(E):
            raise NotInAError(f"{E} is not an element of A", details={"set": str(E)})


def meet_A(E: FinOrCofin, F: FinOrCofin) -> FinOrCofin:
    _require_A(E, F)
    out = E & F
    if not in_A(out):
        raise PropertyCheckFailedError("A is not closed under this intersection", details={"E": str(E), "F": str(F)})
    return out


def class_members(cls: TraceClass, bound: int) -> Iterator[FinOrCofin]:
    """Every member of a trace class whose tail lies in 3..bound."""
    extra = range(3, bound + 1)
    tails = chain.from_iterable(combinations(extra, r) for r in range(len(extra) + 1))
    head = [i for i in range(3) if (CLASS_TRACE.get(cls, 0) >> i) & 1]
    for tail in tails:
        yield FinOrCofin.cofinite(tail) if cls is TraceClass.C012 else FinOrCofin.finite(head + list(tail))


@dataclass(frozen=True)
class MeetTable:
    bound: int
    pairs: int
    classes: Dict[Tuple[TraceClass, TraceClass], TraceClass]


def meet_table(bound: int = 5) -> MeetTable:
    """
    Meet every pair of class members with tails in 3..bound.

    Each meet must stay in A and land in the class the two traces predict.
    The table maps class pairs to that class.
    """
    if bound < 3:
        raise PreconditionViolatedError("meet table bound must be at least 3", details={"bound": bound})
    members = {cls: list(class_members(cls, bound)) for cls in A_CLASSES}
    classes: Dict[Tuple[TraceClass, TraceClass], TraceClass] = {}
    pairs = 0
    for c1 in A_CLASSES:
        for c2 in A_CLASSES:
            both_cofinite = c1 is c2 is TraceClass.C012
            t1 = 0b111 if c1 is TraceClass.C012 else CLASS_TRACE[c1]
            t2 = 0b111 if c2 is TraceClass.C012 else CLASS_TRACE[c2]
            expected = TraceClass.C012 if both_cofinite else _FINITE_CLASS[t1 & t2]
            for E in members[c1]:
                for F in members[c2]:
                    out = meet_A(E, F)
                    pairs += 1
                    if trace_class(out) is not expected:
                        raise PropertyCheckFailedError(
                            "meet left its predicted class",
                            details={"E": str(E), "F": str(F), "meet": str(out), "expected": expected.value},
                        )
            classes[(c1, c2)] = expected
    logger.debug("meet_table", bound=bound, pairs=pairs)
    return MeetTable(bound, pairs, classes)


def claim4_closure_holds(x: FinOrCofin, y: FinOrCofin) -> bool:
    """Union and intersection of two members of the upset of {0} stay in it."""
    return in_up_a(x | y) and in_up_a(x & y)


def _precondition(ok: bool, message: str, **sets: FinOrCofin) -> None:
    if not ok:
        raise PreconditionViolatedError(message, details={k: str(v) for k, v in sets.items()})


def _postcondition(ok: bool, message: str, **sets: FinOrCofin) -> None:
    if not ok:
        raise PropertyCheckFailedError(message, details={k: str(v) for k, v in sets.items()})


@dataclass(frozen=True)
class SeparationWitness:
    z: FinOrCofin
    case: str


def claim1_witness_traced(x: FinOrCofin, y: FinOrCofin) -> SeparationWitness:
    _precondition(in_up_a(x) and in_up_a(y), "x and y must contain 0 and lie in A", x=x, y=y)
    _precondition(not y <= x, "y must not be contained in x", x=x, y=y)
    gap = y - x
    n = gap.least_member()
    if n != 2:
        z, case = FinOrCofin.finite([0, n]), "n_ne_2"
    else:
        # 2 in y forces y cofinite, and x is finite since it misses 2
        m = gap.least_member(3)
        _postcondition(m is not None, "y minus x has no element from 3 on", x=x, y=y)
        z, case = FinOrCofin.finite([0, m]), "n_eq_2"
    _postcondition(in_up_a(z) and x & z == ELEMENT_A and y & z != ELEMENT_A, "claim 1 witness invalid", x=x, y=y, z=z)
    return SeparationWitness(z, case)


def claim1_witness(x: FinOrCofin, y: FinOrCofin) -> FinOrCofin:
    """z above {0} with x & z = {0} and y & z != {0}."""
    return claim1_witness_traced(x, y).z


def claim2_witness(x: FinOrCofin, y: FinOrCofin) -> FinOrCofin:
    """z = {1, n} for the least n in y minus x."""
    _precondition(in_up_b(x) and in_up_b(y), "x and y must contain 1 and lie in A", x=x, y=y)
    _precondition(not y <= x, "y must not be contained in x", x=x, y=y)
    n = (y - x).least_member()
    z = FinOrCofin.finite([1, n])
    _postcondition(in_up_b(z) and x & z == ELEMENT_B and y & z != ELEMENT_B, "claim 2 witness invalid", x=x, y=y, z=z)
    return z


@dataclass(frozen=True)
class ClassAnalysis:
    """Why no z from one trace class separates the pair."""

    trace_class: TraceClass
    contains_one: bool
    meets_c: bool

    @property
    def separates(self) -> bool:
        # z must miss x (which contains 1) and still meet c = {1, 2}
        return self.meets_c and not self.contains_one


@dataclass(frozen=True)
class Claim3Refutation:
    witness_pair: Tuple[FinOrCofin, FinOrCofin]
    below_c: Tuple[FinOrCofin, ...]
    classes: Tuple[ClassAnalysis, ...]

    @property
    def refuted(self) -> bool:
        return len(self.classes) == len(A_CLASSES) and not any(c.separates for c in self.classes)


def claim3_refute() -> Claim3Refutation:
    """A is not meet-subfit: no z separates x = {1} from y = {1, 2}."""
    x, y = ELEMENT_B, ELEMENT_C
    below = tuple(
        E
        for E in (FinOrCofin.finite(s) for s in ((), (1,), (2,), (1, 2)))
        if in_A(E) and E <= y
    )
    classes = []
    for cls in A_CLASSES:
        # membership of 1 and 2 only depends on the trace
        trace = 0b111 if cls is TraceClass.C012 else CLASS_TRACE[cls]
        classes.append(ClassAnalysis(cls, contains_one=bool(trace & 0b010), meets_c=bool(trace & 0b110)))
    report = Claim3Refutation((x, y), below, tuple(classes))
    _postcondition(report.refuted, "claim 3 refutation incomplete")
    return report


@dataclass(frozen=True)
class ExtensionWitness:
    x_prime: FinOrCofin
    y_prime: FinOrCofin
    case: str


def _cofinite_extension(x: FinOrCofin, y: FinOrCofin, z: FinOrCofin) -> FinOrCofin:
    """{0,1,2} | (N>=3 minus y) | x | z."""
    return LOW | (HIGH - y) | x | z


def _check_extension(x, y, z, w: ExtensionWitness, member) -> ExtensionWitness:
    ok = (
        x <= w.x_prime
        and y <= w.y_prime
        and w.x_prime & w.y_prime == z
        and member(w.x_prime)
        and member(w.y_prime)
    )
    _postcondition(ok, f"extension witness invalid in case {w.case}", x=x, y=y, z=z, x_prime=w.x_prime, y_prime=w.y_prime)
    logger.debug("extension_witness", case=w.case, x=str(x), y=str(y), z=str(z))
    return w


def _extend(x, y, z, bad: Sequence[TraceClass], label: str) -> ExtensionWitness:
    """Plain unions unless an operand is in a bad class; then the cofinite form."""
    if trace_class(x) in bad:
        return ExtensionWitness(_cofinite_extension(x, y, z), y | z, f"{label}_cofinite")
    if trace_class(y) in bad:
        return ExtensionWitness(x | z, _cofinite_extension(y, x, z), f"{label}_cofinite")
    return ExtensionWitness(x | z, y | z, f"{label}_union")


def claim5_extension(x: FinOrCofin, y: FinOrCofin, z: FinOrCofin) -> ExtensionWitness:
    _precondition(all(in_up_b(e) for e in (x, y, z)), "x, y and z must contain 1 and lie in A", x=x, y=y, z=z)
    _precondition(x & y <= z, "x & y must lie in z", x=x, y=y, z=z)
    cls = trace_class(z)
    if cls in (TraceClass.F1, TraceClass.C012):
        w = ExtensionWitness(x | z, y | z, "a")
    elif cls is TraceClass.F01:
        w = _extend(x, y, z, (TraceClass.F12,), "b")
    else:
        # F12 mirrors F01 under swapping 0 and 2
        w = _extend(x, y, z, (TraceClass.F01,), "b")
    return _check_extension(x, y, z, w, in_up_b)


def claim5_witness(x: FinOrCofin, y: FinOrCofin, z: FinOrCofin) -> Tuple[FinOrCofin, FinOrCofin]:
    """x' above x and y' above y in the upset of {1} with x' & y' = z."""
    w = claim5_extension(x, y, z)
    return w.x_prime, w.y_prime


def claim6_extension(x: FinOrCofin, y: FinOrCofin, z: FinOrCofin) -> ExtensionWitness:
    _precondition(all(in_A(e) for e in (x, y, z)), "x, y and z must lie in A", x=x, y=y, z=z)
    _precondition(x & y <= z, "x & y must lie in z", x=x, y=y, z=z)
    cls = trace_class(z)
    if cls in (TraceClass.F, TraceClass.F1, TraceClass.C012):
        w = ExtensionWitness(x | z, y | z, "i")
    elif cls is TraceClass.F0:
        w = _extend(x, y, z, (TraceClass.F12,), "ii")
    elif cls is TraceClass.F01:
        w = _extend(x, y, z, (TraceClass.F12,), "iii")
    else:
        w = _extend(x, y, z, (TraceClass.F0, TraceClass.F01), "iv")
    return _check_extension(x, y, z, w, in_A)


def claim6_witness(x: FinOrCofin, y: FinOrCofin, z: FinOrCofin) -> Tuple[FinOrCofin, FinOrCofin]:
    """x' above x and y' above y in A with x' & y' = z."""
    w = claim6_extension(x, y, z)
    return w.x_prime, w.y_prime


CLAIM1_CASES = ("n_ne_2", "n_eq_2")
CLAIM5_CASES = ("a", "b_union", "b_cofinite")
CLAIM6_CASES = ("i", "ii_union", "ii_cofinite", "iii_union", "iii_cofinite", "iv_union", "iv_cofinite")


# Sampling

def sample_in_class(cls: TraceClass, bound: int, rng: np.random.Generator, density: float = 0.2) -> FinOrCofin:
    """Random member of a trace class with support drawn from 3..bound."""
    tail = [i for i in range(3, bound + 1) if rng.random() < density]
    if cls is TraceClass.C012:
        return FinOrCofin.cofinite(tail)
    head = [i for i in range(3) if (CLASS_TRACE[cls] >> i) & 1]
    return FinOrCofin.finite(head + tail)


def sample_A(
    bound: int,
    rng: np.random.Generator,
    classes: Sequence[TraceClass] = A_CLASSES,
) -> FinOrCofin:
    """Element of A (or of the chosen classes) with support in 0..bound."""
    if bound < 4:
        raise PreconditionViolatedError("sampling bound must be at least 4", details={"bound": bound})
    cls = classes[int(rng.integers(len(classes)))]
    return sample_in_class(cls, bound, rng)


def sample_pair(bound: int, rng: np.random.Generator, classes: Sequence[TraceClass]) -> Tuple[FinOrCofin, FinOrCofin]:
    """x, y from the classes with y not contained in x."""
    while True:
        x = sample_A(bound, rng, classes)
        y = sample_A(bound, rng, classes)
        if not y <= x:
            return x, y


_CLAIM6_PLAN: Dict[str, Tuple[Sequence[TraceClass], Sequence[TraceClass], Sequence[TraceClass]]] = {
    "i": ((TraceClass.F, TraceClass.F1, TraceClass.C012), A_CLASSES, A_CLASSES),
    "ii_union": ((TraceClass.F0,), (TraceClass.F, TraceClass.F0, TraceClass.C012), (TraceClass.F, TraceClass.F1)),
    "ii_cofinite": ((TraceClass.F0,), (TraceClass.F12,), (TraceClass.F, TraceClass.F0)),
    "iii_union": ((TraceClass.F01,), (TraceClass.F0, TraceClass.F01, TraceClass.C012), (TraceClass.F1, TraceClass.F01)),
    "iii_cofinite": ((TraceClass.F01,), (TraceClass.F12,), (TraceClass.F, TraceClass.F0, TraceClass.F1, TraceClass.F01)),
    "iv_union": ((TraceClass.F12,), (TraceClass.F1, TraceClass.F12, TraceClass.C012), (TraceClass.F, TraceClass.F12)),
    "iv_cofinite": ((TraceClass.F12,), (TraceClass.F0, TraceClass.F01), (TraceClass.F, TraceClass.F1, TraceClass.F12)),
}

_CLAIM5_PLAN: Dict[str, Tuple[Sequence[TraceClass], Sequence[TraceClass], Sequence[TraceClass]]] = {
    "a": ((TraceClass.F1, TraceClass.C012), UP_B_CLASSES, UP_B_CLASSES),
    "b_union": ((TraceClass.F01, TraceClass.F12), (TraceClass.F1, TraceClass.C012), UP_B_CLASSES),
    "b_cofinite": ((TraceClass.F01, TraceClass.F12), (TraceClass.F01, TraceClass.F12), (TraceClass.F1,)),
}


def _sample_triple(plan, bound: int, rng: np.random.Generator) -> Tuple[FinOrCofin, FinOrCofin, FinOrCofin]:
    """
    Valid triple aimed at a uniformly chosen case. z absorbs x & y, and
    draws that leave the target family are rejected.
    """
    names = list(plan)
    z_classes, x_classes, y_classes = plan[names[int(rng.integers(len(names)))]]
    while True:
        x = sample_A(bound, rng, x_classes)
        y = sample_A(bound, rng, y_classes)
        z = sample_A(bound, rng, z_classes) | (x & y)
        if in_A(z):
            if rng.random() < 0.5:
                x, y = y, x
            return x, y, z


def sample_claim5_triple(bound: int, rng: np.random.Generator) -> Tuple[FinOrCofin, FinOrCofin, FinOrCofin]:
    return _sample_triple(_CLAIM5_PLAN, bound, rng)


def sample_claim6_triple(bound: int, rng: np.random.Generator) -> Tuple[FinOrCofin, FinOrCofin, FinOrCofin]:
    return _sample_triple(_CLAIM6_PLAN, bound, rng)


def class_frequencies(samples: List[FinOrCofin]) -> Dict[str, int]:
    out = {cls.value: 0 for cls in A_CLASSES}
    for E in samples:
        cls = trace_class(E)
        if cls is not None:
            out[cls.value] += 1
    return out

