"""
Exact arithmetic on finite and cofinite subsets of the naturals.

A set is its kind plus a finite support bitmask: the elements themselves when
finite, the missing elements when cofinite. The representation is canonical,
so equality of values is equality of sets.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from subfitlab.core.exceptions import InvalidInputError
from subfitlab.models.core import FinOrCofinDocument, SetKind
from subfitlab.services.order import bits, mask_of


@dataclass(frozen=True)
class FinOrCofin:
    kind: SetKind
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise InvalidInputError("support must be a set of naturals")

    @classmethod
    def finite(cls, elements: Iterable[int] = ()) -> "FinOrCofin":
        return cls(SetKind.FINITE, _mask(elements))

    @classmethod
    def cofinite(cls, missing: Iterable[int] = ()) -> "FinOrCofin":
        return cls(SetKind.COFINITE, _mask(missing))

    @classmethod
    def empty(cls) -> "FinOrCofin":
        return cls(SetKind.FINITE, 0)

    @classmethod
    def naturals(cls) -> "FinOrCofin":
        return cls(SetKind.COFINITE, 0)

    @classmethod
    def from_document(cls, doc: FinOrCofinDocument) -> "FinOrCofin":
        return cls(doc.kind, mask_of(doc.support))

    def to_document(self) -> FinOrCofinDocument:
        return FinOrCofinDocument(kind=self.kind, support=list(self.support))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(bits(self.bits))

    @property
    def is_finite(self) -> bool:
        return self.kind is SetKind.FINITE

    @property
    def is_cofinite(self) -> bool:
        return self.kind is SetKind.COFINITE

    def member(self, n: int) -> bool:
        inside = bool((self.bits >> n) & 1)
        return inside if self.is_finite else not inside

    __contains__ = member

    def complement(self) -> "FinOrCofin":
        flipped = SetKind.COFINITE if self.is_finite else SetKind.FINITE
        return FinOrCofin(flipped, self.bits)

    def union(self, other: "FinOrCofin") -> "FinOrCofin":
        a, b = self.bits, other.bits
        if self.is_finite and other.is_finite:
            return FinOrCofin(SetKind.FINITE, a | b)
        if self.is_finite:
            return FinOrCofin(SetKind.COFINITE, b & ~a)
        if other.is_finite:
            return FinOrCofin(SetKind.COFINITE, a & ~b)
        return FinOrCofin(SetKind.COFINITE, a & b)

    def inter(self, other: "FinOrCofin") -> "FinOrCofin":
        a, b = self.bits, other.bits
        if self.is_finite and other.is_finite:
            return FinOrCofin(SetKind.FINITE, a & b)
        if self.is_finite:
            return FinOrCofin(SetKind.FINITE, a & ~b)
        if other.is_finite:
            return FinOrCofin(SetKind.FINITE, b & ~a)
        return FinOrCofin(SetKind.COFINITE, a | b)

    def difference(self, other: "FinOrCofin") -> "FinOrCofin":
        return self.inter(other.complement())

    def subseteq(self, other: "FinOrCofin") -> bool:
        return self.difference(other) == FinOrCofin.empty()

    __or__ = union
    __and__ = inter
    __sub__ = difference
    __invert__ = complement
    __le__ = subseteq

    def __lt__(self, other: "FinOrCofin") -> bool:
        return self != other and self.subseteq(other)

    def least_member(self, at_least: int = 0) -> Optional[int]:
        """Smallest element >= at_least; None only for finite sets."""
        if self.is_finite:
            rest = self.bits >> at_least
            if not rest:
                return None
            return at_least + (rest & -rest).bit_length() - 1
        n = at_least
        while (self.bits >> n) & 1:
            n += 1
        return n

    @property
    def trace(self) -> int:
        """Intersection with {0, 1, 2} as a 3-bit mask."""
        return (self.bits & 7) if self.is_finite else (~self.bits & 7)

    def tail(self) -> "FinOrCofin":
        """Intersection with the naturals from 3 on."""
        if self.is_finite:
            return FinOrCofin(SetKind.FINITE, self.bits & ~7)
        return FinOrCofin(SetKind.COFINITE, self.bits | 7)

    def to_mask(self, size: int) -> int:
        """Membership bitmask over the truncated universe 0..size-1."""
        full = (1 << size) - 1
        return self.bits & full if self.is_finite else full & ~self.bits

    def __str__(self) -> str:
        inner = "{" + ",".join(str(i) for i in self.support) + "}"
        if self.is_finite:
            return inner
        return "N" if not self.bits else f"N\\{inner}"

    def __repr__(self) -> str:
        return f"FinOrCofin({self.kind.value}, {list(self.support)})"


def _mask(elements: Iterable[int]) -> int:
    elements = list(elements)
    if any(i < 0 for i in elements):
        raise InvalidInputError("elements must be natural numbers")
    return mask_of(elements)
