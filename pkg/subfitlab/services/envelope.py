"""
Distributive envelope of a finite bounded join-semilattice.

E is the lattice of admissible-closed upsets of A ordered by reverse
inclusion: joins are intersections, meets are closures of unions. A embeds
into E by a -> up(a), and L is the sublattice generated by that image.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import structlog

from subfitlab.core.exceptions import (
    ConditionsNotMetError,
    MissingBottomError,
    MissingTopError,
    NotAnEmbeddingError,
    PropertyCheckFailedError,
)
from subfitlab.services.enumeration import downsets, is_isomorphic
from subfitlab.services.order import (
    FiniteJoinSemilattice,
    FiniteLattice,
    JoinStructure,
    as_join_semilattice,
    bits,
    dual,
    infimum,
    is_distributive_lattice,
    lattice_from_family,
    popcount,
    principal_downset,
    restrict_lattice,
)
from subfitlab.services.subfit import is_join_subfit

logger = structlog.get_logger()


@dataclass(frozen=True)
class EnvelopeElement:
    """An admissible-closed upset of the base semilattice."""

    members: int

    def __contains__(self, a: int) -> bool:
        return bool((self.members >> a) & 1)


@dataclass(frozen=True)
class EnvelopeResult:
    base: FiniteJoinSemilattice
    E: FiniteLattice
    elements: Tuple[EnvelopeElement, ...]
    eta: Tuple[int, ...]
    L: FiniteLattice
    L_in_E: Tuple[int, ...]
    embedding_table: Tuple[int, ...]


@dataclass(frozen=True)
class JoinEmbedding:
    """An index map from ``source`` into ``target``."""

    source: FiniteJoinSemilattice
    target: FiniteJoinSemilattice
    mapping: Tuple[int, ...]

    @classmethod
    def identity(cls, A: JoinStructure) -> "JoinEmbedding":
        A = as_join_semilattice(A)
        return cls(A, A, tuple(range(A.n)))

    @classmethod
    def of(cls, source: JoinStructure, target: JoinStructure, mapping) -> "JoinEmbedding":
        return cls(as_join_semilattice(source), as_join_semilattice(target), tuple(mapping))


@dataclass(frozen=True)
class DownsetMismatch:
    """An element whose downset's envelope differs from its downset in L."""

    element: int
    envelope_size: int
    downset_size: int


def is_admissible(A: JoinStructure, S: int) -> bool:
    """The meet of S exists and joining any b distributes over it."""
    A = as_join_semilattice(A)
    P = A.poset
    m = infimum(P, S)
    if m is None:
        return False
    for b in range(A.n):
        shifted = 0
        for s in bits(S):
            shifted |= 1 << A.join[s][b]
        if infimum(P, shifted) != A.join[m][b]:
            return False
    return True


def admissible_subsets(A: JoinStructure) -> List[Tuple[int, int]]:
    """(S, meet of S) for every admissible S; the empty family has meet top."""
    A = as_join_semilattice(A)
    out = []
    for S in range(1 << A.n):
        if is_admissible(A, S):
            out.append((S, infimum(A.poset, S)))
    return out


class _Closure:
    """Closure of upsets under admissible meets."""

    def __init__(self, A: FiniteJoinSemilattice):
        self.A = A
        # singletons and sets holding their own meet add nothing
        self.rules = [(S, m) for S, m in admissible_subsets(A) if not (S >> m) & 1]

    def __call__(self, mask: int) -> int:
        P = self.A.poset
        current = P.upset(mask)
        while True:
            grown = current
            for S, m in self.rules:
                if S & ~grown == 0:
                    grown |= P.up[m]
            if grown == current:
                return current
            current = grown


def admissible_closure(A: JoinStructure, mask: int) -> int:
    """Smallest upset containing ``mask`` that holds the meet of every admissible subset it contains."""
    return _Closure(as_join_semilattice(A))(mask)


def _require_bounded(A: FiniteJoinSemilattice) -> None:
    if A.top is None:
        raise MissingTopError("the envelope needs a top element")
    if A.bottom is None:
        raise MissingBottomError("the envelope needs a bottom element")


def _generated_sublattice(E: FiniteLattice, seeds: List[int]) -> List[int]:
    members = set(seeds)
    while True:
        current = sorted(members)
        grown = set(members)
        for i, x in enumerate(current):
            for y in current[i + 1:]:
                grown.add(E.j(x, y))
                grown.add(E.m(x, y))
        if grown == members:
            return sorted(members)
        members = grown


def build_envelope(A: JoinStructure, check: bool = True) -> EnvelopeResult:
    """Construct E, eta and L; with ``check`` every stated property is verified."""
    A = as_join_semilattice(A)
    _require_bounded(A)
    P = A.poset
    closure = _Closure(A)

    upsets = [D for D in downsets(dual(P)) if closure(D) == D]
    # larger upsets sit lower in E; bottom of E (all of A) first
    family = sorted(upsets, key=lambda m: (-popcount(m), m))
    labels = ["{" + ",".join(P.describe(m)) + "}" for m in family]
    E = lattice_from_family(
        family,
        join_of=lambda x, y: x & y,
        meet_of=lambda x, y: closure(x | y),
        reverse=True,
        labels=labels,
    )
    position = {m: i for i, m in enumerate(family)}
    eta = tuple(position[P.up[a]] for a in range(A.n))

    L_in_E = tuple(_generated_sublattice(E, list(eta)))
    L = restrict_lattice(E, L_in_E)
    in_L = {e: k for k, e in enumerate(L_in_E)}
    table = tuple(in_L[e] for e in eta)

    result = EnvelopeResult(
        base=A,
        E=E,
        elements=tuple(EnvelopeElement(m) for m in family),
        eta=eta,
        L=L,
        L_in_E=L_in_E,
        embedding_table=table,
    )
    logger.debug("envelope_built", base=A.n, E=E.n, L=L.n)
    if check:
        _check_envelope(result, closure)
    return result


def _fail(clause: str, **details) -> None:
    raise PropertyCheckFailedError(f"envelope property violated: {clause}", details={"clause": clause, **details})


def _check_envelope(result: EnvelopeResult, closure: _Closure) -> None:
    A, E, eta = result.base, result.E, result.eta
    if not is_distributive_lattice(E):
        _fail("E distributive")
    if len(set(eta)) != A.n:
        _fail("eta injective")
    if eta[A.bottom] != E.bottom or eta[A.top] != E.top:
        _fail("eta preserves bounds")
    for a in range(A.n):
        for b in range(A.n):
            if eta[A.join[a][b]] != E.j(eta[a], eta[b]):
                _fail("eta preserves joins", a=a, b=b)
    position = {el.members: i for i, el in enumerate(result.elements)}
    for S, m in closure.rules:
        union = 0
        for s in bits(S):
            union |= A.poset.up[s]
        if position.get(closure(union)) != eta[m]:
            _fail("admissible meets preserved", subset=list(bits(S)))
    cond_a, cond_b = check_prop41(JoinEmbedding(A, result.L.semilattice, result.embedding_table))
    if not cond_a:
        _fail("condition (a) for A in L")
    if not cond_b:
        _fail("condition (b) for A in L")


def _require_embedding(emb: JoinEmbedding) -> None:
    A, B, f = emb.source, emb.target, emb.mapping
    if len(f) != A.n or any(not 0 <= v < B.n for v in f):
        raise NotAnEmbeddingError("mapping must send every source element into the target")
    if len(set(f)) != A.n:
        raise NotAnEmbeddingError("mapping is not injective")
    if A.bottom is None or A.top is None or B.bottom is None or B.top is None:
        raise NotAnEmbeddingError("source and target must be bounded")
    if f[A.bottom] != B.bottom or f[A.top] != B.top:
        raise NotAnEmbeddingError("mapping does not preserve bounds")
    for a in range(A.n):
        for b in range(A.n):
            if f[A.join[a][b]] != B.join[f[a]][f[b]]:
                raise NotAnEmbeddingError("mapping does not preserve joins", details={"a": a, "b": b})


def _represents(emb: JoinEmbedding, b: int, generators: Tuple[int, ...]) -> bool:
    """f(a) v b is the meet in B of the f(a) v f(g) for every a."""
    A, B, f = emb.source, emb.target, emb.mapping
    for a in range(A.n):
        joined = 0
        for g in generators:
            joined |= 1 << B.join[f[a]][f[g]]
        if infimum(B.poset, joined) != B.join[f[a]][b]:
            return False
    return True


def condition_a_generators(emb: JoinEmbedding) -> Dict[int, Optional[Tuple[int, ...]]]:
    """
    Per target element b, a smallest set of source elements representing b,
    or None. Generators for b must map above b, and adding more such elements
    keeps a representation valid, so the full candidate set decides existence.
    """
    A, B, f = emb.source, emb.target, emb.mapping
    out: Dict[int, Optional[Tuple[int, ...]]] = {}
    for b in range(B.n):
        candidates = tuple(a for a in range(A.n) if B.poset.le(b, f[a]))
        if not _represents(emb, b, candidates):
            out[b] = None
            continue
        found = candidates
        for size in range(1, len(candidates)):
            hit = next((c for c in combinations(candidates, size) if _represents(emb, b, c)), None)
            if hit is not None:
                found = hit
                break
        out[b] = found
    return out


def check_prop41(emb: JoinEmbedding) -> Tuple[bool, bool]:
    """Conditions (a) and (b) for a bound-preserving join embedding."""
    _require_embedding(emb)
    A, B, f = emb.source, emb.target, emb.mapping
    cond_a = all(gens is not None for gens in condition_a_generators(emb).values())
    cond_b = True
    for S, m in admissible_subsets(A):
        image = 0
        for s in bits(S):
            image |= 1 << f[s]
        if infimum(B.poset, image) != f[m]:
            cond_b = False
            break
    return cond_a, cond_b


def check_prop41_transfer(emb: JoinEmbedding) -> bool:
    """Source and target agree on join-subfitness, given conditions (a) and (b)."""
    cond_a, cond_b = check_prop41(emb)
    if not (cond_a and cond_b):
        raise ConditionsNotMetError(
            "transfer needs both conditions", details={"condition_a": cond_a, "condition_b": cond_b}
        )
    return is_join_subfit(emb.source) == is_join_subfit(emb.target)


def verify_thm42(A: JoinStructure) -> bool:
    """A and its generated envelope L agree on join-subfitness."""
    env = build_envelope(A)
    return is_join_subfit(env.base) == is_join_subfit(env.L)


def envelope_of_downset_mismatch(A: JoinStructure) -> Optional[DownsetMismatch]:
    """First a whose downset's envelope is not isomorphic to the downset of eta(a) in L."""
    env = build_envelope(A)
    for a in range(env.base.n):
        sub, _ = principal_downset(env.base, a)
        if sub.bottom is None:
            continue
        inner = build_envelope(sub, check=False).L
        target, _ = principal_downset(env.L, env.embedding_table[a])
        if not is_isomorphic(inner.poset, target.poset):
            return DownsetMismatch(a, inner.n, target.n)
    return None
