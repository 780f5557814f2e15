"""
Exhaustive sweeps over enumerated lattices and finite spaces.

Each target checks one instance at a time in a worker process and reports
failures plus coverage counters. Results come back in enumeration order, so
the reported counterexample is the first one found, whatever the job count.
"""

import multiprocessing
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, Iterator, List, Optional

import structlog

from subfitlab.config import get_settings
from subfitlab.core.exceptions import InvalidInputError, SubfitLabError
from subfitlab.core.metrics import MetricsCollector, metric_key
from subfitlab.models.core import SweepSummary
from subfitlab.services.duality import (
    FiniteSpace,
    birkhoff_space,
    check_closed_point_in_closed_sets,
    check_cor53,
    check_prop52,
    check_star_property,
    check_union_theorem,
    inverse_space,
    is_join_subfit_qcop_oracle,
    is_patch_discrete,
    nested_open_pairs,
    open_pairs,
    qcop,
)
from subfitlab.services.enumeration import enumerate_lattices, enumerate_posets, is_isomorphic
from subfitlab.services.envelope import build_envelope
from subfitlab.services.order import (
    FinitePoset,
    bits,
    dual,
    is_distributive_lattice,
    poset_to_document,
    try_lattice,
)
from subfitlab.services.subfit import (
    is_ideally_subfit,
    is_join_subfit,
    join_subfit_witness,
    subfit_elements,
    thm21_join_witness_trace,
    verify_thm21,
)
from subfitlab.utils.logging import check_logger

logger = structlog.get_logger()

MAX_SPACE_SIZE = 7


@dataclass
class InstanceOutcome:
    checked: int = 0
    failures: int = 0
    coverage: Counter = field(default_factory=Counter)
    counterexample: Optional[Dict[str, Any]] = None
    size: int = 0
    elapsed: float = 0.0

    def snapshot(self, check: str) -> Dict[str, int]:
        """Counters from one worker, keyed the way MetricsCollector keys them."""
        out = {metric_key("sweep_coverage", {"check": check, "counter": k}): v for k, v in self.coverage.items()}
        out[metric_key("sweep_instances", {"check": check, "n": self.size})] = self.checked
        return out

    def fail(self, P: FinitePoset, reason: str, **details: Any) -> None:
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = {"poset": poset_to_document(P).model_dump(), "reason": reason, **details}


# Lattice targets

def _thm21_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome()
    L = try_lattice(P)
    if not is_distributive_lattice(L):
        out.coverage["non_distributive_skipped"] += 1
        return out
    out.checked = 1
    if not verify_thm21(L):
        out.fail(P, "subfit elements do not form an ideal")
    subfit = list(bits(subfit_elements(L).subfit_set))
    for a in subfit:
        for b in subfit:
            if L.j(a, b) != L.top:
                continue
            for s in range(L.n):
                for t in range(L.n):
                    if P.le(t, s):
                        continue
                    try:
                        trace = thm21_join_witness_trace(L, a, b, s, t, assume_distributive=True)
                    except SubfitLabError as e:
                        out.fail(P, e.message, a=a, b=b, s=s, t=t)
                        continue
                    out.coverage["tuples"] += 1
                    out.coverage[trace.branch] += 1
                    if trace.swapped:
                        out.coverage["swapped"] += 1
    return out


def _thm42_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome(checked=1)
    L = try_lattice(P)
    out.coverage["distributive" if is_distributive_lattice(L) else "non_distributive"] += 1
    try:
        env = build_envelope(L)
    except SubfitLabError as e:
        out.fail(P, e.message, **e.details)
        return out
    subfit = is_join_subfit(L)
    out.coverage["join_subfit" if subfit else "not_join_subfit"] += 1
    if subfit != is_join_subfit(env.L):
        out.fail(P, "A and L disagree on join-subfitness", envelope_size=env.L.n)
    return out


def _envelope_identity_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome()
    L = try_lattice(P)
    if not is_distributive_lattice(L):
        out.coverage["non_distributive_skipped"] += 1
        return out
    out.checked = 1
    try:
        env = build_envelope(L)
    except SubfitLabError as e:
        out.fail(P, e.message, **e.details)
        return out
    if not is_isomorphic(env.L.poset, L.poset):
        out.fail(P, "generated envelope differs from a distributive input", envelope_size=env.L.n)
    return out


def _idealsubfit_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome(checked=1)
    L = try_lattice(P)
    separation = is_join_subfit(L)
    directed = all(
        join_subfit_witness(L, u, v) is not None for u in range(L.n) for v in range(L.n) if not P.le(u, v)
    )
    out.coverage["join_subfit" if separation else "not_join_subfit"] += 1
    if separation != directed:
        out.fail(P, "separation and directed forms disagree", separation=separation, directed=directed)
    if is_ideally_subfit(L) != separation:
        out.fail(P, "ideal subfitness disagrees with join-subfitness", separation=separation)
    return out


def _lattice_roundtrip_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome()
    L = try_lattice(P)
    if not is_distributive_lattice(L):
        out.coverage["non_distributive_skipped"] += 1
        return out
    out.checked = 1
    out.coverage["lattices"] += 1
    if not is_isomorphic(qcop(birkhoff_space(L)).poset, P):
        out.fail(P, "qcop of the Birkhoff space differs from L")
    return out


# Space targets

def _space_roundtrip_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome(checked=1)
    out.coverage["spaces"] += 1
    if not is_isomorphic(birkhoff_space(qcop(FiniteSpace(P))).poset, P):
        out.fail(P, "Birkhoff space of qcop differs from X")
    return out


def _prop52_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome(checked=1)
    X = FiniteSpace(P)
    out.coverage["join_subfit" if is_join_subfit(qcop(X)) else "not_join_subfit"] += 1
    if not check_prop52(X):
        out.fail(P, "join-subfitness and patch density disagree")
    if not is_patch_discrete(X):
        out.fail(P, "patch topology is not discrete")
    if not is_join_subfit_qcop_oracle(X):
        out.fail(P, "antichain, Boolean and join-subfit disagree")
    if not check_closed_point_in_closed_sets(X):
        out.fail(P, "a nonempty closed set holds no closed point")
    return out


def _cor53_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome(checked=1)
    X = FiniteSpace(P)
    if not check_cor53(X):
        out.fail(P, "meet-subfitness and regular opens disagree")
    if not is_isomorphic(qcop(inverse_space(X)).poset, dual(qcop(X).poset)):
        out.fail(P, "qcop of the inverse space is not the dual lattice")
    if inverse_space(inverse_space(X)) != X:
        out.fail(P, "inverse space is not an involution")
    return out


def _union_instance(P: FinitePoset) -> InstanceOutcome:
    out = InstanceOutcome(checked=1)
    X = FiniteSpace(P)
    for U, V in open_pairs(X):
        out.coverage["open_pairs"] += 1
        if not check_union_theorem(X, U, V):
            out.fail(P, "patch density not preserved by union", U=X.describe(U), V=X.describe(V))
    for O1, O2 in nested_open_pairs(X):
        out.coverage["nested_pairs"] += 1
        if not check_star_property(X, O1, O2):
            out.fail(P, "star property fails", O1=X.describe(O1), O2=X.describe(O2))
    return out


@dataclass(frozen=True)
class SweepTarget:
    name: str
    source: str  # lattices or posets
    worker: Callable[[FinitePoset], InstanceOutcome]
    default_max_n: Callable[[], int]


def _sweep_cfg():
    return get_settings().sweep


TARGETS: Dict[str, List[SweepTarget]] = {
    "thm21": [SweepTarget("thm21", "lattices", _thm21_instance, lambda: _sweep_cfg().thm21_max_n)],
    "thm42": [SweepTarget("thm42", "lattices", _thm42_instance, lambda: _sweep_cfg().thm42_max_n)],
    "envelope-identity": [
        SweepTarget("envelope-identity", "lattices", _envelope_identity_instance, lambda: _sweep_cfg().thm42_max_n)
    ],
    "idealsubfit": [SweepTarget("idealsubfit", "lattices", _idealsubfit_instance, lambda: _sweep_cfg().thm42_max_n)],
    "prop52": [SweepTarget("prop52", "posets", _prop52_instance, lambda: _sweep_cfg().space_max_n)],
    "cor53": [SweepTarget("cor53", "posets", _cor53_instance, lambda: _sweep_cfg().space_max_n)],
    "union": [SweepTarget("union", "posets", _union_instance, lambda: _sweep_cfg().union_max_n)],
    "roundtrip": [
        SweepTarget("roundtrip-lattices", "lattices", _lattice_roundtrip_instance, lambda: _sweep_cfg().thm21_max_n),
        SweepTarget("roundtrip-spaces", "posets", _space_roundtrip_instance, lambda: _sweep_cfg().space_max_n),
    ],
}

SPACE_CHECK_TARGETS = ("prop52", "cor53", "union")


def _instances(source: str, max_n: int) -> Iterator[FinitePoset]:
    if source == "lattices":
        for L in enumerate_lattices(max_n):
            yield L.poset
        return
    if max_n > MAX_SPACE_SIZE:
        raise InvalidInputError(f"space enumeration is bounded by {MAX_SPACE_SIZE} points, got {max_n}")
    for P in enumerate_posets(max_n):
        if P.n:
            yield P


def _timed(worker: Callable[[FinitePoset], InstanceOutcome], P: FinitePoset) -> InstanceOutcome:
    started = time.perf_counter()
    out = worker(P)
    out.size = P.n
    out.elapsed = time.perf_counter() - started
    return out


def _outcomes(target: SweepTarget, max_n: int, jobs: int) -> Iterator[InstanceOutcome]:
    instances = _instances(target.source, max_n)
    run = partial(_timed, target.worker)
    if jobs <= 1:
        yield from map(run, instances)
        return
    with multiprocessing.Pool(jobs) as pool:
        yield from pool.imap(run, list(instances), chunksize=4)


def run_target(
    target: SweepTarget,
    max_n: int,
    jobs: int = 1,
    metrics: Optional[MetricsCollector] = None,
) -> SweepSummary:
    metrics = metrics or MetricsCollector()
    started = time.perf_counter()
    instances = failures = 0
    coverage: Counter = Counter()
    counterexample = None
    for outcome in _outcomes(target, max_n, jobs):
        instances += outcome.checked
        failures += outcome.failures
        coverage.update(outcome.coverage)
        metrics.merge(outcome.snapshot(target.name))
        metrics.record("instance_seconds", outcome.elapsed, {"check": target.name})
        if counterexample is None and outcome.counterexample is not None:
            counterexample = outcome.counterexample
    elapsed = time.perf_counter() - started

    metrics.record("sweep_seconds", elapsed, {"check": target.name})
    check_logger.record_check(target.name, instances, failures, elapsed, coverage)
    return SweepSummary(
        check=target.name,
        max_n=max_n,
        instances=instances,
        failures=failures,
        coverage=dict(sorted(coverage.items())),
        elapsed_ms=round(elapsed * 1000, 3),
        counterexample=counterexample,
    )


def run_sweep(
    name: str,
    max_n: Optional[int] = None,
    jobs: Optional[int] = None,
    metrics: Optional[MetricsCollector] = None,
) -> List[SweepSummary]:
    """Run every part of a named target; max_n and jobs default to the settings."""
    if name not in TARGETS:
        raise InvalidInputError(f"unknown sweep target {name!r}", details={"known": sorted(TARGETS)})
    jobs = jobs or _sweep_cfg().jobs
    summaries = []
    for target in TARGETS[name]:
        n = max_n if max_n is not None else target.default_max_n()
        logger.info("sweep_started", check=target.name, max_n=n, jobs=jobs)
        summaries.append(run_target(target, n, jobs, metrics))
    return summaries
