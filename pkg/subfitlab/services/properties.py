"""
Seeded property runs over the finite/cofinite counterexample.

A property draws inputs from a generator and checks them, returning the proof
case it went through or raising on a violation. Samples are split into fixed
batches seeded by (seed, property, batch), so a run gives the same answer for
any number of worker processes. The first failure is shrunk greedily before
it is reported.
"""

import multiprocessing
import time
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from subfitlab.core.exceptions import (
    InvalidInputError,
    NotInAError,
    PreconditionViolatedError,
    PropertyCheckFailedError,
    SubfitLabError,
)
from subfitlab.core.metrics import MetricsCollector, metric_key
from subfitlab.models.core import CheckResult, SetKind
from subfitlab.services.cofinite import FinOrCofin
from subfitlab.services.counterexample import (
    A_CLASSES,
    CLAIM1_CASES,
    CLAIM5_CASES,
    CLAIM6_CASES,
    UP_A_CLASSES,
    UP_B_CLASSES,
    claim1_witness_traced,
    claim2_witness,
    claim3_refute,
    claim4_closure_holds,
    claim5_extension,
    claim6_extension,
    class_frequencies,
    meet_A,
    meet_table,
    sample_A,
    sample_claim5_triple,
    sample_claim6_triple,
    sample_pair,
    trace_class,
)
from subfitlab.services.symbolic_space import (
    EXTRA_POINTS,
    P,
    POINT_OF,
    SymbolicOpen,
    antiiso,
    antiiso_inverse,
    check_V_W_join_subfit,
    check_X_not_join_subfit,
    derive_point_identification,
    in_qcop_X,
    qcopX_inter,
    qcopX_union,
    sample_up_a_pair,
    sample_up_c_pair,
    v_side_witness,
    v_side_witness_traced,
    w_side_witness,
)
from subfitlab.utils.logging import check_logger

logger = structlog.get_logger()

BATCH_SIZE = 1000
SHRINK_BUDGET = 2000

# truncated universe {0..64} for the Boolean algebra oracle
ORACLE_UNIVERSE = 65

# tails 3..7 give 32 members per trace class
MEET_TABLE_BOUND = 7

# input errors mean a shrink candidate left the property's domain
_OUT_OF_DOMAIN = (PreconditionViolatedError, NotInAError, InvalidInputError)

Inputs = Tuple[FinOrCofin, ...]


@dataclass(frozen=True)
class Property:
    name: str
    draw: Callable[[int, np.random.Generator], Inputs]
    check: Callable[..., str]
    cases: Tuple[str, ...] = ()
    closure: bool = False


@dataclass
class PropertyOutcome:
    name: str
    samples: int
    failures: int = 0
    coverage: Dict[str, int] = field(default_factory=dict)
    counterexample: Optional[Dict[str, Any]] = None
    under_covered: List[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0 and not self.under_covered

    def to_result(self) -> CheckResult:
        details: Dict[str, Any] = {}
        if self.under_covered:
            details["under_covered"] = self.under_covered
        return CheckResult(
            name=self.name,
            passed=self.passed,
            instances=self.samples,
            failures=self.failures,
            coverage=self.coverage,
            details=details,
            counterexample=self.counterexample,
        )


def _expect(ok: bool, message: str, **sets: Any) -> None:
    if not ok:
        raise PropertyCheckFailedError(message, details={k: str(v) for k, v in sets.items()})


# Draws

def _draw_up_a_pair(bound, rng):
    return sample_pair(bound, rng, UP_A_CLASSES)


def _draw_up_b_pair(bound, rng):
    return sample_pair(bound, rng, UP_B_CLASSES)


def _draw_up_a_any_pair(bound, rng):
    return sample_A(bound, rng, UP_A_CLASSES), sample_A(bound, rng, UP_A_CLASSES)


def _draw_A_pair(bound, rng):
    return sample_A(bound, rng), sample_A(bound, rng)


def _draw_any_pair(bound, rng):
    def one():
        kind = SetKind.FINITE if rng.random() < 0.5 else SetKind.COFINITE
        support = [i for i in range(bound + 1) if rng.random() < 0.3]
        return FinOrCofin.finite(support) if kind is SetKind.FINITE else FinOrCofin.cofinite(support)

    return one(), one()


# Checks

def _check_claim1(x, y):
    return claim1_witness_traced(x, y).case


def _check_claim2(x, y):
    z = claim2_witness(x, y)
    return "low" if z.support[-1] < 3 else "tail"


def _check_claim4(x, y):
    _expect(claim4_closure_holds(x, y), "upset of {0} not closed under union and intersection", x=x, y=y)
    return "ok"


def _check_claim5(x, y, z):
    return claim5_extension(x, y, z).case


def _check_claim6(x, y, z):
    return claim6_extension(x, y, z).case


def _check_meet_closure(E, F):
    return trace_class(meet_A(E, F)).value


def _check_boolean_algebra(E, F):
    full = (1 << ORACLE_UNIVERSE) - 1
    e, f = E.to_mask(ORACLE_UNIVERSE), F.to_mask(ORACLE_UNIVERSE)
    _expect((E | F).to_mask(ORACLE_UNIVERSE) == e | f, "union disagrees with oracle", E=E, F=F)
    _expect((E & F).to_mask(ORACLE_UNIVERSE) == e & f, "intersection disagrees with oracle", E=E, F=F)
    _expect((~E).to_mask(ORACLE_UNIVERSE) == full & ~e, "complement disagrees with oracle", E=E)
    _expect((E - F).to_mask(ORACLE_UNIVERSE) == e & ~f, "difference disagrees with oracle", E=E, F=F)
    _expect(~(E | F) == (~E & ~F) and ~(E & F) == (~E | ~F), "De Morgan fails", E=E, F=F)
    _expect((E | (E & F)) == E and (E & (E | F)) == E, "absorption fails", E=E, F=F)
    _expect(~~E == E and (E <= F) == (e & ~f == 0), "complement or order inconsistent", E=E, F=F)
    return f"{E.kind.value}/{F.kind.value}"


def _check_antiiso(E, F):
    U, V = antiiso(E), antiiso(F)
    _expect(in_qcop_X(U) and in_qcop_X(V), "image is not a compact open", E=E, F=F)
    _expect(antiiso_inverse(U) == E and antiiso_inverse(V) == F, "inverse does not undo the map", E=E, F=F)
    _expect((E <= F) == (V <= U), "order is not reversed", E=E, F=F)
    _expect(antiiso_inverse(qcopX_union(U, V)) == meet_A(E, F), "union does not mirror intersection", E=E, F=F)
    _expect(qcopX_inter(U, U) == U, "intersection with itself changed the open", E=E)
    return "comparable" if E <= F or F <= E else "incomparable"


def _check_w_side(x, y):
    w_side_witness(x, y)
    return claim1_witness_traced(x, y).case


def _check_v_side(x, y):
    v_side_witness(x, y)
    return v_side_witness_traced(x, y)[1]


PROPERTIES: Dict[str, Property] = {
    p.name: p
    for p in (
        Property("claim1", _draw_up_a_pair, _check_claim1, CLAIM1_CASES),
        Property("claim2", _draw_up_b_pair, _check_claim2, ("low", "tail")),
        Property("claim4", _draw_up_a_any_pair, _check_claim4, closure=True),
        Property("claim5", sample_claim5_triple, _check_claim5, CLAIM5_CASES),
        Property("claim6", sample_claim6_triple, _check_claim6, CLAIM6_CASES),
        Property("a_meet_closure", _draw_A_pair, _check_meet_closure, closure=True),
        Property(
            "boolean_algebra",
            _draw_any_pair,
            _check_boolean_algebra,
            ("finite/finite", "finite/cofinite", "cofinite/finite", "cofinite/cofinite"),
        ),
        Property("antiiso_order", _draw_A_pair, _check_antiiso, ("comparable", "incomparable")),
        Property("w_side_witness", sample_up_a_pair, _check_w_side, CLAIM1_CASES),
        Property("v_side_witness", sample_up_c_pair, _check_v_side, ("direct", "fresh")),
    )
}


def _property_seed(name: str) -> int:
    return zlib.crc32(name.encode())


def _fails(prop: Property, args: Inputs) -> bool:
    try:
        prop.check(*args)
    except _OUT_OF_DOMAIN:
        return False
    except SubfitLabError:
        return True
    return False


def _shrink_candidates(args: Inputs) -> Iterable[Inputs]:
    # drop tail elements first, then touch the trace on {0, 1, 2}
    for low in (False, True):
        for k, E in enumerate(args):
            for i in reversed(E.support):
                if (i < 3) == low:
                    smaller = FinOrCofin(E.kind, E.bits & ~(1 << i))
                    yield args[:k] + (smaller,) + args[k + 1:]


def shrink(prop: Property, args: Inputs, budget: int = SHRINK_BUDGET) -> Inputs:
    """Greedily shrink a failing input while it keeps failing."""
    current = args
    improved = True
    while improved and budget > 0:
        improved = False
        for candidate in _shrink_candidates(current):
            budget -= 1
            if _fails(prop, candidate):
                current = candidate
                improved = True
                break
            if budget <= 0:
                break
    return current


def _run_batch(task: Tuple[str, int, int, int, int]) -> Tuple[int, Dict[str, int], int, Optional[Tuple[Inputs, str]]]:
    """One batch in a worker: (batch, case counts, failures, first failure)."""
    name, seed, batch, count, bound = task
    prop = PROPERTIES[name]
    rng = np.random.default_rng([seed, _property_seed(name), batch])
    cases: Counter = Counter()
    failures = 0
    first = None
    for _ in range(count):
        args = prop.draw(bound, rng)
        try:
            cases[prop.check(*args)] += 1
        except SubfitLabError as e:
            failures += 1
            if first is None:
                first = (args, f"{e.__class__.__name__}: {e.message}")
    return batch, dict(cases), failures, first


def _tasks(name: str, samples: int, seed: int, bound: int) -> List[Tuple[str, int, int, int, int]]:
    tasks = []
    for batch, start in enumerate(range(0, samples, BATCH_SIZE)):
        tasks.append((name, seed, batch, min(BATCH_SIZE, samples - start), bound))
    return tasks


def _map(tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_batch(t) for t in tasks]
    with multiprocessing.Pool(min(jobs, len(tasks))) as pool:
        return pool.map(_run_batch, tasks)


def case_floor(samples: int, cases: Sequence[str], min_case_hits: int) -> int:
    """Required hits per case, scaled down for small sample counts."""
    if not cases:
        return 0
    return min(min_case_hits, samples // (10 * len(cases)))


def describe_inputs(args: Inputs) -> Dict[str, Any]:
    return {
        "sets": [str(E) for E in args],
        "documents": [E.to_document().model_dump(mode="json") for E in args],
    }


def run_property(
    name: str,
    samples: int,
    seed: int,
    bound: int,
    jobs: int = 1,
    min_case_hits: int = 0,
    metrics: Optional[MetricsCollector] = None,
) -> PropertyOutcome:
    if name not in PROPERTIES:
        raise InvalidInputError(f"unknown property {name!r}", details={"known": sorted(PROPERTIES)})
    prop = PROPERTIES[name]
    metrics = metrics or MetricsCollector()
    started = time.perf_counter()

    results = sorted(_map(_tasks(name, samples, seed, bound), jobs), key=lambda r: r[0])
    coverage: Counter = Counter({case: 0 for case in prop.cases})
    outcome = PropertyOutcome(name=name, samples=samples)
    for _, cases, failures, first in results:
        coverage.update(cases)
        metrics.merge({metric_key("property_case", {"property": name, "case": c}): hits for c, hits in cases.items()})
        outcome.failures += failures
        if first is not None and outcome.counterexample is None:
            shrunk = shrink(prop, first[0])
            outcome.counterexample = {"error": first[1], "original": describe_inputs(first[0]), **describe_inputs(shrunk)}
    outcome.coverage = dict(sorted(coverage.items()))

    floor = case_floor(samples, prop.cases, min_case_hits)
    outcome.under_covered = [c for c in prop.cases if coverage[c] < floor]
    outcome.elapsed = time.perf_counter() - started

    metrics.record("property_seconds", outcome.elapsed, {"property": name})
    check_logger.record_check(name, samples, outcome.failures, outcome.elapsed, outcome.coverage)
    if outcome.under_covered:
        logger.warning("property_under_covered", property=name, floor=floor, cases=outcome.under_covered)
    return outcome


# Exact checks

def _exact(name: str, fn: Callable[[], Tuple[bool, Dict[str, Any]]]) -> CheckResult:
    started = time.perf_counter()
    try:
        passed, details = fn()
        counterexample = None if passed else details
    except PropertyCheckFailedError as e:
        passed, details, counterexample = False, {}, {"error": e.message, **e.details}
    check_logger.record_check(name, 1, 0 if passed else 1, time.perf_counter() - started)
    return CheckResult(name=name, passed=passed, failures=0 if passed else 1, details=details, counterexample=counterexample)


def _claim3() -> Tuple[bool, Dict[str, Any]]:
    report = claim3_refute()
    return report.refuted, {
        "witness_pair": [str(E) for E in report.witness_pair],
        "below_c": [str(E) for E in report.below_c],
        "classes": {
            c.trace_class.value: {"contains_one": c.contains_one, "meets_c": c.meets_c} for c in report.classes
        },
    }


def _meet_table(bound: int) -> Callable[[], Tuple[bool, Dict[str, Any]]]:
    def run():
        table = meet_table(bound)
        return len(table.classes) == len(A_CLASSES) ** 2, {
            "bound": table.bound,
            "pairs": table.pairs,
            "classes": {f"{c1.value}&{c2.value}": c.value for (c1, c2), c in table.classes.items()},
        }

    return run


def _sample_frequencies(samples: int, seed: int, bound: int) -> Callable[[], Tuple[bool, Dict[str, Any]]]:
    def run():
        rng = np.random.default_rng([seed, _property_seed("sample_frequencies")])
        drawn = [sample_A(bound, rng) for _ in range(samples)]
        freq = class_frequencies(drawn)
        return all(freq[cls.value] > 0 for cls in A_CLASSES), {"frequencies": freq}

    return run


def _point_identification():
    found = derive_point_identification()
    return found == POINT_OF, {"identification": {str(i): p for i, p in sorted(found.items())}}


def _v_w_compact_opens():
    report = check_V_W_join_subfit()
    ok = report.V_open and report.W_open and report.covers_X
    return ok, {"V": str(report.V), "W": str(report.W), "covers_X": report.covers_X}


def _not_meet_closed():
    U = SymbolicOpen(P, frozenset({"x"}))
    V = SymbolicOpen(P, frozenset({"z"}))
    meet = qcopX_inter(U, V)
    return meet is None and in_qcop_X(U) and in_qcop_X(V), {"U": str(U), "V": str(V), "intersection": str(U & V)}


def _x_not_join_subfit():
    report = check_X_not_join_subfit()
    u, v = report.transported_pair
    return report.refuted, {
        "patch_open": str(report.patch_open),
        "closed_point_free": report.closed_point_free,
        "closure_of_z": sorted(map(str, report.closure_of_z)),
        "z_is_closed": report.z_is_closed,
        "transported_pair": [str(u), str(v)],
        "separating_shapes": report.separating_shapes,
        "shapes_checked": report.shapes_checked,
    }


CLAIM_SUITES = ("1", "2", "3", "4", "5", "6")


def run_counterexample_suite(
    claims: Sequence[str],
    samples: int,
    seed: int,
    bound: int,
    closure_samples: int,
    jobs: int = 1,
    min_case_hits: int = 0,
    metrics: Optional[MetricsCollector] = None,
) -> List[CheckResult]:
    """Claims on the semilattice A plus its closure and sampling sanity checks."""
    unknown = [c for c in claims if c not in CLAIM_SUITES]
    if unknown:
        raise InvalidInputError(f"unknown claims {unknown}", details={"known": list(CLAIM_SUITES)})
    results = []
    for claim in claims:
        if claim == "3":
            results.append(_exact("claim3", _claim3))
            continue
        prop = PROPERTIES[f"claim{claim}"]
        n = closure_samples if prop.closure else samples
        results.append(run_property(prop.name, n, seed, bound, jobs, min_case_hits, metrics).to_result())
    results.append(run_property("a_meet_closure", closure_samples, seed, bound, jobs, 0, metrics).to_result())
    results.append(_exact("a_meet_table", _meet_table(min(bound, MEET_TABLE_BOUND))))
    results.append(run_property("boolean_algebra", samples, seed, bound, jobs, min_case_hits, metrics).to_result())
    results.append(_exact("sample_frequencies", _sample_frequencies(samples, seed, bound)))
    return results


def run_space_suite(
    samples: int,
    seed: int,
    bound: int,
    jobs: int = 1,
    min_case_hits: int = 0,
    metrics: Optional[MetricsCollector] = None,
) -> List[CheckResult]:
    """The symbolic space X: exact structure checks and sampled witnesses."""
    results = [
        _exact("point_identification", _point_identification),
        _exact("v_w_compact_opens", _v_w_compact_opens),
        _exact("qcop_not_meet_closed", _not_meet_closed),
        _exact("x_not_join_subfit", _x_not_join_subfit),
    ]
    for name in ("antiiso_order", "w_side_witness", "v_side_witness"):
        results.append(run_property(name, samples, seed, bound, jobs, min_case_hits, metrics).to_result())
    logger.debug("space_suite_done", points=EXTRA_POINTS, checks=len(results))
    return results
