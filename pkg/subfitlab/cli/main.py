#!/usr/bin/env python3
"""
subfitlab command line

Reads poset/lattice JSON documents and runs the structural checks, witness
constructions and verification sweeps. Every command prints one RunReport
as JSON on stdout; logs go to stderr.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from subfitlab.config import get_settings
from subfitlab.core.exceptions import (
    InvalidInputError,
    MissingBottomError,
    MissingTopError,
    NotComparableError,
    PreconditionViolatedError,
    SubfitLabError,
)
from subfitlab.core.metrics import MetricsCollector
from subfitlab.models.core import CheckResult, ErrorResponse, PosetDocument, RunReport, SweepSummary
from subfitlab.services.duality import birkhoff_space, check_cor53, check_prop52, closed_points, qcop
from subfitlab.services.enumeration import enumerate_lattices, is_isomorphic
from subfitlab.services.envelope import JoinEmbedding, build_envelope, check_prop41
from subfitlab.services.order import (
    FinitePoset,
    dual,
    is_distributive_join_semilattice,
    is_distributive_lattice,
    poset_from_document,
    poset_to_document,
    try_join_semilattice,
    try_lattice,
)
from subfitlab.services.properties import CLAIM_SUITES, run_counterexample_suite, run_space_suite
from subfitlab.services.subfit import (
    coannihilators,
    is_join_subfit,
    is_meet_subfit,
    subfit_elements,
    thm21_join_witness_trace,
)
from subfitlab.services.sweeps import SPACE_CHECK_TARGETS, TARGETS, run_sweep
from subfitlab.utils.logging import error_tracker, get_logger, setup_logging

logger = get_logger("subfitlab.cli")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

# input problems on the caller's side
INPUT_ERRORS = (InvalidInputError, PreconditionViolatedError, MissingTopError, MissingBottomError, NotComparableError)

Outcome = Tuple[List[CheckResult], Optional[Any]]


def load_poset(path: str) -> FinitePoset:
    """Read and validate a poset JSON document."""
    text = Path(path).read_text()
    return poset_from_document(PosetDocument.model_validate_json(text))


def _lattice(P: FinitePoset):
    L = try_lattice(P)
    if L is None:
        raise InvalidInputError("input is not a lattice")
    return L


def _labels(P: FinitePoset, elements) -> List[str]:
    return [P.label(i) for i in elements]


def _summary_result(summary: SweepSummary) -> CheckResult:
    return CheckResult(
        name=summary.check,
        passed=summary.passed,
        instances=summary.instances,
        failures=summary.failures,
        coverage=summary.coverage,
        details={"max_n": summary.max_n, "elapsed_ms": summary.elapsed_ms},
        counterexample=summary.counterexample,
    )


def cmd_check(args, metrics: MetricsCollector) -> Outcome:
    """Structural predicates for one input."""
    P = load_poset(args.file)
    A = try_join_semilattice(P)
    L = try_lattice(P)
    details: Dict[str, Any] = {
        "n": P.n,
        "poset": True,
        "join_semilattice": A is not None,
        "lattice": L is not None,
        "bounded": P.bottom is not None and P.top is not None,
        "distributive": None,
        "join_subfit": None,
        "meet_subfit": None,
    }
    if L is not None:
        details["distributive"] = is_distributive_lattice(L)
    elif A is not None:
        details["distributive"] = is_distributive_join_semilattice(A)
    if A is not None and A.top is not None:
        details["join_subfit"] = is_join_subfit(A)
        if not details["join_subfit"]:
            co = coannihilators(A)
            seen: Dict[int, int] = {}
            for a, row in enumerate(co):
                if row in seen:
                    details["same_coannihilators"] = _labels(P, (seen[row], a))
                    break
                seen[row] = a
    if P.bottom is not None and try_join_semilattice(dual(P)) is not None:
        details["meet_subfit"] = is_meet_subfit(P)
    return [CheckResult(name="structure", passed=True, details=details)], None


def cmd_subfit_elements(args, metrics: MetricsCollector) -> Outcome:
    P = load_poset(args.file)
    A = try_join_semilattice(P)
    if A is None:
        raise InvalidInputError("input is not a join-semilattice")
    report = subfit_elements(A)
    details = {
        "subfit_set": _labels(P, report.members),
        "is_downset": report.is_downset,
        "is_ideal": report.is_ideal,
        "offending_pair": _labels(P, report.offending_pair) if report.offending_pair else None,
        "join_subfit": is_join_subfit(A) if A.top is not None else None,
    }
    return [CheckResult(name="subfit_elements", passed=True, details=details)], None


def cmd_witness(args, metrics: MetricsCollector) -> Outcome:
    """Run the join witness construction on a, b, s, t."""
    P = load_poset(args.file)
    L = _lattice(P)
    a, b, s, t = (P.index(x) for x in (args.a, args.b, args.s, args.t))
    trace = thm21_join_witness_trace(L, a, b, s, t)
    s_below = L.j(s, trace.z) != L.top
    t_top = L.j(t, trace.z) == L.top
    details = {
        "z": P.label(trace.z),
        "s_join_z_below_top": s_below,
        "t_join_z_is_top": t_top,
        "branch": trace.branch,
        "swapped": trace.swapped,
        "y": P.label(trace.y),
        "w": P.label(trace.w) if trace.w is not None else None,
        "x": P.label(trace.x) if trace.x is not None else None,
    }
    passed = s_below and t_top
    result = CheckResult(name="join_witness", passed=passed, failures=0 if passed else 1, details=details)
    return [result], None if passed else details


def cmd_envelope(args, metrics: MetricsCollector) -> Outcome:
    P = load_poset(args.file)
    A = try_join_semilattice(P)
    if A is None:
        raise InvalidInputError("input is not a join-semilattice")
    env = build_envelope(A)
    cond_a, cond_b = check_prop41(JoinEmbedding.of(A, env.L, env.embedding_table))
    subfit_A, subfit_L = is_join_subfit(A), is_join_subfit(env.L)
    details = {
        "size_A": A.n,
        "size_E": env.E.n,
        "size_L": env.L.n,
        "join_subfit_A": subfit_A,
        "join_subfit_L": subfit_L,
        "condition_a": cond_a,
        "condition_b": cond_b,
        "eta": [env.E.poset.label(e) for e in env.eta],
    }
    passed = subfit_A == subfit_L and cond_a and cond_b
    result = CheckResult(name="envelope", passed=passed, failures=0 if passed else 1, details=details)
    return [result], None if passed else {"poset": poset_to_document(P).model_dump(), **details}


def cmd_dualize(args, metrics: MetricsCollector) -> Outcome:
    """Birkhoff space of a distributive lattice plus both round trips."""
    P = load_poset(args.file)
    L = _lattice(P)
    X = birkhoff_space(L)
    lattice_roundtrip = is_isomorphic(qcop(X).poset, P)
    space_roundtrip = is_isomorphic(birkhoff_space(qcop(X)).poset, X.poset)
    details = {
        "space": poset_to_document(X.poset).model_dump(),
        "closed_points": X.describe(closed_points(X)),
        "lattice_roundtrip": lattice_roundtrip,
        "space_roundtrip": space_roundtrip,
        "prop52_equivalence": check_prop52(X),
        "cor53_equivalence": check_cor53(X),
    }
    passed = all(details[k] for k in ("lattice_roundtrip", "space_roundtrip", "prop52_equivalence", "cor53_equivalence"))
    result = CheckResult(name="dualize", passed=passed, failures=0 if passed else 1, details=details)
    return [result], None if passed else details["space"]


def _first_counterexample(results: Sequence[CheckResult]) -> Optional[Any]:
    for r in results:
        if not r.passed:
            return {"check": r.name, "counterexample": r.counterexample, "details": r.details}
    return None


def cmd_enumerate(args, metrics: MetricsCollector) -> Outcome:
    cfg = get_settings().sweep
    jobs = args.jobs or cfg.jobs
    if args.verify is None:
        max_n = args.max_n if args.max_n is not None else cfg.max_lattice_size
        counts: Dict[int, int] = {}
        for L in enumerate_lattices(max_n):
            counts[L.n] = counts.get(L.n, 0) + 1
            metrics.increment("lattices", {"n": L.n})
        details = {"max_n": max_n, "lattices_per_size": {str(n): counts.get(n, 0) for n in range(1, max_n + 1)}}
        return [CheckResult(name="enumerate", passed=True, instances=sum(counts.values()), details=details)], None
    results = [_summary_result(s) for s in run_sweep(args.verify, args.max_n, jobs, metrics)]
    return results, _first_counterexample(results)


def cmd_space_check(args, metrics: MetricsCollector) -> Outcome:
    cfg = get_settings().sweep
    jobs = args.jobs or cfg.jobs
    max_n = args.max_n if args.max_n is not None else cfg.space_max_n
    results = []
    for target in SPACE_CHECK_TARGETS:
        n = min(max_n, cfg.union_max_n) if target == "union" else max_n
        results.extend(_summary_result(s) for s in run_sweep(target, n, jobs, metrics))
    return results, _first_counterexample(results)


def cmd_counterexample(args, metrics: MetricsCollector) -> Outcome:
    cfg = get_settings().sampling
    samples = args.samples or cfg.samples
    seed = args.seed if args.seed is not None else cfg.seed
    bound = args.bound or cfg.support_bound
    jobs = args.jobs or get_settings().sweep.jobs
    results: List[CheckResult] = []
    if args.claims is not None or not args.space:
        claims = [c.strip() for c in (args.claims or ",".join(CLAIM_SUITES)).split(",") if c.strip()]
        results.extend(
            run_counterexample_suite(
                claims, samples, seed, bound, cfg.closure_samples, jobs, cfg.min_case_hits, metrics
            )
        )
    if args.space:
        results.extend(run_space_suite(samples, seed, bound, jobs, cfg.min_case_hits, metrics))
    return results, _first_counterexample(results)


COMMANDS = {
    "check": cmd_check,
    "subfit-elements": cmd_subfit_elements,
    "witness": cmd_witness,
    "envelope": cmd_envelope,
    "dualize": cmd_dualize,
    "enumerate": cmd_enumerate,
    "space-check": cmd_space_check,
    "counterexample": cmd_counterexample,
}


def inputs_digest(args) -> str:
    """sha256 over the command, its arguments and the bytes of any input file."""
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in ("pretty", "json")}
    h = hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode())
    path = payload.get("file")
    if path and Path(path).is_file():
        h.update(Path(path).read_bytes())
    return h.hexdigest()


def format_json_output(data: Any, pretty: bool = False) -> str:
    return json.dumps(data, indent=2 if pretty else None, default=str)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subfitlab",
        description="Subfitness checks for finite lattices, envelopes and spaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  subfitlab check lattice.json                        # structural flags
  subfitlab witness lattice.json a b s t              # join witness for subfit a, b
  subfitlab enumerate --max-n 7 --verify thm21 --jobs 4
  subfitlab counterexample --claims 1,2,5 --samples 10000 --seed 7
  subfitlab counterexample --space

Environment Variables:
  SUBFITLAB_LOGGING__LOG_LEVEL    log level (default: WARNING)
  SUBFITLAB_SAMPLING_SEED         default seed for property runs
  SUBFITLAB_SWEEP_JOBS            default worker processes
        """,
    )
    parser.add_argument("--pretty", action="store_true", help="Indent the JSON report")
    parser.add_argument("--json", action="store_true", default=True, help="JSON output (always on)")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    p = subparsers.add_parser("check", help="Structural predicates for one poset file")
    p.add_argument("file")

    p = subparsers.add_parser("subfit-elements", help="Elements whose downset is join-subfit")
    p.add_argument("file")

    p = subparsers.add_parser("witness", help="Join witness z for s, t under subfit a, b")
    p.add_argument("file")
    for name in ("a", "b", "s", "t"):
        p.add_argument(name, help="Element label or index")

    p = subparsers.add_parser("envelope", help="Distributive envelope and subfitness transfer")
    p.add_argument("file")

    p = subparsers.add_parser("dualize", help="Birkhoff space of a distributive lattice")
    p.add_argument("file")

    p = subparsers.add_parser("enumerate", help="Enumerate lattices, optionally verifying a theorem")
    p.add_argument("--max-n", type=int, help="Largest instance size")
    p.add_argument("--verify", choices=sorted(TARGETS), help="Sweep to run")
    p.add_argument("--jobs", type=int, help="Worker processes")

    p = subparsers.add_parser("space-check", help="Patch density, regular open and union sweeps")
    p.add_argument("--max-n", type=int, help="Largest space size")
    p.add_argument("--jobs", type=int, help="Worker processes")

    p = subparsers.add_parser("counterexample", help="Seeded checks on the finite/cofinite counterexample")
    p.add_argument("--claims", help="Comma-separated claims from 1-6 (default: all)")
    p.add_argument("--samples", type=int, help="Samples per sampled claim")
    p.add_argument("--seed", type=int, help="Random seed")
    p.add_argument("--bound", type=int, help="Largest support element drawn")
    p.add_argument("--space", action="store_true", help="Run the compact-open space checks")
    p.add_argument("--jobs", type=int, help="Worker processes")

    return parser


def _error(error: Exception, code: str, details: Optional[Dict[str, Any]] = None, error_id: Optional[str] = None) -> ErrorResponse:
    message = getattr(error, "message", None) or str(error)
    return ErrorResponse(
        error=error.__class__.__name__,
        error_code=code,
        message=message,
        details=details or {},
        error_id=error_id,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_INPUT_ERROR

    setup_logging()
    started = time.perf_counter()
    metrics = MetricsCollector()
    try:
        results, counterexample = COMMANDS[args.command](args, metrics)
    except INPUT_ERRORS as e:
        print(format_json_output(_error(e, e.error_code, e.details).model_dump(mode="json"), args.pretty))
        return EXIT_INPUT_ERROR
    except ValidationError as e:
        body = _error(e, "INVALID_INPUT", {"errors": json.loads(e.json())})
        print(format_json_output(body.model_dump(mode="json"), args.pretty))
        return EXIT_INPUT_ERROR
    except (OSError, json.JSONDecodeError) as e:
        print(format_json_output(_error(e, "INVALID_INPUT").model_dump(mode="json"), args.pretty))
        return EXIT_INPUT_ERROR
    except SubfitLabError as e:
        error_id = error_tracker.track_error(e, {"command": args.command})
        print(format_json_output(_error(e, e.error_code, e.details, error_id).model_dump(mode="json"), args.pretty))
        return EXIT_CHECK_FAILED
    except Exception as e:
        error_id = error_tracker.track_error(e, {"command": args.command}, severity="critical")
        print(format_json_output(_error(e, "INTERNAL_ERROR", error_id=error_id).model_dump(mode="json"), args.pretty))
        return EXIT_CHECK_FAILED

    passed = all(r.passed for r in results)
    report = RunReport(
        command=args.command,
        inputs=inputs_digest(args),
        passed=passed,
        results=results,
        counterexample=counterexample,
        metrics=metrics.counters(),
        elapsed_ms=round((time.perf_counter() - started) * 1000, 3),
    )
    print(format_json_output(report.model_dump(mode="json"), args.pretty))
    logger.info("Command finished", command=args.command, passed=passed, timings=metrics.timings())
    return EXIT_OK if passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
