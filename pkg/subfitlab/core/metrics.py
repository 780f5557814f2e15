"""Coverage counters and timings for property runs and sweeps."""

import threading
from collections import Counter, defaultdict
from typing import Dict, List, Mapping, Optional

import numpy as np

Labels = Optional[Mapping[str, object]]


def metric_key(name: str, labels: Labels = None) -> str:
    """`name{k=v,...}` with labels sorted, or the bare name."""
    if not labels:
        return name
    return name + "{" + ",".join(f"{k}={labels[k]}" for k in sorted(labels)) + "}"


class MetricsCollector:
    """
    Counters and timing samples for one command.

    Worker processes keep their own collector; the parent folds their
    `counters()` snapshots in with `merge()`.
    """

    def __init__(self):
        self._counts: Counter = Counter()
        self._timings: Dict[str, List[float]] = defaultdict(list)
        self._lock = threading.Lock()

    def increment(self, name: str, labels: Labels = None, value: int = 1) -> None:
        with self._lock:
            self._counts[metric_key(name, labels)] += value

    def record(self, name: str, value: float, labels: Labels = None) -> None:
        with self._lock:
            self._timings[metric_key(name, labels)].append(value)

    def merge(self, counters: Mapping[str, int]) -> None:
        with self._lock:
            self._counts.update(counters)

    def counters(self, prefix: str = "") -> Dict[str, int]:
        with self._lock:
            return {k: self._counts[k] for k in sorted(self._counts) if k.startswith(prefix)}

    def timings(self) -> Dict[str, Dict[str, float]]:
        with self._lock:
            return {k: _stats(v) for k, v in sorted(self._timings.items())}


def _stats(values: List[float]) -> Dict[str, float]:
    samples = np.asarray(values, dtype=float)
    return {
        "count": int(samples.size),
        "sum": float(samples.sum()),
        "avg": float(samples.mean()),
        "min": float(samples.min()),
        "max": float(samples.max()),
    }
