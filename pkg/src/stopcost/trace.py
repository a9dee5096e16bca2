"""Decoder runtime traces and empirical runtime distributions.

A trace is a collection of per-shot (runtime, decode-failed) measurements
of a decoder running against a fixed code distance and physical error
rate.  Runtimes are integer nanoseconds throughout: histogram keys stay
exact and conversion to syndrome-extraction (SEC) cycles is an exact
ceiling division by the cycle time.

Two input layouts are accepted:

* per-shot CSV, header ``runtime_ns,failed`` with one row per shot;
* histogram CSV, header ``runtime_ns,count_total,count_failed`` with one
  row per distinct runtime (rows may be unsorted; duplicates merge).

Billion-shot traces are only practical in histogram form, so traces are
stored aggregated by distinct runtime regardless of the input layout.
The ``failed`` flag records failures of the *uninterrupted* decoder;
timeout failures are derived later, per stopping time (see
:mod:`stopcost.stopping`).
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ConfigError, TraceIntegrityError, TraceParseError

PER_SHOT_HEADER = ("runtime_ns", "failed")
HISTOGRAM_HEADER = ("runtime_ns", "count_total", "count_failed")

METADATA_FIELDS = ("distance", "physical_error_rate", "shots", "sec_cycle_ns")


@dataclass(frozen=True)
class TraceMetadata:
    """Measurement context for a runtime trace."""

    distance: int
    physical_error_rate: float
    shots: int
    sec_cycle_ns: int

    def __post_init__(self):
        d = self.distance
        if d < 3 or d % 2 == 0:
            raise ValueError(f"distance must be an odd integer >= 3, got {d}")
        if not 0.0 < self.physical_error_rate < 1.0:
            raise ValueError(
                f"physical_error_rate must be in (0, 1), got {self.physical_error_rate}"
            )
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.sec_cycle_ns < 1:
            raise ValueError(f"sec_cycle_ns must be >= 1, got {self.sec_cycle_ns}")


class RuntimeTrace:
    """Per-shot decoder runtime/failure records, stored aggregated.

    ``runtimes_ns`` holds the distinct observed runtimes sorted ascending;
    ``counts`` and ``failed_counts`` hold, per distinct runtime, the number
    of shots and the number of decode failures among them.
    """

    def __init__(
        self,
        metadata: TraceMetadata,
        runtimes_ns: np.ndarray,
        counts: np.ndarray,
        failed_counts: np.ndarray,
    ):
        runtimes_ns = np.asarray(runtimes_ns, dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        failed_counts = np.asarray(failed_counts, dtype=np.int64)
        if runtimes_ns.size == 0:
            raise ValueError("trace must contain at least one record")
        if np.any(np.diff(runtimes_ns) <= 0):
            raise ValueError("runtimes must be strictly increasing")
        if runtimes_ns[0] < 0:
            raise ValueError("runtimes must be non-negative")
        if np.any(counts <= 0):
            raise ValueError("every histogram point needs a positive count")
        if np.any(failed_counts < 0) or np.any(failed_counts > counts):
            raise ValueError("failed counts must satisfy 0 <= failed <= total")
        total = int(counts.sum())
        if total != metadata.shots:
            raise TraceIntegrityError(
                f"trace contains {total} records but metadata declares "
                f"{metadata.shots} shots"
            )
        self.metadata = metadata
        self.runtimes_ns = runtimes_ns
        self.counts = counts
        self.failed_counts = failed_counts

    @classmethod
    def from_records(
        cls, metadata: TraceMetadata, records: Iterable[tuple[int, bool]]
    ) -> "RuntimeTrace":
        """Aggregate an iterable of (runtime_ns, failed) pairs."""
        totals: dict[int, list[int]] = {}
        for runtime, failed in records:
            entry = totals.setdefault(int(runtime), [0, 0])
            entry[0] += 1
            entry[1] += bool(failed)
        runtimes = np.array(sorted(totals), dtype=np.int64)
        counts = np.array([totals[r][0] for r in runtimes], dtype=np.int64)
        failed = np.array([totals[r][1] for r in runtimes], dtype=np.int64)
        return cls(metadata, runtimes, counts, failed)

    @property
    def record_count(self) -> int:
        return int(self.counts.sum())

    @property
    def failure_count(self) -> int:
        """Decode failures of the uninterrupted decoder."""
        return int(self.failed_counts.sum())

    @property
    def max_runtime_ns(self) -> int:
        return int(self.runtimes_ns[-1])

    def iter_records(self) -> Iterator[tuple[int, bool]]:
        """Expand to per-shot records, sorted by runtime, successes first."""
        for runtime, total, failed in zip(
            self.runtimes_ns, self.counts, self.failed_counts
        ):
            for _ in range(int(total - failed)):
                yield int(runtime), False
            for _ in range(int(failed)):
                yield int(runtime), True

    def __eq__(self, other) -> bool:
        if not isinstance(other, RuntimeTrace):
            return NotImplemented
        return (
            self.metadata == other.metadata
            and np.array_equal(self.runtimes_ns, other.runtimes_ns)
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.failed_counts, other.failed_counts)
        )


class EmpiricalRuntimeDistribution:
    """Step-function runtime distribution with cumulative failure counts.

    ``cum_total[i]`` / ``cum_failed[i]`` count the shots / decode failures
    with runtime <= ``runtimes_ns[i]``.  No interpolation or smoothing is
    applied anywhere; all queries are exact counts over the sample.
    """

    def __init__(
        self,
        runtimes_ns: np.ndarray,
        cum_total: np.ndarray,
        cum_failed: np.ndarray,
        shots: int,
    ):
        runtimes_ns = np.asarray(runtimes_ns, dtype=np.int64)
        cum_total = np.asarray(cum_total, dtype=np.int64)
        cum_failed = np.asarray(cum_failed, dtype=np.int64)
        if runtimes_ns.size == 0:
            raise ValueError("distribution must contain at least one point")
        if np.any(np.diff(runtimes_ns) <= 0):
            raise ValueError("runtimes must be strictly increasing")
        if np.any(np.diff(cum_total) <= 0) or np.any(np.diff(cum_failed) < 0):
            raise ValueError("cumulative counts must be non-decreasing")
        if int(cum_total[-1]) != shots:
            raise ValueError("final cumulative total must equal the shot count")
        if np.any(cum_failed > cum_total):
            raise ValueError("cumulative failures cannot exceed cumulative totals")
        self.runtimes_ns = runtimes_ns
        self.cum_total = cum_total
        self.cum_failed = cum_failed
        self.shots = int(shots)

    @property
    def max_runtime_ns(self) -> int:
        """Largest runtime observed with nonzero probability (t_max)."""
        return int(self.runtimes_ns[-1])

    @property
    def min_runtime_ns(self) -> int:
        return int(self.runtimes_ns[0])

    def points(self) -> list[tuple[int, int, int]]:
        """(runtime_ns, cumulative total, cumulative failed) triples."""
        return [
            (int(r), int(t), int(f))
            for r, t, f in zip(self.runtimes_ns, self.cum_total, self.cum_failed)
        ]

    def counts(self) -> np.ndarray:
        """Non-cumulative shot counts per distinct runtime."""
        return np.diff(self.cum_total, prepend=0)

    def count_at_or_below(self, runtime_ns: int) -> int:
        """Number of shots that finished within ``runtime_ns``."""
        idx = int(np.searchsorted(self.runtimes_ns, runtime_ns, side="right"))
        return 0 if idx == 0 else int(self.cum_total[idx - 1])

    def failed_at_or_below(self, runtime_ns: int) -> int:
        """Number of decode failures among shots finishing within ``runtime_ns``."""
        idx = int(np.searchsorted(self.runtimes_ns, runtime_ns, side="right"))
        return 0 if idx == 0 else int(self.cum_failed[idx - 1])

    def survival(self, stopping_time_ns: int) -> float:
        """Probability that the decoder runs longer than the stopping time."""
        if stopping_time_ns < 0:
            raise ValueError("stopping time must be non-negative")
        return (self.shots - self.count_at_or_below(stopping_time_ns)) / self.shots

    def percentile(self, q: float) -> int:
        """Smallest runtime t with count_at_or_below(t) / shots >= q."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"percentile fraction must be in [0, 1], got {q}")
        # Compare cum/shots >= q in the same float arithmetic the caller
        # sees, so percentile(count_at_or_below(t) / shots) never overshoots t.
        fractions = self.cum_total / self.shots
        idx = int(np.searchsorted(fractions, q, side="left"))
        idx = min(idx, len(self.runtimes_ns) - 1)
        return int(self.runtimes_ns[idx])

    def mean_ns(self) -> float:
        counts = self.counts()
        return float(np.dot(self.runtimes_ns.astype(float), counts)) / self.shots

    def std_ns(self) -> float:
        """Corrected (n-1) sample standard deviation; 0 for a single shot."""
        if self.shots < 2:
            warnings.warn(
                "standard deviation of a single-shot sample is degenerate",
                stacklevel=2,
            )
            return 0.0
        counts = self.counts()
        mean = self.mean_ns()
        dev = self.runtimes_ns.astype(float) - mean
        return float(np.sqrt(np.dot(counts, dev * dev) / (self.shots - 1)))


def build_distribution(trace: RuntimeTrace) -> EmpiricalRuntimeDistribution:
    """Turn a trace into its empirical runtime distribution."""
    return EmpiricalRuntimeDistribution(
        trace.runtimes_ns,
        np.cumsum(trace.counts),
        np.cumsum(trace.failed_counts),
        trace.metadata.shots,
    )


def load_metadata(
    path: str | Path | None, overrides: Mapping[str, object] | None = None
) -> TraceMetadata:
    """Read a metadata sidecar JSON, applying CLI-style field overrides.

    Every field in ``METADATA_FIELDS`` must be present after overrides.
    """
    raw: dict[str, object] = {}
    if path is not None:
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid metadata JSON in {path}: {exc}") from exc
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    missing = [f for f in METADATA_FIELDS if f not in raw]
    if missing:
        raise ConfigError(f"missing metadata field(s): {', '.join(missing)}")
    return TraceMetadata(
        distance=int(raw["distance"]),
        physical_error_rate=float(raw["physical_error_rate"]),
        shots=int(raw["shots"]),
        sec_cycle_ns=int(raw["sec_cycle_ns"]),
    )


def _parse_int(value: str, name: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise TraceParseError(f"{name} must be an integer, got {value!r}", line)


def parse_trace(
    path: str | Path,
    meta_path: str | Path | None = None,
    overrides: Mapping[str, object] | None = None,
) -> RuntimeTrace:
    """Parse a per-shot or histogram trace CSV into a :class:`RuntimeTrace`.

    The layout is detected from the header row.  Comment lines start with
    ``#``.  Metadata comes from the sidecar JSON at ``meta_path`` plus any
    overrides; all four fields are mandatory.
    """
    totals: dict[int, list[int]] = {}
    header: Sequence[str] | None = None
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if header is None:
                header = tuple(cells)
                if header not in (PER_SHOT_HEADER, HISTOGRAM_HEADER):
                    raise TraceParseError(
                        f"unrecognized header {','.join(cells)!r}; expected "
                        f"{','.join(PER_SHOT_HEADER)!r} or "
                        f"{','.join(HISTOGRAM_HEADER)!r}",
                        line_no,
                    )
                continue
            if len(cells) != len(header):
                raise TraceParseError(
                    f"expected {len(header)} fields, got {len(cells)}", line_no
                )
            runtime = _parse_int(cells[0], "runtime_ns", line_no)
            if runtime < 0:
                raise TraceParseError(f"runtime_ns must be >= 0, got {runtime}", line_no)
            if header == PER_SHOT_HEADER:
                if cells[1] not in ("0", "1"):
                    raise TraceParseError(
                        f"failed flag must be 0 or 1, got {cells[1]!r}", line_no
                    )
                total, failed = 1, int(cells[1])
            else:
                total = _parse_int(cells[1], "count_total", line_no)
                failed = _parse_int(cells[2], "count_failed", line_no)
                if total < 0 or failed < 0 or failed > total:
                    raise TraceParseError(
                        f"need 0 <= count_failed <= count_total, got "
                        f"({total}, {failed})",
                        line_no,
                    )
            entry = totals.setdefault(runtime, [0, 0])
            entry[0] += total
            entry[1] += failed
    if header is None:
        raise TraceParseError("trace file has no header row")
    totals = {r: tf for r, tf in totals.items() if tf[0] > 0}
    if not totals:
        raise TraceParseError("trace file has no data rows")
    metadata = load_metadata(meta_path, overrides)
    runtimes = np.array(sorted(totals), dtype=np.int64)
    counts = np.array([totals[r][0] for r in runtimes], dtype=np.int64)
    failed = np.array([totals[r][1] for r in runtimes], dtype=np.int64)
    return RuntimeTrace(metadata, runtimes, counts, failed)


def write_trace_csv(
    trace: RuntimeTrace, path: str | Path, per_shot: bool = False
) -> None:
    """Write a trace in histogram (default) or per-shot CSV layout."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if per_shot:
            writer.writerow(PER_SHOT_HEADER)
            for runtime, failed in trace.iter_records():
                writer.writerow([runtime, int(failed)])
        else:
            writer.writerow(HISTOGRAM_HEADER)
            for runtime, total, failed in zip(
                trace.runtimes_ns, trace.counts, trace.failed_counts
            ):
                writer.writerow([int(runtime), int(total), int(failed)])


def write_metadata(metadata: TraceMetadata, path: str | Path) -> None:
    payload = {
        "distance": metadata.distance,
        "physical_error_rate": metadata.physical_error_rate,
        "shots": metadata.shots,
        "sec_cycle_ns": metadata.sec_cycle_ns,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
