"""Interrupted-decoder accounting.

A decoder interrupted at stopping time M fails in two ways: it returns a
wrong correction (decode failure) or it does not terminate within M
(timeout failure).  This module computes the truncated runtime
distribution, the exact interrupted failure rate from joint
(runtime, failed) counts, and the cheap bound

    max(p_fail, P(t > M)) <= p_fail^(M) <= p_fail + P(t > M)

whose lower bound is always at least half the upper bound, making the
upper bound a factor-2 approximation.

Shots finishing exactly at M count as completed: the truncation condition
is t <= M throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import InfeasibleError
from .trace import EmpiricalRuntimeDistribution, RuntimeTrace, build_distribution

TraceLike = Union[RuntimeTrace, EmpiricalRuntimeDistribution]


@dataclass(frozen=True)
class InterruptedStats:
    """Failure accounting for a decoder interrupted at a stopping time."""

    stopping_time_ns: int
    timeout_probability: float
    decode_failure_rate: float
    exact_failure_rate: float | None
    upper_bound_rate: float
    lower_bound_rate: float
    failure_events: int


def _as_distribution(data: TraceLike) -> EmpiricalRuntimeDistribution:
    if isinstance(data, RuntimeTrace):
        return build_distribution(data)
    return data


def interrupted_distribution(
    dist: EmpiricalRuntimeDistribution, stopping_time_ns: int
) -> EmpiricalRuntimeDistribution:
    """Runtime distribution conditioned on finishing within the stopping time.

    Truncates the support to runtimes <= M and renormalizes by P(t <= M);
    because the result is again a counts-backed histogram (over the
    surviving shots), the renormalized masses sum to 1 exactly.
    """
    kept = dist.count_at_or_below(stopping_time_ns)
    if kept == 0:
        raise ValueError(
            f"all shots time out at stopping time {stopping_time_ns} ns; "
            "the conditional distribution is empty"
        )
    idx = int(np.searchsorted(dist.runtimes_ns, stopping_time_ns, side="right"))
    return EmpiricalRuntimeDistribution(
        dist.runtimes_ns[:idx],
        dist.cum_total[:idx],
        dist.cum_failed[:idx],
        kept,
    )


def interrupted_failure_exact(data: TraceLike, stopping_time_ns: int) -> InterruptedStats:
    """Exact interrupted failure rate from joint runtime/failure counts.

    Counts every shot that either times out (t > M) or completes with a
    decode failure.  This never double-counts a shot that would both time
    out and decode wrongly, unlike the additive upper bound.
    """
    dist = _as_distribution(data)
    shots = dist.shots
    timeouts = shots - dist.count_at_or_below(stopping_time_ns)
    completed_failures = dist.failed_at_or_below(stopping_time_ns)
    events = timeouts + completed_failures
    total_failures = int(dist.cum_failed[-1])
    # Each rate is a single division of integer counts: rounded division is
    # monotone, so lower <= exact <= upper survives into floats exactly.
    return InterruptedStats(
        stopping_time_ns=int(stopping_time_ns),
        timeout_probability=timeouts / shots,
        decode_failure_rate=total_failures / shots,
        exact_failure_rate=events / shots,
        upper_bound_rate=min(1.0, (total_failures + timeouts) / shots),
        lower_bound_rate=max(total_failures, timeouts) / shots,
        failure_events=events,
    )


def interrupted_failure_bound(
    decode_failure_rate: float, timeout_probability: float
) -> tuple[float, float]:
    """(upper, lower) bounds on the interrupted failure rate.

    upper = min(1, p_fail + timeout); lower = max(p_fail, timeout).
    The lower bound is always >= upper / 2.
    """
    for name, value in (
        ("decode failure rate", decode_failure_rate),
        ("timeout probability", timeout_probability),
    ):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {value}")
    upper = min(1.0, decode_failure_rate + timeout_probability)
    lower = max(decode_failure_rate, timeout_probability)
    return upper, lower


def significant_stopping_times(
    data: TraceLike,
    min_events: int = 20,
    extra_candidates: Iterable[int] = (),
) -> list[int]:
    """Candidate stopping times with enough failures to be statistically
    meaningful.

    The candidate grid is the distinct observed runtimes (between them
    every interrupted statistic is constant) plus any caller-supplied
    values; a candidate survives when its exact interrupted failure count
    is at least ``min_events``.  Returned sorted ascending.
    """
    if min_events < 1:
        raise ValueError(f"min_events must be >= 1, got {min_events}")
    dist = _as_distribution(data)
    candidates = sorted(set(int(r) for r in dist.runtimes_ns) | set(int(m) for m in extra_candidates))
    return [
        m
        for m in candidates
        if interrupted_failure_exact(dist, m).failure_events >= min_events
    ]


def require_significant_stopping_times(
    data: TraceLike,
    min_events: int = 20,
    extra_candidates: Iterable[int] = (),
) -> list[int]:
    """Like :func:`significant_stopping_times` but raising when empty."""
    times = significant_stopping_times(data, min_events, extra_candidates)
    if not times:
        raise InfeasibleError(
            f"no stopping time accumulates {min_events} failure events; "
            "collect more shots or lower --min-events"
        )
    return times
