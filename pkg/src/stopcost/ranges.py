"""Logical-depth arithmetic: SEC depth, required distance, decoder range.

A logical T gate on a distance-d surface code patch costs a fixed gate
schedule (7d SEC cycles by default: H, S, the conditional S and the
logical measurement) plus the decoding delay, rounded up to whole cycles.
The range of a decoder is the largest T-depth n_T whose circuit-level
failure proxy stays below the error budget epsilon; interrupting the
decoder trades timeout failures against delay, and the range-optimized
stopping time is the interruption point maximizing that T-depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .models import FailureModel, HeuristicFailure
from .stopping import (
    TraceLike,
    _as_distribution,
    interrupted_failure_exact,
    require_significant_stopping_times,
)

RANGE_SATURATION_CAP = 10**18


@dataclass(frozen=True)
class GateSchedule:
    """Per-T-gate cycle counts, as multipliers of the code distance."""

    h_cycles: int = 2
    s_cycles: int = 2
    conditional_s_cycles: int = 2
    measure_cycles: int = 1

    def __post_init__(self):
        for name in ("h_cycles", "s_cycles", "conditional_s_cycles", "measure_cycles"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def cycles_per_gate(self, d: int) -> int:
        """SEC cycles per T gate excluding the decoding delay (7d default)."""
        return (
            self.h_cycles + self.s_cycles + self.conditional_s_cycles + self.measure_cycles
        ) * d


@dataclass(frozen=True)
class RangeResult:
    """Achievable reliable T-depth at one (distance, stopping time) point."""

    n_T: int
    stopping_time_ns: int
    failure_rate_used: float
    distance: int
    epsilon: float
    saturated: bool = False


@dataclass(frozen=True)
class RequiredDistance:
    """Smallest viable odd code distance, or None when the search failed.

    ``no_encoding_sufficient`` flags workloads short enough to run on bare
    physical qubits within the error budget (n_T < epsilon / (3p)).
    """

    distance: int | None
    no_encoding_sufficient: bool
    d_max: int


def _ceil_div(numerator: int, denominator: int) -> int:
    return -(-numerator // denominator)


def delay_cycles(delay_ns: int, t_sec_ns: int) -> int:
    """Decoding delay in whole SEC cycles (exact ceiling division)."""
    if delay_ns < 0:
        raise ValueError(f"delay must be >= 0, got {delay_ns}")
    if t_sec_ns < 1:
        raise ValueError(f"t_sec_ns must be >= 1, got {t_sec_ns}")
    return _ceil_div(int(delay_ns), int(t_sec_ns))


def sec_depth(
    n_T: int,
    d: int,
    delay_ns: int,
    t_sec_ns: int,
    schedule: GateSchedule = GateSchedule(),
) -> int:
    """Total SEC cycles to run an n_T-deep HST sequence with the given delay."""
    if n_T < 0:
        raise ValueError(f"n_T must be >= 0, got {n_T}")
    return n_T * (schedule.cycles_per_gate(d) + delay_cycles(delay_ns, t_sec_ns))


def unencoded_range(p: float, epsilon: float) -> int:
    """Reliable T-depth achievable on bare physical qubits.

    floor(epsilon / (3p)); the factor 3 counts the H, S and T of each
    compiled HST block.  Encoding is only worthwhile above this depth.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    return math.floor(epsilon / (3.0 * p))


def required_distance(
    n_T: int,
    p: float,
    delay_ns: int,
    epsilon: float,
    failure_model: FailureModel | None = None,
    schedule: GateSchedule = GateSchedule(),
    d_max: int = 99,
    t_sec_ns: int = 1000,
) -> RequiredDistance:
    """Smallest odd d in [3, d_max] keeping the circuit failure proxy below
    epsilon.

    The proxy is sec_depth(n_T, d, delay) / d * p_fail(d, p); infeasibility
    within the search bound is reported as a value, not an error.
    """
    if n_T < 1:
        raise ValueError(f"n_T must be >= 1, got {n_T}")
    if d_max < 3 or d_max % 2 == 0:
        raise ValueError(f"d_max must be an odd integer >= 3, got {d_max}")
    if failure_model is None:
        failure_model = HeuristicFailure()
    no_encoding = n_T < epsilon / (3.0 * p)
    found: int | None = None
    for d in range(3, d_max + 1, 2):
        proxy = sec_depth(n_T, d, delay_ns, t_sec_ns, schedule) / d
        if proxy * failure_model.rate(d, p) <= epsilon:
            found = d
            break
    return RequiredDistance(distance=found, no_encoding_sufficient=no_encoding, d_max=d_max)


def decoder_range(
    d: int,
    stopping_time_ns: int,
    failure_rate: float,
    epsilon: float,
    t_sec_ns: int = 1000,
    schedule: GateSchedule = GateSchedule(),
    saturation_cap: int = RANGE_SATURATION_CAP,
) -> RangeResult:
    """Largest reliable T-depth for one (distance, stopping time) point.

    n_T = floor(epsilon * d / (rate * (cycles_per_gate + delay cycles))).
    A zero rate makes the formula diverge, and a tiny rate can overflow
    useful integer ranges, so results at or above ``saturation_cap`` are
    clamped and flagged instead of silently returned.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be an odd integer >= 3, got {d}")
    if not 0.0 <= failure_rate <= 1.0:
        raise ValueError(f"failure rate must be in [0, 1], got {failure_rate}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    cycles = schedule.cycles_per_gate(d) + delay_cycles(stopping_time_ns, t_sec_ns)
    if failure_rate == 0.0:
        return RangeResult(
            n_T=saturation_cap,
            stopping_time_ns=int(stopping_time_ns),
            failure_rate_used=failure_rate,
            distance=d,
            epsilon=epsilon,
            saturated=True,
        )
    raw = epsilon * d / (failure_rate * cycles)
    saturated = raw >= saturation_cap
    n_T = saturation_cap if saturated else math.floor(raw)
    return RangeResult(
        n_T=n_T,
        stopping_time_ns=int(stopping_time_ns),
        failure_rate_used=failure_rate,
        distance=d,
        epsilon=epsilon,
        saturated=saturated,
    )


def range_optimized_stopping_time(
    data: TraceLike,
    d: int,
    epsilon: float,
    t_sec_ns: int = 1000,
    min_events: int = 20,
    schedule: GateSchedule = GateSchedule(),
) -> tuple[int, RangeResult]:
    """Stopping time maximizing the decoder range over the trace's
    significant candidates, using the exact interrupted failure rate.

    Ties break toward the smaller stopping time.  Raises
    :class:`~stopcost.errors.InfeasibleError` when no stopping time has
    enough failure events.
    """
    dist = _as_distribution(data)
    best: tuple[int, RangeResult] | None = None
    for m in require_significant_stopping_times(dist, min_events):
        stats = interrupted_failure_exact(dist, m)
        result = decoder_range(
            d,
            m,
            stats.exact_failure_rate,
            epsilon,
            t_sec_ns=t_sec_ns,
            schedule=schedule,
        )
        if best is None or result.n_T > best[1].n_T:
            best = (m, result)
    assert best is not None
    return best


def accuracy_surface(
    d: int,
    p: float,
    epsilon: float,
    alphas: list[float],
    stopping_cycles: list[int],
    schedule: GateSchedule = GateSchedule(),
    failure_model: FailureModel | None = None,
) -> list[tuple[float, int, int]]:
    """Range as a function of decoder accuracy and stopping time (in cycles).

    A decoder of accuracy alpha fails at p_fail(d, p) / alpha, so its
    range is floor(epsilon * d * alpha / (p_fail * (cycles_per_gate + M))).
    Returns (alpha, M_cycles, range) rows, alpha-major.
    """
    if not alphas or not stopping_cycles:
        raise ValueError("alpha and stopping-time grids must be nonempty")
    if failure_model is None:
        failure_model = HeuristicFailure()
    base_rate = failure_model.rate(d, p)
    gate_cycles = schedule.cycles_per_gate(d)
    rows = []
    for alpha in alphas:
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"accuracy must be in (0, 1], got {alpha}")
        for m in stopping_cycles:
            if m < 0:
                raise ValueError(f"stopping time must be >= 0 cycles, got {m}")
            value = math.floor(epsilon * d * alpha / (base_rate * (gate_cycles + m)))
            rows.append((alpha, int(m), value))
    return rows
