"""Spacetime cost of a decoder and its minimization over (d, M).

The spacetime cost of running an n_T-deep logical workload is the two
d x d surface-code patches of the T-injection circuit times the SEC depth:
2 * d**2 * sec_depth.  A (distance, stopping time) pair is only feasible
when the decoder's range at that point covers n_T; infeasible points cost
infinity.

Stopping-time candidates depend on how the decoder is described:

* trace-backed decoders use their significant observed stopping times and
  the exact interrupted failure rate ("exact");
* analytic runtime models use the survival quantiles 1 - 10**-k for
  k = 1..16 plus the uninterrupted maximum, with the additive bound
  p_fail + P(t > M) as the rate ("upper_bound").

Feasible costs are exact integers (qubit * SEC cycles); infeasible points
are float('inf').
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .models import (
    BinomialRuntime,
    DecoderModel,
    EmpiricalRuntime,
    InstantaneousRuntime,
    binomial_survival,
)
from .ranges import GateSchedule, decoder_range, sec_depth
from .stopping import interrupted_failure_exact, significant_stopping_times

QUANTILE_TAIL_EXPONENTS = range(1, 17)

DecoderFactory = Callable[[int], Union[DecoderModel, None]]


@dataclass(frozen=True)
class CostPoint:
    """Spacetime cost of one (distance, stopping time) choice."""

    distance: int
    stopping_time_ns: int
    n_T: int
    cost: int | float  # exact integer when feasible, inf otherwise
    range_at_point: int

    @property
    def feasible(self) -> bool:
        return not math.isinf(self.cost)


@dataclass(frozen=True)
class StoppingCandidate:
    """A stopping time with its interrupted failure rate and range."""

    stopping_time_ns: int
    failure_rate: float
    range_n_T: int
    rate_method: str  # "exact" or "upper_bound"


@dataclass(frozen=True)
class MinCostResult:
    """Minimum spacetime cost and the (d, M) pair achieving it."""

    cost: int | float
    distance: int | None
    stopping_time_ns: int | None
    rate_method: str | None = None

    @property
    def feasible(self) -> bool:
        return not (isinstance(self.cost, float) and math.isinf(self.cost))


@dataclass(frozen=True)
class CompareRow:
    n_T: int
    cost_a: int | float
    cost_b: int | float
    ratio: float


def spacetime_cost(
    n_T: int,
    d: int,
    stopping_time_ns: int,
    range_at_point: int,
    t_sec_ns: int = 1000,
    schedule: GateSchedule = GateSchedule(),
) -> CostPoint:
    """2 d**2 patches times SEC depth, or infinity when out of range."""
    if n_T < 1:
        raise ValueError(f"n_T must be >= 1, got {n_T}")
    if range_at_point < n_T:
        cost: int | float = math.inf
    else:
        cost = 2 * d * d * sec_depth(n_T, d, stopping_time_ns, t_sec_ns, schedule)
    return CostPoint(
        distance=d,
        stopping_time_ns=int(stopping_time_ns),
        n_T=n_T,
        cost=cost,
        range_at_point=range_at_point,
    )


def _binomial_quantile_units(runtime: BinomialRuntime) -> list[int]:
    # Smallest M with P(T > M) <= 10**-k for each k, walking upward from
    # the distribution mode.  Linear in the tail width, which suits the
    # small-mean runtime laws used here; the uninterrupted maximum is
    # always appended.
    n, q = runtime.trials, runtime.step_probability
    targets = [10.0**-k for k in QUANTILE_TAIL_EXPONENTS]
    units: list[int] = []
    m = min(n, int((n + 1) * q))
    for target in targets:
        while m < n and binomial_survival(n, q, m) > target:
            m += 1
        units.append(m)
    units.append(n)
    return sorted(set(units))


def stopping_candidates(
    decoder: DecoderModel,
    d: int,
    p: float,
    epsilon: float,
    t_sec_ns: int = 1000,
    schedule: GateSchedule = GateSchedule(),
    min_events: int = 20,
) -> list[StoppingCandidate]:
    """Stopping-time candidates for one decoder at one code distance.

    Candidates come back sorted by stopping time, each carrying the
    failure rate of the interrupted decoder and the resulting range.
    """
    runtime = decoder.runtime
    points: list[tuple[int, float, str]] = []
    if isinstance(runtime, EmpiricalRuntime):
        dist = runtime.distribution
        for m in significant_stopping_times(dist, min_events):
            stats = interrupted_failure_exact(dist, m)
            points.append((m, stats.exact_failure_rate, "exact"))
    elif isinstance(runtime, BinomialRuntime):
        base = decoder.failure.rate(d, p)
        for units in _binomial_quantile_units(runtime):
            m_ns = units * runtime.unit_ns
            rate = min(1.0, base + runtime.survival(m_ns))
            points.append((m_ns, rate, "upper_bound"))
    elif isinstance(runtime, InstantaneousRuntime):
        points.append((0, min(1.0, decoder.failure.rate(d, p)), "upper_bound"))
    else:
        raise TypeError(f"unsupported runtime model {type(runtime).__name__}")
    return [
        StoppingCandidate(
            stopping_time_ns=m,
            failure_rate=rate,
            range_n_T=decoder_range(
                d, m, rate, epsilon, t_sec_ns=t_sec_ns, schedule=schedule
            ).n_T,
            rate_method=method,
        )
        for m, rate, method in points
    ]


def _candidate_table(
    decoder: DecoderModel | DecoderFactory,
    p: float,
    d_candidates: Sequence[int],
    epsilon: float,
    t_sec_ns: int,
    schedule: GateSchedule,
    min_events: int,
) -> list[tuple[int, StoppingCandidate]]:
    factory: DecoderFactory
    if isinstance(decoder, DecoderModel):
        factory = lambda _d: decoder  # noqa: E731 - constant family
    else:
        factory = decoder
    table: list[tuple[int, StoppingCandidate]] = []
    for d in sorted(set(d_candidates)):
        model = factory(d)
        if model is None:
            continue
        for cand in stopping_candidates(
            model, d, p, epsilon, t_sec_ns, schedule, min_events
        ):
            table.append((d, cand))
    return table


def _min_cost_over_table(
    table: list[tuple[int, StoppingCandidate]],
    n_T: int,
    t_sec_ns: int,
    schedule: GateSchedule,
) -> MinCostResult:
    best: MinCostResult | None = None
    # Table is (d, M)-ordered, so keeping strict improvements only breaks
    # ties toward smaller d, then smaller M.
    for d, cand in table:
        if cand.range_n_T < n_T:
            continue
        cost = 2 * d * d * sec_depth(n_T, d, cand.stopping_time_ns, t_sec_ns, schedule)
        if best is None or cost < best.cost:
            best = MinCostResult(
                cost=cost,
                distance=d,
                stopping_time_ns=cand.stopping_time_ns,
                rate_method=cand.rate_method,
            )
    if best is None:
        return MinCostResult(cost=math.inf, distance=None, stopping_time_ns=None)
    return best


def min_spacetime_cost(
    decoder: DecoderModel | DecoderFactory,
    p: float,
    n_T: int,
    d_candidates: Sequence[int],
    epsilon: float,
    t_sec_ns: int = 1000,
    schedule: GateSchedule = GateSchedule(),
    min_events: int = 20,
) -> MinCostResult:
    """Minimum spacetime cost over all candidate (distance, stopping time)
    pairs, ties broken toward smaller d then smaller M.

    ``decoder`` is either a fixed model (used at every distance) or a
    factory mapping a distance to a model, returning None to skip
    distances it cannot describe (e.g. a trace measured at a single d).
    """
    if not d_candidates:
        raise ValueError("d_candidates must be nonempty")
    if n_T < 1:
        raise ValueError(f"n_T must be >= 1, got {n_T}")
    table = _candidate_table(
        decoder, p, d_candidates, epsilon, t_sec_ns, schedule, min_events
    )
    return _min_cost_over_table(table, n_T, t_sec_ns, schedule)


def compare_decoders(
    decoder_a: DecoderModel | DecoderFactory,
    decoder_b: DecoderModel | DecoderFactory,
    p: float,
    n_T_grid: Iterable[int],
    d_candidates: Sequence[int],
    epsilon: float,
    t_sec_ns: int = 1000,
    schedule: GateSchedule = GateSchedule(),
    min_events: int = 20,
) -> list[CompareRow]:
    """Minimum spacetime costs of two decoders across a workload grid.

    The ratio column is cost_a / cost_b, or infinity whenever either side
    is infeasible at that workload.
    """
    n_T_values = sorted(set(int(n) for n in n_T_grid))
    if not n_T_values:
        raise ValueError("n_T grid must be nonempty")
    table_a = _candidate_table(
        decoder_a, p, d_candidates, epsilon, t_sec_ns, schedule, min_events
    )
    table_b = _candidate_table(
        decoder_b, p, d_candidates, epsilon, t_sec_ns, schedule, min_events
    )
    rows = []
    for n_T in n_T_values:
        a = _min_cost_over_table(table_a, n_T, t_sec_ns, schedule)
        b = _min_cost_over_table(table_b, n_T, t_sec_ns, schedule)
        if a.feasible and b.feasible:
            ratio = a.cost / b.cost
        else:
            ratio = math.inf
        rows.append(CompareRow(n_T=n_T, cost_a=a.cost, cost_b=b.cost, ratio=ratio))
    return rows
