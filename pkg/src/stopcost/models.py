"""Failure-rate and runtime models for surface code decoders.

Failure models give the decoding failure rate of the *uninterrupted*
decoder as a function of code distance and physical error rate.  Runtime
models describe how long a single decoding call takes; the binomial law
is parameterized by the number of Bernoulli steps (which is also the
worst-case runtime in units) and a per-step probability, so mean and
maximum runtime can be dialed independently.

All model evaluations are pure.  The synthetic trace sampler partitions
shots into fixed-size chunks, each driven by its own (seed, chunk-index)
substream, so chunked or parallel generation reproduces the serial
output record for record.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConfigError
from .trace import (
    EmpiricalRuntimeDistribution,
    RuntimeTrace,
    TraceMetadata,
    build_distribution,
    parse_trace,
)

HEURISTIC_VALIDITY_P = 1e-2

# Shots per sampling substream; parallel generation must use the same value.
SAMPLE_CHUNK_SHOTS = 1 << 20


def _validate_distance(d: int) -> None:
    if d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be an odd integer >= 3, got {d}")


def _validate_probability(p: float, name: str) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must be in (0, 1), got {p}")


# ---------------------------------------------------------------------------
# Failure models


@dataclass(frozen=True)
class HeuristicFailure:
    """Below-threshold failure-rate heuristic for matching decoders.

    rate = prefactor * (p / threshold) ** ((d + 1) / 2).

    The defaults reproduce the standard minimum-weight-matching heuristic
    with threshold 1e-2.  The heuristic is only trusted for p below the
    threshold; evaluating at p >= 1e-2 warns but does not fail.
    """

    prefactor: float = 0.1
    threshold: float = 0.01

    def __post_init__(self):
        if self.prefactor <= 0 or self.threshold <= 0:
            raise ValueError("prefactor and threshold must be positive")

    def rate(self, d: int, p: float) -> float:
        _validate_distance(d)
        _validate_probability(p, "p")
        if p >= HEURISTIC_VALIDITY_P:
            warnings.warn(
                f"heuristic failure rate evaluated at p={p}, at or above its "
                f"validity threshold {HEURISTIC_VALIDITY_P}",
                stacklevel=2,
            )
        return min(1.0, self.prefactor * (p / self.threshold) ** ((d + 1) // 2))


# Fitted rate of a software matching decoder at p = 1e-3, measured with an
# uninterrupted decoder: 0.04 * (0.1) ** ((d + 1) / 2).
FITTED_MATCHING_FAILURE = HeuristicFailure(prefactor=0.04)


@dataclass(frozen=True)
class AccuracyScaledFailure:
    """Failure rate of a decoder with relative accuracy alpha in (0, 1].

    A decoder of accuracy alpha fails at base_rate / alpha; alpha = 1
    recovers the base model exactly.
    """

    base: "FailureModel"
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"accuracy must be in (0, 1], got {self.alpha}")

    def rate(self, d: int, p: float) -> float:
        return min(1.0, self.base.rate(d, p) / self.alpha)


@dataclass(frozen=True)
class EmpiricalFailure:
    """Directly measured failure rate with its supporting event count."""

    failure_rate: float
    failure_events: int = 0

    def __post_init__(self):
        if not 0.0 <= self.failure_rate <= 1.0:
            raise ValueError(f"failure rate must be in [0, 1], got {self.failure_rate}")
        if self.failure_events < 0:
            raise ValueError("failure_events must be >= 0")

    def rate(self, d: int, p: float) -> float:
        _validate_distance(d)
        _validate_probability(p, "p")
        return self.failure_rate


FailureModel = Union[HeuristicFailure, AccuracyScaledFailure, EmpiricalFailure]


def failure_rate(model: FailureModel, d: int, p: float) -> float:
    """Failure rate of the uninterrupted decoder at distance d and noise p."""
    return model.rate(d, p)


# ---------------------------------------------------------------------------
# Binomial survival


_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _stirlerr(n: float) -> float:
    # log(n!) - log(sqrt(2 pi n) (n/e)^n), via the asymptotic series for
    # large n.  Direct lgamma differences lose ~6 digits once lgamma(n)
    # reaches 1e10 (n ~ 1e9), which is why the pmf anchor below is built
    # from saddle-point pieces instead.
    if n <= 15:
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - _LOG_SQRT_TWO_PI
    nn = n * n
    if n > 500:
        return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / nn) / nn) / n
    if n > 80:
        return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / 1680.0 / nn) / nn) / nn) / n
    return (
        1.0 / 12.0
        - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / 1188.0 / nn) / nn) / nn) / nn
    ) / n


def _bd0(x: float, mean: float) -> float:
    # Binomial deviance x*log(x/mean) + mean - x, evaluated by series when
    # x is close to mean to avoid cancellation.
    if abs(x - mean) < 0.1 * (x + mean):
        v = (x - mean) / (x + mean)
        s = (x - mean) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / mean) + mean - x


def _log_pmf(n: int, q: float, t: int) -> float:
    # Saddle-point form of log C(n, t) q^t (1-q)^(n-t); accurate to a few
    # ulps for n up to 1e9 and beyond.
    if t == 0:
        return n * math.log1p(-q)
    if t == n:
        return n * math.log(q)
    lc = (
        _stirlerr(n)
        - _stirlerr(t)
        - _stirlerr(n - t)
        - _bd0(t, n * q)
        - _bd0(n - t, n * (1.0 - q))
    )
    return lc + 0.5 * math.log(n / (2.0 * math.pi * t * (n - t)))


def _upper_tail(n: int, q: float, m: int) -> float:
    # Sum pmf(t) for t in (m, n], moving away from the mode.  Terms decay
    # geometrically past the mode, so stopping once a term drops below
    # 1e-16 of the accumulated sum bounds the relative error near 1e-10.
    t = m + 1
    term = math.exp(_log_pmf(n, q, t))
    if term == 0.0:
        # Leading term underflowed; the whole tail is below ~1e-300.
        return 0.0
    total = term
    while t < n:
        term *= (n - t) * q / ((t + 1) * (1.0 - q))
        t += 1
        total += term
        if term <= total * 1e-16:
            break
    return min(total, 1.0)


def _lower_tail(n: int, q: float, m: int) -> float:
    # Sum pmf(t) for t in [0, m], moving downward from m (m below the mode,
    # so terms decay).
    term = math.exp(_log_pmf(n, q, m))
    total = term
    t = m
    while t > 0:
        term *= t * (1.0 - q) / ((n - t + 1) * q)
        t -= 1
        total += term
        if term <= total * 1e-16:
            break
    return min(total, 1.0)


def binomial_survival(trials: int, step_probability: float, threshold: int) -> float:
    """P(T > threshold) for T ~ Binomial(trials, step_probability).

    Computed by summing probability-mass terms outward from the mode via
    recurrence ratios, which stays accurate (relative error ~1e-10) and
    overflow-free even for trials around 1e9 with small means.  A negative
    threshold returns the full mass, 1.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    _validate_probability(step_probability, "step probability")
    if threshold < 0:
        return 1.0
    if threshold >= trials:
        return 0.0
    mode = min(trials, int((trials + 1) * step_probability))
    if threshold >= mode:
        return _upper_tail(trials, step_probability, threshold)
    return max(0.0, 1.0 - _lower_tail(trials, step_probability, threshold))


# ---------------------------------------------------------------------------
# Runtime models


@dataclass(frozen=True)
class BinomialRuntime:
    """Runtime of ``trials`` Bernoulli steps, each taking ``unit_ns``.

    Mean runtime is trials * step_probability units; the worst case is
    exactly ``trials`` units.
    """

    trials: int
    step_probability: float
    unit_ns: int = 1000

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        _validate_probability(self.step_probability, "step probability")
        if self.unit_ns < 1:
            raise ValueError(f"unit_ns must be >= 1, got {self.unit_ns}")

    @property
    def mean_ns(self) -> float:
        return self.trials * self.step_probability * self.unit_ns

    @property
    def max_runtime_ns(self) -> int:
        return self.trials * self.unit_ns

    def survival(self, stopping_time_ns: int) -> float:
        units = stopping_time_ns // self.unit_ns  # completed units within budget
        return binomial_survival(self.trials, self.step_probability, int(units))

    def sample_ns(self, rng: np.random.Generator, n: int) -> np.ndarray:
        draws = rng.binomial(self.trials, self.step_probability, size=n)
        return draws.astype(np.int64) * self.unit_ns


@dataclass(frozen=True)
class InstantaneousRuntime:
    """Zero-delay decoder: the runtime is identically 0."""

    @property
    def mean_ns(self) -> float:
        return 0.0

    @property
    def max_runtime_ns(self) -> int:
        return 0

    def survival(self, stopping_time_ns: int) -> float:
        if stopping_time_ns < 0:
            return 1.0
        return 0.0

    def sample_ns(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.zeros(n, dtype=np.int64)


@dataclass(frozen=True)
class EmpiricalRuntime:
    """Runtime distribution backed by a measured trace."""

    distribution: EmpiricalRuntimeDistribution

    @property
    def mean_ns(self) -> float:
        return self.distribution.mean_ns()

    @property
    def max_runtime_ns(self) -> int:
        return self.distribution.max_runtime_ns

    def survival(self, stopping_time_ns: int) -> float:
        return self.distribution.survival(stopping_time_ns)

    def sample_ns(self, rng: np.random.Generator, n: int) -> np.ndarray:
        dist = self.distribution
        weights = dist.counts().astype(float)
        weights /= weights.sum()
        return rng.choice(dist.runtimes_ns, size=n, p=weights).astype(np.int64)


RuntimeModel = Union[BinomialRuntime, InstantaneousRuntime, EmpiricalRuntime]


@dataclass(frozen=True)
class DecoderModel:
    """A named decoder: a runtime law plus a failure-rate law."""

    name: str
    runtime: RuntimeModel
    failure: FailureModel


def make_reference_decoders(d: int, p: float) -> tuple[DecoderModel, DecoderModel]:
    """Reference quadratic-time and linear-time decoder models.

    The quadratic-time decoder has mean runtime p * d**3 us, worst case
    d**6 us, and the standard heuristic failure rate.  The linear-time
    decoder is four times faster on average with worst case 0.25 * d**3 us
    but fails 4/3 as often (accuracy 3/4).  The linear step count is
    rounded to the nearest integer and the step probability re-derived so
    the mean is preserved exactly.
    """
    _validate_distance(d)
    _validate_probability(p, "p")
    quadratic = DecoderModel(
        name="quadratic",
        runtime=BinomialRuntime(trials=d**6, step_probability=p / d**3, unit_ns=1000),
        failure=HeuristicFailure(),
    )
    linear_trials = round(0.25 * d**3)
    linear_q = 0.25 * p * d**3 / linear_trials
    if not 0.0 < linear_q < 1.0:
        raise ValueError(
            f"linear decoder step probability {linear_q} falls outside (0, 1)"
        )
    linear = DecoderModel(
        name="linear",
        runtime=BinomialRuntime(
            trials=linear_trials, step_probability=linear_q, unit_ns=1000
        ),
        failure=AccuracyScaledFailure(base=HeuristicFailure(), alpha=0.75),
    )
    return quadratic, linear


# ---------------------------------------------------------------------------
# Synthetic trace sampling


def _sample_chunk(
    runtime: RuntimeModel,
    rate: float,
    n: int,
    seed: int,
    chunk_index: int,
) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_index,)))
    runtimes = runtime.sample_ns(rng, n)
    failed = rng.random(n) < rate
    return runtimes, failed


def sample_trace(
    runtime: RuntimeModel,
    failure: FailureModel,
    d: int,
    p: float,
    shots: int,
    seed: int,
    sec_cycle_ns: int = 1000,
) -> RuntimeTrace:
    """Draw a synthetic trace: runtimes from the runtime model, failure
    flags as independent Bernoulli draws at the model failure rate.

    Deterministic for a given seed.  Runtime and failure are sampled
    independently; no joint model is assumed.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rate = failure.rate(d, p)
    totals: dict[int, list[int]] = {}
    for chunk_index, start in enumerate(range(0, shots, SAMPLE_CHUNK_SHOTS)):
        n = min(SAMPLE_CHUNK_SHOTS, shots - start)
        runtimes, failed = _sample_chunk(runtime, rate, n, seed, chunk_index)
        distinct, inverse = np.unique(runtimes, return_inverse=True)
        counts = np.bincount(inverse, minlength=distinct.size)
        fails = np.bincount(inverse, weights=failed, minlength=distinct.size)
        for r, c, f in zip(distinct, counts, fails):
            entry = totals.setdefault(int(r), [0, 0])
            entry[0] += int(c)
            entry[1] += int(f)
    metadata = TraceMetadata(
        distance=d, physical_error_rate=p, shots=shots, sec_cycle_ns=sec_cycle_ns
    )
    runtimes_arr = np.array(sorted(totals), dtype=np.int64)
    counts_arr = np.array([totals[r][0] for r in runtimes_arr], dtype=np.int64)
    failed_arr = np.array([totals[r][1] for r in runtimes_arr], dtype=np.int64)
    return RuntimeTrace(metadata, runtimes_arr, counts_arr, failed_arr)


# ---------------------------------------------------------------------------
# Decoder config files


def _failure_from_config(cfg: dict) -> FailureModel:
    kind = cfg.get("kind")
    if kind == "heuristic":
        scale = float(cfg.get("B", 100.0))
        if scale <= 0:
            raise ConfigError(f"heuristic B must be positive, got {scale}")
        return HeuristicFailure(
            prefactor=float(cfg.get("A", 0.1)), threshold=1.0 / scale
        )
    if kind == "accuracy":
        if "alpha" not in cfg:
            raise ConfigError("accuracy failure model requires 'alpha'")
        return AccuracyScaledFailure(base=HeuristicFailure(), alpha=float(cfg["alpha"]))
    if kind == "empirical":
        if "rate" not in cfg:
            raise ConfigError("empirical failure model requires 'rate'")
        return EmpiricalFailure(
            failure_rate=float(cfg["rate"]), failure_events=int(cfg.get("events", 0))
        )
    raise ConfigError(f"unknown failure model kind {kind!r}")


def _runtime_from_config(cfg: dict, base_dir: Path) -> RuntimeModel:
    kind = cfg.get("kind")
    if kind == "binomial":
        for key in ("N", "Q"):
            if key not in cfg:
                raise ConfigError(f"binomial runtime model requires {key!r}")
        return BinomialRuntime(
            trials=int(cfg["N"]),
            step_probability=float(cfg["Q"]),
            unit_ns=int(cfg.get("unit_ns", 1000)),
        )
    if kind == "instantaneous":
        return InstantaneousRuntime()
    if kind == "empirical":
        if "trace" not in cfg:
            raise ConfigError("empirical runtime model requires 'trace'")
        trace_path = base_dir / cfg["trace"]
        if "meta" in cfg:
            meta_path = base_dir / cfg["meta"]
        else:
            meta_path = trace_path.with_suffix(".json")
        trace = parse_trace(trace_path, meta_path)
        return EmpiricalRuntime(build_distribution(trace))
    raise ConfigError(f"unknown runtime model kind {kind!r}")


def load_decoder_config(path: str | Path) -> DecoderModel:
    """Load a decoder model from its JSON description.

    Relative trace paths inside the config resolve against the config
    file's directory; the metadata sidecar defaults to the trace path with
    a ``.json`` suffix.
    """
    path = Path(path)
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid decoder config JSON in {path}: {exc}") from exc
    for key in ("runtime", "failure"):
        if key not in cfg:
            raise ConfigError(f"decoder config missing {key!r} section")
    return DecoderModel(
        name=str(cfg.get("name", path.stem)),
        runtime=_runtime_from_config(cfg["runtime"], path.parent),
        failure=_failure_from_config(cfg["failure"]),
    )
