import json

import numpy as np
import pytest

from stopcost import (
    ConfigError,
    RuntimeTrace,
    TraceIntegrityError,
    TraceMetadata,
    TraceParseError,
    build_distribution,
    parse_trace,
)

META = {"distance": 5, "physical_error_rate": 1e-3, "shots": 3, "sec_cycle_ns": 1000}


def write_inputs(tmp_path, csv_text, meta=META):
    trace_path = tmp_path / "trace.csv"
    trace_path.write_text(csv_text)
    meta_path = tmp_path / "trace.json"
    meta_path.write_text(json.dumps(meta))
    return trace_path, meta_path


def test_parse_per_shot(tmp_path):
    trace_path, meta_path = write_inputs(
        tmp_path, "runtime_ns,failed\n500,0\n700,1\n500,0\n"
    )
    trace = parse_trace(trace_path, meta_path)
    assert trace.record_count == 3
    assert trace.failure_count == 1
    assert list(trace.runtimes_ns) == [500, 700]
    assert list(trace.counts) == [2, 1]


def test_parse_histogram_matches_per_shot(tmp_path):
    per_shot, meta_path = write_inputs(
        tmp_path, "runtime_ns,failed\n500,0\n700,1\n500,0\n"
    )
    hist_path = tmp_path / "hist.csv"
    hist_path.write_text("runtime_ns,count_total,count_failed\n500,2,0\n700,1,1\n")
    assert parse_trace(hist_path, meta_path) == parse_trace(per_shot, meta_path)


def test_parse_histogram_merges_unsorted_duplicates(tmp_path):
    meta = dict(META, shots=5)
    trace_path, meta_path = write_inputs(
        tmp_path,
        "runtime_ns,count_total,count_failed\n# comment row\n700,1,1\n500,2,0\n500,2,1\n",
        meta,
    )
    trace = parse_trace(trace_path, meta_path)
    assert list(trace.runtimes_ns) == [500, 700]
    assert list(trace.counts) == [4, 1]
    assert list(trace.failed_counts) == [1, 1]


def test_parse_histogram_drops_zero_count_rows(tmp_path):
    trace_path, meta_path = write_inputs(
        tmp_path, "runtime_ns,count_total,count_failed\n400,0,0\n500,3,1\n"
    )
    trace = parse_trace(trace_path, meta_path)
    assert list(trace.runtimes_ns) == [500]


def test_parse_shot_count_mismatch(tmp_path):
    trace_path, meta_path = write_inputs(
        tmp_path, "runtime_ns,failed\n500,0\n700,1\n500,0\n", dict(META, shots=4)
    )
    with pytest.raises(TraceIntegrityError):
        parse_trace(trace_path, meta_path)


def test_parse_malformed_row_names_line(tmp_path):
    trace_path, meta_path = write_inputs(
        tmp_path, "runtime_ns,failed\n500,0\nnot-a-number,1\n500,0\n"
    )
    with pytest.raises(TraceParseError, match="line 3"):
        parse_trace(trace_path, meta_path)


def test_parse_bad_failed_flag(tmp_path):
    trace_path, meta_path = write_inputs(tmp_path, "runtime_ns,failed\n500,2\n")
    with pytest.raises(TraceParseError, match="line 2"):
        parse_trace(trace_path, meta_path)


def test_parse_unknown_header(tmp_path):
    trace_path, meta_path = write_inputs(tmp_path, "runtime,fail\n500,0\n")
    with pytest.raises(TraceParseError, match="header"):
        parse_trace(trace_path, meta_path)


def test_missing_metadata_field(tmp_path):
    trace_path = tmp_path / "trace.csv"
    trace_path.write_text("runtime_ns,failed\n500,0\n")
    meta_path = tmp_path / "trace.json"
    meta_path.write_text(json.dumps({"distance": 5, "shots": 1}))
    with pytest.raises(ConfigError, match="physical_error_rate"):
        parse_trace(trace_path, meta_path)


def test_metadata_overrides_fill_gaps(tmp_path):
    trace_path = tmp_path / "trace.csv"
    trace_path.write_text("runtime_ns,failed\n500,0\n")
    trace = parse_trace(
        trace_path,
        None,
        {"distance": 3, "physical_error_rate": 1e-3, "shots": 1, "sec_cycle_ns": 1000},
    )
    assert trace.metadata.distance == 3


@pytest.mark.parametrize(
    "field,value",
    [
        ("distance", 4),
        ("distance", 1),
        ("physical_error_rate", 0.0),
        ("physical_error_rate", 1.0),
        ("shots", 0),
        ("sec_cycle_ns", 0),
    ],
)
def test_metadata_invariants(field, value):
    kwargs = dict(distance=5, physical_error_rate=1e-3, shots=10, sec_cycle_ns=1000)
    kwargs[field] = value
    with pytest.raises(ValueError):
        TraceMetadata(**kwargs)


def make_trace(records, **meta_overrides):
    meta = dict(
        distance=5, physical_error_rate=1e-3, shots=len(records), sec_cycle_ns=1000
    )
    meta.update(meta_overrides)
    return RuntimeTrace.from_records(TraceMetadata(**meta), records)


def test_build_distribution_hand_counts():
    dist = build_distribution(make_trace([(5, False), (5, True), (9, False)]))
    assert dist.points() == [(5, 2, 1), (9, 3, 1)]
    assert dist.max_runtime_ns == 9


def test_build_distribution_singleton():
    dist = build_distribution(make_trace([(0, False)]))
    assert dist.points() == [(0, 1, 0)]
    assert dist.max_runtime_ns == 0


def test_empty_trace_rejected():
    meta = TraceMetadata(distance=5, physical_error_rate=1e-3, shots=1, sec_cycle_ns=1000)
    with pytest.raises(ValueError):
        RuntimeTrace(meta, np.array([]), np.array([]), np.array([]))


def test_survival_hand_counts():
    dist = build_distribution(make_trace([(5, False), (5, True), (9, False)]))
    assert dist.survival(5) == 1 / 3
    assert dist.survival(9) == 0.0
    assert dist.survival(10) == 0.0
    assert dist.survival(4) == 1.0
    with pytest.raises(ValueError):
        dist.survival(-1)


def test_percentile_hand_counts():
    dist = build_distribution(make_trace([(5, False), (5, True), (9, False)]))
    assert dist.percentile(1.0) == 9
    assert dist.percentile(0.99) == 9
    assert dist.percentile(0.0) == 5
    assert dist.percentile(0.5) == 5
    with pytest.raises(ValueError):
        dist.percentile(1.5)
    with pytest.raises(ValueError):
        dist.percentile(-0.1)


def random_trace(rng, max_runtime=200, max_shots=400):
    shots = int(rng.integers(1, max_shots))
    runtimes = rng.integers(1, max_runtime, size=shots)
    failed = rng.random(shots) < rng.random() * 0.5
    return make_trace(list(zip(runtimes.tolist(), failed.tolist())))


def test_survival_properties_random_traces():
    rng = np.random.default_rng(7)
    for _ in range(50):
        dist = build_distribution(random_trace(rng))
        grid = [0, *dist.runtimes_ns.tolist(), dist.max_runtime_ns + 5]
        values = [dist.survival(m) for m in grid]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert dist.survival(dist.max_runtime_ns) == 0.0
        if dist.min_runtime_ns > 0:
            assert dist.survival(dist.min_runtime_ns - 1) == 1.0


def test_percentile_properties_random_traces():
    rng = np.random.default_rng(11)
    for _ in range(50):
        dist = build_distribution(random_trace(rng))
        qs = np.linspace(0, 1, 23)
        values = [dist.percentile(q) for q in qs]
        assert all(a <= b for a, b in zip(values, values[1:]))
        for t in dist.runtimes_ns.tolist():
            q = dist.count_at_or_below(t) / dist.shots
            assert dist.percentile(q) <= t


def test_single_shot_std_is_zero_with_warning():
    dist = build_distribution(make_trace([(500, False)]))
    with pytest.warns(UserWarning, match="degenerate"):
        assert dist.std_ns() == 0.0


def test_count_conservation_random_traces():
    rng = np.random.default_rng(13)
    for _ in range(20):
        trace = random_trace(rng)
        dist = build_distribution(trace)
        assert int(dist.counts().sum()) == trace.metadata.shots
        assert int(dist.cum_total[-1]) == trace.metadata.shots
