import numpy as np
import pytest

from fuzzybns.jumplab import (
    SplitSpec,
    build_dataset,
    detect_big_jumps,
    jump_count_table,
    split,
)
from fuzzybns.levy import RngStream
from fuzzybns.market_data import to_fuzzy_series
from fuzzybns.synthetic import make_flat_bars, make_ohlc_bars


def flat_series(prices):
    return to_fuzzy_series(make_flat_bars(prices), 0.5)


def brute_force_labels(series, threshold, window, lookahead, min_jumps, stride):
    """Independent re-derivation of the windowed labels from raw expectations."""
    exp = series.expectations
    n = len(exp)
    drops = set()
    for k in range(1, n):
        if 100.0 * (exp[k - 1] - exp[k]) / exp[k - 1] >= threshold:
            drops.add(k)
    rows = []
    start = 1
    while start + window - 1 + lookahead <= n - 1:
        end = start + window - 1
        count = sum(1 for j in drops if end < j <= end + lookahead)
        rows.append((start, 1 if count >= min_jumps else 0))
        start += stride
    return rows


# ----------------------------------------------------------------- detection


def test_detect_no_events_on_flat_series():
    series = flat_series([100.0, 100.0, 100.0])
    assert detect_big_jumps(series, 0.1) == []


def test_detect_single_event_hand_enumeration():
    series = flat_series([100.0, 99.89, 99.89])
    events = detect_big_jumps(series, 0.1)
    assert len(events) == 1
    assert events[0].index == 1
    assert events[0].drop_pct == pytest.approx(0.11, abs=1e-9)


def test_detect_ignores_upward_moves():
    series = flat_series([100.0, 101.0, 103.0, 110.0])
    assert detect_big_jumps(series, 0.01) == []


def test_detect_threshold_validation():
    series = flat_series([100.0, 100.0])
    with pytest.raises(ValueError):
        detect_big_jumps(series, 0.0)
    with pytest.raises(ValueError):
        detect_big_jumps(series, -1.0)


def test_detect_monotone_in_threshold():
    bars = make_ohlc_bars(500, RngStream(51), per_bar_vol=0.003)
    series = to_fuzzy_series(bars, 0.5)
    ks = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0]
    counts = [len(detect_big_jumps(series, k)) for k in ks]
    for a, b in zip(counts, counts[1:]):
        assert a >= b
    # events at a higher threshold are a subset of those at a lower one
    low = {e.index for e in detect_big_jumps(series, 0.05)}
    high = {e.index for e in detect_big_jumps(series, 0.2)}
    assert high <= low


# --------------------------------------------------------------- count table


def test_count_table_planted_drops():
    prices = [100.0] * 30
    series_prices = list(prices)
    for idx in (5, 12, 20):
        for j in range(idx, len(series_prices)):
            series_prices[j] = series_prices[j] * (1 - 0.002)
    series = flat_series(series_prices)
    rows = jump_count_table(series, [0.1, 0.3])
    assert rows[0]["total"] == 3
    assert rows[1]["total"] == 0


def test_count_table_duplicates_and_huge_threshold():
    bars = make_ohlc_bars(200, RngStream(52))
    series = to_fuzzy_series(bars, 0.5)
    rows = jump_count_table(series, [0.05, 0.05, 50.0])
    assert rows[0]["total"] == rows[1]["total"]
    assert rows[2]["total"] == 0


def test_count_table_split_columns():
    prices = [100.0] * 40
    for idx in (5, 25):
        for j in range(idx, len(prices)):
            prices[j] *= 1 - 0.002
    series = flat_series(prices)
    spec = SplitSpec(1, 15, 16, 39)
    rows = jump_count_table(series, [0.1], [spec])
    assert rows[0]["total"] == 2
    assert rows[0]["split0"] == 2  # one event in each range


# ------------------------------------------------------------------ datasets


def test_build_dataset_boundary_single_row():
    series = flat_series([100.0] * 21)  # window + lookahead + 1
    ds = build_dataset(series, 0.1, window=10, lookahead=10, min_jumps=2)
    assert len(ds) == 1
    assert ds.row_start_indices[0] == 1
    assert ds.features.shape == (1, 10)
    assert ds.labels[0] == 0


def test_build_dataset_too_short():
    with pytest.raises(ValueError):
        build_dataset(flat_series([100.0] * 20), 0.1, 10, 10, 2)


def test_build_dataset_planted_lookahead_labels():
    # two drops inside the first row's lookahead span
    prices = [100.0] * 41
    for idx in (12, 15):
        for j in range(idx, len(prices)):
            prices[j] *= 1 - 0.005
    series = flat_series(prices)
    ds = build_dataset(series, 0.1, window=10, lookahead=10, min_jumps=2)
    assert ds.labels[0] == 1
    assert all(l == 0 for l in ds.labels[1:])


def test_build_dataset_min_jumps_one_flips_label():
    prices = [100.0] * 41
    for j in range(15, len(prices)):
        prices[j] *= 1 - 0.005
    series = flat_series(prices)
    ds2 = build_dataset(series, 0.1, 10, 10, min_jumps=2)
    ds1 = build_dataset(series, 0.1, 10, 10, min_jumps=1)
    assert ds2.labels[0] == 0
    assert ds1.labels[0] == 1


def test_build_dataset_features_are_window_pct_changes():
    gen = np.random.default_rng(53)
    prices = 100.0 * np.exp(np.cumsum(gen.normal(0, 0.002, 60)))
    series = flat_series(prices)
    ds = build_dataset(series, 0.1, 10, 10, 2)
    # row r covers bars [1 + r*W, (r+1)*W]
    for r, start in enumerate(ds.row_start_indices):
        assert start == 1 + r * 10
        expected = series.pct_changes[start - 1 : start + 9]
        assert np.array_equal(ds.features[r], expected)


def test_build_dataset_sliding_mode():
    # starts run while start + W - 1 + L <= n_bars - 1, i.e. start <= 20 here
    series = flat_series([100.0] * 40)
    ds = build_dataset(series, 0.1, 10, 10, 2, stride=1)
    assert np.array_equal(ds.row_start_indices, np.arange(1, 21))


def test_labels_match_brute_force_on_random_series():
    rng = RngStream(54)
    gen = np.random.default_rng(55)
    for i in range(50):
        n = int(gen.integers(25, 90))
        bars = make_ohlc_bars(n, rng.derive(i), per_bar_vol=0.004)
        series = to_fuzzy_series(bars, 0.5)
        stride = int(gen.integers(1, 11))
        ds = build_dataset(series, 0.2, 10, 10, 2, stride=stride)
        expected = brute_force_labels(series, 0.2, 10, 10, 2, stride)
        assert [(int(s), int(l)) for s, l in zip(ds.row_start_indices, ds.labels)] == expected


def test_dataset_determinism():
    bars = make_ohlc_bars(300, RngStream(56), per_bar_vol=0.003)
    series = to_fuzzy_series(bars, 0.5)
    d1 = build_dataset(series, 0.1, 10, 10, 2)
    d2 = build_dataset(series, 0.1, 10, 10, 2)
    assert np.array_equal(d1.features, d2.features)
    assert np.array_equal(d1.labels, d2.labels)
    import io

    b1, b2 = io.StringIO(), io.StringIO()
    d1.write_csv(b1)
    d2.write_csv(b2)
    assert b1.getvalue() == b2.getvalue()


# -------------------------------------------------------------------- splits


def test_split_all_train():
    series = flat_series([100.0] * 60)
    ds = build_dataset(series, 0.1, 10, 10, 2)
    spec = SplitSpec(1, 50, 51, 59)
    train, test = split(ds, spec)
    assert len(train) + len(test) <= len(ds)
    spec_all = SplitSpec(1, 55, 56, 59)
    train, test = split(ds, spec_all)
    assert len(test) == 0


def test_split_t2_style_ranges():
    # index ranges in the style of a contiguous train/test day pair
    bars = make_ohlc_bars(1200, RngStream(57), per_bar_vol=0.003)
    series = to_fuzzy_series(bars, 0.5)
    ds = build_dataset(series, 0.1, 10, 10, 2)
    spec = SplitSpec(357, 902, 903, 1175)
    train, test = split(ds, spec)
    train_set = set(train.row_start_indices)
    test_set = set(test.row_start_indices)
    assert train_set.isdisjoint(test_set)
    assert train_set | test_set <= set(ds.row_start_indices)
    # no-leakage invariant
    assert max(train.row_start_indices) + ds.window <= min(test.row_start_indices)
    # windows fully inside their ranges
    assert all(s >= 357 and s + 9 <= 902 for s in train.row_start_indices)
    assert all(s >= 903 and s + 9 <= 1175 for s in test.row_start_indices)


def test_split_drops_straddling_rows():
    series = flat_series([100.0] * 60)
    ds = build_dataset(series, 0.1, 10, 10, 2)  # rows start at 1, 11, 21, 31
    # boundary at 15 cuts the row starting at 11
    spec = SplitSpec(1, 15, 16, 59)
    train, test = split(ds, spec)
    assert 11 not in train.row_start_indices
    assert 11 not in test.row_start_indices


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(10, 5, 20, 30)
    with pytest.raises(ValueError):
        SplitSpec(1, 20, 15, 30)  # overlapping
    with pytest.raises(ValueError):
        SplitSpec(1, 20, 30, 25)
