"""Jump labeling: threshold detection of large downward fuzzy-price moves,
windowed feature construction, binary regime labels, and time-range splits.

A "big jump" at bar k is a drop of at least K percent of the previous bar's
fuzzy price expectation. Rows of the labeled dataset are consecutive windows
of W percentage changes; a row is labeled 1 when at least ``min_jumps`` big
jumps land in the L bars after the window.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from datetime import datetime
from typing import IO, Sequence

import numpy as np

from .market_data import FuzzyBarSeries

__all__ = [
    "JumpEvent",
    "WindowedDataset",
    "SplitSpec",
    "detect_big_jumps",
    "jump_count_table",
    "build_dataset",
    "split",
]


@dataclass(frozen=True)
class JumpEvent:
    """A detected drop of at least the threshold, at a bar index >= 1."""

    index: int
    timestamp: datetime
    drop_pct: float

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("jump index must be at least 1")
        if self.drop_pct <= 0.0:
            raise ValueError("drop_pct must be positive")


def detect_big_jumps(series: FuzzyBarSeries, threshold: float) -> list[JumpEvent]:
    """Find bars whose expectation fell by at least ``threshold`` percent
    versus the previous bar. Downward moves only; events sorted by index."""
    if threshold <= 0.0:
        raise ValueError("threshold must be positive (in percent)")
    exp = series.expectations
    events: list[JumpEvent] = []
    for k in range(1, len(exp)):
        drop = 100.0 * (exp[k - 1] - exp[k]) / exp[k - 1]
        if drop >= threshold:
            events.append(JumpEvent(k, series.bars[k].timestamp, float(drop)))
    return events


@dataclass(frozen=True)
class SplitSpec:
    """Disjoint train/test bar-index ranges (inclusive); test after train."""

    train_start: int
    train_end: int
    test_start: int
    test_end: int

    def __post_init__(self):
        if not (self.train_start <= self.train_end):
            raise ValueError("train range is empty or reversed")
        if not (self.test_start <= self.test_end):
            raise ValueError("test range is empty or reversed")
        if self.train_end >= self.test_start:
            raise ValueError("test range must start strictly after the train range")

    def covers(self) -> tuple[range, range]:
        return (
            range(self.train_start, self.train_end + 1),
            range(self.test_start, self.test_end + 1),
        )


def jump_count_table(
    series: FuzzyBarSeries,
    thresholds: Sequence[float],
    splits: Sequence[SplitSpec] = (),
) -> list[dict]:
    """Jump counts per threshold, overall and per split range.

    Counts are non-increasing in the threshold. A split's count covers the
    union of its train and test index ranges.
    """
    rows = []
    for k_value in thresholds:
        events = detect_big_jumps(series, k_value)
        row = {"K": float(k_value), "total": len(events)}
        for si, spec in enumerate(splits):
            train_rng, test_rng = spec.covers()
            n = sum(1 for e in events if e.index in train_rng or e.index in test_rng)
            row[f"split{si}"] = n
        rows.append(row)
    return rows


@dataclass(frozen=True)
class WindowedDataset:
    """Feature matrix of windowed percentage changes with binary labels.

    Row r holds the pct changes of bars [row_start, row_start + W - 1]; its
    label is 1 iff at least ``min_jumps`` detected jumps fall in the L bars
    strictly after the window.
    """

    features: np.ndarray
    labels: np.ndarray
    row_start_indices: np.ndarray
    threshold: float
    window: int
    lookahead: int
    min_jumps: int
    stride: int

    def __post_init__(self):
        if self.features.shape[0] != len(self.labels):
            raise ValueError("features and labels disagree on row count")
        if self.features.shape[0] != len(self.row_start_indices):
            raise ValueError("row_start_indices and rows disagree on count")

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, mask: np.ndarray) -> "WindowedDataset":
        return WindowedDataset(
            self.features[mask],
            self.labels[mask],
            self.row_start_indices[mask],
            self.threshold,
            self.window,
            self.lookahead,
            self.min_jumps,
            self.stride,
        )

    def write_csv(self, fp: IO[str]) -> None:
        cols = [f"dp{j}" for j in range(self.window)] + ["theta"]
        fp.write(",".join(cols) + "\n")
        for i in range(len(self)):
            cells = [repr(float(v)) for v in self.features[i]]
            cells.append(str(int(self.labels[i])))
            fp.write(",".join(cells) + "\n")

    def metadata(self) -> dict:
        return {
            "threshold": self.threshold,
            "window": self.window,
            "lookahead": self.lookahead,
            "min_jumps": self.min_jumps,
            "stride": self.stride,
            "n_rows": int(len(self)),
            "row_start_indices": [int(i) for i in self.row_start_indices],
        }

    def to_json(self) -> str:
        return json.dumps(self.metadata(), sort_keys=True)


def build_dataset(
    series: FuzzyBarSeries,
    threshold: float,
    window: int = 10,
    lookahead: int = 10,
    min_jumps: int = 2,
    stride: int | None = None,
) -> WindowedDataset:
    """Stack windows of percentage changes and label each by the jump count
    in its lookahead span.

    Windows are non-overlapping by default (stride = window); stride = 1
    gives the sliding augmentation. Rows without a full lookahead are
    dropped.
    """
    if window < 1 or lookahead < 1 or min_jumps < 1:
        raise ValueError("window, lookahead, and min_jumps must be positive")
    if stride is None:
        stride = window
    if stride < 1:
        raise ValueError("stride must be positive")
    n_bars = len(series)
    if n_bars < window + lookahead + 1:
        raise ValueError(
            f"need at least window + lookahead + 1 = {window + lookahead + 1} bars, got {n_bars}"
        )
    events = detect_big_jumps(series, threshold)
    event_indices = np.array([e.index for e in events], dtype=int)
    pct = series.pct_changes

    feats: list[np.ndarray] = []
    labels: list[int] = []
    starts: list[int] = []
    row_start = 1
    while row_start + window - 1 + lookahead <= n_bars - 1:
        row_end = row_start + window - 1
        # pct change of bar k sits at pct[k - 1]
        feats.append(pct[row_start - 1 : row_end])
        lo, hi = row_end, row_end + lookahead
        n_jumps = int(np.sum((event_indices > lo) & (event_indices <= hi)))
        labels.append(1 if n_jumps >= min_jumps else 0)
        starts.append(row_start)
        row_start += stride
    return WindowedDataset(
        np.array(feats),
        np.array(labels, dtype=int),
        np.array(starts, dtype=int),
        float(threshold),
        window,
        lookahead,
        min_jumps,
        stride,
    )


def split(dataset: WindowedDataset, spec: SplitSpec) -> tuple[WindowedDataset, WindowedDataset]:
    """Assign rows whose feature window lies entirely inside the train or
    test index range; rows straddling a boundary belong to neither."""
    starts = dataset.row_start_indices
    ends = starts + dataset.window - 1
    train_mask = (starts >= spec.train_start) & (ends <= spec.train_end)
    test_mask = (starts >= spec.test_start) & (ends <= spec.test_end)
    return dataset.subset(train_mask), dataset.subset(test_mask)
