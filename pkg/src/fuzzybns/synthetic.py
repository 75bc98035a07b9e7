"""Deterministic synthetic OHLC data for demos, tests, and fixtures."""

from __future__ import annotations

from datetime import datetime, timedelta
from typing import Mapping, Sequence

import numpy as np

from .levy import RngStream
from .market_data import Bar

__all__ = ["make_flat_bars", "make_ohlc_bars"]

_DEFAULT_START = datetime(2021, 1, 4, 9, 0)


def make_flat_bars(
    prices: Sequence[float],
    start: datetime = _DEFAULT_START,
    bar_minutes: int = 5,
) -> list[Bar]:
    """Bars with open = high = low = close, one per price; the fuzzy price
    expectation then equals the price exactly for every risk attitude."""
    bars = []
    for i, p in enumerate(prices):
        ts = start + timedelta(minutes=bar_minutes * i)
        bars.append(Bar(ts, float(p), float(p), float(p), float(p)))
    return bars


def make_ohlc_bars(
    n_bars: int,
    rng: RngStream,
    start: datetime = _DEFAULT_START,
    bar_minutes: int = 5,
    s0: float = 100.0,
    per_bar_vol: float = 0.002,
    drift: float = 0.0,
    wick: float = 0.001,
    planted_drops: Mapping[int, float] | None = None,
) -> list[Bar]:
    """Random-walk OHLC bars with optional planted downward moves.

    ``planted_drops`` maps a bar index k (>= 1) to a percentage drop: the
    close at k is forced to (1 - pct/100) times the close at k - 1, and both
    bars are kept wickless so the move is preserved (up to rounding) by the
    fuzzy price expectation at any risk attitude.
    """
    if n_bars < 1:
        raise ValueError("n_bars must be positive")
    planted = dict(planted_drops or {})
    if any(k < 1 or k >= n_bars for k in planted):
        raise ValueError("planted drop indices must lie in [1, n_bars)")
    flat = set(planted) | {k - 1 for k in planted}
    gen = rng.generator()
    steps = gen.normal(loc=drift, scale=per_bar_vol, size=n_bars)
    wicks = np.abs(gen.normal(scale=wick, size=(n_bars, 2)))
    bars: list[Bar] = []
    prev_close = s0
    for k in range(n_bars):
        ts = start + timedelta(minutes=bar_minutes * k)
        if k in planted:
            close = prev_close * (1.0 - planted[k] / 100.0)
            bars.append(Bar(ts, close, close, close, close))
        elif k in flat:
            close = prev_close * float(np.exp(steps[k]))
            bars.append(Bar(ts, close, close, close, close))
        else:
            open_ = prev_close
            close = prev_close * float(np.exp(steps[k]))
            high = max(open_, close) * (1.0 + float(wicks[k, 0]))
            low = min(open_, close) * (1.0 - float(wicks[k, 1]))
            bars.append(Bar(ts, open_, high, low, close))
        prev_close = bars[-1].close
    return bars
