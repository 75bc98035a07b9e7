"""Regenerate the bundled synthetic fixture (bars.csv + config.json).

Run from the repository root:  python tests/data/make_fixture.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fuzzybns.levy import RngStream
from fuzzybns.market_data import serialize_bars
from fuzzybns.synthetic import make_ohlc_bars

HERE = Path(__file__).parent


def main() -> None:
    planted = {200 + 40 * i: 0.35 for i in range(40)}
    bars = make_ohlc_bars(
        2200,
        RngStream(20210104),
        s0=32500.0,
        per_bar_vol=0.0012,
        wick=0.0006,
        planted_drops=planted,
    )
    (HERE / "bars.csv").write_text(serialize_bars(bars))

    config = {
        "version": 1,
        "seed": 42,
        "out_dir": "run",
        "input": {"bars_csv": "bars.csv"},
        "eta": 0.5,
        "thresholds": [0.05, 0.1, 0.3],
        "labeling": {"threshold": 0.1, "window": 10, "lookahead": 10, "min_jumps": 2},
        "split": {"train": [1, 1600], "test": [1601, 2150]},
        "net": {
            "hidden": [16],
            "activation": "rectifier",
            "learning_rate": 0.05,
            "epochs": 80,
            "batch_size": 32,
            "l2": 0.0001,
            "class_weighting": "balanced",
        },
        "model": {
            "mu": 0.0,
            "beta": 0.0,
            "rho": -1.0,
            "lambda": 1.0,
            "sigma0_sq": [0.5, 0.5, 0.5],
            "rho_prime": 0.5,
            "spec": {"a": 1.0, "b": 2.0, "c": 1.0},
            "spec_b": {"a": 1.0, "b": 2.0, "c": 4.0},
            "fuzz_spread": 0.05,
        },
        "simulate": {
            "horizon": 4.0,
            "dt": 0.0625,
            "n_paths": 120,
            "s": 1.0,
            "t_values": [2.0, 4.0],
            "variants": ["classic", "fuzzy", "generalized"],
            "use_estimated_theta": True,
        },
    }
    (HERE / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
