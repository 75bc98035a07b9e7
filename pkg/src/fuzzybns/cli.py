"""Batch command-line pipeline: ingest -> stats/plots -> jump labeling ->
classifier training -> theta estimate -> simulation, with deterministic
artifacts and per-command manifests.

Every artifact is a flat file in the run directory; a manifest records the
digests of everything that influenced it plus the seed, so identical inputs
and seed reproduce identical bytes. One global seed is fanned out to named
sub-streams for simulation and training.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bns, classifier, jumplab, market_data
from .fuzzy import RiskAttitude
from .levy import RngStream

CONFIG_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_MISSING_ARTIFACT = 3


class ConfigError(Exception):
    """Invalid configuration or usage; carries every detected violation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MissingArtifactError(Exception):
    def __init__(self, artifact: str, producer: str):
        self.artifact = artifact
        self.producer = producer
        super().__init__(
            f"missing artifact {artifact!r}: run the {producer!r} subcommand first"
        )


@dataclass
class RunConfig:
    raw: dict
    path: Path
    out_dir: Path
    seed: int
    eta: float
    thresholds: list[float]

    @property
    def input_csv(self) -> Path:
        return Path(self.raw["input"]["bars_csv"])

    def bar_format(self) -> market_data.BarFormat:
        inp = self.raw["input"]
        cols = inp.get("columns", {})
        return market_data.BarFormat(
            delimiter=inp.get("delimiter", ","),
            timestamp_column=cols.get("timestamp", "timestamp"),
            open_column=cols.get("open", "open"),
            high_column=cols.get("high", "high"),
            low_column=cols.get("low", "low"),
            close_column=cols.get("close", "close"),
            volume_column=cols.get("volume", "volume"),
        )

    def labeling(self) -> dict:
        lab = self.raw.get("labeling", {})
        return {
            "threshold": lab.get("threshold", self.thresholds[0]),
            "window": lab.get("window", 10),
            "lookahead": lab.get("lookahead", 10),
            "min_jumps": lab.get("min_jumps", 2),
            "stride": lab.get("stride"),
        }

    def split_spec(self) -> jumplab.SplitSpec | None:
        sp = self.raw.get("split")
        if sp is None:
            return None
        return jumplab.SplitSpec(sp["train"][0], sp["train"][1], sp["test"][0], sp["test"][1])

    def net_config(self, width: int, seed: int) -> classifier.NetConfig:
        net = self.raw.get("net", {})
        hidden = tuple(net.get("hidden", [16]))
        return classifier.NetConfig(
            layer_sizes=(width,) + hidden + (1,),
            activation=net.get("activation", "rectifier"),
            learning_rate=net.get("learning_rate", 0.05),
            epochs=net.get("epochs", 200),
            batch_size=net.get("batch_size", 32),
            seed=seed,
            l2=net.get("l2", 0.0),
            class_weighting=net.get("class_weighting", "balanced"),
        )

    def model_params(self) -> bns.ModelParams:
        return bns.model_params_from_dict(self.raw.get("model", {}))

    def simulate_section(self) -> dict:
        sim = self.raw.get("simulate", {})
        return {
            "horizon": sim.get("horizon", 4.0),
            "dt": sim.get("dt", 1.0 / 288.0),
            "n_paths": sim.get("n_paths", 200),
            "s": sim.get("s", 1.0),
            "t_values": sim.get("t_values", [2.0, 4.0]),
            "variants": sim.get("variants", ["classic", "fuzzy", "generalized"]),
            "use_estimated_theta": sim.get("use_estimated_theta", True),
        }


def load_config(
    path: str,
    out_override: str | None = None,
    seed_override: int | None = None,
    eta_override: float | None = None,
    thresholds_override: list[float] | None = None,
) -> RunConfig:
    violations: list[str] = []
    cfg_path = Path(path)
    if not cfg_path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    try:
        raw = json.loads(cfg_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"])

    if raw.get("version") != CONFIG_VERSION:
        violations.append(f"config version must be {CONFIG_VERSION}, got {raw.get('version')!r}")

    seed = seed_override if seed_override is not None else raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        violations.append(f"seed must be a non-negative integer, got {seed!r}")

    inp = raw.get("input")
    if not isinstance(inp, dict) or "bars_csv" not in inp:
        violations.append("input.bars_csv is required")
    else:
        bars_path = Path(inp["bars_csv"])
        if not bars_path.is_absolute():
            bars_path = cfg_path.parent / bars_path
            inp["bars_csv"] = str(bars_path)
        if not bars_path.is_file():
            violations.append(f"input.bars_csv does not exist: {inp['bars_csv']}")

    eta = eta_override if eta_override is not None else raw.get("eta", 0.5)
    if not isinstance(eta, (int, float)) or not (0.0 <= eta <= 1.0):
        violations.append(f"eta must lie in [0, 1], got {eta!r}")

    thresholds = (
        thresholds_override
        if thresholds_override
        else raw.get("thresholds", [0.1])
    )
    if not thresholds or any(
        not isinstance(k, (int, float)) or k <= 0 for k in thresholds
    ):
        violations.append(f"thresholds must be positive numbers, got {thresholds!r}")

    lab = raw.get("labeling", {})
    for key in ("window", "lookahead", "min_jumps"):
        v = lab.get(key, 10 if key != "min_jumps" else 2)
        if not isinstance(v, int) or v < 1:
            violations.append(f"labeling.{key} must be a positive integer, got {v!r}")

    sp = raw.get("split")
    if sp is not None:
        ok_shape = (
            isinstance(sp, dict)
            and isinstance(sp.get("train"), list)
            and isinstance(sp.get("test"), list)
            and len(sp["train"]) == 2
            and len(sp["test"]) == 2
        )
        if not ok_shape:
            violations.append("split must provide train: [a, b] and test: [c, d]")
        else:
            try:
                jumplab.SplitSpec(sp["train"][0], sp["train"][1], sp["test"][0], sp["test"][1])
            except ValueError as exc:
                violations.append(f"split: {exc}")

    try:
        bns.model_params_from_dict(raw.get("model", {}))
    except (ValueError, KeyError, TypeError) as exc:
        violations.append(f"model: {exc}")

    sim = raw.get("simulate", {})
    horizon = sim.get("horizon", 4.0)
    dt = sim.get("dt", 1.0 / 288.0)
    if not (isinstance(horizon, (int, float)) and isinstance(dt, (int, float)) and horizon > dt > 0):
        violations.append("simulate requires horizon > dt > 0")
    for variant in sim.get("variants", ["classic", "fuzzy", "generalized"]):
        if variant not in ("classic", "fuzzy", "generalized"):
            violations.append(f"simulate.variants: unknown variant {variant!r}")

    out_dir = Path(out_override if out_override else raw.get("out_dir", "run"))
    if violations:
        raise ConfigError(violations)
    return RunConfig(raw, cfg_path, out_dir, seed, float(eta), [float(k) for k in thresholds])


def _digest_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _digest_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as fp:
        fp.write(text)


def _write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


class Workspace:
    """One run directory: artifact IO, dependency checks, manifests."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = config.out_dir
        self.out.mkdir(parents=True, exist_ok=True)
        self._config_digest = _digest_text(
            json.dumps(config.raw, sort_keys=True) + f"|seed={config.seed}|eta={config.eta}"
        )

    def path(self, name: str) -> Path:
        return self.out / name

    def require(self, name: str, producer: str) -> Path:
        p = self.path(name)
        if not p.is_file():
            raise MissingArtifactError(name, producer)
        return p

    def write_manifest(self, command: str, inputs: dict[str, Path], outputs: list[str]) -> None:
        manifest = {
            "command": command,
            "version": CONFIG_VERSION,
            "seed": self.config.seed,
            "eta": self.config.eta,
            "config_digest": self._config_digest,
            "inputs": {name: _digest_file(p) for name, p in sorted(inputs.items())},
            "outputs": {name: _digest_file(self.path(name)) for name in sorted(outputs)},
        }
        _write_json(self.path(f"{command}_manifest.json"), manifest)

    def root_rng(self) -> RngStream:
        return RngStream(self.config.seed)


def _series_to_csv(series: market_data.FuzzyBarSeries) -> str:
    lines = ["timestamp,open,high,low,close,volume,expectation,pct_change"]
    for i, bar in enumerate(series.bars):
        vol = "" if bar.volume is None else repr(bar.volume)
        pct = "" if i == 0 else repr(float(series.pct_changes[i - 1]))
        lines.append(
            ",".join(
                [
                    bar.timestamp.isoformat(),
                    repr(bar.open),
                    repr(bar.high),
                    repr(bar.low),
                    repr(bar.close),
                    vol,
                    repr(float(series.expectations[i])),
                    pct,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _series_from_artifacts(ws: Workspace, producer: str = "ingest") -> market_data.FuzzyBarSeries:
    csv_path = ws.require("fuzzy_series.csv", producer)
    meta = json.loads(ws.require("series_meta.json", producer).read_text())
    bars = market_data.parse_bars(csv_path, market_data.BarFormat())
    return market_data.to_fuzzy_series(bars, RiskAttitude(meta["eta"]))


def cmd_ingest(ws: Workspace) -> None:
    cfg = ws.config
    bars = market_data.parse_bars(cfg.input_csv, cfg.bar_format())
    series = market_data.to_fuzzy_series(bars, RiskAttitude(cfg.eta))
    _write_text(ws.path("fuzzy_series.csv"), _series_to_csv(series))
    _write_json(ws.path("series_meta.json"), {"eta": cfg.eta, "n_bars": len(series)})
    ws.write_manifest(
        "ingest",
        {"bars_csv": cfg.input_csv},
        ["fuzzy_series.csv", "series_meta.json"],
    )


def cmd_stats(ws: Workspace) -> None:
    series_csv = ws.require("fuzzy_series.csv", "ingest")
    bars = market_data.parse_bars(series_csv, market_data.BarFormat())
    close = [b.close for b in bars]
    payload: dict = {
        "close_price": market_data.descriptive_stats(close).as_dict(),
        "fuzzy_price": {},
        "fuzzy_pct_change": {},
    }
    close_arr = np.array(close)
    close_pct = 100.0 * (close_arr[1:] - close_arr[:-1]) / close_arr[:-1]
    payload["close_pct_change"] = market_data.descriptive_stats(close_pct).as_dict()
    for eta in (0.0, 0.5, 1.0):
        s = market_data.to_fuzzy_series(bars, RiskAttitude(eta))
        key = f"eta={eta}"
        payload["fuzzy_price"][key] = market_data.descriptive_stats(s.expectations).as_dict()
        payload["fuzzy_pct_change"][key] = market_data.descriptive_stats(s.pct_changes).as_dict()
    _write_json(ws.path("stats.json"), payload)
    ws.write_manifest("stats", {"fuzzy_series.csv": series_csv}, ["stats.json"])


_PLOT_KINDS = (
    "monthly_box",
    "price_histogram",
    "pct_change_histogram",
    "rv_heatmap",
    "rv_line",
)


def cmd_plotdata(ws: Workspace) -> None:
    series = _series_from_artifacts(ws)
    rv = market_data.realized_volatility(series)
    outputs = []
    for kind in _PLOT_KINDS:
        data = rv if kind.startswith("rv_") else series
        table = market_data.emit_plot_data(data, kind)
        name = f"plot_{kind}.csv"
        _write_text(ws.path(name), table.to_text())
        outputs.append(name)
    _write_json(ws.path("rv_warnings.json"), {"warnings": list(rv.warnings)})
    outputs.append("rv_warnings.json")
    ws.write_manifest(
        "plotdata", {"fuzzy_series.csv": ws.path("fuzzy_series.csv")}, outputs
    )


def cmd_jumps(ws: Workspace) -> None:
    series = _series_from_artifacts(ws)
    spec = ws.config.split_spec()
    splits = [spec] if spec is not None else []
    rows = jumplab.jump_count_table(series, ws.config.thresholds, splits)
    header = ["K", "total"] + [f"split{i}" for i in range(len(splits))]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(row[h]) if h != "K" else repr(row["K"]) for h in header))
    _write_text(ws.path("jump_counts.csv"), "\n".join(lines) + "\n")
    ws.write_manifest(
        "jumps", {"fuzzy_series.csv": ws.path("fuzzy_series.csv")}, ["jump_counts.csv"]
    )


def cmd_label(ws: Workspace) -> None:
    series = _series_from_artifacts(ws)
    lab = ws.config.labeling()
    dataset = jumplab.build_dataset(
        series,
        lab["threshold"],
        window=lab["window"],
        lookahead=lab["lookahead"],
        min_jumps=lab["min_jumps"],
        stride=lab["stride"],
    )
    with open(ws.path("dataset.csv"), "w", newline="\n") as fp:
        dataset.write_csv(fp)
    _write_text(ws.path("dataset_meta.json"), dataset.to_json() + "\n")
    ws.write_manifest(
        "label",
        {"fuzzy_series.csv": ws.path("fuzzy_series.csv")},
        ["dataset.csv", "dataset_meta.json"],
    )


def _load_dataset(ws: Workspace) -> jumplab.WindowedDataset:
    csv_path = ws.require("dataset.csv", "label")
    meta = json.loads(ws.require("dataset_meta.json", "label").read_text())
    rows = csv_path.read_text().strip().split("\n")[1:]
    feats = []
    labels = []
    for line in rows:
        cells = line.split(",")
        feats.append([float(v) for v in cells[:-1]])
        labels.append(int(cells[-1]))
    return jumplab.WindowedDataset(
        np.array(feats),
        np.array(labels, dtype=int),
        np.array(meta["row_start_indices"], dtype=int),
        meta["threshold"],
        meta["window"],
        meta["lookahead"],
        meta["min_jumps"],
        meta["stride"],
    )


def cmd_train(ws: Workspace) -> None:
    dataset = _load_dataset(ws)
    spec = ws.config.split_spec()
    if spec is None:
        raise ConfigError(["a split section is required for training"])
    train_set, test_set = jumplab.split(dataset, spec)
    if len(train_set) < 2:
        raise ConfigError(["train split selects fewer than 2 rows"])
    seed = ws.root_rng().derive("train").stream_id
    config = ws.config.net_config(dataset.window, seed)
    model = classifier.train(train_set, config)
    if len(test_set) == 0:
        raise ConfigError(["test split selects no rows"])
    preds, _ = classifier.predict_batch(model, test_set.features)
    report = classifier.classification_report(preds, test_set.labels)
    theta = classifier.estimate_theta(report)
    _write_text(ws.path("model.json"), classifier.model_to_json(model) + "\n")
    _write_text(ws.path("report.json"), report.to_json() + "\n")
    _write_text(ws.path("report.txt"), report.to_text())
    _write_json(ws.path("theta.json"), theta.as_dict())
    ws.write_manifest(
        "train",
        {
            "dataset.csv": ws.path("dataset.csv"),
            "dataset_meta.json": ws.path("dataset_meta.json"),
        },
        ["model.json", "report.json", "report.txt", "theta.json"],
    )


def _with_schedule(params: bns.ModelParams, schedule: bns.ThetaSchedule) -> bns.ModelParams:
    return bns.ModelParams(
        mu=params.mu,
        beta=params.beta,
        rho=params.rho,
        lam=params.lam,
        sigma0_sq=params.sigma0_sq,
        rho_prime=params.rho_prime,
        theta_schedule=schedule,
        spec=params.spec,
        spec_b=params.spec_b,
        fuzz_spread=params.fuzz_spread,
    )


def _variant_params(params: bns.ModelParams, variant: str) -> bns.ModelParams:
    """Restrict generalized parameters to what a variant's simulator accepts."""
    if variant == "generalized":
        return params
    core = params.sigma0_sq.m
    return bns.ModelParams(
        mu=params.mu,
        beta=params.beta,
        rho=params.rho,
        lam=params.lam,
        sigma0_sq=params.sigma0_sq
        if variant == "fuzzy"
        else bns.TriangularFuzzyNumber(core, core, core),
        rho_prime=params.rho_prime,
        theta_schedule=bns.ThetaSchedule.constant(0.0),
        spec=params.spec,
        spec_b=params.spec_b,
        fuzz_spread=0.0 if variant == "classic" else params.fuzz_spread,
    )


def cmd_simulate(ws: Workspace) -> None:
    cfg = ws.config
    sim = cfg.simulate_section()
    params = cfg.model_params()
    inputs: dict[str, Path] = {}
    if sim["use_estimated_theta"]:
        theta_path = ws.require("theta.json", "train")
        theta = json.loads(theta_path.read_text())["theta"]
        params = _with_schedule(params, bns.ThetaSchedule.constant(float(theta)))
        inputs["theta.json"] = theta_path

    root = ws.root_rng().derive("simulate")
    horizon, dt = sim["horizon"], sim["dt"]
    outputs = []
    simulators = {
        "classic": bns.simulate_classic,
        "fuzzy": bns.simulate_fuzzy,
        "generalized": bns.simulate_generalized,
    }
    for variant in sim["variants"]:
        run_params = _variant_params(params, variant)
        path = simulators[variant](run_params, horizon, dt, root.derive(f"path:{variant}"))
        name = f"path_{variant}.csv"
        with open(ws.path(name), "w", newline="\n") as fp:
            bns.path_to_csv(path, fp)
        outputs.append(name)

    lines = ["variant,method,s,t,value,std_error,n_paths"]
    for variant in sim["variants"]:
        run_params = _variant_params(params, variant)
        for t in sim["t_values"]:
            for fn in (bns.corr_formula, bns.corr_monte_carlo):
                est = fn(
                    variant,
                    run_params,
                    sim["s"],
                    t,
                    sim["n_paths"],
                    root.derive(f"corr:{variant}:{t}:{fn.__name__}"),
                    dt=dt,
                )
                lines.append(
                    ",".join(
                        [
                            variant,
                            est.method,
                            repr(est.s),
                            repr(est.t),
                            repr(est.value),
                            repr(est.std_error),
                            str(est.n_paths),
                        ]
                    )
                )
    _write_text(ws.path("correlations.csv"), "\n".join(lines) + "\n")
    outputs.append("correlations.csv")
    ws.write_manifest("simulate", inputs, outputs)


def cmd_pipeline(ws: Workspace) -> None:
    cmd_ingest(ws)
    cmd_stats(ws)
    cmd_plotdata(ws)
    cmd_jumps(ws)
    cmd_label(ws)
    cmd_train(ws)
    cmd_simulate(ws)


_COMMANDS = {
    "ingest": cmd_ingest,
    "stats": cmd_stats,
    "plotdata": cmd_plotdata,
    "jumps": cmd_jumps,
    "label": cmd_label,
    "train": cmd_train,
    "simulate": cmd_simulate,
    "pipeline": cmd_pipeline,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError([message])


def _build_parser() -> _Parser:
    parser = _Parser(prog="fuzzybns", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--eta", type=float, default=None, help="risk attitude override")
        p.add_argument(
            "--threshold",
            type=float,
            action="append",
            default=None,
            help="jump threshold in percent (repeatable, overrides config)",
        )
    return parser


def run(argv: list[str]) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = load_config(
            args.config,
            out_override=args.out,
            seed_override=args.seed,
            eta_override=args.eta,
            thresholds_override=args.threshold,
        )
        ws = Workspace(config)
        lock = ws.path(".lock")
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            print(f"error: run directory is locked by {lock}", file=sys.stderr)
            return EXIT_RUNTIME
        try:
            os.close(fd)
            _COMMANDS[args.command](ws)
        finally:
            lock.unlink(missing_ok=True)
        return EXIT_OK
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_ARTIFACT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
