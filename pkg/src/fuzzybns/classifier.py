"""Feedforward binary classifier for the jump-regime parameter.

A small fully connected network (logistic output, rectifier or logistic
hidden units) trained by mini-batch gradient descent on class-weighted
binary cross-entropy. Training is deterministic given the dataset and the
config seed. Reports follow the per-class precision/recall/f1/support
layout, and the regime parameter is read off a report by comparing the two
per-class f1 scores (or by the majority predicted class).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .levy import RngStream

__all__ = [
    "NetConfig",
    "TrainedModel",
    "ClassMetrics",
    "ClassificationReport",
    "ThetaEstimate",
    "train",
    "predict",
    "predict_batch",
    "classification_report",
    "estimate_theta",
    "model_to_json",
    "model_from_json",
]

FORMAT_VERSION = 1


@dataclass(frozen=True)
class NetConfig:
    """Network and training hyperparameters.

    ``layer_sizes`` runs input -> hidden... -> 1; the input width must match
    the feature width of the training set. ``activation`` applies to every
    hidden layer (or give one name per hidden layer).
    """

    layer_sizes: tuple[int, ...] = (10, 16, 1)
    activation: Union[str, tuple[str, ...]] = "rectifier"
    learning_rate: float = 0.05
    epochs: int = 200
    batch_size: int = 32
    seed: int = 0
    l2: float = 0.0
    class_weighting: str = "balanced"

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least input and output layers")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("layer sizes must be positive")
        if self.layer_sizes[-1] != 1:
            raise ValueError("output layer must have size 1")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.l2 < 0.0:
            raise ValueError("l2 must be non-negative")
        if self.class_weighting not in ("none", "balanced"):
            raise ValueError("class_weighting must be 'none' or 'balanced'")
        acts = self.hidden_activations()
        for a in acts:
            if a not in ("rectifier", "logistic"):
                raise ValueError(f"unknown activation {a!r}")

    def hidden_activations(self) -> tuple[str, ...]:
        n_hidden = len(self.layer_sizes) - 2
        if isinstance(self.activation, str):
            return (self.activation,) * n_hidden
        acts = tuple(self.activation)
        if len(acts) != n_hidden:
            raise ValueError("need one activation per hidden layer")
        return acts


@dataclass
class TrainedModel:
    """Fitted parameters plus the train-split feature normalization.

    ``degenerate_class`` is set when the training labels contained a single
    class (or no usable features); the model then emits that class with
    probability 0 or 1.
    """

    config: NetConfig
    weights: list[np.ndarray] = field(default_factory=list)
    biases: list[np.ndarray] = field(default_factory=list)
    feature_mean: np.ndarray | None = None
    feature_std: np.ndarray | None = None
    kept_features: np.ndarray | None = None
    dropped_features: tuple[int, ...] = ()
    degenerate_class: int | None = None
    loss_history: tuple[float, ...] = ()

    @property
    def is_degenerate(self) -> bool:
        return self.degenerate_class is not None

    @property
    def n_features(self) -> int:
        return self.config.layer_sizes[0]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _hidden_forward(z: np.ndarray, act: str) -> np.ndarray:
    if act == "rectifier":
        return np.maximum(z, 0.0)
    return _sigmoid(z)


def _hidden_grad(z: np.ndarray, a: np.ndarray, act: str) -> np.ndarray:
    if act == "rectifier":
        return (z > 0.0).astype(z.dtype)
    return a * (1.0 - a)


def _forward(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    acts: Sequence[str],
    x: np.ndarray,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Return pre-activations and activations per layer (input included)."""
    zs: list[np.ndarray] = []
    activations = [x]
    a = x
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w + b
        zs.append(z)
        if i < len(weights) - 1:
            a = _hidden_forward(z, acts[i])
        else:
            a = z  # output layer stays a logit
        activations.append(a)
    return zs, activations


def _loss_and_grads(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    acts: Sequence[str],
    x: np.ndarray,
    y: np.ndarray,
    sample_weights: np.ndarray,
    l2: float,
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Class-weighted binary cross-entropy (logit form) with an L2 penalty,
    and its analytic gradient."""
    zs, activations = _forward(weights, biases, acts, x)
    logits = zs[-1][:, 0]
    wsum = float(np.sum(sample_weights))
    # log(1 + e^z) - y z, numerically stable
    data_loss = float(
        np.sum(sample_weights * (np.logaddexp(0.0, logits) - y * logits)) / wsum
    )
    reg = 0.5 * l2 * sum(float(np.sum(w * w)) for w in weights)
    loss = data_loss + reg

    delta = ((_sigmoid(logits) - y) * sample_weights / wsum)[:, None]
    grads_w: list[np.ndarray] = [np.empty(0)] * len(weights)
    grads_b: list[np.ndarray] = [np.empty(0)] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        a_prev = activations[i]
        grads_w[i] = a_prev.T @ delta + l2 * weights[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * _hidden_grad(
                zs[i - 1], activations[i], acts[i - 1]
            )
    return loss, grads_w, grads_b


def _coerce_dataset(dataset) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(dataset, tuple):
        x, y = dataset
    else:
        x, y = dataset.features, dataset.labels
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("dataset must provide a 2-D feature matrix and matching labels")
    return x, y


def _sample_weights(y: np.ndarray, mode: str) -> np.ndarray:
    if mode == "none":
        return np.ones(len(y))
    n = len(y)
    n1 = float(np.sum(y))
    n0 = n - n1
    w = np.where(y > 0.5, n / (2.0 * n1) if n1 else 1.0, n / (2.0 * n0) if n0 else 1.0)
    return w


def train(dataset, config: NetConfig) -> TrainedModel:
    """Fit the network; deterministic given (dataset, config).

    Features are standardized with train-split statistics; zero-variance
    features are dropped and recorded. A single-class training set yields a
    flagged constant model instead of a fitted network.
    """
    x, y = _coerce_dataset(dataset)
    if len(x) < 2:
        raise ValueError("training needs at least 2 rows")
    if x.shape[1] != config.layer_sizes[0]:
        raise ValueError(
            f"feature width {x.shape[1]} does not match input layer {config.layer_sizes[0]}"
        )
    classes = np.unique(y)
    if len(classes) == 1:
        return TrainedModel(config=config, degenerate_class=int(classes[0]))

    mean = x.mean(axis=0)
    std = x.std(axis=0)
    kept = std > 0.0
    dropped = tuple(int(i) for i in np.nonzero(~kept)[0])
    if not np.any(kept):
        majority = int(np.sum(y) * 2 >= len(y))
        return TrainedModel(
            config=config, degenerate_class=majority, dropped_features=dropped
        )
    xn = (x[:, kept] - mean[kept]) / std[kept]

    sizes = (int(np.sum(kept)),) + tuple(config.layer_sizes[1:])
    acts = config.hidden_activations()
    rng = RngStream(config.seed)
    init_gen = rng.derive("init").generator()
    weights = []
    biases = []
    for i in range(len(sizes) - 1):
        scale = math.sqrt(2.0 / sizes[i]) if i < len(sizes) - 2 and acts[i] == "rectifier" else math.sqrt(1.0 / sizes[i])
        weights.append(init_gen.standard_normal((sizes[i], sizes[i + 1])) * scale)
        biases.append(np.zeros(sizes[i + 1]))

    sw = _sample_weights(y, config.class_weighting)
    shuffle_gen = rng.derive("shuffle").generator()
    lr = config.learning_rate
    n = len(xn)
    losses = [
        _loss_and_grads(weights, biases, acts, xn, y, sw, config.l2)[0]
    ]
    for _ in range(config.epochs):
        order = shuffle_gen.permutation(n)
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            _, gw, gb = _loss_and_grads(
                weights, biases, acts, xn[idx], y[idx], sw[idx], config.l2
            )
            for i in range(len(weights)):
                weights[i] -= lr * gw[i]
                biases[i] -= lr * gb[i]
        losses.append(_loss_and_grads(weights, biases, acts, xn, y, sw, config.l2)[0])
    return TrainedModel(
        config=config,
        weights=weights,
        biases=biases,
        feature_mean=mean,
        feature_std=std,
        kept_features=kept,
        dropped_features=dropped,
        loss_history=tuple(losses),
    )


def _probabilities(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    if model.is_degenerate:
        p = 1.0 if model.degenerate_class == 1 else 0.0
        return np.full(len(x), p)
    kept = model.kept_features
    xn = (x[:, kept] - model.feature_mean[kept]) / model.feature_std[kept]
    acts = model.config.hidden_activations()
    _, activations = _forward(model.weights, model.biases, acts, xn)
    return _sigmoid(activations[-1][:, 0])


def predict_batch(
    model: TrainedModel, features: np.ndarray, threshold: float = 0.5
) -> tuple[np.ndarray, np.ndarray]:
    """Classes and probabilities for a feature matrix; probability at the
    threshold goes to class 1."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise ValueError(
            f"feature width mismatch: expected {model.n_features}, got {x.shape}"
        )
    probs = _probabilities(model, x)
    return (probs >= threshold).astype(int), probs


def predict(
    model: TrainedModel, features: Sequence[float], threshold: float = 0.5
) -> tuple[int, float]:
    """Class and probability for one feature vector."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 1:
        raise ValueError("predict takes a single feature vector")
    classes, probs = predict_batch(model, x[None, :], threshold)
    return int(classes[0]), float(probs[0])


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationReport:
    """Per-class precision/recall/f1/support plus overall accuracy."""

    class0: ClassMetrics
    class1: ClassMetrics
    accuracy: float

    def metrics(self, cls: int) -> ClassMetrics:
        if cls == 0:
            return self.class0
        if cls == 1:
            return self.class1
        raise ValueError("class must be 0 or 1")

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "class0": vars(self.class0),
            "class1": vars(self.class1),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    def to_text(self) -> str:
        lines = [
            f"{'':>8}{'precision':>11}{'recall':>9}{'f1-score':>10}{'support':>9}",
        ]
        for cls in (0, 1):
            m = self.metrics(cls)
            lines.append(
                f"{'theta=' + str(cls):>8}{m.precision:>11.2f}{m.recall:>9.2f}"
                f"{m.f1:>10.2f}{m.support:>9d}"
            )
        lines.append(f"{'accuracy':>8}{self.accuracy:>39.2f}")
        return "\n".join(lines) + "\n"


def _class_metrics(pred: np.ndarray, truth: np.ndarray, cls: int) -> ClassMetrics:
    tp = int(np.sum((pred == cls) & (truth == cls)))
    fp = int(np.sum((pred == cls) & (truth != cls)))
    fn = int(np.sum((pred != cls) & (truth == cls)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassMetrics(precision, recall, f1, int(np.sum(truth == cls)))


def classification_report(
    predictions: Sequence[int], labels: Sequence[int]
) -> ClassificationReport:
    """Confusion-matrix metrics for the two regimes; undefined ratios are 0."""
    pred = np.asarray(predictions, dtype=int)
    truth = np.asarray(labels, dtype=int)
    if len(pred) != len(truth):
        raise ValueError("predictions and labels must have equal length")
    if len(pred) == 0:
        raise ValueError("report needs at least one prediction")
    accuracy = float(np.mean(pred == truth))
    return ClassificationReport(
        _class_metrics(pred, truth, 0), _class_metrics(pred, truth, 1), accuracy
    )


@dataclass(frozen=True)
class ThetaEstimate:
    theta: int
    rule: str
    f1_0: float
    f1_1: float

    def as_dict(self) -> dict:
        return {"theta": self.theta, "rule": self.rule, "f1_0": self.f1_0, "f1_1": self.f1_1}


def estimate_theta(report: ClassificationReport, rule: str = "f1") -> ThetaEstimate:
    """Read the jump-regime parameter off a classification report.

    rule="f1" (default): 1 when the class-1 f1 beats the class-0 f1, ties
    going to the weaker regime 0. rule="majority": the majority predicted
    class, reconstructed from recalls and supports.
    """
    f1_0 = report.class0.f1
    f1_1 = report.class1.f1
    if rule == "f1":
        theta = 1 if f1_1 > f1_0 else 0
    elif rule == "majority":
        s0, s1 = report.class0.support, report.class1.support
        pred1 = report.class1.recall * s1 + (1.0 - report.class0.recall) * s0
        pred0 = (s0 + s1) - pred1
        theta = 1 if pred1 > pred0 else 0
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return ThetaEstimate(theta, rule, f1_0, f1_1)


def model_to_json(model: TrainedModel) -> str:
    payload = {
        "format_version": FORMAT_VERSION,
        "config": {
            "layer_sizes": list(model.config.layer_sizes),
            "activation": list(model.config.hidden_activations()),
            "learning_rate": model.config.learning_rate,
            "epochs": model.config.epochs,
            "batch_size": model.config.batch_size,
            "seed": model.config.seed,
            "l2": model.config.l2,
            "class_weighting": model.config.class_weighting,
        },
        "degenerate_class": model.degenerate_class,
        "dropped_features": list(model.dropped_features),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "feature_mean": None if model.feature_mean is None else model.feature_mean.tolist(),
        "feature_std": None if model.feature_std is None else model.feature_std.tolist(),
        "kept_features": None if model.kept_features is None else [bool(v) for v in model.kept_features],
        "loss_history": list(model.loss_history),
    }
    return json.dumps(payload, sort_keys=True)


def model_from_json(text: str) -> TrainedModel:
    payload = json.loads(text)
    if payload.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format {payload.get('format_version')!r}")
    cfg = payload["config"]
    config = NetConfig(
        layer_sizes=tuple(cfg["layer_sizes"]),
        activation=tuple(cfg["activation"]) if cfg["activation"] else "rectifier",
        learning_rate=cfg["learning_rate"],
        epochs=cfg["epochs"],
        batch_size=cfg["batch_size"],
        seed=cfg["seed"],
        l2=cfg["l2"],
        class_weighting=cfg["class_weighting"],
    )
    return TrainedModel(
        config=config,
        weights=[np.array(w) for w in payload["weights"]],
        biases=[np.array(b) for b in payload["biases"]],
        feature_mean=None if payload["feature_mean"] is None else np.array(payload["feature_mean"]),
        feature_std=None if payload["feature_std"] is None else np.array(payload["feature_std"]),
        kept_features=None if payload["kept_features"] is None else np.array(payload["kept_features"], dtype=bool),
        dropped_features=tuple(payload["dropped_features"]),
        degenerate_class=payload["degenerate_class"],
        loss_history=tuple(payload["loss_history"]),
    )
