"""One-hidden-layer perceptron baseline: ReLU hidden layer, softmax
output, trained with the same mean-squared loss and AdaGrad stepping as
the circuit classifier so the two records compare like for like.

Collapse metrics are computed on the hidden activations, the vector
analogue of the circuit's feature states: per-class summed Euclidean
distance to the class mean, and pairwise dot products of the means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qcrisk.classifier import (
    EpochMetrics,
    TrainRecord,
    accuracy,
    adagrad_step,
    empirical_risk,
    one_hot,
)
from qcrisk.data import Dataset


@dataclass(frozen=True)
class MlpSpec:
    n_inputs: int
    n_hidden: int
    n_classes: int

    def __post_init__(self):
        if min(self.n_inputs, self.n_hidden, self.n_classes) < 1:
            raise ValueError("layer widths must be >= 1")

    @property
    def n_params(self) -> int:
        d, h, k = self.n_inputs, self.n_hidden, self.n_classes
        return d * h + h + h * k + k


def hidden_for_n_params(n_inputs: int, n_classes: int, n_params: int) -> int:
    """Hidden width realizing exactly ``n_params`` weights and biases."""
    per_unit = n_inputs + 1 + n_classes
    h, rem = divmod(n_params - n_classes, per_unit)
    if rem != 0 or h < 1:
        raise ValueError(
            f"no hidden width gives {n_params} parameters at "
            f"{n_inputs} inputs and {n_classes} classes"
        )
    return h


def init_params(spec: MlpSpec, rng: np.random.Generator) -> np.ndarray:
    """Flat parameter vector; weights get scaled normal draws sized to the
    fan-in, biases start at zero."""
    d, h, k = spec.n_inputs, spec.n_hidden, spec.n_classes
    w1 = rng.normal(0.0, np.sqrt(2.0 / d), size=(h, d))
    w2 = rng.normal(0.0, np.sqrt(2.0 / h), size=(k, h))
    return np.concatenate([w1.ravel(), np.zeros(h), w2.ravel(), np.zeros(k)])


def unpack(params: np.ndarray, spec: MlpSpec):
    d, h, k = spec.n_inputs, spec.n_hidden, spec.n_classes
    if params.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} parameters, got {params.shape}")
    splits = np.cumsum([d * h, h, h * k])
    w1, b1, w2, b2 = np.split(params, splits)
    return w1.reshape(h, d), b1, w2.reshape(k, h), b2


def forward(params: np.ndarray, spec: MlpSpec, x: np.ndarray):
    """Returns (probabilities, hidden activations) for a (n, d) batch."""
    w1, b1, w2, b2 = unpack(params, spec)
    hidden = np.maximum(x @ w1.T + b1, 0.0)
    logits = hidden @ w2.T + b2
    shifted = logits - logits.max(axis=1, keepdims=True)
    expl = np.exp(shifted)
    return expl / expl.sum(axis=1, keepdims=True), hidden


def mlp_loss(params: np.ndarray, spec: MlpSpec, x: np.ndarray, targets: np.ndarray) -> float:
    probs, _ = forward(params, spec, x)
    return empirical_risk(probs, targets)


def mlp_gradient(params: np.ndarray, spec: MlpSpec, x: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Backprop through softmax + MSE: the output delta is the softmax
    Jacobian applied to the residual."""
    w1, b1, w2, b2 = unpack(params, spec)
    z1 = x @ w1.T + b1
    hidden = np.maximum(z1, 0.0)
    logits = hidden @ w2.T + b2
    shifted = logits - logits.max(axis=1, keepdims=True)
    expl = np.exp(shifted)
    probs = expl / expl.sum(axis=1, keepdims=True)

    g = (probs - targets) / len(x)
    dz2 = probs * (g - np.sum(g * probs, axis=1, keepdims=True))
    dw2 = dz2.T @ hidden
    db2 = dz2.sum(axis=0)
    dz1 = (dz2 @ w2) * (z1 > 0.0)
    dw1 = dz1.T @ x
    db1 = dz1.sum(axis=0)
    return np.concatenate([dw1.ravel(), db1, dw2.ravel(), db2])


@dataclass(frozen=True)
class MlpTrainConfig:
    n_hidden: int
    epochs: int
    learning_rate: float
    batch_size: int
    seed: int

    def __post_init__(self):
        if self.n_hidden < 1:
            raise ValueError("n_hidden must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def feature_vectors(ds: Dataset) -> np.ndarray:
    """(n, d) float features: bitstrings become 0/1 coordinate vectors."""
    if ds.kind == "bitstring":
        return np.array([[float(c) for c in s] for s in ds.features])
    return np.asarray(ds.features, dtype=float)


def train_mlp(train: Dataset, test: Dataset, config: MlpTrainConfig) -> TrainRecord:
    """Mini-batch AdaGrad on the perceptron, recording the same per-epoch
    metrics as the circuit trainer."""
    if train.n == 0:
        raise ValueError("dataset is empty")
    x_train, x_test = feature_vectors(train), feature_vectors(test)
    if x_train.shape[1] != x_test.shape[1]:
        raise ValueError("train and test disagree on feature length")
    k = train.n_classes
    spec = MlpSpec(x_train.shape[1], config.n_hidden, k)
    y_train = one_hot(train.labels, k)
    y_test = one_hot(test.labels, k)

    rng = np.random.default_rng(config.seed)
    params = init_params(spec, rng)
    accumulator = np.zeros(spec.n_params)

    def evaluate(theta, epoch):
        p_train, hidden = forward(theta, spec, x_train)
        p_test, _ = forward(theta, spec, x_test)
        return EpochMetrics(
            epoch=epoch,
            train_loss=empirical_risk(p_train, y_train),
            test_loss=empirical_risk(p_test, y_test),
            train_acc=accuracy(p_train, train.labels),
            test_acc=accuracy(p_test, test.labels),
            spread_per_class=_vector_spread(hidden, train.labels, k),
            mean_overlaps=_vector_overlaps(hidden, train.labels, k),
        )

    history = [evaluate(params, 0)]
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(train.n)
        for start in range(0, train.n, config.batch_size):
            batch = order[start : start + config.batch_size]
            g = mlp_gradient(params, spec, x_train[batch], y_train[batch])
            params, accumulator = adagrad_step(params, g, accumulator, config.learning_rate)
        history.append(evaluate(params, epoch))

    return TrainRecord(
        kind="mlp",
        n_train=train.n,
        n_params=spec.n_params,
        epochs=config.epochs,
        seed=config.seed,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        metrics=history,
        final_params=params,
    )


def hidden_for_params(params: np.ndarray, spec: MlpSpec, ds: Dataset) -> np.ndarray:
    """Hidden activations of every example, for external geometry checks."""
    _, hidden = forward(params, spec, feature_vectors(ds))
    return hidden


def _vector_spread(vectors, labels, n_classes) -> list:
    labels = np.asarray(labels)
    out = []
    for k in range(n_classes):
        idx = np.flatnonzero(labels == k)
        if idx.size == 0:
            raise ValueError(f"class {k} has no examples")
        diffs = vectors[idx] - vectors[idx].mean(axis=0)
        out.append(float(np.sum(np.linalg.norm(diffs, axis=1))))
    return out


def _vector_overlaps(vectors, labels, n_classes) -> list:
    labels = np.asarray(labels)
    means = np.stack(
        [vectors[np.flatnonzero(labels == k)].mean(axis=0) for k in range(n_classes)]
    )
    return (means @ means.T).tolist()
