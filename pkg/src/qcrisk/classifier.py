"""The variational classifier: encode, run the ansatz, reduce to the
feature register, read out one expectation per class.

Training minimizes mean squared error between the expectation vector and
the (one-hot or simplex-frame) label vector, with optional Frobenius
regularization of the feature states and of the measurement operators.
Gradients use the two-point shift rule: each parameter is re-evaluated at
+pi/2 and -pi/2, reusing the cached circuit prefix so only the suffix is
re-simulated. AdaGrad does the stepping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from qcrisk.core import (
    AnsatzSpec,
    EncoderSpec,
    _ansatz_program,
    _apply_1q,
    _reduced,
    _run_program,
    encode,
    rotation_matrix,
)
from qcrisk.data import Dataset
from qcrisk.geometry import class_means, mean_overlap_matrix, within_class_spread
from qcrisk.measurements import MeasurementSet, simplex_frame

LOSS_VARIANTS = ("plain_mse", "regularized_rho_o", "regularized_rho_fixed_o")


@dataclass(frozen=True)
class LossConfig:
    """Which loss to optimize.

    plain_mse: mean over samples of 0.5 * ||h(x) - y||^2.
    regularized_rho_fixed_o: adds (lambda_rho / 2) * sum_i ||rho_i||_F^2
        with the operators held fixed.
    regularized_rho_o: additionally adds (lambda_o / 2) * sum_k ||o_k||_F^2.
        Requires lambda_o <= n_c * lambda_rho and
        K * sqrt(n_c * lambda_o * lambda_rho) <= 1 on balanced data with
        n_c examples per class.
    etf_label_mode: targets are simplex-frame columns instead of one-hot.
    """

    variant: str = "plain_mse"
    lambda_rho: float = 0.0
    lambda_o: float = 0.0
    etf_label_mode: bool = False

    def __post_init__(self):
        if self.variant not in LOSS_VARIANTS:
            raise ValueError(f"unknown loss variant {self.variant!r}")
        if self.lambda_rho < 0 or self.lambda_o < 0:
            raise ValueError("regularization weights must be >= 0")
        if self.variant == "plain_mse" and (self.lambda_rho or self.lambda_o):
            raise ValueError("plain_mse takes no regularization weights")

    @property
    def regularizes_features(self) -> bool:
        return self.variant in ("regularized_rho_o", "regularized_rho_fixed_o")


def collapse_constant(cfg: LossConfig, n_classes: int, per_class: int) -> float:
    """The constant governing how far the fully regularized optimum sits
    from a perfect fit; its square over two is the optimal risk term."""
    if cfg.variant != "regularized_rho_o":
        raise ValueError("constant is defined for the fully regularized loss")
    if cfg.lambda_o > per_class * cfg.lambda_rho:
        raise ValueError(
            f"lambda_o={cfg.lambda_o} exceeds per_class * lambda_rho="
            f"{per_class * cfg.lambda_rho}"
        )
    c1 = n_classes * np.sqrt(per_class * cfg.lambda_o * cfg.lambda_rho)
    if c1 > 1.0:
        raise ValueError(f"collapse constant {c1:.4f} exceeds 1")
    return float(c1)


def one_hot(labels, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    out = np.zeros((len(labels), n_classes))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def target_matrix(labels, n_classes: int, cfg: LossConfig) -> np.ndarray:
    """(n, K) training targets: one-hot rows, or simplex-frame columns."""
    if not cfg.etf_label_mode:
        return one_hot(labels, n_classes)
    frame = simplex_frame(n_classes)
    return frame.T[np.asarray(labels, dtype=int)]


def empirical_risk(predictions, targets) -> float:
    predictions = np.atleast_2d(np.asarray(predictions, dtype=float))
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    if predictions.shape != targets.shape:
        raise ValueError("predictions and targets disagree on shape")
    return float(np.mean(0.5 * np.sum((predictions - targets) ** 2, axis=1)))


def loss(predictions, labels, features=None, cfg: LossConfig = LossConfig(), operators=None) -> float:
    """Configured loss value. The risk term averages over samples; the
    regularizers sum over them (and over operators), so they are evaluated
    on exactly the sample set passed in."""
    predictions = np.atleast_2d(np.asarray(predictions, dtype=float))
    total = empirical_risk(predictions, target_matrix(labels, predictions.shape[1], cfg))
    if cfg.regularizes_features:
        if features is None:
            raise ValueError(f"{cfg.variant} needs the feature states")
        mats = np.asarray(features)
        total += 0.5 * cfg.lambda_rho * float(np.sum(np.abs(mats) ** 2))
    if cfg.variant == "regularized_rho_o":
        if operators is None:
            raise ValueError("regularized_rho_o needs the operators")
        total += 0.5 * cfg.lambda_o * float(np.sum(np.abs(np.asarray(operators)) ** 2))
    return float(total)


def accuracy(predictions, labels) -> float:
    """Fraction with argmax(prediction) == label; ties go to the lowest
    index, matching numpy's argmax."""
    predictions = np.atleast_2d(np.asarray(predictions, dtype=float))
    return float(np.mean(np.argmax(predictions, axis=1) == np.asarray(labels)))


# --- circuit evaluation ----------------------------------------------------


def predict(x, enc: EncoderSpec, ansatz: AnsatzSpec, ms: MeasurementSet) -> np.ndarray:
    """Per-class expectations for a single input."""
    h, _ = predict_features([x], enc, ansatz, ms)
    return h[0]


def predict_features(xs, enc: EncoderSpec, ansatz: AnsatzSpec, ms: MeasurementSet):
    """Predictions plus reduced feature states for a batch of inputs.

    Returns (h, rho): h is (n, K) real, rho is (n, dim, dim) complex.
    """
    _check_wiring(enc, ansatz, ms)
    psi = _encode_columns(xs, enc)
    psi = _run_program(psi, _ansatz_program(ansatz.n_qubits, ansatz.n_layers), ansatz.params)
    rho = _reduced(psi, ms.d_qubits)
    return _expectations(rho, ms.operators), rho


def gradient(
    xs,
    labels,
    enc: EncoderSpec,
    ansatz: AnsatzSpec,
    ms: MeasurementSet,
    cfg: LossConfig = LossConfig(),
) -> np.ndarray:
    """Exact gradient of the batch loss by the two-point shift rule.

    For every parameter the relevant expectations are re-evaluated at
    +pi/2 and -pi/2; the state just before the shifted rotation is cached
    from the forward pass, so each evaluation only re-runs the circuit
    suffix. The feature-regularizer derivative comes from the same rule
    applied to Tr(rho(theta') rho), which differentiates the purity.
    """
    _check_wiring(enc, ansatz, ms)
    program = _ansatz_program(ansatz.n_qubits, ansatz.n_layers)
    params = ansatz.params
    targets = target_matrix(labels, ms.n_operators, cfg)

    prefixes: dict[int, np.ndarray] = {}
    psi = _encode_columns(xs, enc)
    psi = _run_program(psi, program, params, prefixes=prefixes)
    rho0 = _reduced(psi, ms.d_qubits)
    resid = _expectations(rho0, ms.operators) - targets

    n_batch = resid.shape[0]
    lam = cfg.lambda_rho if cfg.regularizes_features else 0.0
    rotations = [
        (op[3], op[1], op[2], pos + 1)
        for pos, op in enumerate(program)
        if op[0] == "rot"
    ]
    grad = np.zeros(ansatz.n_params)
    for p, axis, wire, resume_at in rotations:
        # both shifts ride one widened batch through the circuit suffix
        pre = prefixes[p]
        psi_s = np.concatenate(
            [
                _apply_1q(pre, rotation_matrix(axis, params[p] + np.pi / 2), wire),
                _apply_1q(pre, rotation_matrix(axis, params[p] - np.pi / 2), wire),
            ],
            axis=1,
        )
        psi_s = _run_program(psi_s, program, params, start=resume_at)
        rho_s = _reduced(psi_s, ms.d_qubits)
        h_s = _expectations(rho_s, ms.operators)
        dh = 0.5 * (h_s[:n_batch] - h_s[n_batch:])
        grad[p] = np.sum(resid * dh) / n_batch
        if lam:
            tr_plus = np.einsum("bij,bji->b", rho0, rho_s[:n_batch]).real
            tr_minus = np.einsum("bij,bji->b", rho0, rho_s[n_batch:]).real
            grad[p] += 0.5 * lam * float(np.sum(tr_plus - tr_minus))
    return grad


def adagrad_step(params, grad, accumulator, learning_rate: float, eps: float = 1e-10):
    """One AdaGrad update; returns (new_params, new_accumulator)."""
    acc = accumulator + np.asarray(grad) ** 2
    return params - learning_rate * grad / (np.sqrt(acc) + eps), acc


# --- training --------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    n_layers: int
    epochs: int
    learning_rate: float
    batch_size: int
    seed: int
    encoder: EncoderSpec
    measurements: MeasurementSet
    loss: LossConfig = field(default_factory=LossConfig)

    def __post_init__(self):
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    test_loss: float
    train_acc: float
    test_acc: float
    spread_per_class: list
    mean_overlaps: list


@dataclass
class TrainRecord:
    """Everything one run produced: a config echo plus per-epoch metrics.

    metrics[0] is the pre-training evaluation, so a run with T epochs has
    T + 1 entries.
    """

    kind: str
    n_train: int
    n_params: int
    epochs: int
    seed: int
    learning_rate: float
    batch_size: int
    metrics: list[EpochMetrics]
    final_params: np.ndarray | None = None

    def final_test_loss(self) -> float:
        return self.metrics[-1].test_loss

    def tail_test_loss(self, window: int = 5) -> float:
        tail = self.metrics[-min(window, len(self.metrics)):]
        return float(np.mean([m.test_loss for m in tail]))


def train_qc(train: Dataset, test: Dataset, config: TrainConfig, on_epoch=None) -> TrainRecord:
    """Mini-batch AdaGrad on the circuit parameters.

    Parameters start uniform on [0, 2pi); each epoch reshuffles the batch
    order from the run's generator, so a fixed seed reproduces the record
    bit for bit. ``on_epoch(epoch, params, train_features)`` is called
    after the initial evaluation and after every epoch.
    """
    enc, ms = config.encoder, config.measurements
    _check_dataset(train, enc, ms)
    _check_dataset(test, enc, ms)
    if config.loss.variant == "regularized_rho_o":
        counts = train.class_counts()
        if counts.min() != counts.max():
            raise ValueError("the fully regularized loss expects balanced classes")
        collapse_constant(config.loss, train.n_classes, int(counts[0]))

    rng = np.random.default_rng(config.seed)
    n_params = 3 * enc.n_qubits * config.n_layers
    params = rng.uniform(0.0, 2.0 * np.pi, n_params)
    accumulator = np.zeros(n_params)

    def evaluate(theta, epoch):
        ansatz = AnsatzSpec(enc.n_qubits, config.n_layers, theta)
        h_train, rho_train = predict_features(train.features, enc, ansatz, ms)
        h_test, rho_test = predict_features(test.features, enc, ansatz, ms)
        kw = dict(cfg=config.loss, operators=ms.operators)
        means = class_means(rho_train, train.labels, train.n_classes)
        metrics = EpochMetrics(
            epoch=epoch,
            train_loss=loss(h_train, train.labels, features=rho_train, **kw),
            test_loss=loss(h_test, test.labels, features=rho_test, **kw),
            train_acc=accuracy(h_train, train.labels),
            test_acc=accuracy(h_test, test.labels),
            spread_per_class=within_class_spread(rho_train, train.labels, train.n_classes).tolist(),
            mean_overlaps=mean_overlap_matrix(means).tolist(),
        )
        if on_epoch is not None:
            on_epoch(epoch, theta.copy(), rho_train)
        return metrics

    history = [evaluate(params, 0)]
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(train.n)
        for start in range(0, train.n, config.batch_size):
            batch = order[start : start + config.batch_size]
            xs = [train.features[i] for i in batch] if train.kind == "bitstring" else train.features[batch]
            ansatz = AnsatzSpec(enc.n_qubits, config.n_layers, params)
            g = gradient(xs, train.labels[batch], enc, ansatz, ms, config.loss)
            params, accumulator = adagrad_step(params, g, accumulator, config.learning_rate)
        history.append(evaluate(params, epoch))

    return TrainRecord(
        kind="qc",
        n_train=train.n,
        n_params=n_params,
        epochs=config.epochs,
        seed=config.seed,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        metrics=history,
        final_params=params,
    )


# --- the analytic collapsed optimum ----------------------------------------


@dataclass(frozen=True)
class CollapsedOptimum:
    """The closed-form minimizer of the regularized loss on balanced data:
    every feature sits exactly on its class mean, the means occupy
    orthogonal supports, and each operator is a rescaled class mean."""

    features: np.ndarray
    labels: np.ndarray
    class_means: np.ndarray
    operators: np.ndarray
    collapse_constant: float
    mean_norm_sq: float
    operator_scale: float
    scale_convention: str


def collapsed_optimum(
    n_classes: int,
    d_qubits: int,
    per_class: int,
    lambda_rho: float,
    lambda_o: float,
    scale_convention: str = "total",
) -> CollapsedOptimum:
    """Construct the regularized optimum directly, without training.

    ``scale_convention`` picks which sample count sets the operator scale:
    "total" uses n = K * per_class, "per_class" uses per_class alone. The
    two give the same risk term and the same alignment diagonal, because
    the scale cancels from the predictions; only the split between the two
    regularizer totals moves (the per-class scaling is the one that lands
    the summed loss exactly on its analytic minimum).
    """
    if scale_convention not in ("total", "per_class"):
        raise ValueError(f"unknown scale convention {scale_convention!r}")
    dim = 2**d_qubits
    if n_classes > dim:
        raise ValueError("orthogonal class means need n_classes <= 2**d_qubits")
    cfg = LossConfig("regularized_rho_o", lambda_rho=lambda_rho, lambda_o=lambda_o)
    c1 = collapse_constant(cfg, n_classes, per_class)
    count = n_classes * per_class if scale_convention == "total" else per_class
    mean_norm_sq = (1.0 - c1) * np.sqrt(lambda_o / (count * lambda_rho))
    operator_scale = np.sqrt(count * lambda_rho / lambda_o)
    means = np.zeros((n_classes, dim, dim), dtype=complex)
    for k in range(n_classes):
        means[k, k, k] = np.sqrt(mean_norm_sq)
    operators = operator_scale * means
    labels = np.repeat(np.arange(n_classes), per_class)
    return CollapsedOptimum(
        features=means[labels],
        labels=labels,
        class_means=means,
        operators=operators,
        collapse_constant=c1,
        mean_norm_sq=float(mean_norm_sq),
        operator_scale=float(operator_scale),
        scale_convention=scale_convention,
    )


def collapsed_optimum_fixed_ops(ms: MeasurementSet, per_class: int) -> CollapsedOptimum:
    """The zero-risk optimum when the operators are fixed and mutually
    orthogonal: class means are the operators over their Gram constant, so
    every prediction is exactly one-hot."""
    if ms.ortho_constant is None:
        raise ValueError("fixed-operator optimum needs an orthogonal set")
    means = ms.operators / ms.ortho_constant
    labels = np.repeat(np.arange(ms.n_operators), per_class)
    return CollapsedOptimum(
        features=means[labels],
        labels=labels,
        class_means=means,
        operators=ms.operators.copy(),
        collapse_constant=0.0,
        mean_norm_sq=float(np.sum(np.abs(means[0]) ** 2).real),
        operator_scale=float(ms.ortho_constant),
        scale_convention="fixed",
    )


# --- record serialization --------------------------------------------------

SUMMARY_COLUMNS = (
    "seed",
    "n",
    "N_t",
    "T",
    "final_train_loss",
    "final_test_loss",
    "final_train_acc",
    "final_test_acc",
)


def record_lines(record: TrainRecord) -> list[str]:
    """One JSON line per recorded epoch, each carrying the config echo."""
    lines = []
    for m in record.metrics:
        doc = {
            "kind": record.kind,
            "n": record.n_train,
            "n_params": record.n_params,
            "epochs": record.epochs,
            "seed": record.seed,
            "learning_rate": record.learning_rate,
            "batch_size": record.batch_size,
            "epoch": m.epoch,
            "train_loss": m.train_loss,
            "test_loss": m.test_loss,
            "train_acc": m.train_acc,
            "test_acc": m.test_acc,
            "spread_per_class": m.spread_per_class,
            "mean_overlaps": m.mean_overlaps,
        }
        lines.append(json.dumps(doc, sort_keys=True))
    return lines


def summary_row(record: TrainRecord) -> dict:
    last = record.metrics[-1]
    return {
        "seed": record.seed,
        "n": record.n_train,
        "N_t": record.n_params,
        "T": record.epochs,
        "final_train_loss": last.train_loss,
        "final_test_loss": last.test_loss,
        "final_train_acc": last.train_acc,
        "final_test_acc": last.test_acc,
    }


# --- helpers ----------------------------------------------------------------


def _expectations(rho, operators) -> np.ndarray:
    return np.einsum("bij,kji->bk", rho, operators).real


def _encode_columns(xs, enc: EncoderSpec) -> np.ndarray:
    cols = [encode(enc, x).amplitudes for x in xs]
    return np.stack(cols, axis=1)


def _check_wiring(enc: EncoderSpec, ansatz: AnsatzSpec, ms: MeasurementSet):
    if ansatz.n_qubits != enc.n_qubits:
        raise ValueError("encoder and ansatz disagree on qubit count")
    if ms.d_qubits > enc.n_qubits:
        raise ValueError("measurement set acts on more wires than the register has")


def _check_dataset(ds: Dataset, enc: EncoderSpec, ms: MeasurementSet):
    wanted = "bitstring" if enc.kind == "basis" else "amplitude"
    if ds.kind != wanted:
        raise ValueError(f"{enc.kind} encoding needs a {wanted} dataset, got {ds.kind}")
    if ds.n_classes != ms.n_operators:
        raise ValueError(
            f"dataset has {ds.n_classes} classes but the measurement set "
            f"has {ms.n_operators} operators"
        )
    if ds.n == 0:
        raise ValueError("dataset is empty")
