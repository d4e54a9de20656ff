import json

import numpy as np
import pytest

from qcrisk.classifier import (
    SUMMARY_COLUMNS,
    CollapsedOptimum,
    LossConfig,
    TrainConfig,
    accuracy,
    adagrad_step,
    collapse_constant,
    collapsed_optimum,
    collapsed_optimum_fixed_ops,
    empirical_risk,
    gradient,
    loss,
    one_hot,
    predict,
    predict_features,
    record_lines,
    summary_row,
    target_matrix,
    train_qc,
)
from qcrisk.core import PAULI_I, AnsatzSpec, EncoderSpec, encode, rotation_matrix
from qcrisk.data import Dataset, gen_parity
from qcrisk.measurements import basis_measurements, qubit_sic_povm, simplex_frame


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def lift(mat, wire, n_qubits):
    return kron_all([mat if i == wire else PAULI_I for i in range(n_qubits)])


def cnot_matrix(control, target, n_qubits):
    dim = 2**n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        if bits[control]:
            bits[target] ^= 1
        row = sum(b << (n_qubits - 1 - q) for q, b in enumerate(bits))
        out[row, col] = 1.0
    return out


def ansatz_matrix(spec):
    n = spec.n_qubits
    theta = spec.params.reshape(spec.n_layers, n, 3)
    u = np.eye(2**n, dtype=complex)
    for l in range(spec.n_layers):
        for wire in range(n):
            for axis, angle in zip("zyz", theta[l, wire]):
                u = lift(rotation_matrix(axis, angle), wire, n) @ u
        if n > 1:
            for wire in range(n):
                u = cnot_matrix(wire, (wire + 1) % n, n) @ u
    return u


def dense_predict(x, enc, spec, ms):
    """Full-matrix reference: build the unitary, reduce, trace by hand."""
    psi = ansatz_matrix(spec) @ encode(enc, x).amplitudes
    block = psi.reshape(2**ms.d_qubits, -1)
    rho = block @ block.conj().T
    return np.array([np.trace(rho @ o).real for o in ms.operators])


def random_bitstrings(rng, n_bits, count):
    return [format(int(v), f"0{n_bits}b") for v in rng.integers(0, 2**n_bits, count)]


def loss_at(params, xs, labels, enc, n_layers, ms, cfg):
    ansatz = AnsatzSpec(enc.n_qubits, n_layers, params)
    h, rho = predict_features(xs, enc, ansatz, ms)
    return loss(h, labels, features=rho, cfg=cfg, operators=ms.operators)


def fd_gradient(params, xs, labels, enc, n_layers, ms, cfg, step=1e-5):
    g = np.zeros_like(params)
    for i in range(len(params)):
        up, dn = params.copy(), params.copy()
        up[i] += step
        dn[i] -= step
        g[i] = (
            loss_at(up, xs, labels, enc, n_layers, ms, cfg)
            - loss_at(dn, xs, labels, enc, n_layers, ms, cfg)
        ) / (2 * step)
    return g


# --- targets and losses ------------------------------------------------------


def test_one_hot():
    got = one_hot([2, 0], 3)
    assert np.array_equal(got, [[0, 0, 1], [1, 0, 0]])


def test_simplex_targets_are_unit_frame_columns():
    cfg = LossConfig(etf_label_mode=True)
    targets = target_matrix([0, 1, 2], 3, cfg)
    assert np.allclose(np.linalg.norm(targets, axis=1), 1.0)
    frame = simplex_frame(3)
    assert np.allclose(targets, frame.T)
    # off-diagonal inner products sit at -1/(K-1)
    assert np.allclose(targets @ targets.T - np.eye(3), -0.5 * (1 - np.eye(3)))


def test_empirical_risk_hand_values():
    assert empirical_risk([[1.0, 0.0]], [[1.0, 0.0]]) == 0.0
    assert empirical_risk([[0.5, 0.5]], [[1.0, 0.0]]) == pytest.approx(0.25)
    with pytest.raises(ValueError, match="shape"):
        empirical_risk([[1.0, 0.0]], [[1.0, 0.0, 0.0]])


def test_loss_adds_summed_regularizers():
    rho = np.array([np.eye(2) / 2, np.eye(2) / 2])  # ||rho||_F^2 = 1/2 each
    ops = np.array([np.eye(2), np.eye(2)])  # ||o||_F^2 = 2 each
    preds = one_hot([0, 1], 2)
    cfg = LossConfig("regularized_rho_fixed_o", lambda_rho=0.4)
    assert loss(preds, [0, 1], features=rho, cfg=cfg) == pytest.approx(0.2)
    cfg = LossConfig("regularized_rho_o", lambda_rho=0.4, lambda_o=0.1)
    got = loss(preds, [0, 1], features=rho, cfg=cfg, operators=ops)
    assert got == pytest.approx(0.2 + 0.05 * 4)


def test_loss_config_validation():
    with pytest.raises(ValueError, match="variant"):
        LossConfig("mse")
    with pytest.raises(ValueError, match="plain_mse"):
        LossConfig("plain_mse", lambda_rho=0.1)
    with pytest.raises(ValueError, match=">= 0"):
        LossConfig("regularized_rho_o", lambda_rho=-1.0)
    cfg = LossConfig("regularized_rho_fixed_o", lambda_rho=0.1)
    with pytest.raises(ValueError, match="feature states"):
        loss([[1.0, 0.0]], [0], cfg=cfg)
    cfg = LossConfig("regularized_rho_o", lambda_rho=0.1, lambda_o=0.1)
    with pytest.raises(ValueError, match="operators"):
        loss([[1.0, 0.0]], [0], features=np.zeros((1, 2, 2)), cfg=cfg)


def test_accuracy_argmax_and_ties():
    preds = [[0.9, 0.1], [0.2, 0.8], [0.5, 0.5]]
    assert accuracy(preds, [0, 1, 0]) == 1.0  # tie resolves to index 0
    assert accuracy(preds, [1, 1, 1]) == pytest.approx(1 / 3)


# --- prediction --------------------------------------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_predict_matches_dense_reference(seed):
    rng = np.random.default_rng(100 + seed)
    enc = EncoderSpec("basis", 3)
    spec = AnsatzSpec(3, 2, rng.uniform(0, 2 * np.pi, 18))
    ms = basis_measurements(2, 1)
    x = random_bitstrings(rng, 3, 1)[0]
    assert np.allclose(predict(x, enc, spec, ms), dense_predict(x, enc, spec, ms), atol=1e-10)


def test_predict_amplitude_encoder_against_dense():
    rng = np.random.default_rng(11)
    vec = rng.normal(size=4) + 1j * rng.normal(size=4)
    vec /= np.linalg.norm(vec)
    enc = EncoderSpec("amplitude", 2)
    spec = AnsatzSpec(2, 1, rng.uniform(0, 2 * np.pi, 6))
    ms = qubit_sic_povm()
    got = predict(vec, enc, spec, ms)
    assert np.allclose(got, dense_predict(vec, enc, spec, ms), atol=1e-10)
    # the four outcome operators sum to the identity
    assert got.sum() == pytest.approx(1.0, abs=1e-10)


def test_predict_features_batch_equals_loop():
    rng = np.random.default_rng(12)
    enc = EncoderSpec("basis", 3)
    spec = AnsatzSpec(3, 1, rng.uniform(0, 2 * np.pi, 9))
    ms = basis_measurements(4, 2)
    xs = random_bitstrings(rng, 3, 6)
    h, rho = predict_features(xs, enc, spec, ms)
    assert h.shape == (6, 4) and rho.shape == (6, 4, 4)
    for i, x in enumerate(xs):
        assert np.allclose(h[i], predict(x, enc, spec, ms), atol=1e-12)
        assert np.trace(rho[i]).real == pytest.approx(1.0)
        assert np.allclose(rho[i], rho[i].conj().T, atol=1e-12)


def test_predict_wiring_validation():
    enc = EncoderSpec("basis", 2)
    spec = AnsatzSpec(3, 1, np.zeros(9))
    with pytest.raises(ValueError, match="qubit count"):
        predict("01", enc, spec, basis_measurements(2, 1))
    spec = AnsatzSpec(2, 1, np.zeros(6))
    with pytest.raises(ValueError, match="more wires"):
        predict("01", enc, spec, basis_measurements(8, 3))


# --- gradients ----------------------------------------------------------------


@pytest.mark.parametrize("case", range(20))
def test_gradient_matches_finite_differences(case):
    rng = np.random.default_rng(300 + case)
    n = int(rng.integers(1, 5))
    n_layers = int(rng.integers(1, 3))
    d = int(rng.integers(1, n + 1))
    variant = ("plain_mse", "regularized_rho_fixed_o", "regularized_rho_o")[case % 3]
    if variant == "plain_mse":
        cfg = LossConfig(etf_label_mode=(case % 5 == 0))
    elif variant == "regularized_rho_fixed_o":
        cfg = LossConfig(variant, lambda_rho=0.3, etf_label_mode=(case % 5 == 0))
    else:
        cfg = LossConfig(variant, lambda_rho=0.2, lambda_o=0.1)
    enc = EncoderSpec("basis", n)
    ms = basis_measurements(2, d)
    spec = AnsatzSpec(n, n_layers, rng.uniform(0, 2 * np.pi, 3 * n * n_layers))
    xs = random_bitstrings(rng, n, 3)
    labels = rng.integers(0, 2, size=3)
    got = gradient(xs, labels, enc, spec, ms, cfg)
    want = fd_gradient(spec.params, xs, labels, enc, n_layers, ms, cfg)
    assert np.max(np.abs(got - want)) < 1e-6


def test_gradient_finite_differences_sic_readout():
    rng = np.random.default_rng(42)
    enc = EncoderSpec("basis", 2)
    ms = qubit_sic_povm()
    spec = AnsatzSpec(2, 2, rng.uniform(0, 2 * np.pi, 12))
    xs = ["00", "01", "10", "11"]
    labels = np.array([0, 1, 2, 3])
    cfg = LossConfig("regularized_rho_fixed_o", lambda_rho=0.25)
    got = gradient(xs, labels, enc, spec, ms, cfg)
    want = fd_gradient(spec.params, xs, labels, enc, 2, ms, cfg)
    assert np.max(np.abs(got - want)) < 1e-6


def test_gradient_unchanged_by_duplicating_the_batch():
    # the plain risk is a mean, so repeating every sample cannot move it
    rng = np.random.default_rng(9)
    enc = EncoderSpec("basis", 3)
    ms = basis_measurements(2, 1)
    spec = AnsatzSpec(3, 1, rng.uniform(0, 2 * np.pi, 9))
    xs = ["010", "111"]
    labels = np.array([0, 1])
    g1 = gradient(xs, labels, enc, spec, ms)
    g2 = gradient(xs * 2, np.tile(labels, 2), enc, spec, ms)
    assert np.allclose(g1, g2, atol=1e-12)


def test_gradient_vanishes_at_a_toy_minimum():
    # N=1, params [rz, ry, rz] on |0>: only the middle angle moves the
    # readout, and the loss sin(theta/2)^4 bottoms out at theta = 0
    enc = EncoderSpec("basis", 1)
    ms = basis_measurements(2, 1)
    spec = AnsatzSpec(1, 1, np.zeros(3))
    g = gradient(["0"], np.array([0]), enc, spec, ms)
    assert np.max(np.abs(g)) < 1e-8


def test_basis_readout_lies_in_unit_interval_and_sums_to_one():
    rng = np.random.default_rng(13)
    enc = EncoderSpec("basis", 3)
    spec = AnsatzSpec(3, 2, rng.uniform(0, 2 * np.pi, 18))
    ms = basis_measurements(4, 2)  # complete projector set on the kept wires
    h, _ = predict_features(random_bitstrings(rng, 3, 8), enc, spec, ms)
    assert np.all(h >= -1e-9) and np.all(h <= 1 + 1e-9)
    assert np.allclose(h.sum(axis=1), 1.0, atol=1e-9)


def test_argmax_survives_common_operator_scaling():
    from qcrisk.measurements import MeasurementSet

    rng = np.random.default_rng(14)
    enc = EncoderSpec("basis", 3)
    spec = AnsatzSpec(3, 2, rng.uniform(0, 2 * np.pi, 18))
    ms = basis_measurements(4, 2)
    scaled = MeasurementSet(2, 3.7 * ms.operators, 3.7**2, 3.7)
    xs = random_bitstrings(rng, 3, 16)
    h, _ = predict_features(xs, enc, spec, ms)
    hs, _ = predict_features(xs, enc, spec, scaled)
    assert np.array_equal(np.argmax(h, axis=1), np.argmax(hs, axis=1))


# --- the optimizer step -------------------------------------------------------


def test_adagrad_first_step_is_signed_learning_rate():
    params = np.array([1.0, -2.0])
    grad = np.array([3.0, -0.5])
    new, acc = adagrad_step(params, grad, np.zeros(2), learning_rate=0.1)
    assert np.allclose(new, params - 0.1 * np.sign(grad), atol=1e-9)
    assert np.allclose(acc, grad**2)


def test_adagrad_second_identical_step_shrinks_by_sqrt2():
    params = np.zeros(1)
    grad = np.array([2.0])
    params, acc = adagrad_step(params, grad, np.zeros(1), 0.1)
    params, acc = adagrad_step(params, grad, acc, 0.1)
    assert params[0] == pytest.approx(-0.1 - 0.1 / np.sqrt(2), abs=1e-9)


# --- the analytic optimum -----------------------------------------------------


def test_collapse_constant_value_and_bounds():
    cfg = LossConfig("regularized_rho_o", lambda_rho=0.01, lambda_o=0.01)
    assert collapse_constant(cfg, 2, 4) == pytest.approx(0.04)
    with pytest.raises(ValueError, match="exceeds per_class"):
        collapse_constant(LossConfig("regularized_rho_o", 0.01, 0.05), 2, 4)
    with pytest.raises(ValueError, match="exceeds 1"):
        collapse_constant(LossConfig("regularized_rho_o", 0.02, 0.02), 10, 100)
    with pytest.raises(ValueError, match="fully regularized"):
        collapse_constant(LossConfig(), 2, 4)


@pytest.mark.parametrize("convention", ["total", "per_class"])
def test_collapsed_optimum_risk_and_alignment(convention):
    k, per_class = 3, 5
    lam_rho, lam_o = 0.004, 0.002
    opt = collapsed_optimum(k, 2, per_class, lam_rho, lam_o, convention)
    c1 = opt.collapse_constant
    assert c1 == pytest.approx(k * np.sqrt(per_class * lam_o * lam_rho))
    preds = np.einsum("nij,kji->nk", opt.features, opt.operators).real
    targets = one_hot(opt.labels, k)
    assert np.allclose(preds, (1 - c1) * targets, atol=1e-12)
    assert empirical_risk(preds, targets) == pytest.approx(c1**2 / 2, abs=1e-12)
    align = np.einsum("nij,kji->nk", opt.class_means, opt.operators).real
    assert np.allclose(np.diag(align), 1 - c1, atol=1e-12)
    assert np.max(np.abs(align - np.diag(np.diag(align)))) < 1e-12


def test_collapsed_optimum_per_class_hits_the_analytic_total():
    k, per_class = 2, 4
    lam_rho = lam_o = 0.01
    opt = collapsed_optimum(k, 1, per_class, lam_rho, lam_o, "per_class")
    c1 = opt.collapse_constant
    preds = np.einsum("nij,kji->nk", opt.features, opt.operators).real
    cfg = LossConfig("regularized_rho_o", lambda_rho=lam_rho, lambda_o=lam_o)
    total = loss(preds, opt.labels, features=opt.features, cfg=cfg, operators=opt.operators)
    assert total == pytest.approx(c1 - c1**2 / 2, abs=1e-12)


def test_collapsed_optimum_needs_room_for_orthogonal_means():
    with pytest.raises(ValueError, match="n_classes"):
        collapsed_optimum(5, 2, 3, 0.01, 0.01)
    with pytest.raises(ValueError, match="convention"):
        collapsed_optimum(2, 2, 3, 0.01, 0.01, "mean")


def test_collapsed_optimum_fixed_ops_is_exact():
    opt = collapsed_optimum_fixed_ops(basis_measurements(3, 2), per_class=4)
    preds = np.einsum("nij,kji->nk", opt.features, opt.operators).real
    assert empirical_risk(preds, one_hot(opt.labels, 3)) == 0.0
    align = np.einsum("nij,kji->nk", opt.class_means, opt.operators).real
    assert np.allclose(align, np.eye(3), atol=1e-12)
    with pytest.raises(ValueError, match="orthogonal"):
        collapsed_optimum_fixed_ops(qubit_sic_povm(), per_class=4)


# --- training ----------------------------------------------------------------


def train_config(**overrides):
    base = dict(
        n_layers=1,
        epochs=2,
        learning_rate=0.5,
        batch_size=2,
        seed=5,
        encoder=EncoderSpec("basis", 2),
        measurements=basis_measurements(2, 1),
    )
    base.update(overrides)
    return TrainConfig(**base)


def test_train_qc_record_shape_and_echo():
    ds = gen_parity(2)
    record = train_qc(ds, ds, train_config(epochs=3))
    assert record.kind == "qc"
    assert record.n_train == 4
    assert record.n_params == 6
    assert len(record.metrics) == 4
    assert [m.epoch for m in record.metrics] == [0, 1, 2, 3]
    assert record.final_params.shape == (6,)
    for m in record.metrics:
        assert np.isfinite([m.train_loss, m.test_loss, m.train_acc, m.test_acc]).all()
        assert len(m.spread_per_class) == 2
        assert np.asarray(m.mean_overlaps).shape == (2, 2)


def test_train_qc_is_deterministic():
    ds = gen_parity(2)
    a = train_qc(ds, ds, train_config())
    b = train_qc(ds, ds, train_config())
    assert record_lines(a) == record_lines(b)
    assert np.array_equal(a.final_params, b.final_params)
    c = train_qc(ds, ds, train_config(seed=6))
    assert record_lines(a) != record_lines(c)


def test_train_qc_on_epoch_callback():
    ds = gen_parity(2)
    seen = []
    train_qc(ds, ds, train_config(), on_epoch=lambda e, p, rho: seen.append((e, p.shape, rho.shape)))
    assert [s[0] for s in seen] == [0, 1, 2]
    assert all(s[1] == (6,) and s[2] == (4, 2, 2) for s in seen)


def test_train_qc_zero_epochs_records_the_initial_point():
    ds = gen_parity(2)
    record = train_qc(ds, ds, train_config(epochs=0))
    assert len(record.metrics) == 1
    assert record.metrics[0].epoch == 0


def test_train_qc_regularized_runs_and_checks_balance():
    ds = gen_parity(2)
    cfg = LossConfig("regularized_rho_o", lambda_rho=0.02, lambda_o=0.02)
    record = train_qc(ds, ds, train_config(epochs=1, loss=cfg))
    assert record.metrics[-1].train_loss > 0
    lopsided = Dataset("bitstring", ["00", "01", "10"], [1, 0, 0], 2)
    with pytest.raises(ValueError, match="balanced"):
        train_qc(lopsided, ds, train_config(loss=cfg))


def test_train_qc_dataset_validation():
    ds = gen_parity(2)
    amp = Dataset("amplitude", np.eye(4), [0, 1, 0, 1], 2)
    with pytest.raises(ValueError, match="bitstring dataset"):
        train_qc(amp, amp, train_config())
    with pytest.raises(ValueError, match="classes"):
        train_qc(ds, ds, train_config(measurements=basis_measurements(3, 2)))
    with pytest.raises(ValueError, match="empty"):
        train_qc(ds.take([]), ds, train_config())


def test_train_config_validation():
    with pytest.raises(ValueError, match="n_layers"):
        train_config(n_layers=0)
    with pytest.raises(ValueError, match="learning_rate"):
        train_config(learning_rate=0.0)
    with pytest.raises(ValueError, match="batch_size"):
        train_config(batch_size=0)
    with pytest.raises(ValueError, match="epochs"):
        train_config(epochs=-1)


# --- serialization -------------------------------------------------------------


def test_record_lines_are_sorted_json_with_config_echo():
    ds = gen_parity(2)
    record = train_qc(ds, ds, train_config(epochs=1))
    lines = record_lines(record)
    assert len(lines) == 2
    for line in lines:
        doc = json.loads(line)
        assert list(doc) == sorted(doc)
        assert doc["seed"] == 5 and doc["n"] == 4 and doc["n_params"] == 6
    assert json.loads(lines[0])["epoch"] == 0
    assert json.loads(lines[1])["epoch"] == 1


def test_summary_row_matches_columns():
    ds = gen_parity(2)
    record = train_qc(ds, ds, train_config(epochs=1))
    row = summary_row(record)
    assert tuple(row) == SUMMARY_COLUMNS
    assert row["n"] == 4 and row["N_t"] == 6 and row["T"] == 1
    assert row["final_test_loss"] == record.metrics[-1].test_loss


def test_tail_test_loss_averages_the_window():
    ds = gen_parity(2)
    record = train_qc(ds, ds, train_config(epochs=4))
    tail = [m.test_loss for m in record.metrics[-3:]]
    assert record.tail_test_loss(window=3) == pytest.approx(np.mean(tail))
    assert record.final_test_loss() == record.metrics[-1].test_loss
