"""Config-driven command-line frontend.

Each command reads one JSON config file, checks every field against the
module preconditions before anything runs, then writes machine-readable
artifacts into the output directory. Identical config and seeds produce
byte-identical files, so emitted CSV/JSON can be diffed across reruns.

Exit codes: 0 success, 1 bad usage or config, 2 runtime failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from qcrisk.classifier import (
    SUMMARY_COLUMNS,
    LossConfig,
    TrainConfig,
    accuracy,
    predict_features,
    record_lines,
    summary_row,
    train_qc,
)
from qcrisk.concentration import (
    trials_to_csv,
    verify_ansatz_concentration,
    verify_encoder_concentration,
)
from qcrisk.core import AnsatzSpec, EncoderSpec
from qcrisk.data import (
    IdxError,
    gen_parity,
    load_idx,
    preprocess_images,
    split,
)
from qcrisk.genbound import BoundInputs, bounds_to_csv
from qcrisk.geometry import (
    bloch_vector,
    class_means,
    geometry_report,
    report_to_dict,
)
from qcrisk.measurements import (
    basis_measurements,
    pauli_measurements,
    qubit_sic_povm,
    simplex_etf_operators,
)
from qcrisk.mlp import MlpTrainConfig, train_mlp
from qcrisk.riskcurve import (
    SweepPlan,
    aggregate_points,
    choose_fit,
    fit_to_dict,
    polyfit,
    run_sweep,
    with_basin,
    write_fit_csv,
)

_MISSING = object()


class ConfigError(ValueError):
    """Anything wrong with the config or arguments; message names the field."""


# --- field readers -----------------------------------------------------------


def _section(doc, name, required=True):
    sec = doc.get(name)
    if sec is None:
        if not required:
            return {}
        raise ConfigError(f"{name}: required section")
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected an object")
    return sec


def _int(sec, where, key, default=_MISSING, minimum=None):
    if key not in sec:
        if default is _MISSING:
            raise ConfigError(f"{where}.{key}: required")
        return default
    value = sec[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key}: expected an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}.{key}: must be >= {minimum}")
    return value


def _float(sec, where, key, default=_MISSING, minimum=None, strict=False):
    if key not in sec:
        if default is _MISSING:
            raise ConfigError(f"{where}.{key}: required")
        return default
    value = sec[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number")
    value = float(value)
    if minimum is not None and (value < minimum or (strict and value == minimum)):
        op = ">" if strict else ">="
        raise ConfigError(f"{where}.{key}: must be {op} {minimum}")
    return value


def _str(sec, where, key, default=_MISSING, choices=None):
    if key not in sec:
        if default is _MISSING:
            raise ConfigError(f"{where}.{key}: required")
        return default
    value = sec[key]
    if not isinstance(value, str):
        raise ConfigError(f"{where}.{key}: expected a string")
    if choices is not None and value not in choices:
        raise ConfigError(f"{where}.{key}: must be one of {', '.join(choices)}")
    return value


def _bool(sec, where, key, default=_MISSING):
    if key not in sec:
        if default is _MISSING:
            raise ConfigError(f"{where}.{key}: required")
        return default
    value = sec[key]
    if not isinstance(value, bool):
        raise ConfigError(f"{where}.{key}: expected true or false")
    return value


def _int_list(sec, where, key, default=_MISSING):
    if key not in sec:
        if default is _MISSING:
            raise ConfigError(f"{where}.{key}: required")
        return default
    value = sec[key]
    ok = isinstance(value, list) and value and all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    )
    if not ok:
        raise ConfigError(f"{where}.{key}: expected a non-empty list of integers")
    return list(value)


# --- shared builders ----------------------------------------------------------


def _build_dataset(doc):
    """Returns (full, train, test) per the dataset section."""
    sec = _section(doc, "dataset")
    kind = _str(sec, "dataset", "kind", choices=("parity", "idx"))
    seed = _int(sec, "dataset", "seed", default=0, minimum=0)
    ratio = _float(sec, "dataset", "train_ratio", default=0.75)
    if not 0.0 < ratio < 1.0:
        raise ConfigError("dataset.train_ratio: must be strictly between 0 and 1")
    if kind == "parity":
        bits = _int(sec, "dataset", "bits", default=6, minimum=1)
        full = gen_parity(bits)
    else:
        images = _str(sec, "dataset", "images")
        labels = _str(sec, "dataset", "labels")
        for key, path in (("images", images), ("labels", labels)):
            if not os.path.exists(path):
                raise ConfigError(f"dataset.{key}: file not found: {path}")
        keep = _int(sec, "dataset", "keep_classes", default=9, minimum=1)
        per_class = _int(sec, "dataset", "per_class", default=20, minimum=1)
        try:
            raw_images, raw_labels = load_idx(images, labels)
            full = preprocess_images(raw_images, raw_labels, keep, per_class)
        except (IdxError, ValueError) as exc:
            raise ConfigError(f"dataset.images: {exc}") from exc
    try:
        train, test = split(full, ratio, seed)
    except ValueError as exc:
        raise ConfigError(f"dataset.train_ratio: {exc}") from exc
    return full, train, test


def _build_circuit(doc, n_classes):
    sec = _section(doc, "circuit")
    n_qubits = _int(sec, "circuit", "n_qubits", minimum=1)
    enc_kind = _str(sec, "circuit", "encoder", default="basis",
                    choices=("basis", "amplitude"))
    m_kind = _str(sec, "circuit", "measurements", default="basis",
                  choices=("basis", "pauli", "etf", "sic"))
    d_qubits = _int(sec, "circuit", "d_qubits", default=1, minimum=1)
    if d_qubits > n_qubits:
        raise ConfigError("circuit.d_qubits: must not exceed n_qubits")
    encoder = EncoderSpec(enc_kind, n_qubits)
    try:
        if m_kind == "basis":
            ms = basis_measurements(n_classes, d_qubits)
        elif m_kind == "etf":
            ms = simplex_etf_operators(n_classes, d_qubits)
        elif m_kind == "sic":
            ms = qubit_sic_povm()
        else:
            ms = pauli_measurements(n_classes, n_qubits)
    except ValueError as exc:
        raise ConfigError(f"circuit.measurements: {exc}") from exc
    if ms.n_operators != n_classes:
        raise ConfigError(
            f"circuit.measurements: set has {ms.n_operators} operators "
            f"but the dataset has {n_classes} classes")
    if ms.d_qubits > n_qubits:
        raise ConfigError(
            f"circuit.measurements: operators act on {ms.d_qubits} wires "
            f"but the register has {n_qubits}")
    return encoder, ms


def _build_loss(sec, where):
    if sec is None:
        return LossConfig()
    if not isinstance(sec, dict):
        raise ConfigError(f"{where}: expected an object")
    try:
        return LossConfig(
            variant=_str(sec, where, "variant", default="plain_mse"),
            lambda_rho=_float(sec, where, "lambda_rho", default=0.0),
            lambda_o=_float(sec, where, "lambda_o", default=0.0),
            etf_label_mode=_bool(sec, where, "etf_label_mode", default=False),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from exc


# --- output helpers -----------------------------------------------------------


def _emit(quiet, message):
    if not quiet:
        print(message)


def _write_json(path, doc, quiet):
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    _emit(quiet, f"wrote {path}")


def _write_lines(path, lines, quiet):
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")
    _emit(quiet, f"wrote {path}")


def _write_summary_csv(path, records, quiet):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=("kind",) + SUMMARY_COLUMNS)
        writer.writeheader()
        for record in records:
            writer.writerow({"kind": record.kind, **summary_row(record)})
    _emit(quiet, f"wrote {path}")


# --- commands -------------------------------------------------------------------


def cmd_train(doc, out_dir, seed_override, quiet):
    full, train, test = _build_dataset(doc)
    trn = _section(doc, "training")
    kind = _str(trn, "training", "kind", default="qc", choices=("qc", "mlp", "both"))
    epochs = _int(trn, "training", "epochs", minimum=0)
    batch_size = _int(trn, "training", "batch_size", minimum=1)
    if seed_override is not None:
        seeds = [seed_override]
    else:
        seeds = _int_list(trn, "training", "seeds")
    loss_cfg = _build_loss(trn.get("loss"), "training.loss")

    records = []
    geometry_runs = []
    model_runs = []
    circuit_echo = None

    if kind in ("qc", "both"):
        encoder, ms = _build_circuit(doc, full.n_classes)
        n_layers = _int(_section(doc, "circuit"), "circuit", "n_layers", minimum=1)
        lr = _float(trn, "training", "learning_rate", minimum=0.0, strict=True)
        circuit_echo = {
            "n_qubits": encoder.n_qubits,
            "n_layers": n_layers,
            "encoder": encoder.kind,
            "d_qubits": ms.d_qubits,
        }
        for seed in seeds:
            try:
                config = TrainConfig(n_layers, epochs, lr, batch_size, seed,
                                     encoder, ms, loss_cfg)
            except ValueError as exc:
                raise ConfigError(f"training: {exc}") from exc
            bloch = [] if ms.d_qubits == 1 else None

            def on_epoch(epoch, params, rho_train, sink=bloch):
                if sink is not None:
                    means = class_means(rho_train, train.labels, train.n_classes)
                    sink.append({
                        "epoch": epoch,
                        "class_means": [bloch_vector(m).tolist() for m in means],
                    })

            record = train_qc(train, test, config, on_epoch=on_epoch)
            records.append(record)
            ansatz = AnsatzSpec(encoder.n_qubits, n_layers, record.final_params)
            _, rho = predict_features(train.features, encoder, ansatz, ms)
            report = geometry_report(rho, train.labels, train.n_classes, ms)
            geometry_runs.append({
                "kind": "qc",
                "seed": seed,
                "final": report_to_dict(report),
                "bloch_per_epoch": bloch,
            })
            model_runs.append({
                "kind": "qc",
                "seed": seed,
                "n_layers": n_layers,
                "params": [float(v) for v in record.final_params],
            })
            last = record.metrics[-1]
            _emit(quiet, f"qc seed {seed}: train_acc {last.train_acc:.3f} "
                         f"test_acc {last.test_acc:.3f} train_loss {last.train_loss:.3g}")

    if kind in ("mlp", "both"):
        n_hidden = _int(trn, "training", "n_hidden", minimum=1)
        lr_key = "mlp_learning_rate" if kind == "both" else "learning_rate"
        mlp_lr = _float(trn, "training", lr_key, minimum=0.0, strict=True)
        for seed in seeds:
            try:
                config = MlpTrainConfig(n_hidden, epochs, mlp_lr, batch_size, seed)
            except ValueError as exc:
                raise ConfigError(f"training: {exc}") from exc
            record = train_mlp(train, test, config)
            records.append(record)
            model_runs.append({
                "kind": "mlp",
                "seed": seed,
                "n_hidden": n_hidden,
                "params": [float(v) for v in record.final_params],
            })
            last = record.metrics[-1]
            _emit(quiet, f"mlp seed {seed}: train_acc {last.train_acc:.3f} "
                         f"test_acc {last.test_acc:.3f} train_loss {last.train_loss:.3g}")

    _write_lines(os.path.join(out_dir, "train_record.jsonl"),
                 [line for r in records for line in record_lines(r)], quiet)
    _write_summary_csv(os.path.join(out_dir, "summary.csv"), records, quiet)
    _write_json(os.path.join(out_dir, "geometry.json"),
                {"n_classes": full.n_classes, "runs": geometry_runs}, quiet)
    _write_json(os.path.join(out_dir, "model.json"),
                {"circuit": circuit_echo, "loss": {
                    "variant": loss_cfg.variant,
                    "lambda_rho": loss_cfg.lambda_rho,
                    "lambda_o": loss_cfg.lambda_o,
                    "etf_label_mode": loss_cfg.etf_label_mode,
                }, "runs": model_runs}, quiet)


def cmd_riskcurve(doc, out_dir, seed_override, quiet):
    full, train, test = _build_dataset(doc)
    sweep = _section(doc, "sweep")
    kind = _str(sweep, "sweep", "kind", default="qc", choices=("qc", "mlp", "both"))
    if seed_override is not None:
        seeds = [seed_override]
    else:
        seeds = _int_list(sweep, "sweep", "seeds")
    batch_size = _int(sweep, "sweep", "batch_size", default=4, minimum=1)
    loss_cfg = _build_loss(sweep.get("loss"), "sweep.loss")

    encoder = ms = None
    if kind in ("qc", "both"):
        encoder, ms = _build_circuit(doc, full.n_classes)

    if "tuples" in sweep:
        raw = sweep["tuples"]
        ok = isinstance(raw, list) and raw and all(
            isinstance(t, list) and len(t) == 3 and all(
                isinstance(v, int) and not isinstance(v, bool) for v in t)
            for t in raw)
        if not ok:
            raise ConfigError("sweep.tuples: expected a list of "
                              "[n_train, n_params, epochs] integer triples")
        tuples = tuple(tuple(t) for t in raw)
    elif "layer_grid" in sweep:
        if encoder is None:
            raise ConfigError("sweep.layer_grid: only meaningful for the qc kind")
        grid = _int_list(sweep, "sweep", "layer_grid")
        n_train = _int(sweep, "sweep", "n_train", minimum=1)
        epochs = _int(sweep, "sweep", "epochs", minimum=0)
        if min(grid) < 1:
            raise ConfigError("sweep.layer_grid: layer counts must be >= 1")
        tuples = tuple((n_train, 3 * encoder.n_qubits * layers, epochs)
                       for layers in grid)
    elif "width_grid" in sweep:
        grid = _int_list(sweep, "sweep", "width_grid")
        n_train = _int(sweep, "sweep", "n_train", minimum=1)
        epochs = _int(sweep, "sweep", "epochs", minimum=0)
        tuples = tuple((n_train, width, epochs) for width in grid)
    else:
        raise ConfigError("sweep.tuples: required "
                          "(or a layer_grid / width_grid with n_train and epochs)")

    try:
        plan = SweepPlan(
            tuples=tuples,
            seeds=tuple(seeds),
            kind=kind,
            batch_size=batch_size,
            qc_learning_rate=_float(sweep, "sweep", "learning_rate",
                                    default=0.5, minimum=0.0, strict=True),
            mlp_learning_rate=_float(sweep, "sweep", "mlp_learning_rate",
                                     default=0.01, minimum=0.0, strict=True),
            encoder=encoder,
            measurements=ms,
            loss=loss_cfg,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"sweep: {exc}") from exc

    fit_sec = _section(doc, "fit", required=False)
    degree = fit_sec.get("degree", "auto")
    if degree != "auto" and (isinstance(degree, bool) or not isinstance(degree, int)
                             or degree < 0):
        raise ConfigError('fit.degree: expected "auto" or an integer >= 0')
    tail_window = _int(fit_sec, "fit", "tail_window", default=0, minimum=0)

    records = run_sweep(train, test, plan)
    for run_kind in ("qc", "mlp") if kind == "both" else (kind,):
        points = aggregate_points(records, kind=run_kind,
                                  tail_window=tail_window or None)
        if degree == "auto":
            fit = choose_fit(points)
        else:
            try:
                fit = polyfit(points, degree)
            except ValueError as exc:
                raise ConfigError(f"fit.degree: {exc}") from exc
        fit = with_basin(fit)
        _write_json(os.path.join(out_dir, f"riskcurve_{run_kind}.json"),
                    {"kind": run_kind, **fit_to_dict(fit)}, quiet)
        write_fit_csv(fit, os.path.join(out_dir, f"riskcurve_{run_kind}.csv"))
        _emit(quiet, f"wrote {os.path.join(out_dir, f'riskcurve_{run_kind}.csv')}")
        basin = fit.basin
        where = "boundary" if basin.at_boundary else "interior"
        _emit(quiet, f"{run_kind}: degree {fit.degree} fit, {where} minimum "
                     f"at N_t {basin.x_star:.1f} (loss {basin.value:.4g})")


def cmd_diagnose(doc, out_dir, seed_override, quiet):
    full, _, _ = _build_dataset(doc)
    encoder, ms = _build_circuit(doc, full.n_classes)
    n_layers = _int(_section(doc, "circuit"), "circuit", "n_layers", minimum=1)
    n_params = 3 * encoder.n_qubits * n_layers
    model = _section(doc, "model")

    if "path" in model:
        path = _str(model, "model", "path")
        if not os.path.exists(path):
            raise ConfigError(f"model.path: file not found: {path}")
        with open(path) as fh:
            try:
                saved = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"model.path: invalid JSON: {exc}") from exc
        runs = saved.get("runs") if isinstance(saved, dict) else None
        if not isinstance(runs, list):
            raise ConfigError("model.path: no runs array in file")
        want_seed = _int(model, "model", "seed", default=None)
        picked = None
        for run in runs:
            if run.get("kind") != "qc":
                continue
            if want_seed is None or run.get("seed") == want_seed:
                picked = run
                break
        if picked is None:
            raise ConfigError("model.seed: no matching qc run in the model file")
        params = np.asarray(picked["params"], dtype=float)
        source = {"path": path, "seed": picked.get("seed")}
    elif "random" in model:
        rand = model["random"]
        if not isinstance(rand, dict):
            raise ConfigError("model.random: expected an object")
        seed = _int(rand, "model.random", "seed", default=0, minimum=0)
        if seed_override is not None:
            seed = seed_override
        rng = np.random.default_rng(seed)
        params = rng.uniform(0.0, 2.0 * np.pi, n_params)
        source = {"random_seed": seed}
    else:
        raise ConfigError("model.path: required (or a model.random section)")

    if params.shape != (n_params,):
        raise ConfigError(
            f"model.path: {params.size} parameters but the circuit takes {n_params}")

    ansatz = AnsatzSpec(encoder.n_qubits, n_layers, params)
    h, rho = predict_features(full.features, encoder, ansatz, ms)
    report = geometry_report(rho, full.labels, full.n_classes, ms)
    out = {
        "n_classes": full.n_classes,
        "n_params": n_params,
        "dataset_size": full.n,
        "accuracy": accuracy(h, full.labels),
        "source": source,
        "report": report_to_dict(report),
    }
    _write_json(os.path.join(out_dir, "geometry_report.json"), out, quiet)
    spread = max(report.spread_per_class)
    _emit(quiet, f"accuracy {out['accuracy']:.3f}, max within-class spread {spread:.3g}")


def _build_operator(name, d_qubits):
    dim = 2 ** d_qubits
    diag = np.ones(dim)
    if name == "z":
        diag[dim // 2:] = -1.0
    else:
        diag[dim // 2:] = 0.0
    return np.diag(diag)


def cmd_concentrate(doc, out_dir, seed_override, quiet):
    sec = _section(doc, "concentration")
    quantity = _str(sec, "concentration", "quantity", default="both",
                    choices=("encoder", "ansatz", "both"))
    n_qubits = _int(sec, "concentration", "n_qubits", minimum=1)
    depth = _int(sec, "concentration", "depth", minimum=1)
    trials = _int(sec, "concentration", "trials", minimum=100)
    delta = _float(sec, "concentration", "delta")
    if not 0.0 < delta < 1.0:
        raise ConfigError("concentration.delta: must be strictly between 0 and 1")
    seed = _int(sec, "concentration", "seed", default=0, minimum=0)
    if seed_override is not None:
        seed = seed_override

    results = []
    if quantity in ("encoder", "both"):
        results.append(verify_encoder_concentration(n_qubits, depth, trials,
                                                    delta, seed))
    if quantity in ("ansatz", "both"):
        d_qubits = _int(sec, "concentration", "d_qubits", default=1, minimum=1)
        if d_qubits > n_qubits:
            raise ConfigError("concentration.d_qubits: must not exceed n_qubits")
        op_name = _str(sec, "concentration", "operator", default="z",
                       choices=("z", "projector0"))
        operator = _build_operator(op_name, d_qubits)
        results.append(verify_ansatz_concentration(n_qubits, d_qubits, depth,
                                                   trials, delta, operator, seed))

    path = os.path.join(out_dir, "concentration.csv")
    trials_to_csv(results, path)
    _emit(quiet, f"wrote {path}")
    for trial in results:
        _emit(quiet, f"{trial.quantity}: mean {trial.mean:.6f} "
                     f"(reference {trial.reference:.6f}), bound {trial.bound:.4f}, "
                     f"violation rate {trial.violation_rate:.4f}")


def cmd_bound(doc, out_dir, seed_override, quiet):
    del seed_override  # nothing stochastic here
    raw = doc.get("bound")
    if raw is None:
        raise ConfigError("bound: required section")
    cases = raw if isinstance(raw, list) else [raw]
    inputs = []
    for i, case in enumerate(cases):
        where = f"bound[{i}]" if isinstance(raw, list) else "bound"
        if not isinstance(case, dict):
            raise ConfigError(f"{where}: expected an object")
        try:
            inputs.append(BoundInputs(
                n=_int(case, where, "n", minimum=1),
                n_classes=_int(case, where, "n_classes", minimum=1),
                n_ge=_int(case, where, "n_ge", minimum=1),
                n_g=_int(case, where, "n_g", minimum=1),
                m=_int(case, where, "m", minimum=1),
                epsilon=_float(case, where, "epsilon", minimum=0.0, strict=True),
                delta=_float(case, where, "delta"),
                l1=_float(case, where, "l1", minimum=0.0),
                c2=_float(case, where, "c2", minimum=0.0),
                xi=_float(case, where, "xi", minimum=0.0),
                t_d=_int(case, where, "t_d", minimum=1),
                diamond_norm=_float(case, where, "diamond_norm", default=1.0,
                                    minimum=0.0),
            ))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{where}: {exc}") from exc
    path = os.path.join(out_dir, "bound.csv")
    bounds_to_csv(inputs, path)
    _emit(quiet, f"wrote {path}")


# --- entry point ------------------------------------------------------------------


_HANDLERS = {
    "train": cmd_train,
    "riskcurve": cmd_riskcurve,
    "diagnose": cmd_diagnose,
    "concentrate": cmd_concentrate,
    "bound": cmd_bound,
}

_HELP = {
    "train": "train classifiers and emit records, summary, geometry, and model files",
    "riskcurve": "sweep parameter counts, fit the risk curve, locate its basin",
    "diagnose": "geometry report for a saved or random model on a dataset",
    "concentrate": "sample random-circuit output statistics against their bounds",
    "bound": "evaluate the robustness generalization bound on given inputs",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parse_args(argv):
    parser = _Parser(prog="qcrisk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler_help in _HELP.items():
        p = sub.add_parser(name, help=handler_help)
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override every run seed in the config")
        p.add_argument("--out", default=None,
                       help="output directory (overrides the config's out key)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress output")
    return parser.parse_args(argv)


def _load_config(path):
    if not os.path.exists(path):
        raise ConfigError(f"--config: file not found: {path}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--config: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("--config: top level must be an object")
    return doc


def main(argv=None) -> int:
    try:
        args = _parse_args(argv)
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed: must fit in an unsigned 64-bit integer")
        doc = _load_config(args.config)
        out_dir = args.out if args.out is not None else doc.get("out")
        if not isinstance(out_dir, str) or not out_dir:
            raise ConfigError("out: required (config key or --out)")
        os.makedirs(out_dir, exist_ok=True)
        _HANDLERS[args.command](doc, out_dir, args.seed, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - the contract is exit code 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
