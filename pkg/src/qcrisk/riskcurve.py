"""Risk-curve orchestration: run a grid of (train size, parameter count,
epoch budget) settings over several seeds, aggregate the recorded test
losses, fit a low-degree polynomial, and locate the basin of the fitted
curve over the parameter-count axis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from qcrisk.classifier import LossConfig, TrainConfig, TrainRecord, train_qc
from qcrisk.core import EncoderSpec
from qcrisk.data import Dataset, subsample_balanced
from qcrisk.measurements import MeasurementSet
from qcrisk.mlp import MlpTrainConfig, hidden_for_n_params, train_mlp

SWEEP_KINDS = ("qc", "mlp", "both")


@dataclass(frozen=True)
class SweepPlan:
    """Grid of settings: every tuple is (train size, parameter count,
    epochs) and runs once per seed. Parameter counts must be realizable:
    divisible by 3N for the circuit, an exact hidden width for the
    perceptron (checked against the dataset when the sweep runs)."""

    tuples: tuple
    seeds: tuple
    kind: str = "qc"
    batch_size: int = 4
    qc_learning_rate: float = 0.5
    mlp_learning_rate: float = 0.01
    encoder: EncoderSpec | None = None
    measurements: MeasurementSet | None = None
    loss: LossConfig = field(default_factory=LossConfig)

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        tuples = tuple(tuple(int(v) for v in t) for t in self.tuples)
        if not tuples:
            raise ValueError("plan needs at least one tuple")
        for t in tuples:
            if len(t) != 3:
                raise ValueError("tuples are (n_train, n_params, epochs)")
            n, n_params, epochs = t
            if n < 1 or n_params < 1 or epochs < 0:
                raise ValueError(f"invalid tuple {t}")
        seeds = tuple(int(s) for s in self.seeds)
        if not seeds:
            raise ValueError("plan needs at least one seed")
        if self.kind in ("qc", "both"):
            if self.encoder is None or self.measurements is None:
                raise ValueError("circuit sweeps need an encoder and measurements")
            per_layer = 3 * self.encoder.n_qubits
            for _, n_params, _ in tuples:
                if n_params % per_layer != 0:
                    raise ValueError(
                        f"n_params={n_params} is not a multiple of {per_layer}"
                    )
        object.__setattr__(self, "tuples", tuples)
        object.__setattr__(self, "seeds", seeds)


def run_sweep(pool: Dataset, test: Dataset, plan: SweepPlan) -> list[TrainRecord]:
    """One record per (kind, tuple, seed), in that nesting order. Each run
    distills its class-balanced training subset with the run seed, so the
    whole sweep is reproducible from the plan alone."""
    kinds = ("qc", "mlp") if plan.kind == "both" else (plan.kind,)
    records = []
    for kind in kinds:
        for n, n_params, epochs in plan.tuples:
            for seed in plan.seeds:
                sub = subsample_balanced(pool, n, seed)
                if kind == "qc":
                    config = TrainConfig(
                        n_layers=n_params // (3 * plan.encoder.n_qubits),
                        epochs=epochs,
                        learning_rate=plan.qc_learning_rate,
                        batch_size=plan.batch_size,
                        seed=seed,
                        encoder=plan.encoder,
                        measurements=plan.measurements,
                        loss=plan.loss,
                    )
                    records.append(train_qc(sub, test, config))
                else:
                    hidden = hidden_for_n_params(
                        _input_width(pool), pool.n_classes, n_params
                    )
                    config = MlpTrainConfig(
                        n_hidden=hidden,
                        epochs=epochs,
                        learning_rate=plan.mlp_learning_rate,
                        batch_size=plan.batch_size,
                        seed=seed,
                    )
                    records.append(train_mlp(sub, test, config))
    return records


def aggregate_points(records, kind: str | None = None, tail_window: int | None = None) -> np.ndarray:
    """(W, 3) array of (n_params, mean test loss, std across seeds), one row
    per parameter count in first-appearance order. ``tail_window`` switches
    the per-run loss from final-epoch to a trailing average."""
    groups: dict[int, list[float]] = {}
    for record in records:
        if kind is not None and record.kind != kind:
            continue
        value = (
            record.final_test_loss()
            if tail_window is None
            else record.tail_test_loss(tail_window)
        )
        groups.setdefault(record.n_params, []).append(value)
    if not groups:
        raise ValueError("no records to aggregate")
    return np.array(
        [[x, np.mean(vals), np.std(vals)] for x, vals in groups.items()]
    )


# --- fitting -----------------------------------------------------------------


@dataclass(frozen=True)
class BasinResult:
    x_star: float
    value: float
    at_boundary: bool


@dataclass(frozen=True)
class RiskCurveFit:
    """Least-squares polynomial through (x, mean, std) points.

    Coefficients are ascending in the rescaled variable u = (x - center)
    / halfwidth, recorded in ``x_scale`` so the fit evaluates anywhere.
    """

    points: np.ndarray
    degree: int
    coefficients: np.ndarray
    x_scale: tuple
    residual: float
    basin: BasinResult | None = None

    def __post_init__(self):
        if self.degree >= len(self.points):
            raise ValueError("degree must be smaller than the number of points")
        if not np.isfinite(self.residual):
            raise ValueError("residual is not finite")


def polyfit(points, degree: int) -> RiskCurveFit:
    """Normal-equations least squares on x affinely mapped to [-1, 1]."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] == 2:
        pts = np.column_stack([pts, np.zeros(len(pts))])
    if pts.shape[1] != 3:
        raise ValueError("points must be (x, y) or (x, y, std) rows")
    if degree < 0 or degree + 1 > len(pts):
        raise ValueError(f"degree {degree} needs more than {len(pts) - 1} points")
    x, y = pts[:, 0], pts[:, 1]
    if len(np.unique(x)) != len(x):
        raise ValueError("x values must be distinct")
    scale = _x_scale(x)
    u = _to_unit(x, scale)
    vander = np.vander(u, degree + 1, increasing=True)
    gram = vander.T @ vander
    try:
        coeffs = np.linalg.solve(gram, vander.T @ y)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"rank-deficient fit: {exc}") from exc
    residual = float(np.sum((y - vander @ coeffs) ** 2))
    return RiskCurveFit(
        points=pts,
        degree=degree,
        coefficients=coeffs,
        x_scale=scale,
        residual=residual,
    )


def choose_fit(points, degrees=(2, 3, 4), slack: float = 0.05) -> RiskCurveFit:
    """Fit the candidate degrees (capped below the point count) and keep the
    smallest degree whose residual is within ``slack`` of the best."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    usable = [d for d in degrees if d < len(pts)] or [len(pts) - 1]
    fits = [polyfit(pts, d) for d in sorted(usable)]
    best = min(fit.residual for fit in fits)
    for fit in fits:
        if fit.residual <= best * (1.0 + slack) + 1e-15:
            return fit
    return fits[-1]


def evaluate_fit(fit: RiskCurveFit, x) -> np.ndarray:
    u = _to_unit(np.asarray(x, dtype=float), fit.x_scale)
    out = np.zeros_like(u)
    for c in fit.coefficients[::-1]:
        out = out * u + c
    return out


def find_basin(fit: RiskCurveFit, domain=None) -> BasinResult:
    """Global minimum of the fitted polynomial over a closed interval
    (default: the observed x range). Interior critical points come from the
    companion-matrix roots of the derivative; an endpoint winner is flagged
    as a boundary result, meaning the data show no interior basin."""
    if domain is None:
        domain = (fit.points[:, 0].min(), fit.points[:, 0].max())
    lo, hi = float(domain[0]), float(domain[1])
    if hi < lo:
        raise ValueError("domain must have non-negative width")
    if hi == lo:
        return BasinResult(lo, float(evaluate_fit(fit, lo)), at_boundary=True)
    candidates = [lo, hi]
    deriv = fit.coefficients[1:] * np.arange(1, len(fit.coefficients))
    if len(deriv) and np.any(deriv != 0.0):
        u_lo, u_hi = (_to_unit(np.array([lo, hi]), fit.x_scale))
        for root in np.roots(deriv[::-1]):
            if abs(root.imag) < 1e-8 and u_lo < root.real < u_hi:
                candidates.append(_from_unit(root.real, fit.x_scale))
    values = evaluate_fit(fit, np.array(candidates))
    best = int(np.argmin(values))
    return BasinResult(
        x_star=float(candidates[best]),
        value=float(values[best]),
        at_boundary=best < 2,
    )


# --- serialization -------------------------------------------------------------


def fit_to_dict(fit: RiskCurveFit) -> dict:
    doc = {
        "points": fit.points.tolist(),
        "degree": fit.degree,
        "coefficients": fit.coefficients.tolist(),
        "x_scale": list(fit.x_scale),
        "residual": fit.residual,
        "basin": None,
    }
    if fit.basin is not None:
        doc["basin"] = {
            "x_star": fit.basin.x_star,
            "value": fit.basin.value,
            "at_boundary": fit.basin.at_boundary,
        }
    return doc


def with_basin(fit: RiskCurveFit, domain=None) -> RiskCurveFit:
    return replace(fit, basin=find_basin(fit, domain))


FIT_CSV_COLUMNS = ("N_t", "mean_loss", "std", "fitted")


def write_fit_csv(fit: RiskCurveFit, path, grid_points: int = 100) -> None:
    """Observed rows first (with mean and std), then a dense grid of fitted
    values for plotting."""
    xs = fit.points[:, 0]
    grid = np.linspace(xs.min(), xs.max(), grid_points)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIT_CSV_COLUMNS)
        fitted_obs = evaluate_fit(fit, xs)
        for row, fitted in zip(fit.points, fitted_obs):
            writer.writerow([row[0], row[1], row[2], fitted])
        for x, fitted in zip(grid, evaluate_fit(fit, grid)):
            writer.writerow([x, "", "", fitted])


# --- internals ------------------------------------------------------------------


def _input_width(ds: Dataset) -> int:
    if ds.kind == "bitstring":
        return len(ds.features[0])
    return np.asarray(ds.features).shape[1]


def _x_scale(x: np.ndarray) -> tuple:
    center = 0.5 * (x.max() + x.min())
    halfwidth = 0.5 * (x.max() - x.min())
    return (float(center), float(halfwidth) if halfwidth > 0 else 1.0)


def _to_unit(x, scale):
    return (x - scale[0]) / scale[1]


def _from_unit(u, scale):
    return float(u * scale[1] + scale[0])
