"""Generalization-bound machinery: the log covering number of the encoded
state space, a greedy occupied-cell count over the feature partition, and
the assembled robustness bound with its three terms.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields

import numpy as np


def covering_number_log(n_ge: int, m: int, epsilon: float) -> float:
    """Natural log of the covering-number ceiling for a circuit with
    ``n_ge`` tunable gates of arity at most ``m`` at scale ``epsilon``.

    Kept in log space; the count itself overflows floats long before the
    interesting regime.
    """
    if n_ge < 1:
        raise ValueError("n_ge must be >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return float(4**m * n_ge * np.log(28.0 * n_ge / epsilon))


@dataclass(frozen=True)
class PartitionEstimate:
    """Greedy label-pure cover of a feature set at Frobenius scale epsilon."""

    epsilon: float
    cell_centers: np.ndarray
    cell_labels: np.ndarray
    assignment: np.ndarray

    @property
    def occupied(self) -> int:
        return len(self.cell_labels)


def estimate_T_D(states, labels, epsilon: float) -> PartitionEstimate:
    """First-fit cover: scan samples in index order and open a new cell
    whenever no existing cell of the same label has a center within
    ``epsilon`` in Frobenius distance.

    Greedy never beats the minimal cover, so the resulting count (and any
    bound built on it) errs on the conservative side.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    mats = np.asarray(states, dtype=complex)
    labels = np.asarray(labels, dtype=int)
    if mats.ndim != 3 or len(mats) != len(labels):
        raise ValueError("need (n, dim, dim) states with one label each")
    centers: list[np.ndarray] = []
    center_labels: list[int] = []
    assignment = np.empty(len(mats), dtype=int)
    for i, (mat, lab) in enumerate(zip(mats, labels)):
        for j, (center, center_lab) in enumerate(zip(centers, center_labels)):
            if center_lab != lab:
                continue
            if np.sqrt(np.sum(np.abs(mat - center) ** 2)) <= epsilon:
                assignment[i] = j
                break
        else:
            assignment[i] = len(centers)
            centers.append(mat)
            center_labels.append(int(lab))
    return PartitionEstimate(
        epsilon=epsilon,
        cell_centers=np.array(centers),
        cell_labels=np.array(center_labels),
        assignment=assignment,
    )


@dataclass(frozen=True)
class BoundInputs:
    """Everything the assembled bound consumes.

    diamond_norm carries the channel-perturbation factor explicitly; it
    defaults to 1, the simplification the whole analysis runs under.
    """

    n: int
    n_classes: int
    n_ge: int
    n_g: int
    m: int
    epsilon: float
    delta: float
    l1: float
    c2: float
    xi: float
    t_d: int
    diamond_norm: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        if self.n_ge < 1:
            raise ValueError("n_ge must be >= 1")
        if self.n_g < self.n_ge:
            raise ValueError("n_g must be >= n_ge")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.l1 < 0 or self.xi < 0:
            raise ValueError("l1 and xi must be >= 0")
        if self.c2 <= 0 or self.diamond_norm <= 0:
            raise ValueError("c2 and diamond_norm must be positive")
        if not 1 <= self.t_d <= self.n:
            raise ValueError("t_d must lie in [1, n]")


def lemma3_terms(inp: BoundInputs) -> tuple[float, float, float]:
    """The bound's three summands: the covering-scale term, the square-root
    sample term, and the linear-in-1/n tail."""
    occupancy = (
        inp.t_d
        * 4**inp.m
        * inp.n_ge
        * np.log(56.0 * inp.n_classes * inp.n_ge / (inp.epsilon * inp.delta))
        / inp.n
    )
    scale_term = 4.0 * inp.l1 * inp.n_classes * inp.c2 * inp.diamond_norm * inp.epsilon
    return (
        float(scale_term),
        float(inp.xi * 3.0 * np.sqrt(occupancy)),
        float(inp.xi * 2.0 * occupancy),
    )


def lemma3_bound(inp: BoundInputs) -> float:
    return float(sum(lemma3_terms(inp)))


def lipschitz_and_xi(predictions, targets) -> tuple[float, float]:
    """Data-driven estimates from per-sample residuals: the loss gradient
    norm bound (largest residual norm) and the largest per-sample loss."""
    predictions = np.atleast_2d(np.asarray(predictions, dtype=float))
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    if predictions.shape != targets.shape:
        raise ValueError("predictions and targets disagree on shape")
    norms = np.linalg.norm(predictions - targets, axis=1)
    return float(norms.max()), float(0.5 * norms.max() ** 2)


BOUND_CSV_COLUMNS = tuple(f.name for f in fields(BoundInputs)) + (
    "term_scale",
    "term_sqrt",
    "term_linear",
    "total",
)


def bound_to_row(inp: BoundInputs) -> dict:
    terms = lemma3_terms(inp)
    row = {f.name: getattr(inp, f.name) for f in fields(BoundInputs)}
    row.update(
        term_scale=terms[0],
        term_sqrt=terms[1],
        term_linear=terms[2],
        total=sum(terms),
    )
    return row


def bounds_to_csv(inputs: list[BoundInputs], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BOUND_CSV_COLUMNS)
        writer.writeheader()
        for inp in inputs:
            writer.writerow(bound_to_row(inp))
