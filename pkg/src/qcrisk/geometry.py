"""Feature-space geometry: how tightly per-class features collapse onto
their class means, how distinguishable the means are from each other, how
well they line up with the measurement operators, and what that implies
for multi-copy state discrimination.

All functions take features as density matrices: an (n, dim, dim) array,
or anything convertible (a list of FeatureState objects or of 2d arrays).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qcrisk.core import PAULI_X, PAULI_Y, PAULI_Z, FeatureState
from qcrisk.measurements import MeasurementSet


def as_matrices(features) -> np.ndarray:
    if isinstance(features, np.ndarray) and features.ndim == 3:
        return features.astype(complex, copy=False)
    mats = [f.matrix if isinstance(f, FeatureState) else np.asarray(f) for f in features]
    return np.array(mats, dtype=complex)


def class_means(features, labels, n_classes: int) -> np.ndarray:
    """Per-class average feature matrix, shape (K, dim, dim)."""
    mats = as_matrices(features)
    labels = np.asarray(labels)
    if len(labels) != len(mats):
        raise ValueError("features and labels disagree on length")
    out = np.empty((n_classes,) + mats.shape[1:], dtype=complex)
    for k in range(n_classes):
        idx = np.flatnonzero(labels == k)
        if idx.size == 0:
            raise ValueError(f"class {k} has no examples")
        out[k] = mats[idx].mean(axis=0)
    return out


def within_class_spread(features, labels, n_classes: int) -> np.ndarray:
    """Per-class summed Frobenius distance of each feature to its class
    mean. Zero exactly when every class has fully collapsed."""
    mats = as_matrices(features)
    labels = np.asarray(labels)
    means = class_means(mats, labels, n_classes)
    out = np.zeros(n_classes)
    for k in range(n_classes):
        idx = np.flatnonzero(labels == k)
        diffs = mats[idx] - means[k]
        out[k] = np.sum(np.sqrt(np.sum(np.abs(diffs) ** 2, axis=(1, 2))))
    return out


def mean_overlap_matrix(means) -> np.ndarray:
    """Pairwise Tr(mean_k mean_l), real for Hermitian inputs. Off-diagonals
    near zero mean the class means occupy (nearly) orthogonal supports."""
    mats = as_matrices(means)
    return np.einsum("kij,lji->kl", mats, mats).real


def alignment_matrix(means, ms) -> np.ndarray:
    """Tr(mean_k o_l) for every class mean and measurement operator."""
    mats = as_matrices(means)
    ops = ms.operators if isinstance(ms, MeasurementSet) else np.asarray(ms)
    if mats.shape[1:] != ops.shape[1:]:
        raise ValueError("class means and operators disagree on dimension")
    return np.einsum("kij,lji->kl", mats, ops).real


def mean_subtracted_gram(means) -> np.ndarray:
    """Inner products of the class means after removing their global mean.

    Rows sum to zero by construction. For K orthogonal pure means the
    off-diagonal entries are exactly -1/K.
    """
    mats = as_matrices(means)
    centered = mats - mats.mean(axis=0)
    return np.einsum("kij,lij->kl", centered.conj(), centered).real


def discrimination_lower_bound(n_classes: int, fidelity: float, n_copies: int) -> float:
    """Floor on the error probability of telling K states apart from
    n_copies copies, given the largest pairwise squared overlap.

    ``fidelity`` is the squared overlap, so the amplitude overlap enters
    as fidelity**(1/2) and the exponent is n_copies/2.
    """
    if n_classes < 2:
        raise ValueError("need at least two classes")
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError("fidelity must lie in [0, 1]")
    if n_copies < 1:
        raise ValueError("n_copies must be >= 1")
    return (n_classes - 1) / (2.0 * n_classes) * fidelity ** (n_copies / 2.0)


def bloch_vector(rho) -> np.ndarray:
    """(x, y, z) coordinates of a single-wire state."""
    mat = rho.matrix if isinstance(rho, FeatureState) else np.asarray(rho)
    if mat.shape != (2, 2):
        raise ValueError("Bloch coordinates are defined for 2x2 states")
    return np.array(
        [
            np.sum(mat * PAULI_X.T).real,
            np.sum(mat * PAULI_Y.T).real,
            np.sum(mat * PAULI_Z.T).real,
        ]
    )


def bloch_vectors(features) -> np.ndarray:
    mats = as_matrices(features)
    return np.stack([bloch_vector(m) for m in mats])


@dataclass(frozen=True)
class GeometryReport:
    """Snapshot of the feature geometry for one set of features."""

    n_classes: int
    spread_per_class: np.ndarray        # (K,)
    mean_overlaps: np.ndarray           # (K, K)
    alignment: np.ndarray | None        # (K, K') against a measurement set
    gram_mean_subtracted: np.ndarray    # (K, K)
    mean_purities: np.ndarray           # (K,)


def geometry_report(features, labels, n_classes: int, ms=None) -> GeometryReport:
    mats = as_matrices(features)
    means = class_means(mats, labels, n_classes)
    return GeometryReport(
        n_classes=n_classes,
        spread_per_class=within_class_spread(mats, labels, n_classes),
        mean_overlaps=mean_overlap_matrix(means),
        alignment=None if ms is None else alignment_matrix(means, ms),
        gram_mean_subtracted=mean_subtracted_gram(means),
        mean_purities=np.einsum("kij,kji->k", means, means).real,
    )


def report_to_dict(report: GeometryReport) -> dict:
    return {
        "n_classes": report.n_classes,
        "spread_per_class": report.spread_per_class.tolist(),
        "mean_overlaps": report.mean_overlaps.tolist(),
        "alignment": None if report.alignment is None else report.alignment.tolist(),
        "gram_mean_subtracted": report.gram_mean_subtracted.tolist(),
        "mean_purities": report.mean_purities.tolist(),
    }
