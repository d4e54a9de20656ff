"""Datasets: parity bitstrings, IDX image ingestion, stratified splitting.

Two dataset kinds flow through the package: "bitstring" features (a list of
'0'/'1' strings, fed to the basis encoder) and "amplitude" features (an
(n, dim) float array of unit-norm rows, fed to the amplitude encoder).
"""

from __future__ import annotations

import csv
import gzip
import struct
from dataclasses import dataclass, field

import numpy as np

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


class IdxError(ValueError):
    """Base for IDX parsing failures."""


class BadMagicError(IdxError):
    pass


class TruncatedFileError(IdxError):
    pass


class CountMismatchError(IdxError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    kind: str
    features: object
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        if self.kind not in ("bitstring", "amplitude"):
            raise ValueError(f"unknown dataset kind {self.kind!r}")
        labels = np.asarray(self.labels, dtype=int)
        if self.kind == "bitstring":
            if len(self.features) != len(labels):
                raise ValueError("features and labels disagree on length")
        else:
            feats = np.asarray(self.features, dtype=float)
            if feats.ndim != 2 or feats.shape[0] != len(labels):
                raise ValueError("amplitude features must be (n, dim)")
            object.__setattr__(self, "features", feats)
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise ValueError("labels out of range")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def class_indices(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.labels == k)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def take(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        if self.kind == "bitstring":
            feats = [self.features[i] for i in indices]
        else:
            feats = self.features[indices]
        return Dataset(self.kind, feats, self.labels[indices], self.n_classes)


def gen_parity(n_bits: int) -> Dataset:
    """All 2**n_bits bitstrings; label 1 when the count of '0' bits is even."""
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    features = [format(v, f"0{n_bits}b") for v in range(2**n_bits)]
    labels = np.array([1 if f.count("0") % 2 == 0 else 0 for f in features])
    return Dataset("bitstring", features, labels, 2)


def split(ds: Dataset, train_ratio: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified shuffle-split with exactly equal train counts per class:
    every class contributes floor(train_ratio * smallest class size)."""
    if not 0.0 < train_ratio < 1.0:
        raise ValueError("train_ratio must be in (0, 1)")
    counts = ds.class_counts()
    if counts.min() == 0:
        raise ValueError("every class needs at least one example")
    per_class = int(np.floor(train_ratio * counts.min()))
    if per_class < 1:
        raise ValueError(
            f"smallest class ({counts.min()} examples) too small for "
            f"ratio {train_ratio}"
        )
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for k in range(ds.n_classes):
        perm = rng.permutation(ds.class_indices(k))
        train_idx.extend(perm[:per_class])
        test_idx.extend(perm[per_class:])
    return ds.take(train_idx), ds.take(test_idx)


def subsample_balanced(ds: Dataset, n: int, seed: int) -> Dataset:
    """Class-balanced subsample of n examples (n must divide evenly)."""
    if n < ds.n_classes or n % ds.n_classes != 0:
        raise ValueError(f"n={n} is not a positive multiple of {ds.n_classes}")
    per_class = n // ds.n_classes
    rng = np.random.default_rng(seed)
    picked = []
    for k in range(ds.n_classes):
        idx = ds.class_indices(k)
        if len(idx) < per_class:
            raise ValueError(f"class {k} has only {len(idx)} examples, need {per_class}")
        picked.extend(rng.permutation(idx)[:per_class])
    return ds.take(picked)


def load_idx(images_path: str, labels_path: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse an IDX image/label file pair (big-endian, gzip transparent)."""
    img_blob = _read_maybe_gzip(images_path)
    lab_blob = _read_maybe_gzip(labels_path)

    if len(img_blob) < 16:
        raise TruncatedFileError(f"{images_path}: header short")
    magic, count, rows, cols = struct.unpack(">IIII", img_blob[:16])
    if magic != IDX_IMAGES_MAGIC:
        raise BadMagicError(
            f"{images_path}: magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}"
        )
    body = img_blob[16:]
    if len(body) != count * rows * cols:
        raise TruncatedFileError(
            f"{images_path}: payload {len(body)} bytes, expected {count * rows * cols}"
        )
    images = np.frombuffer(body, dtype=np.uint8).reshape(count, rows, cols)

    if len(lab_blob) < 8:
        raise TruncatedFileError(f"{labels_path}: header short")
    magic, lab_count = struct.unpack(">II", lab_blob[:8])
    if magic != IDX_LABELS_MAGIC:
        raise BadMagicError(
            f"{labels_path}: magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}"
        )
    lab_body = lab_blob[8:]
    if len(lab_body) != lab_count:
        raise TruncatedFileError(
            f"{labels_path}: payload {len(lab_body)} bytes, expected {lab_count}"
        )
    if lab_count != count:
        raise CountMismatchError(
            f"{count} images vs {lab_count} labels"
        )
    labels = np.frombuffer(lab_body, dtype=np.uint8)
    return images, labels


def write_idx(images: np.ndarray, labels: np.ndarray, images_path: str, labels_path: str):
    """Inverse of load_idx, for fixtures and round-trip checks."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    if images.ndim != 3 or len(images) != len(labels):
        raise ValueError("need (n, rows, cols) images and n labels")
    n, rows, cols = images.shape
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGES_MAGIC, n, rows, cols))
        fh.write(images.tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABELS_MAGIC, n))
        fh.write(labels.tobytes())


def preprocess_images(
    images: np.ndarray,
    labels: np.ndarray,
    n_classes: int = 9,
    per_class: int = 20,
    pad_to: int = 1024,
) -> Dataset:
    """First ``per_class`` images of each kept class in file order, flattened,
    pixel-scaled to [0, 1], zero-padded, and row-normalized for amplitude
    encoding."""
    images = np.asarray(images)
    labels = np.asarray(labels)
    flat_dim = images.shape[1] * images.shape[2]
    if flat_dim > pad_to:
        raise ValueError(f"images flatten to {flat_dim} > pad_to={pad_to}")
    picked = []
    for k in range(n_classes):
        idx = np.flatnonzero(labels == k)[:per_class]
        if len(idx) < per_class:
            raise ValueError(
                f"class {k}: only {len(idx)} examples, need {per_class}"
            )
        picked.extend(idx)
    picked = np.array(picked)
    flat = images[picked].reshape(len(picked), flat_dim).astype(float) / 255.0
    norms = np.linalg.norm(flat, axis=1)
    zero_rows = np.flatnonzero(norms == 0)
    if zero_rows.size:
        raise ValueError(f"all-zero image at selected index {zero_rows[0]}")
    out = np.zeros((len(picked), pad_to))
    out[:, :flat_dim] = flat / norms[:, None]
    return Dataset("amplitude", out, labels[picked].astype(int), n_classes)


def dataset_to_csv(ds: Dataset, path: str):
    """Flattened features with the label as the last column."""
    if ds.kind == "bitstring":
        width = len(ds.features[0]) if ds.n else 0
        rows = ([int(c) for c in feat] for feat in ds.features)
    else:
        width = ds.features.shape[1]
        rows = (row.tolist() for row in ds.features)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(width)] + ["label"])
        for feat_row, label in zip(rows, ds.labels):
            writer.writerow(list(feat_row) + [int(label)])


def _read_maybe_gzip(path: str) -> bytes:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:2] == b"\x1f\x8b":
        return gzip.decompress(blob)
    return blob
