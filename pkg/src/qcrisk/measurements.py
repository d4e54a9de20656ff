"""Measurement operator sets for the classifier head.

A set is K Hermitian operators acting on the reduced feature register
(the first D wires). Sets built here either declare a mutual-orthogonality
constant B, meaning Tr(o_j o_k) = B * delta_jk, or are flagged
non-orthogonal by leaving the constant unset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qcrisk.core import HERMITIAN_ATOL, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z

GRAM_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """K operators on 2**d_qubits dims.

    ortho_constant: B with Gram = B * I, or None for a non-orthogonal set.
    norm_bound: largest operator spectral norm (the bound module's C2).
    frame: optional real frame vectors behind rank-1 constructions,
        one column per operator.
    """

    d_qubits: int
    operators: np.ndarray
    ortho_constant: float | None
    norm_bound: float
    frame: np.ndarray | None = None

    def __post_init__(self):
        ops = np.array(self.operators, dtype=complex)
        dim = 2**self.d_qubits
        if ops.ndim != 3 or ops.shape[1:] != (dim, dim):
            raise ValueError(f"operators must have shape (K, {dim}, {dim})")
        if ops.shape[0] < 1:
            raise ValueError("need at least one operator")
        herm = np.max(np.abs(ops - ops.conj().transpose(0, 2, 1)))
        if herm > HERMITIAN_ATOL:
            raise ValueError(f"operators not Hermitian, residual {herm:.2e}")
        if self.ortho_constant is not None:
            if self.ortho_constant < 1.0:
                raise ValueError(
                    "declared orthogonality constant must be >= 1; "
                    "leave it unset for a non-orthogonal set"
                )
            gram = _gram(ops)
            target = self.ortho_constant * np.eye(ops.shape[0])
            resid = np.max(np.abs(gram - target))
            if resid > GRAM_ATOL:
                raise ValueError(
                    f"Gram deviates from B*I by {resid:.2e}; set is not "
                    "mutually orthogonal at the declared constant"
                )
        top = _max_spectral_norm(ops)
        if abs(top - self.norm_bound) > GRAM_ATOL:
            raise ValueError(
                f"declared norm bound {self.norm_bound} != computed {top!r}"
            )
        ops.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def n_operators(self) -> int:
        return self.operators.shape[0]

    @property
    def dim(self) -> int:
        return 2**self.d_qubits


def basis_measurements(n_classes: int, d_qubits: int) -> MeasurementSet:
    """Computational-basis projectors |k><k| for k < n_classes."""
    dim = 2**d_qubits
    if not 1 <= n_classes <= dim:
        raise ValueError(f"need 1 <= n_classes <= {dim}")
    ops = np.zeros((n_classes, dim, dim), dtype=complex)
    for k in range(n_classes):
        ops[k, k, k] = 1.0
    return MeasurementSet(d_qubits, ops, ortho_constant=1.0, norm_bound=1.0)


def pauli_measurements(n_classes: int = 9, embed_qubits: int = 10) -> MeasurementSet:
    """The fixed nine two-wire Pauli products {X,Y,Z} x {X,Y,Z}, in the
    order XX, XY, XZ, YX, ..., ZZ. They act on the leading two wires of any
    register, so only the two-wire part is stored (B = 4, not the class
    count)."""
    if n_classes != 9:
        raise ValueError("this set is fixed at 9 operators")
    if embed_qubits < 2:
        raise ValueError("need at least two wires to embed the pair set")
    singles = (PAULI_X, PAULI_Y, PAULI_Z)
    ops = np.array([np.kron(p, q) for p in singles for q in singles])
    return MeasurementSet(2, ops, ortho_constant=4.0, norm_bound=1.0)


def simplex_frame(n_classes: int) -> np.ndarray:
    """K x K frame whose columns are the unit simplex directions: an
    orthonormal frame with the global mean removed, rescaled to unit norm.
    Columns sum to zero and pairwise inner products are -1/(K-1)."""
    if n_classes < 2:
        raise ValueError("a simplex frame needs at least 2 classes")
    k = n_classes
    return np.sqrt(k / (k - 1)) * (np.eye(k) - np.ones((k, k)) / k)


def simplex_etf_operators(n_classes: int, d_qubits: int) -> MeasurementSet:
    """Rank-1 operators from the simplex frame embedded into 2**d dims.

    Requires 2**d_qubits >= n_classes. The operators are outer products of
    the frame columns; distinct columns are not orthogonal as matrices
    (their squared inner product is 1/(K-1)^2), so no constant is declared.
    """
    dim = 2**d_qubits
    if n_classes > dim:
        raise ValueError(
            f"cannot embed a {n_classes}-column simplex frame in {dim} dims"
        )
    frame = np.zeros((dim, n_classes))
    frame[:n_classes, :] = simplex_frame(n_classes)
    ops = np.einsum("ik,jk->kij", frame, frame).astype(complex)
    return MeasurementSet(
        d_qubits, ops, ortho_constant=None, norm_bound=1.0, frame=frame
    )


def qubit_sic_povm() -> MeasurementSet:
    """Four tetrahedral rank-1 POVM elements on one wire.

    Each element is half a pure-state projector; the Bloch vectors form a
    regular tetrahedron, the elements sum to the identity, and each has
    trace 1/2. The underlying states have pairwise squared overlap 1/3.
    """
    r2, r6 = np.sqrt(2.0), np.sqrt(6.0)
    bloch = np.array(
        [
            [0.0, 0.0, 1.0],
            [2.0 * r2 / 3.0, 0.0, -1.0 / 3.0],
            [-r2 / 3.0, r6 / 3.0, -1.0 / 3.0],
            [-r2 / 3.0, -r6 / 3.0, -1.0 / 3.0],
        ]
    )
    paulis = np.array([PAULI_X, PAULI_Y, PAULI_Z])
    ops = 0.25 * (PAULI_I[None] + np.einsum("kc,cij->kij", bloch, paulis))
    return MeasurementSet(1, ops, ortho_constant=None, norm_bound=0.5)


def validate_set(ms: MeasurementSet) -> dict:
    """Numerical health report: Hermiticity residuals, the Gram matrix, a
    fitted orthogonality constant (None when the Gram is not B*I, e.g. for
    duplicated operators), the recomputed norm bound, and the dimension of
    the operator span inside the full 4**D-dim matrix space."""
    ops = ms.operators
    k, dim = ops.shape[0], ops.shape[1]
    herm = np.abs(ops - ops.conj().transpose(0, 2, 1)).reshape(k, -1).max(axis=1)
    gram = _gram(ops)
    off = gram - np.diag(np.diagonal(gram))
    diag = np.diagonal(gram)
    fitted = None
    if np.max(np.abs(off)) <= GRAM_ATOL and np.ptp(diag) <= GRAM_ATOL:
        fitted = float(diag.mean())
    vecs = ops.reshape(k, dim * dim)
    span_rank = int(np.linalg.matrix_rank(vecs, tol=1e-9))
    spans_full = span_rank == dim * dim
    declared_ok = (
        fitted is not None and abs(fitted - ms.ortho_constant) <= GRAM_ATOL
        if ms.ortho_constant is not None
        else True
    )
    return {
        "n_operators": k,
        "d_qubits": ms.d_qubits,
        "hermiticity_residuals": herm.tolist(),
        "gram": gram.tolist(),
        "fitted_ortho_constant": fitted,
        "norm_bound": float(_max_spectral_norm(ops)),
        "span_rank": span_rank,
        "spans_full_space": spans_full,
        "passed": bool(np.max(herm) <= HERMITIAN_ATOL and declared_ok),
    }


def set_to_dict(ms: MeasurementSet) -> dict:
    """JSON-ready form; complex operators split into real/imag parts."""
    return {
        "d_qubits": ms.d_qubits,
        "operators_real": ms.operators.real.tolist(),
        "operators_imag": ms.operators.imag.tolist(),
        "ortho_constant": ms.ortho_constant,
        "norm_bound": ms.norm_bound,
        "frame": None if ms.frame is None else ms.frame.tolist(),
    }


def set_from_dict(doc: dict) -> MeasurementSet:
    ops = np.asarray(doc["operators_real"], dtype=float) + 1j * np.asarray(
        doc["operators_imag"], dtype=float
    )
    frame = doc.get("frame")
    return MeasurementSet(
        int(doc["d_qubits"]),
        ops,
        doc["ortho_constant"],
        float(doc["norm_bound"]),
        None if frame is None else np.asarray(frame, dtype=float),
    )


def _gram(ops: np.ndarray) -> np.ndarray:
    return np.einsum("kij,lji->kl", ops, ops).real


def _max_spectral_norm(ops: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(ops))))
