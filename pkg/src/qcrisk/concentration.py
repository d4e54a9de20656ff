"""Haar-moment closed forms and empirical concentration checks.

The two oracles are the exact first and second moments of Tr(W A W^dag B)
under Haar-random W. The verifiers draw random-parameter layered circuits
as a practical 2-design stand-in and measure how tightly encoded-state
overlaps and reduced-state expectations concentrate around those moments;
a depth of at least 2N layers is the working rule for the proxy to be
trustworthy, and the report records the depth used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from qcrisk.core import _ansatz_program, _apply_cnot, _reduced

HERMITIAN_ATOL = 1e-10


def moment1_oracle(a, b, dim: int):
    """E[Tr(W a W^dag b)] over Haar W on U(dim)."""
    a, b = _square(a, dim), _square(b, dim)
    return np.trace(a) * np.trace(b) / dim


def moment2_oracle(a, b, c, d_mat, dim: int):
    """E[Tr(W a W^dag b) Tr(W c W^dag d_mat)] over Haar W on U(dim)."""
    if dim < 2:
        raise ValueError("second moment needs dim >= 2")
    a, b = _square(a, dim), _square(b, dim)
    c, d_mat = _square(c, dim), _square(d_mat, dim)
    ta, tb, tc, td = (np.trace(m) for m in (a, b, c, d_mat))
    tac = np.trace(a @ c)
    tbd = np.trace(b @ d_mat)
    lead = (ta * tb * tc * td + tac * tbd) / (dim**2 - 1)
    cross = (tac * tb * td + ta * tc * tbd) / (dim * (dim**2 - 1))
    return lead - cross


def encoder_overlap_bound(n_qubits: int, delta: float) -> float:
    """Deviation bound on Tr(sigma sigma') around 1/2^N at confidence delta."""
    _check_delta(delta)
    return float(np.sqrt(3.0 / (2 ** (2 * n_qubits) * delta)))


def ansatz_output_bound(operator: np.ndarray, d_qubits: int, delta: float) -> float:
    """Deviation bound on Tr(rho o) around Tr(o)/2^D at confidence delta."""
    _check_delta(delta)
    o = np.asarray(operator, dtype=complex)
    if np.max(np.abs(o - o.conj().T)) > HERMITIAN_ATOL:
        raise ValueError("operator must be Hermitian")
    tr = np.trace(o).real
    tr_sq = np.trace(o @ o).real
    return float(np.sqrt((tr**2 + 2.0 * tr_sq) / (2 ** (2 * d_qubits) * delta)))


@dataclass(frozen=True)
class ConcentrationTrial:
    """Summary of one empirical concentration run."""

    quantity: str
    n_qubits: int
    d_qubits: int | None
    depth: int
    trials: int
    delta: float
    values: np.ndarray
    reference: float
    bound: float

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def variance(self) -> float:
        return float(np.var(self.values))

    @property
    def violation_rate(self) -> float:
        return float(np.mean(np.abs(self.values - self.reference) > self.bound))


def verify_encoder_concentration(
    n_qubits: int,
    depth: int,
    trials: int,
    delta: float,
    seed: int,
    fixed_first: bool = False,
) -> ConcentrationTrial:
    """Sample pairs of random-parameter encodings and check how their state
    overlaps Tr(sigma sigma') spread around 1/2^N.

    ``fixed_first`` freezes one state of every pair at a single random draw
    instead of redrawing both sides.
    """
    _check_run(n_qubits, depth, trials, delta)
    rng = np.random.default_rng(seed)
    n_params = 3 * n_qubits * depth
    if fixed_first:
        left = _random_states(n_qubits, depth, rng.uniform(0, 2 * np.pi, (n_params, 1)))
        left = np.broadcast_to(left, (left.shape[0], trials))
    else:
        left = _random_states(n_qubits, depth, rng.uniform(0, 2 * np.pi, (n_params, trials)))
    right = _random_states(n_qubits, depth, rng.uniform(0, 2 * np.pi, (n_params, trials)))
    overlaps = np.abs(np.sum(left.conj() * right, axis=0)) ** 2
    return ConcentrationTrial(
        quantity="encoder_overlap",
        n_qubits=n_qubits,
        d_qubits=None,
        depth=depth,
        trials=trials,
        delta=delta,
        values=overlaps,
        reference=1.0 / 2**n_qubits,
        bound=encoder_overlap_bound(n_qubits, delta),
    )


def verify_ansatz_concentration(
    n_qubits: int,
    d_qubits: int,
    depth: int,
    trials: int,
    delta: float,
    operator: np.ndarray,
    seed: int,
) -> ConcentrationTrial:
    """Push one fixed input through random-parameter circuits, reduce to the
    first ``d_qubits`` wires, and check how Tr(rho o) spreads around
    Tr(o)/2^D."""
    _check_run(n_qubits, depth, trials, delta)
    if not 1 <= d_qubits <= n_qubits:
        raise ValueError(f"d_qubits {d_qubits} out of range")
    bound = ansatz_output_bound(operator, d_qubits, delta)
    o = np.asarray(operator, dtype=complex)
    if o.shape != (2**d_qubits, 2**d_qubits):
        raise ValueError("operator dimension does not match d_qubits")
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0, 2 * np.pi, (3 * n_qubits * depth, trials))
    psi = _random_states(n_qubits, depth, thetas)
    rho = _reduced(psi, d_qubits)
    values = np.einsum("bij,ji->b", rho, o).real
    return ConcentrationTrial(
        quantity="ansatz_output",
        n_qubits=n_qubits,
        d_qubits=d_qubits,
        depth=depth,
        trials=trials,
        delta=delta,
        values=values,
        reference=float(np.trace(o).real) / 2**d_qubits,
        bound=bound,
    )


CSV_COLUMNS = (
    "quantity",
    "N",
    "D",
    "depth",
    "trials",
    "delta",
    "mean",
    "variance",
    "bound",
    "violation_rate",
)


def trial_to_row(trial: ConcentrationTrial) -> dict:
    return {
        "quantity": trial.quantity,
        "N": trial.n_qubits,
        "D": "" if trial.d_qubits is None else trial.d_qubits,
        "depth": trial.depth,
        "trials": trial.trials,
        "delta": trial.delta,
        "mean": trial.mean,
        "variance": trial.variance,
        "bound": trial.bound,
        "violation_rate": trial.violation_rate,
    }


def trials_to_csv(trials: list[ConcentrationTrial], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for trial in trials:
            writer.writerow(trial_to_row(trial))


# --- internals ---------------------------------------------------------------


def _random_states(n_qubits, depth, thetas):
    """Run the layered circuit on |0...0> with per-column parameters.

    thetas has shape (3 * n_qubits * depth, batch); every batch column gets
    its own angles, so a whole trial set costs one sweep of the program.
    """
    dim = 2**n_qubits
    batch = thetas.shape[1]
    psi = np.zeros((dim, batch), dtype=complex)
    psi[0] = 1.0
    half = 0.5 * thetas
    cos, sin = np.cos(half), np.sin(half)
    for op in _ansatz_program(n_qubits, depth):
        if op[0] == "rot":
            _, axis, wire, p = op
            psi = _rotate_columns(psi, axis, wire, cos[p], sin[p])
        else:
            psi = _apply_cnot(psi, op[1], op[2])
    return psi


def _rotate_columns(psi, axis, qubit, c, s):
    # c, s have shape (batch,) and broadcast against the trailing batch axis
    shape = psi.shape
    psi = psi.reshape((1 << qubit), 2, -1, shape[-1])
    a, b = psi[:, 0], psi[:, 1]
    out = np.empty_like(psi)
    if axis == "z":
        out[:, 0] = (c - 1j * s) * a
        out[:, 1] = (c + 1j * s) * b
    elif axis == "y":
        out[:, 0] = c * a - s * b
        out[:, 1] = s * a + c * b
    else:
        out[:, 0] = c * a - 1j * s * b
        out[:, 1] = -1j * s * a + c * b
    return out.reshape(shape)


def _square(mat, dim):
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got {mat.shape}")
    return mat


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")


def _check_run(n_qubits, depth, trials, delta):
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if trials < 100:
        raise ValueError("fewer than 100 trials is statistically meaningless")
    _check_delta(delta)
