"""Statevector core: qubit states, gates, data encoders, the layered
hardware-efficient ansatz, reduced feature states, and Haar-random unitaries.

Wire 0 is the most significant bit of the computational-basis index, so the
bitstring "011" names basis state 3 and a reduced state over the first D
wires is obtained by tracing out the trailing N-D wires.

Everything is dense complex128. The private kernels at the bottom carry a
trailing batch axis so callers can push many inputs (or many shifted
parameter sets) through a circuit in single numpy calls; the public
functions wrap them for one state at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGVAL_FLOOR = -1e-9

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

ROTATION_AXES = ("x", "y", "z")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``n_qubits`` wires; amplitudes are read-only."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm!r} is not 1 within {NORM_ATOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """|0...0> on ``n_qubits`` wires."""
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        if not 0 <= index < 2**n_qubits:
            raise ValueError(f"basis index {index} out of range")
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)


@dataclass(frozen=True)
class EncoderSpec:
    """Input-to-state map plus the gate bookkeeping the bound module reads.

    ``n_gates``/``n_tunable``/``max_arity`` are declared counts for an
    implementing circuit, not measured from the simulation: basis encoding
    costs one conditional X per wire; amplitude encoding is budgeted at one
    tunable two-qubit primitive per amplitude.
    """

    kind: str
    n_qubits: int
    n_gates: int = 0
    n_tunable: int = 0
    max_arity: int = 0

    def __post_init__(self):
        if self.kind not in ("basis", "amplitude"):
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        defaults = {
            "basis": (self.n_qubits, self.n_qubits, 1),
            "amplitude": (2**self.n_qubits, 2**self.n_qubits, 2),
        }[self.kind]
        for name, value in zip(("n_gates", "n_tunable", "max_arity"), defaults):
            if getattr(self, name) == 0:
                object.__setattr__(self, name, value)
            elif getattr(self, name) < 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class AnsatzSpec:
    """Layered circuit: per wire RZ, RY, RZ, then a CNOT ring, repeated.

    ``params`` is flat with length 3 * n_qubits * n_layers, ordered layer by
    layer, wire by wire, rotation by rotation.
    """

    n_qubits: int
    n_layers: int
    params: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_layers < 0:
            raise ValueError("need n_qubits >= 1 and n_layers >= 0")
        params = np.array(self.params, dtype=float)
        expected = 3 * self.n_qubits * self.n_layers
        if params.shape != (expected,):
            raise ValueError(
                f"expected {expected} parameters for "
                f"{self.n_qubits} qubits x {self.n_layers} layers, "
                f"got shape {params.shape}"
            )
        params.setflags(write=False)
        object.__setattr__(self, "params", params)

    @property
    def n_params(self) -> int:
        return 3 * self.n_qubits * self.n_layers

    def with_params(self, params: np.ndarray) -> "AnsatzSpec":
        return AnsatzSpec(self.n_qubits, self.n_layers, params)


@dataclass(frozen=True, eq=False)
class FeatureState:
    """Reduced density matrix over the first ``d_qubits`` wires."""

    d_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2**self.d_qubits
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_ATOL:
            raise ValueError("feature state is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > TRACE_ATOL:
            raise ValueError("feature state trace is not 1")
        if np.linalg.eigvalsh(mat).min() < EIGVAL_FLOOR:
            raise ValueError("feature state has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return 2**self.d_qubits

    def purity(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))


def rotation_matrix(axis: str, angle: float) -> np.ndarray:
    """2x2 matrix of exp(-i * angle * P_axis / 2)."""
    if axis not in ROTATION_AXES:
        raise ValueError(f"unknown rotation axis {axis!r}")
    half = 0.5 * angle
    c, s = np.cos(half), np.sin(half)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[c - 1j * s, 0.0], [0.0, c + 1j * s]])


def apply_rotation(state: StateVector, axis: str, qubit: int, angle: float) -> StateVector:
    """Single-wire rotation exp(-i * angle * P/2) on ``qubit``."""
    _check_qubit(qubit, state.n_qubits)
    psi = _apply_1q(state.amplitudes[:, None], rotation_matrix(axis, angle), qubit)
    return StateVector(state.n_qubits, psi[:, 0])


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_qubit(control, state.n_qubits)
    _check_qubit(target, state.n_qubits)
    if control == target:
        raise ValueError("control and target must differ")
    psi = _apply_cnot(state.amplitudes[:, None], control, target)
    return StateVector(state.n_qubits, psi[:, 0])


def encode(enc: EncoderSpec, x) -> StateVector:
    """Map one input to a state: bitstring to a basis state, or a unit
    vector to its amplitude pattern."""
    if enc.kind == "basis":
        if not isinstance(x, str) or len(x) != enc.n_qubits:
            raise ValueError(
                f"basis encoding needs a length-{enc.n_qubits} bitstring"
            )
        if set(x) - {"0", "1"}:
            raise ValueError(f"bitstring {x!r} has characters other than 0/1")
        return StateVector.basis(enc.n_qubits, int(x, 2))
    vec = np.asarray(x, dtype=complex)
    if vec.shape != (2**enc.n_qubits,):
        raise ValueError(
            f"amplitude encoding needs a length-{2**enc.n_qubits} vector"
        )
    if abs(np.linalg.norm(vec) - 1.0) > NORM_ATOL:
        raise ValueError("amplitude encoding needs a unit-norm vector")
    return StateVector(enc.n_qubits, vec)


def apply_ansatz(state: StateVector, ansatz: AnsatzSpec) -> StateVector:
    if ansatz.n_qubits != state.n_qubits:
        raise ValueError("ansatz and state disagree on qubit count")
    psi = _run_program(
        state.amplitudes[:, None],
        _ansatz_program(ansatz.n_qubits, ansatz.n_layers),
        ansatz.params,
    )
    return StateVector(state.n_qubits, psi[:, 0])


def feature_state(state: StateVector, d_keep: int) -> FeatureState:
    """Trace out the trailing wires, keeping the first ``d_keep``."""
    if not 1 <= d_keep <= state.n_qubits:
        raise ValueError(f"d_keep {d_keep} out of range")
    rho = _reduced(state.amplitudes[:, None], d_keep)[0]
    return FeatureState(d_keep, rho)


def expectation(rho, operator: np.ndarray) -> float:
    """Tr(rho O) for Hermitian O; the imaginary rounding residue is dropped."""
    mat = rho.matrix if isinstance(rho, FeatureState) else np.asarray(rho)
    operator = np.asarray(operator)
    if operator.shape != mat.shape:
        raise ValueError(
            f"operator shape {operator.shape} does not match state {mat.shape}"
        )
    if np.max(np.abs(operator - operator.conj().T)) > HERMITIAN_ATOL:
        raise ValueError("operator is not Hermitian")
    return float(np.sum(mat * operator.T).real)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed unitary via QR of a complex Gaussian matrix,
    with the R-diagonal phases folded back in."""
    return _haar_block(dim, 1, rng)[0]


def haar_unitaries(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` independent Haar unitaries, shape (count, dim, dim)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return _haar_block(dim, count, rng)


def _haar_block(dim, count, rng):
    if dim < 1:
        raise ValueError("dim must be >= 1")
    z = rng.normal(size=(count, dim, dim)) + 1j * rng.normal(size=(count, dim, dim))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def _check_qubit(qubit, n_qubits):
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} wires")


# ---------------------------------------------------------------------------
# Batched kernels. psi always has shape (2**n, batch), C-contiguous, and the
# wire convention above makes wire q the axis of stride 2**(n-1-q) blocks,
# i.e. reshape(2**q, 2, -1) isolates it with the batch folded into the tail.


def _apply_1q(psi, mat, qubit):
    shape = psi.shape
    psi = psi.reshape((1 << qubit), 2, -1)
    out = np.empty_like(psi)
    a, b = psi[:, 0], psi[:, 1]
    out[:, 0] = mat[0, 0] * a + mat[0, 1] * b
    out[:, 1] = mat[1, 0] * a + mat[1, 1] * b
    return out.reshape(shape)


def _apply_cnot(psi, control, target):
    shape = psi.shape
    lo, hi = (control, target) if control < target else (target, control)
    mid = 1 << (hi - lo - 1)
    psi = psi.reshape((1 << lo), 2, mid, 2, -1)
    out = psi.copy()
    if control < target:
        out[:, 1, :, 0] = psi[:, 1, :, 1]
        out[:, 1, :, 1] = psi[:, 1, :, 0]
    else:
        out[:, 0, :, 1] = psi[:, 1, :, 1]
        out[:, 1, :, 1] = psi[:, 0, :, 1]
    return out.reshape(shape)


def _reduced(psi, d_keep):
    """(2**n, B) -> (B, 2**d, 2**d) reduced states over the leading wires."""
    batch = psi.shape[-1]
    psi = psi.reshape((1 << d_keep), -1, batch)
    return np.einsum("aeb,ceb->bac", psi, psi.conj())


def _ansatz_program(n_qubits, n_layers):
    """Flat gate list: ("rot", axis, wire, param_index) and ("cnot", c, t).

    The ring is skipped on a single wire (a 1-cycle would be a self-loop).
    """
    program = []
    p = 0
    for _ in range(n_layers):
        for wire in range(n_qubits):
            for axis in ("z", "y", "z"):
                program.append(("rot", axis, wire, p))
                p += 1
        if n_qubits > 1:
            for wire in range(n_qubits):
                program.append(("cnot", wire, (wire + 1) % n_qubits))
    return program


def _run_program(psi, program, params, start=0, prefixes=None):
    """Run ``program[start:]`` on psi. If ``prefixes`` is a dict it receives
    {param_index: state before that rotation} snapshots along the way."""
    for op in program[start:]:
        if op[0] == "rot":
            _, axis, wire, p = op
            if prefixes is not None:
                prefixes[p] = psi
            psi = _apply_1q(psi, rotation_matrix(axis, params[p]), wire)
        else:
            _, control, target = op
            psi = _apply_cnot(psi, control, target)
    return psi


def _program_position_after(program, param_index):
    """Index of the gate right after the rotation holding ``param_index``."""
    for pos, op in enumerate(program):
        if op[0] == "rot" and op[3] == param_index:
            return pos + 1
    raise ValueError(f"no rotation carries parameter {param_index}")
