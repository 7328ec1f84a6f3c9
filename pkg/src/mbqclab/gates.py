"""Closed gate set, circuits, and basis-rotated single-qubit measurement.

The gate vocabulary is fixed (Paulis, H, S, T, rotations, U3, CZ, CNOT,
SWAP) and every gate may carry an arbitrary list of extra control
qubits.  Anything outside this set enters only as a raw 2x2 unitary
through measurement bases and final corrections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .states import InvariantViolation, Ket
from .tolerances import ATOL_STATE, PRUNE_PROB

_SQ2 = 1.0 / np.sqrt(2.0)

ID2 = np.eye(2, dtype=np.complex128)
X2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z2 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H2 = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128)
S2 = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
T2 = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128)
# Y-eigenbasis as columns: (|0> + i|1>)/sqrt2, (|0> - i|1>)/sqrt2
YB2 = np.array([[_SQ2, _SQ2], [1j * _SQ2, -1j * _SQ2]], dtype=np.complex128)

PAULIS = {"I": ID2, "X": X2, "Y": Y2, "Z": Z2}


def equatorial_basis(theta: float) -> np.ndarray:
    """Basis whose columns are ``(|0> +- e^{i theta}|1>)/sqrt(2)``."""
    e = np.exp(1j * theta)
    return np.array([[_SQ2, _SQ2], [e * _SQ2, -e * _SQ2]], dtype=np.complex128)


def require_unitary2(m, atol: float = ATOL_STATE) -> np.ndarray:
    """Validate a 2x2 unitary and return it as complex128."""
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (2, 2):
        raise InvariantViolation(f"expected a 2x2 matrix, got shape {m.shape}")
    if np.max(np.abs(m.conj().T @ m - ID2)) > atol:
        raise InvariantViolation("matrix is not unitary within tolerance")
    return m


def _rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=np.complex128
    )


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=np.complex128,
    )


_CNOT4 = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_CZ4 = np.diag([1, 1, 1, -1]).astype(np.complex128)
_SWAP4 = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)

# kind -> (target arity, parameter count)
GATE_KINDS = {
    "X": (1, 0), "Y": (1, 0), "Z": (1, 0), "H": (1, 0), "S": (1, 0), "T": (1, 0),
    "RX": (1, 1), "RY": (1, 1), "RZ": (1, 1), "U3": (1, 3),
    "CZ": (2, 0), "CNOT": (2, 0), "SWAP": (2, 0),
}


def gate_matrix(kind: str, params: tuple[float, ...] = ()) -> np.ndarray:
    """Dense matrix of a gate kind on its own targets (controls excluded)."""
    if kind in ("X", "Y", "Z", "H", "S", "T"):
        return {"X": X2, "Y": Y2, "Z": Z2, "H": H2, "S": S2, "T": T2}[kind]
    if kind == "RX":
        return _rx(params[0])
    if kind == "RY":
        return _ry(params[0])
    if kind == "RZ":
        return _rz(params[0])
    if kind == "U3":
        return _u3(*params)
    if kind == "CNOT":
        return _CNOT4
    if kind == "CZ":
        return _CZ4
    if kind == "SWAP":
        return _SWAP4
    raise InvariantViolation(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class Gate:
    """One gate instance: kind, target qubits, optional extra controls, angles."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind not in GATE_KINDS:
            raise InvariantViolation(f"unknown gate kind {self.kind!r}")
        arity, nparams = GATE_KINDS[self.kind]
        if len(self.targets) != arity:
            raise InvariantViolation(f"{self.kind} takes {arity} target(s), got {self.targets}")
        if len(self.params) != nparams:
            raise InvariantViolation(f"{self.kind} takes {nparams} parameter(s), got {self.params}")
        touched = self.targets + self.controls
        if len(set(touched)) != len(touched):
            raise InvariantViolation(f"targets/controls overlap in {self}")
        if any(q < 0 for q in touched):
            raise InvariantViolation("negative qubit index")

    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def adjoint(self) -> Gate:
        """Exact adjoint inside the closed gate set (no phase slip)."""
        k = self.kind
        if k in ("X", "Y", "Z", "H", "CZ", "CNOT", "SWAP"):
            return self
        if k in ("RX", "RY", "RZ"):
            return Gate(k, self.targets, self.controls, (-self.params[0],))
        if k == "U3":
            th, ph, la = self.params
            return Gate("U3", self.targets, self.controls, (-th, -la, -ph))
        if k == "S":
            return Gate("U3", self.targets, self.controls, (0.0, 0.0, -np.pi / 2))
        if k == "T":
            return Gate("U3", self.targets, self.controls, (0.0, 0.0, -np.pi / 4))
        raise InvariantViolation(f"unknown gate kind {k!r}")

    def shifted(self, offset: int) -> Gate:
        return self.remapped(lambda q: q + offset)

    def remapped(self, mapping) -> Gate:
        return Gate(
            self.kind,
            tuple(mapping(q) for q in self.targets),
            tuple(mapping(q) for q in self.controls),
            self.params,
        )

    def controlled_by(self, *extra: int) -> Gate:
        return Gate(self.kind, self.targets, self.controls + tuple(extra), self.params)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on a fixed register."""

    num_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits(), default=-1) >= self.num_qubits:
                raise InvariantViolation(f"gate {g} exceeds register of {self.num_qubits} qubits")

    def adjoint(self) -> Circuit:
        return Circuit(self.num_qubits, tuple(g.adjoint() for g in reversed(self.gates)))

    def extended(self, *more: Gate) -> Circuit:
        return Circuit(self.num_qubits, self.gates + tuple(more))

    def __len__(self) -> int:
        return len(self.gates)


def _apply_gate_flat(amps: np.ndarray, g: Gate, n: int) -> None:
    """Apply one gate in place to a flat amplitude array of 2**n entries."""
    cmask = 0
    for c in g.controls:
        cmask |= 1 << (n - 1 - c)
    kind = g.kind
    if kind == "CNOT":
        ctrl, tgt = g.targets
        cmask |= 1 << (n - 1 - ctrl)
        kernels.apply_1q_inplace(amps, X2, n, tgt, cmask)
    elif kind == "CZ":
        ctrl, tgt = g.targets
        cmask |= 1 << (n - 1 - ctrl)
        kernels.apply_1q_inplace(amps, Z2, n, tgt, cmask)
    elif kind == "SWAP":
        kernels.apply_2q_inplace(amps, _SWAP4, n, g.targets[0], g.targets[1], cmask)
    else:
        kernels.apply_1q_inplace(amps, gate_matrix(kind, g.params), n, g.targets[0], cmask)


def apply_gate(state: Ket, g: Gate) -> Ket:
    if max(g.qubits(), default=-1) >= state.num_qubits:
        raise InvariantViolation(f"gate {g} out of range for {state.num_qubits} qubits")
    amps = state.amplitudes.copy()
    _apply_gate_flat(amps, g, state.num_qubits)
    return Ket(state.num_qubits, amps)


def apply_circuit(state: Ket, circuit: Circuit) -> Ket:
    if circuit.num_qubits != state.num_qubits:
        raise InvariantViolation(
            f"circuit on {circuit.num_qubits} qubits applied to {state.num_qubits}-qubit state"
        )
    amps = state.amplitudes.copy()
    for g in circuit.gates:
        _apply_gate_flat(amps, g, state.num_qubits)
    return Ket(state.num_qubits, amps)


def circuit_to_unitary(circuit: Circuit, max_qubits: int = 12) -> np.ndarray:
    """Dense matrix of a circuit, built column-by-column through the kernels."""
    n = circuit.num_qubits
    if n > max_qubits:
        raise InvariantViolation(f"refusing dense unitary on {n} > {max_qubits} qubits")
    dim = 1 << n
    cols = np.eye(dim, dtype=np.complex128)  # row i will hold U @ e_i, transposed below
    for i in range(dim):
        row = cols[i]
        for g in circuit.gates:
            _apply_gate_flat(row, g, n)
    return cols.T.copy()


@dataclass(frozen=True)
class MeasurementBranch:
    """One outcome of a single-qubit measurement.

    ``post_state`` is the renormalized residual with the measured qubit
    removed; branches with probability below the pruning threshold are
    flagged with probability 0.0 and carry no post state.
    """

    outcome: int
    probability: float
    post_state: Ket | None


def measure_in_basis(state: Ket, qubit: int, basis: np.ndarray) -> list[MeasurementBranch]:
    """Measure ``qubit`` in the basis ``{u|0>, u|1>}`` and return both branches."""
    u = require_unitary2(basis)
    n = state.num_qubits
    if not (0 <= qubit < n):
        raise InvariantViolation(f"qubit {qubit} out of range for {n}-qubit state")
    moved = np.moveaxis(state.tensor_view(), qubit, 0).reshape(2, -1)
    residual = u.conj().T @ moved  # row b  =  (<b| u^dagger) applied on the qubit
    out = []
    for b in (0, 1):
        p = float(np.real(np.vdot(residual[b], residual[b])))
        if p < PRUNE_PROB:
            out.append(MeasurementBranch(b, 0.0, None))
        else:
            post = Ket(n - 1, residual[b] / np.sqrt(p))
            out.append(MeasurementBranch(b, p, post))
    return out
