"""State vectors, density operators and the distance measures between them.

Index convention, used everywhere in this package: bit ``j`` of a basis
index is the computational-basis state of qubit ``j``, with qubit 0 the
most significant bit.  ``|01>`` on two qubits therefore sits at index 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import ATOL_STATE


class InvariantViolation(ValueError):
    """A constructed value failed one of its structural invariants."""


def _as_complex(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=np.complex128)
    out = np.array(out, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Ket:
    """Normalized pure state on ``num_qubits`` qubits.

    ``amplitudes`` has length ``2**num_qubits`` and unit 2-norm within
    1e-10.  Zero qubits is allowed: the amplitude array then holds a
    single unit-modulus scalar.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 0:
            raise InvariantViolation("num_qubits must be >= 0")
        amps = _as_complex(self.amplitudes)
        if amps.shape != (1 << self.num_qubits,):
            raise InvariantViolation(
                f"expected {1 << self.num_qubits} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > ATOL_STATE:
            raise InvariantViolation(f"state norm {norm} deviates from 1 beyond {ATOL_STATE}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, num_qubits: int) -> Ket:
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def basis(cls, num_qubits: int, bits: str | int) -> Ket:
        """Computational basis state; ``bits`` is a string like ``"011"``."""
        if isinstance(bits, str):
            if len(bits) != num_qubits or set(bits) - {"0", "1"}:
                raise InvariantViolation(f"bad basis label {bits!r} for {num_qubits} qubits")
            index = int(bits, 2) if bits else 0
        else:
            index = int(bits)
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps) -> Ket:
        amps = np.asarray(amps, dtype=np.complex128)
        n = int(round(np.log2(amps.shape[0])))
        if (1 << n) != amps.shape[0]:
            raise InvariantViolation("amplitude length must be a power of two")
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def tensor_view(self) -> np.ndarray:
        """Read-only view shaped ``(2,) * num_qubits``."""
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def overlap(self, other: Ket) -> complex:
        """Inner product ``<self|other>``."""
        if other.num_qubits != self.num_qubits:
            raise InvariantViolation("qubit count mismatch in overlap")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityOp:
    """Hermitian, unit-trace operator on ``num_qubits`` qubits.

    The constructor verifies hermiticity and trace; positivity is
    guaranteed by the construction paths in this package (pure
    projectors, convex mixtures, partial traces) and asserted by the
    property-test suite rather than on every construction.
    """

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_complex(self.matrix)
        dim = 1 << self.num_qubits
        if mat.shape != (dim, dim):
            raise InvariantViolation(f"expected {dim}x{dim} matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL_STATE:
            raise InvariantViolation("density matrix is not Hermitian within 1e-10")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > ATOL_STATE:
            raise InvariantViolation(f"density trace {tr} deviates from 1 beyond {ATOL_STATE}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def tensor(a: Ket, b: Ket) -> Ket:
    """Kronecker product with ``a``'s qubits more significant."""
    return Ket(a.num_qubits + b.num_qubits, np.kron(a.amplitudes, b.amplitudes))


def pure_density(phi: Ket) -> DensityOp:
    return DensityOp(phi.num_qubits, np.outer(phi.amplitudes, phi.amplitudes.conj()))


def mixture_density(pairs) -> DensityOp:
    """Convex mixture ``sum_k p_k |phi_k><phi_k|`` from ``(p, Ket)`` pairs."""
    pairs = list(pairs)
    if not pairs:
        raise InvariantViolation("empty mixture")
    n = pairs[0][1].num_qubits
    acc = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for p, phi in pairs:
        if phi.num_qubits != n:
            raise InvariantViolation("mixture members differ in qubit count")
        acc += p * np.outer(phi.amplitudes, phi.amplitudes.conj())
    return DensityOp(n, acc)


def partial_trace(state: Ket | DensityOp, keep) -> DensityOp:
    """Reduced density operator on the kept qubits (ascending index order)."""
    keep = sorted(set(int(q) for q in keep))
    n = state.num_qubits
    if not keep:
        raise InvariantViolation("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise InvariantViolation(f"keep set {keep} out of range for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    k = len(keep)
    if isinstance(state, Ket):
        psi = state.tensor_view()
        moved = np.moveaxis(psi, keep, range(k))
        mat = moved.reshape(1 << k, 1 << (n - k))
        return DensityOp(k, mat @ mat.conj().T)
    # density input: contract row/col axes of every dropped qubit
    tens = state.matrix.reshape((2,) * (2 * n))
    row = list(range(n))
    col = list(range(n, 2 * n))
    for q in drop:
        col[q] = row[q]
    out_axes = [row[q] for q in keep] + [col[q] for q in keep]
    reduced = np.einsum(tens, row + col, out_axes)
    return DensityOp(k, reduced.reshape(1 << k, 1 << k))


def fidelity_with_pure(rho: DensityOp, phi: Ket) -> float:
    """Fidelity ``sqrt(<phi|rho|phi>)`` between a mixed and a pure state."""
    if rho.num_qubits != phi.num_qubits:
        raise InvariantViolation("qubit count mismatch in fidelity")
    val = np.real(np.vdot(phi.amplitudes, rho.matrix @ phi.amplitudes))
    return float(np.sqrt(min(max(val, 0.0), 1.0)))


def trace_distance(a: DensityOp, b: DensityOp) -> float:
    """Half the trace norm of ``a - b`` via exact Hermitian eigendecomposition."""
    if a.num_qubits != b.num_qubits:
        raise InvariantViolation("qubit count mismatch in trace distance")
    diff = a.matrix - b.matrix
    herm = (diff + diff.conj().T) / 2.0
    eig = np.linalg.eigvalsh(herm)
    return float(min(max(0.5 * np.sum(np.abs(eig)), 0.0), 1.0))


def schmidt_values_sq(state: Ket, subset) -> np.ndarray:
    """Squared Schmidt coefficients across the cut (subset | rest), descending."""
    subset = sorted(set(int(q) for q in subset))
    n = state.num_qubits
    if not subset or len(subset) == n:
        raise InvariantViolation("cut must be a proper nonempty subset")
    moved = np.moveaxis(state.tensor_view(), subset, range(len(subset)))
    mat = moved.reshape(1 << len(subset), -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    return sv**2


def bipartite_entropy(state: Ket, subset) -> float:
    """Von Neumann entanglement entropy (bits) across the cut (subset | rest)."""
    lam = schmidt_values_sq(state, subset)
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log2(lam)))
