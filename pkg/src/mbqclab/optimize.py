"""Alternating closed-form optimizers for product corrections and overlaps.

Both routines sweep one qubit at a time.  The single-qubit subproblem is
solved exactly: for corrections the optimal local unitary is the polar
factor of the 2x2 environment matrix (optimum value = sum of its singular
values), and for product-state factors it is the normalized environment
vector.  Each sweep is monotone, so the iterates converge to a local
optimum; random restarts make every acceptance-suite instance reach the
analytic value, but global optimality is not guaranteed in general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import InvariantViolation, Ket
from .tolerances import OPT_GAIN_TOL

_MAX_SWEEPS = 100


def _polar_unitary(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Unitary maximizing |<u, m>_F| and the optimum (nuclear norm of m)."""
    u, s, vh = np.linalg.svd(m)
    return u @ vh, float(np.sum(s))


def _haar_unitary2(rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _assert_monotone(history: list[float]) -> None:
    for a, b in zip(history, history[1:]):
        if b < a - 1e-12:
            raise AssertionError("alternating sweep decreased the objective")


@dataclass
class CorrectionsResult:
    corrections: list[np.ndarray]
    overlap: float
    history: list[float]


def optimize_corrections(
    branch: Ket,
    target: Ket,
    *,
    restarts: int = 8,
    seed: int = 0,
) -> CorrectionsResult:
    """Maximize ``|<branch| (v_1 x ... x v_n)^dagger |target>|`` over local unitaries.

    Restart 0 starts from the identity so exact single-Pauli corrections
    are recovered deterministically; the remaining restarts start from
    Haar-random local unitaries.
    """
    n = branch.num_qubits
    if target.num_qubits != n:
        raise InvariantViolation("branch and target qubit counts differ")
    if n == 0:
        val = abs(branch.overlap(target))
        return CorrectionsResult([], val, [val])
    bra = branch.tensor_view().conj()
    tgt = target.tensor_view()
    rng = np.random.default_rng(seed)

    best: CorrectionsResult | None = None
    for restart in range(max(1, restarts)):
        vs = [np.eye(2, dtype=np.complex128) if restart == 0 else _haar_unitary2(rng) for _ in range(n)]
        history: list[float] = []
        prev = -1.0
        val = 0.0
        for _ in range(_MAX_SWEEPS):
            for j in range(n):
                corrected = tgt
                for k in range(n):
                    if k != j:
                        corrected = np.moveaxis(
                            np.tensordot(vs[k].conj().T, corrected, axes=([1], [k])), 0, k
                        )
                other_axes = [k for k in range(n) if k != j]
                env = np.tensordot(bra, corrected, axes=(other_axes, other_axes))
                vs[j], val = _polar_unitary(env.T)
            history.append(val)
            if val - prev < OPT_GAIN_TOL:
                break
            prev = val
        _assert_monotone(history)
        if best is None or history[-1] > best.overlap:
            best = CorrectionsResult(vs, history[-1], history)
    return best


@dataclass
class ProductOverlapResult:
    product_state: Ket
    overlap_sq: float
    history: list[float]


def optimize_product_overlap(
    target: Ket,
    *,
    restarts: int = 32,
    seed: int = 0,
) -> ProductOverlapResult:
    """Maximize ``|<xi_1 x ... x xi_q | target>|^2`` over fully product states.

    Restart 0 starts from the largest-amplitude computational basis state;
    the rest from Haar-random product states.
    """
    q = target.num_qubits
    if q == 0:
        return ProductOverlapResult(target, abs(target.amplitudes[0]) ** 2, [])
    if q > 11:
        raise InvariantViolation("product-overlap optimizer capped at 11 qubits")
    tgt = target.tensor_view()
    rng = np.random.default_rng(seed)

    def basis_init() -> list[np.ndarray]:
        top = int(np.argmax(np.abs(target.amplitudes)))
        bits = format(top, f"0{q}b")
        return [np.array([1.0 - int(b), float(int(b))], dtype=np.complex128) for b in bits]

    def random_init() -> list[np.ndarray]:
        out = []
        for _ in range(q):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            out.append(v / np.linalg.norm(v))
        return out

    best: ProductOverlapResult | None = None
    for restart in range(max(1, restarts)):
        xis = basis_init() if restart == 0 else random_init()
        history: list[float] = []
        prev = -1.0
        for _ in range(_MAX_SWEEPS):
            val = 0.0
            for j in range(q):
                others = np.ones(1, dtype=np.complex128)
                for k in range(q):
                    if k != j:
                        others = np.kron(others, xis[k])
                env = np.moveaxis(tgt, j, 0).reshape(2, -1) @ others.conj()
                norm = float(np.linalg.norm(env))
                if norm > 1e-300:
                    xis[j] = env / norm
                val = norm
            history.append(val**2)
            if val**2 - prev < OPT_GAIN_TOL:
                break
            prev = val**2
        _assert_monotone(history)
        amps = np.ones(1, dtype=np.complex128)
        for xi in xis:
            amps = np.kron(amps, xi)
        if best is None or history[-1] > best.overlap_sq:
            best = ProductOverlapResult(Ket(q, amps), history[-1], history)
    return best
