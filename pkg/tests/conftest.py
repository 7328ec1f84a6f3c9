import numpy as np
import pytest

from mbqclab.gates import Circuit, Gate
from mbqclab.reduction import (
    ReductionParams,
    all_reject_verifier,
    build_reduction,
    equality_verifier,
    rotation_angle_for,
    rotation_verifier,
)
from mbqclab.states import Ket


def random_state(n: int, rng: np.random.Generator) -> Ket:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return Ket(n, v / np.linalg.norm(v))


def haar_unitary2(rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


_ONE_Q = ("X", "Y", "Z", "H", "S", "T")
_ROT = ("RX", "RY", "RZ")


def random_circuit(n: int, length: int, rng: np.random.Generator, *, allow_controls=True) -> Circuit:
    gates = []
    for _ in range(length):
        roll = rng.random()
        if roll < 0.4:
            gates.append(Gate(str(rng.choice(_ONE_Q)), (int(rng.integers(n)),)))
        elif roll < 0.65:
            kind = str(rng.choice(_ROT))
            gates.append(Gate(kind, (int(rng.integers(n)),), params=(float(rng.uniform(-np.pi, np.pi)),)))
        elif roll < 0.75:
            th, ph, la = rng.uniform(-np.pi, np.pi, size=3)
            gates.append(Gate("U3", (int(rng.integers(n)),), params=(float(th), float(ph), float(la))))
        elif n >= 2:
            a, b = rng.choice(n, size=2, replace=False)
            kind = str(rng.choice(("CZ", "CNOT", "SWAP")))
            g = Gate(kind, (int(a), int(b)))
            rest = [q for q in range(n) if q not in (a, b)]
            if allow_controls and rest and rng.random() < 0.3:
                g = g.controlled_by(int(rng.choice(rest)))
            gates.append(g)
    return Circuit(n, tuple(gates))


@pytest.fixture(scope="session")
def yes_bundle():
    """Equality verifier accepts only y* = 11 with certainty (p = 1)."""
    return build_reduction(equality_verifier("11"), ReductionParams(1, 2, 3, 1))


@pytest.fixture(scope="session")
def no_bundle():
    """All-reject verifier: p = 0 for every witness."""
    return build_reduction(all_reject_verifier(2), ReductionParams(1, 2, 3, 1))


@pytest.fixture(scope="session")
def rot_eighth_bundle():
    """Rotation verifier with p = 1/8 = 2**-r for every witness, r = 3."""
    return build_reduction(rotation_verifier(rotation_angle_for(0.125)), ReductionParams(1, 2, 3, 1))


@pytest.fixture(scope="session")
def rot_threequarter_r2_bundle():
    """Rotation verifier with p = 3/4 for every witness, r = 2, no precision."""
    return build_reduction(rotation_verifier(2 * np.pi / 3), ReductionParams(1, 2, 2))
