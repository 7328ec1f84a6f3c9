"""Hardness-reduction construction from classical-witness quantum verifiers.

A verifier circuit acts on ``w`` witness qubits followed by ``n`` work
qubits and reports acceptance on qubit 0 after it runs.  The reduction
wraps one verifier into a larger unitary that copies the acceptance bit
into a flag qubit and, conditioned on acceptance, spreads a maximally
entangled state over ``2r`` ancillas.  Targets indexed by the witness are
the wrapped unitary preceded by bit flips on the witness register, the
resource state is all zeros with a single measured qubit, and the
universal-side strategy simply imprints the witness with X corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import CallbackStrategy, ResourceState, Strategy
from .gates import Circuit, Gate, ID2, X2, apply_circuit
from .states import InvariantViolation, Ket
from .universality import UnitaryFamily


class ParameterConstraintError(ValueError):
    """Reduction parameters violate the required inequality r >= 2t + 1."""


@dataclass(frozen=True)
class VerifierCircuit:
    """Circuit on ``w + n`` qubits; acceptance = qubit 0 measuring 1 afterwards."""

    circuit: Circuit
    w: int
    n: int

    def __post_init__(self):
        if self.w < 1 or self.n < 0:
            raise InvariantViolation("verifier needs w >= 1 witness and n >= 0 work qubits")
        if self.circuit.num_qubits != self.w + self.n:
            raise InvariantViolation(
                f"verifier circuit has {self.circuit.num_qubits} qubits, expected w+n={self.w + self.n}"
            )


@dataclass(frozen=True)
class ReductionParams:
    n: int
    w: int
    r: int
    t: int | None = None

    def __post_init__(self):
        if self.r < 1:
            raise InvariantViolation("r must be a positive integer")
        if self.t is not None:
            if self.t < 1:
                raise InvariantViolation("t must be a positive integer")
            if self.r < 2 * self.t + 1:
                raise ParameterConstraintError(
                    f"r={self.r} violates r >= 2t+1 for t={self.t}"
                )

    @property
    def num_unitary_qubits(self) -> int:
        return self.n + self.w + 2 * self.r + 1

    @property
    def num_resource_qubits(self) -> int:
        return self.n + self.w + 2 * self.r + 2

    @property
    def epsilon(self) -> float:
        if self.t is None:
            raise InvariantViolation("params carry no precision exponent")
        return 2.0 ** (-self.t)


def acceptance_prob(verifier: VerifierCircuit, y: str) -> float:
    """Probability that qubit 0 reads 1 after the verifier runs on ``|y>|0..0>``."""
    if len(y) != verifier.w:
        raise InvariantViolation(f"witness {y!r} has wrong length for w={verifier.w}")
    state = Ket.basis(verifier.w + verifier.n, y + "0" * verifier.n)
    out = apply_circuit(state, verifier.circuit)
    top = 1 << (out.num_qubits - 1)
    amps = out.amplitudes
    return float(np.sum(np.abs(amps[top:]) ** 2) / np.sum(np.abs(amps) ** 2))


def amplify_verifier(verifier: VerifierCircuit, k: int) -> VerifierCircuit:
    """Majority vote over ``k`` independent copies of the verifier.

    The witness register is CNOT-copied (it is classical) into ``k - 1``
    scratch registers before any copy runs, each copy gets fresh work
    qubits, and the majority of the ``k`` acceptance bits is computed
    reversibly into a fresh qubit that is swapped to position 0.  For
    acceptance probability ``p`` per copy, the amplified probability is
    the binomial tail ``sum_{j > k/2} C(k, j) p^j (1-p)^(k-j)``.
    """
    if k < 1 or k % 2 == 0:
        raise InvariantViolation("amplification requires an odd k >= 1")
    w, n = verifier.w, verifier.n
    total = w + (k - 1) * w + k * n + 1
    maj = total - 1

    def block_map(i: int):
        wit = list(range(w)) if i == 0 else [w + (i - 1) * w + q for q in range(w)]
        work = [k * w + i * n + q for q in range(n)]
        return wit, work

    gates: list[Gate] = []
    for i in range(1, k):
        wit, _ = block_map(i)
        for q in range(w):
            gates.append(Gate("CNOT", (q, wit[q])))
    outputs = []
    for i in range(k):
        wit, work = block_map(i)
        table = wit + work
        gates.extend(g.remapped(lambda q, table=table: table[q]) for g in verifier.circuit.gates)
        outputs.append(wit[0])
    for pattern in range(1 << k):
        bits = [(pattern >> (k - 1 - i)) & 1 for i in range(k)]
        if sum(bits) <= k // 2:
            continue
        flips = [outputs[i] for i in range(k) if bits[i] == 0]
        gates.extend(Gate("X", (q,)) for q in flips)
        gates.append(Gate("X", (maj,), controls=tuple(outputs)))
        gates.extend(Gate("X", (q,)) for q in flips)
    gates.append(Gate("SWAP", (0, maj)))
    return VerifierCircuit(Circuit(total, tuple(gates)), w, total - w)


def binomial_tail(p: float, k: int) -> float:
    """Independent oracle for the amplified acceptance probability."""
    return float(
        sum(math.comb(k, j) * p**j * (1.0 - p) ** (k - j) for j in range(k // 2 + 1, k + 1))
    )


def me_prep_circuit(r: int, controlled_by: int | None = None, *, num_qubits: int | None = None) -> Circuit:
    """Prepare ``2^{-r/2} sum_j |j>|j>`` on the last ``2r`` qubits of the register.

    H on each qubit of the first half, then a CNOT fan into the second
    half.  With ``controlled_by`` set, every gate is additionally
    controlled on that qubit, so the preparation happens only when the
    control is ``|1>``.
    """
    if r < 1:
        raise InvariantViolation("r must be >= 1")
    if num_qubits is None:
        num_qubits = 2 * r + (1 if controlled_by is not None else 0)
    first = num_qubits - 2 * r
    if first < 0 or (controlled_by is not None and not (0 <= controlled_by < first)):
        raise InvariantViolation("register too small for the requested preparation")
    gates: list[Gate] = []
    for i in range(r):
        g = Gate("H", (first + i,))
        if controlled_by is not None:
            g = g.controlled_by(controlled_by)
        gates.append(g)
    for i in range(r):
        g = Gate("CNOT", (first + i, first + r + i))
        if controlled_by is not None:
            g = g.controlled_by(controlled_by)
        gates.append(g)
    return Circuit(num_qubits, tuple(gates))


def build_reduction_circuit(verifier: VerifierCircuit, params: ReductionParams) -> Circuit:
    """The wrapped unitary on ``n + w + 2r + 1`` qubits.

    Layout: witness 0..w-1, work w..w+n-1, flag w+n, entangling ancillas
    w+n+1..w+n+2r.  Runs the verifier, CNOTs the acceptance qubit into the
    flag, prepares the entangled ancillas controlled on acceptance, then
    undoes the verifier.
    """
    if params.n != verifier.n or params.w != verifier.w:
        raise InvariantViolation("params disagree with the verifier shape")
    total = params.num_unitary_qubits
    flag = verifier.w + verifier.n
    gates: list[Gate] = list(verifier.circuit.gates)
    gates.append(Gate("CNOT", (0, flag)))
    gates.extend(me_prep_circuit(params.r, controlled_by=0, num_qubits=total).gates)
    gates.extend(verifier.circuit.adjoint().gates)
    return Circuit(total, tuple(gates))


def build_family(unitary: Circuit, w: int) -> UnitaryFamily:
    """Targets ``member(y) = unitary after X on witness qubit j wherever y_j = 1``."""

    def member(y: str) -> Circuit:
        pre = tuple(Gate("X", (j,)) for j, bit in enumerate(y) if bit == "1")
        return Circuit(unitary.num_qubits, pre + unitary.gates)

    return UnitaryFamily(w, unitary.num_qubits, member)


def build_resource(params: ReductionParams) -> ResourceState:
    """All-zeros ket with exactly one measured qubit in front."""
    return ResourceState(Ket.zero(params.num_resource_qubits), params.num_unitary_qubits)


def witness_imprint_strategy(params: ReductionParams) -> Strategy:
    """Measure the single extra qubit computationally, then imprint ``y``.

    The corrections are X on output positions ``0..w-1`` wherever the
    witness bit is 1 (positions are counted after the measured qubit has
    been removed, hence the shift relative to the resource register) and
    identity elsewhere, sending every branch to ``|y 0...0>``.
    """
    n_out = params.num_unitary_qubits
    w = params.w

    def basis_fn(step, y, prefix):
        return ID2

    def corrections_fn(y, m):
        return [X2 if (j < w and y[j] == "1") else ID2 for j in range(n_out)]

    return CallbackStrategy(basis_fn, corrections_fn)


@dataclass(frozen=True)
class ReductionOutput:
    params: ReductionParams
    unitary: Circuit
    family: UnitaryFamily
    resource: ResourceState
    honest_strategy: Strategy


def build_reduction(verifier: VerifierCircuit, params: ReductionParams) -> ReductionOutput:
    unitary = build_reduction_circuit(verifier, params)
    return ReductionOutput(
        params=params,
        unitary=unitary,
        family=build_family(unitary, params.w),
        resource=build_resource(params),
        honest_strategy=witness_imprint_strategy(params),
    )


@dataclass(frozen=True)
class BoundTable:
    """Closed-form values of the bound chains for one acceptance probability."""

    p: float
    r: int
    t: int | None
    yes_branch_bound: float     # max squared product overlap with the wrapped output
    yes_fidelity_bound: float   # fidelity ceiling in the accepting regime
    yes_distance_floor: float   # distance floor in the accepting regime
    no_fidelity_sq_floor: float  # (1-p)^2, attained by the imprinting strategy
    no_distance_ceiling: float
    epsilon: float | None


def analytic_bounds(p: float, r: int, t: int | None = None) -> BoundTable:
    """Pure arithmetic for the reduction bounds; no simulation involved.

    When ``t`` is given the bound chain is also sanity-checked: the
    distance floor must clear ``1 - 2**-t`` whenever ``p >= 1 - 2**-r``,
    and the ceiling must stay below ``2**-t``; both reduce to the
    parameter rule ``r >= 2t + 1`` enforced here.
    """
    if not (0.0 <= p <= 1.0):
        raise InvariantViolation(f"acceptance probability {p} outside [0, 1]")
    if r < 1:
        raise InvariantViolation("r must be >= 1")
    fid_bound = 2.0 ** ((-r + 1) / 2.0)
    table = BoundTable(
        p=p,
        r=r,
        t=t,
        yes_branch_bound=1.0 - p + p / 2.0**r,
        yes_fidelity_bound=fid_bound,
        yes_distance_floor=1.0 - fid_bound,
        no_fidelity_sq_floor=(1.0 - p) ** 2,
        no_distance_ceiling=fid_bound,
        epsilon=None if t is None else 2.0 ** (-t),
    )
    if t is not None:
        if r < 2 * t + 1:
            raise ParameterConstraintError(f"r={r} violates r >= 2t+1 for t={t}")
        eps = 2.0 ** (-t)
        if p >= 1.0 - 2.0 ** (-r):
            assert table.yes_distance_floor >= 1.0 - eps - 1e-15
        assert table.no_distance_ceiling <= eps + 1e-15
    return table


# ---------------------------------------------------------------------------
# Verifier fixtures.  All use a single work qubit: the decision is computed
# into it and a final SWAP honors the qubit-0 output convention.
# ---------------------------------------------------------------------------


def equality_verifier(s: str) -> VerifierCircuit:
    """Accepts exactly the witness ``s`` (p = 1 at y = s, else p = 0)."""
    if not s or set(s) - {"0", "1"}:
        raise InvariantViolation(f"bad target witness {s!r}")
    w = len(s)
    gates: list[Gate] = []
    flips = [j for j, bit in enumerate(s) if bit == "0"]
    gates.extend(Gate("X", (j,)) for j in flips)
    gates.append(Gate("X", (w,), controls=tuple(range(w))))
    gates.extend(Gate("X", (j,)) for j in flips)
    gates.append(Gate("SWAP", (0, w)))
    return VerifierCircuit(Circuit(w + 1, tuple(gates)), w, 1)


def all_reject_verifier(w: int = 2) -> VerifierCircuit:
    """Accepts nothing: the zero work qubit is swapped to the output slot."""
    return VerifierCircuit(Circuit(w + 1, (Gate("SWAP", (0, w)),)), w, 1)


def rotation_verifier(theta: float, w: int = 2) -> VerifierCircuit:
    """Witness-independent acceptance probability ``sin(theta/2)^2``."""
    gates = (Gate("RY", (w,), params=(theta,)), Gate("SWAP", (0, w)))
    return VerifierCircuit(Circuit(w + 1, gates), w, 1)


def rotation_angle_for(p: float) -> float:
    """Angle giving the rotation verifier acceptance probability ``p``."""
    if not (0.0 <= p <= 1.0):
        raise InvariantViolation("p outside [0, 1]")
    return 2.0 * math.asin(math.sqrt(p))
