"""Abstract MBQC execution.

A resource state is consumed by adaptive single-qubit measurements on
qubits 0..N-n-1 in index order (the measured qubit is removed from the
register after each step), followed by a final layer of single-qubit
corrections on the n surviving output qubits.  A strategy supplies the
measurement basis for step ``j`` from ``(j, y, m_1..m_{j-1})`` and the
correction list from ``(y, m)``; both must be deterministic and total.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .gates import (
    Circuit,
    Gate,
    ID2,
    X2,
    Z2,
    equatorial_basis,
    measure_in_basis,
    require_unitary2,
)
from .states import DensityOp, InvariantViolation, Ket, mixture_density
from .tolerances import ATOL_COMPARE, PRUNE_PROB


class BranchCapExceeded(RuntimeError):
    """The outcome tree is larger than the configured enumeration cap."""


@dataclass(frozen=True)
class ResourceState:
    """A resource ket together with the count of unmeasured output qubits."""

    state: Ket
    num_output: int

    def __post_init__(self):
        if not (0 <= self.num_output <= self.state.num_qubits):
            raise InvariantViolation("num_output out of range")

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits

    @property
    def num_measured(self) -> int:
        return self.state.num_qubits - self.num_output


class Strategy:
    """Interface of a classical driver: bases per step, corrections per run."""

    def basis_for(self, step: int, y: str, prefix: str) -> np.ndarray:
        raise NotImplementedError

    def corrections_for(self, y: str, m: str) -> list[np.ndarray]:
        raise NotImplementedError


@dataclass(frozen=True)
class CallbackStrategy(Strategy):
    """Strategy backed by host-code callables."""

    basis_fn: object
    corrections_fn: object

    def basis_for(self, step, y, prefix):
        return self.basis_fn(step, y, prefix)

    def corrections_for(self, y, m):
        return self.corrections_fn(y, m)


def basis_key(step: int, y: str, prefix: str) -> str:
    return f"{step}|{y}|{prefix}"


def correction_key(y: str, m: str) -> str:
    return f"{y}|{m}"


@dataclass(frozen=True)
class TableStrategy(Strategy):
    """Serializable strategy: explicit basis and correction tables.

    Keys follow the file format: ``"j|y|prefix"`` for bases and
    ``"y|m"`` for corrections.  A lookup miss means the table is not
    total for this instance and is reported as an invariant violation.
    """

    bases: dict = field(default_factory=dict)
    corrections: dict = field(default_factory=dict)

    def basis_for(self, step, y, prefix):
        key = basis_key(step, y, prefix)
        try:
            return self.bases[key]
        except KeyError:
            raise InvariantViolation(f"strategy table has no basis for reachable slot {key!r}") from None

    def corrections_for(self, y, m):
        key = correction_key(y, m)
        try:
            return self.corrections[key]
        except KeyError:
            raise InvariantViolation(f"strategy table has no corrections for {key!r}") from None


def tabulate_strategy(strat: Strategy, w: int, num_steps: int, num_outputs: int) -> TableStrategy:
    """Materialize a strategy over every (step, y, prefix) and (y, m) slot."""
    bases = {}
    corrections = {}
    for y_bits in itertools.product("01", repeat=w):
        y = "".join(y_bits)
        for j in range(1, num_steps + 1):
            for pref_bits in itertools.product("01", repeat=j - 1):
                prefix = "".join(pref_bits)
                bases[basis_key(j, y, prefix)] = np.asarray(strat.basis_for(j, y, prefix))
        for m_bits in itertools.product("01", repeat=num_steps):
            m = "".join(m_bits)
            corrections[correction_key(y, m)] = [np.asarray(v) for v in strat.corrections_for(y, m)]
    return TableStrategy(bases, corrections)


@dataclass(frozen=True)
class Branch:
    """One enumerated outcome string with its probability and corrected state."""

    m: str
    probability: float
    post_state: Ket


@dataclass
class OutputMixture:
    """All surviving branches of a run plus the assembled output density."""

    branches: list[Branch]
    num_output: int
    pruned_mass_bound: float = 0.0
    _density: DensityOp | None = field(default=None, repr=False)

    @property
    def total_probability(self) -> float:
        return float(sum(b.probability for b in self.branches))

    @property
    def density(self) -> DensityOp:
        if self._density is None:
            self._density = mixture_density((b.probability, b.post_state) for b in self.branches)
        return self._density


def _apply_corrections(state: Ket, corrections, expected: int) -> Ket:
    if len(corrections) != expected:
        raise InvariantViolation(
            f"strategy returned {len(corrections)} corrections for {expected} output qubits"
        )
    amps = state.amplitudes
    out = amps.reshape((2,) * expected) if expected else amps
    for j, v in enumerate(corrections):
        v = require_unitary2(v)
        if not np.allclose(v, ID2, atol=1e-15):
            out = np.moveaxis(np.tensordot(v, out, axes=([1], [j])), 0, j)
    return Ket(expected, out.reshape(-1))


def run_all_branches(
    resource: ResourceState,
    strat: Strategy,
    y: str,
    *,
    max_branches: int = 1 << 20,
    apply_corrections: bool = True,
) -> OutputMixture:
    """Depth-first enumeration of the full outcome tree.

    Branches whose joint probability falls below the pruning threshold
    are dropped; their total mass is tracked so probability conservation
    can still be checked.  Raises :class:`BranchCapExceeded` when the
    leaf count would exceed ``max_branches``.
    """
    steps = resource.num_measured
    if 1 << steps > max_branches:
        raise BranchCapExceeded(f"2**{steps} branches exceed the cap of {max_branches}")
    n_out = resource.num_output
    branches: list[Branch] = []
    pruned = 0.0

    stack = [(resource.state, "", 1.0)]
    while stack:
        state, prefix, prob = stack.pop()
        if len(prefix) == steps:
            post = (
                _apply_corrections(state, strat.corrections_for(y, prefix), n_out)
                if apply_corrections
                else state
            )
            branches.append(Branch(prefix, prob, post))
            continue
        basis = require_unitary2(strat.basis_for(len(prefix) + 1, y, prefix))
        for br in measure_in_basis(state, 0, basis):
            joint = prob * br.probability
            if br.post_state is None or joint < PRUNE_PROB:
                pruned += joint if br.post_state is not None else prob * PRUNE_PROB
                continue
            stack.append((br.post_state, prefix + str(br.outcome), joint))

    branches.sort(key=lambda b: b.m)
    mixture = OutputMixture(branches, n_out, pruned)
    total = mixture.total_probability + pruned
    if abs(total - 1.0) > ATOL_COMPARE:
        raise InvariantViolation(f"branch probabilities sum to {total}, not 1")
    return mixture


def sample_run(resource: ResourceState, strat: Strategy, y: str, seed: int) -> Branch:
    """Sample a single outcome path; deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    state = resource.state
    prefix = ""
    prob = 1.0
    for step in range(1, resource.num_measured + 1):
        basis = require_unitary2(strat.basis_for(step, y, prefix))
        b0, b1 = measure_in_basis(state, 0, basis)
        if b1.post_state is None:
            pick = b0
        elif b0.post_state is None:
            pick = b1
        else:
            pick = b0 if rng.random() < b0.probability / (b0.probability + b1.probability) else b1
        state = pick.post_state
        prob *= pick.probability
        prefix += str(pick.outcome)
    post = _apply_corrections(state, strat.corrections_for(y, prefix), resource.num_output)
    return Branch(prefix, prob, post)


def build_graph_state(num_vertices: int, edges) -> Ket:
    """CZ over every edge applied to ``|+>^num_vertices``."""
    edges = [tuple(sorted((int(a), int(b)))) for a, b in edges]
    if len(set(edges)) != len(edges):
        raise InvariantViolation("duplicate edges in graph")
    for a, b in edges:
        if a == b:
            raise InvariantViolation(f"self-loop at vertex {a}")
        if not (0 <= a < num_vertices and 0 <= b < num_vertices):
            raise InvariantViolation(f"edge ({a},{b}) out of range")
    dim = 1 << num_vertices
    amps = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    idx = np.arange(dim)
    for a, b in edges:
        ma = 1 << (num_vertices - 1 - a)
        mb = 1 << (num_vertices - 1 - b)
        amps[((idx & ma) != 0) & ((idx & mb) != 0)] *= -1.0
    return Ket(num_vertices, amps)


def path_edges(num_vertices: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(num_vertices - 1)]


# ---------------------------------------------------------------------------
# 1-D cluster fixture: four measured qubits driving one output qubit.
#
# Measuring a chain qubit at equatorial angle phi teleports the logical
# state through H * diag(1, e^{-i phi}) with an X byproduct on outcome 1.
# Tracking byproducts (x, z) across steps and flipping the sign of the
# programmed angle whenever x is odd makes the net map independent of the
# outcomes, up to a final Pauli Z^z X^x undone by the corrections.
# ---------------------------------------------------------------------------

CLUSTER_STEPS = 4


def _byproducts(outcomes: str) -> tuple[int, int]:
    x = z = 0
    for s in outcomes:
        x, z = int(s) ^ z, x
    return x, z


def cluster_target_circuit(angles: tuple[float, float, float]) -> Circuit:
    """Single-qubit unitary the cluster run realizes for an angle triple."""
    a, b, c = angles
    return Circuit(
        1,
        (
            Gate("H", (0,)),
            Gate("RX", (0,), params=(a,)),
            Gate("RZ", (0,), params=(b,)),
            Gate("RX", (0,), params=(c,)),
        ),
    )


def cluster_resource() -> ResourceState:
    return ResourceState(build_graph_state(CLUSTER_STEPS + 1, path_edges(CLUSTER_STEPS + 1)), 1)


def cluster_strategy(angles_by_y: dict[str, tuple[float, float, float]]) -> CallbackStrategy:
    """One-way-computer strategy on the 5-qubit path for per-y angle triples."""

    def programmed(y: str) -> tuple[float, ...]:
        a, b, c = angles_by_y[y]
        return (0.0, -a, -b, -c)

    def basis_fn(step: int, y: str, prefix: str) -> np.ndarray:
        theta = programmed(y)[step - 1]
        x, _ = _byproducts(prefix)
        return equatorial_basis(-theta if x else theta)

    def corrections_fn(y: str, m: str) -> list[np.ndarray]:
        x, z = _byproducts(m)
        v = ID2
        if x:
            v = X2 @ v
        if z:
            v = Z2 @ v
        return [v]

    return CallbackStrategy(basis_fn, corrections_fn)
