"""Gate set, circuit application, dense composition, measurement."""

import numpy as np
import pytest

from conftest import haar_unitary2, random_circuit, random_state
from mbqclab.gates import (
    GATE_KINDS,
    Circuit,
    Gate,
    H2,
    ID2,
    YB2,
    apply_circuit,
    apply_gate,
    circuit_to_unitary,
    equatorial_basis,
    gate_matrix,
    measure_in_basis,
    require_unitary2,
)
from mbqclab.states import InvariantViolation, Ket, tensor

SQ2 = 1 / np.sqrt(2)


class TestGateMatrices:
    @pytest.mark.parametrize("kind", sorted(GATE_KINDS))
    def test_every_kind_is_unitary(self, kind):
        arity, nparams = GATE_KINDS[kind]
        m = gate_matrix(kind, tuple([0.3] * nparams))
        prod = m.conj().T @ m
        np.testing.assert_allclose(prod, np.eye(m.shape[0]), atol=1e-10)

    def test_equatorial_zero_is_hadamard(self):
        np.testing.assert_allclose(equatorial_basis(0.0), H2, atol=1e-15)

    def test_y_basis_columns_are_y_eigenvectors(self):
        y = np.array([[0, -1j], [1j, 0]])
        np.testing.assert_allclose(y @ YB2[:, 0], YB2[:, 0], atol=1e-12)
        np.testing.assert_allclose(y @ YB2[:, 1], -YB2[:, 1], atol=1e-12)

    def test_require_unitary2_rejects(self):
        with pytest.raises(InvariantViolation):
            require_unitary2(np.array([[1, 0], [0, 2]]))


class TestGateValidation:
    def test_overlapping_targets_and_controls(self):
        with pytest.raises(InvariantViolation):
            Gate("X", (0,), controls=(0,))

    def test_wrong_param_count(self):
        with pytest.raises(InvariantViolation):
            Gate("RZ", (0,))

    def test_circuit_rejects_out_of_range(self):
        with pytest.raises(InvariantViolation):
            Circuit(1, (Gate("CNOT", (0, 1)),))


class TestApplyGate:
    def test_hadamard_on_zero(self):
        out = apply_gate(Ket.zero(1), Gate("H", (0,)))
        np.testing.assert_allclose(out.amplitudes, [SQ2, SQ2], atol=1e-15)

    def test_cnot_entangles(self):
        plus0 = Ket(2, np.array([SQ2, 0, SQ2, 0]))
        out = apply_gate(plus0, Gate("CNOT", (0, 1)))
        np.testing.assert_allclose(out.amplitudes, [SQ2, 0, 0, SQ2], atol=1e-15)

    def test_control_off_is_identity(self):
        state = Ket.basis(2, "01")
        out = apply_gate(state, Gate("X", (1,), controls=(0,)))
        np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=1e-15)

    def test_out_of_range_rejected(self):
        with pytest.raises(InvariantViolation):
            apply_gate(Ket.zero(1), Gate("X", (1,)))


class TestApplyCircuit:
    def test_bell_preparation(self):
        out = apply_circuit(Ket.zero(2), Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1)))))
        np.testing.assert_allclose(out.amplitudes, [SQ2, 0, 0, SQ2], atol=1e-15)

    def test_empty_circuit(self):
        rng = np.random.default_rng(0)
        psi = random_state(3, rng)
        out = apply_circuit(psi, Circuit(3))
        np.testing.assert_allclose(out.amplitudes, psi.amplitudes)

    def test_involution(self):
        out = apply_circuit(Ket.zero(1), Circuit(1, (Gate("X", (0,)), Gate("X", (0,)))))
        np.testing.assert_allclose(out.amplitudes, [1, 0], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(InvariantViolation):
            apply_circuit(Ket.zero(2), Circuit(3, (Gate("H", (0,)),)))

    def test_norm_preserved_on_random_circuits(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            psi = random_state(n, rng)
            out = apply_circuit(psi, random_circuit(n, int(rng.integers(1, 30)), rng))
            assert abs(np.linalg.norm(out.amplitudes) - 1.0) <= 1e-10


class TestAdjoint:
    def test_gate_adjoints_are_exact(self):
        rng = np.random.default_rng(3)
        for kind, (arity, nparams) in GATE_KINDS.items():
            if arity != 1:
                continue
            params = tuple(rng.uniform(-np.pi, np.pi, nparams))
            g = Gate(kind, (0,), params=params)
            m = circuit_to_unitary(Circuit(1, (g,)))
            madj = circuit_to_unitary(Circuit(1, (g.adjoint(),)))
            np.testing.assert_allclose(madj, m.conj().T, atol=1e-12)

    def test_circuit_adjoint_inverts(self):
        rng = np.random.default_rng(4)
        c = random_circuit(4, 25, rng)
        u = circuit_to_unitary(c)
        uadj = circuit_to_unitary(c.adjoint())
        np.testing.assert_allclose(uadj @ u, np.eye(16), atol=1e-10)


class TestCircuitToUnitary:
    def test_hadamard(self):
        np.testing.assert_allclose(circuit_to_unitary(Circuit(1, (Gate("H", (0,)),))), H2, atol=1e-15)

    def test_controlled_x_permutation(self):
        u = circuit_to_unitary(Circuit(2, (Gate("X", (1,), controls=(0,)),)))
        expect = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        np.testing.assert_allclose(u, expect, atol=1e-15)

    def test_zero_angle_rotation_is_identity(self):
        u = circuit_to_unitary(Circuit(1, (Gate("RZ", (0,), params=(0.0,)),)))
        np.testing.assert_allclose(u, ID2, atol=1e-15)

    def test_matches_apply_circuit_on_basis_kets(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            n = int(rng.integers(1, 6))
            c = random_circuit(n, 20, rng)
            u = circuit_to_unitary(c)
            assert np.max(np.abs(u.conj().T @ u - np.eye(1 << n))) <= 1e-9
            for idx in rng.choice(1 << n, size=min(4, 1 << n), replace=False):
                out = apply_circuit(Ket.basis(n, int(idx)), c)
                np.testing.assert_allclose(out.amplitudes, u[:, idx], atol=1e-10)


class TestMeasureInBasis:
    def test_bell_computational(self):
        bell = Ket(2, np.array([SQ2, 0, 0, SQ2]))
        branches = measure_in_basis(bell, 0, ID2)
        assert [b.outcome for b in branches] == [0, 1]
        for b, label in zip(branches, ("0", "1")):
            assert b.probability == pytest.approx(0.5, abs=1e-12)
            np.testing.assert_allclose(b.post_state.amplitudes, Ket.basis(1, label).amplitudes, atol=1e-12)

    def test_plus_in_hadamard_basis_is_deterministic(self):
        state = tensor(Ket(1, np.array([SQ2, SQ2])), Ket.basis(1, "0"))
        b0, b1 = measure_in_basis(state, 0, H2)
        assert b0.probability == pytest.approx(1.0, abs=1e-12)
        assert b1.probability == 0.0 and b1.post_state is None
        np.testing.assert_allclose(b0.post_state.amplitudes, [1, 0], atol=1e-12)

    def test_single_qubit_leaves_empty_ket(self):
        b0, b1 = measure_in_basis(Ket.basis(1, "0"), 0, ID2)
        assert b0.probability == pytest.approx(1.0)
        assert b0.post_state.num_qubits == 0
        assert b1.post_state is None

    def test_completeness_on_random_triples(self):
        rng = np.random.default_rng(123)
        for _ in range(1000):
            n = int(rng.integers(1, 6))
            state = random_state(n, rng)
            qubit = int(rng.integers(n))
            branches = measure_in_basis(state, qubit, haar_unitary2(rng))
            total = sum(b.probability for b in branches)
            assert abs(total - 1.0) <= 1e-10
