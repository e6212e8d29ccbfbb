import math

import numpy as np
import pytest

import oracles
from bellmd.errors import InputError
from bellmd.hilbert import (
    OperatorMatrix,
    ProjectiveMeasurement,
    StateVector,
    apply,
    basis_state,
    born_probabilities,
    expectation,
    identity,
    pauli_x,
    pauli_y,
    pauli_z,
    rotated_zx,
    tensor,
    tensor_op,
)

SQRT2_INV = 1.0 / math.sqrt(2.0)


def random_qubit_pair(rng):
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return complex(v[0], v[1]), complex(v[2], v[3])


class TestComplexArithmetic:
    """Field behavior of the amplitude scalar type (built-in complex)."""

    def test_field_axioms_on_random_samples(self, rng):
        for _ in range(200):
            x, y, z = (complex(*rng.normal(size=2)) for _ in range(3))
            assert abs((x + y) - (y + x)) <= 1e-12
            assert abs((x * y) - (y * x)) <= 1e-12
            assert abs((x + y) + z - (x + (y + z))) <= 1e-12
            assert abs((x * y) * z - (x * (y * z))) <= 1e-10
            assert abs(x * (y + z) - (x * y + x * z)) <= 1e-10

    def test_conjugation_and_modulus(self, rng):
        for _ in range(100):
            x = complex(*rng.normal(size=2))
            assert abs(x.conjugate().conjugate() - x) == 0.0
            assert abs(abs(x) ** 2 - (x * x.conjugate()).real) <= 1e-12


class TestStateVector:
    def test_normalization_enforced(self):
        with pytest.raises(InputError):
            StateVector([1.0, 1.0])
        StateVector([SQRT2_INV, SQRT2_INV])  # fine

    def test_explicit_norm_bookkeeping(self):
        s = StateVector([0.5, 0.0], norm=0.5)
        assert s.norm == 0.5
        with pytest.raises(InputError):
            StateVector([0.5, 0.0], norm=1.0)

    def test_rejects_junk(self):
        with pytest.raises(InputError):
            StateVector([])
        with pytest.raises(InputError):
            StateVector([np.nan, 0.0])


class TestTensor:
    def test_basis_times_basis(self):
        out = tensor(basis_state(2, 0), basis_state(2, 0))
        assert np.allclose(out.amplitudes, [1, 0, 0, 0], atol=1e-15)

    def test_plus_times_zero(self):
        plus = StateVector([SQRT2_INV, SQRT2_INV])
        out = tensor(plus, basis_state(2, 0))
        assert np.allclose(out.amplitudes, [SQRT2_INV, 0, SQRT2_INV, 0], atol=1e-15)

    def test_entangled_basis_regrouping(self, rng):
        # the 8-dim combined state regroups into the four entangled-basis
        # branches, each carrying the matching image of the input qubit
        from bellmd.teleport import bell_state

        for _ in range(20):
            a, b = random_qubit_pair(rng)
            psi = StateVector([a, b])
            pair = bell_state(0)
            total = tensor(psi, pair)
            images = [
                np.array([a, b]), np.array([a, -b]),
                np.array([b, a]), np.array([-b, a]),
            ]
            rebuilt = np.zeros(8, dtype=complex)
            for k in range(4):
                rebuilt += 0.5 * np.kron(bell_state(k).amplitudes, images[k])
            assert np.max(np.abs(rebuilt - total.amplitudes)) <= 1e-12

    def test_associativity(self, rng):
        for _ in range(20):
            u = StateVector(oracles.random_state(2, rng))
            v = StateVector(oracles.random_state(2, rng))
            w = StateVector(oracles.random_state(3, rng))
            left = tensor(tensor(u, v), w)
            right = tensor(u, tensor(v, w))
            assert np.max(np.abs(left.amplitudes - right.amplitudes)) <= 1e-12

    def test_dimension_cap(self):
        big = StateVector(np.ones(16) / 4.0)
        mid = StateVector(np.ones(8) / math.sqrt(8.0))
        with pytest.raises(InputError):
            tensor(big, mid)
        assert tensor(big, basis_state(4, 0)).dim == 64


class TestApply:
    def test_bit_flip_restores_swapped_amplitudes(self, rng):
        a, b = random_qubit_pair(rng)
        swapped = StateVector([b, a])
        out = apply(pauli_x(), swapped)
        assert np.allclose(out.amplitudes, [a, b], atol=1e-12)

    def test_identity_is_noop(self, rng):
        s = StateVector(oracles.random_state(2, rng))
        out = apply(identity(2), s)
        assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-12)

    def test_phase_flip_on_plus(self):
        plus = StateVector([SQRT2_INV, SQRT2_INV])
        out = apply(pauli_z(), plus)
        assert np.allclose(out.amplitudes, [SQRT2_INV, -SQRT2_INV], atol=1e-15)

    def test_unitary_preserves_norm(self, rng):
        for _ in range(50):
            theta = rng.uniform(0, 2 * math.pi)
            op = rotated_zx(theta)
            s = StateVector(oracles.random_state(2, rng))
            out = apply(op, s)
            assert abs(out.norm - 1.0) <= 1e-10
            assert abs(np.linalg.norm(out.amplitudes) - 1.0) <= 1e-10

    def test_projector_records_norm(self):
        plus = StateVector([SQRT2_INV, SQRT2_INV])
        proj = OperatorMatrix(np.array([[1, 0], [0, 0]], dtype=complex), hermitian=True)
        out = apply(proj, plus)
        assert abs(out.norm - SQRT2_INV) <= 1e-12
        assert np.allclose(out.amplitudes, [SQRT2_INV, 0], atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            apply(identity(4), basis_state(2, 0))


class TestBornProbabilities:
    def test_eigenstate_of_entangled_basis(self):
        from bellmd.teleport import bell_measurement, bell_state

        probs = born_probabilities(bell_measurement(), bell_state(0))
        assert np.allclose(probs, [1, 0, 0, 0], atol=1e-12)

    def test_combined_state_is_uniform_over_branches(self, rng):
        # oracle: project |psi>|pair> on (entangled basis (x) identity) by
        # explicit sums; every branch has weight exactly 1/4
        from bellmd.teleport import bell_state

        for _ in range(10):
            a, b = random_qubit_pair(rng)
            total = tensor(StateVector([a, b]), bell_state(0)).amplitudes
            expected = []
            for k in range(4):
                bk = bell_state(k).amplitudes
                weight = 0.0
                for j in range(2):
                    amp = sum(bk[m].conjugate() * total[2 * m + j] for m in range(4))
                    weight += abs(amp) ** 2
                expected.append(weight)
            assert np.allclose(expected, 0.25, atol=1e-12)

            measurement = ProjectiveMeasurement(
                tuple(
                    tensor_op(
                        OperatorMatrix(
                            np.outer(bell_state(k).amplitudes,
                                     bell_state(k).amplitudes.conj()),
                            hermitian=True,
                        ),
                        identity(2),
                    )
                    for k in range(4)
                )
            )
            probs = born_probabilities(measurement, StateVector(total))
            assert np.allclose(probs, expected, atol=1e-12)

    def test_z_measurement_of_plus(self):
        plus = StateVector([SQRT2_INV, SQRT2_INV])
        m = ProjectiveMeasurement.from_basis([basis_state(2, 0), basis_state(2, 1)])
        assert np.allclose(born_probabilities(m, plus), [0.5, 0.5], atol=1e-12)

    def test_random_bases_sum_to_one(self, rng):
        for dim in (2, 3, 4):
            for _ in range(10):
                raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
                q, _ = np.linalg.qr(raw)
                m = ProjectiveMeasurement.from_basis(StateVector(q[:, k]) for k in range(dim))
                s = StateVector(oracles.random_state(dim, rng))
                assert abs(sum(born_probabilities(m, s)) - 1.0) <= 1e-9

    def test_dimension_mismatch(self):
        m = ProjectiveMeasurement.from_basis([basis_state(2, 0), basis_state(2, 1)])
        with pytest.raises(InputError):
            born_probabilities(m, basis_state(4, 0))


class TestExpectation:
    def test_parallel_correlations_of_shared_pair(self):
        from bellmd.teleport import bell_state

        zz = tensor_op(pauli_z(), pauli_z())
        zx = tensor_op(pauli_z(), pauli_x())
        assert abs(expectation(zz, bell_state(0)) - 1.0) <= 1e-12
        assert abs(expectation(zx, bell_state(0))) <= 1e-12

    def test_eigenvector(self):
        assert abs(expectation(pauli_z(), basis_state(2, 0)) - 1.0) <= 1e-15

    def test_rejects_non_hermitian(self):
        ghost = OperatorMatrix(np.array([[0, 1], [0, 0]], dtype=complex))
        with pytest.raises(InputError):
            expectation(ghost, basis_state(2, 0))

    def test_within_eigenvalue_range(self, rng):
        for dim in (2, 4):
            for _ in range(25):
                raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
                herm = (raw + raw.conj().T) / 2.0
                op = OperatorMatrix(herm, hermitian=True)
                s = StateVector(oracles.random_state(dim, rng))
                value = expectation(op, s)
                eigs = oracles.charpoly_eigenvalues(herm)
                assert eigs[0] - 1e-8 <= value <= eigs[-1] + 1e-8


class TestOperatorAndMeasurementValidation:
    def test_hermitian_flag_checked(self):
        with pytest.raises(InputError):
            OperatorMatrix(np.array([[0, 1], [0, 0]], dtype=complex), hermitian=True)

    def test_pauli_y_is_hermitian_and_unitary(self):
        op = pauli_y()
        assert op.is_hermitian() and op.is_unitary()

    def test_incomplete_projector_set_rejected(self):
        p0 = OperatorMatrix(np.array([[1, 0], [0, 0]], dtype=complex), hermitian=True)
        with pytest.raises(InputError):
            ProjectiveMeasurement((p0,))

    def test_non_orthogonal_projectors_rejected(self):
        p0 = OperatorMatrix(np.array([[1, 0], [0, 0]], dtype=complex), hermitian=True)
        plus = StateVector([SQRT2_INV, SQRT2_INV])
        p_plus = OperatorMatrix(
            np.outer(plus.amplitudes, plus.amplitudes.conj()), hermitian=True
        )
        with pytest.raises(InputError):
            ProjectiveMeasurement((p0, p_plus))

    def test_non_idempotent_rejected(self):
        half = OperatorMatrix(0.5 * np.eye(2, dtype=complex), hermitian=True)
        with pytest.raises(InputError):
            ProjectiveMeasurement((half, half))
