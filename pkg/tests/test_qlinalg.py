import numpy as np
import pytest

from conftest import random_density, random_pure, random_unitary
from tdesim.qlinalg import (
    DensityOperator,
    PureState,
    hermitian_eig,
    partial_trace,
    tensor,
    trace_distance,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def projector(vec):
    return np.outer(vec, vec.conj())


class TestTensor:
    def test_identity_case(self):
        assert np.array_equal(tensor(I2, I2), np.eye(4))

    def test_basis_bookkeeping(self):
        # |0><0| x |1><1| occupies index 1 = |01>, leftmost factor is MSB
        out = tensor(projector(KET0), projector(KET1))
        assert np.allclose(out, np.diag([0, 1, 0, 0]))

    def test_x_on_first_slot_flips_msb(self):
        # oracle: explicit 4x4 matrix written out by hand
        x_tensor_i = np.array(
            [
                [0, 0, 1, 0],
                [0, 0, 0, 1],
                [1, 0, 0, 0],
                [0, 1, 0, 0],
            ],
            dtype=complex,
        )
        assert np.allclose(tensor(X, I2), x_tensor_i)
        ket00 = np.kron(KET0, KET0)
        ket10 = np.kron(KET1, KET0)
        assert np.allclose(x_tensor_i @ ket00, ket10)

    def test_associativity(self, rng):
        for _ in range(100):
            a = random_density(rng, 2)
            b = random_density(rng, 2)
            c = random_density(rng, 2)
            assert np.allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=0)

    def test_rejects_oversized_results(self):
        big = np.eye(512, dtype=complex)
        with pytest.raises(ValueError, match="maximum dimension"):
            tensor(big, np.eye(4, dtype=complex))

    def test_rejects_non_finite(self):
        bad = np.array([[np.nan, 0], [0, 1]])
        with pytest.raises(ValueError, match="non-finite"):
            tensor(bad, I2)


class TestPartialTrace:
    def test_product_basis_state(self):
        rho = projector(np.kron(KET0, KET0))
        assert np.allclose(partial_trace(rho, keep=[0], dims=(2, 2)), projector(KET0))

    def test_bell_pair_reduces_to_mixed(self):
        phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        reduced = partial_trace(projector(phi), keep=[0], dims=(2, 2))
        assert np.allclose(reduced, I2 / 2)

    def test_three_qubit_product_state(self, rng):
        # oracle: direct construction of the kept factors
        for _ in range(20):
            a, b, c = (random_density(rng, 2) for _ in range(3))
            rho = tensor(a, b, c)
            reduced = partial_trace(rho, keep=[0, 1], dims=(2, 2, 2))
            assert np.allclose(reduced, tensor(a, b), atol=1e-12)

    def test_recovers_first_factor(self, rng):
        for _ in range(100):
            a = random_density(rng, 2)
            b = random_density(rng, 4)
            reduced = partial_trace(tensor(a, b), keep=[0], dims=(2, 4))
            assert np.allclose(reduced, a, atol=1e-10)

    def test_preserves_trace(self, rng):
        rho = random_density(rng, 8)
        reduced = partial_trace(rho, keep=[2], dims=(2, 2, 2))
        assert abs(np.trace(reduced) - np.trace(rho)) < 1e-12

    def test_invalid_slot_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            partial_trace(np.eye(4) / 4, keep=[2], dims=(2, 2))

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            partial_trace(np.eye(4) / 4, keep=[], dims=(2, 2))


class TestHermitianEig:
    def test_pauli_z(self):
        w, _ = hermitian_eig(Z)
        assert np.allclose(w, [-1, 1])

    def test_maximally_mixed(self):
        w, _ = hermitian_eig(I2 / 2)
        assert np.allclose(w, [0.5, 0.5])

    def test_plus_projector(self):
        # hand computation: |+><+| has eigenvalue 1 on (1,1)/sqrt(2)
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        w, v = hermitian_eig(projector(plus))
        assert np.allclose(w, [0, 1], atol=1e-12)
        top = v[:, 1]
        overlap = abs(np.vdot(top, plus))
        assert abs(overlap - 1) < 1e-12

    def test_reconstruction(self, rng):
        for _ in range(100):
            m = random_density(rng, 4)
            w, v = hermitian_eig(m)
            rebuilt = sum(w[i] * projector(v[:, i]) for i in range(4))
            assert np.max(np.abs(rebuilt - m)) < 1e-9

    def test_residuals(self, rng):
        m = random_density(rng, 8)
        w, v = hermitian_eig(m)
        for i in range(8):
            assert np.linalg.norm(m @ v[:, i] - w[i] * v[:, i]) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


class TestTraceDistance:
    def test_identical_states(self):
        rho = projector(KET0)
        assert trace_distance(rho, rho) == 0

    def test_orthogonal_pure_states(self):
        # convention without the factor 1/2: orthogonal states sit at 2
        assert abs(trace_distance(projector(KET0), projector(KET1)) - 2) < 1e-12

    def test_diagonal_pair(self):
        # |1 - 0.68| + |0 - 0.32| computed by hand
        d = trace_distance(projector(KET0), np.diag([0.68, 0.32]))
        assert abs(d - 0.64) < 1e-12

    def test_symmetry_and_positivity(self, rng):
        a = random_density(rng, 4)
        b = random_density(rng, 4)
        assert trace_distance(a, b) >= 0
        assert abs(trace_distance(a, b) - trace_distance(b, a)) < 1e-12

    def test_triangle_inequality(self, rng):
        for _ in range(100):
            a, b, c = (random_density(rng, 4) for _ in range(3))
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10

    def test_unitary_invariance(self, rng):
        for _ in range(100):
            a = random_density(rng, 4)
            b = random_density(rng, 4)
            u = random_unitary(rng, 4)
            rotated = trace_distance(u @ a @ u.conj().T, u @ b @ u.conj().T)
            assert abs(rotated - trace_distance(a, b)) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            trace_distance(np.eye(2) / 2, np.eye(4) / 4)


class TestStateTypes:
    def test_density_operator_validation(self):
        rho = DensityOperator(np.eye(2) / 2, (2,))
        assert rho.dim == 2
        with pytest.raises(ValueError, match="Hermitian"):
            DensityOperator(np.array([[0.5, 0.5], [0, 0.5]]), (2,))
        with pytest.raises(ValueError, match="trace"):
            DensityOperator(np.eye(2), (2,))
        with pytest.raises(ValueError, match="positive"):
            DensityOperator(np.diag([1.5, -0.5]), (2,))

    def test_unnormalized_role_flag(self):
        weighted = DensityOperator(np.eye(2) / 8, (2,), normalized=False)
        assert abs(np.trace(weighted.matrix) - 0.25) < 1e-15

    def test_density_matrix_is_read_only(self):
        rho = DensityOperator(np.eye(2) / 2, (2,))
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 3.0

    def test_pure_state_validation(self):
        psi = PureState(np.array([1, 1]) / np.sqrt(2), (2,))
        assert np.allclose(psi.density().matrix, np.full((2, 2), 0.5))
        with pytest.raises(ValueError, match="normalized"):
            PureState(np.array([1.0, 1.0]), (2,))

    def test_reduced(self, rng):
        a = random_density(rng, 2)
        b = random_density(rng, 2)
        rho = DensityOperator(tensor(a, b), (2, 2))
        assert np.allclose(rho.reduced([1]).matrix, b, atol=1e-12)
