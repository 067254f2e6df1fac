import numpy as np
import pytest
import scipy.linalg as sla

from lattice_kms.errors import RangeOverflowError
from lattice_kms.gibbs import (
    diagonalize,
    duhamel,
    expectation,
    imaginary_time,
    kms_residual,
    log_partition,
    truncated_correlation,
)
from lattice_kms.graphs import chain
from lattice_kms.interaction import build_xyz, hamiltonian
from lattice_kms.operators import embed, operator_norm, spin_matrices
from util import random_complex, random_hermitian

PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def xy_state(n_sites, beta, j3=0.0):
    h = hamiltonian(build_xyz(chain(n_sites), 0.5, 1.0, 1.0, j3))
    return diagonalize(h, beta)


class TestDiagonalizeAndPartition:
    def test_zero_hamiltonian(self):
        st = diagonalize(np.zeros((4, 4)), 1.0)
        assert np.allclose(st.eigenvalues, 0.0)
        assert abs(np.exp(log_partition(st)) - 4.0) < 1e-12
        st_n = diagonalize(np.zeros((4, 4)), 1.0, "normalized")
        assert abs(np.exp(log_partition(st_n)) - 1.0) < 1e-12

    def test_two_level(self):
        st = diagonalize(PAULI_Z, 1.0)
        assert abs(np.exp(log_partition(st)) - 2 * np.cosh(1.0)) < 1e-12

    def test_heisenberg_two_site(self):
        beta = 0.7
        h = hamiltonian(build_xyz(chain(2), 0.5, 1.0, 1.0, 1.0))
        st = diagonalize(h, beta)
        expected = 3 * np.exp(beta / 4) + np.exp(-3 * beta / 4)
        assert abs(np.exp(log_partition(st)) - expected) < 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            diagonalize(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)

    def test_unitarity_and_reconstruction(self, rng):
        h = random_hermitian(rng, 6)
        st = diagonalize(h, 0.3)
        u = st.eigenvectors
        assert np.max(np.abs(u.conj().T @ u - np.eye(6))) <= 1e-10
        recon = st.from_eigenbasis(np.diag(st.eigenvalues))
        assert operator_norm(recon - h) <= 1e-10 * max(operator_norm(h), 1.0)


class TestExpectation:
    def test_infinite_temperature_is_normalized_trace(self, rng):
        a = random_complex(rng, 4)
        st = diagonalize(random_hermitian(rng, 4), 0.0)
        assert abs(expectation(st, a) - np.trace(a) / 4) < 1e-12

    def test_unit_observable(self, rng):
        st = diagonalize(random_hermitian(rng, 8), 1.3)
        assert abs(expectation(st, np.eye(8)) - 1.0) < 1e-12

    def test_xy_symmetry_between_components(self):
        st = xy_state(2, 1.0)
        s1, s2, _, _, _ = spin_matrices(0.5)
        a1 = embed(s1, (0,), (0, 1), 2) @ embed(s1, (1,), (0, 1), 2)
        a2 = embed(s2, (0,), (0, 1), 2) @ embed(s2, (1,), (0, 1), 2)
        assert abs(expectation(st, a1) - expectation(st, a2)) <= 1e-12

    def test_truncated_correlation_with_identity(self, rng):
        st = diagonalize(random_hermitian(rng, 4), 0.9)
        a = random_complex(rng, 4)
        assert abs(truncated_correlation(st, a, np.eye(4))) <= 1e-12
        assert abs(truncated_correlation(st, np.eye(4), a)) <= 1e-12


class TestImaginaryTime:
    def test_commuting_observable_fixed(self, rng):
        h = random_hermitian(rng, 4)
        st = diagonalize(h, 1.7)
        f = h @ h + 0.3 * h
        assert operator_norm(imaginary_time(st, f) - f) <= 1e-10

    def test_raising_operator_against_expm(self):
        st = diagonalize(PAULI_Z, 0.8)
        sigma_plus = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
        got = imaginary_time(st, sigma_plus)
        oracle = sla.expm(-0.8 * PAULI_Z) @ sigma_plus @ sla.expm(0.8 * PAULI_Z)
        assert np.max(np.abs(got - oracle)) <= 1e-12
        # explicit decay factor e^{-beta (E_m - E_n)} = e^{-1.6}
        assert abs(got[1, 0] - np.exp(-1.6)) <= 1e-12

    def test_inverse_conjugation(self, rng):
        st = diagonalize(random_hermitian(rng, 5), 1.1)
        st_neg = diagonalize(st.from_eigenbasis(np.diag(-st.eigenvalues)), 1.1)
        a = random_complex(rng, 5)
        back = imaginary_time(st_neg, imaginary_time(st, a))
        assert operator_norm(back - a) <= 1e-10 * operator_norm(a)

    def test_overflow_guard(self):
        st = diagonalize(np.diag([0.0, 400.0]), 1.0)
        with pytest.raises(RangeOverflowError):
            imaginary_time(st, np.eye(2))


class TestKmsResidual:
    def test_zero_hamiltonian(self, rng):
        st = diagonalize(np.zeros((4, 4)), 1.0)
        a = random_complex(rng, 4)
        b = random_complex(rng, 4)
        assert kms_residual(st, a, b) <= 1e-14

    def test_identity_pair(self):
        st = xy_state(2, 0.9)
        assert kms_residual(st, np.eye(4), np.eye(4)) == 0.0

    def test_random_pairs_on_three_site_chain(self, rng):
        st = xy_state(3, 0.7, j3=0.4)
        for _ in range(20):
            a = random_complex(rng, 8)
            b = random_complex(rng, 8)
            bound = 1e-10 * operator_norm(a) * operator_norm(b)
            assert kms_residual(st, a, b) <= bound


class TestDuhamel:
    def test_zero_hamiltonian_is_normalized_product_trace(self, rng):
        st = diagonalize(np.zeros((4, 4)), 1.0)
        a = random_complex(rng, 4)
        b = random_complex(rng, 4)
        assert abs(duhamel(st, a, b) - np.trace(a @ b) / 4) <= 1e-12

    def test_identity_collapses_to_expectation(self, rng):
        st = diagonalize(random_hermitian(rng, 6), 1.4)
        b = random_complex(rng, 6)
        assert abs(duhamel(st, np.eye(6), b) - expectation(st, b)) <= 1e-12

    def test_positivity_on_conjugate_pair(self, rng):
        st = diagonalize(random_hermitian(rng, 5), 0.9)
        for _ in range(10):
            a = random_complex(rng, 5)
            val = duhamel(st, a, a.conj().T)
            assert abs(val.imag) <= 1e-12 * max(1.0, abs(val.real))
            assert val.real >= -1e-12

    def test_symmetry_for_hermitian_arguments(self, rng):
        st = diagonalize(random_hermitian(rng, 6), 1.2)
        a = random_hermitian(rng, 6)
        b = random_hermitian(rng, 6)
        assert abs(duhamel(st, a, b) - duhamel(st, b, a)) <= 1e-10

    def _quadrature(self, h, beta, a, b, nodes=64):
        x, w = np.polynomial.legendre.leggauss(nodes)
        s_nodes = 0.5 * (x + 1)
        weights = 0.5 * w
        z = np.trace(sla.expm(-beta * h)).real
        total = 0.0 + 0.0j
        for s, wt in zip(s_nodes, weights):
            total += wt * np.trace(
                a @ sla.expm(-s * beta * h) @ b @ sla.expm(-(1 - s) * beta * h))
        return total / z

    def test_against_gauss_legendre(self, rng):
        h = random_hermitian(rng, 8)
        beta = 0.9
        st = diagonalize(h, beta)
        for _ in range(5):
            a = random_complex(rng, 8)
            b = random_complex(rng, 8)
            got = duhamel(st, a, b)
            ref = self._quadrature(h, beta, a, b)
            assert abs(got - ref) <= 1e-8 * max(abs(ref), 1.0)

    def test_degenerate_spectrum(self, rng):
        h = np.diag([0.0, 0.0, 1.0]).astype(complex)
        beta = 1.3
        st = diagonalize(h, beta)
        a = random_complex(rng, 3)
        b = random_complex(rng, 3)
        got = duhamel(st, a, b)
        ref = self._quadrature(h, beta, a, b)
        assert abs(got - ref) <= 1e-10 * max(abs(ref), 1.0)
