import numpy as np
import pytest

from lattice_kms.commutators import decompose, order_eigenvalues
from lattice_kms.operators import hs_norm
from util import random_hermitian, random_traceless_hermitian


def partial_sums(values, perm):
    out = []
    acc = 0.0
    for i in perm:
        acc += values[i]
        out.append(acc)
    return out


class TestOrderEigenvalues:
    def test_all_zero(self):
        assert order_eigenvalues([0.0, 0.0, 0.0]) == (0, 1, 2)

    def test_spec_triple_kept_in_order(self):
        vals = [2.0, -1.0, -1.0]
        perm = order_eigenvalues(vals)
        assert perm == (0, 1, 2)
        sums = partial_sums(vals, perm)
        assert sums[:2] == [2.0, 1.0]
        # bound sqrt(N) * ||A||_HS = sqrt(3) * sqrt(2)
        assert all(abs(s) <= np.sqrt(6) + 1e-12 for s in sums[:2])

    def test_prefix_bound_on_random_spectra(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            n = int(rng.integers(2, 11))
            vals = rng.normal(size=n)
            vals -= vals.mean()
            bound = np.sqrt(n) * np.sqrt(np.sum(vals ** 2) / n)
            perm = order_eigenvalues(vals)
            assert sorted(perm) == list(range(n))
            for s in partial_sums(list(vals), perm)[:-1]:
                assert abs(s) <= bound + 1e-10

    def test_nonzero_sum_rejected(self):
        with pytest.raises(ValueError):
            order_eigenvalues([1.0, 1.0])


class TestDecompose:
    def test_zero_matrix(self):
        d = decompose(np.zeros((3, 3)))
        assert d.pairs == ()
        assert d.hs_budget == 0.0

    def test_two_level(self):
        a = np.diag([1.0, -1.0])
        d = decompose(a)
        assert len(d.pairs) == 1
        assert np.max(np.abs(d.reconstruct(2) - a)) <= 1e-14
        # |a~_1| * ||sigma1||_HS * ||sigma2||_HS / 2 = 1 * 1 * 1 / 2
        assert abs(d.hs_budget - 0.5) < 1e-14
        assert d.hs_budget <= np.sqrt(2) * hs_norm(a) + 1e-12

    def test_three_level(self):
        a = np.diag([2.0, -1.0, -1.0])
        d = decompose(a)
        assert len(d.pairs) == 2
        assert np.max(np.abs(d.reconstruct(3) - a)) <= 1e-12
        # accumulated sums (2, 1): budget (2 + 1) / N = 1
        assert abs(d.hs_budget - 1.0) < 1e-12
        assert d.hs_budget <= np.sqrt(3) * hs_norm(a) + 1e-12

    def test_pairs_are_hermitian(self, rng):
        a = random_traceless_hermitian(rng, 5)
        for b, c in decompose(a).pairs:
            assert np.max(np.abs(b - b.conj().T)) <= 1e-12
            assert np.max(np.abs(c - c.conj().T)) <= 1e-12

    @pytest.mark.parametrize("n", [2, 4, 7, 10])
    def test_random_corpus(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(50):
            a = random_traceless_hermitian(rng, n)
            d = decompose(a)
            norm = hs_norm(a)
            assert hs_norm(d.reconstruct(n) - a) <= 1e-10 * norm
            assert d.hs_budget <= np.sqrt(n) * norm + 1e-12
            assert len(d.pairs) <= n - 1

    def test_unitary_covariance_of_budget(self, rng):
        a = random_traceless_hermitian(rng, 4)
        q, _ = np.linalg.qr(random_hermitian(rng, 4) + 1j * np.eye(4))
        rotated = q @ a @ q.conj().T
        b1 = decompose(a).hs_budget
        b2 = decompose(rotated).hs_budget
        assert abs(b1 - b2) <= 1e-10

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError, match="hermitian"):
            decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(ValueError, match="sum to zero"):
            decompose(np.eye(2))
