import math

import numpy as np
import pytest

from lattice_kms.clusters import (
    ClusterSeq,
    DecayBoundReport,
    chain_distance,
    decay_bound,
    enumerate_clusters,
    expectation_series,
    kp_certificate,
    log_z_series,
    overlap_mask,
    ursell_phi,
    ursell_phi_bruteforce,
    _phi_enumeration,
    _phi_recursion,
    weight,
    weight_anchored,
)
from lattice_kms.errors import CertificateNotEstablishedError
from lattice_kms.graphs import chain
from lattice_kms.interaction import Interaction, build_xyz

PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def ising_chain(n, j=1.0):
    return build_xyz(chain(n), 0.5, 0.0, 0.0, j)


def single_site_field():
    return Interaction(2, (0,), {(0,): PAULI_Z})


class TestClusterSeq:
    def test_connectivity_enforced(self):
        ClusterSeq(((0, 1), (1, 2)))
        with pytest.raises(ValueError):
            ClusterSeq(((0, 1), (2, 3)))

    def test_anchor_counts_for_connectivity(self):
        ClusterSeq(((0, 1), (1, 2)), anchor=(0,))
        with pytest.raises(ValueError):
            ClusterSeq(((1, 2),), anchor=(0,))

    def test_support_includes_anchor(self):
        c = ClusterSeq(((0, 1),), anchor=(0, 5))
        assert c.support == (0, 1, 5)


class TestEnumeration:
    def test_single_term_alphabet(self):
        phi = ising_chain(2)
        seqs = [c.sets for c in enumerate_clusters(phi, None, 4)]
        assert seqs == [(((0, 1),) * n) for n in range(1, 5)]

    def test_two_edge_chain_pairs(self):
        phi = ising_chain(3)
        seqs = [c.sets for c in enumerate_clusters(phi, None, 2) if c.n == 2]
        assert seqs == [((0, 1), (0, 1)), ((0, 1), (1, 2)),
                        ((1, 2), (0, 1)), ((1, 2), (1, 2))]

    def test_anchored_stream(self):
        phi = ising_chain(3)
        seqs = [c.sets for c in enumerate_clusters(phi, (0,), 2)]
        assert () in seqs                       # bare anchor
        assert ((1, 2),) not in seqs            # does not meet the anchor
        assert ((0, 1), (1, 2)) in seqs

    def test_max_support_filter(self):
        phi = ising_chain(4)
        seqs = [c.sets for c in enumerate_clusters(phi, None, 2, max_support=3)]
        assert all(len(set().union(*map(set, s))) <= 3 for s in seqs)
        assert ((0, 1), (1, 2)) in seqs
        assert ((1, 2), (2, 3)) in seqs


class TestWeights:
    def test_traceless_single_set(self):
        phi = build_xyz(chain(2), 0.5, 1.0, 1.0, 0.0)
        c = ClusterSeq(((0, 1),))
        assert abs(weight(c, phi, 1.0)) <= 1e-15

    def test_repeated_ising_edge(self):
        phi = ising_chain(4)
        c = ClusterSeq(((0, 1), (0, 1)))
        val = weight(c, phi, 1.0)
        assert abs(val - (1.0 / 2.0) * (1.0 / 16.0)) <= 1e-15

    def test_beta_homogeneity(self):
        phi = ising_chain(4)
        for sets in [((0, 1), (0, 1)), ((0, 1), (1, 2), (1, 2), (0, 1))]:
            c = ClusterSeq(sets)
            w1 = weight(c, phi, 0.35)
            w2 = weight(c, phi, 0.70)
            if abs(w1) > 0:
                assert abs(w2 / w1 - 2 ** c.n) <= 1e-12

    def test_unknown_set_rejected(self):
        phi = ising_chain(3)
        c = ClusterSeq(((0, 1), (1, 2)))
        with pytest.raises(KeyError):
            weight(c, ising_chain(2), 1.0)

    def test_anchored_zero_length_is_trace(self):
        phi = ising_chain(2)
        c = ClusterSeq((), anchor=(0,))
        a = np.array([[2.0, 0.0], [0.0, 0.0]], dtype=complex)
        assert abs(weight_anchored(c, a, phi, 3.0) - 1.0) <= 1e-15


class TestUrsell:
    def test_k1(self):
        assert ursell_phi([ClusterSeq(((0, 1),))]) == 1

    def test_k2(self):
        a = ClusterSeq(((0, 1),))
        b = ClusterSeq(((1, 2),))
        c = ClusterSeq(((7, 8),))
        assert ursell_phi([a, b]) == -1
        assert ursell_phi([a, c]) == 0

    def test_k3_triangle(self):
        a = ClusterSeq(((0, 1),))
        b = ClusterSeq(((1, 2), (0, 1)))
        c = ClusterSeq(((0, 1), (1, 2)))
        assert ursell_phi([a, b, c]) == 2

    def test_exhaustive_small_patterns(self):
        for k in range(1, 5):
            for mask in range(1 << (k * (k - 1) // 2)):
                assert (ursell_phi_bruteforce(mask, k)
                        == (_phi_enumeration(mask, k) if k > 1 else 1)
                        == _phi_recursion(mask, k))

    def test_recursion_beyond_enumeration_window(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            k = 7
            mask = int(rng.integers(0, 1 << (k * (k - 1) // 2)))
            assert _phi_recursion(mask, k) == ursell_phi_bruteforce(mask, k)

    def test_hard_cap(self):
        many = [ClusterSeq(((0, 1),))] * 10
        with pytest.raises(ValueError):
            ursell_phi(many)

    def test_overlap_mask_layout(self):
        mask = overlap_mask([(0, 1), (1, 2), (5, 6)])
        assert mask == 1                        # only the (0,1) pair overlaps


class TestLogZSeries:
    def test_beta_zero(self):
        res = log_z_series(ising_chain(3), 0.0, 3, 3)
        assert res.value == 0.0
        assert res.exact == 0.0

    def test_single_site_field_log_cosh(self):
        res = log_z_series(single_site_field(), 0.3, 6, 6)
        assert abs(res.value - math.log(math.cosh(0.3))) <= 1e-6
        assert res.abs_error <= 1e-6

    def test_four_site_ising(self):
        res = log_z_series(ising_chain(4), 0.1, 4, 5)
        assert res.exact is not None
        assert abs(res.exact - 3 * math.log(math.cosh(0.025))) <= 1e-14
        assert res.abs_error <= 1e-5

    def test_residual_decreases_with_depth(self):
        errs = [log_z_series(ising_chain(4), 0.1, 4, n).abs_error
                for n in range(1, 6)]
        assert all(a >= b - 1e-12 for a, b in zip(errs, errs[1:]))


class TestExpectationSeries:
    def test_identity_observable(self):
        res = expectation_series(np.eye(1, dtype=complex), (), ising_chain(4),
                                 0.1, 4, 5)
        assert abs(res.value - 1.0) <= 1e-12

    def test_single_spin_vanishes_by_symmetry(self):
        res = expectation_series(PAULI_Z, (0,), ising_chain(4), 0.1, 4, 5)
        assert abs(res.value) <= 1e-12
        assert abs(res.exact) <= 1e-12

    def test_nearest_neighbour_correlation(self):
        zz = np.kron(PAULI_Z, PAULI_Z)
        res = expectation_series(zz, (0, 1), ising_chain(4), 0.1, 4, 5)
        assert abs(res.exact - math.tanh(0.025)) <= 1e-12
        assert res.abs_error <= 1e-5


class TestKpCertificate:
    def test_zero_interaction(self):
        phi = Interaction(2, (0, 1), {})
        for a in (0.05, 0.3, 2.0):
            cert = kp_certificate(phi, 5.0, a)
            assert cert.holds
            assert all(v == 0.0 for v in cert.r_m_trace)

    def test_ising_chain_threshold(self):
        # beta * (1/2) (e^a (1+a))^2 <= a at a = 0.1: threshold 0.13533...
        phi = ising_chain(4)
        threshold = 0.1 / (0.5 * (math.exp(0.1) * 1.1) ** 2)
        cert_lo = kp_certificate(phi, 0.135, 0.1)
        cert_hi = kp_certificate(phi, 0.136, 0.1)
        assert 0.135 < threshold < 0.136
        assert cert_lo.holds and not cert_hi.holds
        assert abs(cert_lo.condition_lhs - 0.135 * 0.5 * (math.exp(0.1) * 1.1) ** 2) <= 1e-14

    def test_recursion_monotone_and_bounded_when_plain_holds(self, rng):
        for trial in range(5):
            g = chain(4)
            j3 = {e: float(rng.uniform(-0.5, 0.5)) for e in g.edges}
            j1 = {e: float(rng.uniform(-0.5, 0.5)) for e in g.edges}
            phi = build_xyz(g, 0.5, j1, 0.0, j3)
            a = 0.2
            cert = kp_certificate(phi, 0.05, a)
            trace = cert.r_m_trace
            assert all(x <= y + 1e-12 for x, y in zip(trace, trace[1:]))
            if cert.holds:
                assert cert.r_m_bounded

    def test_strengthened_variant_uses_decay(self):
        phi = ising_chain(6)
        cert = kp_certificate(phi, 0.05, 0.1, b=1.0, variant="strengthened")
        assert cert.holds
        expected = 0.05 * 2 * 0.25 * math.exp(1.5 * 0.1 * 2 + 1.0)
        assert abs(cert.condition_lhs - expected) <= 1e-14


class TestChainDistance:
    def test_intersecting_endpoints(self):
        assert chain_distance((0, 1), (1, 2), ising_chain(3), 1.0) == 0.0

    def test_chain_graph_cost(self):
        phi = ising_chain(4)
        assert chain_distance((0,), (3,), phi, 1.0) == 3.0
        assert chain_distance((0,), (3,), phi, 0.25) == 0.75

    def test_no_chain_is_infinite(self):
        phi = Interaction(2, tuple(range(4)),
                          {(0, 1): np.kron(PAULI_Z, PAULI_Z)})
        assert chain_distance((0,), (3,), phi, 1.0) == math.inf

    def _bruteforce(self, x_set, y_set, interaction, b, max_len=5):
        from lattice_kms.clusters import as_decay_function
        decay = as_decay_function(b)
        supports = list(interaction.terms)
        x_set, y_set = frozenset(x_set), frozenset(y_set)
        if x_set & y_set:
            return 0.0
        best = math.inf
        import itertools
        for n in range(1, max_len + 1):
            for combo in itertools.product(supports, repeat=n):
                ok = bool(x_set & frozenset(combo[0]))
                for i in range(n - 1):
                    ok = ok and bool(frozenset(combo[i]) & frozenset(combo[i + 1]))
                ok = ok and bool(frozenset(combo[-1]) & y_set)
                if ok:
                    best = min(best, sum(decay(s) for s in combo))
        return best

    def test_against_bruteforce(self, rng):
        phi = ising_chain(5)
        b = {s: float(rng.uniform(0.1, 2.0)) for s in phi.terms}
        for x_set, y_set in [((0,), (4,)), ((0, 1), (3, 4)), ((1,), (3,))]:
            got = chain_distance(x_set, y_set, phi, b)
            ref = self._bruteforce(x_set, y_set, phi, b)
            assert abs(got - ref) <= 1e-12


class TestDecayBound:
    def test_unit_observables(self):
        phi = ising_chain(4)
        one = np.eye(1, dtype=complex)
        rep = decay_bound(one, (), one, (), phi, 0.05, 0.1, 1.0)
        assert rep.bound == 0.0 and rep.measured <= 1e-14 and rep.holds

    def test_six_site_ising(self):
        phi = ising_chain(6)
        rep = decay_bound(PAULI_Z, (0,), PAULI_Z, (5,), phi, 0.05, 0.1, 1.0)
        assert isinstance(rep, DecayBoundReport)
        assert rep.mu == 5.0
        assert abs(rep.k_ab - 0.23) <= 1e-14
        assert rep.measured <= rep.bound
        assert rep.holds

    def test_bound_monotone_in_distance(self):
        phi = ising_chain(6)
        near = decay_bound(PAULI_Z, (0,), PAULI_Z, (3,), phi, 0.05, 0.1, 1.0)
        far = decay_bound(PAULI_Z, (0,), PAULI_Z, (5,), phi, 0.05, 0.1, 1.0)
        assert far.bound <= near.bound

    def test_refuses_without_certificate(self):
        phi = ising_chain(6)
        with pytest.raises(CertificateNotEstablishedError):
            decay_bound(PAULI_Z, (0,), PAULI_Z, (5,), phi, 5.0, 0.1, 1.0)
