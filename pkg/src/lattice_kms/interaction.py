"""Lattice interactions: weighted norms, Hamiltonians, model builders,
and the high-temperature contraction certificate for state uniqueness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .operators import (
    as_operator,
    as_site_set,
    embed,
    is_hermitian,
    operator_norm,
    spin_matrices,
)


class Interaction:
    """A family of hermitian operators keyed by the site sets they act on.

    `terms` maps a sorted site tuple X to an operator of dimension
    site_dim**|X|.  The family is immutable after construction; inserting
    the same site set twice is an error rather than a silent sum.
    """

    def __init__(self, site_dim: int, volume, terms):
        if site_dim < 1:
            raise ValueError("site_dim must be a positive integer")
        self.site_dim = int(site_dim)
        self.volume = as_site_set(volume)
        vol = set(self.volume)
        canon: dict[tuple[int, ...], np.ndarray] = {}
        for sites, op in self._iter_pairs(terms):
            key = as_site_set(sites)
            if not key:
                raise ValueError("interaction terms must have nonempty support")
            if not set(key) <= vol:
                raise ValueError(f"term support {key} not contained in volume")
            if key in canon:
                raise ValueError(f"duplicate interaction term for sites {key}")
            mat = as_operator(op)
            if mat.shape[0] != self.site_dim ** len(key):
                raise ValueError(
                    f"term on {key} has dim {mat.shape[0]}, "
                    f"expected {self.site_dim ** len(key)}")
            if not is_hermitian(mat):
                raise ValueError(f"term on {key} is not hermitian")
            canon[key] = mat
        self.terms = dict(sorted(canon.items()))
        self._norm_cache = {X: operator_norm(m) for X, m in self.terms.items()}

    @staticmethod
    def _iter_pairs(terms):
        if isinstance(terms, dict):
            return terms.items()
        return terms

    def supports(self) -> list[tuple[int, ...]]:
        return list(self.terms)

    def term_norm(self, sites) -> float:
        return self._norm_cache[as_site_set(sites)]

    def __len__(self):
        return len(self.terms)


def interaction_norm(phi: Interaction, r: float, per_site: bool = False):
    """Weighted interaction norm: max over sites x of sum_{X ∋ x} ||Phi_X|| r^|X|.

    With per_site=True the per-site sums are returned as a dict instead of
    their max, which is handy for reading off the interior-site value on
    translation-invariant models.
    """
    if r < 1:
        raise ValueError("the weight parameter r must be >= 1")
    sums = {x: 0.0 for x in phi.volume}
    for X, _ in phi.terms.items():
        w = phi.term_norm(X) * r ** len(X)
        for x in X:
            sums[x] += w
    if per_site:
        return sums
    return max(sums.values(), default=0.0)


def hamiltonian(phi: Interaction) -> np.ndarray:
    """Sum of all interaction terms embedded into the full volume."""
    if not phi.volume:
        raise ValueError("volume is empty")
    dim = phi.site_dim ** len(phi.volume)
    h = np.zeros((dim, dim), dtype=complex)
    for X, op in phi.terms.items():
        h += embed(op, X, phi.volume, phi.site_dim)
    return h


def _coupling_map(graph: Graph, j) -> dict[tuple[int, int], float]:
    """Normalize a scalar or per-edge dict of couplings against the graph."""
    if np.isscalar(j):
        return {e: float(j) for e in graph.edges}
    out = {e: 0.0 for e in graph.edges}
    for key, val in j.items():
        e = (min(key), max(key))
        if e not in out:
            raise ValueError(f"coupling on ({key[0]},{key[1]}) is not a graph edge")
        out[e] = float(val)
    return out


def build_xyz(graph: Graph, s: float, j1, j2, j3) -> Interaction:
    """Two-body spin interaction with per-edge exchange couplings.

    Each unordered edge {x,y} contributes one term
    -(J1 S1S1 + J2 S2S2 + J3 S3S3); this absorbs the conventional factor
    -1/2 and the double sum over ordered pairs.  Couplings may be scalars
    (uniform) or dicts keyed by edges.
    """
    s1, s2, s3, _, _ = spin_matrices(s)
    n = s1.shape[0]
    c1, c2, c3 = (_coupling_map(graph, j) for j in (j1, j2, j3))
    terms = {}
    for e in graph.edges:
        op = -(c1[e] * np.kron(s1, s1) + c2[e] * np.kron(s2, s2)
               + c3[e] * np.kron(s3, s3))
        terms[e] = op
    return Interaction(n, graph.vertices, terms)


@dataclass(frozen=True)
class UniquenessCertificate:
    """Witness for the high-temperature contraction condition.

    Valid iff there is s < 1/N with 2*beta*||Phi||_{N(1+s)} < s; the sup-norm
    of the fixed-point map is then bounded by N*s.
    """

    s_witness: float
    norm_at_witness: float
    contraction_bound: float
    valid: bool
    simple_condition_holds: bool
    site_dim: int
    beta: float

    def recheck(self) -> bool:
        return (2 * self.beta * self.norm_at_witness < self.s_witness
                and self.s_witness < 1 / self.site_dim)


S_GRID_POINTS = 64
S_BISECTION_STEPS = 40


def uniqueness_certificate(phi: Interaction, beta: float) -> UniquenessCertificate:
    """Search for the smallest s in (0, 1/N) with 2*beta*||Phi||_{N(1+s)} < s.

    The search scans a fixed logarithmic grid and refines the first sign
    change by bisection, so results are deterministic.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    n = phi.site_dim
    simple = beta * interaction_norm(phi, n + 1) < 1 / (2 * n)

    def g(s):
        return 2 * beta * interaction_norm(phi, n * (1 + s)) - s

    if not phi.terms or interaction_norm(phi, n + 1) == 0.0:
        s = 1 / (2 * n)
        return UniquenessCertificate(s, 0.0, 0.0, True, simple, n, beta)

    grid = np.geomspace(1e-4 / n, 0.999 / n, S_GRID_POINTS)
    values = [g(s) for s in grid]
    valid_idx = [i for i, v in enumerate(values) if v < 0]
    if not valid_idx:
        i_best = int(np.argmin(values))
        s = float(grid[i_best])
        norm = interaction_norm(phi, n * (1 + s))
        return UniquenessCertificate(s, norm, n * s, False, simple, n, beta)
    i = valid_idx[0]
    s_hi = float(grid[i])
    if i > 0 and values[i - 1] >= 0:
        s_lo = float(grid[i - 1])
        for _ in range(S_BISECTION_STEPS):
            mid = 0.5 * (s_lo + s_hi)
            if g(mid) < 0:
                s_hi = mid
            else:
                s_lo = mid
    s = s_hi
    norm = interaction_norm(phi, n * (1 + s))
    valid = 2 * beta * norm < s and s < 1 / n
    return UniquenessCertificate(s, norm, n * s, valid, simple, n, beta)
