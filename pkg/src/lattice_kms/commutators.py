"""Decompose traceless hermitian matrices into hermitian commutator pairs.

Any traceless hermitian A can be written as A = sum_j i[B_j, C_j] with at
most N-1 hermitian pairs whose accumulated Hilbert-Schmidt budget
sum_j ||B_j||_HS ||C_j||_HS stays below sqrt(N) ||A||_HS.  (Commutators of
hermitian matrices are anti-hermitian, hence the explicit factor i.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import as_operator, hs_norm, is_hermitian

TRACE_TOL = 1e-10


@dataclass(frozen=True)
class CommutatorDecomposition:
    """Hermitian pairs (B_j, C_j) with sum_j i[B_j, C_j] equal to the input."""

    pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    hs_budget: float
    ordering: tuple[int, ...]

    def reconstruct(self, dim: int) -> np.ndarray:
        out = np.zeros((dim, dim), dtype=complex)
        for b, c in self.pairs:
            out += 1j * (b @ c - c @ b)
        return out


def order_eigenvalues(a) -> tuple[int, ...]:
    """Order a zero-sum spectrum so every partial sum is small.

    Returns a permutation pi with |sum_{i<=k} a_{pi(i)}| <= sqrt(N)*||A||_HS
    for every k <= N-1, where ||A||_HS^2 = (1/N) sum a_i^2.  Greedy rule:
    while the partial sum is positive pick the most negative remaining
    eigenvalue and vice versa; from an exactly zero partial sum pick the
    remaining eigenvalue of largest magnitude.  Ties break on the original
    index.
    """
    vals = [float(x) for x in a]
    total_abs = sum(abs(x) for x in vals)
    if abs(sum(vals)) > TRACE_TOL * max(total_abs, 1e-300) and total_abs > 0:
        raise ValueError(f"eigenvalues do not sum to zero: sum = {sum(vals)}")
    remaining = list(range(len(vals)))
    perm = []
    partial = 0.0
    while remaining:
        if partial > 0:
            cand = [i for i in remaining if vals[i] <= 0]
        elif partial < 0:
            cand = [i for i in remaining if vals[i] >= 0]
        else:
            cand = remaining
        if not cand:                       # float noise exhausted one sign
            cand = remaining
        pick = max(cand, key=lambda i: (abs(vals[i]), -i))
        perm.append(pick)
        remaining.remove(pick)
        partial += vals[pick]
    return tuple(perm)


def _block_pauli(n: int, j: int, which: int) -> np.ndarray:
    """N x N matrix equal to a Pauli matrix on the (j, j+1) block, else 0."""
    m = np.zeros((n, n), dtype=complex)
    if which == 1:
        m[j, j + 1] = m[j + 1, j] = 1.0
    elif which == 2:
        m[j, j + 1] = -1j
        m[j + 1, j] = 1j
    else:
        m[j, j] = 1.0
        m[j + 1, j + 1] = -1.0
    return m


def decompose(a) -> CommutatorDecomposition:
    """Commutator decomposition of a traceless hermitian matrix.

    Diagonalizes the input, orders the spectrum with `order_eigenvalues`,
    and emits one pair per spectral step: B_j is the block sigma^1 and C_j
    is the block sigma^2 scaled by half the accumulated eigenvalue sum,
    both conjugated back to the original basis.  Pairs with vanishing
    coefficient are dropped.
    """
    a = as_operator(a)
    n = a.shape[0]
    if not is_hermitian(a):
        raise ValueError("input is not hermitian")
    a = (a + a.conj().T) / 2
    vals, vecs = np.linalg.eigh(a)
    perm = order_eigenvalues(vals)
    vals = vals[list(perm)]
    vecs = vecs[:, list(perm)]

    pairs = []
    budget = 0.0
    tilde = 0.0
    norm_hs = float(np.sqrt(np.sum(vals ** 2) / n))
    for j in range(n - 1):
        tilde += vals[j]
        if abs(tilde) <= 1e-15 * max(norm_hs, 1e-300):
            continue
        b = vecs @ _block_pauli(n, j, 1) @ vecs.conj().T
        c = vecs @ (-(tilde / 2) * _block_pauli(n, j, 2)) @ vecs.conj().T
        pairs.append((b, c))
        budget += hs_norm(b) * hs_norm(c)
    return CommutatorDecomposition(tuple(pairs), budget, perm)
