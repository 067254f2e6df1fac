"""Dense tensor-product operator algebra for finite spin lattices.

Operators are plain complex numpy arrays.  Sites are labelled by
non-negative integers; a set of sites is always carried around as a
strictly sorted tuple, and Kronecker factors are composed left-to-right
in that order (the lowest site is the slowest index).
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import DimensionCapError

#: Hard cap on the dimension of any dense lattice operator.
DENSE_DIM_CAP = 2 ** 14

HERMITICITY_TOL = 1e-12


def as_site_set(sites) -> tuple[int, ...]:
    """Canonicalize an iterable of sites into a strictly sorted tuple."""
    out = tuple(sorted(int(x) for x in sites))
    if any(x < 0 for x in out):
        raise ValueError("site labels must be non-negative integers")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate sites in {out}")
    return out


def spin_dim(s: float) -> int:
    """On-site Hilbert space dimension 2s+1 for spin s (s = 1/2, 1, 3/2, ...)."""
    two_s = round(2 * s)
    if abs(2 * s - two_s) > 1e-12 or two_s < 1:
        raise ValueError(f"spin must be a positive half-integer, got {s}")
    return two_s + 1


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("operator contains non-finite entries")
    return m


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    return bool(np.max(np.abs(a - a.conj().T)) <= tol * scale)


def spin_matrices(s: float):
    """Spin matrices (S1, S2, S3, S+, S-) for spin s in the basis a = -s..s.

    S+|a> = sqrt(s(s+1) - a(a+1)) |a+1>, S-|a> = sqrt(s(s+1) - (a-1)a) |a-1>,
    S3|a> = a|a>, S1 = (S+ + S-)/2, S2 = (S+ - S-)/(2i).
    """
    n = spin_dim(s)
    a = -s + np.arange(n)          # ascending magnetic quantum numbers
    sp = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        sp[k + 1, k] = np.sqrt(s * (s + 1) - a[k] * (a[k] + 1))
    sm = sp.conj().T
    s1 = (sp + sm) / 2
    s2 = (sp - sm) / 2j
    s3 = np.diag(a).astype(complex)
    return s1, s2, s3, sp, sm


def hermitian_basis(n: int) -> list[np.ndarray]:
    """Hermitian basis of the n x n matrices, all with operator norm 1.

    Element 0 is the identity; all others are traceless.  Off-diagonal
    elements are the symmetric/antisymmetric unit pairs; diagonal elements
    are generalized Gell-Mann diagonals rescaled to operator norm 1.
    For n = 2 this is exactly (1, sigma_x, sigma_y, sigma_z).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    basis = [np.eye(n, dtype=complex)]
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            basis.append(sym)
    for j in range(n):
        for k in range(j + 1, n):
            asym = np.zeros((n, n), dtype=complex)
            asym[j, k] = -1j
            asym[k, j] = 1j
            basis.append(asym)
    for l in range(1, n):
        d = np.zeros(n, dtype=complex)
        d[:l] = 1.0
        d[l] = -l
        basis.append(np.diag(d / l))    # largest eigenvalue magnitude is l
    return basis


def kron_chain(mats) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def embed(op, support, volume, site_dim: int) -> np.ndarray:
    """Embed an operator living on `support` into the volume's product space.

    The operator acts as `op` on the tensor factors of `support` (in sorted
    site order) and as the identity elsewhere.
    """
    op = as_operator(op)
    support = as_site_set(support)
    volume = as_site_set(volume)
    if not set(support) <= set(volume):
        raise ValueError(f"support {support} not contained in volume {volume}")
    k, m = len(support), len(volume)
    if op.shape[0] != site_dim ** k:
        raise ValueError(
            f"operator dim {op.shape[0]} != site_dim^|support| = {site_dim ** k}")
    full_dim = site_dim ** m
    if full_dim > DENSE_DIM_CAP:
        raise DimensionCapError(
            f"volume dimension {full_dim} exceeds dense cap {DENSE_DIM_CAP}")
    if k == m:
        return op.copy()
    rest = [x for x in volume if x not in set(support)]
    full = np.kron(op, np.eye(site_dim ** (m - k), dtype=complex))
    cur_sites = list(support) + rest
    perm = [cur_sites.index(x) for x in volume]
    t = full.reshape((site_dim,) * (2 * m))
    t = t.transpose(perm + [m + p for p in perm])
    return np.ascontiguousarray(t.reshape(full_dim, full_dim))


def normalized_trace(op) -> complex:
    """Trace divided by the matrix dimension."""
    op = np.asarray(op)
    return complex(np.trace(op) / op.shape[0])


def hs_norm(op) -> float:
    """Normalized Hilbert-Schmidt norm sqrt(Tr A*A / dim)."""
    op = np.asarray(op)
    return float(np.linalg.norm(op) / np.sqrt(op.shape[0]))


def operator_norm(op) -> float:
    """Largest singular value (max |eigenvalue| on the hermitian fast path)."""
    op = as_operator(op)
    if is_hermitian(op):
        return float(np.max(np.abs(np.linalg.eigvalsh(op)))) if op.size else 0.0
    return float(np.linalg.norm(op, 2))


def commutator(a, b) -> np.ndarray:
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a
