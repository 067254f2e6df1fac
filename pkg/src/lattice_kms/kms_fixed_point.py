"""Finite-volume equilibrium as a fixed point of a contraction map.

A state rho on the lattice algebra is determined by its coefficients on
the product basis e_j = (x) e_{j_x}.  Writing rho = tr + eps and turning
the equilibrium (KMS) identity into commutator form yields the linear
equation (1 - K_beta) eps = delta, whose data this module assembles from
dense matrices.  At high temperature K_beta is a sup-norm contraction and
fixed-point iteration recovers the exact Gibbs coefficients.

Commutator pairs from `commutators.decompose` are hermitian with
A = sum_j i[B_j, C_j]; the factor i is carried inside delta and K_beta so
the textbook formulas hold verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .commutators import decompose
from .errors import DimensionCapError
from .gibbs import ThermalState, diagonalize, imaginary_time
from .interaction import Interaction, hamiltonian, uniqueness_certificate
from .operators import hermitian_basis, kron_chain, normalized_trace

#: cap on the number of stored coefficients (N^2)^{|volume|}
COEFFICIENT_CAP = 2 ** 16


@dataclass
class CoefficientFunctional:
    """Dense table of functional values on the product operator basis.

    coeffs has shape (N^2,) * |volume|; axis i corresponds to the i-th
    site of the sorted volume.  The sup norm is the max absolute value
    over all multi-indices.
    """

    volume: tuple[int, ...]
    site_dim: int
    coeffs: np.ndarray

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def value(self, multi_index) -> complex:
        return complex(self.coeffs[tuple(multi_index)])


def _check_cap(site_dim: int, n_sites: int) -> None:
    if (site_dim ** 2) ** n_sites > COEFFICIENT_CAP:
        raise DimensionCapError(
            f"coefficient table of size {(site_dim ** 2) ** n_sites} exceeds "
            f"cap {COEFFICIENT_CAP}")


def _trace_tensor(mat: np.ndarray, basis: list[np.ndarray], n_sites: int) -> np.ndarray:
    """Tensor T[j_1..j_m] = Tr(mat . e_{j_1} (x) ... (x) e_{j_m})."""
    n = basis[0].shape[0]
    m = n_sites
    stack = np.stack(basis)                      # (N^2, N, N)
    t = mat.reshape((n,) * (2 * m))
    operands = [t, list(range(2 * m))]
    for x in range(m):
        operands += [stack, [2 * m + x, m + x, x]]
    return np.einsum(*operands, list(range(2 * m, 3 * m)), optimize=True)


def _expand_in_product_basis(mat, basis, gram_inv, n_sites):
    """Coefficients c with mat = sum_j c_j e_{j_1} (x) ... (x) e_{j_m}."""
    v = _trace_tensor(mat, basis, n_sites)
    for axis in range(n_sites):
        v = np.tensordot(gram_inv, v, axes=([1], [axis]))
        v = np.moveaxis(v, 0, axis)
    return v


def state_to_epsilon(state: ThermalState, basis: list[np.ndarray],
                     volume=None) -> CoefficientFunctional:
    """Coefficients of rho - tr on the product basis for a Gibbs state."""
    n = basis[0].shape[0]
    m = round(np.log(state.dim) / np.log(n))
    if n ** m != state.dim:
        raise ValueError("state dimension is not a power of the on-site dimension")
    _check_cap(n, m)
    volume = tuple(range(m)) if volume is None else tuple(sorted(volume))
    w = state.boltzmann_weights()
    rho = (state.eigenvectors * w) @ state.eigenvectors.conj().T
    coeffs = _trace_tensor(rho, basis, m)
    coeffs[(0,) * m] = 0.0
    return CoefficientFunctional(volume, n, coeffs)


class FixedPointProblem:
    """Precomputed delta vector and K_beta matrix for one interaction.

    The matrix acts on flattened coefficient tables: (K phi)_j = K[j, :] . phi.
    Rows with the all-zero multi-index are identically zero by convention.
    """

    def __init__(self, interaction: Interaction, beta: float,
                 basis: list[np.ndarray] | None = None,
                 decomp_table: dict | None = None):
        n = interaction.site_dim
        m = len(interaction.volume)
        _check_cap(n, m)
        self.interaction = interaction
        self.beta = float(beta)
        self.volume = interaction.volume
        self.site_dim = n
        self.n_sites = m
        self.basis = hermitian_basis(n) if basis is None else list(basis)
        if len(self.basis) != n * n:
            raise ValueError("basis must have N^2 elements")
        gram = np.array([[np.trace(a @ b) for b in self.basis] for a in self.basis])
        self.gram_inv = np.linalg.inv(gram)
        if decomp_table is None:
            decomp_table = {k: decompose(self.basis[k]).pairs
                            for k in range(1, n * n)}
        self.decomp_table = decomp_table
        self.state = diagonalize(hamiltonian(interaction), self.beta, "normalized")
        self._delta = None
        self._k_matrix = None

    # -- assembly -----------------------------------------------------------

    def _local_factor(self, multi_index, y_pos, at_y):
        mats = [self.basis[jx] for jx in multi_index]
        mats[y_pos] = at_y
        return kron_chain(mats)

    def _one_minus_alpha(self, y_pos, c_mat):
        """(1 - alpha_{i beta}) applied to c embedded at one site."""
        mats = [np.eye(self.site_dim, dtype=complex)] * self.n_sites
        mats[y_pos] = c_mat
        r = kron_chain(mats)
        return r - imaginary_time(self.state, r)

    def _build(self):
        n2 = self.site_dim ** 2
        m = self.n_sites
        size = n2 ** m
        delta = np.zeros((n2,) * m, dtype=complex)
        k_mat = np.zeros((size, size), dtype=complex)
        conj_cache = {}
        for y_pos in range(m):
            for k in range(1, n2):
                for i, (_, c) in enumerate(self.decomp_table[k]):
                    conj_cache[(y_pos, k, i)] = self._one_minus_alpha(y_pos, c)
        for flat_j, j in enumerate(np.ndindex(*(n2,) * m)):
            supp = [p for p, jx in enumerate(j) if jx != 0]
            if not supp:
                continue
            row = np.zeros(size, dtype=complex)
            d_val = 0.0 + 0.0j
            for y_pos in supp:
                k = j[y_pos]
                for i, (b, _) in enumerate(self.decomp_table[k]):
                    left = self._local_factor(j, y_pos, b)
                    t = left @ conj_cache[(y_pos, k, i)]
                    d_val += 1j * normalized_trace(t)
                    coeffs = _expand_in_product_basis(t, self.basis, self.gram_inv, m)
                    row += 1j * coeffs.reshape(-1)
            delta[j] = d_val / len(supp)
            k_mat[flat_j] = row / len(supp)
        self._delta = delta
        self._k_matrix = k_mat

    @property
    def delta(self) -> CoefficientFunctional:
        if self._delta is None:
            self._build()
        return CoefficientFunctional(self.volume, self.site_dim, self._delta.copy())

    @property
    def k_matrix(self) -> np.ndarray:
        if self._k_matrix is None:
            self._build()
        return self._k_matrix

    def apply_k(self, phi: CoefficientFunctional) -> CoefficientFunctional:
        out = self.k_matrix @ phi.flat()
        shape = (self.site_dim ** 2,) * self.n_sites
        return CoefficientFunctional(self.volume, self.site_dim, out.reshape(shape))

    def gibbs_epsilon(self) -> CoefficientFunctional:
        return state_to_epsilon(self.state, self.basis, self.volume)

    def derivation_residual(self) -> float:
        """Sup norm of eps - (delta + K eps) at the exact Gibbs eps."""
        eps = self.gibbs_epsilon()
        lhs = eps.flat()
        rhs = self.delta.flat() + self.k_matrix @ lhs
        return float(np.max(np.abs(lhs - rhs)))


def delta_functional(interaction: Interaction, beta: float, basis=None,
                     decomp_table=None) -> CoefficientFunctional:
    """The inhomogeneous term of the fixed-point equation."""
    return FixedPointProblem(interaction, beta, basis, decomp_table).delta


def k_beta_apply(phi: CoefficientFunctional, interaction: Interaction, beta: float,
                 basis=None, decomp_table=None) -> CoefficientFunctional:
    """Apply the fixed-point map's linear part to a coefficient functional."""
    return FixedPointProblem(interaction, beta, basis, decomp_table).apply_k(phi)


@dataclass
class FixedPointResult:
    epsilon: CoefficientFunctional
    iterations: int
    converged: bool
    final_update: float


def solve_fixed_point(interaction: Interaction, beta: float, basis=None,
                      tol: float = 1e-12, max_iter: int = 200,
                      check_certificate: bool = True,
                      problem: FixedPointProblem | None = None) -> FixedPointResult:
    """Iterate eps <- delta + K_beta eps from eps = 0 until the sup-norm
    update drops below tol.

    With check_certificate=True a failed contraction certificate raises;
    pass False to attempt the iteration regardless (non-convergence is then
    reported through the `converged` flag, not as an exception).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if check_certificate:
        cert = uniqueness_certificate(interaction, beta)
        if not cert.valid:
            from .errors import CertificateNotEstablishedError
            raise CertificateNotEstablishedError(
                "no contraction certificate at this beta; "
                "pass check_certificate=False to iterate anyway")
    prob = problem if problem is not None else FixedPointProblem(interaction, beta, basis)
    delta = prob.delta.flat()
    k = prob.k_matrix
    eps = np.zeros_like(delta)
    update = np.inf
    for it in range(1, max_iter + 1):
        new = delta + k @ eps
        update = float(np.max(np.abs(new - eps)))
        eps = new
        if update <= tol:
            shape = (prob.site_dim ** 2,) * prob.n_sites
            func = CoefficientFunctional(prob.volume, prob.site_dim, eps.reshape(shape))
            return FixedPointResult(func, it, True, update)
    shape = (prob.site_dim ** 2,) * prob.n_sites
    func = CoefficientFunctional(prob.volume, prob.site_dim, eps.reshape(shape))
    return FixedPointResult(func, max_iter, False, update)
