"""Exact finite-volume thermal equilibrium via full diagonalization.

Partition functions are kept in log form; expectation values are
convention-independent, but the trace convention (plain Tr vs the
normalized trace) is carried explicitly because partition-function
values depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RangeOverflowError
from .operators import as_operator, is_hermitian

#: reject imaginary-time conjugation when beta * spectral width exceeds this
TIME_RANGE_CAP = 300.0

CONVENTIONS = ("plain", "normalized")


@dataclass(frozen=True)
class ThermalState:
    """Spectral data of a Hamiltonian together with an inverse temperature."""

    beta: float
    eigenvalues: np.ndarray          # ascending
    eigenvectors: np.ndarray         # unitary, columns are eigenvectors
    trace_convention: str = "plain"

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def spectral_width(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def boltzmann_weights(self) -> np.ndarray:
        """Normalized Gibbs weights exp(-beta E_n) / Z."""
        shifted = -self.beta * (self.eigenvalues - self.eigenvalues[0])
        w = np.exp(shifted)
        return w / w.sum()

    def to_eigenbasis(self, a: np.ndarray) -> np.ndarray:
        u = self.eigenvectors
        return u.conj().T @ a @ u

    def from_eigenbasis(self, a: np.ndarray) -> np.ndarray:
        u = self.eigenvectors
        return u @ a @ u.conj().T


def diagonalize(h, beta: float, convention: str = "plain") -> ThermalState:
    """Diagonalize a hermitian Hamiltonian; beta = 0 is allowed."""
    h = as_operator(h)
    if not is_hermitian(h):
        raise ValueError("Hamiltonian is not hermitian")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown trace convention {convention!r}")
    vals, vecs = np.linalg.eigh((h + h.conj().T) / 2)
    return ThermalState(float(beta), vals, vecs, convention)


def log_partition(state: ThermalState) -> float:
    """log Z in the state's trace convention."""
    e = state.eigenvalues
    shifted = -state.beta * (e - e[0])
    log_z = -state.beta * float(e[0]) + float(np.log(np.sum(np.exp(shifted))))
    if state.trace_convention == "normalized":
        log_z -= np.log(state.dim)
    return log_z


def expectation(state: ThermalState, a) -> complex:
    """Gibbs expectation <A> = Tr A e^{-beta H} / Tr e^{-beta H}."""
    a = as_operator(a)
    if a.shape[0] != state.dim:
        raise ValueError("dimension mismatch")
    w = state.boltzmann_weights()
    au = a @ state.eigenvectors
    diag = np.einsum("in,in->n", state.eigenvectors.conj(), au)
    return complex(diag @ w)


def truncated_correlation(state: ThermalState, a, b) -> complex:
    """<AB> - <A><B>."""
    a = as_operator(a)
    b = as_operator(b)
    return expectation(state, a @ b) - expectation(state, a) * expectation(state, b)


def imaginary_time(state: ThermalState, a) -> np.ndarray:
    """Imaginary-time conjugation e^{-beta H} A e^{beta H}.

    Computed in the eigenbasis as A_mn * exp(-beta (E_m - E_n)); rejected
    when beta * spectral width is large enough to overflow.
    """
    a = as_operator(a)
    if a.shape[0] != state.dim:
        raise ValueError("dimension mismatch")
    if state.beta * state.spectral_width > TIME_RANGE_CAP:
        raise RangeOverflowError(
            f"beta * spectral width = {state.beta * state.spectral_width:.3g} "
            f"exceeds {TIME_RANGE_CAP}")
    e = state.eigenvalues
    phase = np.exp(-state.beta * (e[:, None] - e[None, :]))
    return state.from_eigenbasis(state.to_eigenbasis(a) * phase)


def kms_residual(state: ThermalState, a, b) -> float:
    """|rho(AB) - rho(B e^{-beta H} A e^{beta H})| for the Gibbs state rho.

    Vanishes identically up to roundoff: this is the equilibrium
    (KMS) property of the finite-volume Gibbs state.
    """
    a = as_operator(a)
    b = as_operator(b)
    lhs = expectation(state, a @ b)
    rhs = expectation(state, b @ imaginary_time(state, a))
    return abs(lhs - rhs)


#: relative degeneracy threshold for the Duhamel kernel
DUHAMEL_DEGENERACY_RTOL = 1e-9


def duhamel(state: ThermalState, a, b) -> complex:
    """Duhamel two-point function (A,B) = (1/Z) int_0^1 Tr A e^{-s beta H} B e^{-(1-s) beta H} ds.

    Evaluated in the eigenbasis with the kernel
    K(E,E') = (e^{-beta E'} - e^{-beta E}) / (beta (E - E')); near-degenerate
    pairs switch to a second-order expansion around the midpoint energy to
    avoid catastrophic cancellation.
    """
    a = as_operator(a)
    b = as_operator(b)
    if a.shape[0] != state.dim or b.shape[0] != state.dim:
        raise ValueError("dimension mismatch")
    e = state.eigenvalues - state.eigenvalues[0]
    beta = state.beta
    diff = e[:, None] - e[None, :]
    width = max(state.spectral_width, 0.0)
    cutoff = DUHAMEL_DEGENERACY_RTOL * max(width, 1e-300)
    near = np.abs(diff) <= cutoff
    if beta == 0.0:
        kernel = np.ones_like(diff)
    else:
        safe = np.where(near, 1.0, diff)
        kernel = (np.exp(-beta * e)[None, :] - np.exp(-beta * e)[:, None]) / (beta * safe)
        mid = 0.5 * (e[:, None] + e[None, :])
        series = np.exp(-beta * mid) * (1.0 + (beta * diff) ** 2 / 24.0)
        kernel = np.where(near, series, kernel)
    z = float(np.sum(np.exp(-beta * e)))
    at = state.to_eigenbasis(a)
    bt = state.to_eigenbasis(b)
    return complex(np.sum(at * bt.T * kernel) / z)
