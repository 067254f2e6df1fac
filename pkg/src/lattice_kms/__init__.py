"""Finite-volume thermal equilibrium toolkit for quantum lattice systems.

Exact diagonalization back-end plus the constructive machinery built on
it: commutator decompositions with Hilbert-Schmidt certificates, the
KMS fixed-point equation and its contraction certificate, cluster
expansions with summability criteria and correlation decay bounds, spin
correlation inequalities, and complex-rotation (power-law) decay bounds
for continuous symmetries.
"""

__version__ = "0.1.0"

from .commutators import CommutatorDecomposition, decompose, order_eigenvalues
from .errors import (
    CertificateNotEstablishedError,
    ConfigError,
    ConvergenceError,
    DimensionCapError,
    HypothesisViolationError,
    LatticeKmsError,
    RangeOverflowError,
)
from .gibbs import (
    ThermalState,
    diagonalize,
    duhamel,
    expectation,
    imaginary_time,
    kms_residual,
    log_partition,
    truncated_correlation,
)
from .graphs import Graph, chain, custom, grid, ring
from .interaction import (
    Interaction,
    UniquenessCertificate,
    build_xyz,
    hamiltonian,
    interaction_norm,
    uniqueness_certificate,
)
from .operators import (
    as_site_set,
    commutator,
    embed,
    hermitian_basis,
    hs_norm,
    normalized_trace,
    operator_norm,
    spin_dim,
    spin_matrices,
)

__all__ = [
    "CertificateNotEstablishedError",
    "CommutatorDecomposition",
    "ConfigError",
    "ConvergenceError",
    "DimensionCapError",
    "Graph",
    "HypothesisViolationError",
    "Interaction",
    "LatticeKmsError",
    "RangeOverflowError",
    "ThermalState",
    "UniquenessCertificate",
    "as_site_set",
    "build_xyz",
    "chain",
    "commutator",
    "custom",
    "decompose",
    "diagonalize",
    "duhamel",
    "embed",
    "expectation",
    "grid",
    "hamiltonian",
    "hermitian_basis",
    "hs_norm",
    "imaginary_time",
    "interaction_norm",
    "kms_residual",
    "log_partition",
    "normalized_trace",
    "operator_norm",
    "order_eigenvalues",
    "ring",
    "spin_dim",
    "spin_matrices",
    "truncated_correlation",
    "uniqueness_certificate",
]
