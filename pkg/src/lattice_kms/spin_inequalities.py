"""Exact-diagonalization sweeps for spin correlation inequalities.

Couplings are sampled per edge inside the hypothesis region of each
inequality (|J2| <= J1 for the two-point and multi-point checks;
J1 = J2 >= 0 for the Duhamel derivative check), and every margin is
evaluated by full diagonalization, so a negative margin beyond roundoff
would be a genuine counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolationError
from .gibbs import diagonalize, duhamel, expectation
from .graphs import Graph
from .interaction import build_xyz, hamiltonian
from .operators import embed, spin_matrices

MARGIN_TOL = 1e-10

Couplings = dict[tuple[int, int], tuple[float, float, float]]


@dataclass
class CouplingSweep:
    """Seeded family of per-edge coupling samples on a fixed graph."""

    graph: Graph
    spin: float
    beta: float
    seed: int
    samples: list[Couplings] = field(default_factory=list)
    symmetric: bool = False

    def validate_two_point_hypothesis(self):
        for i, sample in enumerate(self.samples):
            for e, (j1, j2, _) in sample.items():
                if abs(j2) > j1:
                    raise HypothesisViolationError(
                        f"sample {i}, edge {e}: |J2| = {abs(j2)} > J1 = {j1}")

    def validate_symmetric_hypothesis(self):
        for i, sample in enumerate(self.samples):
            for e, (j1, j2, _) in sample.items():
                if j1 != j2 or j1 < 0:
                    raise HypothesisViolationError(
                        f"sample {i}, edge {e}: needs J1 = J2 >= 0, "
                        f"got ({j1}, {j2})")


def make_sweep(graph: Graph, spin: float, beta: float, n_samples: int,
               seed: int, symmetric: bool = False) -> CouplingSweep:
    """Draw coupling samples: J1 ~ U(0,2), J2 ~ U(-J1, J1), J3 ~ U(-1, 1).

    With symmetric=True the samples sit on the J1 = J2 >= 0 manifold
    required by the Duhamel derivative inequality.
    """
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_samples):
        sample = {}
        for e in graph.edges:
            j1 = float(rng.uniform(0.0, 2.0))
            j2 = j1 if symmetric else float(rng.uniform(-j1, j1))
            j3 = float(rng.uniform(-1.0, 1.0))
            sample[e] = (j1, j2, j3)
        samples.append(sample)
    return CouplingSweep(graph, spin, beta, seed, samples, symmetric)


def _interaction_for(sweep: CouplingSweep, sample: Couplings):
    j1 = {e: c[0] for e, c in sample.items()}
    j2 = {e: c[1] for e, c in sample.items()}
    j3 = {e: c[2] for e, c in sample.items()}
    return build_xyz(sweep.graph, sweep.spin, j1, j2, j3)


def _spin_product(graph: Graph, spin: float, sites, components) -> np.ndarray:
    """Product of single-site spin operators, in the order given."""
    mats = spin_matrices(spin)
    dim = mats[0].shape[0] ** len(graph.vertices)
    out = np.eye(dim, dtype=complex)
    for x, c in zip(sites, components):
        out = out @ embed(mats[c - 1], (x,), graph.vertices, mats[0].shape[0])
    return out


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise ArithmeticError(f"{what} came out non-real: {value}")
    return float(value.real)


@dataclass
class SampleMargin:
    index: int
    couplings: Couplings
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class InequalityReport:
    rows: list[SampleMargin]

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.rows)

    @property
    def all_hold(self) -> bool:
        return self.min_margin >= -MARGIN_TOL


def check_two_point(sweep: CouplingSweep, x: int) -> InequalityReport:
    """|<S2_0 S2_x>| <= <S1_0 S1_x> under |J2| <= J1, sample by sample."""
    return check_multi_point(sweep, (sweep.graph.origin, x), (2, 2))


def check_multi_point(sweep: CouplingSweep, sites, components) -> InequalityReport:
    """|<S^{j_1}_{x_1} ... S^{j_k}_{x_k}>| <= <S^1_{x_1} ... S^1_{x_k}>."""
    if len(sites) != len(components) or not all(c in (1, 2) for c in components):
        raise ValueError("components must be a matching list over {1, 2}")
    if len(sites) > 6:
        raise ValueError("multi-point check is capped at 6 factors")
    sweep.validate_two_point_hypothesis()
    lhs_op = _spin_product(sweep.graph, sweep.spin, sites, components)
    rhs_op = _spin_product(sweep.graph, sweep.spin, sites, [1] * len(sites))
    rows = []
    for i, sample in enumerate(sweep.samples):
        state = diagonalize(hamiltonian(_interaction_for(sweep, sample)), sweep.beta)
        lhs = abs(expectation(state, lhs_op))
        rhs = _real(expectation(state, rhs_op), "the all-S1 correlation")
        rows.append(SampleMargin(i, sample, lhs, rhs))
    return InequalityReport(rows)


FD_STEP = 1e-4


@dataclass
class DuhamelRow:
    index: int
    couplings: Couplings
    derivative_duhamel: tuple[float, float]      # components i = 1, 2
    derivative_fd: tuple[float, float]
    duhamel_lhs: float                           # |(S1S1, S2S2)|
    duhamel_rhs: float                           # (S1S1, S1S1)

    @property
    def derivative_margin(self) -> float:
        return self.derivative_duhamel[0] - self.derivative_duhamel[1]

    @property
    def duhamel_margin(self) -> float:
        return self.duhamel_rhs - self.duhamel_lhs

    @property
    def fd_rel_errors(self) -> tuple[float, float]:
        out = []
        for d, f in zip(self.derivative_duhamel, self.derivative_fd):
            scale = max(abs(d), abs(f), 1e-12)
            out.append(abs(d - f) / scale)
        return tuple(out)


@dataclass
class DuhamelReport:
    rows: list[DuhamelRow]

    @property
    def max_fd_rel_error(self) -> float:
        return max(max(r.fd_rel_errors) for r in self.rows)

    @property
    def min_derivative_margin(self) -> float:
        return min(r.derivative_margin for r in self.rows)

    @property
    def min_duhamel_margin(self) -> float:
        return min(r.duhamel_margin for r in self.rows)


def check_duhamel_derivative(sweep: CouplingSweep, edge, pair) -> DuhamelReport:
    """Coupling derivative of correlations, two ways, plus its inequality.

    For each sample (J1 = J2 >= 0 required): evaluates
    (1/beta) d<S^i_z S^i_u>/dJ1_xy = (S1_x S1_y, S^i_z S^i_u)
    - <S1_x S1_y><S^i_z S^i_u> through the Duhamel two-point function, checks
    it against a Richardson-refined central difference in J1 alone, and
    records the margins of d<S2S2> <= d<S1S1> and
    |(S1S1, S2S2)| <= (S1S1, S1S1).
    """
    sweep.validate_symmetric_hypothesis()
    e = (min(edge), max(edge))
    if e not in sweep.graph.edges:
        raise ValueError(f"{edge} is not a graph edge")
    z, u = pair
    g = sweep.graph
    perturb = _spin_product(g, sweep.spin, (e[0], e[1]), (1, 1))
    obs = {i: _spin_product(g, sweep.spin, (z, u), (i, i)) for i in (1, 2)}
    rows = []
    for idx, sample in enumerate(sweep.samples):
        state = diagonalize(hamiltonian(_interaction_for(sweep, sample)), sweep.beta)
        d_duh = []
        d_fd = []
        for i in (1, 2):
            duh = duhamel(state, perturb, obs[i])
            mean = (expectation(state, perturb) * expectation(state, obs[i]))
            d_duh.append(_real(sweep.beta * (duh - mean), "Duhamel derivative"))
            d_fd.append(_fd_derivative(sweep, sample, e, obs[i], i))
        lhs = abs(duhamel(state, perturb, obs[2]))
        rhs = _real(duhamel(state, perturb, obs[1]), "the Duhamel norm")
        rows.append(DuhamelRow(idx, sample, tuple(d_duh), tuple(d_fd), lhs, rhs))
    return DuhamelReport(rows)


def _fd_derivative(sweep, sample, edge, observable, i) -> float:
    def value(h):
        shifted = dict(sample)
        j1, j2, j3 = shifted[edge]
        shifted[edge] = (j1 + h, j2, j3)        # J1 only, leaving the manifold
        state = diagonalize(hamiltonian(_interaction_for(sweep, shifted)),
                            sweep.beta)
        return _real(expectation(state, observable), "the correlation")

    def central(h):
        return (value(h) - value(-h)) / (2 * h)

    d1 = central(FD_STEP)
    d2 = central(FD_STEP / 2)
    return (4 * d2 - d1) / 3
