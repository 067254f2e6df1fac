"""High-temperature cluster expansions at finite volume.

A cluster is an ordered sequence of interaction supports whose pairwise
intersection graph is connected.  The log-partition series, observable
series, summability certificates, chain distances, and the two-point
decay bound all live here.  Weights carry the (-beta)^n / n! factor of
the expansion of exp(-beta H), so truncated series converge to the exact
diagonalization values and can be compared against them directly.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CertificateNotEstablishedError, DimensionCapError
from .gibbs import diagonalize, expectation, log_partition, truncated_correlation
from .interaction import Interaction, hamiltonian
from .operators import (
    DENSE_DIM_CAP,
    as_operator,
    as_site_set,
    embed,
    normalized_trace,
    operator_norm,
)

#: relative magnitude below which a cluster weight is treated as an exact zero
WEIGHT_DROP_RTOL = 1e-14

URSELL_HARD_CAP = 9
URSELL_ENUMERATION_MAX = 6


@dataclass
class ClusterSeq:
    """Ordered sequence of site sets with a connected intersection graph.

    With an anchor, the anchor acts as the zeroth set of the sequence for
    the connectivity requirement and is part of the support; the sequence
    itself may then be empty.
    """

    sets: tuple[tuple[int, ...], ...]
    anchor: tuple[int, ...] | None = None
    support: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        self.sets = tuple(as_site_set(x) for x in self.sets)
        if self.anchor is not None:
            self.anchor = as_site_set(self.anchor)
        seq = ([self.anchor] if self.anchor is not None else []) + list(self.sets)
        if not seq:
            raise ValueError("a cluster needs at least one set")
        if self.anchor is None and not self.sets:
            raise ValueError("an unanchored cluster needs a nonempty sequence")
        if not _intersection_graph_connected(seq):
            raise ValueError(f"intersection graph of {seq} is not connected")
        self.support = as_site_set(set().union(*map(set, seq)))

    @property
    def n(self) -> int:
        return len(self.sets)


def _intersection_graph_connected(sets) -> bool:
    k = len(sets)
    if k <= 1:
        return True
    fs = [frozenset(s) for s in sets]
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(k):
            if j not in seen and fs[i] & fs[j]:
                seen.add(j)
                stack.append(j)
    return len(seen) == k


def enumerate_clusters(interaction: Interaction, anchor=None, max_n: int = 1,
                       max_support: int | None = None):
    """Yield clusters over the interaction's term supports.

    Sequences allow repetition and are order-significant; the stream is
    deterministic: by length, then lexicographically in the alphabet of
    sorted term supports.  Anchored enumeration includes the length-zero
    cluster (the bare anchor).
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    alphabet = sorted(interaction.terms)
    anchor_t = as_site_set(anchor) if anchor is not None else None
    start = 0 if anchor_t is not None else 1
    for n in range(start, max_n + 1):
        for combo in itertools.product(alphabet, repeat=n):
            seq = ([anchor_t] if anchor_t is not None else []) + list(combo)
            if not _intersection_graph_connected(seq):
                continue
            if max_support is not None:
                supp = set().union(*map(set, seq)) if seq else set()
                if len(supp) > max_support:
                    continue
            yield ClusterSeq(tuple(combo), anchor_t)


def weight(cluster: ClusterSeq, interaction: Interaction, beta: float) -> complex:
    """w(C) = ((-beta)^n / n!) tr Phi_{X_1} ... Phi_{X_n} on the cluster support."""
    if cluster.anchor is not None:
        raise ValueError("use weight_anchored for anchored clusters")
    return _weight_product(cluster.sets, None, None, cluster.support,
                           interaction, beta)


def weight_anchored(cluster: ClusterSeq, a, interaction: Interaction,
                    beta: float) -> complex:
    """w_A(C_A) = ((-beta)^n / n!) tr A Phi_{X_1} ... Phi_{X_n}; tr A for n = 0."""
    if cluster.anchor is None:
        raise ValueError("cluster has no anchor")
    a = as_operator(a)
    if a.shape[0] != interaction.site_dim ** len(cluster.anchor):
        raise ValueError("observable dimension does not match the anchor")
    return _weight_product(cluster.sets, a, cluster.anchor, cluster.support,
                           interaction, beta)


def _weight_product(sets, a, anchor, support, interaction, beta) -> complex:
    for x in sets:
        if x not in interaction.terms:
            raise KeyError(f"{x} is not an interaction term support")
    n = len(sets)
    dim = interaction.site_dim ** len(support)
    prod = np.eye(dim, dtype=complex)
    if a is not None:
        prod = embed(a, anchor, support, interaction.site_dim)
    for x in sets:
        prod = prod @ embed(interaction.terms[x], x, support, interaction.site_dim)
    return (-beta) ** n / math.factorial(n) * normalized_trace(prod)


# -- Ursell function ---------------------------------------------------------

def _pair_bit(i: int, j: int, k: int) -> int:
    """Bit index of the unordered pair (i < j) among the k(k-1)/2 pairs."""
    return i * k - i * (i + 1) // 2 + (j - i - 1)


def overlap_mask(supports) -> int:
    """Bitmask of pairwise support intersections for a tuple of clusters."""
    fs = [frozenset(s) for s in supports]
    k = len(fs)
    mask = 0
    for i in range(k):
        for j in range(i + 1, k):
            if fs[i] & fs[j]:
                mask |= 1 << _pair_bit(i, j, k)
    return mask


def _mask_connected(mask: int, k: int) -> bool:
    adj = [0] * k
    for i in range(k):
        for j in range(i + 1, k):
            if mask >> _pair_bit(i, j, k) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for i in range(k):
            if frontier >> i & 1:
                nxt |= adj[i]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << k) - 1


@lru_cache(maxsize=None)
def _connected_graphs(k: int):
    """All connected labeled graphs on k vertices as (edge mask, parity) pairs."""
    n_pairs = k * (k - 1) // 2
    out = []
    for g in range(1 << n_pairs):
        if _mask_connected(g, k):
            out.append((g, -1 if bin(g).count("1") % 2 else 1))
    return tuple(out)


def ursell_phi_bruteforce(mask: int, k: int) -> int:
    """Signed sum over connected spanning subgraphs, by direct subset search."""
    if k == 1:
        return 1
    total = 0
    g = mask
    while True:
        if _mask_connected(g, k):
            total += -1 if bin(g).count("1") % 2 else 1
        if g == 0:
            break
        g = (g - 1) & mask
    return total


@lru_cache(maxsize=None)
def _phi_enumeration(mask: int, k: int) -> int:
    if k == 1:
        return 1
    return sum(par for g, par in _connected_graphs(k) if g & ~mask == 0)


@lru_cache(maxsize=None)
def _phi_recursion(mask: int, k: int) -> int:
    """Alternating connected-subgraph recursion over induced vertex subsets."""
    adj = [0] * k
    for i in range(k):
        for j in range(i + 1, k):
            if mask >> _pair_bit(i, j, k) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i

    def has_edges(sub: int) -> bool:
        v = sub
        while v:
            i = (v & -v).bit_length() - 1
            if adj[i] & sub & ~(1 << i):
                return True
            v &= v - 1
        return False

    memo = {}

    def c(sub: int) -> int:
        if sub in memo:
            return memo[sub]
        if sub & (sub - 1) == 0:                       # single vertex
            memo[sub] = 1
            return 1
        root = 1 << ((sub & -sub).bit_length() - 1)
        total = 0 if has_edges(sub) else 1
        # subtract c(T) over subsets T with root in T != sub whose complement is edge-free
        rest = sub & ~root
        acc = 0
        t = rest
        while True:
            subset = t | root
            if subset != sub and not has_edges(sub & ~subset):
                acc += c(subset)
            if t == 0:
                break
            t = (t - 1) & rest
        val = total - acc
        memo[sub] = val
        return val

    return c((1 << k) - 1)


def ursell_phi(clusters, k: int | None = None) -> int:
    """Combinatorial weight of a tuple of clusters in the log-Z series.

    1 for a single cluster; otherwise the signed sum over connected graphs
    on the tuple whose edges are the pairwise support intersections.
    Direct enumeration is used up to k = 6 and the subset recursion beyond;
    k > 9 is rejected.
    """
    supports = [c.support if isinstance(c, ClusterSeq) else c for c in clusters]
    if k is None:
        k = len(supports)
    if k != len(supports) or k < 1:
        raise ValueError("k must equal the number of clusters and be >= 1")
    if k > URSELL_HARD_CAP:
        raise ValueError(f"k = {k} exceeds the hard cap {URSELL_HARD_CAP}")
    mask = overlap_mask(supports)
    if k <= URSELL_ENUMERATION_MAX:
        return _phi_enumeration(mask, k)
    return _phi_recursion(mask, k)


def _phi_from_mask(mask: int, k: int) -> int:
    if k == 1:
        return 1
    if k <= URSELL_ENUMERATION_MAX:
        return _phi_enumeration(mask, k)
    return _phi_recursion(mask, k)


# -- series ------------------------------------------------------------------

def _kept_clusters(interaction, beta, max_n, max_support):
    """Enumerate clusters and drop weights that vanish within roundoff."""
    kept = []
    for c in enumerate_clusters(interaction, None, max_n, max_support):
        w = weight(c, interaction, beta)
        bound = (abs(beta) ** c.n / math.factorial(c.n)
                 * math.prod(interaction.term_norm(x) for x in c.sets))
        if abs(w) > WEIGHT_DROP_RTOL * bound:
            kept.append((c, w))
    return kept


def _tuple_sum(kept, max_k):
    """sum_k (1/k!) sum over ordered k-tuples of phi * prod w, via multisets."""
    weights = [w for _, w in kept]
    supports = [frozenset(c.support) for c, _ in kept]
    m = len(kept)
    overlap = [[bool(supports[i] & supports[j]) for j in range(m)] for i in range(m)]
    per_k = []
    for k in range(1, max_k + 1):
        if k == 1:
            per_k.append(complex(sum(weights)))
            continue
        acc = 0.0 + 0.0j
        for combo in itertools.combinations_with_replacement(range(m), k):
            mask = 0
            for a in range(k):
                ca = combo[a]
                for b in range(a + 1, k):
                    if ca == combo[b] or overlap[ca][combo[b]]:
                        mask |= 1 << _pair_bit(a, b, k)
            if not _mask_connected(mask, k):
                continue
            phi = _phi_from_mask(mask, k)
            if phi == 0:
                continue
            mult = 1
            for _, grp in itertools.groupby(combo):
                mult *= math.factorial(sum(1 for _ in grp))
            w = phi / mult
            for c in combo:
                w *= weights[c]
            acc += w
        per_k.append(complex(acc))
    return per_k


@dataclass
class SeriesResult:
    value: float
    per_order: list[float]
    exact: float | None
    abs_error: float | None
    n_clusters: int
    n_kept: int


def log_z_series(interaction: Interaction, beta: float, max_k: int, max_n: int,
                 max_support: int | None = None,
                 compare_exact: bool = True) -> SeriesResult:
    """Truncated cluster series for log Z (normalized trace convention).

    Returns the per-k contributions and, when the volume is small enough
    for exact diagonalization, the exact log Z and the truncation error.
    """
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    kept = _kept_clusters(interaction, beta, max_n, max_support)
    n_total = sum(1 for _ in enumerate_clusters(interaction, None, max_n, max_support))
    per_k = _tuple_sum(kept, max_k)
    value = float(np.real(sum(per_k)))
    exact = None
    err = None
    if compare_exact and interaction.site_dim ** len(interaction.volume) <= DENSE_DIM_CAP:
        state = diagonalize(hamiltonian(interaction), beta, "normalized")
        exact = log_partition(state)
        err = abs(value - exact)
    return SeriesResult(value, [float(np.real(x)) for x in per_k],
                        exact, err, n_total, len(kept))


def expectation_series(a, a_support, interaction: Interaction, beta: float,
                       max_k: int, max_n: int, max_support: int | None = None,
                       compare_exact: bool = True) -> SeriesResult:
    """Truncated anchored cluster series for a Gibbs expectation <A>.

    The exponent attached to each anchored cluster is the re-centered
    log-Z series over tuples that intersect the anchored support,
    evaluated as (series avoiding the support) - (full series).
    """
    a = as_operator(a)
    anchor = as_site_set(a_support)
    kept = _kept_clusters(interaction, beta, max_n, max_support)
    s_all = sum(_tuple_sum(kept, max_k))
    avoid_cache: dict[tuple, complex] = {}
    total = 0.0 + 0.0j
    n_anchored = 0
    n_kept = 0
    for c in enumerate_clusters(interaction, anchor, max_n, max_support):
        n_anchored += 1
        w = weight_anchored(c, a, interaction, beta)
        bound = (abs(beta) ** c.n / math.factorial(c.n) * operator_norm(a)
                 * math.prod(interaction.term_norm(x) for x in c.sets))
        if abs(w) <= WEIGHT_DROP_RTOL * max(bound, 1e-300):
            continue
        n_kept += 1
        y = c.support
        if y not in avoid_cache:
            sub = [(cc, ww) for cc, ww in kept if not set(cc.support) & set(y)]
            avoid_cache[y] = sum(_tuple_sum(sub, max_k)) if sub else 0.0
        total += w * np.exp(avoid_cache[y] - s_all)
    value = float(np.real(total))
    exact = None
    err = None
    if compare_exact and interaction.site_dim ** len(interaction.volume) <= DENSE_DIM_CAP:
        state = diagonalize(hamiltonian(interaction), beta, "normalized")
        exact = float(np.real(expectation(
            state, embed(a, anchor, interaction.volume, interaction.site_dim))))
        err = abs(value - exact)
    return SeriesResult(value, [], exact, err, n_anchored, n_kept)


# -- summability certificates -------------------------------------------------

def as_decay_function(b):
    """Normalize a decay rule (scalar, dict keyed by site sets, or callable)."""
    if b is None:
        return lambda sites: 0.0
    if np.isscalar(b):
        val = float(b)
        if val < 0:
            raise ValueError("decay values must be nonnegative")
        return lambda sites: val
    if isinstance(b, dict):
        table = {as_site_set(k): float(v) for k, v in b.items()}
        if any(v < 0 for v in table.values()):
            raise ValueError("decay values must be nonnegative")
        return lambda sites: table[as_site_set(sites)]
    return lambda sites: float(b(sites))


R_M_MAX_ITER = 200
R_M_FIXED_POINT_TOL = 1e-14


@dataclass
class KpCertificate:
    holds: bool
    r_m_trace: list[float]
    variant: str
    a: float
    condition_lhs: float
    r_m_bounded: bool
    r_m_converged: bool


def kp_certificate(interaction: Interaction, beta: float, a: float,
                   b=None, variant: str = "plain") -> KpCertificate:
    """Summability certificate for the cluster series.

    plain: beta * ||Phi||_{e^a (1+a)} <= a.
    strengthened: beta * sup_x sum_{X ∋ x} ||Phi_X|| e^{(3/2) a |X| + b(X)} < a
    (strict), which feeds the correlation decay bound.

    Both variants also iterate the per-site recursion
    r <- beta * sup_x sum_X ||Phi_X|| W(X) (1 + r)^{|X|} from r = 0 and
    report its trace; for the plain variant the trace stays below a
    whenever the condition holds.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    decay = as_decay_function(b)
    if variant not in ("plain", "strengthened"):
        raise ValueError(f"unknown variant {variant!r}")

    def site_weight(x_set):
        if variant == "plain":
            return math.exp(a * len(x_set))
        return math.exp(1.5 * a * len(x_set) + decay(x_set))

    def r_map(r):
        sums = {x: 0.0 for x in interaction.volume}
        for x_set in interaction.terms:
            w = (interaction.term_norm(x_set) * site_weight(x_set)
                 * (1 + r) ** len(x_set))
            for x in x_set:
                sums[x] += w
        return beta * max(sums.values(), default=0.0)

    if variant == "plain":
        condition_lhs = r_map(a)
        holds = condition_lhs <= a
    else:
        condition_lhs = r_map(0.0)
        holds = condition_lhs < a

    trace = []
    r = 0.0
    converged = False
    for _ in range(R_M_MAX_ITER):
        new = r_map(r)
        trace.append(new)
        if abs(new - r) <= R_M_FIXED_POINT_TOL * max(1.0, abs(new)):
            converged = True
            r = new
            break
        r = new
        if r > 1e6:
            break
    bounded = all(v <= a + 1e-12 for v in trace)
    return KpCertificate(holds, trace, variant, a, condition_lhs, bounded, converged)


# -- chain distance and the decay bound ---------------------------------------

def chain_distance(x_set, y_set, interaction: Interaction, b) -> float:
    """Minimal accumulated decay cost over chains of overlapping supports.

    Chains run X = X_0, X_1, ..., X_n, X_{n+1} = Y with consecutive
    nonempty intersections and cost b(X_1) + ... + b(X_n); intersecting
    endpoints give 0 (empty chain) and +inf means no chain exists.
    """
    x_set = frozenset(as_site_set(x_set))
    y_set = frozenset(as_site_set(y_set))
    if x_set & y_set:
        return 0.0
    decay = as_decay_function(b)
    supports = list(interaction.terms)
    fsets = [frozenset(s) for s in supports]
    costs = [decay(s) for s in supports]
    if any(c < 0 for c in costs):
        raise ValueError("decay values must be nonnegative")
    dist = {i: costs[i] for i, f in enumerate(fsets) if f & x_set}
    heap = [(d, i) for i, d in dist.items()]
    heapq.heapify(heap)
    best = math.inf
    while heap:
        d, i = heapq.heappop(heap)
        if d > dist.get(i, math.inf):
            continue
        if fsets[i] & y_set:
            best = min(best, d)
            continue
        for j, f in enumerate(fsets):
            if f & fsets[i]:
                nd = d + costs[j]
                if nd < dist.get(j, math.inf):
                    dist[j] = nd
                    heapq.heappush(heap, (nd, j))
    return best


@dataclass
class DecayBoundReport:
    bound: float
    measured: float
    holds: bool
    mu: float
    k_ab: float
    certificate: KpCertificate


def decay_bound(a_op, a_support, b_op, b_support, interaction: Interaction,
                beta: float, a: float, b) -> DecayBoundReport:
    """Two-point decay bound |<AB> - <A><B>| <= k(A,B) e^{-mu(supp A, supp B)}.

    Requires the strengthened summability certificate for (a, b); the
    measured side is the exact truncated correlation from full
    diagonalization.
    """
    cert = kp_certificate(interaction, beta, a, b, variant="strengthened")
    if not cert.holds:
        raise CertificateNotEstablishedError(
            "strengthened summability condition fails; the decay bound "
            "is not claimed at these parameters")
    a_op = as_operator(a_op)
    b_op = as_operator(b_op)
    a_sites = as_site_set(a_support)
    b_sites = as_site_set(b_support)
    mu = chain_distance(a_sites, b_sites, interaction, b)
    k_ab = (operator_norm(a_op) * operator_norm(b_op)
            * (a * len(a_sites) + a * len(b_sites)
               + 3 * a ** 2 * len(a_sites) * len(b_sites)))
    bound = k_ab * math.exp(-mu) if mu != math.inf else 0.0
    dim = interaction.site_dim ** len(interaction.volume)
    if dim > DENSE_DIM_CAP:
        raise DimensionCapError("volume too large for the exact comparison")
    state = diagonalize(hamiltonian(interaction), beta)
    a_full = embed(a_op, a_sites, interaction.volume, interaction.site_dim)
    b_full = embed(b_op, b_sites, interaction.volume, interaction.site_dim)
    measured = abs(truncated_correlation(state, a_full, b_full))
    return DecayBoundReport(bound, measured, measured <= bound, mu, k_ab, cert)
