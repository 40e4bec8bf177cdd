"""Random layered graphs, commutativity certification, and magnification ratios.

A layered digraph is commutative when, for every edge uv between consecutive
layers, the next layer matches the whole neighborhood of v injectively into
the neighborhood of u (upward condition), and dually for in-neighborhoods
(downward condition).  For commutative graphs the magnification ratios
D_i = min_{Z nonempty} |Gamma^(i)(Z)| / |Z| satisfy the Plunnecke
inequality: D_i^{1/i} is non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from . import _kernels
from .errors import (
    EdgeAbsent,
    InvalidDegree,
    LayerOutOfRange,
    NonIntegralLayer,
    NonPositiveValue,
    TooLarge,
)
from .graph import LayeredGraph
from .matching import max_matching
from .params import validate_params
from .sampler import SamplerMethod, sample_graph
from .seeds import mix64

#: brute-force magnification is limited to bottom layers at most this big
BRUTEFORCE_MAX_X0 = 20


@dataclass(frozen=True)
class CommutativityReport:
    commutative: bool
    upward_violations: tuple[tuple[int, int, int], ...]  # (layer, u, v)
    downward_violations: tuple[tuple[int, int, int], ...]
    edges_checked: int
    sampled: bool = False

    def to_dict(self) -> dict:
        return {
            "commutative": self.commutative,
            "upward_violations": [list(v) for v in self.upward_violations],
            "downward_violations": [list(v) for v in self.downward_violations],
            "edges_checked": self.edges_checked,
            "sampled": self.sampled,
        }


@dataclass(frozen=True)
class MagnificationResult:
    i: int
    value: Fraction
    witness: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "value": {"p": self.value.numerator, "q": self.value.denominator},
            "float": float(self.value),
            "witness": list(self.witness),
        }


def build_random_layered(
    k: Fraction | int,
    m: int,
    d: int,
    h: int,
    seed: int,
    method: SamplerMethod | None = None,
) -> LayeredGraph:
    """Stack h independent random biregular layers; layer i has left side of
    size k^{i-1} m (all sizes must be integral).

    Layer seeds derive from (seed, layer index), so a fixed seed fixes the
    whole stack.
    """
    k = Fraction(k)
    if k < 1:
        raise InvalidDegree(f"k must be >= 1, got {k}")
    if h < 1:
        raise LayerOutOfRange(f"h must be >= 1, got {h}")
    sizes = [m]
    for i in range(1, h + 1):
        size_i = k**i * m
        if size_i.denominator != 1:
            raise NonIntegralLayer(f"|X_{i}| = k^{i} m = {size_i} is not an integer")
        sizes.append(int(size_i))
    if not 2 <= d <= m:
        raise InvalidDegree(f"d = {d} outside 2..m = {m}")
    if k * d > m:
        raise InvalidDegree(f"kd = {k * d} exceeds m = {m}")
    if (k * d).denominator != 1:
        raise InvalidDegree(f"kd = {k * d} is not an integer")
    if method is None:
        method = SamplerMethod.switch_chain()
    layers = []
    for i in range(1, h + 1):
        params_i = validate_params(k.numerator, k.denominator, sizes[i - 1], d)
        layers.append(sample_graph(params_i, method, mix64(seed, i)))
    return LayeredGraph.from_graphs(layers)


def check_edge_condition(
    graph: LayeredGraph, layer_i: int, u: int, v: int, direction: str = "upward"
) -> bool:
    """Single-edge commutativity condition for the edge u->v of layer layer_i.

    upward: does the next layer match all of Gamma(v) from within Gamma(u)?
    downward: the dual on in-neighborhoods, evaluated by reversing the graph
    and reusing the upward path.
    """
    if direction not in ("upward", "downward"):
        raise ValueError(f"direction must be 'upward' or 'downward', got {direction!r}")
    h = graph.h
    if not 1 <= layer_i <= h:
        raise LayerOutOfRange(f"layer {layer_i} outside 1..{h}")
    if not graph.edge_in_layer(layer_i, u, v):
        raise EdgeAbsent(f"edge {u}->{v} not in layer {layer_i}")
    if direction == "downward":
        if layer_i < 2:
            raise LayerOutOfRange("downward condition needs layer >= 2")
        return check_edge_condition(graph.reverse(), h - layer_i + 1, v, u, "upward")
    if layer_i > h - 1:
        raise LayerOutOfRange("upward condition needs layer <= h-1")
    gamma_u = [int(x) for x in graph.block(layer_i).row(u)]
    gamma_v = [int(w) for w in graph.block(layer_i + 1).row(v)]
    sub = graph.induce_layer(layer_i + 1, gamma_u, gamma_v)
    if len(gamma_u) < len(gamma_v):
        return False
    matched_b = {b for _, b in max_matching(sub).pairs}
    return len(matched_b) == len(gamma_v)


def _certify_upward(graph: LayeredGraph, sample_edges, rng) -> list[tuple[int, int, int]]:
    """Bulk upward certification over layers 1..h-1 (compiled matcher)."""
    violations: list[tuple[int, int, int]] = []
    for i in range(1, graph.h):
        blk_a = graph.block(i)
        blk_b = graph.block(i + 1)
        if sample_edges is None:
            at_indptr, at_indices = blk_a.t_indptr, blk_a.t_indices
            n_checked = blk_a.edge_count
        else:
            at_indptr, at_indices, n_checked = _sampled_transpose(
                blk_a, sample_edges, rng
            )
        viol_u = np.empty(n_checked, dtype=np.int64)
        viol_v = np.empty(n_checked, dtype=np.int64)
        count = _kernels.certify_upward_layer(
            blk_a.indptr,
            blk_a.indices,
            at_indptr,
            at_indices,
            blk_b.indptr,
            blk_b.indices,
            blk_a.n_to,
            blk_b.n_to,
            viol_u,
            viol_v,
        )
        violations.extend(
            (i, int(viol_u[j]), int(viol_v[j])) for j in range(count)
        )
    return violations


def _sampled_transpose(blk, sample_edges: int, rng) -> tuple[np.ndarray, np.ndarray, int]:
    """Transpose CSR restricted to a uniform random edge subset (pairs to check)."""
    total = blk.edge_count
    take = min(sample_edges, total)
    chosen = rng.choice(total, size=take, replace=False) if take < total else np.arange(total)
    # positions index the transpose edge list (v-major), which keeps CSR order
    chosen.sort()
    t_v = np.searchsorted(blk.t_indptr, chosen, side="right") - 1
    indptr = np.concatenate(([0], np.cumsum(np.bincount(t_v, minlength=blk.n_to))))
    return indptr.astype(np.int64), blk.t_indices[chosen], take


def check_commutative(
    graph: LayeredGraph, sample_edges: int | None = None, seed: int = 0
) -> CommutativityReport:
    """Certify all upward and downward conditions, aggregating every violation.

    Edges exist only between consecutive layers by construction of the type,
    so the structural condition holds; the two matching conditions are
    checked on every applicable edge (or on a uniform sample of
    `sample_edges` per layer and condition, reported as sampled).
    """
    rng = np.random.default_rng(seed)
    up = _certify_upward(graph, sample_edges, rng)
    rev = graph.reverse()
    h = graph.h
    down_rev = _certify_upward(rev, sample_edges, rng)
    down = sorted((h - j + 1, q, p) for (j, p, q) in down_rev)
    checked = 0
    for i in range(1, h):
        layer_edges = graph.block(i).edge_count
        checked += layer_edges if sample_edges is None else min(sample_edges, layer_edges)
    for i in range(2, h + 1):
        layer_edges = graph.block(i).edge_count
        checked += layer_edges if sample_edges is None else min(sample_edges, layer_edges)
    return CommutativityReport(
        commutative=not up and not down,
        upward_violations=tuple(sorted(up)),
        downward_violations=tuple(down),
        edges_checked=checked,
        sampled=sample_edges is not None,
    )


def _reach_matrix(graph: LayeredGraph, i: int) -> np.ndarray:
    """Boolean |X_0| x |X_i| matrix of i-step reachability."""
    if not 1 <= i <= graph.h:
        raise LayerOutOfRange(f"i = {i} outside 1..{graph.h}")
    p0 = graph.layer_sizes[0]
    reach = np.eye(p0, dtype=bool)
    for j in range(i):
        blk = graph.block(j + 1)
        dense = np.zeros((blk.n_from, blk.n_to), dtype=bool)
        dense[
            np.repeat(
                np.arange(blk.n_from), np.diff(blk.indptr).astype(np.int64)
            ),
            blk.indices,
        ] = True
        reach = (reach.astype(np.int32) @ dense.astype(np.int32)) > 0
    return reach


def magnification_bruteforce(graph: LayeredGraph, i: int) -> MagnificationResult:
    """Exact D_i by scanning all nonempty subsets of X_0 (bitset DP).

    Ties are broken toward the lexicographically first witness (as a sorted
    index tuple).
    """
    p0 = graph.layer_sizes[0]
    if p0 > BRUTEFORCE_MAX_X0:
        raise TooLarge(f"|X_0| = {p0} exceeds {BRUTEFORCE_MAX_X0}")
    reach = _reach_matrix(graph, i)
    single = [int.from_bytes(np.packbits(row).tobytes(), "big") for row in reach]
    dp = [0] * (1 << p0)
    best_num, best_den = -1, 1
    best_mask = 0
    for mask in range(1, 1 << p0):
        low = mask & -mask
        dp[mask] = dp[mask ^ low] | single[low.bit_length() - 1]
        num = dp[mask].bit_count()
        den = mask.bit_count()
        if best_num < 0 or num * best_den < best_num * den:
            best_num, best_den, best_mask = num, den, mask
        elif num * best_den == best_num * den:
            if _mask_tuple(mask) < _mask_tuple(best_mask):
                best_num, best_den, best_mask = num, den, mask
    return MagnificationResult(i, Fraction(best_num, best_den), _mask_tuple(best_mask))


def _mask_tuple(mask: int) -> tuple[int, ...]:
    return tuple(b for b in range(mask.bit_length()) if mask >> b & 1)


def _min_cut_value_and_source_side(
    p: int, q: int, reach: np.ndarray, want_witness: bool = False
) -> tuple[int, np.ndarray | None]:
    """Min cut of the parametric network at ratio t = p/q, scaled by q.

    source -> x (capacity p) for each x in X_0; x -> w (infinite) for each
    reachable target w; w -> sink (capacity q).  The cut value minus
    p |X_0| equals q * min_Z (|Gamma^(i)(Z)| - t |Z|) over all Z including
    the empty set.  With want_witness the maximal-minimizer source side
    restricted to X_0 is extracted from the residual graph.
    """
    p0, _ = reach.shape
    used = np.where(reach.any(axis=0))[0]
    r = used.shape[0]
    n_nodes = 2 + p0 + r
    src, sink = 0, n_nodes - 1
    big = p * p0 + q * r + 1
    col_of = np.full(reach.shape[1], -1, dtype=np.int64)
    col_of[used] = 1 + p0 + np.arange(r)
    xs, ws = np.nonzero(reach)
    rows = np.concatenate(
        (
            np.zeros(p0 if p > 0 else 0, dtype=np.int64),
            1 + xs.astype(np.int64),
            1 + p0 + np.arange(r, dtype=np.int64),
        )
    )
    cols = np.concatenate(
        (
            1 + np.arange(p0 if p > 0 else 0, dtype=np.int64),
            col_of[ws],
            np.full(r, sink, dtype=np.int64),
        )
    )
    data = np.concatenate(
        (
            np.full(p0 if p > 0 else 0, p, dtype=np.int64),
            np.full(xs.shape[0], big, dtype=np.int64),
            np.full(r, q, dtype=np.int64),
        )
    )
    cap = csr_matrix((data, (rows, cols)), shape=(n_nodes, n_nodes)).astype(np.int32)
    result = maximum_flow(cap, src, sink)
    if not want_witness:
        return int(result.flow_value), None
    residual = cap.toarray().astype(np.int64) - result.flow.toarray().astype(np.int64)
    # vertices that reach the sink in the residual graph; their complement is
    # the maximal min-cut source side
    can_reach = np.zeros(n_nodes, dtype=bool)
    can_reach[sink] = True
    res_pos = residual > 0
    while True:
        grown = can_reach | res_pos[:, can_reach].any(axis=1)
        if (grown == can_reach).all():
            break
        can_reach = grown
    source_side_x0 = ~can_reach[1 : 1 + p0]
    return int(result.flow_value), source_side_x0


def magnification_flow(graph: LayeredGraph, i: int) -> MagnificationResult:
    """Exact D_i via parametric minimum cut.

    Candidate ratios are p/q with 1 <= q <= |X_0| and 0 <= p <= the total
    reach; "D_i >= t" is monotone in t and tested by an integer-capacity cut
    (capacities scaled by the denominator), located by binary search over
    the sorted candidates.  The witness is the maximal tight set at the
    optimum, whose ratio equals the value exactly.
    """
    reach = _reach_matrix(graph, i)
    p0 = reach.shape[0]
    p_max = int(reach.any(axis=0).sum())
    qs = np.arange(1, p0 + 1, dtype=np.int64)
    ps = np.arange(0, p_max + 1, dtype=np.int64)
    cand_p = np.repeat(ps, qs.shape[0])
    cand_q = np.tile(qs, ps.shape[0])
    order = np.argsort(cand_p / cand_q, kind="stable")
    cand_p, cand_q = cand_p[order], cand_q[order]

    def feasible(idx: int) -> bool:
        p, q = int(cand_p[idx]), int(cand_q[idx])
        value, _ = _min_cut_value_and_source_side(p, q, reach)
        return value == p * p0

    lo, hi = 0, cand_p.shape[0] - 1  # t=0 is always feasible
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid - 1
    p_star, q_star = int(cand_p[lo]), int(cand_q[lo])
    _, source_x0 = _min_cut_value_and_source_side(p_star, q_star, reach, want_witness=True)
    witness = tuple(int(x) for x in np.where(source_x0)[0])
    value = Fraction(p_star, q_star)
    got = Fraction(int(reach[list(witness)].any(axis=0).sum()), len(witness))
    assert got == value, f"witness ratio {got} != {value}"
    return MagnificationResult(i, value, witness)


def plunnecke_monotone_check(values) -> bool:
    """True iff D_i^{1/i} is non-increasing, by exact cross-power comparison
    D_i^{i+1} >= D_{i+1}^{i} on big integers (no floating point)."""
    fracs = [Fraction(v) for v in values]
    if any(v <= 0 for v in fracs):
        raise NonPositiveValue(f"all values must be positive, got {fracs}")
    for idx in range(len(fracs) - 1):
        i = idx + 1
        a, b = fracs[idx], fracs[idx + 1]
        lhs = a.numerator ** (i + 1) * b.denominator**i
        rhs = b.numerator**i * a.denominator ** (i + 1)
        if lhs < rhs:
            return False
    return True
