"""Independent oracles for cross-checking the library's algorithms.

Everything here is deliberately naive (enumeration, recursion, permutation
scans) and shares no code with the implementations under test.
"""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from bireg import GraphParams, InducedSubgraph, induce, sample_pairing, validate_params


def brute_max_matching_size(adj, n_b: int) -> int:
    """Maximum matching size by exhaustive recursion over A-vertices."""

    def rec(i: int, used: frozenset) -> int:
        if i == len(adj):
            return 0
        best = rec(i + 1, used)
        for j in adj[i]:
            if j not in used:
                best = max(best, 1 + rec(i + 1, used | {j}))
        return best

    return rec(0, frozenset())


def exhaustive_problematic_scan(graph: InducedSubgraph):
    """First (S, T) with |S| + |T| = |A| + 1 and no S->T edges, by full scan."""
    na, nb = graph.n_a, graph.n_b
    for s_size in range(1, na + 1):
        t_size = na + 1 - s_size
        if t_size < 1 or t_size > nb:
            continue
        for s_set in combinations(range(na), s_size):
            reached = set()
            for i in s_set:
                reached.update(graph.adj[i])
            pool = [j for j in range(nb) if j not in reached]
            if len(pool) >= t_size:
                return frozenset(s_set), frozenset(pool[:t_size])
    return None


def saturating_matching_exists(sub: InducedSubgraph) -> bool:
    """Is there a matching covering every B-vertex?  Permutation scan."""
    na, nb = sub.n_a, sub.n_b
    if nb == 0:
        return True
    if na < nb:
        return False
    for assign in permutations(range(na), nb):
        if all(sub.has_edge(assign[j], j) for j in range(nb)):
            return True
    return False


def random_equal_induced_subgraph(rng: np.random.Generator, max_side: int = 8):
    """Random (graph, induced subgraph) with |A| = |B| <= max_side.

    Degrees stay small so the rejection sampler accepts quickly."""
    n = int(rng.integers(2, 9))
    d = int(rng.integers(1, min(n, 3) + 1))
    params = validate_params(1, 1, n, d)
    graph = sample_pairing(params, int(rng.integers(2**63)))
    size = int(rng.integers(1, min(max_side, n) + 1))
    a = sorted(rng.choice(n, size=size, replace=False).tolist())
    b = sorted(rng.choice(params.kn, size=size, replace=False).tolist())
    return graph, induce(graph, a, b)


def degree_scan(graph) -> bool:
    """Direct biregularity re-check, independent of the constructor."""
    params: GraphParams = graph.params
    out = np.asarray(graph.out)
    if out.shape != (params.n, params.kd):
        return False
    for row in out:
        if len(set(row.tolist())) != params.kd:
            return False
        if any(not 0 <= z < params.kn for z in row.tolist()):
            return False
    counts = [0] * params.kn
    for row in out:
        for z in row.tolist():
            counts[z] += 1
    return all(c == params.d for c in counts)
