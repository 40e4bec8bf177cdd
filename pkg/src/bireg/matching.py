"""Maximum matching and Frobenius-Konig counter-witnesses on induced subgraphs.

has_perfect_matching and find_problematic_pair are two sides of the same
coin: a bipartite graph with |A| = |B| has no perfect matching exactly when
there are non-empty S subset A, T subset B with |S| + |T| = |A| + 1 and no
edges from S to T.  All indices below are local to the queried subgraph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import UnequalSides
from .graph import InducedSubgraph


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint edges, as (a-index, b-index) pairs in local indices."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class ProblematicPair:
    """Witness that no perfect matching exists: |S| + |T| = |A| + 1 and no S->T edges."""

    s_set: frozenset[int]
    t_set: frozenset[int]

    def verify(self, graph: InducedSubgraph) -> bool:
        """Re-check the three defining invariants against the graph."""
        if not self.s_set or not self.t_set:
            return False
        if len(self.s_set) + len(self.t_set) != graph.n_a + 1:
            return False
        reached = set()
        for i in self.s_set:
            reached.update(graph.adj[i])
        return not (reached & self.t_set)


def max_matching(graph: InducedSubgraph) -> Matching:
    """Maximum-cardinality matching via Hopcroft-Karp (layered BFS + DFS phases)."""
    match_a, match_b = _hopcroft_karp(graph)
    pairs = tuple(
        (i, match_a[i]) for i in range(graph.n_a) if match_a[i] >= 0
    )
    return Matching(pairs)


def _hopcroft_karp(graph: InducedSubgraph) -> tuple[list[int], list[int]]:
    na, nb = graph.n_a, graph.n_b
    adj = graph.adj
    match_a = [-1] * na
    match_b = [-1] * nb
    # greedy warm start
    for u in range(na):
        for v in adj[u]:
            if match_b[v] < 0:
                match_a[u] = v
                match_b[v] = u
                break
    INF = na + nb + 1
    dist = [0] * na

    def bfs() -> int:
        q = deque()
        for u in range(na):
            if match_a[u] < 0:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        free_dist = INF
        while q:
            u = q.popleft()
            if dist[u] >= free_dist:
                continue
            for v in adj[u]:
                w = match_b[v]
                if w < 0:
                    free_dist = min(free_dist, dist[u] + 1)
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return free_dist

    def dfs(u: int, free_dist: int) -> bool:
        for v in adj[u]:
            w = match_b[v]
            if w < 0:
                if dist[u] + 1 != free_dist:
                    continue
            elif dist[w] != dist[u] + 1 or not dfs(w, free_dist):
                continue
            match_a[u] = v
            match_b[v] = u
            return True
        dist[u] = INF
        return False

    while True:
        free_dist = bfs()
        if free_dist >= INF:
            return match_a, match_b
        for u in range(na):
            if match_a[u] < 0:
                dfs(u, free_dist)


def has_perfect_matching(graph: InducedSubgraph) -> bool:
    """True iff a matching saturates both (equal-sized) sides."""
    if graph.n_a != graph.n_b:
        raise UnequalSides(f"|A| = {graph.n_a} != |B| = {graph.n_b}")
    return max_matching(graph).size == graph.n_a


def find_problematic_pair(graph: InducedSubgraph) -> ProblematicPair | None:
    """A verified witness when no perfect matching exists, else None.

    From a maximum matching let U be the unmatched A-vertices and S the
    A-vertices reachable from U along alternating paths; then the B-image of
    S is fully matched and smaller than S, and T is the lexicographically
    first subset of the remaining B-vertices of the complementary size.
    """
    if graph.n_a != graph.n_b:
        raise UnequalSides(f"|A| = {graph.n_a} != |B| = {graph.n_b}")
    match_a, match_b = _hopcroft_karp(graph)
    unmatched = [u for u in range(graph.n_a) if match_a[u] < 0]
    if not unmatched:
        return None
    # alternating-path reachability: free A-vertex -> any edge -> matched back-edge
    seen_a = set(unmatched)
    seen_b: set[int] = set()
    stack = list(unmatched)
    while stack:
        u = stack.pop()
        for v in graph.adj[u]:
            if v in seen_b:
                continue
            seen_b.add(v)
            w = match_b[v]
            if w >= 0 and w not in seen_a:
                seen_a.add(w)
                stack.append(w)
    t_size = graph.n_a + 1 - len(seen_a)
    t_pool = [v for v in range(graph.n_b) if v not in seen_b]
    witness = ProblematicPair(frozenset(seen_a), frozenset(t_pool[:t_size]))
    assert witness.verify(graph)
    return witness
