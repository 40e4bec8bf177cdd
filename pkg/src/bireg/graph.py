"""Bipartite and layered digraph values.

All types are immutable after construction and safe to share across
workers.  Vertex identity is positional: side Y is indexed 0..n-1 and side
Z is 0..kn-1; layered graphs index each layer from 0 independently.

Biregular graphs store adjacency as an (n, kd) integer array with sorted
rows plus the eagerly-built (kn, d) transpose; membership tests are binary
searches.  Layered graphs store one CSR block per layer gap so ragged
(non-biregular) hand-built layers are representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeViolation,
    DirectionUnavailable,
    EmptySide,
    IndexOutOfRange,
    NonIntegerK,
    PreconditionViolated,
)
from .params import GraphParams


@dataclass(frozen=True)
class DegreeSummary:
    delta_out: int
    delta_in: int
    delta: int


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class BipartiteDigraph:
    """One biregular layer Y -> Z: every y has kd out-neighbors, every z has d in-neighbors.

    `out[y]` is the sorted array of out-neighbors of y; `inn[z]` the sorted
    in-neighbors of z.
    """

    __slots__ = ("params", "out", "inn")

    def __init__(self, params: GraphParams, out_adj) -> None:
        out = np.asarray(out_adj, dtype=np.int32)
        if out.ndim != 2 or out.shape[0] != params.n:
            raise DegreeViolation(
                f"expected {params.n} out-lists, got shape {out.shape}"
            )
        if out.shape[1] != params.kd:
            raise DegreeViolation(
                f"out-degree {out.shape[1]} != kd = {params.kd}"
            )
        if out.size and (out.min() < 0 or out.max() >= params.kn):
            bad = int(out.min()) if out.min() < 0 else int(out.max())
            raise IndexOutOfRange(f"neighbor index {bad} outside 0..{params.kn - 1}")
        if params.kd > 1 and not (np.diff(out, axis=1) > 0).all():
            y = int(np.where((np.diff(out, axis=1) <= 0).any(axis=1))[0][0])
            raise DegreeViolation(f"vertex y{y}: neighbors not sorted/distinct")
        indeg = np.bincount(out.ravel(), minlength=params.kn)
        if (indeg != params.d).any():
            z = int(np.where(indeg != params.d)[0][0])
            raise DegreeViolation(
                f"vertex z{z}: in-degree {int(indeg[z])} != d = {params.d}"
            )
        self.params = params
        self.out = _freeze(out)
        self.inn = _freeze(_biregular_transpose(out, params.kn, params.d))

    @classmethod
    def _trusted(cls, params: GraphParams, out: np.ndarray) -> "BipartiteDigraph":
        """Skip the invariant scan; for callers that preserve biregularity by construction."""
        g = cls.__new__(cls)
        g.params = params
        g.out = _freeze(np.ascontiguousarray(out, dtype=np.int32))
        g.inn = _freeze(_biregular_transpose(g.out, params.kn, params.d))
        return g

    @property
    def n_left(self) -> int:
        return self.params.n

    @property
    def n_right(self) -> int:
        return self.params.kn

    @property
    def out_adj(self) -> tuple[tuple[int, ...], ...]:
        """Adjacency as nested tuples (small graphs / tests)."""
        return tuple(tuple(int(z) for z in row) for row in self.out)

    def has_edge(self, y: int, z: int) -> bool:
        row = self.out[y]
        i = int(np.searchsorted(row, z))
        return i < row.shape[0] and row[i] == z

    def out_neighbors(self, y: int) -> np.ndarray:
        return self.out[y]

    def in_neighbors(self, z: int) -> np.ndarray:
        return self.inn[z]

    def key(self) -> bytes:
        """Canonical hashable identity (the sorted adjacency rows)."""
        return self.out.tobytes()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BipartiteDigraph)
            and self.params == other.params
            and np.array_equal(self.out, other.out)
        )

    def __hash__(self) -> int:
        return hash((self.params, self.key()))

    def __repr__(self) -> str:
        return f"BipartiteDigraph({self.params}, edges={self.params.edge_count})"


def _biregular_transpose(out: np.ndarray, kn: int, d: int) -> np.ndarray:
    """(kn, d) in-adjacency from (n, kd) out-adjacency; rows come out sorted."""
    n, kd = out.shape
    order = np.argsort(out.ravel(), kind="stable")
    ys = np.repeat(np.arange(n, dtype=np.int32), kd)[order]
    return ys.reshape(kn, d)


def circulant_graph(params: GraphParams) -> BipartiteDigraph:
    """Cyclic member of the family for integer k.

    Z is identified with the integers mod kn and Y with the subgroup
    {0, k, 2k, ...}; y has an edge to z exactly when z - y falls in
    {0, ..., kd-1} mod kn.
    """
    if params.k_den != 1:
        raise NonIntegerK(
            f"circulant construction needs integer k, got {params.k_num}/{params.k_den}"
        )
    k, kn, kd, n = params.k_num, params.kn, params.kd, params.n
    out = (np.arange(n, dtype=np.int64)[:, None] * k + np.arange(kd)[None, :]) % kn
    out = np.sort(out.astype(np.int32), axis=1)
    return BipartiteDigraph(params, out)


def block_cyclic_graph(params: GraphParams) -> BipartiteDigraph:
    """Deterministic member for arbitrary rational k: y covers the kd
    consecutive targets starting at y*kd mod kn (the runs tile Z evenly)."""
    kn, kd, n = params.kn, params.kd, params.n
    out = (np.arange(n, dtype=np.int64)[:, None] * kd + np.arange(kd)[None, :]) % kn
    out = np.sort(out.astype(np.int32), axis=1)
    return BipartiteDigraph(params, out)


class InducedSubgraph:
    """Restriction of a bipartite adjacency to (A, B) with parent back-references.

    a_vertices/b_vertices keep the caller's order; `adj` uses local positions
    (row i lists local B-indices, sorted).
    """

    __slots__ = ("a_vertices", "b_vertices", "adj", "in_adj")

    def __init__(
        self,
        a_vertices: Sequence[int],
        b_vertices: Sequence[int],
        adj: Sequence[Sequence[int]],
    ):
        self.a_vertices = tuple(int(v) for v in a_vertices)
        self.b_vertices = tuple(int(v) for v in b_vertices)
        self.adj = tuple(tuple(int(j) for j in row) for row in adj)
        rev: list[list[int]] = [[] for _ in range(len(self.b_vertices))]
        for i, row in enumerate(self.adj):
            for j in row:
                rev[j].append(i)
        self.in_adj = tuple(tuple(r) for r in rev)

    @property
    def n_a(self) -> int:
        return len(self.a_vertices)

    @property
    def n_b(self) -> int:
        return len(self.b_vertices)

    @property
    def edge_count(self) -> int:
        return sum(len(r) for r in self.adj)

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adj[i]

    def parent_edges(self) -> list[tuple[int, int]]:
        """Edges as (parent a-id, parent b-id) pairs."""
        return [
            (self.a_vertices[i], self.b_vertices[j])
            for i, row in enumerate(self.adj)
            for j in row
        ]

    def __repr__(self) -> str:
        return f"InducedSubgraph(|A|={self.n_a}, |B|={self.n_b}, edges={self.edge_count})"


def _induce(rows, n_left: int, n_right: int, a: Sequence[int], b: Sequence[int]) -> InducedSubgraph:
    """Shared induction core; `rows(u)` yields the out-neighbors of u."""
    a = [int(v) for v in a]
    b = [int(v) for v in b]
    for v in a:
        if not 0 <= v < n_left:
            raise IndexOutOfRange(f"A-vertex {v} outside 0..{n_left - 1}")
    for v in b:
        if not 0 <= v < n_right:
            raise IndexOutOfRange(f"B-vertex {v} outside 0..{n_right - 1}")
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise IndexOutOfRange("A and B must not contain duplicates")
    bmap = {z: j for j, z in enumerate(b)}
    adj = [sorted(bmap[z] for z in map(int, rows(v)) if z in bmap) for v in a]
    return InducedSubgraph(a, b, adj)


def induce(graph: BipartiteDigraph, a: Iterable[int], b: Iterable[int]) -> InducedSubgraph:
    """Subgraph induced on (A, B): exactly the parent edges with both ends inside."""
    return _induce(
        lambda y: graph.out[y], graph.n_left, graph.n_right, list(a), list(b)
    )


class _CsrBlock:
    """One layer gap as CSR plus its transpose."""

    __slots__ = ("indptr", "indices", "t_indptr", "t_indices", "n_from", "n_to")

    def __init__(self, n_from: int, n_to: int, rows: Sequence[Sequence[int]] | None = None,
                 indptr: np.ndarray | None = None, indices: np.ndarray | None = None):
        self.n_from = n_from
        self.n_to = n_to
        if rows is not None:
            lens = np.fromiter((len(r) for r in rows), dtype=np.int64, count=n_from)
            indptr = np.concatenate(([0], np.cumsum(lens)))
            flat: list[int] = []
            for u, row in enumerate(rows):
                prev = -1
                for v in row:
                    v = int(v)
                    if not 0 <= v < n_to:
                        raise IndexOutOfRange(f"edge {u}->{v} outside 0..{n_to - 1}")
                    if v <= prev:
                        raise DegreeViolation(f"row {u} not sorted/distinct at {v}")
                    prev = v
                    flat.append(v)
            indices = np.asarray(flat, dtype=np.int32)
        self.indptr = _freeze(np.asarray(indptr, dtype=np.int64))
        self.indices = _freeze(np.asarray(indices, dtype=np.int32))
        order = np.argsort(self.indices, kind="stable")
        src = np.repeat(
            np.arange(n_from, dtype=np.int32), np.diff(self.indptr).astype(np.int64)
        )
        self.t_indices = _freeze(src[order])
        self.t_indptr = _freeze(
            np.concatenate(([0], np.cumsum(np.bincount(self.indices, minlength=n_to))))
        )

    def row(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def t_row(self, v: int) -> np.ndarray:
        return self.t_indices[self.t_indptr[v] : self.t_indptr[v + 1]]

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0])

    def rows_tuple(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(int(v) for v in self.row(u)) for u in range(self.n_from)
        )


class LayeredGraph:
    """Stacked layers X_0 ... X_h with edges only between consecutive layers.

    Layer i (1-based) is the block X_{i-1} -> X_i.  Layers need not be
    biregular, so hand-built counterexamples are representable; model-built
    instances carry their (k, d) metadata for serialization.
    """

    __slots__ = ("layer_sizes", "blocks", "k_num", "k_den", "d")

    def __init__(
        self,
        layer_sizes: Sequence[int],
        layer_adj: Sequence,
        k_num: int | None = None,
        k_den: int | None = None,
        d: int | None = None,
    ):
        sizes = tuple(int(s) for s in layer_sizes)
        if len(sizes) != len(layer_adj) + 1:
            raise IndexOutOfRange(
                f"{len(sizes)} layer sizes need {len(sizes) - 1} adjacency blocks, got {len(layer_adj)}"
            )
        if any(s < 1 for s in sizes):
            raise IndexOutOfRange("layer sizes must be positive")
        blocks = []
        for i, block in enumerate(layer_adj):
            if isinstance(block, _CsrBlock):
                blocks.append(block)
                continue
            if len(block) != sizes[i]:
                raise IndexOutOfRange(
                    f"layer {i + 1}: {len(block)} rows for |X_{i}| = {sizes[i]}"
                )
            blocks.append(_CsrBlock(sizes[i], sizes[i + 1], rows=block))
        for i, blk in enumerate(blocks):
            if blk.n_from != sizes[i] or blk.n_to != sizes[i + 1]:
                raise IndexOutOfRange(f"layer {i + 1}: block shape mismatch")
        self.layer_sizes = sizes
        self.blocks = tuple(blocks)
        self.k_num = k_num
        self.k_den = k_den
        self.d = d

    @classmethod
    def from_graphs(cls, graphs: Sequence[BipartiteDigraph]) -> "LayeredGraph":
        """Stack biregular layers; consecutive sizes must chain (|Z_i| = |Y_{i+1}|)."""
        if not graphs:
            raise IndexOutOfRange("at least one layer required")
        sizes = [graphs[0].n_left]
        blocks = []
        for i, g in enumerate(graphs):
            if g.n_left != sizes[-1]:
                raise IndexOutOfRange(
                    f"layer {i + 1} has {g.n_left} left vertices, expected {sizes[-1]}"
                )
            sizes.append(g.n_right)
            n, kd = g.out.shape
            indptr = np.arange(n + 1, dtype=np.int64) * kd
            blocks.append(
                _CsrBlock(g.n_left, g.n_right, indptr=indptr, indices=g.out.ravel())
            )
        p0 = graphs[0].params
        same_model = all(
            (g.params.k_num, g.params.k_den, g.params.d)
            == (p0.k_num, p0.k_den, p0.d)
            for g in graphs
        )
        return cls(
            sizes,
            blocks,
            k_num=p0.k_num if same_model else None,
            k_den=p0.k_den if same_model else None,
            d=p0.d if same_model else None,
        )

    @property
    def h(self) -> int:
        """Number of layer gaps."""
        return len(self.blocks)

    @property
    def layer_adj(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        return tuple(blk.rows_tuple() for blk in self.blocks)

    def block(self, i: int) -> _CsrBlock:
        """Layer i (1-based: X_{i-1} -> X_i)."""
        if not 1 <= i <= self.h:
            raise DirectionUnavailable(f"layer {i} outside 1..{self.h}")
        return self.blocks[i - 1]

    def layer_edges(self, i: int) -> list[tuple[int, int]]:
        blk = self.block(i)
        return [
            (u, int(v))
            for u in range(blk.n_from)
            for v in blk.row(u)
        ]

    def edge_in_layer(self, i: int, u: int, v: int) -> bool:
        row = self.block(i).row(u)
        p = int(np.searchsorted(row, v))
        return p < row.shape[0] and row[p] == v

    def induce_layer(self, i: int, a: Sequence[int], b: Sequence[int]) -> InducedSubgraph:
        """Induced bipartite subgraph of layer i on (A subset X_{i-1}, B subset X_i)."""
        blk = self.block(i)
        return _induce(blk.row, blk.n_from, blk.n_to, a, b)

    def reverse(self) -> "LayeredGraph":
        """Flip all edges: layer order reverses and each block is transposed."""
        sizes = self.layer_sizes[::-1]
        blocks = [
            _CsrBlock(
                blk.n_to,
                blk.n_from,
                indptr=blk.t_indptr,
                indices=blk.t_indices,
            )
            for blk in self.blocks[::-1]
        ]
        return LayeredGraph(sizes, blocks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LayeredGraph) or self.layer_sizes != other.layer_sizes:
            return False
        return all(
            np.array_equal(b1.indptr, b2.indptr)
            and np.array_equal(b1.indices, b2.indices)
            for b1, b2 in zip(self.blocks, other.blocks)
        )

    def __repr__(self) -> str:
        return f"LayeredGraph(sizes={list(self.layer_sizes)})"


def neighborhood(
    graph: BipartiteDigraph | LayeredGraph,
    vertices: Iterable[int],
    direction: str = "out",
    i: int = 1,
    start_layer: int = 0,
) -> frozenset[int]:
    """i-step neighborhood of a vertex set.

    i = 0 returns the set itself; i = 1 is the plain (out- or in-)
    neighborhood.  On a LayeredGraph the set lives in X_{start_layer} and the
    result in X_{start_layer +/- i}; iterating past the outer layers raises
    DirectionUnavailable.  On a single bipartite layer only i <= 1 is defined.
    """
    if direction not in ("out", "in"):
        raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")
    if i < 0:
        raise ValueError("i must be >= 0")
    current = frozenset(int(v) for v in vertices)
    if i == 0:
        return current
    if isinstance(graph, BipartiteDigraph):
        if i > 1:
            raise DirectionUnavailable("a single layer supports at most one step")
        n_src = graph.n_left if direction == "out" else graph.n_right
        rows = graph.out if direction == "out" else graph.inn
        out: set[int] = set()
        for v in current:
            if not 0 <= v < n_src:
                raise IndexOutOfRange(f"vertex {v} outside 0..{n_src - 1}")
            out.update(int(z) for z in rows[v])
        return frozenset(out)
    layer = start_layer
    if not 0 <= layer <= graph.h:
        raise DirectionUnavailable(f"no layer X_{layer}")
    n_src = graph.layer_sizes[layer]
    for v in current:
        if not 0 <= v < n_src:
            raise IndexOutOfRange(f"vertex {v} outside 0..{n_src - 1} in X_{layer}")
    for _ in range(i):
        if direction == "out":
            if layer >= graph.h:
                raise DirectionUnavailable(f"no layer above X_{layer}")
            rows_fn = graph.blocks[layer].row
            layer += 1
        else:
            if layer <= 0:
                raise DirectionUnavailable(f"no layer below X_{layer}")
            rows_fn = graph.blocks[layer - 1].t_row
            layer -= 1
        nxt: set[int] = set()
        for v in current:
            nxt.update(int(w) for w in rows_fn(v))
        current = frozenset(nxt)
    return current


def min_degrees(graph: BipartiteDigraph | InducedSubgraph) -> DegreeSummary:
    """Exact minimum out-degree (A side), in-degree (B side), and their min."""
    if isinstance(graph, BipartiteDigraph):
        if graph.n_left == 0 or graph.n_right == 0:
            raise EmptySide("both sides must be non-empty")
        return DegreeSummary(
            graph.params.kd, graph.params.d, min(graph.params.kd, graph.params.d)
        )
    if graph.n_a == 0 or graph.n_b == 0:
        raise EmptySide("both sides must be non-empty")
    delta_out = min(len(r) for r in graph.adj)
    delta_in = min(len(c) for c in graph.in_adj)
    return DegreeSummary(delta_out, delta_in, min(delta_out, delta_in))


def apply_switching(
    graph: BipartiteDigraph, a: int, b: int, c: int, d: int
) -> BipartiteDigraph:
    """Replace edges ac, bd by ad, bc (requires ad, bc absent); degrees are preserved.

    The operation is an involution: switching the result on (a, b, d, c)
    restores the original graph.
    """
    n, kn = graph.n_left, graph.n_right
    for name, v, bound in (("a", a, n), ("b", b, n), ("c", c, kn), ("d", d, kn)):
        if not 0 <= v < bound:
            raise IndexOutOfRange(f"{name} = {v} outside 0..{bound - 1}")
    if not graph.has_edge(a, c):
        raise PreconditionViolated(f"edge y{a}->z{c} missing")
    if not graph.has_edge(b, d):
        raise PreconditionViolated(f"edge y{b}->z{d} missing")
    if graph.has_edge(a, d):
        raise PreconditionViolated(f"edge y{a}->z{d} already present")
    if graph.has_edge(b, c):
        raise PreconditionViolated(f"edge y{b}->z{c} already present")
    out = graph.out.copy()
    row_a = out[a]
    row_a[np.searchsorted(row_a, c)] = d
    out[a] = np.sort(row_a)
    row_b = out[b]
    row_b[np.searchsorted(row_b, d)] = c
    out[b] = np.sort(row_b)
    return BipartiteDigraph._trusted(graph.params, out)
