"""Sampling from the biregular family, plus exhaustive enumeration for tiny instances.

Three samplers:

* pairing:   stub-matching with rejection until simple; exactly uniform
             conditional on acceptance, feasible only while the expected
             rejection cost is small;
* switch:    start from a deterministic member (or a pairing sample when
             feasible) and run a reversible chain of random switchings;
             approximately uniform, every intermediate state biregular;
* circulant: the deterministic cyclic member (integer k).

Determinism: (params, method, seed) fixes the output bit-for-bit; the chain
consumes its own splitmix64 stream, the pairing sampler a PCG64 stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import chi2

from . import _kernels
from .errors import InsufficientSamples, RejectionInfeasible, TooLarge
from .graph import BipartiteDigraph, block_cyclic_graph, circulant_graph
from .params import GraphParams
from .seeds import MASK64, mix64

#: rejection sampling is routed away once (d-1)(kd-1) exceeds this
PAIRING_GUARD = 40

#: default chain length multiplier: 20 * |E| accepted switches
CHAIN_LENGTH_FACTOR = 20

_CHAIN_SALT = 0x5349544348434841  # domain separation for the chain stream


@dataclass(frozen=True)
class SamplerMethod:
    """Sampler selection: kind in {"pairing", "switch", "circulant"}.

    For the switch chain, `steps` is the number of accepted switches; None
    means the 20*|E| default.
    """

    kind: str
    steps: int | None = None

    def __post_init__(self):
        if self.kind not in ("pairing", "switch", "circulant"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.kind != "switch" and self.steps is not None:
            raise ValueError("steps only applies to the switch chain")
        if self.steps is not None and self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")

    @classmethod
    def pairing(cls) -> "SamplerMethod":
        return cls("pairing")

    @classmethod
    def switch_chain(cls, steps: int | None = None) -> "SamplerMethod":
        return cls("switch", steps)

    @classmethod
    def circulant(cls) -> "SamplerMethod":
        return cls("circulant")


def pairing_feasible(params: GraphParams) -> bool:
    return (params.d - 1) * (params.kd - 1) <= PAIRING_GUARD


def _pairing_rows(params: GraphParams, rng: np.random.Generator) -> np.ndarray:
    """Sorted out-adjacency rows of one accepted stub-pairing (uniform given simple)."""
    n, kd, kn, d = params.n, params.kd, params.kn, params.d
    stubs = np.repeat(np.arange(kn, dtype=np.int32), d)
    while True:
        rng.shuffle(stubs)
        rows = np.sort(stubs.reshape(n, kd), axis=1)
        if kd == 1 or (np.diff(rows, axis=1) > 0).all():
            return rows


def sample_pairing(params: GraphParams, seed: int) -> BipartiteDigraph:
    """Exactly uniform member via the stub-pairing model with rejection.

    kd*n stubs on Y are matched to d*kn stubs on Z by a uniform permutation;
    multigraphs are resampled.  Conditional on simplicity every labelled
    member is equally likely.  Raises RejectionInfeasible when the expected
    acceptance rate (roughly exp(-(d-1)(kd-1)/2)) is too small.
    """
    if not pairing_feasible(params):
        raise RejectionInfeasible(
            f"(d-1)(kd-1) = {(params.d - 1) * (params.kd - 1)} exceeds {PAIRING_GUARD};"
            " use the switch chain"
        )
    rng = np.random.Generator(np.random.PCG64(seed & MASK64))
    return BipartiteDigraph._trusted(params, _pairing_rows(params, rng))


def default_chain_steps(params: GraphParams) -> int:
    return CHAIN_LENGTH_FACTOR * params.edge_count


def _chain_start(params: GraphParams, seed: int) -> BipartiteDigraph:
    if pairing_feasible(params):
        return sample_pairing(params, seed)
    if params.k_den == 1:
        return circulant_graph(params)
    return block_cyclic_graph(params)


def _edge_bitset(adj: np.ndarray, kn: int) -> np.ndarray:
    """Pack the edge set into an (n, ceil(kn/64)) uint64 bitset."""
    n, kd = adj.shape
    member = np.zeros((n, (kn + 63) // 64), dtype=np.uint64)
    rows = np.repeat(np.arange(n), kd)
    cols = adj.ravel().astype(np.int64)
    np.bitwise_or.at(
        member,
        (rows, cols >> 6),
        np.uint64(1) << (cols & 63).astype(np.uint64),
    )
    return member


def sample_switch_chain(
    params: GraphParams, seed: int, steps: int | None = None
) -> BipartiteDigraph:
    """Approximately uniform member: run `steps` accepted random switchings.

    A proposal picks ordered y-vertices a, b and one out-edge of each
    uniformly; it is applied exactly when the two replacement edges are
    absent (which keeps the graph biregular), otherwise skipped.  The
    proposal is symmetric, so the uniform distribution is stationary.
    steps=None uses the 20*|E| default; steps=0 returns the start state.
    """
    if steps is None:
        steps = default_chain_steps(params)
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    start = _chain_start(params, seed)
    if steps == 0 or params.kd == params.kn:
        # a complete graph is the unique member; no valid switch exists
        return start
    adj = start.out.astype(np.int32).copy()
    member = _edge_bitset(adj, params.kn)
    _kernels.switch_chain_run(adj, member, steps, np.uint64(mix64(seed, _CHAIN_SALT)))
    return BipartiteDigraph._trusted(params, np.sort(adj, axis=1))


class SwitchChainState:
    """Resumable chain for debug-mode spot checks and incremental runs."""

    def __init__(self, params: GraphParams, seed: int):
        self.params = params
        start = _chain_start(params, seed)
        self.adj = start.out.astype(np.int32).copy()
        self.member = _edge_bitset(self.adj, params.kn)
        self.rng_state = mix64(seed, _CHAIN_SALT)
        self.accepted = 0

    def advance(self, steps: int) -> None:
        if steps > 0 and self.params.kd < self.params.kn:
            self.rng_state = int(
                _kernels.switch_chain_run(
                    self.adj, self.member, steps, np.uint64(self.rng_state)
                )
            )
            self.accepted += steps

    def graph(self) -> BipartiteDigraph:
        return BipartiteDigraph._trusted(self.params, np.sort(self.adj, axis=1))

    def degrees_ok(self) -> bool:
        """Full biregularity spot check of the working state."""
        indeg = np.bincount(self.adj.ravel(), minlength=self.params.kn)
        rows_distinct = all(
            len(set(row.tolist())) == self.params.kd for row in self.adj
        )
        return bool(rows_distinct and (indeg == self.params.d).all())


def sample_switch_chain_debug(
    params: GraphParams, seed: int, steps: int | None = None
) -> BipartiteDigraph:
    """Like sample_switch_chain but re-scans biregularity at every power-of-two step."""
    if steps is None:
        steps = default_chain_steps(params)
    state = SwitchChainState(params, seed)
    done = 0
    next_check = 1
    while done < steps:
        chunk = min(next_check - done, steps - done)
        state.advance(chunk)
        done += chunk
        if not state.degrees_ok():
            raise AssertionError(f"biregularity lost after {done} accepted switches")
        if done == next_check:
            next_check *= 2
    return state.graph()


def sample_graph(params: GraphParams, method: SamplerMethod, seed: int) -> BipartiteDigraph:
    """Dispatch on the sampler method."""
    if method.kind == "pairing":
        return sample_pairing(params, seed)
    if method.kind == "switch":
        return sample_switch_chain(params, seed, method.steps)
    return circulant_graph(params)


#: exhaustive enumeration is limited to |Z| at most this
ENUMERATION_MAX_KN = 8


def enumerate_family(params: GraphParams) -> list[BipartiteDigraph]:
    """All labelled members, each exactly once, in lexicographic row order.

    Backtracks over sorted out-rows (lexicographic combinations) while
    tracking residual in-capacity of each z; feasible only for tiny kn.
    """
    n, kd, kn, d = params.n, params.kd, params.kn, params.d
    if kn > ENUMERATION_MAX_KN:
        raise TooLarge(f"kn = {kn} exceeds enumeration bound {ENUMERATION_MAX_KN}")
    all_rows = list(combinations(range(kn), kd))
    capacity = [d] * kn
    chosen: list[tuple[int, ...]] = []
    out: list[BipartiteDigraph] = []

    def feasible() -> bool:
        remaining_rows = n - len(chosen)
        total = sum(capacity)
        if total != remaining_rows * kd:
            return False
        return all(c <= remaining_rows for c in capacity)

    def rec() -> None:
        if len(chosen) == n:
            out.append(
                BipartiteDigraph._trusted(
                    params, np.array(chosen, dtype=np.int32).reshape(n, kd)
                )
            )
            return
        for row in all_rows:
            if all(capacity[z] > 0 for z in row):
                for z in row:
                    capacity[z] -= 1
                chosen.append(row)
                if feasible():
                    rec()
                chosen.pop()
                for z in row:
                    capacity[z] += 1

    rec()
    return out


def family_index(family: list[BipartiteDigraph]) -> dict[bytes, int]:
    """Adjacency-key -> position lookup for an enumerated family."""
    return {g.key(): i for i, g in enumerate(family)}


def uniformity_chisq(observed_counts, family_size: int) -> tuple[float, float]:
    """Pearson chi-square statistic against the uniform null, with its p-value.

    Requires one count per family member and at least 5 draws per cell on
    average.
    """
    counts = [int(c) for c in observed_counts]
    if len(counts) != family_size:
        raise InsufficientSamples(
            f"expected {family_size} counts, got {len(counts)}"
        )
    total = sum(counts)
    if total < 5 * family_size:
        raise InsufficientSamples(
            f"{total} draws < 5 * {family_size}"
        )
    expected = total / family_size
    stat = sum((c - expected) ** 2 for c in counts) / expected
    pvalue = float(chi2.sf(stat, family_size - 1))
    return stat, pvalue
