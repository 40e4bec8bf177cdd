"""Seeded Monte Carlo harness: matching trials, threshold sweeps, the
independent-edge baseline, local-statistics checks, and confidence intervals.

Every result is a pure function of (configuration, master seed): per-trial
seeds are derived with a 64-bit mix of (master, row index, trial index), so
worker count and scheduling cannot change any number.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .analytics import (
    er_matching_prob,
    no_edge_exact,
    overlap_expectations,
    threshold_c,
)
from .errors import InvalidConfig, InvalidP, OutOfRange, RejectionInfeasible
from .graph import BipartiteDigraph, induce
from .matching import ProblematicPair, find_problematic_pair, has_perfect_matching
from .params import GraphParams
from .sampler import SamplerMethod, _pairing_rows, pairing_feasible, sample_graph
from .seeds import MASK64, mix64, trial_seed

_SUBSET_SALT = 0x5355425345545350

#: two-sided normal quantiles
Z95 = 1.959963984540054
Z99 = 2.5758293035489004


def wilson_interval(successes: int, trials: int, z: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clamped to [0, 1]."""
    if trials < 1 or not 0 <= successes <= trials or z <= 0:
        raise OutOfRange(
            f"need 0 <= successes <= trials, trials >= 1, z > 0; "
            f"got ({successes}, {trials}, {z})"
        )
    p_hat = successes / trials
    z2n = z * z / trials
    center = (p_hat + z2n / 2.0) / (1.0 + z2n)
    half = (
        z
        * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials))
        / (1.0 + z2n)
    )
    # the interval contains p_hat in real arithmetic; the min/max only mops
    # up last-ulp rounding at the boundaries
    return max(0.0, min(center - half, p_hat)), min(1.0, max(center + half, p_hat))


def _worker_count(n_items: int) -> int:
    cap = os.environ.get("BIREG_THREADS")
    workers = max(1, int(cap)) if cap is not None else (os.cpu_count() or 1)
    return max(1, min(workers, n_items))


def _pmap(fn, items):
    """Deterministic map, threaded when more than one worker is allowed."""
    workers = _worker_count(len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class TrialConfig:
    """One trial of a given mode.

    AB:      induced subgraph on prefix/random (A, B) of size kd each;
    AGamma:  A of size kd containing y, B = Gamma(y) (needs d >= 2);
    ER:      independent-edge bipartite baseline with probability p;
    Commutative: one layered build-and-certify run.
    """

    mode: str
    seed: int
    params: GraphParams | None = None
    sampler: SamplerMethod | None = None
    subset_policy: str = "prefix"
    p: float | None = None
    er_n: int | None = None
    h: int | None = None

    def __post_init__(self):
        if self.mode not in ("AB", "AGamma", "ER", "Commutative"):
            raise InvalidConfig(f"unknown mode {self.mode!r}")
        if self.subset_policy not in ("prefix", "random"):
            raise InvalidConfig(f"unknown subset policy {self.subset_policy!r}")
        if self.mode in ("AB", "AGamma"):
            if self.params is None or self.sampler is None:
                raise InvalidConfig(f"mode {self.mode} needs params and sampler")
            if self.mode == "AGamma" and self.params.d < 2:
                raise InvalidConfig("AGamma mode requires d >= 2")
        if self.mode == "ER":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise InvalidP(f"p = {self.p} outside [0, 1]")
            if self.er_n is None or self.er_n < 1:
                raise InvalidConfig("ER mode needs er_n >= 1")
        if self.mode == "Commutative" and (self.h is None or self.h < 1):
            raise InvalidConfig("Commutative mode needs h >= 1")


@dataclass(frozen=True)
class ObservableStats:
    """Mode-appropriate counts; fields for the other mode stay None.

    a_minus: neighbors of y whose only in-neighbor in A is y;
    a_plus:  vertices of A - {y} whose neighborhood misses Gamma(y);
    q_plus/q_minus: isolated A-side / B-side vertices of the induced graph.
    """

    a_minus: int | None = None
    a_plus: int | None = None
    q_plus: int | None = None
    q_minus: int | None = None

    @property
    def q(self) -> int | None:
        if self.q_plus is None or self.q_minus is None:
            return None
        return self.q_plus + self.q_minus


@dataclass(frozen=True)
class TrialResult:
    matched: bool
    stats: ObservableStats
    witness: ProblematicPair | None
    witness_parent: tuple[tuple[int, ...], tuple[int, ...]] | None
    seed: int


def _pick_subsets(
    graph: BipartiteDigraph, config: TrialConfig
) -> tuple[np.ndarray, np.ndarray, int]:
    """(A, B, y) per the subset policy; y is only meaningful in AGamma mode."""
    params = graph.params
    kd, n, kn = params.kd, params.n, params.kn
    if config.subset_policy == "prefix":
        a = np.arange(kd, dtype=np.int64)
        y = 0
        b = (
            np.asarray(graph.out[y], dtype=np.int64)
            if config.mode == "AGamma"
            else np.arange(kd, dtype=np.int64)
        )
        return a, b, y
    rng = np.random.Generator(
        np.random.PCG64(mix64(config.seed, _SUBSET_SALT) & MASK64)
    )
    a = np.sort(rng.choice(n, size=kd, replace=False))
    y = int(a[rng.integers(kd)])
    if config.mode == "AGamma":
        b = np.asarray(graph.out[y], dtype=np.int64)
    else:
        b = np.sort(rng.choice(kn, size=kd, replace=False))
    return a.astype(np.int64), b, y


def _observables(
    graph: BipartiteDigraph, mode: str, a: np.ndarray, b: np.ndarray, y: int
) -> ObservableStats:
    params = graph.params
    mask_a = np.zeros(params.n, dtype=bool)
    mask_a[a] = True
    if mode == "AGamma":
        gamma_y = graph.out[y]
        in_rows = graph.inn[gamma_y]  # (kd, d) in-neighbor lists
        counts = mask_a[in_rows].sum(axis=1)
        has_y = (in_rows == y).any(axis=1)
        a_minus = int(((counts == 1) & has_y).sum())
        mask_gy = np.zeros(params.kn, dtype=bool)
        mask_gy[gamma_y] = True
        others = a[a != y]
        a_plus = int((~mask_gy[graph.out[others]].any(axis=1)).sum())
        return ObservableStats(a_minus=a_minus, a_plus=a_plus)
    mask_b = np.zeros(params.kn, dtype=bool)
    mask_b[b] = True
    q_plus = int((~mask_b[graph.out[a]].any(axis=1)).sum())
    q_minus = int((~mask_a[graph.inn[b]].any(axis=1)).sum())
    return ObservableStats(q_plus=q_plus, q_minus=q_minus)


def run_matching_trial(config: TrialConfig) -> TrialResult:
    """Sample a graph, induce H per mode, test for a perfect matching, and
    collect observables; returns a verified witness when unmatched."""
    if config.mode not in ("AB", "AGamma"):
        raise InvalidConfig(f"run_matching_trial needs mode AB or AGamma, got {config.mode}")
    graph = sample_graph(config.params, config.sampler, config.seed)
    a, b, y = _pick_subsets(graph, config)
    sub = induce(graph, a.tolist(), b.tolist())
    matched = has_perfect_matching(sub)
    witness = None if matched else find_problematic_pair(sub)
    witness_parent = None
    if witness is not None:
        witness_parent = (
            tuple(sorted(sub.a_vertices[i] for i in witness.s_set)),
            tuple(sorted(sub.b_vertices[j] for j in witness.t_set)),
        )
    stats = _observables(graph, config.mode, a, b, y)
    return TrialResult(matched, stats, witness, witness_parent, config.seed)


@dataclass(frozen=True)
class SweepRow:
    mode: str
    k_num: int
    k_den: int
    n: int
    d: int | None
    c: float
    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    mean_a_minus: float | None = None
    mean_a_plus: float | None = None
    mean_q: float | None = None
    analytic: float | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    mode: str
    master_seed: int
    z: float
    trial_records: tuple[tuple[dict, ...], ...] | None = None

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "master_seed": self.master_seed,
            "z": self.z,
            "rows": [
                {k: v for k, v in vars(r).items()} for r in self.rows
            ],
        }
        if self.trial_records is not None:
            out["trials"] = [list(recs) for recs in self.trial_records]
        return out


def _trial_record(result: TrialResult) -> dict:
    rec = {
        "seed": result.seed,
        "matched": result.matched,
    }
    for name in ("a_minus", "a_plus", "q_plus", "q_minus"):
        value = getattr(result.stats, name)
        if value is not None:
            rec[name] = value
    if result.witness_parent is not None:
        rec["witness"] = {
            "S": list(result.witness_parent[0]),
            "T": list(result.witness_parent[1]),
        }
    return rec


def sweep_matching(
    params_list,
    trials: int,
    mode: str,
    sampler: SamplerMethod,
    master_seed: int,
    subset_policy: str = "prefix",
    z: float = Z95,
    collect_trials: bool = False,
) -> SweepResult:
    """Empirical matching probability per parameter point, rows ordered by d.

    Each row gets the Wilson interval at the given z and the means of the
    mode's observables; c is recomputed from (k, n, d) per row.
    """
    if trials < 1:
        raise OutOfRange(f"trials must be >= 1, got {trials}")
    ordered = sorted(params_list, key=lambda p: p.d)
    rows = []
    all_records = []
    for row_idx, params in enumerate(ordered):
        configs = [
            TrialConfig(
                mode=mode,
                seed=trial_seed(master_seed, row_idx, t),
                params=params,
                sampler=sampler,
                subset_policy=subset_policy,
            )
            for t in range(trials)
        ]
        results = _pmap(run_matching_trial, configs)
        successes = sum(1 for r in results if r.matched)
        lo, hi = wilson_interval(successes, trials, z)
        def _mean(name: str) -> float | None:
            vals = [getattr(r.stats, name) for r in results]
            if any(v is None for v in vals):
                return None
            return float(np.mean(vals))
        q_vals = [r.stats.q for r in results]
        rows.append(
            SweepRow(
                mode=mode,
                k_num=params.k_num,
                k_den=params.k_den,
                n=params.n,
                d=params.d,
                c=threshold_c(params).c,
                trials=trials,
                successes=successes,
                p_hat=successes / trials,
                ci_low=lo,
                ci_high=hi,
                mean_a_minus=_mean("a_minus"),
                mean_a_plus=_mean("a_plus"),
                mean_q=(
                    float(np.mean(q_vals)) if all(v is not None for v in q_vals) else None
                ),
            )
        )
        if collect_trials:
            all_records.append(tuple(_trial_record(r) for r in results))
    return SweepResult(
        rows=tuple(rows),
        mode=mode,
        master_seed=master_seed,
        z=z,
        trial_records=tuple(all_records) if collect_trials else None,
    )


def er_baseline_sweep(
    n: int,
    c_list,
    trials: int,
    master_seed: int,
    z: float = Z95,
) -> SweepResult:
    """Perfect-matching frequency of the independent-edge bipartite model at
    p = (ln n + c)/n, with the limiting value exp(-2 e^{-c}) attached per row."""
    if trials < 1:
        raise OutOfRange(f"trials must be >= 1, got {trials}")
    rows = []
    for row_idx, c in enumerate(c_list):
        p = (math.log(n) + c) / n
        if not 0.0 <= p <= 1.0:
            raise InvalidP(f"c = {c} gives p = {p:.6g} outside [0, 1]")
        seeds = [trial_seed(master_seed, row_idx, t) for t in range(trials)]
        outcomes = _pmap(
            lambda s: int(_kernels.er_bipartite_trial(n, p, np.uint64(s))), seeds
        )
        successes = int(sum(outcomes))
        lo, hi = wilson_interval(successes, trials, z)
        rows.append(
            SweepRow(
                mode="ER",
                k_num=1,
                k_den=1,
                n=n,
                d=None,
                c=float(c),
                trials=trials,
                successes=successes,
                p_hat=successes / trials,
                ci_low=lo,
                ci_high=hi,
                analytic=er_matching_prob(c),
            )
        )
    return SweepResult(rows=tuple(rows), mode="ER", master_seed=master_seed, z=z)


def commutative_trial(k, m: int, d: int, h: int, seed: int, sampler=None):
    """Build one random layered instance and fully certify it."""
    from .plunnecke import build_random_layered, check_commutative

    graph = build_random_layered(k, m, d, h, seed, method=sampler)
    return check_commutative(graph)


@dataclass(frozen=True)
class StatRow:
    """One empirical-vs-analytic comparison with a 99%-style interval."""

    name: str
    empirical: float
    expected: float
    expected_exact: str | None
    ci_low: float
    ci_high: float
    passed: bool


def estimate_local_statistics(
    params: GraphParams,
    trials: int,
    master_seed: int,
    s_cond: int | None = None,
    s_uncond: int | None = None,
    b_size: int | None = None,
    sampler: SamplerMethod | None = None,
    z: float = Z99,
) -> list[StatRow]:
    """Empirical means/frequencies of local observables against their exact
    oracles: neighborhood overlaps, single-vertex no-edge events, and the
    isolated count Q of a prefix (A, B) pair.

    Uses the exact pairing sampler unless a switch chain is explicitly
    requested.  Frequencies get Wilson intervals, count means get normal
    intervals; `passed` records whether the oracle lies inside.
    """
    if trials < 1:
        raise OutOfRange(f"trials must be >= 1, got {trials}")
    n, d, kd, kn = params.n, params.d, params.kd, params.kn
    if sampler is None:
        if not pairing_feasible(params):
            raise RejectionInfeasible(
                "exact sampler infeasible here; pass a switch-chain sampler explicitly"
            )
        sampler = SamplerMethod.pairing()
    if b_size is None:
        b_size = kd
    if s_cond is not None and not 1 <= s_cond <= n - 1:
        raise OutOfRange(f"s_cond = {s_cond} outside 1..{n - 1}")
    if s_uncond is not None and not 1 <= s_uncond <= n:
        raise OutOfRange(f"s_uncond = {s_uncond} outside 1..{n}")

    overlap_sum = 0
    prefix_sum = 0
    q_sum = 0
    q_sq_sum = 0
    overlap_sq_sum = 0
    prefix_sq_sum = 0
    cond_hits = 0
    uncond_hits = 0

    use_fast_pairing = sampler.kind == "pairing"
    mask_a = np.zeros(n, dtype=bool)
    mask_a[np.arange(kd)] = True
    mask_b = np.zeros(kn, dtype=bool)
    mask_b[np.arange(b_size)] = True
    mask_bkd = np.zeros(kn, dtype=bool)
    mask_bkd[np.arange(kd)] = True

    for t in range(trials):
        seed = trial_seed(master_seed, t)
        if use_fast_pairing:
            rng = np.random.Generator(np.random.PCG64(seed & MASK64))
            out = _pairing_rows(params, rng)
            graph = None
        else:
            graph = sample_graph(params, sampler, seed)
            out = graph.out
        if n >= 2:
            overlap = int(np.intersect1d(out[0], out[1]).shape[0])
            overlap_sum += overlap
            overlap_sq_sum += overlap * overlap
        pref = int(mask_b[out[0]].sum())
        prefix_sum += pref
        prefix_sq_sum += pref * pref
        # in-neighbor lists come from the transpose
        order = np.argsort(out.ravel(), kind="stable")
        inn = np.repeat(np.arange(n, dtype=np.int32), kd)[order].reshape(kn, d)
        if s_cond is not None:
            z1 = int(out[0][0])
            row = inn[z1]
            # S = the s_cond vertices after y = 0
            cond_hits += int(not ((row >= 1) & (row <= s_cond)).any())
        if s_uncond is not None:
            row = inn[0]
            uncond_hits += int((row >= s_uncond).all())
        q_plus = int((~mask_bkd[out[: kd]].any(axis=1)).sum())
        q_minus = int((~mask_a[inn[: kd]].any(axis=1)).sum())
        q = q_plus + q_minus
        q_sum += q
        q_sq_sum += q * q

    rows: list[StatRow] = []

    def add_mean_row(name: str, total: int, sq_total: int, expected) -> None:
        mean = total / trials
        var = max(0.0, sq_total / trials - mean * mean) * trials / max(1, trials - 1)
        half = z * math.sqrt(var / trials)
        exp_f = float(expected)
        rows.append(
            StatRow(
                name=name,
                empirical=mean,
                expected=exp_f,
                expected_exact=_frac_str(expected),
                ci_low=mean - half,
                ci_high=mean + half,
                passed=mean - half <= exp_f <= mean + half,
            )
        )

    def add_freq_row(name: str, hits: int, expected) -> None:
        lo, hi = wilson_interval(hits, trials, z)
        exp_f = float(expected)
        rows.append(
            StatRow(
                name=name,
                empirical=hits / trials,
                expected=exp_f,
                expected_exact=_frac_str(expected),
                ci_low=lo,
                ci_high=hi,
                passed=lo <= exp_f <= hi,
            )
        )

    pair_expect, prefix_expect = overlap_expectations(params, b_size)
    if n >= 2 and pair_expect is not None:
        add_mean_row("pair_overlap_mean", overlap_sum, overlap_sq_sum, pair_expect)
    add_mean_row("prefix_overlap_mean", prefix_sum, prefix_sq_sum, prefix_expect)
    if s_cond is not None:
        add_freq_row(
            f"no_edge_conditioned(s={s_cond})",
            cond_hits,
            no_edge_exact(s_cond, params, side="in", conditioned=True),
        )
    if s_uncond is not None:
        add_freq_row(
            f"no_edge_unconditioned(s={s_uncond})",
            uncond_hits,
            no_edge_exact(s_uncond, params, side="in", conditioned=False),
        )
    q_expect = kd * (
        no_edge_exact(kd, params, side="out", conditioned=False)
        + no_edge_exact(kd, params, side="in", conditioned=False)
    )
    add_mean_row("q_mean", q_sum, q_sq_sum, q_expect)
    return rows


def _frac_str(value) -> str | None:
    from fractions import Fraction

    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return None
