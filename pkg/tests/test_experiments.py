import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bireg import (
    SamplerMethod,
    TrialConfig,
    er_baseline_sweep,
    estimate_local_statistics,
    induce,
    run_matching_trial,
    sample_pairing,
    sweep_matching,
    validate_params,
    wilson_interval,
)
from bireg.errors import InvalidConfig, InvalidP, OutOfRange, RejectionInfeasible
from bireg.matching import has_perfect_matching

PAIRING = SamplerMethod.pairing()


class TestWilson:
    def test_zero_successes_clamps_to_zero(self):
        lo, hi = wilson_interval(0, 10, 1.96)
        assert lo == 0.0
        assert 0 < hi < 0.35

    def test_symmetry_about_half(self):
        lo, hi = wilson_interval(5, 10, 1.96)
        assert lo + hi == pytest.approx(1.0, abs=1e-12)

    def test_against_independent_formula(self):
        # quadratic-root formulation of the same interval
        s, t, z = 9, 10, 1.96
        p = s / t
        # roots of (p - x)^2 = z^2 x (1 - x) / t
        a = 1 + z * z / t
        b = -(2 * p + z * z / t)
        c = p * p
        disc = math.sqrt(b * b - 4 * a * c)
        lo_ref, hi_ref = (-b - disc) / (2 * a), (-b + disc) / (2 * a)
        lo, hi = wilson_interval(s, t, z)
        assert lo == pytest.approx(lo_ref, abs=1e-12)
        assert hi == pytest.approx(hi_ref, abs=1e-12)

    @given(
        trials=st.integers(1, 500),
        z=st.floats(0.1, 5.0),
        frac=st.floats(0, 1),
    )
    @settings(max_examples=80, deadline=None)
    def test_always_bracket_and_clamped(self, trials, z, frac):
        successes = round(frac * trials)
        lo, hi = wilson_interval(successes, trials, z)
        assert 0.0 <= lo <= successes / trials <= hi <= 1.0

    def test_domain(self):
        with pytest.raises(OutOfRange):
            wilson_interval(-1, 10, 1.96)
        with pytest.raises(OutOfRange):
            wilson_interval(11, 10, 1.96)
        with pytest.raises(OutOfRange):
            wilson_interval(0, 0, 1.96)
        with pytest.raises(OutOfRange):
            wilson_interval(1, 10, 0.0)


class TestTrialConfig:
    def test_agamma_needs_d_at_least_2(self):
        with pytest.raises(InvalidConfig):
            TrialConfig(
                mode="AGamma",
                seed=1,
                params=validate_params(1, 1, 5, 1),
                sampler=PAIRING,
            )

    def test_er_p_range(self):
        with pytest.raises(InvalidP):
            TrialConfig(mode="ER", seed=1, p=1.5, er_n=10)

    def test_unknown_mode(self):
        with pytest.raises(InvalidConfig):
            TrialConfig(mode="XY", seed=1)


class TestRunMatchingTrial:
    def config(self, mode="AGamma", seed=5, policy="prefix", n=8, d=2):
        return TrialConfig(
            mode=mode,
            seed=seed,
            params=validate_params(1, 1, n, d),
            sampler=PAIRING,
            subset_policy=policy,
        )

    def test_deterministic(self):
        a = run_matching_trial(self.config())
        b = run_matching_trial(self.config())
        assert (a.matched, a.stats) == (b.matched, b.stats)
        assert a.witness == b.witness

    def test_agamma_stats_populated(self):
        r = run_matching_trial(self.config())
        assert r.stats.a_minus is not None and r.stats.a_plus is not None
        assert r.stats.q_plus is None and r.stats.q_minus is None
        assert 0 <= r.stats.a_minus <= 2
        assert 0 <= r.stats.a_plus <= 1

    def test_ab_stats_populated(self):
        r = run_matching_trial(self.config(mode="AB"))
        assert r.stats.q_plus is not None and r.stats.q_minus is not None
        assert r.stats.a_minus is None
        assert r.stats.q == r.stats.q_plus + r.stats.q_minus

    def test_witness_maps_to_parents(self):
        for seed in range(60):
            r = run_matching_trial(self.config(seed=seed, n=10, d=2))
            if r.witness is not None:
                s_parent, t_parent = r.witness_parent
                assert len(s_parent) == len(r.witness.s_set)
                assert len(t_parent) == len(r.witness.t_set)
                break
        else:
            pytest.skip("no unmatched trial found in seed range")

    def test_random_policy_deterministic(self):
        a = run_matching_trial(self.config(policy="random", seed=9))
        b = run_matching_trial(self.config(policy="random", seed=9))
        assert (a.matched, a.stats) == (b.matched, b.stats)

    def test_mode_validation(self):
        with pytest.raises(InvalidConfig):
            run_matching_trial(TrialConfig(mode="ER", seed=1, p=0.5, er_n=5))


class TestD1Behavior:
    def test_k1_d1_always_matches(self):
        # with in-degree 1 and A = {y}, the induced graph on (A, Gamma(y))
        # is the single edge y -> z, so a matching always exists
        params = validate_params(1, 1, 6, 1)
        for seed in range(25):
            g = sample_pairing(params, seed)
            gamma_y = [int(z) for z in g.out_neighbors(0)]
            sub = induce(g, [0], gamma_y)
            assert has_perfect_matching(sub)

    def test_k2_d1_never_matches(self):
        # kd = 2 but every z has in-degree 1, so the second A-vertex is
        # isolated toward Gamma(y)
        params = validate_params(2, 1, 6, 1)
        for seed in range(25):
            g = sample_pairing(params, seed)
            a = [0, 1]
            gamma_y = [int(z) for z in g.out_neighbors(0)]
            sub = induce(g, a, gamma_y)
            assert not has_perfect_matching(sub)


class TestSweep:
    def test_rows_ordered_by_d_and_reproducible(self):
        params = [
            validate_params(1, 1, 12, 3),
            validate_params(1, 1, 12, 2),
        ]
        res1 = sweep_matching(params, 6, "AGamma", PAIRING, master_seed=42)
        res2 = sweep_matching(params, 6, "AGamma", PAIRING, master_seed=42)
        assert [r.d for r in res1.rows] == [2, 3]
        assert res1.rows == res2.rows
        for row in res1.rows:
            assert row.ci_low <= row.p_hat <= row.ci_high
            assert row.successes <= row.trials
            import bireg

            assert row.c == bireg.threshold_c(validate_params(1, 1, 12, row.d)).c

    def test_trial_records(self):
        res = sweep_matching(
            [validate_params(1, 1, 10, 2)],
            4,
            "AB",
            PAIRING,
            master_seed=7,
            collect_trials=True,
        )
        (records,) = res.trial_records
        assert len(records) == 4
        assert all("matched" in r and "seed" in r for r in records)

    def test_witness_soundness(self):
        # every unmatched trial returns a witness that re-verifies
        found = 0
        for seed in range(80):
            cfg = TrialConfig(
                mode="AGamma",
                seed=seed,
                params=validate_params(1, 1, 12, 2),
                sampler=PAIRING,
            )
            r = run_matching_trial(cfg)
            if not r.matched:
                assert r.witness is not None
                found += 1
        assert found > 0

    def test_trials_positive(self):
        with pytest.raises(OutOfRange):
            sweep_matching([validate_params(1, 1, 10, 2)], 0, "AB", PAIRING, 1)

    def test_worker_count_does_not_change_results(self, monkeypatch):
        params = [validate_params(1, 1, 10, 2)]
        monkeypatch.setenv("BIREG_THREADS", "1")
        serial = sweep_matching(params, 8, "AB", PAIRING, master_seed=21)
        monkeypatch.setenv("BIREG_THREADS", "4")
        threaded = sweep_matching(params, 8, "AB", PAIRING, master_seed=21)
        assert serial.rows == threaded.rows

    def test_subset_policy_statistically_equivalent(self):
        # label symmetry: prefix and uniform-random subsets give the same
        # matching probability (2x2 chi-square at significance 0.001)
        from scipy.stats import chi2_contingency

        params = validate_params(1, 1, 6, 2)
        trials = 2000
        counts = []
        for policy in ("prefix", "random"):
            res = sweep_matching(
                [params], trials, "AGamma", PAIRING, master_seed=313, subset_policy=policy
            )
            counts.append([res.rows[0].successes, trials - res.rows[0].successes])
        table = np.array(counts)
        assert table[0].min() > 0 and table[1].min() > 0
        _, pvalue, _, _ = chi2_contingency(table)
        assert pvalue > 0.001


class TestErBaseline:
    def test_p_zero_never_matches(self):
        n = 50
        res = er_baseline_sweep(n, [-math.log(n)], 30, master_seed=5)
        assert res.rows[0].p_hat == 0.0

    def test_large_c_always_matches(self):
        res = er_baseline_sweep(200, [8.0], 100, master_seed=5)
        assert res.rows[0].p_hat >= 0.99

    def test_analytic_attached(self):
        res = er_baseline_sweep(100, [0.0], 10, master_seed=5)
        assert res.rows[0].analytic == pytest.approx(math.exp(-2), abs=1e-12)

    def test_invalid_p(self):
        with pytest.raises(InvalidP):
            er_baseline_sweep(10, [50.0], 5, master_seed=1)  # p > 1

    def test_deterministic(self):
        a = er_baseline_sweep(60, [0.5], 40, master_seed=8)
        b = er_baseline_sweep(60, [0.5], 40, master_seed=8)
        assert a.rows == b.rows


class TestFailureBoundRegime:
    def test_diagnostic_dominates_observed_failures(self):
        # a point genuinely inside the large-threshold regime
        # (c >= 5 ln(kd)): the union-bound diagnostic is below 1 here and
        # must still dominate the observed non-matching frequency
        import bireg

        params = validate_params(1, 1, 20, 19)
        c = bireg.threshold_c(params).c
        assert c >= 5 * math.log(params.kd)
        diag = bireg.matching_failure_bound(params)
        assert diag < 1.0
        trials = 200
        failures = 0
        for t in range(trials):
            cfg = TrialConfig(
                mode="AGamma",
                seed=bireg.trial_seed(606, t),
                params=params,
                sampler=SamplerMethod.switch_chain(),
            )
            failures += not run_matching_trial(cfg).matched
        assert failures / trials <= diag


class TestLocalStatistics:
    def test_trials_zero_rejected(self):
        with pytest.raises(OutOfRange):
            estimate_local_statistics(validate_params(1, 1, 5, 2), 0, 1)

    def test_small_run_passes_oracles(self):
        rows = estimate_local_statistics(
            validate_params(1, 1, 5, 2),
            trials=4000,
            master_seed=99,
            s_cond=2,
            s_uncond=1,
        )
        names = {r.name for r in rows}
        assert {"pair_overlap_mean", "prefix_overlap_mean", "q_mean"} <= names
        for row in rows:
            assert row.passed, f"{row.name}: {row.empirical} vs {row.expected}"

    def test_infeasible_without_explicit_chain(self):
        with pytest.raises(RejectionInfeasible):
            estimate_local_statistics(validate_params(1, 1, 100, 9), 10, 1)

    def test_explicit_chain_accepted(self):
        rows = estimate_local_statistics(
            validate_params(1, 1, 30, 3),
            trials=50,
            master_seed=4,
            sampler=SamplerMethod.switch_chain(100),
        )
        assert rows

    def test_exact_fraction_reported(self):
        rows = estimate_local_statistics(
            validate_params(1, 1, 5, 2), trials=100, master_seed=1
        )
        pair_row = next(r for r in rows if r.name == "pair_overlap_mean")
        assert pair_row.expected_exact == "1/2"
