"""Command-line workbench.

Subcommands: sample, enumerate, matching-sweep, er-baseline, commutative,
magnification, analytic, stats.  Every command accepts --seed and --out;
an omitted seed is drawn randomly and printed so runs stay reproducible.
Exit codes: 0 success, 2 validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import secrets
import sys
from fractions import Fraction

from . import analytics, experiments, graphio, plunnecke, sampler
from .errors import BiregError
from .graph import BipartiteDigraph, LayeredGraph
from .params import validate_params
from .sampler import SamplerMethod


def _parse_k(text: str) -> Fraction:
    """k is passed as 'p' or 'p/q' text; floats are not accepted."""
    parts = text.split("/")
    if len(parts) == 1:
        return Fraction(int(parts[0]), 1)
    if len(parts) == 2:
        return Fraction(int(parts[0]), int(parts[1]))
    raise argparse.ArgumentTypeError(f"k must look like '3' or '3/2', got {text!r}")


def _parse_int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p]


def _parse_float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p]


def _sampler_from_args(args) -> SamplerMethod:
    kind = getattr(args, "method", None) or getattr(args, "sampler", None) or "switch"
    steps = getattr(args, "steps", None)
    if kind == "switch":
        return SamplerMethod.switch_chain(steps)
    if steps is not None:
        raise ValueError("--steps only applies to the switch sampler")
    if kind == "pairing":
        return SamplerMethod.pairing()
    if kind == "circulant":
        return SamplerMethod.circulant()
    raise ValueError(f"unknown sampler {kind!r}")


def _resolve_seed(args) -> int:
    if args.seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed} (chosen randomly; pass --seed to reproduce)")
        return seed
    return args.seed


def _params_from_args(args):
    k = args.k
    return validate_params(k.numerator, k.denominator, args.n, args.d)


def _cmd_sample(args) -> int:
    params = _params_from_args(args)
    seed = _resolve_seed(args)
    graph = sampler.sample_graph(params, _sampler_from_args(args), seed)
    print(f"sampled {params} via {args.method}: {params.edge_count} edges")
    if args.out:
        graphio.write_graph(graph, args.out)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(_graph_text(graph))
    return 0


def _graph_text(graph: BipartiteDigraph) -> str:
    p = graph.params
    lines = [f"BRG1 {p.k_num} {p.k_den} {p.n} {p.d}"]
    lines += [" ".join(str(int(z)) for z in row) for row in graph.out]
    return "\n".join(lines) + "\n"


def _cmd_enumerate(args) -> int:
    params = _params_from_args(args)
    family = sampler.enumerate_family(params)
    print(f"count: {len(family)}")
    if args.out:
        payload = {
            "params": {"k_num": params.k_num, "k_den": params.k_den, "n": params.n, "d": params.d},
            "count": len(family),
            "graphs": [[list(map(int, row)) for row in g.out] for g in family],
        }
        graphio.write_results(payload, args.out, "json")
        print(f"wrote {args.out}")
    return 0


def _cmd_matching_sweep(args) -> int:
    k = args.k
    params_list = [validate_params(k.numerator, k.denominator, args.n, d) for d in args.d]
    seed = _resolve_seed(args)
    method = _sampler_from_args(args)
    result = experiments.sweep_matching(
        params_list,
        trials=args.trials,
        mode=args.mode,
        sampler=method,
        master_seed=seed,
        subset_policy=args.subset_policy,
        collect_trials=args.emit_trials is not None,
    )
    for row in result.rows:
        print(
            f"d={row.d} c={row.c:+.4f} p_hat={row.p_hat:.4f} "
            f"[{row.ci_low:.4f}, {row.ci_high:.4f}] ({row.successes}/{row.trials})"
        )
    meta = {"command": "matching-sweep", "sampler": method.kind, "subset_policy": args.subset_policy}
    if args.out:
        graphio.write_results(result, args.out, args.format, metadata=meta)
        print(f"wrote {args.out}")
    if args.emit_trials:
        with open(args.emit_trials, "w", encoding="utf-8") as fh:
            fh.write(graphio.trial_records_to_jsonl(result))
        print(f"wrote {args.emit_trials}")
    return 0


def _cmd_er_baseline(args) -> int:
    seed = _resolve_seed(args)
    result = experiments.er_baseline_sweep(args.n, args.c, args.trials, seed)
    for row in result.rows:
        print(
            f"c={row.c:+.3f} p_hat={row.p_hat:.4f} analytic={row.analytic:.4f} "
            f"[{row.ci_low:.4f}, {row.ci_high:.4f}]"
        )
    if args.out:
        graphio.write_results(
            result, args.out, args.format, metadata={"command": "er-baseline"}
        )
        print(f"wrote {args.out}")
    return 0


def _cmd_commutative(args) -> int:
    if args.infile:
        graph = graphio.read_graph(args.infile)
        if not isinstance(graph, LayeredGraph):
            raise ValueError(f"{args.infile} holds a single layer, not a LAY1 stack")
        seed = args.seed if args.seed is not None else 0
        report = plunnecke.check_commutative(graph, sample_edges=args.sample_edges, seed=seed)
        print(
            f"commutative: {report.commutative} "
            f"(edges checked: {report.edges_checked}, "
            f"violations: {len(report.upward_violations)} up / "
            f"{len(report.downward_violations)} down)"
        )
        if args.out:
            graphio.write_results(report, args.out, "json")
            print(f"wrote {args.out}")
        return 0
    if args.m is None or args.d is None or args.h is None:
        raise ValueError("need --m, --d and --h (or --in FILE)")
    seed = _resolve_seed(args)
    method = _sampler_from_args(args)
    reports = []
    for t in range(args.trials):
        report = experiments.commutative_trial(
            args.k, args.m, args.d, args.h, experiments.trial_seed(seed, t), sampler=method
        )
        reports.append(report)
        print(
            f"trial {t}: commutative={report.commutative} "
            f"(up {len(report.upward_violations)}, down {len(report.downward_violations)})"
        )
    frac = sum(r.commutative for r in reports) / len(reports)
    bounds = analytics.commutative_d_bounds(args.k, args.m, args.h)
    if not bounds.feasible:
        print(
            f"warning: d_high = {bounds.d_high:.2f} exceeds m = {args.m}; "
            "the commutative regime is unreachable at this m"
        )
    print(
        f"commutative fraction: {frac:.3f} over {args.trials} trials "
        f"(d_low ~ {bounds.d_low:.2f}, d_high ~ {bounds.d_high:.2f})"
    )
    if args.out:
        payload = {
            "k": {"p": args.k.numerator, "q": args.k.denominator},
            "m": args.m,
            "d": args.d,
            "h": args.h,
            "master_seed": seed,
            "trials": args.trials,
            "commutative_fraction": frac,
            "d_low": bounds.d_low,
            "d_high": bounds.d_high,
            "reports": [r.to_dict() for r in reports],
        }
        graphio.write_results(payload, args.out, "json")
        print(f"wrote {args.out}")
    return 0


def _cmd_magnification(args) -> int:
    if args.infile:
        graph = graphio.read_graph(args.infile)
        if not isinstance(graph, LayeredGraph):
            raise ValueError(f"{args.infile} holds a single layer, not a LAY1 stack")
    else:
        if args.m is None or args.d is None or args.h is None:
            raise ValueError("need --m, --d and --h (or --in FILE)")
        seed = _resolve_seed(args)
        graph = plunnecke.build_random_layered(
            args.k, args.m, args.d, args.h, seed, method=_sampler_from_args(args)
        )
    compute = (
        plunnecke.magnification_flow
        if args.algorithm == "flow"
        else plunnecke.magnification_bruteforce
    )
    levels = args.level if args.level else list(range(1, graph.h + 1))
    results = [compute(graph, i) for i in levels]
    for res in results:
        print(f"D_{res.i} = {res.value} (witness size {len(res.witness)})")
    monotone = plunnecke.plunnecke_monotone_check([r.value for r in results])
    print(f"D_i^(1/i) non-increasing: {monotone}")
    if args.out:
        payload = {
            "levels": [r.to_dict() for r in results],
            "monotone": monotone,
            "method": args.algorithm,
        }
        graphio.write_results(payload, args.out, "json")
        print(f"wrote {args.out}")
    return 0


_ANALYTIC_NEEDS = {
    "threshold-c": ("k", "n", "d"),
    "overlap-expectations": ("k", "n", "d"),
    "no-edge": ("k", "n", "d", "s"),
    "no-edge-power": ("k", "n", "d", "s", "t"),
    "isolated-prob": ("k", "n", "d"),
    "er-matching-prob": ("c",),
    "commutative-d-bounds": ("k", "m", "h"),
    "disjoint-bounds": ("k", "n", "d"),
    "failure-bound": ("k", "n", "d"),
}


def _cmd_analytic(args) -> int:
    name = args.name
    missing = [f"--{a}" for a in _ANALYTIC_NEEDS[name] if getattr(args, a) is None]
    if missing:
        raise ValueError(f"{name} needs {', '.join(missing)}")
    inputs: dict = {}
    if name in ("threshold-c", "overlap-expectations", "no-edge", "no-edge-power",
                "isolated-prob", "disjoint-bounds", "failure-bound"):
        params = _params_from_args(args)
        inputs = {"k": str(args.k), "n": args.n, "d": args.d}
    exact = None
    if name == "threshold-c":
        value = analytics.threshold_c(params).c
    elif name == "overlap-expectations":
        pair, against = analytics.overlap_expectations(params, args.b_size)
        inputs["b_size"] = args.b_size
        payload = {
            "name": name,
            "inputs": inputs,
            "pair": pair,
            "against_set": against,
            "float": {
                "pair": None if pair is None else float(pair),
                "against_set": None if against is None else float(against),
            },
        }
        return _emit_analytic(payload, args)
    elif name == "no-edge":
        exact = analytics.no_edge_exact(args.s, params, args.side, args.conditioned)
        inputs.update({"s": args.s, "side": args.side, "conditioned": args.conditioned})
        value = float(exact)
    elif name == "no-edge-power":
        bound = analytics.no_edge_upper(args.s, args.t, params, args.conditioned)
        inputs.update({"s": args.s, "t": args.t, "conditioned": args.conditioned})
        exact = bound.upper_exact
        payload = {
            "name": name,
            "inputs": inputs,
            "exact": exact,
            "float": bound.upper,
            "exp_form": bound.exp_form,
        }
        return _emit_analytic(payload, args)
    elif name == "isolated-prob":
        value, in_regime = analytics.isolated_prob_asymptotic(params)
        inputs["asymptotic_regime"] = in_regime
    elif name == "er-matching-prob":
        inputs = {"c": args.c}
        value = analytics.er_matching_prob(args.c)
    elif name == "commutative-d-bounds":
        bounds = analytics.commutative_d_bounds(args.k, args.m, args.h)
        payload = {
            "name": name,
            "inputs": {"k": str(args.k), "m": args.m, "h": args.h},
            "d_low": bounds.d_low,
            "d_high": bounds.d_high,
            "feasible": bounds.feasible,
        }
        return _emit_analytic(payload, args)
    elif name == "disjoint-bounds":
        bound = analytics.disjoint_neighborhood_bounds(params)
        payload = {
            "name": name,
            "inputs": inputs,
            "lower": bound.lower,
            "upper": bound.upper,
            "lower_exact": bound.lower_exact,
            "upper_exact": bound.upper_exact,
        }
        return _emit_analytic(payload, args)
    elif name == "failure-bound":
        value = analytics.matching_failure_bound(params)
    else:
        raise ValueError(f"unknown analytic {name!r}")
    payload = {"name": name, "inputs": inputs, "float": value}
    if exact is not None:
        payload["exact"] = exact
    return _emit_analytic(payload, args)


def _emit_analytic(payload: dict, args) -> int:
    text = graphio.results_to_json(payload)
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    return 0


def _cmd_stats(args) -> int:
    params = _params_from_args(args)
    seed = _resolve_seed(args)
    method = None
    if args.sampler:
        method = _sampler_from_args(args)
    rows = experiments.estimate_local_statistics(
        params,
        trials=args.trials,
        master_seed=seed,
        s_cond=args.s_cond,
        s_uncond=args.s_uncond,
        b_size=args.b_size,
        sampler=method,
    )
    for row in rows:
        mark = "ok " if row.passed else "FAIL"
        exact = f" = {row.expected_exact}" if row.expected_exact else ""
        print(
            f"[{mark}] {row.name}: empirical {row.empirical:.6g} vs expected "
            f"{row.expected:.6g}{exact}; CI [{row.ci_low:.6g}, {row.ci_high:.6g}]"
        )
    if args.out:
        payload = {
            "params": {"k": str(args.k), "n": args.n, "d": args.d},
            "trials": args.trials,
            "master_seed": seed,
            "rows": [vars(r) for r in rows],
        }
        graphio.write_results(payload, args.out, "json")
        print(f"wrote {args.out}")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="64-bit master seed (random if omitted)")
    p.add_argument("--out", type=str, default=None, help="machine-readable output path")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=_parse_k, required=True, help="k as 'p' or 'p/q'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bireg",
        description="Random biregular bipartite graph workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample one graph and write BRG1")
    _add_params(p)
    p.add_argument("--method", choices=["pairing", "switch", "circulant"], default="switch")
    p.add_argument("--steps", type=int, default=None, help="accepted switches (switch chain)")
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("enumerate", help="exhaustively enumerate a tiny family")
    _add_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("matching-sweep", help="matching probability across d values")
    p.add_argument("--k", type=_parse_k, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=_parse_int_list, required=True, help="comma-separated d values")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--mode", choices=["AB", "AGamma"], required=True)
    p.add_argument("--sampler", choices=["pairing", "switch", "circulant"], default="switch")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--subset-policy", choices=["prefix", "random"], default="prefix")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--emit-trials", type=str, default=None, help="trial-level JSONL path")
    _add_common(p)
    p.set_defaults(func=_cmd_matching_sweep)

    p = sub.add_parser("er-baseline", help="independent-edge baseline sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=_parse_float_list, required=True, help="comma-separated c values")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)
    p.set_defaults(func=_cmd_er_baseline)

    p = sub.add_parser("commutative", help="build and certify layered graphs")
    p.add_argument("--in", dest="infile", type=str, default=None, help="certify a LAY1 file")
    p.add_argument("--k", type=_parse_k, default=Fraction(1))
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--sampler", choices=["pairing", "switch", "circulant"], default="switch")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--sample-edges", type=int, default=None,
                   help="check only this many random edges per layer and condition")
    _add_common(p)
    p.set_defaults(func=_cmd_commutative)

    p = sub.add_parser("magnification", help="magnification ratios D_i")
    p.add_argument("--in", dest="infile", type=str, default=None, help="LAY1 file")
    p.add_argument("--k", type=_parse_k, default=Fraction(1))
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--sampler", choices=["pairing", "switch", "circulant"], default="switch")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--level", type=_parse_int_list, default=None,
                   help="comma-separated levels i (default: all)")
    p.add_argument("--algorithm", choices=["flow", "bruteforce"], default="flow")
    _add_common(p)
    p.set_defaults(func=_cmd_magnification)

    p = sub.add_parser("analytic", help="print a closed-form oracle as JSON")
    p.add_argument("--name", required=True, choices=[
        "threshold-c", "overlap-expectations", "no-edge", "no-edge-power",
        "isolated-prob", "er-matching-prob", "commutative-d-bounds",
        "disjoint-bounds", "failure-bound",
    ])
    p.add_argument("--k", type=_parse_k, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--b-size", type=int, default=None)
    p.add_argument("--side", choices=["in", "out"], default="in")
    p.add_argument("--conditioned", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("stats", help="local statistics vs exact oracles")
    _add_params(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--s-cond", type=int, default=None)
    p.add_argument("--s-uncond", type=int, default=None)
    p.add_argument("--b-size", type=int, default=None)
    p.add_argument("--sampler", choices=["pairing", "switch", "circulant"], default=None)
    p.add_argument("--steps", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    return parser


def run_cli(argv=None) -> int:
    """Dispatch to library operations; 0 ok, 2 validation error, 1 runtime error."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (BiregError, ValueError, TypeError, AttributeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures stay non-zero, never a traceback
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
