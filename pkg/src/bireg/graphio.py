"""Graph text formats and result persistence.

BRG1 (one biregular layer):
    BRG1 <k_num> <k_den> <n> <d>
    <kd sorted 0-based out-neighbors of y_0>
    ...                                  (n lines total)

LAY1 (a stack of biregular layers):
    LAY1 <k_num> <k_den> <m> <h>
    <h consecutive BRG1 blocks; block i is the X_{i-1} -> X_i layer>

Readers reject any degree or header violation exactly.  Result writers are
bit-stable: no timestamps in data rows; run metadata goes into '#' comment
lines at the top.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import IO

import numpy as np

from .errors import DegreeViolation, ParseError
from .experiments import SweepResult
from .graph import BipartiteDigraph, LayeredGraph
from .params import validate_params


def write_graph(graph: BipartiteDigraph, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        _write_brg1(graph, fh)


def _write_brg1(graph: BipartiteDigraph, fh: IO[str]) -> None:
    p = graph.params
    fh.write(f"BRG1 {p.k_num} {p.k_den} {p.n} {p.d}\n")
    for row in graph.out:
        fh.write(" ".join(str(int(z)) for z in row) + "\n")


def write_layered(graph: LayeredGraph, path: str) -> None:
    """LAY1 needs biregular layers with shared (k, d) model metadata."""
    if graph.k_num is None or graph.k_den is None or graph.d is None:
        raise DegreeViolation(
            "layered graph lacks uniform (k, d) metadata; only model-built "
            "stacks serialize to LAY1"
        )
    k = Fraction(graph.k_num, graph.k_den)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"LAY1 {k.numerator} {k.denominator} {graph.layer_sizes[0]} {graph.h}\n")
        for i in range(1, graph.h + 1):
            blk = graph.block(i)
            params = validate_params(k.numerator, k.denominator, blk.n_from, graph.d)
            rows = np.asarray(
                [blk.row(u) for u in range(blk.n_from)], dtype=np.int32
            ).reshape(blk.n_from, -1)
            layer = BipartiteDigraph(params, rows)  # re-validates biregularity
            _write_brg1(layer, fh)


class _Lines:
    def __init__(self, path: str):
        with open(path, "r", encoding="ascii") as fh:
            self.lines = fh.read().splitlines()
        self.pos = 0

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.lines):
            raise ParseError(len(self.lines) + 1, f"unexpected end of file, wanted {what}")
        self.pos += 1
        return self.pos, self.lines[self.pos - 1]

    def done(self) -> bool:
        return self.pos >= len(self.lines)


def _parse_ints(lineno: int, text: str, count: int | None, what: str) -> list[int]:
    parts = text.split()
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ParseError(lineno, f"non-integer token in {what}: {text!r}") from None
    if count is not None and len(values) != count:
        raise ParseError(lineno, f"{what}: expected {count} integers, got {len(values)}")
    return values


def _read_brg1_block(lines: _Lines) -> BipartiteDigraph:
    lineno, header = lines.next("BRG1 header")
    parts = header.split()
    if len(parts) != 5 or parts[0] != "BRG1":
        raise ParseError(lineno, f"bad BRG1 header: {header!r}")
    k_num, k_den, n, d = _parse_ints(lineno, " ".join(parts[1:]), 4, "BRG1 header")
    try:
        params = validate_params(k_num, k_den, n, d)
    except ValueError as exc:
        raise ParseError(lineno, f"invalid parameters: {exc}") from exc
    rows = np.empty((n, params.kd), dtype=np.int32)
    for y in range(n):
        lineno, text = lines.next(f"adjacency row {y}")
        values = _parse_ints(lineno, text, params.kd, f"row for y{y}")
        rows[y] = values
    try:
        return BipartiteDigraph(params, rows)
    except (DegreeViolation, ValueError) as exc:
        raise DegreeViolation(f"{exc}") from exc


def read_graph(path: str) -> BipartiteDigraph | LayeredGraph:
    """Parse a BRG1 or LAY1 file; every invariant is re-checked exactly."""
    lines = _Lines(path)
    if not lines.lines:
        raise ParseError(1, "empty file")
    first = lines.lines[0].split()
    if first and first[0] == "BRG1":
        graph = _read_brg1_block(lines)
        if not lines.done():
            raise ParseError(lines.pos + 1, "trailing content after BRG1 block")
        return graph
    if first and first[0] == "LAY1":
        lineno, header = lines.next("LAY1 header")
        parts = header.split()
        if len(parts) != 5:
            raise ParseError(lineno, f"bad LAY1 header: {header!r}")
        k_num, k_den, m, h = _parse_ints(lineno, " ".join(parts[1:]), 4, "LAY1 header")
        if h < 1 or m < 1 or k_num < 1 or k_den < 1:
            raise ParseError(lineno, "LAY1 header values must be positive")
        k = Fraction(k_num, k_den)
        graphs = []
        expected_n = m
        d_seen: int | None = None
        for i in range(1, h + 1):
            block_line = lines.pos + 1
            layer = _read_brg1_block(lines)
            p = layer.params
            if Fraction(p.k_num, p.k_den) != k:
                raise ParseError(block_line, f"layer {i}: k mismatch with LAY1 header")
            if p.n != expected_n:
                raise ParseError(
                    block_line, f"layer {i}: n = {p.n}, expected {expected_n}"
                )
            if d_seen is None:
                d_seen = p.d
            elif p.d != d_seen:
                raise ParseError(block_line, f"layer {i}: d = {p.d}, expected {d_seen}")
            expected_n = p.kn
            graphs.append(layer)
        if not lines.done():
            raise ParseError(lines.pos + 1, "trailing content after LAY1 blocks")
        return LayeredGraph.from_graphs(graphs)
    raise ParseError(1, f"unknown format marker: {lines.lines[0]!r}")


# --- result persistence -------------------------------------------------------

SWEEP_CSV_COLUMNS = (
    "mode,k_num,k_den,n,d,c,trials,successes,p_hat,ci_low,ci_high,"
    "mean_a_minus,mean_a_plus,mean_q"
)


def _fmt(value, sig: int = 6) -> str:
    """Locale-free cell formatting; probabilities/means at 6 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{sig}g}"
    return str(value)


def sweep_to_csv(result: SweepResult, metadata: dict | None = None) -> str:
    """Deterministic CSV text for a sweep; '#' metadata lines then the table."""
    out = []
    meta = {"mode": result.mode, "master_seed": result.master_seed, "z": result.z}
    if metadata:
        meta.update(metadata)
    for key in sorted(meta):
        out.append(f"# {key} = {_fmt(meta[key])}")
    out.append(SWEEP_CSV_COLUMNS)
    for r in result.rows:
        out.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.mode,
                    r.k_num,
                    r.k_den,
                    r.n,
                    r.d,
                    r.c,
                    r.trials,
                    r.successes,
                    r.p_hat,
                    r.ci_low,
                    r.ci_high,
                    r.mean_a_minus,
                    r.mean_a_plus,
                    r.mean_q,
                )
            )
        )
    return "\n".join(out) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return {"p": obj.numerator, "q": obj.denominator}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def results_to_json(payload) -> str:
    """Deterministic JSON text (sorted keys, fractions as p/q objects)."""
    if hasattr(payload, "to_dict"):
        payload = payload.to_dict()
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"


def write_results(result, path: str, format: str = "csv", metadata: dict | None = None) -> None:
    """Persist a result; identical inputs produce byte-identical files."""
    if format == "csv":
        if not isinstance(result, SweepResult):
            raise ValueError(f"csv output only supports sweeps, got {type(result).__name__}")
        text = sweep_to_csv(result, metadata)
    elif format == "json":
        payload = result
        if isinstance(result, SweepResult):
            payload = result.to_dict()
            if metadata:
                payload = {**payload, "metadata": dict(sorted(metadata.items()))}
        elif metadata:
            if hasattr(payload, "to_dict"):
                payload = payload.to_dict()
            payload = {**payload, "metadata": dict(sorted(metadata.items()))}
        text = results_to_json(payload)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def trial_records_to_jsonl(result: SweepResult) -> str:
    """One JSON object per trial, row-major, for --emit-trials."""
    if result.trial_records is None:
        raise ValueError("sweep was run without trial collection")
    lines = []
    for row, records in zip(result.rows, result.trial_records):
        for t, rec in enumerate(records):
            obj = {"mode": row.mode, "n": row.n, "d": row.d, "trial": t, **rec}
            lines.append(json.dumps(obj, sort_keys=True, default=_json_default))
    return "\n".join(lines) + "\n"
