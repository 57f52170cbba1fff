"""Report serialization: JSON, markdown and plain-text tables."""

from __future__ import annotations

import json
from typing import List, Sequence

FORMATS = ("json", "markdown", "text")

_DELTA_ROWS = (("# of eqn", "num_equations"), ("dim(u)", "dim_u"), ("rk(A)", "rank"), ("Δ", "delta"))
_SYMBOL_ROWS = (("# of eqn", "num_equations"), ("dim(v)", "dim_v"), ("rk", "rank"), ("Δ", "delta"))


def strip_timing(report: dict) -> dict:
    """Copy of ``report`` without the run-dependent timing block."""
    return {k: v for k, v in report.items() if k != "timing"}


def dumps_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _grid(levels: Sequence[dict], spec) -> List[List[str]]:
    grid = [["n"] + [str(r["n"]) for r in levels]]
    for label, key in spec:
        grid.append([label] + [str(r[key]) for r in levels])
    return grid


def _text_table(grid: List[List[str]]) -> str:
    widths = [max(len(row[i]) for row in grid) for i in range(len(grid[0]))]
    lines = []
    for row in grid:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def _markdown_table(grid: List[List[str]]) -> str:
    lines = ["| " + " | ".join(grid[0]) + " |", "|" + "---|" * len(grid[0])]
    lines += ["| " + " | ".join(row) + " |" for row in grid[1:]]
    return "\n".join(lines)


def _point_text(config: dict) -> str:
    return "(" + ", ".join(config["point"]) + ")"


def render_tables(report: dict, markdown: bool = False) -> str:
    cfg = report["config"]
    table = _markdown_table if markdown else _text_table
    head = (lambda s: f"### {s}") if markdown else (lambda s: s)
    out = [head(f"Metric {cfg['metric']}, degree {cfg['degree']}, point {_point_text(cfg)}")]
    out.append(f"rank method: {cfg['rank_method']}; max prolongation: {cfg['max_prolong']}")
    if not report["parity_results"]:
        out.append("no parity selected")
    for pr in report["parity_results"]:
        name = pr["parity"]
        dt = pr["delta_table"]
        out.append("")
        out.append(head(f"S_{name}: prolongation table (trivial kernel dimension {dt['trivial_dim']})"))
        out.append(table(_grid(dt["rows"], _DELTA_ROWS)))
        ft = pr["finite_type"]
        out.append("")
        ell = ft["ell"] if ft["ell"] is not None else "not reached"
        out.append(head(f"S_{name}: symbol table (finite type level ell = {ell})"))
        out.append(table(_grid(ft["rows"], _SYMBOL_ROWS)))
        v = pr["verdict"]
        out.append("")
        out.append(f"verdict ({name}): {v['outcome']}; {v['justification']['reason']}")
        if v["outcome"] == "CandidateKernel":
            out.append(f"kernel dimension {v['kernel_dimension']}, excess over trivial {v['excess_over_trivial']}")
        for note in dt["notes"]:
            out.append(f"note: {note}")
    out.append("")
    out.append(f"overall: {report['overall']['outcome']} (exit code {report['overall']['exit_code']})")
    geo = report.get("geodesic_sanity")
    if geo:
        out.append(f"geodesic check [{geo['label']}]: {geo['steps']} RK4 steps of {geo['step_size']}, "
                   f"relative H drift {geo['relative_drift_H']:.3e}, cyclic momenta drift "
                   + ", ".join(f"{k}={v}" for k, v in sorted(geo["drift_cyclic_momenta"].items())))
    for note in report.get("notes", []):
        out.append(f"note: {note}")
    return "\n".join(out) + "\n"


def emit_report(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        return dumps_json(report).encode()
    if fmt == "markdown":
        return render_tables(report, markdown=True).encode()
    if fmt == "text":
        return render_tables(report).encode()
    raise ValueError(f"unknown report format {fmt!r}; choose from {', '.join(FORMATS)}")
