"""Result files: JSON-lines records plus a plain-text summary.

The first line is a header holding the timestamp and every wall-clock
measurement; all later lines are deterministic given the configuration.
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from pathlib import Path

from .experiments import ExperimentResult


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _line(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"))


def result_lines(res: ExperimentResult, timestamp: str | None = None) -> list[str]:
    cfg = res.cfg
    h = cfg.config_hash()
    ts = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    lines = [_line({"kind": "header", "timestamp": ts, "timings": res.timings})]
    lines.append(_line({"kind": "config", "config_hash": h, "config": cfg.canonical()}))
    for r in res.replicates:
        lines.append(_line({
            "kind": "replicate", "config_hash": h, "condition": r.condition, "replicate": r.replicate,
            "k_hat": r.k_hat, "per_l_scores": r.per_l_scores, "l_min": cfg.l_min, "error": r.error,
        }))
    for rec in res.records:
        lines.append(_line({
            "kind": "aggregate", "config_hash": h, "condition": rec.condition, "penalty": rec.penalty,
            "p_detect": rec.p_detect, "histogram": rec.k_hat_histogram, "mc_runs": rec.mc_runs,
        }))
    for row in res.tables:
        lines.append(_line({"kind": "table", "config_hash": h, **row}))
    return lines


def _fmt_cond(cond: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in cond.items())


def summary_text(res: ExperimentResult) -> str:
    cfg = res.cfg
    out = [f"experiment: {cfg.experiment}  EM: {cfg.em_loss}  BIC: {cfg.bic_loss}  penalty: {cfg.penalty}",
           f"seed: {cfg.seed}  runs per condition: {cfg.mc_runs}  l in [{cfg.l_min}, {cfg.l_max}]", ""]
    for rec in res.records:
        hist = " ".join(f"{k}:{v}" for k, v in rec.k_hat_histogram.items())
        out.append(f"{_fmt_cond(rec.condition):<28} {rec.penalty:<10} p_detect={rec.p_detect:6.3f}  [{hist}]")
    for row in res.tables:
        out.append("")
        out.append(f"{_fmt_cond(row['condition'])}: all criteria select the true K in {row['all_select_true_k']} runs")
        for p, curve in row["mean_scores"].items():
            vals = " ".join("   n/a" if v is None else f"{v:9.2f}" for v in curve)
            out.append(f"  {p:<10} {vals}")
    if "slopes" in res.timings:
        out.append("")
        for pt in res.timings["points"]:
            secs = " ".join(f"{p}={s:.3f}s" for p, s in pt["mean_s"].items())
            out.append(f"{_fmt_cond(pt['condition']):<20} {secs}")
        for p, s in res.timings["slopes"].items():
            out.append(f"log-log slope vs {res.timings['axis']} ({p}): {s:.3f}")
    return "\n".join(out) + "\n"


def write_results(res: ExperimentResult, path) -> tuple[Path, Path]:
    """Write ``path`` (JSON lines) and ``<path>.summary.txt``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(result_lines(res)) + "\n")
    summary = path.with_name(path.name + ".summary.txt")
    summary.write_text(summary_text(res))
    return path, summary
