"""Human-readable reports and figures from a result bundle.

Reads the manifest + CSVs written by ``run_experiment`` and emits a
markdown report plus standalone SVG figures: the log-log degree CCDF with
the predicted slope overlaid, max-degree trajectories across checkpoints,
and a QQ plot of point-process suprema against the Frechet-type limit.
Sections whose tables are missing degrade to "no data" rather than fail.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["emit_report"]


def _read_csv(path: Path):
    if not path.exists():
        return None
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    return rows


def _degree_figure(rows, summary, out: Path) -> str:
    by_k: dict = {}
    n_final = max(int(r["n"]) for r in rows)
    for r in rows:
        if int(r["n"]) == n_final:
            by_k.setdefault(int(r["k"]), []).append(float(r["p_n_k"]))
    ks = np.array(sorted(by_k))
    pk = np.array([np.mean(by_k[k]) for k in ks])
    ccdf = pk[::-1].cumsum()[::-1]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(np.maximum(ks, 1), ccdf, "o", ms=3, label=f"empirical CCDF (n={n_final})")
    tau = None
    limit = summary.get("limit_pk")
    if limit:
        lk = np.array(sorted(int(k) for k in limit))
        lp = np.array([limit[str(k)] for k in lk])
        ax.loglog(np.maximum(lk, 1), lp[::-1].cumsum()[::-1], "-", label="limit p(k) CCDF")
    if summary.get("predicted_exponent"):
        tau = float(summary["predicted_exponent"])
    if tau and len(ks) > 3:
        anchor = max(ccdf[min(3, len(ccdf) - 1)], 1e-12)
        kk = np.array([max(ks[3], 1), max(ks[-1], 2)], dtype=float)
        ax.loglog(kk, anchor * (kk / kk[0]) ** (-(tau - 1.0)), "--",
                  label=f"slope -(tau-1), tau={tau:g}")
    ax.set_xlabel("degree k")
    ax.set_ylabel("P(Z >= k)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    name = "degree_ccdf.svg"
    fig.savefig(out / name)
    plt.close(fig)
    return name


def _max_degree_figure(rows, out: Path) -> str:
    by_rep: dict = {}
    for r in rows:
        by_rep.setdefault(int(r["replication"]), []).append((int(r["n"]), int(r["max_Z"])))
    fig, ax = plt.subplots(figsize=(5, 4))
    for rep, pts in sorted(by_rep.items()):
        pts.sort()
        ax.loglog([p[0] for p in pts], [max(p[1], 1) for p in pts], "-", lw=0.7, alpha=0.6)
    ax.set_xlabel("n")
    ax.set_ylabel("max in-degree")
    fig.tight_layout()
    name = "max_degree_trajectories.svg"
    fig.savefig(out / name)
    plt.close(fig)
    return name


def _ppp_qq_figure(rows, summary, out: Path) -> str:
    values = np.sort(np.array([float(r["sup_value"]) for r in rows]))
    values = values[values > 0]
    name = "ppp_qq.svg"
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    g01 = summary.get("g01")
    alpha = summary.get("alpha")
    if g01 and alpha and len(values):
        q = (np.arange(1, len(values) + 1) - 0.5) / len(values)
        theo = (g01 / -np.log(q)) ** (1.0 / (alpha - 1.0))
        ax.loglog(theo, values, ".", ms=2)
        lim = [min(theo.min(), values.min()), max(theo.max(), values.max())]
        ax.loglog(lim, lim, "k--", lw=0.8)
        ax.set_xlabel("limit-law quantile")
        ax.set_ylabel("sample quantile")
    else:
        ax.text(0.5, 0.5, "no data", ha="center")
    fig.tight_layout()
    fig.savefig(out / name)
    plt.close(fig)
    return name


def _summary_table(summary: dict) -> list[str]:
    lines = ["| key | value |", "|---|---|"]
    for k in sorted(summary):
        v = summary[k]
        if isinstance(v, dict):
            continue
        if isinstance(v, list):
            if len(v) > 8:
                continue
            v = ", ".join(f"{x:.4g}" if isinstance(x, float) else str(x) for x in v)
        if isinstance(v, float):
            v = f"{v:.6g}"
        lines.append(f"| {k} | {v} |")
    return lines


def emit_report(bundle_dir, report_name: str = "report.md") -> Path:
    """Render report.md plus figures inside the bundle directory."""
    out = Path(bundle_dir)
    manifest_path = out / "manifest.json"
    summary_path = out / "summary.json"
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}
    summary = json.loads(summary_path.read_text()) if summary_path.exists() else {}

    lines = ["# paflab result report", ""]
    cfg = manifest.get("config", {})
    if cfg:
        lines += [f"experiment: **{cfg.get('experiment')}**",
                  f"model: {cfg.get('model')}", f"fitness: {cfg.get('fitness')}",
                  f"replications: {cfg.get('replications')}, "
                  f"n_target: {cfg.get('n_target')}, master_seed: {cfg.get('master_seed')}", ""]
    missing = []

    lines += ["## Summary", ""]
    lines += _summary_table(summary) if summary else ["no data"]
    lines.append("")

    deg_rows = _read_csv(out / "degree_dist.csv")
    lines += ["## Degree distribution", ""]
    if deg_rows:
        lines.append(f"![degree CCDF]({_degree_figure(deg_rows, summary, out)})")
    else:
        lines.append("no data")
        missing.append("degree_dist.csv")
    lines.append("")

    md_rows = _read_csv(out / "max_degree.csv")
    lines += ["## Maximum degree", ""]
    if md_rows:
        lines.append(f"![max degree]({_max_degree_figure(md_rows, out)})")
    else:
        lines.append("no data")
        missing.append("max_degree.csv")
    lines.append("")

    ppp_rows = _read_csv(out / "ppp.csv")
    lines += ["## Point-process limit", ""]
    if ppp_rows:
        lines.append(f"![qq plot]({_ppp_qq_figure(ppp_rows, summary, out)})")
    else:
        lines.append("no data")
        missing.append("ppp.csv")
    lines.append("")

    if missing:
        lines += ["## Missing tables", ""] + [f"- {m}" for m in missing] + [""]

    path = out / report_name
    path.write_text("\n".join(lines))
    return path
