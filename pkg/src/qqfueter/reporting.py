"""Report artifacts: delimited rows, a JSON summary, and rendered figures.

The CSV is the machine contract and must be byte-identical across runs
of the same configuration, so it carries no wall-clock values; the
measured per-case and total timings live in the JSON summary, and the
CSV ``seconds`` column holds a fixed placeholder (the same move
reproducible builds make with timestamps).
"""

from __future__ import annotations

import json
import math
import os

from .harness import SweepResult, VerificationReport

CSV_HEADER = "case_id,point,lhs,rhs,abs_residual,rel_residual,verdict,seconds"


def _fmt_float(v: float) -> str:
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return format(float(v), ".17g")


def _fmt_quat(arr) -> str:
    return "[" + " ".join(_fmt_float(v) for v in arr) + "]"


def render_csv(report: VerificationReport) -> str:
    lines = [CSV_HEADER]
    for row in report.rows:
        lines.append(
            ",".join(
                [
                    row.case_id,
                    row.point,
                    _fmt_quat(row.lhs),
                    _fmt_quat(row.rhs),
                    _fmt_float(row.abs_residual),
                    _fmt_float(row.rel_residual),
                    row.verdict,
                    "0.000",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def summary_dict(report: VerificationReport) -> dict:
    cases = []
    for res in report.results:
        gated = [r for r in res.rows if math.isfinite(r.tolerance)]
        worst = max((r.rel_residual for r in gated), default=float("nan"))
        verdicts = {r.verdict for r in res.rows}
        if "ERROR" in verdicts:
            verdict = "ERROR"
        elif "FAIL" in verdicts:
            verdict = "FAIL"
        elif verdicts == {"SKIPPED-HYPOTHESIS"}:
            verdict = "SKIPPED-HYPOTHESIS"
        else:
            verdict = "PASS"
        cases.append(
            {
                "case_id": res.case_id,
                "rows": len(res.rows),
                "max_rel_residual": None if math.isnan(worst) else worst,
                "verdict": verdict,
                "seconds": round(res.seconds, 3),
                "notes": sorted({r.note for r in res.rows if r.note}),
            }
        )
    return {
        "provenance": report.provenance,
        "cases": cases,
        "total_seconds": round(report.total_seconds, 3),
        "all_pass": report.all_pass,
    }


def write_report(report: VerificationReport, report_dir) -> dict:
    """Write report.csv, summary.json, and the residual chart; return paths."""
    os.makedirs(report_dir, exist_ok=True)
    csv_path = os.path.join(report_dir, "report.csv")
    json_path = os.path.join(report_dir, "summary.json")
    png_path = os.path.join(report_dir, "residuals.png")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_csv(report))
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summary_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    try:
        render_residual_chart(report, png_path)
    except Exception:  # figures are additive; never fail the run over them
        png_path = None
    return {"csv": csv_path, "summary": json_path, "figure": png_path}


def render_residual_chart(report: VerificationReport, path) -> None:
    """Log-scale bar chart: worst relative residual per case vs tolerance."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels, residuals, tols, colors = [], [], [], []
    for res in report.results:
        gated = [r for r in res.rows if math.isfinite(r.tolerance) and math.isfinite(r.rel_residual)]
        if not gated:
            continue
        worst = max(gated, key=lambda r: r.rel_residual / r.tolerance)
        labels.append(res.case_id)
        residuals.append(max(worst.rel_residual, 1e-18))
        tols.append(worst.tolerance)
        colors.append("tab:green" if worst.verdict == "PASS" else "tab:red")

    fig, ax = plt.subplots(figsize=(9, 0.5 * max(4, len(labels)) + 1.5))
    ypos = range(len(labels))
    ax.barh(ypos, residuals, color=colors, alpha=0.8)
    for y, tol in zip(ypos, tols):
        ax.plot([tol, tol], [y - 0.4, y + 0.4], color="black", lw=1.2)
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(labels)
    ax.set_xscale("log")
    ax.set_xlabel("worst relative residual (bar) vs tolerance (tick)")
    ax.set_title("identity residuals")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def write_sweep(sweep: SweepResult, report_dir) -> dict:
    """Write the sweep table (CSV) and its log-log figure."""
    os.makedirs(report_dir, exist_ok=True)
    csv_path = os.path.join(report_dir, f"sweep_{sweep.case_id}.csv")
    png_path = os.path.join(report_dir, f"sweep_{sweep.case_id}.png")
    lines = ["level,parameter,residual"]
    for row in sweep.rows:
        lines.append(
            f"{row['level']},{_fmt_float(row['parameter'])},{_fmt_float(row['residual'])}"
        )
    lines.append(f"fitted_order,{_fmt_float(sweep.fitted_order)},")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    try:
        render_sweep_figure(sweep, png_path)
    except Exception:
        png_path = None
    return {"csv": csv_path, "figure": png_path}


def render_sweep_figure(sweep: SweepResult, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    params = [row["parameter"] for row in sweep.rows]
    residuals = [max(row["residual"], 1e-18) for row in sweep.rows]
    fig, ax = plt.subplots(figsize=(6, 4.2))
    ax.loglog(params, residuals, "o-", label="residual")
    ax.set_xlabel("refinement parameter")
    ax.set_ylabel("residual")
    ax.set_title(f"{sweep.case_id}: fitted order {sweep.fitted_order:.2f}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
