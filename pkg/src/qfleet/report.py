"""Report writers: delimited data files plus optional rendered figures."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .vqe import BenchmarkReport  # noqa: E402


def write_benchmark_report(report: BenchmarkReport, base: str | Path,
                           plot: bool = False) -> list[Path]:
    """Write <base>.json and <base>.csv, plus <base>.png when plot is set."""
    base = Path(base)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []

    json_path = base.with_suffix(".json")
    json_path.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n",
                         encoding="utf-8")
    written.append(json_path)

    csv_path = base.with_suffix(".csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["workers", "wall_s", "exec_s", "overhead_s",
                         "circuits_per_worker", "energy", "speedup"])
        for r in report.rows:
            writer.writerow([r.workers, f"{r.wall_seconds:.6f}",
                             f"{r.execution_seconds:.6f}",
                             f"{r.pre_post_seconds:.6f}",
                             "/".join(str(c) for c in r.circuits_per_worker),
                             f"{r.energy:.12g}", f"{r.speedup:.3f}"])
    written.append(csv_path)

    if plot:
        png_path = base.with_suffix(".png")
        plot_benchmark(report, png_path)
        written.append(png_path)
    return written


def plot_benchmark(report: BenchmarkReport, path: str | Path) -> None:
    """Stacked execution/overhead bars per worker count, circuits on a twin axis."""
    ks = [str(r.workers) for r in report.rows]
    exec_s = [r.execution_seconds for r in report.rows]
    over_s = [r.pre_post_seconds for r in report.rows]
    max_circ = [max(r.circuits_per_worker) for r in report.rows]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(ks, exec_s, label="circuit execution", color="tab:blue")
    ax.bar(ks, over_s, bottom=exec_s, label="pre/post processing", color="tab:orange")
    ax.set_xlabel("virtual QPUs")
    ax.set_ylabel("time (s)")
    ax.set_title(f"{report.num_qubits}-qubit, {report.num_terms}-term "
                 f"energy evaluation ({report.mode} mode)")
    ax2 = ax.twinx()
    ax2.plot(ks, max_circ, "k.--", label="circuits per QPU")
    ax2.set_ylabel("circuits per QPU")
    ax2.set_ylim(bottom=0)
    handles1, labels1 = ax.get_legend_handles_labels()
    handles2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(handles1 + handles2, labels1 + labels2, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_scan_report(rows: list[dict], base: str | Path, as_json: bool = False,
                      plot: bool = False) -> list[Path]:
    """Scan rows: {theta, state, counts, error}. CSV always, JSON/PNG on request."""
    base = Path(base)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = base.with_suffix(".csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "state", "counts", "error"])
        for row in rows:
            writer.writerow([f"{row['theta']:.12g}", row["state"],
                             json.dumps(row["counts"], sort_keys=True)
                             if row["counts"] else "",
                             row.get("error") or ""])
    written.append(csv_path)

    if as_json:
        json_path = base.with_suffix(".json")
        json_path.write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
        written.append(json_path)

    if plot:
        png_path = base.with_suffix(".png")
        plot_scan(rows, png_path)
        written.append(png_path)
    return written


def plot_scan(rows: list[dict], path: str | Path, max_keys: int = 4) -> None:
    """Outcome frequencies against the scanned parameter."""
    ok = [r for r in rows if r["counts"]]
    totals: dict[str, int] = {}
    for r in ok:
        for key, cnt in r["counts"].items():
            totals[key] = totals.get(key, 0) + cnt
    top = sorted(totals, key=totals.get, reverse=True)[:max_keys]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    thetas = [r["theta"] for r in ok]
    for key in top:
        shots = [sum(r["counts"].values()) for r in ok]
        freqs = [r["counts"].get(key, 0) / s for r, s in zip(ok, shots)]
        ax.plot(thetas, freqs, marker=".", label=f'"{key}"')
    ax.set_xlabel("theta (rad)")
    ax.set_ylabel("outcome frequency")
    ax.set_title("parameter scan")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_vqe_report(result, base: str | Path, plot: bool = False) -> list[Path]:
    """Write <base>.json (full result) and <base>.csv (per-evaluation energies)."""
    base = Path(base)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []

    payload = {
        "opt_val": result.opt_val,
        "opt_params": result.opt_params,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "energies": result.energies,
        "wall_seconds": result.wall_seconds,
        "execution_seconds": result.execution_seconds,
        "pre_post_seconds": result.pre_post_seconds,
    }
    json_path = base.with_suffix(".json")
    json_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    written.append(json_path)

    csv_path = base.with_suffix(".csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["evaluation", "energy", "best_so_far"])
        best = float("inf")
        for i, e in enumerate(result.energies):
            best = min(best, e)
            writer.writerow([i, f"{e:.12g}", f"{best:.12g}"])
    written.append(csv_path)

    if plot:
        png_path = base.with_suffix(".png")
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(result.energies, ".", alpha=0.6, label="evaluation")
        best_curve = []
        best = float("inf")
        for e in result.energies:
            best = min(best, e)
            best_curve.append(best)
        ax.plot(best_curve, "-", label="best so far")
        ax.set_xlabel("objective evaluation")
        ax.set_ylabel("energy")
        ax.set_title("VQE convergence")
        ax.legend()
        fig.tight_layout()
        fig.savefig(png_path, dpi=150)
        plt.close(fig)
        written.append(png_path)
    return written
