#!/usr/bin/env python3
"""Plots for alertforge evaluation artifacts.

Reads the machine-first outputs (report JSON, training-log CSV, stage CSV)
and renders matplotlib figures next to them.

Usage:
  python3 scripts/plot_report.py out/10.0.0.22.wgan_gp.report.json
  python3 scripts/plot_report.py --training-log out/10.0.0.22.wgan_gp.training_log.csv
"""

import argparse
import csv
import json
import os
import sys

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # pragma: no cover
    sys.exit("matplotlib is required for plotting")


def plot_report(path: str) -> None:
    with open(path) as fh:
        report = json.load(fh)
    stem = path[: -len(".report.json")] if path.endswith(".report.json") else path

    labels = [row["features"] for row in report["scores"]]
    values = [row["g"] for row in report["scores"]]
    errors = [row["std"] for row in report["scores"]]
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.bar(range(len(labels)), values, yerr=errors, color="#4878a8")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylabel("histogram intersection")
    ax.set_ylim(0, 1)
    ax.set_title(f"{report['target_ip']} ({report['variant']}): m-tuple G-scores")
    fig.tight_layout()
    fig.savefig(stem + ".scores.png", dpi=150)

    rows = report["conditional_entropy"]
    names = [f"{r['y']}|{r['x']}" for r in rows]
    gt = [r["ground_truth"]["normalized"] for r in rows]
    gen = [r["generated"]["normalized"] for r in rows]
    fig, ax = plt.subplots(figsize=(12, 4))
    x = range(len(names))
    ax.bar([i - 0.2 for i in x], gt, width=0.4, label="ground truth", color="#444444")
    ax.bar([i + 0.2 for i in x], gen, width=0.4, label="generated", color="#a85448")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=90)
    ax.set_ylabel("normalized conditional entropy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(stem + ".conditional_entropy.png", dpi=150)

    stages = report["stage_comparison"]["stages"]
    names = [row["stage"] for row in stages]
    gt = [row["ground_truth"] for row in stages]
    gen = [row["generated"] for row in stages]
    fig, ax = plt.subplots(figsize=(10, 4))
    x = range(len(names))
    ax.bar([i - 0.2 for i in x], gt, width=0.4, label="ground truth", color="#444444")
    ax.bar([i + 0.2 for i in x], gen, width=0.4, label="generated", color="#48a878")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylabel("proportion")
    ax.set_title(
        f"attack stages (total variation "
        f"{report['stage_comparison']['total_variation']:.3f})"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(stem + ".stages.png", dpi=150)
    print(f"wrote {stem}.scores.png, .conditional_entropy.png, .stages.png")


def plot_training_log(path: str) -> None:
    epochs, wasserstein, gp_term, mi = [], [], [], []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            epochs.append(int(row["epoch"]))
            wasserstein.append(float(row["wasserstein_estimate"]))
            gp_term.append(float(row["gp_term"]))
            mi.append(float(row["mi_estimate"]))
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(epochs, wasserstein, label="wasserstein estimate")
    ax.plot(epochs, gp_term, label="gradient penalty")
    if any(v != 0.0 for v in mi):
        ax.plot(epochs, mi, label="mi estimate")
    ax.set_xlabel("epoch")
    ax.legend()
    fig.tight_layout()
    out = path.replace(".csv", ".png")
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("report", nargs="?", help="path to a *.report.json")
    parser.add_argument("--training-log", help="path to a *.training_log.csv")
    args = parser.parse_args()
    if not args.report and not args.training_log:
        parser.error("give a report JSON and/or --training-log CSV")
    if args.report:
        plot_report(args.report)
    if args.training_log:
        plot_training_log(args.training_log)


if __name__ == "__main__":
    main()
