"""Accuracy vs test ratio with standard-deviation error bars.

Plots the train/test-ratio study CSV: one series per physical error rate,
mean low-level accuracy against the test fraction, error bars showing the
spread over training instances.

usage: python plot_ratio_study.py --csv ratio.csv --out fig.png
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from plotcommon import SchemaError, group_series, read_ratio_csv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--csv", required=True)
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    try:
        rows = read_ratio_csv(args.csv)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4

    groups = group_series(rows, lambda r: r["p_step"])
    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    for p, series in sorted(groups.items()):
        series = sorted(series, key=lambda r: r["test_ratio"])
        xs = [r["test_ratio"] for r in series]
        ys = [r["mean_accuracy"] for r in series]
        sds = [r["sd"] for r in series]
        ax.errorbar(xs, ys, yerr=sds, marker="o", ms=5, lw=1.5, capsize=3,
                    label=f"p = {p:g}")
    ax.set_xlabel("test fraction of the dataset")
    ax.set_ylabel("mean accuracy (low-level decoder)")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.25)
    ax.legend(title="per-step error rate", fontsize=9)
    fig.tight_layout()
    fig.savefig(args.out, dpi=130)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
