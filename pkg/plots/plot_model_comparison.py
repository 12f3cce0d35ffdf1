"""Simple-vs-complex model overlay: error-rate and accuracy panels.

Takes a sweep CSV containing several decoder architectures at the same
distances and overlays their curves, pairing each family's simple and
complex variants by color (solid = simple, dashed = complex) so the
near-overlap of the curves is visible at a glance.

usage: python plot_model_comparison.py --csv sweep.csv --out fig.png
"""

import argparse
import itertools
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from plotcommon import SchemaError, group_series, read_sweep_csv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--csv", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--level", default="LLD+HLD", choices=("LLD", "LLD+HLD"),
                        help="decoder level to compare")
    args = parser.parse_args(argv)

    try:
        rows = read_sweep_csv(args.csv)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    rows = [r for r in rows if r["level"] == args.level and r["decoder"] != "mwpm"]
    if not rows:
        print("error: no ML decoder rows at the requested level", file=sys.stderr)
        return 4

    groups = group_series(rows, lambda r: (r["d"], r["decoder"]))
    families = sorted({key[1].rsplit("-", 1)[0] for key in groups})
    distances = sorted({key[0] for key in groups})
    colors = plt.cm.tab10.colors
    color_of = {pair: colors[i % len(colors)]
                for i, pair in enumerate(itertools.product(distances, families))}

    fig, (ax_err, ax_acc) = plt.subplots(1, 2, figsize=(11.5, 4.8))
    for (d, decoder), series in sorted(groups.items()):
        family, variant = decoder.rsplit("-", 1)
        style = "-" if variant == "simple" else "--"
        color = color_of[(d, family)]
        xs = [r["p_step"] for r in series]
        err = [r["logical_error_rate"] for r in series]
        acc = [r["accuracy"] for r in series]
        sds = [r["sd"] for r in series]
        label = f"d={d} {decoder}"
        pos = [i for i, (x, y) in enumerate(zip(xs, err)) if x > 0 and y > 0]
        ax_err.errorbar([xs[i] for i in pos], [err[i] for i in pos],
                        yerr=[sds[i] for i in pos], color=color, ls=style,
                        marker="o", ms=3.5, lw=1.4, capsize=2, label=label)
        ax_acc.errorbar(xs, acc, yerr=sds, color=color, ls=style,
                        marker="o", ms=3.5, lw=1.4, capsize=2, label=label)
    ax_err.set_xscale("log")
    ax_err.set_yscale("log")
    ax_err.set_xlabel("physical error probability per step")
    ax_err.set_ylabel("logical error probability")
    ax_err.grid(True, which="both", alpha=0.25)
    ax_err.legend(fontsize=8)
    ax_acc.set_xscale("log")
    ax_acc.set_xlabel("physical error probability per step")
    ax_acc.set_ylabel("accuracy")
    ax_acc.set_ylim(0.0, 1.02)
    ax_acc.grid(True, alpha=0.25)
    fig.suptitle(f"simple vs complex models ({args.level})", fontsize=11)
    fig.tight_layout()
    fig.savefig(args.out, dpi=130)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
