"""Logical-vs-physical error curves with the identity line and crossings.

Draws one curve per (distance, decoder, level) series from a sweep CSV on
log-log axes, overlays the identity line of the chosen x-axis convention,
and annotates each curve's identity crossing (the pseudo-threshold) found
by log-log interpolation of the plotted points.

usage: python plot_threshold_curves.py --csv sweep.csv --out fig.png
"""

import argparse
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from plotcommon import SchemaError, group_series, read_sweep_csv, series_key


def identity_crossing(xs, ys):
    """First below-to-above crossing of y = x in log-log, or None."""
    for i in range(len(xs) - 1):
        if (ys[i] - xs[i]) <= 0.0 < (ys[i + 1] - xs[i + 1]):
            if min(xs[i], xs[i + 1], ys[i], max(ys[i], 1e-12)) <= 0.0:
                return None
            y0 = max(ys[i], 1e-12)
            lx0, lx1 = math.log(xs[i]), math.log(xs[i + 1])
            ly0, ly1 = math.log(y0), math.log(ys[i + 1])
            t = (lx0 - ly0) / ((ly1 - ly0) - (lx1 - lx0))
            return math.exp(lx0 + t * (lx1 - lx0))
    return None


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--csv", required=True, help="sweep CSV from the workbench")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--axis", choices=("p_step", "p_cycle"), default="p_step",
                        help="x-axis and identity-line convention")
    parser.add_argument("--d", type=int, action="append", default=None,
                        help="restrict to these distances (repeatable)")
    args = parser.parse_args(argv)

    try:
        rows = read_sweep_csv(args.csv)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    if args.d:
        rows = [r for r in rows if r["d"] in set(args.d)]
    if not rows:
        print("error: no rows match the selection", file=sys.stderr)
        return 4

    groups = group_series(rows, series_key)
    fig, ax = plt.subplots(figsize=(7.5, 5.5))
    xmin, xmax = float("inf"), 0.0
    for (d, decoder, level), series in sorted(groups.items()):
        xs = [r[args.axis] for r in series]
        ys = [r["logical_error_rate"] for r in series]
        sds = [r["sd"] for r in series]
        keep = [i for i, (x, y) in enumerate(zip(xs, ys)) if x > 0 and y > 0]
        xs = [xs[i] for i in keep]
        ys = [ys[i] for i in keep]
        sds = [sds[i] for i in keep]
        if not xs:
            continue
        xmin, xmax = min(xmin, xs[0]), max(xmax, xs[-1])
        label = f"d={d} {decoder} {level}"
        line = ax.errorbar(xs, ys, yerr=sds, marker="o", ms=4, lw=1.4,
                           capsize=2, label=label)
        crossing = identity_crossing(xs, ys)
        if crossing is not None:
            ax.axvline(crossing, color=line[0].get_color(), ls=":", lw=1.0, alpha=0.7)
            ax.plot([crossing], [crossing], marker="x", ms=9,
                    color=line[0].get_color())
    if xmax <= 0.0:
        print("error: nothing to plot after dropping non-positive values",
              file=sys.stderr)
        return 4
    span = [xmin * 0.8, xmax * 1.25]
    ax.plot(span, span, color="c", lw=1.2, label="identity line")
    ax.set_xscale("log")
    ax.set_yscale("log")
    xlabel = ("physical error probability per step" if args.axis == "p_step"
              else "physical error probability per cycle")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("logical error probability")
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=130)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
