"""Command-line entry point: dataset generation, training, sweeps, reports.

Every command takes a single --seed from which all randomness derives, and
writes a sidecar ``<artifact>.manifest.json`` describing the resolved
configuration (the only place timestamps appear, so artifact bytes replay
exactly).  Exit codes are a stable scripting contract:

    0  success
    2  usage error (bad flags or flag combinations)
    3  I/O error (missing inputs, unwritable outputs)
    4  data/format error (malformed or mismatched input files)
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, harness, mldecoder as mld, neural
from .code import build_layout
from .noise import cycle_error_probability, make_noise

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _per_step_p(args) -> float:
    if args.p is not None and args.p_cycle is not None:
        raise UsageError("give either --p (per step) or --p-cycle, not both")
    if args.p is not None:
        return args.p
    if args.p_cycle is not None:
        if not 0.0 <= args.p_cycle < 1.0:
            raise UsageError("--p-cycle must be in [0, 1)")
        return 1.0 - (1.0 - args.p_cycle) ** (1.0 / 8.0)
    raise UsageError("one of --p or --p-cycle is required")


def _base_manifest(command: str, args_dict: dict) -> dict:
    return {
        "command": command,
        "config": args_dict,
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }


def _cmd_gen(args) -> int:
    p = _per_step_p(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    layout = build_layout(args.d)
    noise = make_noise(args.noise, p, eta=args.eta)
    dataset = mld.generate_dataset(layout, noise, args.n, args.seed)
    mld.save_dataset(dataset, args.out)
    harness.write_manifest(args.out, _base_manifest("gen", {
        "d": args.d, "noise": noise.config(), "n": args.n, "seed": args.seed,
        "out": args.out}))
    print(f"wrote {args.n} samples to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_train(args) -> int:
    try:
        dataset = mld.load_dataset(args.dataset)
    except FileNotFoundError:
        raise
    except ValueError as exc:
        raise DataError(str(exc)) from None
    if args.arch not in neural.ARCHITECTURES:
        raise UsageError(f"unknown architecture {args.arch!r}; choose from {neural.ARCHITECTURES}")
    if args.lr == 0.0:
        print("warning: --lr 0 leaves parameters at their initialization", file=sys.stderr)
    config = neural.TrainConfig(batch_size=args.batch, epochs=args.epochs,
                                learning_rate=args.lr, seed=args.seed)
    try:
        model = mld.train_two_level(dataset, args.arch, config, split=args.split)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    mld.save_model(model, args.out)
    harness.write_manifest(args.out, _base_manifest("train", {
        "dataset": args.dataset, "arch": args.arch, "split": args.split,
        "epochs": args.epochs, "batch": args.batch, "lr": args.lr,
        "seed": args.seed, "out": args.out}))
    print(f"trained {args.arch} (d={dataset.d}): "
          f"lld {model.manifest['lld_train_seconds']:.2f}s, "
          f"hld {model.manifest['hld_train_seconds']:.2f}s", file=sys.stderr)
    return EXIT_OK


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x)
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}")


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")


def _cmd_sweep(args) -> int:
    decoders = tuple(args.decoders.split(","))
    try:
        config = harness.SweepConfig(
            distances=_parse_ints(args.d_list),
            p_grid=_parse_floats(args.p_grid),
            noise_kind=args.noise,
            eta=args.eta,
            decoders=decoders,
            trials=args.trials,
            instances=args.instances,
            base_seed=args.seed,
            dataset_size=args.dataset_size,
            train=neural.TrainConfig(batch_size=args.batch, epochs=args.epochs,
                                     learning_rate=args.lr, seed=args.seed),
            jobs=args.jobs,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"sweep: {len(config.distances)} distance(s) x {len(config.p_grid)} p "
          f"x {len(decoders)} decoder(s) x {config.instances} instance(s)", file=sys.stderr)
    points = harness.run_sweep(config)
    csv_text = harness.points_to_csv(points)
    if args.out_csv == "-":
        sys.stdout.write(csv_text)
    else:
        with open(args.out_csv, "w", encoding="ascii", newline="") as fh:
            fh.write(csv_text)
        harness.write_manifest(args.out_csv, _base_manifest("sweep", config.manifest()))
    print(f"sweep complete: {len(points)} curve points", file=sys.stderr)
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        points = harness.read_curve_csv(args.csv)
    except FileNotFoundError:
        raise
    except harness.CsvFormatError as exc:
        raise DataError(str(exc)) from None
    level = args.level
    if args.kind == "pseudo":
        if args.d is None:
            raise UsageError("--kind pseudo requires --d")
        series = harness.select_points(points, d=args.d, decoder=args.decoder, level=level)
        if not series:
            raise DataError(f"{args.csv}: no rows for d={args.d} decoder={args.decoder} "
                            f"level={level}")
        estimate = harness.estimate_pseudo_threshold(series, axis=args.axis)
    else:
        if not args.d_pair:
            raise UsageError("--kind threshold requires --d-pair, e.g. --d-pair 3,5")
        ds = _parse_ints(args.d_pair)
        curves = {}
        missing = []
        for d in ds:
            series = harness.select_points(points, d=d, decoder=args.decoder, level=level)
            if series:
                curves[d] = series
            else:
                missing.append(d)
        if missing:
            raise DataError(f"{args.csv}: no rows for d={missing} decoder={args.decoder} "
                            f"level={level}")
        estimate = harness.estimate_threshold(curves, axis=args.axis)
    report = {
        "kind": estimate.kind,
        "value": estimate.value,
        "ci_low": estimate.ci_low,
        "ci_high": estimate.ci_high,
        "method": estimate.method,
    }
    if not estimate.found:
        report["result"] = "no crossing in range"
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfdec",
        description="Surface-code decoding workbench: datasets, decoders, threshold studies.")
    parser.add_argument("--version", action="version", version=f"surfdec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a labeled syndrome dataset")
    gen.add_argument("--d", type=int, required=True, help="code distance (odd, >= 3)")
    gen.add_argument("--noise", choices=("bitflip", "depol"), default="depol")
    gen.add_argument("--p", type=float, default=None, help="per-step error probability")
    gen.add_argument("--p-cycle", type=float, default=None,
                     help="per-cycle probability (converted to per-step)")
    gen.add_argument("--eta", type=float, default=1.0, help="bias: eta*p_z = p_x = p_y")
    gen.add_argument("--n", type=int, required=True, help="number of samples")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    train = sub.add_parser("train", help="train a two-level decoder on a dataset")
    train.add_argument("--dataset", required=True)
    train.add_argument("--arch", required=True,
                       help="|".join(neural.ARCHITECTURES))
    train.add_argument("--split", type=float, default=mld.DEFAULT_SPLIT)
    train.add_argument("--epochs", type=int, default=1000)
    train.add_argument("--batch", type=int, default=10000)
    train.add_argument("--lr", type=float, default=0.01)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", required=True)
    train.set_defaults(func=_cmd_train)

    sweep = sub.add_parser("sweep", help="run a Monte Carlo logical-error sweep")
    sweep.add_argument("--d-list", default="3", help="comma-separated distances")
    sweep.add_argument("--p-grid", required=True, help="comma-separated per-step p values")
    sweep.add_argument("--decoders", default="mwpm",
                       help="comma-separated subset of " + ",".join(harness.DECODERS))
    sweep.add_argument("--trials", type=int, default=10000,
                       help="MWPM trials per point per instance")
    sweep.add_argument("--instances", type=int, default=5)
    sweep.add_argument("--noise", choices=("bitflip", "depol"), default="depol")
    sweep.add_argument("--eta", type=float, default=1.0)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--dataset-size", type=int, default=20000)
    sweep.add_argument("--epochs", type=int, default=300)
    sweep.add_argument("--batch", type=int, default=64)
    sweep.add_argument("--lr", type=float, default=0.5)
    sweep.add_argument("--jobs", type=int, default=0,
                       help="parallel workers (0 = auto, env SURFDEC_JOBS)")
    sweep.add_argument("--out-csv", required=True, help="output CSV path, '-' for stdout")
    sweep.set_defaults(func=_cmd_sweep)

    report = sub.add_parser("report", help="estimate thresholds from a sweep CSV")
    report.add_argument("--csv", required=True)
    report.add_argument("--kind", choices=("pseudo", "threshold"), required=True)
    report.add_argument("--d", type=int, default=None)
    report.add_argument("--d-pair", default=None, help="comma-separated distances")
    report.add_argument("--decoder", default="mwpm")
    report.add_argument("--level", default="LLD", choices=("LLD", "LLD+HLD"))
    report.add_argument("--axis", default="p_step", choices=("p_step", "p_cycle"))
    report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    # sweep's noise flag uses the CLI spelling "depol"
    if getattr(args, "noise", None) == "depol":
        args.noise = "depolarizing"
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
