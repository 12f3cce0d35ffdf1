"""Monte Carlo experiment engine: sweeps, thresholds, ratio and timing studies.

A sweep point is one (distance, per-step p, decoder, instance) cell.  MWPM
cells decode freshly sampled trials; ML cells generate a dataset, train a
two-level model on the training split and score the held-out split (one
model per cell, following the per-p training regime).  Cells are independent
jobs; results are merged in deterministic order so output bytes never depend
on scheduling.

Every curve row carries both the per-step probability ``p_step`` and the
compounded per-cycle probability ``p_cycle`` = 1-(1-p)^8, because published
threshold numbers are quoted in either convention.  Pseudo-threshold
estimation can cross the logical-error curve against either identity line;
the choice is recorded in the estimate's method metadata.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import mldecoder as mld
from . import mwpm, neural
from .code import CodeLayout, build_layout, logical_class_batch, syndrome_batch
from .noise import RngStream, cycle_error_probability, make_noise, mix64, sample_error_batch

#: Exact column order of the sweep CSV (schema version 1).
CSV_COLUMNS = ("d", "decoder", "level", "noise_kind", "eta", "p_step", "p_cycle",
               "trials", "instances", "logical_error_rate", "accuracy", "sd", "seed")
CSV_SCHEMA_VERSION = 1

#: Ratio-study CSV columns (schema version 1).
RATIO_CSV_COLUMNS = ("d", "arch", "train_ratio", "test_ratio", "p_step", "p_cycle",
                     "instances", "mean_accuracy", "sd", "seed")

MWPM_DECODER = "mwpm"
ML_DECODERS = ("ffnn-simple", "ffnn-complex", "cnn-simple", "cnn-complex")
DECODERS = (MWPM_DECODER,) + ML_DECODERS

_DEFAULT_P_GRID = tuple(float(p) for p in np.geomspace(0.0001, 0.25, 12))


def default_jobs() -> int:
    env = os.environ.get("SURFDEC_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepConfig:
    """Full description of a sweep; (config, base_seed) reproduces every byte."""

    distances: tuple[int, ...] = (3,)
    p_grid: tuple[float, ...] = _DEFAULT_P_GRID
    noise_kind: str = "depolarizing"
    eta: float = 1.0
    decoders: tuple[str, ...] = (MWPM_DECODER,)
    trials: int = 10000
    instances: int = 5
    base_seed: int = 0
    # ML-only knobs
    dataset_size: int = 20000
    split: float = mld.DEFAULT_SPLIT
    train: neural.TrainConfig = field(default_factory=neural.TrainConfig)
    levels: tuple[str, ...] = ("lld", "lld+hld")
    jobs: int = 0   # 0 = default_jobs()

    def __post_init__(self):
        if any(self.p_grid[i] >= self.p_grid[i + 1] for i in range(len(self.p_grid) - 1)):
            raise ValueError("p grid must be strictly increasing")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ValueError("p grid values must lie in [0, 1]")
        if self.trials < 100:
            raise ValueError("trials per point must be >= 100")
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        unknown = set(self.decoders) - set(DECODERS)
        if unknown:
            raise ValueError(f"unknown decoders: {sorted(unknown)}; expected among {DECODERS}")
        for d in self.distances:
            if d < 3 or d % 2 == 0:
                raise ValueError(f"distances must be odd and >= 3, got {d}")

    def manifest(self) -> dict:
        return {
            "distances": list(self.distances),
            "p_grid": list(self.p_grid),
            "noise_kind": self.noise_kind,
            "eta": self.eta,
            "decoders": list(self.decoders),
            "trials": self.trials,
            "instances": self.instances,
            "base_seed": self.base_seed,
            "dataset_size": self.dataset_size,
            "split": self.split,
            "train": {"batch_size": self.train.batch_size, "epochs": self.train.epochs,
                      "learning_rate": self.train.learning_rate, "shuffle": self.train.shuffle},
            "levels": list(self.levels),
            "csv_schema_version": CSV_SCHEMA_VERSION,
        }


@dataclass(frozen=True)
class CurvePoint:
    """Aggregated result of one (d, p, decoder, level) cell across instances."""

    d: int
    decoder: str
    level: str
    noise_kind: str
    eta: float
    p_step: float
    p_cycle: float
    trials: int
    instances: int
    logical_error_rate: float
    accuracy: float
    sd: float
    seed: int


@dataclass(frozen=True)
class ThresholdEstimate:
    """A pseudo-threshold or threshold estimate with its method metadata."""

    kind: str                      # "pseudo" or "threshold"
    value: float | None            # None = no crossing in range
    ci_low: float | None
    ci_high: float | None
    method: dict

    @property
    def found(self) -> bool:
        return self.value is not None


# ---------------------------------------------------------------------------
# single-cell workers

def _cell_seed(base_seed: int, d: int, p_index: int, decoder: str, instance: int) -> int:
    tag = mix64(base_seed, d * 1000003 + p_index)
    tag = mix64(tag, DECODERS.index(decoder) + 1)
    return mix64(tag, instance)


def mwpm_instance_rates(layout: CodeLayout, noise, trials: int, seed: int,
                        batch: int = 8192) -> float:
    """Logical error rate of MWPM over freshly sampled trials (one instance).

    A trial succeeds when the corrected frame acts trivially on the
    codespace; MWPM corrections clear the syndrome by construction.
    """
    stream = RngStream(seed)
    fails = 0
    done = 0
    while done < trials:
        nb = min(batch, trials - done)
        fx, fz = sample_error_batch(noise, layout, stream, nb, first_trial=done)
        synds = syndrome_batch(layout, fx, fz)
        for i in np.flatnonzero(synds.any(axis=1)):
            cx, cz = mwpm.decode_mwpm_bits(layout, synds[i])
            fx[i] ^= cx
            fz[i] ^= cz
        classes = logical_class_batch(layout, fx, fz)
        fails += int((classes != 0).sum())
        done += nb
    return fails / trials


def _run_mwpm_cell(config: SweepConfig, d: int, p_index: int, instance: int) -> dict:
    layout = build_layout(d)
    p = config.p_grid[p_index]
    noise = make_noise(config.noise_kind, p, eta=config.eta)
    seed = _cell_seed(config.base_seed, d, p_index, MWPM_DECODER, instance)
    rate = mwpm_instance_rates(layout, noise, config.trials, seed)
    return {"rates": {"lld": rate}, "trials": config.trials}


def _run_ml_cell(config: SweepConfig, decoder: str, d: int, p_index: int, instance: int) -> dict:
    layout = build_layout(d)
    p = config.p_grid[p_index]
    noise = make_noise(config.noise_kind, p, eta=config.eta)
    seed = _cell_seed(config.base_seed, d, p_index, decoder, instance)
    dataset = mld.generate_dataset(layout, noise, config.dataset_size, seed)
    train_cfg = mld.replace_seed(config.train, mix64(seed, 7))
    model = mld.train_two_level(dataset, decoder, train_cfg, split=config.split)
    _train_idx, test_idx = mld.split_indices(len(dataset), config.split)
    rates = {}
    for level in config.levels:
        metrics = mld.evaluate(model, dataset, test_idx, level=level)
        rates[level] = metrics.logical_error_rate
    return {"rates": rates, "trials": len(test_idx)}


def _run_cell(args: tuple) -> tuple[tuple, dict]:
    config, decoder, d, p_index, instance = args
    if decoder == MWPM_DECODER:
        result = _run_mwpm_cell(config, d, p_index, instance)
    else:
        result = _run_ml_cell(config, decoder, d, p_index, instance)
    return (decoder, d, p_index, instance), result


def run_sweep(config: SweepConfig) -> list[CurvePoint]:
    """Execute every cell of the sweep and aggregate instances into curve
    points, ordered by (d, p, decoder, level).  Reproducible from the config.
    """
    cells = [(config, decoder, d, p_index, instance)
             for d in config.distances
             for p_index in range(len(config.p_grid))
             for decoder in config.decoders
             for instance in range(config.instances)]
    jobs = config.jobs or default_jobs()
    results: dict[tuple, dict] = {}
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, value in pool.map(_run_cell, cells, chunksize=1):
                results[key] = value
    else:
        for cell in cells:
            key, value = _run_cell(cell)
            results[key] = value

    points = []
    for d in config.distances:
        for p_index, p in enumerate(config.p_grid):
            for decoder in config.decoders:
                levels = ("lld",) if decoder == MWPM_DECODER else config.levels
                for level in levels:
                    rates = [results[(decoder, d, p_index, k)]["rates"][level]
                             for k in range(config.instances)]
                    trials = sum(results[(decoder, d, p_index, k)]["trials"]
                                 for k in range(config.instances))
                    mean = float(np.mean(rates))
                    sd = float(np.std(rates, ddof=1)) if len(rates) > 1 else 0.0
                    points.append(CurvePoint(
                        d=d, decoder=decoder, level=_level_name(level),
                        noise_kind=config.noise_kind, eta=config.eta,
                        p_step=p, p_cycle=cycle_error_probability(p),
                        trials=trials, instances=config.instances,
                        logical_error_rate=mean, accuracy=1.0 - mean, sd=sd,
                        seed=config.base_seed))
    return points


def _level_name(level: str) -> str:
    return {"lld": "LLD", "lld+hld": "LLD+HLD"}.get(level, level)


# ---------------------------------------------------------------------------
# CSV emission / ingestion

def _format_float(x: float) -> str:
    return repr(float(x))


def points_to_csv(points: list[CurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for pt in points:
        writer.writerow([pt.d, pt.decoder, pt.level, pt.noise_kind,
                         _format_float(pt.eta), _format_float(pt.p_step),
                         _format_float(pt.p_cycle), pt.trials, pt.instances,
                         _format_float(pt.logical_error_rate),
                         _format_float(pt.accuracy), _format_float(pt.sd), pt.seed])
    return buf.getvalue()


def write_curve_csv(points: list[CurvePoint], path, manifest: dict | None = None) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(points_to_csv(points))
    if manifest is not None:
        write_manifest(path, manifest)


def write_manifest(artifact_path, manifest: dict) -> None:
    """Sidecar run manifest (<artifact>.manifest.json).  Timestamps live only
    here, outside the byte-reproducibility contract of the artifact itself."""
    with open(str(artifact_path) + ".manifest.json", "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


class CsvFormatError(ValueError):
    """Raised when a sweep CSV does not match the documented schema."""


def read_curve_csv(path) -> list[CurvePoint]:
    points = []
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(CSV_COLUMNS):
            raise CsvFormatError(f"{path}: header {header} does not match schema {list(CSV_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise CsvFormatError(f"{path}: line {lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
            try:
                points.append(CurvePoint(
                    d=int(row[0]), decoder=row[1], level=row[2], noise_kind=row[3],
                    eta=float(row[4]), p_step=float(row[5]), p_cycle=float(row[6]),
                    trials=int(row[7]), instances=int(row[8]),
                    logical_error_rate=float(row[9]), accuracy=float(row[10]),
                    sd=float(row[11]), seed=int(row[12])))
            except ValueError as exc:
                raise CsvFormatError(f"{path}: line {lineno}: {exc}") from None
    return points


def select_points(points: list[CurvePoint], d: int | None = None, decoder: str | None = None,
                  level: str | None = None) -> list[CurvePoint]:
    out = [pt for pt in points
           if (d is None or pt.d == d)
           and (decoder is None or pt.decoder == decoder)
           and (level is None or pt.level == level)]
    return sorted(out, key=lambda pt: pt.p_step)


# ---------------------------------------------------------------------------
# threshold estimation

def _point_se(pt: CurvePoint) -> float:
    """Standard error of a curve point: instance spread when available,
    with a binomial floor from the total trial count."""
    rate = min(max(pt.logical_error_rate, 1.0 / (pt.trials + 1)), 1.0 - 1.0 / (pt.trials + 1))
    binom = float(np.sqrt(rate * (1.0 - rate) / pt.trials))
    if pt.instances > 1 and pt.sd > 0:
        return max(pt.sd / np.sqrt(pt.instances), binom)
    return binom


def _interp_crossing(x0: float, x1: float, y0: float, y1: float) -> float:
    """Log-log linear interpolation of the crossing of y(x) with y = x."""
    if min(x0, x1, y0, y1) <= 0.0:
        # fall back to linear interpolation when a rate is exactly zero
        t = (x0 - y0) / ((y1 - y0) - (x1 - x0))
        return x0 + t * (x1 - x0)
    lx0, lx1, ly0, ly1 = np.log(x0), np.log(x1), np.log(y0), np.log(y1)
    t = (lx0 - ly0) / ((ly1 - ly0) - (lx1 - lx0))
    return float(np.exp(lx0 + t * (lx1 - lx0)))


def estimate_pseudo_threshold(points: list[CurvePoint], axis: str = "p_step",
                              bootstrap: int = 500, seed: int = 0) -> ThresholdEstimate:
    """Crossing of the logical-error curve with the identity line on the
    chosen axis ("p_step" or "p_cycle").

    Scans for the first adjacent pair where (p_L - x) changes sign from
    negative to positive and interpolates log-log linearly.  The confidence
    interval is a parametric bootstrap over the bracketing points' standard
    errors.  Returns a no-crossing estimate when the curve never brackets
    the identity line.
    """
    if axis not in ("p_step", "p_cycle"):
        raise ValueError("axis must be 'p_step' or 'p_cycle'")
    pts = sorted(points, key=lambda pt: pt.p_step)
    if len(pts) < 2:
        raise ValueError("need at least two curve points")
    xs = [pt.p_cycle if axis == "p_cycle" else pt.p_step for pt in pts]
    ys = [pt.logical_error_rate for pt in pts]
    method = {"kind": "pseudo", "axis": axis, "interpolation": "log-log",
              "d": pts[0].d, "decoder": pts[0].decoder, "level": pts[0].level}
    bracket = None
    for i in range(len(pts) - 1):
        if (ys[i] - xs[i]) <= 0.0 < (ys[i + 1] - xs[i + 1]):
            bracket = i
            break
    if bracket is None:
        method["reason"] = "curve never crosses the identity line from below in range"
        method["position"] = ("above_identity_at_grid_start" if ys[0] > xs[0]
                              else "below_identity_in_range")
        return ThresholdEstimate("pseudo", None, None, None, method)
    i = bracket
    value = _interp_crossing(xs[i], xs[i + 1], ys[i], ys[i + 1])
    method["bracket"] = [xs[i], xs[i + 1]]
    gen = np.random.Generator(np.random.PCG64(mix64(seed, 12345)))
    se0, se1 = _point_se(pts[i]), _point_se(pts[i + 1])
    samples = []
    for _ in range(bootstrap):
        y0 = max(ys[i] + gen.normal(0.0, se0), 1e-12)
        y1 = max(ys[i + 1] + gen.normal(0.0, se1), 1e-12)
        if (y0 - xs[i]) <= 0.0 < (y1 - xs[i + 1]):
            samples.append(_interp_crossing(xs[i], xs[i + 1], y0, y1))
    if samples:
        lo, hi = np.percentile(samples, [2.5, 97.5])
    else:
        lo = hi = value
    return ThresholdEstimate("pseudo", float(value), float(lo), float(hi), method)


def _pair_crossing(pts_low: list[CurvePoint], pts_high: list[CurvePoint],
                   jitter: tuple[float, ...] | None = None) -> float | None:
    """Crossing p of a consecutive-distance curve pair: below threshold the
    higher distance suppresses errors (p_L(d_low) - p_L(d_high) > 0), above
    it the ordering inverts, so the first + to - sign change scanning upward
    locates the threshold."""
    xs = [pt.p_step for pt in pts_low]
    if xs != [pt.p_step for pt in pts_high]:
        raise ValueError("curves must share the same p grid for threshold estimation")
    diffs = []
    for k, (a, b) in enumerate(zip(pts_low, pts_high)):
        da = a.logical_error_rate + (jitter[2 * k] if jitter else 0.0)
        db = b.logical_error_rate + (jitter[2 * k + 1] if jitter else 0.0)
        diffs.append((max(da, 1e-12), max(db, 1e-12)))
    for i in range(len(xs) - 1):
        d0 = diffs[i][0] - diffs[i][1]
        d1 = diffs[i + 1][0] - diffs[i + 1][1]
        if d0 > 0.0 >= d1:
            # log-space interpolation of the two curves' crossing
            la0, lb0 = np.log(diffs[i][0]), np.log(diffs[i][1])
            la1, lb1 = np.log(diffs[i + 1][0]), np.log(diffs[i + 1][1])
            lx0, lx1 = np.log(xs[i]), np.log(xs[i + 1])
            denom = (la1 - la0) - (lb1 - lb0)
            if denom == 0.0:
                return None
            t = (lb0 - la0) / denom
            return float(np.exp(lx0 + t * (lx1 - lx0)))
    return None


def estimate_threshold(curves: dict[int, list[CurvePoint]], bootstrap: int = 500,
                       seed: int = 0, axis: str = "p_step") -> ThresholdEstimate:
    """Distance-independent threshold from pairwise crossings of consecutive-d
    curves (mean of the pairwise crossings, spread reported in metadata).

    The crossing itself is axis-invariant; ``axis`` only selects the units of
    the reported value (per-step p or its per-cycle compounding).
    """
    if axis not in ("p_step", "p_cycle"):
        raise ValueError("axis must be 'p_step' or 'p_cycle'")
    ds = sorted(curves)
    if len(ds) < 2:
        raise ValueError("need curves for at least two distances")
    method = {"kind": "threshold", "axis": axis, "interpolation": "log-log",
              "distances": ds, "pairs": []}
    crossings = []
    for d_low, d_high in zip(ds, ds[1:]):
        low = sorted(curves[d_low], key=lambda pt: pt.p_step)
        high = sorted(curves[d_high], key=lambda pt: pt.p_step)
        if [pt.logical_error_rate for pt in low] == [pt.logical_error_rate for pt in high]:
            method["pairs"].append({"d": [d_low, d_high], "crossing": None,
                                    "reason": "identical curves, crossing degenerate"})
            continue
        crossing = _pair_crossing(low, high)
        method["pairs"].append({"d": [d_low, d_high], "crossing": crossing})
        if crossing is not None:
            crossings.append((crossing, low, high))
    if not crossings:
        method["reason"] = "no curve pair crosses in range"
        # locate which side of the grid the crossing must lie on: below
        # threshold the lower distance is worse, so an inverted ordering at
        # the smallest p means the threshold sits below the grid
        d_low, d_high = ds[0], ds[1]
        low0 = min(curves[d_low], key=lambda pt: pt.p_step).logical_error_rate
        high0 = min(curves[d_high], key=lambda pt: pt.p_step).logical_error_rate
        method["position"] = "below_range" if high0 >= low0 else "above_range"
        return ThresholdEstimate("threshold", None, None, None, method)
    value = float(np.mean([c for c, _, _ in crossings]))
    method["spread"] = float(np.ptp([c for c, _, _ in crossings])) if len(crossings) > 1 else 0.0
    gen = np.random.Generator(np.random.PCG64(mix64(seed, 54321)))
    samples = []
    for _ in range(bootstrap):
        resampled = []
        for crossing, low, high in crossings:
            jitter = []
            for a, b in zip(low, high):
                jitter.append(gen.normal(0.0, _point_se(a)))
                jitter.append(gen.normal(0.0, _point_se(b)))
            c = _pair_crossing(low, high, tuple(jitter))
            if c is not None:
                resampled.append(c)
        if resampled:
            samples.append(np.mean(resampled))
    if samples:
        lo, hi = np.percentile(samples, [2.5, 97.5])
    else:
        lo = hi = value
    if axis == "p_cycle":
        value = cycle_error_probability(value)
        lo = cycle_error_probability(float(lo))
        hi = cycle_error_probability(float(hi))
    return ThresholdEstimate("threshold", float(value), float(lo), float(hi), method)


# ---------------------------------------------------------------------------
# train/test-ratio study

@dataclass(frozen=True)
class RatioPoint:
    d: int
    arch: str
    train_ratio: float
    test_ratio: float
    p_step: float
    instances: int
    mean_accuracy: float
    sd: float
    seed: int


DEFAULT_RATIOS = tuple((90 - 10 * k) / 100.0 for k in range(9))  # 0.9 .. 0.1


@functools.lru_cache(maxsize=4)
def _ratio_dataset(d: int, noise_kind: str, eta: float, p: float,
                   dataset_size: int, seed: int) -> mld.Dataset:
    # per-process cache: every (ratio, instance) cell reuses the same dataset
    layout = build_layout(d)
    noise = make_noise(noise_kind, p, eta=eta)
    return mld.generate_dataset(layout, noise, dataset_size, seed)


def _run_ratio_cell(args: tuple) -> tuple[tuple, float]:
    (d, arch, p, ratio, instance, base_seed, dataset_size, train_cfg,
     noise_kind, eta) = args
    dataset_seed = mix64(base_seed, int(round(p * 1e7)))
    dataset = _ratio_dataset(d, noise_kind, eta, p, dataset_size, dataset_seed)
    seed = mix64(dataset_seed, int(ratio * 100) * 100 + instance)
    model = mld.train_two_level(dataset, arch, mld.replace_seed(train_cfg, seed),
                                split=ratio)
    _tr, te = mld.split_indices(len(dataset), ratio)
    metrics = mld.evaluate(model, dataset, te, level="lld")
    return (p, ratio, instance), metrics.accuracy


def train_test_ratio_study(d: int, arch: str, p_list: tuple[float, ...],
                           ratios: tuple[float, ...] = DEFAULT_RATIOS,
                           instances: int = 5, dataset_size: int = mld.DEFAULT_DATASET_SIZE,
                           train: neural.TrainConfig = neural.TrainConfig(),
                           noise_kind: str = "depolarizing", eta: float = 1.0,
                           base_seed: int = 0, jobs: int = 0) -> list[RatioPoint]:
    """Retrain the low-level decoder at each train ratio of a fixed dataset
    and report mean accuracy with its instance SD, one row per (ratio, p)."""
    for ratio in ratios:
        if not 0.0 < ratio < 1.0:
            raise ValueError(f"train ratio must be in (0, 1), got {ratio} "
                             "(an empty train or test portion is not allowed)")
    cells = [(d, arch, p, ratio, instance, base_seed, dataset_size, train,
              noise_kind, eta)
             for p in p_list for ratio in ratios for instance in range(instances)]
    n_jobs = jobs or default_jobs()
    results: dict[tuple, float] = {}
    if n_jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            for key, acc in pool.map(_run_ratio_cell, cells, chunksize=1):
                results[key] = acc
    else:
        for cell in cells:
            key, acc = _run_ratio_cell(cell)
            results[key] = acc
    rows = []
    for ratio in ratios:
        for p in p_list:
            accs = [results[(p, ratio, k)] for k in range(instances)]
            rows.append(RatioPoint(
                d=d, arch=arch, train_ratio=ratio, test_ratio=round(1.0 - ratio, 10),
                p_step=p, instances=instances, mean_accuracy=float(np.mean(accs)),
                sd=float(np.std(accs, ddof=1)) if instances > 1 else 0.0,
                seed=base_seed))
    return rows


def ratio_points_to_csv(rows: list[RatioPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RATIO_CSV_COLUMNS)
    for r in rows:
        writer.writerow([r.d, r.arch, _format_float(r.train_ratio),
                         _format_float(r.test_ratio), _format_float(r.p_step),
                         _format_float(cycle_error_probability(r.p_step)),
                         r.instances, _format_float(r.mean_accuracy),
                         _format_float(r.sd), r.seed])
    return buf.getvalue()


def write_ratio_csv(rows: list[RatioPoint], path, manifest: dict | None = None) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(ratio_points_to_csv(rows))
    if manifest is not None:
        write_manifest(path, manifest)


# ---------------------------------------------------------------------------
# model-complexity timing study

@dataclass(frozen=True)
class TimingRow:
    arch: str
    d: int
    parameter_count: int
    lld_train_seconds: float
    hld_train_seconds: float
    mean_prediction_seconds: float


def measure_prediction_time(model: mld.DecoderModel, grids: np.ndarray,
                            repeats: int = 10000) -> float:
    """Mean wall-clock seconds per single-sample two-level decode."""
    n = grids.shape[0]
    start = time.perf_counter()
    for i in range(repeats):
        mld.decode_ml(model, grids[i % n])
    return (time.perf_counter() - start) / repeats


def measure_mwpm_decode_time(layout: CodeLayout, p: float = 0.01,
                             repeats: int = 10000, seed: int = 0) -> float:
    """Mean wall-clock seconds per MWPM decode over sampled syndromes."""
    noise = make_noise("depolarizing", p)
    stream = RngStream(seed)
    fx, fz = sample_error_batch(noise, layout, stream, min(repeats, 2000))
    syndromes = syndrome_batch(layout, fx, fz)
    n = syndromes.shape[0]
    start = time.perf_counter()
    for i in range(repeats):
        mwpm.decode_mwpm_bits(layout, syndromes[i % n])
    return (time.perf_counter() - start) / repeats


def timing_report(archs: tuple[str, ...], distances: tuple[int, ...],
                  p: float = 0.01, dataset_size: int = 20000,
                  train: neural.TrainConfig = neural.TrainConfig(),
                  noise_kind: str = "depolarizing", eta: float = 1.0,
                  base_seed: int = 0, prediction_repeats: int = 10000) -> list[TimingRow]:
    """Train one model per (arch, d) and report parameter counts, training
    wall-clock and mean single-sample prediction latency."""
    rows = []
    for arch in archs:
        for d in distances:
            layout = build_layout(d)
            noise = make_noise(noise_kind, p, eta=eta)
            seed = mix64(base_seed, ML_DECODERS.index(arch) * 1000 + d)
            dataset = mld.generate_dataset(layout, noise, dataset_size, seed)
            model = mld.train_two_level(dataset, arch, mld.replace_seed(train, seed))
            _tr, te = mld.split_indices(len(dataset), mld.DEFAULT_SPLIT)
            pred = measure_prediction_time(model, dataset.grids[te], prediction_repeats)
            rows.append(TimingRow(
                arch=arch, d=d,
                parameter_count=neural.parameter_count(model.lld),
                lld_train_seconds=model.manifest["lld_train_seconds"],
                hld_train_seconds=model.manifest["hld_train_seconds"],
                mean_prediction_seconds=pred))
    return rows
