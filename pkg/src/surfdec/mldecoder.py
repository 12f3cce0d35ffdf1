"""Two-level neural decoding: datasets, low/high-level training, evaluation.

The low-level decoder (LLD) maps a syndrome grid to per-qubit error bits
(two output nodes per data qubit, the (x_bit, z_bit) pair).  The high-level
decoder (HLD) sees the same syndrome grid and predicts the logical residual
the LLD's correction leaves behind, as a 4-way one-hot class.  A trial
succeeds when the final residual acts trivially on the codespace: its
syndrome is zero and its logical class, after the HLD's fix, is I.

LLD corrections do not always clear the syndrome.  At the LLD level such
trials count as failures outright.  The two-level pipeline, however, first
completes the correction with the fixed pure-error chain of the leftover
syndrome (each defect matched straight to its boundary) and then applies
the HLD's logical fix; this is the same completion used to derive the HLD's
training labels, so the network is scored against exactly the classes it
was taught.  ``complete_correction`` exposes that completion step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import neural
from .code import (
    CodeLayout,
    Pauli,
    PauliFrame,
    build_layout,
    embed_syndrome_grid,
    logical_class_batch,
    syndrome_batch,
)
from .mwpm import pure_error_matrices
from .noise import NoiseModel, RngStream, make_noise, mix64, sample_error

DATASET_FORMAT = "surfdec-dataset"
DATASET_VERSION = 1

#: Paper-scale default dataset size.
DEFAULT_DATASET_SIZE = 100000
#: Default training fraction (70000 of 100000).
DEFAULT_SPLIT = 0.7


@dataclass(frozen=True)
class Sample:
    """One decoding trial: syndrome grid input, labels, and the true frame."""

    syndrome_grid: np.ndarray
    low_label: np.ndarray
    high_label: int           # Pauli value, or -1 while underived
    true_frame: PauliFrame


@dataclass
class Dataset:
    """Column-stacked samples plus the manifest that regenerates them."""

    d: int
    noise: NoiseModel
    seed: int
    grids: np.ndarray        # (n, d+1, d+1) uint8
    low_labels: np.ndarray   # (n, 2*d*d) uint8
    high_labels: np.ndarray  # (n,) int8, -1 = underived
    frames_x: np.ndarray     # (n, d*d) uint8
    frames_z: np.ndarray     # (n, d*d) uint8

    def __len__(self) -> int:
        return self.grids.shape[0]

    def sample(self, i: int) -> Sample:
        return Sample(
            syndrome_grid=self.grids[i],
            low_label=self.low_labels[i],
            high_label=int(self.high_labels[i]),
            true_frame=PauliFrame(self.frames_x[i], self.frames_z[i]),
        )

    def manifest(self) -> dict:
        return {
            "format": DATASET_FORMAT,
            "version": DATASET_VERSION,
            "d": self.d,
            "noise": self.noise.config(),
            "n": len(self),
            "seed": self.seed,
        }

    def subset(self, idx: np.ndarray) -> "Dataset":
        """In-memory slice for evaluation; only a full dataset's manifest
        regenerates its file (substreams are indexed per sample)."""
        return Dataset(self.d, self.noise, self.seed, self.grids[idx],
                       self.low_labels[idx], self.high_labels[idx],
                       self.frames_x[idx], self.frames_z[idx])


def frame_to_low_label(frame: PauliFrame) -> np.ndarray:
    """Interleave per-qubit (x_bit, z_bit) pairs into the 2*d^2 label vector."""
    label = np.empty(2 * len(frame), dtype=np.uint8)
    label[0::2] = frame.x
    label[1::2] = frame.z
    return label


def low_label_to_frame(label: np.ndarray) -> PauliFrame:
    label = np.asarray(label, dtype=np.uint8)
    return PauliFrame(label[0::2], label[1::2])


def low_labels_to_bits(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched inverse of ``frame_to_low_label``: (n, 2q) -> x, z of (n, q)."""
    return labels[:, 0::2], labels[:, 1::2]


def generate_dataset(layout: CodeLayout, noise: NoiseModel, n: int, seed: int) -> Dataset:
    """Sample n error frames (trial i uses substream i of ``seed``) and
    record their syndrome grids and labels.  Bit-identical for identical
    (layout, noise, n, seed); syndromes may collide across samples while the
    labels differ, reflecting the code's degeneracy."""
    if n < 1:
        raise ValueError("dataset size must be >= 1")
    stream = RngStream(seed)
    nq = layout.n_data
    frames_x = np.empty((n, nq), dtype=np.uint8)
    frames_z = np.empty((n, nq), dtype=np.uint8)
    for i in range(n):
        frame = sample_error(noise, layout, stream.substream(i))
        frames_x[i] = frame.x
        frames_z[i] = frame.z
    syndromes = syndrome_batch(layout, frames_x, frames_z)
    grids = embed_syndrome_batch(layout, syndromes)
    low_labels = np.empty((n, 2 * nq), dtype=np.uint8)
    low_labels[:, 0::2] = frames_x
    low_labels[:, 1::2] = frames_z
    return Dataset(layout.d, noise, seed, grids, low_labels,
                   np.full(n, -1, dtype=np.int8), frames_x, frames_z)


def embed_syndrome_batch(layout: CodeLayout, syndromes: np.ndarray) -> np.ndarray:
    """Vectorized grid embedding of stacked syndrome bit vectors."""
    n = syndromes.shape[0]
    g = layout.d + 1
    grids = np.zeros((n, g, g), dtype=np.uint8)
    rows = np.array([c.grid_pos[0] for c in layout.checks])
    cols = np.array([c.grid_pos[1] for c in layout.checks])
    grids[:, rows, cols] = syndromes
    return grids


# ---------------------------------------------------------------------------
# dataset files: one JSON manifest line, then one record line per sample

def save_dataset(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("#" + json.dumps(dataset.manifest(), sort_keys=True) + "\n")
        for i in range(len(dataset)):
            fh.write("%s %s %d %s %s\n" % (
                "".join(map(str, dataset.grids[i].ravel())),
                "".join(map(str, dataset.low_labels[i])),
                int(dataset.high_labels[i]),
                "".join(map(str, dataset.frames_x[i])),
                "".join(map(str, dataset.frames_z[i])),
            ))


def _bits(field: str) -> np.ndarray:
    return np.frombuffer(field.encode("ascii"), dtype=np.uint8) - ord("0")


def load_dataset(path) -> Dataset:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing dataset manifest header")
        manifest = json.loads(header[1:])
        if manifest.get("format") != DATASET_FORMAT or manifest.get("version") != DATASET_VERSION:
            raise ValueError(f"{path}: not a recognized dataset file")
        d = int(manifest["d"])
        noise_cfg = manifest["noise"]
        noise = make_noise(noise_cfg["kind"], noise_cfg["p"],
                           eta=noise_cfg["eta"] if noise_cfg["eta"] is not None else 1.0,
                           steps=int(noise_cfg["steps"]))
        n = int(manifest["n"])
        g = d + 1
        nq = d * d
        grids = np.empty((n, g, g), dtype=np.uint8)
        low_labels = np.empty((n, 2 * nq), dtype=np.uint8)
        high_labels = np.empty(n, dtype=np.int8)
        frames_x = np.empty((n, nq), dtype=np.uint8)
        frames_z = np.empty((n, nq), dtype=np.uint8)
        for i in range(n):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: truncated at record {i} of {n}")
            parts = line.split()
            if len(parts) != 5:
                raise ValueError(f"{path}: malformed record on line {i + 2}")
            grids[i] = _bits(parts[0]).reshape(g, g)
            low_labels[i] = _bits(parts[1])
            high_labels[i] = int(parts[2])
            frames_x[i] = _bits(parts[3])
            frames_z[i] = _bits(parts[4])
    return Dataset(d, noise, int(manifest["seed"]), grids, low_labels,
                   high_labels, frames_x, frames_z)


# ---------------------------------------------------------------------------
# two-level decoder

@dataclass
class DecoderModel:
    """Trained low- and high-level networks plus their training manifest."""

    d: int
    arch: str
    lld: neural.Network
    hld: neural.Network
    manifest: dict

    @property
    def grid_shape(self) -> tuple[int, int]:
        return (self.d + 1, self.d + 1)


def net_inputs(net: neural.Network, grids: np.ndarray) -> np.ndarray:
    """Adapt stacked syndrome grids to the network's input shape."""
    if len(net.input_shape) == 1:
        return grids.reshape(grids.shape[0], -1).astype(np.float64)
    return grids[..., None].astype(np.float64)


def _one_hot(values: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros((values.shape[0], width), dtype=np.float64)
    out[np.arange(values.shape[0]), values] = 1.0
    return out


def residual_classes(layout: CodeLayout, res_x: np.ndarray, res_z: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Logical classes of stacked residual frames, plus the mask of residuals
    whose syndrome is still nonzero (classified after pure-error projection)."""
    syndromes = syndrome_batch(layout, res_x, res_z)
    unresolved = syndromes.any(axis=1)
    if unresolved.any():
        mx, mz = pure_error_matrices(layout)
        bad = syndromes[unresolved]
        res_x = res_x.copy()
        res_z = res_z.copy()
        res_x[unresolved] ^= (bad @ mx) % 2
        res_z[unresolved] ^= (bad @ mz) % 2
    return logical_class_batch(layout, res_x, res_z), unresolved


def lld_corrections(model_or_net, grids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Binary LLD predictions decoded to stacked correction bit vectors."""
    net = model_or_net.lld if isinstance(model_or_net, DecoderModel) else model_or_net
    preds = neural.predict_binary(net, net_inputs(net, grids))
    return preds[:, 0::2], preds[:, 1::2]


def derive_hld_labels(dataset: Dataset, lld: neural.Network) -> Dataset:
    """Label every sample with the logical class of the residual its LLD
    correction leaves (pure-error-projected when the syndrome is uncleared).
    Deterministic given the trained LLD."""
    layout = build_layout(dataset.d)
    corr_x, corr_z = lld_corrections(lld, dataset.grids)
    classes, _ = residual_classes(layout, dataset.frames_x ^ corr_x,
                                  dataset.frames_z ^ corr_z)
    return replace(dataset, high_labels=classes.astype(np.int8))


def split_indices(n: int, split: float) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic train/test split boundary (samples are already i.i.d.)."""
    if not 0.0 < split < 1.0:
        raise ValueError(f"split must be in (0, 1), got {split}")
    n_train = int(round(split * n))
    if n_train < 1 or n_train >= n:
        raise ValueError(f"split {split} leaves an empty train or test set for n={n}")
    return np.arange(n_train), np.arange(n_train, n)


def train_two_level(dataset: Dataset, arch: str, config: neural.TrainConfig,
                    split: float = DEFAULT_SPLIT) -> DecoderModel:
    """Train the LLD on the training split, derive HLD labels with it, then
    train the HLD on the same split.  All seeds derive from ``config.seed``.
    """
    layout = build_layout(dataset.d)
    train_idx, _test_idx = split_indices(len(dataset), split)
    grids_train = dataset.grids[train_idx]

    lld = neural.build_architecture(arch, dataset.d, 2 * layout.n_data,
                                    seed=mix64(config.seed, 1))
    lld_report = neural.train(
        lld, net_inputs(lld, grids_train),
        dataset.low_labels[train_idx].astype(np.float64),
        replace_seed(config, mix64(config.seed, 2)))

    labeled = derive_hld_labels(dataset, lld)
    hld = neural.build_architecture(arch, dataset.d, 4, seed=mix64(config.seed, 3))
    hld_report = neural.train(
        hld, net_inputs(hld, grids_train),
        _one_hot(labeled.high_labels[train_idx].astype(np.intp), 4),
        replace_seed(config, mix64(config.seed, 4)))

    manifest = {
        "arch": arch,
        "d": dataset.d,
        "split": split,
        "dataset": dataset.manifest(),
        "train_config": {
            "batch_size": config.batch_size,
            "epochs": config.epochs,
            "learning_rate": config.learning_rate,
            "seed": config.seed,
            "shuffle": config.shuffle,
        },
        "lld_train_seconds": lld_report["train_seconds"],
        "hld_train_seconds": hld_report["train_seconds"],
        "lld_final_loss": lld_report["loss_history"][-1],
        "hld_final_loss": hld_report["loss_history"][-1],
        "lld_loss_history": lld_report["loss_history"],
        "hld_loss_history": hld_report["loss_history"],
    }
    return DecoderModel(dataset.d, arch, lld, hld, manifest)


def replace_seed(config: neural.TrainConfig, seed: int) -> neural.TrainConfig:
    return neural.TrainConfig(batch_size=config.batch_size, epochs=config.epochs,
                              learning_rate=config.learning_rate, seed=seed,
                              shuffle=config.shuffle)


def complete_correction(layout: CodeLayout, syndrome_bits: np.ndarray,
                        correction: PauliFrame) -> PauliFrame:
    """Extend a (possibly syndrome-inconsistent) correction so it clears the
    given syndrome exactly, by composing the canonical pure-error chain of
    the leftover defects.  Deterministic and decoder-independent."""
    from .code import syndrome as _syndrome

    leftover = np.asarray(syndrome_bits, dtype=np.uint8) ^ _syndrome(layout, correction)
    mx, mz = pure_error_matrices(layout)
    return correction * PauliFrame((leftover @ mx) % 2, (leftover @ mz) % 2)


def decode_ml(model: DecoderModel, syndrome_grid: np.ndarray) -> tuple[PauliFrame, Pauli]:
    """Decode one syndrome grid: the LLD's correction frame plus the HLD's
    logical fix (argmax of its four outputs; ties fall to the lowest class
    index, i.e. I before X before Z before Y)."""
    grid = np.asarray(syndrome_grid)
    if grid.shape != model.grid_shape:
        raise ValueError(f"expected a {model.grid_shape} syndrome grid, got {grid.shape}")
    grids = grid[None]
    corr_x, corr_z = lld_corrections(model, grids)
    hld_out = neural.forward(model.hld, net_inputs(model.hld, grids))
    fix = Pauli(int(np.argmax(hld_out[0])))
    return PauliFrame(corr_x[0], corr_z[0]), fix


@dataclass(frozen=True)
class Metrics:
    """Evaluation summary; ``confusion[i, j]`` counts samples whose residual
    class is i (after projection) and whose applied logical fix is j."""

    n: int
    successes: int
    accuracy: float
    logical_error_rate: float
    unresolved_syndromes: int
    confusion: np.ndarray


def evaluate_corrections(layout: CodeLayout, frames_x: np.ndarray, frames_z: np.ndarray,
                         corr_x: np.ndarray, corr_z: np.ndarray,
                         fixes: np.ndarray | None = None) -> Metrics:
    """Score stacked trials given explicit corrections.

    Without fixes (LLD level): success = the raw correction clears the
    syndrome and the residual has class I; an uncleared syndrome is a
    failure outright.  With fixes (two-level pipeline): the correction is
    first completed by the canonical pure-error chain of any leftover
    syndrome (matching the HLD label derivation), and success = the
    completed residual's class equals the applied logical fix.
    """
    n = frames_x.shape[0]
    classes, unresolved = residual_classes(layout, frames_x ^ corr_x, frames_z ^ corr_z)
    if fixes is None:
        ok = (~unresolved) & (classes == 0)
        fixes = np.zeros(n, dtype=np.uint8)
    else:
        ok = classes == fixes
    successes = int(ok.sum())
    confusion = np.zeros((4, 4), dtype=np.int64)
    np.add.at(confusion, (classes.astype(np.intp), fixes.astype(np.intp)), 1)
    return Metrics(
        n=n,
        successes=successes,
        accuracy=successes / n,
        logical_error_rate=1.0 - successes / n,
        unresolved_syndromes=int(unresolved.sum()),
        confusion=confusion,
    )


def evaluate(model: DecoderModel, dataset: Dataset, indices: np.ndarray | None = None,
             level: str = "lld+hld") -> Metrics:
    """Evaluate the model on (a slice of) a dataset.

    level "lld": the raw LLD correction must clear the syndrome and leave a
    class-I residual.  level "lld+hld": the full pipeline (LLD correction,
    pure-error completion of any leftover syndrome, HLD logical fix) must
    leave a residual that acts trivially on the codespace."""
    if level not in ("lld", "lld+hld"):
        raise ValueError(f"level must be 'lld' or 'lld+hld', got {level!r}")
    data = dataset if indices is None else dataset.subset(indices)
    if len(data) == 0:
        raise ValueError("cannot evaluate on an empty sample set")
    layout = build_layout(dataset.d)
    corr_x, corr_z = lld_corrections(model, data.grids)
    fixes = None
    if level == "lld+hld":
        hld_out = neural.forward(model.hld, net_inputs(model.hld, data.grids))
        fixes = hld_out.argmax(axis=1).astype(np.uint8)
    return evaluate_corrections(layout, data.frames_x, data.frames_z,
                                corr_x, corr_z, fixes)


# ---------------------------------------------------------------------------
# model files

MODEL_FORMAT = "surfdec-model"
MODEL_VERSION = 1


_VOLATILE_MANIFEST_KEYS = ("lld_train_seconds", "hld_train_seconds")


def save_model(model: DecoderModel, path) -> None:
    arrays = {}
    for prefix, net in (("lld", model.lld), ("hld", model.hld)):
        for key, value in neural.network_to_arrays(net).items():
            arrays[f"{prefix}_{key}"] = value
    # wall-clock timings are timestamps: they stay out of the artifact so a
    # manifest replay reproduces the file bit-exactly
    manifest = {k: v for k, v in model.manifest.items()
                if k not in _VOLATILE_MANIFEST_KEYS}
    meta = {"format": MODEL_FORMAT, "version": MODEL_VERSION,
            "d": model.d, "arch": model.arch, "manifest": manifest}
    arrays["meta"] = np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)
    np.savez(path, **arrays)


def load_model(path) -> DecoderModel:
    with np.load(path) as data:
        arrays = dict(data)
    meta = json.loads(bytes(np.asarray(arrays["meta"], dtype=np.uint8)).decode())
    if meta.get("format") != MODEL_FORMAT or meta.get("version") != MODEL_VERSION:
        raise ValueError("not a recognized decoder model file")
    nets = {}
    for prefix in ("lld", "hld"):
        sub = {key[len(prefix) + 1:]: value for key, value in arrays.items()
               if key.startswith(prefix + "_")}
        nets[prefix] = neural.network_from_arrays(sub)
    return DecoderModel(int(meta["d"]), meta["arch"], nets["lld"], nets["hld"],
                        meta["manifest"])
