"""Minimal dense/conv neural-network engine with SGD training.

Everything runs in double precision on numpy.  Supported pieces are exactly
what the decoders need: Dense and valid-padding Conv2D layers, ReLU and
sigmoid activations, mean-squared-error loss, and plain mini-batch SGD.
Batches use the leading axis; dense inputs are ``(batch, features)``,
convolutional inputs ``(batch, height, width, channels)``.

Training and initialization are deterministic per seed.  Networks serialize
to a versioned npz file (architecture, seed, flat parameter arrays, sha256
checksum) that round-trips bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

ACTIVATIONS = ("none", "relu", "sigmoid")

_FILE_FORMAT = "surfdec-network"
_FILE_VERSION = 1


class ShapeError(ValueError):
    """Input/target shape does not match the network."""


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "sigmoid":
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    return z


def _activate_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0.0).astype(np.float64)
    if name == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(z)


@dataclass(frozen=True)
class Dense:
    units: int
    activation: str = "none"


@dataclass(frozen=True)
class Conv2D:
    filters: int
    kernel: tuple[int, int]
    activation: str = "none"


@dataclass(frozen=True)
class Flatten:
    pass


LayerSpec = Dense | Conv2D | Flatten


class _DenseLayer:
    kind = "dense"

    def __init__(self, in_size: int, units: int, activation: str):
        self.in_shape = (in_size,)
        self.out_shape = (units,)
        self.activation = activation
        self.w = np.zeros((in_size, units))
        self.b = np.zeros(units)

    def init_params(self, gen: np.random.Generator) -> None:
        limit = np.sqrt(6.0 / (self.w.shape[0] + self.w.shape[1]))
        self.w = gen.uniform(-limit, limit, size=self.w.shape)
        self.b = np.zeros(self.w.shape[1])

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, tuple]:
        z = x @ self.w + self.b
        a = _activate(self.activation, z)
        return a, (x, z, a)

    def backward(self, grad_a: np.ndarray, cache: tuple) -> tuple[np.ndarray, list[np.ndarray]]:
        x, z, a = cache
        delta = grad_a * _activate_grad(self.activation, z, a)
        grad_w = x.T @ delta
        grad_b = delta.sum(axis=0)
        grad_x = delta @ self.w.T
        return grad_x, [grad_w, grad_b]

    def params(self) -> list[np.ndarray]:
        return [self.w, self.b]

    def spec(self) -> Dense:
        return Dense(self.out_shape[0], self.activation)


class _ConvLayer:
    kind = "conv2d"

    def __init__(self, in_shape: tuple[int, int, int], filters: int,
                 kernel: tuple[int, int], activation: str):
        h, w, c = in_shape
        kh, kw = kernel
        if kh > h or kw > w or kh < 1 or kw < 1:
            raise ShapeError(f"kernel {kernel} does not fit input {in_shape}")
        self.in_shape = in_shape
        self.out_shape = (h - kh + 1, w - kw + 1, filters)
        self.kernel = (kh, kw)
        self.activation = activation
        self.w = np.zeros((kh, kw, c, filters))
        self.b = np.zeros(filters)

    def init_params(self, gen: np.random.Generator) -> None:
        kh, kw, c, f = self.w.shape
        fan_in = kh * kw * c
        fan_out = kh * kw * f
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        self.w = gen.uniform(-limit, limit, size=self.w.shape)
        self.b = np.zeros(f)

    def _im2col(self, x: np.ndarray) -> np.ndarray:
        kh, kw = self.kernel
        windows = np.lib.stride_tricks.sliding_window_view(x, (kh, kw), axis=(1, 2))
        # (B, OH, OW, C, kh, kw) -> (B, OH, OW, kh, kw, C)
        return np.ascontiguousarray(np.moveaxis(windows, 3, 5))

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, tuple]:
        batch = x.shape[0]
        oh, ow, f = self.out_shape
        kh, kw = self.kernel
        c = self.in_shape[2]
        cols = self._im2col(x).reshape(batch * oh * ow, kh * kw * c)
        z = (cols @ self.w.reshape(kh * kw * c, f) + self.b).reshape(batch, oh, ow, f)
        a = _activate(self.activation, z)
        return a, (cols, z, a)

    def backward(self, grad_a: np.ndarray, cache: tuple) -> tuple[np.ndarray, list[np.ndarray]]:
        cols, z, a = cache
        kh, kw = self.kernel
        h, w, c = self.in_shape
        oh, ow, f = self.out_shape
        batch = grad_a.shape[0]
        delta = (grad_a * _activate_grad(self.activation, z, a)).reshape(batch * oh * ow, f)
        grad_w = (cols.T @ delta).reshape(kh, kw, c, f)
        grad_b = delta.sum(axis=0)
        grad_cols = (delta @ self.w.reshape(kh * kw * c, f).T).reshape(batch, oh, ow, kh, kw, c)
        grad_x = np.zeros((batch, h, w, c))
        for i in range(kh):
            for j in range(kw):
                grad_x[:, i:i + oh, j:j + ow, :] += grad_cols[:, :, :, i, j, :]
        return grad_x, [grad_w, grad_b]

    def params(self) -> list[np.ndarray]:
        return [self.w, self.b]

    def spec(self) -> Conv2D:
        return Conv2D(self.out_shape[2], self.kernel, self.activation)


class _FlattenLayer:
    kind = "flatten"

    def __init__(self, in_shape: tuple[int, ...]):
        self.in_shape = in_shape
        self.out_shape = (int(np.prod(in_shape)),)
        self.activation = "none"

    def init_params(self, gen: np.random.Generator) -> None:
        pass

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, tuple]:
        return x.reshape(x.shape[0], -1), ()

    def backward(self, grad_a: np.ndarray, cache: tuple) -> tuple[np.ndarray, list[np.ndarray]]:
        return grad_a.reshape((grad_a.shape[0],) + self.in_shape), []

    def params(self) -> list[np.ndarray]:
        return []

    def spec(self) -> Flatten:
        return Flatten()


@dataclass
class Network:
    """An ordered stack of built layers plus the seed that initialized it."""

    input_shape: tuple[int, ...]
    layers: list
    seed: int

    @property
    def output_shape(self) -> tuple[int, ...]:
        return self.layers[-1].out_shape

    @property
    def output_activation(self) -> str:
        return self.layers[-1].activation


@dataclass(frozen=True)
class TrainConfig:
    """Mini-batch SGD settings; the defaults are the production profile."""

    batch_size: int = 10000
    epochs: int = 1000
    learning_rate: float = 0.01
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def build_network(specs: "list[LayerSpec] | tuple[LayerSpec, ...]",
                  input_shape: tuple[int, ...], seed: int) -> Network:
    """Build and initialize a network (Glorot-uniform weights, zero biases)."""
    gen = np.random.Generator(np.random.PCG64(seed))
    layers = []
    shape = tuple(int(s) for s in input_shape)
    for spec in specs:
        if isinstance(spec, Dense):
            if len(shape) != 1:
                raise ShapeError(f"dense layer needs a flat input, got shape {shape}")
            if spec.activation not in ACTIVATIONS:
                raise ValueError(f"unknown activation {spec.activation!r}")
            layer = _DenseLayer(shape[0], spec.units, spec.activation)
        elif isinstance(spec, Conv2D):
            if len(shape) != 3:
                raise ShapeError(f"conv layer needs a (h, w, c) input, got shape {shape}")
            if spec.activation not in ACTIVATIONS:
                raise ValueError(f"unknown activation {spec.activation!r}")
            layer = _ConvLayer(shape, spec.filters, tuple(spec.kernel), spec.activation)
        elif isinstance(spec, Flatten):
            layer = _FlattenLayer(shape)
        else:
            raise TypeError(f"unknown layer spec {spec!r}")
        layer.init_params(gen)
        layers.append(layer)
        shape = layer.out_shape
    if not layers:
        raise ValueError("network needs at least one layer")
    return Network(tuple(int(s) for s in input_shape), layers, seed)


def parameter_count(net: Network) -> int:
    return sum(p.size for layer in net.layers for p in layer.params())


def _check_input(net: Network, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[1:] != net.input_shape:
        raise ShapeError(f"input shape {x.shape[1:]} does not match network input {net.input_shape}")
    if not np.isfinite(x).all():
        raise ValueError("input contains NaN or Inf")
    return x


def forward(net: Network, x: np.ndarray) -> np.ndarray:
    """Batched forward pass; raises on shape mismatch or non-finite values."""
    x = _check_input(net, x)
    for layer in net.layers:
        x, _ = layer.forward(x)
    if not np.isfinite(x).all():
        raise ValueError("forward pass produced NaN or Inf")
    return x


def _forward_cached(net: Network, x: np.ndarray) -> tuple[np.ndarray, list]:
    caches = []
    for layer in net.layers:
        x, cache = layer.forward(x)
        caches.append(cache)
    return x, caches


def mse_loss(output: np.ndarray, target: np.ndarray) -> float:
    """Mean squared error over every output element of the batch."""
    diff = output - target
    return float(np.mean(diff * diff))


def backward(net: Network, x: np.ndarray, target: np.ndarray) -> tuple[list[list[np.ndarray]], float]:
    """Gradients of the MSE loss w.r.t. every parameter.

    Returns (grads, loss) where grads[i] lists layer i's parameter gradients
    in ``layer.params()`` order (empty for parameterless layers).
    """
    x = _check_input(net, x)
    target = np.asarray(target, dtype=np.float64)
    output, caches = _forward_cached(net, x)
    if target.shape != output.shape:
        raise ShapeError(f"target shape {target.shape} does not match output {output.shape}")
    loss = mse_loss(output, target)
    grad = (2.0 / output.size) * (output - target)
    grads: list[list[np.ndarray]] = [[] for _ in net.layers]
    for i in reversed(range(len(net.layers))):
        grad, layer_grads = net.layers[i].backward(grad, caches[i])
        grads[i] = layer_grads
    return grads, loss


def sgd_step(net: Network, grads: list[list[np.ndarray]], learning_rate: float) -> None:
    for layer, layer_grads in zip(net.layers, grads):
        for param, grad in zip(layer.params(), layer_grads):
            param -= learning_rate * grad


def train(net: Network, inputs: np.ndarray, targets: np.ndarray,
          config: TrainConfig) -> dict:
    """Mini-batch SGD on MSE.  Mutates ``net`` in place.

    Returns a report dict with the per-epoch loss history and wall-clock
    training time.  Deterministic for a given config seed.
    """
    inputs = _check_input(net, inputs)
    targets = np.asarray(targets, dtype=np.float64)
    n = inputs.shape[0]
    if n == 0:
        raise ValueError("training dataset is empty")
    if targets.shape[0] != n:
        raise ShapeError("inputs and targets disagree on sample count")
    gen = np.random.Generator(np.random.PCG64(config.seed))
    history = []
    started = time.perf_counter()
    for _epoch in range(config.epochs):
        order = gen.permutation(n) if config.shuffle else np.arange(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            grads, loss = backward(net, inputs[idx], targets[idx])
            sgd_step(net, grads, config.learning_rate)
            epoch_loss += loss
            n_batches += 1
        history.append(epoch_loss / n_batches)
        if not np.isfinite(history[-1]):
            raise ValueError(f"training diverged at epoch {_epoch}: loss={history[-1]}")
    return {
        "loss_history": history,
        "train_seconds": time.perf_counter() - started,
        "epochs": config.epochs,
        "samples": n,
    }


def predict_binary(net: Network, x: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Threshold a sigmoid output head elementwise (>= threshold maps to 1)."""
    if net.output_activation != "sigmoid":
        raise ValueError("predict_binary requires a sigmoid output head")
    return (forward(net, x) >= threshold).astype(np.uint8)


# ---------------------------------------------------------------------------
# architecture registry

ARCHITECTURES = ("ffnn-simple", "ffnn-complex", "cnn-simple", "cnn-complex")


def architecture_specs(arch: str, d: int, out_units: int) -> tuple[tuple[LayerSpec, ...], tuple[int, ...]]:
    """Layer specs and input shape for a named decoder architecture.

    FFNNs consume the flattened (d+1)^2 syndrome grid; CNNs consume the
    (d+1, d+1, 1) grid.  The simple CNN's kernel spans the whole grid; the
    complex CNN shrinks its first kernel to d-1 so two 2x2 convolutions
    still fit behind it.
    """
    g = d + 1
    if arch == "ffnn-simple":
        specs: tuple[LayerSpec, ...] = (
            Dense(32, "relu"), Dense(16, "relu"), Dense(out_units, "sigmoid"))
        return specs, (g * g,)
    if arch == "ffnn-complex":
        specs = (Dense(256, "relu"), Dense(128, "relu"), Dense(64, "relu"),
                 Dense(32, "relu"), Dense(16, "relu"), Dense(out_units, "sigmoid"))
        return specs, (g * g,)
    if arch == "cnn-simple":
        specs = (Conv2D(64, (g, g), "relu"), Flatten(),
                 Dense(256, "relu"), Dense(64, "relu"), Dense(out_units, "sigmoid"))
        return specs, (g, g, 1)
    if arch == "cnn-complex":
        k1 = d - 1
        specs = (Conv2D(64, (k1, k1), "relu"), Conv2D(64, (2, 2), "relu"),
                 Conv2D(64, (2, 2), "relu"), Flatten(),
                 Dense(512, "relu"), Dense(256, "relu"), Dense(128, "relu"),
                 Dense(64, "relu"), Dense(out_units, "sigmoid"))
        return specs, (g, g, 1)
    raise ValueError(f"unknown architecture {arch!r}; expected one of {ARCHITECTURES}")


def build_architecture(arch: str, d: int, out_units: int, seed: int) -> Network:
    specs, input_shape = architecture_specs(arch, d, out_units)
    return build_network(list(specs), input_shape, seed)


# ---------------------------------------------------------------------------
# serialization

def _spec_to_dict(spec: LayerSpec) -> dict:
    if isinstance(spec, Dense):
        return {"type": "dense", "units": spec.units, "activation": spec.activation}
    if isinstance(spec, Conv2D):
        return {"type": "conv2d", "filters": spec.filters,
                "kernel": list(spec.kernel), "activation": spec.activation}
    return {"type": "flatten"}


def _spec_from_dict(data: dict) -> LayerSpec:
    if data["type"] == "dense":
        return Dense(int(data["units"]), data["activation"])
    if data["type"] == "conv2d":
        return Conv2D(int(data["filters"]), tuple(int(k) for k in data["kernel"]),
                      data["activation"])
    if data["type"] == "flatten":
        return Flatten()
    raise ValueError(f"unknown layer type {data['type']!r}")


def _params_checksum(params: list[np.ndarray]) -> str:
    digest = hashlib.sha256()
    for p in params:
        digest.update(np.ascontiguousarray(p, dtype=np.float64).tobytes())
    return digest.hexdigest()


def network_to_arrays(net: Network) -> dict[str, np.ndarray]:
    """Flatten a network into named arrays plus a JSON metadata blob."""
    params = [p for layer in net.layers for p in layer.params()]
    meta = {
        "format": _FILE_FORMAT,
        "version": _FILE_VERSION,
        "input_shape": list(net.input_shape),
        "seed": net.seed,
        "layers": [_spec_to_dict(layer.spec()) for layer in net.layers],
        "checksum": _params_checksum(params),
    }
    arrays = {"meta": np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)}
    for i, p in enumerate(params):
        arrays[f"param_{i}"] = p
    return arrays


def network_from_arrays(arrays: dict) -> Network:
    meta = json.loads(bytes(np.asarray(arrays["meta"], dtype=np.uint8)).decode())
    if meta.get("format") != _FILE_FORMAT or meta.get("version") != _FILE_VERSION:
        raise ValueError("not a recognized network file (bad format or version)")
    specs = [_spec_from_dict(s) for s in meta["layers"]]
    net = build_network(specs, tuple(meta["input_shape"]), int(meta["seed"]))
    params = [p for layer in net.layers for p in layer.params()]
    for i, param in enumerate(params):
        stored = np.asarray(arrays[f"param_{i}"], dtype=np.float64)
        if stored.shape != param.shape:
            raise ValueError(f"parameter {i} has shape {stored.shape}, expected {param.shape}")
        param[...] = stored
    if _params_checksum(params) != meta["checksum"]:
        raise ValueError("network file checksum mismatch")
    return net


def save_network(net: Network, path) -> None:
    np.savez(path, **network_to_arrays(net))


def load_network(path) -> Network:
    with np.load(path) as data:
        return network_from_arrays(dict(data))
