"""Pauli error channels compounded over the 8-step error-correction cycle.

Errors hit data qubits only (measure qubits are noise-free and measurements
ideal).  Within one cycle each of ``steps`` rounds applies an independent
X/Y/Z fault to each data qubit with probabilities (p_x, p_y, p_z); round
errors compose by phase-free Pauli multiplication, so repeated faults can
cancel (eight X faults are the identity).

Randomness is counter-based: a 64-bit stream seed plus a splitmix64-style
mixing function derive disjoint substreams per trial, so sweeps parallelize
with reproducible results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import CodeLayout, PauliFrame

#: Rounds in one surface-code error-correction cycle.
CYCLE_STEPS = 8

#: Channel asymmetry presets (eta such that eta * p_z = p_x = p_y).
BIAS_PRESETS = (1.0, 0.1, 0.07, 0.04, 0.01)

_MIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def mix64(seed: int, index: int) -> int:
    """Derive a substream seed from (seed, index).

    splitmix64 finalizer applied to ``seed + index * golden``; distinct
    indices give statistically independent, platform-stable streams.
    """
    z = (seed + (index + 1) * _MIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream: a seed plus the substream derivation rule."""

    seed: int

    def substream(self, index: int) -> "RngStream":
        if index < 0:
            raise ValueError("substream index must be nonnegative")
        return RngStream(mix64(self.seed, index))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass(frozen=True)
class NoiseModel:
    """Per-step, per-qubit Pauli fault probabilities.

    ``kind`` is "bitflip" (all mass on X) or "depolarizing"; ``eta`` records
    the asymmetry ratio eta * p_z = p_x = p_y used to build the model
    (1.0 = symmetric, None for bitflip where it is meaningless).
    """

    p_x: float
    p_y: float
    p_z: float
    steps: int = CYCLE_STEPS
    kind: str = "depolarizing"
    eta: float | None = 1.0

    def __post_init__(self):
        for name, p in (("p_x", self.p_x), ("p_y", self.p_y), ("p_z", self.p_z)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.p_x + self.p_y + self.p_z > 1.0 + 1e-12:
            raise ValueError("p_x + p_y + p_z must not exceed 1 per step")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.kind not in ("bitflip", "depolarizing"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "bitflip" and (self.p_y != 0.0 or self.p_z != 0.0):
            raise ValueError("bitflip noise must have p_y = p_z = 0")

    @property
    def p_step(self) -> float:
        """Total per-step fault probability p_x + p_y + p_z."""
        return self.p_x + self.p_y + self.p_z

    def config(self) -> dict:
        """JSON-style key/value form used in run manifests."""
        return {
            "kind": self.kind,
            "p": self.p_step,
            "eta": self.eta,
            "steps": self.steps,
        }


def make_noise(kind: str, p: float, eta: float = 1.0, steps: int = CYCLE_STEPS) -> NoiseModel:
    """Split a total per-step probability into a NoiseModel.

    Depolarizing: p_x = p_y = eta * p_z with p_x + p_y + p_z = p, so
    p_z = p / (1 + 2*eta); eta = 1 gives the symmetric p/3 split.
    Bitflip: all mass on p_x.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if kind == "bitflip":
        return NoiseModel(p_x=p, p_y=0.0, p_z=0.0, steps=steps, kind="bitflip", eta=None)
    if kind == "depolarizing":
        if not 0.0 < eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {eta}")
        p_z = p / (1.0 + 2.0 * eta)
        p_x = eta * p_z
        return NoiseModel(p_x=p_x, p_y=p_x, p_z=p_z, steps=steps, kind="depolarizing", eta=eta)
    raise ValueError(f"unknown noise kind {kind!r}")


def cycle_error_probability(p: float, steps: int = CYCLE_STEPS) -> float:
    """Probability of at least one fault on a qubit across one cycle: 1-(1-p)^steps."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    return 1.0 - (1.0 - p) ** steps

def sample_error(model: NoiseModel, layout: CodeLayout, rng: RngStream) -> PauliFrame:
    """Draw one compounded error frame for a full cycle.

    Each of ``model.steps`` rounds hits every data qubit independently with
    X/Y/Z faults at (p_x, p_y, p_z); rounds compose multiplicatively.  The
    same (model, layout, stream seed) always returns the same frame.
    """
    gen = rng.generator()
    n = layout.n_data
    u = gen.random((model.steps, n))
    # intervals: [0,p_x) -> X, [p_x,p_x+p_y) -> Y, [p_x+p_y,p_x+p_y+p_z) -> Z
    x_flip = u < (model.p_x + model.p_y)
    z_flip = (u >= model.p_x) & (u < model.p_x + model.p_y + model.p_z)
    x_bits = (x_flip.sum(axis=0) & 1).astype(np.uint8)
    z_bits = (z_flip.sum(axis=0) & 1).astype(np.uint8)
    return PauliFrame(x_bits, z_bits)


def sample_error_batch(model: NoiseModel, layout: CodeLayout, stream: RngStream,
                       n_trials: int, first_trial: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Stacked frames for trials [first_trial, first_trial + n_trials).

    Trial i uses ``stream.substream(i)``, so batches of any size agree with
    per-trial ``sample_error`` calls bit for bit.
    """
    n = layout.n_data
    x_bits = np.empty((n_trials, n), dtype=np.uint8)
    z_bits = np.empty((n_trials, n), dtype=np.uint8)
    for row, trial in enumerate(range(first_trial, first_trial + n_trials)):
        frame = sample_error(model, layout, stream.substream(trial))
        x_bits[row] = frame.x
        z_bits[row] = frame.z
    return x_bits, z_bits
