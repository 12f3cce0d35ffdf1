"""Train the two-level neural decoder and compare it with MWPM.

Generates a labeled dataset at one error rate, trains the low-level decoder
(per-qubit error bits) and the high-level decoder (logical residual class),
then scores both levels against the MWPM baseline on the held-out split.
"""

import numpy as np

from surfdec import mldecoder as mld
from surfdec import neural
from surfdec.code import build_layout, logical_class_batch, syndrome_batch
from surfdec.mwpm import decode_mwpm_bits
from surfdec.noise import make_noise

D = 3
P = 0.006
layout = build_layout(D)
noise = make_noise("depolarizing", P)

print(f"generating 40000 samples at d={D}, p={P} per step ...")
dataset = mld.generate_dataset(layout, noise, 40000, seed=8)
train_idx, test_idx = mld.split_indices(len(dataset), 0.7)

config = neural.TrainConfig(batch_size=64, epochs=300, learning_rate=0.5, seed=9)
print("training ffnn-simple (low level, then high level) ...")
model = mld.train_two_level(dataset, "ffnn-simple", config)
print(f"  lld: {model.manifest['lld_train_seconds']:.1f}s, "
      f"final loss {model.manifest['lld_final_loss']:.5f}")
print(f"  hld: {model.manifest['hld_train_seconds']:.1f}s, "
      f"final loss {model.manifest['hld_final_loss']:.5f}")

lld = mld.evaluate(model, dataset, test_idx, level="lld")
two = mld.evaluate(model, dataset, test_idx, level="lld+hld")
print(f"\nlow level alone:   accuracy {lld.accuracy:.4f} "
      f"({lld.unresolved_syndromes} syndromes left uncleared)")
print(f"two-level decoder: accuracy {two.accuracy:.4f}")
print("confusion (rows: residual class, cols: applied fix):")
print(two.confusion)

# MWPM on the same held-out trials
test = dataset.subset(test_idx)
fails = 0
synds = syndrome_batch(layout, test.frames_x, test.frames_z)
fx, fz = test.frames_x.copy(), test.frames_z.copy()
for i in np.flatnonzero(synds.any(axis=1)):
    cx, cz = decode_mwpm_bits(layout, synds[i])
    fx[i] ^= cx
    fz[i] ^= cz
classes = logical_class_batch(layout, fx, fz)
print(f"\nmwpm on the same trials: accuracy {(classes == 0).mean():.4f}")

decoded = mld.decode_ml(model, test.grids[0])
print("\nsingle-shot decode of the first test syndrome:",
      decoded[0], "fix", decoded[1].name)
