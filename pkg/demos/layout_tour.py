"""Tour of the rotated surface-code layout and its syndrome machinery.

Walks through the d=3 code (SC17): the check structure, how single errors
light up defects, the grid embedding the decoders consume, and the
degeneracy that makes decoding interesting.
"""

import numpy as np

from surfdec.code import (
    Pauli,
    PauliFrame,
    build_layout,
    embed_syndrome_grid,
    layout_dump,
    logical_class,
    syndrome,
)

layout = build_layout(3)
print(layout_dump(layout))

print("A distance-3 code stores one logical qubit in 9 data qubits;")
print("8 stabilizer checks plus 8 dummy cells tile the 4x4 grid.\n")

# single X error on the center qubit: the two Z-checks containing it flip
frame = PauliFrame.single(9, 4, Pauli.X)
bits = syndrome(layout, frame)
print("X error on qubit 4 ->", "syndrome bits", bits)
print("as the 4x4 grid the decoders see:")
print(embed_syndrome_grid(layout, bits), "\n")

# degeneracy: a different error with the same syndrome
other = PauliFrame.single(9, 1, Pauli.X) * PauliFrame.single(9, 7, Pauli.X)
print("X errors on qubits 1 and 7 give the same syndrome:",
      np.array_equal(syndrome(layout, other), bits))
product = frame * other
print("but their product is a logical operator:",
      logical_class(layout, product).name)
print("-> confusing these two errors silently corrupts the encoded qubit.\n")

# stabilizers themselves are invisible
check = layout.checks[2]
stab = layout.stabilizer_frame(check)
print(f"applying check {check.kind} at {check.grid_pos} as an error:",
      "syndrome is zero," , "class", logical_class(layout, stab).name)

for d in (3, 5, 7):
    lay = build_layout(d)
    print(f"d={d}: {lay.n_data} data qubits, {lay.n_checks} checks, "
          f"{len(lay.dummy_cells)} dummy cells")
