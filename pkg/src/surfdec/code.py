"""Rotated surface-code layouts, Pauli frames, syndromes and logical classes.

Geometry conventions (fixed so that datasets, trained models and golden files
stay mutually compatible):

* Data qubits sit on the vertices of a d x d grid, indexed row-major:
  qubit ``q = r*d + c`` is at vertex ``(r, c)``.
* Stabilizer plaquettes are the cells of the surrounding (d+1) x (d+1) grid.
  Cell ``(R, C)`` touches the data vertices ``(R-1..R, C-1..C)`` that exist.
  Interior cells carry weight-4 checks, boundary cells weight-2 checks.
* Cells are checkerboard-colored: ``(R + C)`` odd -> Z-check, even -> X-check.
  On the top/bottom grid rows only X-checks survive, on the left/right columns
  only Z-checks; the remaining 2(d+1) cells are dummy cells, always 0.
* Logical X = X on every qubit of the leftmost column (connects top-bottom),
  logical Z = Z on every qubit of the top row (connects left-right).

All operations are pure; a built ``CodeLayout`` is immutable and can be shared
freely across workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class LayoutError(ValueError):
    """Raised when a layout request or a generated layout is invalid."""


class NonzeroSyndromeError(ValueError):
    """Raised when a logical class is requested for a frame that still
    violates at least one stabilizer."""


class Pauli(enum.IntEnum):
    """Single-qubit Pauli operator under the phase-free convention.

    The integer value doubles as the label index used by the decoders
    (tie-break order I < X < Z < Y) and encodes the (x_bit, z_bit) pair
    as ``value = x_bit + 2*z_bit``.
    """

    I = 0
    X = 1
    Z = 2
    Y = 3

    @property
    def x_bit(self) -> int:
        return self.value & 1

    @property
    def z_bit(self) -> int:
        return (self.value >> 1) & 1

    @staticmethod
    def from_bits(x_bit: int, z_bit: int) -> "Pauli":
        return Pauli((x_bit & 1) | ((z_bit & 1) << 1))

    def __mul__(self, other: "Pauli") -> "Pauli":
        # phase-free product: componentwise XOR, every element self-inverse
        return Pauli(self.value ^ other.value)


#: Logical residuals are classified by the same four phase-free Paulis.
LogicalClass = Pauli


class PauliFrame:
    """Per-data-qubit Pauli assignment, stored as parallel x/z bit vectors.

    Composition is elementwise XOR of the bit vectors, which realizes the
    phase-free Pauli product (commutative, every frame self-inverse).
    """

    __slots__ = ("x", "z")

    def __init__(self, x: np.ndarray, z: np.ndarray):
        x = np.asarray(x, dtype=np.uint8)
        z = np.asarray(z, dtype=np.uint8)
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x and z bit vectors must be 1-D and equal length")
        self.x = x
        self.z = z

    @staticmethod
    def identity(n: int) -> "PauliFrame":
        return PauliFrame(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @staticmethod
    def from_paulis(ops: "list[Pauli] | tuple[Pauli, ...]") -> "PauliFrame":
        x = np.fromiter((p.x_bit for p in ops), dtype=np.uint8, count=len(ops))
        z = np.fromiter((p.z_bit for p in ops), dtype=np.uint8, count=len(ops))
        return PauliFrame(x, z)

    @staticmethod
    def single(n: int, qubit: int, op: Pauli) -> "PauliFrame":
        frame = PauliFrame.identity(n)
        frame.x[qubit] = op.x_bit
        frame.z[qubit] = op.z_bit
        return frame

    def __len__(self) -> int:
        return self.x.shape[0]

    def __getitem__(self, qubit: int) -> Pauli:
        return Pauli.from_bits(int(self.x[qubit]), int(self.z[qubit]))

    def __mul__(self, other: "PauliFrame") -> "PauliFrame":
        if len(self) != len(other):
            raise ValueError("cannot compose frames of different lengths")
        return PauliFrame(self.x ^ other.x, self.z ^ other.z)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliFrame):
            return NotImplemented
        return bool(np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __hash__(self):
        return hash((self.x.tobytes(), self.z.tobytes()))

    def weight(self) -> int:
        """Number of non-identity single-qubit operators in the frame."""
        return int(np.count_nonzero(self.x | self.z))

    def paulis(self) -> list[Pauli]:
        return [self[q] for q in range(len(self))]

    def copy(self) -> "PauliFrame":
        return PauliFrame(self.x.copy(), self.z.copy())

    def __repr__(self) -> str:
        return "PauliFrame(%s)" % "".join(p.name for p in self.paulis())


@dataclass(frozen=True)
class StabilizerCheck:
    """One stabilizer generator: its kind, data-qubit support and host cell."""

    kind: str                     # "X" or "Z"
    support: tuple[int, ...]      # data-qubit indices, ascending
    grid_pos: tuple[int, int]     # (row, col) cell in the (d+1) x (d+1) grid


@dataclass(eq=False)
class CodeLayout:
    """Distance-d rotated surface code with its square-lattice embedding.

    Immutable after construction (treat all arrays as read-only).  ``checks``
    are ordered row-major by cell position, which fixes the syndrome bit
    order everywhere (datasets, models, CSV files).
    """

    d: int
    checks: tuple[StabilizerCheck, ...]
    dummy_cells: tuple[tuple[int, int], ...]
    logical_x_support: tuple[int, ...]
    logical_z_support: tuple[int, ...]

    # derived, filled in __post_init__
    n_data: int = field(init=False)
    x_check_ids: np.ndarray = field(init=False, repr=False)
    z_check_ids: np.ndarray = field(init=False, repr=False)
    # syndrome = (m_x @ frame.x + m_z @ frame.z) mod 2
    m_x: np.ndarray = field(init=False, repr=False)
    m_z: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.n_data = self.d * self.d
        kinds = [c.kind for c in self.checks]
        self.x_check_ids = np.array([i for i, k in enumerate(kinds) if k == "X"], dtype=np.intp)
        self.z_check_ids = np.array([i for i, k in enumerate(kinds) if k == "Z"], dtype=np.intp)
        m_x = np.zeros((len(self.checks), self.n_data), dtype=np.float64)
        m_z = np.zeros_like(m_x)
        for i, check in enumerate(self.checks):
            target = m_x if check.kind == "Z" else m_z  # Z-checks see X errors and vice versa
            for q in check.support:
                target[i, q] = 1.0
        self.m_x = m_x
        self.m_z = m_z

    @property
    def n_checks(self) -> int:
        return len(self.checks)

    def check_at(self, grid_pos: tuple[int, int]) -> StabilizerCheck | None:
        for check in self.checks:
            if check.grid_pos == grid_pos:
                return check
        return None

    def qubit_index(self, row: int, col: int) -> int:
        return row * self.d + col

    def stabilizer_frame(self, check: StabilizerCheck) -> PauliFrame:
        """The check's own support applied as an error of its own kind."""
        op = Pauli.X if check.kind == "X" else Pauli.Z
        frame = PauliFrame.identity(self.n_data)
        for q in check.support:
            frame.x[q] ^= op.x_bit
            frame.z[q] ^= op.z_bit
        return frame


def _cell_corners(d: int, cell: tuple[int, int]) -> tuple[int, ...]:
    row, col = cell
    corners = []
    for r in (row - 1, row):
        for c in (col - 1, col):
            if 0 <= r < d and 0 <= c < d:
                corners.append(r * d + c)
    return tuple(sorted(corners))


def _cell_kind(d: int, cell: tuple[int, int]) -> str | None:
    """Check kind hosted by a cell, or None for a dummy cell.

    Interior cells follow the checkerboard; boundary cells survive only when
    the checkerboard color matches the boundary type (X on top/bottom rows,
    Z on left/right columns).
    """
    row, col = cell
    kind = "Z" if (row + col) % 2 == 1 else "X"
    corners = _cell_corners(d, cell)
    if len(corners) < 2:
        return None
    if len(corners) == 2:
        on_top_bottom = row in (0, d)
        if on_top_bottom and kind != "X":
            return None
        if not on_top_bottom and kind != "Z":
            return None
    return kind


def build_layout(d: int) -> CodeLayout:
    """Construct the distance-d rotated surface code.

    Deterministic for a given d.  Raises ``LayoutError`` for even or
    too-small distances, or if (impossibly) the generated layout violates a
    structural invariant.
    """
    if not isinstance(d, (int, np.integer)):
        raise LayoutError(f"distance must be an integer, got {d!r}")
    d = int(d)
    if d < 3 or d % 2 == 0:
        raise LayoutError(f"distance must be an odd integer >= 3, got {d}")

    checks = []
    dummies = []
    for row in range(d + 1):
        for col in range(d + 1):
            kind = _cell_kind(d, (row, col))
            if kind is None:
                dummies.append((row, col))
            else:
                checks.append(StabilizerCheck(kind, _cell_corners(d, (row, col)), (row, col)))

    layout = CodeLayout(
        d=d,
        checks=tuple(checks),
        dummy_cells=tuple(dummies),
        logical_x_support=tuple(r * d for r in range(d)),
        logical_z_support=tuple(range(d)),
    )
    _validate_layout(layout)
    return layout


def _validate_layout(layout: CodeLayout) -> None:
    d = layout.d
    if len(layout.checks) != d * d - 1:
        raise LayoutError(f"expected {d * d - 1} checks, built {len(layout.checks)}")
    n_x = len(layout.x_check_ids)
    n_z = len(layout.z_check_ids)
    if n_x != n_z or n_x != (d * d - 1) // 2:
        raise LayoutError(f"check kinds unbalanced: {n_x} X vs {n_z} Z")
    if len(layout.dummy_cells) != 2 * (d + 1):
        raise LayoutError(f"expected {2 * (d + 1)} dummy cells, built {len(layout.dummy_cells)}")
    cells = [c.grid_pos for c in layout.checks] + list(layout.dummy_cells)
    if len(set(cells)) != (d + 1) ** 2 or len(cells) != (d + 1) ** 2:
        raise LayoutError("check cells plus dummy cells must tile the grid exactly")
    for check in layout.checks:
        if len(check.support) not in (2, 4):
            raise LayoutError(f"check at {check.grid_pos} has weight {len(check.support)}")
    # opposite-kind checks must overlap on an even number of qubits
    for i, a in enumerate(layout.checks):
        for b in layout.checks[i + 1:]:
            if a.kind != b.kind and len(set(a.support) & set(b.support)) % 2 != 0:
                raise LayoutError(f"checks at {a.grid_pos} and {b.grid_pos} anticommute")
    # logical representatives: commute with all checks, anticommute with each other
    lx = set(layout.logical_x_support)
    lz = set(layout.logical_z_support)
    for check in layout.checks:
        support = set(check.support)
        if check.kind == "Z" and len(support & lx) % 2 != 0:
            raise LayoutError("logical X anticommutes with a Z-check")
        if check.kind == "X" and len(support & lz) % 2 != 0:
            raise LayoutError("logical Z anticommutes with an X-check")
    if len(lx & lz) % 2 != 1:
        raise LayoutError("logical X and Z representatives must anticommute")


def syndrome(layout: CodeLayout, frame: PauliFrame) -> np.ndarray:
    """Stabilizer-violation bits for a frame, ordered like ``layout.checks``.

    Bit i flips once per anticommuting component on check i's support, so
    Z-checks detect X/Y components and X-checks detect Z/Y components.
    Linear over frame composition: syndrome(f1*f2) = syndrome(f1) ^ syndrome(f2).
    """
    if len(frame) != layout.n_data:
        raise ValueError(f"frame has {len(frame)} qubits, layout needs {layout.n_data}")
    bits = layout.m_x @ frame.x.astype(np.float64) + layout.m_z @ frame.z.astype(np.float64)
    return (bits.astype(np.int64) & 1).astype(np.uint8)


def syndrome_batch(layout: CodeLayout, x_bits: np.ndarray, z_bits: np.ndarray) -> np.ndarray:
    """Vectorized ``syndrome`` for stacked frames of shape (n_frames, d*d)."""
    bits = x_bits.astype(np.float64) @ layout.m_x.T + z_bits.astype(np.float64) @ layout.m_z.T
    return (bits.astype(np.int64) & 1).astype(np.uint8)


def logical_class(layout: CodeLayout, frame: PauliFrame) -> Pauli:
    """Logical Pauli the zero-syndrome frame applies to the encoded qubit.

    Determined by anticommutation with the logical representatives:
    anticommuting with logical-Z only gives X, with logical-X only gives Z,
    with both gives Y, with neither gives I.  Constant on stabilizer cosets.
    """
    bits = syndrome(layout, frame)
    if bits.any():
        raise NonzeroSyndromeError(
            "logical class is undefined for a frame with a nonzero syndrome")
    anti_z = int(frame.x[list(layout.logical_z_support)].sum()) % 2
    anti_x = int(frame.z[list(layout.logical_x_support)].sum()) % 2
    return Pauli.from_bits(anti_z, anti_x)


def logical_class_batch(layout: CodeLayout, x_bits: np.ndarray, z_bits: np.ndarray) -> np.ndarray:
    """Vectorized logical classes (as Pauli integer values) for stacked
    zero-syndrome frames; the caller is responsible for the syndrome check."""
    anti_z = x_bits[:, list(layout.logical_z_support)].sum(axis=1) % 2
    anti_x = z_bits[:, list(layout.logical_x_support)].sum(axis=1) % 2
    return (anti_z + 2 * anti_x).astype(np.uint8)


def logical_representative(layout: CodeLayout, cls: Pauli) -> PauliFrame:
    """A fixed frame realizing the given logical class: X along the logical-X
    support, Z along the logical-Z support, their product for Y."""
    frame = PauliFrame.identity(layout.n_data)
    if cls.x_bit:
        for q in layout.logical_x_support:
            frame.x[q] ^= 1
    if cls.z_bit:
        for q in layout.logical_z_support:
            frame.z[q] ^= 1
    return frame


def embed_syndrome_grid(layout: CodeLayout, bits: np.ndarray) -> np.ndarray:
    """Place syndrome bits at their host cells of the (d+1) x (d+1) grid.

    Dummy cells stay 0.  Inverse of ``extract_syndrome_bits``.
    """
    bits = np.asarray(bits)
    if bits.shape != (layout.n_checks,):
        raise ValueError(f"expected {layout.n_checks} syndrome bits, got shape {bits.shape}")
    grid = np.zeros((layout.d + 1, layout.d + 1), dtype=np.uint8)
    for check, bit in zip(layout.checks, bits):
        grid[check.grid_pos] = bit
    return grid


def extract_syndrome_bits(layout: CodeLayout, grid: np.ndarray) -> np.ndarray:
    """Read syndrome bits back out of a grid embedding (exact round-trip)."""
    grid = np.asarray(grid)
    if grid.shape != (layout.d + 1, layout.d + 1):
        raise ValueError(f"expected a {layout.d + 1}x{layout.d + 1} grid, got {grid.shape}")
    return np.array([grid[c.grid_pos] for c in layout.checks], dtype=np.uint8)


def layout_dump(layout: CodeLayout) -> str:
    """Structured text dump of the layout, for golden-file comparisons."""
    lines = [f"rotated surface code d={layout.d}"]
    lines.append(f"data qubits: {layout.n_data} (row-major on the {layout.d}x{layout.d} vertex grid)")
    for i, check in enumerate(layout.checks):
        support = ",".join(str(q) for q in check.support)
        lines.append(f"check {i:2d} {check.kind} cell={check.grid_pos} qubits=[{support}]")
    dummy = " ".join(f"{cell}" for cell in layout.dummy_cells)
    lines.append(f"dummy cells: {dummy}")
    lines.append(f"logical X qubits: {list(layout.logical_x_support)}")
    lines.append(f"logical Z qubits: {list(layout.logical_z_support)}")
    return "\n".join(lines) + "\n"
