"""Layout geometry, syndromes, logical classes and the grid embedding."""

import itertools
from pathlib import Path

import numpy as np
import pytest

from surfdec.code import (
    LayoutError,
    NonzeroSyndromeError,
    Pauli,
    PauliFrame,
    build_layout,
    embed_syndrome_grid,
    extract_syndrome_bits,
    layout_dump,
    logical_class,
    logical_representative,
    syndrome,
    syndrome_batch,
)

DATA = Path(__file__).parent / "data"


def naive_syndrome(layout, frame):
    """Independent oracle: count anticommutations check by check."""
    bits = []
    for check in layout.checks:
        flips = 0
        for q in check.support:
            op = frame[q]
            if check.kind == "Z" and op in (Pauli.X, Pauli.Y):
                flips ^= 1
            if check.kind == "X" and op in (Pauli.Z, Pauli.Y):
                flips ^= 1
        bits.append(flips)
    return np.array(bits, dtype=np.uint8)


def random_frame(gen, n):
    return PauliFrame(gen.integers(0, 2, n).astype(np.uint8),
                      gen.integers(0, 2, n).astype(np.uint8))


class TestPauli:
    def test_bit_encoding(self):
        assert [(p.x_bit, p.z_bit) for p in (Pauli.I, Pauli.X, Pauli.Z, Pauli.Y)] == [
            (0, 0), (1, 0), (0, 1), (1, 1)]

    def test_self_inverse_and_products(self):
        for a in Pauli:
            assert a * a == Pauli.I
        assert Pauli.X * Pauli.Z == Pauli.Y
        assert Pauli.Y * Pauli.X == Pauli.Z
        assert Pauli.Y * Pauli.Z == Pauli.X

    def test_tiebreak_order(self):
        # argmax over HLD outputs relies on this exact ordering
        assert [p.value for p in (Pauli.I, Pauli.X, Pauli.Z, Pauli.Y)] == [0, 1, 2, 3]


class TestPauliFrame:
    def test_composition_is_elementwise_product(self):
        gen = np.random.default_rng(7)
        f1, f2 = random_frame(gen, 9), random_frame(gen, 9)
        combined = f1 * f2
        for q in range(9):
            assert combined[q] == f1[q] * f2[q]

    def test_composition_commutes_and_self_inverse(self):
        gen = np.random.default_rng(8)
        f1, f2 = random_frame(gen, 25), random_frame(gen, 25)
        assert f1 * f2 == f2 * f1
        assert f1 * f1 == PauliFrame.identity(25)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            PauliFrame.identity(9) * PauliFrame.identity(25)


class TestBuildLayout:
    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_counts(self, d):
        layout = build_layout(d)
        assert layout.n_data == d * d
        assert layout.n_checks == d * d - 1
        assert len(layout.x_check_ids) == (d * d - 1) // 2
        assert len(layout.z_check_ids) == (d * d - 1) // 2
        assert len(layout.dummy_cells) == 2 * (d + 1)
        cells = {c.grid_pos for c in layout.checks} | set(layout.dummy_cells)
        assert len(cells) == (d + 1) ** 2

    def test_d3_matches_sc17(self):
        layout = build_layout(3)
        assert layout.n_data == 9
        assert layout.n_checks == 8
        # 16 input nodes for the d=3 decoder: 8 checks + 8 dummies
        assert layout.n_checks + len(layout.dummy_cells) == 16

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_check_weights(self, d):
        for check in build_layout(d).checks:
            row, col = check.grid_pos
            interior = 1 <= row <= d - 1 and 1 <= col <= d - 1
            assert len(check.support) == (4 if interior else 2)

    @pytest.mark.parametrize("d", [3, 5])
    def test_all_check_pairs_commute(self, d):
        layout = build_layout(d)
        for a, b in itertools.combinations(layout.checks, 2):
            if a.kind != b.kind:
                assert len(set(a.support) & set(b.support)) % 2 == 0

    @pytest.mark.parametrize("bad", [2, 4, 1, 0, -3])
    def test_rejects_bad_distance(self, bad):
        with pytest.raises(LayoutError):
            build_layout(bad)

    def test_deterministic(self):
        assert layout_dump(build_layout(5)) == layout_dump(build_layout(5))

    def test_golden_dump_d3(self):
        assert layout_dump(build_layout(3)) == (DATA / "layout_d3.txt").read_text()

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_every_qubit_in_each_kind(self, d):
        # single errors must be detectable: each qubit sits in >= 1 check of each kind
        layout = build_layout(d)
        for kind in ("X", "Z"):
            seen = set()
            for check in layout.checks:
                if check.kind == kind:
                    seen.update(check.support)
            assert seen == set(range(d * d))


class TestSyndrome:
    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_identity_frame(self, d):
        layout = build_layout(d)
        assert not syndrome(layout, PauliFrame.identity(d * d)).any()

    def test_center_x_flips_its_two_z_checks(self):
        layout = build_layout(3)
        frame = PauliFrame.single(9, 4, Pauli.X)
        expected = naive_syndrome(layout, frame)
        violated = [i for i, c in enumerate(layout.checks) if 4 in c.support and c.kind == "Z"]
        assert len(violated) == 2
        got = syndrome(layout, frame)
        assert np.array_equal(got, expected)
        assert sorted(np.flatnonzero(got)) == violated

    @pytest.mark.parametrize("d", [3, 5])
    def test_matches_naive_oracle_on_random_frames(self, d):
        layout = build_layout(d)
        gen = np.random.default_rng(100 + d)
        for _ in range(50):
            frame = random_frame(gen, d * d)
            assert np.array_equal(syndrome(layout, frame), naive_syndrome(layout, frame))

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_linearity(self, d):
        layout = build_layout(d)
        gen = np.random.default_rng(200 + d)
        for _ in range(200):
            f1, f2 = random_frame(gen, d * d), random_frame(gen, d * d)
            assert np.array_equal(syndrome(layout, f1 * f2),
                                  syndrome(layout, f1) ^ syndrome(layout, f2))

    def test_batch_agrees_with_single(self):
        layout = build_layout(5)
        gen = np.random.default_rng(11)
        frames = [random_frame(gen, 25) for _ in range(40)]
        batch = syndrome_batch(layout,
                               np.stack([f.x for f in frames]),
                               np.stack([f.z for f in frames]))
        for i, frame in enumerate(frames):
            assert np.array_equal(batch[i], syndrome(layout, frame))

    def test_fig3_degenerate_pair_at_d5(self):
        """A single interior X shares its syndrome with a longer X chain.

        The shortest equivalent chain has weight 3 (the two frames must
        differ by a weight-4 plaquette): stabilizer-group elements of X type
        have even weight, so no weight-2 chain can match a single X at d=5.
        """
        layout = build_layout(5)
        interior = next(q for q in range(25)
                        if sum(q in c.support for c in layout.checks) == 4)
        single = PauliFrame.single(25, interior, Pauli.X)
        target = syndrome(layout, single).tobytes()
        for a, b in itertools.combinations(range(25), 2):
            chain = PauliFrame.single(25, a, Pauli.X) * PauliFrame.single(25, b, Pauli.X)
            assert syndrome(layout, chain).tobytes() != target
        matches = []
        for a, b, c in itertools.combinations(range(25), 3):
            chain = (PauliFrame.single(25, a, Pauli.X) * PauliFrame.single(25, b, Pauli.X)
                     * PauliFrame.single(25, c, Pauli.X))
            if syndrome(layout, chain).tobytes() == target:
                matches.append((a, b, c))
        assert matches, "degeneracy requires an equivalent weight-3 chain"

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            syndrome(build_layout(3), PauliFrame.identity(25))


class TestLogicalClass:
    def test_identity_is_class_i(self):
        layout = build_layout(3)
        assert logical_class(layout, PauliFrame.identity(9)) == Pauli.I

    @pytest.mark.parametrize("d", [3, 5])
    def test_logical_representatives(self, d):
        layout = build_layout(d)
        for cls in (Pauli.X, Pauli.Z, Pauli.Y):
            frame = logical_representative(layout, cls)
            assert not syndrome(layout, frame).any()
            assert logical_class(layout, frame) == cls

    @pytest.mark.parametrize("d", [3, 5])
    def test_stabilizers_act_trivially(self, d):
        layout = build_layout(d)
        for check in layout.checks:
            frame = layout.stabilizer_frame(check)
            assert not syndrome(layout, frame).any()
            assert logical_class(layout, frame) == Pauli.I

    def test_constant_on_stabilizer_cosets(self):
        layout = build_layout(3)
        frame = logical_representative(layout, Pauli.X)
        for check in layout.checks:
            shifted = frame * layout.stabilizer_frame(check)
            assert logical_class(layout, shifted) == Pauli.X

    def test_nonzero_syndrome_rejected(self):
        layout = build_layout(3)
        with pytest.raises(NonzeroSyndromeError):
            logical_class(layout, PauliFrame.single(9, 4, Pauli.X))


class TestDegeneracyWitnesses:
    def test_exhaustive_weight_two_search_finds_both_kinds(self):
        """Exhaustive search over weight <= 2 frames at d=3 must exhibit both
        harmless degeneracy (product in the stabilizer group) and harmful
        degeneracy (product a logical operator)."""
        layout = build_layout(3)
        frames = [PauliFrame.identity(9)]
        for q, op in itertools.product(range(9), (Pauli.X, Pauli.Z, Pauli.Y)):
            frames.append(PauliFrame.single(9, q, op))
        for (qa, qb) in itertools.combinations(range(9), 2):
            for opa, opb in itertools.product((Pauli.X, Pauli.Z, Pauli.Y), repeat=2):
                frames.append(PauliFrame.single(9, qa, opa) * PauliFrame.single(9, qb, opb))
        by_syndrome = {}
        for frame in frames:
            by_syndrome.setdefault(syndrome(layout, frame).tobytes(), []).append(frame)
        harmless = harmful = False
        for group in by_syndrome.values():
            for f1, f2 in itertools.combinations(group, 2):
                cls = logical_class(layout, f1 * f2)
                if cls == Pauli.I:
                    harmless = True
                else:
                    harmful = True
        assert harmless and harmful

    def test_paper_example_qubit4_vs_qubits_1_7(self):
        # X on the center qubit is syndrome-equivalent to X on the middle
        # column's endpoints; together they span the lattice: a logical X
        layout = build_layout(3)
        f1 = PauliFrame.single(9, 4, Pauli.X)
        f2 = PauliFrame.single(9, 1, Pauli.X) * PauliFrame.single(9, 7, Pauli.X)
        assert np.array_equal(syndrome(layout, f1), syndrome(layout, f2))
        assert logical_class(layout, f1 * f2) == Pauli.X


class TestGridEmbedding:
    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_zero_syndrome_gives_zero_grid(self, d):
        layout = build_layout(d)
        grid = embed_syndrome_grid(layout, np.zeros(layout.n_checks, dtype=np.uint8))
        assert grid.shape == (d + 1, d + 1)
        assert not grid.any()

    def test_single_violation_lands_on_its_cell(self):
        layout = build_layout(3)
        for i, check in enumerate(layout.checks):
            bits = np.zeros(8, dtype=np.uint8)
            bits[i] = 1
            grid = embed_syndrome_grid(layout, bits)
            assert grid.sum() == 1
            assert grid[check.grid_pos] == 1

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_round_trip_on_random_syndromes(self, d):
        layout = build_layout(d)
        gen = np.random.default_rng(300 + d)
        for _ in range(100):
            bits = gen.integers(0, 2, layout.n_checks).astype(np.uint8)
            grid = embed_syndrome_grid(layout, bits)
            assert np.array_equal(extract_syndrome_bits(layout, grid), bits)
            for cell in layout.dummy_cells:
                assert grid[cell] == 0

    def test_size_mismatch(self):
        layout = build_layout(3)
        with pytest.raises(ValueError):
            embed_syndrome_grid(layout, np.zeros(24, dtype=np.uint8))
        with pytest.raises(ValueError):
            extract_syndrome_bits(layout, np.zeros((6, 6), dtype=np.uint8))
