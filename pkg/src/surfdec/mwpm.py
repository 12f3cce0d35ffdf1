"""Minimum-weight perfect matching baseline decoder.

Violated checks of one kind ("defects") are matched pairwise or to the code
boundary so that the total chain length is minimal; the chains realizing the
matching become the correction.  X-type errors are decoded on the Z-check
graph and vice versa, independently (the standard construction; it ignores
the X/Z correlation that Y errors introduce).

Matching is exact: a subset-DP optimum for up to ``DP_DEFECT_LIMIT`` defects,
and blossom-based general weighted matching (networkx) above that.  Chain
reconstruction follows BFS shortest paths with lowest-index-first tie
breaking, so decoding is fully deterministic.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .code import CodeLayout, PauliFrame, StabilizerCheck

#: Largest defect count handled by the exhaustive subset-DP matcher.
DP_DEFECT_LIMIT = 10

_UNREACHED = 1 << 30


@dataclass(frozen=True)
class Matching:
    """A perfect matching over defects and their virtual boundary nodes.

    ``pairs`` holds (i, j) positions into the defect list, ``to_boundary``
    the defect positions matched to their own boundary node.  Unused
    boundary nodes pair among themselves at zero cost and are not listed.
    """

    pairs: tuple[tuple[int, int], ...]
    to_boundary: tuple[int, ...]
    total_weight: int


@dataclass(frozen=True)
class DefectGraph:
    """Defects of one kind plus pairwise and boundary path-length weights."""

    kind: str
    defects: tuple[int, ...]          # global check indices, ascending
    weights: np.ndarray               # (n, n) int64, graph shortest-path lengths
    boundary_weights: np.ndarray      # (n,) int64, shortest chain to the boundary

    @property
    def n_defects(self) -> int:
        return len(self.defects)


class _KindTables:
    """Per-layout, per-kind precomputed matching structures."""

    def __init__(self, layout: CodeLayout, kind: str):
        self.kind = kind
        check_ids = [i for i, c in enumerate(layout.checks) if c.kind == kind]
        self.check_ids = np.array(check_ids, dtype=np.intp)
        m = len(check_ids)
        local = {g: l for l, g in enumerate(check_ids)}

        # edges between same-kind checks sharing a qubit; lone memberships
        # are boundary terminals for the error chains this kind detects
        adj: list[list[tuple[int, int]]] = [[] for _ in range(m)]
        boundary_qubits: list[list[int]] = [[] for _ in range(m)]
        for q in range(layout.n_data):
            members = [local[g] for g in check_ids if q in layout.checks[g].support]
            if len(members) == 2:
                a, b = members
                adj[a].append((b, q))
                adj[b].append((a, q))
            elif len(members) == 1:
                boundary_qubits[members[0]].append(q)
        self.adj = [sorted(edges) for edges in adj]
        self.boundary_qubits = [sorted(qs) for qs in boundary_qubits]

        self.dist = np.full((m, m), _UNREACHED, dtype=np.int64)
        self.pair_chain: list[list[np.ndarray | None]] = [[None] * m for _ in range(m)]
        for src in range(m):
            self._bfs_from(src, layout.n_data)

        self.boundary_dist = np.full(m, _UNREACHED, dtype=np.int64)
        self.boundary_chain: list[np.ndarray | None] = [None] * m
        self._bfs_boundary(layout.n_data)

    def _bfs_from(self, src: int, n_data: int) -> None:
        m = len(self.adj)
        dist = [_UNREACHED] * m
        via: list[tuple[int, int] | None] = [None] * m  # (parent, qubit)
        dist[src] = 0
        queue = deque([src])
        while queue:
            node = queue.popleft()
            for nbr, q in self.adj[node]:
                if dist[nbr] == _UNREACHED:
                    dist[nbr] = dist[node] + 1
                    via[nbr] = (node, q)
                    queue.append(nbr)
        for dst in range(m):
            if dist[dst] == _UNREACHED:
                continue
            self.dist[src, dst] = dist[dst]
            mask = np.zeros(n_data, dtype=np.uint8)
            node = dst
            while node != src:
                parent, q = via[node]  # type: ignore[misc]
                mask[q] ^= 1
                node = parent
            self.pair_chain[src][dst] = mask

    def _bfs_boundary(self, n_data: int) -> None:
        m = len(self.adj)
        chains: list[np.ndarray | None] = [None] * m
        dist = [_UNREACHED] * m
        queue = deque()
        for node in range(m):
            if self.boundary_qubits[node]:
                dist[node] = 1
                mask = np.zeros(n_data, dtype=np.uint8)
                mask[self.boundary_qubits[node][0]] = 1
                chains[node] = mask
                queue.append(node)
        while queue:
            node = queue.popleft()
            for nbr, q in self.adj[node]:
                if dist[nbr] == _UNREACHED:
                    dist[nbr] = dist[node] + 1
                    mask = chains[node].copy()  # type: ignore[union-attr]
                    mask[q] ^= 1
                    chains[nbr] = mask
                    queue.append(nbr)
        self.boundary_dist = np.array(dist, dtype=np.int64)
        self.boundary_chain = chains


class _DecoderTables:
    def __init__(self, layout: CodeLayout):
        self.z = _KindTables(layout, "Z")
        self.x = _KindTables(layout, "X")

    def for_kind(self, kind: str) -> _KindTables:
        if kind == "Z":
            return self.z
        if kind == "X":
            return self.x
        raise ValueError(f"check kind must be 'X' or 'Z', got {kind!r}")


@functools.lru_cache(maxsize=16)
def _tables(layout: CodeLayout) -> _DecoderTables:
    return _DecoderTables(layout)


def extract_defects(layout: CodeLayout, syndrome_bits: np.ndarray, kind: str) -> list[StabilizerCheck]:
    """Violated checks of one kind, in layout order."""
    kt = _tables(layout).for_kind(kind)
    bits = np.asarray(syndrome_bits)
    local = np.flatnonzero(bits[kt.check_ids])
    return [layout.checks[kt.check_ids[l]] for l in local]


def build_defect_graph(layout: CodeLayout, syndrome_bits: np.ndarray, kind: str) -> DefectGraph:
    """Defect graph for the violated checks of ``kind``: pairwise weights are
    shortest-path lengths in that kind's check-adjacency graph, boundary
    weights the shortest chain to the matching code boundary."""
    kt = _tables(layout).for_kind(kind)
    bits = np.asarray(syndrome_bits)
    local = np.flatnonzero(bits[kt.check_ids])
    weights = kt.dist[np.ix_(local, local)]
    return DefectGraph(
        kind=kind,
        defects=tuple(int(kt.check_ids[l]) for l in local),
        weights=weights,
        boundary_weights=kt.boundary_dist[local],
    )


def _dp_matching(weights: np.ndarray, boundary: np.ndarray) -> Matching:
    """Exact minimum-weight matching by DP over defect subsets."""
    n = len(boundary)
    if n == 0:
        return Matching((), (), 0)
    w = weights.tolist()
    b = boundary.tolist()
    size = 1 << n
    best = [0] * size
    choice: list[tuple[int, int] | None] = [None] * size
    for mask in range(1, size):
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        best_cost = best[rest] + b[i]
        best_choice = (i, -1)
        sub = rest
        while sub:
            j = (sub & -sub).bit_length() - 1
            sub ^= 1 << j
            cost = best[rest ^ (1 << j)] + w[i][j]
            if cost < best_cost:
                best_cost = cost
                best_choice = (i, j)
        best[mask] = best_cost
        choice[mask] = best_choice
    pairs = []
    to_boundary = []
    mask = size - 1
    while mask:
        i, j = choice[mask]  # type: ignore[misc]
        if j < 0:
            to_boundary.append(i)
            mask ^= 1 << i
        else:
            pairs.append((i, j))
            mask ^= (1 << i) | (1 << j)
    return Matching(tuple(pairs), tuple(to_boundary), int(best[size - 1]))


def _blossom_matching(weights: np.ndarray, boundary: np.ndarray) -> Matching:
    """Exact minimum-weight matching via general max-weight matching on the
    defect + per-defect-boundary graph (weights negated)."""
    n = len(boundary)
    graph = nx.Graph()
    for i in range(n):
        graph.add_edge(i, n + i, weight=-int(boundary[i]))
        for j in range(i + 1, n):
            graph.add_edge(i, j, weight=-int(weights[i, j]))
            graph.add_edge(n + i, n + j, weight=0)
    mate = nx.max_weight_matching(graph, maxcardinality=True)
    pairs = []
    to_boundary = []
    total = 0
    for a, b in mate:
        a, b = min(a, b), max(a, b)
        if a < n and b < n:
            pairs.append((a, b))
            total += int(weights[a, b])
        elif a < n and b == n + a:
            to_boundary.append(a)
            total += int(boundary[a])
        elif a < n:
            raise AssertionError("defect matched to a foreign boundary node")
    return Matching(tuple(sorted(pairs)), tuple(sorted(to_boundary)), total)


def min_weight_matching(graph: DefectGraph) -> Matching:
    """Minimum-weight perfect matching of the defect graph (exact)."""
    if graph.n_defects <= DP_DEFECT_LIMIT:
        return _dp_matching(graph.weights, graph.boundary_weights)
    return _blossom_matching(graph.weights, graph.boundary_weights)


def _correct_kind(kt: _KindTables, bits: np.ndarray, out: np.ndarray) -> None:
    local = np.flatnonzero(bits[kt.check_ids])
    n = len(local)
    if n == 0:
        return
    if n == 1:
        out ^= kt.boundary_chain[local[0]]
        return
    if n == 2:
        i, j = local
        if kt.dist[i, j] <= kt.boundary_dist[i] + kt.boundary_dist[j]:
            out ^= kt.pair_chain[i][j]
        else:
            out ^= kt.boundary_chain[i]
            out ^= kt.boundary_chain[j]
        return
    weights = kt.dist[np.ix_(local, local)]
    boundary = kt.boundary_dist[local]
    if n <= DP_DEFECT_LIMIT:
        matching = _dp_matching(weights, boundary)
    else:
        matching = _blossom_matching(weights, boundary)
    for a, b in matching.pairs:
        out ^= kt.pair_chain[local[a]][local[b]]
    for a in matching.to_boundary:
        out ^= kt.boundary_chain[local[a]]


def decode_mwpm_bits(layout: CodeLayout, syndrome_bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Correction bit vectors (x, z) clearing the given syndrome exactly."""
    tables = _tables(layout)
    corr_x = np.zeros(layout.n_data, dtype=np.uint8)
    corr_z = np.zeros(layout.n_data, dtype=np.uint8)
    bits = np.asarray(syndrome_bits)
    _correct_kind(tables.z, bits, corr_x)  # Z-defects are cleared by X chains
    _correct_kind(tables.x, bits, corr_z)
    return corr_x, corr_z


def decode_mwpm(layout: CodeLayout, syndrome_bits: np.ndarray) -> PauliFrame:
    """MWPM correction frame whose syndrome equals ``syndrome_bits``."""
    corr_x, corr_z = decode_mwpm_bits(layout, syndrome_bits)
    return PauliFrame(corr_x, corr_z)


@functools.lru_cache(maxsize=16)
def pure_error_matrices(layout: CodeLayout) -> tuple[np.ndarray, np.ndarray]:
    """Linear pure-error map as matrices (n_checks, n_data).

    Row i is the straight-to-boundary chain of check i, so
    ``x = (syndrome @ mx) % 2`` and ``z = (syndrome @ mz) % 2`` give a fixed
    canonical frame whose syndrome is exactly the input syndrome.
    """
    tables = _tables(layout)
    mx = np.zeros((layout.n_checks, layout.n_data), dtype=np.uint8)
    mz = np.zeros_like(mx)
    for kt, target in ((tables.z, mx), (tables.x, mz)):
        for local, global_id in enumerate(kt.check_ids):
            target[global_id] = kt.boundary_chain[local]
    return mx, mz


def pure_error(layout: CodeLayout, syndrome_bits: np.ndarray) -> PauliFrame:
    """Canonical syndrome-clearing frame: every defect matched straight to
    its boundary.  Linear in the syndrome and independent of any decoder."""
    mx, mz = pure_error_matrices(layout)
    bits = np.asarray(syndrome_bits, dtype=np.uint8)
    return PauliFrame((bits @ mx) % 2, (bits @ mz) % 2)
