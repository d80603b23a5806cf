"""Organization network: undirected simple graphs with degree-derived security levels.

Node ids are 0-based throughout the Python API. The edge-list file format is
1-based (see :func:`read_edge_list`); translation happens at the I/O boundary.
Every node must have degree >= 1 because the compromise dynamics divide by the
per-node security level w_i = d_i.
"""

from __future__ import annotations

import hashlib
import io
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "Graph",
    "SecurityLevels",
    "degree_weights",
    "generate_small_world",
    "generate_scale_free",
    "read_edge_list",
    "write_edge_list",
    "load_edge_list",
    "save_edge_list",
]

# Per-node security weights; entry i equals the degree of node i.
SecurityLevels = np.ndarray


class GraphError(ValueError):
    """Invalid graph structure or malformed edge-list input."""


class Graph:
    """Immutable undirected simple graph.

    Parameters
    ----------
    node_count : int
        Number of nodes, labelled 0 .. node_count-1.
    edges : iterable of (int, int)
        Unordered node pairs. Duplicates and swapped orientations collapse
        to a single edge; self-loops are rejected.
    """

    __slots__ = ("node_count", "edges", "degrees", "_indptr", "_indices", "_dense")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]]):
        if node_count < 1:
            raise GraphError(f"node_count must be positive, got {node_count}")
        canon = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise GraphError(f"self-loop at node {a}")
            if not (0 <= a < node_count and 0 <= b < node_count):
                raise GraphError(f"edge ({a}, {b}) out of range for {node_count} nodes")
            canon.add((a, b) if a < b else (b, a))
        if not canon:
            raise GraphError("graph has no edges")
        edge_arr = np.array(sorted(canon), dtype=np.int32)
        degrees = np.zeros(node_count, dtype=np.int64)
        np.add.at(degrees, edge_arr[:, 0], 1)
        np.add.at(degrees, edge_arr[:, 1], 1)
        if degrees.min() < 1:
            isolated = int(np.argmin(degrees))
            raise GraphError(f"node {isolated} has degree 0")
        edge_arr.setflags(write=False)
        degrees.setflags(write=False)
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", edge_arr)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "_indptr", None)
        object.__setattr__(self, "_indices", None)
        object.__setattr__(self, "_dense", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in CSR form: (indptr, indices), both int32, neighbors sorted."""
        if self._indptr is None:
            n = self.node_count
            indptr = np.zeros(n + 1, dtype=np.int32)
            indptr[1:] = np.cumsum(self.degrees).astype(np.int32)
            indices = np.empty(2 * self.edge_count, dtype=np.int32)
            fill = indptr[:-1].copy()
            for a, b in self.edges:
                indices[fill[a]] = b
                fill[a] += 1
                indices[fill[b]] = a
                fill[b] += 1
            for i in range(n):
                indices[indptr[i]:indptr[i + 1]].sort()
            indptr.setflags(write=False)
            indices.setflags(write=False)
            object.__setattr__(self, "_indptr", indptr)
            object.__setattr__(self, "_indices", indices)
        return self._indptr, self._indices

    def dense_adjacency(self) -> np.ndarray:
        """Symmetric 0/1 adjacency matrix as float64 (used by the numpy backend)."""
        if self._dense is None:
            a = np.zeros((self.node_count, self.node_count))
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
            a.setflags(write=False)
            object.__setattr__(self, "_dense", a)
        return self._dense

    def neighbor_sums(self, values: np.ndarray) -> np.ndarray:
        """For each node i, the sum of ``values`` over the neighbors of i."""
        indptr, indices = self.csr()
        # reduceat is safe: min degree >= 1 means no empty CSR rows
        return np.add.reduceat(np.asarray(values, dtype=float)[indices], indptr[:-1])

    def has_edge(self, a: int, b: int) -> bool:
        indptr, indices = self.csr()
        return b in indices[indptr[a]:indptr[a + 1]]

    def with_edge(self, a: int, b: int) -> "Graph":
        """New graph with edge (a, b) added (a no-op copy if already present)."""
        extra = [(a, b)]
        return Graph(self.node_count, [tuple(e) for e in self.edges] + extra)

    def fingerprint(self) -> str:
        """Stable content hash of the node count and canonical edge list."""
        h = hashlib.sha1()
        h.update(f"n={self.node_count};".encode())
        h.update(self.edges.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.node_count == other.node_count
            and self.edges.shape == other.edges.shape
            and bool(np.all(self.edges == other.edges))
        )

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(node_count={self.node_count}, edge_count={self.edge_count})"


def degree_weights(g: Graph) -> SecurityLevels:
    """Security level of each node: w_i = d_i (its degree). Always >= 1."""
    return g.degrees.astype(np.float64)


def generate_small_world(n: int, k: int, rewire_prob: float, seed: int) -> Graph:
    """Ring lattice on ``n`` nodes (``k`` neighbors each) with random rewiring.

    Each clockwise lattice edge is rewired with probability ``rewire_prob`` to a
    uniformly random endpoint; draws that would create a self-loop or duplicate
    edge are retried. Edge count is preserved (n*k/2). Deterministic for a
    fixed seed.
    """
    if k % 2 != 0 or k < 2:
        raise GraphError(f"k must be even and >= 2, got {k}")
    if n <= k:
        raise GraphError(f"need n > k, got n={n}, k={k}")
    if not 0.0 <= rewire_prob <= 1.0:
        raise GraphError(f"rewire_prob must be in [0, 1], got {rewire_prob}")
    attempt_seed = seed
    while True:
        rng = np.random.default_rng(attempt_seed)
        edges = set()
        for i in range(n):
            for j in range(1, k // 2 + 1):
                a, b = i, (i + j) % n
                edges.add((min(a, b), max(a, b)))
        for i in range(n):
            for j in range(1, k // 2 + 1):
                a, b = i, (i + j) % n
                key = (min(a, b), max(a, b))
                if key not in edges:
                    continue  # already rewired away by an earlier draw
                if rng.random() >= rewire_prob:
                    continue
                for _ in range(4 * n):
                    t = int(rng.integers(0, n))
                    cand = (min(i, t), max(i, t))
                    if t != i and cand not in edges:
                        edges.discard(key)
                        edges.add(cand)
                        break
                # if no valid target was found the original edge is kept
        degrees = np.zeros(n, dtype=int)
        for a, b in edges:
            degrees[a] += 1
            degrees[b] += 1
        if degrees.min() >= 1:
            return Graph(n, edges)
        attempt_seed += 1  # reject graphs with isolated nodes, regenerate


def generate_scale_free(n: int, m: int, seed: int) -> Graph:
    """Preferential-attachment graph: m-clique seed, each new node adds m edges.

    New nodes attach to m distinct existing nodes with probability proportional
    to current degree, so high-degree hubs emerge. Deterministic for a fixed
    seed; every node ends with degree >= 1.
    """
    if m < 1:
        raise GraphError(f"m must be >= 1, got {m}")
    if n <= m:
        raise GraphError(f"need n > m, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    edges = []
    # endpoint multiset: each node appears once per incident edge
    stubs: list[int] = []
    for a in range(m):
        for b in range(a + 1, m):
            edges.append((a, b))
            stubs.append(a)
            stubs.append(b)
    for new in range(m, n):
        targets: set[int] = set()
        while len(targets) < m:
            if stubs:
                targets.add(stubs[int(rng.integers(0, len(stubs)))])
            else:
                targets.add(int(rng.integers(0, new)))  # m=1 start: degrees all zero
        for t in sorted(targets):
            edges.append((t, new))
            stubs.append(t)
            stubs.append(new)
    return Graph(n, edges)


def read_edge_list(source: str | TextIO) -> Graph:
    """Parse the 1-based edge-list text format.

    One edge per line: two whitespace-separated positive integer node ids.
    Lines starting with '#' are comments; blank lines are ignored. Node count
    is the maximum id seen, unless a ``# nodes=N`` header overrides it.
    Duplicate lines and both orientations of an edge collapse to one edge.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    node_count = 0
    declared = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("nodes="):
                try:
                    declared = int(body[len("nodes="):])
                except ValueError:
                    raise GraphError(f"line {lineno}: bad node-count header {line!r}")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer node id in {line!r}")
        if a < 1 or b < 1:
            raise GraphError(f"line {lineno}: node ids are 1-based, got {line!r}")
        if a == b:
            raise GraphError(f"line {lineno}: self-loop at node {a}")
        pairs.append((a - 1, b - 1))
        node_count = max(node_count, a, b)
    if declared is not None:
        if declared < node_count:
            raise GraphError(f"header nodes={declared} is below max node id {node_count}")
        node_count = declared
    if not pairs:
        raise GraphError("edge list contains no edges")
    return Graph(node_count, pairs)  # degree-0 check happens in the constructor


def write_edge_list(g: Graph) -> str:
    """Render a graph in the 1-based edge-list format (round-trips exactly)."""
    buf = io.StringIO()
    buf.write(f"# nodes={g.node_count}\n")
    for a, b in g.edges:
        buf.write(f"{a + 1} {b + 1}\n")
    return buf.getvalue()


def load_edge_list(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return read_edge_list(fh)


def save_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_edge_list(g))
