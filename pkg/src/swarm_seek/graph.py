"""Undirected robot network: incidence, Laplacian and spectral diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# Edge set used for the consensus experiments (10 robots, 11 links).
REFERENCE_EDGES = (
    (0, 3), (0, 9), (3, 6), (0, 8), (8, 5), (6, 7),
    (1, 4), (4, 2), (8, 1), (9, 2), (5, 9),
)

CONNECTIVITY_TOL = 1e-9


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    lambda2: float

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with a fixed edge orientation.

    ``edges`` holds ``(tail, head)`` pairs; the tail gets ``+1`` in the
    incidence matrix. Orientation is irrelevant for the Laplacian.
    """

    node_count: int
    edges: tuple = field(default=())

    def __post_init__(self):
        n = int(self.node_count)
        if n < 1:
            raise GraphError(f"node_count must be positive, got {self.node_count}")
        edges = tuple((int(t), int(h)) for t, h in self.edges)
        seen = set()
        for t, h in edges:
            if not (0 <= t < n and 0 <= h < n):
                raise GraphError(f"edge ({t}, {h}) out of range for N={n}")
            if t == h:
                raise GraphError(f"self-loop at node {t}")
            key = (min(t, h), max(t, h))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "node_count", n)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def reference(cls) -> "Graph":
        return cls(10, REFERENCE_EDGES)

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        adj = np.asarray(adj)
        n = adj.shape[0]
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if adj[i, j]]
        return cls(n, edges)

    @classmethod
    def proximity(cls, positions, radius: float) -> "Graph":
        """Connect every pair of robots closer than ``radius``."""
        p = np.asarray(positions, dtype=float)
        d = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)
        return cls.from_adjacency(d < radius)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def incidence(self) -> np.ndarray:
        B = np.zeros((self.node_count, self.edge_count))
        for k, (t, h) in enumerate(self.edges):
            B[t, k] = 1.0
            B[h, k] = -1.0
        B.setflags(write=False)
        return B

    @cached_property
    def laplacian(self) -> np.ndarray:
        B = self.incidence
        L = B @ B.T
        L.setflags(write=False)
        return L

    @cached_property
    def spectrum(self) -> Spectrum:
        return spectrum(self.laplacian)

    @cached_property
    def neighbors(self) -> tuple:
        nbrs = [[] for _ in range(self.node_count)]
        for t, h in self.edges:
            nbrs[t].append(h)
            nbrs[h].append(t)
        return tuple(tuple(sorted(n)) for n in nbrs)

    def degree(self) -> np.ndarray:
        return np.array([len(n) for n in self.neighbors])

    def components(self) -> list[list[int]]:
        """Connected components via union-find, each sorted, ordered by smallest node."""
        parent = list(range(self.node_count))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for t, h in self.edges:
            rt, rh = find(t), find(h)
            if rt != rh:
                parent[max(rt, rh)] = min(rt, rh)
        groups: dict[int, list[int]] = {}
        for i in range(self.node_count):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values(), key=lambda c: c[0])

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def remove_node(self, i: int) -> tuple["Graph", dict[int, int]]:
        """Drop node ``i`` and its edges.

        Returns the new graph and the old-to-new index map. Survivors keep
        their relative order.
        """
        if not 0 <= i < self.node_count:
            raise GraphError(f"node {i} out of range for N={self.node_count}")
        if self.node_count == 1:
            raise GraphError("cannot remove the last node")
        remap = {}
        for old in range(self.node_count):
            if old != i:
                remap[old] = len(remap)
        edges = [(remap[t], remap[h]) for t, h in self.edges if i not in (t, h)]
        return Graph(self.node_count - 1, edges), remap

    def induced(self, nodes) -> tuple["Graph", dict[int, int]]:
        nodes = sorted(int(n) for n in nodes)
        remap = {old: new for new, old in enumerate(nodes)}
        edges = [(remap[t], remap[h]) for t, h in self.edges if t in remap and h in remap]
        return Graph(len(nodes), edges), remap

    def relabel(self, perm) -> "Graph":
        """Graph with node ``i`` renamed to ``perm[i]``."""
        perm = list(perm)
        return Graph(self.node_count, [(perm[t], perm[h]) for t, h in self.edges])

    def to_list(self) -> list[list[int]]:
        return [[t, h] for t, h in self.edges]


def incidence(g: Graph) -> np.ndarray:
    return g.incidence


def laplacian(g: Graph) -> np.ndarray:
    return g.laplacian


def spectrum(L) -> Spectrum:
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise GraphError(f"Laplacian must be square, got shape {L.shape}")
    if not np.allclose(L, L.T, atol=1e-12):
        raise GraphError("Laplacian must be symmetric")
    try:
        w = np.linalg.eigvalsh(L)
    except np.linalg.LinAlgError as exc:
        raise GraphError(f"eigen-solver failed: {exc}") from exc
    w.setflags(write=False)
    lam2 = float(w[1]) if w.size > 1 else 0.0
    return Spectrum(eigenvalues=w, lambda2=lam2)


def is_connected(g: Graph) -> bool:
    return g.is_connected()


def remove_node(g: Graph, i: int) -> tuple[Graph, dict[int, int]]:
    return g.remove_node(i)
