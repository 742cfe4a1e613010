"""Edge-list ingestion and unweighted shortest-path distances."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from importlib import resources
from typing import List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp


class GraphError(ValueError):
    pass


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected two node labels, got {line.strip()!r}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph over string labels.

    ``adjacency[i]`` is the sorted tuple of neighbour indices of node ``i``.
    """

    labels: Tuple[str, ...]
    adjacency: Tuple[Tuple[int, ...], ...]
    dropped_duplicates: int = 0
    dropped_self_loops: int = 0

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    def to_sparse(self) -> sp.csr_matrix:
        n = self.n
        rows = np.repeat(np.arange(n), [len(a) for a in self.adjacency])
        cols = np.fromiter((j for a in self.adjacency for j in a), dtype=np.int64, count=rows.size)
        return sp.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))

    @classmethod
    def from_edges(cls, labels: Sequence[str], edges) -> "Graph":
        nbrs = [set() for _ in labels]
        for i, j in edges:
            if i != j:
                nbrs[i].add(j)
                nbrs[j].add(i)
        return cls(tuple(labels), tuple(tuple(sorted(s)) for s in nbrs))


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8")), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # assume a binary stream
    return io.TextIOWrapper(source, encoding="utf-8"), False


def load_edge_list(source) -> Graph:
    """Parse a whitespace-separated edge list.

    ``source`` may be a path, raw bytes, or a text/binary stream.  Lines
    starting with ``#`` and blank lines are skipped; columns beyond the second
    (e.g. weights) are ignored.  Node labels are ordered by first appearance.
    Duplicate edges (in either orientation) and self-loops are dropped and
    counted on the returned graph.
    """
    fh, close = _open_text(source)
    index = {}
    labels: List[str] = []
    nbrs: List[set] = []
    duplicates = self_loops = 0
    try:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if len(tokens) < 2:
                raise EdgeListParseError(lineno, line)
            ids = []
            for tok in tokens[:2]:
                if tok not in index:
                    index[tok] = len(labels)
                    labels.append(tok)
                    nbrs.append(set())
                ids.append(index[tok])
            i, j = ids
            if i == j:
                self_loops += 1
            elif j in nbrs[i]:
                duplicates += 1
            else:
                nbrs[i].add(j)
                nbrs[j].add(i)
    finally:
        if close:
            fh.close()
    return Graph(tuple(labels), tuple(tuple(sorted(s)) for s in nbrs), duplicates, self_loops)


def karate_path():
    """Path of the bundled Zachary karate-club edge list."""
    return resources.files("hydra_embed").joinpath("data", "karate.edgelist")


def load_karate() -> Graph:
    with resources.as_file(karate_path()) as path:
        return load_edge_list(path)


def connected_components(G: Graph) -> List[List[int]]:
    """Components as sorted index lists, ordered by their smallest index."""
    seen = np.zeros(G.n, dtype=bool)
    comps = []
    for start in range(G.n):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in G.adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def induced_subgraph(G: Graph, nodes: Sequence[int]) -> Graph:
    nodes = sorted(nodes)
    remap = {v: k for k, v in enumerate(nodes)}
    adjacency = tuple(tuple(remap[w] for w in G.adjacency[v] if w in remap) for v in nodes)
    return Graph(tuple(G.labels[v] for v in nodes), adjacency)


def largest_connected_component(G: Graph) -> Graph:
    """Induced subgraph on the largest component (ties: smallest minimum index)."""
    if G.n == 0:
        raise GraphError("empty graph")
    comps = connected_components(G)
    # components arrive ordered by smallest index, so max() keeps the first of equal size
    best = max(comps, key=len)
    if len(best) == G.n:
        return G
    return induced_subgraph(G, best)


def shortest_path_matrix(G: Graph, block_size: int = 256) -> np.ndarray:
    """All-pairs hop distances by breadth-first search from every node.

    Sources are processed in blocks; each BFS level expands the frontier of
    every source in the block with one sparse product.

    Raises
    ------
    GraphError
        If ``G`` is not connected.
    """
    n = G.n
    if n == 0:
        raise GraphError("empty graph")
    n_comp = len(connected_components(G))
    if n_comp > 1:
        raise GraphError(
            f"graph has {n_comp} connected components; extract the largest component first"
        )
    A = G.to_sparse().astype(np.float32)
    D = np.zeros((n, n), dtype=float)
    for lo in range(0, n, block_size):
        src = np.arange(lo, min(lo + block_size, n))
        visited = np.zeros((src.size, n), dtype=bool)
        visited[np.arange(src.size), src] = True
        frontier = visited.astype(np.float32)
        level = 0
        while True:
            level += 1
            reached = np.asarray((A @ frontier.T).T) > 0  # (A symmetric)
            new = reached & ~visited
            if not new.any():
                break
            rows, cols = np.nonzero(new)
            D[src[rows], cols] = level
            visited |= new
            frontier = new.astype(np.float32)
    return D
