"""Directed-graph presentations of finite Markov shifts.

A :class:`DirectedGraph` is the vertex/edge data of a topological Markov
shift: the points of the shift are the bi-infinite vertex paths. The helpers
here compute reachability, transitivity, the period, the cyclic (spectral)
decomposition of a transitive graph, power graphs presenting ``sigma**p`` on
one cyclic class, higher-block recodings and strongly connected components.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

Vertex = Hashable


class GraphError(ValueError):
    """Invalid graph input, or an operation's precondition on the graph fails."""


class DirectedGraph:
    """Finite directed graph in which every vertex has in- and out-edges.

    Vertices without an incoming or an outgoing edge are pruned repeatedly on
    construction (they carry no bi-infinite path); the pruned vertices are
    kept in :attr:`removed`. An empty result is rejected.

    Parameters
    ----------
    vertices : iterable of hashable
        Vertex identifiers. They must be unique and mutually comparable;
        they are stored sorted, which fixes the "identifier order" used for
        every deterministic tie-break in the package.
    edges : iterable of pairs
        Ordered pairs ``(u, v)`` of vertices.
    """

    __slots__ = ("vertices", "edges", "removed", "_index", "_succ", "_pred")

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[tuple[Vertex, Vertex]]):
        verts = list(vertices)
        if len(set(verts)) != len(verts):
            raise GraphError("vertex identifiers must be unique")
        vset = set(verts)
        eset = set()
        for e in edges:
            u, v = e
            if u not in vset or v not in vset:
                raise GraphError(f"edge {e!r} uses an unknown vertex")
            eset.add((u, v))

        removed = []
        while True:
            has_out = {u for u, _ in eset}
            has_in = {v for _, v in eset}
            dead = {v for v in vset if v not in has_out or v not in has_in}
            if not dead:
                break
            removed.extend(sorted(dead))
            vset -= dead
            eset = {(u, v) for u, v in eset if u in vset and v in vset}
        if not vset:
            raise GraphError("graph is empty after pruning vertices without in/out edges")

        self.vertices: tuple = tuple(sorted(vset))
        self.edges: frozenset = frozenset(eset)
        self.removed: tuple = tuple(removed)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        succ = {v: [] for v in self.vertices}
        pred = {v: [] for v in self.vertices}
        for u, v in sorted(eset):
            succ[u].append(v)
            pred[v].append(u)
        self._succ = {v: tuple(ws) for v, ws in succ.items()}
        self._pred = {v: tuple(ws) for v, ws in pred.items()}

    def __repr__(self) -> str:
        return f"DirectedGraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def successors(self, v: Vertex) -> tuple:
        self.index(v)
        return self._succ[v]

    def predecessors(self, v: Vertex) -> tuple:
        self.index(v)
        return self._pred[v]

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return (u, v) in self.edges

    def adjacency(self) -> np.ndarray:
        """0/1 transition matrix indexed in vertex order."""
        A = np.zeros((len(self.vertices),) * 2)
        for u, v in self.edges:
            A[self._index[u], self._index[v]] = 1.0
        return A

    def is_admissible(self, word: Sequence[Vertex]) -> bool:
        if len(word) == 0 or any(v not in self._index for v in word):
            return False
        return all((a, b) in self.edges for a, b in zip(word, word[1:]))

    def words(self, length: int) -> Iterator[tuple]:
        """Admissible words of the given length, in lexicographic order."""
        if length < 1:
            raise GraphError("word length must be at least 1")
        stack = [(v,) for v in reversed(self.vertices)]
        while stack:
            w = stack.pop()
            if len(w) == length:
                yield w
                continue
            for v in reversed(self._succ[w[-1]]):
                stack.append(w + (v,))

    def is_subgraph_of(self, other: "DirectedGraph") -> bool:
        return set(self.vertices) <= set(other.vertices) and self.edges <= other.edges

    def subgraph(self, vertices: Iterable[Vertex]) -> "DirectedGraph":
        """Induced subgraph (pruned as usual)."""
        keep = set(vertices)
        for v in keep:
            self.index(v)
        return DirectedGraph(keep, [(u, v) for u, v in self.edges if u in keep and v in keep])


def reaches(g: DirectedGraph, a: Vertex, b: Vertex, n: int) -> bool:
    """True iff there is a path of exactly ``n`` edges from ``a`` to ``b``."""
    if n < 1:
        raise GraphError("path length must be positive")
    frontier = {g.index(a)}
    target = g.index(b)
    for _ in range(n):
        frontier = {g.index(w) for i in frontier for w in g._succ[g.vertices[i]]}
        if not frontier:
            return False
    return target in frontier


def _components(g: DirectedGraph) -> np.ndarray:
    A = csr_matrix(g.adjacency())
    _, labels = connected_components(A, directed=True, connection="strong")
    return labels


def is_transitive(g: DirectedGraph) -> bool:
    """Topological transitivity, i.e. strong connectivity of the graph."""
    return len(set(_components(g))) == 1


def _bfs_levels(g: DirectedGraph, root: Vertex) -> dict:
    level = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in g._succ[u]:
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def period(g: DirectedGraph) -> int:
    """Period of a transitive graph.

    Vertices are labelled by BFS depth from the first vertex; the period is
    the gcd of ``level(u) + 1 - level(v)`` over all edges ``u -> v``.
    """
    if not is_transitive(g):
        raise GraphError("period is defined for transitive graphs only")
    level = _bfs_levels(g, g.vertices[0])
    p = 0
    for u, v in g.edges:
        p = gcd(p, abs(level[u] + 1 - level[v]))
    return p


@dataclass(frozen=True)
class SpectralDecomposition:
    """Cyclic classes of a transitive graph of period ``period``.

    Every edge leads from ``classes[i]`` to ``classes[(i + 1) % period]``;
    the class holding the first vertex of the graph has index 0.
    """

    period: int
    classes: tuple

    def class_of(self, v: Vertex) -> int:
        for i, cls in enumerate(self.classes):
            if v in cls:
                return i
        raise GraphError(f"unknown vertex {v!r}")


def spectral_decomposition(g: DirectedGraph) -> SpectralDecomposition:
    p = period(g)
    level = _bfs_levels(g, g.vertices[0])
    classes = [set() for _ in range(p)]
    for v in g.vertices:
        classes[level[v] % p].add(v)
    return SpectralDecomposition(p, tuple(frozenset(c) for c in classes))


def power_graph(g: DirectedGraph, dec: SpectralDecomposition, i: int) -> DirectedGraph:
    """Graph presenting ``sigma**p`` restricted to the ``i``-th cyclic class.

    Vertices are the admissible words ``(v_0, ..., v_{p-1})`` with ``v_0`` in
    class ``i``; there is an edge ``v -> w`` iff ``v_{p-1} -> w_0`` is an edge
    of ``g``. One step of this graph therefore advances ``p`` edges of ``g``,
    and concatenating the vertex words of a path recovers the ``g``-path.
    """
    p = dec.period
    if not 0 <= i < p:
        raise GraphError(f"class index {i} out of range for period {p}")
    start = dec.classes[i]
    verts = [w for w in g.words(p) if w[0] in start]
    by_head = {}
    for w in verts:
        by_head.setdefault(w[0], []).append(w)
    edges = [(v, w) for v in verts for nxt in g._succ[v[-1]] for w in by_head.get(nxt, ())]
    return DirectedGraph(verts, edges)


class BlockCode:
    """Sliding-block conjugacy between a graph and its ``k``-block recoding.

    ``encode`` maps a ``g``-word of length ``n >= k`` to the word of its
    ``n - k + 1`` overlapping ``k``-blocks; ``decode`` inverts it.
    """

    def __init__(self, graph: DirectedGraph, k: int):
        self.graph = graph
        self.k = k

    def encode(self, word: Sequence[Vertex]) -> tuple:
        word = tuple(word)
        if len(word) < self.k:
            raise GraphError(f"word of length {len(word)} is shorter than the block length {self.k}")
        if not self.graph.is_admissible(word):
            raise GraphError(f"word {word!r} is not admissible")
        return tuple(word[j:j + self.k] for j in range(len(word) - self.k + 1))

    def decode(self, blocks: Sequence[tuple]) -> tuple:
        blocks = list(blocks)
        if not blocks:
            raise GraphError("empty block word")
        for b, c in zip(blocks, blocks[1:]):
            if tuple(b[1:]) != tuple(c[:-1]):
                raise GraphError(f"blocks {b!r} and {c!r} do not overlap")
        return tuple(blocks[0]) + tuple(b[-1] for b in blocks[1:])


def higher_block(g: DirectedGraph, k: int) -> tuple[DirectedGraph, BlockCode]:
    """``k``-block presentation of ``g``.

    Vertices are the admissible ``k``-words, with an edge
    ``(a_0..a_{k-1}) -> (a_1..a_k)`` for every admissible ``(k+1)``-word.
    ``k = 1`` returns a graph whose vertices are 1-tuples.
    """
    if k < 1:
        raise GraphError("block length must be at least 1")
    verts = list(g.words(k))
    edges = [(w[:-1], w[1:]) for w in g.words(k + 1)]
    return DirectedGraph(verts, edges), BlockCode(g, k)


def transitive_components(g: DirectedGraph) -> list[DirectedGraph]:
    """Strongly connected components carrying at least one cycle.

    Returned as induced subgraphs ordered by their first vertex.
    """
    labels = _components(g)
    groups = {}
    for v, lab in zip(g.vertices, labels):
        groups.setdefault(lab, []).append(v)
    out = []
    for members in groups.values():
        ms = set(members)
        edges = [(u, v) for u, v in g.edges if u in ms and v in ms]
        if edges:
            out.append(DirectedGraph(members, edges))
    out.sort(key=lambda h: h.vertices[0])
    return out


def full_shift(symbols: Sequence[Vertex]) -> DirectedGraph:
    return DirectedGraph(symbols, product(symbols, repeat=2))


def cycle_graph(symbols: Sequence[Vertex]) -> DirectedGraph:
    n = len(symbols)
    return DirectedGraph(symbols, [(symbols[i], symbols[(i + 1) % n]) for i in range(n)])
