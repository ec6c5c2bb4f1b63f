"""Cayley digraphs, plain digraphs, and their elementary transformations."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .groups import ConnectionSet, FiniteAbelianGroup, InfeasibleError, subset_inverse

DENSE_VERTEX_CAP = 20000


@dataclass(frozen=True, eq=False)
class Digraph:
    """A digraph on vertices 0..n-1 held as a dense boolean adjacency matrix.

    ``undirected`` marks a symmetric matrix that should be read as a graph.
    Loops live on the diagonal.
    """

    adjacency: np.ndarray
    undirected: bool = False

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        if self.undirected and not (adj == adj.T).all():
            raise ValueError("undirected graph needs a symmetric adjacency matrix")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], undirected: bool = False) -> Digraph:
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            adj[u, v] = True
            if undirected:
                adj[v, u] = True
        return cls(adj, undirected)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Digraph)
            and self.undirected == other.undirected
            and np.array_equal(self.adjacency, other.adjacency)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def adjacency_matrix(self) -> np.ndarray:
        return self.adjacency

    def out_neighbours(self, v: int) -> set[int]:
        _check_vertex(self.n, v)
        return set(np.flatnonzero(self.adjacency[v]).tolist())

    def in_neighbours(self, v: int) -> set[int]:
        _check_vertex(self.n, v)
        return set(np.flatnonzero(self.adjacency[:, v]).tolist())

    def has_loops(self) -> bool:
        return bool(self.adjacency.diagonal().any())

    def loop_count(self) -> int:
        return int(self.adjacency.diagonal().sum())

    def edges(self) -> list[tuple[int, int]]:
        adj = self.adjacency
        if self.undirected:
            adj = np.triu(adj)
        return [(int(u), int(v)) for u, v in zip(*np.nonzero(adj))]

    def is_automorphism(self, perm) -> bool:
        return is_isomorphism(self, self, perm)


def is_isomorphism(x, y, perm) -> bool:
    """Does ``perm`` (images of x's vertices) map x's arcs exactly onto y's?"""
    a = as_adjacency(x)
    b = as_adjacency(y)
    p = np.asarray(perm, dtype=np.int64)
    if a.shape != b.shape or p.shape != (a.shape[0],):
        return False
    if not np.array_equal(np.sort(p), np.arange(a.shape[0])):
        return False
    return bool(np.array_equal(b[np.ix_(p, p)], a))


def as_adjacency(x) -> np.ndarray:
    if isinstance(x, np.ndarray):
        return x.astype(bool, copy=False)
    return x.adjacency_matrix()


def _check_vertex(n: int, v: int) -> None:
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range 0..{n - 1}")


@dataclass(frozen=True, eq=False)
class CayleyDigraph:
    """Cay(G; S): arc g -> h iff h - g is in S.

    Adjacency is never stored for the group as a whole; the dense matrix and
    the per-vertex bitsets are materialised on first use.
    """

    group: FiniteAbelianGroup
    connection_set: ConnectionSet
    undirected: bool = False

    def __post_init__(self) -> None:
        if self.connection_set.group != self.group:
            raise ValueError("connection set is not a subset of the group")
        if self.undirected and not self.connection_set.is_symmetric:
            raise ValueError("an undirected Cayley graph needs a symmetric connection set")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CayleyDigraph)
            and self.group == other.group
            and self.connection_set == other.connection_set
            and self.undirected == other.undirected
        )

    def __hash__(self) -> int:
        return hash((self.group, self.connection_set, self.undirected))

    @property
    def n(self) -> int:
        return self.group.order

    @property
    def is_undirectable(self) -> bool:
        return self.connection_set.is_symmetric

    @cached_property
    def _conn_array(self) -> np.ndarray:
        return np.asarray(self.connection_set.sorted_indices(), dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        return self.group.add(v, self.group.neg(u)) in self.connection_set.indices

    def out_neighbours(self, v: int) -> set[int]:
        _check_vertex(self.n, v)
        return set(self.group.add_indices(self._conn_array, v).tolist())

    def in_neighbours(self, v: int) -> set[int]:
        _check_vertex(self.n, v)
        return set(self.group.sub_indices(v, self._conn_array).tolist())

    @cached_property
    def _dense(self) -> np.ndarray:
        if self.n > DENSE_VERTEX_CAP:
            raise InfeasibleError(f"dense adjacency refused for {self.n} vertices (cap {DENSE_VERTEX_CAP})")
        g = self.group
        verts = np.arange(self.n)
        targets = g.add_indices(verts[:, None], self._conn_array[None, :])
        adj = np.zeros((self.n, self.n), dtype=bool)
        adj[np.repeat(verts, len(self._conn_array)), targets.ravel()] = True
        adj.setflags(write=False)
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        return self._dense

    @cached_property
    def out_bitsets(self) -> list[int]:
        """Per-vertex out-neighbourhoods as Python int bitsets (bit v = vertex v)."""
        return [_row_to_int(row) for row in self._dense]

    def to_digraph(self) -> Digraph:
        return Digraph(self._dense, self.undirected)

    def translation(self, t: int) -> tuple[int, ...]:
        """The automorphism x -> x + t, as an image tuple."""
        return tuple(int(x) for x in self.group.add_indices(np.arange(self.n), t))

    def is_automorphism(self, perm) -> bool:
        return is_isomorphism(self, self, perm)

    def edges(self) -> list[tuple[int, int]]:
        return self.to_digraph().edges()


def _row_to_int(row: np.ndarray) -> int:
    packed = np.packbits(row.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def build_digraph(group: FiniteAbelianGroup, s: ConnectionSet) -> CayleyDigraph:
    if s.group != group:
        raise ValueError("connection set is not a subset of the group")
    return CayleyDigraph(group, s)


def reverse(x: CayleyDigraph) -> CayleyDigraph:
    return CayleyDigraph(x.group, subset_inverse(x.connection_set), x.undirected)


def ensure_identity(s: ConnectionSet) -> ConnectionSet:
    return s.with_indices(s.indices | {0})


def to_undirected(x: CayleyDigraph) -> CayleyDigraph:
    if not x.connection_set.is_symmetric:
        raise ValueError("connection set is not closed under inverses; the digraph has no undirected reading")
    return CayleyDigraph(x.group, x.connection_set, undirected=True)


def bipartite_double_cover(x) -> Digraph:
    """Graph on V x {0,1}; vertex (v, i) is numbered v + i*n.

    (x, 0) ~ (y, 1) exactly when x -> y is an arc.
    """
    a = as_adjacency(x)
    n = a.shape[0]
    adj = np.zeros((2 * n, 2 * n), dtype=bool)
    adj[:n, n:] = a
    adj[n:, :n] = a.T
    return Digraph(adj, undirected=True)


def out_neighbours(x, v: int) -> set[int]:
    return x.out_neighbours(v)


def in_neighbours(x, v: int) -> set[int]:
    return x.in_neighbours(v)
