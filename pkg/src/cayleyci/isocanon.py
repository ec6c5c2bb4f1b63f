"""Canonical labelling, isomorphism and automorphism groups of small digraphs.

Individualization-refinement search.  Refinement splits cells by
(out-count, in-count) into a splitter cell, so it is exact for digraphs.
Each search node carries a label-free invariant: a digest of its
refinement trace plus the quotient matrix of its equitable partition.

* ``automorphism_group`` walks the leftmost path, then climbs back up; at
  each level it looks for one automorphism per orbit of the current
  stabilizer, so it returns generators of the full group.
* ``canonical_form`` explores, at every node, one child per orbit of the
  pointwise stabilizer of the path (known from the automorphism group)
  and only the children with the largest invariant; the canonical leaf is
  the smallest relabelled adjacency among those reached.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cayley import CayleyDigraph, as_adjacency, is_isomorphism
from .groups import InfeasibleError
from .perm import Permutation, PermutationGroup, StabilizerChain, orbit_partition

DEFAULT_VERTEX_CAP = 2000
CANONICAL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ColouredPartition:
    colours: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]

    @property
    def is_discrete(self) -> bool:
        return len(self.cells) == len(self.colours)


@dataclass(frozen=True)
class CanonicalForm:
    """``labelling[v]`` is the canonical label of vertex v."""

    labelling: Permutation
    adjacency_bytes: bytes

    def relabelled_matrix(self) -> np.ndarray:
        n = len(self.labelling)
        bits = np.unpackbits(np.frombuffer(self.adjacency_bytes[4:], dtype=np.uint8))[: n * n]
        return bits.reshape(n, n).astype(bool)


@dataclass
class _Node:
    lab: np.ndarray
    cell_of: np.ndarray
    size: np.ndarray
    invariant: bytes
    path: tuple[int, ...]
    ncells: int

    @property
    def discrete(self) -> bool:
        return self.ncells == len(self.lab)

    def target(self) -> tuple[int, int] | None:
        """First smallest non-singleton cell as (start, size)."""
        sizes = self.size
        cand = np.flatnonzero(sizes > 1)
        if not len(cand):
            return None
        s = int(cand[np.argmin(sizes[cand])])
        return s, int(sizes[s])

    def cell(self, start: int) -> list[int]:
        return sorted(self.lab[start:start + int(self.size[start])].tolist())


class _Refiner:
    def __init__(self, adjacency: np.ndarray, cap: int):
        n = adjacency.shape[0]
        if n > cap:
            raise InfeasibleError(f"{n} vertices exceeds the canonical-labelling cap {cap}")
        self.n = n
        self.adj = np.ascontiguousarray(adjacency, dtype=np.int32)
        self.adj_t = np.ascontiguousarray(self.adj.T)
        self.adj_bool = adjacency.astype(bool)

    def root(self, colours: Sequence[int] | None = None) -> _Node:
        n = self.n
        if colours is None:
            colours = [0] * n
        colours = np.asarray(colours)
        order = np.lexsort((np.arange(n), colours))
        lab = order.astype(np.int64)
        cell_of = np.zeros(n, dtype=np.int64)
        size = np.zeros(n, dtype=np.int64)
        starts = []
        i = 0
        while i < n:
            j = i
            while j < n and colours[lab[j]] == colours[lab[i]]:
                j += 1
            cell_of[lab[i:j]] = i
            size[i] = j - i
            starts.append(i)
            i = j
        events: list = [("colours", tuple(int(size[s]) for s in starts))]
        ncells = self._refine(lab, cell_of, size, starts, len(starts), events)
        return _Node(lab, cell_of, size, self._invariant(lab, cell_of, size, events), (), ncells)

    def child(self, node: _Node, v: int) -> _Node:
        lab = node.lab.copy()
        cell_of = node.cell_of.copy()
        size = node.size.copy()
        s = int(cell_of[v])
        m = int(size[s])
        if m < 2:
            raise ValueError("individualizing a singleton cell")
        pos = s + int(np.flatnonzero(lab[s:s + m] == v)[0])
        lab[s], lab[pos] = lab[pos], lab[s]
        size[s] = 1
        size[s + 1] = m - 1
        cell_of[lab[s + 1:s + m]] = s + 1
        events: list = [("ind", s, m)]
        ncells = self._refine(lab, cell_of, size, [s], node.ncells + 1, events)
        return _Node(lab, cell_of, size, self._invariant(lab, cell_of, size, events), node.path + (v,), ncells)

    def _refine(self, lab, cell_of, size, queue_starts, ncells, events) -> int:
        n = self.n
        queue = deque(queue_starts)
        inq = set(queue_starts)
        base = n + 1
        while queue and ncells < n:
            w = queue.popleft()
            inq.discard(w)
            members = lab[w:w + size[w]]
            key = self.adj[:, members].sum(axis=1, dtype=np.int64) * base + self.adj_t[:, members].sum(axis=1, dtype=np.int64)
            starts = np.flatnonzero(size)
            klab = key[lab]
            lo = np.minimum.reduceat(klab, starts)
            hi = np.maximum.reduceat(klab, starts)
            for s in starts[lo != hi].tolist():
                m = int(size[s])
                seg = lab[s:s + m]
                kseg = key[seg]
                order = np.argsort(kseg, kind="stable")
                seg = seg[order]
                kseg = kseg[order]
                lab[s:s + m] = seg
                vals, counts = np.unique(kseg, return_counts=True)
                events.append((w, s, tuple(vals.tolist()), tuple(counts.tolist())))
                pos = s
                for c in counts.tolist():
                    size[pos] = c
                    cell_of[lab[pos:pos + c]] = pos
                    if pos not in inq:
                        queue.append(pos)
                        inq.add(pos)
                    pos += c
                ncells += len(counts) - 1
        return ncells

    def _invariant(self, lab, cell_of, size, events) -> bytes:
        h = hashlib.blake2b(repr(events).encode(), digest_size=20)
        starts = np.flatnonzero(size)
        rank = np.zeros(self.n, dtype=np.int64)
        rank[starts] = np.arange(len(starts))
        reps = lab[starts]
        rows, cols = np.nonzero(self.adj_bool[reps])
        q = np.zeros((len(starts), len(starts)), dtype=np.int64)
        np.add.at(q, (rows, rank[cell_of[cols]]), 1)
        h.update(q.tobytes())
        return h.digest()

    def leaf_matrix(self, node: _Node) -> np.ndarray:
        return self.adj_bool[np.ix_(node.lab, node.lab)]


def _leaf_bytes(matrix: np.ndarray) -> bytes:
    n = matrix.shape[0]
    return n.to_bytes(4, "big") + np.packbits(matrix.astype(np.uint8).ravel()).tobytes()


def colour_refinement(x, initial: Sequence[int] | None = None, cap: int = 10**5) -> ColouredPartition:
    """Coarsest equitable refinement of the colouring ``initial``."""
    ref = _Refiner(as_adjacency(x), cap)
    node = ref.root(initial)
    starts = np.flatnonzero(node.size).tolist()
    colours = [0] * ref.n
    cells = []
    for k, s in enumerate(starts):
        cell = node.cell(s)
        cells.append(tuple(cell))
        for v in cell:
            colours[v] = k
    return ColouredPartition(tuple(colours), tuple(cells))


def _orbits_of(points: Sequence[int], gens: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    wanted = set(points)
    return [
        [p for p in cell if p in wanted]
        for cell in orbit_partition(n, gens)
        if any(p in wanted for p in cell)
    ]


def _fixes(g: Sequence[int], points: Sequence[int]) -> bool:
    return all(g[p] == p for p in points)


class _AutomorphismSearch:
    def __init__(self, ref: _Refiner, colours, known: Sequence[Permutation]):
        self.ref = ref
        self.n = ref.n
        self.gens: list[Permutation] = list(known)
        self.first: list[_Node] = [ref.root(colours)]
        while not self.first[-1].discrete:
            node = self.first[-1]
            s, _ = node.target()
            self.first.append(ref.child(node, node.cell(s)[0]))
        self.leaf0 = self.first[-1]
        self.leaf0_matrix = ref.leaf_matrix(self.leaf0)

    def run(self) -> list[Permutation]:
        for i in range(len(self.first) - 2, -1, -1):
            node = self.first[i]
            s, _ = node.target()
            vi = self.first[i + 1].path[-1]
            prefix = node.path
            failed: set[int] = set()
            for w in node.cell(s):
                if w == vi:
                    continue
                stab = [g for g in self.gens if _fixes(g, prefix)]
                orbit_cells = orbit_partition(self.n, stab)
                where = {p: k for k, cell in enumerate(orbit_cells) for p in cell}
                if where[w] == where[vi] or any(where[w] == where[f] for f in failed):
                    continue
                found = self._subtree(node, w, i + 1)
                if found is None:
                    failed.add(w)
                else:
                    self.gens.append(found)
        return self.gens

    def _subtree(self, parent: _Node, w: int, depth: int) -> Permutation | None:
        node = self.ref.child(parent, w)
        if node.invariant != self.first[depth].invariant:
            return None
        return self._dfs(node, depth)

    def _dfs(self, node: _Node, depth: int) -> Permutation | None:
        if node.discrete:
            if np.array_equal(self.ref.leaf_matrix(node), self.leaf0_matrix):
                images = [0] * self.n
                for a, b in zip(self.leaf0.lab.tolist(), node.lab.tolist()):
                    images[a] = b
                return Permutation._trusted(images)
            return None
        s, _ = node.target()
        explored: list[int] = []
        for u in node.cell(s):
            if explored:
                stab = [g for g in self.gens if _fixes(g, node.path)]
                if stab:
                    cells = orbit_partition(self.n, stab)
                    where = {p: k for k, cell in enumerate(cells) for p in cell}
                    if any(where[u] == where[e] for e in explored):
                        continue
            explored.append(u)
            child = self.ref.child(node, u)
            if child.invariant != self.first[depth + 1].invariant:
                continue
            found = self._dfs(child, depth + 1)
            if found is not None:
                return found
        return None


def _known_automorphisms(x, adj: np.ndarray) -> list[Permutation]:
    known = []
    if isinstance(x, CayleyDigraph):
        for e in x.group.basis():
            known.append(Permutation._trusted(x.translation(e.index)))
    return [g for g in known if is_isomorphism(adj, adj, g)]


def automorphism_group(
    x,
    cap: int = DEFAULT_VERTEX_CAP,
    known: Sequence[Sequence[int]] = (),
    colours: Sequence[int] | None = None,
) -> PermutationGroup:
    """Generators of Aut(x) (colour-preserving if ``colours`` is given).

    ``known`` automorphisms are verified and used to seed orbit pruning;
    Cayley digraphs are seeded with their translations automatically.
    """
    adj = as_adjacency(x)
    ref = _Refiner(adj, cap)
    seeds = _known_automorphisms(x, adj)
    for g in known:
        g = Permutation(g)
        if not is_isomorphism(adj, adj, g):
            raise ValueError("a supplied 'known' permutation is not an automorphism")
        seeds.append(g)
    if colours is not None:
        seeds = [g for g in seeds if all(colours[g[v]] == colours[v] for v in range(len(g)))]
    search = _AutomorphismSearch(ref, colours, seeds)
    gens = search.run()
    for g in gens:
        if not is_isomorphism(adj, adj, g):
            raise AssertionError("automorphism search produced a non-automorphism")
    unique = sorted(set(g for g in gens if not g.is_identity()))
    return PermutationGroup(unique, degree=ref.n)


def canonical_form(
    x,
    cap: int = DEFAULT_VERTEX_CAP,
    aut: PermutationGroup | None = None,
) -> CanonicalForm:
    adj = as_adjacency(x)
    ref = _Refiner(adj, cap)
    if aut is None:
        aut = automorphism_group(x, cap=cap)
    best: list = [None, None]

    def visit(node: _Node, stab: list[Permutation]) -> None:
        if node.discrete:
            b = _leaf_bytes(ref.leaf_matrix(node))
            if best[0] is None or b < best[0]:
                best[0], best[1] = b, node.lab.copy()
            return
        s, _ = node.target()
        cell = node.cell(s)
        reps = [orbit[0] for orbit in _orbits_of(cell, stab, ref.n)] if stab else cell
        children = [ref.child(node, v) for v in reps]
        top = max(c.invariant for c in children)
        for v, child in zip(reps, children):
            if child.invariant != top:
                continue
            if stab:
                chain = StabilizerChain(ref.n, stab, base_prefix=[v])
                child_stab = chain.strong_generators(1)
            else:
                child_stab = []
            visit(child, child_stab)

    visit(ref.root(), [g for g in aut.generators])
    labelling = [0] * ref.n
    for pos, v in enumerate(best[1].tolist()):
        labelling[v] = pos
    return CanonicalForm(Permutation._trusted(labelling), best[0])


def are_isomorphic(x, y, cap: int = DEFAULT_VERTEX_CAP) -> Permutation | None:
    """A vertex bijection carrying x's arcs onto y's arcs, or None."""
    ax = as_adjacency(x)
    ay = as_adjacency(y)
    if ax.shape != ay.shape:
        return None
    if ax.sum() != ay.sum() or np.trace(ax) != np.trace(ay):
        return None
    cx = canonical_form(x, cap=cap)
    cy = canonical_form(y, cap=cap)
    if cx.adjacency_bytes != cy.adjacency_bytes:
        return None
    inv_y = ~cy.labelling
    witness = Permutation._trusted(inv_y[cx.labelling[v]] for v in range(ax.shape[0]))
    if not is_isomorphism(ax, ay, witness):
        raise AssertionError("canonical forms agree but the derived bijection is not an isomorphism")
    return witness


def point_stabilizer_automorphisms(x, v: int, cap: int = DEFAULT_VERTEX_CAP) -> PermutationGroup:
    aut = automorphism_group(x, cap=cap)
    if not 0 <= v < aut.degree:
        raise IndexError(f"vertex {v} out of range")
    return aut.stabilizer(v)
