"""Maximal clique enumeration (Bron-Kerbosch with Tomita pivoting) on int bitsets."""

from __future__ import annotations

import numpy as np

from .cayley import as_adjacency
from .groups import InfeasibleError

DEFAULT_BUDGET = 10**7


class BudgetExceeded(InfeasibleError):
    pass


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _neighbour_bitsets(adj: np.ndarray) -> list[int]:
    out = []
    for v, row in enumerate(adj):
        packed = np.packbits(row.astype(np.uint8), bitorder="little")
        out.append(int.from_bytes(packed.tobytes(), "little") & ~(1 << v))
    return out


def maximal_cliques(x, budget: int = DEFAULT_BUDGET) -> list[list[int]]:
    """All maximal cliques of an undirected graph, loops ignored.

    Each clique is sorted and the list is sorted lexicographically.
    """
    adj = as_adjacency(x)
    if not np.array_equal(adj, adj.T):
        raise ValueError("clique enumeration needs an undirected graph")
    nbr = _neighbour_bitsets(adj)
    n = len(nbr)
    found: list[list[int]] = []
    nodes = 0

    def expand(r: list[int], p: int, x_: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"clique search exceeded {budget} recursion nodes")
        if not p and not x_:
            found.append(sorted(r))
            return
        pivot = max(_bits(p | x_), key=lambda u: (nbr[u] & p).bit_count())
        for v in _bits(p & ~nbr[pivot]):
            expand(r + [v], p & nbr[v], x_ & nbr[v])
            p &= ~(1 << v)
            x_ |= 1 << v

    if n:
        expand([], (1 << n) - 1, 0)
    return sorted(found)


def is_clique(x, vertices) -> bool:
    adj = as_adjacency(x)
    vs = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
    sub = adj[np.ix_(vs, vs)] | np.eye(len(vs), dtype=bool)
    return bool(sub.all())


def is_maximal_clique(x, vertices) -> bool:
    adj = as_adjacency(x)
    vs = sorted(set(int(v) for v in vertices))
    if not is_clique(adj, vs):
        return False
    outside = np.setdiff1d(np.arange(adj.shape[0]), vs)
    return not adj[np.ix_(outside, vs)].all(axis=1).any()
