"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

import itertools

import numpy as np


def adjacency_from_set(moduli, elements) -> np.ndarray:
    """Cayley digraph adjacency straight from the definition: g -> h iff h - g in S."""
    elems = list(itertools.product(*(range(m) for m in moduli)))
    index = {e: i for i, e in enumerate(elems)}
    s = {tuple(e) for e in elements}
    n = len(elems)
    adj = np.zeros((n, n), dtype=bool)
    for g in elems:
        for h in elems:
            diff = tuple((b - a) % m for a, b, m in zip(g, h, moduli))
            adj[index[g], index[h]] = diff in s
    return adj


def brute_isomorphism(a: np.ndarray, b: np.ndarray):
    n = a.shape[0]
    if b.shape != a.shape or a.sum() != b.sum():
        return None
    for p in itertools.permutations(range(n)):
        p = np.asarray(p, dtype=np.int64)
        if np.array_equal(b[np.ix_(p, p)], a):
            return tuple(int(v) for v in p)
    return None


def brute_automorphisms(a: np.ndarray) -> list[tuple[int, ...]]:
    n = a.shape[0]
    out = []
    for p in itertools.permutations(range(n)):
        q = np.asarray(p, dtype=np.int64)
        if np.array_equal(a[np.ix_(q, q)], a):
            out.append(p)
    return out


def group_elements(moduli):
    return list(itertools.product(*(range(m) for m in moduli)))


def brute_group_automorphisms(moduli) -> list[dict]:
    """Every bijection of the group that respects addition."""
    elems = group_elements(moduli)

    def add(x, y):
        return tuple((a + b) % m for a, b, m in zip(x, y, moduli))

    out = []
    for images in itertools.permutations(elems):
        f = dict(zip(elems, images))
        if all(f[add(x, y)] == add(f[x], f[y]) for x in elems for y in elems):
            out.append(f)
    return out


def brute_dci(moduli, s, symmetric_only=False) -> bool:
    """Definition of the DCI (CI) property by exhaustive search."""
    elems = group_elements(moduli)
    s = {tuple(e) for e in s}
    a = adjacency_from_set(moduli, s)
    autos = brute_group_automorphisms(moduli)
    images = {frozenset(f[x] for x in s) for f in autos}

    def neg(x):
        return tuple((-v) % m for v, m in zip(x, moduli))

    for other in itertools.combinations(elems, len(s)):
        other = frozenset(other)
        if symmetric_only and {neg(x) for x in other} != other:
            continue
        if other in images:
            continue
        if brute_isomorphism(a, adjacency_from_set(moduli, other)) is not None:
            return False
    return True


def brute_maximal_cliques(a: np.ndarray) -> list[list[int]]:
    n = a.shape[0]
    adj = a.copy()
    np.fill_diagonal(adj, False)
    cliques = []
    for r in range(1, n + 1):
        for c in itertools.combinations(range(n), r):
            if all(adj[u, v] for u, v in itertools.combinations(c, 2)):
                cliques.append(set(c))
    maximal = [c for c in cliques if not any(c < d for d in cliques)]
    return sorted(sorted(c) for c in maximal)


def random_digraph(rng, n: int, p: float = 0.4, loops: bool = False) -> np.ndarray:
    a = rng.random((n, n)) < p
    if not loops:
        np.fill_diagonal(a, False)
    return a


def random_graph(rng, n: int, p: float = 0.5) -> np.ndarray:
    a = np.triu(rng.random((n, n)) < p, 1)
    return a | a.T
