import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleyci.cayley import (
    CayleyDigraph,
    Digraph,
    bipartite_double_cover,
    build_digraph,
    ensure_identity,
    in_neighbours,
    is_isomorphism,
    out_neighbours,
    reverse,
    to_undirected,
)
from cayleyci.groups import ConnectionSet, make_group, subset_inverse
from oracles import adjacency_from_set, random_digraph

GROUPS = [(3,), (4,), (2, 2), (5,), (6,), (2, 4), (3, 3), (2, 2, 2)]


def test_cycle_example():
    g = make_group([5])
    x = build_digraph(g, ConnectionSet.from_ints(g, [1]))
    assert out_neighbours(x, 0) == {1} and in_neighbours(x, 0) == {4}
    assert x.adjacency_matrix().sum() == 5


@given(st.sampled_from(GROUPS), st.data())
@settings(max_examples=50, deadline=None)
def test_adjacency_matches_definition(moduli, data):
    g = make_group(moduli)
    idx = data.draw(st.frozensets(st.integers(0, g.order - 1)))
    s = ConnectionSet(g, idx)
    x = build_digraph(g, s)
    assert np.array_equal(x.adjacency_matrix(), adjacency_from_set(moduli, s.sorted_coords()))


@given(st.sampled_from(GROUPS), st.data())
@settings(max_examples=50, deadline=None)
def test_reverse_is_inverse_set_and_involution(moduli, data):
    g = make_group(moduli)
    s = ConnectionSet(g, data.draw(st.frozensets(st.integers(0, g.order - 1))))
    x = build_digraph(g, s)
    assert np.array_equal(build_digraph(g, subset_inverse(s)).adjacency_matrix(), reverse(x).adjacency_matrix())
    assert np.array_equal(reverse(x).adjacency_matrix(), x.adjacency_matrix().T)
    assert reverse(reverse(x)) == x


@pytest.mark.parametrize("moduli", [(7,), (4, 5), (2, 2, 5), (10, 10)])
def test_translations_are_automorphisms(moduli):
    g = make_group(moduli)
    rng = np.random.default_rng(sum(moduli))
    s = ConnectionSet(g, frozenset(rng.choice(g.order, size=g.order // 3, replace=False).tolist()))
    x = build_digraph(g, s)
    assert all(x.is_automorphism(x.translation(t)) for t in range(g.order))


def test_ensure_identity_adds_loops():
    g = make_group([4])
    x = build_digraph(g, ensure_identity(ConnectionSet.from_ints(g, [1])))
    assert x.to_digraph().loop_count() == 4


def test_to_undirected_refuses_asymmetric():
    g = make_group([5])
    with pytest.raises(ValueError):
        to_undirected(build_digraph(g, ConnectionSet.from_ints(g, [1])))
    y = to_undirected(build_digraph(g, ConnectionSet.from_ints(g, [1, 4])))
    assert y.undirected and len(y.edges()) == 5


def test_undirected_flag_requires_symmetric_set():
    g = make_group([5])
    with pytest.raises(ValueError):
        CayleyDigraph(g, ConnectionSet.from_ints(g, [1]), undirected=True)


def test_double_cover_shape():
    x = Digraph.from_edges(3, [(0, 1), (1, 2)])
    c = bipartite_double_cover(x)
    assert c.n == 6 and c.undirected
    assert c.adjacency_matrix()[0, 4] and c.adjacency_matrix()[4, 0] and not c.adjacency_matrix()[0, 1]


def _lift(p):
    n = len(p)
    return tuple(p) + tuple(v + n for v in p)


@pytest.mark.parametrize("seed", range(6))
def test_double_cover_lift_equivalence_exhaustive(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 6
    a = random_digraph(rng, n, loops=True)
    cover = bipartite_double_cover(a)
    for p in itertools.permutations(range(n)):
        assert is_isomorphism(a, a, p) == cover.is_automorphism(_lift(p))


def test_digraph_edges_and_neighbours():
    d = Digraph.from_edges(3, [(0, 1), (2, 2)])
    assert d.edges() == [(0, 1), (2, 2)] and d.has_loops() and d.out_neighbours(0) == {1}
    u = Digraph.from_edges(3, [(0, 1), (1, 0)], undirected=True)
    assert u.edges() == [(0, 1)]
