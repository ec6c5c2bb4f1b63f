import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleyci.cayley import Digraph, build_digraph, is_isomorphism
from cayleyci.groups import ConnectionSet, InfeasibleError, make_group
from cayleyci.isocanon import (
    are_isomorphic,
    automorphism_group,
    canonical_form,
    colour_refinement,
    point_stabilizer_automorphisms,
)
from cayleyci.perm import Permutation, PermutationGroup
from oracles import brute_automorphisms, brute_isomorphism, random_digraph

matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=n, max_size=n)
).map(lambda rows: np.asarray(rows, dtype=bool))


@given(matrices, st.permutations(list(range(6))))
@settings(max_examples=150, deadline=None)
def test_canonical_form_invariant_under_relabelling(a, perm):
    n = a.shape[0]
    p = np.asarray([v for v in perm if v < n])
    b = a[np.ix_(p, p)]
    assert canonical_form(a).adjacency_bytes == canonical_form(b).adjacency_bytes


@given(matrices, matrices)
@settings(max_examples=150, deadline=None)
def test_isomorphism_agrees_with_brute_force(a, b):
    w = are_isomorphic(a, b)
    brute = brute_isomorphism(a, b)
    assert (w is None) == (brute is None)
    if w is not None:
        assert is_isomorphism(a, b, w)


@pytest.mark.parametrize("seed", range(25))
def test_automorphism_group_order_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 5
    a = random_digraph(rng, n, p=[0.2, 0.5, 0.8][seed % 3], loops=seed % 2 == 0)
    aut = automorphism_group(a)
    assert aut.order == len(brute_automorphisms(a))
    assert all(is_isomorphism(a, a, g) for g in aut.generators)


def test_order_stable_under_generator_shuffle():
    g = make_group([3, 3])
    x = build_digraph(g, ConnectionSet.from_coords(g, [(0, 1), (1, 0), (1, 1)]))
    aut = automorphism_group(x)
    gens = list(aut.generators)
    rng = np.random.default_rng(0)
    for _ in range(5):
        rng.shuffle(gens)
        assert PermutationGroup(gens, degree=9).order == aut.order
    assert 362880 % aut.order == 0


def test_cycle_and_complete_graph_orders():
    g = make_group([7])
    assert automorphism_group(build_digraph(g, ConnectionSet.from_ints(g, [1]))).order == 7
    assert automorphism_group(build_digraph(g, ConnectionSet.from_ints(g, [1, 6]))).order == 14
    assert automorphism_group(build_digraph(g, ConnectionSet.from_ints(g, range(1, 7)))).order == 5040


def test_colour_refinement_examples():
    star = Digraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 0)])
    part = colour_refinement(star)
    assert sorted(map(len, part.cells)) == [1, 3]
    cycle = Digraph.from_edges(4, [(i, (i + 1) % 4) for i in range(4)])
    assert len(colour_refinement(cycle).cells) == 1
    path = Digraph.from_edges(3, [(0, 1), (1, 2)])
    assert colour_refinement(path).is_discrete
    assert len(colour_refinement(cycle, initial=[1, 0, 0, 0]).cells) == 4


def test_point_stabilizer():
    g = make_group([5])
    stab = point_stabilizer_automorphisms(build_digraph(g, ConnectionSet.from_ints(g, [1, 4])), 0)
    assert stab.order == 2


def test_vertex_cap():
    with pytest.raises(InfeasibleError):
        canonical_form(np.zeros((30, 30), dtype=bool), cap=10)


def test_canonical_labelling_reproduces_bytes():
    rng = np.random.default_rng(3)
    a = random_digraph(rng, 7)
    cf = canonical_form(a)
    inv = ~cf.labelling
    relabelled = a[np.ix_(np.asarray(inv), np.asarray(inv))]
    assert np.array_equal(relabelled, cf.relabelled_matrix())
    assert isinstance(cf.labelling, Permutation)
