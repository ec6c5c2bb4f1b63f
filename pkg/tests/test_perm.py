import math
from collections import Counter
import random

import pytest
from hypothesis import given, settings, strategies as st

from cayleyci.cayley import build_digraph
from cayleyci.groups import ConnectionSet, InfeasibleError, make_group
from cayleyci.hat import build_hat, lift_automorphism
from cayleyci.isocanon import automorphism_group
from cayleyci.perm import (
    Permutation,
    PermutationGroup,
    StabilizerChain,
    are_conjugate_subgroups,
    conjugacy_class_of_subgroup,
    element_order_census,
    enumerate_regular_subgroups,
    is_regular_action,
    right_regular_representation,
    stabilizer_chain,
)


def closure(gens, n):
    e = tuple(range(n))
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[x[i]] for i in range(n))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


perm_strategy = st.integers(3, 7).flatmap(
    lambda n: st.lists(st.permutations(list(range(n))), min_size=1, max_size=3)
)


@given(perm_strategy)
@settings(max_examples=80, deadline=None)
def test_chain_order_matches_closure(gens):
    n = len(gens[0])
    chain = stabilizer_chain([Permutation(g) for g in gens])
    assert chain.order == len(closure(gens, n))


@given(perm_strategy, st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_membership(gens, seed):
    rnd = random.Random(seed)
    n = len(gens[0])
    ps = [Permutation(g) for g in gens]
    group = PermutationGroup(ps)
    for _ in range(5):
        w = Permutation.identity(n)
        for _ in range(3):
            w = w * rnd.choice(ps)
        assert group.contains(w)
    members = closure(gens, n)
    if len(members) < math.factorial(n):
        outside = next(tuple(p) for p in _all_perms(n, rnd) if tuple(p) not in members)
        assert not group.contains(outside)


def _all_perms(n, rnd):
    while True:
        p = list(range(n))
        rnd.shuffle(p)
        yield p


def test_composition_convention():
    p = Permutation((1, 2, 0))
    q = Permutation((0, 2, 1))
    assert (p * q)(1) == p(q(1)) == 0
    assert (p * ~p).is_identity


def test_symmetric_group_order():
    s5 = PermutationGroup([Permutation((1, 2, 3, 4, 0)), Permutation((1, 0, 2, 3, 4))])
    assert s5.order == 120 and s5.is_transitive()
    assert s5.stabilizer(0).order == 24


def test_base_prefix_is_respected():
    s4 = [Permutation((1, 2, 3, 0)), Permutation((1, 0, 2, 3))]
    chain = StabilizerChain(4, s4, base_prefix=[3, 1])
    assert chain.base[:2] == [3, 1] and chain.order == 24
    assert all(g(3) == 3 for g in chain.strong_generators(1))


def test_chain_elements_enumerates_group():
    gens = [Permutation((1, 2, 3, 4, 0)), Permutation((4, 3, 2, 1, 0))]
    chain = stabilizer_chain(gens)
    assert set(chain.elements()) == closure(gens, 5)


def test_right_regular_representation():
    h = make_group([2, 3])
    r = right_regular_representation(h)
    assert r.order == 6 and is_regular_action(r) and r.is_abelian()


def test_four_cycle_regular_subgroups():
    g = make_group([4])
    aut = automorphism_group(build_digraph(g, ConnectionSet.from_ints(g, [1, 3])))
    assert aut.order == 8
    cyclic = enumerate_regular_subgroups(aut, g)
    klein = enumerate_regular_subgroups(aut, make_group([2, 2]))
    assert len(cyclic) == 1 and len(klein) == 1
    assert cyclic[0].order == 4 and is_regular_action(cyclic[0])


@pytest.mark.parametrize("moduli", [(8,), (2, 4), (2, 2, 2)])
def test_regular_subgroups_of_symmetric_group_count(moduli):
    # |Sym(n)| / |Hol(H)| regular subgroups of Sym(n) are isomorphic to H
    h = make_group(moduli)
    sym = PermutationGroup([Permutation((1, 2, 3, 4, 5, 6, 7, 0)), Permutation((1, 0, 2, 3, 4, 5, 6, 7))])
    subs = enumerate_regular_subgroups(sym, h)
    n_aut = {(8,): 4, (2, 4): 8, (2, 2, 2): 168}[moduli]
    assert len(subs) == math.factorial(8) // (8 * n_aut)
    for s in subs[:: max(1, len(subs) // 25)]:
        assert is_regular_action(s) and s.is_abelian()
        assert element_order_census(h) == tuple(sorted(Counter(g.order() for g in s.elements()).items()))
        assert s.is_subgroup_of(sym)


def test_conjugacy_witness_verifies():
    g = make_group([4])
    aut = automorphism_group(build_digraph(g, ConnectionSet.from_ints(g, [1])))
    reg = right_regular_representation(g)
    sym = PermutationGroup([Permutation((1, 2, 3, 0)), Permutation((1, 0, 2, 3))])
    other = PermutationGroup([Permutation((2, 3, 1, 0))])
    a = are_conjugate_subgroups(reg, other, sym)
    assert a is not None and sym.contains(a)
    assert {x.conjugate_by(a) for x in reg.elements()} == set(other.elements())
    assert are_conjugate_subgroups(reg, other, aut) is None
    assert len(conjugacy_class_of_subgroup(reg, sym)) == 3


def test_search_cap_is_a_hard_error():
    s8 = PermutationGroup([Permutation((1, 2, 3, 4, 5, 6, 7, 0)), Permutation((1, 0, 2, 3, 4, 5, 6, 7))])
    with pytest.raises(InfeasibleError):
        enumerate_regular_subgroups(s8, make_group([8]), cap=1000)


@pytest.mark.parametrize("moduli,elements,n", [((5,), [0, 1], 4), ((5,), [0, 1], 3), ((4,), [1], 3)])
def test_lift_is_a_homomorphism_into_hat_automorphisms(moduli, elements, n):
    g = make_group(moduli)
    hat = build_hat(g, ConnectionSet.from_ints(g, elements), n)
    aut_x = list(automorphism_group(hat.base_digraph).elements())
    rnd = random.Random(1)
    for _ in range(15):
        p1, p2 = rnd.choice(aut_x), rnd.choice(aut_x)
        a1, a2, b1, b2 = (rnd.randrange(n) for _ in range(4))
        l1 = lift_automorphism(p1, a1, b1, hat)
        l2 = lift_automorphism(p2, a2, b2, hat)
        assert l1 * l2 == lift_automorphism(p1 * p2, a1 + a2, b1 + b2, hat)
        assert hat.hat_graph.is_automorphism(l1)


def test_lift_rejects_non_automorphism():
    g = make_group([5])
    hat = build_hat(g, ConnectionSet.from_ints(g, [0, 1]), 4)
    with pytest.raises(ValueError):
        lift_automorphism((1, 0, 2, 3, 4), 0, 0, hat)
