import itertools

import pytest

from cayleyci.citest import (
    CiVerdict,
    babai_agreement,
    babai_census,
    is_ci_graph_definitional,
    is_ci_group,
    is_ci_via_babai,
    is_dci_digraph_definitional,
    verify_witness,
)
from cayleyci.groups import ConnectionSet, InfeasibleError, apply_automorphism, enumerate_automorphisms, make_group
from oracles import brute_dci


def cs(moduli, elements):
    g = make_group(moduli)
    return g, ConnectionSet(g, frozenset(elements))


@pytest.mark.parametrize("elements", [[1], [], [0, 1, 2, 3]])
def test_z4_directed_examples(elements):
    g, s = cs((4,), elements)
    assert is_dci_digraph_definitional(g, s).is_ci


def test_undirected_examples():
    g, s = cs((5,), [1, 4])
    assert is_ci_graph_definitional(g, s).is_ci
    g6, s6 = cs((6,), [2, 4])
    assert is_ci_graph_definitional(g6, s6).is_ci
    assert is_ci_via_babai(g6, s6, directed=False).is_ci
    g7, empty = cs((7,), [])
    assert is_ci_graph_definitional(g7, empty).is_ci


def test_babai_examples():
    g, s = cs((4,), [1, 3])
    census = babai_census(g, s)
    assert census.aut_order == 8 and census.regular_subgroups == 1
    assert is_ci_via_babai(g, s, directed=False).is_ci
    g5, s5 = cs((5,), [1])
    assert babai_census(g5, s5).aut_order == 5
    assert is_ci_via_babai(g5, s5, directed=True).is_ci


def test_undirected_requires_symmetric_set():
    g, s = cs((5,), [1])
    with pytest.raises(ValueError):
        is_ci_graph_definitional(g, s)
    with pytest.raises(ValueError):
        is_ci_via_babai(g, s, directed=False)


def test_gates():
    g, s = cs((17,), [1])
    with pytest.raises(InfeasibleError):
        is_dci_digraph_definitional(g, s)
    with pytest.raises(InfeasibleError):
        is_ci_group(make_group([13]), directed=True)
    g8, k8 = cs((8,), range(8))
    with pytest.raises(InfeasibleError):
        is_ci_via_babai(g8, k8, directed=True, subgroup_cap=100)


@pytest.mark.parametrize("moduli", [(2,), (3,), (4,), (2, 2), (5,)])
def test_both_deciders_match_brute_force_definition(moduli):
    g = make_group(moduli)
    for r in range(g.order + 1):
        for idx in itertools.combinations(range(g.order), r):
            s = ConnectionSet(g, frozenset(idx))
            want = brute_dci(moduli, s.sorted_coords())
            assert is_dci_digraph_definitional(g, s).is_ci == want
            assert is_ci_via_babai(g, s, directed=True).is_ci == want
            if s.is_symmetric:
                want_u = brute_dci(moduli, s.sorted_coords(), symmetric_only=True)
                assert is_ci_graph_definitional(g, s).is_ci == want_u


def test_z6_samples_match_brute_force():
    g = make_group([6])
    for idx in [(1,), (0, 1), (1, 2), (0, 2, 4), (1, 3), (0, 1, 3)]:
        s = ConnectionSet(g, frozenset(idx))
        assert is_dci_digraph_definitional(g, s).is_ci == brute_dci((6,), s.sorted_coords())


def test_group_verdicts():
    assert is_ci_group(make_group([4]), directed=True) == (True, None)
    assert is_ci_group(make_group([2, 2]), directed=False) == (True, None)
    assert is_ci_group(make_group([]), directed=True) == (True, None)
    assert is_ci_group(make_group([8]), directed=False) == (True, None)


def test_cyclic_eight_is_not_dci():
    ok, verdict = is_ci_group(make_group([8]), directed=True)
    assert not ok
    assert verdict.set == ((0,), (1,), (2,), (4,), (5,))
    assert verdict.witness["set"] == [[0], [1], [4], [5], [6]]
    assert verify_witness(verdict)
    ok_b, verdict_b = is_ci_group(make_group([8]), directed=True, method="babai")
    assert not ok_b and verdict_b.set == verdict.set and verify_witness(verdict_b)


def test_z2_z4_is_not_ci():
    ok, verdict = is_ci_group(make_group([2, 4]), directed=False)
    assert not ok
    # the cyclic and the Klein subgroup of order 4 both give two disjoint looped K4s
    assert verdict.set == ((0, 0), (0, 1), (0, 2), (0, 3))
    assert verdict.witness["set"] == [[0, 0], [0, 2], [1, 0], [1, 2]]
    assert verify_witness(verdict)


def test_positive_verdict_has_no_witness():
    g, s = cs((4,), [1])
    v = is_dci_digraph_definitional(g, s)
    assert v.witness is None and not verify_witness(v)
    assert isinstance(v, CiVerdict) and v.to_record()["verdict"] == "CI"


@pytest.mark.parametrize("moduli", [(6,), (8,), (2, 4), (2, 2, 2)])
def test_verdict_invariant_under_group_automorphisms(moduli):
    g = make_group(moduli)
    autos = list(enumerate_automorphisms(g))
    samples = [frozenset(c) for c in itertools.combinations(range(g.order), 3)][:: max(1, g.order // 2)]
    for idx in samples:
        s = ConnectionSet(g, idx)
        base_d = is_dci_digraph_definitional(g, s).is_ci
        base_b = is_ci_via_babai(g, s, directed=True).is_ci
        for a in autos[:: max(1, len(autos) // 6)]:
            t = apply_automorphism(a, s)
            assert is_dci_digraph_definitional(g, t).is_ci == base_d
            assert is_ci_via_babai(g, t, directed=True).is_ci == base_b


def test_worker_count_does_not_change_results():
    g = make_group([6])
    assert is_ci_group(g, directed=True, workers=1) == is_ci_group(g, directed=True, workers=2)
    one = babai_agreement([(4,), (2, 2)], workers=1)
    two = babai_agreement([(4,), (2, 2)], workers=2)
    assert (one.checked, one.non_ci, one.group_verdicts) == (two.checked, two.non_ci, two.group_verdicts)
