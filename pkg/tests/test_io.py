import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleyci.cayley import build_digraph
from cayleyci.groups import ConnectionSet, make_group
from cayleyci.hat import spiga_connection_set
from cayleyci.io import (
    FormatError,
    decode_graph6,
    dumps_connection_set,
    dumps_edge_list,
    dumps_permutations,
    dumps_report,
    encode_graph6,
    loads_connection_set,
    loads_edge_list,
    loads_permutations,
    loads_report,
)
from oracles import random_graph


def test_connection_set_round_trip_and_layout():
    g = make_group([3, 3])
    s = ConnectionSet.from_coords(g, [(2, 1), (0, 1)])
    text = dumps_connection_set(s)
    assert text.endswith("}\n")
    assert text.index("[0, 1]") < text.index("[2, 1]")
    assert loads_connection_set(text) == s


def test_spiga_file_has_one_row_per_element():
    text = dumps_connection_set(spiga_connection_set())
    rows = [line for line in text.splitlines() if line.strip().startswith("[") and "," in line and len(line.strip()) > 20]
    assert len(rows) == 760
    assert loads_connection_set(text) == spiga_connection_set()


def test_empty_connection_set():
    g = make_group([4])
    s = ConnectionSet(g, frozenset())
    assert loads_connection_set(dumps_connection_set(s)) == s


@pytest.mark.parametrize(
    "text",
    ["", "{}", '{"moduli": [3], "set": [[3]]}', '{"moduli": [3], "set": [[1, 1]]}', '{"moduli": "x", "set": []}'],
)
def test_connection_set_parse_errors(text):
    with pytest.raises(ValueError):
        loads_connection_set(text)


def test_edge_list_round_trip():
    g = make_group([5])
    x = build_digraph(g, ConnectionSet.from_ints(g, [1, 2]))
    text = dumps_edge_list(x)
    assert text.splitlines()[0] == "0 1"
    assert np.array_equal(loads_edge_list(text, n=5).adjacency_matrix(), x.adjacency_matrix())
    with pytest.raises(FormatError):
        loads_edge_list("0 1 2\n")


@given(st.integers(0, 70), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_graph6_matches_networkx(n, seed):
    a = random_graph(np.random.default_rng(seed), n, 0.3)
    s = encode_graph6(a)
    assert s == nx.to_graph6_bytes(nx.from_numpy_array(a.astype(int)), header=False).decode().strip()
    assert np.array_equal(decode_graph6(s).adjacency_matrix(), a)


def test_graph6_drops_loops_and_rejects_directed():
    a = np.eye(3, dtype=bool)
    a[0, 1] = a[1, 0] = True
    assert np.array_equal(decode_graph6(encode_graph6(a)).adjacency_matrix(), a & ~np.eye(3, dtype=bool))
    with pytest.raises(ValueError):
        encode_graph6(np.array([[0, 1], [0, 0]], dtype=bool))
    with pytest.raises(FormatError):
        decode_graph6("D?")


def test_graph6_large_size_prefix():
    a = np.zeros((300, 300), dtype=bool)
    a[0, 299] = a[299, 0] = True
    s = encode_graph6(a)
    assert s.startswith("~")
    assert np.array_equal(decode_graph6(s).adjacency_matrix(), a)


def test_report_round_trip():
    text = dumps_report("demo", [{"b": 1, "a": (1, 2)}, {"x": None}])
    kind, records = loads_report(text)
    assert kind == "demo" and records == [{"a": [1, 2], "b": 1}, {"x": None}]
    assert text.splitlines()[1] == '{"a": [1, 2], "b": 1}'
    with pytest.raises(FormatError):
        loads_report('{"kind": "x"}\n')


def test_permutation_lists():
    text = dumps_permutations([(1, 0, 2), (0, 1, 2)])
    assert text == "1 0 2\n0 1 2\n"
    assert loads_permutations(text) == [(1, 0, 2), (0, 1, 2)]
    with pytest.raises(FormatError):
        loads_permutations("0 0\n")
