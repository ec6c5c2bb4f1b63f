"""File formats: connection sets, edge lists, graph6, JSON-lines reports, permutations."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .cayley import Digraph, as_adjacency
from .groups import ConnectionSet, make_group

REPORT_SCHEMA = "cayleyci-report/1"


class FormatError(ValueError):
    pass


# -- connection sets -----------------------------------------------------------


def dumps_connection_set(s: ConnectionSet) -> str:
    lines = [
        "{",
        f'  "moduli": {json.dumps(list(s.group.moduli))},',
        '  "set": [',
    ]
    rows = [json.dumps(list(c)) for c in s.sorted_coords()]
    lines += [f"    {r}," for r in rows[:-1]] + ([f"    {rows[-1]}"] if rows else [])
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def loads_connection_set(text: str) -> ConnectionSet:
    try:
        doc = json.loads(text)
        moduli = [int(m) for m in doc["moduli"]]
        coords = [tuple(int(v) for v in row) for row in doc["set"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"not a connection-set document: {exc}") from exc
    group = make_group(moduli)
    for c in coords:
        if len(c) != group.rank or any(not 0 <= v < m for v, m in zip(c, moduli)):
            raise FormatError(f"element {list(c)} is not a reduced element of Z{moduli}")
    return ConnectionSet.from_coords(group, coords)


def write_connection_set(s: ConnectionSet, path) -> None:
    Path(path).write_text(dumps_connection_set(s), encoding="utf-8")


def read_connection_set(path) -> ConnectionSet:
    return loads_connection_set(Path(path).read_text(encoding="utf-8"))


# -- edge lists ----------------------------------------------------------------


def dumps_edge_list(x) -> str:
    if hasattr(x, "edges"):
        edges = x.edges()
    else:
        edges = Digraph(as_adjacency(x)).edges()
    return "".join(f"{u} {v}\n" for u, v in edges)


def loads_edge_list(text: str, n: int | None = None, undirected: bool = False) -> Digraph:
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'u v'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    if any(min(e) < 0 or max(e) >= n for e in edges):
        raise FormatError("vertex index out of range")
    return Digraph.from_edges(n, edges, undirected=undirected)


# -- graph6 --------------------------------------------------------------------


def _size_prefix(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n < 258048:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])


def encode_graph6(x) -> str:
    """graph6 string of an undirected graph; loops are dropped."""
    adj = as_adjacency(x)
    if not np.array_equal(adj, adj.T):
        raise ValueError("graph6 encodes undirected graphs only")
    n = adj.shape[0]
    iu = np.triu_indices(n, k=1)
    order = np.lexsort((iu[0], iu[1]))  # column-major over the upper triangle
    bits = adj[iu[0][order], iu[1][order]].astype(np.uint8)
    pad = (-len(bits)) % 6
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    values = bits.reshape(-1, 6) @ (1 << np.arange(5, -1, -1)) if len(bits) else np.zeros(0, dtype=np.int64)
    return (_size_prefix(n) + bytes(int(v) + 63 for v in values)).decode("ascii")


def decode_graph6(text: str) -> Digraph:
    data = text.strip().encode("ascii")
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if not data or any(c < 63 or c > 126 for c in data):
        raise FormatError("invalid graph6 characters")
    if data[0] != 126:
        n, body = data[0] - 63, data[1:]
    elif len(data) > 1 and data[1] != 126:
        if len(data) < 4:
            raise FormatError("truncated graph6 size")
        n = sum((c - 63) << s for c, s in zip(data[1:4], (12, 6, 0)))
        body = data[4:]
    else:
        if len(data) < 8:
            raise FormatError("truncated graph6 size")
        n = sum((c - 63) << s for c, s in zip(data[2:8], (30, 24, 18, 12, 6, 0)))
        body = data[8:]
    m = n * (n - 1) // 2
    if len(body) != (m + 5) // 6:
        raise FormatError(f"graph6 body has {len(body)} bytes, expected {(m + 5) // 6}")
    vals = np.frombuffer(body, dtype=np.uint8).astype(np.int64) - 63
    bits = ((vals[:, None] >> np.arange(5, -1, -1)) & 1).ravel()[:m].astype(bool)
    adj = np.zeros((n, n), dtype=bool)
    iu = np.triu_indices(n, k=1)
    order = np.lexsort((iu[0], iu[1]))
    adj[iu[0][order], iu[1][order]] = bits
    adj |= adj.T
    return Digraph(adj, undirected=True)


# -- reports and permutations -----------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps_report(kind: str, records: Iterable[dict]) -> str:
    """JSON lines: a header record, then one record per line, keys sorted."""
    lines = [json.dumps({"schema": REPORT_SCHEMA, "kind": kind}, sort_keys=True)]
    lines += [json.dumps(_jsonable(r), sort_keys=True) for r in records]
    return "\n".join(lines) + "\n"


def loads_report(text: str) -> tuple[str, list[dict]]:
    lines = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not lines or lines[0].get("schema") != REPORT_SCHEMA:
        raise FormatError("missing or unknown report schema header")
    return lines[0]["kind"], lines[1:]


def dumps_permutations(perms: Iterable[Sequence[int]]) -> str:
    return "".join(" ".join(str(int(v)) for v in p) + "\n" for p in perms)


def loads_permutations(text: str) -> list[tuple[int, ...]]:
    out = []
    for line in text.splitlines():
        if line.strip():
            p = tuple(int(v) for v in line.split())
            if sorted(p) != list(range(len(p))):
                raise FormatError(f"not a permutation: {line.strip()}")
            out.append(p)
    return out
