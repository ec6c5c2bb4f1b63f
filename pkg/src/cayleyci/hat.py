"""Undirected Cayley graphs from directed ones: the G x Z_n x Z_n construction.

Given Cay(G; S) with S != -S and n >= 3, the group is G x A x B with
A = B = Z_n appended as the last two coordinates, b = (0,...,0 | 0 | 1),
and the undirected connection set is the symmetric closure of

    G  u  S+b  u  A  u  A+b.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .cayley import CayleyDigraph, build_digraph, ensure_identity, reverse
from .groups import (
    ConnectionSet,
    FiniteAbelianGroup,
    GroupAutomorphism,
    InfeasibleError,
    enumerate_automorphisms,
    make_group,
    subset_inverse,
    symmetric_closure,
)
from .isocanon import are_isomorphic
from .perm import Permutation

DEFAULT_ISO_VERTEX_CAP = 2000


def k_of(n: int) -> int:
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    return 3 if n == 3 else 2


def complement_trick(group: FiniteAbelianGroup, s: ConnectionSet) -> ConnectionSet:
    """(G minus S) together with the identity."""
    if s.group != group:
        raise ValueError("connection set is not a subset of the group")
    return s.with_indices((set(range(group.order)) - s.indices) | {0})


@dataclass(frozen=True, eq=False)
class HatConstruction:
    base_group: FiniteAbelianGroup
    base_set: ConnectionSet
    n: int
    hat_group: FiniteAbelianGroup
    hat_set: ConnectionSet
    hat_graph: CayleyDigraph

    @property
    def k(self) -> int:
        return k_of(self.n)

    @property
    def a_group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup((self.n,))

    @property
    def b_group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup((self.n,))

    @property
    def b_index(self) -> int:
        return 1

    @property
    def base_digraph(self) -> CayleyDigraph:
        return build_digraph(self.base_group, self.base_set)

    def vertex(self, g: int, a: int, v: int) -> int:
        """Index in the big group of (g, a, b^v)."""
        n = self.n
        return g * n * n + (a % n) * n + (v % n)

    def split(self, x: int) -> tuple[int, int, int]:
        n = self.n
        return x // (n * n), (x // n) % n, x % n

    @cached_property
    def symmetric_set(self) -> ConnectionSet:
        return self.hat_graph.connection_set

    @property
    def degree(self) -> int:
        """Valency of the hat graph, loops not counted."""
        return len(self.symmetric_set) - int(self.symmetric_set.contains_identity)

    def metadata(self) -> dict:
        return {
            "base_moduli": list(self.base_group.moduli),
            "a_moduli": [self.n],
            "b_moduli": [self.n],
            "hat_moduli": list(self.hat_group.moduli),
            "n": self.n,
            "k": self.k,
            "b_index": self.b_index,
            "base_set_size": len(self.base_set),
            "hat_set_size": len(self.hat_set),
            "symmetric_set_size": len(self.symmetric_set),
            "vertices": self.hat_group.order,
            "degree": self.degree,
        }


def hat_set_indices(group: FiniteAbelianGroup, s: ConnectionSet, n: int) -> np.ndarray:
    """Indices of G u S+b u A u A+b inside G x Z_n x Z_n, sorted."""
    nn = n * n
    g_part = np.arange(group.order, dtype=np.int64) * nn
    sb_part = np.asarray(s.sorted_indices(), dtype=np.int64) * nn + 1
    a_part = np.arange(n, dtype=np.int64) * n
    ab_part = a_part + 1
    return np.unique(np.concatenate([g_part, sb_part, a_part, ab_part]))


def build_hat(group: FiniteAbelianGroup, s: ConnectionSet, n: int, cap: int = 10**6) -> HatConstruction:
    k_of(n)
    if s.group != group:
        raise ValueError("connection set is not a subset of the group")
    if s.is_symmetric:
        raise ValueError(
            "S is closed under inverses, so Cay(G; S) is already undirected and the "
            "construction degenerates; supply an asymmetric connection set"
        )
    s = ensure_identity(s)
    hat_group = make_group(group.moduli + (n, n), cap=cap)
    hat_set = ConnectionSet(hat_group, frozenset(hat_set_indices(group, s, n).tolist()))
    graph = CayleyDigraph(hat_group, symmetric_closure(hat_set), undirected=True)
    return HatConstruction(group, s, n, hat_group, hat_set, graph)


def lift_automorphism(pi, a: int, b_elt: int, hat: HatConstruction, check: bool = True):
    """The permutation (g, u, v) -> (pi(g), u + a, v + b_elt) of the hat graph's vertices."""
    pi = Permutation(pi)
    if len(pi) != hat.base_group.order:
        raise ValueError("pi must permute the vertices of the base digraph")
    if check and not hat.base_digraph.is_automorphism(pi):
        raise ValueError("pi is not an automorphism of the base digraph")
    n = hat.n
    g = np.arange(hat.base_group.order)
    u = np.arange(n)
    g_img = np.asarray(pi)[g][:, None, None] * (n * n)
    images = g_img + (((u + a) % n) * n)[None, :, None] + ((u + b_elt) % n)[None, None, :]
    return Permutation._trusted(int(x) for x in images.ravel())


# -- hypotheses ----------------------------------------------------------


class Verdict(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Hypothesis:
    id: str
    statement: str
    verdict: Verdict
    witness: object = None


@dataclass(frozen=True)
class HypothesisReport:
    group_moduli: tuple[int, ...]
    n: int
    k: int
    records: tuple[Hypothesis, ...]
    complemented: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(r.verdict is Verdict.TRUE for r in self.records)

    @property
    def failures(self) -> list[str]:
        return [r.id for r in self.records if r.verdict is not Verdict.TRUE]

    def get(self, hid: str) -> Hypothesis:
        return next(r for r in self.records if r.id == hid)

    def to_records(self) -> list[dict]:
        return [
            {"id": r.id, "statement": r.statement, "verdict": r.verdict.value, "witness": r.witness}
            for r in self.records
        ]


def _v(flag: bool) -> Verdict:
    return Verdict.TRUE if flag else Verdict.FALSE


def _inverse_map_witness(group: FiniteAbelianGroup, s: ConnectionSet, iso_cap: int) -> tuple[Verdict, object]:
    """Either an automorphism with alpha(S) = -S, or X not isomorphic to its reverse."""
    inv = subset_inverse(s)
    neg = GroupAutomorphism.negation(group)
    if neg(s) == inv:
        return Verdict.TRUE, {"disjunct": "automorphism", "alpha": "inversion g -> -g"}
    try:
        for alpha in enumerate_automorphisms(group):
            if alpha(s) == inv:
                return Verdict.TRUE, {"disjunct": "automorphism", "alpha_table": list(alpha.table)}
    except InfeasibleError:
        pass
    if group.order > iso_cap:
        return Verdict.INFEASIBLE, {"disjunct": "non-isomorphic to reverse", "reason": f"{group.order} vertices > cap {iso_cap}"}
    x = build_digraph(group, s)
    iso = are_isomorphic(x, reverse(x), cap=iso_cap)
    if iso is None:
        return Verdict.TRUE, {"disjunct": "non-isomorphic to reverse"}
    return Verdict.FALSE, {"isomorphism_to_reverse": list(iso)}


def check_hypotheses(
    group: FiniteAbelianGroup,
    s: ConnectionSet,
    n: int,
    iso_cap: int = DEFAULT_ISO_VERTEX_CAP,
) -> HypothesisReport:
    """Evaluate each requirement of the main construction for (G, S, n).

    The premise that Cay(G; S) is non-DCI is not decided here; see
    ``citest`` for small groups.
    """
    order = group.order
    s1 = ensure_identity(s)
    k = k_of(n) if n >= 3 else None
    records = [Hypothesis("h1", "n >= 3", _v(n >= 3), {"n": n})]
    if k is None:
        return HypothesisReport(group.moduli, n, 0, tuple(records), notes=("n < 3: k undefined",))
    records.append(Hypothesis("h2", "n*k != |G|", _v(n * k != order), {"nk": n * k, "order": order}))
    h3 = n > 3 or 3 * len(s1) <= order
    records.append(
        Hypothesis(
            "h3",
            "n > 3 or |S u {1}| <= |G|/3",
            _v(h3),
            {"size_with_identity": len(s1), "bound": order / 3, "n": n},
        )
    )
    verdict, witness = _inverse_map_witness(group, s, iso_cap)
    records.append(Hypothesis("h4", "X not iso to X^- or some automorphism maps S to S^-1", verdict, witness))
    records.append(Hypothesis("h5", "S != S^-1", _v(not s.is_symmetric), {"size": len(s)}))
    work = s1
    complemented = False
    if 2 * len(work) > order + 1:
        work = complement_trick(group, work)
        complemented = True
    records.append(
        Hypothesis(
            "bound",
            "|S| <= (|G|+1)/k after optional complementation",
            _v(k * len(work) <= order + 1),
            {"size": len(work), "bound": (order + 1) / k, "complemented": complemented},
        )
    )
    return HypothesisReport(group.moduli, n, k, tuple(records), complemented)


# -- explicit witnesses ----------------------------------------------------

SPIGA_MODULI = (3,) * 8


def _vec(w: tuple[int, int, int], v: tuple[int, int, int, int, int]) -> tuple[int, ...]:
    return tuple(x % 3 for x in w + v)


def spiga_pieces() -> dict[tuple[int, int, int], ConnectionSet]:
    """The eleven pieces S_{i,j,k} of Spiga's connection set in (Z_3)^8.

    Basis: w1, w2, w3 are coordinates 0-2 and v1..v5 coordinates 3-7.
    The key (i, j, k) is the projection onto span(w1, w2, w3).
    """
    group = FiniteAbelianGroup(SPIGA_MODULI)
    r3 = range(3)
    pieces: dict[tuple[int, int, int], list[tuple[int, ...]]] = {
        (0, 0, 0): [
            _vec((0, 0, 0), (1, 0, 0, 0, 0)),
            _vec((0, 0, 0), (0, 0, 1, 0, 0)),
            _vec((0, 0, 0), (0, 0, 0, 1, 0)),
            _vec((0, 0, 0), (0, 0, 0, 0, 1)),
        ],
        (1, 0, 0): [_vec((1, 0, 0), (a, b, 0, 0, c)) for a, b, c in itertools.product(r3, r3, r3)],
    }
    four = list(itertools.product(r3, r3, r3, r3))
    pieces[(0, 1, 0)] = [_vec((0, 1, 0), (a, 0, b, c, d)) for a, b, c, d in four]
    pieces[(0, 0, 1)] = [_vec((0, 0, 1), (0, a, b, c, d)) for a, b, c, d in four]
    pieces[(1, 1, 0)] = [_vec((1, 1, 0), (a, b, c, b, d)) for a, b, c, d in four]
    pieces[(1, 0, 1)] = [_vec((1, 0, 1), (a, b, a, c, d)) for a, b, c, d in four]
    pieces[(0, 1, 1)] = [_vec((0, 1, 1), (a, b, c, d, -(a + b))) for a, b, c, d in four]
    pieces[(1, 1, 1)] = [_vec((1, 1, 1), (a, b, c, d, -a - b + c + d)) for a, b, c, d in four]
    pieces[(2, 1, 1)] = [_vec((2, 1, 1), (a, b, c, d, -(a + b + c + d))) for a, b, c, d in four]
    pieces[(1, 2, 1)] = [_vec((1, 2, 1), (a, b, c, d, a + b - c + d)) for a, b, c, d in four]
    pieces[(1, 1, 2)] = [_vec((1, 1, 2), (a, b, c, d, a + b + c - d)) for a, b, c, d in four]
    return {key: ConnectionSet.from_coords(group, coords) for key, coords in pieces.items()}


def spiga_connection_set() -> ConnectionSet:
    pieces = spiga_pieces()
    group = next(iter(pieces.values())).group
    union: set[int] = set()
    for piece in pieces.values():
        if union & piece.indices:
            raise AssertionError("Spiga pieces overlap")
        union |= piece.indices
    return ConnectionSet(group, frozenset(union))


def embed_group(s: ConnectionSet, extra: int = 1) -> ConnectionSet:
    """Pad every element with ``extra`` zero coordinates."""
    moduli = s.group.moduli
    if len(set(moduli)) > 1:
        raise ValueError("embedding needs all cyclic factors of the same order")
    if not moduli:
        raise ValueError("cannot embed the trivial group")
    big = FiniteAbelianGroup(moduli + (moduli[0],) * extra)
    return ConnectionSet.from_coords(big, (c + (0,) * extra for c in s.sorted_coords()))


@dataclass(frozen=True)
class WitnessResult:
    mode: str
    p: int
    r: int
    hat: HatConstruction | None
    report: HypothesisReport | None
    tricks: tuple[str, ...]
    rejection: str | None = None

    @property
    def ok(self) -> bool:
        return self.hat is not None and self.report is not None and self.report.passed


def build_non_ci_witness(
    p: int,
    r: int,
    s: ConnectionSet,
    mode: str = "r+2",
    iso_cap: int = DEFAULT_ISO_VERTEX_CAP,
    cap: int = 10**6,
) -> WitnessResult:
    """Assemble the graph that makes (Z_p)^{r+2} (or ^{r+3}) non-CI from a non-DCI S."""
    if mode not in ("r+2", "r+3"):
        raise ValueError(f"mode must be 'r+2' or 'r+3', got {mode!r}")
    if s.group.moduli != (p,) * r:
        raise ValueError(f"S must live in (Z_{p})^{r}, got moduli {list(s.group.moduli)}")
    if p == 2:
        return WitnessResult(mode, p, r, None, None, (), "p = 2: every connection set of (Z_2)^r is symmetric")
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        return WitnessResult(mode, p, r, None, None, (), f"p = {p} is not prime")
    tricks: list[str] = []
    if mode == "r+3":
        s = embed_group(s)
        r += 1
        tricks.append("embed")
        if p == 3 and len(ensure_identity(s)) * 3 > p ** (r):
            return WitnessResult(mode, p, r, None, None, tuple(tricks), f"|S u {{1}}| > p^{r - 1}")
    elif p == 3 and not len(s) < p ** (r - 1):
        return WitnessResult(mode, p, r, None, None, (), f"p = 3 and |S| = {len(s)} >= p^(r-1) = {p ** (r - 1)}")
    group = s.group
    work = ensure_identity(s)
    if 2 * len(work) > group.order + 1:
        work = complement_trick(group, work)
        tricks.append("complement")
    report = check_hypotheses(group, work, p, iso_cap=iso_cap)
    if report.get("h4").witness and report.get("h4").witness.get("alpha") == "inversion g -> -g":
        tricks.append("inversion")
    if not report.passed:
        return WitnessResult(mode, p, r, None, report, tuple(tricks), "hypotheses failed: " + ", ".join(report.failures))
    return WitnessResult(mode, p, r, build_hat(group, work, p, cap=cap), report, tuple(tricks))
