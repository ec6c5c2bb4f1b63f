"""Computational checks of the structural facts behind the hat construction.

* every maximal clique of the hat graph is a G-coset, an A-pair (A x u A b x)
  or AB-coset, or a subset of G x u G b x (G B x when n = 3) holding no
  full G-coset;
* vertices with identical out-neighbourhoods force S to be a subgroup;
* identity-fixing automorphisms preserving the G- and AB-coset systems
  restrict to an automorphism of X or an isomorphism X -> X^-;
* for small hats, every identity-fixing automorphism preserves both
  coset systems.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .cayley import CayleyDigraph, build_digraph, ensure_identity, is_isomorphism, reverse
from .cliques import maximal_cliques
from .groups import ConnectionSet, FiniteAbelianGroup, GroupElement, InfeasibleError, is_subgroup
from .hat import HatConstruction, k_of, lift_automorphism
from .isocanon import DEFAULT_VERTEX_CAP, automorphism_group
from .perm import Permutation, PermutationGroup


class CliqueKind(str, enum.Enum):
    A_COSET_G = "A_COSET_G"
    B_PAIR = "B_PAIR"
    B3_ABCOSET = "B3_ABCOSET"
    C_SUBSET = "C_SUBSET"
    C3_SUBSET = "C3_SUBSET"
    UNCLASSIFIED = "UNCLASSIFIED"


@dataclass(frozen=True)
class CliqueClassification:
    clique: tuple[int, ...]
    kind: CliqueKind
    witness_x: GroupElement | None


def _is_clique_in_cayley(graph: CayleyDigraph, vertices: np.ndarray) -> bool:
    conn = np.zeros(graph.n, dtype=bool)
    conn[graph.connection_set.sorted_indices()] = True
    conn[0] = True
    diffs = graph.group.sub_indices(vertices[:, None], vertices[None, :])
    return bool(conn[diffs].all())


def classify_clique(clique, hat: HatConstruction, check: bool = True) -> CliqueClassification:
    verts = np.asarray(sorted(set(int(v) for v in clique)), dtype=np.int64)
    if check and not _is_clique_in_cayley(hat.hat_graph, verts):
        raise ValueError("the given vertex set is not a clique of the hat graph")
    n = hat.n
    order_g = hat.base_group.order
    g = verts // (n * n)
    a = (verts // n) % n
    v = verts % n
    key = tuple(verts.tolist())

    def witness(gi: int, ai: int, vi: int) -> GroupElement:
        return hat.hat_group.element(hat.vertex(gi, ai, vi))

    # a coset G x: one (a, v) pair, all of G
    if len(set(zip(a.tolist(), v.tolist()))) == 1 and len(verts) == order_g:
        return CliqueClassification(key, CliqueKind.A_COSET_G, witness(0, int(a[0]), int(v[0])))
    if len(set(g.tolist())) == 1:
        g0 = int(g[0])
        vs = set(v.tolist())
        if n == 3 and len(verts) == 9:
            return CliqueClassification(key, CliqueKind.B3_ABCOSET, witness(g0, 0, 0))
        if n > 3 and len(verts) == 2 * n and len(vs) == 2:
            for v0 in vs:
                if (v0 + 1) % n in vs:
                    return CliqueClassification(key, CliqueKind.B_PAIR, witness(g0, 0, v0))
    full_coset = any(c == order_g for c in Counter(zip(a.tolist(), v.tolist())).values())
    if len(set(a.tolist())) == 1 and not full_coset:
        a0 = int(a[0])
        vs = sorted(set(v.tolist()))
        if n == 3:
            return CliqueClassification(key, CliqueKind.C3_SUBSET, witness(0, a0, 0))
        if len(vs) == 1:
            return CliqueClassification(key, CliqueKind.C_SUBSET, witness(0, a0, vs[0]))
        if len(vs) == 2:
            for v0 in vs:
                if (v0 + 1) % n in vs:
                    return CliqueClassification(key, CliqueKind.C_SUBSET, witness(0, a0, v0))
    return CliqueClassification(key, CliqueKind.UNCLASSIFIED, None)


def g_cosets(hat: HatConstruction) -> list[list[int]]:
    n = hat.n
    return [
        [hat.vertex(g, a, v) for g in range(hat.base_group.order)]
        for a in range(n)
        for v in range(n)
    ]


def ab_cosets(hat: HatConstruction) -> list[list[int]]:
    n = hat.n
    return [sorted(hat.vertex(g, a, v) for a in range(n) for v in range(n)) for g in range(hat.base_group.order)]


def type_b_sets(hat: HatConstruction) -> list[list[int]]:
    """A x u A b x for every x (n > 3) or the AB-cosets (n = 3)."""
    n = hat.n
    if n == 3:
        return ab_cosets(hat)
    return [
        sorted(hat.vertex(g, a, v) for a in range(n) for v in (v0, v0 + 1))
        for g in range(hat.base_group.order)
        for v0 in range(n)
    ]


@dataclass
class CliqueLemmaReport:
    mode: str
    vertices: int
    census: dict[str, int] = field(default_factory=dict)
    examples: dict[str, list[int]] = field(default_factory=dict)
    unclassified: list[list[int]] = field(default_factory=list)
    type_a_checked: int = 0
    type_a_maximal: int = 0
    type_b_checked: int = 0
    type_b_maximal: int = 0
    size_checks: dict[str, bool] = field(default_factory=dict)
    degree: int | None = None
    degree_direct: int | None = None

    @property
    def passed(self) -> bool:
        ok = (
            not self.unclassified
            and self.type_a_checked > 0
            and self.type_b_checked > 0
            and self.type_a_checked == self.type_a_maximal
            and self.type_b_checked == self.type_b_maximal
            and all(self.size_checks.values())
        )
        if self.degree_direct is not None:
            ok = ok and self.degree == self.degree_direct
        return ok


def extension_counts(graph: CayleyDigraph, clique) -> np.ndarray:
    """For every vertex, the number of clique members adjacent to it (loops excluded).

    Computed as a cyclic convolution over the group, so the scan over all
    candidate extensions costs one FFT instead of |V| * |C| lookups.
    """
    shape = graph.group.moduli
    ind_c = np.zeros(graph.n)
    ind_c[np.asarray(list(clique), dtype=np.int64)] = 1.0
    kernel = np.zeros(graph.n)
    kernel[graph.connection_set.sorted_indices()] = 1.0
    kernel[0] = 0.0
    conv = np.fft.ifftn(np.fft.fftn(ind_c.reshape(shape)) * np.fft.fftn(kernel.reshape(shape))).real.ravel()
    counts = np.rint(conv)
    if np.abs(conv - counts).max() > 0.25:
        raise ArithmeticError("FFT rounding error too large for an exact count")
    return counts.astype(np.int64)


def extension_counts_direct(graph: CayleyDigraph, clique) -> np.ndarray:
    conn = np.zeros(graph.n, dtype=bool)
    conn[graph.connection_set.sorted_indices()] = True
    conn[0] = False
    c = np.asarray(list(clique), dtype=np.int64)
    counts = np.zeros(graph.n, dtype=np.int64)
    verts = np.arange(graph.n)
    for chunk in np.array_split(c, max(1, len(c) // 256)):
        counts += conn[graph.group.sub_indices(verts[:, None], chunk[None, :])].sum(axis=1)
    return counts


def clique_status(graph: CayleyDigraph, clique, direct: bool = False) -> tuple[bool, bool]:
    """(is a clique, is maximal) by scanning every vertex as a candidate extension."""
    members = np.asarray(sorted(set(int(v) for v in clique)), dtype=np.int64)
    counts = extension_counts_direct(graph, members) if direct else extension_counts(graph, members)
    size = len(members)
    inside = np.zeros(graph.n, dtype=bool)
    inside[members] = True
    is_clq = bool((counts[members] == size - 1).all())
    maximal = is_clq and not bool((counts[~inside] == size).any())
    return is_clq, maximal


def direct_degree(hat: HatConstruction) -> int:
    """Valency of the hat graph from the membership rules of G u S+b u A u A+b."""
    grp = hat.hat_group
    coords = grp.coord_table
    d = hat.base_group.rank
    base_in_s = np.zeros(hat.base_group.order, dtype=bool)
    base_in_s[hat.base_set.sorted_indices()] = True
    strides = np.asarray(hat.base_group.strides, dtype=np.int64)

    def in_hat_set(c: np.ndarray) -> np.ndarray:
        gpart, apart, vpart = c[:, :d], c[:, d], c[:, d + 1]
        g_zero = ~gpart.any(axis=1)
        g_idx = gpart @ strides if d else np.zeros(len(c), dtype=np.int64)
        return (
            ((apart == 0) & (vpart == 0))
            | ((apart == 0) & (vpart == 1) & base_in_s[g_idx])
            | (g_zero & (vpart == 0))
            | (g_zero & (vpart == 1))
        )

    neg = (-coords) % np.asarray(grp.moduli)
    adjacent = in_hat_set(coords) | in_hat_set(neg)
    adjacent[0] = False
    return int(adjacent.sum())


def verify_clique_lemma(
    hat: HatConstruction,
    mode: str = "full",
    budget: int = 10**7,
    direct_scan: bool = False,
) -> CliqueLemmaReport:
    """Full mode enumerates every maximal clique; spot mode checks the identity's
    G-coset and its A-pair / AB-coset by the extension scan."""
    if mode not in ("full", "spot"):
        raise ValueError("mode must be 'full' or 'spot'")
    graph = hat.hat_graph
    report = CliqueLemmaReport(mode=mode, vertices=graph.n, degree=hat.degree)
    nk = hat.n * hat.k
    if mode == "spot":
        report.degree_direct = direct_degree(hat)
        g_coset = g_cosets(hat)[0]
        b_set = type_b_sets(hat)[0]
        for kind, members in ((CliqueKind.A_COSET_G, g_coset), (CliqueKind.B3_ABCOSET if hat.n == 3 else CliqueKind.B_PAIR, b_set)):
            is_clq, maximal = clique_status(graph, members, direct=direct_scan)
            report.examples[kind.value] = members[:12]
            if kind is CliqueKind.A_COSET_G:
                report.type_a_checked += 1
                report.type_a_maximal += int(maximal)
            else:
                report.type_b_checked += 1
                report.type_b_maximal += int(maximal)
            report.census[kind.value] = int(is_clq)
        report.size_checks = {"type_a_size_is_|G|": len(g_coset) == hat.base_group.order, "type_b_size_is_nk": len(b_set) == nk}
        return report

    cliques = maximal_cliques(graph, budget=budget)
    census: Counter[str] = Counter()
    for clique in cliques:
        c = classify_clique(clique, hat, check=False)
        census[c.kind.value] += 1
        report.examples.setdefault(c.kind.value, list(c.clique))
        if c.kind is CliqueKind.UNCLASSIFIED:
            report.unclassified.append(list(c.clique))
    report.census = dict(sorted(census.items()))
    maximal = {tuple(c) for c in cliques}
    a_sets = [tuple(sorted(c)) for c in g_cosets(hat)]
    b_sets = [tuple(c) for c in type_b_sets(hat)]
    report.type_a_checked = len(a_sets)
    report.type_a_maximal = sum(c in maximal for c in a_sets)
    report.type_b_checked = len(b_sets)
    report.type_b_maximal = sum(c in maximal for c in b_sets)
    report.size_checks = {
        "type_a_size_is_|G|": all(len(c) == hat.base_group.order for c in a_sets),
        "type_b_size_is_nk": all(len(c) == nk for c in b_sets),
    }
    return report


# -- same out-neighbourhoods -------------------------------------------------


def same_outneighbour_classes(x: CayleyDigraph) -> list[list[int]]:
    classes: dict[frozenset[int], list[int]] = {}
    for v in range(x.n):
        classes.setdefault(frozenset(x.out_neighbours(v)), []).append(v)
    return sorted(classes.values())


@dataclass
class OutneighbourReport:
    group_moduli: tuple[int, ...]
    sets_checked: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def _outneighbour_counterexample(group: FiniteAbelianGroup, s: ConnectionSet) -> dict | None:
    x = build_digraph(group, s)
    bound = max(len(s) - 1, 2)
    for d in same_outneighbour_classes(x):
        if len(d) >= bound and not is_subgroup(s):
            return {"set": s.sorted_coords(), "class": d}
    return None


def verify_outneighbour_lemma(
    group: FiniteAbelianGroup,
    s: ConnectionSet | None = None,
    exhaustive_cap: int = 12,
) -> OutneighbourReport:
    """Check the lemma for S, or for every subset of G when S is None.

    Every S is first given the identity (the loop-at-every-vertex
    convention); without it a coset such as {1, 3} in Z_4 has two vertices
    with equal out-neighbourhoods but is not a subgroup.
    """
    report = OutneighbourReport(group.moduli)
    if s is not None:
        subsets = [s]
    else:
        if group.order > exhaustive_cap:
            raise InfeasibleError(f"exhaustive scan limited to |G| <= {exhaustive_cap}")
        subsets = [
            ConnectionSet(group, frozenset(i for i in range(group.order) if mask >> i & 1))
            for mask in range(1 << group.order)
        ]
    for sub in subsets:
        report.sets_checked += 1
        bad = _outneighbour_counterexample(group, ensure_identity(sub))
        if bad is not None:
            report.counterexamples.append(bad)
    return report


# -- restriction of identity-fixing automorphisms ----------------------------------


@dataclass(frozen=True)
class RestrictionVerdict:
    phi: Permutation
    fixes_identity: bool
    preserves_G_cosets: bool
    preserves_AB_cosets: bool
    restriction: Permutation | None
    orientation: int | None

    @property
    def resolved(self) -> bool:
        return self.orientation in (1, -1)


def _preserves_system(phi: np.ndarray, blocks: list[list[int]], block_of: np.ndarray) -> bool:
    for block in blocks:
        if len(set(block_of[phi[block]].tolist())) != 1:
            return False
    return True


def restrict_automorphism(phi, hat: HatConstruction, check_automorphism: bool = True) -> RestrictionVerdict:
    phi = Permutation(phi)
    if len(phi) != hat.hat_group.order:
        raise ValueError("phi must permute the vertices of the hat graph")
    if check_automorphism and not hat.hat_graph.is_automorphism(phi):
        raise ValueError("phi is not an automorphism of the hat graph")
    if phi[0] != 0:
        raise ValueError("phi does not fix the identity vertex")
    n = hat.n
    arr = np.asarray(phi, dtype=np.int64)
    verts = np.arange(hat.hat_group.order)
    g_block = verts % (n * n)  # cosets of G share (a, v)
    ab_block = verts // (n * n)  # cosets of AB share g
    keeps_g = _preserves_system(arr, g_cosets(hat), g_block)
    keeps_ab = _preserves_system(arr, ab_cosets(hat), ab_block)
    if not (keeps_g and keeps_ab):
        return RestrictionVerdict(phi, True, keeps_g, keeps_ab, None, None)
    base = np.arange(hat.base_group.order) * n * n
    images = arr[base]
    if (images % (n * n)).any():
        return RestrictionVerdict(phi, True, keeps_g, keeps_ab, None, None)
    rho = Permutation(images // (n * n))
    x = hat.base_digraph
    if x.is_automorphism(rho):
        orientation = 1
    elif is_isomorphism(x, reverse(x), rho):
        orientation = -1
    else:
        orientation = None
    return RestrictionVerdict(phi, True, keeps_g, keeps_ab, rho, orientation)


@dataclass
class PhiLemmaReport:
    vertices: int
    hypotheses: dict[str, bool]
    aut_order: int = 0
    stabilizer_order: int = 0
    checked: int = 0
    orientation_counts: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    lifts_checked: int = 0
    lift_failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.hypotheses.values()) and self.checked > 0 and not self.failures and not self.lift_failures


def phi_lemma_hypotheses(hat: HatConstruction) -> dict[str, bool]:
    order = hat.base_group.order
    k = k_of(hat.n)
    return {
        "nk != |G|": hat.n * k != order,
        "|S| <= (|G|+1)/k": k * len(hat.base_set) <= order + 1,
        "S != S^-1": not hat.base_set.is_symmetric,
    }


def verify_phi_lemma(
    hat: HatConstruction,
    cap: int = DEFAULT_VERTEX_CAP,
    element_cap: int = 10**6,
    check_lifts: bool = True,
) -> PhiLemmaReport:
    """Every automorphism of the hat graph fixing the identity preserves both
    coset systems and restricts to X -> X or X -> X^-.

    Also checks that Aut(X) x A_R x B_R lifts into Aut of the hat graph.
    """
    graph = hat.hat_graph
    report = PhiLemmaReport(graph.n, phi_lemma_hypotheses(hat))
    if graph.n > cap:
        raise InfeasibleError(f"hat graph has {graph.n} vertices, automorphism cap is {cap}")
    aut = automorphism_group(graph, cap=cap)
    report.aut_order = aut.order
    stab = aut.stabilizer(0)
    report.stabilizer_order = stab.order
    if stab.order > element_cap:
        raise InfeasibleError(f"stabilizer of order {stab.order} exceeds element cap {element_cap}")
    counts: Counter[str] = Counter()
    for phi in stab.elements():
        verdict = restrict_automorphism(phi, hat, check_automorphism=False)
        report.checked += 1
        if not (verdict.preserves_G_cosets and verdict.preserves_AB_cosets and verdict.resolved):
            report.failures.append(
                {
                    "phi": list(phi),
                    "preserves_G_cosets": verdict.preserves_G_cosets,
                    "preserves_AB_cosets": verdict.preserves_AB_cosets,
                    "orientation": verdict.orientation,
                }
            )
        else:
            counts["+1" if verdict.orientation == 1 else "-1"] += 1
    report.orientation_counts = dict(sorted(counts.items()))
    for g in stab.generators:
        if not graph.is_automorphism(g):
            report.failures.append({"phi": list(g), "reason": "stabilizer generator is not an automorphism"})
    if check_lifts:
        x_aut = automorphism_group(hat.base_digraph, cap=cap)
        adj = graph.adjacency_matrix()
        for pi in x_aut.elements():
            for a, b in itertools.product(range(hat.n), repeat=2):
                lifted = lift_automorphism(pi, a, b, hat, check=False)
                report.lifts_checked += 1
                if not is_isomorphism(adj, adj, lifted):
                    report.lift_failures.append({"pi": list(pi), "a": a, "b": b})
    return report


def stabilizer_of_identity(hat: HatConstruction, cap: int = DEFAULT_VERTEX_CAP) -> PermutationGroup:
    return automorphism_group(hat.hat_graph, cap=cap).stabilizer(0)
