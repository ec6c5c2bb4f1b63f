"""Two independent CI / DCI deciders for Cayley (di)graphs of small abelian groups.

The definitional route scans every connection set S' of the right shape and
asks whether an isomorphism Cay(G;S) -> Cay(G;S') forces a group
automorphism taking S to S'.  The Babai route looks at the regular
subgroups of Aut(Cay(G;S)) isomorphic to G and asks whether they are all
conjugate to the translation group.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .cayley import build_digraph, is_isomorphism
from .groups import (
    ConnectionSet,
    FiniteAbelianGroup,
    InfeasibleError,
    enumerate_automorphisms,
    make_group,
)
from .isocanon import DEFAULT_VERTEX_CAP, are_isomorphic, automorphism_group, canonical_form
from .perm import (
    DEFAULT_SUBGROUP_SEARCH_CAP,
    Permutation,
    PermutationGroup,
    are_conjugate_subgroups,
    conjugacy_class_of_subgroup,
    enumerate_regular_subgroups,
    is_regular_action,
    right_regular_representation,
    subgroup_elements,
)

DEFINITIONAL_ORDER_CAP = 16
GROUP_SCAN_ORDER_CAP = 12
AGREEMENT_GROUPS: tuple[tuple[int, ...], ...] = (
    (),
    (2,),
    (3,),
    (4,),
    (2, 2),
    (5,),
    (6,),
    (7,),
    (8,),
    (2, 4),
    (2, 2, 2),
)


@dataclass(frozen=True)
class CiVerdict:
    group_moduli: tuple[int, ...]
    set: tuple[tuple[int, ...], ...]
    directed: bool
    method: str
    is_ci: bool
    witness: dict | None = None

    def to_record(self) -> dict:
        return {
            "moduli": list(self.group_moduli),
            "set": [list(c) for c in self.set],
            "directed": self.directed,
            "method": self.method,
            "verdict": "CI" if self.is_ci else "non-CI",
            "witness": self.witness,
        }


def _mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def _indices(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


@lru_cache(maxsize=None)
def automorphism_tables(moduli: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    group = make_group(moduli)
    return tuple(sorted(a.table for a in enumerate_automorphisms(group)))


@lru_cache(maxsize=None)
def _automorphism_generators(moduli: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """A small generating set of Aut(G) acting on element indices."""
    order = make_group(moduli).order
    tables = automorphism_tables(moduli)
    if order < 2:
        return ()
    gens: list[Permutation] = []
    current = PermutationGroup([], degree=order)
    for t in tables:
        if current.order == len(tables):
            break
        p = Permutation(t)
        if not current.contains(p):
            gens.append(p)
            current = PermutationGroup(gens, degree=order)
    return tuple(tuple(g) for g in gens)


def _map_mask(table: tuple[int, ...], mask: int) -> int:
    out = 0
    for i in _indices(mask):
        out |= 1 << table[i]
    return out


def _inverse_mask(moduli: tuple[int, ...], mask: int) -> int:
    neg = make_group(moduli).negation_table
    return _map_mask(tuple(int(x) for x in neg), mask)


@lru_cache(maxsize=None)
def subset_orbits(moduli: tuple[int, ...], size: int, symmetric_only: bool) -> dict[int, int]:
    """Map each subset mask of the given size to its Aut(G)-orbit minimum.

    Orbits are connected components under a generating set of Aut(G).
    """
    order = make_group(moduli).order
    masks = [_mask(c) for c in itertools.combinations(range(order), size)]
    if symmetric_only:
        masks = [m for m in masks if _inverse_mask(moduli, m) == m]
    parent = {m: m for m in masks}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in _automorphism_generators(moduli):
        for m in masks:
            a, b = find(m), find(_map_mask(g, m))
            if a != b:
                parent[max(a, b)] = min(a, b)
    return {m: find(m) for m in masks}


@lru_cache(maxsize=None)
def _canonical_bytes(moduli: tuple[int, ...], mask: int, cap: int) -> bytes:
    group = make_group(moduli)
    x = build_digraph(group, ConnectionSet(group, frozenset(_indices(mask))))
    return canonical_form(x, cap=cap).adjacency_bytes


def _definitional(group: FiniteAbelianGroup, s: ConnectionSet, directed: bool, cap: int) -> CiVerdict:
    if s.group != group:
        raise ValueError("connection set is not a subset of the group")
    if group.order > DEFINITIONAL_ORDER_CAP:
        raise InfeasibleError(f"definitional scan limited to |G| <= {DEFINITIONAL_ORDER_CAP}, got {group.order}")
    if not directed and not s.is_symmetric:
        raise ValueError("undirected CI test needs a symmetric connection set")
    moduli = group.moduli
    orbits = subset_orbits(moduli, len(s), not directed)
    own = orbits[_mask(s.indices)]
    target = _canonical_bytes(moduli, own, cap)
    offending = None
    for m, rep in sorted(orbits.items(), key=lambda kv: _indices(kv[0])):
        if rep == own:
            continue
        if _canonical_bytes(moduli, rep, cap) == target:
            offending = m
            break
    method = "definitional"
    coords = tuple(s.sorted_coords())
    if offending is None:
        return CiVerdict(moduli, coords, directed, method, True)
    other = ConnectionSet(group, frozenset(_indices(offending)))
    iso = are_isomorphic(build_digraph(group, s), build_digraph(group, other), cap=cap)
    if iso is None:
        raise AssertionError("canonical forms agree but no isomorphism was recovered")
    witness = {"set": [list(c) for c in other.sorted_coords()], "isomorphism": list(iso)}
    return CiVerdict(moduli, coords, directed, method, False, witness)


def is_dci_digraph_definitional(group: FiniteAbelianGroup, s: ConnectionSet, cap: int = DEFAULT_VERTEX_CAP) -> CiVerdict:
    return _definitional(group, s, True, cap)


def is_ci_graph_definitional(group: FiniteAbelianGroup, s: ConnectionSet, cap: int = DEFAULT_VERTEX_CAP) -> CiVerdict:
    return _definitional(group, s, False, cap)


@dataclass(frozen=True)
class BabaiCensus:
    aut_order: int
    regular_subgroups: int
    conjugates_of_regular_rep: int
    non_conjugate: tuple[PermutationGroup, ...]


def babai_census(
    group: FiniteAbelianGroup,
    s: ConnectionSet,
    cap: int = DEFAULT_VERTEX_CAP,
    subgroup_cap: int = DEFAULT_SUBGROUP_SEARCH_CAP,
) -> BabaiCensus:
    x = build_digraph(group, s)
    aut = automorphism_group(x, cap=cap)
    if aut.order > subgroup_cap:
        raise InfeasibleError(
            f"|Aut| = {aut.order} exceeds the regular-subgroup search cap {subgroup_cap}; 0 regular subgroups examined"
        )
    regular = right_regular_representation(group)
    if not regular.is_subgroup_of(aut):
        raise AssertionError("translations are not automorphisms of the Cayley digraph")
    subgroups = enumerate_regular_subgroups(aut, group, cap=subgroup_cap)
    conjugates = conjugacy_class_of_subgroup(regular, aut)
    bad = tuple(m for m in subgroups if subgroup_elements(m) not in conjugates)
    return BabaiCensus(aut.order, len(subgroups), len(conjugates), bad)


def is_ci_via_babai(
    group: FiniteAbelianGroup,
    s: ConnectionSet,
    directed: bool,
    cap: int = DEFAULT_VERTEX_CAP,
    subgroup_cap: int = DEFAULT_SUBGROUP_SEARCH_CAP,
) -> CiVerdict:
    if s.group != group:
        raise ValueError("connection set is not a subset of the group")
    if not directed and not s.is_symmetric:
        raise ValueError("undirected CI test needs a symmetric connection set")
    census = babai_census(group, s, cap, subgroup_cap)
    coords = tuple(s.sorted_coords())
    if not census.non_conjugate:
        return CiVerdict(group.moduli, coords, directed, "babai", True)
    m = census.non_conjugate[0]
    witness = {
        "order": m.order,
        "generators": [list(g) for g in m.generators],
        "aut_order": census.aut_order,
        "regular_subgroups": census.regular_subgroups,
    }
    return CiVerdict(group.moduli, coords, directed, "babai", False, witness)


def verify_witness(verdict: CiVerdict, cap: int = DEFAULT_VERTEX_CAP) -> bool:
    """Re-check a negative verdict's witness from scratch."""
    if verdict.is_ci or verdict.witness is None:
        return False
    group = make_group(verdict.group_moduli)
    s = ConnectionSet.from_coords(group, verdict.set)
    x = build_digraph(group, s)
    if verdict.method == "definitional":
        other = ConnectionSet.from_coords(group, [tuple(c) for c in verdict.witness["set"]])
        if not is_isomorphism(x, build_digraph(group, other), verdict.witness["isomorphism"]):
            return False
        return not any(alpha(s) == other for alpha in enumerate_automorphisms(group))
    m = PermutationGroup([Permutation(g) for g in verdict.witness["generators"]], degree=group.order)
    aut = automorphism_group(x, cap=cap)
    if not m.is_subgroup_of(aut) or not is_regular_action(m):
        return False
    return are_conjugate_subgroups(m, right_regular_representation(group), aut) is None


def _decide(moduli: tuple[int, ...], mask: int, directed: bool, method: str) -> CiVerdict:
    group = make_group(moduli)
    s = ConnectionSet(group, frozenset(_indices(mask)))
    if method == "definitional":
        return _definitional(group, s, directed, DEFAULT_VERTEX_CAP)
    return is_ci_via_babai(group, s, directed)


def _orbit_representatives(moduli: tuple[int, ...], directed: bool) -> list[int]:
    order = make_group(moduli).order
    reps: set[int] = set()
    for size in range(order + 1):
        reps.update(subset_orbits(moduli, size, not directed).values())
    return sorted(reps, key=_indices)


def _run_tasks(tasks: list[tuple], workers: int) -> list[CiVerdict]:
    if workers <= 1 or len(tasks) < 2:
        return [_decide(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_decide, *zip(*tasks), chunksize=max(1, len(tasks) // (4 * workers))))


def default_workers() -> int:
    return os.cpu_count() or 1


def is_ci_group(
    group: FiniteAbelianGroup,
    directed: bool,
    method: str = "definitional",
    workers: int = 1,
) -> tuple[bool, CiVerdict | None]:
    """Whether every Cayley (di)graph of ``group`` is CI (DCI), with the
    lexicographically first failing connection set.

    Verdicts are constant on Aut(G)-orbits of connection sets, so one
    representative per orbit is decided; the failing set returned is the
    smallest member of the first failing orbit.
    """
    if group.order > GROUP_SCAN_ORDER_CAP:
        raise InfeasibleError(f"group scan limited to |G| <= {GROUP_SCAN_ORDER_CAP}, got {group.order}")
    if method not in ("definitional", "babai"):
        raise ValueError("method must be 'definitional' or 'babai'")
    reps = _orbit_representatives(group.moduli, directed)
    verdicts = _run_tasks([(group.moduli, m, directed, method) for m in reps], workers)
    failing = {m for m, v in zip(reps, verdicts) if not v.is_ci}
    if not failing:
        return True, None
    first = min(
        (m for size in range(group.order + 1) for m, rep in subset_orbits(group.moduli, size, not directed).items() if rep in failing),
        key=_indices,
    )
    return False, _decide(group.moduli, first, directed, method)


@dataclass
class AgreementReport:
    groups: list[tuple[int, ...]]
    checked: int = 0
    non_ci: int = 0
    disagreements: list[dict] = field(default_factory=list)
    group_verdicts: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.disagreements


def babai_agreement(
    groups=AGREEMENT_GROUPS,
    workers: int = 1,
    directed_modes: tuple[bool, ...] = (True, False),
) -> AgreementReport:
    """Compare both deciders on every connection set (one per Aut(G)-orbit)."""
    report = AgreementReport([tuple(m) for m in groups])
    for moduli in report.groups:
        for directed in directed_modes:
            reps = _orbit_representatives(moduli, directed)
            defs = _run_tasks([(moduli, m, directed, "definitional") for m in reps], workers)
            babs = _run_tasks([(moduli, m, directed, "babai") for m in reps], workers)
            ok = True
            for d, b in zip(defs, babs):
                report.checked += 1
                if not d.is_ci:
                    report.non_ci += 1
                    ok = False
                if d.is_ci != b.is_ci:
                    report.disagreements.append({"definitional": d.to_record(), "babai": b.to_record()})
            label = "x".join(map(str, moduli)) or "1"
            report.group_verdicts[f"{label}:{'DCI' if directed else 'CI'}"] = ok
    return report
