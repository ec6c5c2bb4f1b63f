"""Permutation groups: stabilizer chains, regular subgroups, conjugacy.

Composition convention: ``(p * q)(x) == p(q(x))``, i.e. ``q`` acts first.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .groups import FiniteAbelianGroup, InfeasibleError

DEFAULT_POINT_CAP = 10**5
DEFAULT_SUBGROUP_SEARCH_CAP = 10**7


class Permutation(tuple):
    """A bijection of {0, ..., n-1} stored as its image sequence."""

    def __new__(cls, images: Iterable[int] = ()):
        self = super().__new__(cls, (int(i) for i in images))
        if sorted(self) != list(range(len(self))):
            raise ValueError(f"not a permutation: {tuple(self)[:12]}")
        return self

    @classmethod
    def _trusted(cls, images: Iterable[int]) -> Permutation:
        return tuple.__new__(cls, images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls._trusted(range(n))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> Permutation:
        images = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a] = b
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self)

    def __mul__(self, other: Permutation) -> Permutation:
        return Permutation._trusted(map(self.__getitem__, other))

    def __invert__(self) -> Permutation:
        inv = [0] * len(self)
        for i, j in enumerate(self):
            inv[j] = i
        return Permutation._trusted(inv)

    inverse = __invert__

    def __call__(self, x: int) -> int:
        return self[x]

    def __repr__(self) -> str:
        return f"Permutation({list(self)})"

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self))

    def fixed_points(self) -> list[int]:
        return [i for i, j in enumerate(self) if i == j]

    def cycle_lengths(self) -> list[int]:
        seen = [False] * len(self)
        out = []
        for i in range(len(self)):
            if not seen[i]:
                length = 0
                j = i
                while not seen[j]:
                    seen[j] = True
                    j = self[j]
                    length += 1
                out.append(length)
        return sorted(out)

    def order(self) -> int:
        return math.lcm(*self.cycle_lengths()) if len(self) else 1

    def conjugate_by(self, a: Permutation) -> Permutation:
        """a^-1 * self * a."""
        return ~a * self * a


@dataclass
class _Level:
    point: int
    gens: list[Permutation]
    transversal: dict[int, Permutation]
    inverses: dict[int, Permutation]
    processed: set[tuple[int, int]]


class StabilizerChain:
    """Base and strong generating set built by deterministic Schreier-Sims.

    ``base_prefix`` forces the first base points; further points are chosen
    as the smallest point moved by the generator that needs one.
    """

    def __init__(self, degree: int, generators: Sequence[Permutation], base_prefix: Sequence[int] = ()):
        self.degree = degree
        for g in generators:
            if len(g) != degree:
                raise ValueError(f"generator of degree {len(g)} in a group of degree {degree}")
        self.identity = Permutation.identity(degree)
        self.levels: list[_Level] = []
        for b in base_prefix:
            self._new_level(int(b))
        strong = [Permutation._trusted(g) for g in generators if not Permutation.is_identity(g)]
        for g in strong:
            if all(g[lv.point] == lv.point for lv in self.levels):
                self._new_level(min(i for i, j in enumerate(g) if i != j))
        for g in strong:
            self._add_generator(g, 0, self._fixed_depth(g))
        self._run()

    def _new_level(self, point: int) -> None:
        e = self.identity
        self.levels.append(_Level(point, [], {point: e}, {point: e}, set()))

    def _fixed_depth(self, g: Permutation) -> int:
        """Number of leading base points fixed by g."""
        d = 0
        for lv in self.levels:
            if g[lv.point] != lv.point:
                break
            d += 1
        return d

    def _add_generator(self, g: Permutation, lo: int, hi: int) -> None:
        """Add g to levels lo..hi (g fixes the base points before each)."""
        for i in range(lo, min(hi, len(self.levels) - 1) + 1):
            lv = self.levels[i]
            lv.gens.append(g)
            self._extend_orbit(lv)

    def _extend_orbit(self, lv: _Level) -> None:
        queue = deque(lv.transversal)
        while queue:
            beta = queue.popleft()
            u = lv.transversal[beta]
            for s in lv.gens:
                gamma = s[beta]
                if gamma not in lv.transversal:
                    t = s * u
                    lv.transversal[gamma] = t
                    lv.inverses[gamma] = ~t
                    queue.append(gamma)

    def strip(self, g: Permutation, start: int = 0) -> tuple[Permutation, int]:
        """Sift g from level ``start``; return the residue and the level it stopped at."""
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            beta = g[lv.point]
            if beta not in lv.transversal:
                return g, i
            g = lv.inverses[beta] * g
        return g, len(self.levels)

    def _run(self) -> None:
        i = len(self.levels) - 1
        while i >= 0:
            lv = self.levels[i]
            restart = None
            for beta in list(lv.transversal):
                for k, s in enumerate(lv.gens):
                    if (beta, k) in lv.processed:
                        continue
                    lv.processed.add((beta, k))
                    gamma = s[beta]
                    h = lv.inverses[gamma] * s * lv.transversal[beta]
                    residue, j = self.strip(h, i + 1)
                    if j < len(self.levels) or not residue.is_identity():
                        if j == len(self.levels):
                            self._new_level(min(x for x, y in enumerate(residue) if x != y))
                        self._add_generator(residue, i + 1, j)
                        restart = j
                        break
                if restart is not None:
                    break
            if restart is not None:
                i = restart
            else:
                i -= 1

    # -- queries ---------------------------------------------------------
    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self.levels]

    @property
    def orbit_sizes(self) -> list[int]:
        return [len(lv.transversal) for lv in self.levels]

    @property
    def order(self) -> int:
        return math.prod(self.orbit_sizes)

    def contains(self, g: Sequence[int]) -> bool:
        if len(g) != self.degree:
            return False
        residue, j = self.strip(Permutation._trusted(g))
        return j == len(self.levels) and residue.is_identity()

    def strong_generators(self, level: int = 0) -> list[Permutation]:
        """Strong generators fixing the first ``level`` base points."""
        seen: set[Permutation] = set()
        out = []
        for lv in self.levels[level:]:
            for g in lv.gens:
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        return out

    def elements(self) -> Iterator[Permutation]:
        def rec(i: int, acc: Permutation) -> Iterator[Permutation]:
            if i == len(self.levels):
                yield acc
                return
            lv = self.levels[i]
            for beta in sorted(lv.transversal):
                yield from rec(i + 1, acc * lv.transversal[beta])

        yield from rec(0, self.identity)


class PermutationGroup:
    """A permutation group given by generators; the chain is built on demand."""

    def __init__(self, generators: Iterable[Sequence[int]], degree: int | None = None):
        gens = [Permutation(g) for g in generators]
        if degree is None:
            if not gens:
                raise ValueError("degree is required for a group with no generators")
            degree = len(gens[0])
        if any(len(g) != degree for g in gens):
            raise ValueError("generators have mismatched degrees")
        self.degree = degree
        self.generators = gens

    def __repr__(self) -> str:
        return f"PermutationGroup(degree={self.degree}, generators={len(self.generators)})"

    @cached_property
    def chain(self) -> StabilizerChain:
        return StabilizerChain(self.degree, self.generators)

    def chain_with_base(self, prefix: Sequence[int]) -> StabilizerChain:
        return StabilizerChain(self.degree, self.generators, base_prefix=prefix)

    @property
    def order(self) -> int:
        return self.chain.order

    def __contains__(self, g) -> bool:
        return self.chain.contains(g)

    def contains(self, g) -> bool:
        return self.chain.contains(g)

    def elements(self) -> Iterator[Permutation]:
        return self.chain.elements()

    def element_set(self, cap: int = DEFAULT_SUBGROUP_SEARCH_CAP) -> list[Permutation]:
        if self.order > cap:
            raise InfeasibleError(f"group of order {self.order} exceeds element cap {cap}")
        return sorted(self.elements())

    def orbit(self, point: int) -> set[int]:
        return _orbit(point, self.generators)

    def orbits(self) -> list[list[int]]:
        return orbit_partition(self.degree, self.generators)

    def is_transitive(self) -> bool:
        return self.degree == 0 or len(self.orbit(0)) == self.degree

    def stabilizer(self, point: int) -> PermutationGroup:
        chain = self.chain_with_base([point])
        return PermutationGroup(chain.strong_generators(1), degree=self.degree)

    def pointwise_stabilizer(self, points: Sequence[int]) -> PermutationGroup:
        chain = self.chain_with_base(list(points))
        return PermutationGroup(chain.strong_generators(len(points)), degree=self.degree)

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(a * b == b * a for i, a in enumerate(gens) for b in gens[i + 1:])

    def is_subgroup_of(self, other: PermutationGroup) -> bool:
        return all(g in other for g in self.generators)


def _orbit(point: int, gens: Sequence[Sequence[int]]) -> set[int]:
    seen = {point}
    queue = [point]
    while queue:
        x = queue.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def orbit_partition(degree: int, gens: Sequence[Sequence[int]]) -> list[list[int]]:
    parent = list(range(degree))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, j in enumerate(g):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    cells: dict[int, list[int]] = {}
    for i in range(degree):
        cells.setdefault(find(i), []).append(i)
    return sorted(cells.values())


def stabilizer_chain(gens: Sequence[Sequence[int]], degree: int | None = None) -> StabilizerChain:
    gens = [Permutation(g) for g in gens]
    if degree is None:
        if not gens:
            raise ValueError("degree is required for an empty generator list")
        degree = len(gens[0])
    return StabilizerChain(degree, gens)


def right_regular_representation(h: FiniteAbelianGroup, cap: int = DEFAULT_POINT_CAP) -> PermutationGroup:
    """Translations x -> x + e for each standard generator e of h."""
    if h.order > cap:
        raise InfeasibleError(f"regular representation on {h.order} points exceeds cap {cap}")
    points = np.arange(h.order)
    gens = [Permutation._trusted(int(v) for v in h.add_indices(points, e.index)) for e in h.basis()]
    return PermutationGroup(gens, degree=h.order)


def is_regular_action(p: PermutationGroup) -> bool:
    return p.is_transitive() and p.order == p.degree


def abelian_invariants_from_orders(orders: Iterable[int]) -> tuple[tuple[int, int], ...]:
    """Census of element orders, the isomorphism fingerprint for finite abelian groups."""
    return tuple(sorted(Counter(orders).items()))


def element_order_census(h: FiniteAbelianGroup) -> tuple[tuple[int, int], ...]:
    return abelian_invariants_from_orders(h.element_order(i) for i in range(h.order))


def _is_semiregular(g: Permutation, order: int) -> bool:
    return all(c == order for c in g.cycle_lengths())


def _closure(gens: Sequence[Permutation], degree: int, limit: int) -> set[Permutation] | None:
    e = Permutation.identity(degree)
    elems = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g * x
                if y not in elems:
                    elems.add(y)
                    if len(elems) > limit:
                        return None
                    nxt.append(y)
        frontier = nxt
    return elems


def _subgroup_key(elems: Iterable[Permutation]) -> tuple[Permutation, ...]:
    return tuple(sorted(elems))


def enumerate_regular_subgroups(
    a: PermutationGroup,
    h: FiniteAbelianGroup,
    cap: int = DEFAULT_SUBGROUP_SEARCH_CAP,
) -> list[PermutationGroup]:
    """All subgroups of ``a`` isomorphic to ``h`` that act regularly.

    Backtracks over images of the standard generators of ``h``: the i-th image
    must be semiregular of order moduli[i], commute with the earlier images
    and meet the subgroup they generate trivially.  Partial subgroups are
    memoised, so each one is extended only once.
    """
    if a.degree != h.order:
        raise ValueError(f"degree {a.degree} differs from |H| = {h.order}")
    if a.order > cap:
        raise InfeasibleError(f"|A| = {a.order} exceeds the regular-subgroup search cap {cap}")
    degree = a.degree
    moduli = list(h.moduli)
    if not moduli:
        return [PermutationGroup([], degree=degree)] if degree == 1 else []
    elements = a.element_set(cap)
    census = element_order_census(h)
    by_order = {
        m: [g for g in elements if _is_semiregular(g, m)] for m in set(moduli)
    }
    results: dict[tuple[Permutation, ...], list[Permutation]] = {}
    visited: set[tuple[int, tuple[Permutation, ...]]] = set()

    def extend(level: int, gens: list[Permutation], members: set[Permutation]) -> None:
        key = _subgroup_key(members)
        if (level, key) in visited:
            return
        visited.add((level, key))
        if level == len(moduli):
            if census == abelian_invariants_from_orders(g.order() for g in members):
                results.setdefault(key, list(gens))
            return
        target = len(members) * moduli[level]
        for g in by_order[moduli[level]]:
            if g in members or any(g * x != x * g for x in gens):
                continue
            sub = _closure(gens + [g], degree, target)
            if sub is None or len(sub) != target:
                continue
            if any(x.fixed_points() for x in sub if not x.is_identity()):
                continue
            extend(level + 1, gens + [g], sub)

    extend(0, [], {Permutation.identity(degree)})
    return [PermutationGroup(results[k], degree=degree) for k in sorted(results)]


def subgroup_elements(p: PermutationGroup) -> tuple[Permutation, ...]:
    return _subgroup_key(p.elements())


def are_conjugate_subgroups(
    p: PermutationGroup,
    q: PermutationGroup,
    within: PermutationGroup,
    cap: int = DEFAULT_SUBGROUP_SEARCH_CAP,
) -> Permutation | None:
    """Some a in ``within`` with a^-1 P a = Q, or None.

    Walks the orbit of P under conjugation by the generators of ``within``,
    carrying a transversal word for each conjugate reached.
    """
    if p.order != q.order:
        return None
    if within.order > cap:
        raise InfeasibleError(f"|A| = {within.order} exceeds conjugacy search cap {cap}")
    start = subgroup_elements(p)
    target = subgroup_elements(q)
    e = Permutation.identity(p.degree)
    found = _conjugation_orbit(start, within.generators, e, stop_at=target)
    a = found.get(target)
    if a is None:
        return None
    if not all(g.conjugate_by(a) in set(target) for g in p.generators) or a not in within:
        raise AssertionError("conjugating element failed verification")
    return a


def _conjugation_orbit(
    start: tuple[Permutation, ...],
    gens: Sequence[Permutation],
    identity: Permutation,
    stop_at: tuple[Permutation, ...] | None = None,
) -> dict[tuple[Permutation, ...], Permutation]:
    words = {start: identity}
    queue = deque([start])
    while queue:
        if stop_at is not None and stop_at in words:
            break
        cur = queue.popleft()
        w = words[cur]
        for g in gens:
            nxt = _subgroup_key(x.conjugate_by(g) for x in cur)
            if nxt not in words:
                words[nxt] = w * g
                queue.append(nxt)
    return words


def conjugacy_class_of_subgroup(p: PermutationGroup, within: PermutationGroup) -> set[tuple[Permutation, ...]]:
    e = Permutation.identity(p.degree)
    return set(_conjugation_orbit(subgroup_elements(p), within.generators, e))
