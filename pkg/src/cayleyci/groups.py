"""Finite abelian groups given as direct products of cyclic groups.

Elements are residue vectors.  Internally every element also has an integer
index: its rank in lexicographic coordinate order (first coordinate most
significant).  Graphs built on a group use these indices as vertex numbers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_ORDER_CAP = 10**6
DEFAULT_GL_CAP = 10**8
BRUTE_FORCE_AUT_CAP = 64


class InfeasibleError(RuntimeError):
    """A computation was refused because it exceeds a configured cap."""


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """The group Z_{n1} x ... x Z_{nd}.  An empty ``moduli`` is the trivial group."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if any(m < 2 for m in self.moduli):
            raise ValueError(f"every modulus must be >= 2, got {list(self.moduli)}")

    def __repr__(self) -> str:
        if not self.moduli:
            return "FiniteAbelianGroup(trivial)"
        return "FiniteAbelianGroup(" + " x ".join(f"Z{m}" for m in self.moduli) + ")"

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = []
        acc = 1
        for m in reversed(self.moduli):
            out.append(acc)
            acc *= m
        return tuple(reversed(out))

    @property
    def elementary_prime(self) -> int | None:
        """p if the group is (Z_p)^r for a prime p, else None."""
        if self.moduli and len(set(self.moduli)) == 1 and _is_prime(self.moduli[0]):
            return self.moduli[0]
        return None

    # -- element / index conversion -------------------------------------
    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.rank)

    def element(self, coords: Sequence[int] | int) -> GroupElement:
        if isinstance(coords, (int, np.integer)):
            return GroupElement(self, self.coords_of(int(coords)))
        return GroupElement(self, tuple(coords))

    def index_of(self, coords: Sequence[int]) -> int:
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return sum((int(c) % m) * s for c, m, s in zip(coords, self.moduli, self.strides))

    def coords_of(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise IndexError(f"element index {index} out of range for order {self.order}")
        return tuple((index // s) % m for m, s in zip(self.moduli, self.strides))

    def __iter__(self) -> Iterator[GroupElement]:
        for coords in itertools.product(*(range(m) for m in self.moduli)):
            yield GroupElement(self, coords)

    def __len__(self) -> int:
        return self.order

    def basis(self) -> list[GroupElement]:
        """Standard generators e_1, ..., e_d."""
        return [self.element(tuple(int(i == j) for j in range(self.rank))) for i in range(self.rank)]

    # -- vectorised arithmetic on indices ---------------------------------
    @cached_property
    def coord_table(self) -> np.ndarray:
        """(order, rank) array; row i holds the coordinates of element i."""
        if self.order > DEFAULT_ORDER_CAP * 4:
            raise InfeasibleError(f"group of order {self.order} is too large to tabulate")
        idx = np.arange(self.order, dtype=np.int64)
        if not self.rank:
            return np.zeros((1, 0), dtype=np.int64)
        return np.stack([(idx // s) % m for m, s in zip(self.moduli, self.strides)], axis=1)

    def encode(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64) % np.asarray(self.moduli, dtype=np.int64)
        return coords @ np.asarray(self.strides, dtype=np.int64)

    def add_indices(self, a, b) -> np.ndarray:
        """Elementwise sum of index arrays (broadcasting)."""
        ca = self.coord_table[np.asarray(a)]
        cb = self.coord_table[np.asarray(b)]
        return self.encode(ca + cb)

    def neg_indices(self, a) -> np.ndarray:
        return self.encode(-self.coord_table[np.asarray(a)])

    def sub_indices(self, a, b) -> np.ndarray:
        return self.encode(self.coord_table[np.asarray(a)] - self.coord_table[np.asarray(b)])

    @cached_property
    def negation_table(self) -> np.ndarray:
        return self.neg_indices(np.arange(self.order))

    def add(self, i: int, j: int) -> int:
        return self.index_of(tuple(x + y for x, y in zip(self.coords_of(i), self.coords_of(j))))

    def neg(self, i: int) -> int:
        return self.index_of(tuple(-x for x in self.coords_of(i)))

    def element_order(self, i: int) -> int:
        order = 1
        for c, m in zip(self.coords_of(i), self.moduli):
            order = math.lcm(order, m // math.gcd(c, m))
        return order


def make_group(moduli: Iterable[int], cap: int = DEFAULT_ORDER_CAP) -> FiniteAbelianGroup:
    group = FiniteAbelianGroup(tuple(moduli))
    if group.order > cap:
        raise InfeasibleError(f"group order {group.order} exceeds cap {cap}")
    return group


def direct_product(g: FiniteAbelianGroup, h: FiniteAbelianGroup, cap: int = DEFAULT_ORDER_CAP) -> FiniteAbelianGroup:
    return make_group(g.moduli + h.moduli, cap=cap)


def trivial_group() -> FiniteAbelianGroup:
    return FiniteAbelianGroup(())


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup = field(repr=False)
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != self.group.rank:
            raise ValueError(f"expected {self.group.rank} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", tuple(c % m for c, m in zip(coords, self.group.moduli)))

    @property
    def index(self) -> int:
        return self.group.index_of(self.coords)

    def _check(self, other: GroupElement) -> None:
        if other.group != self.group:
            raise ValueError("elements belong to different groups")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __rmul__(self, k: int) -> GroupElement:
        return GroupElement(self.group, tuple(k * a for a in self.coords))

    def __lt__(self, other: GroupElement) -> bool:
        return self.coords < other.coords

    def is_identity(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True)
class ConnectionSet:
    """A subset of a group, stored as a frozenset of element indices."""

    group: FiniteAbelianGroup
    indices: frozenset[int]

    def __post_init__(self) -> None:
        indices = frozenset(int(i) for i in self.indices)
        bad = [i for i in indices if not 0 <= i < self.group.order]
        if bad:
            raise ValueError(f"indices {sorted(bad)[:5]} are not elements of {self.group}")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_coords(cls, group: FiniteAbelianGroup, coords: Iterable[Sequence[int]]) -> ConnectionSet:
        return cls(group, frozenset(group.index_of(c) for c in coords))

    @classmethod
    def from_elements(cls, group: FiniteAbelianGroup, elements: Iterable[GroupElement]) -> ConnectionSet:
        elements = list(elements)
        for e in elements:
            if e.group != group:
                raise ValueError(f"element {e.coords} is not in {group}")
        return cls(group, frozenset(e.index for e in elements))

    @classmethod
    def from_ints(cls, group: FiniteAbelianGroup, values: Iterable[int]) -> ConnectionSet:
        """Convenience for cyclic groups: ``from_ints(Z5, [0, 1])``."""
        if group.rank != 1:
            raise ValueError("from_ints needs a cyclic group")
        return cls(group, frozenset(int(v) % group.order for v in values))

    @property
    def elements(self) -> list[GroupElement]:
        return [self.group.element(i) for i in sorted(self.indices)]

    def sorted_indices(self) -> list[int]:
        return sorted(self.indices)

    def sorted_coords(self) -> list[tuple[int, ...]]:
        return [self.group.coords_of(i) for i in sorted(self.indices)]

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, item) -> bool:
        if isinstance(item, GroupElement):
            return item.group == self.group and item.index in self.indices
        return int(item) in self.indices

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.indices))

    @property
    def contains_identity(self) -> bool:
        return 0 in self.indices

    @property
    def is_symmetric(self) -> bool:
        neg = self.group.negation_table
        return all(int(neg[i]) in self.indices for i in self.indices)

    def with_indices(self, indices: Iterable[int]) -> ConnectionSet:
        return ConnectionSet(self.group, frozenset(indices))


def subset_inverse(s: ConnectionSet) -> ConnectionSet:
    neg = s.group.negation_table
    return s.with_indices(int(neg[i]) for i in s.indices)


def symmetric_closure(s: ConnectionSet) -> ConnectionSet:
    return s.with_indices(s.indices | subset_inverse(s).indices)


def is_subgroup(s: ConnectionSet) -> bool:
    if not s.indices:
        return False
    g = s.group
    members = s.indices
    neg = g.negation_table
    if any(int(neg[i]) not in members for i in members):
        return False
    idx = np.fromiter(members, dtype=np.int64)
    sums = g.add_indices(idx[:, None], idx[None, :])
    return bool(np.isin(sums, idx).all())


@dataclass(frozen=True, eq=False)
class GroupAutomorphism:
    """An automorphism as an explicit image table on element indices.

    ``matrix`` (rows act on column vectors) is kept as a witness when the
    group is elementary abelian.  Equality is table equality.
    """

    group: FiniteAbelianGroup
    table: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...] | None = None

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupAutomorphism) and self.group == other.group and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.group, self.table))

    def __call__(self, x):
        if isinstance(x, GroupElement):
            return self.group.element(self.table[x.index])
        if isinstance(x, ConnectionSet):
            return apply_automorphism(self, x)
        return self.table[int(x)]

    @classmethod
    def identity(cls, group: FiniteAbelianGroup) -> GroupAutomorphism:
        return cls(group, tuple(range(group.order)))

    @classmethod
    def negation(cls, group: FiniteAbelianGroup) -> GroupAutomorphism:
        p = group.elementary_prime
        matrix = tuple(tuple((p - 1) * int(i == j) for j in range(group.rank)) for i in range(group.rank)) if p else None
        return cls(group, tuple(int(x) for x in group.negation_table), matrix)

    @classmethod
    def from_matrix(cls, group: FiniteAbelianGroup, matrix: Sequence[Sequence[int]]) -> GroupAutomorphism:
        p = group.elementary_prime
        if p is None:
            raise ValueError("matrix automorphisms need an elementary abelian group")
        m = np.asarray(matrix, dtype=np.int64) % p
        if m.shape != (group.rank, group.rank):
            raise ValueError(f"matrix must be {group.rank}x{group.rank}")
        if _rank_mod_p(m, p) < group.rank:
            raise ValueError("matrix is singular mod p")
        images = group.encode(group.coord_table @ m.T)
        return cls(group, tuple(int(x) for x in images), tuple(tuple(int(v) for v in row) for row in m))

    def is_homomorphism(self, samples: int | None = None, seed: int = 0) -> bool:
        g = self.group
        table = np.asarray(self.table)
        if sorted(self.table) != list(range(g.order)):
            return False
        if samples is None and g.order <= 10**4:
            if g.order <= 256:
                a, b = np.meshgrid(np.arange(g.order), np.arange(g.order), indexing="ij")
            else:
                # homomorphism on generators + additivity against every element suffices
                a = np.repeat(np.arange(g.order), g.rank)
                b = np.tile(np.asarray([e.index for e in g.basis()]), g.order)
        else:
            rng = np.random.default_rng(seed)
            a = rng.integers(0, g.order, samples or 1000)
            b = rng.integers(0, g.order, samples or 1000)
        return bool((table[g.add_indices(a, b)] == g.add_indices(table[a], table[b])).all())


def apply_automorphism(alpha: GroupAutomorphism, s: ConnectionSet) -> ConnectionSet:
    if alpha.group != s.group:
        raise ValueError("automorphism and connection set live in different groups")
    return s.with_indices(alpha.table[i] for i in s.indices)


def _rank_mod_p(m: np.ndarray, p: int) -> int:
    m = m.copy() % p
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, c]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = (m[rank] * pow(int(m[rank, c]), -1, p)) % p
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] = (m[r] - m[r, c] * m[rank]) % p
        rank += 1
    return rank


def gl_order(r: int, p: int) -> int:
    return math.prod(p**r - p**i for i in range(r))


def automorphism_count(group: FiniteAbelianGroup) -> int | None:
    """|Aut(G)| when cheap to state (elementary abelian or cyclic), else None."""
    if not group.moduli:
        return 1
    p = group.elementary_prime
    if p is not None:
        return gl_order(group.rank, p)
    if group.rank == 1:
        n = group.moduli[0]
        return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
    return None


def enumerate_automorphisms(
    group: FiniteAbelianGroup,
    gl_cap: int = DEFAULT_GL_CAP,
    brute_force_cap: int = BRUTE_FORCE_AUT_CAP,
) -> Iterator[GroupAutomorphism]:
    """Yield every automorphism of ``group`` exactly once.

    Elementary abelian groups go through invertible matrices column by
    column; anything else is brute force over images of the standard
    generators and is limited to groups of order <= ``brute_force_cap``.
    """
    if not group.moduli:
        yield GroupAutomorphism.identity(group)
        return
    p = group.elementary_prime
    if p is not None:
        if gl_order(group.rank, p) > gl_cap:
            raise InfeasibleError(f"|GL({group.rank},{p})| = {gl_order(group.rank, p)} exceeds cap {gl_cap}")
        yield from _enumerate_gl(group, p)
        return
    if group.order > brute_force_cap:
        raise InfeasibleError(f"brute-force automorphism search limited to order <= {brute_force_cap}")
    yield from _enumerate_by_generator_images(group)


def _enumerate_gl(group: FiniteAbelianGroup, p: int) -> Iterator[GroupAutomorphism]:
    r = group.rank
    vectors = [tuple(v) for v in itertools.product(range(p), repeat=r)]

    def span_of(cols: list[tuple[int, ...]]) -> set[tuple[int, ...]]:
        span = {(0,) * r}
        for c in cols:
            span = {tuple((a + k * b) % p for a, b in zip(s, c)) for s in span for k in range(p)}
        return span

    def extend(cols: list[tuple[int, ...]]) -> Iterator[list[tuple[int, ...]]]:
        if len(cols) == r:
            yield cols
            return
        span = span_of(cols)
        for v in vectors:
            if v not in span:
                yield from extend(cols + [v])

    for cols in extend([]):
        matrix = tuple(tuple(cols[j][i] for j in range(r)) for i in range(r))
        m = np.asarray(matrix, dtype=np.int64)
        table = group.encode(group.coord_table @ m.T)
        yield GroupAutomorphism(group, tuple(int(x) for x in table), matrix)


def _enumerate_by_generator_images(group: FiniteAbelianGroup) -> Iterator[GroupAutomorphism]:
    n = group.order
    candidates = [
        [x for x in range(n) if m % group.element_order(x) == 0]
        for m in group.moduli
    ]
    coords = group.coord_table
    for images in itertools.product(*candidates):
        img_coords = group.coord_table[list(images)]  # (rank, rank)
        table = group.encode(coords @ img_coords)
        if len(set(table.tolist())) == n:
            yield GroupAutomorphism(group, tuple(int(x) for x in table))
