"""Congruences, congruence lattices, tolerances, and link congruences."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .algebra import FiniteAlgebra, Subpower, check_compatible
from .caps import Caps, DEFAULT_CAPS
from .errors import CapExceeded, NotSubdirect


def normalize_blocks(block_id: Sequence[int]) -> tuple:
    """Renumber block ids in first-occurrence order."""
    ren = {}
    out = []
    for b in block_id:
        if b not in ren:
            ren[b] = len(ren)
        out.append(ren[b])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    """An equivalence relation on 0..n-1 as a normalized block-id array."""

    block_id: tuple

    def __post_init__(self):
        object.__setattr__(self, "block_id", normalize_blocks(self.block_id))

    @property
    def size(self) -> int:
        return len(self.block_id)

    @property
    def nblocks(self) -> int:
        return max(self.block_id) + 1 if self.block_id else 0

    def same(self, a: int, b: int) -> bool:
        return self.block_id[a] == self.block_id[b]

    def blocks(self) -> list:
        out = [[] for _ in range(self.nblocks)]
        for x, b in enumerate(self.block_id):
            out[b].append(x)
        return [tuple(b) for b in out]

    def block_of(self, x: int) -> tuple:
        bid = self.block_id[x]
        return tuple(y for y, b in enumerate(self.block_id) if b == bid)

    def is_equality(self) -> bool:
        return self.nblocks == self.size

    def is_full(self) -> bool:
        return self.nblocks <= 1

    def refines(self, other: "Partition") -> bool:
        seen = {}
        for mine, theirs in zip(self.block_id, other.block_id):
            if mine in seen:
                if seen[mine] != theirs:
                    return False
            else:
                seen[mine] = theirs
        return True

    def join(self, other: "Partition") -> "Partition":
        # equivalence join = transitive closure of the union; for congruences
        # this is again a congruence, so no compatibility re-closure is needed
        uf = UnionFind(self.size)
        for part in (self, other):
            reps = {}
            for x, b in enumerate(part.block_id):
                if b in reps:
                    uf.union(reps[b], x)
                else:
                    reps[b] = x
        return Partition(tuple(uf.find(x) for x in range(self.size)))

    def blocks_str(self) -> str:
        return "|".join("".join(map(str, b)) for b in self.blocks())


def equality_partition(n: int) -> Partition:
    return Partition(tuple(range(n)))


def full_partition(n: int) -> Partition:
    return Partition((0,) * max(n, 1))


@dataclass(frozen=True)
class Tolerance:
    """A reflexive symmetric relation on 0..n-1."""

    size: int
    pairs: frozenset

    @staticmethod
    def from_pairs(size: int, pairs: Iterable) -> "Tolerance":
        full = set()
        for a, b in pairs:
            full.add((a, b))
            full.add((b, a))
        for x in range(size):
            full.add((x, x))
        return Tolerance(size, frozenset(full))

    def has(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def matrix(self) -> list:
        return [
            [((i, j) in self.pairs) for j in range(self.size)]
            for i in range(self.size)
        ]

    def transitive_closure(self) -> Partition:
        uf = UnionFind(self.size)
        for a, b in self.pairs:
            uf.union(a, b)
        return Partition(tuple(uf.find(x) for x in range(self.size)))


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


# -- congruence generation ---------------------------------------------------


def cg(algebra: FiniteAlgebra, pairs: Iterable) -> Partition:
    """Least congruence containing `pairs`.

    Worklist closure under unary polynomials: whenever a,b get identified,
    f(..a..) and f(..b..) are identified for every operation f, every argument
    position, and every tuple of constants.
    """
    n = algebra.size
    uf = UnionFind(n)
    queue = []
    for a, b in pairs:
        if uf.union(a, b):
            queue.append((a, b))
    while queue:
        a, b = queue.pop()
        for op in algebra.operations:
            m = op.arity
            for pos in range(m):
                for ctx in product(range(n), repeat=m - 1):
                    va = op.apply(n, ctx[:pos] + (a,) + ctx[pos:])
                    vb = op.apply(n, ctx[:pos] + (b,) + ctx[pos:])
                    if uf.union(va, vb):
                        queue.append((va, vb))
    return Partition(tuple(uf.find(x) for x in range(n)))


def all_congruences(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> list:
    """The congruence lattice: principal congruences closed under join."""
    n = algebra.size
    found = {}

    def add(p: Partition) -> bool:
        if p.block_id in found:
            return False
        found[p.block_id] = p
        if len(found) > caps.lattice_limit:
            raise CapExceeded("congruence lattice", caps.lattice_limit)
        return True

    add(equality_partition(n))
    principals = []
    for a in range(n):
        for b in range(a + 1, n):
            p = cg(algebra, [(a, b)])
            principals.append(p)
            add(p)
    frontier = list(found.values())
    while frontier:
        fresh = []
        for p in frontier:
            for q in principals:
                j = p.join(q)
                if add(j):
                    fresh.append(j)
        frontier = fresh
    return sorted(found.values(), key=lambda p: (p.nblocks, p.block_id), reverse=True)


def maximal_congruences(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> list:
    """Congruences covered only by the full partition."""
    lattice = all_congruences(algebra, caps)
    out = []
    for p in lattice:
        if p.is_full():
            continue
        if not any(
            q is not p and not q.is_full() and p.refines(q) and p.block_id != q.block_id
            for q in lattice
        ):
            out.append(p)
    return out


def simplicity(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> tuple:
    """(is_simple, note). 1-element algebras report (False, 'degenerate')."""
    if algebra.size == 1:
        return False, "degenerate"
    return len(all_congruences(algebra, caps)) == 2, ""


def is_simple(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> bool:
    return simplicity(algebra, caps)[0]


# -- link tolerances and congruences ----------------------------------------


def link_tolerance(rel: Subpower, coord: int) -> Tolerance:
    """Pairs of i-th coordinates of tuples agreeing on all other coordinates."""
    if not rel.is_subdirect(coord):
        raise NotSubdirect(coord)
    size = rel.factors[coord].size
    groups = {}
    for t in rel.tuples:
        rest = t[:coord] + t[coord + 1 :]
        groups.setdefault(rest, []).append(t[coord])
    pairs = set()
    for vals in groups.values():
        for a in vals:
            for b in vals:
                pairs.add((a, b))
    return Tolerance.from_pairs(size, pairs)


def link_congruence(rel: Subpower, coord: int) -> Partition:
    return link_tolerance(rel, coord).transitive_closure()


def is_linked(rel: Subpower) -> bool:
    """A binary subdirect relation is linked iff both link congruences are full."""
    if rel.arity != 2:
        raise ValueError("is_linked is defined for binary relations")
    return link_congruence(rel, 0).is_full() and link_congruence(rel, 1).is_full()
