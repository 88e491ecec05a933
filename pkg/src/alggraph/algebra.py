"""Finite idempotent algebras and the closure primitives everything builds on.

Elements of an algebra of size n are the integers 0..n-1. Operation tables are
flat and row-major with the leftmost argument most significant: the value of
f(x1,...,xk) sits at index ((x1*n + x2)*n + ...)*n + xk. This encoding is part
of the JSON file format and is bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .caps import Caps, DEFAULT_CAPS
from .errors import (
    CapExceeded,
    MalformedTable,
    NonIdempotent,
    SignatureMismatch,
)


@dataclass(frozen=True)
class OpTable:
    """A finitary operation on 0..n-1 as a flat row-major table."""

    name: str
    arity: int
    table: tuple

    def check(self, size: int) -> None:
        if self.arity < 1:
            raise MalformedTable(f"{self.name}: arity must be >= 1")
        if len(self.table) != size**self.arity:
            raise MalformedTable(
                f"{self.name}: table length {len(self.table)} != {size}^{self.arity}"
            )
        for v in self.table:
            if not (isinstance(v, int) and 0 <= v < size):
                raise MalformedTable(f"{self.name}: value {v!r} out of range")

    def apply(self, size: int, args: Sequence[int]) -> int:
        idx = args[0]
        for a in args[1:]:
            idx = idx * size + a
        return self.table[idx]


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite algebra on universe 0..size-1 with named operations."""

    name: str
    size: int
    operations: tuple

    @cached_property
    def op_index(self) -> dict:
        return {op.name: i for i, op in enumerate(self.operations)}

    @cached_property
    def np_tables(self) -> list:
        return [np.asarray(op.table, dtype=np.int64) for op in self.operations]

    def signature(self) -> tuple:
        return tuple((op.name, op.arity) for op in self.operations)

    def apply(self, op: int | str, args: Sequence[int]) -> int:
        if isinstance(op, str):
            op = self.op_index[op]
        return self.operations[op].apply(self.size, args)

    def elements(self) -> range:
        return range(self.size)

    # -- derived algebras -------------------------------------------------

    def subalgebra(self, members: Iterable[int], name: str | None = None):
        """Induced algebra on a subuniverse; returns (algebra, old->new map)."""
        members = sorted(set(members))
        ren = {b: i for i, b in enumerate(members)}
        k = len(members)
        ops = []
        for op in self.operations:
            table = []
            for args in product(members, repeat=op.arity):
                table.append(ren[op.apply(self.size, args)])
            ops.append(OpTable(op.name, op.arity, tuple(table)))
        sub = FiniteAlgebra(name or f"{self.name}|{members}", k, tuple(ops))
        return sub, ren

    def rename(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(name, self.size, self.operations)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "operations": [
                {"name": op.name, "arity": op.arity, "table": list(op.table)}
                for op in self.operations
            ],
        }


def validate_algebra(raw: dict | FiniteAlgebra) -> FiniteAlgebra:
    """Validate a raw description (or re-validate an algebra).

    Checks table shapes, value ranges, name uniqueness, and idempotence of
    every operation. Raises MalformedTable / NonIdempotent with a witness.
    """
    if isinstance(raw, FiniteAlgebra):
        alg = raw
    else:
        try:
            name = raw.get("name", "algebra")
            size = raw["size"]
            ops_raw = raw["operations"]
        except (KeyError, TypeError, AttributeError) as exc:
            raise MalformedTable(f"missing field in algebra description: {exc}")
        if not (isinstance(size, int) and size >= 1):
            raise MalformedTable(f"size must be a positive integer, got {size!r}")
        ops = []
        for o in ops_raw:
            try:
                ops.append(OpTable(str(o["name"]), int(o["arity"]), tuple(o["table"])))
            except (KeyError, TypeError) as exc:
                raise MalformedTable(f"bad operation description: {exc}")
        alg = FiniteAlgebra(str(name), size, tuple(ops))

    seen = set()
    for op in alg.operations:
        if op.name in seen:
            raise MalformedTable(f"duplicate operation name {op.name!r}")
        seen.add(op.name)
        op.check(alg.size)
        for x in range(alg.size):
            if op.apply(alg.size, (x,) * op.arity) != x:
                raise NonIdempotent(op.name, x)
    return alg


def algebra_from_json(text: str) -> FiniteAlgebra:
    return validate_algebra(json.loads(text))


# -- generated subuniverses ----------------------------------------------


@dataclass(frozen=True)
class Subuniverse:
    parent: FiniteAlgebra
    members: frozenset


def sg_closure(algebra: FiniteAlgebra, seed: Iterable[int]) -> Subuniverse:
    """Least subuniverse containing `seed` (fixpoint under all operations)."""
    members = sorted(set(seed))
    if not members:
        raise ValueError("seed must be nonempty")
    for x in members:
        if not 0 <= x < algebra.size:
            raise ValueError(f"seed element {x} outside universe")
    have = set(members)
    elems = list(members)
    old = 0
    while old < len(elems):
        prev, old = old, len(elems)
        for op in algebra.operations:
            m = op.arity
            for idxs in product(range(len(elems)), repeat=m):
                if max(idxs) < prev:
                    continue
                v = op.apply(algebra.size, tuple(elems[i] for i in idxs))
                if v not in have:
                    have.add(v)
                    elems.append(v)
    return Subuniverse(algebra, frozenset(have))


def subuniverses(algebra: FiniteAlgebra) -> list:
    """All nonempty subuniverses, as sorted tuples (universe sizes <= ~6)."""
    out = []
    n = algebra.size
    for mask in range(1, 1 << n):
        subset = [x for x in range(n) if mask >> x & 1]
        closed = True
        for op in algebra.operations:
            for args in product(subset, repeat=op.arity):
                if op.apply(n, args) not in subset:
                    closed = False
                    break
            if not closed:
                break
        if closed:
            out.append(tuple(subset))
    return out


# -- quotients -------------------------------------------------------------


def check_compatible(algebra: FiniteAlgebra, block_id: Sequence[int]):
    """Return a NotACongruence-style witness if block_id is incompatible, else None."""
    n = algebra.size
    for op in algebra.operations:
        m = op.arity
        for args_a in product(range(n), repeat=m):
            va = op.apply(n, args_a)
            # vary one coordinate within its block at a time; single-coordinate
            # compatibility implies full compatibility by chaining
            for pos in range(m):
                a = args_a[pos]
                for b in range(n):
                    if b == a or block_id[b] != block_id[a]:
                        continue
                    args_b = args_a[:pos] + (b,) + args_a[pos + 1 :]
                    if block_id[op.apply(n, args_b)] != block_id[va]:
                        return (op.name, args_a, args_b)
    return None


def quotient(algebra: FiniteAlgebra, theta) -> tuple:
    """Quotient by a congruence; returns (algebra on classes, element->class map).

    `theta` is a Partition or any object with a block_id sequence. Raises
    NotACongruence when the partition is incompatible with some operation.
    """
    block_id = tuple(getattr(theta, "block_id", theta))
    if len(block_id) != algebra.size:
        raise ValueError("partition size mismatch")
    witness = check_compatible(algebra, block_id)
    if witness is not None:
        from .errors import NotACongruence

        raise NotACongruence(*witness)
    k = max(block_id) + 1
    reps = [block_id.index(c) for c in range(k)]
    ops = []
    for op in algebra.operations:
        table = []
        for args in product(reps, repeat=op.arity):
            table.append(block_id[op.apply(algebra.size, args)])
        ops.append(OpTable(op.name, op.arity, tuple(table)))
    quo = FiniteAlgebra(f"{algebra.name}/q{k}", k, tuple(ops))
    return quo, list(block_id)


# -- subpowers -------------------------------------------------------------


def _check_signatures(factors: Sequence[FiniteAlgebra]):
    sig = factors[0].signature()
    for f in factors[1:]:
        if f.signature() != sig:
            raise SignatureMismatch(
                f"factor {f.name!r} signature {f.signature()} != {sig}"
            )


class ProductContext:
    """Coordinatewise operation evaluation over a tuple of factors.

    When the full product is small its composed flat tables are precomputed so
    closure loops reduce to single lookups on integer codes.
    """

    COMPOSED_LIMIT = 4_000_000

    def __init__(self, factors: Sequence[FiniteAlgebra]):
        _check_signatures(factors)
        self.factors = tuple(factors)
        self.sizes = tuple(f.size for f in factors)
        self.signature = factors[0].signature()
        psize = 1
        for s in self.sizes:
            psize *= s
        self.psize = psize
        max_arity = max((a for _, a in self.signature), default=1)
        self.composed = None
        if psize > 1 and psize**max_arity <= self.COMPOSED_LIMIT:
            self.composed = self._build_composed()

    def _build_composed(self):
        # code = mixed-radix over coordinates, leftmost factor most significant
        codes = np.arange(self.psize)
        digits = []
        rest = codes
        for s in reversed(self.sizes):
            digits.append(rest % s)
            rest = rest // s
        digits.reverse()
        tables = []
        for oi, (name, arity) in enumerate(self.signature):
            grids = np.meshgrid(
                *([np.arange(self.psize)] * arity), indexing="ij", copy=False
            )
            flat_args = [g.reshape(-1) for g in grids]
            out = np.zeros(self.psize**arity, dtype=np.int64)
            for ci, f in enumerate(self.factors):
                t = f.np_tables[oi]
                n = f.size
                idx = digits[ci][flat_args[0]]
                for g in flat_args[1:]:
                    idx = idx * n + digits[ci][g]
                out = out * f.size + t[idx] if ci else t[idx]
            tables.append(out)
        return tables

    def encode(self, tup: Sequence[int]) -> int:
        code = 0
        for v, s in zip(tup, self.sizes):
            code = code * s + v
        return code

    def decode(self, code: int) -> tuple:
        out = []
        for s in reversed(self.sizes):
            out.append(code % s)
            code //= s
        return tuple(reversed(out))

    def apply_codes(self, op_idx: int, arg_codes: Sequence[int]) -> int:
        if self.composed is not None:
            idx = arg_codes[0]
            for c in arg_codes[1:]:
                idx = idx * self.psize + c
            return int(self.composed[op_idx][idx])
        args = [self.decode(c) for c in arg_codes]
        out = 0
        for ci, f in enumerate(self.factors):
            out = out * f.size + f.apply(op_idx, tuple(a[ci] for a in args))
        return out


@dataclass
class Subpower:
    """A subalgebra of a finite product, stored as an explicit tuple set.

    `tuples` is in generation (BFS) order: generators first, then closure
    rounds. With tracking, `derivations` maps a non-generator tuple to one
    (op name, argument tuples) record sufficient to rebuild a generating term.
    """

    factors: tuple
    tuples: list
    generators: tuple
    derivations: dict | None = None
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {t: i for i, t in enumerate(self.tuples)}

    def __contains__(self, tup) -> bool:
        return tuple(tup) in self._index

    def __len__(self) -> int:
        return len(self.tuples)

    @property
    def arity(self) -> int:
        return len(self.factors)

    def project(self, coords: Sequence[int], name: str | None = None) -> "Subpower":
        coords = list(coords)
        seen = {}
        out = []
        for t in self.tuples:
            p = tuple(t[i] for i in coords)
            if p not in seen:
                seen[p] = len(out)
                out.append(p)
        return Subpower(
            tuple(self.factors[i] for i in coords),
            out,
            tuple(sorted(seen.keys() & {tuple(g[i] for i in coords) for g in self.generators})),
        )

    def is_subdirect(self, coord: int | None = None) -> bool:
        coords = range(self.arity) if coord is None else [coord]
        for i in coords:
            if len({t[i] for t in self.tuples}) != self.factors[i].size:
                return False
        return True

    def term_tree(self, tup) -> tuple:
        """Term over the generators evaluating to `tup` (requires tracking).

        Leaves are ('arg', i) for generator i; nodes are (op name, children).
        """
        if self.derivations is None:
            raise ValueError("subpower was generated without tracking")
        tup = tuple(tup)
        gen_index = {g: i for i, g in enumerate(self.generators)}

        def build(t, memo):
            if t in memo:
                return memo[t]
            if t in gen_index:
                node = ("arg", gen_index[t])
            else:
                op_name, args = self.derivations[t]
                node = (op_name, tuple(build(a, memo) for a in args))
            memo[t] = node
            return node

        return build(tup, {})

    def replay(self, tup) -> tuple:
        """Re-evaluate the derivation record of `tup`; used as a self-check."""
        tree = self.term_tree(tup)
        return eval_term_tuplewise(tree, self.factors, self.generators)


def eval_term_tuplewise(tree, factors, arg_tuples):
    """Evaluate a term tree coordinatewise over product tuples."""

    def ev(node):
        if node[0] == "arg" and isinstance(node[1], int) and len(node) == 2:
            return tuple(arg_tuples[node[1]])
        op_name, children = node
        vals = [ev(c) for c in children]
        return tuple(
            f.apply(op_name, tuple(v[ci] for v in vals))
            for ci, f in enumerate(factors)
        )

    return ev(tree)


def eval_term_on_algebra(tree, algebra: FiniteAlgebra, args: Sequence[int]) -> int:
    def ev(node):
        if node[0] == "arg" and isinstance(node[1], int) and len(node) == 2:
            return args[node[1]]
        op_name, children = node
        return algebra.apply(op_name, tuple(ev(c) for c in children))

    return ev(tree)


def term_table_on_algebra(tree, algebra: FiniteAlgebra, arity: int) -> tuple:
    """Materialize a term tree as a flat row-major table on `algebra`."""
    return tuple(
        eval_term_on_algebra(tree, algebra, args)
        for args in product(range(algebra.size), repeat=arity)
    )


def unique_roots(factors: Sequence[FiniteAlgebra]) -> tuple:
    """(distinct factor list, per-coordinate index into it); table equality."""
    roots = []
    root_of = []
    for f in factors:
        for ri, r in enumerate(roots):
            if r is f or (
                r.size == f.size
                and r.signature() == f.signature()
                and all(a.table == b.table for a, b in zip(r.operations, f.operations))
            ):
                root_of.append(ri)
                break
        else:
            roots.append(f)
            root_of.append(len(roots) - 1)
    return tuple(roots), tuple(root_of)


def subpower_generate(
    factors: Sequence[FiniteAlgebra],
    generators: Iterable[Sequence[int]],
    track: bool = False,
    caps: Caps = DEFAULT_CAPS,
) -> Subpower:
    """Closure of generator tuples under coordinatewise operations.

    The closure equals the set of values of k-ary term operations on the k
    generators, so it is computed by the clone engine over one column per
    coordinate.
    """
    factors = tuple(factors)
    _check_signatures(factors)
    gens = []
    for g in generators:
        g = tuple(int(v) for v in g)
        if len(g) != len(factors):
            raise ValueError(f"generator {g} has wrong length")
        for v, f in zip(g, factors):
            if not 0 <= v < f.size:
                raise ValueError(f"generator value {v} outside factor {f.name!r}")
        gens.append(g)
    if not gens:
        raise ValueError("need at least one generator")

    from .clone import clone_closure

    roots, root_of = unique_roots(factors)
    columns = tuple(
        (root_of[i], tuple(g[i] for g in gens)) for i in range(len(factors))
    )
    frag = clone_closure(
        roots,
        len(gens),
        columns,
        caps,
        track=track,
        row_limit=caps.tuple_limit,
        cost_limit=caps.subpower_cost_limit,
    )
    if not frag.complete:
        raise CapExceeded("subpower closure", caps.tuple_limit)

    tuples = [tuple(int(v) for v in row) for row in frag.rows]
    derivations = None
    if track:
        sig = factors[0].signature()
        derivations = {}
        for i, parent in enumerate(frag.parents):
            if parent is None:
                continue
            op_idx, arg_rows = parent
            derivations[tuples[i]] = (
                sig[op_idx][0],
                tuple(tuples[j] for j in arg_rows),
            )
    return Subpower(factors, tuples, tuple(gens), derivations)


def full_product(factors: Sequence[FiniteAlgebra]) -> Subpower:
    factors = tuple(factors)
    _check_signatures(factors)
    tuples = [tuple(t) for t in product(*[range(f.size) for f in factors])]
    return Subpower(factors, tuples, tuple(tuples))


def product_algebra(factors: Sequence[FiniteAlgebra], name: str | None = None) -> FiniteAlgebra:
    """The direct product materialized as a single algebra (small products only)."""
    factors = tuple(factors)
    _check_signatures(factors)
    ctx = ProductContext(factors)
    if ctx.composed is None:
        raise CapExceeded("product table", ProductContext.COMPOSED_LIMIT)
    ops = []
    for oi, (op_name, arity) in enumerate(ctx.signature):
        ops.append(OpTable(op_name, arity, tuple(int(v) for v in ctx.composed[oi])))
    return FiniteAlgebra(
        name or "x".join(f.name for f in factors), ctx.psize, tuple(ops)
    )


# -- term operations -------------------------------------------------------


@dataclass
class TermOpSet:
    """A fragment of the k-ary term clone as explicit tables.

    complete=False means the cap was reached; the set is then only a subset of
    the clone and quantified checks must not report a definitive "true" from it.
    """

    arity: int
    functions: list
    complete: bool
    cap: int


def term_ops(algebra: FiniteAlgebra, arity: int, caps: Caps = DEFAULT_CAPS) -> TermOpSet:
    """All k-ary term operations (k <= 3) by closing the projections."""
    if arity not in (1, 2, 3):
        raise ValueError("arity must be 1, 2, or 3")
    if arity == 1:
        ident = OpTable("t0", 1, tuple(range(algebra.size)))
        return TermOpSet(1, [ident], True, caps.clone_limit)

    from .clone import clone_closure  # local import to avoid cycle

    columns = [
        (0, args) for args in product(range(algebra.size), repeat=arity)
    ]
    frag = clone_closure([algebra], arity, columns, caps, track=True)
    functions = [
        OpTable(f"t{i}", arity, tuple(int(v) for v in row))
        for i, row in enumerate(frag.rows)
    ]
    return TermOpSet(arity, functions, frag.complete, caps.clone_limit)


# -- HS class ---------------------------------------------------------------


@dataclass(frozen=True)
class HsMember:
    """A concrete member of HS(A): a subalgebra or a quotient of one.

    `sub` is the subuniverse of the root, `theta` the congruence block map on
    the induced subalgebra (None for the subalgebra itself). `duplicate_of`
    flags structural duplicates (same size and tables as an earlier member).
    """

    algebra: FiniteAlgebra
    root_name: str
    sub: tuple
    theta: tuple | None
    duplicate_of: int | None


def hs_class(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> list:
    """All subalgebras of A and quotients of those by proper congruences."""
    from .congruence import all_congruences

    members = []
    shapes = {}

    def add(alg, sub, theta):
        key = (alg.size, tuple(op.table for op in alg.operations))
        dup = shapes.get(key)
        if dup is None:
            shapes[key] = len(members)
        members.append(HsMember(alg, algebra.name, sub, theta, dup))
        if len(members) > caps.hs_limit:
            raise CapExceeded("HS class size", caps.hs_limit)

    for sub in subuniverses(algebra):
        subalg, _ = algebra.subalgebra(sub, name=f"{algebra.name}|{''.join(map(str, sub))}")
        add(subalg, sub, None)
        for theta in all_congruences(subalg, caps):
            if theta.nblocks == subalg.size:
                continue  # equality quotient is the subalgebra itself
            quo, _ = quotient(subalg, theta)
            quo = quo.rename(f"{subalg.name}/{theta.blocks_str()}")
            add(quo, sub, theta.block_id)
    return members
