"""Vectorized closure of term-operation fragments.

A k-ary term operation of a class of similar algebras is represented by its
value row over a fixed column list, where each column is (root index, argument
k-tuple). Closing the k projections under the basic operations applied
column-wise enumerates exactly the realized rows. With the full column set
(all n^k argument tuples of one root) rows are term tables; with the
"section" columns (argument triples holding at most two distinct values) rows
are the profiles consumed by every edge-indicator, thin-edge, and
uniform-operation condition in this package.

The same engine also powers subpower generation: the subuniverse of a product
generated by k tuples is exactly the k-ary clone fragment over the columns
(factor, coordinatewise generator values).

Fragments of quotients, subalgebras, and generated tuple sets are *derived*
from a base fragment by column remapping instead of being re-closed: the term
operations of an H/S image are precisely the induced images of the base
algebra's term operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .caps import Caps, DEFAULT_CAPS
from .errors import SignatureMismatch

_CHUNK = 1 << 16


@dataclass
class CloneFragment:
    roots: tuple
    arity: int
    columns: tuple  # ((root_idx, argtuple), ...)
    rows: np.ndarray  # N x C, uint8
    parents: list | None  # per row: None (projection) or (op_idx, arg row indices)
    complete: bool
    base: object = None  # derived fragments delegate term extraction
    src: np.ndarray | None = None
    col_index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.col_index:
            self.col_index = {col: i for i, col in enumerate(self.columns)}

    def __len__(self) -> int:
        return len(self.rows)

    def value(self, row: int, root_idx: int, args: tuple) -> int:
        return int(self.rows[row, self.col_index[(root_idx, tuple(args))]])

    def term_tree(self, row: int):
        if self.base is not None:
            return self.base.term_tree(int(self.src[row]))
        if self.parents is None:
            raise ValueError("fragment was closed without tracking")

        def build(i, memo):
            if i in memo:
                return memo[i]
            rec = self.parents[i]
            if rec is None:
                node = ("arg", i)
            else:
                op_idx, args = rec
                op_name = self.roots[0].signature()[op_idx][0]
                node = (op_name, tuple(build(j, memo) for j in args))
            memo[i] = node
            return node

        return build(int(row), {})

    def table_on(self, algebra, row: int) -> tuple:
        from .algebra import term_table_on_algebra

        return term_table_on_algebra(self.term_tree(row), algebra, self.arity)


def section_columns(roots) -> tuple:
    """Columns for ternary argument triples with at most two distinct values.

    Patterns (x,y,y), (y,x,y), (y,y,x) over all ordered pairs x != y cover
    every evaluation point used by the clone-quantified conditions and edge
    indicators.
    """
    cols = []
    for r, alg in enumerate(roots):
        for x in range(alg.size):
            for y in range(alg.size):
                if x == y:
                    continue
                cols.append((r, (x, y, y)))
                cols.append((r, (y, x, y)))
                cols.append((r, (y, y, x)))
    return tuple(cols)


def full_columns(roots, arity: int) -> tuple:
    cols = []
    for r, alg in enumerate(roots):
        for args in product(range(alg.size), repeat=arity):
            cols.append((r, args))
    return tuple(cols)


def clone_closure(
    roots,
    arity: int,
    columns,
    caps: Caps = DEFAULT_CAPS,
    track: bool = False,
    row_limit: int | None = None,
    cost_limit: int | None = None,
    generator_rows=None,
) -> CloneFragment:
    """Close the k projections (or explicit generator rows) under column-wise
    basic operations."""
    roots = tuple(roots)
    sig = roots[0].signature()
    for r in roots[1:]:
        if r.signature() != sig:
            raise SignatureMismatch("clone roots must share a signature")
    columns = tuple(columns)
    ncols = len(columns)
    row_limit = row_limit if row_limit is not None else caps.clone_limit
    cost_limit = cost_limit if cost_limit is not None else caps.clone_cost_limit

    root_cols = {}
    for ci, (r, _) in enumerate(columns):
        root_cols.setdefault(r, []).append(ci)
    root_cols = {r: np.asarray(cs) for r, cs in root_cols.items()}

    if generator_rows is None:
        gen_rows = np.zeros((arity, ncols), dtype=np.uint8)
        for ci, (r, args) in enumerate(columns):
            for k in range(arity):
                gen_rows[k, ci] = args[k]
    else:
        gen_rows = np.asarray(generator_rows, dtype=np.uint8).reshape(-1, ncols)

    rows = []
    keys = {}
    parents = [] if track else None

    def add_row(row: np.ndarray, parent) -> bool:
        key = row.tobytes()
        if key in keys:
            return False
        keys[key] = len(rows)
        rows.append(row)
        if track:
            parents.append(parent)
        return True

    for k in range(len(gen_rows)):
        add_row(gen_rows[k].copy(), None)

    def apply_op(op_idx: int, arg_mats) -> np.ndarray:
        out = np.empty((arg_mats[0].shape[0], ncols), dtype=np.uint8)
        for r, cs in root_cols.items():
            n = roots[r].size
            table = roots[r].np_tables[op_idx]
            idx = arg_mats[0][:, cs].astype(np.int64)
            for mat in arg_mats[1:]:
                idx = idx * n + mat[:, cs]
            out[:, cs] = table[idx]
        return out

    cost = 0
    complete = True
    old = 0
    stop = False
    while old < len(rows) and not stop:
        prev, old = old, len(rows)
        mat = np.asarray(rows[:old])
        for op_idx, (_, m) in enumerate(sig):
            if m == 1 or stop:
                continue
            # index blocks with at least one argument in the frontier
            # [prev, old): OLD^i x F x ALL^(m-1-i) telescopes ALL^m - OLD^m
            blocks = [
                tuple(
                    np.arange(prev)
                    if p < i
                    else (np.arange(prev, old) if p == i else np.arange(old))
                    for p in range(m)
                )
                for i in range(m)
            ]
            for block in blocks:
                sizes = [len(ix) for ix in block]
                total = 1
                for s in sizes:
                    total *= s
                if total == 0:
                    continue
                cost += total
                if cost > cost_limit:
                    complete = False
                    stop = True
                    break
                for lo in range(0, total, _CHUNK):
                    hi = min(lo + _CHUNK, total)
                    flat = np.arange(lo, hi)
                    arg_idx = []
                    rest = flat
                    for s in reversed(sizes):
                        arg_idx.append(rest % s)
                        rest = rest // s
                    arg_idx.reverse()
                    gidx = [block[p][arg_idx[p]] for p in range(m)]
                    vals = apply_op(op_idx, [mat[g] for g in gidx])
                    uniq, first = np.unique(vals, axis=0, return_index=True)
                    for u, fi in zip(uniq, first):
                        parent = None
                        if track:
                            parent = (op_idx, tuple(int(g[fi]) for g in gidx))
                        if add_row(u, parent):
                            if len(rows) > row_limit:
                                complete = False
                                stop = True
                                break
                    if stop:
                        break
                if stop:
                    break
            if stop:
                break

    return CloneFragment(roots, arity, columns, np.asarray(rows), parents, complete)


# -- derived fragments ---------------------------------------------------------


def _dedup_rows(mapped: np.ndarray):
    """Unique rows preserving first-occurrence order; returns (rows, src)."""
    uniq, first = np.unique(mapped, axis=0, return_index=True)
    order = np.argsort(first)
    return uniq[order], first[order]


def reroot_fragment(base: CloneFragment, root_idx: int, algebra) -> CloneFragment:
    """View a multi-root fragment as a fragment of the single given root."""
    ci = {
        (0, args): c for (r, args), c in base.col_index.items() if r == root_idx
    }
    return CloneFragment(
        (algebra,), base.arity, (), base.rows, base.parents, base.complete,
        base=base.base, src=base.src, col_index=ci,
    )


def member_fragment(base: CloneFragment, base_root: int, member) -> CloneFragment:
    """Section fragment of an H/S member, derived from its root's fragment.

    `member` provides rep_root (member element -> root representative) and
    class_of_root (root element -> member element).
    """
    size = member.algebra.size
    root = base.roots[base_root]
    clsmap = np.full(root.size, 0, dtype=np.uint8)
    for r, c in member.class_of_root.items():
        clsmap[r] = c
    columns = section_columns([member.algebra])
    if not columns:
        rows = np.zeros((1, 0), dtype=np.uint8)
        return CloneFragment(
            (member.algebra,), 3, (), rows, None, base.complete,
            base=base, src=np.zeros(1, dtype=np.int64),
        )
    base_cols = np.asarray(
        [
            base.col_index[(base_root, tuple(member.rep_root[a] for a in args))]
            for _, args in columns
        ]
    )
    mapped = clsmap[base.rows[:, base_cols]]
    rows, src = _dedup_rows(mapped)
    return CloneFragment(
        (member.algebra,), 3, columns, rows, None, base.complete,
        base=base, src=src,
    )


def tuple_fragment(base: CloneFragment, factor_roots, tuples, algebra) -> CloneFragment:
    """Section fragment of a materialized closed tuple set.

    `tuples` lists the elements of a subuniverse of a product of base roots
    (coordinate i drawn from base root factor_roots[i]); `algebra` is its
    materialization with element i = tuples[i].
    """
    index = {t: i for i, t in enumerate(tuples)}
    k = len(factor_roots)
    columns = section_columns([algebra])
    if not columns:
        rows = np.zeros((1, 0), dtype=np.uint8)
        return CloneFragment(
            (algebra,), 3, (), rows, None, base.complete,
            base=base, src=np.zeros(1, dtype=np.int64),
        )
    nbase = len(base.rows)
    mapped = np.empty((nbase, len(columns)), dtype=np.uint8)
    vals = np.empty((nbase, k), dtype=np.int64)
    code_of = {}
    for t, i in index.items():
        code = t[0]
        for ci in range(1, k):
            code = code * base.roots[factor_roots[ci]].size + t[ci]
        code_of[code] = i
    known = np.asarray(sorted(code_of))
    local = np.asarray([code_of[c] for c in known], dtype=np.uint8)
    for cj, (_, args) in enumerate(columns):
        ta, tb, tc = (tuples[a] for a in args)
        for ci in range(k):
            triple = (ta[ci], tb[ci], tc[ci])
            if len(set(triple)) == 1:
                vals[:, ci] = triple[0]
            else:
                vals[:, ci] = base.rows[:, base.col_index[(factor_roots[ci], triple)]]
        # encode coordinatewise values and map back to local indices
        codes = vals[:, 0].copy()
        for ci in range(1, k):
            codes = codes * base.roots[factor_roots[ci]].size + vals[:, ci]
        pos = np.searchsorted(known, codes)
        mapped[:, cj] = local[pos]
    rows, src = _dedup_rows(mapped)
    return CloneFragment(
        (algebra,), 3, columns, rows, None, base.complete, base=base, src=src
    )
