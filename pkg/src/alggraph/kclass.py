"""Algebra classes closed under subalgebras and homomorphic images.

Thin majority/affine edges are defined relative to a finite class K of smooth
algebras closed under H and S: the quantified conditions range over the
ternary term operations of the class that satisfy certain identities plus
majority (resp. Mal'tsev) behavior on every thick majority (resp. affine)
edge of every member. This module materializes such a class from its root
algebras, enumerates the relevant clone fragments as section profiles, and
precomputes the condition masks.

Every evaluation a condition needs factors through root-level columns: a
member is a quotient of a subalgebra of a root, so the induced value of a
class term on member classes is the class of its value on root
representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .algebra import FiniteAlgebra, hs_class, validate_algebra
from .caps import Caps, DEFAULT_CAPS
from .clone import CloneFragment, clone_closure, full_columns, section_columns
from .edges import edge_graph, is_smooth
from .errors import SearchExhausted, SignatureMismatch


@dataclass
class KMember:
    """A concrete member: quotient of a subalgebra of a root."""

    algebra: FiniteAlgebra
    root_idx: int
    sub: tuple  # subuniverse, root coordinates
    theta: tuple | None  # block ids over sub-local indices, None = subalgebra
    rep_root: tuple  # member element -> root representative
    class_of_root: dict  # root element (in sub) -> member element

    @property
    def size(self) -> int:
        return self.algebra.size

    def preimage(self, member_elems) -> frozenset:
        """Root elements whose member class lies in the given set."""
        want = set(member_elems)
        return frozenset(r for r, c in self.class_of_root.items() if c in want)


def _make_member(root_idx: int, root: FiniteAlgebra, sub, theta, algebra) -> KMember:
    if theta is None:
        rep = tuple(sub)
        cls = {r: i for i, r in enumerate(sub)}
    else:
        nblocks = max(theta) + 1
        rep = tuple(sub[theta.index(c)] for c in range(nblocks))
        cls = {sub[j]: theta[j] for j in range(len(sub))}
    return KMember(algebra, root_idx, tuple(sub), theta, rep, cls)


class AlgebraClass:
    """A finite class of similar algebras closed under H and S."""

    def __init__(self, roots, caps: Caps = DEFAULT_CAPS):
        roots = tuple(validate_algebra(r) for r in roots)
        sig = roots[0].signature()
        for r in roots[1:]:
            if r.signature() != sig:
                raise SignatureMismatch("class roots must share a signature")
        self.roots = roots
        self.caps = caps
        self.members = []
        self._root_member = {}
        for ri, root in enumerate(roots):
            for hm in hs_class(root, caps):
                member = _make_member(ri, root, hm.sub, hm.theta, hm.algebra)
                if hm.theta is None and len(hm.sub) == root.size:
                    self._root_member[ri] = len(self.members)
                self.members.append(member)

    @classmethod
    def hs(cls, algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> "AlgebraClass":
        """The default class HS(A)."""
        return cls([algebra], caps)

    def root_index(self, algebra: FiniteAlgebra) -> int:
        for i, r in enumerate(self.roots):
            if r is algebra or (
                r.size == algebra.size
                and r.signature() == algebra.signature()
                and all(
                    a.table == b.table for a, b in zip(r.operations, algebra.operations)
                )
            ):
                return i
        raise ValueError(f"algebra {algebra.name!r} is not a root of this class")

    def member_for_root(self, root_idx: int) -> int:
        return self._root_member[root_idx]

    def member_for_sub(self, root_idx: int, sub) -> int:
        """Member index of the subalgebra on `sub` (roots coordinates)."""
        sub = tuple(sorted(sub))
        for i, m in enumerate(self.members):
            if m.root_idx == root_idx and m.sub == sub and m.theta is None:
                return i
        raise ValueError(f"{sub} is not a subuniverse of root {root_idx}")

    def member_for_quotient(self, root_idx: int, theta_blocks: tuple) -> int:
        """Member index of root/theta (theta as normalized block-id tuple)."""
        root = self.roots[root_idx]
        full_sub = tuple(range(root.size))
        for i, m in enumerate(self.members):
            if m.root_idx == root_idx and m.sub == full_sub and m.theta == tuple(theta_blocks):
                return i
        raise ValueError("quotient is not an HS member (is theta a congruence?)")

    # -- thick edges and smoothness --------------------------------------

    @cached_property
    def member_fragments(self) -> list:
        from .clone import member_fragment

        return [
            member_fragment(self._sections, m.root_idx, m) if m.size > 1 else None
            for m in self.members
        ]

    @cached_property
    def member_records(self) -> list:
        return [
            edge_graph(m.algebra, self.caps, fragment=frag) if m.size > 1 else []
            for m, frag in zip(self.members, self.member_fragments)
        ]

    @cached_property
    def smoothness(self) -> tuple:
        """(all members smooth?, first counterexample description or None)."""
        for m, recs in zip(self.members, self.member_records):
            rep = is_smooth(m.algebra, self.caps, records=recs)
            if not rep.smooth:
                pair, blocks, op, args = rep.counterexamples[0]
                return False, {
                    "member": m.algebra.name,
                    "pair": list(pair),
                    "op": op,
                    "args": list(args),
                }
        return True, None

    def all_smooth(self) -> bool:
        return self.smoothness[0]

    def roots_omit_type1(self) -> bool:
        # HS members inherit type-1 omission from their root, so the root
        # check suffices
        return all(
            rec.resolved_type != "unary"
            for ri in range(len(self.roots))
            for rec in self.member_records[self.member_for_root(ri)]
        )

    def thick_edges(self, kind: str) -> list:
        """(member_idx, pair, theta blocks) for type-`kind` edges.

        A thick `kind` edge is a pair whose resolved type is `kind` together
        with a congruence whose `kind` indicator holds.
        """
        out = []
        for mi, recs in enumerate(self.member_records):
            for rec in recs:
                if rec.resolved_type != kind:
                    continue
                for wit in rec.witnesses:
                    if wit.indicators[kind]:
                        out.append((mi, (rec.a, rec.b), wit.theta_blocks))
        return out

    # -- clone fragments ---------------------------------------------------

    @cached_property
    def _sections(self) -> CloneFragment:
        return clone_closure(
            self.roots, 3, section_columns(self.roots), self.caps, track=True
        )

    def sections(self) -> CloneFragment:
        return self._sections

    @cached_property
    def _binary(self) -> CloneFragment:
        return clone_closure(
            self.roots, 2, full_columns(self.roots, 2), self.caps, track=True
        )

    def binary_fragment(self) -> CloneFragment:
        return self._binary

    def col(self, root_idx: int, args: tuple) -> int:
        return self._sections.col_index[(root_idx, args)]

    # -- identity masks ----------------------------------------------------

    @cached_property
    def _identity2_mask(self) -> np.ndarray:
        """g(x, g(x,y,y), g(x,y,y)) = g(x,y,y) on every root."""
        rows = self._sections.rows
        nrows = len(rows)
        ok = np.ones(nrows, dtype=bool)
        ar = np.arange(nrows)
        for r, root in enumerate(self.roots):
            n = root.size
            colmap = np.full((n, n), -1, dtype=np.int64)
            for x in range(n):
                for w in range(n):
                    if x != w:
                        colmap[x, w] = self.col(r, (x, w, w))
            for x in range(n):
                for y in range(n):
                    if x == y:
                        continue
                    w = rows[:, self.col(r, (x, y, y))].astype(np.int64)
                    cw = colmap[x][w]
                    valid = cw >= 0
                    vals = rows[ar, np.where(valid, cw, 0)]
                    ok &= ~valid | (vals == w)
        return ok

    def identity2_mask(self) -> np.ndarray:
        return self._identity2_mask.copy()

    @cached_property
    def _identity3_mask(self) -> np.ndarray:
        """h(h(x,y,y), y, y) = h(x,y,y) on every root."""
        rows = self._sections.rows
        nrows = len(rows)
        ok = np.ones(nrows, dtype=bool)
        ar = np.arange(nrows)
        for r, root in enumerate(self.roots):
            n = root.size
            colmap = np.full((n, n), -1, dtype=np.int64)
            for w in range(n):
                for y in range(n):
                    if w != y:
                        colmap[w, y] = self.col(r, (w, y, y))
            for x in range(n):
                for y in range(n):
                    if x == y:
                        continue
                    w = rows[:, self.col(r, (x, y, y))].astype(np.int64)
                    cw = colmap[w, y]
                    valid = cw >= 0
                    vals = rows[ar, np.where(valid, cw, 0)]
                    ok &= ~valid | (vals == w)
        return ok

    def identity3_mask(self) -> np.ndarray:
        return self._identity3_mask.copy()

    # -- condition constraint masks -----------------------------------------

    def _apply_constraints(self, mask: np.ndarray, constraints) -> np.ndarray:
        rows = self._sections.rows
        for col, allowed in constraints:
            mask &= np.isin(rows[:, col], np.asarray(sorted(allowed), dtype=np.uint8))
        return mask

    def _majority_edge_constraints(self):
        out = []
        for mi, (u, v), blocks in self.thick_edges("majority"):
            m = self.members[mi]
            ub = next(b for b in blocks if u in b)
            vb = next(b for b in blocks if v in b)
            ru, rv = m.rep_root[u], m.rep_root[v]
            pu, pv = m.preimage(ub), m.preimage(vb)
            r = m.root_idx
            out += [
                (self.col(r, (rv, ru, ru)), pu),
                (self.col(r, (ru, rv, ru)), pu),
                (self.col(r, (ru, ru, rv)), pu),
                (self.col(r, (ru, rv, rv)), pv),
                (self.col(r, (rv, ru, rv)), pv),
                (self.col(r, (rv, rv, ru)), pv),
            ]
        return out

    def _affine_edge_constraints(self):
        out = []
        for mi, (u, v), blocks in self.thick_edges("affine"):
            m = self.members[mi]
            r = m.root_idx
            for xb in blocks:
                for yb in blocks:
                    if xb == yb:
                        continue
                    rx, ry = m.rep_root[xb[0]], m.rep_root[yb[0]]
                    px = m.preimage(xb)
                    out.append((self.col(r, (rx, ry, ry)), px))
                    out.append((self.col(r, (ry, ry, rx)), px))
        return out

    @cached_property
    def _majority_rows(self) -> np.ndarray:
        mask = self.identity2_mask()
        mask = self._apply_constraints(mask, self._majority_edge_constraints())
        rows = np.flatnonzero(mask)
        if len(rows) == 0 and self._sections.complete and self.all_smooth():
            raise SearchExhausted(
                "no operation satisfies the majority condition for an all-smooth "
                "class with a complete clone fragment"
            )
        return rows

    @cached_property
    def _minority_rows(self) -> np.ndarray:
        mask = self.identity3_mask()
        mask = self._apply_constraints(mask, self._affine_edge_constraints())
        rows = np.flatnonzero(mask)
        if len(rows) == 0 and self._sections.complete and self.all_smooth():
            raise SearchExhausted(
                "no operation satisfies the minority condition for an all-smooth "
                "class with a complete clone fragment"
            )
        return rows

    def majority_ops(self) -> tuple:
        """(row indices into sections(), complete flag)."""
        return self._majority_rows, self._sections.complete

    def minority_ops(self) -> tuple:
        return self._minority_rows, self._sections.complete

    def _least_row(self, candidates: np.ndarray):
        best, key = None, None
        rows = self._sections.rows
        for i in candidates:
            k = rows[i].tobytes()
            if key is None or k < key:
                best, key = int(i), k
        return best

    @cached_property
    def canonical_g(self):
        rows, _ = self.majority_ops()
        return self._least_row(rows)

    @cached_property
    def fixed_h(self):
        """The fixed operation of the thin-affine definition: lexicographically
        least section profile among minority-condition operations."""
        rows, _ = self.minority_ops()
        return self._least_row(rows)

    # -- thin semilattice edges of members (class-independent) ---------------

    @cached_property
    def _member_thin_sem(self) -> list:
        rows = self._sections.rows
        out = []
        for m in self.members:
            edges = set()
            r = m.root_idx
            for a in range(m.size):
                pa = np.asarray(sorted(m.preimage({a})), dtype=np.uint8)
                for b in range(m.size):
                    if a == b:
                        continue
                    pb = np.asarray(sorted(m.preimage({b})), dtype=np.uint8)
                    ra, rb = m.rep_root[a], m.rep_root[b]
                    mask = np.isin(
                        rows[:, self.col(r, (ra, rb, rb))], pb
                    ) & np.isin(rows[:, self.col(r, (rb, ra, ra))], pb)
                    if mask.any():
                        edges.add((a, b))
            out.append(edges)
        return out

    def member_thin_sem(self, member_idx: int) -> set:
        return self._member_thin_sem[member_idx]

    # -- uniform-operation masks (Theorem-3-style searches) ------------------

    def uniform_f_mask(self) -> np.ndarray:
        frag = self._binary
        rows = frag.rows
        nrows = len(rows)
        ok = np.ones(nrows, dtype=bool)
        ar = np.arange(nrows)
        # f(x, f(x,y)) = f(x,y) on roots
        for r, root in enumerate(self.roots):
            n = root.size
            colmap = np.zeros((n, n), dtype=np.int64)
            for x in range(n):
                for w in range(n):
                    colmap[x, w] = frag.col_index[(r, (x, w))]
            for x in range(n):
                for y in range(n):
                    w = rows[:, frag.col_index[(r, (x, y))]].astype(np.int64)
                    ok &= rows[ar, colmap[x][w]] == w
        # semilattice edges: commutative with value in the two classes
        for mi, (u, v), blocks in self.thick_edges("semilattice"):
            m = self.members[mi]
            r = m.root_idx
            ub = next(b for b in blocks if u in b)
            vb = next(b for b in blocks if v in b)
            ru, rv = m.rep_root[u], m.rep_root[v]
            c1 = frag.col_index[(r, (ru, rv))]
            c2 = frag.col_index[(r, (rv, ru))]
            clsmap = np.full(self.roots[r].size, -1, dtype=np.int64)
            for w in m.preimage(ub):
                clsmap[w] = 0
            for w in m.preimage(vb):
                clsmap[w] = 1
            m1 = clsmap[rows[:, c1].astype(np.int64)]
            m2 = clsmap[rows[:, c2].astype(np.int64)]
            ok &= (m1 >= 0) & (m1 == m2)
        # majority/affine edges: first projection on the two classes
        for kind in ("majority", "affine"):
            for mi, (u, v), blocks in self.thick_edges(kind):
                m = self.members[mi]
                r = m.root_idx
                ub = next(b for b in blocks if u in b)
                vb = next(b for b in blocks if v in b)
                ru, rv = m.rep_root[u], m.rep_root[v]
                for (x, y), tgt in (((ru, rv), ub), ((rv, ru), vb)):
                    col = frag.col_index[(r, (x, y))]
                    allowed = np.asarray(sorted(m.preimage(tgt)), dtype=np.uint8)
                    ok &= np.isin(rows[:, col], allowed)
        # every value f(a,b) is a or one thin-semilattice step above a
        for mi, m in enumerate(self.members):
            thin = self.member_thin_sem(mi)
            r = m.root_idx
            for a in range(m.size):
                heads = {a} | {b for (x, b) in thin if x == a}
                allowed = np.asarray(sorted(m.preimage(heads)), dtype=np.uint8)
                for b in range(m.size):
                    if a == b:
                        continue
                    col = frag.col_index[(r, (m.rep_root[a], m.rep_root[b]))]
                    ok &= np.isin(rows[:, col], allowed)
        return ok

    def _f_class_value(self, f_row: int, member: KMember, x: int, y: int) -> int:
        """Class-level value of the chosen f on member elements x, y."""
        frag = self._binary
        root_val = int(
            frag.rows[f_row, frag.col_index[(member.root_idx, (member.rep_root[x], member.rep_root[y]))]]
        )
        return member.class_of_root[root_val]

    def _sem_composite_constraints(self, f_row: int):
        """g(x,y,z) = f(x, f(y,z)) on the classes of semilattice thick edges.

        Blocks are identified by a representative member element; the chosen f
        already maps both mixed pairs into the two blocks, so the composite
        target is always one of them (an empty allowed set otherwise keeps the
        constraint honest).
        """
        out = []
        for mi, (u, v), blocks in self.thick_edges("semilattice"):
            m = self.members[mi]
            r = m.root_idx
            ub = next(b for b in blocks if u in b)
            vb = next(b for b in blocks if v in b)
            ub_set, vb_set = set(ub), set(vb)

            def block_of(w):
                if w in ub_set:
                    return ub
                if w in vb_set:
                    return vb
                return None

            def fbar(xblk, yblk):
                if xblk is None or yblk is None:
                    return None
                return block_of(self._f_class_value(f_row, m, xblk[0], yblk[0]))

            for xs in product((ub, vb), repeat=3):
                if xs[0] is xs[1] is xs[2]:
                    continue
                tgt = fbar(xs[0], fbar(xs[1], xs[2]))
                allowed = m.preimage(tgt) if tgt is not None else frozenset()
                args = tuple(m.rep_root[blk[0]] for blk in xs)
                out.append((self.col(r, args), allowed))
        return out

    def _proj1_constraints(self, kind: str):
        """g(x,y,z) = x on the classes of `kind` thick edges."""
        out = []
        for mi, (u, v), blocks in self.thick_edges(kind):
            m = self.members[mi]
            r = m.root_idx
            ub = next(b for b in blocks if u in b)
            vb = next(b for b in blocks if v in b)
            for xs in product((ub, vb), repeat=3):
                if xs[0] is xs[1] is xs[2]:
                    continue
                args = tuple(m.rep_root[blk[0]] for blk in xs)
                out.append((self.col(r, args), m.preimage(xs[0])))
        return out

    @cached_property
    def canonical_f(self):
        """The fixed binary operation behind the order a <= b: the
        lexicographically least binary class term satisfying the uniform-f
        conditions (semilattice on semilattice thick edges, first projection
        on majority/affine ones, the absorption identity, and the
        one-step-up property). Thin semilattice edges of the three digraphs
        are the pairs with f(a,b) = f(b,a) = b for this f."""
        frag = self._binary
        mask = self.uniform_f_mask()
        best, key = None, None
        for i in np.flatnonzero(mask):
            k = frag.rows[i].tobytes()
            if key is None or k < key:
                best, key = int(i), k
        return best

    def require_canonical_f(self) -> int:
        from .errors import CloneTruncated

        f_row = self.canonical_f
        if f_row is None:
            if self._binary.complete and self.all_smooth():
                raise SearchExhausted(
                    "no binary operation satisfies the uniform conditions for "
                    "an all-smooth class with a complete binary fragment"
                )
            raise CloneTruncated(
                "binary clone fragment truncated before a uniform f was found"
            )
        return f_row

    def f_value_root(self, root_idx: int, x: int, y: int) -> int:
        frag = self._binary
        return int(frag.rows[self.require_canonical_f(), frag.col_index[(root_idx, (x, y))]])

    def uniform_g_mask(self, f_row: int) -> np.ndarray:
        mask = self.identity2_mask()
        mask = self._apply_constraints(mask, self._majority_edge_constraints())
        mask = self._apply_constraints(mask, self._proj1_constraints("affine"))
        mask = self._apply_constraints(mask, self._sem_composite_constraints(f_row))
        return mask

    def uniform_h_mask(self, f_row: int) -> np.ndarray:
        mask = self.identity3_mask()
        mask = self._apply_constraints(mask, self._affine_edge_constraints())
        mask = self._apply_constraints(mask, self._proj1_constraints("majority"))
        mask = self._apply_constraints(mask, self._sem_composite_constraints(f_row))
        return mask
