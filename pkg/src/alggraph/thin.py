"""Thin edges, the three connectivity digraphs, and their verifiers.

Thin edges are directed. A thin semilattice edge a->b has a binary term with
f(a,b)=f(b,a)=b. Thin majority and affine edges are defined relative to an
algebra class K (see kclass): the membership conditions quantify over all
ternary class terms satisfying the majority resp. minority condition. G_s
carries the thin semilattice edges, G_as additionally the thin affine edges,
G_asm all thin edges; maximal strongly connected components of the three
digraphs give the maximal / as-maximal / u-maximal elements.

Everything here works uniformly on three kinds of carriers: a root algebra of
the class, an HS member (quotient of a subalgebra), and a subpower of root
algebras (tuples under coordinatewise operations).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .algebra import (
    FiniteAlgebra,
    OpTable,
    Subpower,
    subpower_generate,
    term_table_on_algebra,
)
from .caps import Caps, DEFAULT_CAPS
from .congruence import Partition
from .edges import classify_pair, is_smooth
from .errors import CapExceeded, CloneTruncated
from .kclass import AlgebraClass


def term_to_str(tree) -> str:
    names = "xyz"
    if tree[0] == "arg" and isinstance(tree[1], int) and len(tree) == 2:
        return names[tree[1]] if tree[1] < 3 else f"arg{tree[1]}"
    op, children = tree
    return f"{op}({', '.join(term_to_str(c) for c in children)})"


# -- carrier views ------------------------------------------------------------


class RootView:
    """A root algebra of the class."""

    def __init__(self, kclass: AlgebraClass, root_idx: int):
        self.kclass = kclass
        self.root_idx = root_idx
        self.algebra = kclass.roots[root_idx]
        self._sg_cache = {}

    def elements(self) -> list:
        return list(range(self.algebra.size))

    def label(self, e) -> str:
        return str(e)

    def sg(self, seed) -> frozenset:
        key = frozenset(seed)
        if key not in self._sg_cache:
            from .algebra import sg_closure

            self._sg_cache[key] = frozenset(sg_closure(self.algebra, key).members)
        return self._sg_cache[key]

    def pattern_values(self, rows_idx, args) -> list:
        if len(set(args)) == 1:
            return [args[0]]
        col = self.kclass.col(self.root_idx, tuple(args))
        vals = np.unique(self.kclass.sections().rows[rows_idx, col])
        return [int(v) for v in vals]

    def pattern_value_single(self, row, args) -> int:
        if len(set(args)) == 1:
            return args[0]
        return self.kclass.sections().value(row, self.root_idx, tuple(args))

    def sem_hit(self, a, b):
        """Row index of a term with t(a,b,b) = t(b,a,a) = b, or None."""
        rows = self.kclass.sections().rows
        mask = (rows[:, self.kclass.col(self.root_idx, (a, b, b))] == b) & (
            rows[:, self.kclass.col(self.root_idx, (b, a, a))] == b
        )
        hits = np.flatnonzero(mask)
        return int(hits[0]) if len(hits) else None

    def canonical_sem(self, a, b) -> bool:
        return (
            self.kclass.f_value_root(self.root_idx, a, b) == b
            and self.kclass.f_value_root(self.root_idx, b, a) == b
        )

    def pair_algebra(self, a, b):
        from .clone import reroot_fragment

        frag = reroot_fragment(self.kclass.sections(), self.root_idx, self.algebra)
        return self.algebra, a, b, frag


class MemberView:
    """An HS member of the class (quotient of a subalgebra of a root)."""

    def __init__(self, kclass: AlgebraClass, member_idx: int):
        self.kclass = kclass
        self.member_idx = member_idx
        self.member = kclass.members[member_idx]
        self.algebra = self.member.algebra
        root = kclass.roots[self.member.root_idx]
        self._clsmap = np.full(root.size, -1, dtype=np.int64)
        for r, c in self.member.class_of_root.items():
            self._clsmap[r] = c
        self._sg_cache = {}

    def elements(self) -> list:
        return list(range(self.algebra.size))

    def label(self, e) -> str:
        return str(e)

    def sg(self, seed) -> frozenset:
        key = frozenset(seed)
        if key not in self._sg_cache:
            from .algebra import sg_closure

            self._sg_cache[key] = frozenset(sg_closure(self.algebra, key).members)
        return self._sg_cache[key]

    def _root_args(self, args):
        return tuple(self.member.rep_root[a] for a in args)

    def pattern_values(self, rows_idx, args) -> list:
        if len(set(args)) == 1:
            return [args[0]]
        col = self.kclass.col(self.member.root_idx, self._root_args(args))
        vals = np.unique(self.kclass.sections().rows[rows_idx, col])
        return [int(self._clsmap[v]) for v in np.unique(vals)]

    def pattern_value_single(self, row, args) -> int:
        if len(set(args)) == 1:
            return args[0]
        v = self.kclass.sections().value(
            row, self.member.root_idx, self._root_args(args)
        )
        return int(self._clsmap[v])

    def sem_hit(self, a, b):
        rows = self.kclass.sections().rows
        pb = np.asarray(sorted(self.member.preimage({b})), dtype=np.uint8)
        r = self.member.root_idx
        ra, rb = self.member.rep_root[a], self.member.rep_root[b]
        mask = np.isin(rows[:, self.kclass.col(r, (ra, rb, rb))], pb) & np.isin(
            rows[:, self.kclass.col(r, (rb, ra, ra))], pb
        )
        hits = np.flatnonzero(mask)
        return int(hits[0]) if len(hits) else None

    def canonical_sem(self, a, b) -> bool:
        m = self.member
        ra, rb = m.rep_root[a], m.rep_root[b]
        v1 = m.class_of_root[self.kclass.f_value_root(m.root_idx, ra, rb)]
        v2 = m.class_of_root[self.kclass.f_value_root(m.root_idx, rb, ra)]
        return v1 == b and v2 == b

    def pair_algebra(self, a, b):
        return self.algebra, a, b, self.kclass.member_fragments[self.member_idx]


class SubpowerView:
    """A subpower of root algebras; elements are tuples."""

    def __init__(self, kclass: AlgebraClass, rel: Subpower):
        self.kclass = kclass
        self.rel = rel
        self.factor_roots = [kclass.root_index(f) for f in rel.factors]
        self._sg_cache = {}

    def elements(self) -> list:
        return list(self.rel.tuples)

    def label(self, e) -> str:
        return "".join(map(str, e))

    def sg(self, seed) -> frozenset:
        key = frozenset(seed)
        if key not in self._sg_cache:
            power = subpower_generate(
                self.rel.factors, sorted(key), caps=self.kclass.caps
            )
            self._sg_cache[key] = frozenset(power.tuples)
        return self._sg_cache[key]

    def pattern_values(self, rows_idx, args) -> list:
        a1, a2, a3 = args
        if a1 == a2 == a3:
            return [a1]
        rows = self.kclass.sections().rows
        k = len(self.factor_roots)
        out = np.empty((len(rows_idx), k), dtype=np.uint8)
        for ci, r in enumerate(self.factor_roots):
            triple = (a1[ci], a2[ci], a3[ci])
            if len(set(triple)) == 1:
                out[:, ci] = triple[0]
            else:
                out[:, ci] = rows[rows_idx, self.kclass.col(r, triple)]
        uniq = np.unique(out, axis=0)
        return [tuple(int(v) for v in row) for row in uniq]

    def pattern_value_single(self, row, args):
        a1, a2, a3 = args
        out = []
        for ci, r in enumerate(self.factor_roots):
            triple = (a1[ci], a2[ci], a3[ci])
            if len(set(triple)) == 1:
                out.append(triple[0])
            else:
                out.append(self.kclass.sections().value(row, r, triple))
        return tuple(out)

    def sem_hit(self, a, b):
        rows = self.kclass.sections().rows
        mask = np.ones(len(rows), dtype=bool)
        for pattern in ((a, b, b), (b, a, a)):
            for ci, r in enumerate(self.factor_roots):
                triple = tuple(p[ci] for p in pattern)
                if len(set(triple)) == 1:
                    continue
                mask &= rows[:, self.kclass.col(r, triple)] == b[ci]
        hits = np.flatnonzero(mask)
        return int(hits[0]) if len(hits) else None

    def canonical_sem(self, a, b) -> bool:
        for ci, r in enumerate(self.factor_roots):
            if self.kclass.f_value_root(r, a[ci], b[ci]) != b[ci]:
                return False
            if self.kclass.f_value_root(r, b[ci], a[ci]) != b[ci]:
                return False
        return True

    def pair_algebra(self, a, b):
        from .clone import tuple_fragment

        members = sorted(self.sg({a, b}))
        alg = materialize_tuples(self.rel.factors, members,
                                 name=f"sg{self.label(a)}-{self.label(b)}")
        index = {t: i for i, t in enumerate(members)}
        frag = tuple_fragment(
            self.kclass.sections(), self.factor_roots, members, alg
        )
        return alg, index[tuple(a)], index[tuple(b)], frag


def materialize_tuples(factors, tuples, name="rel") -> FiniteAlgebra:
    """Induced algebra on a closed set of product tuples."""
    index = {t: i for i, t in enumerate(tuples)}
    size = len(tuples)
    sig = factors[0].signature()
    ops = []
    for oi, (op_name, arity) in enumerate(sig):
        if size**arity > 5_000_000:
            raise CapExceeded("materialized relation table", 5_000_000)
        table = []
        for args in product(range(size), repeat=arity):
            vals = [tuples[i] for i in args]
            res = tuple(
                f.apply(oi, tuple(v[ci] for v in vals))
                for ci, f in enumerate(factors)
            )
            table.append(index[res])
        ops.append(OpTable(op_name, arity, tuple(table)))
    return FiniteAlgebra(name, size, tuple(ops))


def view_for(kclass: AlgebraClass, target) -> object:
    if isinstance(target, Subpower):
        return SubpowerView(kclass, target)
    if isinstance(target, FiniteAlgebra):
        return RootView(kclass, kclass.root_index(target))
    raise TypeError(f"cannot view {type(target).__name__}")


# -- thin edges ----------------------------------------------------------------


@dataclass
class ThinEdge:
    tail: object
    head: object
    type: str  # semilattice | majority | affine
    special: bool | None = None  # majority edges only, computed on demand
    certainty: str = "exact"
    witness: dict = field(default_factory=dict)

    def key(self):
        return (self.tail, self.head, self.type)

    def to_json_dict(self, label=str):
        out = {
            "tail": label(self.tail),
            "head": label(self.head),
            "type": self.type,
            "certainty": self.certainty,
        }
        if self.special is not None:
            out["special"] = self.special
        if "term" in self.witness:
            out["witness_term"] = term_to_str(self.witness["term"])
        return out


def thin_semilattice_edges(target, kclass: AlgebraClass | None = None,
                           caps: Caps = DEFAULT_CAPS) -> list:
    """All ordered pairs (a,b) with (b,b) in Sg{(a,b),(b,a)}; always exact.

    This is the term-existence notion. The digraphs order elements by the
    fixed class operation instead (see thin_edges): on a pair carrying
    semilattice terms in both directions, only the direction absorbed by the
    fixed operation yields a graph edge.
    """
    if kclass is None:
        if isinstance(target, FiniteAlgebra):
            kclass = AlgebraClass.hs(target, caps)
        else:
            kclass = AlgebraClass(_unique_factors(target.factors), caps)
    view = target if _is_view(target) else view_for(kclass, target)
    return _sem_edges(view)


def _is_view(obj) -> bool:
    return isinstance(obj, (RootView, MemberView, SubpowerView))


def _unique_factors(factors):
    uniq = []
    for f in factors:
        if not any(
            f.size == g.size
            and f.signature() == g.signature()
            and all(a.table == b.table for a, b in zip(f.operations, g.operations))
            for g in uniq
        ):
            uniq.append(f)
    return uniq


def _sem_edges(view) -> list:
    from .edges import substitute_args

    edges = []
    frag = view.kclass.sections()
    for a in view.elements():
        for b in view.elements():
            if a == b:
                continue
            hit = view.sem_hit(a, b)
            if hit is not None:
                tree = substitute_args(frag.term_tree(hit), {2: 1})
                edges.append(ThinEdge(a, b, "semilattice", witness={"term": tree}))
    return edges


def _sem_edges_canonical(view) -> list:
    """Graph semilattice edges: a <= b iff f(a,b) = f(b,a) = b for the fixed
    class operation f."""
    kclass = view.kclass
    f_row = kclass.require_canonical_f()
    f_term = kclass.binary_fragment().term_tree(f_row)
    edges = []
    for a in view.elements():
        for b in view.elements():
            if a == b:
                continue
            if view.canonical_sem(a, b):
                edges.append(ThinEdge(a, b, "semilattice", witness={"term": f_term}))
    return edges


def _majority_edges(view, mode: str) -> list:
    kclass = view.kclass
    rows_idx, complete = kclass.majority_ops()
    if mode == "exact" and not complete:
        raise CloneTruncated("ternary clone fragment truncated; exact mode refused")
    if mode == "witness":
        rows_idx = [kclass.canonical_g] if kclass.canonical_g is not None else []
    certainty = "exact" if mode == "exact" else "witness-mode"
    edges = []
    rows_idx = np.asarray(rows_idx, dtype=np.int64)
    for a in view.elements():
        for b in view.elements():
            if a == b:
                continue
            ok = True
            for pattern in ((a, b, b), (b, a, b), (b, b, a)):
                if len(rows_idx) == 0:
                    break
                for v in view.pattern_values(rows_idx, pattern):
                    if b not in view.sg({a, v}):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                edges.append(ThinEdge(a, b, "majority", certainty=certainty))
    return edges


def _affine_edges(view, mode: str) -> list:
    kclass = view.kclass
    rows_idx, complete = kclass.minority_ops()
    if mode == "exact" and not complete:
        raise CloneTruncated("ternary clone fragment truncated; exact mode refused")
    fixed = kclass.fixed_h
    if fixed is None:
        return []
    check_rows = rows_idx if mode == "exact" else np.asarray([fixed])
    certainty = "exact" if mode == "exact" else "witness-mode"
    edges = []
    check_rows = np.asarray(check_rows, dtype=np.int64)
    for a in view.elements():
        for b in view.elements():
            if a == b:
                continue
            if view.pattern_value_single(fixed, (b, a, a)) != b:
                continue
            ok = True
            for v in view.pattern_values(check_rows, (a, a, b)):
                if b not in view.sg({a, v}):
                    ok = False
                    break
            if ok:
                edges.append(
                    ThinEdge(a, b, "affine", certainty=certainty,
                             witness={"h_row": int(fixed)})
                )
    return edges


def thin_majority_edges(target, kclass: AlgebraClass, mode: str = "exact") -> list:
    view = target if _is_view(target) else view_for(kclass, target)
    return _majority_edges(view, mode)


def thin_affine_edges(target, kclass: AlgebraClass, mode: str = "exact") -> list:
    view = target if _is_view(target) else view_for(kclass, target)
    return _affine_edges(view, mode)


def special_flag(target, a, b, kclass: AlgebraClass, caps: Caps = DEFAULT_CAPS) -> bool:
    """Whether the thin majority edge (a,b) is special: the pair is a thick
    majority edge with a witnessing congruence making (a,b) a minimal pair."""
    view = target if _is_view(target) else view_for(kclass, target)
    alg, la, lb, frag = view.pair_algebra(a, b)
    rec = classify_pair(alg, la, lb, caps, fragment=frag)
    if rec.resolved_type != "majority":
        return False
    from .algebra import sg_closure

    for wit in rec.witnesses:
        if not wit.indicators["majority"]:
            continue
        b_block = next(blk for blk in wit.theta_blocks if lb in blk)
        if all(
            lb in sg_closure(alg, (la, bp)).members for bp in b_block
        ):
            return True
    return False


def thin_edges(target, kclass: AlgebraClass | None = None, mode: str = "exact",
               with_special: bool = False, caps: Caps = DEFAULT_CAPS) -> list:
    """All thin edges of the target as used by the digraphs, optionally with
    special flags resolved. Semilattice edges are taken relative to the fixed
    class operation."""
    if kclass is None:
        if isinstance(target, FiniteAlgebra):
            kclass = AlgebraClass.hs(target, caps)
        else:
            kclass = AlgebraClass(_unique_factors(target.factors), caps)
    view = target if _is_view(target) else view_for(kclass, target)
    edges = (
        _sem_edges_canonical(view)
        + _affine_edges(view, mode)
        + _majority_edges(view, mode)
    )
    if with_special:
        for e in edges:
            if e.type == "majority":
                e.special = special_flag(view, e.tail, e.head, kclass, caps)
    return edges


# -- graphs -------------------------------------------------------------------


def strongly_connected_components(n: int, adj) -> list:
    """Tarjan, iterative; returns comp id per vertex (sinks get low ids)."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comp = [-1] * n
    counter = [0]
    ncomp = [0]

    for start in range(n):
        if index[start] != -1:
            continue
        work = [(start, iter(adj[start]))]
        index[start] = low[start] = counter[0]
        counter[0] += 1
        stack.append(start)
        on_stack[start] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp[0]
                    if w == v:
                        break
                ncomp[0] += 1
    return comp


@dataclass
class GraphAnalysis:
    """The three thin-edge digraphs of one carrier with their components."""

    vertices: list
    edges: list  # ThinEdge
    scc_s: list
    scc_as: list
    scc_asm: list
    max_elements: list
    amax_elements: list
    umax_elements: list
    s_order: list  # direct edges between G_s components (tail comp, head comp)
    certainty: str
    _vindex: dict = field(default_factory=dict, repr=False)
    _adj: dict = field(default_factory=dict, repr=False)

    def index(self, v) -> int:
        return self._vindex[v]

    def reach(self, a, b, kind: str) -> bool:
        return self.index(b) in self._reach_set(self.index(a), kind)

    def ft(self, a, kind: str = "s") -> frozenset:
        return frozenset(
            self.vertices[i] for i in self._reach_set(self.index(a), kind)
        )

    def _reach_set(self, i: int, kind: str) -> set:
        cache = self._adj.setdefault("_reach_" + kind, {})
        if i not in cache:
            adj = self._adj[kind]
            seen = {i}
            frontier = [i]
            while frontier:
                v = frontier.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        frontier.append(w)
            cache[i] = seen
        return cache[i]

    def _comp(self, kind: str) -> list:
        return {"s": self.scc_s, "as": self.scc_as, "asm": self.scc_asm}[kind]

    def components(self, kind: str) -> list:
        comp = self._comp(kind)
        out = {}
        for v, c in enumerate(comp):
            out.setdefault(c, []).append(self.vertices[v])
        return [out[c] for c in sorted(out)]

    def maximal_components(self, kind: str) -> list:
        comp = self._comp(kind)
        adj = self._adj[kind]
        non_sink = set()
        for v in range(len(self.vertices)):
            for w in adj[v]:
                if comp[v] != comp[w]:
                    non_sink.add(comp[v])
        out = {}
        for v, c in enumerate(comp):
            if c not in non_sink:
                out.setdefault(c, []).append(self.vertices[v])
        return [out[c] for c in sorted(out)]

    def maximal_comp_count(self, kind: str) -> int:
        return len(self.maximal_components(kind))

    def to_json_dict(self):
        label = lambda v: "".join(map(str, v)) if isinstance(v, tuple) else str(v)
        return {
            "vertices": [label(v) for v in self.vertices],
            "edges": [e.to_json_dict(label) for e in self.edges],
            "scc": {
                "s": list(self.scc_s),
                "as": list(self.scc_as),
                "asm": list(self.scc_asm),
            },
            "max": [label(v) for v in self.max_elements],
            "amax": [label(v) for v in self.amax_elements],
            "umax": [label(v) for v in self.umax_elements],
            "s_component_order": [list(p) for p in self.s_order],
            "certainty": self.certainty,
        }


_KIND_TYPES = {
    "s": ("semilattice",),
    "as": ("semilattice", "affine"),
    "sm": ("semilattice", "majority"),
    "asm": ("semilattice", "affine", "majority"),
    "special": ("semilattice", "affine", "special-majority"),
}


def build_graphs(target_or_view, edges, kclass: AlgebraClass | None = None) -> GraphAnalysis:
    """Assemble G_s, G_as, G_asm with SCCs and maximal element sets."""
    if _is_view(target_or_view):
        vertices = target_or_view.elements()
    elif isinstance(target_or_view, FiniteAlgebra):
        vertices = list(range(target_or_view.size))
    elif isinstance(target_or_view, Subpower):
        vertices = list(target_or_view.tuples)
    else:
        vertices = list(target_or_view)
    vindex = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)

    adj = {}
    for kind, types in _KIND_TYPES.items():
        lists = [[] for _ in range(n)]
        for e in edges:
            ok = e.type in types or (
                "special-majority" in types and e.type == "majority" and e.special
            )
            if e.type == "majority" and kind == "special" and not e.special:
                ok = False
            if ok:
                lists[vindex[e.tail]].append(vindex[e.head])
        adj[kind] = [sorted(set(l)) for l in lists]

    comp = {k: strongly_connected_components(n, adj[k]) for k in ("s", "as", "asm")}

    def maximal_elements(kind):
        c = comp[kind]
        non_sink = set()
        for v in range(n):
            for w in adj[kind][v]:
                if c[v] != c[w]:
                    non_sink.add(c[v])
        return [vertices[v] for v in range(n) if c[v] not in non_sink]

    s_order = sorted(
        {
            (comp["s"][v], comp["s"][w])
            for v in range(n)
            for w in adj["s"][v]
            if comp["s"][v] != comp["s"][w]
        }
    )

    certainty = "exact"
    if any(e.certainty != "exact" for e in edges):
        certainty = "witness-mode"

    ga = GraphAnalysis(
        vertices,
        list(edges),
        comp["s"],
        comp["as"],
        comp["asm"],
        maximal_elements("s"),
        maximal_elements("as"),
        maximal_elements("asm"),
        s_order,
        certainty,
        _vindex=vindex,
        _adj=adj,
    )
    return ga


def analyze_graphs(target, kclass: AlgebraClass | None = None, mode: str = "exact",
                   caps: Caps = DEFAULT_CAPS) -> GraphAnalysis:
    if kclass is None:
        if isinstance(target, FiniteAlgebra):
            kclass = AlgebraClass.hs(target, caps)
        else:
            kclass = AlgebraClass(_unique_factors(target.factors), caps)
    edges = thin_edges(target, kclass, mode, with_special=True, caps=caps)
    return build_graphs(target, edges, kclass)


def to_dot(analysis: GraphAnalysis, name: str = "thin") -> str:
    """DOT export: solid = semilattice, dashed = affine, dotted = majority
    (special majority annotated); vertices clustered by G_s component."""
    label = lambda v: "".join(map(str, v)) if isinstance(v, tuple) else str(v)
    lines = [f"digraph {name} {{"]
    by_comp = {}
    for i, v in enumerate(analysis.vertices):
        by_comp.setdefault(analysis.scc_s[i], []).append(v)
    umax = set(analysis.umax_elements)
    amax = set(analysis.amax_elements)
    mx = set(analysis.max_elements)
    for cid in sorted(by_comp):
        lines.append(f"  subgraph cluster_s{cid} {{")
        lines.append(f'    label="s-component {cid}";')
        for v in by_comp[cid]:
            marks = []
            if v in mx:
                marks.append("max")
            if v in amax:
                marks.append("amax")
            if v in umax:
                marks.append("umax")
            suffix = f"\\n[{','.join(marks)}]" if marks else ""
            lines.append(f'    "{label(v)}" [label="{label(v)}{suffix}"];')
        lines.append("  }")
    styles = {"semilattice": "solid", "affine": "dashed", "majority": "dotted"}
    for e in analysis.edges:
        attrs = [f"style={styles[e.type]}"]
        if e.type == "majority" and e.special:
            attrs.append('label="special"')
        lines.append(
            f'  "{label(e.tail)}" -> "{label(e.head)}" [{", ".join(attrs)}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- condition-operation sets (public wrapper) --------------------------------


@dataclass
class ConditionOps:
    """Ternary class terms satisfying the majority or minority condition.

    Deduplication is by section profile: two terms agreeing on all argument
    triples with at most two distinct entries are indistinguishable to every
    check that consumes this set.
    """

    which: str
    rows: list
    complete: bool
    kclass: AlgebraClass

    def __len__(self):
        return len(self.rows)

    def term_trees(self) -> list:
        frag = self.kclass.sections()
        return [frag.term_tree(i) for i in self.rows]

    def tables_on(self, algebra: FiniteAlgebra) -> list:
        return [
            term_table_on_algebra(tree, algebra, 3) for tree in self.term_trees()
        ]


def operations_satisfying_condition(
    kclass: AlgebraClass, which: str, caps: Caps = DEFAULT_CAPS
) -> ConditionOps:
    if which == "majority":
        rows, complete = kclass.majority_ops()
    elif which == "minority":
        rows, complete = kclass.minority_ops()
    else:
        raise ValueError("which must be 'majority' or 'minority'")
    return ConditionOps(which, [int(i) for i in rows], complete, kclass)


# -- connectivity verifier -----------------------------------------------------


def verify_connectivity(
    algebra: FiniteAlgebra,
    kclass: AlgebraClass | None = None,
    mode: str = "exact",
    caps: Caps = DEFAULT_CAPS,
) -> "Report":
    """Check the connectivity facts on one smooth type-1-omitting algebra:
    any two elements are joined by an oriented thin path; maximal and
    as-maximal elements are mutually connected by special paths; the asm-graph
    has a unique maximal component."""
    from .algebra import validate_algebra
    from .errors import SearchExhausted
    from .report import Report

    rep = Report("connectivity")
    algebra = validate_algebra(algebra)
    if kclass is None:
        kclass = AlgebraClass.hs(algebra, caps)
    ri = kclass.root_index(algebra)
    records = kclass.member_records[kclass.member_for_root(ri)]
    rep.hypothesis("smooth", is_smooth(algebra, caps, records=records).smooth)
    rep.hypothesis(
        "omits_type1", all(r.resolved_type != "unary" for r in records)
    )
    ok, cex = kclass.smoothness
    rep.hypothesis("class_smooth", ok, cex)
    if not rep.applicable():
        return rep
    try:
        complete = kclass.sections().complete
        complete = complete and kclass.majority_ops()[1] and kclass.minority_ops()[1]
    except SearchExhausted as exc:
        rep.check("condition_ops_exist", False, {"error": str(exc)})
        return rep
    if mode == "exact" and not rep.hypothesis(
        "clone_complete", complete, None if complete else "CloneTruncated"
    ):
        return rep

    view = RootView(kclass, ri)
    edges = thin_edges(view, kclass, mode, with_special=True, caps=caps)
    ga = build_graphs(view, edges, kclass)
    n = algebra.size

    # "connected with an oriented path" is weak connectivity: a path of thin
    # (directed) edges traversed regardless of orientation; the directed
    # statement is only claimed within max/amax/umax below
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        ra, rb = find(e.tail), find(e.head)
        if ra != rb:
            parent[ra] = rb
    n_weak = len({find(x) for x in range(n)})
    rep.check(
        "oriented_connectivity",
        n_weak == 1,
        {"weak_components": n_weak} if n_weak != 1 else None,
    )
    for kind_name, elems in (("max", ga.max_elements), ("amax", ga.amax_elements)):
        bad = [
            (a, b)
            for a in elems
            for b in elems
            if a != b and not ga.reach(a, b, "special")
        ]
        rep.check(
            f"{kind_name}_special_connected", not bad, {"pairs": bad} if bad else None
        )
    bad = [
        (a, b)
        for a in ga.umax_elements
        for b in ga.umax_elements
        if a != b and not ga.reach(a, b, "asm")
    ]
    rep.check("umax_asm_connected", not bad, {"pairs": bad} if bad else None)
    count = ga.maximal_comp_count("asm")
    rep.check("unique_umax_component", count == 1, {"count": count})
    return rep


# -- lifting verifier ----------------------------------------------------------


LIFTING_CASES = (
    "quotient-edge",
    "quotient-path",
    "product-edge",
    "product-path",
    "product-maximal",
    "as-product",
)


def _edge_index(edges) -> dict:
    by_key = {}
    for e in edges:
        by_key.setdefault((e.tail, e.type), {})[e.head] = e
    return by_key


def _lbl(v):
    return "".join(map(str, v)) if isinstance(v, tuple) else str(v)


def verify_lifting(
    case: str,
    algebra: FiniteAlgebra | None = None,
    theta=None,
    rel: Subpower | None = None,
    coords=None,
    kclass: AlgebraClass | None = None,
    mode: str = "exact",
    caps: Caps = DEFAULT_CAPS,
) -> "Report":
    """Exhaustively instantiate one edge/path/maximality transfer statement.

    quotient-* cases take (algebra, theta); product-* cases take (rel, coords);
    as-product takes a binary rel. A counterexample falsifies the
    implementation, not the statements.
    """
    from .report import Report

    rep = Report(f"lifting:{case}")
    if case not in LIFTING_CASES:
        raise ValueError(f"unknown lifting case {case!r}")

    if case.startswith("quotient"):
        if algebra is None or theta is None:
            raise ValueError(f"{case} needs algebra and theta")
        if kclass is None:
            kclass = AlgebraClass.hs(algebra, caps)
        ok, cex = kclass.smoothness
        rep.hypothesis("class_smooth", ok, cex)
        rep.hypothesis("roots_omit_type1", kclass.roots_omit_type1())
        if not rep.applicable():
            return rep
        ri = kclass.root_index(algebra)
        blocks = Partition(getattr(theta, "block_id", theta)).block_id
        try:
            qi = kclass.member_for_quotient(ri, blocks)
        except ValueError as exc:
            rep.hypothesis("theta_is_congruence", False, str(exc))
            return rep
        rv = RootView(kclass, ri)
        qv = MemberView(kclass, qi)
        member = kclass.members[qi]
        edges_a = thin_edges(rv, kclass, mode, with_special=True, caps=caps)
        edges_q = thin_edges(qv, kclass, mode, with_special=True, caps=caps)
        if case == "quotient-edge":
            idx_a = _edge_index(edges_a)
            for e in edges_q:
                for a in member.preimage({e.tail}):
                    cands = idx_a.get((a, e.type), {})
                    heads = [
                        b for b in member.preimage({e.head}) if b in cands
                    ]
                    rep.check(
                        f"lift_edge_{e.type}_{e.tail}{e.head}_from_{a}",
                        bool(heads),
                        {"quotient_edge": [e.tail, e.head], "element": a},
                    )
                    if e.type == "majority" and e.special:
                        special_heads = [b for b in heads if cands[b].special]
                        rep.check(
                            f"lift_special_{e.tail}{e.head}_from_{a}",
                            bool(special_heads),
                            {"quotient_edge": [e.tail, e.head], "element": a},
                        )
            idx_q = _edge_index(edges_q)
            for e in edges_a:
                ca = member.class_of_root[e.tail]
                cb = member.class_of_root[e.head]
                if ca == cb:
                    continue
                rep.check(
                    f"project_edge_{e.type}_{e.tail}{e.head}",
                    cb in idx_q.get((ca, e.type), {}),
                    {"edge": [e.tail, e.head], "type": e.type},
                )
        else:  # quotient-path
            ga = build_graphs(rv, edges_a, kclass)
            gq = build_graphs(qv, edges_q, kclass)
            kinds = ("s", "as", "asm", "special")
            for kind in kinds:
                for ca in qv.elements():
                    for cb in qv.elements():
                        if not gq.reach(ca, cb, kind):
                            continue
                        for a in member.preimage({ca}):
                            ok = any(
                                ga.reach(a, b, kind)
                                for b in member.preimage({cb})
                            )
                            rep.check(
                                f"lift_path_{kind}_{ca}to{cb}_from_{a}",
                                ok,
                                {"kind": kind, "classes": [ca, cb], "element": a},
                            )
            for kind in ("s", "as", "asm"):
                for a in rv.elements():
                    for b in rv.elements():
                        if not ga.reach(a, b, kind):
                            continue
                        ca = member.class_of_root[a]
                        cb = member.class_of_root[b]
                        rep.check(
                            f"project_path_{kind}_{a}to{b}",
                            gq.reach(ca, cb, kind),
                            {"kind": kind, "pair": [a, b]},
                        )
        return rep

    if rel is None:
        raise ValueError(f"{case} needs rel")
    if kclass is None:
        kclass = AlgebraClass(_unique_factors(rel.factors), caps)
    ok, cex = kclass.smoothness
    rep.hypothesis("class_smooth", ok, cex)
    rep.hypothesis("roots_omit_type1", kclass.roots_omit_type1())
    rep.hypothesis("subdirect", rel.is_subdirect())
    if not rep.applicable():
        return rep

    if case == "as-product":
        if rel.arity != 2:
            raise ValueError("as-product needs a binary relation")
        rv = SubpowerView(kclass, rel)
        edges_r = thin_edges(rv, kclass, mode, with_special=True, caps=caps)
        gr = build_graphs(rv, edges_r, kclass)
        rset = set(rel.tuples)
        factor_views = [
            RootView(kclass, kclass.root_index(f)) for f in rel.factors
        ]
        factor_gas = [
            build_graphs(v, thin_edges(v, kclass, mode, with_special=True, caps=caps), kclass)
            for v in factor_views
        ]
        for kind in ("s", "as", "asm"):
            comps1 = factor_gas[0].maximal_components(kind)
            comps2 = factor_gas[1].maximal_components(kind)
            rcomps = {
                frozenset(c) for c in gr.maximal_components(kind)
            }
            for b_comp in comps1:
                for c_comp in comps2:
                    box = {(b, c) for b in b_comp for c in c_comp}
                    if not box <= rset:
                        continue
                    rep.check(
                        f"as_product_{kind}_{_lbl(sorted(b_comp))}x{_lbl(sorted(c_comp))}",
                        frozenset(box) in rcomps,
                        {"kind": kind, "B": sorted(b_comp), "C": sorted(c_comp)},
                    )
        return rep

    if coords is None:
        raise ValueError(f"{case} needs coords")
    coords = sorted(coords)
    proj = rel.project(coords)
    rv = SubpowerView(kclass, rel)
    pv = SubpowerView(kclass, proj)
    edges_r = thin_edges(rv, kclass, mode, with_special=True, caps=caps)
    edges_p = thin_edges(pv, kclass, mode, with_special=True, caps=caps)

    def pr(t):
        return tuple(t[i] for i in coords)

    if case == "product-edge":
        idx_r = _edge_index(edges_r)
        for ta in rel.tuples:
            p = pr(ta)
            for e in edges_p:
                if e.tail != p:
                    continue
                cands = idx_r.get((ta, e.type), {})
                heads = [b for b in cands if pr(b) == e.head]
                rep.check(
                    f"lift_edge_{e.type}_{_lbl(e.tail)}to{_lbl(e.head)}_from_{_lbl(ta)}",
                    bool(heads),
                    {"proj_edge": [_lbl(e.tail), _lbl(e.head)], "tuple": _lbl(ta)},
                )
                if e.type == "majority" and e.special:
                    rep.check(
                        f"lift_special_{_lbl(e.tail)}to{_lbl(e.head)}_from_{_lbl(ta)}",
                        any(cands[b].special for b in heads),
                        {"proj_edge": [_lbl(e.tail), _lbl(e.head)], "tuple": _lbl(ta)},
                    )
        idx_p = _edge_index(edges_p)
        for e in edges_r:
            pa, pb = pr(e.tail), pr(e.head)
            if pa == pb:
                continue
            rep.check(
                f"project_edge_{e.type}_{_lbl(e.tail)}to{_lbl(e.head)}",
                pb in idx_p.get((pa, e.type), {}),
                {"edge": [_lbl(e.tail), _lbl(e.head)], "type": e.type},
            )
        return rep

    gr = build_graphs(rv, edges_r, kclass)
    gp = build_graphs(pv, edges_p, kclass)

    if case == "product-path":
        for kind in ("s", "as", "asm", "special"):
            for ta in rel.tuples:
                p = pr(ta)
                for tb in proj.tuples:
                    if not gp.reach(p, tb, kind):
                        continue
                    ok = any(
                        pr(b) == tb and gr.reach(ta, b, kind)
                        for b in rel.tuples
                    )
                    rep.check(
                        f"lift_path_{kind}_{_lbl(p)}to{_lbl(tb)}_from_{_lbl(ta)}",
                        ok,
                        {"kind": kind, "from": _lbl(ta), "target": _lbl(tb)},
                    )
        for kind in ("s", "as", "asm"):
            for ta in rel.tuples:
                for tb in rel.tuples:
                    if gr.reach(ta, tb, kind):
                        rep.check(
                            f"project_path_{kind}_{_lbl(ta)}to{_lbl(tb)}",
                            gp.reach(pr(ta), pr(tb), kind),
                            {"kind": kind, "pair": [_lbl(ta), _lbl(tb)]},
                        )
        return rep

    # product-maximal
    kinds = (("max", "s"), ("amax", "as"), ("umax", "asm"))
    for name, kind in kinds:
        max_r = {
            "max": gr.max_elements,
            "amax": gr.amax_elements,
            "umax": gr.umax_elements,
        }[name]
        max_p = {
            "max": gp.max_elements,
            "amax": gp.amax_elements,
            "umax": gp.umax_elements,
        }[name]
        max_r_set = set(max_r)
        for tb in max_p:
            ok = any(pr(b) == tb and b in max_r_set for b in rel.tuples)
            rep.check(
                f"lift_{name}_{_lbl(tb)}", ok, {"kind": name, "target": _lbl(tb)}
            )
        max_p_set = set(max_p)
        for ta in max_r:
            rep.check(
                f"project_{name}_{_lbl(ta)}",
                pr(ta) in max_p_set,
                {"kind": name, "tuple": _lbl(ta)},
            )
    return rep
