"""Classification of element pairs as thick edges.

A pair ab of a finite idempotent algebra is classified through the maximal
congruences of the subalgebra it generates: per witnessing congruence the
quotient can be a two-element projection-only algebra (unary case), carry a
term acting as a semilattice or majority operation on the two generating
classes, or be an abelian algebra with a Mal'tsev term (affine case). The
resolved type uses the precedence semilattice > majority > affine > unary;
all raw per-witness indicators are retained so mixed cases stay auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .algebra import (
    FiniteAlgebra,
    product_algebra,
    quotient,
    sg_closure,
    subpower_generate,
    term_table_on_algebra,
)
from .caps import Caps, DEFAULT_CAPS
from .congruence import Partition, cg, maximal_congruences
from .errors import CloneTruncated, NotFoundWithinCap


def is_abelian(algebra: FiniteAlgebra) -> bool:
    """Term condition via the congruence of A^2 generated by the diagonal.

    A is abelian iff the diagonal is a full congruence class of A x A, and the
    candidate congruence is the one generated by all pairs of diagonal
    elements.
    """
    n = algebra.size
    if n == 1:
        return True
    square = product_algebra([algebra, algebra], name=f"{algebra.name}^2")
    gens = [(0, x * n + x) for x in range(1, n)]
    theta = cg(square, gens)
    diag_class = {i for i in range(n * n) if theta.same(i, 0)}
    return diag_class == {x * n + x for x in range(n)}


def maltsev_term(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS):
    """A term tree p with p(x,y,y)=x and p(x,x,y)=y, or None.

    Decided by the indicator subpower over two copies of A^2: column (x,y) of
    the first block constrains p(x,y,y)=x, of the second block p(x,x,y)=y.
    """
    n = algebra.size
    if n == 1:
        return ("arg", 0)
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    u = tuple(x for x, _ in pairs) + tuple(x for x, _ in pairs)
    v = tuple(y for _, y in pairs) + tuple(x for x, _ in pairs)
    w = tuple(y for _, y in pairs) + tuple(y for _, y in pairs)
    target = tuple(x for x, _ in pairs) + tuple(y for _, y in pairs)
    power = subpower_generate(
        [algebra] * len(u), [u, v, w], track=True, caps=caps
    )
    if target in power:
        return power.term_tree(target)
    return None


@dataclass
class EdgeWitness:
    """One maximal congruence of Sg{a,b} with its raw case indicators."""

    theta_blocks: tuple  # blocks as sorted tuples of ambient elements
    indicators: dict  # {"set": bool, "semilattice": bool, "majority": bool, "affine": bool}
    case: str | None  # precedence-resolved case for this witness
    sem_directions: tuple = ()  # which of 'a','b' absorbs, when semilattice
    ops: dict = field(default_factory=dict)  # witness term trees/tables by kind

    def to_json_dict(self):
        out = {
            "theta": [list(b) for b in self.theta_blocks],
            "indicators": dict(self.indicators),
            "case": self.case,
        }
        if self.sem_directions:
            out["sem_directions"] = list(self.sem_directions)
        if self.ops:
            out["ops"] = {
                kind: {"table": list(tbl), "arity": ar}
                for kind, (tbl, ar) in self.ops.items()
            }
        return out


@dataclass
class EdgeRecord:
    a: int
    b: int
    sub: tuple  # universe of Sg{a,b} in ambient coordinates
    witnesses: list
    resolved_type: str  # semilattice | majority | affine | unary | none
    mixed: bool  # witnesses of more than one raw kind exist

    def to_json_dict(self):
        return {
            "pair": [self.a, self.b],
            "sub": list(self.sub),
            "resolved_type": self.resolved_type,
            "mixed_witnesses": self.mixed,
            "witnesses": [w.to_json_dict() for w in self.witnesses],
        }


def _set_case(quo: FiniteAlgebra) -> bool:
    for op in quo.operations:
        is_proj = False
        for j in range(op.arity):
            if all(
                op.apply(quo.size, args) == args[j]
                for args in product(range(quo.size), repeat=op.arity)
            ):
                is_proj = True
                break
        if not is_proj:
            return False
    return True


def substitute_args(tree, mapping: dict):
    if tree[0] == "arg" and isinstance(tree[1], int) and len(tree) == 2:
        return ("arg", mapping.get(tree[1], tree[1]))
    op, children = tree
    return (op, tuple(substitute_args(c, mapping) for c in children))


def section_fragment(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS):
    from .clone import clone_closure, section_columns

    return clone_closure(
        [algebra], 3, section_columns([algebra]), caps, track=True
    )


def classify_pair(
    algebra: FiniteAlgebra,
    a: int,
    b: int,
    caps: Caps = DEFAULT_CAPS,
    fragment=None,
) -> EdgeRecord:
    """Classify the unordered pair {a,b}; see the module docstring.

    The semilattice and majority indicators are decided against the ternary
    section fragment of the ambient algebra: a term acts as a semilattice
    operation toward b/theta iff some row has its (a,b,b) and (b,a,a) values
    in b's class, and as a majority operation iff some row meets the six
    class constraints of the (a,b)/(b,a) instantiations.
    """
    import numpy as np

    if a == b:
        raise ValueError("classify_pair needs two distinct elements")
    if fragment is None:
        fragment = section_fragment(algebra, caps)
    rows = fragment.rows

    def col(args):
        return fragment.col_index[(0, args)]

    def member_mask(args, allowed):
        return np.isin(rows[:, col(args)], np.asarray(sorted(allowed), dtype=np.uint8))

    sub_members = sorted(sg_closure(algebra, (a, b)).members)
    sub_alg, ren = algebra.subalgebra(sub_members)
    back = {v: k for k, v in ren.items()}
    la, lb = ren[a], ren[b]

    witnesses = []
    kinds_seen = set()
    truncated = not fragment.complete
    for theta in maximal_congruences(sub_alg, caps):
        if theta.same(la, lb):
            continue  # cannot happen for a generating pair; kept as a guard
        quo, _ = quotient(sub_alg, theta)
        a_cls = {back[x] for x in range(sub_alg.size) if theta.same(x, la)}
        b_cls = {back[x] for x in range(sub_alg.size) if theta.same(x, lb)}

        ind = {"set": False, "semilattice": False, "majority": False, "affine": False}
        sem_dirs = []
        ops = {}

        ind["set"] = _set_case(quo)

        sem_witness_row = None
        for dir_name, cls in (("b", b_cls), ("a", a_cls)):
            mask = member_mask((a, b, b), cls) & member_mask((b, a, a), cls)
            hits = np.flatnonzero(mask)
            if len(hits):
                sem_dirs.append(dir_name)
                if sem_witness_row is None:
                    sem_witness_row = int(hits[0])
        ind["semilattice"] = bool(sem_dirs)
        if sem_witness_row is not None:
            tree = substitute_args(fragment.term_tree(sem_witness_row), {2: 1})
            ops["semilattice"] = (term_table_on_algebra(tree, algebra, 2), 2)

        mask = (
            member_mask((b, a, a), a_cls)
            & member_mask((a, b, a), a_cls)
            & member_mask((a, a, b), a_cls)
            & member_mask((a, b, b), b_cls)
            & member_mask((b, a, b), b_cls)
            & member_mask((b, b, a), b_cls)
        )
        hits = np.flatnonzero(mask)
        if len(hits):
            ind["majority"] = True
            ops["majority"] = (
                term_table_on_algebra(fragment.term_tree(int(hits[0])), algebra, 3),
                3,
            )

        if is_abelian(quo):
            tree = maltsev_term(quo, caps)
            if tree is not None:
                ind["affine"] = True
                ops["affine"] = (term_table_on_algebra(tree, quo, 3), 3)

        if ind["set"]:
            case = "set"
        elif ind["semilattice"]:
            case = "semilattice"
        elif ind["majority"]:
            case = "majority"
        elif ind["affine"]:
            case = "affine"
        else:
            case = None

        for k, v in ind.items():
            if v:
                kinds_seen.add(k)
        blocks = tuple(
            tuple(sorted(back[x] for x in blk)) for blk in theta.blocks()
        )
        witnesses.append(EdgeWitness(blocks, ind, case, tuple(sem_dirs), ops))

    if any(w.indicators["semilattice"] for w in witnesses):
        rtype = "semilattice"
    elif truncated:
        # without the full fragment only a positive semilattice verdict is
        # sound: precedence decisions below it would be guesses
        raise CloneTruncated(
            f"section fragment of {algebra.name!r} truncated; cannot resolve pair"
        )
    elif any(w.indicators["majority"] for w in witnesses):
        rtype = "majority"
    elif any(w.indicators["affine"] for w in witnesses):
        rtype = "affine"
    elif any(w.indicators["set"] for w in witnesses):
        rtype = "unary"
    else:
        rtype = "none"

    return EdgeRecord(
        a, b, tuple(sub_members), witnesses, rtype, len(kinds_seen) > 1
    )


def edge_graph(
    algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS, fragment=None
) -> list:
    if algebra.size > 1 and fragment is None:
        fragment = section_fragment(algebra, caps)
    return [
        classify_pair(algebra, a, b, caps, fragment=fragment)
        for a in range(algebra.size)
        for b in range(a + 1, algebra.size)
    ]


def omits_type1(algebra: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> bool:
    return all(rec.resolved_type != "unary" for rec in edge_graph(algebra, caps))


@dataclass
class SmoothReport:
    smooth: bool
    counterexamples: list  # (pair, theta blocks, op name, argument tuple)

    def to_json_dict(self):
        return {
            "smooth": self.smooth,
            "counterexamples": [
                {
                    "pair": list(pair),
                    "theta": [list(b) for b in blocks],
                    "op": op,
                    "args": list(args),
                }
                for pair, blocks, op, args in self.counterexamples
            ],
        }


def is_smooth(
    algebra: FiniteAlgebra,
    caps: Caps = DEFAULT_CAPS,
    records: list | None = None,
) -> SmoothReport:
    """For every semilattice/majority witness, the union of the two generating
    classes must be a subuniverse of the whole algebra."""
    counterexamples = []
    if records is None:
        records = edge_graph(algebra, caps)
    for rec in records:
        for wit in rec.witnesses:
            if not (wit.indicators["semilattice"] or wit.indicators["majority"]):
                continue
            cls_a = next(blk for blk in wit.theta_blocks if rec.a in blk)
            cls_b = next(blk for blk in wit.theta_blocks if rec.b in blk)
            union = sorted(set(cls_a) | set(cls_b))
            uset = set(union)
            violation = None
            for op in algebra.operations:
                for args in product(union, repeat=op.arity):
                    if op.apply(algebra.size, args) not in uset:
                        violation = (op.name, args)
                        break
                if violation:
                    break
            if violation:
                counterexamples.append(
                    ((rec.a, rec.b), wit.theta_blocks, violation[0], violation[1])
                )
    return SmoothReport(not counterexamples, counterexamples)


# -- uniform operations f, g, h ---------------------------------------------


@dataclass
class UniformOps:
    """Binary f and ternary g,h with the per-edge-type behavior contract.

    On every thick edge (classes of a type-witnessing congruence): f acts as a
    semilattice operation on semilattice edges and as first projection on
    majority/affine edges; g is majority on majority edges, first projection
    on affine edges, and x*(y*z) (via f) on semilattice edges; h is Mal'tsev
    (hence affine) on affine-edge quotients, first projection on majority
    edges, and x*(y*z) on semilattice edges. f additionally satisfies: every
    value f(a,b) is either a itself or the head of a thin semilattice edge
    from a.
    """

    f_term: tuple
    g_term: tuple
    h_term: tuple
    f_tables: list  # aligned with kclass.members
    g_tables: list
    h_tables: list

    def tables_for(self, member_idx: int):
        return (
            self.f_tables[member_idx],
            self.g_tables[member_idx],
            self.h_tables[member_idx],
        )


def find_uniform_ops(kclass, caps: Caps = DEFAULT_CAPS) -> UniformOps:
    """Search the binary/ternary clone fragments of the class for f, g, h.

    Raises NotFoundWithinCap; `exhausted=True` means the fragment was complete
    and no operation exists, which contradicts the existence theorem and is a
    high-severity implementation signal.
    """
    frag2 = kclass.binary_fragment()
    f_row = _pick_least(frag2.rows, kclass.uniform_f_mask())
    if f_row is None:
        raise NotFoundWithinCap("uniform binary operation f", frag2.complete)

    frag3 = kclass.sections()
    g_row = _pick_least(frag3.rows, kclass.uniform_g_mask(f_row))
    if g_row is None:
        raise NotFoundWithinCap("uniform ternary operation g", frag3.complete)
    h_row = _pick_least(frag3.rows, kclass.uniform_h_mask(f_row))
    if h_row is None:
        raise NotFoundWithinCap("uniform ternary operation h", frag3.complete)

    f_term = frag2.term_tree(f_row)
    g_term = frag3.term_tree(g_row)
    h_term = frag3.term_tree(h_row)
    return UniformOps(
        f_term,
        g_term,
        h_term,
        [term_table_on_algebra(f_term, m.algebra, 2) for m in kclass.members],
        [term_table_on_algebra(g_term, m.algebra, 3) for m in kclass.members],
        [term_table_on_algebra(h_term, m.algebra, 3) for m in kclass.members],
    )


def _pick_least(rows, mask):
    """Index of the lexicographically least row among mask, or None."""
    best = None
    best_key = None
    for i in range(len(rows)):
        if not mask[i]:
            continue
        key = rows[i].tobytes()
        if best_key is None or key < best_key:
            best, best_key = i, key
    return best
