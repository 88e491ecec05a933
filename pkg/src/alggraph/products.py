"""Verifiers for the subdirect-product structure theorems.

Each verifier exhaustively instantiates one statement on a concrete relation:
as-component rectangularity of linked subdirect products, its linkage-block
and u-maximal variants, quasi-2-decomposability (with the coordinate-pinned
variant), the quasi-majority construction, and almost-triviality of subdirect
products of simple maximal-generated algebras. Failed hypotheses yield
`inapplicable`; a `fail` would falsify the implementation, not the statements.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .algebra import (
    FiniteAlgebra,
    Subpower,
    subpower_generate,
    term_table_on_algebra,
)
from .caps import Caps, DEFAULT_CAPS
from .congruence import link_congruence
from .errors import SearchExhausted
from .kclass import AlgebraClass
from .report import Report
from .thin import (
    MemberView,
    RootView,
    SubpowerView,
    _unique_factors,
    build_graphs,
    thin_edges,
)


def _lbl(t):
    return "".join(map(str, t)) if isinstance(t, tuple) else str(t)


def _class_for(rel: Subpower, kclass, caps) -> AlgebraClass:
    return kclass if kclass is not None else AlgebraClass(
        _unique_factors(rel.factors), caps
    )


def _base_hypotheses(rep: Report, rel: Subpower, kclass: AlgebraClass,
                     mode: str) -> bool:
    ok, cex = kclass.smoothness
    rep.hypothesis("class_smooth", ok, cex)
    rep.hypothesis("roots_omit_type1", kclass.roots_omit_type1())
    rep.hypothesis("subdirect", rel.is_subdirect())
    if mode == "exact" and rep.applicable():
        try:
            complete = (
                kclass.sections().complete
                and kclass.majority_ops()[1]
                and kclass.minority_ops()[1]
            )
        except SearchExhausted as exc:
            rep.check("condition_ops_exist", False, {"error": str(exc)})
            return False
        rep.hypothesis(
            "clone_complete", complete, None if complete else "CloneTruncated"
        )
    return rep.applicable()


def _graphs(view, kclass, mode, caps):
    return build_graphs(
        view, thin_edges(view, kclass, mode, with_special=False, caps=caps), kclass
    )


# -- rectangularity ------------------------------------------------------------


def rect_check(
    rel: Subpower,
    kclass: AlgebraClass | None = None,
    mode: str = "exact",
    caps: Caps = DEFAULT_CAPS,
) -> Report:
    """As-component rectangularity of a linked binary subdirect product, plus
    the instance check of the forward-set auxiliary lemma."""
    rep = Report("rect")
    if rel.arity != 2:
        raise ValueError("rect_check needs a binary relation")
    kclass = _class_for(rel, kclass, caps)
    if not _base_hypotheses(rep, rel, kclass, mode):
        return rep
    from .congruence import is_linked

    if not rep.hypothesis("linked", is_linked(rel)):
        return rep

    rset = set(rel.tuples)
    fviews = [RootView(kclass, kclass.root_index(f)) for f in rel.factors]
    fgas = [_graphs(v, kclass, mode, caps) for v in fviews]
    for b1 in fgas[0].maximal_components("as"):
        for b2 in fgas[1].maximal_components("as"):
            hit = any((x, y) in rset for x in b1 for y in b2)
            if not hit:
                continue
            missing = [(x, y) for x in b1 for y in b2 if (x, y) not in rset]
            rep.check(
                f"rectangular_{_lbl(sorted(b1))}x{_lbl(sorted(b2))}",
                not missing,
                {"B1": sorted(b1), "B2": sorted(b2), "missing": missing[:5]}
                if missing
                else None,
            )

    # auxiliary lemma: for a thin edge a->b of the first factor and any
    # c in R[b] & R[a], the as-forward set of c inside R[a] lies in R[b]
    edges1 = thin_edges(fviews[0], kclass, mode, caps=caps)
    img = {}
    for x, y in rel.tuples:
        img.setdefault(x, set()).add(y)
    for e in edges1:
        ra, rb = img.get(e.tail, set()), img.get(e.head, set())
        common = ra & rb
        if not common:
            continue
        sub_b = sorted(ra)
        mi = kclass.member_for_sub(kclass.root_index(rel.factors[1]), sub_b)
        mview = MemberView(kclass, mi)
        local = {v: i for i, v in enumerate(sub_b)}
        ga_b = _graphs(mview, kclass, mode, caps)
        for c in sorted(common):
            ft = ga_b.ft(local[c], "as")
            outside = [sub_b[i] for i in ft if sub_b[i] not in rb]
            rep.check(
                f"ftas_{e.tail}{e.head}_c{c}",
                not outside,
                {"edge": [e.tail, e.head], "c": c, "outside": outside[:5]}
                if outside
                else None,
            )
    return rep


def linkage_rect_check(
    rel: Subpower,
    kclass: AlgebraClass | None = None,
    mode: str = "exact",
    caps: Caps = DEFAULT_CAPS,
) -> Report:
    """Rectangularity of as-components of linkage-congruence blocks."""
    rep = Report("linkage-rect")
    if rel.arity != 2:
        raise ValueError("linkage_rect_check needs a binary relation")
    kclass = _class_for(rel, kclass, caps)
    if not _base_hypotheses(rep, rel, kclass, mode):
        return rep
    rset = set(rel.tuples)
    lk = [link_congruence(rel, 0), link_congruence(rel, 1)]

    def block_as_components(side, block):
        mi = kclass.member_for_sub(
            kclass.root_index(rel.factors[side]), block
        )
        mv = MemberView(kclass, mi)
        ga = _graphs(mv, kclass, mode, caps)
        return [
            sorted(block[i] for i in comp)
            for comp in ga.maximal_components("as")
        ]

    for blk1 in lk[0].blocks():
        comps1 = block_as_components(0, blk1)
        for blk2 in lk[1].blocks():
            comps2 = block_as_components(1, blk2)
            for b1 in comps1:
                for b2 in comps2:
                    if not any((x, y) in rset for x in b1 for y in b2):
                        continue
                    missing = [
                        (x, y) for x in b1 for y in b2 if (x, y) not in rset
                    ]
                    rep.check(
                        f"linkage_rect_{_lbl(b1)}x{_lbl(b2)}",
                        not missing,
                        {"B1": b1, "B2": b2, "missing": missing[:5]}
                        if missing
                        else None,
                    )
    return rep


def umax_rect_check(
    rel: Subpower,
    kclass: AlgebraClass | None = None,
    mode: str = "exact",
    caps: Caps = DEFAULT_CAPS,
) -> Report:
    """For an as-component B1 of a first-side linkage block, B1 x umax(R[B1])
    is contained in the relation."""
    rep = Report("umax-rect")
    if rel.arity != 2:
        raise ValueError("umax_rect_check needs a binary relation")
    kclass = _class_for(rel, kclass, caps)
    if not _base_hypotheses(rep, rel, kclass, mode):
        return rep
    rset = set(rel.tuples)
    img = {}
    for x, y in rel.tuples:
        img.setdefault(x, set()).add(y)
    lk1 = link_congruence(rel, 0)
    ri2 = kclass.root_index(rel.factors[1])
    any_block = False
    for blk1 in lk1.blocks():
        mi = kclass.member_for_sub(kclass.root_index(rel.factors[0]), blk1)
        mv = MemberView(kclass, mi)
        ga = _graphs(mv, kclass, mode, caps)
        for comp in ga.maximal_components("as"):
            b1 = sorted(blk1[i] for i in comp)
            b2prime = sorted(set().union(*(img[x] for x in b1)))
            try:
                mi2 = kclass.member_for_sub(ri2, b2prime)
            except ValueError:
                rep.note(
                    f"R[{_lbl(b1)}] = {_lbl(b2prime)} is not a subuniverse; "
                    "block skipped"
                )
                continue
            any_block = True
            mv2 = MemberView(kclass, mi2)
            ga2 = _graphs(mv2, kclass, mode, caps)
            b2 = sorted(b2prime[i] for i in ga2.umax_elements)
            missing = [(x, y) for x in b1 for y in b2 if (x, y) not in rset]
            rep.check(
                f"umax_rect_{_lbl(b1)}x{_lbl(b2)}",
                not missing,
                {"B1": b1, "B2": b2, "missing": missing[:5]} if missing else None,
            )
    rep.hypothesis("some_block_applicable", any_block or not rel.tuples)
    return rep


# -- quasi-2-decomposability ----------------------------------------------------


def q2d_check(
    rel: Subpower,
    pinned: tuple | None = None,
    kclass: AlgebraClass | None = None,
    mode: str = "exact",
    caps: Caps = DEFAULT_CAPS,
) -> Report:
    """Quasi-2-decomposability: every tuple whose binary projections are
    as-maximal has a representative in the relation up to as-components; with
    `pinned` coordinates X the representative agrees with the candidate on X
    whenever its X-projection is as-maximal too."""
    rep = Report("q2d" if pinned is None else "q2d-pinned")
    n = rel.arity
    kclass = _class_for(rel, kclass, caps)
    rep.hypothesis("arity_cap", n <= caps.coord_limit)
    if not _base_hypotheses(rep, rel, kclass, mode):
        return rep

    pair_ga = {}
    pair_amax = {}
    pair_comp = {}
    for i in range(n):
        for j in range(i + 1, n):
            pij = rel.project([i, j])
            view = SubpowerView(kclass, pij)
            ga = _graphs(view, kclass, mode, caps)
            pair_ga[(i, j)] = ga
            pair_amax[(i, j)] = set(ga.amax_elements)
            pair_comp[(i, j)] = {
                v: ga.scc_as[ga.index(v)] for v in pij.tuples
            }

    x_amax = None
    if pinned is not None:
        pinned = tuple(sorted(pinned))
        px = rel.project(pinned)
        gx = _graphs(SubpowerView(kclass, px), kclass, mode, caps)
        x_amax = set(gx.amax_elements)

    candidates = []

    def extend(prefix):
        i = len(prefix)
        if i == n:
            candidates.append(tuple(prefix))
            return
        for v in range(rel.factors[i].size):
            ok = all(
                (prefix[j], v) in pair_amax[(j, i)] for j in range(i)
            )
            if ok:
                extend(prefix + [v])

    extend([])

    examined = 0
    for cand in candidates:
        if pinned is not None:
            if tuple(cand[i] for i in pinned) not in x_amax:
                continue
        examined += 1
        want = {
            (i, j): pair_comp[(i, j)][(cand[i], cand[j])]
            for i in range(n)
            for j in range(i + 1, n)
        }
        witness = None
        for b in rel.tuples:
            if pinned is not None and any(
                b[i] != cand[i] for i in pinned
            ):
                continue
            if all(
                pair_comp[(i, j)][(b[i], b[j])] == want[(i, j)]
                for i in range(n)
                for j in range(i + 1, n)
            ):
                witness = b
                break
        rep.check(
            f"candidate_{_lbl(cand)}",
            witness is not None,
            {"candidate": list(cand)} if witness is None else None,
        )
    rep.note(f"candidates_examined={examined}")
    return rep


def shared_majority_row(kclass: AlgebraClass):
    """A class term acting as a majority operation on every root, or None."""
    rows = kclass.sections().rows
    mask = np.ones(len(rows), dtype=bool)
    for r, root in enumerate(kclass.roots):
        for x in range(root.size):
            for y in range(root.size):
                if x == y:
                    continue
                mask &= rows[:, kclass.col(r, (y, y, x))] == y  # t(y,y,x)=y
                mask &= rows[:, kclass.col(r, (y, x, y))] == y  # t(y,x,y)=y
                mask &= rows[:, kclass.col(r, (x, y, y))] == y  # t(x,y,y)=y
    hits = np.flatnonzero(mask)
    return int(hits[0]) if len(hits) else None


def two_decomposable(rel: Subpower) -> tuple:
    """Classical 2-decomposability: membership is determined by the binary
    projections. Returns (holds, counterexample tuple or None)."""
    n = rel.arity
    pair_sets = {
        (i, j): {(t[i], t[j]) for t in rel.tuples}
        for i in range(n)
        for j in range(i + 1, n)
    }
    rset = set(rel.tuples)
    for t in product(*[range(f.size) for f in rel.factors]):
        if t in rset:
            continue
        if all(
            (t[i], t[j]) in pair_sets[(i, j)]
            for i in range(n)
            for j in range(i + 1, n)
        ):
            return False, t
    return True, None


# -- quasi-majority --------------------------------------------------------------


@dataclass
class QuasiMajorityResult:
    report: Report
    term: tuple | None  # ternary term tree over the class signature
    tables: list | None  # per member of the class, aligned with kclass.members

    @property
    def verdict(self):
        return self.report.verdict


def quasi_majority(
    kclass: AlgebraClass, mode: str = "exact", caps: Caps = DEFAULT_CAPS
) -> QuasiMajorityResult:
    """Materialize a quasi-majority term: one whose three near-unanimous
    values always land in the as-forward set of the repeated element.

    Builds the relation generated by the three block tuples (a,a,b), (a,b,a),
    (b,a,a) over every ordered pair of every member, finds a tuple whose
    entries are as-reachable from the repeated element blockwise, and
    extracts its generating term from the derivation records.
    """
    rep = Report("quasi-majority")
    ok, cex = kclass.smoothness
    rep.hypothesis("class_smooth", ok, cex)
    rep.hypothesis("roots_omit_type1", kclass.roots_omit_type1())
    try:
        complete = (
            kclass.sections().complete
            and kclass.majority_ops()[1]
            and kclass.minority_ops()[1]
        )
    except SearchExhausted as exc:
        rep.check("condition_ops_exist", False, {"error": str(exc)})
        return QuasiMajorityResult(rep, None, None)
    if mode == "exact":
        rep.hypothesis("clone_complete", complete, None if complete else "CloneTruncated")
    if not rep.applicable():
        return QuasiMajorityResult(rep, None, None)

    ftas = []
    for mi, m in enumerate(kclass.members):
        if m.size <= 1:
            ftas.append(None)
            continue
        mv = MemberView(kclass, mi)
        ga = _graphs(mv, kclass, mode, caps)
        ftas.append([ga.ft(a, "as") for a in range(m.size)])

    blocks = []
    factors = []
    g1, g2, g3 = [], [], []
    for mi, m in enumerate(kclass.members):
        if m.size <= 1:
            continue
        for a in range(m.size):
            for b in range(m.size):
                if a == b:
                    continue
                blocks.append((mi, a))
                factors += [m.algebra] * 3
                g1 += [a, a, b]
                g2 += [a, b, a]
                g3 += [b, a, a]

    power = subpower_generate(factors, [g1, g2, g3], track=True, caps=caps)
    rep.note(f"relation_size={len(power)} coords={len(factors)}")

    found = None
    for t in power.tuples:
        ok = True
        for bi, (mi, a) in enumerate(blocks):
            ft = ftas[mi][a]
            if any(t[3 * bi + s] not in ft for s in range(3)):
                ok = False
                break
        if ok:
            found = t
            break
    if found is None:
        raise SearchExhausted(
            "quasi-majority witness tuple absent from the generated relation"
        )

    term = power.term_tree(found)
    tables = [
        term_table_on_algebra(term, m.algebra, 3) for m in kclass.members
    ]

    # pointwise postcondition on every member and pair
    for mi, m in enumerate(kclass.members):
        if m.size <= 1:
            continue
        table = tables[mi]
        nn = m.size
        for a in range(nn):
            for b in range(nn):
                if a == b:
                    continue
                vals = (
                    table[(a * nn + a) * nn + b],
                    table[(a * nn + b) * nn + a],
                    table[(b * nn + a) * nn + a],
                )
                bad = [v for v in vals if v not in ftas[mi][a]]
                rep.check(
                    f"maj_postcondition_{m.algebra.name}_{a}{b}",
                    not bad,
                    {"member": m.algebra.name, "pair": [a, b], "values": list(vals)}
                    if bad
                    else None,
                )
    return QuasiMajorityResult(rep, term, tables)


# -- almost triviality and maximal-generated suites --------------------------------


def set_partitions(n: int):
    """All partitions of range(n) in restricted-growth order."""

    def rec(rgs, m):
        i = len(rgs)
        if i == n:
            yield list(rgs)
            return
        for c in range(m + 1):
            yield from rec(rgs + [c], max(m, c + 1))

    for rgs in rec([], 0):
        blocks = {}
        for i, c in enumerate(rgs):
            blocks.setdefault(c, []).append(i)
        yield [tuple(b) for b in blocks.values()]


@dataclass
class AlmostTrivialResult:
    found: bool
    partition: list | None  # coordinate blocks
    bijections: dict | None  # coord -> mapping from the block's first coord
    report: Report

    def reconstruct(self, rel: Subpower) -> bool:
        """Rebuild the relation from the decomposition and compare."""
        if not self.found:
            return False
        block_proj = [
            {tuple(t[i] for i in blk) for t in rel.tuples}
            for blk in self.partition
        ]
        rebuilt = set()
        for combo in product(*[sorted(b) for b in block_proj]):
            t = [0] * rel.arity
            for blk, part in zip(self.partition, combo):
                for pos, val in zip(blk, part):
                    t[pos] = val
            rebuilt.add(tuple(t))
        return rebuilt == set(rel.tuples)


def almost_trivial_check(rel: Subpower) -> AlmostTrivialResult:
    """Search coordinate partitions for a product-of-bijection-blocks shape."""
    rep = Report("almost-trivial")
    n = rel.arity
    rep.hypothesis("subdirect", rel.is_subdirect())
    if not rep.applicable():
        return AlmostTrivialResult(False, None, None, rep)
    rsize = len(rel.tuples)
    for partition in set_partitions(n):
        sizes = 1
        ok = True
        bijections = {}
        for blk in partition:
            proj = {tuple(t[i] for i in blk) for t in rel.tuples}
            first = rel.factors[blk[0]].size
            if len(blk) == 1:
                sizes *= len(proj)
                continue
            if len(proj) != first:
                ok = False
                break
            maps = {pos: {} for pos in blk[1:]}
            firsts = set()
            for t in proj:
                firsts.add(t[0])
                for k, pos in enumerate(blk[1:], start=1):
                    maps[pos][t[0]] = t[k]
            if len(firsts) != first or any(
                len(set(mp.values())) != len(mp) for mp in maps.values()
            ):
                ok = False
                break
            sizes *= first
            for pos, mp in maps.items():
                bijections[pos] = dict(sorted(mp.items()))
        if ok and sizes == rsize:
            rep.check("decomposition_found", True)
            rep.note(f"partition={partition}")
            return AlmostTrivialResult(True, partition, bijections, rep)
    rep.check("decomposition_found", False, {"refuted": True})
    return AlmostTrivialResult(False, None, None, rep)


def maxgen_suite(
    rel: Subpower,
    kclass: AlgebraClass | None = None,
    mode: str = "exact",
    caps: Caps = DEFAULT_CAPS,
) -> Report:
    """Maximal-generated suite: almost-triviality over simple maximal-generated
    factors, the first-factor product split, and the maximal-component product
    containment; each section is gated by its own hypotheses."""
    from .congruence import is_simple

    rep = Report("maxgen")
    n = rel.arity
    kclass = _class_for(rel, kclass, caps)
    if not _base_hypotheses(rep, rel, kclass, mode):
        return rep
    rset = set(rel.tuples)

    fviews = [RootView(kclass, kclass.root_index(f)) for f in rel.factors]
    fgas = [_graphs(v, kclass, mode, caps) for v in fviews]

    def generating_max_components(fi):
        out = []
        alg = rel.factors[fi]
        for comp in fgas[fi].maximal_components("s"):
            from .algebra import sg_closure

            if sg_closure(alg, comp).members == frozenset(range(alg.size)):
                out.append(sorted(comp))
        return out

    sections_applicable = []

    # simple maximal-generated factors => almost trivial
    simple = all(is_simple(f, caps) for f in rel.factors)
    gen_comps = [generating_max_components(i) for i in range(n)]
    maxgen = all(gen_comps[i] for i in range(n))
    meets = False
    if simple and maxgen:
        for combo in product(*gen_comps):
            if any(all(t[i] in combo[i] for i in range(n)) for t in rel.tuples):
                meets = True
                break
    applicable = simple and maxgen and meets
    sections_applicable.append(applicable)
    if applicable:
        at = almost_trivial_check(rel)
        rep.check(
            "simple_maxgen_almost_trivial",
            at.found and at.reconstruct(rel),
            {"found": at.found} if not at.found else None,
        )
        # with all pairwise projections full the relation is the full product
        pairs_full = all(
            len({(t[i], t[j]) for t in rel.tuples})
            == rel.factors[i].size * rel.factors[j].size
            for i in range(n)
            for j in range(i + 1, n)
        )
        if n >= 3 and pairs_full:
            full = 1
            for f in rel.factors:
                full *= f.size
            rep.check(
                "simple_maxgen_full_product",
                len(rel.tuples) == full,
                {"size": len(rel.tuples), "expected": full},
            )
    else:
        rep.note(
            "simple-maxgen section inapplicable "
            f"(simple={simple}, maxgen={maxgen}, meets={meets})"
        )

    # first-factor split: R = A1 x pr_{2..n} R
    if n >= 2:
        rest = rel.project(list(range(1, n)))
        rest_view = SubpowerView(kclass, rest)
        rest_ga = _graphs(rest_view, kclass, mode, caps)
        rest_set = set(rest.tuples)
        rest_gens = []
        for comp in rest_ga.maximal_components("s"):
            closure = subpower_generate(rest.factors, sorted(comp), caps=caps)
            if set(closure.tuples) == rest_set:
                rest_gens.append(comp)
        pr1_full = all(
            len({(t[0], t[i]) for t in rel.tuples})
            == rel.factors[0].size * rel.factors[i].size
            for i in range(1, n)
        )
        meets2 = any(
            any(
                t[0] in c1 and tuple(t[1:]) in set(q)
                for t in rel.tuples
            )
            for c1 in gen_comps[0]
            for q in rest_gens
        ) if gen_comps[0] and rest_gens else False
        applicable = bool(gen_comps[0]) and bool(rest_gens) and pr1_full and meets2
        sections_applicable.append(applicable)
        if applicable:
            expected = {
                (a,) + t for a in range(rel.factors[0].size) for t in rest.tuples
            }
            rep.check(
                "first_factor_split",
                expected == rset,
                {"missing": sorted(map(_lbl, expected - rset))[:5]}
                if expected != rset
                else None,
            )
        else:
            rep.note(
                "first-factor-split section inapplicable "
                f"(maxgen1={bool(gen_comps[0])}, rest_maxgen={bool(rest_gens)}, "
                f"pr1i_full={pr1_full}, meets={meets2})"
            )

    # maximal-component product containment
    if n >= 2:
        linked_all = all(
            link_congruence(rel.project([0, i]), 0).is_full()
            and link_congruence(rel.project([0, i]), 1).is_full()
            for i in range(1, n)
        )
        sections_applicable.append(linked_all)
        if linked_all:
            rest = rel.project(list(range(1, n)))
            rest_view = SubpowerView(kclass, rest)
            rest_ga = _graphs(rest_view, kclass, mode, caps)
            max1 = set(fgas[0].max_elements)
            max_rest = set(rest_ga.max_elements)
            for t in rel.tuples:
                head, tail = t[0], tuple(t[1:])
                if head not in max1 or tail not in max_rest:
                    continue
                comp1 = next(
                    c for c in fgas[0].components("s") if head in c
                )
                comp_rest = next(
                    c for c in rest_ga.components("s") if tail in c
                )
                missing = [
                    (x,) + y
                    for x in comp1
                    for y in comp_rest
                    if (x,) + y not in rset
                ]
                rep.check(
                    f"max_comp_product_{_lbl(t)}",
                    not missing,
                    {"tuple": _lbl(t), "missing": [ _lbl(m) for m in missing[:5]]}
                    if missing
                    else None,
                )
        else:
            rep.note("max-comp-product section inapplicable (projections not linked)")

    rep.hypothesis("some_section_applicable", any(sections_applicable))
    return rep
