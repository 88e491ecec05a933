import random

from hypothesis import assume, given, settings, strategies as st

from alggraph.algebra import subpower_generate, term_table_on_algebra
from alggraph.caps import Caps
from alggraph.congruence import all_congruences
from alggraph.corpus import c3, le_s2, m2, mix3, s2, sm2, square, z2
from alggraph.edges import find_uniform_ops
from alggraph.kclass import AlgebraClass
from alggraph.thin import (
    analyze_graphs,
    build_graphs,
    operations_satisfying_condition,
    special_flag,
    thin_affine_edges,
    thin_edges,
    thin_majority_edges,
    thin_semilattice_edges,
    to_dot,
    verify_connectivity,
    verify_lifting,
)

from oracles import random_idempotent_algebra

TEST_CAPS = Caps(clone_limit=4000, clone_cost_limit=2_000_000)


def pairs(edges):
    return sorted((e.tail, e.head) for e in edges)


def test_thin_semilattice_examples():
    assert pairs(thin_semilattice_edges(s2())) == [(0, 1)]
    assert pairs(thin_semilattice_edges(m2())) == []
    assert pairs(thin_semilattice_edges(z2())) == []
    assert pairs(thin_semilattice_edges(c3())) == [(0, 1), (0, 2), (1, 2)]


def test_thin_semilattice_witness_term():
    edge = thin_semilattice_edges(s2())[0]
    table = term_table_on_algebra(edge.witness["term"], s2(), 2)
    assert table[0 * 2 + 1] == 1 and table[1 * 2 + 0] == 1


def test_condition_ops_examples():
    km = AlgebraClass.hs(m2())
    maj = tuple((x & y) | (y & z) | (x & z) for x in (0, 1) for y in (0, 1) for z in (0, 1))
    assert maj in operations_satisfying_condition(km, "majority").tables_on(m2())

    kz = AlgebraClass.hs(z2())
    xor3 = tuple(x ^ y ^ z for x in (0, 1) for y in (0, 1) for z in (0, 1))
    assert xor3 in operations_satisfying_condition(kz, "minority").tables_on(z2())

    ks = AlgebraClass.hs(s2())
    join3 = tuple(x | y | z for x in (0, 1) for y in (0, 1) for z in (0, 1))
    assert join3 in operations_satisfying_condition(ks, "majority").tables_on(s2())


def test_thin_majority_and_affine_examples():
    km = AlgebraClass.hs(m2())
    assert pairs(thin_majority_edges(m2(), km)) == [(0, 1), (1, 0)]
    assert pairs(thin_affine_edges(m2(), km)) == []

    kz = AlgebraClass.hs(z2())
    assert pairs(thin_affine_edges(z2(), kz)) == [(0, 1), (1, 0)]
    assert pairs(thin_majority_edges(z2(), kz)) == []

    # the first projection satisfies the majority condition for HS(s2)
    # (no thick majority edges), so no pair passes the universal condition
    ks = AlgebraClass.hs(s2())
    assert pairs(thin_majority_edges(s2(), ks)) == []
    assert pairs(thin_affine_edges(s2(), ks)) == []


def test_every_thin_sem_edge_is_a_semilattice_edge():
    from alggraph.edges import classify_pair

    for alg in (s2(), c3(), mix3(), sm2()):
        for e in thin_semilattice_edges(alg):
            rec = classify_pair(alg, min(e.tail, e.head), max(e.tail, e.head))
            assert rec.resolved_type == "semilattice"


def test_special_flags():
    km = AlgebraClass.hs(m2())
    assert special_flag(m2(), 0, 1, km)
    assert special_flag(m2(), 1, 0, km)
    kz = AlgebraClass.hs(z2())
    assert not special_flag(z2(), 0, 1, kz)  # affine, not a majority edge


def test_graph_analysis_corpus():
    ga = analyze_graphs(s2())
    assert ga.max_elements == [1] and ga.amax_elements == [1] and ga.umax_elements == [1]
    ga = analyze_graphs(z2())
    assert sorted(ga.max_elements) == [0, 1]  # two singleton maximal components
    assert len(set(ga.scc_s)) == 2
    assert sorted(ga.amax_elements) == [0, 1] and len(set(ga.scc_as)) == 1
    ga = analyze_graphs(m2())
    assert sorted(ga.umax_elements) == [0, 1]
    assert len(set(ga.scc_as)) == 2  # as-components are singletons
    ga = analyze_graphs(mix3())
    assert sorted(ga.max_elements) == [1, 2]
    assert sorted(ga.umax_elements) == [1, 2]


def test_graph_inclusions_and_order():
    for alg in (s2(), m2(), z2(), c3(), mix3()):
        K = AlgebraClass.hs(alg)
        edges = thin_edges(alg, K)
        ga = build_graphs(alg, edges, K)
        s = {(e.tail, e.head) for e in edges if e.type == "semilattice"}
        asg = s | {(e.tail, e.head) for e in edges if e.type == "affine"}
        asm = asg | {(e.tail, e.head) for e in edges if e.type == "majority"}
        assert s <= asg <= asm
        # condensation order is acyclic
        import itertools

        order = set(ga.s_order)
        for x, y in order:
            assert (y, x) not in order


def test_ft_sets():
    ga = analyze_graphs(c3())
    assert ga.ft(0, "s") == frozenset({0, 1, 2})
    assert ga.ft(1, "s") == frozenset({1, 2})
    assert ga.ft(2, "as") == frozenset({2})


def test_verify_connectivity_corpus():
    for alg in (s2(), m2(), z2(), c3(), mix3(), sm2()):
        rep = verify_connectivity(alg)
        assert rep.verdict == "pass", (alg.name, rep.to_json_dict())


def test_verify_connectivity_inapplicable_for_unary():
    from alggraph.corpus import proj2

    rep = verify_connectivity(proj2())
    assert rep.verdict == "inapplicable"
    assert rep.hypotheses["omits_type1"] is False


def test_canonical_f_steps_stay_in_s_reachability():
    for alg in (s2(), c3(), mix3()):
        K = AlgebraClass.hs(alg)
        ops = find_uniform_ops(K)
        ri = K.member_for_root(0)
        table = ops.f_tables[ri]
        ga = analyze_graphs(alg, K)
        for a in range(alg.size):
            for b in range(alg.size):
                v = table[a * alg.size + b]
                assert v == a or ga.reach(a, v, "s")


def test_witness_mode_is_sound_for_refutation():
    for alg in (s2(), m2(), z2(), mix3()):
        K = AlgebraClass.hs(alg)
        exact = set(pairs(thin_majority_edges(alg, K, "exact")))
        witness = set(pairs(thin_majority_edges(alg, K, "witness")))
        assert exact <= witness
        exact_a = set(pairs(thin_affine_edges(alg, K, "exact")))
        witness_a = set(pairs(thin_affine_edges(alg, K, "witness")))
        assert exact_a <= witness_a


def test_dot_export():
    ga = analyze_graphs(mix3())
    dot = to_dot(ga, "mix3")
    assert "digraph mix3" in dot
    assert "style=solid" in dot and "style=dashed" in dot
    assert "cluster_s" in dot


def test_lifting_quotient_trivial_and_corpus():
    from alggraph.congruence import full_partition

    rep = verify_lifting("quotient-edge", algebra=s2(), theta=full_partition(2))
    assert rep.verdict == "pass"
    for alg in (s2(), m2(), z2(), c3(), mix3()):
        for theta in all_congruences(alg):
            for case in ("quotient-edge", "quotient-path"):
                rep = verify_lifting(case, algebra=alg, theta=theta)
                assert rep.verdict != "fail", (alg.name, case, rep.to_json_dict())


def test_lifting_product_examples():
    rel = le_s2()
    rep = verify_lifting("product-maximal", rel=rel, coords=[0])
    assert rep.verdict == "pass"
    # (1,1) is maximal in the relation and its projections are maximal
    ga = analyze_graphs(rel)
    assert (1, 1) in ga.max_elements

    rep = verify_lifting("as-product", rel=square(s2()))
    assert rep.verdict == "pass"
    ga_sq = analyze_graphs(square(s2()))
    assert ga_sq.max_elements == [(1, 1)]

    for case in ("product-edge", "product-path"):
        rep = verify_lifting(case, rel=rel, coords=[0])
        assert rep.verdict == "pass", (case, rep.to_json_dict())


@settings(max_examples=10, deadline=None)
@given(st.data())
def test_lifting_random_subpowers(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    alg = data.draw(st.sampled_from([s2(), m2(), z2(), c3(), mix3()]))
    gens = [
        (rng.randrange(alg.size), rng.randrange(alg.size))
        for _ in range(data.draw(st.integers(2, 3)))
    ]
    rel = subpower_generate([alg, alg], gens)
    assume(rel.is_subdirect())
    K = AlgebraClass.hs(alg)
    coords = data.draw(st.sampled_from([[0], [1]]))
    for case in ("product-edge", "product-path", "product-maximal"):
        rep = verify_lifting(case, rel=rel, coords=coords, kclass=K)
        assert rep.verdict != "fail", (alg.name, case, rep.to_json_dict())
    rep = verify_lifting("as-product", rel=rel, kclass=K)
    assert rep.verdict != "fail"
