import random

from hypothesis import assume, given, settings, strategies as st

from alggraph.algebra import full_product, subpower_generate
from alggraph.caps import Caps
from alggraph.corpus import (
    c3,
    graph_of_identity,
    le_s2,
    m2,
    mix3,
    parity3,
    s2,
    square,
    z2,
)
from alggraph.kclass import AlgebraClass
from alggraph.products import (
    almost_trivial_check,
    linkage_rect_check,
    maxgen_suite,
    q2d_check,
    quasi_majority,
    rect_check,
    shared_majority_row,
    two_decomposable,
    umax_rect_check,
)

TEST_CAPS = Caps(clone_limit=4000, clone_cost_limit=2_000_000)


def test_rect_examples():
    assert rect_check(le_s2()).verdict == "pass"
    rep = rect_check(graph_of_identity(z2()))
    assert rep.verdict == "inapplicable" and rep.hypotheses["linked"] is False
    assert rect_check(square(z2())).verdict == "pass"


def test_linkage_rect_examples():
    assert linkage_rect_check(graph_of_identity(m2())).verdict == "pass"
    assert linkage_rect_check(square(s2())).verdict == "pass"
    assert linkage_rect_check(le_s2()).verdict == "pass"


def test_umax_rect_examples():
    assert umax_rect_check(le_s2()).verdict == "pass"
    assert umax_rect_check(graph_of_identity(m2())).verdict == "pass"
    assert umax_rect_check(square(mix3())).verdict == "pass"


def test_rect_monotone_under_adding_tuples():
    # growing the order relation of s2 to the full square keeps the verdict
    rel = le_s2()
    assert rect_check(rel).verdict == "pass"
    grown = subpower_generate([s2(), s2()], list(rel.tuples) + [(1, 0)])
    assert rect_check(grown).verdict == "pass"


def test_q2d_examples():
    assert q2d_check(parity3()).verdict == "pass"
    cube = full_product([m2()] * 3)
    assert q2d_check(cube).verdict == "pass"
    assert q2d_check(le_s2()).verdict == "pass"
    assert q2d_check(parity3(), pinned=(0, 1)).verdict == "pass"


def test_q2d_counts_candidates():
    rep = q2d_check(parity3())
    assert any(n.startswith("candidates_examined=") for n in rep.notes)


def test_quasi_majority_corpus():
    for alg in (s2(), m2(), z2(), c3()):
        K = AlgebraClass.hs(alg)
        res = quasi_majority(K)
        assert res.verdict == "pass", (alg.name, res.report.to_json_dict())
    km = AlgebraClass.hs(m2())
    maj = tuple((x & y) | (y & z) | (x & z) for x in (0, 1) for y in (0, 1) for z in (0, 1))
    assert quasi_majority(km).tables[km.member_for_root(0)] == maj


def test_quasi_majority_deterministic():
    tables1 = quasi_majority(AlgebraClass.hs(c3())).tables
    tables2 = quasi_majority(AlgebraClass.hs(c3())).tables
    assert tables1 == tables2


def test_almost_trivial_examples():
    rel = graph_of_identity(z2())
    res = almost_trivial_check(rel)
    assert res.found and res.partition == [(0, 1)]
    assert res.reconstruct(rel)

    res = almost_trivial_check(square(z2()))
    assert res.found and res.partition == [(0,), (1,)]

    assert not almost_trivial_check(parity3()).found


def test_maxgen_parity3():
    rep = maxgen_suite(parity3())
    # factors are simple but not maximal generated: the first two sections
    # are inapplicable, the component-product section passes trivially
    assert rep.verdict == "pass"
    assert any("simple-maxgen section inapplicable" in n for n in rep.notes)


def test_t3_is_simple_maximal_generated():
    from alggraph.algebra import sg_closure
    from alggraph.congruence import is_simple
    from alggraph.corpus import t3
    from alggraph.thin import analyze_graphs

    alg = t3()
    assert is_simple(alg)
    ga = analyze_graphs(alg)
    assert sorted(ga.max_elements) == [0, 1, 2]
    assert len(set(ga.scc_s)) == 1  # one s-component through the 3-cycle
    assert sg_closure(alg, ga.max_elements).members == frozenset(range(3))


def test_maxgen_t3_square():
    from alggraph.corpus import t3

    rep = maxgen_suite(square(t3()))
    assert rep.verdict == "pass"
    names = [c["name"] for c in rep.checks]
    assert "first_factor_split" in names
    assert "simple_maxgen_almost_trivial" in names


def test_maxgen_t3_identity():
    from alggraph.corpus import t3

    rel = graph_of_identity(t3())
    rep = maxgen_suite(rel)
    assert rep.verdict == "pass"
    assert "simple_maxgen_almost_trivial" in [c["name"] for c in rep.checks]
    res = almost_trivial_check(rel)
    assert res.found and res.partition == [(0, 1)]


def test_lat2_order_relation_rectangularity():
    # regression for the canonical-order reading: the order relation of the
    # 2-element lattice is linked and subdirect, and rectangularity holds
    # because the as-components are singletons under the fixed operation
    from alggraph.corpus import lat2

    ge = subpower_generate([lat2(), lat2()], [(0, 0), (1, 0), (1, 1)])
    rep = rect_check(ge)
    assert rep.hypotheses["linked"] is True
    assert rep.verdict == "pass"
    le = subpower_generate([lat2(), lat2()], [(0, 0), (0, 1), (1, 1)])
    assert rect_check(le).verdict == "pass"


def test_maxgen_s2_square_sections_inapplicable():
    # s2 is not maximal generated (Sg({1}) = {1}), so only the
    # component-product section can apply
    rep = maxgen_suite(square(s2()))
    assert rep.verdict == "pass"
    assert all(c["name"].startswith("max_comp_product") for c in rep.checks)


def test_baker_pixley_consistency():
    km = AlgebraClass.hs(m2())
    assert shared_majority_row(km) is not None
    rng = random.Random(11)
    for _ in range(20):
        gens = [
            tuple(rng.randrange(2) for _ in range(3))
            for _ in range(rng.randrange(2, 5))
        ]
        rel = subpower_generate([m2()] * 3, gens)
        holds, cex = two_decomposable(rel)
        assert holds, (gens, cex)
        if rel.is_subdirect():
            assert q2d_check(rel, kclass=km).verdict == "pass"


def test_no_shared_majority_for_affine():
    assert shared_majority_row(AlgebraClass.hs(z2())) is None


@settings(max_examples=10, deadline=None)
@given(st.data())
def test_random_rect_and_q2d_never_fail(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    alg = data.draw(st.sampled_from([s2(), m2(), z2(), c3(), mix3()]))
    K = AlgebraClass.hs(alg)
    gens = [
        (rng.randrange(alg.size), rng.randrange(alg.size))
        for _ in range(data.draw(st.integers(2, 4)))
    ]
    rel = subpower_generate([alg, alg], gens)
    assume(rel.is_subdirect())
    for checker in (rect_check, linkage_rect_check, umax_rect_check):
        assert checker(rel, K).verdict != "fail"
    assert q2d_check(rel, kclass=K).verdict != "fail"
