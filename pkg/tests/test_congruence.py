import random

from hypothesis import given, settings, strategies as st

from alggraph.congruence import (
    Partition,
    all_congruences,
    cg,
    equality_partition,
    is_linked,
    link_congruence,
    link_tolerance,
    maximal_congruences,
    simplicity,
)
from alggraph.algebra import check_compatible, full_product, subpower_generate
from alggraph.corpus import c3, graph_of_identity, le_s2, m2, s2, z2

from oracles import naive_cg, random_idempotent_algebra


def test_cg_examples():
    assert cg(c3(), []) == equality_partition(3)
    assert cg(z2(), [(0, 1)]).is_full()
    assert cg(c3(), [(0, 1)]).block_id == (0, 0, 1)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_cg_matches_oracle_and_is_minimal(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    n = data.draw(st.integers(2, 4))
    alg = random_idempotent_algebra(rng, n, (2,))
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1))
    got = cg(alg, [(a, b)])
    assert got.block_id == Partition(naive_cg(alg, [(a, b)])).block_id
    assert check_compatible(alg, got.block_id) is None
    # minimality: intersection of all lattice congruences containing the pair
    meet = [q for q in all_congruences(alg) if q.same(a, b)]
    inter = tuple(
        min(
            range(n),
            key=lambda y: (not all(q.same(x, y) for q in meet), y),
        )
        for x in range(n)
    )
    joined = Partition(
        tuple(
            next(y for y in range(n) if all(q.same(x, y) for q in meet))
            for x in range(n)
        )
    )
    assert got.block_id == joined.block_id


def test_congruence_lattices():
    blocks = {p.blocks_str() for p in all_congruences(c3())}
    assert blocks == {"0|1|2", "0|12", "01|2", "012"}
    assert simplicity(z2()) == (True, "")
    assert not simplicity(c3())[0]


def test_one_element_degenerate():
    from alggraph.algebra import FiniteAlgebra, OpTable

    one = FiniteAlgebra("pt", 1, (OpTable("f", 2, (0,)),))
    assert simplicity(one) == (False, "degenerate")


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_maximal_congruences_nonempty(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    n = data.draw(st.integers(2, 4))
    alg = random_idempotent_algebra(rng, n, (2,))
    assert maximal_congruences(alg)


def test_link_examples():
    ident = graph_of_identity(m2())
    assert link_tolerance(ident, 0).pairs == frozenset({(0, 0), (1, 1)})
    assert not is_linked(ident)
    assert is_linked(full_product([m2(), m2()]))
    rel = le_s2()
    assert link_congruence(rel, 0).is_full()
    assert link_congruence(rel, 1).is_full()
    assert is_linked(rel)


def test_bijection_graph_between_simple_factors_not_linked():
    for alg in (z2(), m2()):
        assert not is_linked(graph_of_identity(alg))


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_link_congruence_is_congruence_of_projection(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    n = data.draw(st.integers(2, 3))
    alg = random_idempotent_algebra(rng, n, (2,))
    gens = [
        (rng.randrange(n), rng.randrange(n))
        for _ in range(data.draw(st.integers(2, 4)))
    ]
    rel = subpower_generate([alg, alg], gens)
    for coord in (0, 1):
        if not rel.is_subdirect(coord):
            continue
        lk = link_congruence(rel, coord)
        assert check_compatible(alg, lk.block_id) is None
