import random

import pytest
from hypothesis import given, settings, strategies as st

from alggraph.algebra import (
    FiniteAlgebra,
    OpTable,
    full_product,
    hs_class,
    quotient,
    sg_closure,
    subpower_generate,
    term_ops,
    validate_algebra,
)
from alggraph.congruence import Partition, full_partition
from alggraph.corpus import c3, m2, s2, z2
from alggraph.errors import MalformedTable, NonIdempotent, NotACongruence

from oracles import naive_sg, naive_subpower, random_idempotent_algebra


def test_validate_accepts_semilattice():
    alg = validate_algebra(
        {"name": "j", "size": 2, "operations": [{"name": "f", "arity": 2, "table": [0, 1, 1, 1]}]}
    )
    assert alg.size == 2


def test_validate_rejects_non_idempotent():
    with pytest.raises(NonIdempotent) as exc:
        validate_algebra(
            {"size": 2, "operations": [{"name": "f", "arity": 2, "table": [0, 0, 0, 0]}]}
        )
    assert exc.value.witness == 1


def test_validate_rejects_wrong_length():
    with pytest.raises(MalformedTable):
        validate_algebra(
            {"size": 3, "operations": [{"name": "f", "arity": 3, "table": [0] * 26}]}
        )


def test_sg_examples():
    assert sg_closure(s2(), [0]).members == {0}
    assert sg_closure(s2(), [0, 1]).members == {0, 1}
    assert sg_closure(c3(), [0, 2]).members == {0, 2}


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_sg_is_closure_operator(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    n = data.draw(st.integers(2, 4))
    alg = random_idempotent_algebra(rng, n, (2,))
    seed = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    bigger = seed | data.draw(st.sets(st.integers(0, n - 1)))
    got = sg_closure(alg, seed).members
    assert seed <= got  # extensive
    assert got <= sg_closure(alg, bigger).members  # monotone
    assert sg_closure(alg, got).members == got  # idempotent
    assert got == naive_sg(alg, seed)  # oracle


def test_quotient_by_equality_is_copy():
    alg = c3()
    quo, cmap = quotient(alg, Partition((0, 1, 2)))
    assert quo.size == 3 and cmap == [0, 1, 2]
    assert quo.operations[0].table == alg.operations[0].table


def test_quotient_by_full_is_point():
    quo, _ = quotient(c3(), full_partition(3))
    assert quo.size == 1


def test_quotient_chain_collapse():
    quo, _ = quotient(c3(), Partition((0, 0, 1)))
    point, _ = quotient(quo, full_partition(2))
    assert point.size == 1


def test_quotient_c3_collapse_bottom():
    quo, cmap = quotient(c3(), Partition((0, 0, 1)))
    assert quo.size == 2
    assert quo.operations[0].table == (0, 1, 1, 1)
    assert cmap == [0, 0, 1]


def test_quotient_rejects_incompatible():
    with pytest.raises(NotACongruence):
        quotient(c3(), Partition((0, 1, 0)))


def test_subpower_examples():
    assert sorted(subpower_generate([z2()] * 2, [(0, 1), (1, 0)]).tuples) == [(0, 1), (1, 0)]
    assert sorted(subpower_generate([s2()] * 2, [(0, 1), (1, 0)]).tuples) == [
        (0, 1),
        (1, 0),
        (1, 1),
    ]
    full = full_product([m2(), m2()])
    regen = subpower_generate([m2()] * 2, full.tuples)
    assert set(regen.tuples) == set(full.tuples)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_subpower_matches_oracle_and_replays(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    n = data.draw(st.integers(2, 3))
    alg = random_idempotent_algebra(rng, n, (data.draw(st.integers(2, 3)),))
    arity = data.draw(st.integers(2, 3))
    gens = [
        tuple(rng.randrange(n) for _ in range(arity))
        for _ in range(data.draw(st.integers(1, 3)))
    ]
    power = subpower_generate([alg] * arity, gens, track=True)
    assert set(power.tuples) == naive_subpower([alg] * arity, gens)
    for t in power.tuples:
        assert power.replay(t) == t


def test_term_ops_s2_binary():
    tables = {f.table for f in term_ops(s2(), 2).functions}
    assert tables == {(0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 1)}


def test_term_ops_z2_ternary():
    ts = term_ops(z2(), 3)
    assert ts.complete
    tables = {f.table for f in ts.functions}
    xor3 = tuple(x ^ y ^ z for x in (0, 1) for y in (0, 1) for z in (0, 1))
    assert len(tables) == 4 and xor3 in tables


def test_term_ops_unary_identity():
    ts = term_ops(c3(), 1)
    assert [f.table for f in ts.functions] == [(0, 1, 2)]


def test_term_ops_complete_sets_are_closed():
    for alg in (s2(), m2(), z2()):
        ts = term_ops(alg, 2)
        assert ts.complete
        tables = {f.table for f in ts.functions}
        n = alg.size
        for op in alg.operations:
            for gs in [(g1, g2) for g1 in ts.functions for g2 in ts.functions]:
                if op.arity == 2:
                    comp = tuple(
                        op.apply(n, (gs[0].table[i], gs[1].table[i]))
                        for i in range(n * n)
                    )
                    assert comp in tables


def test_hs_class_shapes():
    names = [(m.algebra.size, m.theta is None) for m in hs_class(s2())]
    # the two singletons, s2 itself, and s2 modulo the full congruence
    assert sorted(names) == [(1, False), (1, True), (1, True), (2, True)]
    zs = hs_class(z2())
    assert sorted(m.algebra.size for m in zs) == [1, 1, 1, 2]


def test_hs_class_flags_duplicates():
    members = hs_class(s2())
    dup = [m for m in members if m.duplicate_of is not None]
    # the two singleton subalgebras collapse to the same shape
    assert len(dup) >= 1
