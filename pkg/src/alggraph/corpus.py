"""Built-in canonical algebras and relations used throughout tests and demos."""

from __future__ import annotations

from itertools import product

from .algebra import FiniteAlgebra, OpTable, Subpower, subpower_generate, validate_algebra


def _table(size, arity, fn):
    return tuple(fn(*args) for args in product(range(size), repeat=arity))


def s2() -> FiniteAlgebra:
    """Two-element join semilattice."""
    return validate_algebra(
        FiniteAlgebra("s2", 2, (OpTable("join", 2, _table(2, 2, lambda x, y: x | y)),))
    )


def m2() -> FiniteAlgebra:
    """Two-element majority algebra."""
    maj = lambda x, y, z: (x & y) | (y & z) | (x & z)
    return validate_algebra(
        FiniteAlgebra("m2", 2, (OpTable("maj", 3, _table(2, 3, maj)),))
    )


def z2() -> FiniteAlgebra:
    """Two-element affine algebra (x + y + z mod 2)."""
    return validate_algebra(
        FiniteAlgebra("z2", 2, (OpTable("mal", 3, _table(2, 3, lambda x, y, z: x ^ y ^ z)),))
    )


def proj2() -> FiniteAlgebra:
    """Two-element algebra whose only operation is the first projection."""
    return validate_algebra(
        FiniteAlgebra("proj2", 2, (OpTable("p1", 2, _table(2, 2, lambda x, y: x)),))
    )


def c3() -> FiniteAlgebra:
    """Three-element chain 0 < 1 < 2 under join."""
    return validate_algebra(
        FiniteAlgebra("c3", 3, (OpTable("join", 2, _table(3, 2, max)),))
    )


def sm2() -> FiniteAlgebra:
    """Two-element algebra with both a join and a majority basic operation.

    Its single pair has semilattice and majority witnesses at the same
    congruence, exercising the resolved-type precedence.
    """
    maj = lambda x, y, z: (x & y) | (y & z) | (x & z)
    return validate_algebra(
        FiniteAlgebra(
            "sm2",
            2,
            (
                OpTable("join", 2, _table(2, 2, lambda x, y: x | y)),
                OpTable("maj", 3, _table(2, 3, maj)),
            ),
        )
    )


def lat2() -> FiniteAlgebra:
    """Two-element lattice (join and meet).

    Both (0,1) and (1,0) are thin semilattice edges, so the whole algebra is
    one maximal component and the algebra is maximal generated.
    """
    return validate_algebra(
        FiniteAlgebra(
            "lat2",
            2,
            (
                OpTable("join", 2, _table(2, 2, lambda x, y: x | y)),
                OpTable("meet", 2, _table(2, 2, lambda x, y: x & y)),
            ),
        )
    )


def t3() -> FiniteAlgebra:
    """Three-element tournament: commutative binary absorption 0->1->2->0.

    The one-step order has a cycle through intermediate elements, so the
    whole algebra is a single maximal component generating it: the canonical
    simple maximal-generated algebra.
    """
    wins = {(0, 1): 1, (1, 2): 2, (2, 0): 0}

    def f(x, y):
        if x == y:
            return x
        return wins.get((x, y), wins.get((y, x)))

    return validate_algebra(
        FiniteAlgebra("t3", 3, (OpTable("f", 2, _table(3, 2, f)),))
    )


def mix3() -> FiniteAlgebra:
    """Three-element algebra mixing semilattice and affine structure.

    Elements encode pairs (0,0) -> 0, (1,0) -> 1, (1,1) -> 2; the single
    ternary operation acts as three-way OR on the first coordinate and as
    x+y+z mod 2 on the second. The pair {0,1} is a semilattice edge, {1,2} an
    affine edge, and {0,2} a semilattice edge with an extra affine witness.
    """
    enc = {(0, 0): 0, (1, 0): 1, (1, 1): 2}
    dec = {v: k for k, v in enc.items()}

    def op(x, y, z):
        (a1, a2), (b1, b2), (c1, c2) = dec[x], dec[y], dec[z]
        return enc[(a1 | b1 | c1, a2 ^ b2 ^ c2)]

    return validate_algebra(
        FiniteAlgebra("mix3", 3, (OpTable("t", 3, _table(3, 3, op)),))
    )


def corpus_algebras() -> dict:
    algs = [s2(), m2(), z2(), proj2(), c3(), sm2(), lat2(), t3(), mix3()]
    return {a.name: a for a in algs}


# -- relations ---------------------------------------------------------------


def le_s2() -> Subpower:
    """The order relation {(0,0),(0,1),(1,1)} of the 2-element semilattice."""
    a = s2()
    return subpower_generate([a, a], [(0, 0), (0, 1), (1, 1)])


def parity3() -> Subpower:
    """Even-parity triples over the 2-element affine algebra."""
    a = z2()
    return subpower_generate([a, a, a], [(0, 0, 0), (0, 1, 1), (1, 0, 1)])


def graph_of_identity(algebra: FiniteAlgebra) -> Subpower:
    return subpower_generate(
        [algebra, algebra], [(x, x) for x in range(algebra.size)]
    )


def square(algebra: FiniteAlgebra) -> Subpower:
    from .algebra import full_product

    return full_product([algebra, algebra])


def corpus_relations() -> dict:
    return {
        "le_s2": le_s2(),
        "parity3": parity3(),
        "id_z2": graph_of_identity(z2()),
        "id_m2": graph_of_identity(m2()),
        "s2_sq": square(s2()),
        "z2_sq": square(z2()),
        "m2_cube": subpower_generate(
            [m2()] * 3, [t for t in product(range(2), repeat=3)]
        ),
    }


def relation_json_dict(rel: Subpower) -> dict:
    return {
        "factors": [f.to_json_dict() for f in rel.factors],
        "arity": rel.arity,
        "tuples": [list(t) for t in rel.tuples],
    }
