"""Acceptance suite: one test per criterion, each printing a pass/fail line.

All tolerances and time bounds are pinned here. Campaign instance streams are
seeded and deterministic; every verifier verdict of "fail" is a release
blocker.
"""

import json
import random
import time

import pytest

from alggraph.algebra import sg_closure, subpower_generate
from alggraph.caps import Caps
from alggraph.congruence import Partition, all_congruences, cg
from alggraph.corpus import c3, corpus_algebras, lat2, m2, mix3, s2, sm2, t3, z2
from alggraph.edges import classify_pair
from alggraph.kclass import AlgebraClass
from alggraph.products import (
    q2d_check,
    quasi_majority,
    rect_check,
    linkage_rect_check,
    shared_majority_row,
    two_decomposable,
    umax_rect_check,
)
from alggraph.randgen import (
    Campaign,
    GeneratorSpec,
    campaign_json,
    random_instances,
    run_campaign,
)
from alggraph.thin import verify_connectivity, verify_lifting

from oracles import naive_cg, naive_sg, naive_subpower, random_idempotent_algebra

CAMPAIGN_CAPS = Caps(clone_limit=4000, clone_cost_limit=3_000_000)
ALGEBRA_FILTERS = ("tractable", "omits-type-1", "smooth", "class-smooth")


def _announce(num, ok, detail):
    print(f"\nACCEPTANCE {num} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_criterion_1_two_element_classification():
    t0 = time.time()
    expected = {
        "s2": "semilattice",
        "m2": "majority",
        "z2": "affine",
        "proj2": "unary",
    }
    algs = corpus_algebras()
    got = {name: classify_pair(algs[name], 0, 1).resolved_type for name in expected}
    elapsed = time.time() - t0
    ok = got == expected and elapsed < 1.0
    _announce(1, ok, f"classification {got}, {elapsed:.2f}s < 1s")


def test_criterion_2_closure_oracle_equivalence():
    t0 = time.time()
    rng = random.Random(20260809)
    instances = 0
    mismatches = 0
    while instances < 1000:
        size = rng.randrange(2, 5)
        arity = rng.randrange(2, 4)
        alg = random_idempotent_algebra(rng, size, (arity,), f"o{instances}")
        seed = {rng.randrange(size) for _ in range(rng.randrange(1, 3))}
        if sg_closure(alg, seed).members != frozenset(naive_sg(alg, seed)):
            mismatches += 1
        pair = (rng.randrange(size), rng.randrange(size))
        if cg(alg, [pair]).block_id != Partition(naive_cg(alg, [pair])).block_id:
            mismatches += 1
        gens = [
            tuple(rng.randrange(size) for _ in range(2))
            for _ in range(rng.randrange(1, 4))
        ]
        power = subpower_generate([alg, alg], gens)
        if set(power.tuples) != naive_subpower([alg, alg], gens):
            mismatches += 1
        instances += 1
    elapsed = time.time() - t0
    ok = mismatches == 0 and elapsed < 60.0
    _announce(
        2, ok, f"{instances} instances, {mismatches} mismatches, {elapsed:.1f}s < 60s"
    )


def test_criterion_3_connectivity_campaign():
    t0 = time.time()
    totals = {"pass": 0, "fail": 0, "inapplicable": 0}
    failures = []
    streams = (
        (GeneratorSpec(sizes=(2,), arities=(3,), filters=ALGEBRA_FILTERS), 31, 140),
        (GeneratorSpec(sizes=(3,), arities=(2,), filters=ALGEBRA_FILTERS), 32, 70),
    )
    for spec, seed, count in streams:
        for inst in random_instances(spec, seed, count, CAMPAIGN_CAPS):
            rep = verify_connectivity(inst.value, inst.kclass, caps=CAMPAIGN_CAPS)
            totals[rep.verdict] += 1
            if rep.verdict == "fail":
                failures.append((inst.value.to_json_dict(), rep.to_json_dict()))
    elapsed = time.time() - t0
    applicable = totals["pass"] + totals["fail"]
    ok = (
        applicable >= 200
        and totals["fail"] == 0
        and elapsed < 600.0
    )
    _announce(
        3,
        ok,
        f"{applicable} applicable instances, {totals['fail']} failures, "
        f"{totals['inapplicable']} inapplicable, {elapsed:.1f}s < 600s"
        + (f"; first failure: {failures[0]}" if failures else ""),
    )


def _factor_pools():
    """Signature-sharing factor pools: corpus plus filtered random algebras."""
    pools = [
        [s2(), c3()],
        [m2()],
        [z2()],
        [lat2()],
        [t3()],
        [mix3()],
        [sm2()],
    ]
    spec = GeneratorSpec(sizes=(2, 3), arities=(2,), filters=ALGEBRA_FILTERS)
    randoms = [i.value for i in random_instances(spec, 33, 4, CAMPAIGN_CAPS)]
    pools.append(randoms)
    return pools


def test_criterion_4_rectangularity_campaign():
    t0 = time.time()
    pools = _factor_pools()
    counts = {"relations": 0, "fail": 0, "pass": 0, "inapplicable": 0}
    failures = []
    per_pool = 75
    for pi, pool in enumerate(pools):
        spec = GeneratorSpec(
            kind="relation", rel_arity=2, generators=(2, 3, 4), filters=("subdirect",)
        )
        for inst in random_instances(spec, 100 + pi, per_pool, CAMPAIGN_CAPS, pool):
            counts["relations"] += 1
            for checker in (rect_check, linkage_rect_check, umax_rect_check):
                rep = checker(inst.value, inst.kclass, caps=CAMPAIGN_CAPS)
                counts[rep.verdict] += 1
                if rep.verdict == "fail":
                    failures.append(
                        (rep.name, [list(t) for t in inst.value.tuples], rep.to_json_dict())
                    )
    elapsed = time.time() - t0
    ok = counts["relations"] >= 500 and counts["fail"] == 0 and elapsed < 600.0
    _announce(
        4,
        ok,
        f"{counts['relations']} relations, verdicts pass={counts['pass']} "
        f"inapplicable={counts['inapplicable']} fail={counts['fail']}, "
        f"{elapsed:.1f}s < 600s" + (f"; first: {failures[0]}" if failures else ""),
    )


def test_criterion_5_q2d_campaign():
    t0 = time.time()
    pools = _factor_pools()
    rng = random.Random(555)
    counts = {"relations": 0, "fail": 0, "pass": 0, "inapplicable": 0, "bp": 0}
    failures = []
    per_pool = 30
    for pi, pool in enumerate(pools):
        kclass = None
        for arity in (3, 4):
            spec = GeneratorSpec(
                kind="relation",
                rel_arity=arity,
                generators=(2, 3, 4),
                filters=("subdirect",),
            )
            for inst in random_instances(
                spec, 200 + 10 * pi + arity, per_pool // 2, CAMPAIGN_CAPS, pool
            ):
                kclass = inst.kclass
                counts["relations"] += 1
                rep = q2d_check(inst.value, None, kclass, caps=CAMPAIGN_CAPS)
                counts[rep.verdict] += 1
                if rep.verdict == "fail":
                    failures.append(([list(t) for t in inst.value.tuples], rep.to_json_dict()))
                pin = tuple(
                    sorted(rng.sample(range(arity), rng.randrange(1, arity)))
                )
                rep = q2d_check(inst.value, pin, kclass, caps=CAMPAIGN_CAPS)
                counts[rep.verdict] += 1
                if rep.verdict == "fail":
                    failures.append(([list(t) for t in inst.value.tuples], rep.to_json_dict()))
                if shared_majority_row(kclass) is not None:
                    holds, cex = two_decomposable(inst.value)
                    counts["bp"] += 1
                    if not holds:
                        counts["fail"] += 1
                        failures.append(
                            ([list(t) for t in inst.value.tuples], {"baker_pixley": list(cex)})
                        )
    elapsed = time.time() - t0
    ok = counts["relations"] >= 200 and counts["fail"] == 0 and elapsed < 900.0
    _announce(
        5,
        ok,
        f"{counts['relations']} relations (+pinned variants), "
        f"baker-pixley cross-checks={counts['bp']}, fail={counts['fail']}, "
        f"{elapsed:.1f}s < 900s" + (f"; first: {failures[0]}" if failures else ""),
    )


def test_criterion_6_quasi_majority():
    t0 = time.time()
    results = {}
    ok = True
    for alg in (s2(), m2(), z2(), c3()):
        kclass = AlgebraClass.hs(alg)
        first = quasi_majority(kclass)
        second = quasi_majority(AlgebraClass.hs(alg))
        ok = ok and first.verdict == "pass" and first.tables == second.tables
        results[alg.name] = first.verdict
    elapsed = time.time() - t0
    ok = ok and elapsed < 120.0
    _announce(6, ok, f"verdicts {results}, deterministic, {elapsed:.1f}s < 120s")


def test_criterion_7_lifting_suite():
    t0 = time.time()
    checked = 0
    failures = []
    for alg in corpus_algebras().values():
        kclass = AlgebraClass.hs(alg, CAMPAIGN_CAPS)
        for theta in all_congruences(alg):
            for case in ("quotient-edge", "quotient-path"):
                rep = verify_lifting(
                    case, algebra=alg, theta=theta, kclass=kclass, caps=CAMPAIGN_CAPS
                )
                checked += 1
                if rep.verdict == "fail":
                    failures.append((alg.name, case, theta.blocks_str(), rep.to_json_dict()))
    pools = _factor_pools()
    rng = random.Random(777)
    for pi, pool in enumerate(pools):
        spec = GeneratorSpec(
            kind="relation", rel_arity=2, generators=(2, 3), filters=("subdirect",)
        )
        for inst in random_instances(spec, 300 + pi, 6, CAMPAIGN_CAPS, pool):
            coords = [rng.randrange(2)]
            for case in ("product-edge", "product-path", "product-maximal"):
                rep = verify_lifting(
                    case, rel=inst.value, coords=coords, kclass=inst.kclass,
                    caps=CAMPAIGN_CAPS,
                )
                checked += 1
                if rep.verdict == "fail":
                    failures.append((case, [list(t) for t in inst.value.tuples], rep.to_json_dict()))
            rep = verify_lifting(
                "as-product", rel=inst.value, kclass=inst.kclass, caps=CAMPAIGN_CAPS
            )
            checked += 1
            if rep.verdict == "fail":
                failures.append(("as-product", [list(t) for t in inst.value.tuples], rep.to_json_dict()))
    elapsed = time.time() - t0
    ok = not failures and checked > 50 and elapsed < 600.0
    _announce(
        7,
        ok,
        f"{checked} lifting instances, {len(failures)} failures, {elapsed:.1f}s"
        + (f"; first: {failures[0]}" if failures else ""),
    )


def test_criterion_8_reproducibility():
    t0 = time.time()
    campaigns = [
        Campaign(
            seed=41,
            spec=GeneratorSpec(sizes=(2,), arities=(3,), filters=ALGEBRA_FILTERS),
            count=8,
            verifiers=("connectivity",),
        ),
        Campaign(
            seed=42,
            spec=GeneratorSpec(
                kind="relation", rel_arity=2, generators=(2, 3),
                filters=("subdirect",), factor_names=("m2",),
            ),
            count=10,
            verifiers=("rect", "linkage-rect", "umax-rect"),
            factor_corpus=("m2",),
        ),
        Campaign(
            seed=43,
            spec=GeneratorSpec(
                kind="relation", rel_arity=3, generators=(2, 3),
                filters=("subdirect",), factor_names=("s2", "c3"),
            ),
            count=8,
            verifiers=("q2d", "q2d-pinned"),
            factor_corpus=("s2", "c3"),
        ),
    ]
    ok = True
    for campaign in campaigns:
        r1 = campaign_json(run_campaign(campaign, CAMPAIGN_CAPS))
        r2 = campaign_json(run_campaign(campaign, CAMPAIGN_CAPS))
        ok = ok and r1.encode() == r2.encode()
    elapsed = time.time() - t0
    _announce(8, ok, f"3 campaigns byte-identical across reruns, {elapsed:.1f}s")
