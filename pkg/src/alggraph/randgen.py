"""Seeded random generation of algebras and relations, and verification
campaigns with byte-reproducible JSON reports.

Idempotence is enforced structurally (diagonal table entries are forced), all
other filters by rejection against a budget. The instance stream is a pure
function of (spec, seed).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product

from .algebra import FiniteAlgebra, OpTable, Subpower, subpower_generate
from .caps import Caps, DEFAULT_CAPS
from .errors import CapExceeded, CloneTruncated, FilterStarvation
from .kclass import AlgebraClass
from .report import FAIL, INAPPLICABLE, PASS


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate: sizes/signature for algebras, plus factors and
    generator counts for relations."""

    kind: str = "algebra"  # algebra | relation
    sizes: tuple = (2, 3)
    arities: tuple = (2,)
    filters: tuple = ()
    # relation parameters: factors drawn from this sub-spec (or corpus names)
    factor_names: tuple = ()
    rel_arity: int = 2
    generators: tuple = (2, 3)

    def to_string(self) -> str:
        parts = [self.kind]
        parts.append("size=" + ",".join(map(str, self.sizes)))
        parts.append("ops=" + ",".join(map(str, self.arities)))
        if self.filters:
            parts.append("filter=" + ",".join(self.filters))
        if self.kind == "relation":
            parts.append("factors=" + ",".join(self.factor_names))
            parts.append(f"arity={self.rel_arity}")
            parts.append("gens=" + ",".join(map(str, self.generators)))
        return ";".join(parts)

    @staticmethod
    def parse(text: str) -> "GeneratorSpec":
        fields = text.split(";")
        kind = fields[0].strip()
        if kind not in ("algebra", "relation"):
            raise ValueError(f"spec must start with 'algebra' or 'relation', got {kind!r}")
        kw = {"kind": kind}
        for item in fields[1:]:
            if not item.strip():
                continue
            key, _, val = item.partition("=")
            key = key.strip()
            vals = [v.strip() for v in val.split(",") if v.strip()]
            if key == "size":
                kw["sizes"] = tuple(int(v) for v in vals)
            elif key == "ops":
                kw["arities"] = tuple(int(v) for v in vals)
            elif key == "filter":
                kw["filters"] = tuple(vals)
            elif key == "factors":
                kw["factor_names"] = tuple(vals)
            elif key == "arity":
                kw["rel_arity"] = int(vals[0])
            elif key == "gens":
                kw["generators"] = tuple(int(v) for v in vals)
            else:
                raise ValueError(f"unknown spec key {key!r}")
        return GeneratorSpec(**kw)


@dataclass
class RandomInstance:
    name: str
    value: object  # FiniteAlgebra or Subpower
    kclass: AlgebraClass | None = None
    attempts: int = 1


def random_algebra(rng: random.Random, size: int, arities, name: str) -> FiniteAlgebra:
    ops = []
    for i, k in enumerate(arities):
        table = []
        for args in product(range(size), repeat=k):
            table.append(args[0] if len(set(args)) == 1 else rng.randrange(size))
        ops.append(OpTable(f"f{i}", k, tuple(table)))
    return FiniteAlgebra(name, size, tuple(ops))


KNOWN_FILTERS = (
    "idempotent",
    "tractable",
    "omits-type-1",
    "smooth",
    "class-smooth",
    "subdirect",
    "linked",
)


def _algebra_passes(algebra, filters, caps):
    """(passes, kclass-or-None). Builds the class lazily, once."""
    from .congruence import is_linked  # noqa: F401  (symmetry with relations)
    from .edges import edge_graph, is_smooth, section_fragment

    kclass = None
    fragment = None
    records = None
    for f in filters:
        if f == "idempotent":
            continue  # structural
        if f == "tractable":
            fragment = section_fragment(algebra, caps)
            if not fragment.complete:
                return False, None
            continue
        if fragment is None:
            fragment = section_fragment(algebra, caps)
        if records is None:
            try:
                records = edge_graph(algebra, caps, fragment=fragment)
            except CloneTruncated:
                return False, None
        if f == "omits-type-1":
            if any(r.resolved_type == "unary" for r in records):
                return False, None
        elif f == "smooth":
            if not is_smooth(algebra, caps, records=records).smooth:
                return False, None
        elif f == "class-smooth":
            kclass = AlgebraClass.hs(algebra, caps)
            if not (kclass.sections().complete and kclass.all_smooth()):
                return False, None
        else:
            raise ValueError(f"unknown algebra filter {f!r}")
    return True, kclass


def random_instances(
    spec: GeneratorSpec,
    seed: int,
    count: int,
    caps: Caps = DEFAULT_CAPS,
    factors: list | None = None,
):
    """Yield `count` filtered instances, deterministically from the seed."""
    rng = random.Random(seed)
    produced = 0
    attempts = 0
    attempts_at_last = 0
    pool_kclass = None
    if spec.kind == "relation" and factors:
        from .thin import _unique_factors

        pool_kclass = AlgebraClass(_unique_factors(factors), caps)
    while produced < count:
        if attempts - attempts_at_last > caps.rejection_budget:
            raise FilterStarvation(produced, attempts, spec.filters)
        attempts += 1
        if spec.kind == "algebra":
            size = spec.sizes[rng.randrange(len(spec.sizes))]
            alg = random_algebra(
                rng, size, spec.arities, f"rnd{seed}n{produced}"
            )
            ok, kclass = _algebra_passes(alg, spec.filters, caps)
            if not ok:
                continue
            yield RandomInstance(alg.name, alg, kclass, attempts - attempts_at_last)
        else:
            if factors is None:
                raise ValueError("relation specs need explicit factor algebras")
            picked = [
                factors[rng.randrange(len(factors))] for _ in range(spec.rel_arity)
            ]
            ngens = spec.generators[rng.randrange(len(spec.generators))]
            gens = [
                tuple(rng.randrange(f.size) for f in picked) for _ in range(ngens)
            ]
            try:
                rel = subpower_generate(picked, gens, caps=caps)
            except CapExceeded:
                continue
            if "subdirect" in spec.filters and not rel.is_subdirect():
                continue
            if "linked" in spec.filters:
                from .congruence import is_linked

                if rel.arity != 2 or not is_linked(rel):
                    continue
            yield RandomInstance(
                f"rel{seed}n{produced}", rel, pool_kclass, attempts - attempts_at_last
            )
        produced += 1
        attempts_at_last = attempts


# -- campaigns -------------------------------------------------------------------


@dataclass(frozen=True)
class Campaign:
    """A reproducible batch: same seed and spec give a bit-identical stream
    and byte-identical report."""

    seed: int
    spec: GeneratorSpec
    count: int
    verifiers: tuple
    factor_corpus: tuple = ()  # corpus names used as relation factors

    def describe(self) -> dict:
        return {
            "seed": self.seed,
            "spec": self.spec.to_string(),
            "count": self.count,
            "verifiers": list(self.verifiers),
            "factor_corpus": list(self.factor_corpus),
        }


def _run_verifier(name: str, inst: RandomInstance, caps: Caps, rng: random.Random):
    from . import products, thin

    value, kclass = inst.value, inst.kclass
    if name == "connectivity":
        return thin.verify_connectivity(value, kclass, caps=caps)
    if name == "rect":
        return products.rect_check(value, kclass, caps=caps)
    if name == "linkage-rect":
        return products.linkage_rect_check(value, kclass, caps=caps)
    if name == "umax-rect":
        return products.umax_rect_check(value, kclass, caps=caps)
    if name == "q2d":
        return products.q2d_check(value, None, kclass, caps=caps)
    if name == "q2d-pinned":
        pin = sorted(rng.sample(range(value.arity), rng.randrange(1, value.arity + 1)))
        rep = products.q2d_check(value, tuple(pin), kclass, caps=caps)
        rep.note(f"pinned={pin}")
        return rep
    if name == "maxgen":
        return products.maxgen_suite(value, kclass, caps=caps)
    if name == "almost-trivial":
        return products.almost_trivial_check(value).report
    if name.startswith("lifting:"):
        case = name.split(":", 1)[1]
        if case.startswith("quotient"):
            raise ValueError("quotient lifting campaigns take explicit algebras")
        coords = None
        if case in ("product-edge", "product-path", "product-maximal"):
            coords = sorted(
                rng.sample(range(value.arity), rng.randrange(1, value.arity))
            ) if value.arity > 1 else [0]
            rep = thin.verify_lifting(case, rel=value, coords=coords, kclass=kclass, caps=caps)
            rep.note(f"coords={coords}")
            return rep
        return thin.verify_lifting(case, rel=value, kclass=kclass, caps=caps)
    raise ValueError(f"unknown verifier {name!r}")


def run_campaign(
    campaign: Campaign, caps: Caps = DEFAULT_CAPS, factors: list | None = None
) -> dict:
    """Run every verifier over the instance stream; returns a JSON-able dict."""
    if factors is None and campaign.factor_corpus:
        from .corpus import corpus_algebras

        table = corpus_algebras()
        factors = [table[name] for name in campaign.factor_corpus]
    rng = random.Random(campaign.seed ^ 0xFEED)
    results = []
    tally = {PASS: 0, FAIL: 0, INAPPLICABLE: 0}
    for inst in random_instances(
        campaign.spec, campaign.seed, campaign.count, caps, factors
    ):
        entry = {"instance": inst.name, "verdicts": {}}
        if isinstance(inst.value, FiniteAlgebra):
            entry["algebra"] = inst.value.to_json_dict()
        else:
            entry["relation"] = {
                "factors": [f.name for f in inst.value.factors],
                "tuples": [list(t) for t in inst.value.tuples],
            }
        for vname in campaign.verifiers:
            rep = _run_verifier(vname, inst, caps, rng)
            entry["verdicts"][vname] = rep.to_json_dict()
            tally[rep.verdict] += 1
        results.append(entry)
    return {
        "campaign": campaign.describe(),
        "instances": results,
        "summary": dict(sorted(tally.items())),
    }


def campaign_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1)
