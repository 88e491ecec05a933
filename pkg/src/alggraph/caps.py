"""Resource caps with ALGGRAPH_CAPS environment overrides.

All caps are soft: hitting one never aborts an analysis silently, it flips a
`complete` flag or raises a typed error that callers turn into an explicit
"truncated"/"inapplicable" verdict.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Caps:
    # maximum number of distinct term tables / profiles per clone fragment
    clone_limit: int = 100_000
    # budget on basic-op applications during a clone closure (cost guard;
    # ternary ops cost |fragment|^3 applications in the worst case)
    clone_cost_limit: int = 50_000_000
    # maximum number of tuples in a generated subpower
    tuple_limit: int = 1_000_000
    # op-application budget for subpower closures (these must complete, so
    # exceeding it raises CapExceeded instead of truncating)
    subpower_cost_limit: int = 500_000_000
    # maximum size of a congruence lattice
    lattice_limit: int = 20_000
    # maximum number of HS-class members
    hs_limit: int = 2_000
    # maximum relation arity for product verifiers
    coord_limit: int = 6
    # rejection budget per accepted instance in random generation
    rejection_budget: int = 5_000

    def override(self, **kw) -> "Caps":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_ENV_KEYS = {
    "clone": "clone_limit",
    "clone-cost": "clone_cost_limit",
    "tuples": "tuple_limit",
    "lattice": "lattice_limit",
    "hs": "hs_limit",
    "coords": "coord_limit",
    "rejections": "rejection_budget",
}


def caps_from_env(base: Caps | None = None) -> Caps:
    """Apply ALGGRAPH_CAPS, a comma list like 'clone=50000,tuples=200000'."""
    caps = base or Caps()
    raw = os.environ.get("ALGGRAPH_CAPS", "").strip()
    if not raw:
        return caps
    kw = {}
    for item in raw.split(","):
        if not item.strip():
            continue
        key, _, value = item.partition("=")
        field = _ENV_KEYS.get(key.strip())
        if field is None:
            raise ValueError(f"unknown ALGGRAPH_CAPS key: {key.strip()!r}")
        kw[field] = int(value)
    return caps.override(**kw)


DEFAULT_CAPS = Caps()
