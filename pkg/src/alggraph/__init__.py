"""Edge-colored graph structure of finite idempotent algebras.

Classify element pairs into semilattice/majority/affine/unary thick edges,
compute thin edges and the three connectivity digraphs with their maximal
(as-maximal, u-maximal) components, and verify structural facts about
subdirect products (rectangularity, quasi-2-decomposability, quasi-majority
operations, almost-triviality) by exhaustive search on concrete instances.
"""

from .algebra import (
    FiniteAlgebra,
    OpTable,
    Subpower,
    Subuniverse,
    TermOpSet,
    hs_class,
    quotient,
    sg_closure,
    subpower_generate,
    term_ops,
    validate_algebra,
)
from .caps import Caps, DEFAULT_CAPS, caps_from_env
from .congruence import (
    Partition,
    Tolerance,
    all_congruences,
    cg,
    is_linked,
    is_simple,
    link_congruence,
    link_tolerance,
    maximal_congruences,
)
from .edges import (
    EdgeRecord,
    classify_pair,
    edge_graph,
    find_uniform_ops,
    is_smooth,
    omits_type1,
)
from .kclass import AlgebraClass
from .products import (
    almost_trivial_check,
    linkage_rect_check,
    maxgen_suite,
    q2d_check,
    quasi_majority,
    rect_check,
    umax_rect_check,
)
from .report import Report
from .thin import (
    GraphAnalysis,
    ThinEdge,
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

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
