"""Certified machinery for infinite multiple zeta-star values.

The package evaluates finite and tail-periodic zeta-star values with
midpoint-radius enclosures, inverts the value map by greedy digit
extraction, runs the Hall/Cantor subdivision constructions behind the
sumset and product-set theorems, mirrors everything in exact rational
arithmetic under the binary digit map, and certifies the first-stage gap
and inequality computations.
"""

from .balls import Enclosure, pi_ball, zeta_ball
from .decompose import (
    DecompositionCertificate,
    decompose_difference,
    decompose_product,
    decompose_quotient,
    decompose_sum,
    revalidate,
)
from .errors import (
    BelowRange,
    CorruptCache,
    DivergentValue,
    DomainError,
    InvalidIndex,
    InvalidNode,
    NonTerminating,
    NotInDomain,
    OutOfDomain,
    OutOfRange,
    PrecisionInsufficient,
    UnboundedFamily,
    ZetaStarError,
)
from .evaluate import (
    DEFAULT_PRECISION,
    DEFAULT_TRUNCATION,
    eval_finite,
    eval_tailed,
    eval_with_const_tail,
    ones_tail_value,
    product_endpoint,
    reduce_ones_tail,
    sum_endpoint,
    tail_factor,
    tail_factor_limit,
)
from .expansion import ExpansionResult, expand, subtree_bounds
from .explorer import (
    DimensionRecord,
    alpha_root,
    box_count,
    box_count_sequence,
    covering_length,
    dimension_formula,
    dimension_record,
    search_algebraic,
)
from .indices import (
    Composition,
    ConstTail,
    NO_TAIL,
    NoTail,
    TailedIndex,
    canonical_form,
    index_compare,
    make_composition,
)
from .subdivision import (
    ETA_DQ,
    ETA_TP_CLOSURE,
    Family,
    SubdivisionNode,
    TAU_BK,
    TAU_LP_CLOSURE,
    check_hall_condition,
    node_endpoints,
    root_node,
    subdivide,
    thickness,
    thickness_exact,
)
from .tau import (
    DigitSeq,
    ONES_TAIL,
    Periodic,
    digitseq_compare,
    tau_decompose_sum,
    tau_expand,
    tau_node_lengths,
    tau_value,
)
from .theorems import GapReport, InequalityReport, theorem12_gaps, verify_inequalities

__version__ = "0.1.0"
