"""Grammar-compressed two-dimensional strings.

A 2D straight-line program derives one character matrix from binary
horizontal/vertical concatenations; adding one-hole contexts (substitution)
gives grammars whose derivations can be rebalanced to logarithmic depth.
This package builds such grammars (including the classic hard families:
binary-counter matrices, shifted counters, sparse identity-like blocks,
spirals), validates and serializes them, transforms them (rotation, margins,
row linearization, depth rebalancing), and answers random-access queries
three ways: plain traversal, context-aware traversal, and a K-level unwound
grid index with predecessor lookups.
"""

from .access import access_plain, access_tslp
from .balance import (
    BalanceStats,
    balance_1d,
    balance_to_tslp,
    eliminate_contexts_1d,
)
from .fastaccess import (
    BenchReport,
    FastAccessIndex,
    FastParams,
    PathStats,
    PredecessorSet,
    RuleGrid,
    UnwoundRule,
    access_fast,
    bench_access,
    build_fast,
    predecessor,
)
from .gadgets import (
    SpiralParams,
    build_bin,
    build_cnm,
    build_cnm_sequence,
    build_shiftbin,
    build_spiral,
    cnm_block_exponent,
    distinct_blocks,
    random_grammar,
    reference_bin,
    reference_cnm,
    reference_shiftbin,
    spiral_params,
)
from .geometry import DIM_BOUND, GeometryTable, compute_geometry, geometry_pass
from .grammar import (
    CONTEXT_KINDS,
    PLAIN_KINDS,
    Apply,
    AreaLimitExceeded,
    Compose,
    CtxConcat,
    DimensionMismatch,
    Grammar1D,
    Grammar2D,
    GrammarBuilder,
    GridSlpError,
    HConcat,
    HoleConcat,
    InternalHoleHit,
    NotOneDimensional,
    OutOfBounds,
    ParameterError,
    Terminal,
    Tslp2D,
    VConcat,
    ValidationReport,
    Violation,
    as_tslp,
    validate,
)
from .matrix import expand, matrix_from_text, matrix_to_text, max_cells_default
from .textio import FormatError, emit_grammar, parse_grammar
from .transforms import (
    RebalanceStats,
    SubstringDecomposition,
    concat_gadget,
    decompose_substring,
    linearize_rows,
    margin_slp,
    rebalance_plain_2d,
    rotate_cw,
)

__version__ = "0.1.0"

__all__ = [
    "access_plain",
    "access_tslp",
    "BalanceStats",
    "balance_1d",
    "balance_to_tslp",
    "eliminate_contexts_1d",
    "BenchReport",
    "FastAccessIndex",
    "FastParams",
    "PathStats",
    "PredecessorSet",
    "RuleGrid",
    "UnwoundRule",
    "access_fast",
    "bench_access",
    "build_fast",
    "predecessor",
    "SpiralParams",
    "build_bin",
    "build_cnm",
    "build_cnm_sequence",
    "build_shiftbin",
    "build_spiral",
    "cnm_block_exponent",
    "distinct_blocks",
    "random_grammar",
    "reference_bin",
    "reference_cnm",
    "reference_shiftbin",
    "spiral_params",
    "DIM_BOUND",
    "GeometryTable",
    "compute_geometry",
    "geometry_pass",
    "Apply",
    "as_tslp",
    "CONTEXT_KINDS",
    "PLAIN_KINDS",
    "AreaLimitExceeded",
    "Compose",
    "CtxConcat",
    "DimensionMismatch",
    "Grammar1D",
    "Grammar2D",
    "GrammarBuilder",
    "GridSlpError",
    "HConcat",
    "HoleConcat",
    "InternalHoleHit",
    "NotOneDimensional",
    "OutOfBounds",
    "ParameterError",
    "Terminal",
    "Tslp2D",
    "VConcat",
    "ValidationReport",
    "Violation",
    "validate",
    "expand",
    "matrix_from_text",
    "matrix_to_text",
    "max_cells_default",
    "FormatError",
    "emit_grammar",
    "parse_grammar",
    "RebalanceStats",
    "SubstringDecomposition",
    "concat_gadget",
    "decompose_substring",
    "linearize_rows",
    "margin_slp",
    "rebalance_plain_2d",
    "rotate_cw",
    "__version__",
]
