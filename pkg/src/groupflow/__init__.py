"""Proximal operators and solvers for overlapping group-linf penalties.

The penalty is a weighted sum of per-group infinity norms over possibly
overlapping index groups. Its prox and dual norm reduce to parametric
max-flow problems on a small bipartite network; the solvers here wrap
those primitives in an accelerated proximal-gradient method with a
duality-gap stopping certificate.
"""

__version__ = "0.1.0"

from .dualnorm import DualNormResult, dual_norm, omega
from .errors import (
    DimensionMismatch,
    DuplicateIndex,
    EmptyGroup,
    GroupFlowError,
    IndexOutOfRange,
    InvalidKind,
    InvalidLength,
    InvalidWarmStart,
    NonpositiveWeight,
    NotMaximal,
    ToleranceNotReached,
    ValidationError,
)
from .graph import FlowNetwork, build_canonical, connected_components, simplify_nested
from .groups import (
    Group,
    GroupStructure,
    grid_squares,
    make_structure,
    read_groups,
    singletons,
    sliding_windows,
    validate,
    write_groups,
)
from .maxflow import FlowState, MinCut, max_flow, min_cut
from .prox import (
    EPS_OPT,
    ProxOptions,
    ProxResult,
    ProxWorkspace,
    check_optimality,
    project_l1_box,
    prox,
)
from .solver import (
    Problem,
    SolverConfig,
    SolveTrace,
    duality_gap,
    fista,
    primal_value,
    relative_gap,
    subgradient_baseline,
    tune_subgradient,
)
from .synth import generate_synthetic

__all__ = [
    "__version__",
    "DualNormResult", "dual_norm", "omega",
    "GroupFlowError", "ValidationError", "EmptyGroup", "NonpositiveWeight",
    "IndexOutOfRange", "DuplicateIndex", "InvalidLength", "DimensionMismatch",
    "InvalidKind", "InvalidWarmStart", "NotMaximal", "ToleranceNotReached",
    "FlowNetwork", "build_canonical", "simplify_nested", "connected_components",
    "Group", "GroupStructure", "make_structure", "validate", "singletons",
    "sliding_windows", "grid_squares", "read_groups", "write_groups",
    "FlowState", "MinCut", "max_flow", "min_cut",
    "EPS_OPT", "ProxOptions", "ProxResult", "ProxWorkspace",
    "check_optimality", "project_l1_box", "prox",
    "Problem", "SolverConfig", "SolveTrace", "duality_gap", "fista",
    "primal_value", "relative_gap", "subgradient_baseline", "tune_subgradient",
    "generate_synthetic",
]
