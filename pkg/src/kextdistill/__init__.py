"""EPR-pair fidelity under k-extendible maps.

A bipartite state can be distilled toward the two-qubit Bell state by a
k-extendible map exactly when a symmetrized probe operator acquires a
negative eigenvalue; this package assembles those probes (dense or
matrix-free), bisects the fidelity threshold, evaluates maps through their
Choi states, builds the measure-and-prepare strategies that reach unit
fidelity on rank-deficient states, and carries the closed-form Werner-state
results plus a symmetric-group block fast path for multi-copy curves.
"""

from .blocks import s3_block_lambda_min
from .linalg import (
    HermitianOperator,
    LinearMapHandle,
    SolverConvergenceError,
    SystemLayout,
    eig_min_dense,
    eig_min_iterative,
    embed,
    kron,
    layout,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    swap_op,
)
from .solver import (
    CJOperator,
    KExtProblem,
    SingularOutputError,
    ThresholdResult,
    build_probe,
    cj_of_mnp,
    construct_f1_strategy,
    evaluate_map_fidelity,
    fidelity_threshold,
    lambda_min_alpha,
    symmetrize,
)
from .states import (
    DensityOperator,
    WernerParams,
    bell_state,
    from_matrix,
    gamma_from_p,
    load_state,
    maximally_mixed,
    p_from_gamma,
    probe_operator,
    projectors,
    save_state,
    werner,
)
from .analytic import (
    IrrepCoefficients,
    MnPTradeoff,
    alpha_max_k1,
    alpha_max_k1_d4_p,
    maxmixed_bound,
    mnp_alpha_max,
    mnp_f,
    mnp_threshold_numeric,
    r_operators,
    reduced_eigenvalues,
    reduced_matrix,
    st_coefficients,
)

__version__ = "0.1.0"
