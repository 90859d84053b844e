"""Local graph clustering via l1-regularized PageRank.

Two solvers share one optimization model: a residual-push method
(appr_solve) and a sparsity-preserving proximal-gradient method
(ista_solve).  Both touch only nodes near the seed set; sweep_cut rounds
either output to a low-conductance cluster.  The oracle module holds dense
brute-force references for testing and verification.
"""

from .appr import ApprResult, ApprVariant, appr_solve
from .graph import (
    EdgeListParseError,
    EmptyGraphError,
    Graph,
    InvalidCutError,
    NodeSet,
    conductance,
    graph_from_edges,
    load_graph,
    volume,
    write_canonical,
)
from .ista import IstaResult, IstaState, init_state, ista_solve, step
from .model import (
    BudgetExhaustedError,
    SeedDistribution,
    SolverParams,
    SparseVector,
    compute_residual,
    gradient_f,
    gradient_from_residual,
    objective_f,
    objective_psi,
    p_from_q,
    parse_seed_spec,
    q_from_p,
    residual_from_gradient,
)
from .oracle import OptimalityReport, OracleCapError, check_optimality, dense_l1_ppr, exact_ppr
from .sweep import SweepProfile, sweep_cut, write_profile_csv

__version__ = "0.1.0"

__all__ = [
    "ApprResult",
    "ApprVariant",
    "BudgetExhaustedError",
    "EdgeListParseError",
    "EmptyGraphError",
    "Graph",
    "InvalidCutError",
    "IstaResult",
    "IstaState",
    "NodeSet",
    "OptimalityReport",
    "OracleCapError",
    "SeedDistribution",
    "SolverParams",
    "SparseVector",
    "SweepProfile",
    "appr_solve",
    "check_optimality",
    "compute_residual",
    "conductance",
    "dense_l1_ppr",
    "exact_ppr",
    "gradient_f",
    "gradient_from_residual",
    "graph_from_edges",
    "init_state",
    "ista_solve",
    "load_graph",
    "objective_f",
    "objective_psi",
    "p_from_q",
    "parse_seed_spec",
    "q_from_p",
    "residual_from_gradient",
    "step",
    "sweep_cut",
    "volume",
    "write_canonical",
]
