"""Dense brute-force references for small instances.

Everything here builds explicit n-by-n matrices and is deliberately
independent of the sparse solvers: exact_ppr solves the PageRank linear
system directly, dense_l1_ppr runs full-vector proximal gradient descent
with none of the locality bookkeeping, and check_optimality evaluates the
subgradient optimality conditions coordinate by coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graph import Graph
from .model import SeedDistribution, SolverParams, SparseVector

DEFAULT_NODE_CAP = 2048


class OracleCapError(ValueError):
    """Instance too large for a dense reference computation."""


def _require_small(g: Graph, node_cap: int) -> None:
    if g.node_count > node_cap:
        raise OracleCapError(
            f"dense oracle limited to {node_cap} nodes, graph has {g.node_count}"
        )


def adjacency_matrix(g: Graph) -> np.ndarray:
    A = np.zeros((g.node_count, g.node_count))
    for u in range(g.node_count):
        A[u, g.neighbors_of(u)] = 1.0
    return A


def lazy_walk_matrix(g: Graph) -> np.ndarray:
    """W = (I + A D^-1) / 2."""
    A = adjacency_matrix(g)
    return 0.5 * (np.eye(g.node_count) + A / g.degrees)


def quadratic_matrix(g: Graph, alpha: float) -> np.ndarray:
    """Q = D^{-1/2} (D - (1-alpha)/2 (D + A)) D^{-1/2}."""
    n = g.node_count
    A = adjacency_matrix(g)
    inv_sd = 1.0 / g.sqrt_degrees
    norm_adj = inv_sd[:, None] * A * inv_sd[None, :]
    return (0.5 * (1.0 + alpha)) * np.eye(n) - (0.5 * (1.0 - alpha)) * norm_adj


def seed_dense(g: Graph, s: SeedDistribution) -> np.ndarray:
    out = np.zeros(g.node_count)
    for i, v in s.entries.items():
        out[i] = v
    return out


def exact_ppr(
    g: Graph, s: SeedDistribution, alpha: float, node_cap: int = DEFAULT_NODE_CAP
) -> np.ndarray:
    """Solve (I - (1-alpha) W) p = alpha s densely."""
    _require_small(g, node_cap)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    M = np.eye(g.node_count) - (1.0 - alpha) * lazy_walk_matrix(g)
    b = alpha * seed_dense(g, s)
    p = np.linalg.solve(M, b)
    resid = float(np.abs(M @ p - b).max())
    if resid > 1e-12:
        raise ArithmeticError(f"dense linear solve residual {resid:.3e} exceeds 1e-12")
    return p


def dense_gradient(g: Graph, s: SeedDistribution, alpha: float, q: np.ndarray) -> np.ndarray:
    """grad f(q) = Q q - alpha D^{-1/2} s, dense."""
    Q = quadratic_matrix(g, alpha)
    return Q @ q - alpha * (seed_dense(g, s) / g.sqrt_degrees)


def dense_objective(g: Graph, s: SeedDistribution, alpha: float, q: np.ndarray) -> float:
    Q = quadratic_matrix(g, alpha)
    b = alpha * (seed_dense(g, s) / g.sqrt_degrees)
    return float(0.5 * q @ (Q @ q) - b @ q)


def dense_ista_iterates(
    g: Graph,
    s: SeedDistribution,
    params: SolverParams,
    node_cap: int = DEFAULT_NODE_CAP,
    q0: np.ndarray | None = None,
) -> Iterator[np.ndarray]:
    """Textbook proximal-gradient iterates from q0 (default 0), step size 1.

    Each step soft-thresholds z = q - grad f(q) at rho*alpha*sqrt(d_i) per
    coordinate and yields a copy of the new iterate.  Runs forever; callers
    slice or stop on their own criterion.
    """
    _require_small(g, node_cap)
    n = g.node_count
    Q = quadratic_matrix(g, params.alpha)
    b = params.alpha * (seed_dense(g, s) / g.sqrt_degrees)
    tau = params.rho * params.alpha * g.sqrt_degrees
    q = np.zeros(n) if q0 is None else np.asarray(q0, dtype=float).copy()
    while True:
        z = q - (Q @ q - b)
        q = np.sign(z) * np.maximum(np.abs(z) - tau, 0.0)
        yield q.copy()


def dense_l1_ppr(
    g: Graph,
    s: SeedDistribution,
    params: SolverParams,
    node_cap: int = DEFAULT_NODE_CAP,
    tol: float = 1e-14,
    max_iters: int = 10**6,
    q0: np.ndarray | None = None,
) -> np.ndarray:
    """High-accuracy minimizer of the l1-regularized objective, dense.

    Iterates full-vector proximal gradient until the successive change drops
    to tol in the max norm, then verifies the optimality conditions to 1e-10.
    """
    _require_small(g, node_cap)
    prev = np.zeros(g.node_count) if q0 is None else np.asarray(q0, dtype=float)
    steps = dense_ista_iterates(g, s, params, node_cap=node_cap, q0=q0)
    for _ in range(max_iters):
        q = next(steps)
        if float(np.abs(q - prev).max()) <= tol:
            report = check_optimality(g, s, params, SparseVector.from_dense(q), node_cap=node_cap)
            if report.max_violation > 1e-10:
                raise ArithmeticError(
                    f"dense solver stagnated with optimality violation {report.max_violation:.3e}"
                )
            return q
        prev = q
    raise ArithmeticError(f"dense solver failed to stagnate within {max_iters} iterations")


@dataclass(frozen=True)
class OptimalityReport:
    """Worst-case deviations from the subgradient optimality conditions."""

    max_violation: float
    positive_branch_max: float
    zero_branch_max: float
    worst_node: int | None


def check_optimality(
    g: Graph,
    s: SeedDistribution,
    params: SolverParams,
    q: SparseVector,
    node_cap: int = DEFAULT_NODE_CAP,
) -> OptimalityReport:
    """Measure violation of the optimality conditions at q >= 0.

    Where q_i > 0 the gradient must equal -rho*alpha*sqrt(d_i) exactly;
    where q_i = 0 it must lie in [-rho*alpha*sqrt(d_i), 0].
    """
    _require_small(g, node_cap)
    for i, v in q.entries.items():
        if v < 0.0:
            raise ValueError(f"optimality check requires q >= 0, got q[{i}] = {v}")
    qd = q.to_dense(g.node_count)
    grad = dense_gradient(g, s, params.alpha, qd)
    thresh = params.rho * params.alpha * g.sqrt_degrees
    pos_max = 0.0
    zero_max = 0.0
    worst: int | None = None
    worst_val = -1.0
    for i in range(g.node_count):
        if qd[i] > 0.0:
            viol = abs(grad[i] + thresh[i])
            if viol > pos_max:
                pos_max = viol
        else:
            viol = max(grad[i], -thresh[i] - grad[i], 0.0)
            if viol > zero_max:
                zero_max = viol
        if viol > worst_val:
            worst_val = viol
            worst = i
    return OptimalityReport(
        max_violation=float(max(pos_max, zero_max)),
        positive_branch_max=float(pos_max),
        zero_branch_max=float(zero_max),
        worst_node=worst,
    )
