"""Proximal-gradient (ISTA) solver for l1-regularized seeded PageRank.

Equivalent to textbook full-vector ISTA with unit step on

    psi(q) = rho*alpha*||D^{1/2} q||_1 + f(q)

but run entirely on sparse state.  Starting from q = 0 the iterates are
componentwise nondecreasing and the gradient stays nonpositive, so the
soft-threshold step only ever moves the active set

    S_k = { i : q_k(i) - grad_i f(q_k) >= rho*alpha*sqrt(d_i) },

which grows monotonically and stays inside the support of the optimum.  One
iteration applies the thresholded step to every active coordinate and then
repairs the gradient incrementally:

    active i:         grad_i <- -rho*alpha*sqrt(d_i) - (1-alpha)/2 * dq_i
                                - (1-alpha)/(2 sqrt(d_i)) * sum_{l~i, l active} dq_l / sqrt(d_l)
    neighbor j of S:  grad_j <- grad_j
                                - (1-alpha)/(2 sqrt(d_j)) * sum_{l~j, l active} dq_l / sqrt(d_l)

with dq_i = -(grad_i + rho*alpha*sqrt(d_i)) >= 0.  All state is proportional
to the touched set, never to n.  Iteration stops once
||D^{-1/2} grad f||_inf <= (1 + epsilon) * rho * alpha, which converts to the
push solver's residual guarantee for p = D^{1/2} q.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import IO

from .graph import Graph, NodeSet
from .model import (
    BudgetExhaustedError,
    SeedDistribution,
    SolverParams,
    SparseVector,
    gradient_f,
    objective_psi,
)

logger = logging.getLogger(__name__)

TRACE_FIELDS = ("iteration", "active_size", "objective", "scaled_grad_inf_norm")


@dataclass(eq=False)
class IstaState:
    """Mutable solver state; step() advances it in place.

    active holds S_k in insertion order (it only ever grows); active_set
    mirrors it for membership tests.  grad stores entries for exactly the
    touched nodes: supp(s), S_k, and scatter-reached neighbors of S_k.
    """

    graph: Graph
    seed: SeedDistribution
    params: SolverParams
    q: SparseVector
    grad: SparseVector
    active: list[int]
    active_set: set[int]
    k: int = 0

    @property
    def touched_ids(self):
        return self.grad.entries.keys()


@dataclass(frozen=True, eq=False)
class IstaResult:
    p: SparseVector
    q: SparseVector
    iterations: int
    touched_nodes: NodeSet
    support: NodeSet
    grad_inf_norm_scaled: float


def init_state(g: Graph, seed: SeedDistribution, params: SolverParams) -> IstaState:
    """State at k = 0: q = 0, grad = -alpha * D^{-1/2} s, S_0 = {i : s_i >= rho d_i}."""
    a = params.alpha
    sd = g.sqrt_degrees_list
    ra = params.rho * a
    grad = {i: -a * si / sd[i] for i, si in seed.entries.items()}
    active = [i for i, gv in grad.items() if -gv >= ra * sd[i]]
    return IstaState(
        graph=g,
        seed=seed,
        params=params,
        q=SparseVector(),
        grad=SparseVector(grad),
        active=active,
        active_set=set(active),
    )


def scaled_gradient_inf_norm(state: IstaState) -> float:
    """||D^{-1/2} grad||_inf over the touched set (exact: zero elsewhere)."""
    sd = state.graph.sqrt_degrees_list
    best = 0.0
    for i, v in state.grad.entries.items():
        x = abs(v) / sd[i]
        if x > best:
            best = x
    return best


def _above_threshold(state: IstaState, threshold: float) -> bool:
    """Whether some touched node has |grad_i| > threshold * sqrt(d_i).

    Multiplied-out form of scaled_gradient_inf_norm(state) > threshold.  The
    distinction matters at epsilon = 0: active coordinates converge bitwise to
    grad_i = -rho*alpha*sqrt(d_i), which this form recognizes as converged
    while the divided norm can round one ulp above the threshold and spin.
    """
    sd = state.graph.sqrt_degrees_list
    for i, v in state.grad.entries.items():
        if abs(v) > threshold * sd[i]:
            return True
    return False


def terminated(state: IstaState) -> bool:
    threshold = (1.0 + state.params.epsilon) * state.params.rho * state.params.alpha
    return not _above_threshold(state, threshold)


def step(state: IstaState) -> IstaState:
    """One proximal-gradient sweep over the active set; admits new members."""
    g = state.graph
    adj = g.adjacency
    sd = g.sqrt_degrees_list
    ra = state.params.rho * state.params.alpha
    half = 0.5 * (1.0 - state.params.alpha)
    qv = state.q.entries
    gv = state.grad.entries
    active = state.active
    active_set = state.active_set

    deltas = [-(gv[i] + ra * sd[i]) for i in active]

    for i, dq in zip(active, deltas):
        if dq != 0.0:
            qv[i] = qv.get(i, 0.0) + dq
        # the step lands exactly on the threshold before neighbor corrections
        gv[i] = -ra * sd[i] - half * dq

    frontier: list[int] = []
    for i, dq in zip(active, deltas):
        if dq == 0.0:
            continue
        c = half * dq / sd[i]
        for j in adj[i]:
            prev = gv.get(j)
            if prev is None:
                # first touch: analytic initial gradient is 0 off supp(s)
                gv[j] = -c / sd[j]
            else:
                gv[j] = prev - c / sd[j]
            if j not in active_set:
                frontier.append(j)

    # admission test only after all corrections have landed
    seen: set[int] = set()
    for j in frontier:
        if j in seen:
            continue
        seen.add(j)
        if qv.get(j, 0.0) - gv[j] >= ra * sd[j]:
            active.append(j)
            active_set.add(j)

    state.k += 1
    return state


def _result(state: IstaState) -> IstaResult:
    sd = state.graph.sqrt_degrees_list
    q = state.q.copy().compact()
    p = SparseVector({i: v * sd[i] for i, v in q.entries.items()})
    return IstaResult(
        p=p,
        q=q,
        iterations=state.k,
        touched_nodes=NodeSet.from_nodes(state.graph, state.grad.entries.keys()),
        support=NodeSet.from_nodes(state.graph, q.entries.keys()),
        grad_inf_norm_scaled=scaled_gradient_inf_norm(state),
    )


def _weighted_grad_l1(state: IstaState) -> float:
    sd = state.graph.sqrt_degrees_list
    return sum(abs(v) * sd[i] for i, v in state.grad.entries.items())


def _gradient_drift(state: IstaState) -> tuple[float, SparseVector]:
    """Max abs gap between the maintained gradient and a full recomputation."""
    fresh = gradient_f(state.graph, state.params, state.seed, state.q)
    gv = state.grad.entries
    keys = set(gv) | set(fresh.entries)
    drift = max((abs(gv.get(i, 0.0) - fresh.get(i)) for i in keys), default=0.0)
    return drift, fresh

def _refresh_gradient(state: IstaState) -> float:
    """Replace the maintained gradient with a recomputed one; returns drift.

    Active coordinates are clamped to stay at or below their threshold:
    the inequality holds exactly in exact arithmetic, and re-rounding must
    not push a member across it (that would stall or reverse the iteration).
    """
    drift, fresh = _gradient_drift(state)
    sd = state.graph.sqrt_degrees_list
    ra = state.params.rho * state.params.alpha
    gv = state.grad.entries
    for i in gv:
        gv[i] = fresh.get(i)
    for i in state.active:
        cap = -ra * sd[i]
        if gv[i] > cap:
            gv[i] = cap
    return drift


def _check_invariants(state: IstaState, prev_l1: float) -> float:
    """Per-iteration safety net used by validate mode; returns the new l1."""
    sd = state.graph.sqrt_degrees_list
    ra = state.params.rho * state.params.alpha
    gv = state.grad.entries
    qv = state.q.entries
    for i, v in qv.items():
        if v < 0.0:
            raise AssertionError(f"negative iterate q[{i}] = {v}")
    for i, v in gv.items():
        if v > 0.0:
            raise AssertionError(f"positive gradient entry grad[{i}] = {v}")
        if qv.get(i, 0.0) - v <= -ra * sd[i]:
            raise AssertionError(f"negative-threshold set is nonempty at node {i}")
    for i in state.active:
        if gv[i] > -ra * sd[i]:
            raise AssertionError(f"active node {i} above threshold: grad = {gv[i]}")
    l1 = _weighted_grad_l1(state)
    if l1 > prev_l1 * (1.0 + 1e-12) + 1e-15:
        raise AssertionError(f"weighted gradient l1 norm rose from {prev_l1!r} to {l1!r}")
    return l1


def ista_solve(
    g: Graph,
    seed: SeedDistribution,
    params: SolverParams,
    *,
    validate: bool = False,
    check_every: int = 100,
    recompute_every: int = 1000,
    trace: IO[str] | None = None,
) -> IstaResult:
    """Run proximal gradient descent to the (1 + epsilon) residual threshold.

    validate=True turns on per-iteration invariant checks (monotone iterates,
    nonpositive gradients, active-set threshold, nonincreasing weighted
    gradient l1 norm) plus an incremental-vs-recomputed gradient comparison
    every check_every iterations at 1e-10 relative tolerance.

    recompute_every > 0 periodically replaces the incrementally maintained
    gradient with a full recomputation to bound floating-point drift (the
    measured drift is logged).  trace, if given, receives one CSV row per
    iteration: iteration, active-set size, objective psi, scaled gradient
    infinity norm.

    epsilon = 0 demands the exact stationarity level of the optimum itself;
    unless termination already holds at q = 0, rounding can leave the iterate
    a few ulps past the threshold indefinitely, in which case the max_iters
    budget raises BudgetExhaustedError with the (long since converged)
    partial result.  Keep epsilon > 0 when a certified exit is required.
    """
    params.warn_if_rho_exceeds_seed(seed)
    state = init_state(g, seed, params)
    threshold = (1.0 + params.epsilon) * params.rho * params.alpha

    writer = None
    if trace is not None:
        writer = csv.writer(trace)
        writer.writerow(TRACE_FIELDS)

    prev_l1 = _weighted_grad_l1(state) if validate else 0.0
    while True:
        if not _above_threshold(state, threshold):
            break
        if state.k >= params.max_iters:
            raise BudgetExhaustedError(
                f"iteration budget max_iters={params.max_iters} exhausted "
                f"(scaled gradient norm {scaled_gradient_inf_norm(state):.3e} "
                f"> {threshold:.3e})",
                partial=_result(state),
            )
        if writer is not None:
            writer.writerow(
                (
                    state.k,
                    len(state.active),
                    repr(objective_psi(g, params, seed, state.q)),
                    repr(scaled_gradient_inf_norm(state)),
                )
            )
        if validate:
            # pre-step: every active coordinate must sit at or below its
            # threshold, which is exactly dq >= 0 (monotone iterates)
            sd = g.sqrt_degrees_list
            ra = params.rho * params.alpha
            for i in state.active:
                if state.grad.entries[i] > -ra * sd[i]:
                    raise AssertionError(f"active node {i} above threshold before step")
        step(state)
        if validate:
            prev_l1 = _check_invariants(state, prev_l1)
            if check_every > 0 and state.k % check_every == 0:
                drift, fresh = _gradient_drift(state)
                scale = max(1.0, max((abs(v) for v in fresh.entries.values()), default=0.0))
                if drift / scale > 1e-10:
                    raise AssertionError(
                        f"incremental gradient drift {drift:.3e} (relative {drift / scale:.3e})"
                    )
        if recompute_every > 0 and state.k % recompute_every == 0:
            drift = _refresh_gradient(state)
            logger.debug("refreshed gradient at iteration %d, drift %.3e", state.k, drift)

    return _result(state)
