"""Residual-push solver for approximate personalized PageRank.

Maintains the invariant pair (p, r) with r = (I - (1-alpha) W) p - alpha s.
Starting from p = 0, r = -alpha*s, each step picks a node i whose scaled
residual violates r(i) < -alpha*rho*d_i, moves the full violation onto p(i),
damps r(i) by (1-alpha)/2 and spreads the same factor over i's neighbors
divided by d_i.  Residuals stay nonpositive and p nondecreasing, so at
termination ||D^-1 r||_inf <= rho*alpha.

The three variants differ only in which violating node is relaxed next:
a FIFO queue, a max-heap on |r(i)|/d_i (lazy deletion), or a heap whose
priorities are frozen at insertion time (cheaper bookkeeping, approximate
ordering).
"""

from __future__ import annotations

import enum
import heapq
from collections import deque
from dataclasses import dataclass

from .graph import Graph, NodeSet
from .model import (
    BudgetExhaustedError,
    SeedDistribution,
    SolverParams,
    SparseVector,
    compute_residual,
)


class ApprVariant(enum.Enum):
    FIFO = "fifo"
    GREEDY = "greedy"
    HEURISTIC = "heuristic"


@dataclass(frozen=True, eq=False)
class ApprResult:
    p: SparseVector
    residual: SparseVector
    iterations: int  # selection-loop trips, including stale heap pops
    push_count: int  # coordinate relaxations actually performed
    touched_nodes: NodeSet


def appr_solve(
    g: Graph,
    seed: SeedDistribution,
    params: SolverParams,
    variant: ApprVariant = ApprVariant.FIFO,
    *,
    validate: bool = False,
    check_every: int = 100,
) -> ApprResult:
    """Run the push solver until no node violates the residual threshold.

    With validate=True the solver asserts its invariants as it goes: r <= 0
    and p >= 0 everywhere, the greedy variant's selections attain the true
    maximum of |r(i)|/d_i (ties to the lowest id), heuristic-queue entries
    are never re-prioritized, and every check_every pushes the maintained
    residual is compared against a from-scratch recomputation (1e-10).
    """
    params.warn_if_rho_exceeds_seed(seed)
    a = params.alpha
    adj = g.adjacency
    deg = g.degrees_list
    ar = a * params.rho
    half = 0.5 * (1.0 - a)
    max_pushes = params.max_iters

    r: dict[int, float] = {i: -a * si for i, si in seed.entries.items()}
    p: dict[int, float] = {}
    pushes = 0
    iters = 0

    def violating(i: int) -> bool:
        return r[i] < -ar * deg[i]

    def result() -> ApprResult:
        return ApprResult(
            p=SparseVector(p).compact(),
            residual=SparseVector(r).compact(),
            iterations=iters,
            push_count=pushes,
            touched_nodes=NodeSet.from_nodes(g, r.keys()),
        )

    def out_of_budget() -> BudgetExhaustedError:
        return BudgetExhaustedError(
            f"push budget max_iters={max_pushes} exhausted before termination",
            partial=result(),
        )

    def relax(i: int) -> float:
        """One coordinate push at i; returns the pre-push residual."""
        nonlocal pushes
        ri = r[i]
        p[i] = p.get(i, 0.0) - ri
        r[i] = half * ri
        w = half * ri / deg[i]
        for j in adj[i]:
            r[j] = r.get(j, 0.0) + w
        pushes += 1
        return ri

    def check_state() -> None:
        bad_r = [i for i, v in r.items() if v > 0.0]
        if bad_r:
            raise AssertionError(f"positive residual entries at {bad_r[:5]}")
        bad_p = [i for i, v in p.items() if v < 0.0]
        if bad_p:
            raise AssertionError(f"negative p entries at {bad_p[:5]}")
        fresh = compute_residual(g, params, seed, SparseVector(p))
        keys = set(r) | set(fresh.entries)
        drift = max((abs(r.get(k, 0.0) - fresh.get(k)) for k in keys), default=0.0)
        if drift > 1e-10:
            raise AssertionError(f"maintained residual drifted {drift:.3e} from recomputation")

    def greedy_is_max(pri: float, i: int) -> bool:
        best = min(((rv / deg[k], k) for k, rv in r.items() if rv < -ar * deg[k]), default=None)
        return best is not None and best == (pri, i)

    if variant is ApprVariant.FIFO:
        queue = deque(i for i in r if violating(i))
        queued = set(queue)
        while queue:
            iters += 1
            i = queue.popleft()
            queued.remove(i)
            if not violating(i):
                continue
            if pushes >= max_pushes:
                raise out_of_budget()
            relax(i)
            if validate and pushes % check_every == 0:
                check_state()
            for j in adj[i]:
                if j not in queued and violating(j):
                    queue.append(j)
                    queued.add(j)
            if violating(i) and i not in queued:
                queue.append(i)
                queued.add(i)

    elif variant is ApprVariant.GREEDY:
        # Min-heap on r(i)/d_i (negative), i.e. max-heap on |r(i)|/d_i, with
        # lazy deletion: an entry is stale when its stored key no longer
        # matches the live residual.
        heap: list[tuple[float, int]] = []
        for i in r:
            if violating(i):
                heapq.heappush(heap, (r[i] / deg[i], i))
        while heap:
            iters += 1
            pri, i = heapq.heappop(heap)
            if pri != r[i] / deg[i]:
                continue  # stale
            if not violating(i):
                continue
            if pushes >= max_pushes:
                raise out_of_budget()
            if validate and not greedy_is_max(pri, i):
                raise AssertionError(f"greedy pop {i} does not attain max |r|/d")
            relax(i)
            if validate and pushes % check_every == 0:
                check_state()
            if violating(i):
                heapq.heappush(heap, (r[i] / deg[i], i))
            for j in adj[i]:
                if violating(j):
                    heapq.heappush(heap, (r[j] / deg[j], j))

    elif variant is ApprVariant.HEURISTIC:
        # Priorities are fixed when a node is enqueued and never refreshed;
        # newly violating nodes inherit the priority of the node whose push
        # exposed them.  Each node appears in the queue at most once.
        heap = []
        queued: dict[int, float] = {}
        for i in r:
            if violating(i):
                key = r[i] / deg[i]
                heapq.heappush(heap, (key, i))
                queued[i] = key
        while heap:
            iters += 1
            key, i = heapq.heappop(heap)
            if validate and queued.get(i) != key:
                raise AssertionError(f"node {i} re-prioritized while enqueued")
            del queued[i]
            if not violating(i):
                continue
            if pushes >= max_pushes:
                raise out_of_budget()
            relax(i)
            if validate and pushes % check_every == 0:
                check_state()
            for c in adj[i]:
                if c not in queued and violating(c):
                    heapq.heappush(heap, (key, c))
                    queued[c] = key
            if i not in queued and violating(i):
                heapq.heappush(heap, (key, i))
                queued[i] = key

    else:  # pragma: no cover
        raise ValueError(f"unknown variant {variant!r}")

    if validate:
        check_state()
        still = [i for i in r if violating(i)]
        if still:
            raise AssertionError(f"terminated with violating nodes {still[:5]}")
    return result()
