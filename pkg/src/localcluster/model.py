"""Optimization model shared by the solvers.

The seeded PageRank vector p solves p = alpha*s + (1-alpha)*W*p with the lazy
walk W = (I + A D^-1)/2.  After the substitution q = D^{-1/2} p that linear
system is the stationarity condition of the smooth convex function

    f(q) = 0.5*<q, Q q> - alpha*<s, D^{-1/2} q>,
    Q    = D^{-1/2} (D - (1-alpha)/2 * (D + A)) D^{-1/2},

whose gradient has unit Lipschitz constant and alpha-strong convexity.  The
l1-regularized problem adds rho*alpha*||D^{1/2} q||_1, which prunes the
support; its scaled residual r = D^{1/2} grad f(q) is the quantity the push
solver drives toward zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import Graph

SEED_SUM_TOL = 1e-12


class BudgetExhaustedError(RuntimeError):
    """Iteration cap hit before the termination test; carries partial output."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class SparseVector:
    """Map node id -> float value; iteration follows first-touch order.

    Plain dict under the hood: the solvers mutate .entries directly so that
    memory and per-iteration work stay proportional to the touched set.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: dict[int, float] | None = None):
        self.entries: dict[int, float] = {} if entries is None else dict(entries)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "SparseVector":
        return cls(dict(pairs))

    @classmethod
    def from_dense(cls, values: np.ndarray, tol: float = 0.0) -> "SparseVector":
        return cls({int(i): float(v) for i, v in enumerate(values) if abs(v) > tol})

    def get(self, i: int) -> float:
        return self.entries.get(i, 0.0)

    def set(self, i: int, value: float) -> None:
        self.entries[i] = value

    def add(self, i: int, delta: float) -> None:
        self.entries[i] = self.entries.get(i, 0.0) + delta

    def items(self):
        return self.entries.items()

    def support(self) -> list[int]:
        return [i for i, v in self.entries.items() if v != 0.0]

    def compact(self) -> "SparseVector":
        """Drop explicitly stored zeros (in place)."""
        dead = [i for i, v in self.entries.items() if v == 0.0]
        for i in dead:
            del self.entries[i]
        return self

    def copy(self) -> "SparseVector":
        return SparseVector(self.entries)

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        for i, v in self.entries.items():
            out[i] = v
        return out

    def inf_norm(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"SparseVector({self.entries!r})"


@dataclass(frozen=True, eq=False)
class SeedDistribution:
    """Nonnegative seed mass summing to one, keyed by contiguous node id."""

    entries: dict[int, float]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("seed distribution must have at least one entry")
        for i, v in self.entries.items():
            if v <= 0.0:
                raise ValueError(f"seed weight for node {i} must be positive, got {v}")
        total = sum(self.entries.values())
        if abs(total - 1.0) > SEED_SUM_TOL:
            raise ValueError(f"seed weights must sum to 1 (got {total!r})")

    @classmethod
    def from_pairs(
        cls, g: Graph, pairs: Iterable[tuple[int, float]], normalize: bool = False
    ) -> "SeedDistribution":
        seen: dict[int, float] = {}
        for i, w in pairs:
            i = int(i)
            if i in seen:
                raise ValueError(f"duplicate seed node {i}")
            if not 0 <= i < g.node_count:
                raise ValueError(f"seed node {i} out of range [0, {g.node_count})")
            seen[i] = float(w)
        if normalize:
            total = sum(seen.values())
            if total <= 0.0:
                raise ValueError("seed weights must have positive total")
            seen = {i: w / total for i, w in seen.items()}
        return cls(entries=dict(sorted(seen.items())))

    @classmethod
    def single(cls, g: Graph, node: int) -> "SeedDistribution":
        return cls.from_pairs(g, [(node, 1.0)])

    @property
    def max_value(self) -> float:
        return max(self.entries.values())


def parse_seed_spec(text: str) -> list[tuple[int, float]]:
    """Parse '7' or '7:0.5,9:0.5' into (id, weight) pairs (ids as written)."""
    text = text.strip()
    if not text:
        raise ValueError("empty seed spec")
    pairs: list[tuple[int, float]] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"empty entry in seed spec {text!r}")
        if ":" in chunk:
            id_part, _, w_part = chunk.partition(":")
            try:
                pairs.append((int(id_part), float(w_part)))
            except ValueError:
                raise ValueError(f"malformed seed entry {chunk!r}") from None
        else:
            try:
                pairs.append((int(chunk), 1.0))
            except ValueError:
                raise ValueError(f"malformed seed entry {chunk!r}") from None
    return pairs


@dataclass(frozen=True)
class SolverParams:
    """Shared solver knobs.

    alpha is the teleportation weight, rho the l1 scale (support prices at
    rho * alpha * sqrt(d_i) per unit of q_i), epsilon the slack on the
    termination threshold, max_iters a hard budget on coordinate steps.
    epsilon = 0 is accepted but gives the gradient solver no room above the
    optimum's own stationarity level, so it may only stop via max_iters.
    """

    alpha: float = 0.1
    rho: float = 1e-5
    epsilon: float = 0.1
    max_iters: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.rho <= 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be nonnegative, got {self.max_iters}")

    def warn_if_rho_exceeds_seed(self, seed: SeedDistribution) -> None:
        # With rho above every seed weight the zero vector is already optimal;
        # legitimate, so warn rather than refuse.
        if seed.max_value < self.rho:
            warnings.warn(
                f"rho={self.rho} exceeds the largest seed weight "
                f"{seed.max_value}; the solution is identically zero",
                stacklevel=3,
            )


def objective_f(g: Graph, params: SolverParams, s: SeedDistribution, q: SparseVector) -> float:
    """Smooth objective value; cost proportional to supp(q) and its edges."""
    a = params.alpha
    sd = g.sqrt_degrees_list
    adj = g.adjacency
    ent = q.entries
    sumsq = 0.0
    cross = 0.0  # ordered adjacent pairs inside supp(q)
    for i, qi in ent.items():
        if qi == 0.0:
            continue
        sumsq += qi * qi
        acc = 0.0
        for j in adj[i]:
            qj = ent.get(j)
            if qj is not None and qj != 0.0:
                acc += qj / sd[j]
        cross += qi / sd[i] * acc
    quad = 0.5 * (1.0 + a) * sumsq - 0.5 * (1.0 - a) * cross
    seed_term = 0.0
    for i, si in s.entries.items():
        qi = ent.get(i)
        if qi:
            seed_term += si * qi / sd[i]
    return 0.5 * quad - a * seed_term


def gradient_f(g: Graph, params: SolverParams, s: SeedDistribution, q: SparseVector) -> SparseVector:
    """Gradient of f restricted to supp(q), its neighbors, and supp(s).

    Entries outside that set equal -alpha * s_i / sqrt(d_i) = 0 and are not
    stored.
    """
    a = params.alpha
    sd = g.sqrt_degrees_list
    adj = g.adjacency
    half = 0.5 * (1.0 - a)
    diag = 0.5 * (1.0 + a)
    out: dict[int, float] = {}
    for i, qi in q.entries.items():
        if qi == 0.0:
            continue
        out[i] = out.get(i, 0.0) + diag * qi
        w = half * qi / sd[i]
        for j in adj[i]:
            out[j] = out.get(j, 0.0) - w / sd[j]
    for i, si in s.entries.items():
        out[i] = out.get(i, 0.0) - a * si / sd[i]
    return SparseVector(out).compact()


def objective_psi(g: Graph, params: SolverParams, s: SeedDistribution, q: SparseVector) -> float:
    """Regularized objective rho*alpha*||D^{1/2} q||_1 + f(q)."""
    sd = g.sqrt_degrees_list
    penalty = sum(abs(v) * sd[i] for i, v in q.entries.items())
    return params.rho * params.alpha * penalty + objective_f(g, params, s, q)


def residual_from_gradient(g: Graph, grad: SparseVector) -> SparseVector:
    """r = D^{1/2} grad, the push-solver residual for p = D^{1/2} q."""
    sd = g.sqrt_degrees_list
    return SparseVector({i: v * sd[i] for i, v in grad.entries.items()})


def gradient_from_residual(g: Graph, r: SparseVector) -> SparseVector:
    """Inverse of residual_from_gradient."""
    sd = g.sqrt_degrees_list
    return SparseVector({i: v / sd[i] for i, v in r.entries.items()})


def compute_residual(g: Graph, params: SolverParams, s: SeedDistribution, p: SparseVector) -> SparseVector:
    """r = (I - (1-alpha) W) p - alpha s computed from scratch (sparse).

    Restricted to supp(p), its neighbors, and supp(s); zero elsewhere.
    """
    a = params.alpha
    deg = g.degrees_list
    adj = g.adjacency
    half = 0.5 * (1.0 - a)
    diag = 0.5 * (1.0 + a)
    out: dict[int, float] = {}
    for i, pi in p.entries.items():
        if pi == 0.0:
            continue
        out[i] = out.get(i, 0.0) + diag * pi
        w = half * pi / deg[i]
        for j in adj[i]:
            out[j] = out.get(j, 0.0) - w
    for i, si in s.entries.items():
        out[i] = out.get(i, 0.0) - a * si
    return SparseVector(out).compact()


def p_from_q(g: Graph, q: SparseVector) -> SparseVector:
    """Degree-rescaled iterate p = D^{1/2} q."""
    sd = g.sqrt_degrees_list
    return SparseVector({i: v * sd[i] for i, v in q.entries.items()})


def q_from_p(g: Graph, p: SparseVector) -> SparseVector:
    sd = g.sqrt_degrees_list
    return SparseVector({i: v / sd[i] for i, v in p.entries.items()})
