"""Sweep-cut rounding: order nodes by p(i)/d_i and take the best prefix.

Cut size and volume are maintained incrementally (both integers), so each
prefix conductance is the exact same float a from-scratch evaluation yields.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

from .graph import Graph, NodeSet
from .model import SparseVector


@dataclass(frozen=True, eq=False)
class SweepProfile:
    """Conductance along the sweep order.

    order lists supp(p) sorted by p(i)/d_i descending (ties to the lower
    id).  prefix_conductance[j] and prefix_volumes[j] describe the first
    j+1 nodes; the full vertex set, if reached, is skipped.  best_set is
    the minimizing prefix (first index on ties).
    """

    order: list[int]
    prefix_conductance: list[float]
    prefix_volumes: list[int]
    best_index: int
    best_set: NodeSet
    best_conductance: float


def sweep_cut(g: Graph, p: SparseVector) -> SweepProfile:
    """Minimum-conductance prefix of the p(i)/d_i ordering of supp(p)."""
    deg = g.degrees_list
    adj = g.adjacency
    support: list[int] = []
    for i, v in p.entries.items():
        if v == 0.0:
            continue
        if v < 0.0:
            raise ValueError(f"sweep requires p >= 0, got p[{i}] = {v}")
        if not 0 <= i < g.node_count:
            raise ValueError(f"node id {i} out of range [0, {g.node_count})")
        support.append(i)
    if not support:
        raise ValueError("sweep requires a nonzero vector")

    pv = p.entries
    order = sorted(support, key=lambda i: (-(pv[i] / deg[i]), i))

    total = g.total_volume
    inside: set[int] = set()
    cut = 0
    vol = 0
    conds: list[float] = []
    vols: list[int] = []
    for u in order:
        internal = 0
        for x in adj[u]:
            if x in inside:
                internal += 1
        cut += deg[u] - 2 * internal
        vol += deg[u]
        inside.add(u)
        if vol < total:  # proper subsets only; skips the full set when supp(p) = V
            conds.append(cut / min(vol, total - vol))
            vols.append(vol)

    best_index = min(range(len(conds)), key=lambda j: (conds[j], j))
    return SweepProfile(
        order=order,
        prefix_conductance=conds,
        prefix_volumes=vols,
        best_index=best_index,
        best_set=NodeSet.from_nodes(g, order[: best_index + 1]),
        best_conductance=conds[best_index],
    )


def profile_rows(g: Graph, p: SparseVector, profile: SweepProfile) -> list[dict]:
    """Per-prefix records in sweep order, node ids translated back to input labels."""
    deg = g.degrees_list
    rows = []
    for j, cond in enumerate(profile.prefix_conductance):
        u = profile.order[j]
        rows.append(
            {
                "rank": j + 1,
                "node_id_original": g.original_id(u),
                "p_over_d": p.entries[u] / deg[u],
                "prefix_volume": profile.prefix_volumes[j],
                "prefix_conductance": cond,
            }
        )
    return rows


def write_profile_csv(g: Graph, p: SparseVector, profile: SweepProfile, out: IO[str]) -> None:
    writer = csv.writer(out)
    writer.writerow(["rank", "node_id_original", "p_over_d", "prefix_volume", "prefix_conductance"])
    for row in profile_rows(g, p, profile):
        writer.writerow(
            [
                row["rank"],
                row["node_id_original"],
                repr(row["p_over_d"]),
                row["prefix_volume"],
                repr(row["prefix_conductance"]),
            ]
        )
