"""Undirected graph storage in compressed sparse row form, plus cut quantities.

Input graphs are simple: self-loops and duplicate edges are dropped at load
time, isolated nodes are removed, and surviving nodes are relabeled to the
contiguous range 0..n-1 (the original labels are kept in a side table).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np


class EdgeListParseError(ValueError):
    """Malformed edge-list text; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyGraphError(ValueError):
    """No edges survive cleaning (self-loop/duplicate removal)."""


class InvalidCutError(ValueError):
    """Conductance requested for the empty set or the full vertex set."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    neighbors[offsets[i]:offsets[i+1]] lists the neighbors of node i in
    ascending order; degrees are strictly positive by construction.
    """

    node_count: int
    edge_count: int
    offsets: np.ndarray
    neighbors: np.ndarray
    degrees: np.ndarray
    sqrt_degrees: np.ndarray
    original_ids: np.ndarray  # contiguous id -> label in the input

    def degree(self, i: int) -> int:
        return int(self.degrees[i])

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.neighbors[self.offsets[i] : self.offsets[i + 1]]

    @property
    def total_volume(self) -> int:
        return 2 * self.edge_count

    # Plain-list mirrors of the CSR arrays: the solvers run tight Python
    # loops and native ints/floats are markedly cheaper than numpy scalars.
    @cached_property
    def adjacency(self) -> list[list[int]]:
        off = self.offsets
        nbr = self.neighbors
        return [nbr[off[i] : off[i + 1]].tolist() for i in range(self.node_count)]

    @cached_property
    def degrees_list(self) -> list[int]:
        return self.degrees.tolist()

    @cached_property
    def sqrt_degrees_list(self) -> list[float]:
        return self.sqrt_degrees.tolist()

    def original_id(self, i: int) -> int:
        return int(self.original_ids[i])

    def index_of(self, original: int) -> int:
        """Contiguous id for an input label; KeyError if the label is absent."""
        pos = int(np.searchsorted(self.original_ids, original))
        if pos == self.node_count or int(self.original_ids[pos]) != original:
            raise KeyError(f"node {original} not present in graph")
        return pos

    def canonical_edge_lines(self) -> Iterator[str]:
        """Edges as 'u v' lines with u < v, in sorted order, contiguous ids."""
        for u in range(self.node_count):
            for v in self.neighbors_of(u).tolist():
                if u < v:
                    yield f"{u} {v}"

    def structurally_equal(self, other: "Graph") -> bool:
        return (
            self.node_count == other.node_count
            and self.edge_count == other.edge_count
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        )


def graph_from_edges(pairs: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
    """Build a Graph from (u, v) pairs, cleaning and relabeling as in load_graph."""
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
    if arr.size == 0:
        raise EmptyGraphError("no edges after cleaning")
    arr = arr.reshape(-1, 2)
    if arr.min() < 0:
        raise ValueError("node ids must be nonnegative")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    keep = lo != hi  # drop self-loops
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        raise EmptyGraphError("no edges after cleaning")

    ids = np.unique(np.concatenate([lo, hi]))  # sorted original labels
    n = int(ids.size)
    lo = np.searchsorted(ids, lo)
    hi = np.searchsorted(ids, hi)
    # dedup on canonical (min, max) pairs
    codes = np.unique(lo * np.int64(n) + hi)
    lo = codes // n
    hi = codes % n
    m = int(codes.size)

    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    degrees = np.bincount(src, minlength=n).astype(np.int64)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    return Graph(
        node_count=n,
        edge_count=m,
        offsets=offsets,
        neighbors=dst,
        degrees=degrees,
        sqrt_degrees=np.sqrt(degrees.astype(np.float64)),
        original_ids=ids,
    )


def load_graph(source: str | Path | IO) -> Graph:
    """Parse whitespace-separated 'u v' edge-list text into a Graph.

    Lines starting with '#' and blank lines are ignored.  Self-loops and
    duplicate edges (either orientation) are dropped; nodes left without
    edges are removed and the rest relabeled contiguously.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return load_graph(fh)

    us: list[int] = []
    vs: list[int] = []
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise EdgeListParseError(lineno, f"undecodable bytes: {exc}") from None
        else:
            line = raw
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, f"expected two node ids, got {len(parts)} fields")
        try:
            u = int(parts[0])
            v = int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer node id in {parts!r}") from None
        if u < 0 or v < 0:
            raise EdgeListParseError(lineno, "node ids must be nonnegative")
        us.append(u)
        vs.append(v)

    if not us:
        raise EmptyGraphError("no edges after cleaning")
    return graph_from_edges(np.column_stack([np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)]))


def write_canonical(g: Graph, target: str | Path | IO[str]) -> None:
    """Serialize the canonical edge list ('u v', u < v, sorted)."""
    if isinstance(target, (str, Path)):
        with open(target, "w") as fh:
            write_canonical(g, fh)
        return
    for line in g.canonical_edge_lines():
        target.write(line + "\n")


def canonical_text(g: Graph) -> str:
    buf = io.StringIO()
    write_canonical(g, buf)
    return buf.getvalue()


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Sorted, duplicate-free node collection with its volume precomputed."""

    members: tuple[int, ...]
    volume: int

    @classmethod
    def from_nodes(cls, g: Graph, nodes: Iterable[int]) -> "NodeSet":
        ids = sorted({int(x) for x in nodes})
        if ids and (ids[0] < 0 or ids[-1] >= g.node_count):
            raise ValueError(f"node id out of range [0, {g.node_count})")
        vol = int(g.degrees[ids].sum()) if ids else 0
        return cls(members=tuple(ids), volume=vol)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i: int) -> bool:
        pos = np.searchsorted(self.members, i) if self.members else 0
        return bool(self.members and pos < len(self.members) and self.members[pos] == i)

    def __iter__(self):
        return iter(self.members)


def volume(g: Graph, s: NodeSet) -> int:
    """Sum of degrees over the set."""
    if not s.members:
        return 0
    if s.members[0] < 0 or s.members[-1] >= g.node_count:
        raise ValueError(f"node id out of range [0, {g.node_count})")
    return int(g.degrees[list(s.members)].sum())


def conductance(g: Graph, s: NodeSet) -> float:
    """cut(S, V-S) / min(vol(S), vol(V-S)) for a nonempty proper subset S."""
    if not s.members:
        raise InvalidCutError("conductance undefined for the empty set")
    if s.members[0] < 0 or s.members[-1] >= g.node_count:
        raise ValueError(f"node id out of range [0, {g.node_count})")
    inside = set(s.members)
    vol = int(g.degrees[list(s.members)].sum())
    total = g.total_volume
    if vol == total:
        raise InvalidCutError("conductance undefined for the full vertex set")
    cut = 0
    adj = g.adjacency
    for u in s.members:
        for v in adj[u]:
            if v not in inside:
                cut += 1
    return cut / min(vol, total - vol)


def degree_histogram(g: Graph) -> list[tuple[int, int]]:
    """(degree, count) pairs for every degree present, ascending."""
    counts = np.bincount(g.degrees)
    return [(int(d), int(c)) for d, c in enumerate(counts) if c > 0]
