"""SI epidemic (unit-rate exponential edge clocks) on an undirected graph.

Infection spreads from a source vertex; each edge between an infected and
a susceptible vertex rings after an independent Exponential(1) waiting
time.  The infection counting process N(t) then behaves locally like an
inhomogeneous Poisson process whose rate is the size of the cut between
infected and susceptible vertices, and the infection of a vertex of
degree d changes that rate by d - 2*(already-infected neighbors): a lone
high-degree vertex produces a detectable upward rate jump.

The simulator is event-driven: clocks are drawn lazily when an edge first
becomes active, which is equivalent in law to pre-drawing all clocks
(memorylessness), and stale heap entries are skipped on pop.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass
from itertools import chain

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .process import EventTimes
from .seeding import generator

__all__ = [
    "Graph",
    "CascadeTrace",
    "build_tree_with_hub",
    "simulate_si",
    "infection_count_process",
    "rate_at",
    "jump_at_infection",
    "load_edge_list",
    "save_edge_list",
    "load_trace_csv",
    "save_trace_csv",
]


class Graph:
    """Undirected simple connected graph stored as adjacency lists.

    The constructor validates simplicity (no self-loops, no parallel
    edges), symmetry, and connectivity; it takes ownership of the passed
    adjacency lists without copying.
    """

    def __init__(self, adjacency, hub: "int | None" = None):
        self.adjacency = adjacency
        self.hub = hub
        self._validate()

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self):
        """Yield each undirected edge once as (u, v) with u < v."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def _validate(self) -> None:
        n = self.n
        if n == 0:
            raise ValueError("graph must have at least one vertex")
        lengths = np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=n)
        total = int(lengths.sum())
        src = np.repeat(np.arange(n, dtype=np.int64), lengths)
        dst = np.fromiter(chain.from_iterable(self.adjacency), dtype=np.int64, count=total)
        if total:
            if dst.min() < 0 or dst.max() >= n:
                raise ValueError("adjacency references a vertex id out of range")
            if np.any(src == dst):
                v = int(src[np.argmax(src == dst)])
                raise ValueError(f"self-loop at vertex {v}")
            key_fwd = src * n + dst
            uniq = np.unique(key_fwd)
            if uniq.size != total:
                raise ValueError("parallel edge: some neighbor is listed twice")
            if not np.array_equal(uniq, np.sort(dst * n + src)):
                raise ValueError("adjacency is not symmetric")
        if n > 1:
            mat = csr_matrix(
                (np.ones(total, dtype=np.int8), (src, dst)), shape=(n, n)
            )
            n_comp, _ = connected_components(mat, directed=False)
            if n_comp != 1:
                raise ValueError(f"graph must be connected; found {n_comp} components")


@dataclass(frozen=True)
class CascadeTrace:
    """Infection times of every vertex of one cascade; source at time 0."""

    times: np.ndarray
    source: int

    def __post_init__(self) -> None:
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty one-dimensional array")
        if not (0 <= self.source < times.size):
            raise ValueError(f"source {self.source} out of range for {times.size} vertices")
        if times[self.source] != 0.0:
            raise ValueError(f"source must be infected at time 0, got {times[self.source]}")
        if not np.all(np.isfinite(times)) or np.any(times < 0):
            raise ValueError("infection times must be finite and non-negative")

    @property
    def n(self) -> int:
        return int(self.times.size)


def build_tree_with_hub(height: int, extra_leaves: int) -> Graph:
    """Perfect binary tree of the given height plus a planted high-degree hub.

    Vertices 0 .. 2^(height+1)-2 form the perfect tree in heap order
    (children of i are 2i+1 and 2i+2); ``extra_leaves`` new leaf vertices
    are attached to the hub, the leftmost vertex at depth height-1
    (index 2^(height-1) - 1).  The hub's final degree is extra_leaves + 3
    (parent + two subtree children + the new leaves), while every other
    vertex has degree <= 3.
    """
    if not (isinstance(height, (int, np.integer)) and height >= 1):
        raise ValueError(f"height must be an integer >= 1, got {height}")
    if not (isinstance(extra_leaves, (int, np.integer)) and extra_leaves >= 0):
        raise ValueError(f"extra_leaves must be >= 0, got {extra_leaves}")
    n_tree = 2 ** (height + 1) - 1
    hub = 2 ** (height - 1) - 1
    n = n_tree + extra_leaves
    adjacency = [[] for _ in range(n)]
    for i in range(n_tree):
        if i > 0:
            adjacency[i].append((i - 1) // 2)
        c1, c2 = 2 * i + 1, 2 * i + 2
        if c1 < n_tree:
            adjacency[i].append(c1)
        if c2 < n_tree:
            adjacency[i].append(c2)
    for leaf in range(n_tree, n):
        adjacency[leaf].append(hub)
        adjacency[hub].append(leaf)
    return Graph(adjacency, hub=hub)


_EXP_BUFFER = 1 << 14


def simulate_si(graph: Graph, source: int, seed, rate: float = 1.0) -> CascadeTrace:
    """Run one SI cascade from ``source`` until every vertex is infected.

    ``seed`` may be an integer, a SimSeed, or a numpy Generator; equal
    seeds give identical traces.  Edge clocks are Exponential(rate).
    """
    n = graph.n
    if not (0 <= source < n):
        raise ValueError(f"source {source} out of range for {n} vertices")
    if not (rate > 0):
        raise ValueError(f"rate must be positive, got {rate}")
    rng = seed if isinstance(seed, np.random.Generator) else generator(seed)
    adjacency = graph.adjacency
    scale = 1.0 / float(rate)
    times = [math.inf] * n
    infected = bytearray(n)
    heap = [(0.0, source)]
    pop = heapq.heappop
    push = heapq.heappush
    buf = rng.exponential(scale, _EXP_BUFFER).tolist()
    pos = 0
    buflen = len(buf)
    remaining = n
    while heap:
        t, v = pop(heap)
        if infected[v]:
            continue  # stale entry: v was reached by an earlier clock
        infected[v] = 1
        times[v] = t
        remaining -= 1
        if not remaining:
            break
        for u in adjacency[v]:
            if not infected[u]:
                if pos == buflen:
                    buf = rng.exponential(scale, _EXP_BUFFER).tolist()
                    pos = 0
                push(heap, (t + buf[pos], u))
                pos += 1
    if remaining:
        raise RuntimeError(
            f"cascade stalled with {remaining} vertices never infected; "
            "the graph is not connected"
        )
    return CascadeTrace(times=np.asarray(times), source=source)


def infection_count_process(trace: CascadeTrace) -> EventTimes:
    """The cascade's counting process: one event per infection (source included)."""
    times = np.sort(trace.times)
    return EventTimes(times=times, horizon=float(times[-1]))


def rate_at(graph: Graph, infected) -> int:
    """Size of the cut between ``infected`` and the rest = current infection rate."""
    infected = set(infected)
    cut = 0
    for v in infected:
        for u in graph.adjacency[v]:
            if u not in infected:
                cut += 1
    return cut


def jump_at_infection(graph: Graph, infected, v: int) -> int:
    """Change in the cut when susceptible ``v`` (adjacent to the cut) is infected.

    Equals degree(v) - 2 * |neighbors of v already infected|.
    """
    infected = set(infected)
    if v in infected:
        raise ValueError(f"vertex {v} is already infected")
    overlap = sum(1 for u in graph.adjacency[v] if u in infected)
    if overlap == 0:
        raise ValueError(f"vertex {v} has no infected neighbor, so it cannot be next")
    return graph.degree(v) - 2 * overlap


# ---------------------------------------------------------------------------
# file formats


def load_edge_list(path) -> Graph:
    """Read an undirected graph from text: one ``u v`` pair per line (0-indexed).

    Blank lines and ``#`` comments are ignored.  The resulting graph must
    pass the usual validation (simple, symmetric, connected).
    """
    edges = []
    max_v = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: vertex ids must be integers") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}: line {lineno}: vertex ids must be >= 0")
            edges.append((u, v))
            max_v = max(max_v, u, v)
    if max_v < 0:
        raise ValueError(f"{path}: no edges")
    adjacency = [[] for _ in range(max_v + 1)]
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    return Graph(adjacency)


def save_edge_list(graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# undirected edge list, {graph.n} vertices\n")
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")


def load_trace_csv(path) -> CascadeTrace:
    """Read a cascade trace from CSV with header ``vertex,time``.

    The source is the vertex with the smallest infection time (0 for any
    trace written by this package).
    """
    rows = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["vertex", "time"]:
            raise ValueError(f"{path}: expected header 'vertex,time', got {header}")
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                v, t = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                raise ValueError(f"{path}: row {rowno}: expected 'vertex,time'") from None
            if v in rows:
                raise ValueError(f"{path}: row {rowno}: duplicate vertex {v}")
            rows[v] = t
    if not rows:
        raise ValueError(f"{path}: no data rows")
    n = max(rows) + 1
    if set(rows) != set(range(n)):
        missing = sorted(set(range(n)) - set(rows))[:5]
        raise ValueError(f"{path}: missing vertices, e.g. {missing}")
    times = np.asarray([rows[v] for v in range(n)])
    return CascadeTrace(times=times, source=int(np.argmin(times)))


def save_trace_csv(trace: CascadeTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", "time"])
        for v, t in enumerate(trace.times):
            writer.writerow([v, repr(float(t))])
