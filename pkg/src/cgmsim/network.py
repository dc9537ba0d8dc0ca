"""Connecting-nearest-neighbour style network generation and edge-list I/O.

The generator grows an undirected graph by repeating two stochastic steps:
*agent addition* (a new node links to a random existing node and earns
"potential" links to that node's neighbours) and *edge addition* (a random
potential link is promoted to an actual edge).  The resulting graphs show
triadic closure, hubs, and short paths, which is what we want as a stand-in
for a friendship/follower network.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Iterable, Iterator

from .errors import ConfigurationError


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph over dense node ids 0..n-1.

    `neighbors[i]` is a sorted tuple of the neighbours of node i.  Instances
    are safe to share across threads/processes once built.
    """

    n: int
    neighbors: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 1:
            raise ValueError("graph needs at least one node")
        adj: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            adj[i].add(j)
            adj[j].add(i)
        return cls(n=n, neighbors=tuple(tuple(sorted(s)) for s in adj))

    def degree(self, node: int) -> int:
        return len(self.neighbors[node])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each undirected edge once, as (i, j) with i < j, sorted."""
        for i in range(self.n):
            for j in self.neighbors[i]:
                if i < j:
                    yield (i, j)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.neighbors) // 2


def degree(graph: Graph, node: int) -> int:
    return graph.degree(node)


def is_connected(graph: Graph) -> bool:
    """BFS reachability of every node from node 0."""
    if graph.n == 0:
        return True
    seen = [False] * graph.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        i = queue.popleft()
        for j in graph.neighbors[i]:
            if not seen[j]:
                seen[j] = True
                count += 1
                queue.append(j)
    return count == graph.n


@dataclass(frozen=True)
class ConnConfig:
    """Parameters for the growth process.

    n is the target node count (>= 2); u in [0, 1] is the probability that a
    growth step converts a potential edge instead of adding a new node.
    """

    n: int
    u: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ConfigurationError(f"node count must be >= 2, got {self.n}")
        if not 0.0 <= self.u <= 1.0:
            raise ConfigurationError(f"conversion probability must lie in [0, 1], got {self.u}")


def generate_conn(config: ConnConfig) -> Graph:
    """Grow a network until it has exactly ``config.n`` nodes.

    Starts from the 2-node complete graph with an empty potential-edge set.
    Each step draws one uniform: with probability u it promotes a uniformly
    random potential edge to an actual edge; otherwise (or whenever the
    potential set is empty) it adds a new node, wired to a uniformly random
    existing node, with potential edges to every current neighbour of that
    node.  Potential edges never appear in the returned graph.

    Deterministic for a fixed config (including seed).  Draw order per step:
    branch uniform, then one index draw for the chosen step.
    """
    rng = Random(config.seed)
    adj: list[set[int]] = [{1}, {0}]
    # no duplicates can ever be appended: potential pairs always involve a
    # brand-new node, so a plain list with swap-removal suffices
    potential: list[tuple[int, int]] = []
    n_nodes = 2

    while n_nodes < config.n:
        if rng.random() < config.u and potential:
            k = rng.randrange(len(potential))
            i, j = potential[k]
            potential[k] = potential[-1]
            potential.pop()
            adj[i].add(j)
            adj[j].add(i)
        else:
            anchor = rng.randrange(n_nodes)
            new = n_nodes
            anchor_nbrs = sorted(adj[anchor])  # snapshot before wiring `new`
            adj.append({anchor})
            adj[anchor].add(new)
            for x in anchor_nbrs:
                potential.append((x, new))
            n_nodes += 1

    return Graph(n=n_nodes, neighbors=tuple(tuple(sorted(s)) for s in adj))


def save_edge_list(graph: Graph, sink: str | Path) -> None:
    """Write the graph as text: a `# nodes=N` header then one `i j` line per edge."""
    lines = [f"# nodes={graph.n}"]
    lines.extend(f"{i} {j}" for i, j in graph.edges())
    Path(sink).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_edge_list(source: str | Path) -> Graph:
    """Inverse of :func:`save_edge_list`.

    Raises ValueError on a malformed file (missing header, bad ids,
    self-loops) and FileNotFoundError if the path does not exist.
    """
    text = Path(source).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# nodes="):
        raise ValueError(f"{source}: missing '# nodes=N' header")
    try:
        n = int(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise ValueError(f"{source}: unparseable node count") from exc
    edges = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{source}: bad edge line {ln!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ValueError(f"{source}: bad edge line {ln!r}") from exc
    return Graph.from_edges(n, edges)
