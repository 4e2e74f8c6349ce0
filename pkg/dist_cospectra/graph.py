"""Labeled simple graphs with bit-mask adjacency rows.

Vertices are 0..n-1. Fixture files and configuration text use 1-based labels; the
edge-list helpers convert at the boundary.
"""

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Tuple

from loguru import logger

from dist_cospectra.errors import EdgeListError, GraphError, VertexIndexError

MAX_VERTICES = 64

# Distance between vertices in different components.
INFINITY = math.inf

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    ``adj[v]`` is an n-bit mask with bit ``u`` set iff ``u ~ v``.
    """

    n: int
    adj: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_VERTICES:
            raise GraphError(f"vertex count {self.n} outside 1..{MAX_VERTICES}")
        if len(self.adj) != self.n:
            raise GraphError(f"expected {self.n} adjacency rows, got {len(self.adj)}")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise GraphError(f"row {v} references vertices beyond {self.n - 1}")
            if row >> v & 1:
                raise GraphError(f"loop at vertex {v}")
            for u in _bits(row):
                if not self.adj[u] >> v & 1:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise VertexIndexError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return bin(self.adj[v]).count("1")

    def degrees(self) -> List[int]:
        return [self.degree(v) for v in range(self.n)]

    def neighbors(self, v: int) -> List[int]:
        return list(_bits(self.adj[v]))

    def edges(self) -> List[Edge]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u]) if u < v]

    @property
    def num_edges(self) -> int:
        return sum(self.degrees()) // 2

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise VertexIndexError(f"vertex {v} outside 0..{self.n - 1}")

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex ``v`` renamed ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabeling is not a permutation of the vertices")
        rows = [0] * self.n
        for v in range(self.n):
            mask = 0
            for u in _bits(self.adj[v]):
                mask |= 1 << perm[u]
            rows[perm[v]] = mask
        return Graph(self.n, tuple(rows))

    def with_edges(self, added: Iterable[Edge] = (), removed: Iterable[Edge] = ()) -> "Graph":
        rows = list(self.adj)
        for u, v in removed:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        for u, v in added:
            self.check_vertex(u)
            self.check_vertex(v)
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(self.n, tuple(rows))

    def induced_degree(self, v: int, mask: int) -> int:
        """Number of neighbours of ``v`` inside the vertex set ``mask``."""
        return bin(self.adj[v] & mask).count("1")


@dataclass(frozen=True)
class DistMatrix:
    """All-pairs shortest-path distances; ``INFINITY`` across components."""

    n: int
    dist: Tuple[Tuple[float, ...], ...]

    def __getitem__(self, ij: Tuple[int, int]) -> float:
        i, j = ij
        return self.dist[i][j]

    @property
    def diameter(self) -> int:
        """Largest finite distance, i.e. the maximum component diameter."""
        return int(max(d for row in self.dist for d in row if d != INFINITY))

    def rows(self) -> List[List[float]]:
        return [list(r) for r in self.dist]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> List[int]:
    """Sorted vertex list of a bit mask."""
    return list(_bits(mask))


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bfs_levels(g: Graph, source: int) -> List[float]:
    dist: List[float] = [INFINITY] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in _bits(g.adj[v]):
            if dist[u] == INFINITY:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def bfs_distances(g: Graph) -> DistMatrix:
    """Exact all-pairs distances by one BFS per vertex."""
    return DistMatrix(g.n, tuple(tuple(bfs_levels(g, s)) for s in range(g.n)))


def diameter(g: Graph) -> int:
    return bfs_distances(g).diameter


def is_connected(g: Graph) -> bool:
    seen = 1
    frontier = 1
    while frontier:
        reach = 0
        for v in _bits(frontier):
            reach |= g.adj[v]
        frontier = reach & ~seen
        seen |= frontier
    return seen == g.full_mask


def components(g: Graph, within: int = -1) -> List[int]:
    """Connected components (as masks) of the subgraph induced by ``within``."""
    remaining = g.full_mask if within == -1 else within
    found = []
    while remaining:
        start = remaining & -remaining
        comp = start
        frontier = start
        while frontier:
            reach = 0
            for v in _bits(frontier):
                reach |= g.adj[v]
            frontier = reach & remaining & ~comp
            comp |= frontier
        found.append(comp)
        remaining &= ~comp
    return found


def is_regular_on(g: Graph, mask: int) -> Tuple[bool, int]:
    """Whether the subgraph induced by ``mask`` is regular, and its degree."""
    degrees = {g.induced_degree(v, mask) for v in _bits(mask)}
    if len(degrees) != 1:
        return False, -1
    return True, degrees.pop()


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """``g`` on 0..n-1 followed by ``h`` shifted to n..n+m-1."""
    shift = g.n
    rows = list(g.adj) + [row << shift for row in h.adj]
    return Graph(g.n + h.n, tuple(rows))


def coalesce(g: Graph, v: int, h: Graph, root: int) -> Graph:
    """Glue ``h`` onto ``g`` by identifying ``root`` with ``v``.

    The non-root vertices of ``h`` are appended after those of ``g`` in their
    original order.
    """
    g.check_vertex(v)
    h.check_vertex(root)
    new_label = {}
    nxt = g.n
    for u in range(h.n):
        if u == root:
            new_label[u] = v
        else:
            new_label[u] = nxt
            nxt += 1
    edges = g.edges() + [(new_label[a], new_label[b]) for a, b in h.edges()]
    logger.debug(f"coalescing {h.n}-vertex graph at root {root} onto vertex {v}")
    return Graph.from_edges(g.n + h.n - 1, edges)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def parse_edge_list(text: str) -> Graph:
    """Parse ``"n; u v; u v; ..."`` with 1-based labels.

    Lines starting with ``#`` are comments; line breaks may replace ``;``.
    """
    body = " ; ".join(
        line.split("#", 1)[0] for line in text.splitlines() if not line.lstrip().startswith("#")
    )
    fields = [f.strip() for f in body.split(";") if f.strip()]
    if not fields:
        raise EdgeListError("empty edge list")
    try:
        n = int(fields[0])
    except ValueError:
        raise EdgeListError(f"vertex count is not an integer: {fields[0]!r}")
    edges = []
    for field in fields[1:]:
        parts = field.replace(",", " ").replace("-", " ").split()
        if len(parts) != 2:
            raise EdgeListError(f"edge entry must have two endpoints: {field!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"non-integer endpoint in {field!r}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise EdgeListError(f"edge {u} {v} outside 1..{n}")
        edges.append((u - 1, v - 1))
    try:
        return Graph.from_edges(n, edges)
    except GraphError as e:
        raise EdgeListError(str(e))


def emit_edge_list(g: Graph) -> str:
    return "; ".join([str(g.n)] + [f"{u + 1} {v + 1}" for u, v in g.edges()])
