"""Exhaustive small-graph generators.

Connected graphs are grown one vertex at a time: every connected graph has a
vertex whose removal leaves it connected, so attaching a new vertex to every
nonempty subset of every connected graph on n-1 vertices reaches all classes.
Duplicates are removed by canonical form.
"""

from itertools import combinations
from typing import Dict, Iterator, List

from loguru import logger

from dist_cospectra.canon import CanonicalForm, canonical_form
from dist_cospectra.errors import EnumerationLimitError
from dist_cospectra.graph import Graph

MAX_ENUMERATION_VERTICES = 7
MAX_REGULAR_VERTICES = 10


def _connected_classes(n: int) -> List[CanonicalForm]:
    level = [canonical_form(Graph.empty(1))]
    for k in range(2, n + 1):
        found: Dict[CanonicalForm, None] = {}
        for cf in level:
            base = cf.graph()
            for mask in range(1, 1 << base.n):
                rows = list(base.adj)
                new = base.n
                for v in range(base.n):
                    if mask >> v & 1:
                        rows[v] |= 1 << new
                rows.append(mask)
                found.setdefault(canonical_form(Graph(k, tuple(rows))), None)
        level = sorted(found)
        logger.debug(f"connected classes on {k} vertices: {len(level)}")
    return level


def enumerate_connected(n: int) -> Iterator[Graph]:
    """One canonical representative per connected isomorphism class on n vertices.

    Args:
        n: Vertex count, 1 <= n <= 7.

    Returns:
        Iterator[Graph]: Canonically labeled graphs in increasing canonical order.

    Raises:
        EnumerationLimitError: For n > 7; supply a graph6 file instead.
    """
    if n < 1:
        raise EnumerationLimitError(f"vertex count must be positive, got {n}")
    if n > MAX_ENUMERATION_VERTICES:
        raise EnumerationLimitError(
            f"internal enumeration stops at n={MAX_ENUMERATION_VERTICES}; "
            f"generate n={n} externally (e.g. `geng -c {n}`) and pass the graph6 file"
        )
    for cf in _connected_classes(n):
        yield cf.graph()


def regular_graphs(n: int, d: int) -> List[Graph]:
    """All d-regular graphs on n vertices up to isomorphism.

    Vertex 0 is attached to 1..d, then each later vertex picks its remaining
    neighbours among higher-numbered vertices with spare degree.
    """
    if n > MAX_REGULAR_VERTICES:
        raise EnumerationLimitError(f"regular graph enumeration stops at n={MAX_REGULAR_VERTICES}")
    if d < 0 or d >= n or (n * d) % 2:
        return []
    rows = [0] * n
    deg = [0] * n
    for u in range(1, d + 1):
        rows[0] |= 1 << u
        rows[u] |= 1
        deg[u] = 1
    deg[0] = d
    found: Dict[CanonicalForm, None] = {}

    def extend(v: int) -> None:
        if v == n:
            found.setdefault(canonical_form(Graph(n, tuple(rows))), None)
            return
        need = d - deg[v]
        spare = [w for w in range(v + 1, n) if deg[w] < d]
        if need > len(spare):
            return
        for chosen in combinations(spare, need):
            for w in chosen:
                rows[v] |= 1 << w
                rows[w] |= 1 << v
                deg[w] += 1
            deg[v] = d
            extend(v + 1)
            for w in chosen:
                rows[v] &= ~(1 << w)
                rows[w] &= ~(1 << v)
                deg[w] -= 1
            deg[v] = d - need

    extend(1)
    return [cf.graph() for cf in sorted(found)]
