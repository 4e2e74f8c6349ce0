"""Canonical labeling by colour refinement and individualization.

The initial colouring uses the degree and the sorted distance row of each
vertex. Refinement splits cells by the multiset of neighbour colours until the
partition is equitable; non-discrete partitions are resolved by individualizing
each vertex of the first smallest non-singleton cell in turn. The canonical
form is the largest (refinement trace, relabeled adjacency) pair over all
leaves of the search tree. Leaves that agree expose automorphisms, which prune
sibling branches lying in the same orbit.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from loguru import logger

from dist_cospectra.errors import IsomorphismLimitError
from dist_cospectra.graph import INFINITY, Graph, bfs_distances, bits
from dist_cospectra.graph6 import emit_graph6

MAX_CANON_VERTICES = 16

Colouring = List[int]
Trace = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Isomorphism-class key: the adjacency rows after canonical relabeling."""

    n: int
    rows: Tuple[int, ...]

    def graph(self) -> Graph:
        return Graph(self.n, self.rows)

    @property
    def graph6(self) -> str:
        return emit_graph6(self.graph())

    def __str__(self) -> str:
        return self.graph6


def _rank(keys: Sequence[object]) -> Colouring:
    index = {k: i for i, k in enumerate(sorted(set(keys)))}  # type: ignore[type-var]
    return [index[k] for k in keys]


def _cell_sizes(colours: Colouring) -> Trace:
    sizes = [0] * (max(colours) + 1)
    for c in colours:
        sizes[c] += 1
    return tuple(sizes)


class _Canonizer:
    def __init__(self, g: Graph):
        self.g = g
        self.nbrs = [bits(g.adj[v]) for v in range(g.n)]
        self.best_path: Optional[Tuple[Trace, ...]] = None
        self.best_cert: Optional[Tuple[int, ...]] = None
        self.best_perm: Optional[List[int]] = None
        self.first_key: Optional[tuple] = None
        self.first_perm: Optional[List[int]] = None
        self.generators: List[List[int]] = []
        self.leaves = 0

    def initial_colouring(self) -> Colouring:
        dm = bfs_distances(self.g)
        big = self.g.n + 1
        keys = [
            (self.g.degree(v), tuple(sorted(big if d == INFINITY else int(d) for d in dm.dist[v])))
            for v in range(self.g.n)
        ]
        return _rank(keys)

    def refine(self, colours: Colouring) -> Colouring:
        cells = max(colours) + 1
        while cells < self.g.n:
            keys = [
                (colours[v], tuple(sorted(colours[u] for u in self.nbrs[v])))
                for v in range(self.g.n)
            ]
            refined = _rank(keys)
            count = max(refined) + 1
            if count == cells:
                break
            colours, cells = refined, count
        return colours

    def individualize(self, colours: Colouring, v: int) -> Colouring:
        target = colours[v]
        return _rank([2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(colours)])

    def certificate(self, perm: Colouring) -> Tuple[int, ...]:
        rows = [0] * self.g.n
        for v in range(self.g.n):
            mask = 0
            for u in self.nbrs[v]:
                mask |= 1 << perm[u]
            rows[perm[v]] = mask
        return tuple(rows)

    def _record_automorphism(self, reference: List[int], perm: List[int]) -> None:
        inverse = [0] * self.g.n
        for v, p in enumerate(reference):
            inverse[p] = v
        gamma = [inverse[perm[v]] for v in range(self.g.n)]
        if gamma != list(range(self.g.n)):
            self.generators.append(gamma)

    def leaf(self, path: Tuple[Trace, ...], colours: Colouring) -> None:
        self.leaves += 1
        cert = self.certificate(colours)
        key = (path, cert)
        if self.first_key is None:
            self.first_key = key
            self.first_perm = list(colours)
        elif key == self.first_key and self.first_perm is not None:
            self._record_automorphism(self.first_perm, colours)

        if self.best_path is None or key > (self.best_path, self.best_cert):
            self.best_path, self.best_cert, self.best_perm = path, cert, list(colours)
        elif key == (self.best_path, self.best_cert) and self.best_perm != self.first_perm:
            assert self.best_perm is not None
            self._record_automorphism(self.best_perm, colours)

    def _same_orbit(self, prefix: List[int], a: int, b: int) -> bool:
        parent = list(range(self.g.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gamma in self.generators:
            if any(gamma[p] != p for p in prefix):
                continue
            for v in range(self.g.n):
                ra, rb = find(v), find(gamma[v])
                if ra != rb:
                    parent[ra] = rb
        return find(a) == find(b)

    def search(self, colours: Colouring, prefix: List[int], path: Tuple[Trace, ...]) -> None:
        colours = self.refine(colours)
        path = path + (_cell_sizes(colours),)
        if self.best_path is not None and path < self.best_path[: len(path)]:
            return
        sizes = _cell_sizes(colours)
        if len(sizes) == self.g.n:
            self.leaf(path, colours)
            return

        smallest = min(s for s in sizes if s > 1)
        target = sizes.index(smallest)
        explored: List[int] = []
        for v in range(self.g.n):
            if colours[v] != target:
                continue
            if any(self._same_orbit(prefix, e, v) for e in explored):
                continue
            explored.append(v)
            self.search(self.individualize(colours, v), prefix + [v], path)


def canonical_labeling(g: Graph) -> Tuple[List[int], CanonicalForm]:
    """Canonical relabeling of ``g``.

    Args:
        g: Graph with at most 16 vertices.

    Returns:
        Tuple[List[int], CanonicalForm]: ``perm`` with ``g.relabel(perm)``
        equal to the canonical graph, and the canonical form itself.
    """
    if g.n > MAX_CANON_VERTICES:
        raise IsomorphismLimitError(
            f"canonical labeling supports at most {MAX_CANON_VERTICES} vertices, got {g.n}"
        )
    canon = _Canonizer(g)
    canon.search(canon.initial_colouring(), [], ())
    assert canon.best_perm is not None and canon.best_cert is not None
    if canon.leaves > 1000:
        logger.debug(f"canonical search on n={g.n} visited {canon.leaves} leaves")
    return canon.best_perm, CanonicalForm(g.n, canon.best_cert)


def canonical_form(g: Graph) -> CanonicalForm:
    return canonical_labeling(g)[1]


def are_isomorphic(g: Graph, h: Graph) -> bool:
    """Isomorphism test through canonical forms, with cheap invariants first."""
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_form(g) == canonical_form(h)


def isomorphism(g: Graph, h: Graph) -> Optional[List[int]]:
    """A vertex map ``phi`` with ``g.relabel(phi) == h``, or None."""
    if g.n != h.n:
        return None
    pg, cg = canonical_labeling(g)
    ph, ch = canonical_labeling(h)
    if cg != ch:
        return None
    inverse_h = [0] * h.n
    for v, p in enumerate(ph):
        inverse_h[p] = v
    return [inverse_h[pg[v]] for v in range(g.n)]
