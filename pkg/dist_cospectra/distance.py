"""Distance, exponential-distance and generalized-distance matrices.

A graph's distance levels M_0..M_d (and M_inf for cross-component pairs) are
kept as bit-mask rows; every matrix here is a combination of them.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from loguru import logger
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from dist_cospectra.algebra import RationalLike, q_ring, qq, t_ring
from dist_cospectra.errors import DisconnectedGraphError, InputError
from dist_cospectra.graph import INFINITY, Graph, bfs_distances, bits


@dataclass(frozen=True)
class DistanceLevels:
    """Indicator rows per distance: ``levels[k][i]`` has bit j iff dist(i, j) = k."""

    n: int
    levels: Tuple[Tuple[int, ...], ...]
    infinite: Tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.levels) - 1

    @property
    def connected(self) -> bool:
        return not any(self.infinite)

    def distance(self, i: int, j: int) -> Optional[int]:
        for k, rows in enumerate(self.levels):
            if rows[i] >> j & 1:
                return k
        return None

    def matrix(self, k: int, domain=ZZ) -> DomainMatrix:
        """M_k as a 0/1 matrix; ``k = -1`` selects M_inf."""
        rows = self.infinite if k == -1 else (self.levels[k] if k <= self.d else (0,) * self.n)
        one, zero = domain.one, domain.zero
        return DomainMatrix(
            [[one if rows[i] >> j & 1 else zero for j in range(self.n)] for i in range(self.n)],
            (self.n, self.n),
            domain,
        )

    def combine(self, weights: Sequence[object], domain) -> DomainMatrix:
        """sum_k weights[k] * M_k over ``domain``; cross-component entries are zero."""
        entries: List[List[object]] = [[domain.zero] * self.n for _ in range(self.n)]
        for k, rows in enumerate(self.levels):
            for i in range(self.n):
                for j in bits(rows[i]):
                    entries[i][j] = weights[k]
        return DomainMatrix(entries, (self.n, self.n), domain)


def level_decomposition(g: Graph) -> DistanceLevels:
    dm = bfs_distances(g)
    finite = [d for row in dm.dist for d in row if d != INFINITY]
    d = int(max(finite))
    levels = [[0] * g.n for _ in range(d + 1)]
    infinite = [0] * g.n
    for i in range(g.n):
        for j in range(g.n):
            dist = dm.dist[i][j]
            if dist == INFINITY:
                infinite[i] |= 1 << j
            else:
                levels[int(dist)][i] |= 1 << j
    return DistanceLevels(g.n, tuple(tuple(r) for r in levels), tuple(infinite))


def adjacency_matrix(g: Graph, domain=ZZ) -> DomainMatrix:
    return level_decomposition(g).matrix(1, domain)


def distance_matrix(g: Graph) -> DomainMatrix:
    """Classical distance matrix (t_k <- k); connected graphs only."""
    lv = level_decomposition(g)
    if not lv.connected:
        raise DisconnectedGraphError("the distance matrix is undefined across components")
    return lv.combine([ZZ(k) for k in range(lv.d + 1)], ZZ)


def exp_distance_symbolic(g: Graph) -> DomainMatrix:
    """D_q over ZZ[q]: entry q^dist(i,j); the zero polynomial across components."""
    K = q_ring()
    q = K.gens[0]
    lv = level_decomposition(g)
    return lv.combine([q**k for k in range(lv.d + 1)], K)


def exp_distance_at(g: Graph, q: RationalLike) -> DomainMatrix:
    """D_q over QQ at a rational q; q^0 = 1 on the diagonal, 0 across components."""
    return exp_distance_from_levels(level_decomposition(g), q)


def exp_distance_mod(g: Graph, r: int, p: int) -> List[List[int]]:
    """D_q with q = r evaluated mod p, as plain integer rows."""
    lv = level_decomposition(g)
    powers = [pow(r, k, p) for k in range(lv.d + 1)]
    rows = [[0] * g.n for _ in range(g.n)]
    for k, level in enumerate(lv.levels):
        for i in range(g.n):
            for j in bits(level[i]):
                rows[i][j] = powers[k]
    return rows


def generalized_distance_symbolic(g: Graph, D: Optional[int] = None) -> DomainMatrix:
    """D_f over ZZ[t0..tD]: entry t_dist(i,j).

    Args:
        g: Connected graph.
        D: Highest variable index; defaults to the diameter of ``g``. Pass the
            larger diameter when two graphs are compared.

    Raises:
        DisconnectedGraphError: ``g`` has more than one component.
    """
    lv = level_decomposition(g)
    if not lv.connected:
        raise DisconnectedGraphError(
            "D_f has no value across components; use the exponential distance matrix, "
            "which sets q^inf = 0"
        )
    top = lv.d if D is None else D
    if top < lv.d:
        raise InputError(f"D={top} is below the graph diameter {lv.d}")
    K = t_ring(top)
    logger.debug(f"generalized distance matrix on {g.n} vertices over {top + 1} variables")
    return lv.combine(list(K.gens[: lv.d + 1]), K)


def exp_distance_from_levels(lv: DistanceLevels, q: RationalLike) -> DomainMatrix:
    """D_q at ``q`` rebuilt from precomputed levels."""
    value = qq(q)
    return lv.combine([value**k for k in range(lv.d + 1)], QQ)
