"""Graph families that are D_q-cospectral only at q = 1/2.

Both families pair a connected graph G containing an induced path with a
disconnected graph H whose second component is that path. The 6-vertex
component of H is transcribed from a drawing, so every generated pair is
gated on the closed-form characteristic polynomial of that component.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from loguru import logger
from sympy import Poly
from sympy.polys.domains import ZZ

from dist_cospectra.algebra import Q, X, specialize
from dist_cospectra.canon import are_isomorphic
from dist_cospectra.errors import FamilyOracleMismatch, FamilySizeError, UnknownFamilyError
from dist_cospectra.graph import Graph, disjoint_union, path_graph
from dist_cospectra.models import FamilyVerdict
from dist_cospectra.qanalysis import charpoly_at, charpoly_q, cospectral_at, q_locus

FAMILIES = ("fig5", "fig6")
MIN_FAMILY_ORDER = 8
HALF = Fraction(1, 2)

# 1-based edges of H's 6-vertex component.
_H_COMPONENT: Dict[str, Tuple[Tuple[int, int], ...]] = {
    "fig5": (
        (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
        (3, 5), (3, 6), (4, 5), (4, 6), (5, 6),
    ),
    "fig6": tuple(
        (a, b) for a in range(1, 7) for b in range(a + 1, 7) if (a, b) != (2, 5)
    ),
}


@dataclass(frozen=True)
class FamilyPair:
    """Connected G and its mate H = component ⊔ P_{n-6}, both on n vertices."""

    family: str
    n: int
    g: Graph
    h: Graph


def _check_family(family: str) -> None:
    if family not in FAMILIES:
        raise UnknownFamilyError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _check_order(n: int) -> None:
    if n < MIN_FAMILY_ORDER:
        raise FamilySizeError(f"family members need n >= {MIN_FAMILY_ORDER}, got {n}")


@lru_cache(maxsize=None)
def path_charpoly(n: int) -> Poly:
    """Char poly of D_q(P_n) in (x, q) from the three-term path recursion.

    P_0 = 1 and P_1 = x - 1; each further vertex multiplies by
    (q^2 + 1)x - 1 + q^2 and subtracts x^2 q^2 times the polynomial two
    steps back.
    """
    if n < 0:
        raise FamilySizeError(f"path length must be non-negative, got {n}")
    prev = Poly(1, X, Q, domain=ZZ)
    cur = Poly(X - 1, X, Q, domain=ZZ)
    if n == 0:
        return prev
    step = Poly((Q**2 + 1) * X - 1 + Q**2, X, Q, domain=ZZ)
    shift = Poly(X**2 * Q**2, X, Q, domain=ZZ)
    for _ in range(n - 1):
        prev, cur = cur, step * cur - shift * prev
    return cur


def _component_factor(family: str) -> Poly:
    """Char poly of H's 6-vertex component, as stated for each family."""
    if family == "fig5":
        expr = (
            (2 * Q**2 - Q + X - 1)
            * (Q + X - 1) ** 3
            * (2 * Q**3 - 2 * Q**2 * X - 5 * Q**2 - 2 * Q * X + X**2 + 2 * Q - 2 * X + 1)
        )
    else:
        expr = (
            (Q**2 + X - 1)
            * (Q + X - 1) ** 3
            * (3 * Q**3 - Q**2 * X - 7 * Q**2 - 3 * Q * X + X**2 + 3 * Q - 2 * X + 1)
        )
    return Poly(expr, X, Q, domain=ZZ)


def _g_factor(family: str) -> Poly:
    """Non-path factor of G's char poly, valid once q = 1/2."""
    if family == "fig5":
        expr = (
            (2 * Q**2 - Q + X - 1)
            * (Q + X - 1) ** 3
            * (
                (4 * Q**2 * X + 2 * Q**2 - Q + X - 1) * (2 * Q**2 * X + 2 * Q**2 - Q + X - 1)
                - 8 * Q**2 * X**2
            )
        )
    else:
        expr = (
            (Q**2 + X - 1)
            * (Q + X - 1) ** 3
            * (
                (4 * Q**2 * X + 4 * Q**2 - 3 * Q + X - 1) * (2 * Q**2 * X + Q**2 + X - 1)
                - 8 * Q**2 * X**2
            )
        )
    return Poly(expr, X, Q, domain=ZZ)


def closed_form_H(family: str, n: int) -> Poly:
    """Expanded char poly of D_q(H) over ZZ[q] for the n-vertex member."""
    _check_family(family)
    _check_order(n)
    return _component_factor(family) * path_charpoly(n - 6)


def closed_form_G_at_half(family: str, n: int) -> Poly:
    """Char poly of D_{1/2}(G) over QQ from the factored form at q = 1/2."""
    _check_family(family)
    _check_order(n)
    return specialize(_g_factor(family) * path_charpoly(n - 6), {Q: HALF})


def _path_tail(n: int) -> List[Tuple[int, int]]:
    return [(v, v + 1) for v in range(7, n)]


def _g_edges(family: str, n: int) -> List[Tuple[int, int]]:
    if family == "fig5":
        edges = [(1, 2), (1, n), (2, n), (3, 4), (5, 6), (3, 7), (4, 7), (5, 7), (6, 7)]
    else:
        edges = [(a, b) for a in range(3, 8) for b in range(a + 1, 8)] + [(1, n), (2, n)]
    return edges + _path_tail(n)


@lru_cache(maxsize=None)
def _verified_component(family: str) -> Graph:
    component = Graph.from_edges(6, [(a - 1, b - 1) for a, b in _H_COMPONENT[family]])
    if charpoly_q(component) != _component_factor(family):
        raise FamilyOracleMismatch(
            f"{family}: the 6-vertex component of H disagrees with its closed form"
        )
    return component


def _pair(family: str, n: int) -> FamilyPair:
    _check_family(family)
    _check_order(n)
    g = Graph.from_edges(n, [(a - 1, b - 1) for a, b in _g_edges(family, n)])
    h = disjoint_union(_verified_component(family), path_graph(n - 6))
    logger.debug(f"{family} pair on {n} vertices: |E(G)|={g.num_edges}, |E(H)|={h.num_edges}")
    return FamilyPair(family, n, g, h)


def fig5_pair(n: int) -> FamilyPair:
    """G: triangles 3-4-7 and 5-6-7 at one end of the path 7..n, triangle 1-2-n at the other.

    Raises:
        FamilySizeError: n < 8.
        FamilyOracleMismatch: H's component fails its closed-form check.
    """
    return _pair("fig5", n)


def fig6_pair(n: int) -> FamilyPair:
    """G: K_5 on {3..7} with the path 7..n and 1, 2 pendant at n; H: K_6 - e ⊔ P_{n-6}."""
    return _pair("fig6", n)


def family_pair(family: str, n: int) -> FamilyPair:
    return _pair(family, n)


def family_report(family: str, ns: Sequence[int]) -> List[FamilyVerdict]:
    """Verdicts for each requested order, computed rather than assumed.

    Args:
        family: ``"fig5"`` or ``"fig6"``.
        ns: Vertex counts, each at least 8.

    Returns:
        List[FamilyVerdict]: One entry per n, in the given order.
    """
    _check_family(family)
    verdicts = []
    for n in ns:
        pair = _pair(family, n)
        locus = q_locus(pair.g, pair.h)
        unit = sorted(locus.roots_in_unit_interval)
        verdict = FamilyVerdict(
            family=family,
            n=n,
            non_isomorphic=not are_isomorphic(pair.g, pair.h),
            cospectral_at_half=cospectral_at(pair.g, pair.h, HALF),
            unit_interval_roots=[str(r) for r in unit],
            only_half=not locus.identically_zero and unit == [HALF],
            closed_form_h=closed_form_H(family, n) == charpoly_q(pair.h),
            closed_form_g=closed_form_G_at_half(family, n) == charpoly_at(pair.g, HALF),
        )
        if not verdict.passed:
            logger.warning(f"{family} n={n} failed a check: {verdict.dict()}")
        verdicts.append(verdict)
    return verdicts
