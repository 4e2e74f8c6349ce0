"""For which q two graphs are exponential-distance cospectral.

Covers exact cospectrality at one rational q, for every q, and for every
distance function (generalized matrix), the rational q-locus of a pair, and
checks of a proposed similarity matrix at finitely many q values.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Union

from loguru import logger
from sympy import Poly
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from dist_cospectra.algebra import (
    ALL_VALUES,
    RationalLike,
    charpoly,
    coefficients_in_x,
    format_poly,
    is_invertible,
    mat_equal,
    mat_mul,
    poly_gcd,
    rational_roots,
    roots_in_open_unit_interval,
    to_fraction,
)
from dist_cospectra.distance import (
    exp_distance_at,
    exp_distance_from_levels,
    exp_distance_symbolic,
    generalized_distance_symbolic,
    level_decomposition,
)
from dist_cospectra.errors import (
    DisconnectedGraphError,
    ShapeMismatchError,
    SingularSimilarityError,
    SizeMismatchError,
)
from dist_cospectra.graph import Graph, is_connected

# Sample q values used when no candidate list is given.
DEFAULT_SCAN_VALUES = tuple(sorted({Fraction(a, b) for b in range(2, 7) for a in range(1, b)}))
EXOTIC_VALUES = (Fraction(-2), Fraction(3))


def _same_order(g: Graph, h: Graph) -> None:
    if g.n != h.n:
        raise SizeMismatchError(f"graphs have {g.n} and {h.n} vertices")


@lru_cache(maxsize=2048)
def charpoly_q(g: Graph) -> Poly:
    """Monic char poly of D_q over ZZ[q], as a Poly in (x, q)."""
    return charpoly(exp_distance_symbolic(g))


@lru_cache(maxsize=2048)
def charpoly_f(g: Graph, D: Optional[int] = None) -> Poly:
    """Monic char poly of D_f over ZZ[t0..tD], as a Poly in (x, t0, .., tD)."""
    return charpoly(generalized_distance_symbolic(g, D))


def charpoly_at(g: Graph, q: RationalLike) -> Poly:
    return charpoly(exp_distance_at(g, q))


def cospectral_at(g: Graph, h: Graph, q: RationalLike) -> bool:
    """Exact equality of the D_q char polys at a rational q."""
    _same_order(g, h)
    return charpoly_at(g, q) == charpoly_at(h, q)


def cospectral_all_q(g: Graph, h: Graph) -> bool:
    _same_order(g, h)
    return charpoly_q(g) == charpoly_q(h)


def cospectral_generalized(g: Graph, h: Graph) -> bool:
    """Equal char polys of D_f for every f, over ZZ[t0..tD] with D the larger diameter."""
    _same_order(g, h)
    if not (is_connected(g) and is_connected(h)):
        raise DisconnectedGraphError(
            "generalized cospectrality needs connected graphs; compare D_q instead"
        )
    top = max(level_decomposition(g).d, level_decomposition(h).d)
    return charpoly_f(g, top) == charpoly_f(h, top)


@dataclass(frozen=True)
class QLocus:
    """Rational q at which two graphs are D_q-cospectral.

    ``gcd`` is the primitive gcd of the coefficient differences; it is None
    when the char polys agree identically.
    """

    gcd: Optional[Poly]
    roots: Union[FrozenSet[Fraction], object]

    @property
    def identically_zero(self) -> bool:
        return self.gcd is None

    @property
    def roots_in_unit_interval(self) -> FrozenSet[Fraction]:
        return roots_in_open_unit_interval(self.roots)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identically_zero": self.identically_zero,
            "gcd": None if self.gcd is None else format_poly(self.gcd),
            "rational_roots": "all" if self.roots is ALL_VALUES
            else [str(r) for r in sorted(self.roots)],  # type: ignore[arg-type]
            "roots_in_unit_interval": [str(r) for r in sorted(self.roots_in_unit_interval)],
        }


def q_locus(g: Graph, h: Graph) -> QLocus:
    """gcd of the x-coefficients of charpoly_q(g) - charpoly_q(h), with its rational roots."""
    _same_order(g, h)
    delta = charpoly_q(g) - charpoly_q(h)
    if delta.is_zero:
        return QLocus(None, ALL_VALUES)
    constraints = [c for c in coefficients_in_x(delta) if not c.is_zero]
    g_q = poly_gcd(constraints)
    roots = rational_roots(g_q)
    logger.debug(f"q-locus gcd {format_poly(g_q)} with rational roots {sorted(roots)}")
    return QLocus(g_q, roots)


# ---------------------------------------------------------------------------
# Similarity matrices at sampled q
# ---------------------------------------------------------------------------

CERTIFIED = "certified"
INCOMPLETE = "incomplete"
REFUTED = "refuted"


@dataclass
class QSampleCertificate:
    """Outcome of checking S D_q(G) = D_q(H) S at finitely many q."""

    status: str
    d: int
    qs: List[Fraction]
    residuals: Dict[str, bool]
    levels_passed: Optional[bool] = None
    failed_levels: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "d": self.d,
            "qs": [str(q) for q in self.qs],
            "residuals": self.residuals,
            "levels_passed": self.levels_passed,
            "failed_levels": self.failed_levels,
        }


def _check_similarity_shape(s: DomainMatrix, n: int) -> DomainMatrix:
    if s.shape != (n, n):
        raise ShapeMismatchError(f"similarity matrix {s.shape} does not fit {n} vertices")
    s = s.convert_to(QQ)
    if not is_invertible(s):
        raise SingularSimilarityError("the similarity matrix is singular")
    return s


def verify_qsample(
    g: Graph, h: Graph, s: DomainMatrix, qs: Sequence[RationalLike]
) -> QSampleCertificate:
    """Check a fixed S against D_q at the given q values.

    Certified needs at least d distinct nonzero q values, d being the largest
    component diameter of the two graphs. A certified result is cross-checked
    level by level (S M_k(G) = M_k(H) S for each k), the orientation
    used by the switching certificate.

    Raises:
        SingularSimilarityError: S is not invertible.
    """
    _same_order(g, h)
    s = _check_similarity_shape(s, g.n)
    lv_g, lv_h = level_decomposition(g), level_decomposition(h)
    d = max(lv_g.d, lv_h.d)

    values: List[Fraction] = []
    for q in qs:
        f = to_fraction(q)
        if f not in values:
            values.append(f)
    if Fraction(0) in values:
        logger.warning("q = 0 carries no information and is ignored for completeness")

    residuals: Dict[str, bool] = {}
    for q in values:
        left = mat_mul(s, exp_distance_from_levels(lv_g, q))
        right = mat_mul(exp_distance_from_levels(lv_h, q), s)
        residuals[str(q)] = mat_equal(left, right)

    if not all(residuals.values()):
        logger.info(f"similarity refuted at q = {[q for q, ok in residuals.items() if not ok]}")
        return QSampleCertificate(REFUTED, d, values, residuals)
    informative = [q for q in values if q != 0]
    if len(informative) < d:
        return QSampleCertificate(INCOMPLETE, d, values, residuals)

    failed = [
        k
        for k in range(d + 1)
        if not mat_equal(mat_mul(s, lv_g.matrix(k, QQ)), mat_mul(lv_h.matrix(k, QQ), s))
    ]
    if failed:
        logger.error(f"per-level cross-check failed at levels {failed} despite {len(informative)} samples")
    return QSampleCertificate(CERTIFIED, d, values, residuals, not failed, failed)


@dataclass
class ConjectureScan:
    """Where a fixed S intertwines D_q, as evidence on all-q cospectrality."""

    successes: List[Fraction]
    failures: List[Fraction]
    levels_passed: bool
    exotic_successes: List[Fraction]

    @property
    def counterexample_witness(self) -> bool:
        return len(self.successes) >= 2 and not self.levels_passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "successes": [str(q) for q in self.successes],
            "failures": [str(q) for q in self.failures],
            "levels_passed": self.levels_passed,
            "exotic_successes": [str(q) for q in self.exotic_successes],
            "counterexample_witness": self.counterexample_witness,
        }


def conjecture_scan(
    g: Graph,
    h: Graph,
    s: DomainMatrix,
    candidates: Sequence[RationalLike] = DEFAULT_SCAN_VALUES,
) -> ConjectureScan:
    """Record every candidate q where S D_q(G) = D_q(H) S, and whether all levels agree."""
    _same_order(g, h)
    s = _check_similarity_shape(s, g.n)
    lv_g, lv_h = level_decomposition(g), level_decomposition(h)

    def intertwines(q: Fraction) -> bool:
        return mat_equal(
            mat_mul(s, exp_distance_from_levels(lv_g, q)), mat_mul(exp_distance_from_levels(lv_h, q), s)
        )

    successes, failures = [], []
    for q in (to_fraction(c) for c in candidates):
        (successes if intertwines(q) else failures).append(q)
    exotic = [q for q in EXOTIC_VALUES if intertwines(q)]
    top = max(lv_g.d, lv_h.d)
    levels = all(
        mat_equal(mat_mul(s, lv_g.matrix(k, QQ)), mat_mul(lv_h.matrix(k, QQ), s))
        for k in range(top + 1)
    )
    report = ConjectureScan(successes, failures, levels, exotic)
    if report.counterexample_witness:
        logger.warning("two or more intertwining q values without level-wise agreement")
    return report
