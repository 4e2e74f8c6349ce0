"""Exact polynomial and matrix algebra on top of sympy's domain machinery.

Matrices are ``DomainMatrix`` values over ZZ, QQ, ZZ[q], ZZ[t0..tD] or GF(p).
Characteristic polynomials are det(xI - M), monic, computed by the
division-free Berkowitz routine that ``DomainMatrix.charpoly`` uses for
non-field domains, and returned as ``Poly`` objects in x (and the domain's
own generators).
"""

import random
from fractions import Fraction
from functools import reduce
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

import sympy
from loguru import logger
from sympy import Poly, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from dist_cospectra.errors import InputError, ShapeMismatchError, ZeroPolynomialError

X = Symbol("x")
Q = Symbol("q")

# Fingerprint prime 2^61 - 1.
DEFAULT_PRIME = (1 << 61) - 1

RationalLike = Union[int, Fraction, str]


class _AllValues:
    """Root set of the zero polynomial."""

    _instance = None

    def __new__(cls) -> "_AllValues":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ALL_VALUES"

    def __bool__(self) -> bool:
        return True


ALL_VALUES = _AllValues()


def t_symbols(D: int) -> Tuple[Symbol, ...]:
    """Variables t0..tD standing for f(0)..f(D)."""
    return tuple(Symbol(f"t{k}") for k in range(D + 1))


def q_ring():
    return ZZ[Q]


def t_ring(D: int):
    return ZZ[t_symbols(D)]


def to_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def qq(value: RationalLike):
    f = to_fraction(value)
    return QQ(f.numerator, f.denominator)


def from_qq(element) -> Fraction:
    return Fraction(int(element.numerator), int(element.denominator))


def residue_mod(value: RationalLike, p: int = DEFAULT_PRIME) -> int:
    """A rational as an element of GF(p); its denominator must be prime to p."""
    f = to_fraction(value)
    return f.numerator * pow(f.denominator, -1, p) % p


def generic_rational(seed: int) -> Fraction:
    """A seeded rational in (0, 1) with a six-digit denominator."""
    rng = random.Random(seed)
    den = rng.randrange(100003, 999983)
    return Fraction(rng.randrange(1, den), den)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def identity(n: int, domain=ZZ) -> DomainMatrix:
    return DomainMatrix.eye(n, domain)


def all_ones(n: int, domain=ZZ) -> DomainMatrix:
    return DomainMatrix.ones((n, n), domain)


def zeros(n: int, domain=ZZ) -> DomainMatrix:
    return DomainMatrix.zeros((n, n), domain)


def rational_matrix(rows: Sequence[Sequence[RationalLike]]) -> DomainMatrix:
    """Exact QQ matrix from ints, Fractions or rational strings like ``"2/3"``."""
    n = len(rows)
    width = len(rows[0]) if rows else 0
    if any(len(r) != width for r in rows):
        raise ShapeMismatchError("ragged matrix rows")
    return DomainMatrix([[qq(v) for v in r] for r in rows], (n, width), QQ)


def integer_matrix(rows: Sequence[Sequence[int]]) -> DomainMatrix:
    n = len(rows)
    width = len(rows[0]) if rows else 0
    if any(len(r) != width for r in rows):
        raise ShapeMismatchError("ragged matrix rows")
    return DomainMatrix([[ZZ(int(v)) for v in r] for r in rows], (n, width), ZZ)


def fraction_rows(m: DomainMatrix) -> List[List[Fraction]]:
    mq = m.convert_to(QQ)
    return [[from_qq(e) for e in row] for row in mq.to_list()]


def _unify(a: DomainMatrix, b: DomainMatrix) -> Tuple[DomainMatrix, DomainMatrix]:
    if a.domain == b.domain:
        return a, b
    return a.unify(b)


def mat_mul(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    a, b = _unify(a, b)
    return a * b


def mat_equal(a: DomainMatrix, b: DomainMatrix) -> bool:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"cannot compare {a.shape} with {b.shape}")
    a, b = a.unify(b, fmt="dense")
    return a == b


def is_invertible(m: DomainMatrix) -> bool:
    rows, cols = m.shape
    if rows != cols:
        raise ShapeMismatchError(f"matrix {m.shape} is not square")
    return m.convert_to(QQ).rank() == rows


def first_difference(a: DomainMatrix, b: DomainMatrix) -> Union[Tuple[int, int], None]:
    """Row-major position of the first unequal entry, if any."""
    a, b = _unify(a, b)
    for i, (ra, rb) in enumerate(zip(a.to_list(), b.to_list())):
        for j, (ea, eb) in enumerate(zip(ra, rb)):
            if ea != eb:
                return i, j
    return None


# ---------------------------------------------------------------------------
# Characteristic polynomials
# ---------------------------------------------------------------------------


def charpoly(m: DomainMatrix) -> Poly:
    """Monic det(xI - M) as a Poly in x and the domain generators.

    Args:
        m: Square matrix over ZZ, QQ or a polynomial ring over ZZ.

    Returns:
        Poly: Degree-n monic polynomial with generators (x, *domain symbols).
    """
    n, cols = m.shape
    if n != cols:
        raise ShapeMismatchError(f"charpoly needs a square matrix, got {m.shape}")
    domain = m.domain
    coeffs = m.charpoly() if n else [domain.one]
    if domain.is_PolynomialRing:
        gens = tuple(domain.symbols)
        terms: Dict[Tuple[int, ...], object] = {}
        for i, c in enumerate(coeffs):
            for monom, coef in c.terms():
                terms[(n - i,) + tuple(monom)] = coef
        return Poly.from_dict(terms, X, *gens, domain=domain.domain)
    return Poly([domain.to_sympy(c) for c in coeffs], X, domain=domain)


def det(m: DomainMatrix):
    """Determinant through the same division-free charpoly routine."""
    n = m.shape[0]
    if n == 0:
        return m.domain.one
    constant = m.charpoly()[-1]
    return constant if n % 2 == 0 else -constant


def modular_charpoly(rows: Sequence[Sequence[int]], p: int = DEFAULT_PRIME) -> List[int]:
    """Coefficients of det(xI - M) mod p, highest power first.

    Args:
        rows: Integer matrix, reduced or not.
        p: Prime modulus.

    Returns:
        List[int]: n + 1 residues in 0..p-1, leading 1.
    """
    n = len(rows)
    if n == 0:
        return [1]
    K = GF(p, symmetric=False)
    m = DomainMatrix([[K(int(v) % p) for v in r] for r in rows], (n, n), K)
    return [K.to_int(c) % p for c in m.charpoly()]


def reduce_mod(poly: Poly, p: int = DEFAULT_PRIME) -> List[int]:
    """Coefficients in x of an integer Poly in x alone, reduced mod p."""
    return [int(c) % p for c in poly.all_coeffs()]


def specialize(poly: Poly, values: Dict[Symbol, RationalLike]) -> Poly:
    """Substitute rationals for non-x generators, keeping a Poly in x over QQ."""
    subs = {}
    for s, v in values.items():
        f = to_fraction(v)
        subs[s] = sympy.Rational(f.numerator, f.denominator)
    expr = poly.as_expr().subs(subs)
    return Poly(expr, X, domain=QQ)


def coefficients_in_x(poly: Poly) -> List[Poly]:
    """Coefficient polynomials of x^i over the remaining generators, i = 0..deg_x."""
    deg = poly.degree(X)
    by_power: Dict[int, Dict[Tuple[int, ...], object]] = {}
    for monom, coef in poly.terms():
        by_power.setdefault(monom[0], {})[monom[1:]] = coef
    result = []
    for i in range(max(deg, 0) + 1):
        terms = by_power.get(i, {})
        if terms:
            result.append(Poly.from_dict(terms, *poly.gens[1:], domain=poly.domain))
        else:
            result.append(Poly(0, *poly.gens[1:], domain=poly.domain))
    return result


# ---------------------------------------------------------------------------
# Univariate helpers
# ---------------------------------------------------------------------------


def _eval_fraction(coeffs: Sequence[int], r: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * r + c
    return acc


def rational_roots(p: Poly):
    """All rational roots of a univariate integer polynomial.

    Candidates come from the rational-root theorem on the primitive part and
    are confirmed by exact evaluation.

    Returns:
        FrozenSet[Fraction], or ``ALL_VALUES`` for the zero polynomial.
    """
    if p.is_zero:
        return ALL_VALUES
    _, prim = p.primitive()
    coeffs = [int(c) for c in prim.all_coeffs()]
    roots = set()
    while coeffs and coeffs[-1] == 0:
        roots.add(Fraction(0))
        coeffs.pop()
    if len(coeffs) <= 1:
        return frozenset(roots)
    lead, const = abs(coeffs[0]), abs(coeffs[-1])
    for num in sympy.divisors(const):
        for den in sympy.divisors(lead):
            for sign in (1, -1):
                r = Fraction(sign * num, den)
                if r not in roots and _eval_fraction(coeffs, r) == 0:
                    roots.add(r)
    return frozenset(roots)


def poly_gcd(polys: Iterable[Poly]) -> Poly:
    """Primitive gcd over ZZ with positive leading coefficient."""
    items = list(polys)
    if not items:
        raise ZeroPolynomialError("gcd of an empty list")
    nonzero = [p for p in items if not p.is_zero]
    if not nonzero:
        raise ZeroPolynomialError("gcd of zero polynomials is undefined")
    g = reduce(lambda a, b: a.gcd(b), nonzero)
    _, g = g.primitive()
    if g.LC() < 0:
        g = -g
    return g


def roots_in_open_unit_interval(roots) -> FrozenSet[Fraction]:
    if roots is ALL_VALUES:
        return frozenset()
    return frozenset(r for r in roots if 0 < r < 1)


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------


def _format_factor(sym: Symbol, exp: int) -> str:
    return str(sym) if exp == 1 else f"{sym}^{exp}"


def format_poly(poly: Poly) -> str:
    """Canonical text: descending powers of x, inner monomials ascending.

    >>> format_poly(Poly(X**2 - 2*X + 1 - Q**2, X, Q))
    'x^2 - 2*x + 1 - q^2'
    """
    if poly.is_zero:
        return "0"
    gens = poly.gens
    inner = gens[1:]
    terms = sorted(
        poly.terms(),
        key=lambda t: (-t[0][0], sum(t[0][1:]), tuple(t[0][1:])),
    )
    pieces: List[str] = []
    for monom, coef in terms:
        value = coef
        factors = [_format_factor(s, e) for s, e in zip(inner, monom[1:]) if e]
        if monom[0]:
            factors.append(_format_factor(gens[0], monom[0]))
        negative = value < 0
        magnitude = -value if negative else value
        if factors:
            body = "*".join(factors) if magnitude == 1 else "*".join([str(magnitude)] + factors)
        else:
            body = str(magnitude)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


_TRANSFORMS = standard_transformations + (convert_xor,)


def parse_poly(text: str, gens: Sequence[Symbol]) -> Poly:
    """Inverse of ``format_poly`` for the given generator order."""
    local = {str(s): s for s in gens}
    try:
        expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS)
    except Exception as e:
        raise InputError(f"cannot parse polynomial {text!r}: {e}")
    poly = Poly(expr, *gens)
    if not (poly.domain.is_ZZ or poly.domain.is_QQ):
        raise InputError(f"polynomial {text!r} uses symbols outside {[str(s) for s in gens]}")
    logger.debug(f"parsed polynomial over {poly.domain} in {len(gens)} variables")
    return poly
