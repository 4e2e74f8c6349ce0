"""Tests for cospectrality in q, the q-locus and similarity checks at sampled q."""

import random
from fractions import Fraction

import pytest
from sympy import Poly
from sympy.polys.domains import QQ, ZZ

from dist_cospectra.algebra import (
    ALL_VALUES,
    Q,
    X,
    all_ones,
    identity,
    rational_matrix,
    specialize,
    t_symbols,
)
from dist_cospectra.errors import (
    DisconnectedGraphError,
    ShapeMismatchError,
    SingularSimilarityError,
    SizeMismatchError,
)
from dist_cospectra.graph import Graph, complete_graph, disjoint_union, is_connected, path_graph
from dist_cospectra.qanalysis import (
    CERTIFIED,
    DEFAULT_SCAN_VALUES,
    INCOMPLETE,
    REFUTED,
    charpoly_at,
    charpoly_f,
    charpoly_q,
    conjecture_scan,
    cospectral_all_q,
    cospectral_at,
    cospectral_generalized,
    q_locus,
    verify_qsample,
)
from dist_cospectra.switching import apply_switch, build_similarity, random_switch_instance


def _random_connected(rng, n):
    while True:
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.45]
        g = Graph.from_edges(n, edges)
        if is_connected(g):
            return g


def test_charpoly_q_of_an_edge():
    """Test the bivariate char poly of K2."""
    assert charpoly_q(path_graph(2)) == Poly(X**2 - 2 * X + 1 - Q**2, X, Q, domain=ZZ)


def test_charpoly_at_commutes_with_specialization():
    """Test evaluating q before and after the char poly."""
    rng = random.Random(41)
    for _ in range(10):
        g = _random_connected(rng, rng.randint(2, 6))
        q = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        assert charpoly_at(g, q) == specialize(charpoly_q(g), {Q: q})


def test_charpoly_f_specializes_to_charpoly_q():
    """Test that t_k <- q^k turns the generalized poly into the exponential one."""
    rng = random.Random(43)
    for _ in range(20):
        g = _random_connected(rng, rng.randint(2, 6))
        general = charpoly_f(g)
        d = len(general.gens) - 2
        subs = {t: Q**k for k, t in enumerate(t_symbols(d))}
        assert Poly(general.as_expr().subs(subs), X, Q, domain=ZZ) == charpoly_q(g)


def test_seven_vertex_pair_is_cospectral_everywhere(fig3):
    """Test the switched pair for all q and for every distance function."""
    g1, g2, _ = fig3
    assert cospectral_all_q(g1, g2)
    assert cospectral_generalized(g1, g2)
    assert cospectral_at(g1, g2, Fraction(2, 7))
    locus = q_locus(g1, g2)
    assert locus.identically_zero
    assert locus.roots is ALL_VALUES
    assert locus.to_dict()["rational_roots"] == "all"


def test_q_locus_of_path_and_triangle():
    """Test a pair that only agrees at q = 0 and q = 1."""
    p3, k3 = path_graph(3), complete_graph(3)
    assert not cospectral_all_q(p3, k3)
    assert cospectral_at(p3, k3, 1)
    assert cospectral_at(p3, k3, 0)
    assert not cospectral_at(p3, k3, Fraction(1, 2))
    locus = q_locus(p3, k3)
    assert not locus.identically_zero
    assert locus.roots == frozenset({Fraction(0), Fraction(1)})
    assert locus.roots_in_unit_interval == frozenset()
    assert locus.to_dict() == {
        "identically_zero": False,
        "gcd": "q^3 - q^2",
        "rational_roots": ["0", "1"],
        "roots_in_unit_interval": [],
    }


def test_order_and_connectivity_checks():
    """Test graphs of different orders and disconnected input."""
    with pytest.raises(SizeMismatchError):
        cospectral_all_q(path_graph(3), path_graph(4))
    with pytest.raises(SizeMismatchError):
        q_locus(path_graph(3), path_graph(4))
    two = disjoint_union(path_graph(2), path_graph(1))
    with pytest.raises(DisconnectedGraphError):
        cospectral_generalized(two, path_graph(3))
    assert not cospectral_all_q(two, path_graph(3))


def test_verify_qsample_statuses(fig3):
    """Test certified, incomplete and refuted outcomes."""
    g1, g2, c = fig3
    s = build_similarity(c).matrix()
    cert = verify_qsample(g1, g2, s, [Fraction(1, 2), Fraction(1, 3)])
    assert cert.status == CERTIFIED
    assert cert.d == 2
    assert cert.levels_passed is True
    assert cert.failed_levels == []
    assert verify_qsample(g1, g2, s, ["1/2", "1/2"]).status == INCOMPLETE
    assert verify_qsample(g1, g2, s, [0, "1/2"]).status == INCOMPLETE
    refuted = verify_qsample(g1, g2, identity(7, QQ), ["1/2"])
    assert refuted.status == REFUTED
    assert refuted.to_dict()["residuals"] == {"1/2": False}


def test_verify_qsample_rejects_bad_matrices(fig3):
    """Test singular and mis-shaped similarity matrices."""
    g1, g2, _ = fig3
    with pytest.raises(SingularSimilarityError):
        verify_qsample(g1, g2, all_ones(7, QQ), ["1/2"])
    with pytest.raises(ShapeMismatchError):
        verify_qsample(g1, g2, identity(6, QQ), ["1/2"])


def test_verify_qsample_uses_the_certificate_orientation():
    """Test a non-symmetric S that satisfies S D_q(G) = D_q(H) S only."""
    g = path_graph(3)
    h = Graph.from_edges(3, [(1, 2), (2, 0)])
    s = rational_matrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    cert = verify_qsample(g, h, s, ["1/2", "1/3"])
    assert cert.status == CERTIFIED
    assert cert.levels_passed
    assert verify_qsample(g, h, s.transpose(), ["1/2"]).status == REFUTED
    report = conjecture_scan(g, h, s, ["1/2", "2/3"])
    assert report.failures == []
    assert report.levels_passed


def test_zero_and_one_are_always_locus_roots():
    """Test that q = 0 and q = 1 are roots of every nonzero locus gcd."""
    rng = random.Random(53)
    checked = 0
    for _ in range(40):
        n = rng.randint(3, 6)
        locus = q_locus(_random_connected(rng, n), _random_connected(rng, n))
        if locus.identically_zero:
            continue
        assert Fraction(0) in locus.roots
        assert Fraction(1) in locus.roots
        checked += 1
    assert checked > 0


def test_certified_samples_imply_generalized_cospectrality():
    """Test that a certified sample check agrees with the level check."""
    rng = random.Random(47)
    for _ in range(10):
        g, c = random_switch_instance(rng)
        g2 = apply_switch(g, c)
        s = build_similarity(c).matrix()
        qs = [Fraction(1, k + 2) for k in range(12)]
        cert = verify_qsample(g, g2, s, qs)
        assert cert.status == CERTIFIED
        assert cert.levels_passed
        assert cospectral_generalized(g, g2)


def test_conjecture_scan_on_switched_pair(fig3):
    """Test that a level-wise similarity intertwines at every scanned value."""
    g1, g2, c = fig3
    report = conjecture_scan(g1, g2, build_similarity(c).matrix())
    assert report.successes == list(DEFAULT_SCAN_VALUES)
    assert report.failures == []
    assert report.levels_passed
    assert report.exotic_successes == [Fraction(-2), Fraction(3)]
    assert not report.counterexample_witness


def test_conjecture_scan_flags_a_witness(fig3):
    """Test two intertwining values without level-wise agreement."""
    g1, g2, _ = fig3
    report = conjecture_scan(g1, g2, identity(7, QQ), [0, 1, Fraction(1, 2)])
    assert report.successes == [Fraction(0), Fraction(1)]
    assert report.failures == [Fraction(1, 2)]
    assert not report.levels_passed
    assert report.counterexample_witness
    assert report.to_dict()["counterexample_witness"] is True
