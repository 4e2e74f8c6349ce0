"""Tests for distance levels and the matrices built from them."""

import random
from fractions import Fraction

import pytest
from sympy import Poly
from sympy.polys.domains import QQ, ZZ

from dist_cospectra.algebra import (
    DEFAULT_PRIME,
    Q,
    X,
    all_ones,
    charpoly,
    fraction_rows,
    identity,
    mat_equal,
)
from dist_cospectra.distance import (
    adjacency_matrix,
    distance_matrix,
    exp_distance_at,
    exp_distance_mod,
    exp_distance_symbolic,
    generalized_distance_symbolic,
    level_decomposition,
)
from dist_cospectra.errors import DisconnectedGraphError, InputError
from dist_cospectra.graph import Graph, cycle_graph, disjoint_union, path_graph


def test_level_decomposition_partitions_pairs():
    """Test that every ordered pair sits in exactly one level."""
    lv = level_decomposition(cycle_graph(6))
    assert lv.d == 3
    assert lv.connected
    for i in range(6):
        union = 0
        for rows in lv.levels:
            assert not union & rows[i]
            union |= rows[i]
        assert union == (1 << 6) - 1
    assert lv.distance(0, 3) == 3


def test_level_decomposition_of_disconnected_graph():
    """Test the infinite level."""
    lv = level_decomposition(disjoint_union(path_graph(2), path_graph(2)))
    assert not lv.connected
    assert lv.distance(0, 2) is None
    assert lv.infinite[0] == 0b1100


def test_distance_matrix_of_path():
    """Test the classical distance matrix."""
    assert distance_matrix(path_graph(3)).to_list() == [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
    with pytest.raises(DisconnectedGraphError):
        distance_matrix(disjoint_union(path_graph(1), path_graph(1)))


def test_adjacency_matrix():
    """Test that level one is the adjacency matrix."""
    assert adjacency_matrix(path_graph(3)).to_list() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]


def test_exp_distance_at_rational():
    """Test q^dist entries at q = 1/2."""
    rows = fraction_rows(exp_distance_at(path_graph(3), Fraction(1, 2)))
    assert rows == [
        [1, Fraction(1, 2), Fraction(1, 4)],
        [Fraction(1, 2), 1, Fraction(1, 2)],
        [Fraction(1, 4), Fraction(1, 2), 1],
    ]


def test_exp_distance_endpoints():
    """Test q = 0 and q = 1 on a connected graph."""
    g = cycle_graph(5)
    assert mat_equal(exp_distance_at(g, 0), identity(5, QQ))
    assert mat_equal(exp_distance_at(g, 1), all_ones(5, QQ))


def test_exp_distance_is_zero_across_components():
    """Test the q^inf = 0 convention."""
    rows = fraction_rows(exp_distance_at(disjoint_union(path_graph(2), path_graph(1)), "1/3"))
    assert rows[0][2] == 0 and rows[2][1] == 0
    assert rows[0][1] == Fraction(1, 3)


def test_exp_distance_symbolic_of_edge():
    """Test the symbolic matrix of a single edge."""
    assert charpoly(exp_distance_symbolic(path_graph(2))) == Poly(
        X**2 - 2 * X + 1 - Q**2, X, Q, domain=ZZ
    )


def test_exp_distance_mod_matches_exact_evaluation():
    """Test the modular matrix against exact evaluation at an integer q."""
    rng = random.Random(2)
    edges = [(u, v) for u in range(8) for v in range(u + 1, 8) if rng.random() < 0.35]
    g = Graph.from_edges(8, edges + [(i, i + 1) for i in range(7)])
    exact = fraction_rows(exp_distance_at(g, 12345))
    assert exp_distance_mod(g, 12345, DEFAULT_PRIME) == [
        [int(v) % DEFAULT_PRIME for v in row] for row in exact
    ]


def test_generalized_distance_variables():
    """Test the t_k entries and the variable count."""
    m = generalized_distance_symbolic(path_graph(3))
    assert [str(s) for s in m.domain.symbols] == ["t0", "t1", "t2"]
    wide = generalized_distance_symbolic(path_graph(3), D=4)
    assert len(wide.domain.symbols) == 5
    with pytest.raises(InputError):
        generalized_distance_symbolic(path_graph(3), D=1)
    with pytest.raises(DisconnectedGraphError):
        generalized_distance_symbolic(disjoint_union(path_graph(2), path_graph(1)))
