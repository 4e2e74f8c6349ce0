"""Tests for the construction search."""

import pytest

from dist_cospectra.canon import are_isomorphic
from dist_cospectra.errors import BudgetExhaustedError, SizeMismatchError
from dist_cospectra.graph import Graph, complete_graph, mask_of, path_graph
from dist_cospectra.matching import candidate_parts, collections, forced_config, match_construction
from dist_cospectra.models import SearchBudget
from dist_cospectra.switching import apply_switch, certify_pair, parse_config


def _star(n):
    return Graph.from_edges(n, [(0, v) for v in range(1, n)])


def test_candidate_parts():
    """Test that parts are dense regular even sets smaller than the graph."""
    assert len(candidate_parts(complete_graph(4), (2,))) == 6
    assert candidate_parts(complete_graph(4), (4,)) == []
    assert candidate_parts(path_graph(4), (4, 2)) == [mask_of([0, 1]), mask_of([1, 2]), mask_of([2, 3])]


def test_collections_respect_disjointness():
    """Test multi-part collections."""
    g = complete_graph(5)
    parts = candidate_parts(g, (2,))
    found = list(collections(g, parts, 2))
    assert all(len(c) <= 2 for c in found)
    for c in found:
        if len(c) == 2:
            assert not c[0] & c[1]


def test_forced_config_recovers_seven_vertex_config(fig3):
    """Test that the part alone fixes components and half-sets."""
    g1, _, c = fig3
    assert forced_config(g1, (mask_of([3, 4, 5, 6]),)) == c


def test_forced_config_needs_a_half_attachment():
    """Test collections with nothing to switch."""
    g = Graph.from_edges(5, complete_graph(4).edges() + [(4, v) for v in range(4)])
    assert forced_config(g, (mask_of([0, 1, 2, 3]),)) is None


def test_match_seven_vertex_pair(fig3):
    """Test that the search explains the 7-vertex pair in both orientations."""
    g1, g2, _ = fig3
    result = match_construction(g1, g2)
    assert result.found
    assert result.orientation == "g1->g2"
    assert parse_config(result.config_text) == result.config
    switched = apply_switch(g1, result.config)
    assert are_isomorphic(switched, g2)
    assert certify_pair(g1, switched, result.config).passed
    assert match_construction(g2, g1).found


def test_match_coalescing_base_pair(fig4):
    """Test a pair with multi-vertex components."""
    g1, g2, _ = fig4
    result = match_construction(g1, g2)
    assert result.found
    assert not result.exhausted


def test_match_non_cospectral_pair_finds_nothing():
    """Test that the search comes back empty without using up its budget."""
    result = match_construction(path_graph(4), _star(4))
    assert not result.found
    assert not result.exhausted
    assert result.config is None


def test_match_budget_exhaustion(fig3):
    """Test a search cut short by the candidate limit."""
    g1, g2, _ = fig3
    result = match_construction(g1, g2, SearchBudget(max_candidates=0))
    assert not result.found
    assert result.exhausted


def test_match_strict_mode_raises_on_exhaustion(fig3):
    """Test that strict mode turns an exhausted search into an error."""
    g1, g2, _ = fig3
    with pytest.raises(BudgetExhaustedError) as exc_info:
        match_construction(g1, g2, SearchBudget(max_candidates=0), strict=True)
    assert exc_info.value.candidates == 1
    assert match_construction(g1, g2, SearchBudget(), strict=True).found


def test_match_requires_equal_orders():
    """Test graphs of different orders."""
    with pytest.raises(SizeMismatchError):
        match_construction(path_graph(3), path_graph(4))
