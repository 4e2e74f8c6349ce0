"""Search for a switching configuration that explains a cospectral pair.

Candidate parts are even vertex sets inducing a regular subgraph of degree at
least half their size. Collections of up to ``max_parts`` pairwise disjoint
parts, completely joined or unjoined to each other, fix everything else: each
remaining vertex attaches to a part by none, all or half of it, edges between
attached vertices of one part may serve as extra edges, and the rest of B
falls into components with forced half-sets. A collection matches when the
forced switch is isomorphic to the target and its certificate passes.
"""

import time
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from dist_cospectra.canon import are_isomorphic
from dist_cospectra.errors import (
    BudgetExhaustedError,
    DisconnectedSwitchError,
    SizeMismatchError,
)
from dist_cospectra.graph import Graph, bits, components, is_regular_on, mask_of, popcount
from dist_cospectra.models import BComponent, MatchResult, SearchBudget, SwitchConfig
from dist_cospectra.switching import apply_switch, certify_pair, format_config, validate_config


class _Budget:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.start = time.perf_counter()
        self.candidates = 0
        self.exhausted = False

    @property
    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self.start) * 1000.0

    def spend(self) -> bool:
        """Count one candidate; False once the budget is used up."""
        self.candidates += 1
        limit = self.budget.max_candidates
        if (limit is not None and self.candidates > limit) or self.elapsed_ms > self.budget.time_ms:
            self.exhausted = True
        return not self.exhausted


def candidate_parts(g: Graph, sizes: Sequence[int]) -> List[int]:
    """Even vertex sets (as masks) inducing a k-regular subgraph with 2k >= size."""
    found = []
    for size in sizes:
        if size >= g.n:
            continue
        for combo in combinations(range(g.n), size):
            mask = mask_of(combo)
            regular, k = is_regular_on(g, mask)
            if regular and 2 * k >= size:
                found.append(mask)
    return found


def _joined_or_apart(g: Graph, p: int, r: int) -> bool:
    links = sum(popcount(g.adj[a] & r) for a in bits(p))
    return links in (0, popcount(p) * popcount(r))


def _attachment_ok(g: Graph, v: int, p: int) -> bool:
    hit = popcount(g.adj[v] & p)
    return hit in (0, popcount(p)) or 2 * hit == popcount(p)


def collections(g: Graph, parts: List[int], max_parts: int) -> Iterator[Tuple[int, ...]]:
    """Pairwise disjoint, joined-or-apart part collections, smallest first."""
    viable = parts
    if max_parts == 1:
        viable = [p for p in parts if all(_attachment_ok(g, v, p) for v in bits(g.full_mask & ~p))]

    def grow(chosen: Tuple[int, ...], start: int) -> Iterator[Tuple[int, ...]]:
        if chosen:
            yield chosen
        if len(chosen) == max_parts:
            return
        used = 0
        for p in chosen:
            used |= p
        for idx in range(start, len(viable)):
            p = viable[idx]
            if p & used or (used | p) == g.full_mask:
                continue
            if all(_joined_or_apart(g, p, r) for r in chosen):
                yield from grow(chosen + (p,), idx + 1)

    yield from grow((), 0)


def forced_config(
    g: Graph, parts: Sequence[int], allow_cross_part: bool = False
) -> Optional[SwitchConfig]:
    """The configuration forced by a part collection, or None if none exists."""
    union = 0
    for p in parts:
        union |= p
    b_mask = g.full_mask & ~union
    if not b_mask:
        return None

    owner: Dict[int, int] = {}
    half_of: Dict[int, int] = {}
    for b in bits(b_mask):
        touched = []
        for i, p in enumerate(parts):
            hit = g.adj[b] & p
            if not hit:
                continue
            if hit == p:
                touched.append((i, False))
            elif 2 * popcount(hit) == popcount(p):
                touched.append((i, True))
                half_of[b] = hit
            else:
                return None
        if len(touched) > 1:
            halves = [i for i, is_half in touched if is_half]
            if not allow_cross_part or len(halves) > 1:
                return None
            owner[b] = halves[0] if halves else touched[0][0]
        elif touched:
            owner[b] = touched[0][0]
    if not half_of:
        return None

    rows = [g.adj[v] & b_mask if b_mask >> v & 1 else 0 for v in range(g.n)]
    extra: List[Tuple[int, int]] = []
    for u in bits(b_mask):
        for v in bits(rows[u]):
            if u < v and u in owner and v in owner and owner[u] == owner[v]:
                extra.append((u, v))
                rows[u] &= ~(1 << v)
                rows[v] &= ~(1 << u)
    pieces = components(Graph(g.n, tuple(rows)), b_mask)

    piece_of = {v: i for i, piece in enumerate(pieces) for v in bits(piece)}
    # Extra edges inside one piece are ordinary component edges.
    kept_extra = [(u, v) for u, v in extra if piece_of[u] != piece_of[v]]
    return _assemble(parts, pieces, owner, half_of, kept_extra)


def _assemble(
    parts: Sequence[int],
    pieces: List[int],
    owner: Dict[int, int],
    half_of: Dict[int, int],
    extra: List[Tuple[int, int]],
) -> Optional[SwitchConfig]:
    comps: List[BComponent] = []
    for piece in pieces:
        verts = bits(piece)
        owners = {owner[v] for v in verts if v in owner}
        if len(owners) > 1:
            return None
        halves = {half_of[v] for v in verts if v in half_of}
        if len(halves) > 1:
            return None
        part = owners.pop() if owners else 0
        half = bits(halves.pop()) if halves else None
        comps.append(BComponent(vertices=verts, part=part, half=half))
    return SwitchConfig(
        parts=[bits(p) for p in parts], components=comps, extra_edges=sorted(extra)
    )


def _search(g1: Graph, g2: Graph, budget: SearchBudget, state: _Budget) -> Optional[SwitchConfig]:
    target_degrees = sorted(g2.degrees())
    parts = candidate_parts(g1, budget.part_sizes)
    for collection in collections(g1, parts, budget.max_parts):
        if not state.spend():
            return None
        config = forced_config(g1, collection, budget.allow_cross_part)
        if config is None:
            continue
        if not validate_config(g1, config, budget.allow_cross_part).ok:
            continue
        try:
            switched = apply_switch(g1, config, validate=False)
        except DisconnectedSwitchError:
            continue
        if sorted(switched.degrees()) != target_degrees:
            continue
        if not are_isomorphic(switched, g2):
            continue
        if certify_pair(g1, switched, config).passed:
            return config
        logger.warning(f"forced switch isomorphic to target but uncertified: {format_config(config)}")
    return None


def match_construction(
    g1: Graph, g2: Graph, budget: Optional[SearchBudget] = None, strict: bool = False
) -> MatchResult:
    """Find a configuration of one graph whose switch is isomorphic to the other.

    Args:
        g1: First graph (connected).
        g2: Second graph, same order, not isomorphic to ``g1``.
        budget: Part sizes, part count and time limits for the search.
        strict: Raise instead of returning an exhausted result.

    Returns:
        MatchResult: The configuration (on ``g1`` for orientation ``g1->g2``,
        on ``g2`` for ``g2->g1``), or an empty result. ``exhausted`` marks a
        search cut short by the budget.

    Raises:
        BudgetExhaustedError: In strict mode, when the budget runs out first.
    """
    if g1.n != g2.n:
        raise SizeMismatchError(f"graphs have {g1.n} and {g2.n} vertices")
    budget = budget or SearchBudget()
    state = _Budget(budget)
    for orientation, (a, b) in (("g1->g2", (g1, g2)), ("g2->g1", (g2, g1))):
        config = _search(a, b, budget, state)
        if config is not None:
            text = format_config(config)
            logger.debug(f"construction found ({orientation}): {text}")
            return MatchResult(
                config=config,
                config_text=text,
                orientation=orientation,
                candidates=state.candidates,
                elapsed_ms=round(state.elapsed_ms, 3),
            )
        if state.exhausted:
            break
    if state.exhausted:
        message = f"construction search stopped after {state.candidates} candidates"
        logger.warning(message)
        if strict:
            raise BudgetExhaustedError(
                message, candidates=state.candidates, elapsed_ms=round(state.elapsed_ms, 3)
            )
    return MatchResult(
        candidates=state.candidates,
        elapsed_ms=round(state.elapsed_ms, 3),
        exhausted=state.exhausted,
    )
