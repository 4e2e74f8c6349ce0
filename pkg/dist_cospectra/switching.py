"""Switching construction: configuration checks, the switch, and its certificate.

A configuration names parts A^1..A^m (even, induced regular of degree at least
half their size, pairwise completely joined or unjoined) and B-components, each
tied to one part and optionally to a half-set of it. Switching moves every
B-vertex attached to exactly its half-set onto the complementary half. The
similarity matrix is an S-hat block (2/m)J - I on every part and the identity
elsewhere; it conjugates every distance level of G1 onto G2.
"""

import random
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from dist_cospectra.algebra import first_difference, mat_equal
from dist_cospectra.distance import DistanceLevels, level_decomposition
from dist_cospectra.enumerate import regular_graphs
from dist_cospectra.errors import (
    ConfigPartitionError,
    ConfigSyntaxError,
    DisconnectedGraphError,
    DisconnectedSwitchError,
    InvalidConfigError,
    SizeMismatchError,
)
from dist_cospectra.graph import (
    Graph,
    bits,
    coalesce,
    components,
    is_connected,
    is_regular_on,
    mask_of,
    popcount,
)
from dist_cospectra.models import (
    BComponent,
    LevelCheck,
    SimilarityCertificate,
    SwitchConfig,
    ValidationReport,
    Violation,
)

# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

_SET = re.compile(r"\{([^{}]*)\}")
_B_ENTRY = re.compile(
    r"^\{(?P<verts>[^{}]*)\}\s*(?:->\s*(?:half\s*\{(?P<half>[^{}]*)\}|A\s*(?P<part>\d+)))?$",
    re.IGNORECASE,
)


def _split_top(text: str, sep: str) -> List[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def _labels(body: str) -> List[int]:
    items = [s.strip() for s in body.split(",") if s.strip()]
    try:
        values = [int(s) for s in items]
    except ValueError:
        raise ConfigSyntaxError(f"non-integer vertex label in {{{body}}}")
    if any(v < 1 for v in values):
        raise ConfigSyntaxError(f"vertex labels are 1-based, got {{{body}}}")
    return [v - 1 for v in values]


def parse_config(text: str) -> SwitchConfig:
    """Parse ``"A: {..}, {..}; B: {..}->half{..}, {..}->A2; extra: {u-v, ..}"``.

    Labels are 1-based. A B-entry without ``->`` belongs to the first part and
    has no half-set.
    """
    sections: Dict[str, str] = {}
    for chunk in _split_top(text.strip(), ";"):
        if ":" not in chunk:
            raise ConfigSyntaxError(f"section without a key: {chunk!r}")
        key, value = chunk.split(":", 1)
        key = key.strip().lower()
        if key not in ("a", "b", "extra"):
            raise ConfigSyntaxError(f"unknown section {key!r}")
        sections[key] = value.strip()
    if "a" not in sections:
        raise ConfigSyntaxError("configuration needs an 'A:' section")

    parts = [_labels(body) for body in _SET.findall(sections["a"])]
    if not parts:
        raise ConfigSyntaxError("no parts in 'A:' section")

    comps: List[BComponent] = []
    for entry in _split_top(sections.get("b", ""), ","):
        m = _B_ENTRY.match(entry)
        if not m:
            raise ConfigSyntaxError(f"malformed B entry {entry!r}")
        verts = _labels(m.group("verts"))
        if m.group("half") is not None:
            half = _labels(m.group("half"))
            owners = [i for i, part in enumerate(parts) if set(half) <= set(part)]
            if not owners:
                raise ConfigPartitionError(f"half-set of {entry!r} lies in no single part")
            comps.append(BComponent(vertices=verts, part=owners[0], half=half))
        elif m.group("part") is not None:
            index = int(m.group("part")) - 1
            if not 0 <= index < len(parts):
                raise ConfigPartitionError(f"{entry!r} names a missing part")
            comps.append(BComponent(vertices=verts, part=index))
        else:
            comps.append(BComponent(vertices=verts, part=0))

    extra = []
    extra_text = sections.get("extra", "{}")
    sets = _SET.findall(extra_text)
    if len(sets) != 1:
        raise ConfigSyntaxError(f"'extra:' must be a single {{...}} set, got {extra_text!r}")
    for item in [s.strip() for s in sets[0].split(",") if s.strip()]:
        ends = [e.strip() for e in item.split("-")]
        if len(ends) != 2:
            raise ConfigSyntaxError(f"extra edge must look like u-v, got {item!r}")
        u, v = _labels(",".join(ends))
        extra.append((u, v))

    return SwitchConfig(parts=parts, components=comps, extra_edges=extra)


def _fmt_set(vs: Sequence[int]) -> str:
    return "{" + ",".join(str(v + 1) for v in sorted(vs)) + "}"


def format_config(c: SwitchConfig) -> str:
    """1-based text form accepted by ``parse_config``."""
    a = ", ".join(_fmt_set(p) for p in c.parts)
    entries = []
    for comp in c.components:
        if comp.half is not None:
            entries.append(f"{_fmt_set(comp.vertices)}->half{_fmt_set(comp.half)}")
        elif comp.part:
            entries.append(f"{_fmt_set(comp.vertices)}->A{comp.part + 1}")
        else:
            entries.append(_fmt_set(comp.vertices))
    extra = "{" + ",".join(f"{u + 1}-{v + 1}" for u, v in c.extra_edges) + "}"
    return f"A: {a}; B: {', '.join(entries)}; extra: {extra}"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check_partition(g: Graph, c: SwitchConfig) -> None:
    seen: Dict[int, str] = {}
    groups = [("part", p) for p in c.parts] + [("component", comp.vertices) for comp in c.components]
    for kind, vertices in groups:
        for v in vertices:
            if not 0 <= v < g.n:
                raise ConfigPartitionError(f"vertex {v + 1} is outside 1..{g.n}")
            if v in seen:
                raise ConfigPartitionError(f"vertex {v + 1} appears in more than one set")
            seen[v] = kind
    missing = [v + 1 for v in range(g.n) if v not in seen]
    if missing:
        raise ConfigPartitionError(f"vertices {missing} are in no part or component")
    for comp in c.components:
        if not 0 <= comp.part < len(c.parts):
            raise ConfigPartitionError(f"component {_fmt_set(comp.vertices)} names a missing part")
    for u, v in c.extra_edges:
        if not (0 <= u < g.n and 0 <= v < g.n):
            raise ConfigPartitionError(f"extra edge {u + 1}-{v + 1} is outside 1..{g.n}")


def validate_config(g: Graph, c: SwitchConfig, allow_cross_part: bool = False) -> ValidationReport:
    """Check every switching condition and name each failure.

    Args:
        g: The graph G1.
        c: Configuration whose vertex sets partition V(g).
        allow_cross_part: Accept B-vertices joined to all of a foreign part.

    Returns:
        ValidationReport: Empty violation list when every condition holds.

    Raises:
        ConfigPartitionError: The sets do not partition the vertex set.
    """
    _check_partition(g, c)
    report = ValidationReport()

    def flag(code: str, message: str, soft: bool = False) -> None:
        report.violations.append(Violation(code=code, message=message, soft=soft))

    part_masks = [mask_of(p) for p in c.parts]
    for i, (part, pmask) in enumerate(zip(c.parts, part_masks)):
        label = f"A{i + 1} {_fmt_set(part)}"
        if len(part) % 2:
            flag("part_size_odd", f"{label}: part size not even ({len(part)})")
        regular, k = is_regular_on(g, pmask)
        if not regular:
            flag("part_not_regular", f"{label}: induced subgraph is not regular")
        elif 2 * k < len(part):
            flag("part_degree_low", f"{label}: induced degree {k} is below {len(part) / 2:g}")

    for i in range(len(c.parts)):
        for j in range(i + 1, len(c.parts)):
            joins = sum(popcount(g.adj[a] & part_masks[j]) for a in c.parts[i])
            if joins not in (0, len(c.parts[i]) * len(c.parts[j])):
                flag(
                    "inter_part",
                    f"A{i + 1} and A{j + 1} are neither completely joined nor unjoined",
                )

    comp_of: Dict[int, int] = {}
    for idx, comp in enumerate(c.components):
        for v in comp.vertices:
            comp_of[v] = idx

    for idx, comp in enumerate(c.components):
        part = c.parts[comp.part]
        pmask = part_masks[comp.part]
        tag = _fmt_set(comp.vertices)
        half_mask = None
        if comp.half is not None:
            if not set(comp.half) <= set(part):
                flag("half_set", f"{tag}: half-set {_fmt_set(comp.half)} is not inside its part")
            elif 2 * len(comp.half) != len(part):
                flag("half_size", f"{tag}: half-set {_fmt_set(comp.half)} is not half of its part")
            else:
                half_mask = mask_of(comp.half)
        for b in comp.vertices:
            attach = g.adj[b] & pmask
            if attach not in (0, pmask) and attach != half_mask:
                if comp.half is None and 2 * popcount(attach) == len(part):
                    flag(
                        "half_missing",
                        f"vertex {b + 1} attaches to half of its part but {tag} has no half-set",
                    )
                else:
                    flag(
                        "attachment",
                        f"vertex {b + 1} is adjacent to {popcount(attach)} of {len(part)} part vertices: "
                        "not none/all/half",
                    )
            for k, other in enumerate(part_masks):
                if k == comp.part or not g.adj[b] & other:
                    continue
                if allow_cross_part and g.adj[b] & other == other:
                    flag("cross_part", f"vertex {b + 1} is joined to all of A{k + 1}", soft=True)
                else:
                    flag("cross_part", f"vertex {b + 1} is adjacent to foreign part A{k + 1}")

    extra = {(min(u, v), max(u, v)) for u, v in c.extra_edges}
    b_all = mask_of(c.b_vertices())
    for u in c.b_vertices():
        for v in bits(g.adj[u] & b_all):
            if u < v and comp_of[u] != comp_of[v] and (u, v) not in extra:
                flag(
                    "component_edge",
                    f"edge {u + 1}-{v + 1} joins two B-components but is not an extra edge",
                )

    rows = [g.adj[v] & b_all if v in comp_of else 0 for v in range(g.n)]
    for u, v in extra:
        if u in comp_of and v in comp_of:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
    internal = Graph(g.n, tuple(rows))
    for comp in c.components:
        if len(components(internal, mask_of(comp.vertices))) != 1:
            flag("component_disconnected", f"{_fmt_set(comp.vertices)} does not induce a connected subgraph")

    for u, v in sorted(extra):
        if not g.has_edge(u, v):
            flag("extra_not_edge", f"extra edge {u + 1}-{v + 1} is not an edge of the graph")
            continue
        if u not in comp_of or v not in comp_of:
            flag("extra_endpoint", f"extra edge {u + 1}-{v + 1} has an endpoint outside B")
            continue
        pu, pv = c.components[comp_of[u]].part, c.components[comp_of[v]].part
        if pu != pv or not (g.adj[u] & part_masks[pu] and g.adj[v] & part_masks[pv]):
            flag(
                "extra_endpoint",
                f"extra edge {u + 1}-{v + 1} needs both ends adjacent to the same part",
            )

    if not is_connected(g):
        flag("graph_disconnected", "the graph is not connected")
    union = mask_of(c.a_vertices())
    if len(components(g, union)) != 1:
        flag("parts_union_disconnected", "the union of the parts is not connected", soft=True)

    if report.violations:
        logger.debug(f"configuration has {len(report.violations)} violations: {report.codes()}")
    return report


# ---------------------------------------------------------------------------
# Switch and similarity matrix
# ---------------------------------------------------------------------------


def apply_switch(g: Graph, c: SwitchConfig, validate: bool = True) -> Graph:
    """Move every half-attached B-vertex onto the complementary half of its part.

    Raises:
        InvalidConfigError: ``validate`` is set and the configuration fails.
        DisconnectedSwitchError: A connected graph came out disconnected.
    """
    if validate:
        report = validate_config(g, c)
        if not report.ok:
            raise InvalidConfigError(
                "; ".join(v.message for v in report.hard), violations=report.hard
            )
    rows = list(g.adj)
    for comp in c.components:
        if comp.half is None:
            continue
        pmask = mask_of(c.parts[comp.part])
        half = mask_of(comp.half)
        other = pmask & ~half
        for b in comp.vertices:
            if rows[b] & pmask == half:
                rows[b] = (rows[b] & ~pmask) | other
                for a in bits(half):
                    rows[a] &= ~(1 << b)
                for a in bits(other):
                    rows[a] |= 1 << b
    switched = Graph(g.n, tuple(rows))
    if not is_connected(switched) and is_connected(g):
        raise DisconnectedSwitchError(f"switching {format_config(c)} disconnects the graph")
    return switched


@dataclass(frozen=True)
class SimilarityMatrix:
    """S-hat blocks on the listed vertex sets, identity on every other vertex."""

    n: int
    blocks: Tuple[Tuple[int, ...], ...]

    def matrix(self) -> DomainMatrix:
        rows = [[QQ.zero] * self.n for _ in range(self.n)]
        for v in range(self.n):
            rows[v][v] = QQ.one
        for block in self.blocks:
            m = len(block)
            entry = QQ(2, m)
            for u in block:
                for v in block:
                    rows[u][v] = entry - QQ.one if u == v else entry
        return DomainMatrix(rows, (self.n, self.n), QQ)

    def block_order(self) -> List[int]:
        """Identity vertices first, then each block in turn."""
        in_block = {v for block in self.blocks for v in block}
        return [v for v in range(self.n) if v not in in_block] + [v for b in self.blocks for v in b]

    def block_form(self) -> DomainMatrix:
        """The matrix with rows and columns in ``block_order``."""
        order = self.block_order()
        full = self.matrix().to_list()
        return DomainMatrix(
            [[full[u][v] for v in order] for u in order], (self.n, self.n), QQ
        )


def build_similarity(c: SwitchConfig, n: Optional[int] = None) -> SimilarityMatrix:
    size = c.order if n is None else n
    return SimilarityMatrix(size, tuple(tuple(sorted(p)) for p in c.parts))


def _level_check(k: int, s: DomainMatrix, m1: DomainMatrix, m2: DomainMatrix) -> LevelCheck:
    left = s * m1
    right = m2 * s
    if mat_equal(left, right):
        return LevelCheck(level=k, passed=True)
    return LevelCheck(level=k, passed=False, first_difference=first_difference(left, right))


def certify_similarity(
    g1: Graph,
    g2: Graph,
    s: Union[SimilarityMatrix, DomainMatrix],
    levels: Optional[Tuple[DistanceLevels, DistanceLevels]] = None,
) -> SimilarityCertificate:
    """Check S * M_k(g1) = M_k(g2) * S for every distance level k.

    Equality at every level means S conjugates D_f(g1) onto D_f(g2) for every
    f at once. For an involutive S this is the statement S M_k S = M_k'.
    """
    if g1.n != g2.n:
        raise SizeMismatchError(f"graphs have {g1.n} and {g2.n} vertices")
    blocks: List[List[int]] = []
    if isinstance(s, SimilarityMatrix):
        blocks = [list(b) for b in s.blocks]
        s = s.matrix()
    if s.shape != (g1.n, g1.n):
        raise SizeMismatchError(f"similarity matrix {s.shape} does not fit {g1.n} vertices")
    s = s.convert_to(QQ)
    lv1, lv2 = levels or (level_decomposition(g1), level_decomposition(g2))
    top = max(lv1.d, lv2.d)
    checks = [_level_check(k, s, lv1.matrix(k, QQ), lv2.matrix(k, QQ)) for k in range(top + 1)]
    infinite = None
    if not (lv1.connected and lv2.connected):
        infinite = _level_check(-1, s, lv1.matrix(-1, QQ), lv2.matrix(-1, QQ))
    cert = SimilarityCertificate(n=g1.n, diameter=top, blocks=blocks, levels=checks, infinite_level=infinite)
    if cert.passed:
        logger.debug(f"similarity certified on levels 0..{top}")
    else:
        bad = cert.failing_level
        logger.debug(f"similarity fails at level {bad.level if bad else '?'}")
    return cert


def certify_pair(g1: Graph, g2: Graph, c: SwitchConfig) -> SimilarityCertificate:
    """Certificate for a switched pair, using the block similarity of ``c``."""
    if g1.n != g2.n:
        raise SizeMismatchError(f"graphs have {g1.n} and {g2.n} vertices")
    if c.order != g1.n:
        raise ConfigPartitionError(f"configuration covers {c.order} vertices, graphs have {g1.n}")
    return certify_similarity(g1, g2, build_similarity(c, g1.n))


# ---------------------------------------------------------------------------
# Coalescing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoalescedPair:
    h1: Graph
    h2: Graph
    similarity: SimilarityMatrix
    certificate: SimilarityCertificate
    charpolys_equal: bool


def coalesce_on_part(
    g1: Graph,
    g2: Graph,
    c: SwitchConfig,
    part: int,
    h: Graph,
    root: int,
    check_charpoly: bool = True,
) -> CoalescedPair:
    """Glue a copy of rooted ``h`` onto every vertex of part ``part`` in both graphs.

    Copies are appended part vertex by part vertex. The copies of one non-root
    vertex of ``h`` form an extra S-hat block, so the copies follow their roots
    through the similarity.

    Args:
        g1: First graph of a certified pair.
        g2: Its switched mate, same vertex order.
        c: Configuration relating the two.
        part: 0-based part index.
        h: Connected rooted graph.
        root: Root vertex of ``h``.
        check_charpoly: Also compare the exact char polys over ZZ[q].

    Returns:
        CoalescedPair: Both glued graphs, the extended similarity and its certificate.
    """
    from dist_cospectra.qanalysis import charpoly_q

    if not 0 <= part < len(c.parts):
        raise ConfigPartitionError(f"part index {part + 1} is outside 1..{len(c.parts)}")
    h.check_vertex(root)
    if not is_connected(h):
        raise DisconnectedGraphError("the glued graph must be connected")

    h1, h2 = g1, g2
    layers: Dict[int, List[int]] = {u: [] for u in range(h.n) if u != root}
    for a in c.parts[part]:
        base = h1.n
        h1 = coalesce(h1, a, h, root)
        h2 = coalesce(h2, a, h, root)
        label = base
        for u in range(h.n):
            if u != root:
                layers[u].append(label)
                label += 1

    blocks = tuple(tuple(sorted(p)) for p in c.parts) + tuple(tuple(v) for _, v in sorted(layers.items()))
    sim = SimilarityMatrix(h1.n, blocks)
    cert = certify_similarity(h1, h2, sim)
    equal = True
    if check_charpoly:
        equal = charpoly_q(h1) == charpoly_q(h2)
    logger.info(
        f"coalesced {h.n}-vertex graph onto part A{part + 1}: "
        f"{h1.n} vertices, certificate {'passes' if cert.passed else 'fails'}"
    )
    return CoalescedPair(h1, h2, sim, cert, equal)


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def _random_tree(rng: random.Random, size: int) -> List[Tuple[int, int]]:
    return [(rng.randrange(v), v) for v in range(1, size)]


def random_switch_instance(
    rng: random.Random,
    part_sizes: Sequence[int] = (2, 4, 6),
    max_components: int = 3,
    max_component_size: int = 3,
    extra_probability: float = 0.3,
) -> Tuple[Graph, SwitchConfig]:
    """A random connected graph with a valid switching configuration.

    One or two parts (two parts are completely joined), each a random regular
    graph of degree at least half its size; B-components are random trees
    whose vertices attach to none, all, or the component's half-set. Edges
    between half- or all-attached vertices of different components of one
    part are added at random as extra edges.
    """
    while True:
        m = rng.choice([1, 2])
        sizes = [rng.choice(list(part_sizes)) for _ in range(m)]
        edges: List[Tuple[int, int]] = []
        parts: List[List[int]] = []
        nxt = 0
        for size in sizes:
            pool = [gr for d in range(size // 2, size) for gr in regular_graphs(size, d)]
            pick = rng.choice(pool)
            verts = list(range(nxt, nxt + size))
            edges += [(verts[u], verts[v]) for u, v in pick.edges()]
            parts.append(verts)
            nxt += size
        if m == 2:
            edges += [(a, b) for a in parts[0] for b in parts[1]]

        comps: List[BComponent] = []
        attached: Dict[int, int] = {}
        for _ in range(rng.randint(1, max_components)):
            size = rng.randint(1, max_component_size)
            verts = list(range(nxt, nxt + size))
            nxt += size
            edges += [(verts[u], verts[v]) for u, v in _random_tree(rng, size)]
            pi = rng.randrange(m)
            part = parts[pi]
            half = sorted(rng.sample(part, len(part) // 2))
            used_half = False
            for b in verts:
                kind = rng.choice(["none", "all", "half"])
                if kind == "all":
                    edges += [(b, a) for a in part]
                    attached[b] = pi
                elif kind == "half":
                    edges += [(b, a) for a in half]
                    attached[b] = pi
                    used_half = True
            comps.append(BComponent(vertices=verts, part=pi, half=half if used_half else None))

        extra = []
        owner = {b: ci for ci, comp in enumerate(comps) for b in comp.vertices}
        candidates = sorted(attached)
        for i, u in enumerate(candidates):
            for v in candidates[i + 1:]:
                if owner[u] != owner[v] and attached[u] == attached[v] and rng.random() < extra_probability:
                    extra.append((u, v))
        edges += extra

        g = Graph.from_edges(nxt, edges)
        if not is_connected(g):
            continue
        config = SwitchConfig(parts=parts, components=comps, extra_edges=extra)
        perm = list(range(nxt))
        rng.shuffle(perm)
        return g.relabel(perm), config.relabeled(perm)
