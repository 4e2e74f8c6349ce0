"""Pydantic models for configurations, certificates and reports.

Vertex indices inside models are 0-based; text forms use 1-based labels.
"""

from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, validator

from dist_cospectra.algebra import DEFAULT_PRIME, generic_rational, to_fraction

DEFAULT_SEED = 20240601

Edge = Tuple[int, int]


class BComponent(BaseModel):
    """One B-component: its vertices, the index of its part, and its half-set."""

    vertices: List[int]
    part: int = 0
    half: Optional[List[int]] = None

    @validator("vertices")
    def _nonempty(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("a B-component needs at least one vertex")
        return sorted(v)

    @validator("half")
    def _sorted_half(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        return None if v is None else sorted(v)


class SwitchConfig(BaseModel):
    """Partition data of a switching instance."""

    parts: List[List[int]]
    components: List[BComponent] = Field(default_factory=list)
    extra_edges: List[Edge] = Field(default_factory=list)

    @validator("parts")
    def _sorted_parts(cls, v: List[List[int]]) -> List[List[int]]:
        if any(not part for part in v):
            raise ValueError("parts must be nonempty")
        return [sorted(part) for part in v]

    @validator("extra_edges")
    def _ordered_edges(cls, v: List[Edge]) -> List[Edge]:
        return sorted((a, b) if a < b else (b, a) for a, b in v)

    def a_vertices(self) -> List[int]:
        return sorted(v for part in self.parts for v in part)

    def b_vertices(self) -> List[int]:
        return sorted(v for comp in self.components for v in comp.vertices)

    @property
    def order(self) -> int:
        return len(self.a_vertices()) + len(self.b_vertices())

    def complemented(self) -> "SwitchConfig":
        """The same partition with every half-set replaced by its complement."""
        comps = []
        for comp in self.components:
            half = None
            if comp.half is not None:
                part = self.parts[comp.part]
                half = [a for a in part if a not in comp.half]
            comps.append(BComponent(vertices=comp.vertices, part=comp.part, half=half))
        return SwitchConfig(parts=self.parts, components=comps, extra_edges=self.extra_edges)

    def relabeled(self, perm: List[int]) -> "SwitchConfig":
        """Rename vertex ``v`` to ``perm[v]`` throughout."""
        return SwitchConfig(
            parts=[[perm[v] for v in part] for part in self.parts],
            components=[
                BComponent(
                    vertices=[perm[v] for v in comp.vertices],
                    part=comp.part,
                    half=None if comp.half is None else [perm[v] for v in comp.half],
                )
                for comp in self.components
            ],
            extra_edges=[(perm[a], perm[b]) for a, b in self.extra_edges],
        )


class Violation(BaseModel):
    code: str
    message: str
    soft: bool = False


class ValidationReport(BaseModel):
    violations: List[Violation] = Field(default_factory=list)

    @property
    def hard(self) -> List[Violation]:
        return [v for v in self.violations if not v.soft]

    @property
    def ok(self) -> bool:
        return not self.hard

    def codes(self) -> List[str]:
        return [v.code for v in self.violations]


class LevelCheck(BaseModel):
    level: int
    passed: bool
    first_difference: Optional[Tuple[int, int]] = None


class SimilarityCertificate(BaseModel):
    """Per-level record of S * M_k(G1) = M_k(G2) * S."""

    n: int
    diameter: int
    blocks: List[List[int]]
    levels: List[LevelCheck]
    infinite_level: Optional[LevelCheck] = None

    @property
    def passed(self) -> bool:
        checks = self.levels + ([self.infinite_level] if self.infinite_level else [])
        return all(c.passed for c in checks)

    @property
    def failing_level(self) -> Optional[LevelCheck]:
        for check in self.levels:
            if not check.passed:
                return check
        if self.infinite_level and not self.infinite_level.passed:
            return self.infinite_level
        return None


class SearchBudget(BaseModel):
    max_parts: int = 2
    part_sizes: Tuple[int, ...] = (2, 4, 6, 8)
    time_ms: int = 60000
    max_candidates: Optional[int] = None
    allow_cross_part: bool = False

    @validator("part_sizes")
    def _even_sizes(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(s <= 0 or s % 2 for s in v):
            raise ValueError("part sizes must be positive and even")
        return tuple(sorted(set(v)))


class MatchResult(BaseModel):
    """Outcome of a construction search for one pair."""

    config: Optional[SwitchConfig] = None
    config_text: Optional[str] = None
    orientation: Optional[str] = None
    candidates: int = 0
    elapsed_ms: float = 0.0
    exhausted: bool = False

    @property
    def found(self) -> bool:
        return self.config is not None


class PairReport(BaseModel):
    """One confirmed cospectral pair of the survey, keyed by canonical graph6."""

    first: str
    second: str
    dq_all_q: bool
    df: bool
    dq_at: List[str] = Field(default_factory=list)
    construction: bool = False
    config_text: Optional[str] = None
    orientation: Optional[str] = None
    search_ms: float = 0.0
    budget_exhausted: bool = False


class Table1Row(BaseModel):
    n: int
    graphs: int
    dq_pairs: int
    df_pairs: int
    construction_pairs: int
    construction_pct_of_dq: int
    construction_pct_of_df: int


class SurveySettings(BaseModel):
    n: Optional[int] = None
    source: str = "internal"
    seed: int = DEFAULT_SEED
    prime: int = DEFAULT_PRIME
    samples: int = 3
    budget: SearchBudget = Field(default_factory=SearchBudget)
    workers: int = 1
    out_dir: Optional[str] = None
    extra_q: Tuple[str, ...] = ()

    @validator("samples")
    def _positive_samples(cls, v: int) -> int:
        if v < 1:
            raise ValueError("at least one fingerprint sample is required")
        return v

    @validator("workers")
    def _positive_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError("workers must be at least 1")
        return v

    @validator("extra_q")
    def _extra_points(cls, v: Tuple[str, ...], values: Dict[str, Any]) -> Tuple[str, ...]:
        points: List[str] = []
        for text in v:
            if text == "generic":
                q = generic_rational(values.get("seed", DEFAULT_SEED))
            else:
                try:
                    q = to_fraction(text)
                except ZeroDivisionError:
                    raise ValueError(f"bad q value {text!r}")
            if q in (Fraction(0), Fraction(1)):
                raise ValueError("at q = 0 and q = 1 every pair of connected graphs is cospectral")
            if str(q) not in points:
                points.append(str(q))
        return tuple(points)


class SurveySummary(BaseModel):
    """Byte-reproducible survey summary; timings live in the run ledger."""

    row: Table1Row
    source: str
    input_sha256: Optional[str] = None
    seed: int
    prime: int
    samples: int
    extra_q: List[str] = Field(default_factory=list)
    budget: Dict[str, object]
    assumptions: Dict[str, str]
    fingerprint_collisions: int
    budget_exhausted_pairs: int


class FamilyVerdict(BaseModel):
    """Checks on one member of a q = 1/2 family."""

    family: str
    n: int
    non_isomorphic: bool
    cospectral_at_half: bool
    unit_interval_roots: List[str]
    only_half: bool
    closed_form_h: bool
    closed_form_g: bool

    @property
    def passed(self) -> bool:
        return all(
            (
                self.non_isomorphic,
                self.cospectral_at_half,
                self.only_half,
                self.closed_form_h,
                self.closed_form_g,
            )
        )
