"""Survey of cospectral pairs among all connected graphs on n vertices.

Pipeline: canonicalize the source graphs and reject duplicate classes,
fingerprint each graph by its D_q char poly mod a prime at a few random q,
bucket equal fingerprints, confirm pairs exactly inside buckets (all-q D_q
by equal polynomials over ZZ[q], D_f by equal polynomials over ZZ[t0..tD]),
then search each D_f pair for a switching configuration. Listed extra q
values add the pairs cospectral at one of them to the D_q column. Output
files are a pure function of the graphs, the seed and the budget.
"""

import csv
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from dist_cospectra.algebra import modular_charpoly, residue_mod, to_fraction
from dist_cospectra.audit import RunLogger
from dist_cospectra.canon import CanonicalForm, canonical_form
from dist_cospectra.distance import exp_distance_mod
from dist_cospectra.enumerate import enumerate_connected
from dist_cospectra.errors import (
    DisconnectedGraphError,
    DuplicateClassError,
    InputError,
    SizeMismatchError,
)
from dist_cospectra.graph import Graph, is_connected
from dist_cospectra.inputs import InputLoader
from dist_cospectra.matching import match_construction
from dist_cospectra.models import PairReport, SurveySettings, SurveySummary, Table1Row
from dist_cospectra.qanalysis import charpoly_at, charpoly_q, cospectral_generalized
from dist_cospectra.storage import SurveyStorage

Fingerprint = Tuple[Tuple[int, ...], ...]

ASSUMPTIONS = {
    "dq_column": "cospectral for all q (char polys equal over Z[q])",
    "graphs": "connected graphs only, one per isomorphism class",
    "pairs": "unordered pairs of non-isomorphic graphs",
    "construction": "searched on D_f-cospectral pairs only",
}


def assumptions(extra_q: Sequence[str] = ()) -> Dict[str, str]:
    """The readings a survey row depends on, as recorded in its summary."""
    found = dict(ASSUMPTIONS)
    if extra_q:
        found["dq_column"] += f", or cospectral at q in {{{', '.join(extra_q)}}}"
    return found


CSV_HEADER = [
    "first", "second", "dq_all_q", "dq_at", "df", "construction", "orientation", "config"
]


@dataclass(frozen=True)
class SurveyRecord:
    """A surveyed graph: its canonical form and modular fingerprint."""

    canonical: CanonicalForm
    fingerprint: Fingerprint

    def to_dict(self) -> Dict[str, Any]:
        return {"graph6": self.canonical.graph6, "fingerprint": [list(f) for f in self.fingerprint]}


@dataclass
class SurveyResult:
    summary: SurveySummary
    pairs: List[PairReport]
    records: List[SurveyRecord]
    elapsed_seconds: float

    @property
    def row(self) -> Table1Row:
        return self.summary.row


def sample_points(seed: int, samples: int, p: int) -> List[int]:
    """The q values (mod p) fingerprints are evaluated at."""
    rng = random.Random(seed)
    return [rng.randrange(2, p) for _ in range(samples)]


def fingerprint(g: Graph, points: Sequence[int], p: int) -> Fingerprint:
    """Char-poly coefficients of D_q mod p at each sample point.

    Graphs with equal char polys over ZZ[q] always get equal fingerprints.
    """
    return tuple(tuple(modular_charpoly(exp_distance_mod(g, r, p), p)) for r in points)


def fingerprint_all(
    graphs: Sequence[Graph], points: Sequence[int], p: int, workers: int = 1
) -> List[Fingerprint]:
    """Fingerprints in input order, computed in worker processes when asked."""
    job = partial(fingerprint, points=tuple(points), p=p)
    if workers <= 1 or len(graphs) < 2 * workers:
        return [job(g) for g in graphs]
    chunk = max(1, len(graphs) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(job, graphs, chunksize=chunk))


def canonical_records(graphs: Sequence[Graph]) -> List[CanonicalForm]:
    """Canonical forms of a connected, duplicate-free graph list, sorted.

    Raises:
        DisconnectedGraphError: A graph has more than one component.
        DuplicateClassError: Two graphs are isomorphic.
    """
    seen: Dict[CanonicalForm, int] = {}
    for i, g in enumerate(graphs):
        if not is_connected(g):
            raise DisconnectedGraphError(f"graph #{i + 1} is disconnected; surveys cover connected graphs")
        cf = canonical_form(g)
        if cf in seen:
            raise DuplicateClassError(
                f"graphs #{seen[cf] + 1} and #{i + 1} are isomorphic ({cf.graph6})"
            )
        seen[cf] = i
    return sorted(seen)


def buckets(records: Sequence[SurveyRecord]) -> List[List[SurveyRecord]]:
    """Groups of two or more records sharing a fingerprint, in canonical order."""
    groups: Dict[Fingerprint, List[SurveyRecord]] = {}
    for record in records:
        groups.setdefault(record.fingerprint, []).append(record)
    found = [sorted(g, key=lambda r: r.canonical) for g in groups.values() if len(g) > 1]
    return sorted(found, key=lambda g: g[0].canonical)


def _poly_key(g: Graph) -> Tuple[Any, ...]:
    return tuple(charpoly_q(g).terms())


def percent(part: int, whole: int) -> int:
    """Rounded percentage, halves rounded up; 0 when ``whole`` is 0."""
    if whole == 0:
        return 0
    return (200 * part + whole) // (2 * whole)


def table_row(n: int, graphs: int, pairs: Sequence[PairReport]) -> Table1Row:
    dq = sum(1 for p in pairs if p.dq_all_q or p.dq_at)
    df = sum(1 for p in pairs if p.df)
    built = sum(1 for p in pairs if p.construction)
    return Table1Row(
        n=n,
        graphs=graphs,
        dq_pairs=dq,
        df_pairs=df,
        construction_pairs=built,
        construction_pct_of_dq=percent(built, dq),
        construction_pct_of_df=percent(built, df),
    )


class CospectralSurvey:
    """Runs the survey pipeline and records it in the run log and ledger."""

    def __init__(
        self,
        audit_logger: Optional[RunLogger] = None,
        storage: Optional[SurveyStorage] = None,
        loader: Optional[InputLoader] = None,
    ):
        """Initialize the survey.

        Args:
            audit_logger: Optional run logger to use
            storage: Optional result ledger to use
            loader: Optional input loader for graph6 sources
        """
        self.audit_logger = audit_logger or RunLogger()
        self.storage = storage or SurveyStorage()
        self.loader = loader or InputLoader()
        logger.debug("CospectralSurvey initialized")

    def load_source(self, settings: SurveySettings) -> Tuple[int, List[Graph], Optional[str]]:
        """The vertex count, the graphs and the input checksum (None when enumerated)."""
        if settings.source == "internal":
            if settings.n is None:
                raise InputError("internal enumeration needs n")
            return settings.n, list(enumerate_connected(settings.n)), None
        graphs, checksum = self.loader.load_graphs(settings.source)
        orders = {g.n for g in graphs}
        if len(orders) > 1:
            raise SizeMismatchError(f"graph6 file mixes vertex counts {sorted(orders)}")
        n = orders.pop() if orders else settings.n
        if n is None:
            raise InputError("empty graph6 file and no n given")
        if settings.n is not None and settings.n != n:
            raise SizeMismatchError(f"expected graphs on {settings.n} vertices, file has {n}")
        return n, graphs, checksum

    def confirm(
        self, group: Sequence[SurveyRecord]
    ) -> Tuple[List[Tuple[SurveyRecord, SurveyRecord, bool]], int]:
        """Exact check inside one fingerprint bucket.

        Returns:
            The all-q D_q pairs with their D_f verdicts, and the number of
            fingerprint collisions (equal fingerprints, unequal polynomials).
        """
        classes: Dict[Tuple[Any, ...], List[SurveyRecord]] = {}
        for record in group:
            classes.setdefault(_poly_key(record.canonical.graph()), []).append(record)
        members = list(classes.values())
        collisions = 0
        for a, b in combinations(members, 2):
            collisions += len(a) * len(b)
            self.audit_logger.log_collision(a[0].canonical.graph6, b[0].canonical.graph6)
        confirmed = []
        for members_of_class in members:
            for first, second in combinations(members_of_class, 2):
                df = cospectral_generalized(first.canonical.graph(), second.canonical.graph())
                self.audit_logger.log_pair(first.canonical.graph6, second.canonical.graph6, True, df)
                confirmed.append((first, second, df))
        return confirmed, collisions

    def confirm_at(
        self, group: Sequence[SurveyRecord], q: Fraction
    ) -> List[Tuple[SurveyRecord, SurveyRecord]]:
        """Pairs inside one bucket whose D_q char polys agree at ``q`` exactly."""
        classes: Dict[Tuple[Any, ...], List[SurveyRecord]] = {}
        for record in group:
            key = tuple(charpoly_at(record.canonical.graph(), q).all_coeffs())
            classes.setdefault(key, []).append(record)
        return [pair for members in classes.values() for pair in combinations(members, 2)]

    def add_single_q_pairs(
        self,
        records: Sequence[SurveyRecord],
        pairs: List[PairReport],
        settings: SurveySettings,
    ) -> List[PairReport]:
        """Extend the all-q pairs by the pairs cospectral at one of ``settings.extra_q``.

        Pairs found only this way are neither all-q nor D_f pairs, so no
        construction is searched for them.
        """
        by_key = {(p.first, p.second): p for p in pairs}
        graphs = [r.canonical.graph() for r in records]
        for text in settings.extra_q:
            q = to_fraction(text)
            point = residue_mod(q, settings.prime)
            prints = fingerprint_all(graphs, [point], settings.prime, settings.workers)
            groups = buckets([SurveyRecord(r.canonical, fp) for r, fp in zip(records, prints)])
            for group in groups:
                for first, second in self.confirm_at(group, q):
                    key = (first.canonical.graph6, second.canonical.graph6)
                    report = by_key.get(key)
                    if report is None:
                        report = PairReport(first=key[0], second=key[1], dq_all_q=False, df=False)
                        by_key[key] = report
                        self.audit_logger.log_pair(key[0], key[1], False, False)
                    if not report.dq_all_q:
                        report.dq_at.append(text)
            logger.debug(f"single-q pass at q = {text}: {len(groups)} buckets")
        return sorted(by_key.values(), key=lambda p: (p.first, p.second))

    def _match(
        self, first: SurveyRecord, second: SurveyRecord, df: bool, settings: SurveySettings
    ) -> PairReport:
        report = PairReport(
            first=first.canonical.graph6, second=second.canonical.graph6, dq_all_q=True, df=df
        )
        if not df:
            return report
        result = match_construction(first.canonical.graph(), second.canonical.graph(), settings.budget)
        self.audit_logger.log_match(report.first, report.second, result.found, result.elapsed_ms)
        report.construction = result.found
        report.config_text = result.config_text
        report.orientation = result.orientation
        report.search_ms = result.elapsed_ms
        report.budget_exhausted = result.exhausted
        return report

    def run(self, settings: SurveySettings) -> SurveyResult:
        """Run the full survey.

        Args:
            settings: Source, seed, prime, sample count, budget and workers

        Returns:
            SurveyResult: Summary, pair reports and per-graph records
        """
        start_time = time.time()
        self.audit_logger.log_survey_start(settings.source, settings.n, settings.dict())
        try:
            n, graphs, checksum = self.load_source(settings)
            forms = canonical_records(graphs)

            points = sample_points(settings.seed, settings.samples, settings.prime)
            t0 = time.time()
            prints = fingerprint_all([cf.graph() for cf in forms], points, settings.prime, settings.workers)
            self.audit_logger.log_fingerprints(len(forms), len(points), time.time() - t0)
            records = [SurveyRecord(cf, fp) for cf, fp in zip(forms, prints)]

            groups = buckets(records)
            self.audit_logger.log_buckets(len(groups), max((len(g) for g in groups), default=0))

            pairs: List[PairReport] = []
            collisions = 0
            for group in groups:
                confirmed, clashes = self.confirm(group)
                collisions += clashes
                pairs.extend(self._match(a, b, df, settings) for a, b, df in confirmed)
            pairs.sort(key=lambda p: (p.first, p.second))
            if settings.extra_q:
                pairs = self.add_single_q_pairs(records, pairs, settings)

            row = table_row(n, len(forms), pairs)
            summary = SurveySummary(
                row=row,
                source="internal" if checksum is None else Path(settings.source).name,
                input_sha256=checksum,
                seed=settings.seed,
                prime=settings.prime,
                samples=settings.samples,
                extra_q=list(settings.extra_q),
                budget=settings.budget.dict(),
                assumptions=assumptions(settings.extra_q),
                fingerprint_collisions=collisions,
                budget_exhausted_pairs=sum(1 for p in pairs if p.budget_exhausted),
            )
            elapsed = time.time() - start_time
            result = SurveyResult(summary, pairs, records, elapsed)

            survey_id = self.storage.store_survey(
                json.loads(summary.json()), elapsed, self.audit_logger.get_log_path()
            )
            self.storage.store_records(survey_id, [r.to_dict() for r in records])
            self.storage.store_pairs(survey_id, [p.dict() for p in pairs])

            self.audit_logger.log_survey_complete(row.dict(), elapsed)
            return result
        except Exception as e:
            self.audit_logger.log_error("survey", e)
            raise


def run_survey(settings: SurveySettings, survey: Optional[CospectralSurvey] = None) -> Table1Row:
    return (survey or CospectralSurvey()).run(settings).row


def emit_report(result: SurveyResult, output_dir: str) -> Dict[str, str]:
    """Write ``summary.json`` and ``pairs.csv``; both are byte-reproducible.

    Args:
        result: A finished survey
        output_dir: Directory for the two files, created if missing

    Returns:
        Dict[str, str]: Paths of the written files
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_path = out / "summary.json"
    pairs_path = out / "pairs.csv"

    with open(summary_path, "w") as f:
        f.write(json.dumps(json.loads(result.summary.json()), indent=2, sort_keys=True))
        f.write("\n")

    with open(pairs_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p in sorted(result.pairs, key=lambda p: (p.first, p.second)):
            writer.writerow(
                [
                    p.first,
                    p.second,
                    str(p.dq_all_q).lower(),
                    ";".join(p.dq_at),
                    str(p.df).lower(),
                    str(p.construction).lower(),
                    p.orientation or "",
                    p.config_text or "",
                ]
            )
    return {"summary": str(summary_path), "pairs": str(pairs_path)}
