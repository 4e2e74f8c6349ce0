"""Comparison of survey rows with the published reference counts."""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from loguru import logger

from dist_cospectra.errors import InputError
from dist_cospectra.models import Table1Row

DEFAULT_REFERENCE = str(Path(__file__).parent.parent / "reference" / "table1.json")

COLUMNS = (
    "graphs",
    "dq_pairs",
    "df_pairs",
    "construction_pairs",
    "construction_pct_of_dq",
    "construction_pct_of_df",
)


class SurveyAnalyzer:
    """Checks finished survey rows against the reference table."""

    def __init__(self, reference_path: Optional[str] = None):
        """Initialize the analyzer.

        Args:
            reference_path: Path to the reference table; defaults to the
                bundled ``reference/table1.json``
        """
        self.reference_path = reference_path or DEFAULT_REFERENCE
        self.reference = self._load_reference(self.reference_path)
        logger.debug(f"Survey analyzer initialized with reference file: {self.reference_path}")

    def _load_reference(self, reference_path: str) -> Dict[str, Any]:
        if not os.path.exists(reference_path):
            raise InputError(f"Reference file not found: {reference_path}")
        try:
            with open(reference_path, "r") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"Invalid reference file format: {str(e)}")

    def verify_reference_integrity(self) -> bool:
        """Check that every reference row carries every column as a non-negative int.

        Returns:
            bool: Whether the reference table is well formed
        """
        for key in ("metadata", "rows"):
            if key not in self.reference:
                logger.error(f"Missing required key in reference file: {key}")
                return False
        rows = self.reference["rows"]
        if not isinstance(rows, dict) or not rows:
            logger.error("Reference file has no rows")
            return False
        for n, row in rows.items():
            if not n.isdigit():
                logger.error(f"Row key {n!r} is not a vertex count")
                return False
            for column in COLUMNS:
                value = row.get(column)
                if not isinstance(value, int) or value < 0:
                    logger.error(f"Row n={n} has a bad {column!r}: {value!r}")
                    return False
            if not row["construction_pairs"] <= row["df_pairs"] <= row["dq_pairs"]:
                logger.error(f"Row n={n} violates construction <= D_f <= D_q")
                return False
        return True

    def expected_row(self, n: int) -> Optional[Dict[str, int]]:
        return self.reference["rows"].get(str(n))

    def compare(self, row: Table1Row) -> Dict[str, Any]:
        """Per-column differences (observed minus expected) for one survey row.

        Args:
            row: A finished survey row

        Returns:
            Dict[str, Any]: ``has_reference``, ``matches`` and ``deltas``
        """
        expected = self.expected_row(row.n)
        if expected is None:
            return {"n": row.n, "has_reference": False, "matches": False, "deltas": {}}
        observed = row.dict()
        deltas = {c: observed[c] - expected[c] for c in COLUMNS}
        matches = not any(deltas.values())
        if not matches:
            logger.warning(f"Survey row n={row.n} differs from the reference: {deltas}")
        return {"n": row.n, "has_reference": True, "matches": matches, "deltas": deltas}
