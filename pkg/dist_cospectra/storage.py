"""TinyDB ledger of survey runs, per-graph records and confirmed pairs.

Run metadata that would break byte-reproducibility of the report files
(dates, timings, log paths) is kept here instead.
"""

import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger
from tinydb import Query, TinyDB
from tinydb.middlewares import CachingMiddleware
from tinydb.storages import JSONStorage


class SurveyStorage:
    """Storage for survey results using TinyDB."""

    def __init__(self, db_path: Optional[str] = None):
        """Initialize storage with optional custom database path.

        Args:
            db_path: Optional path to the database file. Defaults to
                ``~/.dist_cospectra/surveys.json``.
        """
        if db_path is None:
            data_dir = Path.home() / ".dist_cospectra"
            data_dir.mkdir(exist_ok=True)
            db_path = str(data_dir / "surveys.json")

        logger.debug(f"Initializing TinyDB storage at {db_path}")
        self.db = TinyDB(db_path, storage=CachingMiddleware(JSONStorage))
        self.surveys = self.db.table("surveys")
        self.records = self.db.table("records")
        self.pairs = self.db.table("pairs")

    def store_survey(self, summary: Dict[str, Any], elapsed_seconds: float, log_path: str) -> int:
        """Store one finished survey.

        Args:
            summary: The survey summary as written to summary.json
            elapsed_seconds: Wall time of the run
            log_path: Path of the run log

        Returns:
            int: The inserted document ID
        """
        return self.surveys.insert(
            {
                "run_date": datetime.now().isoformat(),
                "elapsed_seconds": round(elapsed_seconds, 3),
                "log_path": log_path,
                "summary": summary,
            }
        )

    def store_records(self, survey_id: int, records: List[Dict[str, Any]]) -> List[int]:
        """Store per-graph records (canonical graph6 and fingerprint) for a survey."""
        docs = [dict(record, survey_id=survey_id) for record in records]
        return self.records.insert_multiple(docs)

    def store_pairs(self, survey_id: int, pairs: List[Dict[str, Any]]) -> List[int]:
        """Store confirmed pairs, search timings included."""
        docs = [dict(pair, survey_id=survey_id) for pair in pairs]
        return self.pairs.insert_multiple(docs)

    def get_survey(self, survey_id: int) -> Optional[Dict[str, Any]]:
        return self.surveys.get(doc_id=survey_id)

    def get_records_for_survey(self, survey_id: int) -> List[Dict[str, Any]]:
        Record = Query()
        return self.records.search(Record.survey_id == survey_id)

    def get_pairs_for_survey(self, survey_id: int) -> List[Dict[str, Any]]:
        Pair = Query()
        return self.pairs.search(Pair.survey_id == survey_id)

    def export_survey(self, survey_id: int, output_path: str) -> str:
        """Export a survey with its records and pairs to a JSON file.

        Args:
            survey_id: The ID of the survey to export
            output_path: Path where the file should be saved

        Returns:
            str: Path to the exported file
        """
        results = {
            "survey": self.get_survey(survey_id),
            "records": self.get_records_for_survey(survey_id),
            "pairs": self.get_pairs_for_survey(survey_id),
        }
        with open(output_path, "w") as f:
            json.dump(results, f, indent=2)
        return output_path

    def close(self) -> None:
        """Flush the cache to disk and close the database."""
        self.db.close()
