"""Run logging for surveys and long verifications.

A RunLogger routes loguru output to a rotating log file and the console, and
gives the survey pipeline one method per milestone so every run leaves a
readable trail (including timings, which never enter the report files).
"""

import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from loguru import logger


class RunLogger:
    """Loguru sinks plus milestone messages for one run."""

    def __init__(self, log_path: Optional[str] = None, console_level: str = "INFO"):
        """Initialize the run logger.

        Args:
            log_path: Optional custom path for the log file. Defaults to a
                timestamped file under ``~/.dist_cospectra/logs``.
            console_level: Minimum level echoed to the console.
        """
        if log_path is None:
            log_dir = Path.home() / ".dist_cospectra" / "logs"
            log_dir.mkdir(parents=True, exist_ok=True)
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            log_path = str(log_dir / f"run_{timestamp}.log")

        logger.remove()
        logger.add(
            log_path,
            format="{time:YYYY-MM-DD HH:mm:ss.SSS} | {level} | {message}",
            rotation="10 MB",
            retention="1 month",
            level="DEBUG",
        )
        logger.add(
            lambda msg: print(msg, end=""),
            format="<level>{level}</level>: {message}",
            level=console_level,
        )

        self.log_path = log_path
        logger.info(f"Run logging initialized at {log_path}")

    def log_survey_start(self, source: str, n: Optional[int], settings: Dict[str, Any]) -> None:
        """Log the start of a survey.

        Args:
            source: ``internal`` or the graph6 file path
            n: Vertex count, if known up front
            settings: Survey settings as a plain dict
        """
        logger.info(f"Starting survey of {source} (n={n})")
        logger.debug(f"Survey settings: {json.dumps(settings, sort_keys=True, default=str)}")

    def log_fingerprints(self, graphs: int, samples: int, seconds: float) -> None:
        logger.info(f"Fingerprinted {graphs} graphs at {samples} sample points in {seconds:.2f}s")

    def log_buckets(self, buckets: int, largest: int) -> None:
        logger.info(f"{buckets} fingerprint buckets with more than one graph (largest {largest})")

    def log_collision(self, first: str, second: str) -> None:
        """Equal fingerprints with unequal exact polynomials; harmless but recorded."""
        logger.warning(f"Fingerprint collision between {first} and {second}")

    def log_pair(self, first: str, second: str, dq_all_q: bool, df: bool) -> None:
        logger.debug(f"Cospectral pair {first} / {second}: dq_all_q={dq_all_q} df={df}")

    def log_match(self, first: str, second: str, found: bool, elapsed_ms: float) -> None:
        """Log a construction search.

        Args:
            first: Canonical graph6 of the first graph
            second: Canonical graph6 of the second graph
            found: Whether a configuration was found
            elapsed_ms: Search time in milliseconds
        """
        verdict = "construction found" if found else "no construction"
        logger.debug(f"{first} / {second}: {verdict} in {elapsed_ms:.1f} ms")

    def log_report(self, output_dir: str) -> None:
        logger.info(f"Report written to {output_dir}")

    def log_survey_complete(self, row: Dict[str, Any], seconds: float) -> None:
        """Log the completion of a survey.

        Args:
            row: The finished table row
            seconds: Wall time of the whole pipeline
        """
        logger.info(f"Survey complete in {seconds:.2f}s")
        logger.info(
            f"n={row['n']}: {row['dq_pairs']} D_q pairs, {row['df_pairs']} D_f pairs, "
            f"{row['construction_pairs']} following the construction"
        )

    def log_error(self, operation: str, error: Exception) -> None:
        """Log an error during an operation.

        Args:
            operation: The operation during which the error occurred
            error: The error that occurred
        """
        logger.error(f"Error during {operation}: {str(error)}")
        logger.exception(error)

    def get_log_path(self) -> str:
        return self.log_path
