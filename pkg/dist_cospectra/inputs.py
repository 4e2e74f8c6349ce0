"""File inputs: graphs, switching configurations, similarity matrices, q lists.

Graph files are recognised by extension: ``.g6``/``.graph6`` hold graph6
lines, ``.edges``/``.el``/``.txt`` hold the 1-based edge-list text.
"""

import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Tuple

from loguru import logger
from sympy.polys.matrices import DomainMatrix

from dist_cospectra.algebra import rational_matrix
from dist_cospectra.errors import InputError
from dist_cospectra.graph import Graph, parse_edge_list
from dist_cospectra.graph6 import parse_graph6, parse_graph6_lines
from dist_cospectra.models import SwitchConfig
from dist_cospectra.switching import parse_config

GRAPH6_SUFFIXES = (".g6", ".graph6")
EDGE_LIST_SUFFIXES = (".edges", ".el", ".txt")


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def parse_rationals(text: str) -> List[Fraction]:
    """Comma-separated rationals such as ``"1/3,1/2,2/3"``."""
    values = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        try:
            values.append(Fraction(item))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational number: {item!r}")
    if not values:
        raise InputError("empty list of rational values")
    return values


class InputLoader:
    """Reads and checks the files the command line is pointed at."""

    def validate_file(self, file_path: str) -> Tuple[bool, Dict[str, Any]]:
        """Check that a graph file exists and has a known format.

        Args:
            file_path: Path to a graph file

        Returns:
            Tuple[bool, Dict[str, Any]]: Validation result and details
        """
        if not os.path.exists(file_path):
            return False, {"error": f"File not found: {file_path}"}
        suffix = Path(file_path).suffix.lower()
        if suffix in GRAPH6_SUFFIXES:
            return True, {"format": "graph6"}
        if suffix in EDGE_LIST_SUFFIXES:
            return True, {"format": "edges"}
        return False, {"error": f"Unknown graph file extension {suffix!r}"}

    def _require(self, file_path: str) -> str:
        valid, details = self.validate_file(file_path)
        if not valid:
            raise InputError(details["error"])
        return details["format"]

    def load_graph(self, file_path: str) -> Graph:
        """Load exactly one graph from a graph6 or edge-list file."""
        fmt = self._require(file_path)
        with open(file_path, "r") as f:
            text = f.read()
        if fmt == "edges":
            return parse_edge_list(text)
        lines = [line for line in text.splitlines() if line.strip()]
        if len(lines) != 1:
            raise InputError(f"{file_path} holds {len(lines)} graph6 lines, expected one")
        return parse_graph6(lines[0])

    def load_graphs(self, file_path: str) -> Tuple[List[Graph], str]:
        """Load every graph of a graph6 file together with the file's SHA-256.

        Raises:
            InputError: Missing file, wrong extension or malformed line.
        """
        if self._require(file_path) != "graph6":
            raise InputError(f"graph collections must be graph6 files: {file_path}")
        with open(file_path, "r") as f:
            graphs = list(parse_graph6_lines(f))
        checksum = file_sha256(file_path)
        logger.debug(f"Loaded {len(graphs)} graphs from {file_path} (sha256 {checksum[:12]})")
        return graphs, checksum

    def load_config(self, value: str) -> SwitchConfig:
        """A configuration given inline or as a path to a file holding the text."""
        if os.path.exists(value):
            with open(value, "r") as f:
                value = " ".join(
                    line for line in f.read().splitlines() if not line.lstrip().startswith("#")
                )
        return parse_config(value)

    def load_similarity(self, file_path: str) -> DomainMatrix:
        """Similarity matrix from JSON: a list of rows, or ``{"matrix": rows}``.

        Entries are integers or rational strings such as ``"-1/2"``.
        """
        if not os.path.exists(file_path):
            raise InputError(f"File not found: {file_path}")
        try:
            with open(file_path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"Invalid similarity matrix file: {str(e)}")
        rows = data.get("matrix") if isinstance(data, dict) else data
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise InputError("similarity matrix must be a list of rows")
        try:
            return rational_matrix([[str(v) for v in row] for row in rows])
        except InputError:
            raise
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad similarity matrix entry: {e}")
