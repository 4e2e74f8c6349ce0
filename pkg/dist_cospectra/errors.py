"""Exception hierarchy for dist_cospectra.

Input problems derive from ``InputError`` (also a ``ValueError``), failed
checks from ``VerificationError``. The CLI maps the two families to distinct
exit codes.
"""

from typing import List, Optional


class CospectraError(Exception):
    """Base class for every error raised by this package."""


class InputError(CospectraError, ValueError):
    """Malformed or out-of-range input."""


class GraphError(InputError):
    """A graph violates the simple-graph invariants."""


class VertexIndexError(GraphError):
    """A vertex index is outside 0..n-1."""


class EdgeListError(InputError):
    """Malformed edge-list text."""


class Graph6Error(InputError):
    """Malformed graph6 text."""


class Graph6HeaderError(Graph6Error):
    """The graph6 size header is missing or contains invalid bytes."""


class Graph6LengthError(Graph6Error):
    """The graph6 bit field is truncated or followed by extra data."""


class Graph6RangeError(Graph6Error):
    """The encoded vertex count is outside the supported range."""


class SizeMismatchError(InputError):
    """Two graphs or matrices that must agree in size do not."""


class ShapeMismatchError(SizeMismatchError):
    """Matrix dimensions are incompatible for the requested operation."""


class DisconnectedGraphError(InputError):
    """A connected graph was required."""


class IsomorphismLimitError(InputError):
    """Canonical labeling was requested above the supported vertex count."""


class EnumerationLimitError(InputError):
    """Internal enumeration was requested above the supported vertex count."""


class DuplicateClassError(InputError):
    """A survey source contains two graphs from one isomorphism class."""


class ConfigSyntaxError(InputError):
    """Switching-configuration text could not be parsed."""


class ConfigPartitionError(InputError):
    """Configuration vertex sets do not partition the vertex set."""


class UnknownFamilyError(InputError):
    """An unknown graph family identifier was requested."""


class FamilySizeError(InputError):
    """A family member was requested below its minimal order."""


class VerificationError(CospectraError):
    """An exact check failed."""


class DisconnectedSwitchError(VerificationError):
    """A switch turned a connected graph into a disconnected one."""


class InvalidConfigError(VerificationError):
    """A switching configuration failed validation."""

    def __init__(self, message: str, violations: Optional[List[object]] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class SingularSimilarityError(VerificationError):
    """A proposed similarity matrix is not invertible."""


class FamilyOracleMismatch(VerificationError):
    """A transcribed family graph disagrees with its closed-form polynomial."""


class ZeroPolynomialError(VerificationError):
    """An operation needs a nonzero polynomial."""


class BudgetExhaustedError(CospectraError):
    """A bounded search ran out of time or candidates."""

    def __init__(self, message: str, candidates: int = 0, elapsed_ms: float = 0.0):
        super().__init__(message)
        self.candidates = candidates
        self.elapsed_ms = elapsed_ms
