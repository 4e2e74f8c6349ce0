"""graph6 encoding and decoding.

Size header is ``chr(63 + n)`` for n <= 62, otherwise ``~`` followed by three
6-bit groups. The upper triangle follows column by column: x(0,1), x(0,2),
x(1,2), x(0,3), ... packed six bits per byte, zero-padded, each byte + 63.
"""

from typing import Iterable, Iterator, List, Tuple

from dist_cospectra.errors import Graph6HeaderError, Graph6LengthError, Graph6RangeError
from dist_cospectra.graph import MAX_VERTICES, Graph

HEADER = ">>graph6<<"


def _decode_size(data: bytes) -> Tuple[int, int]:
    if not data:
        raise Graph6HeaderError("empty graph6 string")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) < 4:
        raise Graph6HeaderError("truncated long-form size header")
    if data[1] == 126:
        raise Graph6RangeError(f"graph6 sizes above {MAX_VERTICES} vertices are not supported")
    n = 0
    for b in data[1:4]:
        n = (n << 6) | (b - 63)
    return n, 4


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 string into a Graph.

    Raises:
        Graph6HeaderError: Bad prefix or size bytes.
        Graph6LengthError: Bit field truncated or followed by extra bytes.
        Graph6RangeError: Vertex count outside 1..64.
    """
    s = text.strip()
    if s.startswith(HEADER):
        s = s[len(HEADER):]
    if s[:1] in (":", ";", "&"):
        raise Graph6HeaderError(f"not a graph6 string (sparse6 or digraph6 prefix {s[0]!r})")
    try:
        data = s.encode("ascii")
    except UnicodeEncodeError:
        raise Graph6HeaderError("graph6 text must be printable ASCII")
    if any(b < 63 or b > 126 for b in data):
        raise Graph6HeaderError("graph6 bytes must lie in the range 63..126")

    n, offset = _decode_size(data)
    if not 1 <= n <= MAX_VERTICES:
        raise Graph6RangeError(f"vertex count {n} outside 1..{MAX_VERTICES}")

    nbits = n * (n - 1) // 2
    expected = (nbits + 5) // 6
    body = data[offset:]
    if len(body) != expected:
        raise Graph6LengthError(f"expected {expected} data bytes for n={n}, found {len(body)}")

    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = body[k // 6] - 63
            if byte >> (5 - k % 6) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    return Graph(n, tuple(rows))


def emit_graph6(g: Graph) -> str:
    """Encode a Graph as a canonical graph6 string (no header, no newline)."""
    n = g.n
    if n <= 62:
        out: List[int] = [63 + n]
    else:
        out = [126, 63 + (n >> 12 & 63), 63 + (n >> 6 & 63), 63 + (n & 63)]

    acc = 0
    filled = 0
    for j in range(1, n):
        for i in range(j):
            acc = (acc << 1) | (g.adj[i] >> j & 1)
            filled += 1
            if filled == 6:
                out.append(63 + acc)
                acc = 0
                filled = 0
    if filled:
        out.append(63 + (acc << (6 - filled)))
    return bytes(out).decode("ascii")


def parse_graph6_lines(lines: Iterable[str]) -> Iterator[Graph]:
    """Decode a graph6 stream, skipping blank lines."""
    for line in lines:
        if line.strip():
            yield parse_graph6(line)
