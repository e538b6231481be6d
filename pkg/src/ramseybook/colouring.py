"""Edge colourings of complete graphs, with bitset neighbourhoods.

A colouring stores the colour of each unordered pair once (upper triangle,
row-major) and additionally caches, for every colour ``i`` and vertex ``v``,
the neighbourhood ``N_i(v)`` as an int bitmask, so codegree queries cost one
``&`` and one popcount.

Vertex sets throughout the package are plain Python ints used as bitmasks
over ``[0, n)``; the small helpers for building and unpacking them live here.
"""

from __future__ import annotations

import hashlib
import random

from .errors import (
    InvalidBook,
    InvalidColour,
    InvalidInput,
    InvalidPair,
    InvalidVertex,
    ParseError,
)

MAX_COLOURS = 64


def full_mask(n: int) -> int:
    """Bitmask of all vertices 0..n-1."""
    return (1 << n) - 1


def mask_of(vertices) -> int:
    """Bitmask with exactly the given vertices set."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_vertices(mask: int):
    """Yield the members of a bitmask in ascending order."""
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def vertex_list(mask: int) -> list[int]:
    return list(iter_vertices(mask))


def pair_index(n: int, u: int, v: int) -> int:
    """Index of the unordered pair {u, v} (u < v required) in row-major order."""
    return u * n - (u * (u + 1)) // 2 + (v - u - 1)


class EdgeColouring:
    """An r-colouring of the edges of the complete graph on n vertices.

    Immutable after construction; all queries are safe for concurrent readers.
    """

    __slots__ = ("n", "r", "_tri", "_neigh")

    def __init__(self, n: int, r: int, triangle):
        if n < 1:
            raise InvalidInput(f"need at least one vertex, got n={n}")
        if not 1 <= r <= MAX_COLOURS:
            raise InvalidInput(f"colour count must be in [1, {MAX_COLOURS}], got r={r}")
        tri = bytes(triangle)
        expected = n * (n - 1) // 2
        if len(tri) != expected:
            raise InvalidInput(f"expected {expected} edge colours for n={n}, got {len(tri)}")
        if any(c >= r for c in tri):
            raise InvalidColour(f"edge colour out of range [0, {r})")
        self.n = n
        self.r = r
        self._tri = tri
        neigh = [[0] * n for _ in range(r)]
        idx = 0
        for u in range(n - 1):
            for v in range(u + 1, n):
                c = tri[idx]
                idx += 1
                neigh[c][u] |= 1 << v
                neigh[c][v] |= 1 << u
        self._neigh = neigh

    @property
    def vertices(self) -> int:
        return full_mask(self.n)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InvalidVertex(f"vertex {v} out of range [0, {self.n})")

    def colour(self, u: int, v: int) -> int:
        """Colour of the edge {u, v}; symmetric in its arguments."""
        if u == v:
            raise InvalidPair(f"self-loop {u} has no colour")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise InvalidPair(f"pair ({u}, {v}) out of range [0, {self.n})")
        if u > v:
            u, v = v, u
        return self._tri[pair_index(self.n, u, v)]

    def neighbourhood(self, v: int, i: int) -> int:
        """Bitmask of N_i(v).  The r neighbourhoods of v partition V \\ {v}."""
        self._check_vertex(v)
        if not 0 <= i < self.r:
            raise InvalidColour(f"colour {i} out of range [0, {self.r})")
        return self._neigh[i][v]

    def is_mono_clique(self, subset: int, i: int) -> bool:
        """True iff every pair inside ``subset`` has colour i (vacuous for size <= 1)."""
        if not 0 <= i < self.r:
            raise InvalidColour(f"colour {i} out of range [0, {self.r})")
        if subset >> self.n:
            raise InvalidVertex("subset contains vertices out of range")
        for v in iter_vertices(subset):
            if subset & ~self._neigh[i][v] & ~(1 << v):
                return False
        return True

    def is_mono_book(self, spine: int, pages: int, i: int) -> bool:
        """True iff ``spine`` is an i-clique and every spine-page edge has colour i.

        Edges inside ``pages`` are unconstrained.  Spine and pages must be
        disjoint.
        """
        if spine & pages:
            raise InvalidBook("spine and pages overlap")
        if not self.is_mono_clique(spine, i):
            return False
        for v in iter_vertices(spine):
            if pages & ~self._neigh[i][v]:
                return False
        return True

    def serialize(self) -> str:
        lines = [f"{self.n} {self.r}"]
        idx = 0
        for u in range(self.n - 1):
            row = self._tri[idx : idx + self.n - 1 - u]
            idx += self.n - 1 - u
            lines.append(" ".join(str(c) for c in row))
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.serialize().encode("ascii")).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeColouring):
            return NotImplemented
        return self.n == other.n and self.r == other.r and self._tri == other._tri

    def __hash__(self) -> int:
        return hash((self.n, self.r, self._tri))

    def __repr__(self) -> str:
        return f"EdgeColouring(n={self.n}, r={self.r})"


def from_pair_function(n: int, r: int, colour_of) -> EdgeColouring:
    """Build a colouring from a callable on ordered pairs u < v."""
    tri = bytearray()
    for u in range(n - 1):
        for v in range(u + 1, n):
            tri.append(colour_of(u, v))
    return EdgeColouring(n, r, tri)


def pentagon_colouring() -> EdgeColouring:
    """The C5 fixture: n=5, r=2; pentagon edges {i, i+1 mod 5} colour 0, diagonals colour 1."""
    def col(u, v):
        return 0 if (v - u) % 5 in (1, 4) else 1
    return from_pair_function(5, 2, col)


def random_colouring(n: int, r: int, seed: int) -> EdgeColouring:
    """Each edge gets an i.i.d. uniform colour in [0, r); deterministic in ``seed``."""
    rng = random.Random(seed)
    tri = bytes(rng.randrange(r) for _ in range(n * (n - 1) // 2))
    return EdgeColouring(n, r, tri)


def product_colouring(c1: EdgeColouring, c2: EdgeColouring) -> EdgeColouring:
    """Product construction on vertex pairs (a, b) ~ a*n2 + b.

    The edge {(a,b), (a',b')} gets colour ``c1.colour(a, a')`` when a != a',
    and ``c1.r + c2.colour(b, b')`` otherwise.  A monochromatic clique in a
    first-block colour projects injectively to an equally large clique of c1,
    and likewise for second-block colours and c2.
    """
    n1, n2 = c1.n, c2.n
    if c1.r + c2.r > MAX_COLOURS:
        raise InvalidInput("product would exceed the colour-count cap")

    def col(x, y):
        a, b = divmod(x, n2)
        a2, b2 = divmod(y, n2)
        if a != a2:
            return c1.colour(a, a2)
        return c1.r + c2.colour(b, b2)

    return from_pair_function(n1 * n2, c1.r + c2.r, col)


def parse_colouring(text: str) -> EdgeColouring:
    """Parse the ``.rcg`` text format.  Raises ParseError with the offending line."""
    if not text.endswith("\n"):
        raise ParseError("missing trailing newline")
    lines = text.split("\n")[:-1]
    if not lines:
        raise ParseError("empty input", line=1)
    head = lines[0].split(" ")
    if len(head) != 2:
        raise ParseError("header must be 'n r'", line=1)
    try:
        n, r = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError("header must contain two integers", line=1) from None
    if n < 1 or not 1 <= r <= MAX_COLOURS:
        raise ParseError(f"invalid header values n={n} r={r}", line=1)
    if len(lines) != n:
        raise ParseError(f"expected {n - 1} rows after the header, got {len(lines) - 1}", line=len(lines))
    tri = bytearray()
    for u in range(n - 1):
        lineno = u + 2
        fields = lines[u + 1].split(" ") if lines[u + 1] else []
        if len(fields) != n - 1 - u:
            raise ParseError(f"row {u} must have {n - 1 - u} entries, got {len(fields)}", line=lineno)
        for f in fields:
            try:
                c = int(f)
            except ValueError:
                raise ParseError(f"bad colour value {f!r}", line=lineno) from None
            if not 0 <= c < r:
                raise ParseError(f"colour {c} out of range [0, {r})", line=lineno)
            tri.append(c)
    return EdgeColouring(n, r, tri)


def serialize_colouring(c: EdgeColouring) -> str:
    return c.serialize()
