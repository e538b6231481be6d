"""Brute-force reference implementations for small-scale validation.

Everything here returns witnesses, never bare booleans, so a disagreement
with the fast path is immediately debuggable.  Searches are budget-guarded
and raise BudgetExceeded rather than running away.
"""

from __future__ import annotations

from dataclasses import dataclass

from .book_engine import EngineParams, run
from .colouring import EdgeColouring, full_mask, iter_vertices
from .errors import BudgetExceeded, InvalidColour, InvalidInput
from .geometry import moment_double_sum  # re-exported for harness use

__all__ = [
    "SearchBudget",
    "max_mono_clique",
    "best_book",
    "BookSearchResult",
    "ramsey_exhaustive",
    "RamseyResult",
    "validate_book_engine",
    "EngineValidation",
    "moment_double_sum",
]


@dataclass(frozen=True)
class SearchBudget:
    n_cap: int = 256
    k_cap: int = 512
    node_limit: int = 10_000_000

    def __post_init__(self):
        if self.n_cap < 1 or self.k_cap < 1 or self.node_limit < 1:
            raise InvalidInput("budget fields must be positive")


DEFAULT_BUDGET = SearchBudget()


class _NodeCounter:
    __slots__ = ("count", "limit")

    def __init__(self, limit: int):
        self.count = 0
        self.limit = limit

    def tick(self) -> None:
        self.count += 1
        if self.count > self.limit:
            raise BudgetExceeded(f"node limit {self.limit} exceeded")


def max_mono_clique(c: EdgeColouring, colour: int, budget: SearchBudget | None = None,
                    within: int | None = None) -> tuple[int, int]:
    """Exact maximum clique in the colour-`colour` graph, with witness mask.

    Branch and bound on bitsets with a greedy-colouring upper bound.
    ``within`` restricts the search to an induced subgraph.
    """
    if not 0 <= colour < c.r:
        raise InvalidColour(f"colour {colour} out of range [0, {c.r})")
    budget = budget or DEFAULT_BUDGET
    pool = c.vertices if within is None else (within & c.vertices)
    if pool.bit_count() > budget.n_cap:
        raise BudgetExceeded(f"{pool.bit_count()} vertices exceeds n_cap={budget.n_cap}")
    adj = c._neigh[colour]
    nodes = _NodeCounter(budget.node_limit)
    best = {"size": 0, "mask": 0}

    def bound_order(pmask: int) -> list[tuple[int, int]]:
        # greedy independent-set classes; a clique takes at most one per class,
        # so the class index bounds how much the clique can still grow
        order = []
        cls = 0
        left = pmask
        while left:
            cls += 1
            avail = left
            while avail:
                b = avail & -avail
                v = b.bit_length() - 1
                order.append((v, cls))
                left ^= b
                avail = (avail ^ b) & ~adj[v]
        return order

    def expand(rsize: int, rmask: int, pmask: int) -> None:
        nodes.tick()
        if pmask == 0:
            if rsize > best["size"]:
                best["size"] = rsize
                best["mask"] = rmask
            return
        order = bound_order(pmask)
        for v, cls in reversed(order):
            if rsize + cls <= best["size"] or best["size"] >= budget.k_cap:
                return
            bit = 1 << v
            expand(rsize + 1, rmask | bit, pmask & adj[v])
            pmask ^= bit

    if pool:
        expand(0, 0, pool)
    else:
        return 0, 0
    return best["size"], best["mask"]


@dataclass(frozen=True)
class BookSearchResult:
    pages: int           # m_max
    colour: int
    spine: int           # bitmask
    pages_mask: int


def best_book(c: EdgeColouring, t: int, budget: SearchBudget | None = None) -> BookSearchResult | None:
    """Maximise the common neighbourhood over all monochromatic t-cliques.

    Ties break to the smallest colour, then the lexicographically smallest
    spine.  Returns None when no colour contains a t-clique.
    """
    if t < 1:
        raise InvalidInput("t must be >= 1")
    budget = budget or DEFAULT_BUDGET
    if c.n > budget.n_cap:
        raise BudgetExceeded(f"n={c.n} exceeds n_cap={budget.n_cap}")
    nodes = _NodeCounter(budget.node_limit)
    best: BookSearchResult | None = None

    for colour in range(c.r):
        adj = c._neigh[colour]

        def extend(spine_mask: int, size: int, common: int, min_next: int) -> None:
            nonlocal best
            nodes.tick()
            if size == t:
                m = common.bit_count()
                if best is None or m > best.pages:
                    best = BookSearchResult(m, colour, spine_mask, common)
                return
            # next spine vertex must lie in the common neighbourhood (clique)
            # and above the last one (lexicographic enumeration)
            for v in iter_vertices(common & ~((1 << min_next) - 1)):
                extend(spine_mask | (1 << v), size + 1, common & adj[v], v + 1)

        extend(0, 0, full_mask(c.n), 0)
    return best


@dataclass(frozen=True)
class RamseyResult:
    all_contain: bool
    counterexample: EdgeColouring | None
    nodes: int

    @property
    def result(self) -> str:
        return "AllColouringsContainMono" if self.all_contain else "CounterexampleFound"


def _has_clique(adj: list[int], cand: int, size: int) -> bool:
    """Does `cand` contain a clique of the given size in the graph `adj`?"""
    if size <= 0:
        return True
    if cand.bit_count() < size:
        return False
    while cand:
        b = cand & -cand
        v = b.bit_length() - 1
        cand ^= b
        if _has_clique(adj, cand & adj[v], size - 1):
            return True
        if cand.bit_count() < size:
            return False
    return False


def _first_rows(r: int, n: int, ks) -> list[tuple[int, ...]]:
    """Canonical colourings of the edges at vertex 0.

    Vertex relabelling sorts the row into colour blocks; when all target
    clique sizes are equal, colour permutation additionally forces the block
    sizes to be non-increasing.
    """
    uniform = len(set(ks)) == 1
    rows = []

    def compose(remaining: int, colour: int, counts: list[int]):
        if colour == r - 1:
            counts.append(remaining)
            if not uniform or all(counts[i] >= counts[i + 1] for i in range(r - 1)):
                row = []
                for ci, cnt in enumerate(counts):
                    row.extend([ci] * cnt)
                rows.append(tuple(row))
            counts.pop()
            return
        cap = remaining if not uniform else min(remaining, counts[-1] if counts else remaining)
        for take in range(cap, -1, -1):
            counts.append(take)
            compose(remaining - take, colour + 1, counts)
            counts.pop()

    compose(n - 1, 0, [])
    return rows


def ramsey_exhaustive(r: int, ks, n: int, budget: SearchBudget | None = None) -> RamseyResult:
    """Decide whether every r-colouring of K_n has a colour-i clique of size k_i.

    Backtracking over edge colourings with canonical-first-row symmetry
    pruning; sound and complete within the node budget.
    """
    ks = list(ks)
    if len(ks) != r or r < 1 or n < 1:
        raise InvalidInput("need r >= 1 clique sizes and n >= 1")
    if any(k < 1 for k in ks):
        raise InvalidInput("clique sizes must be >= 1")
    budget = budget or DEFAULT_BUDGET
    if any(k == 1 for k in ks):
        return RamseyResult(True, None, 0)  # a single vertex is a K_1 in every colour

    if n == 1:
        return RamseyResult(False, EdgeColouring(1, r, b""), 0)

    edges = [(u, v) for u in range(n - 1) for v in range(u + 1, n)]
    nodes = _NodeCounter(budget.node_limit)
    tri = bytearray(n * (n - 1) // 2)
    adj = [[0] * n for _ in range(r)]

    def assign(idx: int, colour: int) -> bool:
        """Colour edge idx; returns False (and undoes nothing) if a clique completes."""
        u, v = edges[idx]
        cand = adj[colour][u] & adj[colour][v] & ((1 << u) - 1)
        if _has_clique(adj[colour], cand, ks[colour] - 2):
            return False
        tri[idx] = colour
        adj[colour][u] |= 1 << v
        adj[colour][v] |= 1 << u
        return True

    def unassign(idx: int, colour: int) -> None:
        u, v = edges[idx]
        adj[colour][u] &= ~(1 << v)
        adj[colour][v] &= ~(1 << u)

    found: list[EdgeColouring] = []

    def dfs(idx: int) -> bool:
        if idx == len(edges):
            found.append(EdgeColouring(n, r, bytes(tri)))
            return True
        for colour in range(r):
            nodes.tick()
            if assign(idx, colour):
                if dfs(idx + 1):
                    return True
                unassign(idx, colour)
        return False

    for row in _first_rows(r, n, ks):
        ok = True
        placed = 0
        for idx, colour in enumerate(row):
            nodes.tick()
            if not assign(idx, colour):
                ok = False
                break
            placed += 1
        if ok and dfs(n - 1):
            return RamseyResult(False, found[0], nodes.count)
        for idx in range(placed - 1, -1, -1):
            unassign(idx, row[idx])
    return RamseyResult(True, None, nodes.count)


@dataclass(frozen=True)
class EngineValidation:
    found: bool
    book_valid: bool
    engine_pages: int | None
    oracle_pages: int | None

    @property
    def ratio(self) -> float | None:
        if not self.found or not self.oracle_pages:
            return None
        return self.engine_pages / self.oracle_pages


def validate_book_engine(c: EdgeColouring, params: EngineParams,
                         budget: SearchBudget | None = None) -> EngineValidation:
    """Run the engine on X = Y_i = V and compare any found book to the oracle optimum."""
    budget = budget or SearchBudget(n_cap=14)
    if c.n > budget.n_cap:
        raise BudgetExceeded(f"n={c.n} exceeds n_cap={budget.n_cap}")
    outcome = run(c, c.vertices, [c.vertices] * c.r, params)
    if not outcome.found:
        return EngineValidation(False, True, None, None)
    valid = c.is_mono_book(outcome.spine, outcome.pages, outcome.book_colour)
    ref = best_book(c, params.t, budget)
    m_engine = outcome.pages.bit_count()
    m_oracle = ref.pages if ref is not None else None
    if ref is not None and m_engine > ref.pages:
        valid = False
    return EngineValidation(True, valid, m_engine, m_oracle)
