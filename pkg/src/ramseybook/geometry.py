"""Geometric core: trimmed-neighbourhood embeddings with exact rational inner
products, the cosh-sqrt special function, tensor-power moment positivity, and
the lambda-witness search that drives every round of the book algorithm.

Inner products are never computed from materialised vectors; each one is an
affine function of a codegree, so the whole witness search runs on integer
codegree tables and only the returned threshold is converted to a Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from mpmath import iv, mp

from .bounds import (
    certify_interval_ge,
    iv_cosh,
    iv_from,
    iv_from_fraction,
    iv_from_int,
    upper_fraction,
)
from .colouring import EdgeColouring, iter_vertices, vertex_list
from .errors import (
    DegenerateDensity,
    EmptySet,
    InvalidColour,
    InvalidInput,
    InvalidVertex,
    LemmaViolation,
    TensorTooLarge,
)

TENSOR_ORDER_CAP = 4
TENSOR_DIM_CAP = 32


def default_beta(r: int) -> Fraction:
    return Fraction(1, 3 ** (4 * r))


def _c_interval(r: int, c_factor):
    """Enclosure of the decay coefficient; 4 r^(3/2) unless overridden."""
    if c_factor is None:
        return 4 * iv.sqrt(iv_from_int(r**3))
    return iv_from(Fraction(c_factor))


def witness_bound_upper(lam: Fraction, r: int, beta: Fraction, c_factor=None) -> Fraction:
    """Certified upper bound on beta * e^(-C sqrt(lam + 1))."""
    if lam < -1:
        raise InvalidInput("threshold below -1")
    expo = -_c_interval(r, c_factor) * iv.sqrt(iv_from_fraction(lam + 1))
    return upper_fraction(iv_from_fraction(beta) * iv.exp(expo))


# ---------------------------------------------------------------------------
# densities and embeddings
# ---------------------------------------------------------------------------

def min_density(c: EdgeColouring, xset: int, yset: int, colour: int) -> Fraction:
    """min over x in X of |N_i(x) & Y| / |Y|, as an exact rational."""
    if xset == 0 or yset == 0:
        raise EmptySet("min_density needs non-empty X and Y")
    if not 0 <= colour < c.r:
        raise InvalidColour(f"colour {colour} out of range [0, {c.r})")
    ysize = yset.bit_count()
    neigh = c._neigh[colour]
    best = min((neigh[x] & yset).bit_count() for x in iter_vertices(xset))
    return Fraction(best, ysize)


def _lowest_bits(mask: int, count: int) -> int:
    out = 0
    for _ in range(count):
        b = mask & -mask
        out |= b
        mask ^= b
    return out


@dataclass(frozen=True, eq=False)
class Embedding:
    """Per-colour trimmed neighbourhoods N'_i(x) of size exactly p_i |Y_i|.

    The implicit unit-scaled vectors are never materialised; their pairwise
    inner products are (codeg - p_i^2 |Y_i|) / (alpha_i p_i |Y_i|), exact.
    """

    colouring: EdgeColouring
    points: tuple[int, ...]
    y_masks: tuple[int, ...]
    y_sizes: tuple[int, ...]
    densities: tuple[Fraction, ...]
    alphas: tuple[Fraction, ...]
    trimmed: tuple[tuple[int, ...], ...]  # [colour][point index] -> N' bitmask
    index: dict = field(repr=False)

    @property
    def r(self) -> int:
        return len(self.y_masks)

    @property
    def npoints(self) -> int:
        return len(self.points)

    def trimmed_sizes(self) -> tuple[int, ...]:
        return tuple(int(p * y) for p, y in zip(self.densities, self.y_sizes))

    def self_inner(self, colour: int) -> Fraction:
        return (1 - self.densities[colour]) / self.alphas[colour]

    def _point_index(self, x: int) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise InvalidVertex(f"vertex {x} is not in X") from None

    def codegree(self, colour: int, x: int, y: int) -> int:
        a, b = self._point_index(x), self._point_index(y)
        t = self.trimmed[colour]
        return (t[a] & t[b]).bit_count()

    def inner(self, colour: int, x: int, y: int) -> Fraction:
        if not 0 <= colour < self.r:
            raise InvalidColour(f"colour {colour} out of range [0, {self.r})")
        return self.inner_from_codegree(colour, self.codegree(colour, x, y))

    def inner_from_codegree(self, colour: int, codeg: int) -> Fraction:
        p, a, y = self.densities[colour], self.alphas[colour], self.y_sizes[colour]
        return (Fraction(codeg) - p * p * y) / (a * p * y)

    def inner_by_index(self, colour: int, a: int, b: int) -> Fraction:
        t = self.trimmed[colour]
        return self.inner_from_codegree(colour, (t[a] & t[b]).bit_count())

    def as_family(self) -> "VectorFamily":
        """Materialise the unscaled centred indicators over Y_i coordinates."""
        vectors = []
        scales = []
        for i in range(self.r):
            ys = vertex_list(self.y_masks[i])
            p = self.densities[i]
            vecs = tuple(
                tuple((1 if (self.trimmed[i][a] >> v) & 1 else 0) - p for v in ys)
                for a in range(self.npoints)
            )
            vectors.append(vecs)
            scales.append(1 / (self.alphas[i] * p * self.y_sizes[i]))
        return VectorFamily(tuple(vectors), tuple(scales))


def build_embedding(c: EdgeColouring, xset: int, ysets, alphas) -> Embedding:
    """Trim each N_i(x) & Y_i down to its p_i|Y_i| smallest-labelled vertices.

    p_i|Y_i| = min_x |N_i(x) & Y_i| is automatically an integer, so no
    rounding ever happens.  p_i = 0 for any colour is DegenerateDensity.
    """
    ysets = tuple(ysets)
    alphas = tuple(Fraction(a) for a in alphas)
    if len(ysets) != c.r or len(alphas) != c.r:
        raise InvalidInput(f"need one Y set and one alpha per colour ({c.r})")
    if xset == 0:
        raise EmptySet("X is empty")
    if any(a <= 0 for a in alphas):
        raise InvalidInput("alphas must be positive")
    points = tuple(iter_vertices(xset))
    if points[-1] >= c.n:
        raise InvalidVertex("X contains vertices out of range")
    y_sizes = []
    densities = []
    trimmed = []
    for i, yset in enumerate(ysets):
        if yset == 0:
            raise EmptySet(f"Y_{i} is empty")
        ysize = yset.bit_count()
        neigh = c._neigh[i]
        masks = [neigh[x] & yset for x in points]
        m = min(mm.bit_count() for mm in masks)
        if m == 0:
            raise DegenerateDensity(f"p_{i} = 0: some x in X has no colour-{i} neighbour in Y_{i}", colour=i)
        y_sizes.append(ysize)
        densities.append(Fraction(m, ysize))
        trimmed.append(tuple(mm if mm.bit_count() == m else _lowest_bits(mm, m) for mm in masks))
    return Embedding(
        colouring=c,
        points=points,
        y_masks=ysets,
        y_sizes=tuple(y_sizes),
        densities=tuple(densities),
        alphas=alphas,
        trimmed=tuple(trimmed),
        index={x: a for a, x in enumerate(points)},
    )


def inner_product(emb: Embedding, colour: int, x: int, y: int) -> Fraction:
    """Exact inner product of the implicit vectors at x and y in one colour."""
    return emb.inner(colour, x, y)


# ---------------------------------------------------------------------------
# the special function f
# ---------------------------------------------------------------------------

class SpecialBranch(Enum):
    UPPER_BOUND_HOLDS = "UpperBoundHolds"
    NEGATIVE_CASE_HOLDS = "NegativeCaseHolds"


def _cosh_sqrt_mp(x):
    if x >= 0:
        return mp.cosh(mp.sqrt(x))
    return mp.cos(mp.sqrt(-x))


def special_f(xs) -> "mp.mpf":
    """f(x_1..x_r) = sum_j x_j prod_{i != j} (2 + cosh sqrt(x_i)), high precision.

    cosh sqrt(x) means cos sqrt(-x) for x < 0 (one entire function).
    """
    vals = [mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x) for x in xs]
    factors = [2 + _cosh_sqrt_mp(v) for v in vals]
    total = mp.mpf(0)
    for j, v in enumerate(vals):
        prod = mp.mpf(1)
        for i, f in enumerate(factors):
            if i != j:
                prod *= f
        total += v * prod
    return total


def cosh_sqrt_series(x, terms: int = 40):
    """Truncated Taylor series sum x^n / (2n)! for cross-checking the closed form."""
    v = mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x)
    total = mp.mpf(0)
    term = mp.mpf(1)
    for n in range(terms):
        if n > 0:
            term = term * v / ((2 * n - 1) * (2 * n))
        total += term
    return total


def special_f_series(xs, terms: int = 40):
    """f evaluated with series-expanded cosh sqrt factors."""
    vals = [mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x) for x in xs]
    factors = [2 + cosh_sqrt_series(v, terms) for v in vals]
    total = mp.mpf(0)
    for j, v in enumerate(vals):
        prod = mp.mpf(1)
        for i, f in enumerate(factors):
            if i != j:
                prod *= f
        total += v * prod
    return total


def _exact(x) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # floats are exact binary rationals
    raise InvalidInput(f"need an exact int/float/Fraction input, got {type(x).__name__}")


def _cosh_sqrt_iv(q: Fraction):
    if q >= 0:
        return iv_cosh(iv.sqrt(iv_from_fraction(q)))
    return iv.cos(iv.sqrt(iv_from_fraction(-q)))


def check_special_bounds(xs) -> SpecialBranch:
    """Certify the two-branch upper bound on f with adverse rounding.

    If every x_i >= -3r, asserts f <= 3^r r e^(sum sqrt(x_i + 3r)); otherwise
    asserts f <= -1.  Both checks compare an interval upper bound of f against
    a lower bound of the target, so a pass is rigorous.  A failure raises
    LemmaViolation, signalling an implementation bug.
    """
    qs = [_exact(x) for x in xs]
    r = len(qs)
    if r < 1:
        raise InvalidInput("need at least one coordinate")
    factors = [2 + _cosh_sqrt_iv(q) for q in qs]
    f = iv.mpf(0)
    for j, q in enumerate(qs):
        prod = iv.mpf(1)
        for i, fac in enumerate(factors):
            if i != j:
                prod *= fac
        f += iv_from_fraction(q) * prod

    if all(q >= -3 * r for q in qs):
        bound = iv_from_int(3**r * r) * iv.exp(
            sum(iv.sqrt(iv_from_fraction(q + 3 * r)) for q in qs)
        )
        if not certify_interval_ge(bound, f):
            raise LemmaViolation(f"f{tuple(map(float, qs))} exceeded the positive-quadrant bound")
        return SpecialBranch.UPPER_BOUND_HOLDS
    if not certify_interval_ge(iv.mpf(-1), f):
        raise LemmaViolation(f"f{tuple(map(float, qs))} exceeded -1 in the negative branch")
    return SpecialBranch.NEGATIVE_CASE_HOLDS


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VectorFamily:
    """r functions from a finite point set into rational vectors.

    ``scales[i]`` multiplies raw dot products in colour i, so implicitly
    sqrt-scaled families (like embeddings) stay exactly rational.
    """

    vectors: tuple  # [colour][point][coord] -> Fraction
    scales: tuple = None

    def __post_init__(self):
        if not self.vectors:
            raise InvalidInput("need at least one colour")
        npts = len(self.vectors[0])
        if npts == 0:
            raise EmptySet("need at least one point")
        if any(len(v) != npts for v in self.vectors):
            raise InvalidInput("every colour must map the same point set")
        if self.scales is None:
            object.__setattr__(self, "scales", tuple(Fraction(1) for _ in self.vectors))
        if len(self.scales) != len(self.vectors):
            raise InvalidInput("need one scale per colour")

    @property
    def r(self) -> int:
        return len(self.vectors)

    @property
    def npoints(self) -> int:
        return len(self.vectors[0])

    def dim(self, colour: int) -> int:
        return len(self.vectors[colour][0])

    def inner_by_index(self, colour: int, a: int, b: int) -> Fraction:
        va, vb = self.vectors[colour][a], self.vectors[colour][b]
        return self.scales[colour] * sum(x * y for x, y in zip(va, vb))


def _check_exponents(family, ells) -> list[int]:
    ells = [int(e) for e in ells]
    if len(ells) != family.r:
        raise InvalidInput(f"need one exponent per colour ({family.r})")
    if any(e < 0 for e in ells):
        raise InvalidInput("exponents must be non-negative")
    return ells


def moment_double_sum(family, ells) -> Fraction:
    """(1/|X|^2) sum over ordered pairs of prod_i <s_i(x), s_i(y)>^l_i, exact.

    Non-negative for every exponent vector: a negative value signals a bug.
    Accepts an Embedding or a VectorFamily.
    """
    ells = _check_exponents(family, ells)
    n = family.npoints
    active = [(i, e) for i, e in enumerate(ells) if e > 0]
    total = Fraction(0)
    for a in range(n):
        for b in range(a, n):
            term = Fraction(1)
            for i, e in active:
                term *= family.inner_by_index(i, a, b) ** e
            total += term if a == b else 2 * term
    return total / (n * n)


def moment_tensor(family, ells, order_cap: int = TENSOR_ORDER_CAP, dim_cap: int = TENSOR_DIM_CAP) -> Fraction:
    """<E[Z], E[Z]> via an explicit dense tensor-power average; equals the double sum.

    Z is the order-(sum ells) tensor product of the point's vectors, one
    factor per exponent unit.  Guarded by caps because the tensor has
    prod(dim) entries.
    """
    if isinstance(family, Embedding):
        family = family.as_family()
    ells = _check_exponents(family, ells)
    order = sum(ells)
    if order > order_cap:
        raise TensorTooLarge(f"tensor order {order} exceeds cap {order_cap}")
    a_seq = [i for i, e in enumerate(ells) for _ in range(e)]
    dims = [family.dim(i) for i in a_seq]
    size = 1
    for i, d in zip(a_seq, dims):
        if d > dim_cap:
            raise TensorTooLarge(f"colour {i} has dimension {d} > cap {dim_cap}")
        size *= d
    total = [Fraction(0)] * size
    for a in range(family.npoints):
        acc = [Fraction(1)]
        for i in a_seq:
            vec = family.vectors[i][a]
            acc = [v * coord for v in acc for coord in vec]
        for idx, v in enumerate(acc):
            total[idx] += v
    value = sum(v * v for v in total)
    for i in a_seq:
        value *= family.scales[i]
    n = family.npoints
    return value / (n * n)


# ---------------------------------------------------------------------------
# witness search and the key step
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    """A (colour, threshold) pair whose event probability beats the decay bound."""

    colour: int
    lam: Fraction
    q: Fraction
    bound: Fraction          # certified upper bound on beta e^(-C sqrt(lam+1))
    pair_count: int
    total_pairs: int


@dataclass(frozen=True)
class KeyStepResult:
    pivot: int
    colour: int
    x_prime: int             # bitmask, never containing the pivot
    y_primes: tuple[int, ...]
    lam: Fraction
    q: Fraction
    bound: Fraction
    met_size_bound: bool


class _PairTables:
    """Integer codegree tables over X, plus eligibility of unordered pairs.

    A pair is eligible when every coordinate inner product is >= -1, i.e.
    codeg_i >= p_i |Y_i| (p_i - alpha_i) for every colour; only eligible pairs
    can contribute to any witness event.
    """

    def __init__(self, emb: Embedding):
        self.emb = emb
        n = emb.npoints
        self.n = n
        r = emb.r
        self.diag = emb.trimmed_sizes()
        # minimal integer codegree for coordinate >= -1
        self.dmin = []
        for i in range(r):
            p, a, y = emb.densities[i], emb.alphas[i], emb.y_sizes[i]
            thr = p * y * (p - a)
            self.dmin.append(max(0, -(-thr.numerator // thr.denominator)))  # ceil, floored at 0
        self.codeg = [[[0] * n for _ in range(n)] for _ in range(r)]
        self.eligible: list[tuple[int, int]] = []
        tr = emb.trimmed
        for a in range(n):
            for i in range(r):
                self.codeg[i][a][a] = self.diag[i]
            for b in range(a + 1, n):
                ok = True
                for i in range(r):
                    d = (tr[i][a] & tr[i][b]).bit_count()
                    self.codeg[i][a][b] = d
                    self.codeg[i][b][a] = d
                    if d < self.dmin[i]:
                        ok = False
                if ok:
                    self.eligible.append((a, b))

    def candidates(self):
        """(lam, colour, codegree threshold) triples, lam descending, colour ascending.

        Per colour: every codegree attained by an eligible pair (diagonal
        included), plus the lam = -1 fallback.
        """
        cands = []
        for i in range(self.emb.r):
            seen = {self.diag[i]}
            for a, b in self.eligible:
                seen.add(self.codeg[i][a][b])
            lams = {self.emb.inner_from_codegree(i, d): d for d in sorted(seen)}
            lams.setdefault(Fraction(-1), self.dmin[i])
            for lam, d in lams.items():
                cands.append((lam, i, d))
        cands.sort(key=lambda t: (-t[0], t[1]))
        return cands

    def event_count(self, colour: int, d: int) -> int:
        """Ordered pairs (diagonal included) in the event at codegree threshold d."""
        cnt = 2 * sum(1 for a, b in self.eligible if self.codeg[colour][a][b] >= d)
        if self.diag[colour] >= d:
            cnt += self.n
        return cnt

    def pivot_counts(self, colour: int, d: int) -> list[int]:
        counts = [0] * self.n
        cd = self.codeg[colour]
        for a, b in self.eligible:
            if cd[a][b] >= d:
                counts[a] += 1
                counts[b] += 1
        return counts

    def x_prime_mask(self, colour: int, d: int, pivot_idx: int) -> int:
        mask = 0
        cd = self.codeg[colour]
        for a, b in self.eligible:
            if cd[a][b] >= d:
                if a == pivot_idx:
                    mask |= 1 << self.emb.points[b]
                elif b == pivot_idx:
                    mask |= 1 << self.emb.points[a]
        return mask


def find_lambda_witness(emb: Embedding, beta=None, c_factor=None) -> WitnessReport:
    """Largest threshold lam (ties: smallest colour) whose event probability q
    over all |X|^2 ordered pairs satisfies q >= beta e^(-C sqrt(lam+1)).

    Candidate thresholds are -1 and the attained inner-product values.  The
    right side is rounded up before comparing, so acceptance is conservative.
    Failure to find any witness raises LemmaViolation (it is a theorem that
    one exists).
    """
    r = emb.r
    beta = default_beta(r) if beta is None else Fraction(beta)
    tables = _PairTables(emb)
    total = tables.n * tables.n
    for lam, colour, d in tables.candidates():
        cnt = tables.event_count(colour, d)
        if cnt == 0:
            continue
        bound = witness_bound_upper(lam, r, beta, c_factor)
        q = Fraction(cnt, total)
        if q >= bound:
            return WitnessReport(colour, lam, q, bound, cnt, total)
    raise LemmaViolation("no lambda witness found; this should be impossible")


def key_lemma_step(c: EdgeColouring, xset: int, ysets, alphas, beta=None, c_factor=None) -> KeyStepResult:
    """One full round of the density/boost dichotomy.

    Builds the embedding, scans witness candidates in decreasing lam order,
    and takes the first one that both satisfies the witness inequality and
    admits a pivot x whose event partner set X'(x) (excluding x itself) is at
    least beta e^(-C sqrt(lam+1)) |X|.  If no candidate admits such a pivot
    (possible only when no off-diagonal pair has all coordinates >= -1, e.g.
    |X| = 1), falls back to the plain witness with the best available pivot.

    Pivot ties break to the smallest vertex label.
    """
    emb = build_embedding(c, xset, ysets, alphas)
    r = emb.r
    beta = default_beta(r) if beta is None else Fraction(beta)
    tables = _PairTables(emb)
    total = tables.n * tables.n

    fallback = None
    for lam, colour, d in tables.candidates():
        cnt = tables.event_count(colour, d)
        if cnt == 0:
            continue
        bound = witness_bound_upper(lam, r, beta, c_factor)
        q = Fraction(cnt, total)
        if q < bound:
            continue
        counts = tables.pivot_counts(colour, d)
        best = max(counts)
        pivot_idx = counts.index(best)
        if best >= bound * tables.n:
            x_prime = tables.x_prime_mask(colour, d, pivot_idx)
            return KeyStepResult(
                pivot=emb.points[pivot_idx],
                colour=colour,
                x_prime=x_prime,
                y_primes=tuple(emb.trimmed[i][pivot_idx] for i in range(r)),
                lam=lam,
                q=q,
                bound=bound,
                met_size_bound=True,
            )
        if fallback is None:
            fallback = (lam, colour, d, q, bound, pivot_idx)
    if fallback is None:
        raise LemmaViolation("no lambda witness found; this should be impossible")
    lam, colour, d, q, bound, pivot_idx = fallback
    return KeyStepResult(
        pivot=emb.points[pivot_idx],
        colour=colour,
        x_prime=tables.x_prime_mask(colour, d, pivot_idx),
        y_primes=tuple(emb.trimmed[i][pivot_idx] for i in range(r)),
        lam=lam,
        q=q,
        bound=bound,
        met_size_bound=False,
    )


# ---------------------------------------------------------------------------
# independent re-verification oracles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KeyStepCheck:
    y_sizes_ok: bool
    size_bound_ok: bool
    boost_ok: bool
    all_colours_ok: bool
    slack_ok: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.y_sizes_ok
            and self.size_bound_ok
            and self.boost_ok
            and self.all_colours_ok
            and self.slack_ok
        )


def verify_key_step(c, xset, ysets, alphas, res: KeyStepResult, beta=None, c_factor=None) -> KeyStepCheck:
    """Recompute every key-step postcondition from the colouring alone.

    Densities, trimmed sets and codegrees are all rebuilt from scratch; the
    exponential size bound compares the exact |X'| against an upper-rounded
    right side.
    """
    ysets = tuple(ysets)
    alphas = tuple(Fraction(a) for a in alphas)
    r = c.r
    beta = default_beta(r) if beta is None else Fraction(beta)
    xsize = xset.bit_count()

    densities = [min_density(c, xset, ysets[i], i) for i in range(r)]
    m = [int(densities[i] * ysets[i].bit_count()) for i in range(r)]

    y_sizes_ok = all(res.y_primes[i].bit_count() == m[i] for i in range(r))
    # Y'_i must be the trimmed neighbourhood of the pivot
    for i in range(r):
        full = c.neighbourhood(res.pivot, i) & ysets[i]
        want = full if full.bit_count() == m[i] else _lowest_bits(full, m[i])
        if res.y_primes[i] != want:
            y_sizes_ok = False

    bound = witness_bound_upper(res.lam, r, beta, c_factor)
    size_bound_ok = Fraction(res.x_prime.bit_count()) >= bound * xsize
    slack_ok = Fraction(res.x_prime.bit_count()) >= res.q * xsize - 1

    boost_ok = True
    all_colours_ok = True
    if res.x_prime:
        pl = min_density(c, res.x_prime, res.y_primes[res.colour], res.colour)
        boost_ok = pl >= densities[res.colour] + res.lam * alphas[res.colour]
        for i in range(r):
            pi = min_density(c, res.x_prime, res.y_primes[i], i)
            if pi < densities[i] - alphas[i]:
                all_colours_ok = False
    return KeyStepCheck(y_sizes_ok, size_bound_ok, boost_ok, all_colours_ok, slack_ok)


def verify_witness(c, xset, ysets, alphas, rep: WitnessReport, beta=None, c_factor=None) -> None:
    """Exhaustively recount the witness event from a fresh embedding.

    Raises LemmaViolation if the recount disagrees with the report or the
    witness inequality fails against a freshly rounded bound.
    """
    emb = build_embedding(c, xset, ysets, alphas)
    r = emb.r
    beta = default_beta(r) if beta is None else Fraction(beta)
    n = emb.npoints
    cnt = 0
    for a in range(n):
        for b in range(n):
            vals = [emb.inner_by_index(i, a, b) for i in range(r)]
            if vals[rep.colour] >= rep.lam and all(
                v >= -1 for i, v in enumerate(vals) if i != rep.colour
            ):
                cnt += 1
    if cnt != rep.pair_count or rep.total_pairs != n * n:
        raise LemmaViolation(
            f"witness recount mismatch: recounted {cnt}/{n * n}, reported {rep.pair_count}/{rep.total_pairs}"
        )
    q = Fraction(cnt, n * n)
    if q != rep.q:
        raise LemmaViolation("witness probability mismatch on recount")
    bound = witness_bound_upper(rep.lam, r, beta, c_factor)
    if q < bound:
        raise LemmaViolation(f"witness inequality fails on recount: q={float(q)} < bound={float(bound)}")
