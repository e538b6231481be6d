"""Assembly layer: degree regularisation, the off-diagonal escape bound, and a
desk-scale end-to-end driver that regularises, builds a book, and then looks
for a clique inside the pages with the brute-force oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv

from .book_engine import EngineParams, run
from .bounds import LogScalar, certify_interval_ge, iv_from_fraction
from .colouring import EdgeColouring, iter_vertices, vertex_list
from .errors import (
    DegenerateDensity,
    InvalidInput,
    LemmaViolation,
    ScaleError,
)
from .oracle import SearchBudget, max_mono_clique

DESK_CLIQUE_CAP = 6


# ---------------------------------------------------------------------------
# regularisation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularisationResult:
    s_sets: tuple[int, ...]   # one bitmask per colour, pairwise disjoint
    w: int                    # bitmask, disjoint from every s_set
    eps: Fraction

    @property
    def s_sizes(self) -> tuple[int, ...]:
        return tuple(s.bit_count() for s in self.s_sets)

    @property
    def total_spine(self) -> int:
        return sum(self.s_sizes)


def regularise(c: EdgeColouring, eps) -> RegularisationResult:
    """Peel low-degree vertices until every colour has near-1/r min-degree.

    While some vertex x has a colour ell with |N_ell(x) & W| < (1/r - eps)|W| - 1,
    move x into the spine of its largest other colour j and recurse into
    N_j(x).  The violating vertex is the smallest label, the violating colour
    the smallest such colour, and j maximises the degree (ties to smallest j).
    Output always satisfies the three regularity invariants, which are
    re-verified before returning.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InvalidInput("eps must lie in (0, 1)")
    r = c.r
    cur = c.vertices
    s_sets = [0] * r
    while True:
        ncur = cur.bit_count()
        if r == 1 or ncur <= r:
            break
        threshold = (Fraction(1, r) - eps) * ncur - 1
        pick = None
        for x in iter_vertices(cur):
            for ell in range(r):
                if (c._neigh[ell][x] & cur).bit_count() < threshold:
                    pick = (x, ell)
                    break
            if pick:
                break
        if pick is None:
            break
        x, ell = pick
        degs = [(c._neigh[j][x] & cur).bit_count() if j != ell else -1 for j in range(r)]
        j = degs.index(max(degs))
        if degs[j] < Fraction(1 + eps, r) * ncur:
            raise LemmaViolation("regularisation pigeonhole failed")
        s_sets[j] |= 1 << x
        cur &= c._neigh[j][x]
    result = RegularisationResult(tuple(s_sets), cur, eps)
    verify_regularisation(c, result)
    return result


def verify_regularisation(c: EdgeColouring, res: RegularisationResult) -> None:
    """Re-check the three output invariants directly against the colouring."""
    r = c.r
    w = res.w
    wsize = w.bit_count()
    if wsize == 0:
        raise LemmaViolation("regularisation produced an empty W")
    total = res.total_spine
    bound = (Fraction(1 + res.eps, r)) ** total * c.n
    if wsize < bound:
        raise LemmaViolation(f"|W| = {wsize} below the peel bound {float(bound)}")
    floor = (Fraction(1, r) - res.eps) * wsize - 1
    for v in iter_vertices(w):
        for i in range(r):
            if (c._neigh[i][v] & w).bit_count() < floor:
                raise LemmaViolation(f"vertex {v} violates the colour-{i} min-degree in W")
    for i in range(r):
        if res.s_sets[i] & w:
            raise LemmaViolation("spine overlaps W")
        if not c.is_mono_book(res.s_sets[i], w, i):
            raise LemmaViolation(f"(S_{i}, W) is not a colour-{i} book")


# ---------------------------------------------------------------------------
# the escape bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lemma53Report:
    passes: bool
    reduced_passes: bool
    lhs_log10: float
    rhs_log10: float

    def to_json(self) -> dict:
        return {
            "pass": self.passes,
            "reduced_pass": self.reduced_passes,
            "lhs_log10": self.lhs_log10,
            "rhs_log10": self.rhs_log10,
        }


def lemma53_check(r: int, k: int, eps, ss) -> Lemma53Report:
    """Certify r^(rk-s) <= e^(-eps^3 k/2) ((1+eps)/r)^s r^(rk) for s = sum ss.

    Requires k, r >= 2, eps in (0,1), 0 <= s_i <= k and s >= eps^2 k.  The
    chain reduces to (1+eps)^s >= e^(eps^3 k / 2), which is also certified
    and reported separately.
    """
    eps = Fraction(eps)
    ss = [int(x) for x in ss]
    if r < 2 or k < 2:
        raise InvalidInput("need k, r >= 2")
    if not 0 < eps < 1:
        raise InvalidInput("eps must lie in (0, 1)")
    if len(ss) != r or any(not 0 <= x <= k for x in ss):
        raise InvalidInput("each s_i must lie in [0, k]")
    s = sum(ss)
    if s < eps * eps * k:
        raise InvalidInput(f"sum s_i = {s} below eps^2 k = {float(eps * eps * k)}")

    lhs = LogScalar.from_int(r) ** (r * k - s)
    rhs = (
        LogScalar.exp(-(eps**3) * k / 2)
        * LogScalar.from_fraction((1 + eps) / r) ** s
        * LogScalar.from_int(r) ** (r * k)
    )
    passes = rhs.definitely_ge(lhs)
    reduced = certify_interval_ge(
        s * iv.log(iv_from_fraction(1 + eps)), iv_from_fraction((eps**3) * k / 2)
    )
    return Lemma53Report(passes, reduced, lhs.log10(), rhs.log10())


# ---------------------------------------------------------------------------
# desk-scale driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriverConfig:
    eps: Fraction = Fraction(1, 20)
    t: int = 1
    lambda0: Fraction = Fraction(10)
    delta: Fraction = Fraction(1, 16)
    escape_sum: int | None = None       # default: escape once sum |S_i| >= k
    partition: bool = False             # split W into X, Y_1..Y_r instead of sharing it
    partition_seed: int = 0
    budget: SearchBudget = field(default_factory=lambda: SearchBudget(n_cap=512))


@dataclass(frozen=True)
class CliqueFound:
    colour: int
    vertices: int            # bitmask, exactly k vertices
    report: dict


@dataclass(frozen=True)
class BookPhaseReport:
    report: dict

    @property
    def branch(self) -> str:
        return self.report["branch"]


def desk_ramsey_driver(c: EdgeColouring, k: int, config: DriverConfig | None = None):
    """Regularise, run the book engine on the regular core, then hunt a
    K_{k-t} inside the returned pages.  Returns CliqueFound with a verified
    monochromatic K_k, or a BookPhaseReport describing where the pipeline
    stopped.
    """
    config = config or DriverConfig()
    if k < 1:
        raise InvalidInput("k must be >= 1")
    if k > DESK_CLIQUE_CAP:
        raise ScaleError(f"k = {k} exceeds the desk-scale oracle cap {DESK_CLIQUE_CAP}")
    report: dict = {"k": k, "n": c.n, "r": c.r}

    if k == 1:
        report["branch"] = "trivial"
        return CliqueFound(0, 1, report)
    if k == 2:
        report["branch"] = "trivial"
        if c.n >= 2:
            return CliqueFound(c.colour(0, 1), 0b11, report)
        return BookPhaseReport(report)

    if not 1 <= config.t < k:
        raise InvalidInput("config.t must satisfy 1 <= t < k")

    reg = regularise(c, config.eps)
    report["regularisation"] = {"s_sizes": list(reg.s_sizes), "w_size": reg.w.bit_count()}

    for i in range(c.r):
        if reg.s_sizes[i] >= k:
            spine = 0
            for v in list(iter_vertices(reg.s_sets[i]))[:k]:
                spine |= 1 << v
            if not c.is_mono_clique(spine, i):
                raise LemmaViolation("regularisation spine is not a clique")
            report["branch"] = "spine_clique"
            return CliqueFound(i, spine, report)

    escape_at = config.escape_sum if config.escape_sum is not None else k
    if reg.total_spine >= escape_at:
        report["branch"] = "escape"
        eps2k = config.eps * config.eps * k
        if reg.total_spine >= eps2k:
            l53 = lemma53_check(c.r, k, config.eps, reg.s_sizes) if c.r >= 2 and k >= 2 else None
            report["escape_bound"] = None if l53 is None else l53.to_json()
        return BookPhaseReport(report)

    if config.partition:
        rng = random.Random(config.partition_seed)
        parts = [0] * (c.r + 1)
        for v in iter_vertices(reg.w):
            parts[rng.randrange(c.r + 1)] |= 1 << v
        xset, ysets = parts[0], parts[1:]
        if xset == 0 or any(y == 0 for y in ysets):
            report["branch"] = "degenerate"
            report["detail"] = "random partition produced an empty part"
            return BookPhaseReport(report)
    else:
        xset, ysets = reg.w, [reg.w] * c.r

    params = EngineParams(t=config.t, lambda0=config.lambda0, delta=config.delta)
    report["branch"] = "book"
    try:
        outcome = run(c, xset, ysets, params)
    except InvalidInput as e:
        report["branch"] = "degenerate"
        report["detail"] = str(e)
        return BookPhaseReport(report)
    except DegenerateDensity as e:
        report["branch"] = "degenerate"
        report["detail"] = str(e)
        return BookPhaseReport(report)

    report["book_phase"] = {
        "outcome": outcome.result,
        "steps": len(outcome.trace.records),
    }
    if not outcome.found:
        return BookPhaseReport(report)

    spine, pages, colour = outcome.spine, outcome.pages, outcome.book_colour
    if not c.is_mono_book(spine, pages, colour):
        raise LemmaViolation("driver received an invalid book")
    report["book_phase"].update(
        {
            "colour": colour,
            "spine": vertex_list(spine),
            "pages_size": pages.bit_count(),
            "book_valid": True,
        }
    )
    need = k - config.t
    size, witness = max_mono_clique(c, colour, config.budget, within=pages)
    report["book_phase"]["page_clique"] = size
    if size >= need:
        sub = 0
        for v in list(iter_vertices(witness))[:need]:
            sub |= 1 << v
        clique = spine | sub
        if not c.is_mono_clique(clique, colour):
            raise LemmaViolation("assembled clique failed verification")
        report["branch"] = "book_clique"
        return CliqueFound(colour, clique, report)
    return BookPhaseReport(report)
