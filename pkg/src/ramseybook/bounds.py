"""Exact and log-space arithmetic for closed-form bound verification.

Two tiers, chosen per inequality: exact ``Fraction`` arithmetic wherever both
sides are rational, and interval-backed ``LogScalar`` values (sign plus an
enclosure of the natural log of the magnitude) elsewhere.  Every interval
comparison is directed: a reported "pass" means the inequality holds for the
true real values, no matter how the enclosures were rounded.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, mp

from .errors import InvalidInput, PrecisionExhausted

PRECISION_ENV = "RF_PRECISION_BITS"
DEFAULT_PRECISION_BITS = 128


def set_precision(bits: int) -> None:
    if bits < 16:
        raise InvalidInput("precision below 16 bits is not supported")
    mp.prec = bits
    iv.prec = bits


def precision() -> int:
    return mp.prec


set_precision(int(os.environ.get(PRECISION_ENV, DEFAULT_PRECISION_BITS)))


# ---------------------------------------------------------------------------
# interval helpers
# ---------------------------------------------------------------------------

def iv_from_int(x: int):
    return iv.mpf(x)


def iv_from_fraction(q: Fraction):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def iv_from(x):
    """Interval enclosure of an int, Fraction, or float (floats are exact binary)."""
    if isinstance(x, bool):
        raise InvalidInput("boolean is not a number here")
    if isinstance(x, int):
        return iv_from_int(x)
    if isinstance(x, Fraction):
        return iv_from_fraction(x)
    if isinstance(x, float):
        return iv.mpf(x)
    return iv.mpf(x)  # already an interval or mpf


def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, bc = raw
    f = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -f if sign else f


def interval_endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an interval value."""
    a, b = x._mpi_
    return _raw_to_fraction(a), _raw_to_fraction(b)


def lower_fraction(x) -> Fraction:
    return interval_endpoints(x)[0]


def upper_fraction(x) -> Fraction:
    return interval_endpoints(x)[1]


def certify_ge(lhs, rhs_interval) -> bool:
    """Decide ``lhs >= rhs`` rigorously for exact lhs and an enclosure of rhs.

    True and False are both certified; an enclosure too wide to decide raises
    PrecisionExhausted rather than guessing.
    """
    lo, hi = interval_endpoints(rhs_interval)
    lhs = Fraction(lhs)
    if lhs >= hi:
        return True
    if lhs < lo:
        return False
    raise PrecisionExhausted(
        f"cannot decide {float(lhs)} >= [{float(lo)}, {float(hi)}] at {precision()} bits"
    )


def certify_le(lhs, rhs_interval) -> bool:
    lo, hi = interval_endpoints(rhs_interval)
    lhs = Fraction(lhs)
    if lhs <= lo:
        return True
    if lhs > hi:
        return False
    raise PrecisionExhausted(
        f"cannot decide {float(lhs)} <= [{float(lo)}, {float(hi)}] at {precision()} bits"
    )


def certify_interval_ge(a, b) -> bool:
    """Decide ``a >= b`` rigorously for two interval values."""
    a_lo, a_hi = interval_endpoints(a)
    b_lo, b_hi = interval_endpoints(b)
    if a_lo >= b_hi:
        return True
    if a_hi < b_lo:
        return False
    raise PrecisionExhausted(f"cannot order overlapping intervals at {precision()} bits")


def iv_cosh(u):
    e = iv.exp(u)
    return (e + 1 / e) / 2


# ---------------------------------------------------------------------------
# LogScalar
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogScalar:
    """Sign plus an interval enclosure of ln|value|.

    Multiplication adds logs, integer/rational powers scale them, and addition
    of same-sign values goes through interval log-sum-exp, so chains of
    astronomically large or small factors stay exactly comparable.
    """

    sign: int
    log: object | None  # iv.mpf enclosure of ln|value|; None iff sign == 0

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0, None)

    @classmethod
    def one(cls) -> "LogScalar":
        return cls(1, iv.mpf(0))

    @classmethod
    def from_int(cls, x: int) -> "LogScalar":
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, iv.log(iv_from_int(abs(x))))

    @classmethod
    def from_fraction(cls, q) -> "LogScalar":
        q = Fraction(q)
        if q == 0:
            return cls.zero()
        mag = iv.log(iv_from_int(abs(q.numerator))) - iv.log(iv_from_int(q.denominator))
        return cls(1 if q > 0 else -1, mag)

    @classmethod
    def exp(cls, exponent) -> "LogScalar":
        """e**exponent for an exact rational (or interval) exponent."""
        return cls(1, iv_from(exponent))

    @classmethod
    def from_log(cls, sign: int, log) -> "LogScalar":
        if sign == 0:
            return cls.zero()
        return cls(sign, iv_from(log))

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log + other.log)

    def __truediv__(self, other: "LogScalar") -> "LogScalar":
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log - other.log)

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log)

    def __pow__(self, exponent) -> "LogScalar":
        if self.sign == 0:
            if exponent == 0:
                return LogScalar.one()
            return LogScalar.zero()
        if self.sign < 0:
            if not isinstance(exponent, int):
                raise InvalidInput("negative base needs an integer exponent")
            sign = -1 if exponent % 2 else 1
        else:
            sign = 1
        return LogScalar(sign, self.log * iv_from(Fraction(exponent)))

    def __add__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.sign != other.sign:
            raise InvalidInput("log-space subtraction of overlapping signs is unsupported")
        # log-sum-exp; valid for either ordering of magnitudes
        log = self.log + iv.log(1 + iv.exp(other.log - self.log))
        return LogScalar(self.sign, log)

    # -- comparison / reporting --------------------------------------------

    def definitely_ge(self, other: "LogScalar") -> bool:
        """Certified ``self >= other``; raises PrecisionExhausted when undecidable."""
        if self.sign > other.sign:
            return True
        if self.sign < other.sign:
            return False
        if self.sign == 0:
            return True  # 0 >= 0
        if self.sign > 0:
            return certify_interval_ge(self.log, other.log)
        return certify_interval_ge(other.log, self.log)

    def log_gap(self, other: "LogScalar") -> float:
        """ln(self) - ln(other) (midpoints) for two positive values, for reports."""
        if self.sign <= 0 or other.sign <= 0:
            raise InvalidInput("log_gap is defined for positive values")
        d = self.log - other.log
        lo, hi = interval_endpoints(d)
        return float((lo + hi) / 2)

    def log10(self) -> float:
        if self.sign == 0:
            return float("-inf")
        lo, hi = interval_endpoints(self.log)
        return float((lo + hi) / 2) / math.log(10)

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogScalar(0)"
        s = "-" if self.sign < 0 else ""
        return f"LogScalar({s}10^{self.log10():.6g})"


# ---------------------------------------------------------------------------
# multinomials and the crude product bound
# ---------------------------------------------------------------------------

def multinomial(parts) -> int:
    """(sum(parts) choose parts) exactly; parts may contain zeros."""
    parts = list(parts)
    if any(p < 0 for p in parts):
        raise InvalidInput("multinomial parts must be non-negative")
    total = 0
    out = 1
    for p in parts:
        total += p
        out *= math.comb(total, p)
    return out


def es_upper(r: int, ks) -> int:
    """The multinomial (sum ks choose k_1, ..., k_r), exactly."""
    ks = list(ks)
    if len(ks) != r:
        raise InvalidInput(f"expected {r} clique sizes, got {len(ks)}")
    if any(k < 1 for k in ks):
        raise InvalidInput("clique sizes must be >= 1")
    return multinomial(ks)


def es_upper_crude(r: int, ks) -> int:
    """The crude form r**sum(ks)."""
    ks = list(ks)
    if len(ks) != r:
        raise InvalidInput(f"expected {r} clique sizes, got {len(ks)}")
    return r ** sum(ks)


# ---------------------------------------------------------------------------
# inequality reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InequalityLink:
    label: str
    description: str
    passes: bool
    exact: bool
    lhs_log10: float
    rhs_log10: float
    log_gap: float

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "description": self.description,
            "pass": self.passes,
            "exact": self.exact,
            "lhs_log10": self.lhs_log10,
            "rhs_log10": self.rhs_log10,
            "slack_log": self.log_gap,
        }


def _rational_link(label: str, desc: str, lhs: Fraction, rhs: Fraction) -> InequalityLink:
    """Exact check lhs >= rhs for rationals, with log10 values for the report."""
    def l10(q):
        q = Fraction(q)
        if q == 0:
            return float("-inf")
        return LogScalar.from_fraction(abs(q)).log10()
    gap = float("inf")
    if lhs > 0 and rhs > 0:
        gap = (LogScalar.from_fraction(lhs) / LogScalar.from_fraction(rhs)).log10() * math.log(10)
    return InequalityLink(label, desc, lhs >= rhs, True, l10(lhs), l10(rhs), gap)


def _log_link(label: str, desc: str, lhs: LogScalar, rhs: LogScalar) -> InequalityLink:
    passes = lhs.definitely_ge(rhs)
    gap = float("nan")
    if lhs.sign > 0 and rhs.sign > 0:
        gap = lhs.log_gap(rhs)
    return InequalityLink(label, desc, passes, False, lhs.log10(), rhs.log10(), gap)


# ---------------------------------------------------------------------------
# appendix bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AppendixReport:
    k: int
    t: int
    r: int
    passes: bool
    identity_ok: bool
    lhs: int
    rhs_log10: float

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "r": self.r,
            "pass": self.passes,
            "identity_ok": self.identity_ok,
            "lhs_log10": LogScalar.from_int(self.lhs).log10(),
            "rhs_log10": self.rhs_log10,
        }


def appendix_check(k: int, t: int, r: int) -> AppendixReport:
    """Verify (rk-t choose k,...,k,k-t) <= e^{-(r-1)t^2/3rk} * r^{rk-t}.

    The left side is an exact integer; the right side is certified through an
    interval upper bound rounded against the inequality.  Also verifies the
    exact telescoping identity
    lhs / (rk choose k,...,k) = prod_{i<t} (k-i)/(rk-i).
    """
    if not (3 <= t <= k) or r < 1:
        raise InvalidInput(f"need 3 <= t <= k and r >= 1, got k={k} t={t} r={r}")
    lhs = multinomial([k] * (r - 1) + [k - t])
    ratio = Fraction(lhs, multinomial([k] * r))
    prod = Fraction(1)
    for i in range(t):
        prod *= Fraction(k - i, r * k - i)
    identity_ok = ratio == prod

    exponent = -Fraction((r - 1) * t * t, 3 * r * k)
    rhs_log = iv_from_fraction(exponent) + (r * k - t) * iv.log(iv_from_int(r))
    lhs_log = iv.log(iv_from_int(lhs))
    passes = certify_interval_ge(rhs_log, lhs_log)
    rhs_log10 = float(sum(interval_endpoints(rhs_log)) / 2) / math.log(10)
    return AppendixReport(k, t, r, passes, identity_ok, lhs, rhs_log10)


# ---------------------------------------------------------------------------
# book-theorem hypotheses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThmBookReport:
    links: tuple[InequalityLink, ...]

    @property
    def all_pass(self) -> bool:
        return all(l.passes for l in self.links)

    def to_json(self) -> dict:
        return {"all_pass": self.all_pass, "hypotheses": [l.to_json() for l in self.links]}


def thm_book_hypotheses(p, mu, t: int, m: int, r: int, size_x, size_ys) -> ThmBookReport:
    """Evaluate the four entry hypotheses of the book theorem in log space."""
    p = Fraction(p)
    mu = Fraction(mu)
    if not 0 < p <= 1:
        raise InvalidInput("p must be in (0, 1]")
    if t < 1 or m < 1 or r < 1:
        raise InvalidInput("t, m, r must be positive")
    size_ys = list(size_ys)
    links = [
        _rational_link("mu", "mu >= 2^10 r^3", mu, Fraction(2**10 * r**3)),
        _rational_link("t", "t >= mu^5 / p", Fraction(t), mu**5 / p),
    ]
    x_need = LogScalar.from_fraction(mu**2 / p) ** (mu * r * t)
    links.append(_log_link("X", "|X| >= (mu^2/p)^(mu r t)", LogScalar.from_int(size_x), x_need))
    y_need_log = (
        iv_from_fraction(Fraction(2**13 * r**3) / mu**2) - iv.log(iv_from_fraction(p))
    ) * t + iv.log(iv_from_int(m))
    y_need = LogScalar.from_log(1, y_need_log)
    for i, sy in enumerate(size_ys):
        links.append(
            _log_link(f"Y{i}", "|Y_i| >= (e^(2^13 r^3/mu^2)/p)^t m", LogScalar.from_int(sy), y_need)
        )
    return ThmBookReport(tuple(links))


# ---------------------------------------------------------------------------
# the headline constant chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Thm51Report:
    r: int
    links: tuple[InequalityLink, ...]

    @property
    def all_pass(self) -> bool:
        return all(l.passes for l in self.links)

    def to_json(self) -> dict:
        return {"r": self.r, "all_pass": self.all_pass, "links": [l.to_json() for l in self.links]}


def thm51_chain(r: int) -> Thm51Report:
    """Check every inequality in the headline constant chain at its stated scale.

    Constants: k = 2^160 r^16, delta = 2^-160 r^-12, eps = 2^-50 r^-4,
    mu = 2^30 r^3, t = 2^-40 r^-3 k, p = 1/r - 2 eps.  Exact rational
    arithmetic wherever both sides are rational, certified intervals
    elsewhere.  Each link reports pass/fail and its log-slack.
    """
    if r < 2:
        raise InvalidInput("need r >= 2")
    k = 2**160 * r**16
    delta = Fraction(1, 2**160 * r**12)
    eps = Fraction(1, 2**50 * r**4)
    mu = 2**30 * r**3
    t = k // (2**40 * r**3)
    assert t * (2**40 * r**3) == k
    p = Fraction(1, r) - 2 * eps

    links: list[InequalityLink] = []

    # (i) t >= mu^5 / p at the threshold scale k
    links.append(_rational_link("i", "t >= mu^5/p at k = 2^160 r^16", Fraction(t), Fraction(mu) ** 5 / p))

    # (ii) the |X| chain: r^(rk/4) >= (2^61 r^7)^(2^-10 r k) >= (mu^2/p)^(mu r t)
    e1 = r * k // 4
    e2 = r * k // 2**10
    lhs_a = LogScalar.from_log(1, e1 * iv.log(iv_from_int(r)))
    rhs_a = LogScalar.from_log(1, e2 * iv.log(iv_from_int(2**61 * r**7)))
    links.append(_log_link("ii-a", "r^(rk/4) >= (2^61 r^7)^(2^-10 rk)", lhs_a, rhs_a))
    exponents_match = mu * r * t == e2
    base_ok = Fraction(2**61 * r**7) >= Fraction(mu) ** 2 / p
    links.append(
        InequalityLink(
            "ii-b",
            "(2^61 r^7)^(2^-10 rk) >= (mu^2/p)^(mu r t): equal exponents, base comparison exact",
            exponents_match and base_ok,
            True,
            float(e2) * math.log10(2**61 * r**7),
            float(mu * r * t) * LogScalar.from_fraction(Fraction(mu) ** 2 / p).log10(),
            float("nan"),
        )
    )

    # (iii) t/8k identity and the exact split 2^-43 >= 2^-47 + 2^-48 (i.e. 32 >= 3)
    ident = (
        Fraction(t, 8 * k) == Fraction(1, 2**43 * r**3)
        and Fraction(2**13 * r**3, mu**2) == Fraction(1, 2**47 * r**3)
        and 4 * eps * r == Fraction(1, 2**48 * r**3)
    )
    split = Fraction(1, 2**43 * r**3) >= Fraction(1, 2**47 * r**3) + Fraction(1, 2**48 * r**3)
    links.append(
        InequalityLink(
            "iii",
            "t/8k = 2^-43 r^-3 = 2^13 r^3/mu^2 + 4 eps r slack: exact identities and 32 >= 3",
            ident and split,
            True,
            -math.log10(2**43 * r**3),
            -math.log10(2**47 * r**3),
            math.log(32.0 / 3.0),
        )
    )

    # (iv) delta <= 2^-10 t^2 / k^2
    links.append(
        _rational_link("iv", "2^-10 t^2/k^2 >= delta", Fraction(1, 2**10) * Fraction(t, k) ** 2, delta)
    )

    # (v) p = 1/r - 2 eps >= e^(-3 eps r)/r, i.e. ln(1 - 2 eps r) + 3 eps r >= 0
    margin = iv.log(iv_from_fraction(1 - 2 * eps * r)) + iv_from_fraction(3 * eps * r)
    links.append(
        InequalityLink(
            "v",
            "p >= e^(-3 eps r)/r",
            certify_interval_ge(margin, iv.mpf(0)),
            False,
            LogScalar.from_fraction(p).log10(),
            LogScalar.from_fraction(p).log10(),
            float(sum(interval_endpoints(margin)) / 2),
        )
    )

    # (vi) the |Y_i| chain: terminal inequality t^2/8k - 4 eps r t >= (2^13 r^3/mu^2) t,
    # plus the page-count comparison delta <= t^2/24k^2 used to reach it
    terminal = Fraction(t, 8 * k) - 4 * eps * r >= Fraction(2**13 * r**3, mu**2)
    page_cmp = delta <= Fraction(t * t, 24 * k * k)
    links.append(
        InequalityLink(
            "vi",
            "|Y_i| chain: t/8k - 4 eps r >= 2^13 r^3/mu^2 and delta <= t^2/24k^2, exact",
            terminal and page_cmp,
            True,
            float(LogScalar.from_fraction(Fraction(t, 8 * k) - 4 * eps * r).log10()),
            float(LogScalar.from_fraction(Fraction(2**13 * r**3, mu**2)).log10()),
            float("nan"),
        )
    )

    return Thm51Report(r, tuple(links))


# ---------------------------------------------------------------------------
# book-size targets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BookTargetReport:
    r: int
    k: int
    t: int
    page_coeff: LogScalar        # e^{-t^2/8k} r^{-t}, the per-n page fraction
    es_bound: LogScalar          # e^{-t^2/6k} r^{rk - t}
    n_threshold: LogScalar       # es_bound / page_coeff
    target_meets_es_at_headline: bool

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "k": self.k,
            "t": self.t,
            "page_coeff_log10": self.page_coeff.log10(),
            "es_bound_log10": self.es_bound.log10(),
            "n_threshold_log10": self.n_threshold.log10(),
            "target_meets_es_at_headline": self.target_meets_es_at_headline,
        }


def book_target_bounds(r: int, k: int, t: int) -> BookTargetReport:
    """Page-count target coefficient and the off-diagonal product bound.

    The coefficient multiplies n; when n >= e^{-delta k} r^{rk} with the
    headline delta = 2^-160 r^-12, the target dominates the product bound
    exactly when delta <= t^2/24k^2, which is reported (and holds at the
    headline scale).
    """
    if not 0 <= t <= k:
        raise InvalidInput("need 0 <= t <= k")
    ln_r = iv.log(iv_from_int(r))
    page_coeff = LogScalar.from_log(1, iv_from_fraction(Fraction(-t * t, 8 * k)) - t * ln_r)
    es_bound = LogScalar.from_log(1, iv_from_fraction(Fraction(-t * t, 6 * k)) + (r * k - t) * ln_r)
    n_threshold = es_bound / page_coeff
    delta51 = Fraction(1, 2**160 * r**12)
    meets = delta51 <= Fraction(t * t, 24 * k * k) if t > 0 else False
    return BookTargetReport(r, k, t, page_coeff, es_bound, n_threshold, meets)
