"""Per-step invariant monitors over engine traces.

Every monitor re-derives its inequality from the recorded exact rationals
(or, where a side is irrational, from a directed interval enclosure rounded
against the inequality), checks it at every state of the trace, and raises
LemmaViolation on the first failure.  Monitors whose stated hypotheses fail
report themselves as skipped instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv

from .book_engine import KIND_BOOST, KIND_COLOUR, Trace
from .errors import LemmaViolation
from .geometry import default_beta
from .bounds import (
    certify_interval_ge,
    interval_endpoints,
    iv_from_fraction,
    iv_from_int,
)


@dataclass
class MonitorReport:
    lemma: str
    ok: bool
    skipped: bool = False
    reason: str | None = None
    checked: int = 0
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "ok": self.ok,
            "skipped": self.skipped,
            "reason": self.reason,
            "checked": self.checked,
            "violations": self.violations,
        }


def _states(trace: Trace):
    """Yield (s, x_size, y_sizes, t_sizes, densities) for s = 0..len(records)."""
    h = trace.header
    yield 0, h.initial_x_size, h.initial_y_sizes, (0,) * h.r, h.initial_densities
    for rec in trace.records:
        yield rec.s + 1, rec.x_size, rec.y_sizes, rec.t_sizes, rec.densities


def _boost_lams(trace: Trace, colour: int | None, upto: int) -> list[Fraction]:
    """lambda values of the boost steps before state `upto` (all colours if None)."""
    out = []
    for rec in trace.records[:upto]:
        if rec.kind == KIND_BOOST and (colour is None or rec.witness_colour == colour):
            out.append(rec.lam)
    return out


def _violation(lemma: str, s: int, colour, lhs, rhs, strict: bool, report: MonitorReport):
    entry = {"s": s, "colour": colour, "lhs": str(lhs), "rhs": str(rhs)}
    if strict:
        raise LemmaViolation(f"{lemma} fails at s={s}, i={colour}: {lhs} < {rhs}", context=entry)
    report.ok = False
    report.violations.append(entry)


def check_lemma_41(trace: Trace, strict: bool = True) -> MonitorReport:
    """p_i(s) - p_0 + delta >= delta (1 - 1/t)^t prod_{boosts j in colour i} (1 + lam(j)/t)."""
    h = trace.header
    rep = MonitorReport("4.1", True)
    base = h.delta * (1 - Fraction(1, h.t)) ** h.t
    for s, _x, _ys, _ts, dens in _states(trace):
        if dens is None:
            continue
        for i in range(h.r):
            rhs = base
            for lam in _boost_lams(trace, i, s):
                rhs *= 1 + lam / h.t
            lhs = dens[i] - h.p0 + h.delta
            rep.checked += 1
            if lhs < rhs:
                _violation("Lemma 4.1", s, i, lhs, rhs, strict, rep)
    return rep


def check_lemma_42(trace: Trace, strict: bool = True) -> MonitorReport:
    """p_i(s) >= p_0 - 3 delta/4 and alpha_i(s) >= delta/4t; needs t >= 2."""
    h = trace.header
    rep = MonitorReport("4.2", True)
    if h.t < 2:
        rep.skipped = True
        rep.reason = "requires t >= 2"
        return rep
    p_floor = h.p0 - Fraction(3, 4) * h.delta
    a_floor = h.delta / (4 * h.t)
    for s, _x, _ys, _ts, dens in _states(trace):
        if dens is None:
            continue
        for i in range(h.r):
            rep.checked += 1
            if dens[i] < p_floor:
                _violation("Lemma 4.2 (density)", s, i, dens[i], p_floor, strict, rep)
            alpha = (dens[i] - h.p0 + h.delta) / h.t
            if alpha < a_floor:
                _violation("Lemma 4.2 (alpha)", s, i, alpha, a_floor, strict, rep)
    return rep


def check_lemma_43(trace: Trace, strict: bool = True) -> MonitorReport:
    """|B_i(s)| <= (4 log(1/delta)/lambda_0) t; needs t >= lambda_0 > 0, delta <= 1/4."""
    h = trace.header
    rep = MonitorReport("4.3", True)
    if h.lambda0 <= 0 or h.t < h.lambda0 or h.delta > Fraction(1, 4):
        rep.skipped = True
        rep.reason = "requires t >= lambda0 > 0 and delta <= 1/4"
        return rep
    bound = 4 * (-iv.log(iv_from_fraction(h.delta))) * h.t / iv_from_fraction(h.lambda0)
    nstates = len(trace.records) + 1
    for i in range(h.r):
        count = len(_boost_lams(trace, i, nstates - 1))
        rep.checked += 1
        if not certify_interval_ge(bound, iv_from_int(count)):
            lo, _hi = interval_endpoints(bound)
            _violation("Lemma 4.3", nstates - 1, i, count, float(lo), strict, rep)
    return rep


def check_lemma_44(trace: Trace, strict: bool = True) -> MonitorReport:
    """|Y_i(s)| >= (p_0 - 3 delta/4)^(t + |B_i(s)|) |Y_i(0)|; needs t >= 2, p_0 > 3 delta/4."""
    h = trace.header
    rep = MonitorReport("4.4", True)
    base = h.p0 - Fraction(3, 4) * h.delta
    if h.t < 2 or base <= 0:
        rep.skipped = True
        rep.reason = "requires t >= 2 and p0 > 3 delta/4"
        return rep
    for s, _x, ys, _ts, _dens in _states(trace):
        for i in range(h.r):
            boosts = len(_boost_lams(trace, i, s))
            rhs = base ** (h.t + boosts) * h.initial_y_sizes[i]
            rep.checked += 1
            if ys[i] < rhs:
                _violation("Lemma 4.4", s, i, ys[i], rhs, strict, rep)
    return rep


def _check_45(trace: Trace, strict: bool, rep: MonitorReport) -> None:
    h = trace.header
    beta = default_beta(h.r)
    c_iv = 4 * iv.sqrt(iv_from_int(h.r**3))
    eps = iv_from_fraction(Fraction(beta, h.r)) * iv.exp(-c_iv * iv.sqrt(iv_from_fraction(h.lambda0 + 1)))
    rt = h.r * h.t
    for s, x_size, _ys, _ts, _dens in _states(trace):
        lams = _boost_lams(trace, None, s)
        decay = iv.exp(-c_iv * sum((iv.sqrt(iv_from_fraction(lam + 1)) for lam in lams), iv.mpf(0)))
        rhs = eps ** (rt + len(lams)) * decay * h.initial_x_size - rt
        rep.checked += 1
        if not certify_interval_ge(iv_from_int(x_size), rhs):
            _lo, hi = interval_endpoints(rhs)
            _violation("Lemma 4.5", s, None, x_size, float(hi), strict, rep)


def _check_46(trace: Trace, strict: bool, rep: MonitorReport) -> None:
    h = trace.header
    bound = (
        7 * h.r * (-iv.log(iv_from_fraction(h.delta))) * h.t / iv.sqrt(iv_from_fraction(h.lambda0))
    )
    nstates = len(trace.records) + 1
    lams = _boost_lams(trace, None, nstates - 1)
    total = sum((iv.sqrt(iv_from_fraction(lam)) for lam in lams), iv.mpf(0))
    rep.checked += 1
    if not certify_interval_ge(bound, total):
        lo, _hi = interval_endpoints(bound)
        _lo2, hi2 = interval_endpoints(total)
        _violation("Lemma 4.6", nstates - 1, None, float(hi2), float(lo), strict, rep)


def check_lemma_45_46(trace: Trace, strict: bool = True) -> list[MonitorReport]:
    """The reservoir-size lower bound (4.5, unconditional) and the boost
    lambda-sum bound (4.6, needs t >= lambda0/delta > 0 and delta <= 1/4)."""
    h = trace.header
    rep45 = MonitorReport("4.5", True)
    _check_45(trace, strict, rep45)
    rep46 = MonitorReport("4.6", True)
    if h.lambda0 <= 0 or h.delta > Fraction(1, 4) or h.t < h.lambda0 / h.delta:
        rep46.skipped = True
        rep46.reason = "requires t >= lambda0/delta > 0 and delta <= 1/4"
    else:
        _check_46(trace, strict, rep46)
    return [rep45, rep46]


def validate_trace_structure(trace: Trace, strict: bool = True) -> MonitorReport:
    """Structural soundness of a trace, independent of the colouring.

    Checks the colour/boost dichotomy against lambda_0, that exactly one Y
    set changes per round and shrinks to exactly p_j(s)|Y_j(s)|, that X
    strictly shrinks, and that exactly the stepped spine grows by one on
    colour steps.
    """
    h = trace.header
    rep = MonitorReport("structure", True)
    states = list(_states(trace))
    for idx, rec in enumerate(trace.records):
        s, x_size, y_sizes, t_sizes, dens = states[idx]
        s2, x2, y2, t2, _ = states[idx + 1]
        rep.checked += 1

        def bad(msg):
            entry = {"s": rec.s, "problem": msg}
            if strict:
                raise LemmaViolation(f"trace structure: {msg} at s={rec.s}", context=entry)
            rep.ok = False
            rep.violations.append(entry)

        if rec.kind == KIND_COLOUR and rec.lam > h.lambda0:
            bad("colour step with lambda > lambda0")
        if rec.kind == KIND_BOOST and rec.lam <= h.lambda0:
            bad("boost step with lambda <= lambda0")
        if x2 >= x_size:
            bad("X did not strictly shrink")
        changed = [i for i in range(h.r) if y2[i] != y_sizes[i]]
        target = rec.chosen_colour if rec.kind == KIND_COLOUR else rec.witness_colour
        if rec.kind == KIND_COLOUR and rec.chosen_colour is None:
            bad("colour step without a chosen colour")
        if changed and changed != [target]:
            bad(f"Y sets {changed} changed; only {target} may change")
        if dens is not None and y2[target] != dens[target] * y_sizes[target]:
            bad("|Y'| != p_j(s) |Y_j(s)|")
        grew = [i for i in range(h.r) if t2[i] != t_sizes[i]]
        if rec.kind == KIND_COLOUR:
            if grew != [rec.chosen_colour] or t2[rec.chosen_colour] != t_sizes[rec.chosen_colour] + 1:
                bad("spine growth mismatch on colour step")
        elif grew:
            bad("spine grew on a boost step")
        if dens is not None and rec.densities is not None:
            for i in range(h.r):
                if i != target and rec.densities[i] < dens[i]:
                    bad(f"p_{i} decreased although Y_{i} was untouched")
    return rep


def run_all_monitors(trace: Trace, strict: bool = False) -> list[MonitorReport]:
    reports = [
        validate_trace_structure(trace, strict),
        check_lemma_41(trace, strict),
        check_lemma_42(trace, strict),
        check_lemma_43(trace, strict),
        check_lemma_44(trace, strict),
    ]
    reports.extend(check_lemma_45_46(trace, strict))
    return reports
