"""Ideal-limit verdicts at finite horizons.

A sequence x_n has ideal limit L when every superlevel set
{n : |x_n - L| >= eps} belongs to the ideal.  The quantifier over eps is
not finitely checkable, so verdicts are reported per epsilon from a
configured grid and aggregated: CertifiedYes only when every tested
epsilon certifies, CertifiedNo as soon as one refutes.

Dual-filter (I*) convergence certificates are compositional: a certified
witness set F in I* plus finite-horizon subsequence evidence.  The
subsequence half is necessarily "supported at horizon N", never proved,
and the reports say so.  Coideal (I+) limits need not be unique; the
search returns its first success and claims nothing more.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import mpmath

from . import ideals as ids
from . import index_sets as isets
from . import seq_core as seqs
from .errors import IndexOutOfDomain
from .scaling_functions import ScalingFn, g_inverse
from .seq_core import RealSeq
from .values import Value, to_mpf
from .verdicts import Outcome, Verdict, no, undecided, yes

DEFAULT_EPSILONS = (Fraction(1, 2), Fraction(1, 10), Fraction(1, 100))


# ---------------------------------------------------------------------------
# Superlevel sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelSetDescription:
    """{n : |x_n - L| >= eps}: a sampled truncation, plus the exact
    symbolic set when the sequence was built with one."""

    epsilon: Value
    sampled: isets.FiniteSet
    symbolic: Optional[isets.IndexSet]
    horizon: int


def superlevel_set(seq: RealSeq, l: Value | int, eps: Value, n: int) -> LevelSetDescription:
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if n < 1:
        raise IndexOutOfDomain("horizon must be >= 1")
    lv = Fraction(l) if isinstance(l, int) else l
    hits = []
    exact = seq.value_kind.is_exact and isinstance(lv, Fraction) and isinstance(eps, Fraction)
    if exact:
        for k in range(1, n + 1):
            if abs(seq.term_rule(k) - lv) >= eps:
                hits.append(k)
    else:
        bits = (seq.value_kind.precision_bits or 64) + 8
        with mpmath.workprec(bits):
            lf = to_mpf(lv, bits)
            ef = to_mpf(eps, bits)
            for k in range(1, n + 1):
                t = seq.term_rule(k)
                tf = to_mpf(t, bits) if isinstance(t, Fraction) else t
                if abs(tf - lf) >= ef:
                    hits.append(k)
    symbolic = None
    if seq.facts.superlevel is not None:
        symbolic = seq.facts.superlevel(lv, eps)
    return LevelSetDescription(eps, isets.FiniteSet(tuple(hits)), symbolic, n)


# ---------------------------------------------------------------------------
# I-limit verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitRow:
    epsilon: Value
    verdict: Verdict
    level_set: LevelSetDescription


@dataclass(frozen=True)
class LimitReport:
    seq_name: str
    limit: Value
    ideal: str
    rows: tuple[LimitRow, ...]
    overall: Verdict


def ideal_limit_verdict(
    seq: RealSeq,
    l: Value | int,
    ideal: ids.IdealDescriptor,
    eps_list: Iterable[Value] = DEFAULT_EPSILONS,
    n: int = 4096,
) -> LimitReport:
    """Per-epsilon membership of the superlevel sets; no aggregation
    beyond the tested grid."""
    eps_list = list(eps_list)
    if not eps_list:
        raise ValueError("epsilon grid must be nonempty")
    rows = []
    for eps in eps_list:
        ls = superlevel_set(seq, l, eps, n)
        if ls.symbolic is not None:
            mv = ids.membership_verdict(ideal, ls.symbolic)
            rows.append(LimitRow(eps, mv.verdict, ls))
        else:
            trend = len(ls.sampled.elements)
            rows.append(
                LimitRow(
                    eps,
                    undecided("sampled-level-set-only", horizon=n, hits=trend),
                    ls,
                )
            )
    if any(r.verdict.is_no for r in rows):
        overall = no("some-epsilon-refutes", horizon=n)
    elif all(r.verdict.is_yes for r in rows):
        overall = yes("all-tested-epsilons-certify", horizon=n)
    else:
        overall = undecided("incomplete-epsilon-grid", horizon=n)
    return LimitReport(seq.name, l, repr(ideal), tuple(rows), overall)


# ---------------------------------------------------------------------------
# I*-limit evidence and I+-limit search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StarLimitReport:
    """Subsequence evidence along F: sup of |x - L| over the trailing
    half of the enumerated prefix, plus a crude envelope trend.  This is
    finite-horizon support, not a certificate; pair it with a certified
    F in I* for a supported I*-limit claim."""

    set_repr: str
    horizon: int
    trailing_sup: Value
    envelope_nonincreasing: bool
    last_value: Value


def star_limit_check(seq: RealSeq, l: Value | int, f: isets.IndexSet, n: int = 512) -> StarLimitReport:
    lv = Fraction(l) if isinstance(l, int) else l
    bits = (seq.value_kind.precision_bits or 64) + 8
    gaps: list[Value] = []
    with mpmath.workprec(bits):
        lf = to_mpf(lv, bits)
        for j in range(1, n + 1):
            try:
                idx = isets.enumeration(f, j)
            except Exception:
                break
            t = seq.term_rule(idx)
            tf = to_mpf(t, bits) if isinstance(t, Fraction) else to_mpf(t, bits)
            gaps.append(abs(tf - lf))
    if not gaps:
        raise ValueError(f"{f!r} yielded no elements")
    half = len(gaps) // 2
    tail = gaps[half:]
    # envelope trend: running sup over the tail should not grow
    sup_first = max(gaps[: half or 1])
    sup_tail = max(tail)
    return StarLimitReport(repr(f), len(gaps), sup_tail, sup_tail <= sup_first, gaps[-1])


@dataclass(frozen=True)
class PlusLimitReport:
    found: Optional[isets.IndexSet]
    rows: tuple[tuple[str, Verdict, Optional[StarLimitReport]], ...]
    tolerance: Value

    @property
    def succeeded(self) -> bool:
        return self.found is not None


def plus_limit_search(
    seq: RealSeq,
    l: Value | int,
    ideal: ids.IdealDescriptor,
    probes: Iterable[isets.IndexSet],
    n: int = 512,
    tol: Value = Fraction(1, 50),
) -> PlusLimitReport:
    """First probe certified outside the ideal whose subsequence evidence
    is consistent with limit L (trailing sup <= tol); limits of this kind
    need not be unique, and no uniqueness is claimed."""
    probes = list(probes)
    if not probes:
        raise ValueError("probe list must be nonempty")
    rows = []
    found = None
    for a in probes:
        cv = ids.coideal_membership_verdict(ideal, a)
        if not cv.verdict.is_yes:
            rows.append((repr(a), cv.verdict, None))
            continue
        rep = star_limit_check(seq, l, a, n)
        rows.append((repr(a), cv.verdict, rep))
        if found is None and rep.trailing_sup <= to_mpf(tol, 64):
            found = a
    return PlusLimitReport(found, tuple(rows), tol)


# ---------------------------------------------------------------------------
# Cesaro means
# ---------------------------------------------------------------------------


def cesaro_mean(seq: RealSeq, n: int) -> Value:
    """(a_1 + 2 a_2 + ... + n a_n) / n, exact in the rational tower."""
    if n < 1:
        raise IndexOutOfDomain("cesaro horizon must be >= 1")
    if seq.value_kind.is_exact:
        total = Fraction(0)
        for k in range(1, n + 1):
            total += k * seq.term_rule(k)
        return total / n
    bits = (seq.value_kind.precision_bits or 64) + 16
    with mpmath.workprec(bits):
        total_f = mpmath.mpf(0)
        for k in range(1, n + 1):
            t = seq.term_rule(k)
            total_f += k * (to_mpf(t, bits) if isinstance(t, Fraction) else t)
        return +(total_f / n)


def cesaro_means_prefix(seq: RealSeq, n: int) -> Iterable[Value]:
    """All means for 1..n with one accumulation pass (exact tower)."""
    if seq.value_kind.is_exact:
        total = Fraction(0)
        for k in range(1, n + 1):
            total += k * seq.term_rule(k)
            yield total / k
    else:
        bits = (seq.value_kind.precision_bits or 64) + 16
        with mpmath.workprec(bits):
            total_f = mpmath.mpf(0)
            for k in range(1, n + 1):
                t = seq.term_rule(k)
                total_f += k * (to_mpf(t, bits) if isinstance(t, Fraction) else t)
                yield +(total_f / k)


# ---------------------------------------------------------------------------
# The generalized transform
# ---------------------------------------------------------------------------


def olivier_transform(
    a: RealSeq,
    c: RealSeq,
    g: ScalingFn,
    tol: Value = Fraction(1, 10**30),
) -> RealSeq:
    """n -> c_n * g^{-1}(a_n), with the classical shortcut n * a_n when
    c is the index sequence and g is the identity power."""
    if g.name in ("power:1", "power:1/1") and c.facts.is_index:
        out = seqs.pointwise_product(c, a)
        return seqs.RealSeq(
            f"n*{a.name}",
            out.term_rule,
            out.value_kind,
            seqs.SeqFacts(
                nonnegative=a.facts.nonnegative,
                nonincreasing=a.facts.transform_nonincreasing,
                superlevel=a.facts.superlevel,
            ),
        )

    exact_mode = a.value_kind.is_exact and c.value_kind.is_exact and g.exact_inverse is not None

    def rule(n: int) -> Value:
        an = a.term_rule(n)
        cn = c.term_rule(n)
        inv = g_inverse(g, an, tol)  # exact shortcut first, bisection otherwise
        if isinstance(inv, Fraction) and isinstance(cn, Fraction):
            return cn * inv
        bits = max(a.value_kind.precision_bits or 64, 64)
        with mpmath.workprec(bits):
            return +(to_mpf(cn, bits) * to_mpf(inv, bits))

    kind = seqs.EXACT if exact_mode else seqs.float_kind(a.value_kind.precision_bits or 128)
    return seqs.RealSeq(f"{c.name}*{g.name}^-1({a.name})", rule, kind, seqs.SeqFacts())
