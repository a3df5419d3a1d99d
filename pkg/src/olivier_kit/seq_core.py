"""Lazy real sequences, partial sums and the certified series engine.

A sequence is a pure term rule ``n -> value`` (n >= 1) plus a value
tower tag and a bag of structural facts.  The facts are construction
contracts, not sampled observations: an ``upper_envelope=(C, p, n0)``
entry promises ``|a_n| <= C * n^-p`` for every ``n >= n0`` and it is the
constructor's job to only assert what it can prove.  The series engine
turns those facts into three-valued verdicts; without facts the honest
answer is ``Undecided``.

Signed sequences are analyzed through absolute values (if the weighted
terms tend to zero ideally in absolute value they do so with signs);
conditional convergence is only handled by the Cesaro route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterator, Optional

import mpmath

from . import index_sets as isets
from .errors import IndexOutOfDomain, LengthMismatch, NormalizeZero
from .values import DEFAULT_PRECISION_BITS, EXACT, Value, ValueKind, float_kind, to_mpf, widest
from .verdicts import Outcome, Verdict, no, undecided, yes

DEFAULT_HORIZON = 10_000

# ---------------------------------------------------------------------------
# Sequence descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelSetBounds:
    """Certified descriptions of a superlevel set {n : |x_n - L| >= eps}.

    ``exact`` is the set itself; ``inner``/``outer`` are certified
    subset/superset approximations (enough for refutation/confirmation
    of ideal membership respectively when the exact shape is unwieldy).
    """

    exact: Optional[isets.IndexSet] = None
    inner: Optional[isets.IndexSet] = None
    outer: Optional[isets.IndexSet] = None


@dataclass(frozen=True)
class SeqFacts:
    """Structural facts a constructor certifies about its sequence.

    weight_family tags feed the ideal membership engine:
      ("power", p)                 a_n = n^-p
      ("indicator_power", A, p)    a_n = n^-p on A, 0 off A
      ("log_reciprocal",)          a_n = 1/ln(n+1)
      ("fx", X)                    a_n = f_X(n)
    """

    nonnegative: bool = False
    nonincreasing: bool = False
    nonincreasing_on: Optional[isets.IndexSet] = None
    upper_envelope: tuple[Fraction, Fraction, int] | None = None
    lower_envelope: tuple[Fraction, Fraction, int] | None = None
    condensed: Optional["RealSeq"] = None
    weight_family: tuple | None = None
    superlevel: Callable[[Value, Value], Optional[LevelSetBounds]] | None = field(
        default=None, compare=False, repr=False
    )
    series_tail_rule: Callable[[int], Value] | None = field(default=None, compare=False, repr=False)
    l1_total_exact: Fraction | None = None
    transform_nonincreasing: bool = False
    is_index: bool = False
    is_constant_one: bool = False


@dataclass(frozen=True)
class RealSeq:
    """Immutable lazy sequence; operations are pure functions of it."""

    name: str
    term_rule: Callable[[int], Value] = field(compare=False, repr=False)
    value_kind: ValueKind = EXACT
    facts: SeqFacts = field(default_factory=SeqFacts)

    def __repr__(self) -> str:
        return f"RealSeq({self.name}, {self.value_kind.label()})"


@dataclass(frozen=True)
class SeriesReport:
    """Convergence report at a finite horizon.

    When all terms are nonnegative and ``tail_bound`` is present, the
    full series is at most ``partial_sum + tail_bound``; the verdict is
    CertifiedYes only under that condition.
    """

    horizon: int
    partial_sum: Value
    tail_bound: Value | None
    verdict: Verdict


def term(seq: RealSeq, n: int) -> Value:
    if n < 1:
        raise IndexOutOfDomain(f"sequence index {n} < 1")
    return seq.term_rule(n)


def terms(seq: RealSeq, upto: int) -> Iterator[Value]:
    for n in range(1, upto + 1):
        yield seq.term_rule(n)


# ---------------------------------------------------------------------------
# Sums
# ---------------------------------------------------------------------------


def partial_sum(seq: RealSeq, n: int) -> Value:
    """Sum of terms 1..n in the sequence's own tower (exact for rationals)."""
    if n < 1:
        raise IndexOutOfDomain(f"partial sum horizon {n} < 1")
    if seq.value_kind.is_exact:
        total = Fraction(0)
        for t in terms(seq, n):
            if t:
                total += t
        return total
    bits = (seq.value_kind.precision_bits or DEFAULT_PRECISION_BITS) + 16
    with mpmath.workprec(bits):
        total_f = mpmath.mpf(0)
        for t in terms(seq, n):
            total_f += to_mpf(t, bits) if isinstance(t, Fraction) else t
        return +total_f


def partial_sums_prefix(seq: RealSeq, n: int) -> Iterator[Value]:
    """Running sums S_1..S_n with a single accumulation pass."""
    if seq.value_kind.is_exact:
        total = Fraction(0)
        for t in terms(seq, n):
            total += t
            yield total
    else:
        bits = (seq.value_kind.precision_bits or DEFAULT_PRECISION_BITS) + 16
        with mpmath.workprec(bits):
            total_f = mpmath.mpf(0)
            for t in terms(seq, n):
                total_f += to_mpf(t, bits) if isinstance(t, Fraction) else t
                yield +total_f


def partial_sum_approx(seq: RealSeq, n: int, absolute: bool = False) -> float:
    """Fast compensated double-precision sum, for report evidence at
    horizons where exact accumulation is out of reach."""
    total = 0.0
    comp = 0.0
    rule = seq.term_rule
    for k in range(1, n + 1):
        t = rule(k)
        v = float(t.numerator) / t.denominator if isinstance(t, Fraction) else float(t)
        if absolute and v < 0:
            v = -v
        y = v - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def p_series(p: Fraction | int, precision_bits: int = DEFAULT_PRECISION_BITS) -> RealSeq:
    """a_n = n^-p.  Exact tower for integer p >= 0, floats otherwise."""
    p = Fraction(p)
    env = (Fraction(1), p, 1)
    facts = SeqFacts(
        nonnegative=True,
        nonincreasing=p >= 0,
        upper_envelope=env,
        lower_envelope=env,
        weight_family=("power", p),
    )
    if p.denominator == 1 and p >= 0:
        e = int(p)
        return RealSeq(f"1/n^{e}" if e != 1 else "1/n", lambda n: Fraction(1, n**e), EXACT, facts)

    def rule(n: int) -> mpmath.mpf:
        with mpmath.workprec(precision_bits):
            return mpmath.mpf(n) ** to_mpf(-p, precision_bits)

    return RealSeq(f"1/n^{p}", rule, float_kind(precision_bits), facts)


def harmonic() -> RealSeq:
    return p_series(1)


def reciprocal_on(a: isets.IndexSet, name: str | None = None) -> RealSeq:
    """a_n = 1/n for n in A, 0 otherwise (exact)."""
    return indicator_power_seq(a, Fraction(1), name=name)


def indicator_power_seq(a: isets.IndexSet, p: Fraction | int, name: str | None = None) -> RealSeq:
    p = Fraction(p)
    if p.denominator != 1:
        raise ValueError("indicator power sequences are exact; p must be a nonnegative integer")
    e = int(p)

    def rule(n: int) -> Fraction:
        return Fraction(1, n**e) if isets.member(a, n) else Fraction(0)

    tail = isets.power_tail_bound(a, p, 1)
    facts = SeqFacts(
        nonnegative=True,
        upper_envelope=(Fraction(1), p, 1),
        weight_family=("indicator_power", a, p),
        series_tail_rule=(lambda n: isets.power_tail_bound(a, p, n)) if tail is not None else None,
    )
    return RealSeq(name or f"n^-{e} on {a!r}", rule, EXACT, facts)


def alternating_harmonic() -> RealSeq:
    return RealSeq(
        "(-1)^n/n",
        lambda n: Fraction((-1) ** n, n),
        EXACT,
        SeqFacts(upper_envelope=(Fraction(1), Fraction(1), 1)),
    )


def constant(c: Fraction | int, name: str | None = None) -> RealSeq:
    c = Fraction(c)
    return RealSeq(
        name or f"const {c}",
        lambda n: c,
        EXACT,
        SeqFacts(nonnegative=c >= 0, nonincreasing=True, is_constant_one=(c == 1)),
    )


def zero_seq() -> RealSeq:
    return RealSeq("0", lambda n: Fraction(0), EXACT, SeqFacts(nonnegative=True, nonincreasing=True))


def index_sequence() -> RealSeq:
    """c_n = n, the classical scaling for the n*a_n transform."""
    return RealSeq("n", lambda n: Fraction(n), EXACT, SeqFacts(nonnegative=True, is_index=True))


def harmonic_log(precision_bits: int = DEFAULT_PRECISION_BITS) -> RealSeq:
    """a_n = 1/(n*ln(n+1)): the canonical divergent condensation example."""

    def rule(n: int) -> mpmath.mpf:
        with mpmath.workprec(precision_bits):
            return 1 / (mpmath.mpf(n) * mpmath.ln(mpmath.mpf(n + 1)))

    def cond_rule(k: int) -> mpmath.mpf:
        # 2^k * a(2^k) = 1/ln(2^k + 1)
        with mpmath.workprec(precision_bits):
            return 1 / mpmath.ln(mpmath.mpf(2) ** k + 1)

    condensed = RealSeq(
        "1/ln(2^k+1)",
        cond_rule,
        float_kind(precision_bits),
        # ln(2^k+1) <= (k+1)*ln 2 <= 2k*ln 2, so the terms dominate 0.72/k
        SeqFacts(nonnegative=True, nonincreasing=True, lower_envelope=(Fraction(72, 100), Fraction(1), 1)),
    )
    return RealSeq(
        "1/(n*ln(n+1))",
        rule,
        float_kind(precision_bits),
        SeqFacts(nonnegative=True, nonincreasing=True, condensed=condensed),
    )


def olivier_positive(precision_bits: int = DEFAULT_PRECISION_BITS) -> RealSeq:
    """a_n = 1/(n*ln(n+1)^2): monotone, summable by condensation, and the
    transform n*a_n = 1/ln(n+1)^2 decays to zero like the classical test
    promises."""

    def rule(n: int) -> mpmath.mpf:
        with mpmath.workprec(precision_bits):
            return 1 / (mpmath.mpf(n) * mpmath.ln(mpmath.mpf(n + 1)) ** 2)

    def cond_rule(k: int) -> mpmath.mpf:
        with mpmath.workprec(precision_bits):
            return 1 / mpmath.ln(mpmath.mpf(2) ** k + 1) ** 2

    condensed = RealSeq(
        "1/ln(2^k+1)^2",
        cond_rule,
        float_kind(precision_bits),
        # ln(2^k+1) >= k*ln 2, so the terms are below (1/ln^2 2) * k^-2 < 2.09*k^-2
        SeqFacts(nonnegative=True, nonincreasing=True, upper_envelope=(Fraction(209, 100), Fraction(2), 1)),
    )
    return RealSeq(
        "1/(n*ln(n+1)^2)",
        rule,
        float_kind(precision_bits),
        SeqFacts(nonnegative=True, nonincreasing=True, condensed=condensed, transform_nonincreasing=True),
    )


def log_reciprocal_weights(precision_bits: int = DEFAULT_PRECISION_BITS) -> RealSeq:
    """d_n = 1/ln(n+1): weights of a summable ideal strictly below the
    reciprocal one (ln(n+1) <= n gives d_n >= 1/n)."""

    def rule(n: int) -> mpmath.mpf:
        with mpmath.workprec(precision_bits):
            return 1 / mpmath.ln(mpmath.mpf(n + 1))

    return RealSeq(
        "1/ln(n+1)",
        rule,
        float_kind(precision_bits),
        SeqFacts(
            nonnegative=True,
            nonincreasing=True,
            lower_envelope=(Fraction(1), Fraction(1), 1),
            weight_family=("log_reciprocal",),
        ),
    )


def fx_weights(x: isets.IndexSet, name: str | None = None) -> RealSeq:
    """The block step weights f_X; each block (x_{k-1}, x_k] sums to 1."""
    facts = SeqFacts(
        nonnegative=True,
        nonincreasing=True,
        upper_envelope=(Fraction(1), Fraction(1), 1),  # f_X(n) <= 1/n since n <= x_k on its block
        weight_family=("fx", x),
    )
    return RealSeq(name or f"f_{x!r}", lambda n: isets.f_x(x, n), EXACT, facts)


def from_rule(
    name: str,
    rule: Callable[[int], Value],
    value_kind: ValueKind = EXACT,
    facts: SeqFacts | None = None,
) -> RealSeq:
    return RealSeq(name, rule, value_kind, facts or SeqFacts())


# ---------------------------------------------------------------------------
# Pointwise algebra
# ---------------------------------------------------------------------------


def linear_combination(coeffs: list[Value | int], seqs: list[RealSeq]) -> RealSeq:
    if not coeffs or not seqs:
        raise LengthMismatch("linear_combination needs nonempty coefficient and sequence lists")
    if len(coeffs) != len(seqs):
        raise LengthMismatch(f"{len(coeffs)} coefficients vs {len(seqs)} sequences")
    coeffs = [Fraction(c) if isinstance(c, int) else c for c in coeffs]
    coeff_kinds = [EXACT if isinstance(c, Fraction) else float_kind(mpmath.mp.prec) for c in coeffs]
    kind = widest(*(s.value_kind for s in seqs), *coeff_kinds)

    if len(seqs) == 1 and coeffs[0] == 1:
        return seqs[0]

    def rule(n: int) -> Value:
        if kind.is_exact:
            return sum((c * s.term_rule(n) for c, s in zip(coeffs, seqs)), Fraction(0))
        bits = kind.precision_bits or DEFAULT_PRECISION_BITS
        with mpmath.workprec(bits + 8):
            total = mpmath.mpf(0)
            for c, s in zip(coeffs, seqs):
                cv = to_mpf(c, bits + 8) if isinstance(c, Fraction) else c
                tv = s.term_rule(n)
                total += cv * (to_mpf(tv, bits + 8) if isinstance(tv, Fraction) else tv)
            return +total

    nonneg = all(s.facts.nonnegative for s in seqs) and all(c >= 0 for c in coeffs)
    name = " + ".join(f"{c}*{s.name}" for c, s in zip(coeffs, seqs))
    return RealSeq(name, rule, kind, SeqFacts(nonnegative=nonneg))


def scale(seq: RealSeq, c: Value) -> RealSeq:
    """c * seq, preserving envelope and family facts where they survive."""
    out = linear_combination([c], [seq])
    f = seq.facts
    keep = SeqFacts(
        nonnegative=f.nonnegative and c >= 0,
        nonincreasing=f.nonincreasing and c >= 0,
        nonincreasing_on=f.nonincreasing_on if c >= 0 else None,
    )
    if isinstance(c, Fraction) and c > 0:
        cu = f.upper_envelope
        cl = f.lower_envelope
        keep = replace(
            keep,
            upper_envelope=(cu[0] * c, cu[1], cu[2]) if cu else None,
            lower_envelope=(cl[0] * c, cl[1], cl[2]) if cl else None,
        )
        if f.series_tail_rule is not None:
            rule = f.series_tail_rule
            keep = replace(keep, series_tail_rule=lambda n: c * rule(n))
        if f.l1_total_exact is not None:
            keep = replace(keep, l1_total_exact=f.l1_total_exact * c)
    return replace(out, facts=keep, name=f"{c}*{seq.name}")


def pointwise_product(a: RealSeq, b: RealSeq) -> RealSeq:
    """Termwise product with family-aware simplification."""
    if a.facts.is_constant_one:
        return b
    if b.facts.is_constant_one:
        return a
    # the n * (n^-p on A) shortcut keeps the family exact
    for x, y in ((a, b), (b, a)):
        if x.facts.is_index and y.facts.weight_family:
            fam = y.facts.weight_family
            if fam[0] == "power":
                return p_series(fam[1] - 1)
            if fam[0] == "indicator_power" and fam[2] >= 1:
                return indicator_power_seq(fam[1], fam[2] - 1, name=f"n*{y.name}")
    kind = widest(a.value_kind, b.value_kind)

    def rule(n: int) -> Value:
        ta, tb = a.term_rule(n), b.term_rule(n)
        if kind.is_exact:
            return ta * tb
        bits = kind.precision_bits or DEFAULT_PRECISION_BITS
        with mpmath.workprec(bits + 8):
            fa = to_mpf(ta, bits + 8) if isinstance(ta, Fraction) else ta
            fb = to_mpf(tb, bits + 8) if isinstance(tb, Fraction) else tb
            return +(fa * fb)

    facts = SeqFacts(nonnegative=a.facts.nonnegative and b.facts.nonnegative)
    ua, ub = a.facts.upper_envelope, b.facts.upper_envelope
    if ua and ub:
        facts = replace(facts, upper_envelope=(ua[0] * ub[0], ua[1] + ub[1], max(ua[2], ub[2])))
    la, lb = a.facts.lower_envelope, b.facts.lower_envelope
    if la and lb and facts.nonnegative:
        facts = replace(facts, lower_envelope=(la[0] * lb[0], la[1] + lb[1], max(la[2], lb[2])))
    return RealSeq(f"({a.name})*({b.name})", rule, kind, facts)


def absolute(seq: RealSeq) -> RealSeq:
    if seq.facts.nonnegative:
        return seq

    def rule(n: int) -> Value:
        t = seq.term_rule(n)
        return -t if t < 0 else t

    return RealSeq(
        f"|{seq.name}|",
        rule,
        seq.value_kind,
        replace(seq.facts, nonnegative=True),
    )


# ---------------------------------------------------------------------------
# The series verdict engine
# ---------------------------------------------------------------------------


def series_verdict(
    seq: RealSeq,
    weights: RealSeq | None = None,
    horizon: int = DEFAULT_HORIZON,
    _depth: int = 0,
) -> SeriesReport:
    """Three-valued convergence verdict for sum(weights_n * seq_n).

    Rules fire in order: p-series comparison via envelopes, Cauchy
    condensation for monotone sequences, certified structured tails
    (restricted reciprocals, block steps, explicit tail rules); anything
    else is Undecided with the partial sum at the horizon as evidence.
    Signed input is downgraded to absolute values, noted in evidence.
    """
    work = seq if weights is None else pointwise_product(weights, seq)
    note = {}
    if not work.facts.nonnegative:
        work = absolute(work)
        note["signed"] = "absolute-value analysis"
    f = work.facts

    # 1. closed-form p-series comparison
    if f.upper_envelope is not None:
        c, p, n0 = f.upper_envelope
        if p > 1:
            n = max(horizon, n0)
            tail = c * isets.power_tail_bound(isets.all_naturals(), p, n)
            return _report(work, n, tail, yes("p-series-comparison", C=str(c), p=str(p)))
    if f.lower_envelope is not None and f.nonnegative:
        c, p, n0 = f.lower_envelope
        if p <= 1:
            return _report(work, horizon, None, no("p-series-comparison", C=str(c), p=str(p)))

    # 2. Cauchy condensation for monotone sequences
    if f.nonnegative and f.nonincreasing and f.condensed is not None and _depth == 0:
        sub = series_verdict(f.condensed, horizon=max(32, horizon.bit_length() * 2), _depth=1)
        if sub.verdict.is_no:
            return _report(work, horizon, None, no("cauchy-condensation", via=f.condensed.name))
        if sub.verdict.is_yes:
            cu = f.condensed.facts.upper_envelope
            if cu is not None and cu[1] > 1:
                m = max(horizon.bit_length() - 1, cu[2] + 1, 2)
                # sum_{n > 2^m} a_n <= sum_{k >= m} 2^k a_{2^k}
                tail = cu[0] * (isets.power_tail_bound(isets.all_naturals(), cu[1], m - 1))
                n = max(horizon, 2**m)
                return _report(work, n, tail, yes("cauchy-condensation", via=f.condensed.name))

    # 3. certified structured tails
    if f.series_tail_rule is not None and f.nonnegative:
        tail = f.series_tail_rule(horizon)
        if tail is not None:
            return _report(work, horizon, tail, yes("structured-tail-rule"))
    fam = f.weight_family
    if fam is not None and f.nonnegative:
        if fam[0] == "indicator_power":
            _, a, p = fam
            bound = isets.power_tail_bound(a, p, horizon)
            if bound is not None:
                return _report(work, horizon, bound, yes("restricted-power-tail", p=str(p)))
            rule = isets.power_divergent(a, p)
            if rule is not None:
                return _report(work, horizon, None, no(rule, p=str(p)))
        if fam[0] == "fx":
            # each block contributes exactly 1, so the full series diverges
            return _report(work, horizon, None, no("block-identity: every block sums to 1"))

    ps = partial_sum_approx(work, horizon)
    return _report(
        work,
        horizon,
        None,
        undecided("no-rule-applies", horizon=horizon, partial=f"{ps:.6g}", **note),
    )


def _report(seq: RealSeq, horizon: int, tail: Value | None, verdict: Verdict) -> SeriesReport:
    ps = partial_sum_approx(seq, min(horizon, 200_000))
    with mpmath.workprec(64):
        return SeriesReport(horizon, mpmath.mpf(ps), tail, verdict)


# ---------------------------------------------------------------------------
# l^1 machinery
# ---------------------------------------------------------------------------


def l1_norm_partial(seq: RealSeq, n: int) -> SeriesReport:
    """Partial sum of |terms| with a certified tail when structure permits."""
    work = absolute(seq)
    partial = partial_sum(work, n)
    f = seq.facts
    tail: Value | None = None
    if f.l1_total_exact is not None and isinstance(partial, Fraction):
        tail = f.l1_total_exact - partial
    elif f.series_tail_rule is not None:
        tail = f.series_tail_rule(n)
    if tail is not None:
        v = yes("l1-tail-rule", horizon=n)
    else:
        v = undecided("no-tail-rule", horizon=n)
    return SeriesReport(n, partial, tail, v)


@dataclass(frozen=True)
class NormalizedSeq:
    """b = a / S with S a certified rational upper bound on ||a||.

    ``exact_norm`` marks the cases where S equals the norm exactly
    (geometric supports); then ||b|| = 1, otherwise ||b|| <= 1 certified.
    """

    seq: RealSeq
    divisor: Fraction
    exact_norm: bool


def normalize(seq: RealSeq, horizon: int = 4096) -> NormalizedSeq:
    """Divide by a certified upper bound on the l^1 norm.

    Needs a structured tail (series_tail_rule or exact total); raises
    NormalizeZero when no positive mass is found by the horizon.
    """
    rep = l1_norm_partial(seq, horizon)
    if rep.tail_bound is None:
        from .errors import NoTailBound

        raise NoTailBound(f"{seq.name} has no certified l1 tail rule")
    if rep.partial_sum == 0 and rep.tail_bound == 0:
        raise NormalizeZero(f"{seq.name} has no positive mass up to {horizon}")
    if seq.facts.l1_total_exact is not None:
        s = seq.facts.l1_total_exact
        exact = True
    else:
        partial = rep.partial_sum if isinstance(rep.partial_sum, Fraction) else Fraction(str(rep.partial_sum))
        tailv = rep.tail_bound if isinstance(rep.tail_bound, Fraction) else Fraction(str(rep.tail_bound))
        s = partial + tailv
        exact = False
    scaled = scale(seq, Fraction(1, 1) / s)
    return NormalizedSeq(replace(scaled, name=f"({seq.name})/{s}"), s, exact)
