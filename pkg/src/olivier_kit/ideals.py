"""Ideal descriptors on N and the certified membership engine.

Supported shapes: the finite-set ideal, summable ideals given by
nonnegative divergent weights, block-step ideals I_X, ideals generated
by "finite trace on K", restrictions I|C, and block-partition ideals.

Inclusion between ideals and dual disjointness are Pi-statements over
all subsets, so the checkers here are falsifiers: a probe witnessing
failure refutes the condition, while exhausting the probe library only
reports "not refuted", never "proved".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import index_sets as isets
from . import seq_core as seqs
from .seq_core import RealSeq
from .verdicts import Outcome, Verdict, no, undecided, yes

_PREFIX_CHECK = 512  # how far construction-time disjointness checks scan

# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fin:
    def __repr__(self) -> str:
        return "Fin"


@dataclass(frozen=True)
class Summable:
    """I = {A : sum of weights over A is finite}, weights nonnegative
    with divergent total (checked at construction)."""

    weights: RealSeq
    name: str

    def __repr__(self) -> str:
        return f"I_({self.name})"


@dataclass(frozen=True)
class IX:
    """The block-step ideal of X: summable ideal of the f_X weights."""

    x: isets.IndexSet

    def __repr__(self) -> str:
        return f"I_X({self.x!r})"


@dataclass(frozen=True)
class KGenerated:
    """I = {A : A intersect K is finite}."""

    k: isets.IndexSet

    def __repr__(self) -> str:
        return f"FinTrace({self.k!r})"


@dataclass(frozen=True)
class Restriction:
    base: "IdealDescriptor"
    c: isets.IndexSet

    def __repr__(self) -> str:
        return f"{self.base!r}|{self.c!r}"


@dataclass(frozen=True)
class Partition:
    """B in I iff B meets all but finitely many blocks in a finite set.

    The block family is infinite (finitely many blocks would make the
    condition vacuous and the ideal improper); ``block_rule(i)`` yields
    block i >= 1 and ``carrier`` is the union of all blocks.  Identity is
    the name; the rule is implementation detail.
    """

    name: str
    block_rule: object = field(compare=False, repr=False)  # Callable[[int], IndexSet]
    carrier: isets.IndexSet = field(compare=False, default=None)

    def block(self, i: int) -> isets.IndexSet:
        return self.block_rule(i)

    def __repr__(self) -> str:
        return f"Partition({self.name})"


def partition_of(carrier: isets.IndexSet, name: str | None = None, prefix_checks: int = 4) -> Partition:
    """Dyadic partition of an infinite carrier into infinite blocks."""
    part = Partition(
        name or f"dyadic({carrier!r})",
        block_rule=lambda i: isets.dyadic_block(carrier, i),
        carrier=carrier,
    )
    seen: set[int] = set()
    for i in range(1, prefix_checks + 1):
        elems = set(isets.members_upto(part.block(i), _PREFIX_CHECK))
        if elems & seen:
            raise ValueError(f"partition blocks of {part.name} overlap")
        seen |= elems
    return part


def partition_from_blocks(blocks: list[isets.IndexSet], name: str | None = None) -> Partition:
    """Infinite partition extending an explicit block list: the listed
    blocks come first, then the dyadic split of the complement of their
    union fills out the family."""
    rest = isets.complement(isets.union(*blocks)) if blocks else isets.all_naturals()

    def rule(i: int) -> isets.IndexSet:
        if i <= len(blocks):
            return blocks[i - 1]
        return isets.dyadic_block(rest, i - len(blocks))

    return Partition(name or f"blocks+{rest!r}", block_rule=rule, carrier=isets.all_naturals())


IdealDescriptor = Fin | Summable | IX | KGenerated | Restriction | Partition


def summable(weights: RealSeq, name: str | None = None) -> Summable:
    """Build a summable ideal, verifying the weights diverge."""
    if not weights.facts.nonnegative:
        raise ValueError(f"summable weights must be nonnegative: {weights.name}")
    rep = seqs.series_verdict(weights)
    if not rep.verdict.is_no:
        raise ValueError(
            f"summable weights must have a certified divergent total; "
            f"series_verdict({weights.name}) = {rep.verdict.outcome}"
        )
    return Summable(weights, name or weights.name)


def reciprocal_ideal() -> Summable:
    """The classical summable ideal with weights 1/n."""
    return summable(seqs.harmonic(), "1/n")


def extends_reciprocal_ideal(i: IdealDescriptor) -> bool:
    """True when the descriptor certifies that every reciprocal-summable
    set belongs to i (weights dominated by C/n, or a block-step ideal,
    whose weights satisfy f_X(n) <= 1/n)."""
    if isinstance(i, IX):
        return True
    if isinstance(i, Summable):
        env = i.weights.facts.upper_envelope
        return env is not None and env[1] >= 1
    return False


# ---------------------------------------------------------------------------
# Membership verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MembershipVerdict:
    subject: isets.IndexSet
    verdict: Verdict
    side: str  # InIdeal | InDual | InCoideal


_CACHE: dict[tuple, Verdict] = {}


def membership_verdict(i: IdealDescriptor, a: isets.IndexSet, horizon: int = 4096) -> MembershipVerdict:
    key = (i, a)
    if key not in _CACHE:
        _CACHE[key] = _membership(i, a, horizon)
    return MembershipVerdict(a, _CACHE[key], "InIdeal")


def dual_membership_verdict(i: IdealDescriptor, a: isets.IndexSet, horizon: int = 4096) -> MembershipVerdict:
    """A in I* iff the complement of A is in I."""
    inner = membership_verdict(i, isets.complement(a), horizon)
    return MembershipVerdict(a, inner.verdict, "InDual")


def coideal_membership_verdict(i: IdealDescriptor, a: isets.IndexSet, horizon: int = 4096) -> MembershipVerdict:
    """A in I+ iff A is not in I; certified outcomes flip."""
    inner = membership_verdict(i, a, horizon)
    return MembershipVerdict(a, inner.verdict.negate(), "InCoideal")


def _membership(i: IdealDescriptor, a: isets.IndexSet, horizon: int) -> Verdict:
    if isinstance(i, Fin):
        return _fin_membership(a, horizon)
    if isinstance(i, Summable):
        return _summable_membership(i.weights, a, horizon)
    if isinstance(i, IX):
        return _fx_membership(i.x, a, horizon)
    if isinstance(i, KGenerated):
        return _ktrace_membership(i.k, a, horizon)
    if isinstance(i, Restriction):
        return _restriction_membership(i, a, horizon)
    if isinstance(i, Partition):
        return _partition_membership(i, a, horizon)
    raise TypeError(f"not an ideal descriptor: {i!r}")


def _fin_membership(a: isets.IndexSet, horizon: int) -> Verdict:
    inf = isets.provably_infinite(a)
    if inf is True:
        return no("infinite-enumeration-core")
    if inf is False:
        return yes("explicit-finite")
    return undecided("finiteness-unknown", horizon=horizon, count=isets.count_upto(a, horizon))


def _finite_is_member(a: isets.IndexSet) -> bool:
    return isets.provably_infinite(a) is False


def _summable_membership(w: RealSeq, a: isets.IndexSet, horizon: int) -> Verdict:
    if _finite_is_member(a):
        return yes("finite-set")
    f = w.facts
    fam = f.weight_family
    if fam is not None and fam[0] == "power":
        fam = ("indicator_power", isets.all_naturals(), fam[1])
    if fam is not None and fam[0] == "indicator_power":
        _, b, p = fam
        probe = a if b == isets.all_naturals() else isets.intersection(a, b)
        bound = isets.power_tail_bound(probe, p, 1)
        if bound is not None:
            return yes("restricted-power-tail", p=str(p))
        rule = isets.power_divergent(probe, p)
        if rule is not None:
            return no(rule)
    if fam is not None and fam[0] == "fx":
        return _fx_membership(fam[1], a, horizon)
    if fam is not None and fam[0] == "log_reciprocal":
        v = _log_weight_divergent(a)
        if v is not None:
            return no(v)
    # envelope fallbacks for weights without a family tag
    env = f.upper_envelope
    if env is not None:
        c, p, _ = env
        bound = isets.power_tail_bound(a, p, 1)
        if bound is not None:
            return yes("weights-dominated", C=str(c), p=str(p))
    low = f.lower_envelope
    if low is not None:
        rule = isets.power_divergent(a, low[1])
        if rule is not None:
            return no(f"weights-dominate: {rule}")
    ps = seqs.partial_sum_approx(_restricted(w, a), horizon)
    return undecided("no-structural-rule", horizon=horizon, partial=f"{ps:.6g}")


def _log_weight_divergent(a: isets.IndexSet) -> str | None:
    """Divergence of sum 1/ln(n+1) over a: any polynomial, n-log-n,
    exponential or self-power enumeration growth forces it (the pulled
    back terms dominate a multiple of the harmonic series)."""
    if isets.reciprocal_divergent(a) is not None:
        return "log-weights dominate reciprocals"
    if isinstance(a, isets.MonotoneEnum) and a.growth is not None:
        cls = a.growth.upper_class
        if cls in ("poly", "n_log_n"):
            return f"log-weights over {cls} enumeration diverge (pullback ~ harmonic)"
        if cls == "exponential":
            return "log-weights over exponential enumeration diverge (pullback ~ 1/(j*ln rho))"
        if cls == "self_power":
            return "log-weights over self-power enumeration diverge (pullback ~ 1/(j*ln j), condensation)"
    if isinstance(a, isets.Union_):
        for p in a.parts:
            r = _log_weight_divergent(p)
            if r is not None:
                return f"union-part: {r}"
    return None


def _restricted(w: RealSeq, a: isets.IndexSet) -> RealSeq:
    return seqs.from_rule(
        f"{w.name} on {a!r}",
        lambda n: w.term_rule(n) if isets.member(a, n) else Fraction(0),
        w.value_kind,
        seqs.SeqFacts(nonnegative=w.facts.nonnegative),
    )


def _fx_membership(x: isets.IndexSet, a: isets.IndexSet, horizon: int) -> Verdict:
    if _finite_is_member(a):
        return yes("finite-set")
    # bespoke construction certificates (e.g. the engineered sparse subsets)
    if isinstance(x, isets.MonotoneEnum):
        for probe_name, rule in x.fx_certificates:
            if isinstance(a, isets.MonotoneEnum) and a.name == probe_name:
                return yes(f"construction-certificate: {rule}")
    tail = isets.reciprocal_tail_bound(a, 1)
    if tail is not None:
        return yes("domination: f_X(n) <= 1/n and reciprocal tail exists")
    comp_inf = isets.provably_infinite(isets.complement(a))
    if comp_inf is False or (isinstance(a, isets.MonotoneEnum) and a.name == "all"):
        return no("block-identity: partial sums over full blocks hit every integer")
    sub = isets.is_subset(a, x)
    if sub is True:
        # on A subset of X the step weights are the reciprocals of A itself
        rule = isets.reciprocal_divergent(a)
        if rule is not None:
            return no(f"restriction-to-generator: {rule}")
    if isets.is_subset(x, a) is True:
        rule = isets.reciprocal_divergent(x)
        if rule is not None:
            return no(f"contains-generator: {rule}")
    return undecided("no-structural-rule", horizon=horizon)


def _ktrace_membership(k: isets.IndexSet, a: isets.IndexSet, horizon: int) -> Verdict:
    if _finite_is_member(a):
        return yes("finite-set")
    if isets.is_disjoint(a, k) is True:
        return yes("disjoint-from-generator")
    inter = isets.intersection(a, k)
    inf = isets.provably_infinite(inter)
    if inf is True:
        return no("infinite-trace-on-generator")
    if inf is False:
        return yes("finite-trace-on-generator")
    return undecided("trace-unknown", horizon=horizon, trace_count=isets.count_upto(inter, horizon))


def _restriction_membership(i: Restriction, s: isets.IndexSet, horizon: int) -> Verdict:
    for n in isets.iter_members_upto_fast(s, horizon):
        if not isets.member(i.c, n):
            return no("witness-outside-restriction", witness=n)
    if isets.is_subset(s, i.c) is True:
        inner = _membership(i.base, s, horizon)
        return Verdict(inner.outcome, inner.evidence)
    return undecided("subset-of-carrier-unknown", horizon=horizon)


_PARTITION_PROBE_BLOCKS = 12  # materialized prefix used for structural checks


def _covered_by_block_prefix(i: Partition, s: isets.IndexSet) -> bool:
    """s structurally inside finitely many blocks (plus a finite set)."""
    if _finite_is_member(s):
        return True
    parts = s.parts if isinstance(s, isets.Union_) else (s,)
    prefix = [i.block(k) for k in range(1, _PARTITION_PROBE_BLOCKS + 1)]
    return all(
        _finite_is_member(p) or any(isets.is_subset(p, blk) is True for blk in prefix) for p in parts
    )


def _partition_membership(i: Partition, b: isets.IndexSet, horizon: int) -> Verdict:
    if _finite_is_member(b):
        return yes("finite-set")
    if _covered_by_block_prefix(i, b):
        return yes("covered-by-finitely-many-blocks")
    # certified No: b contains all blocks past some index, each infinite
    if i.carrier is not None and isets.is_subset(i.carrier, b) is True:
        return no("contains-the-carrier: meets every block infinitely")
    if isinstance(b, isets.MonotoneEnum) and b.name == "all":
        return no("meets-every-block-infinitely")
    if isets.provably_infinite(isets.complement(b)) is False:
        return no("cofinite: meets every block infinitely")
    if isinstance(b, isets.Complement) and _covered_by_block_prefix(i, b.inner):
        return no("complement-of-block-prefix: contains every later block")
    return undecided("block-trace-unknown", horizon=horizon)


# ---------------------------------------------------------------------------
# Falsifiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FalsificationReport:
    """Outcome of a probe search; ``refuted=False`` means *not refuted*,
    never *proved*."""

    condition: str
    refuted: bool
    witness: Optional[isets.IndexSet]
    rows: tuple[tuple[str, Verdict, Verdict], ...]

    def summary(self) -> str:
        if self.refuted:
            return f"{self.condition}: REFUTED by {self.witness!r}"
        return f"{self.condition}: not refuted on {len(self.rows)} probes"


def inclusion_falsifier(
    j: IdealDescriptor,
    i: IdealDescriptor,
    probes: Iterable[isets.IndexSet],
    horizon: int = 4096,
) -> FalsificationReport:
    """Search for A certified in j but certified out of i, refuting j <= i."""
    probes = list(probes)
    if not probes:
        raise ValueError("probe list must be nonempty")
    rows = []
    witness = None
    for a in probes:
        vj = membership_verdict(j, a, horizon).verdict
        vi = membership_verdict(i, a, horizon).verdict
        rows.append((repr(a), vj, vi))
        if witness is None and vj.is_yes and vi.is_no:
            witness = a
    return FalsificationReport(f"{j!r} included in {i!r}", witness is not None, witness, tuple(rows))


def dual_disjointness_falsifier(
    j: IdealDescriptor,
    i: IdealDescriptor,
    probes: Iterable[isets.IndexSet],
    horizon: int = 4096,
) -> FalsificationReport:
    """Search for A certified in j and in the dual filter of i, refuting
    the disjointness of j and i*."""
    probes = list(probes)
    if not probes:
        raise ValueError("probe list must be nonempty")
    rows = []
    witness = None
    for a in probes:
        vj = membership_verdict(j, a, horizon).verdict
        vd = dual_membership_verdict(i, a, horizon).verdict
        rows.append((repr(a), vj, vd))
        if witness is None and vj.is_yes and vd.is_yes:
            witness = a
    return FalsificationReport(f"{j!r} disjoint from dual of {i!r}", witness is not None, witness, tuple(rows))


def standard_probes() -> list[isets.IndexSet]:
    """The probe library every falsifier run should include; witness
    constructions append their level sets and engineered subsets."""
    return [
        isets.squares(),
        isets.evens(),
        isets.k_log(),
        isets.powers_of_two(),
        isets.self_powers(),
        isets.complement(isets.squares()),
    ]


# ---------------------------------------------------------------------------
# JSON descriptor syntax
# ---------------------------------------------------------------------------


def parse_ideal(obj: object) -> IdealDescriptor:
    """CLI JSON ideal syntax:

    {"kind": "fin"}
    {"kind": "summable", "weights": "1/n" | "1/ln(n+1)"}
    {"kind": "IX", "X": <index set>}
    {"kind": "kgen", "K": <index set>}
    {"kind": "restriction", "base": <ideal>, "C": <index set>}
    {"kind": "partition", "blocks": [<index set>, ...]}
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"bad ideal descriptor: {obj!r}")
    kind = obj["kind"]
    if kind == "fin":
        return Fin()
    if kind == "summable":
        return summable(_parse_weights(obj["weights"]))
    if kind == "IX":
        return IX(isets.parse_index_set(obj["X"]))
    if kind == "kgen":
        return KGenerated(isets.parse_index_set(obj["K"]))
    if kind == "restriction":
        return Restriction(parse_ideal(obj["base"]), isets.parse_index_set(obj["C"]))
    if kind == "partition":
        if "blocks" in obj:
            return partition_from_blocks([isets.parse_index_set(b) for b in obj["blocks"]])
        return partition_of(isets.parse_index_set(obj["carrier"]))
    raise ValueError(f"unknown ideal kind {kind!r}")


def _parse_weights(spec: object) -> RealSeq:
    if spec == "1/n":
        return seqs.harmonic()
    if spec == "1/ln(n+1)":
        return seqs.log_reciprocal_weights()
    if isinstance(spec, dict) and spec.get("kind") == "indicator_power":
        return seqs.indicator_power_seq(isets.parse_index_set(spec["set"]), Fraction(spec["p"]))
    if isinstance(spec, dict) and spec.get("kind") == "fx":
        return seqs.fx_weights(isets.parse_index_set(spec["X"]))
    raise ValueError(f"unknown weight spec {spec!r}")


def ideal_to_json(i: IdealDescriptor) -> object:
    if isinstance(i, Fin):
        return {"kind": "fin"}
    if isinstance(i, Summable):
        return {"kind": "summable", "weights": i.name}
    if isinstance(i, IX):
        return {"kind": "IX", "X": isets.index_set_to_json(i.x)}
    if isinstance(i, KGenerated):
        return {"kind": "kgen", "K": isets.index_set_to_json(i.k)}
    if isinstance(i, Restriction):
        return {"kind": "restriction", "base": ideal_to_json(i.base), "C": isets.index_set_to_json(i.c)}
    if isinstance(i, Partition):
        if i.carrier is not None:
            return {"kind": "partition", "carrier": isets.index_set_to_json(i.carrier)}
        return {"kind": "partition", "name": i.name}
    raise TypeError(f"not an ideal descriptor: {i!r}")
