"""Descriptors for (possibly infinite) subsets of N, indexed from 1.

A set is either an explicit finite list, a strictly increasing
closed-form enumeration, or lazy algebra over those (union,
intersection, difference, complement).  No canonical form is computed:
membership and enumeration are the contract, not syntactic equality.

Enumerated sets may carry certificates that power the verdict engines:

* a reciprocal tail rule -- a closed-form upper bound on
  ``sum(1/n for n in A, n > j)``, e.g. ``1/floor(sqrt(j))`` for the
  squares;
* a divergence rule name when ``sum(1/n for n in A)`` is provably
  infinite;
* growth envelopes ``e(j) >= c*j^d`` / ``e(j) <= C*j^d`` / ``e(j) >= rho^j``
  that let weighted variants of those rules fire.

Absence of a certificate is a value, not an error: callers fall back to
``Undecided``.
"""

from __future__ import annotations

import heapq
import itertools
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

import mpmath

from .errors import ExhaustedFiniteSet, IndexOutOfDomain

# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Growth:
    """Enumeration growth envelopes, valid for j >= j0 (1-indexed ranks).

    ``poly_lower=(c, d, j0)`` certifies e(j) >= c*j^d; ``poly_upper``
    the mirror bound.  ``geo_lower=(rho, j0)`` certifies e(j) >= rho^j.
    ``upper_class`` tags the coarse growth family for log-weighted
    divergence rules: 'poly', 'n_log_n', 'exponential' or 'self_power'.
    """

    poly_lower: tuple[Fraction, int, int] | None = None
    poly_upper: tuple[Fraction, int, int] | None = None
    geo_lower: tuple[int, int] | None = None
    upper_class: str | None = None


@dataclass(frozen=True)
class FiniteSet:
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        elems = tuple(sorted(set(self.elements)))
        if any(n < 1 for n in elems):
            raise IndexOutOfDomain("index sets live in N = {1, 2, ...}")
        object.__setattr__(self, "elements", elems)

    def __repr__(self) -> str:
        inner = ",".join(map(str, self.elements[:6]))
        if len(self.elements) > 6:
            inner += ",..."
        return f"{{{inner}}}"


@dataclass(frozen=True)
class MonotoneEnum:
    """Strictly increasing closed-form enumeration e(1) < e(2) < ...

    Identity (equality, hashing) is the ``name``; the callables are
    implementation detail.  ``recip_tail(j)`` must return a certified
    upper bound on the reciprocal tail past j, or be None when the
    reciprocal series diverges or no rule is known; ``recip_tail_exact``
    marks rules that return the tail exactly (geometric families).
    ``subset_of`` tags structural supersets certified at construction;
    ``sparse_in`` additionally certifies the superset minus this set is
    infinite.
    """

    name: str
    rule: Callable[[int], int] = field(compare=False, repr=False)
    recip_tail: Callable[[int], Fraction] | None = field(default=None, compare=False, repr=False)
    recip_tail_rule: str | None = None
    recip_tail_exact: bool = False
    recip_divergent_rule: str | None = None
    growth: Growth | None = field(default=None, compare=False)
    subset_of: tuple["IndexSet", ...] = field(default=(), compare=False)
    sparse_in: Optional["IndexSet"] = field(default=None, compare=False)
    fx_certificates: tuple[tuple[str, str, object], ...] = field(default=(), compare=False, repr=False)

    def __repr__(self) -> str:
        return f"<{self.name}>"


@dataclass(frozen=True)
class Union_:
    parts: tuple["IndexSet", ...]

    def __repr__(self) -> str:
        return "(" + " | ".join(map(repr, self.parts)) + ")"


@dataclass(frozen=True)
class Intersection:
    parts: tuple["IndexSet", ...]

    def __repr__(self) -> str:
        return "(" + " & ".join(map(repr, self.parts)) + ")"


@dataclass(frozen=True)
class Difference:
    left: "IndexSet"
    right: "IndexSet"

    def __repr__(self) -> str:
        return f"({self.left!r} \\ {self.right!r})"


@dataclass(frozen=True)
class Complement:
    inner: "IndexSet"

    def __repr__(self) -> str:
        return f"~{self.inner!r}"


IndexSet = FiniteSet | MonotoneEnum | Union_ | Intersection | Difference | Complement


def union(*parts: IndexSet) -> IndexSet:
    flat: list[IndexSet] = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, Union_) else (p,))
    flat = [p for p in flat if not (isinstance(p, FiniteSet) and not p.elements)]
    if not flat:
        return FiniteSet(())
    if len(flat) == 1:
        return flat[0]
    return Union_(tuple(flat))


def intersection(*parts: IndexSet) -> IndexSet:
    if not parts:
        raise ValueError("empty intersection")
    if len(parts) == 1:
        return parts[0]
    for i, a in enumerate(parts):
        for b in parts[i + 1 :]:
            if is_disjoint(a, b) is True:
                return FiniteSet(())
    # lazy simplification: a part that is a structural subset of all others
    for p in parts:
        if all(q is p or is_subset(p, q) for q in parts):
            return p
    return Intersection(tuple(parts))


def difference(left: IndexSet, right: IndexSet) -> IndexSet:
    if is_disjoint(left, right):
        return left
    return Difference(left, right)


def complement(a: IndexSet) -> IndexSet:
    if isinstance(a, Complement):
        return a.inner
    return Complement(a)


# ---------------------------------------------------------------------------
# Enumeration caches
# ---------------------------------------------------------------------------

_PREFIX_CACHE: dict[str, list[int]] = {}


def _prefix(s: MonotoneEnum, upto_rank: int) -> list[int]:
    cache = _PREFIX_CACHE.setdefault(s.name, [])
    while len(cache) < upto_rank:
        j = len(cache) + 1
        v = s.rule(j)
        if cache and v <= cache[-1]:
            raise ValueError(f"enumeration rule of {s.name} is not strictly increasing at rank {j}")
        cache.append(v)
    return cache


def member(a: IndexSet, n: int) -> bool:
    """Exact membership; monotone search for enumerated sets."""
    if n < 1:
        raise IndexOutOfDomain(f"membership probe at {n} < 1")
    if isinstance(a, FiniteSet):
        i = bisect_left(a.elements, n)
        return i < len(a.elements) and a.elements[i] == n
    if isinstance(a, MonotoneEnum):
        r = rank_of_least_ge(a, n)
        return enumeration(a, r) == n
    if isinstance(a, Union_):
        return any(member(p, n) for p in a.parts)
    if isinstance(a, Intersection):
        return all(member(p, n) for p in a.parts)
    if isinstance(a, Difference):
        return member(a.left, n) and not member(a.right, n)
    if isinstance(a, Complement):
        return not member(a.inner, n)
    raise TypeError(f"not an index set: {a!r}")


def enumeration(d: IndexSet, j: int) -> int:
    """The j-th smallest element of d (1-indexed)."""
    if j < 1:
        raise IndexOutOfDomain(f"enumeration rank {j} < 1")
    if isinstance(d, FiniteSet):
        if j > len(d.elements):
            raise ExhaustedFiniteSet(f"{d!r} has only {len(d.elements)} elements")
        return d.elements[j - 1]
    if isinstance(d, MonotoneEnum):
        return _prefix(d, j)[j - 1]
    it = iter_members(d)
    val = next(itertools.islice(it, j - 1, None), None)
    if val is None:
        raise ExhaustedFiniteSet(f"{d!r} exhausted before rank {j}")
    return val


def rank_of_least_ge(s: MonotoneEnum, n: int) -> int:
    """Least rank r with e(r) >= n, by exponential then binary search."""
    r = 1
    while enumeration(s, r) < n:
        r *= 2
    if r == 1:
        return 1
    lo, hi = r // 2, r  # e(lo) < n <= e(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if enumeration(s, mid) < n:
            lo = mid
        else:
            hi = mid
    return hi


def iter_members(a: IndexSet, start: int = 1) -> Iterator[int]:
    """Members of ``a`` that are >= start, in increasing order."""
    if isinstance(a, FiniteSet):
        i = bisect_left(a.elements, start)
        yield from a.elements[i:]
        return
    if isinstance(a, MonotoneEnum):
        j = rank_of_least_ge(a, start) if start > 1 else 1
        while True:
            yield enumeration(a, j)
            j += 1
    if isinstance(a, Union_):
        merged = heapq.merge(*(iter_members(p, start) for p in a.parts))
        last = None
        for v in merged:
            if v != last:
                yield v
                last = v
        return
    if isinstance(a, Intersection):
        base, rest = a.parts[0], a.parts[1:]
        for v in iter_members(base, start):
            if all(member(p, v) for p in rest):
                yield v
        return
    if isinstance(a, Difference):
        for v in iter_members(a.left, start):
            if not member(a.right, v):
                yield v
        return
    if isinstance(a, Complement):
        n = start
        while True:
            if not member(a.inner, n):
                yield n
            n += 1


def members_upto(a: IndexSet, n: int) -> list[int]:
    out = []
    for v in iter_members(a):
        if v > n:
            break
        out.append(v)
    return out


def count_upto(a: IndexSet, n: int) -> int:
    """|a intersect [1, n]|."""
    if n < 1:
        return 0
    if isinstance(a, FiniteSet):
        return bisect_right(a.elements, n)
    if isinstance(a, MonotoneEnum):
        r = rank_of_least_ge(a, n)
        return r if enumeration(a, r) == n else r - 1
    if isinstance(a, Complement):
        return n - count_upto(a.inner, n)
    if isinstance(a, Difference):
        # scanning the left enumeration dominates the cost
        return sum(1 for _ in iter_members_upto_fast(a, n))
    return sum(1 for _ in iter_members_upto_fast(a, n))


def iter_members_upto_fast(a: IndexSet, n: int) -> Iterator[int]:
    for v in iter_members(a):
        if v > n:
            return
        yield v


def provably_infinite(a: IndexSet) -> bool | None:
    """True/False when the descriptor settles it, None otherwise."""
    if isinstance(a, FiniteSet):
        return False
    if isinstance(a, MonotoneEnum):
        return True  # construction contract
    if isinstance(a, Union_):
        if any(provably_infinite(p) for p in a.parts):
            return True
        if all(provably_infinite(p) is False for p in a.parts):
            return False
        return None
    if isinstance(a, Difference):
        if provably_infinite(a.left) and provably_finite_total(a.right):
            return True
        if provably_infinite(a.left) is False:
            return False
        if isinstance(a.left, MonotoneEnum) and a.left.sparse_in is not None:
            # left is a sparse subset of right: left \ right could be empty
            return None
        return None
    if isinstance(a, Complement):
        if provably_infinite(a.inner) is False:
            return True
        if reciprocal_tail_bound(a.inner, 1) is not None:
            return True  # inner has finite reciprocal mass, misses most of N
        return None
    if isinstance(a, Intersection):
        # a sparse-subset tag can settle it: A with A sparse_in B gives A & B = A
        simplified = _intersect_structural(a)
        if simplified is not None and simplified is not a:
            return provably_infinite(simplified)
        if any(provably_infinite(p) is False for p in a.parts):
            return False
        return None
    return None


def provably_finite_total(a: IndexSet) -> bool:
    return provably_infinite(a) is False


def _intersect_structural(a: Intersection) -> IndexSet | None:
    for p in a.parts:
        if all(q is p or is_subset(p, q) for q in a.parts):
            return p
    return None


# ---------------------------------------------------------------------------
# Structural subset / disjointness (partial deciders; None = unknown)
# ---------------------------------------------------------------------------


def is_subset(a: IndexSet, b: IndexSet) -> bool | None:
    if a == b:
        return True
    if isinstance(b, MonotoneEnum) and b.name == "all":
        return True
    if isinstance(a, FiniteSet):
        return all(member(b, n) for n in a.elements)
    if isinstance(a, MonotoneEnum):
        for tag in (*a.subset_of, a.sparse_in):
            if tag is not None and (tag == b or is_subset(tag, b)):
                return True
    if isinstance(a, Intersection) and any(is_subset(p, b) for p in a.parts):
        return True
    if isinstance(a, Difference) and is_subset(a.left, b):
        return True
    if isinstance(a, Union_):
        subs = [is_subset(p, b) for p in a.parts]
        if all(s is True for s in subs):
            return True
    if isinstance(b, Union_) and any(is_subset(a, p) for p in b.parts):
        return True
    if isinstance(b, Complement):
        if is_disjoint(a, b.inner):
            return True
    return None


def is_disjoint(a: IndexSet, b: IndexSet) -> bool | None:
    if isinstance(a, Complement) and (a.inner == b or is_subset(b, a.inner)):
        return True
    if isinstance(b, Complement) and (b.inner == a or is_subset(a, b.inner)):
        return True
    if isinstance(a, FiniteSet):
        return not any(member(b, n) for n in a.elements)
    if isinstance(b, FiniteSet):
        return not any(member(a, n) for n in b.elements)
    if isinstance(a, Difference) and (a.right == b or is_subset(b, a.right)):
        return True
    if isinstance(b, Difference) and (b.right == a or is_subset(a, b.right)):
        return True
    return None


# ---------------------------------------------------------------------------
# The block step transform f_X and density estimates
# ---------------------------------------------------------------------------


def f_x(x: IndexSet, i: int) -> Fraction:
    """Step weight 1/x_n on the block (x_{n-1}, x_n] containing i (x_0 = 0).

    The enumeration values are naturals but the weights are their
    reciprocals, so the codomain here is positive rationals.
    """
    if i < 1:
        raise IndexOutOfDomain(f"f_X probe at {i} < 1")
    if isinstance(x, MonotoneEnum):
        n = rank_of_least_ge(x, i)
        return Fraction(1, enumeration(x, n))
    # generic path: walk the enumeration
    for v in iter_members(x):
        if v >= i:
            return Fraction(1, v)
    raise ExhaustedFiniteSet(f"{x!r} has no element >= {i}; f_X needs an infinite set")


@dataclass(frozen=True)
class DensityWindow:
    """Finite-horizon density estimates; explicitly heuristic.

    Upper/lower asymptotic density are limsup/liminf, so only a window
    of checkpoint values is reported, never a claimed limit.
    """

    lower_est: Fraction
    upper_est: Fraction
    at_horizon: Fraction
    checkpoints: tuple[tuple[int, Fraction], ...]


def density_window(a: IndexSet, n: int) -> DensityWindow:
    if n < 1:
        raise IndexOutOfDomain("density horizon must be >= 1")
    points: list[int] = []
    c = 2
    while c < n:
        points.append(c)
        c *= 2
    points.append(n)
    vals = tuple((p, Fraction(count_upto(a, p), p)) for p in points)
    ds = [v for _, v in vals]
    return DensityWindow(min(ds), max(ds), vals[-1][1], vals)


# ---------------------------------------------------------------------------
# Certified reciprocal and power tails
# ---------------------------------------------------------------------------


def reciprocal_tail_bound(a: IndexSet, j: int) -> Fraction | None:
    """Certified upper bound on sum(1/n : n in a, n > j), when a rule exists."""
    if j < 1:
        raise IndexOutOfDomain("tail index must be >= 1")
    if isinstance(a, FiniteSet):
        i = bisect_right(a.elements, j)
        return sum((Fraction(1, n) for n in a.elements[i:]), Fraction(0))
    if isinstance(a, MonotoneEnum):
        if a.recip_tail is not None:
            return a.recip_tail(j)
        return None
    if isinstance(a, Union_):
        parts = [reciprocal_tail_bound(p, j) for p in a.parts]
        if any(p is None for p in parts):
            return None
        return sum(parts, Fraction(0))
    if isinstance(a, Intersection):
        bounds = [b for b in (reciprocal_tail_bound(p, j) for p in a.parts) if b is not None]
        return min(bounds) if bounds else None
    if isinstance(a, Difference):
        return reciprocal_tail_bound(a.left, j)
    return None


def reciprocal_divergent(a: IndexSet) -> str | None:
    """Rule name when sum(1/n : n in a) is certified divergent, else None."""
    if isinstance(a, FiniteSet):
        return None
    if isinstance(a, MonotoneEnum):
        if a.recip_divergent_rule is not None:
            return a.recip_divergent_rule
        g = a.growth
        if g is not None and g.poly_upper is not None and g.poly_upper[1] == 1:
            return "linear-enumeration-harmonic-comparison"
        return None
    if isinstance(a, Union_):
        for p in a.parts:
            r = reciprocal_divergent(p)
            if r is not None:
                return f"union-part: {r}"
        return None
    if isinstance(a, Difference):
        r = reciprocal_divergent(a.left)
        if r is not None and reciprocal_tail_bound(a.right, 1) is not None:
            return f"difference: {r} minus convergent part"
        return None
    if isinstance(a, Complement):
        if reciprocal_tail_bound(a.inner, 1) is not None:
            return "complement-of-reciprocal-convergent"
        if provably_infinite(a.inner) is False:
            return "cofinite-harmonic"
        return None
    return None


def _rat_upper(x: mpmath.mpf, rel_margin_bits: int = 40) -> Fraction:
    """Rational upper bound for a positive mpf, with relative slack 2^-k."""
    f = Fraction(*mpmath.libmp.to_rational(x._mpf_))
    return f * (Fraction(2**rel_margin_bits + 1, 2**rel_margin_bits))


def power_tail_bound(a: IndexSet, p: Fraction, j: int) -> Fraction | None:
    """Certified upper bound on sum(n^-p : n in a, n > j) for p > 0."""
    if p <= 0:
        return None
    if isinstance(a, FiniteSet):
        total = Fraction(0)
        for n in a.elements:
            if n > j:
                total += _n_pow_neg_p_upper(n, p)
        return total
    if p > 1:
        # subset of N: the full p-series integral bound covers every index set
        return _p_series_tail(p, j)
    if isinstance(a, MonotoneEnum):
        g = a.growth
        if g is None:
            return None
        r_star = rank_of_least_ge(a, j + 1)  # first rank past j
        if g.geo_lower is not None:
            rho, j0 = g.geo_lower
            if r_star >= j0:
                ratio = _n_pow_neg_p_upper(rho, p)
                if ratio < 1:
                    first = _n_pow_neg_p_upper(enumeration(a, r_star), p)
                    return first / (1 - ratio)
        if g.poly_lower is not None:
            c, d, j0 = g.poly_lower
            q = p * d
            if q > 1 and r_star > j0:
                # sum over ranks r >= r_star of (c r^d)^-p = c^-p * r^-q
                c_pow = Fraction(1) if c == 1 else _frac_pow_upper(1 / c, p)
                return c_pow * _p_series_tail(q, r_star - 1)
        return None
    if isinstance(a, Union_):
        parts = [power_tail_bound(q, p, j) for q in a.parts]
        if any(b is None for b in parts):
            return None
        return sum(parts, Fraction(0))
    if isinstance(a, Intersection):
        bounds = [b for b in (power_tail_bound(q, p, j) for q in a.parts) if b is not None]
        return min(bounds) if bounds else None
    if isinstance(a, Difference):
        return power_tail_bound(a.left, p, j)
    return None


def power_divergent(a: IndexSet, p: Fraction) -> str | None:
    """Rule name when sum(n^-p : n in a) is certified divergent (0 < p <= 1)."""
    if p > 1 or p <= 0:
        return None
    if reciprocal_divergent(a) is not None:
        # n^-p >= 1/n for p <= 1
        return f"domination: n^-{p} >= 1/n and {reciprocal_divergent(a)}"
    if isinstance(a, MonotoneEnum) and a.growth is not None:
        g = a.growth
        if g.poly_upper is not None:
            c, d, _ = g.poly_upper
            if p * d <= 1:
                return f"poly-enumeration: e(j) <= {c}*j^{d}, p*d = {p * d} <= 1"
    return None


def _p_series_tail(p: Fraction, n: int) -> Fraction:
    """Certified rational bound on sum_{m>n} m^-p for p > 1, n >= 1."""
    # integral bound: <= n^(1-p) / (p-1)
    val = _n_pow_neg_p_upper(n, p - 1)
    return val / (p - 1)


def _n_pow_neg_p_upper(n: int, p: Fraction) -> Fraction:
    """Rational upper bound on n^-p (exact when n is a perfect power)."""
    if n == 1:
        return Fraction(1)
    num, den = p.numerator, p.denominator
    root = _exact_root(n, den)
    if root is not None:
        return Fraction(1, root**num)
    with mpmath.workprec(128):
        v = mpmath.mpf(n) ** (-mpmath.mpf(num) / den)
    return _rat_upper(v)


def _frac_pow_upper(x: Fraction, p: Fraction) -> Fraction:
    with mpmath.workprec(128):
        v = (mpmath.mpf(x.numerator) / x.denominator) ** (mpmath.mpf(p.numerator) / p.denominator)
    return _rat_upper(v)


def _exact_root(n: int, k: int) -> int | None:
    if k == 1:
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 1 and cand**k == n:
            return cand
    return None


# ---------------------------------------------------------------------------
# Dyadic splitting: one infinite set into infinitely many infinite blocks
# ---------------------------------------------------------------------------


def dyadic_block(a: IndexSet, i: int, name: str | None = None) -> MonotoneEnum:
    """Block i of the dyadic split of ``a``: the elements whose rank j has
    2-adic valuation i-1 (j = 2^(i-1) * odd).  The blocks are pairwise
    disjoint, all infinite, and their union is ``a``."""
    if i < 1:
        raise IndexOutOfDomain("dyadic block index must be >= 1")
    stride = 2 ** (i - 1)

    def rule(j: int) -> int:
        return enumeration(a, stride * (2 * j - 1))

    return MonotoneEnum(name or f"dyadic{i}({a!r})", rule=rule, subset_of=a)


def dyadic_block_index(a: IndexSet, n: int) -> int | None:
    """Inverse of the dyadic split: which block holds n (None if n not in a)."""
    if not member(a, n):
        return None
    if isinstance(a, MonotoneEnum):
        j = rank_of_least_ge(a, n)
    else:
        j = sum(1 for _ in iter_members_upto_fast(a, n))
    return (j & -j).bit_length()  # 2-adic valuation of the rank, plus one


# ---------------------------------------------------------------------------
# Exact floors of n*ln(n+1) (needed by the k_log rule)
# ---------------------------------------------------------------------------


def floor_n_log(n: int) -> int:
    """floor(n * ln(n+1)), exact.

    n*ln(n+1) is transcendental for n >= 1, so the floor is well defined;
    precision is escalated until the enclosure excludes integers.
    """
    prec = max(64, n.bit_length() + 32)
    while True:
        with mpmath.workprec(prec):
            v = mpmath.mpf(n) * mpmath.ln(mpmath.mpf(n + 1))
            f = mpmath.floor(v)
            gap = min(v - f, f + 1 - v)
            if gap > mpmath.mpf(2) ** (-prec // 2):
                return int(f)
        prec *= 2


# ---------------------------------------------------------------------------
# Built-in rules
# ---------------------------------------------------------------------------


def all_naturals() -> MonotoneEnum:
    return MonotoneEnum(
        "all",
        rule=lambda j: j,
        recip_divergent_rule="harmonic",
        growth=Growth(poly_lower=(Fraction(1), 1, 1), poly_upper=(Fraction(1), 1, 1), upper_class="poly"),
    )


def evens() -> MonotoneEnum:
    return MonotoneEnum(
        "evens",
        rule=lambda j: 2 * j,
        recip_divergent_rule="linear-enumeration-harmonic-comparison",
        growth=Growth(poly_lower=(Fraction(1), 1, 1), poly_upper=(Fraction(2), 1, 1), upper_class="poly"),
    )


def squares() -> MonotoneEnum:
    def tail(j: int) -> Fraction:
        # sum_{m^2 > j} 1/m^2 < integral_{floor(sqrt(j))}^inf dx/x^2
        return Fraction(1, math.isqrt(j))

    return MonotoneEnum(
        "squares",
        rule=lambda j: j * j,
        recip_tail=tail,
        recip_tail_rule="1/floor(sqrt(j)) integral bound",
        growth=Growth(poly_lower=(Fraction(1), 2, 1), poly_upper=(Fraction(1), 2, 1), upper_class="poly"),
    )


def powers_of_two() -> MonotoneEnum:
    def tail(j: int) -> Fraction:
        k0 = j.bit_length()  # least k with 2^k > j
        return Fraction(2, 2**k0)  # exact geometric remainder

    return MonotoneEnum(
        "powers",
        rule=lambda j: 2**j,
        recip_tail=tail,
        recip_tail_rule="geometric remainder",
        recip_tail_exact=True,
        growth=Growth(geo_lower=(2, 1), upper_class="exponential"),
    )


def geometric_exponents(base: int, residue: int, modulus: int) -> MonotoneEnum:
    """{base^m : m = residue, residue + modulus, ...}: an exponent
    progression inside the powers of ``base``, with exact geometric
    reciprocal tails.  For even bases of the form b = s^2 these sets sit
    inside the squares as well."""
    if base < 2 or modulus < 1 or not 1 <= residue <= modulus:
        raise ValueError("need base >= 2, modulus >= 1, 1 <= residue <= modulus")

    def rule(j: int) -> int:
        return base ** (residue + (j - 1) * modulus)

    ratio = Fraction(1, base**modulus)

    def tail(j: int) -> Fraction:
        # exact: sum over ranks r > t of base^-(residue + (r-1)*modulus)
        t = 0
        while rule(t + 1) <= j:
            t += 1
        first = Fraction(1, rule(t + 1))
        return first / (1 - ratio)

    tags: list[IndexSet] = [powers_of_two()] if base in (2, 4, 16) else []
    root = math.isqrt(base)
    if root * root == base:
        tags.append(squares())
    return MonotoneEnum(
        f"geom{base}^({residue} mod {modulus})",
        rule=rule,
        recip_tail=tail,
        recip_tail_rule="exact geometric remainder",
        recip_tail_exact=True,
        growth=Growth(geo_lower=(base, 1), upper_class="exponential"),
        subset_of=tuple(tags),
    )


def self_powers() -> MonotoneEnum:
    def tail(j: int) -> Fraction:
        n0 = 1
        while n0**n0 <= j:
            n0 += 1
        # successive terms at least halve, so the tail is < 2 * first term
        return Fraction(2, n0**n0)

    return MonotoneEnum(
        "self_powers",
        rule=lambda j: j**j,
        recip_tail=tail,
        recip_tail_rule="halving-terms remainder",
        growth=Growth(geo_lower=(2, 2), upper_class="self_power"),
    )


def k_log() -> MonotoneEnum:
    """{floor(n*ln(n+1)) : n >= 2}; rank j holds the element for n = j+1.

    The defining formula at n = 1 gives floor(ln 2) = 0, outside N, so
    the enumeration starts at n = 2.
    """

    return MonotoneEnum(
        "k_log",
        rule=lambda j: floor_n_log(j + 1),
        recip_divergent_rule="condensation: 1/k_n >= 1/(n*ln(n+1)), condensed series diverges",
        growth=Growth(poly_lower=(Fraction(1), 1, 1), upper_class="n_log_n"),
    )


_BUILTIN_FACTORIES: dict[str, Callable[[], MonotoneEnum]] = {
    "all": all_naturals,
    "evens": evens,
    "squares": squares,
    "powers": powers_of_two,
    "self_powers": self_powers,
    "k_log": k_log,
}


def builtin(name: str) -> MonotoneEnum:
    try:
        return _BUILTIN_FACTORIES[name]()
    except KeyError:
        raise ValueError(f"unknown built-in set rule {name!r}") from None


# ---------------------------------------------------------------------------
# JSON descriptor syntax
# ---------------------------------------------------------------------------


def parse_index_set(obj: object) -> IndexSet:
    """Parse the CLI JSON syntax for index sets.

    {"kind": "monotone", "rule": "squares"}
    {"kind": "explicit", "elements": [1, 4, 9]}
    {"kind": "union"|"intersection", "of": [...]}
    {"kind": "difference", "left": {...}, "right": {...}}
    {"kind": "complement", "of": {...}}
    """
    if isinstance(obj, str):
        return builtin(obj)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"bad index-set descriptor: {obj!r}")
    kind = obj["kind"]
    if kind == "monotone":
        return builtin(obj["rule"])
    if kind == "explicit":
        return FiniteSet(tuple(int(x) for x in obj["elements"]))
    if kind == "union":
        return union(*(parse_index_set(o) for o in obj["of"]))
    if kind == "intersection":
        return intersection(*(parse_index_set(o) for o in obj["of"]))
    if kind == "difference":
        return difference(parse_index_set(obj["left"]), parse_index_set(obj["right"]))
    if kind == "complement":
        return complement(parse_index_set(obj["of"]))
    raise ValueError(f"unknown index-set kind {kind!r}")


def index_set_to_json(a: IndexSet) -> object:
    if isinstance(a, FiniteSet):
        return {"kind": "explicit", "elements": list(a.elements)}
    if isinstance(a, MonotoneEnum):
        return {"kind": "monotone", "rule": a.name}
    if isinstance(a, Union_):
        return {"kind": "union", "of": [index_set_to_json(p) for p in a.parts]}
    if isinstance(a, Intersection):
        return {"kind": "intersection", "of": [index_set_to_json(p) for p in a.parts]}
    if isinstance(a, Difference):
        return {"kind": "difference", "left": index_set_to_json(a.left), "right": index_set_to_json(a.right)}
    if isinstance(a, Complement):
        return {"kind": "complement", "of": index_set_to_json(a.inner)}
    raise TypeError(f"not an index set: {a!r}")
