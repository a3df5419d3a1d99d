"""Strictly increasing scaling functions g with inverses and diagnostics.

Two hypothesis classes matter for the generalized divergence tests:

* the limit class: g(x)/x^gamma -> M in (0, inf) as x -> 0+, for some
  positive constants gamma, M;
* the ratio class: g(x) -> 0 as x -> 0+ and for every eps > 0 there is
  an M with g(x)/g(eps*x) <= M for all x > 0.

``hypothesis_diagnostics`` samples both conditions on finite grids and
emits pass/fail/inconclusive -- explicitly a diagnostic, never a proof.
Witness constructors trust the declared metadata instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from .errors import BadTolerance, DomainViolation, NotInRange
from .values import DEFAULT_PRECISION_BITS, Value, to_mpf

_SCALE_CAP = mpmath.mpf(2) ** 64  # bracket growth limit before NotInRange


@dataclass(frozen=True)
class ScalingFn:
    """A strictly increasing function on (0, inf), optionally extended by
    g(0) = 0."""

    name: str
    eval_mpf: Callable[[mpmath.mpf], mpmath.mpf] = field(compare=False, repr=False)
    gamma: Fraction | None = None  # declared limit-class exponent
    limit_m: object | None = None  # declared M (Fraction, or a printable constant)
    ratio_bounded: bool = False  # declared membership in the ratio class
    zero_extension: bool = False
    range_sup: Callable[[], mpmath.mpf] | None = field(default=None, compare=False, repr=False)
    exact_eval: Callable[[Fraction], Optional[Fraction]] | None = field(default=None, compare=False, repr=False)
    exact_inverse: Callable[[Fraction], Optional[Fraction]] | None = field(default=None, compare=False, repr=False)

    def __repr__(self) -> str:
        return f"ScalingFn({self.name})"


def g_eval(g: ScalingFn, x: Value | int, precision_bits: int = DEFAULT_PRECISION_BITS) -> Value:
    """g(x); exact Fraction when the function has an exact rational path."""
    xf = Fraction(x) if isinstance(x, int) else x
    if isinstance(xf, Fraction):
        if xf < 0 or (xf == 0 and not g.zero_extension):
            raise DomainViolation(f"{g.name} evaluated at {xf}")
        if xf == 0:
            return Fraction(0)
        if g.exact_eval is not None:
            ex = g.exact_eval(xf)
            if ex is not None:
                return ex
    with mpmath.workprec(precision_bits):
        xv = to_mpf(xf, precision_bits)
        if xv < 0 or (xv == 0 and not g.zero_extension):
            raise DomainViolation(f"{g.name} evaluated at {mpmath.nstr(xv, 8)}")
        if xv == 0:
            return mpmath.mpf(0)
        return +g.eval_mpf(xv)


def g_inverse(
    g: ScalingFn,
    y: Value | int,
    tol: Value | str,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> Value:
    """Solve g(x) = y to within tol by bisection over a grown bracket.

    ``tol="exact"`` requests the exact rational shortcut (power functions
    with perfect-power inputs) and raises NotInRange when unavailable.
    """
    yf = Fraction(y) if isinstance(y, int) else y
    if tol == "exact":
        if isinstance(yf, Fraction) and g.exact_inverse is not None:
            ex = g.exact_inverse(yf)
            if ex is not None:
                return ex
        raise NotInRange(f"no exact inverse of {g.name} at {yf}")
    if not isinstance(tol, str) and tol <= 0:
        raise BadTolerance(f"tolerance must be positive, got {tol}")
    if isinstance(yf, Fraction) and g.exact_inverse is not None:
        ex = g.exact_inverse(yf)
        if ex is not None:
            return ex
    if yf == 0:
        if g.zero_extension:
            return Fraction(0)
        raise NotInRange(f"0 is not in ran({g.name})")
    if yf < 0:
        raise NotInRange(f"ran({g.name}) is positive; got {yf}")

    bits = max(precision_bits, _bits_for_tol(tol) + 64)
    with mpmath.workprec(bits):
        yv = to_mpf(yf, bits)
        tv = to_mpf(tol, bits)
        lo = min(mpmath.mpf(1), tv)
        hi = mpmath.mpf(1)
        while g.eval_mpf(hi) < yv:
            hi *= 2
            if hi > _SCALE_CAP:
                raise NotInRange(f"{g.name}(x) stays below {mpmath.nstr(yv, 8)} up to x = 2^64")
        while g.eval_mpf(lo) > yv:
            lo /= 2
            if lo < 1 / _SCALE_CAP:
                raise NotInRange(f"{g.name}(x) stays above {mpmath.nstr(yv, 8)} down to x = 2^-64")
        for _ in range(4 * bits):
            mid = (lo + hi) / 2
            val = g.eval_mpf(mid)
            if abs(val - yv) <= tv:
                return +mid
            if val < yv:
                lo = mid
            else:
                hi = mid
        raise NotInRange(f"bisection on {g.name} failed to reach tolerance {tol}")


def _bits_for_tol(tol: Value) -> int:
    t = to_mpf(tol, 64)
    if t <= 0:
        raise BadTolerance(f"tolerance must be positive, got {tol}")
    return max(0, int(-mpmath.log(t, 2)) + 8)


def range_sup_value(g: ScalingFn, precision_bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf | None:
    if g.range_sup is None:
        return None
    with mpmath.workprec(precision_bits):
        return +g.range_sup()


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagnosticsReport:
    """Finite sampling of both hypothesis classes; advisory only."""

    limit_class: str  # pass | fail | inconclusive
    limit_worst: tuple[str, str]  # (x, ratio) of the worst small-x sample
    ratio_class: str
    ratio_worst: tuple[str, str, str]  # (eps, x, ratio) of the worst sample
    notes: tuple[str, ...] = ()


def hypothesis_diagnostics(
    g: ScalingFn,
    gamma: Fraction | Value,
    m: Value | int,
    eps_grid: list[Value] | None = None,
    x_grid: list[Value] | None = None,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> DiagnosticsReport:
    """Sample g(x)/x^gamma near 0 against M, and sup g(x)/g(eps*x).

    Grids must straddle both ends: the limit class is probed at the
    smallest grid points, the ratio class across all of them.
    """
    if eps_grid is None:
        eps_grid = [Fraction(1, 2), Fraction(1, 10)]
    if x_grid is None:
        x_grid = [Fraction(10) ** e for e in range(-6, 3)]
    if not eps_grid or not x_grid:
        raise ValueError("diagnostic grids must be nonempty")
    notes: list[str] = []
    with mpmath.workprec(precision_bits):
        xs = sorted(to_mpf(x, precision_bits) for x in x_grid)
        if xs[0] <= 0:
            raise DomainViolation("x grid must be positive")
        mv = to_mpf(m, precision_bits) if m else mpmath.mpf("nan")
        gv = to_mpf(gamma, precision_bits)

        # limit class: ratios at the three smallest x, trend toward M
        small = xs[:3]
        ratios = [g.eval_mpf(x) / x**gv for x in small]
        r0 = ratios[0]
        worst = (mpmath.nstr(small[0], 6), mpmath.nstr(r0, 8))
        if mpmath.isnan(mv) or mv <= 0:
            limit_cls = "fail"
            notes.append("declared M must be a positive constant")
        elif abs(r0 / mv - 1) <= mpmath.mpf("0.25"):
            limit_cls = "pass"
        elif (r0 / mv <= mpmath.mpf("0.1") or r0 / mv >= 10) and _moving_away(ratios, mv):
            limit_cls = "fail"
        else:
            limit_cls = "inconclusive"

        # ratio class: sup over the grid of g(x)/g(eps x), flagged when the
        # sup sits on a grid boundary and is still growing there
        ratio_cls = "pass"
        worst_ratio = mpmath.mpf(0)
        worst_key = ("", "", "")
        for eps in eps_grid:
            ev = to_mpf(eps, precision_bits)
            if not 0 < ev < 1:
                raise ValueError("eps grid entries must lie in (0, 1)")
            vals = [g.eval_mpf(x) / g.eval_mpf(ev * x) for x in xs]
            mx = max(vals)
            if mx > worst_ratio:
                i = vals.index(mx)
                worst_ratio = mx
                worst_key = (mpmath.nstr(ev, 4), mpmath.nstr(xs[i], 6), mpmath.nstr(mx, 8))
            boundary_blowup = (vals[-1] == mx and vals[-1] > 10 * vals[-2]) or (
                vals[0] == mx and vals[0] > 10 * vals[1]
            )
            if boundary_blowup and mx > 10**4:
                ratio_cls = "fail"
            elif ratio_cls != "fail" and mx / min(vals) > 100:
                ratio_cls = "inconclusive"
    return DiagnosticsReport(limit_cls, worst, ratio_cls, worst_key, tuple(notes))


def _moving_away(ratios: list[mpmath.mpf], m: mpmath.mpf) -> bool:
    # ratios are sampled at increasing x; index 0 is closest to 0+
    gaps = [abs(r / m - 1) for r in ratios]
    return all(gaps[i] >= gaps[i + 1] for i in range(len(gaps) - 1))


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def _perfect_root(x: Fraction, k: int) -> Fraction | None:
    def iroot(n: int) -> int | None:
        if n == 1:
            return 1
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 1 and cand**k == n:
                return cand
        return None

    a, b = iroot(x.numerator), iroot(x.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def power(p: int, q: int = 1, zero_extension: bool = False) -> ScalingFn:
    """g(x) = x^(p/q)."""
    if p <= 0 or q <= 0:
        raise ValueError("power exponent must be positive")
    frac = Fraction(p, q)

    def ev(x: mpmath.mpf) -> mpmath.mpf:
        return x ** (mpmath.mpf(p) / q)

    def exact_eval(x: Fraction) -> Fraction | None:
        root = _perfect_root(x**p, q)
        return root

    def exact_inverse(y: Fraction) -> Fraction | None:
        if y <= 0:
            return None
        return _perfect_root(y**q, p)

    return ScalingFn(
        f"power:{p}/{q}" if q != 1 else f"power:{p}",
        ev,
        gamma=frac,
        limit_m=Fraction(1),
        ratio_bounded=True,  # g(x)/g(eps x) = eps^(-p/q), constant in x
        zero_extension=zero_extension,
        exact_eval=exact_eval,
        exact_inverse=exact_inverse,
    )


def identity() -> ScalingFn:
    return power(1)


def expm1(zero_extension: bool = False) -> ScalingFn:
    """g(x) = e^x - 1: in the limit class (gamma = M = 1) but not the
    ratio class (g(x)/g(x/2) -> inf)."""
    return ScalingFn(
        "expm1",
        lambda x: mpmath.expm1(x),
        gamma=Fraction(1),
        limit_m=Fraction(1),
        ratio_bounded=False,
        zero_extension=zero_extension,
    )


def log1p(zero_extension: bool = False) -> ScalingFn:
    return ScalingFn(
        "log1p",
        lambda x: mpmath.log1p(x),
        gamma=Fraction(1),
        limit_m=Fraction(1),
        ratio_bounded=True,  # concavity gives ln(1+x) <= ln(1+eps*x)/eps
        zero_extension=zero_extension,
    )


def arctan(zero_extension: bool = False) -> ScalingFn:
    return ScalingFn(
        "atan",
        lambda x: mpmath.atan(x),
        gamma=Fraction(1),
        limit_m=Fraction(1),
        ratio_bounded=True,
        zero_extension=zero_extension,
        range_sup=lambda: mpmath.pi / 2,
    )


def normcdf_centered(zero_extension: bool = False) -> ScalingFn:
    """g(x) = Phi(x) - 1/2 via the error function; the analytic limit
    constant is the standard normal density at 0, M = 1/sqrt(2*pi)."""

    def ev(x: mpmath.mpf) -> mpmath.mpf:
        return mpmath.erf(x / mpmath.sqrt(2)) / 2

    return ScalingFn(
        "normcdf_centered",
        ev,
        gamma=Fraction(1),
        limit_m="1/sqrt(2*pi)",
        ratio_bounded=True,
        zero_extension=zero_extension,
        range_sup=lambda: mpmath.mpf(1) / 2,
    )


def exp_neg_inv() -> ScalingFn:
    """g(x) = e^(-1/x): tends to 0 at 0+ yet lies in neither hypothesis
    class; kept in the catalog for negative tests."""
    return ScalingFn(
        "exp_neg_inv",
        lambda x: mpmath.exp(-1 / x),
        gamma=Fraction(1),
        limit_m=None,
        ratio_bounded=False,
        range_sup=lambda: mpmath.mpf(1),
    )


def limit_m_value(g: ScalingFn, precision_bits: int = DEFAULT_PRECISION_BITS) -> Value | None:
    """Numeric form of the declared limit constant M."""
    if g.limit_m is None:
        return None
    if isinstance(g.limit_m, Fraction):
        return g.limit_m
    with mpmath.workprec(precision_bits):
        if g.limit_m == "1/sqrt(2*pi)":
            return 1 / mpmath.sqrt(2 * mpmath.pi)
    raise ValueError(f"unknown M description {g.limit_m!r}")


def parse_scaling_fn(name: str) -> ScalingFn:
    """CLI names: power:p/q, expm1, log1p, atan, normcdf_centered, exp_neg_inv."""
    if name.startswith("power:"):
        spec = name.split(":", 1)[1]
        if "/" in spec:
            p, q = spec.split("/", 1)
            return power(int(p), int(q))
        return power(int(spec))
    table = {
        "expm1": expm1,
        "log1p": log1p,
        "atan": arctan,
        "normcdf_centered": normcdf_centered,
        "exp_neg_inv": exp_neg_inv,
    }
    if name in table:
        return table[name]()
    raise ValueError(f"unknown scaling function {name!r}")


def catalog() -> list[ScalingFn]:
    return [power(3, 2), expm1(), log1p(), arctan(), normcdf_centered()]
