"""Dual numeric tower: exact rationals and precision-tagged big floats.

Rational-valued constructions (1/n, 1/n^2, block step weights, basis
spikes) are kept as ``fractions.Fraction`` so sharp identities like
``n * a_n == 1`` can be asserted exactly.  Everything irrational
(k^alpha, ln, erf) lives in ``mpmath`` floats at an explicit bit
precision, 128 bits by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

DEFAULT_PRECISION_BITS = 128

Value = Union[Fraction, mpmath.mpf]


@dataclass(frozen=True)
class ValueKind:
    """Tower tag: exact rationals or floats at a fixed precision."""

    kind: str  # "exact" | "float"
    precision_bits: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exact", "float"):
            raise ValueError(f"unknown value kind {self.kind!r}")
        if self.kind == "float" and (self.precision_bits or 0) < 2:
            raise ValueError("float tower needs a positive precision")

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def label(self) -> str:
        if self.is_exact:
            return "exact"
        return f"float:{self.precision_bits}b"


EXACT = ValueKind("exact")


def float_kind(precision_bits: int = DEFAULT_PRECISION_BITS) -> ValueKind:
    return ValueKind("float", precision_bits)


def widest(*kinds: ValueKind) -> ValueKind:
    """Join of towers: any float input forces a float output."""
    bits = [k.precision_bits for k in kinds if not k.is_exact]
    if not bits:
        return EXACT
    return float_kind(max(b for b in bits if b is not None))


def to_mpf(x: Value | int, precision_bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
    """Round any tower value into an mpf at the given precision."""
    with mpmath.workprec(precision_bits):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


def to_float(x: Value | int) -> float:
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def as_fraction(x: Value | int | str) -> Fraction:
    """Exact conversion; mpf inputs are accepted bit-for-bit."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpmath.mpf):
        return Fraction(*mpmath.libmp.to_rational(x._mpf_))
    return Fraction(x)


def value_le(a: Value | int, b: Value | int) -> bool:
    """Exact comparison across towers (mpf values compare bit-exactly)."""
    if isinstance(a, mpmath.mpf) or isinstance(b, mpmath.mpf):
        return as_fraction(a) <= as_fraction(b)
    return a <= b


def format_value(x: Value | int | None, kind: ValueKind | None = None, digits: int = 12) -> str:
    """Decimal string with an explicit tower tag, for reports."""
    if x is None:
        return ""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        with mpmath.workprec(max(64, 4 * digits)):
            approx = mpmath.mpf(x.numerator) / x.denominator
            return f"{mpmath.nstr(approx, digits)} (exact {x.numerator}/{x.denominator})"
    tag = kind.label() if kind is not None else f"float:{mpmath.mp.prec}b"
    return f"{mpmath.nstr(x, digits)} ({tag})"
