"""Exception types shared across the toolkit.

Every error names the violated contract; callers that want a verdict
instead of an exception should use the verdict-returning entry points
(an ``Undecided`` outcome is never signalled by raising).
"""


class OlivierKitError(Exception):
    """Base class for all toolkit errors."""


class IndexOutOfDomain(OlivierKitError):
    """A sequence or set was probed at an index < 1."""


class LengthMismatch(OlivierKitError):
    """Parallel lists (coefficients vs. sequences) differ in length."""


class NormalizeZero(OlivierKitError):
    """Normalization requested but no positive mass was found."""


class ExhaustedFiniteSet(OlivierKitError):
    """Enumeration asked for more elements than a finite set holds."""


class DomainViolation(OlivierKitError):
    """A scaling function was evaluated outside its domain."""


class NotInRange(OlivierKitError):
    """No bracket for the requested inverse value could be found."""


class BadTolerance(OlivierKitError):
    """A tolerance argument was zero or negative."""


class RangeSearchExhausted(OlivierKitError):
    """Geometric shrink failed to push g(x) under the requested bound."""


class BlockOverlap(OlivierKitError):
    """Partition blocks overlap on a tested prefix."""


class NoTailBound(OlivierKitError):
    """A certified reciprocal tail rule is required but absent."""


class NotNormalized(OlivierKitError):
    """A basis construction needs a sequence with certified norm <= 1."""


class OverlappingSupports(OlivierKitError):
    """Basis supports are required to be pairwise disjoint."""


class GrowthViolation(OlivierKitError):
    """m_k >= k^(a_k) failed on the verified prefix."""


class DuplicateExponentRows(OlivierKitError):
    """Exponent matrix rows must be pairwise distinct and nonzero."""


class AlphaCollision(OlivierKitError):
    """Generator exponents must be pairwise distinct."""


class ConfigError(OlivierKitError):
    """An experiment configuration failed to parse or validate."""
