"""Exception types shared across the package."""


class SharpkitError(Exception):
    """Base class for all sharpkit errors."""


class PoleOnUnitCircle(SharpkitError):
    """A transfer function denominator vanishes at an evaluation frequency."""


class NotSymmetric(SharpkitError):
    """A coefficient vector required to be even-symmetric is not."""


class RankDeficient(SharpkitError):
    """A basis matrix does not have full column rank."""


class Infeasible(SharpkitError):
    """A linear program has no feasible point (malformed instance)."""


class Unbounded(SharpkitError):
    """A linear program is unbounded below (malformed instance)."""


class QPathUnavailable(SharpkitError):
    """Band images overlap, so no single-variable target function exists."""


class DegreeMismatch(SharpkitError):
    """Requested factor degrees cannot represent the target polynomial."""
