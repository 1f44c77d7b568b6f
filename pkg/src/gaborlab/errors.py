"""Error and warning types shared across the laboratory modules.

Every failure mode that callers are expected to handle programmatically gets
its own class; the service layer maps them onto HTTP error payloads and the
CLI onto exit codes.
"""

from __future__ import annotations


class GaborLabError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergence(GaborLabError):
    """Quadrature failed to reach the requested tolerance within budget."""


class NoBracket(GaborLabError):
    """Root finder was given an interval without a sign change."""


class DomainError(GaborLabError):
    """Argument outside the mathematical domain of the function."""


class EmptyWindow(GaborLabError):
    """Density window contains no populated probe radius."""


class NotPresent(GaborLabError):
    """Attempt to remove a point that is not in the set."""


class AlreadyPresent(GaborLabError):
    """Attempt to add a point that is already in the set."""


class OutOfDomain(GaborLabError):
    """Point lies outside the region where the growth profile is defined."""


class PrecisionInsufficient(GaborLabError):
    """Requested probe is below round-off resolution at the working precision."""


class InvalidParams(GaborLabError):
    """Construction parameters violate a structural constraint."""


class OutOfRange(GaborLabError):
    """Evaluation radius outside the covered range of a measure."""


class WindowTooThin(GaborLabError):
    """Atomization window carries less than one unit of mass."""


class Singularity(GaborLabError):
    """Evaluation exactly at a logarithmic singularity."""


class ZeroOnCircle(GaborLabError):
    """No probe circle clear of zeros could be found after nudging."""


class ResolutionTooCoarse(GaborLabError):
    """Sampling grid too coarse for the requested norm estimate."""


class IllConditioned(GaborLabError):
    """Gram system condition number exceeds the trusted threshold."""


class GridInsufficient(GaborLabError):
    """Signal grid cannot resolve the requested transform point."""


class SupportClipped(UserWarning):
    """Part of a shifted signal fell off the sampling grid."""
