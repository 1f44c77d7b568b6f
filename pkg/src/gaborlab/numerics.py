"""Extended-range scalars, signed log-domain sums, quadrature, root finding.

Several constructions in this package evaluate quantities like
``exp(pi * r**2 / 2)`` at radii far beyond binary64 range, so magnitudes are
carried as ``(sign, log|x|)`` pairs.  The quadrature helper is a thin wrapper
over an adaptive Gauss-Kronrod engine with an explicit evaluation budget;
callers are expected to pass known kink locations as split points instead of
relying on automatic singularity hunting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import mpmath
from scipy.integrate import quad as _scipy_quad

from .errors import DomainError, NoBracket, NonConvergence

# QUADPACK refuses relative tolerances below ~50*eps; requests below that are
# clamped (the engine typically over-delivers on smooth integrands anyway).
_MIN_REL_TOL = 1e-14
_QUADPACK_REL_FLOOR = 1.2e-14
# One Gauss-Kronrod panel costs 21 evaluations of the integrand.
_EVALS_PER_PANEL = 21


@dataclass(frozen=True)
class PrecisionContext:
    """Requested working precision in decimal digits.

    The default (16) selects the native binary64 fast path; anything higher
    switches the few precision-critical routines to mpmath with guard digits.
    """

    decimal_digits: int = 16

    def __post_init__(self) -> None:
        if self.decimal_digits < 3:
            raise DomainError(f"decimal_digits must be >= 3, got {self.decimal_digits}")

    @property
    def uses_mpmath(self) -> bool:
        return self.decimal_digits > 16


@dataclass(frozen=True, order=False)
class LogScalar:
    """A real number stored as sign and natural log of absolute value.

    ``sign`` is -1, 0 or +1; ``log_abs`` is ``-inf`` exactly when ``sign`` is
    0.  The representation is exact under multiplication and loses nothing to
    overflow: ``LogScalar(1, 1e6)`` is a perfectly ordinary value here.
    """

    sign: int
    log_abs: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign == 0 and self.log_abs != -math.inf:
            raise DomainError("zero must carry log_abs = -inf")
        if math.isnan(self.log_abs):
            raise DomainError("log_abs may not be NaN")

    @staticmethod
    def zero() -> "LogScalar":
        return LogScalar(0, -math.inf)

    @staticmethod
    def from_real(x: float) -> "LogScalar":
        if x == 0.0:
            return LogScalar.zero()
        if math.isnan(x) or math.isinf(x):
            raise DomainError(f"cannot represent {x!r}")
        return LogScalar(1 if x > 0 else -1, math.log(abs(x)))

    def to_float(self) -> float:
        """Collapse to binary64; overflows to signed infinity."""
        if self.sign == 0:
            return 0.0
        try:
            mag = math.exp(self.log_abs)
        except OverflowError:
            mag = math.inf
        return self.sign * mag

    def __mul__(self, other: "LogScalar | float | int") -> "LogScalar":
        if not isinstance(other, LogScalar):
            other = LogScalar.from_real(float(other))
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log_abs)

    def __abs__(self) -> "LogScalar":
        return LogScalar(abs(self.sign), self.log_abs)

    def __add__(self, other: "LogScalar") -> "LogScalar":
        return log_sum([self, other])

    def __sub__(self, other: "LogScalar") -> "LogScalar":
        return log_sum([self, -other])

    def rel_close(self, other: "LogScalar", rel_tol: float) -> bool:
        """True when the two values agree to ``rel_tol`` relatively."""
        diff = log_sum([self, -other])
        if diff.sign == 0:
            return True
        bigger = max(self.log_abs, other.log_abs)
        if bigger == -math.inf:
            return True
        return diff.log_abs - bigger <= math.log(rel_tol)


def log_sum(values: Iterable[LogScalar], ctx: PrecisionContext | None = None) -> LogScalar:
    """Signed sum of a sequence of LogScalars, returned as a LogScalar.

    An empty sequence sums to zero.  The float path shifts by the largest
    magnitude and accumulates with exact (compensated) summation, so the
    result is correct to relative ``10**(1 - decimal_digits)`` unless the
    cancellation condition number exceeds the available working precision;
    the mpmath path extends that window with 30 guard digits.
    """
    vals = [v for v in values if v.sign != 0]
    if not vals:
        return LogScalar.zero()
    shift = max(v.log_abs for v in vals)
    if ctx is not None and ctx.uses_mpmath:
        with mpmath.workdps(ctx.decimal_digits + 30):
            total = mpmath.mpf(0)
            for v in vals:
                total += v.sign * mpmath.e ** (mpmath.mpf(v.log_abs) - shift)
            if total == 0:
                return LogScalar.zero()
            return LogScalar(1 if total > 0 else -1, float(mpmath.log(abs(total))) + shift)
    total = math.fsum(v.sign * math.exp(v.log_abs - shift) for v in vals)
    if total == 0.0:
        return LogScalar.zero()
    return LogScalar(1 if total > 0.0 else -1, math.log(abs(total)) + shift)


def adaptive_quad_with_error(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    split_points: Sequence[float] = (),
    budget: int = 10**6,
    accept_roundoff: bool = False,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``; returns (value, error estimate).

    Adaptive Gauss-Kronrod bisection with an embedded error estimate; the
    interval is pre-split at the interior ``split_points`` so piecewise-smooth
    integrands converge at the smooth-function rate.  Raises NonConvergence
    when the evaluation budget is exhausted or the engine reports failure;
    with ``accept_roundoff`` a roundoff-limited result is returned with its
    (larger) error estimate instead of raising.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("endpoints must be finite; map semi-infinite ranges first")
    if rel_tol < _MIN_REL_TOL:
        raise DomainError(f"rel_tol must be >= {_MIN_REL_TOL}, got {rel_tol}")
    if a == b:
        return 0.0, 0.0
    flip = False
    if a > b:
        a, b = b, a
        flip = True
    interior = sorted(p for p in set(split_points) if a < p < b)
    limit = max(10, budget // _EVALS_PER_PANEL)
    result = _scipy_quad(
        f,
        a,
        b,
        epsabs=1e-300,
        epsrel=max(rel_tol, _QUADPACK_REL_FLOOR),
        limit=limit,
        points=interior or None,
        full_output=True,
    )
    if len(result) > 3:
        value, abserr, info, message = result[:4]
        roundoff = "roundoff" in message.lower()
        if not (accept_roundoff and roundoff and math.isfinite(value)):
            raise NonConvergence(
                f"quadrature did not converge: {message.strip()} "
                f"(estimate {value!r}, abserr {abserr!r}, {info['neval']} evaluations)"
            )
    else:
        value, abserr, info = result
    if info["neval"] > budget:
        raise NonConvergence(f"evaluation budget {budget} exhausted ({info['neval']} used)")
    return (-value if flip else value), float(abserr)


def adaptive_quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    split_points: Sequence[float] = (),
    budget: int = 10**6,
) -> float:
    """Integrate ``f`` over the finite interval ``[a, b]``; value only."""
    value, _ = adaptive_quad_with_error(
        f, a, b, rel_tol=rel_tol, split_points=split_points, budget=budget
    )
    return value


def adaptive_quad_zero_to_inf(
    f: Callable[[float], float],
    rel_tol: float = 1e-10,
    breakpoint: float = 1.0,
    split_points: Sequence[float] = (),
    budget: int = 10**6,
) -> float:
    """Integrate ``f`` over (0, inf) via the substitution s -> 1/u.

    The range is split at ``breakpoint``; the outer part becomes the finite
    integral of ``f(1/u) / u**2`` over (0, 1/breakpoint].  Split points apply
    to the inner (untransformed) piece.
    """
    if breakpoint <= 0:
        raise DomainError("breakpoint must be positive")
    inner = adaptive_quad(
        f, 0.0, breakpoint, rel_tol=rel_tol, split_points=split_points, budget=budget // 2
    )
    outer = adaptive_quad(
        lambda u: f(1.0 / u) / (u * u),
        0.0,
        1.0 / breakpoint,
        rel_tol=rel_tol,
        budget=budget // 2,
    )
    return inner + outer


def solve_monotone(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
) -> float:
    """Root of a monotone continuous ``f`` on ``[lo, hi]`` by bisection.

    Endpoint order does not matter.  Stops when the bracket width falls below
    ``tol`` (or an exact zero is hit) and returns the midpoint.  Raises
    NoBracket when the endpoint values have the same sign.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if lo > hi:
        lo, hi = hi, lo
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoBracket(f"f({lo}) = {flo} and f({hi}) = {fhi} have the same sign")
    neg_lo = flo < 0
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket narrower than float spacing
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == neg_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
