"""Counting densities of planar point sets and the trade-off bound checks.

Upper and lower densities are limits of ``card(S in B(0, r)) / (pi r^2)``;
at desk scale they are estimated over a finite window of probe radii, with a
spread diagnostic instead of a pretended limit.  The trade-off function
``tau(t) = t log(e/t)`` links the largest achievable upper density to the
lower density and is checked here both directly and through the Jensen-type
inequality it comes from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, EmptyWindow
from .pointset import COUNTING_GUARD, LogPolarPoint, PointSet, TWO_PI

LN10 = math.log(10.0)
# Tolerance used when deciding whether beta <= tau(alpha) holds.
TRADEOFF_TOL = 1e-12
# Default slack for the sharp upper-bound check on estimated densities;
# finite-window estimates of the atomized constructions carry a few percent
# of discretization noise on both axes.
SHARP_BOUND_TOL = 0.05


@dataclass(frozen=True)
class DensityReport:
    """Windowed density estimate over a geometric grid of probe radii."""

    upper: float
    lower: float
    window_log_r: tuple[float, float]
    eval_radii_count: int
    convergence_spread: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower <= self.upper):
            raise DomainError(
                f"need 0 <= lower <= upper, got lower={self.lower}, upper={self.upper}"
            )


@dataclass(frozen=True)
class TradeoffCheck:
    holds: bool
    gamma_used: float
    slack: float


@dataclass(frozen=True)
class SharpBoundCheck:
    passes: bool
    upper: float
    lower: float
    tau_at_upper: float | None
    tol: float


def counting(points: PointSet, log_r: float) -> int:
    """Points of the set with log-modulus below ``log_r`` (circle inclusive)."""
    return points.counting(log_r)


def tau(t: float) -> float:
    """The trade-off function t * log(e / t), defined for t > 0."""
    if not (t > 0.0):
        raise DomainError(f"tau needs t > 0, got {t!r}")
    return t * (1.0 - math.log(t))


def density_grid(window_log_r: tuple[float, float], radii_per_decade: int) -> np.ndarray:
    lo, hi = float(window_log_r[0]), float(window_log_r[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError(f"window must be finite with lo < hi, got {window_log_r!r}")
    if radii_per_decade < 10:
        raise DomainError(f"radii_per_decade must be >= 10, got {radii_per_decade}")
    count = int(math.ceil((hi - lo) * radii_per_decade / LN10)) + 1
    return np.linspace(lo, hi, max(count, 2))


def density_report(
    points: PointSet,
    window_log_r: tuple[float, float],
    radii_per_decade: int = 10,
) -> DensityReport:
    """Estimate upper/lower density of ``points`` over a log-radius window.

    Probe radii form a geometric grid with ``radii_per_decade`` points per
    decade.  ``convergence_spread`` compares the estimates over the two
    dyadic halves of the window; a small spread means the window is long
    enough that the estimate has stopped drifting.
    """
    grid = density_grid(window_log_r, radii_per_decade)
    counts = np.searchsorted(points.log_r, grid + COUNTING_GUARD, side="left")
    if counts.max(initial=0) == 0:
        raise EmptyWindow(f"no populated probe radius in window {window_log_r!r}")
    dens = counts * np.exp(-2.0 * grid) / math.pi
    mid = 0.5 * (grid[0] + grid[-1])
    first = dens[grid <= mid]
    second = dens[grid > mid]
    if first.size and second.size:
        spread = max(
            abs(float(first.max()) - float(second.max())),
            abs(float(first.min()) - float(second.min())),
        )
    else:
        spread = 0.0
    return DensityReport(
        upper=float(dens.max()),
        lower=float(dens.min()),
        window_log_r=(float(grid[0]), float(grid[-1])),
        eval_radii_count=int(grid.size),
        convergence_spread=spread,
    )


def symmetrize(points: PointSet) -> PointSet:
    """Union of the set with its rotation by pi/2, duplicates merged."""
    lr = np.concatenate((points.log_r, points.log_r))
    ph = np.concatenate((points.phi, np.mod(points.phi + 0.5 * math.pi, TWO_PI)))
    order = np.lexsort((ph, lr))
    lr, ph = lr[order], ph[order]
    keep = np.ones(lr.size, dtype=bool)
    if lr.size > 1:
        same_r = np.diff(lr) <= 1e-12
        gap = np.abs(np.diff(ph))
        same_phi = np.minimum(gap, TWO_PI - gap) <= 1e-12
        keep[1:] = ~(same_r & same_phi)
    return PointSet(lr[keep], ph[keep], label=points.label)


def adjust(
    points: PointSet,
    add: Iterable[LogPolarPoint] = (),
    remove: Iterable[LogPolarPoint] = (),
) -> PointSet:
    """Remove then add finitely many points, enforcing membership."""
    out = points
    for p in remove:
        out = out.without_point(p)
    for p in add:
        out = out.with_point(p)
    return out


def circle_pack_set(
    circle_log_radii: Sequence[float],
    per_circle_counts: Sequence[int],
    label: str = "",
) -> PointSet:
    """Points packed on circles: ``counts[k]`` equally spaced on circle k.

    Phases start at 0 on every circle.  Radii must be strictly increasing and
    the two sequences must have equal length.
    """
    radii = [float(r) for r in circle_log_radii]
    counts = [int(c) for c in per_circle_counts]
    if len(radii) != len(counts):
        raise DomainError(
            f"{len(radii)} radii vs {len(counts)} counts; lengths must match"
        )
    if any(c < 1 for c in counts):
        raise DomainError("per-circle counts must be >= 1")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("circle log-radii must be strictly increasing")
    lr = np.repeat(radii, counts)
    ph = np.concatenate([TWO_PI * np.arange(c) / c for c in counts]) if counts else np.array([])
    return PointSet(lr, ph, label=label)


def lattice_set(spacing: float, radius: float, label: str = "") -> PointSet:
    """The scaled integer lattice ``spacing * (Z + iZ)`` inside radius ``radius``.

    The origin is included (as ``log_r = -inf``).
    """
    if spacing <= 0 or radius <= 0:
        raise DomainError("spacing and radius must be positive")
    n = int(math.floor(radius / spacing))
    coords = spacing * np.arange(-n, n + 1)
    X, Y = np.meshgrid(coords, coords)
    x, y = X.ravel(), Y.ravel()
    inside = x * x + y * y <= radius * radius * (1.0 + 1e-15)
    x, y = x[inside], y[inside]
    rr = np.hypot(x, y)
    with np.errstate(divide="ignore"):
        lr = np.log(rr)
    ph = np.mod(np.arctan2(y, x), TWO_PI)
    ph[rr == 0.0] = 0.0
    return PointSet(lr, ph, label=label)


def jensen_tradeoff_check(alpha: float, beta: float) -> TradeoffCheck:
    """Check ``alpha log(gamma^2) + beta <= gamma^2`` at the tight radius ratio.

    The optimal ratio is ``gamma = sqrt(alpha)``, where the inequality reduces
    to ``beta <= tau(alpha)``.  ``slack`` is the inequality margin at that
    gamma (nonnegative exactly when the bound holds, up to rounding).
    """
    if not (alpha > 1.0):
        raise DomainError(f"alpha must exceed 1, got {alpha!r}")
    if not (beta >= 0.0):
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    gamma = math.sqrt(alpha)
    # gamma^2 == alpha exactly; squaring the root would only add rounding.
    slack = alpha - alpha * math.log(alpha) - beta
    holds = beta <= tau(alpha) + TRADEOFF_TOL
    return TradeoffCheck(holds=holds, gamma_used=gamma, slack=slack)


def sharp_upper_bound_check(
    report: DensityReport, tol: float = SHARP_BOUND_TOL
) -> SharpBoundCheck:
    """Check a density report against the sharp bound: upper <= e and
    lower <= tau(upper) whenever upper exceeds 1."""
    if tol < 0:
        raise DomainError("tol must be >= 0")
    upper, lower = report.upper, report.lower
    if upper <= math.e + tol:
        if upper <= 1.0:
            return SharpBoundCheck(True, upper, lower, None, tol)
        t = tau(upper)
        return SharpBoundCheck(lower <= t + tol, upper, lower, t, tol)
    t = tau(upper) if upper > 0 else None
    return SharpBoundCheck(False, upper, lower, t, tol)
