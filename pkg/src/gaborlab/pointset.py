"""Planar point sets in log-polar coordinates.

Radii in this package range from desk scale up to exp(exp(2*pi)), so points
carry ``log_r`` rather than ``r``; the origin is encoded as ``log_r = -inf``.
Sets are kept sorted by increasing log-radius with simple (multiplicity one)
points only.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import AlreadyPresent, DomainError, NotPresent

TWO_PI = 2.0 * math.pi
# Two coordinates closer than this (log_r absolute, phi circular) are the
# same point for duplicate detection and membership tests.
COINCIDENCE_TOL = 1e-12
# Points whose log-modulus exceeds a probe log-radius by at most this much
# still count as inside: a point exactly on the circle is inside.
COUNTING_GUARD = 1e-12

CSV_HEADER = "log_r,phi"


def canonical_phi(phi: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    if math.isnan(phi) or math.isinf(phi):
        raise DomainError(f"phi must be finite, got {phi!r}")
    out = math.fmod(phi, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    if out >= TWO_PI:  # fmod rounding can land exactly on 2*pi
        out = 0.0
    return out


@dataclass(frozen=True)
class LogPolarPoint:
    """A point given by log-modulus and argument in [0, 2*pi)."""

    log_r: float
    phi: float

    def __post_init__(self) -> None:
        if math.isnan(self.log_r) or self.log_r == math.inf:
            raise DomainError(f"log_r must be < +inf and not NaN, got {self.log_r!r}")
        object.__setattr__(self, "phi", canonical_phi(self.phi))
        if self.log_r == -math.inf:
            object.__setattr__(self, "phi", 0.0)

    @staticmethod
    def from_xy(x: float, y: float) -> "LogPolarPoint":
        r = math.hypot(x, y)
        if r == 0.0:
            return LogPolarPoint(-math.inf, 0.0)
        return LogPolarPoint(math.log(r), math.atan2(y, x))

    def to_xy(self) -> tuple[float, float]:
        if self.log_r == -math.inf:
            return (0.0, 0.0)
        r = math.exp(self.log_r)
        return (r * math.cos(self.phi), r * math.sin(self.phi))

    def to_complex(self) -> complex:
        x, y = self.to_xy()
        return complex(x, y)


def _circular_close(phi_a: np.ndarray, phi_b: np.ndarray, tol: float) -> np.ndarray:
    gap = np.abs(phi_a - phi_b)
    return np.minimum(gap, TWO_PI - gap) <= tol


class PointSet:
    """Immutable collection of simple points sorted by (log_r, phi)."""

    __slots__ = ("_log_r", "_phi", "label")

    def __init__(
        self,
        log_r: Sequence[float] | np.ndarray,
        phi: Sequence[float] | np.ndarray,
        label: str = "",
    ) -> None:
        lr = np.asarray(log_r, dtype=float)
        ph = np.asarray(phi, dtype=float)
        if lr.shape != ph.shape or lr.ndim != 1:
            raise DomainError("log_r and phi must be 1-d arrays of equal length")
        if np.any(np.isnan(lr)) or np.any(lr == math.inf):
            raise DomainError("log_r entries must be < +inf and not NaN")
        if lr.size and (np.any(np.isnan(ph)) or np.any(np.isinf(ph))):
            raise DomainError("phi entries must be finite")
        ph = np.mod(ph, TWO_PI)
        ph[ph >= TWO_PI] = 0.0
        ph[lr == -math.inf] = 0.0
        order = np.lexsort((ph, lr))
        lr = np.ascontiguousarray(lr[order])
        ph = np.ascontiguousarray(ph[order])
        self._check_simple(lr, ph)
        lr.flags.writeable = False
        ph.flags.writeable = False
        self._log_r = lr
        self._phi = ph
        self.label = label

    @staticmethod
    def _check_simple(lr: np.ndarray, ph: np.ndarray) -> None:
        if lr.size < 2:
            return
        same_r = np.diff(lr) <= COINCIDENCE_TOL
        same_phi = _circular_close(ph[1:], ph[:-1], COINCIDENCE_TOL)
        if np.any(same_r & same_phi):
            i = int(np.argmax(same_r & same_phi))
            raise DomainError(
                f"duplicate point (log_r={lr[i]!r}, phi={ph[i]!r}); simple points only"
            )
        # A run of equal log_r can also collide across the 0/2*pi seam.
        starts = np.flatnonzero(np.concatenate(([True], ~same_r)))
        ends = np.concatenate((starts[1:], [lr.size]))
        for s, e in zip(starts, ends):
            if e - s >= 2 and (TWO_PI - (ph[e - 1] - ph[s])) <= COINCIDENCE_TOL:
                raise DomainError(
                    f"duplicate point across the angular seam at log_r={lr[s]!r}"
                )

    @staticmethod
    def from_points(points: Iterable[LogPolarPoint], label: str = "") -> "PointSet":
        pts = list(points)
        return PointSet(
            [p.log_r for p in pts], [p.phi for p in pts], label=label
        )

    @property
    def log_r(self) -> np.ndarray:
        return self._log_r

    @property
    def phi(self) -> np.ndarray:
        return self._phi

    def __len__(self) -> int:
        return int(self._log_r.size)

    def __iter__(self) -> Iterator[LogPolarPoint]:
        for lr, ph in zip(self._log_r, self._phi):
            yield LogPolarPoint(float(lr), float(ph))

    def __getitem__(self, i: int) -> LogPolarPoint:
        return LogPolarPoint(float(self._log_r[i]), float(self._phi[i]))

    def counting(self, log_r: float) -> int:
        """Number of points with log-modulus below ``log_r``.

        Points exactly on the probe circle count as inside: the comparison is
        strict but applied with a guard band of ``COUNTING_GUARD``.
        """
        if math.isnan(log_r):
            raise DomainError("probe log_r may not be NaN")
        if log_r == -math.inf:  # radius-zero circle still contains the origin
            return int(np.searchsorted(self._log_r, -math.inf, side="right"))
        return int(np.searchsorted(self._log_r, log_r + COUNTING_GUARD, side="left"))

    def index_of(self, point: LogPolarPoint) -> int | None:
        """Index of a point matching within coincidence tolerance, else None."""
        lo = int(np.searchsorted(self._log_r, point.log_r - COINCIDENCE_TOL, side="left"))
        hi = int(np.searchsorted(self._log_r, point.log_r + COINCIDENCE_TOL, side="right"))
        if point.log_r == -math.inf:
            lo, hi = 0, int(np.searchsorted(self._log_r, -math.inf, side="right"))
            if hi > lo:
                return lo
            return None
        for i in range(lo, hi):
            gap = abs(self._phi[i] - point.phi)
            if min(gap, TWO_PI - gap) <= COINCIDENCE_TOL:
                return i
        return None

    def with_point(self, point: LogPolarPoint) -> "PointSet":
        if self.index_of(point) is not None:
            raise AlreadyPresent(f"point {point} already in set")
        return PointSet(
            np.concatenate((self._log_r, [point.log_r])),
            np.concatenate((self._phi, [point.phi])),
            label=self.label,
        )

    def without_point(self, point: LogPolarPoint) -> "PointSet":
        i = self.index_of(point)
        if i is None:
            raise NotPresent(f"point {point} not in set")
        return PointSet(
            np.delete(self._log_r, i), np.delete(self._phi, i), label=self.label
        )

    def to_csv(self) -> str:
        """Serialize as CSV with 17 significant digits per coordinate."""
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for lr, ph in zip(self._log_r, self._phi):
            buf.write("%.17g,%.17g\n" % (lr, ph))
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str, label: str = "") -> "PointSet":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0].strip() != CSV_HEADER:
            raise DomainError(f"point-set CSV must start with header {CSV_HEADER!r}")
        lr: list[float] = []
        ph: list[float] = []
        for ln in lines[1:]:
            parts = ln.split(",")
            if len(parts) != 2:
                raise DomainError(f"malformed point-set CSV row {ln!r}")
            lr.append(float(parts[0]))
            ph.append(float(parts[1]))
        return PointSet(lr, ph, label=label)
