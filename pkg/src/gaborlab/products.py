"""Symmetrized genus-2 canonical products and their growth certificates.

The building block is the elementary subharmonic profile
``f(w) = log|1-w| + log|1-iw| + Re(w + iw)`` whose circle maximum has the
closed form ``M_f(r) = log(1 - sqrt2 r + r^2) + sqrt2 r``, attained in the
direction ``arg w = -pi/4``.  Summing ``f(-iz/a_j)`` over a modulus sequence
with ``a_n >= sqrt(n/C)`` yields an entire-function growth envelope whose
slope ``log M_F(R)/R^2`` tends to ``(3 pi/2) C``; when that stays below
``pi/2`` the product lies in the Gaussian-weighted square-integrable class.
A Jensen-formula verifier and a Gaussian-weighted norm estimator close the
loop between zero counting and growth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    DomainError,
    ResolutionTooCoarse,
    Singularity,
    ZeroOnCircle,
)
from .numerics import (
    LogScalar,
    adaptive_quad_with_error,
    adaptive_quad_zero_to_inf,
    log_sum,
)
from .pointset import TWO_PI, PointSet

_SQRT2 = math.sqrt(2.0)
# Below this radius the closed form for M_f loses digits to cancellation and
# the power series (zero of order 3 at the origin) takes over.
_MF_SERIES_CUTOFF = 0.05
_MF_SERIES_TERMS = 48
GROWTH_CONSTANT_TARGET = 1.5 * math.pi


def f_elem(w: complex) -> float:
    """log|1 - w| + log|1 - iw| + Re(w + iw); singular at w = 1 and w = -i."""
    w = complex(w)
    p = abs(1.0 - w)
    q = abs(1.0 - 1j * w)
    if p == 0.0 or q == 0.0:
        raise Singularity(f"f is -infinite at w={w!r}")
    return math.log(p) + math.log(q) + (w.real - w.imag)


def _mf_series(r: float) -> float:
    """M_f(r) = -sum_{k>=3} (2 cos(k pi/4)/k) r^k, accurate for small r."""
    total = 0.0
    rk = r * r * r
    for k in range(3, _MF_SERIES_TERMS):
        c = math.cos(0.25 * math.pi * k)
        if c != 0.0:
            total -= 2.0 * c / k * rk
        rk *= r
    return total


def Mf(r: float) -> float:
    """Circle maximum of f: log(1 - sqrt2 r + r^2) + sqrt2 r, for r >= 0."""
    if math.isnan(r) or r < 0.0:
        raise DomainError(f"Mf needs r >= 0, got {r!r}")
    if r < _MF_SERIES_CUTOFF:
        return _mf_series(r)
    return math.log1p(r * r - _SQRT2 * r) + _SQRT2 * r


@lru_cache(maxsize=1)
def cubic_bound_coefficient() -> float:
    """Fitted kappa with M_f(s) <= kappa s^3 on (0, 1/2] (checked on a grid)."""
    s = np.geomspace(1e-4, 0.5, 4000)
    ratios = np.array([Mf(float(x)) / float(x) ** 3 for x in s])
    return float(ratios.max()) * (1.0 + 1e-9)


@dataclass(frozen=True)
class ProductSpec:
    """Modulus sequence and density parameter of a symmetrized product.

    ``moduli`` must be positive and nondecreasing; beyond index ``n0``
    (1-based) they must satisfy a_n >= sqrt(n/C), which drives every tail
    bound in this module.
    """

    moduli: tuple[float, ...]
    C: float
    n0: int = 1

    def __post_init__(self) -> None:
        if not (self.C > 0.0 and math.isfinite(self.C)):
            raise DomainError(f"C must be finite and > 0, got {self.C}")
        if self.n0 < 1:
            raise DomainError(f"n0 must be >= 1, got {self.n0}")
        a = np.asarray(self.moduli, dtype=float)
        object.__setattr__(self, "moduli", tuple(float(x) for x in a))
        if a.size:
            if not (a > 0.0).all() or not np.isfinite(a).all():
                raise DomainError("moduli must be finite and positive")
            if (np.diff(a) < 0.0).any():
                raise DomainError("moduli must be nondecreasing")
            n = np.arange(1, a.size + 1, dtype=float)
            floor = np.sqrt(n / self.C)
            bad = (a < floor * (1.0 - 1e-12)) & (n >= self.n0)
            if bad.any():
                i = int(np.argmax(bad))
                raise DomainError(
                    f"modulus a_{i + 1}={a[i]:.6g} below sqrt(n/C)={floor[i]:.6g}"
                )

    @classmethod
    def extremal(cls, C: float, n_max: int) -> "ProductSpec":
        """The tightest admissible sequence a_n = sqrt(n/C)."""
        n = np.arange(1, n_max + 1, dtype=float)
        return cls(tuple(np.sqrt(n / C)), C)


def tail_log_bound(r: float, spec: ProductSpec, n_terms: int) -> float:
    """Bound on sum of M_f(r sqrt(C/j)) over neglected factors j > n_terms.

    Explicit terms until the argument drops below 1/2, then the fitted cubic
    bound integrates to 2 kappa (C r^2)^(3/2) / sqrt(j).
    """
    if n_terms < 0 or n_terms > len(spec.moduli):
        raise DomainError(
            f"n_terms must lie in [0, {len(spec.moduli)}], got {n_terms}"
        )
    kappa = cubic_bound_coefficient()
    j_safe = max(n_terms + 1, math.ceil(4.0 * spec.C * r * r))
    explicit = math.fsum(
        Mf(r * math.sqrt(spec.C / j)) for j in range(n_terms + 1, j_safe)
    )
    return explicit + 2.0 * kappa * (spec.C * r * r) ** 1.5 / math.sqrt(j_safe - 1)


def log_abs_F(z: complex, spec: ProductSpec, n_terms: int) -> tuple[float, float]:
    """Partial sum of log|F(z)| = sum_j f(-iz/a_j) and a rigorous tail bound."""
    if n_terms < 0 or n_terms > len(spec.moduli):
        raise DomainError(
            f"n_terms must lie in [0, {len(spec.moduli)}], got {n_terms}"
        )
    z = complex(z)
    if n_terms == 0:
        value = 0.0
    else:
        a = np.asarray(spec.moduli[:n_terms])
        w = (-1j * z) / a
        p = np.abs(1.0 - w)
        q = np.abs(1.0 - 1j * w)
        if (p == 0.0).any() or (q == 0.0).any():
            raise Singularity(f"z={z!r} is a zero of the partial product")
        value = float(np.sum(np.log(p) + np.log(q) + (w.real - w.imag)))
    return value, tail_log_bound(abs(z), spec, n_terms)


@dataclass(frozen=True)
class GrowthReport:
    """Slope profile log M_F(R)/R^2 with tail bounds and the class certificate.

    ``asymptote`` is the conservative estimate slope + tail/R^2 at the
    largest grid radius; ``slack`` its distance below pi/2.  The certificate
    fires only when the slack is positive.
    """

    R_grid: tuple[float, ...]
    slope: tuple[float, ...]
    tail_bound: tuple[float, ...]
    asymptote: float
    slack: float
    in_fock_certified: bool

    def __post_init__(self) -> None:
        if self.in_fock_certified and not self.asymptote < 0.5 * math.pi:
            raise DomainError("certificate requires asymptote < pi/2")

    def to_csv(self) -> str:
        lines = ["R,slope,tail_bound"]
        for r, s, t in zip(self.R_grid, self.slope, self.tail_bound):
            lines.append(f"{r:.17g},{s:.17g},{t:.17g}")
        return "\n".join(lines) + "\n"


def _max_log_abs_over_circle(R: float, spec: ProductSpec, n_terms: int) -> float:
    """max over phi of the partial sum, grid scan plus bounded refinement."""
    a = np.asarray(spec.moduli[:n_terms]) if n_terms else np.empty(0)

    def partial(phi: float) -> float:
        if not n_terms:
            return 0.0
        w = (-1j * R * complex(math.cos(phi), math.sin(phi))) / a
        p = np.abs(1.0 - w)
        q = np.abs(1.0 - 1j * w)
        p = np.where(p == 0.0, 1e-300, p)
        q = np.where(q == 0.0, 1e-300, q)
        return float(np.sum(np.log(p) + np.log(q) + (w.real - w.imag)))

    n_phi = 256
    angles = np.linspace(0.0, TWO_PI, n_phi, endpoint=False)
    values = np.array([partial(float(ph)) for ph in angles])
    i = int(np.argmax(values))
    lo = angles[i] - TWO_PI / n_phi
    hi = angles[i] + TWO_PI / n_phi
    res = minimize_scalar(
        lambda ph: -partial(ph), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-8},
    )
    return max(float(values[i]), -float(res.fun))


def fock_membership_certificate(
    spec: ProductSpec, R_grid: Sequence[float]
) -> GrowthReport:
    """Measure log M_F(R)/R^2 over a radius grid and certify F against pi/2.

    Each slope entry already includes the tail bound, so it upper-bounds the
    true normalized maximum of the full product.
    """
    rr = tuple(float(r) for r in R_grid)
    if any(not (r > 0.0) for r in rr) or list(rr) != sorted(rr):
        raise DomainError("R_grid must be positive and increasing")
    n_terms = len(spec.moduli)
    slopes: list[float] = []
    tails: list[float] = []
    for R in rr:
        peak = _max_log_abs_over_circle(R, spec, n_terms)
        tail = tail_log_bound(R, spec, n_terms)
        slopes.append((peak + tail) / (R * R))
        tails.append(tail)
    if not rr:
        asymptote = 0.0
    else:
        asymptote = slopes[-1]
    slack = 0.5 * math.pi - asymptote
    return GrowthReport(
        R_grid=rr,
        slope=tuple(slopes),
        tail_bound=tuple(tails),
        asymptote=asymptote,
        slack=slack,
        in_fock_certified=slack > 0.0,
    )


def growth_constant(
    form: str = "primary", rel_tol: float = 1e-10, budget: int = 10**6
) -> float:
    """The normalized growth integral; equals 3 pi / 2 in both forms.

    form="primary":  2 * integral of M_f(s)/s^3 over (0, inf);
    form="by_parts": integral of sqrt2 / (1 - sqrt2 s + s^2) over (0, inf).
    """
    if form == "primary":
        return adaptive_quad_zero_to_inf(
            lambda s: 2.0 * Mf(s) / (s * s * s),
            rel_tol=rel_tol,
            breakpoint=2.0,
            budget=budget,
        )
    if form == "by_parts":
        return adaptive_quad_zero_to_inf(
            lambda s: _SQRT2 / (1.0 - _SQRT2 * s + s * s),
            rel_tol=rel_tol,
            breakpoint=2.0,
            budget=budget,
        )
    raise DomainError(f"unknown form {form!r}")


@dataclass(frozen=True)
class JensenReport:
    lhs: float
    rhs: float
    gap: float
    r_used: float
    # Error estimate of the circle quadrature; exceeds rel_tol * |rhs| only
    # when the integrand's singularity structure is roundoff limited.
    quad_error: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {"lhs": self.lhs, "rhs": self.rhs, "gap": self.gap, "r_used": self.r_used},
            sort_keys=True,
        )


def jensen_verify(
    zeros: PointSet, log_r_probe: float, rel_tol: float = 1e-9
) -> JensenReport:
    """Balance zero counting against the circle average of log|F|.

    F is the finite product prod (1 - z/lambda_j), so F(0) = 1 and
    2 pi sum log(r/|lambda_j|) over |lambda_j| < r must equal the integral
    of log|F(r e^{i phi})| over the circle.  The probe radius is nudged
    outward by factors (1 + 2^-m 1e-6), m = 0..20, if it sits on a zero.
    """
    if len(zeros) == 0:
        return JensenReport(0.0, 0.0, 0.0, math.exp(log_r_probe))
    lr = zeros.log_r
    if np.isinf(lr).any():
        raise DomainError("zeros at the origin are not allowed (F(0) must be 1)")

    candidates = [log_r_probe] + [
        log_r_probe + math.log1p(2.0**-m * 1e-6) for m in range(21)
    ]
    log_r_used = None
    for i, cand in enumerate(candidates):
        margin = float(np.min(np.abs(lr - cand)))
        needed = 1e-6 if i == 0 else 1e-12
        if margin >= needed:
            log_r_used = cand
            break
    if log_r_used is None:
        raise ZeroOnCircle("all nudged probe circles meet a zero")

    inside = lr < log_r_used
    lhs = TWO_PI * float(np.sum(log_r_used - lr[inside]))

    # log|1 - e^d e^{i theta}| = max(d, 0) + log|1 - e^{-|d|} e^{i theta}|,
    # stable for zeros far inside the circle where e^d overflows.
    d = log_r_used - lr
    base = np.maximum(d, 0.0)
    damp = np.exp(-np.abs(d))
    args = zeros.phi

    def integrand(phi: float) -> float:
        return float(
            np.sum(base + np.log(np.abs(1.0 - damp * np.exp(1j * (phi - args)))))
        )

    # Break points only where the integrand is nearly singular: zeros close
    # to the probe circle.  quad subdivides the rest on its own.
    near = np.nonzero(np.abs(d) < 0.05)[0]
    if near.size > 40:
        near = near[np.argsort(np.abs(d[near]))[:40]]
    splits = sorted(set(float(args[i]) % TWO_PI for i in near))
    rhs, err = adaptive_quad_with_error(
        integrand, 0.0, TWO_PI, rel_tol=rel_tol, split_points=splits,
        accept_roundoff=True,
    )
    return JensenReport(
        lhs=lhs, rhs=rhs, gap=rhs - lhs, r_used=math.exp(log_r_used),
        quad_error=err,
    )


def fock_norm_estimate(
    log_abs_values: Sequence[tuple[complex, float]], R_max: float
) -> float:
    """Gaussian-weighted squared norm from sampled log|F| on a polar grid.

    Points are grouped into rings by modulus; each ring's Gaussian radial
    mass is integrated in closed form between mid-ring boundaries, so a
    constant F is reproduced exactly.  Raises ResolutionTooCoarse when the
    integrand's log varies by more than 0.1 between neighboring cells.
    """
    if not (R_max > 0.0):
        raise DomainError(f"R_max must be > 0, got {R_max}")
    pts = [(complex(z), float(v)) for z, v in log_abs_values]
    if not pts:
        raise DomainError("empty sample grid")
    radii = np.array([abs(z) for z, _ in pts])
    order = np.argsort(radii, kind="stable")
    radii = radii[order]
    vals = np.array([pts[i][1] for i in order])
    phis = np.array([math.atan2(pts[i][0].imag, pts[i][0].real) for i in order])

    keep = radii <= R_max * (1.0 + 1e-12)
    radii, vals, phis = radii[keep], vals[keep], phis[keep]
    if radii.size == 0:
        raise DomainError("no samples inside R_max")

    ring_breaks = np.nonzero(np.diff(radii) > 1e-9 * max(R_max, 1.0))[0] + 1
    ring_slices = np.split(np.arange(radii.size), ring_breaks)
    ring_r = np.array([radii[s[0]] for s in ring_slices])

    edges = np.empty(ring_r.size + 1)
    edges[0] = 0.0
    edges[1:-1] = 0.5 * (ring_r[:-1] + ring_r[1:])
    edges[-1] = R_max

    terms: list[LogScalar] = []
    prev_mean = None
    for s, r_lo, r_hi in zip(ring_slices, edges[:-1], edges[1:]):
        ring_vals = vals[s]
        ring_phis = phis[s]
        aorder = np.argsort(ring_phis, kind="stable")
        ring_vals = ring_vals[aorder]
        n = ring_vals.size
        # The Gaussian radial factor is integrated in closed form below, so
        # resolution only constrains the sampled part 2 log|F|.
        log_integrand = 2.0 * ring_vals
        if n > 1:
            gaps = np.abs(np.diff(np.concatenate([log_integrand, log_integrand[:1]])))
            if float(gaps.max()) >= 0.1:
                raise ResolutionTooCoarse(
                    "log integrand varies >= 0.1 between angular neighbors"
                )
        mean = float(np.mean(log_integrand))
        if prev_mean is not None and abs(mean - prev_mean) >= 0.1:
            raise ResolutionTooCoarse(
                "log integrand varies >= 0.1 between radial neighbors"
            )
        prev_mean = mean
        # closed-form Gaussian mass of the ring, split evenly among cells
        lo2, hi2 = math.pi * r_lo * r_lo, math.pi * r_hi * r_hi
        ring_mass = math.exp(-lo2) - math.exp(-hi2)
        if ring_mass <= 0.0:
            continue
        log_cell = math.log(ring_mass) - math.log(n)
        for v in ring_vals:
            term_log = 2.0 * float(v) + log_cell
            if math.isinf(term_log) and term_log < 0:
                continue
            terms.append(LogScalar(1, term_log))
    return log_sum(terms).to_float()
