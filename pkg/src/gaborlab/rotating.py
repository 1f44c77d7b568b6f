"""Rotating-growth profile with slowly oscillating counting density.

Everything lives in log-polar coordinates ``(log_r, phi)``: the interesting
radii satisfy ``log log r ~ pi * n``, so ``r`` itself is never formed.  The
angle ``theta = log(log r)`` advances by ``pi`` across each annulus; four
curves whose argument rotates at ``theta / 2`` split every annulus into four
sectors, and a trigonometric profile ``g`` is glued from three branches so
that its circle average equals ``2 |sin theta(r)|`` while the associated
potential stays subharmonic.  The zero set itself is never enumerated; all
probes are functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import mpmath
import numpy as np

from .errors import DomainError, OutOfDomain, PrecisionInsufficient
from .numerics import LogScalar, adaptive_quad
from .pointset import TWO_PI, LogPolarPoint

# Points within this angular (or theta) distance of a boundary curve are
# classified as being on the boundary set.
BOUNDARY_TOL = 1e-14

REGION_KINDS = ("OnS", "P1", "P2", "P3", "Ell1", "Ell2", "BaseDisk")


@dataclass(frozen=True)
class RotatingParams:
    """Base-disk index and working precision for the rotating profile.

    The construction starts at radius ``R = exp(exp(pi * K))``; everything
    below is the base disk.  ``digits`` drives the mpmath paths (identity
    residuals, angular means, circle-mean probes).
    """

    K: int = 1
    digits: int = 60

    def __post_init__(self) -> None:
        if self.K < 1:
            raise DomainError(f"K must be >= 1, got {self.K}")
        if self.digits < 30:
            raise DomainError(f"digits must be >= 30, got {self.digits}")

    @property
    def base_log_r(self) -> float:
        """log R of the base disk boundary: exp(pi * K)."""
        return math.exp(math.pi * self.K)


@dataclass(frozen=True)
class RegionLabel:
    kind: str
    annulus_n: int | None = None
    sector_k: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in REGION_KINDS:
            raise DomainError(f"unknown region kind {self.kind!r}")
        if self.sector_k is not None and self.sector_k not in (1, 2, 3, 4):
            raise DomainError(f"sector_k must be in 1..4, got {self.sector_k}")


def theta(log_r: float, digits: int | None = None) -> float:
    """The rotation angle log(log_r); defined for log_r > 1."""
    if not (log_r > 1.0):
        raise DomainError(f"theta needs log_r > 1, got {log_r!r}")
    if digits is not None and digits > 16:
        with mpmath.workdps(digits):
            return float(mpmath.log(log_r))
    return math.log(log_r)


def sector_index_1(n: int) -> int:
    """Sector of annulus n crossed by the positive real axis: 3 - n mod 4."""
    return (2 - n) % 4 + 1


def sector_index_2(n: int) -> int:
    """Sector of annulus n crossed by the rotating ray arg z = theta: n mod 4."""
    return (n - 1) % 4 + 1


def g_components(p: LogPolarPoint, digits: int | None = None) -> tuple[float, float, float]:
    """The three branch values (g1, g2, g3) at a point.

    g1 = cos(2 phi), g2 = cos(2 phi - 2 theta), g3 = cos(2 phi - theta) cos(theta).
    """
    th = theta(p.log_r, digits)
    if digits is not None and digits > 16:
        with mpmath.workdps(digits):
            th_mp = mpmath.log(mpmath.mpf(p.log_r))
            ph = mpmath.mpf(p.phi)
            return (
                float(mpmath.cos(2 * ph)),
                float(mpmath.cos(2 * ph - 2 * th_mp)),
                float(mpmath.cos(2 * ph - th_mp) * mpmath.cos(th_mp)),
            )
    return (
        math.cos(2.0 * p.phi),
        math.cos(2.0 * p.phi - 2.0 * th),
        math.cos(2.0 * p.phi - th) * math.cos(th),
    )


def identity_residuals(log_r: float, phi: float, params: RotatingParams) -> tuple[float, float]:
    """Residuals of the two gluing identities at working precision.

    Returns ``|g3 - (g1 + g2)/2|`` and
    ``|(g1 - g2) - 2 sin(theta) sin(theta - 2 phi)|``.
    """
    with mpmath.workdps(params.digits):
        th = mpmath.log(mpmath.mpf(log_r))
        ph = mpmath.mpf(phi)
        g1 = mpmath.cos(2 * ph)
        g2 = mpmath.cos(2 * ph - 2 * th)
        g3 = mpmath.cos(2 * ph - th) * mpmath.cos(th)
        r1 = abs(g3 - (g1 + g2) / 2)
        r2 = abs((g1 - g2) - 2 * mpmath.sin(th) * mpmath.sin(th - 2 * ph))
        return float(r1), float(r2)


def gamma_angles(theta_value: float) -> list[float]:
    """Angles of the four sector curves at fixed radius: theta/2 + k pi/2."""
    return [math.fmod(0.5 * theta_value + 0.5 * math.pi * k, TWO_PI) for k in (1, 2, 3, 4)]


def classify(p: LogPolarPoint, params: RotatingParams) -> RegionLabel:
    """Locate a point in the region decomposition.

    Boundary cases (the shells where theta is a multiple of pi, and the four
    sector curves) report ``OnS``; the two distinguished rays report ``Ell1``
    and ``Ell2`` with their sector recorded.
    """
    if p.log_r <= 1.0:
        return RegionLabel("BaseDisk")
    th = theta(p.log_r)
    shell = round(th / math.pi)
    if abs(th - math.pi * shell) <= BOUNDARY_TOL:
        if shell < params.K:
            return RegionLabel("BaseDisk")
        return RegionLabel("OnS", annulus_n=int(shell))
    n = int(math.floor(th / math.pi))
    if n < params.K:
        return RegionLabel("BaseDisk")
    d = math.fmod(p.phi - 0.5 * th, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    quarter = 0.5 * math.pi
    j = round(d / quarter)
    if abs(d - j * quarter) <= BOUNDARY_TOL:
        k = 4 if j % 4 == 0 else j % 4
        return RegionLabel("OnS", annulus_n=n, sector_k=k)
    m = int(d // quarter) % 4
    sector = 4 if m == 0 else m
    if min(p.phi, TWO_PI - p.phi) <= BOUNDARY_TOL:
        return RegionLabel("Ell1", annulus_n=n, sector_k=sector)
    ray2 = math.fmod(th, TWO_PI)
    gap2 = abs(p.phi - ray2)
    if min(gap2, TWO_PI - gap2) <= BOUNDARY_TOL:
        return RegionLabel("Ell2", annulus_n=n, sector_k=sector)
    if sector == sector_index_1(n):
        return RegionLabel("P1", annulus_n=n, sector_k=sector)
    if sector == sector_index_2(n):
        return RegionLabel("P2", annulus_n=n, sector_k=sector)
    return RegionLabel("P3", annulus_n=n, sector_k=sector)


def branch_for(label: RegionLabel) -> int:
    """Branch index used on a region: 1 on P1, 2 on P2, 3 elsewhere."""
    if label.kind == "BaseDisk":
        raise OutOfDomain("profile not defined on the base disk")
    if label.kind == "Ell1" or (
        label.kind in ("P1", "P2", "P3")
        and label.sector_k == sector_index_1(label.annulus_n or 0)
    ):
        return 1
    if label.kind == "Ell2" or (
        label.kind in ("P1", "P2", "P3")
        and label.sector_k == sector_index_2(label.annulus_n or 0)
    ):
        return 2
    return 3


def g(p: LogPolarPoint, params: RotatingParams) -> float:
    """The glued profile: g1 on P1, g2 on P2, g3 elsewhere.

    On the boundary set the three admissible branches agree up to rounding;
    the averaged branch is returned there.
    """
    label = classify(p, params)
    comps = g_components(p)
    if label.kind == "OnS":
        return comps[2]
    return comps[branch_for(label) - 1]


def _mp_theta(log_r: mpmath.mpf) -> mpmath.mpf:
    return mpmath.log(log_r)


def _mp_branch_g(j: int, log_r: mpmath.mpf, phi: mpmath.mpf) -> mpmath.mpf:
    th = _mp_theta(log_r)
    if j == 1:
        return mpmath.cos(2 * phi)
    if j == 2:
        return mpmath.cos(2 * phi - 2 * th)
    if j == 3:
        return mpmath.cos(2 * phi - th) * mpmath.cos(th)
    raise DomainError(f"branch index must be 1, 2 or 3, got {j}")


def _mp_branch_h(j: int, log_r: mpmath.mpf, phi: mpmath.mpf) -> mpmath.mpf:
    t = log_r
    gj = _mp_branch_g(j, log_r, phi)
    prefactor = mpmath.pi / 2 - 4 / t
    return mpmath.e ** (2 * t) * (prefactor * gj + 4 / t)


def branch_values_mp(
    log_r: "mpmath.mpf | float", phi: "mpmath.mpf | float", digits: int
) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """All three branch values at mpmath precision (for boundary studies)."""
    with mpmath.workdps(digits):
        lr = mpmath.mpf(log_r)
        ph = mpmath.mpf(phi)
        return tuple(_mp_branch_g(j, lr, ph) for j in (1, 2, 3))


def _h_scalar(g_value: float, log_r: float) -> LogScalar:
    t = log_r
    m = (0.5 * math.pi - 4.0 / t) * g_value + 4.0 / t
    if m == 0.0:
        return LogScalar.zero()
    return LogScalar(1 if m > 0 else -1, math.log(abs(m)) + 2.0 * t)


def h_branch(j: int, p: LogPolarPoint, params: RotatingParams) -> LogScalar:
    """Potential branch: (pi r^2 / 2 - 4 r^2 / log r) g_j + 4 r^2 / log r."""
    if j not in (1, 2, 3):
        raise DomainError(f"branch index must be 1, 2 or 3, got {j}")
    label = classify(p, params)
    if label.kind == "BaseDisk":
        raise OutOfDomain("potential branch not defined on the base disk")
    return _h_scalar(g_components(p)[j - 1], p.log_r)


def h(p: LogPolarPoint, params: RotatingParams) -> LogScalar:
    """The glued potential; equals (pi/2) r^2 where g = 1 and 4 r^2/log r where g = 0."""
    return _h_scalar(g(p, params), p.log_r)


def discrete_mean_deficit(
    func: Callable[[mpmath.mpf, mpmath.mpf], mpmath.mpf],
    log_r: float,
    phi: float,
    rel_radius: float,
    digits: int,
) -> LogScalar:
    """Eight-point circle mean of ``func`` minus its center value.

    ``func`` receives mpmath log-polar coordinates; the probe circle has
    radius ``rel_radius * r`` around the center, applied via the exact
    log-polar displacement ``log(1 + u e^{i psi})``.  A nonnegative deficit
    at small radius is the discrete fingerprint of subharmonicity.
    """
    if not (0.0 < rel_radius < 0.5):
        raise DomainError(f"rel_radius must be in (0, 0.5), got {rel_radius}")
    with mpmath.workdps(digits + 15):
        t0 = mpmath.mpf(log_r)
        ph0 = mpmath.mpf(phi)
        u = mpmath.mpf(rel_radius)
        center = func(t0, ph0)
        acc = mpmath.mpf(0)
        for i in range(8):
            psi = mpmath.pi * i / 4 - ph0
            w = mpmath.log(1 + u * mpmath.e ** (1j * psi))
            acc += func(t0 + w.real, ph0 + w.imag)
        deficit = acc / 8 - center
        if deficit == 0:
            return LogScalar.zero()
        return LogScalar(int(mpmath.sign(deficit)), float(mpmath.log(abs(deficit))))


def subharmonicity_probe(j: int, p: LogPolarPoint, params: RotatingParams) -> LogScalar:
    """Circle-mean deficit of potential branch j at probe radius r * 10^(-digits/3).

    Raises PrecisionInsufficient when the deficit magnitude is at or below
    the round-off floor of the center value at the working precision.
    """
    if j not in (1, 2, 3):
        raise DomainError(f"branch index must be 1, 2 or 3, got {j}")
    if classify(p, params).kind == "BaseDisk":
        raise OutOfDomain("probe point must lie above the base disk")
    rel_radius = 10.0 ** (-params.digits / 3.0)
    deficit = discrete_mean_deficit(
        lambda t, ph: _mp_branch_h(j, t, ph), p.log_r, p.phi, rel_radius, params.digits
    )
    center = h_branch(j, p, params)
    floor_log = center.log_abs - (params.digits - 5) * math.log(10.0)
    if deficit.sign == 0 or deficit.log_abs <= floor_log:
        raise PrecisionInsufficient(
            f"deficit below round-off resolution at {params.digits} digits"
        )
    return deficit


def angular_mean_g(log_r: float, params: RotatingParams) -> float:
    """Mean-free check value: integral of g over the circle of log-radius log_r.

    Integrates branch by branch between consecutive sector curves.  The exact
    value is ``2 |sin theta(r)|``.
    """
    th = theta(log_r)
    n = int(math.floor(th / math.pi))
    if n < params.K:
        raise OutOfDomain("circle must lie above the base disk")
    start = 0.5 * th + 0.5 * math.pi  # angle of the first sector curve
    pieces: list[tuple[float, float, int]] = []
    for k in (1, 2, 3, 4):
        a = start + 0.5 * math.pi * (k - 1)
        b = a + 0.5 * math.pi
        if k == sector_index_1(n):
            j = 1
        elif k == sector_index_2(n):
            j = 2
        else:
            j = 3
        pieces.append((a, b, j))
    if params.digits > 16:
        with mpmath.workdps(params.digits):
            lr = mpmath.mpf(log_r)
            total = mpmath.mpf(0)
            for a, b, j in pieces:
                total += mpmath.quad(
                    lambda ph, j=j: _mp_branch_g(j, lr, ph), [a, b]
                )
            return float(total)
    th_f = th

    def branch(j: int, ph: float) -> float:
        if j == 1:
            return math.cos(2.0 * ph)
        if j == 2:
            return math.cos(2.0 * ph - 2.0 * th_f)
        return math.cos(2.0 * ph - th_f) * math.cos(th_f)

    return math.fsum(
        adaptive_quad(lambda ph, j=j: branch(j, ph), a, b, rel_tol=1e-12)
        for a, b, j in pieces
    )


def predicted_counting(log_r: float, params: RotatingParams) -> LogScalar:
    """Predicted zero count inside radius r: |sin theta(r)| * r^2."""
    th = theta(log_r)
    if th < math.pi * params.K - BOUNDARY_TOL:
        raise OutOfDomain("prediction applies above the base disk")
    s = abs(math.sin(th))
    if s == 0.0:
        return LogScalar.zero()
    return LogScalar(1, math.log(s) + 2.0 * log_r)


def predicted_density(log_r: float, params: RotatingParams) -> float:
    """Predicted counting density n(r) / (pi r^2) = |sin theta(r)| / pi."""
    th = theta(log_r)
    if th < math.pi * params.K - BOUNDARY_TOL:
        raise OutOfDomain("prediction applies above the base disk")
    return abs(math.sin(th)) / math.pi


def verification_summary(
    params: RotatingParams,
    n_identity: int = 2000,
    n_radii: int = 20,
    n_probes: int = 25,
    seed: int = 0,
    tol_identity: float = 1e-14,
    tol_mean: float = 1e-10,
    tol_density: float = 1e-6,
) -> dict:
    """Run the identity, angular-mean, density-sup and probe checks.

    Samples live in the first annulus above the base disk.  Returns a flat
    dict of measured maxima/minima, the tolerances used, and check verdicts.
    """
    rng = np.random.default_rng(seed)
    k = params.K
    th_lo, th_hi = math.pi * k, math.pi * (k + 1)

    res1_max = res2_max = 0.0
    for _ in range(n_identity):
        th = th_lo + (th_hi - th_lo) * rng.random()
        lr = math.exp(th)
        ph = TWO_PI * rng.random()
        r1, r2 = identity_residuals(lr, ph, params)
        res1_max = max(res1_max, r1)
        res2_max = max(res2_max, r2)
    identities_ok = res1_max <= tol_identity and res2_max <= tol_identity

    mean_err_max = 0.0
    for i in range(n_radii):
        th = th_lo + (th_hi - th_lo) * (i + 0.5) / n_radii
        lr = math.exp(th)
        target = 2.0 * abs(math.sin(th))
        mean_err_max = max(mean_err_max, abs(angular_mean_g(lr, params) - target))
    means_ok = mean_err_max <= tol_mean

    ths = np.linspace(th_lo, th_hi, 4001)
    sup = float(np.max(np.abs(np.sin(ths)))) / math.pi
    density_ok = (1.0 / math.pi - tol_density) <= sup <= 1.0 / math.pi

    margin = 1e-3
    probe_signs: dict[str, int] = {}
    probes_ok = True
    for j in (1, 2, 3):
        worst = 1
        for _ in range(n_probes):
            th = th_lo + margin + (th_hi - th_lo - 2 * margin) * rng.random()
            p = LogPolarPoint(math.exp(th), TWO_PI * rng.random())
            deficit = subharmonicity_probe(j, p, params)
            worst = min(worst, deficit.sign)
        probe_signs[f"h{j}"] = worst
        probes_ok = probes_ok and worst >= 0

    return {
        "K": params.K,
        "digits": params.digits,
        "identity_residual_max_1": res1_max,
        "identity_residual_max_2": res2_max,
        "identities_ok": identities_ok,
        "angular_mean_max_error": mean_err_max,
        "angular_means_ok": means_ok,
        "predicted_density_sup": sup,
        "density_sup_ok": density_ok,
        "probe_min_sign": probe_signs,
        "probes_ok": probes_ok,
        "failed": not (identities_ok and means_ok and density_ok and probes_ok),
    }


def annulus_rows(
    params: RotatingParams, n_log_r: int, n_phi: int
) -> Iterator[tuple[float, float, str, float]]:
    """Sample grid over the first annulus above the base disk.

    Radii are uniform in theta across ``(pi K, pi (K+1))`` (cell centers);
    angles are uniform over the circle.  Yields rows
    ``(log_r, phi, region_kind, g)`` for CSV export.
    """
    if n_log_r < 2 or n_phi < 2:
        raise DomainError("grid must be at least 2x2")
    for i in range(n_log_r):
        th = math.pi * params.K + math.pi * (i + 0.5) / n_log_r
        lr = math.exp(th)
        for jdx in range(n_phi):
            ph = TWO_PI * jdx / n_phi
            p = LogPolarPoint(lr, ph)
            label = classify(p, params)
            yield (lr, ph, label.kind, g(p, params))
