"""Gaussian coherent states on the line and their analytic-space picture.

The unit Gaussian ``phi(x) = 2^(1/4) exp(-pi x^2)`` and its time-frequency
shifts ``rho_{t,w} f(x) = exp(2 i pi w x) f(x - t)`` map, under the Bargmann
integral, to multiples of reproducing kernels ``k_lambda(z) = exp(pi
conj(lambda) z)``.  Finite sections of the kernel Gram matrix then expose
completeness and minimality of a node family through least-squares
residuals: the squared distance of one normalized kernel (or of an
orthonormal monomial) to the span of the rest.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainError,
    GridInsufficient,
    IllConditioned,
    SupportClipped,
)

_QUARTER_ROOT_2 = 2.0 ** 0.25
_DEFAULT_T_MIN = -6.0
_DEFAULT_T_MAX = 6.0
_DEFAULT_N = 4096
# tail mass below this fraction of the peak counts as covered support
_SUPPORT_RTOL = 1e-12
_PINV_CUTOFF = 1e-12
_COND_LIMIT = 1e14


@dataclass(frozen=True)
class SampledSignal:
    """A signal on a uniform grid, optionally backed by an exact closure.

    When ``func`` is present, shifted/modulated copies are resampled exactly;
    otherwise only grid-aligned time shifts are possible.
    """

    t_min: float
    t_max: float
    values: np.ndarray
    func: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if not (self.t_max > self.t_min):
            raise DomainError("grid must satisfy t_max > t_min")
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 1 or v.size < 2:
            raise DomainError("values must be a 1-d array with >= 2 samples")
        if not np.isfinite(v.view(float)).all():
            raise DomainError("signal values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n)

    @property
    def spacing(self) -> float:
        return (self.t_max - self.t_min) / (self.n - 1)

    def norm(self) -> float:
        """L2 norm by trapezoid quadrature."""
        return math.sqrt(
            float(np.trapezoid(np.abs(self.values) ** 2, dx=self.spacing))
        )


def _check_support(values: np.ndarray) -> None:
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return
    edge = max(abs(complex(values[0])), abs(complex(values[-1])))
    if edge > _SUPPORT_RTOL * peak:
        warnings.warn(
            f"signal support reaches the grid edge (edge/peak = {edge / peak:.2e})",
            SupportClipped,
            stacklevel=3,
        )


def from_function(
    func: Callable[[np.ndarray], np.ndarray],
    t_min: float = _DEFAULT_T_MIN,
    t_max: float = _DEFAULT_T_MAX,
    n: int = _DEFAULT_N,
) -> SampledSignal:
    """Sample a closure onto the default grid, keeping it for exact reshifts."""
    t = np.linspace(t_min, t_max, n)
    values = np.asarray(func(t), dtype=complex)
    sig = SampledSignal(t_min, t_max, values, func=func)
    _check_support(sig.values)
    return sig


def gaussian_window(
    t_min: float = _DEFAULT_T_MIN, t_max: float = _DEFAULT_T_MAX, n: int = _DEFAULT_N
) -> SampledSignal:
    """The unit-norm window 2^(1/4) exp(-pi x^2)."""
    return from_function(
        lambda x: _QUARTER_ROOT_2 * np.exp(-math.pi * x * x), t_min, t_max, n
    )


def tf_shift(f: SampledSignal, t0: float, omega0: float) -> SampledSignal:
    """Time-frequency shift exp(2 i pi omega0 x) f(x - t0) on f's own grid.

    Exact when f carries its closure; otherwise t0 must be a whole number of
    grid steps (vacated samples are zero-filled).  Warns SupportClipped when
    the shifted signal no longer decays at the grid edge.
    """
    t = f.grid
    if f.func is not None:
        base = np.asarray(f.func(t - t0), dtype=complex)
    else:
        steps = t0 / f.spacing
        k = round(steps)
        if abs(steps - k) > 1e-9:
            raise DomainError(
                "closure-free signals only support grid-aligned time shifts"
            )
        base = np.zeros(f.n, dtype=complex)
        if k >= 0:
            if k < f.n:
                base[k:] = f.values[: f.n - k]
        else:
            if -k < f.n:
                base[:k] = f.values[-k:]
    values = np.exp(2j * math.pi * omega0 * t) * base
    func = None
    if f.func is not None:
        inner = f.func

        def func(x: np.ndarray, _g=inner, _t0=t0, _w0=omega0) -> np.ndarray:
            return np.exp(2j * math.pi * _w0 * x) * np.asarray(_g(x - _t0))

    sig = SampledSignal(f.t_min, f.t_max, values, func=func)
    _check_support(sig.values)
    return sig


def bargmann_grid(f: SampledSignal, zs: Sequence[complex]) -> np.ndarray:
    """Bargmann transform at many points, trapezoid rule on f's grid.

    B f(z) = 2^(1/4) integral f(t) exp(-pi t^2 + 2 pi t z - pi z^2 / 2) dt.
    Raises GridInsufficient when the integrand oscillates faster than the
    grid resolves or fails to decay at the grid edge.
    """
    z_arr = np.asarray(list(zs), dtype=complex)
    t = f.grid
    h = f.spacing
    if z_arr.size:
        max_im = float(np.max(np.abs(z_arr.imag)))
        if 2.0 * math.pi * max_im * h > 0.5:
            raise GridInsufficient(
                f"grid step {h:.3g} too coarse for |Im z| = {max_im:.3g}"
            )
    weights = np.full(t.size, h)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    base = f.values * np.exp(-math.pi * t * t) * weights
    out = np.empty(z_arr.size, dtype=complex)
    chunk = max(1, (2**22) // max(t.size, 1))
    for i in range(0, z_arr.size, chunk):
        zc = z_arr[i : i + chunk]
        kernel = np.exp(2.0 * math.pi * np.multiply.outer(t, zc))
        integrand_peak = np.max(np.abs(base)[:, None] * np.abs(kernel), axis=0)
        edge = np.maximum(
            np.abs(base[0]) * np.abs(kernel[0]), np.abs(base[-1]) * np.abs(kernel[-1])
        )
        bad = edge > 1e-10 * np.maximum(integrand_peak, 1e-300)
        if bad.any():
            raise GridInsufficient(
                "integrand does not decay at the grid edge for some z"
            )
        out[i : i + chunk] = base @ kernel
    out *= _QUARTER_ROOT_2 * np.exp(-0.5 * math.pi * z_arr * z_arr)
    return out


def bargmann(f: SampledSignal, z: complex) -> complex:
    """Bargmann transform at a single point."""
    return complex(bargmann_grid(f, [complex(z)])[0])


def kernel_eval(lam: complex, z: complex) -> complex:
    """Reproducing kernel k_lambda(z) = exp(pi conj(lambda) z)."""
    return cmath.exp(math.pi * complex(lam).conjugate() * complex(z))


def shift_kernel_target(lam: complex, z: complex) -> complex:
    """Bargmann image of the shifted window rho_{Re lam, Im lam} phi.

    Equals exp(i pi x0 w0) exp(-pi |lam|^2 / 2) exp(pi lam z) with
    x0 = Re lam, w0 = Im lam; the metaplectic phase factor is part of the
    identity and cannot be dropped for complex lam.
    """
    lam = complex(lam)
    phase = cmath.exp(1j * math.pi * lam.real * lam.imag)
    return phase * cmath.exp(-0.5 * math.pi * abs(lam) ** 2) * cmath.exp(
        math.pi * lam * complex(z)
    )


@dataclass(frozen=True)
class GramMatrix:
    """Gram matrix of normalized kernels e^{-pi|l|^2/2} k_l at the nodes.

    Entries exp(pi conj(l_i) l_j - pi (|l_i|^2 + |l_j|^2)/2); Hermitian with
    unit diagonal, positive semidefinite up to rounding.
    """

    nodes: tuple[complex, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.entries, dtype=complex)
        n = len(self.nodes)
        if g.shape != (n, n):
            raise DomainError(f"entries must be {n}x{n}")
        if not np.allclose(g, g.conj().T, rtol=0.0, atol=1e-12):
            raise DomainError("Gram matrix must be Hermitian")
        if not np.allclose(np.diag(g).real, 1.0, rtol=0.0, atol=1e-12):
            raise DomainError("Gram matrix must have unit diagonal")
        ev_min = float(np.linalg.eigvalsh(g).min()) if n else 0.0
        if ev_min < -1e-10 * max(n, 1):
            raise DomainError(f"Gram matrix indefinite: min eigenvalue {ev_min:.3e}")
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)
        object.__setattr__(self, "nodes", tuple(complex(x) for x in self.nodes))

    def to_csv(self) -> str:
        lines = ["re,im"]
        for row in np.asarray(self.entries):
            for v in row:
                lines.append(f"{v.real:.17g},{v.imag:.17g}")
        return "\n".join(lines) + "\n"


def build_gram(nodes: Sequence[complex]) -> GramMatrix:
    """Assemble the normalized-kernel Gram matrix for the given nodes."""
    lam = np.asarray(list(nodes), dtype=complex)
    if lam.size == 0:
        raise DomainError("at least one node is required")
    sq = np.abs(lam) ** 2
    expo = math.pi * (np.multiply.outer(lam.conj(), lam) - 0.5 * (sq[:, None] + sq[None, :]))
    g = np.exp(expo)
    g = 0.5 * (g + g.conj().T)
    np.fill_diagonal(g, 1.0)
    return GramMatrix(tuple(complex(x) for x in lam), g)


def minimality_residual(nodes: Sequence[complex], index: int) -> float:
    """Squared distance of normalized kernel #index to the span of the rest.

    Schur complement of the Gram matrix: 1 - g^H G_rest^{-1} g, clipped to
    [0, 1].  Raises IllConditioned when the remaining nodes' Gram has
    condition number above 1e14.
    """
    lam = [complex(x) for x in nodes]
    if len(lam) < 2:
        raise DomainError("minimality needs at least 2 nodes")
    if not (0 <= index < len(lam)):
        raise DomainError(f"index {index} out of range")
    g_full = build_gram(lam).entries
    keep = [i for i in range(len(lam)) if i != index]
    g_rest = np.asarray(g_full)[np.ix_(keep, keep)]
    cross = np.asarray(g_full)[keep, index]
    ev = np.linalg.eigvalsh(g_rest)
    ev_max = float(ev.max())
    ev_min = float(ev.min())
    if ev_min <= 0.0 or ev_max / ev_min > _COND_LIMIT:
        cond = math.inf if ev_min <= 0.0 else ev_max / ev_min
        raise IllConditioned(f"restricted Gram condition {cond:.3e} beyond 1e14")
    sol = np.linalg.solve(g_rest, cross)
    residual = 1.0 - float(np.real(np.vdot(cross, sol)))
    if residual < -1e-8 or residual > 1.0 + 1e-8:
        raise IllConditioned(f"residual {residual:.3e} outside [0, 1] beyond slop")
    return min(1.0, max(0.0, residual))


def completeness_residual(
    nodes: Sequence[complex],
    monomial_degree_max: int,
    weights: Sequence[float] | None = None,
) -> tuple[float, ...]:
    """Squared residuals of the orthonormal monomials against the kernel span.

    e_n(z) = (pi^n / n!)^(1/2) z^n; the residual for degree n is
    1 - v^H G^+ v with v_i = e_n(lambda_i) exp(-pi |lambda_i|^2 / 2) and the
    pseudo-inverse truncated at relative eigenvalue 1e-12.  Optional positive
    weights rescale the kernel columns (a conditioning device; the span, and
    hence exact residuals, are unchanged).
    """
    lam = np.asarray(list(nodes), dtype=complex)
    if lam.size == 0:
        raise DomainError("at least one node is required")
    if monomial_degree_max < 0:
        raise DomainError("degree must be >= 0")
    radius = float(np.max(np.abs(lam)))
    cap = max(2.0 * math.pi * radius * radius, 4.0)
    if monomial_degree_max > cap:
        raise DomainError(
            f"degree {monomial_degree_max} beyond concentration cap {cap:.3g} "
            "for this node radius"
        )
    if weights is None:
        w = np.ones(lam.size)
    else:
        w = np.asarray(list(weights), dtype=float)
        if w.shape != lam.shape or (w <= 0.0).any():
            raise DomainError("weights must be positive, one per node")

    g = np.asarray(build_gram(lam).entries) * np.multiply.outer(w, w)
    ev, vec = np.linalg.eigh(g)
    ev_max = float(ev.max())
    if ev_max <= 0.0:
        raise IllConditioned("Gram matrix is numerically zero")
    if float(ev.min()) < -1e-8 * ev_max:
        raise IllConditioned("Gram matrix badly indefinite")
    keep = ev > _PINV_CUTOFF * ev_max
    inv = np.zeros_like(ev)
    inv[keep] = 1.0 / ev[keep]

    out: list[float] = []
    log_lam = np.log(np.where(lam == 0.0, 1.0, lam).astype(complex))
    gauss = -0.5 * math.pi * np.abs(lam) ** 2
    for n in range(monomial_degree_max + 1):
        log_coeff = 0.5 * (n * math.log(math.pi) - math.lgamma(n + 1))
        if n == 0:
            v = np.exp(log_coeff + gauss).astype(complex)
        else:
            v = np.where(
                lam == 0.0, 0.0, np.exp(log_coeff + n * log_lam + gauss)
            )
        v = v * w
        coeffs = vec.conj().T @ v
        proj = float(np.real(np.sum(inv * np.abs(coeffs) ** 2)))
        out.append(min(1.0, max(0.0, 1.0 - proj)))
    return tuple(out)
