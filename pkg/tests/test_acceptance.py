"""End-to-end acceptance suite: one test and one printed verdict per criterion.

Each test prints ``ACCEPTANCE <n> <label>: PASS|FAIL`` through the capture
bypass before asserting, so a full run always yields nine verdict lines.
Criterion 4 includes a remainder-stability gauge that the geometric default
schedule cannot satisfy (the band remainder grows like the last R_k^2 while
the gauge divides by log R_k); that sub-check is reported and asserted as-is
rather than weakened, so test_criterion_4 is expected to fail on it.
"""

import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from gaborlab.density import (
    density_report,
    jensen_tradeoff_check,
    sharp_upper_bound_check,
    tau,
)
from gaborlab.fock import (
    bargmann,
    bargmann_grid,
    build_gram,
    completeness_residual,
    gaussian_window,
    from_function,
    minimality_residual,
    shift_kernel_target,
    tf_shift,
)
from gaborlab.pointset import PointSet
from gaborlab.products import (
    Mf,
    ProductSpec,
    f_elem,
    fock_membership_certificate,
    fock_norm_estimate,
    growth_constant,
    jensen_verify,
)
from gaborlab.radial import (
    H,
    RadialParams,
    atomize,
    build_measure,
    deficiency,
    verify_properties,
)
from gaborlab.rotating import RotatingParams, verification_summary

BETAS = (0.0, 0.25, 0.5, 0.75)


def announce(capsys, number: int, label: str, ok: bool, detail: str = "") -> bool:
    tail = f" ({detail})" if detail else ""
    with capsys.disabled():
        print(f"ACCEPTANCE {number} {label}: {'PASS' if ok else 'FAIL'}{tail}")
    return ok


def atomized_sets():
    """The four constructed point sets probed by criteria 4 and 5."""
    out = []
    for beta in BETAS:
        params = RadialParams(beta=beta)
        m = build_measure(params)
        window = (1.0, 150.0) if beta == 0.0 else (1.0, 200.0)
        pts = atomize(m, window, seed=0)
        rep = density_report(
            pts, (math.log(10.0), math.log(window[1])), radii_per_decade=2000
        )
        out.append((beta, params, rep))
    return out


def test_criterion_1_growth_constant(capsys):
    target = 1.5 * math.pi
    primary = growth_constant("primary")
    by_parts = growth_constant("by_parts")
    ok = (
        abs(primary - target) <= 1e-8
        and abs(by_parts - target) <= 1e-8
        and abs(primary - by_parts) <= 1e-8
    )
    assert announce(
        capsys, 1, "growth-constant",
        ok, f"primary err {abs(primary - target):.2e}",
    )


def test_criterion_2_angular_max_closed_form(capsys):
    radii = np.geomspace(0.01, 100.0, 50)
    angles = np.linspace(-math.pi, math.pi, 4096, endpoint=False)
    span = float(angles[1] - angles[0])
    worst_gap = 0.0
    worst_arg = 0.0
    for r in radii:
        w = r * np.exp(1j * angles)
        scan = (
            np.log(np.abs(1.0 - w))
            + np.log(np.abs(1.0 - 1j * w))
            + (w + 1j * w).real
        )
        i = int(np.argmax(scan))
        res = minimize_scalar(
            lambda ph: -f_elem(r * complex(math.cos(ph), math.sin(ph))),
            bounds=(float(angles[i]) - span, float(angles[i]) + span),
            method="bounded",
            options={"xatol": 1e-12},
        )
        worst_gap = max(worst_gap, abs(Mf(float(r)) + float(res.fun)))
        worst_arg = max(worst_arg, abs(float(res.x) + math.pi / 4.0))
    ok = worst_gap <= 1e-9 and worst_arg <= 1e-4
    assert announce(
        capsys, 2, "angular-max-closed-form",
        ok, f"value gap {worst_gap:.2e}, arg gap {worst_arg:.2e}",
    )


def test_criterion_3_rotating_identities(capsys):
    summary = verification_summary(
        RotatingParams(K=1, digits=60),
        n_identity=10**4,
        n_radii=20,
        n_probes=100,
        seed=0,
        tol_identity=1e-14,
        tol_mean=1e-10,
        tol_density=1e-6,
    )
    ok = not summary["failed"]
    assert announce(
        capsys, 3, "rotating-growth",
        ok,
        f"identity max {max(summary['identity_residual_max_1'], summary['identity_residual_max_2']):.1e}, "
        f"sup density {summary['predicted_density_sup']:.10f}",
    )


def test_criterion_4_radial_suite(capsys):
    grid = np.power(10.0, np.linspace(0.0, 17.0, 17 * 10**4 + 1))

    h_ok = True
    convex_ok = True
    remainder_ok = True
    density_ok = True
    worst_spread = 0.0
    for beta, params, rep in atomized_sets():
        m = build_measure(params)
        h_ok = h_ok and min(H(float(t), m) for t in grid) >= 0.0

        radii = params.radii
        for k in range(len(radii) - 1):
            ts = np.linspace(
                radii[k] * (1.0 + 1e-9), radii[k + 1] * (1.0 - 1e-9), 200
            )
            d = np.array([deficiency(math.log(float(t)), m).to_float() for t in ts])
            second = d[:-2] - 2.0 * d[1:-1] + d[2:]
            convex_ok = convex_ok and bool(
                np.all(second >= -1e-9 * math.pi * ts[1:-1] ** 2)
            )

        props = verify_properties(params)
        remainder_ok = remainder_ok and props.passes_i
        worst_spread = max(worst_spread, props.remainder_spread)

        a2_oracle = math.e if beta == 0.0 else brentq(
            lambda x: tau(x) - beta, 1.0 + 1e-12, math.e, xtol=1e-13
        )
        lower_ok = (
            abs(rep.lower - beta) <= 0.02
            if beta == 0.0
            else abs(rep.lower - beta) <= 0.02 * beta
        )
        upper_ok = abs(rep.upper - a2_oracle) <= 0.02 * a2_oracle
        density_ok = density_ok and lower_ok and upper_ok

    ok = h_ok and convex_ok and remainder_ok and density_ok
    assert announce(
        capsys, 4, "radial-suite",
        ok,
        f"H>=0 {'PASS' if h_ok else 'FAIL'}, "
        f"convexity {'PASS' if convex_ok else 'FAIL'}, "
        f"remainder-stability {'PASS' if remainder_ok else 'FAIL'} "
        f"(spread {worst_spread:.2e} vs 0.20), "
        f"atomized-density {'PASS' if density_ok else 'FAIL'}",
    )


def test_criterion_5_tradeoff_checkers(capsys):
    at_corner = jensen_tradeoff_check(math.e, 0.0)
    rejected = jensen_tradeoff_check(2.0, 0.7)
    sharp_ok = all(
        sharp_upper_bound_check(rep).passes for _, _, rep in atomized_sets()
    )
    ok = (
        at_corner.holds
        and at_corner.slack == 0.0
        and not rejected.holds
        and sharp_ok
    )
    assert announce(
        capsys, 5, "tradeoff-checkers",
        ok, f"corner slack {at_corner.slack:.1e}, sharp-bound {sharp_ok}",
    )


def test_criterion_6_jensen_formula(capsys):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20):
        r = 5.0 * np.sqrt(rng.random(50))
        phi = 2.0 * math.pi * rng.random(50)
        report = jensen_verify(PointSet(np.log(r), phi), math.log(5.7))
        worst = max(worst, abs(report.gap))
    ok = worst <= 1e-6
    assert announce(capsys, 6, "jensen-formula", ok, f"worst |gap| {worst:.2e}")


def test_criterion_7_growth_certificate(capsys):
    slacks = []
    slope_30 = None
    certified = None
    for c in (0.30, 0.32, 0.34):
        report = fock_membership_certificate(
            ProductSpec.extremal(c, 150000), [30.0]
        )
        slacks.append(report.slack)
        if c == 0.30:
            slope_30 = report.slope[0]
            certified = report.in_fock_certified
    ok = (
        slope_30 <= 1.5 * math.pi * 0.30 * 1.05
        and slope_30 < 0.5 * math.pi
        and certified
        and slacks[0] > slacks[1] > slacks[2]
    )
    assert announce(
        capsys, 7, "growth-certificate",
        ok, f"slope@30 {slope_30:.4f}, slacks {', '.join(f'{s:.4f}' for s in slacks)}",
    )


def test_criterion_8_fock_probe(capsys):
    phi = gaussian_window()

    disk = (
        np.geomspace(1e-3, 2.0, 25)[:, None]
        * np.exp(1j * np.arange(24) * (math.pi / 12.0))[None, :]
    ).ravel()
    unit_err = float(np.max(np.abs(bargmann_grid(phi, disk) - 1.0)))
    unit_ok = unit_err <= 1e-6

    shift_err = 0.0
    z_probes = (0.0, 0.7 + 0.2j, -1.1 + 0.9j, 1.5j, 2.0 - 1.0j)
    for rad in (0.5, 1.0, 1.5):
        for k in range(8):
            lam = rad * complex(
                math.cos(k * math.pi / 4.0), math.sin(k * math.pi / 4.0)
            )
            shifted = tf_shift(phi, lam.real, lam.imag)
            for z in z_probes:
                got = bargmann(shifted, z)
                shift_err = max(
                    shift_err, abs(got - shift_kernel_target(lam, z))
                )
    shift_ok = shift_err <= 1e-6

    c = 2.0 ** 0.25

    def herm1(t):
        return t * c * np.exp(-math.pi * t * t)

    def herm2(t):
        return (4.0 * math.pi * t * t - 1.0) * c * np.exp(-math.pi * t * t)

    signals = [phi]
    for fn in (herm1, herm2):
        scale = from_function(fn).norm()
        signals.append(from_function(lambda t, fn=fn, s=scale: fn(t) / s))
    rings = (
        np.geomspace(1e-3, 4.0, 1500)[:, None]
        * np.exp(1j * np.arange(16) * (math.pi / 8.0))[None, :]
    ).ravel()
    iso_err = 0.0
    for sig in signals:
        values = bargmann_grid(sig, rings)
        est = fock_norm_estimate(
            [(z, math.log(abs(v))) for z, v in zip(rings, values)], R_max=4.0
        )
        iso_err = max(iso_err, abs(est - 1.0))
    iso_ok = iso_err <= 1e-4

    side = np.arange(-4, 5, 1)
    nodes1 = [complex(a, b) for a in side for b in side]
    gram = np.asarray(build_gram(nodes1).entries)
    eigs = np.linalg.eigvalsh(gram)
    gram_ok = (
        float(np.max(np.abs(np.diag(gram) - 1.0))) <= 1e-12
        and float(eigs.min()) >= -1e-10 * float(eigs.max())
    )

    pair_err = 0.0
    for a, b in ((0.0, 1.0), (0.5 + 0.5j, -0.3 + 1.2j), (1 + 1j, 1 - 1j)):
        closed = 1.0 - math.exp(-math.pi * abs(a - b) ** 2)
        for idx in (0, 1):
            pair_err = max(
                pair_err, abs(minimality_residual((a, b), idx) - closed)
            )
    pair_ok = pair_err <= 1e-6

    res1 = completeness_residual(nodes1, 20)
    side2 = np.arange(-4, 5, 2)
    nodes2 = [complex(a, b) for a in side2 for b in side2]
    res2 = completeness_residual(nodes2, 20)
    sections_ok = max(res1) <= 0.1 and any(r > 0.9 for r in res2)

    ok = unit_ok and shift_ok and iso_ok and gram_ok and pair_ok and sections_ok
    assert announce(
        capsys, 8, "fock-probe",
        ok,
        f"unit {unit_err:.1e}, shift {shift_err:.1e}, isometry {iso_err:.1e}, "
        f"2-node {pair_err:.1e}, sections {max(res1):.3f}/{max(res2):.3f}",
    )


def test_criterion_9_determinism(capsys, tmp_path):
    commands = (
        (
            "theorem4a",
            [
                "construct", "theorem4a", "--beta", "0.5", "--seed", "3",
                "--window", "1,100",
            ],
        ),
        (
            "verify-rotating",
            ["verify", "rotating", "--samples", "200", "--seed", "11"],
        ),
    )
    ok = True
    for name, argv in commands:
        outdir = tmp_path / name
        outputs = []
        for threads in ("1", "4"):
            env = dict(os.environ)
            for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
                env[var] = threads
            proc = subprocess.run(
                [sys.executable, "-m", "gaborlab", *argv, "--out", str(outdir) + os.sep],
                capture_output=True,
                env=env,
                timeout=300,
            )
            assert proc.returncode == 0, proc.stderr.decode()
            artifacts = {}
            if outdir.exists():
                for p in sorted(outdir.iterdir()):
                    artifacts[p.name] = p.read_bytes()
                    p.unlink()
            outputs.append((proc.stdout, artifacts))
        ok = ok and outputs[0] == outputs[1]
    assert announce(capsys, 9, "determinism", ok)
