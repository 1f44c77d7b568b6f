"""Tests for the rotating-profile construction: regions, branches, means."""

import math

import mpmath
import numpy as np
import pytest

from gaborlab.errors import DomainError, OutOfDomain
from gaborlab.pointset import LogPolarPoint
from gaborlab.rotating import (
    REGION_KINDS,
    RegionLabel,
    RotatingParams,
    angular_mean_g,
    annulus_rows,
    branch_for,
    classify,
    g,
    g_components,
    gamma_angles,
    h,
    h_branch,
    identity_residuals,
    predicted_counting,
    predicted_density,
    sector_index_1,
    sector_index_2,
    subharmonicity_probe,
    theta,
    verification_summary,
)

TWO_PI = 2.0 * math.pi
PARAMS = RotatingParams()


# ---------------------------------------------------------------------------
# parameters and theta


def test_params_validation():
    with pytest.raises(DomainError):
        RotatingParams(K=0)
    with pytest.raises(DomainError):
        RotatingParams(digits=20)
    assert PARAMS.base_log_r == pytest.approx(math.exp(math.pi), rel=1e-15)


def test_theta_is_log_of_log_radius():
    for x in (1.5, 2.0, 10.0, 23.14, 535.0):
        assert theta(x) == pytest.approx(math.log(x), rel=1e-15)
    assert theta(math.e) == pytest.approx(1.0, rel=1e-15)


def test_theta_domain():
    with pytest.raises(DomainError):
        theta(1.0)
    with pytest.raises(DomainError):
        theta(0.5)


def test_theta_high_precision_path():
    a = theta(7.0, digits=50)
    assert a == pytest.approx(math.log(7.0), rel=1e-15)


# ---------------------------------------------------------------------------
# branch components and identities


def test_g_components_formulas():
    lr, ph = 30.0, 0.7
    th = math.log(lr)
    g1, g2, g3 = g_components(LogPolarPoint(lr, ph))
    assert g1 == pytest.approx(math.cos(2 * ph), rel=1e-15)
    assert g2 == pytest.approx(math.cos(2 * ph - 2 * th), rel=1e-14)
    assert g3 == pytest.approx(math.cos(2 * ph - th) * math.cos(th), rel=1e-14)


def test_gluing_identities_at_working_precision():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        th = math.pi * (1.0 + rng.random())
        r1, r2 = identity_residuals(math.exp(th), TWO_PI * rng.random(), PARAMS)
        worst = max(worst, r1, r2)
    assert worst <= 1e-14


def test_branches_agree_on_sector_curves():
    # On phi = theta/2 + k pi/2 the difference g1 - g2 vanishes and g3 is
    # their average, so all three branches collapse to one value.
    for th in (3.5, 4.2, 5.9):
        lr = math.exp(th)
        for ph in gamma_angles(th):
            g1, g2, g3 = g_components(LogPolarPoint(lr, ph))
            assert abs(g1 - g2) <= 5e-15
            assert abs(g3 - 0.5 * (g1 + g2)) <= 5e-15


def test_branches_agree_on_shells():
    # theta a multiple of pi makes the rotated branch coincide with the
    # static one on the whole circle.
    lr = math.exp(2.0 * math.pi)
    for ph in np.linspace(0.0, TWO_PI, 17):
        g1, g2, g3 = g_components(LogPolarPoint(lr, float(ph)))
        assert abs(g1 - g2) <= 2e-13
        assert abs(g1 - g3) <= 2e-13


# ---------------------------------------------------------------------------
# region classification


def test_classify_base_disk():
    assert classify(LogPolarPoint(0.5, 0.0), PARAMS).kind == "BaseDisk"
    assert classify(LogPolarPoint(math.exp(0.5 * math.pi), 1.0), PARAMS).kind == "BaseDisk"


def test_classify_shell_boundary():
    lr = math.exp(2.0 * math.pi)
    label = classify(LogPolarPoint(lr, 1.0), PARAMS)
    assert label.kind == "OnS"
    assert label.annulus_n == 2


def test_classify_sector_curves():
    th = 4.0
    lr = math.exp(th)
    for ph in gamma_angles(th):
        label = classify(LogPolarPoint(lr, ph), PARAMS)
        assert label.kind == "OnS"
        assert label.sector_k in (1, 2, 3, 4)


def test_classify_distinguished_rays():
    th = 4.0
    lr = math.exp(th)
    lab1 = classify(LogPolarPoint(lr, 0.0), PARAMS)
    assert lab1.kind == "Ell1"
    lab2 = classify(LogPolarPoint(lr, math.fmod(th, TWO_PI)), PARAMS)
    assert lab2.kind == "Ell2"
    assert branch_for(lab1) == 1
    assert branch_for(lab2) == 2


def test_classify_total_and_branches_defined():
    rng = np.random.default_rng(5)
    seen = set()
    for _ in range(400):
        th = math.pi + 2.2 * math.pi * rng.random()
        p = LogPolarPoint(math.exp(th), TWO_PI * rng.random())
        label = classify(p, PARAMS)
        assert label.kind in REGION_KINDS
        seen.add(label.kind)
        if label.kind != "BaseDisk":
            assert branch_for(label) in (1, 2, 3)
    assert {"P1", "P2", "P3"} <= seen


def test_sector_indices_disjoint():
    for n in range(1, 9):
        s1, s2 = sector_index_1(n), sector_index_2(n)
        assert s1 in (1, 2, 3, 4) and s2 in (1, 2, 3, 4)
        assert s1 != s2
    # The static sector steps backwards, the rotating one forwards.
    assert [sector_index_1(n) for n in (1, 2, 3, 4)] == [2, 1, 4, 3]
    assert [sector_index_2(n) for n in (1, 2, 3, 4)] == [1, 2, 3, 4]


def test_region_label_validation():
    with pytest.raises(DomainError):
        RegionLabel("Q7")
    with pytest.raises(DomainError):
        RegionLabel("P1", annulus_n=1, sector_k=5)
    with pytest.raises(OutOfDomain):
        branch_for(RegionLabel("BaseDisk"))


# ---------------------------------------------------------------------------
# the glued profile and potential


def test_g_uses_branch_of_region():
    rng = np.random.default_rng(9)
    for _ in range(100):
        th = math.pi + math.pi * rng.random()
        p = LogPolarPoint(math.exp(th), TWO_PI * rng.random())
        label = classify(p, PARAMS)
        if label.kind in ("OnS", "BaseDisk"):
            continue
        assert g(p, PARAMS) == g_components(p)[branch_for(label) - 1]
        assert -1.0 - 1e-15 <= g(p, PARAMS) <= 1.0 + 1e-15


def test_h_matches_mpmath_oracle():
    rng = np.random.default_rng(13)
    for _ in range(25):
        th = math.pi + math.pi * rng.random()
        lr = math.exp(th)
        ph = TWO_PI * rng.random()
        p = LogPolarPoint(lr, ph)
        for j in (1, 2, 3):
            got = h_branch(j, p, PARAMS)
            with mpmath.workdps(50):
                t = mpmath.mpf(lr)
                thm = mpmath.log(t)
                phm = mpmath.mpf(ph)
                gj = [
                    mpmath.cos(2 * phm),
                    mpmath.cos(2 * phm - 2 * thm),
                    mpmath.cos(2 * phm - thm) * mpmath.cos(thm),
                ][j - 1]
                val = mpmath.e ** (2 * t) * (
                    (mpmath.pi / 2 - 4 / t) * gj + 4 / t
                )
                want_sign = int(mpmath.sign(val))
                want_log = float(mpmath.log(abs(val))) if val != 0 else -math.inf
            assert got.sign == want_sign
            if got.sign != 0:
                assert got.log_abs == pytest.approx(want_log, rel=0.0, abs=1e-11)


def test_h_glued_consistent_with_branch():
    p = LogPolarPoint(math.exp(4.1), 0.3)
    label = classify(p, PARAMS)
    assert label.kind in ("P1", "P2", "P3")
    direct = h_branch(branch_for(label), p, PARAMS)
    glued = h(p, PARAMS)
    assert glued.sign == direct.sign
    assert glued.log_abs == direct.log_abs


def test_h_branch_domain():
    with pytest.raises(DomainError):
        h_branch(4, LogPolarPoint(math.exp(4.0), 0.0), PARAMS)
    with pytest.raises(OutOfDomain):
        h_branch(1, LogPolarPoint(2.0, 0.0), PARAMS)


# ---------------------------------------------------------------------------
# angular means and predicted density


def test_angular_mean_matches_closed_form():
    for th in (3.6, 4.7, 5.5):
        lr = math.exp(th)
        got = angular_mean_g(lr, PARAMS)
        assert got == pytest.approx(2.0 * abs(math.sin(th)), rel=0.0, abs=1e-10)


def test_angular_mean_below_base_disk():
    with pytest.raises(OutOfDomain):
        angular_mean_g(math.exp(0.5 * math.pi), PARAMS)


def test_predicted_density_formula_and_bound():
    for th in np.linspace(math.pi + 1e-6, 2 * math.pi - 1e-6, 40):
        lr = math.exp(th)
        d = predicted_density(lr, PARAMS)
        assert d == pytest.approx(abs(math.sin(th)) / math.pi, rel=1e-13)
        assert d <= 1.0 / math.pi + 1e-15
    with pytest.raises(OutOfDomain):
        predicted_density(math.exp(0.9 * math.pi), PARAMS)


def test_predicted_counting_log_form():
    th = 1.5 * math.pi
    lr = math.exp(th)
    n = predicted_counting(lr, PARAMS)
    assert n.sign == 1
    assert n.log_abs == pytest.approx(math.log(abs(math.sin(th))) + 2.0 * lr, rel=1e-12)
    # Near a shell the sine factor collapses the count by ~16 orders.
    near_shell = predicted_counting(math.exp(2.0 * math.pi), PARAMS)
    assert near_shell.log_abs <= 2.0 * math.exp(2.0 * math.pi) + math.log(1e-13)


# ---------------------------------------------------------------------------
# subharmonicity probes and summaries


def test_probe_deficits_positive():
    rng = np.random.default_rng(21)
    for j in (1, 2, 3):
        for _ in range(3):
            th = math.pi * (1.0 + 0.05 + 0.9 * rng.random())
            p = LogPolarPoint(math.exp(th), TWO_PI * rng.random())
            assert subharmonicity_probe(j, p, PARAMS).sign == 1


def test_probe_domain():
    with pytest.raises(OutOfDomain):
        subharmonicity_probe(1, LogPolarPoint(2.0, 0.0), PARAMS)
    with pytest.raises(DomainError):
        subharmonicity_probe(0, LogPolarPoint(math.exp(4.0), 0.0), PARAMS)


def test_verification_summary_small_run():
    out = verification_summary(PARAMS, n_identity=60, n_radii=4, n_probes=2, seed=1)
    assert not out["failed"]
    assert out["identities_ok"] and out["angular_means_ok"]
    assert out["density_sup_ok"] and out["probes_ok"]
    assert out["predicted_density_sup"] == pytest.approx(1.0 / math.pi, rel=1e-9)
    assert set(out["probe_min_sign"]) == {"h1", "h2", "h3"}


# ---------------------------------------------------------------------------
# annulus export


def test_annulus_rows_shape_and_values():
    rows = list(annulus_rows(PARAMS, 4, 8))
    assert len(rows) == 32
    for lr, ph, kind, val in rows:
        assert math.exp(math.pi) < lr < math.exp(2 * math.pi)
        assert 0.0 <= ph < TWO_PI
        assert kind in REGION_KINDS
        assert -1.0 - 1e-12 <= val <= 1.0 + 1e-12


def test_annulus_rows_rejects_tiny_grid():
    with pytest.raises(DomainError):
        list(annulus_rows(PARAMS, 1, 8))
