"""Tests for log-polar points and immutable sorted point sets."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaborlab.errors import AlreadyPresent, DomainError, NotPresent
from gaborlab.pointset import (
    CSV_HEADER,
    LogPolarPoint,
    PointSet,
    canonical_phi,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# angles and single points


def test_canonical_phi_range():
    for phi in (-0.1, 0.0, 1.0, TWO_PI, TWO_PI + 0.25, -7.0, 100.0):
        out = canonical_phi(phi)
        assert 0.0 <= out < TWO_PI
        # Same direction up to a multiple of a full turn.
        assert math.isclose(
            math.cos(out), math.cos(phi), abs_tol=1e-12
        ) and math.isclose(math.sin(out), math.sin(phi), abs_tol=1e-12)


def test_canonical_phi_rejects_nonfinite():
    with pytest.raises(DomainError):
        canonical_phi(math.inf)
    with pytest.raises(DomainError):
        canonical_phi(math.nan)


def test_point_normalizes_angle():
    p = LogPolarPoint(1.0, -math.pi / 2)
    assert p.phi == pytest.approx(1.5 * math.pi, rel=1e-15)


def test_point_rejects_bad_log_r():
    with pytest.raises(DomainError):
        LogPolarPoint(math.inf, 0.0)
    with pytest.raises(DomainError):
        LogPolarPoint(math.nan, 0.0)


def test_origin_has_canonical_phi_zero():
    p = LogPolarPoint(-math.inf, 2.3)
    assert p.phi == 0.0
    assert p.to_xy() == (0.0, 0.0)
    assert p.to_complex() == 0j


def test_xy_round_trip():
    for x, y in [(1.0, 0.0), (-2.0, 3.0), (0.0, -0.25), (1e-8, 1e-8)]:
        p = LogPolarPoint.from_xy(x, y)
        gx, gy = p.to_xy()
        scale = math.hypot(x, y)
        assert gx == pytest.approx(x, rel=1e-13, abs=1e-15 * scale)
        assert gy == pytest.approx(y, rel=1e-13, abs=1e-15 * scale)
    assert LogPolarPoint.from_xy(0.0, 0.0).log_r == -math.inf


# ---------------------------------------------------------------------------
# PointSet construction


def test_points_sorted_by_log_r_then_phi():
    ps = PointSet([2.0, 1.0, 1.0], [0.5, 4.0, 1.0])
    assert list(ps.log_r) == [1.0, 1.0, 2.0]
    assert list(ps.phi) == [1.0, 4.0, 0.5]


def test_duplicate_point_rejected():
    with pytest.raises(DomainError):
        PointSet([1.0, 1.0], [2.0, 2.0])


def test_duplicate_across_angular_seam_rejected():
    # 1e-13 below a full turn coincides with phi = 0.
    with pytest.raises(DomainError):
        PointSet([1.0, 1.0], [0.0, TWO_PI - 1e-13])


def test_nearby_but_distinct_points_allowed():
    ps = PointSet([1.0, 1.0], [0.0, 1e-6])
    assert len(ps) == 2


def test_shape_validation():
    with pytest.raises(DomainError):
        PointSet([1.0, 2.0], [0.0])
    with pytest.raises(DomainError):
        PointSet([[1.0]], [[0.0]])
    with pytest.raises(DomainError):
        PointSet([math.inf], [0.0])


def test_empty_set():
    ps = PointSet([], [])
    assert len(ps) == 0
    assert ps.counting(100.0) == 0


def test_from_points_and_iteration():
    pts = [LogPolarPoint(0.0, 1.0), LogPolarPoint(-1.0, 2.0)]
    ps = PointSet.from_points(pts, label="demo")
    assert ps.label == "demo"
    assert [p.log_r for p in ps] == [-1.0, 0.0]
    assert ps[1].phi == 1.0


def test_arrays_are_read_only():
    ps = PointSet([1.0], [0.0])
    with pytest.raises(ValueError):
        ps.log_r[0] = 5.0


# ---------------------------------------------------------------------------
# counting


def test_counting_brute_force_oracle():
    rng = np.random.default_rng(7)
    lr = rng.uniform(-3.0, 3.0, size=200)
    ph = rng.uniform(0.0, TWO_PI, size=200)
    ps = PointSet(lr, ph)
    for probe in (-4.0, -1.0, 0.0, 0.5, 2.9, 3.5):
        assert ps.counting(probe) == int(np.sum(lr <= probe))


def test_counting_includes_circle_boundary():
    ps = PointSet([1.0, 2.0], [0.0, 0.0])
    assert ps.counting(1.0) == 1
    assert ps.counting(1.0 - 1e-9) == 0
    assert ps.counting(-math.inf) == 0
    assert PointSet([-math.inf], [0.0]).counting(-math.inf) == 1


def test_counting_counts_origin():
    ps = PointSet([-math.inf, 0.0], [0.0, 1.0])
    assert ps.counting(-10.0) == 1


def test_counting_rejects_nan():
    ps = PointSet([0.0], [0.0])
    with pytest.raises(DomainError):
        ps.counting(math.nan)


@settings(max_examples=50)
@given(
    st.lists(
        st.tuples(
            st.floats(min_value=-5, max_value=5),
            st.floats(min_value=0, max_value=6.28),
        ),
        max_size=12,
        unique=True,
    ),
    st.floats(min_value=-6, max_value=6),
    st.floats(min_value=0, max_value=2),
)
def test_counting_monotone_in_radius(coords, probe, step):
    try:
        ps = PointSet([c[0] for c in coords], [c[1] for c in coords])
    except DomainError:
        return  # random draw collided within tolerance
    assert ps.counting(probe) <= ps.counting(probe + step)
    assert 0 <= ps.counting(probe) <= len(ps)


# ---------------------------------------------------------------------------
# membership edits


def test_with_point_and_without_point():
    ps = PointSet([0.0], [0.0])
    q = LogPolarPoint(1.0, 2.0)
    ps2 = ps.with_point(q)
    assert len(ps2) == 2 and len(ps) == 1
    assert ps2.index_of(q) == 1
    ps3 = ps2.without_point(q)
    assert len(ps3) == 1
    assert ps3.index_of(q) is None


def test_with_point_duplicate_raises():
    ps = PointSet([0.0], [1.0])
    with pytest.raises(AlreadyPresent):
        ps.with_point(LogPolarPoint(0.0, 1.0))


def test_without_point_missing_raises():
    ps = PointSet([0.0], [1.0])
    with pytest.raises(NotPresent):
        ps.without_point(LogPolarPoint(5.0, 1.0))


def test_index_of_wraps_angular_seam():
    ps = PointSet([1.0], [0.0])
    assert ps.index_of(LogPolarPoint(1.0, TWO_PI - 1e-13)) == 0


def test_index_of_origin():
    ps = PointSet([-math.inf, 1.0], [0.0, 0.0])
    assert ps.index_of(LogPolarPoint(-math.inf, 0.0)) == 0


# ---------------------------------------------------------------------------
# CSV round trip


def test_csv_round_trip_byte_stable():
    rng = np.random.default_rng(11)
    ps = PointSet(rng.normal(size=40), rng.uniform(0, TWO_PI, size=40))
    text = ps.to_csv()
    assert text.startswith(CSV_HEADER + "\n")
    again = PointSet.from_csv(text)
    assert again.to_csv() == text
    assert np.array_equal(again.log_r, ps.log_r)
    assert np.array_equal(again.phi, ps.phi)


def test_csv_round_trip_origin():
    ps = PointSet([-math.inf, 2.0], [0.0, 3.0])
    again = PointSet.from_csv(ps.to_csv())
    assert again.log_r[0] == -math.inf


def test_csv_rejects_bad_header_and_rows():
    with pytest.raises(DomainError):
        PointSet.from_csv("r,phi\n1.0,0.0\n")
    with pytest.raises(DomainError):
        PointSet.from_csv(CSV_HEADER + "\n1.0\n")
