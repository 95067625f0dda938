import numpy as np
import pytest

from domprod.exponents import (ALPHA, ANCHORS, LINEAR_FORMS, OMEGA, RECT_BOUND, SMALL_D,
                               UnsupportedZeta, huang_pan_exponents, interpolate_omega,
                               predict_exponent, small_d_block_exponents, solve_r)


def test_zeta_one_matches_published_bound():
    assert predict_exponent(1.0).exponent == pytest.approx(2.6598, abs=5e-4)


@pytest.mark.parametrize("r, omega, zeta", ANCHORS)
def test_anchor_hits(r, omega, zeta):
    p = predict_exponent(zeta)
    assert p.exponent == omega
    assert p.r == pytest.approx(r, abs=1e-12)


def test_anchor_exact_zeta2():
    assert predict_exponent(0.8697).exponent == 2.539392


def test_small_d_branch():
    p = predict_exponent(0.5)
    assert p.regime == "small-d"
    assert p.exponent == pytest.approx(0.697 * 0.5 + 1.896)
    assert p.unmodeled_o1


def test_small_d_floor_at_two():
    p = predict_exponent(0.1)
    assert p.exponent == 2.0


@pytest.mark.parametrize("zeta", [0.0, -1.0, 1.06, 2.0, float("nan")])
def test_out_of_range(zeta):
    with pytest.raises(UnsupportedZeta):
        predict_exponent(zeta)


def test_anchor_rows_strictly_increasing():
    arr = np.array(ANCHORS)
    assert np.all(np.diff(arr, axis=0) > 0)


@pytest.mark.parametrize("r, omega, zeta", ANCHORS[1:])
def test_anchor_identity_rounds_to_table(r, omega, zeta):
    assert round((omega + r) / 2 - 1, 4) == zeta


def test_first_anchor_identity_is_off_by_rounding():
    r, omega, zeta = ANCHORS[0]
    lhs = (omega + r) / 2 - 1
    assert lhs == pytest.approx(0.686432, abs=1e-12)
    assert round(lhs, 4) != zeta and abs(lhs - zeta) < 1e-4


def test_monotone_and_continuous_within_regimes():
    small = np.linspace(0.01, ANCHORS[0][2] - 1e-9, 400)
    big = np.linspace(ANCHORS[0][2], ANCHORS[-1][2], 2000)
    for grid in (small, big):
        e = np.array([predict_exponent(z).exponent for z in grid])
        assert np.all(np.diff(e) >= -1e-12)
        step = np.diff(grid).max()
        assert np.abs(np.diff(e)).max() <= 1.0 * step + 1e-12


def test_regime_boundary_gap_is_rounding_sized():
    z0 = ANCHORS[0][2]
    left = SMALL_D[0] * z0 + SMALL_D[1]
    assert 0 < left - predict_exponent(z0).exponent < 0.002


@pytest.mark.parametrize("row", range(len(LINEAR_FORMS)))
def test_linear_forms_track_interpolation(row):
    zmin, zmax, u, v = LINEAR_FORMS[row]
    lo = max(zmin, ANCHORS[0][2])
    hi = min(zmax, ANCHORS[-1][2])
    for z in np.linspace(lo, hi, 10):
        p = predict_exponent(z)
        assert abs(u * z + v - p.exponent) <= 0.002
        if zmin < z < zmax:
            assert (p.u, p.v) == (u, v)


@pytest.mark.parametrize("seg", range(4))
def test_closed_form_r_on_exact_knots(seg):
    ri, wi, _ = ANCHORS[seg]
    rj, wj, _ = ANCHORS[seg + 1]
    for r in np.linspace(ri, rj, 7):
        w = interpolate_omega(r, seg)
        zeta = (w + r) / 2 - 1
        assert solve_r(zeta, seg) == pytest.approx(r, abs=1e-12)


def test_closed_form_close_to_table_knots():
    for z in np.linspace(ANCHORS[0][2], ANCHORS[-1][2], 50):
        p = predict_exponent(z)
        assert abs(solve_r(z, p.segment) - p.r) < 2e-4


def test_rectangular_constants_derive_from_alpha():
    a, b = huang_pan_exponents(OMEGA, ALPHA)
    assert abs(a - RECT_BOUND[0]) < 2e-3
    assert abs(b - RECT_BOUND[1]) < 1e-3


def test_small_d_constants_derive_from_rect_bound():
    for zeta in (0.1, 0.4, 0.68):
        sigma, cost = small_d_block_exponents(zeta)
        assert cost == pytest.approx(SMALL_D[0] * zeta + SMALL_D[1], abs=1e-3)
        assert sigma == pytest.approx(0.896 - 0.303 * zeta, abs=2e-3)
