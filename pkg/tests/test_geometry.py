import math

import numpy as np
import pytest
from scipy import stats

from irs_fdma.errors import InvalidArgumentError, ScenarioError
from irs_fdma.geometry import (
    PathlossParams,
    Rect,
    Scenario,
    compute_large_scale_gains,
    cost_hata_pathloss_db,
    drop_users,
    large_scale_gain_linear,
    los_pathloss_linear,
    noise_variance_watts,
    p0_db,
)
from irs_fdma.numerics import RngStream

P0_FIXED = PathlossParams(p0_db=140.72)


def test_p0_reported_value():
    assert p0_db(1900, 15, 1.65) == pytest.approx(140.72, abs=0.01)


def test_p0_second_implementation():
    # standard COST-231 Hata form: A + B lg f - 13.82 lg hb - a(hm), a(hm) = (1.1 lg f - 0.7) hm - (1.56 lg f - 0.8)
    f, hb, hm = 1900.0, 15.0, 1.65
    a_hm = (1.1 * math.log10(f) - 0.7) * hm - (1.56 * math.log10(f) - 0.8)
    ref = 46.3 + 33.9 * math.log10(f) - 13.82 * math.log10(hb) - a_hm
    assert p0_db(f, hb, hm) == pytest.approx(ref, abs=1e-9)


def test_p0_grows_with_frequency():
    assert p0_db(3800, 15, 1.65) > p0_db(1900, 15, 1.65)


def test_p0_rejects_nonpositive():
    with pytest.raises(InvalidArgumentError):
        p0_db(0, 15, 1.65)


@pytest.mark.parametrize(
    "d_km, expected",
    [
        (0.53033, -131.07),  # BS to the edge-area center, far branch
        (0.05, -95.19),  # at d1
        (0.005, -81.20),  # below d0, flat
        (0.001, -81.20),
    ],
)
def test_cost_hata_branches(d_km, expected):
    assert cost_hata_pathloss_db(d_km, P0_FIXED) == pytest.approx(expected, abs=0.01)


def test_cost_hata_continuity_and_monotone():
    p = PathlossParams()
    eps = 1e-12
    for d in (p.d0_km, p.d1_km):
        assert abs(cost_hata_pathloss_db(d, p) - cost_hata_pathloss_db(d + eps, p)) < 1e-9
    # both branches evaluated by hand at d1 and d0
    p0 = p.intercept_db
    assert -p0 - 35 * math.log10(p.d1_km) == pytest.approx(-p0 - 15 * math.log10(p.d1_km) - 20 * math.log10(p.d1_km), abs=1e-9)
    d = np.geomspace(1e-4, 5, 2000)
    assert np.all(np.diff(cost_hata_pathloss_db(d, p)) <= 0)


def test_cost_hata_rejects_nonpositive_distance():
    with pytest.raises(InvalidArgumentError):
        cost_hata_pathloss_db(0.0, P0_FIXED)


def test_los_pathloss():
    assert los_pathloss_linear(1.0, -30, 2) == pytest.approx(1e-3)
    assert los_pathloss_linear(10.0, -30, 2) == pytest.approx(1e-5)
    g = los_pathloss_linear(math.hypot(375, 375), -30, 2)
    assert g == pytest.approx(3.556e-9, rel=1e-3)
    assert 10 * math.log10(g) == pytest.approx(-84.49, abs=0.01)
    d = np.linspace(1, 1000, 500)
    assert np.all(np.diff([los_pathloss_linear(x, -30, 2) for x in d]) < 0)
    with pytest.raises(InvalidArgumentError):
        los_pathloss_linear(0.5, -30, 2)


def test_los_as_printed_grows():
    assert los_pathloss_linear(10.0, -30, 2, form="as_printed") == pytest.approx(1e-1)


def test_large_scale_gain():
    assert large_scale_gain_linear(-100, 0) == pytest.approx(1e-10)
    assert large_scale_gain_linear(-100, 10) == pytest.approx(1e-9)


def test_shadowing_spread():
    params = PathlossParams()
    sc = Scenario()
    pos = np.tile([[300.0, 300.0]], (100_000, 1))
    g = compute_large_scale_gains(sc, pos, params, RngStream(3, 0))
    shadow = 10 * np.log10(g.sigma_f2) - cost_hata_pathloss_db(math.hypot(300, 300) / 1000, params)
    assert 7.9 <= np.std(shadow) <= 8.1
    # the two links get independent draws
    shadow_g = 10 * np.log10(g.sigma_g2) - cost_hata_pathloss_db(math.hypot(75, 75) / 1000, params)
    assert abs(np.corrcoef(shadow, shadow_g)[0, 1]) < 0.02


def test_noise_variance():
    assert noise_variance_watts(20e6, 290, 9) == pytest.approx(6.36e-13, rel=5e-3)
    assert 10 * math.log10(noise_variance_watts(20e6, 290, 9) / 1e-3) == pytest.approx(-91.97, abs=0.01)
    assert noise_variance_watts(20e6, 290, 0) == pytest.approx(8.00e-14, rel=1e-3)
    assert noise_variance_watts(40e6, 290, 9) == pytest.approx(2 * noise_variance_watts(20e6, 290, 9))


@pytest.mark.parametrize("k, n_far", [(1, 1), (2, 1), (3, 2), (20, 10)])
def test_drop_split(k, n_far):
    sc = Scenario()
    p = drop_users(sc, k, RngStream(5, k))
    assert p.shape == (k, 2)
    assert np.all(sc.edge_area.contains(p[:n_far]))
    assert np.all(sc.center_area.contains(p[n_far:]))
    assert np.all(np.hypot(*p.T) >= sc.min_bs_distance)
    assert np.all(np.hypot(*(p - sc.irs_position).T) >= 1.0)


def test_drop_uniformity_chi_square():
    sc = Scenario()
    rng = RngStream(11, 0)
    pts = np.vstack([drop_users(sc, 2, rng.substream(i)) for i in range(10_000)])
    for rect, sel in ((sc.edge_area, slice(0, None, 2)), (sc.center_area, slice(1, None, 2))):
        p = pts[sel]
        h, _, _ = np.histogram2d(p[:, 0], p[:, 1], bins=4, range=[[rect.x0, rect.x1], [rect.y0, rect.y1]])
        # the 10 m BS exclusion removes a sliver of the first center cell
        excluded = math.pi * sc.min_bs_distance**2 / 4 if rect is sc.center_area else 0.0
        cell = (rect.x1 - rect.x0) * (rect.y1 - rect.y0) / 16
        expected = np.full((4, 4), cell)
        expected[0, 0] -= excluded
        expected = expected / expected.sum() * h.sum()
        assert stats.chisquare(h.ravel(), expected.ravel()).pvalue > 0.01


def test_drop_unsatisfiable():
    sc = Scenario(min_bs_distance=1e6)
    with pytest.raises(ScenarioError):
        drop_users(sc, 2, RngStream(0, 0), max_attempts=5)


def test_scenario_invariants():
    with pytest.raises(InvalidArgumentError):
        Scenario(irs_position=(300.0, 300.0))
    with pytest.raises(InvalidArgumentError):
        Scenario(center_area=Rect(0, 0, 300, 300))
    assert Scenario().bs_irs_distance == pytest.approx(530.33, abs=0.01)


def test_pathloss_params_invariants():
    with pytest.raises(InvalidArgumentError):
        PathlossParams(d0_km=0.1, d1_km=0.05)
    with pytest.raises(InvalidArgumentError):
        PathlossParams(alpha=0)


def test_gains_positive_and_nearest_is_closest_without_shadowing():
    sc, params = Scenario(), PathlossParams(shadow_sigma_db=0.0)
    pos = drop_users(sc, 6, RngStream(2, 0))
    g = compute_large_scale_gains(sc, pos, params, RngStream(2, 1))
    d_irs = np.hypot(*(pos - sc.irs_position).T)
    assert np.argmax(g.sigma_g2) == np.argmin(d_irs)
    assert np.argmin(g.sigma_g2) == np.argmax(d_irs)
