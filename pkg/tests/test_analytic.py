import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dtdd3d import analytic
from dtdd3d.analytic import (
    dl_to_ul_closed_form,
    expected_dl_to_dl,
    expected_dl_to_ul,
    expected_gain_2d,
    expected_site_gains,
    expected_ul_to_dl,
    expected_ul_to_ul,
    hex_lattice_tail,
    lattice_series,
    lattice_sum_oracle,
    mean_horizontal_gain,
    origin_lattice_oracle,
    ring_average_oracle,
)
from dtdd3d.antenna import BeamMode, beam_exponent, pattern_gain, site_gain_terms
from dtdd3d.channel import RadioConfig
from dtdd3d.geometry import SECTOR_AZIMUTHS, build_lattice, sample_interferer_offsets
from dtdd3d.specfun import Accuracy, omega

# Ring-averaged 50-ring lattice sums (direct sum plus tail), b = 1.75.
ORACLE = {0.1: 0.002838885708556383, 0.3: 0.1613035996249588, 0.5: 1.528601109080564}


@pytest.mark.parametrize("x", sorted(ORACLE))
def test_series_frozen_oracle(x):
    assert_allclose(lattice_series(x, 1.75).value, ORACLE[x], rtol=1e-12)


def test_series_bound_dominates_remainder():
    loose = lattice_series(0.5, 1.75, Accuracy(rel_tol=1e-7))
    tight = lattice_series(0.5, 1.75, Accuracy(rel_tol=1e-15))
    assert 0 < tight.value - loose.value <= loose.truncation_bound
    assert tight.terms_used > loose.terms_used


def test_series_errors():
    with pytest.raises(ValueError):
        lattice_series(0.6, 1.75)
    with pytest.raises(ValueError):
        lattice_series(0.3, 1.0)
    with pytest.raises(ArithmeticError):
        lattice_series(0.5, 1.75, Accuracy(rel_tol=1e-15, max_terms=16))


def test_series_is_angular_average_not_pointwise():
    # Pointwise sums differ from the average by a few 1e-4 at x = 0.5.
    x = 0.5
    vals = [lattice_sum_oracle(x * cmath.exp(1j * a), 3.5, rings=30) for a in (0.0, math.pi / 6)]
    avg = lattice_series(x, 1.75).value
    assert vals[0] != pytest.approx(vals[1], rel=1e-6)
    assert min(vals) < avg < max(vals)


def test_hex_tail_against_larger_direct_sum():
    p = 3.5
    lay = build_lattice(1.0, 120)
    r = np.abs(lay.positions[1:])
    beyond_30 = math.fsum(r[lay.ring[1:] > 30] ** -p) + hex_lattice_tail(p, 120)
    assert_allclose(hex_lattice_tail(p, 30), beyond_30, rtol=1e-9)


def test_closed_form_and_oracle():
    for b in (1.6, 2.0):
        c = dl_to_ul_closed_form(0.25, b, 0.4, delta=0.75)
        assert_allclose(c, origin_lattice_oracle(0.25, 2 * b, 0.4, delta=0.75), rtol=1e-9)
    # k = 1 removes the dependence on x.
    assert dl_to_ul_closed_form(0.1, 1.75, 1.0) == dl_to_ul_closed_form(0.5, 1.75, 1.0)


def test_oracle_weight_and_rings():
    z0 = 0.2 + 0.1j
    assert_allclose(lattice_sum_oracle(z0, 3.5, weight=lambda s: 2.0 * np.ones(s.shape)) - lattice_sum_oracle(z0, 3.5),
                    lattice_sum_oracle(z0, 3.5) - abs(z0) ** 3.5 * analytic._ring_average_tail(abs(z0), 1.75, 50, 1.0),
                    rtol=1e-12)
    with pytest.raises(ValueError):
        lattice_sum_oracle(z0, 3.5, rings=10)
    assert lattice_sum_oracle(0j, 3.5) == 0.0


# Circular mean of the zero-back-lobe pattern, from mpmath quadrature.
MEAN_H = {65: 0.186083474371371749, 14: 0.0413359113392629999, 8: 0.0236436334181211626}


@pytest.mark.parametrize("deg", sorted(MEAN_H))
def test_mean_horizontal_gain(deg):
    w = beam_exponent(math.radians(deg))
    assert_allclose(mean_horizontal_gain(w), MEAN_H[deg], rtol=1e-13)
    # The closed form counts the two-sided pattern: exactly twice the mean per sector.
    assert_allclose(expected_gain_2d(1.0, w), 3 * 2 * MEAN_H[deg], rtol=1e-13)
    assert_allclose(mean_horizontal_gain(w, 0.01), MEAN_H[deg] + 0.005)


def test_expected_gain_2d_scaling():
    w = beam_exponent(math.radians(14))
    assert_allclose(expected_gain_2d(np.array([0.5, 1.0]), w, eta=0.5), np.array([0.25, 0.5]) * expected_gain_2d(1.0, w))
    with pytest.raises(ValueError):
        expected_gain_2d(1.0, 0.5)


def test_expected_site_gains_beam2d_vs_sampling():
    cfg = RadioConfig()
    mode = BeamMode.beam_2d()
    pos = np.array([0.75 + 0j, 1.5 * cmath.exp(1j * 2.0)])
    g, _, se = expected_site_gains(0.2 + 0.1j, pos, mode, cfg, 0.75)
    assert se == 0.0
    rng = np.random.default_rng(0)
    off, r = sample_interferer_offsets(rng.random((200_000, 2, 3)), rng.random((200_000, 2, 3)), 0.75)
    served = pos[:, None] + r * np.exp(1j * (SECTOR_AZIMUTHS + off))
    direct = site_gain_terms(0.2 + 0.1j, pos, served, mode, cfg.l_b).sum(-1)
    assert_allclose(g, direct.mean(0), rtol=2e-2)


def test_expected_site_gains_beam3d_estimator():
    cfg = RadioConfig()
    mode = BeamMode.beam_3d()
    pos = np.array([0.75 + 0j, -0.75 + 0j])
    g, mean, se = expected_site_gains(0.1 + 0.2j, pos, mode, cfg, 0.75, weights=np.array([1.0, 2.0]), n_samples=4000)
    assert se > 0
    assert_allclose(mean, g[0] + 2 * g[1], rtol=1e-12)
    _, mean2, se2 = expected_site_gains(0.1 + 0.2j, pos, mode, cfg, 0.75, weights=np.array([1.0, 2.0]),
                                        n_samples=4000, seed=99)
    assert abs(mean - mean2) < 4 * math.hypot(se, se2)


def test_radial_clamped_reference():
    # (1/B) int_0^B x^p max(x, d)^-q dx, from mpmath.
    assert_allclose(analytic._radial_clamped(0.5, 1.4, 3.5, 1e-3), 5286.57090134158972, rtol=1e-12)
    assert_allclose(analytic._radial_clamped(0.5, 2.5, 3.5, 1e-3), 13.0006447682729549, rtol=1e-12)
    assert analytic._radial_clamped(0.5, 1.4, 3.5, 0.0) == math.inf
    assert_allclose(analytic._radial_clamped(1e-4, 1.4, 3.5, 1e-3), 1e-3**-3.5 * 1e-4**1.4 / 2.4)


def test_mobile_integrals_far_vs_adaptive():
    cfg = RadioConfig()
    pos = np.array([1.5 + 0.3j, -2.25 + 0j])
    far = analytic._mobile_integrals(0.1j, pos, cfg, 0.75, 1e-10)
    for s in range(2):
        for c in range(3):
            ref = analytic._mobile_integral_adaptive(0.1j, pos[s], c, cfg, 0.75, 1e-11)
            assert_allclose(far[s, c], ref, rtol=1e-9)


def test_mobile_integral_vs_sampling():
    cfg = RadioConfig()
    site = 0.75 + 0j
    val = analytic._mobile_integral_adaptive(0.2 + 0.15j, site, 1, cfg, 0.75, 1e-10)
    rng = np.random.default_rng(5)
    off, r = sample_interferer_offsets(rng.random(1_000_000), rng.random(1_000_000), 0.75)
    z = site + r * np.exp(1j * (SECTOR_AZIMUTHS[1] + off))
    f = r**1.4 * np.maximum(np.abs(z - (0.2 + 0.15j)), cfg.d_min) ** -3.5
    assert abs(f.mean() - val) < 4 * f.std() / 1000


def test_readings_coincide_for_static_dl_without_shadowing():
    cfg = RadioConfig(sigma_db=0.0)
    lay = build_lattice(0.75, 2)
    z0 = 0.25 * cmath.exp(1j * 1.1)
    for mode in (BeamMode.sector_only(), BeamMode.beam_2d()):
        a = expected_dl_to_dl(z0, cfg, mode, 1.0, layout=lay)
        b = expected_dl_to_dl(z0, cfg, mode, 1.0, layout=lay, reading="literal")
        assert_allclose(a.value, b.value, rtol=1e-12)
    with pytest.raises(ValueError):
        expected_dl_to_dl(z0, cfg, BeamMode.beam_2d(), 1.0, layout=lay, reading="other")


def test_dl_to_dl_infinite_lattice_close_to_large_layout():
    cfg = RadioConfig(sigma_db=0.0)
    z0 = 0.3 * 0.75 * cmath.exp(1j * math.pi / 3)
    mode = BeamMode.beam_2d()
    inf = expected_dl_to_dl(z0, cfg, mode, 0.5)
    big = expected_dl_to_dl(z0, cfg, mode, 0.5, layout=build_lattice(0.75, 60))
    # The gap is the lattice beyond ring 60 plus the far-field gain error on
    # rings 31-60 (the vertical pattern there is a few percent off its limit).
    g0 = site_gain_terms(z0, 0j, np.array([z0, 0, 0]), mode, cfg.l_b)[0]
    r = abs(z0)
    beyond = analytic._far_field_gain(mode, cfg, 0.75, 10, 0) * r**3.5 * analytic._ring_average_tail(r, 1.75, 60, 0.75)
    assert_allclose(inf.value - big.value, 0.5 * beyond / g0, rtol=0.1)
    assert abs(inf.value / big.value - 1) < 1e-3


def test_dl_to_ul_scaling():
    cfg = RadioConfig(sigma_db=0.0, k_fpc=1.0)
    mode = BeamMode.sector_only()
    a = expected_dl_to_ul(0.2, cfg, mode, 0.5)
    b = expected_dl_to_ul(0.4, cfg, mode, 0.5)
    assert_allclose(a.value, b.value, rtol=1e-14)
    c = expected_dl_to_ul(0.2, RadioConfig(sigma_db=0.0, k_fpc=1.0, p_dl_dbm=46.0), mode, 0.5)
    assert_allclose(c.value / a.value, 10**0.3, rtol=1e-12)
    assert expected_dl_to_ul(0.2, cfg, mode, 0.0).value == 0.0


def test_dl_to_ul_far_gain_matches_closed_form():
    # With a gain independent of distance the lattice part is 6 omega(b) delta^-2b exactly.
    cfg = RadioConfig(sigma_db=0.0)
    mode = BeamMode.beam_2d(theta_v3db=math.radians(179.0), fixed_downtilt=0.0)
    val = expected_dl_to_ul(0.3, cfg, mode, 1.0)
    lay = build_lattice(0.75, 30)
    g, _, _ = expected_site_gains(0j, lay.positions[1:], mode, cfg, 0.75)
    approx = g.mean() * dl_to_ul_closed_form(0.3, cfg.b, cfg.k_fpc, 0.75) * cfg.p_dl / cfg.p_star
    assert_allclose(val.value, approx, rtol=1e-3)


def test_ul_to_ul_readings_and_divergence():
    cfg = RadioConfig(sigma_db=0.0)
    cond = expected_ul_to_ul(0.3, cfg, 1.0)
    lit = expected_ul_to_ul(0.3, cfg, 1.0, reading="literal")
    # Literal adds the tagged user's own sector and subtracts one.
    assert lit.value > cond.value
    no_clamp = RadioConfig(sigma_db=0.0, d_min=0.0)
    assert expected_ul_to_ul(0.3, no_clamp, 1.0).value == math.inf
    # Above the divergence threshold the unclamped value is finite.
    ok = RadioConfig(sigma_db=0.0, d_min=0.0, k_fpc=0.9)
    assert math.isfinite(expected_ul_to_ul(0.3, ok, 1.0).value)


def test_ul_to_dl_zero_without_uplink():
    cfg = RadioConfig()
    assert expected_ul_to_dl(0.2 + 0.2j, cfg, BeamMode.beam_3d(), 0.0).value == 0.0


def test_shadow_factor_scales_random_terms():
    lay = build_lattice(0.75, 1)
    z0 = 0.2 * cmath.exp(1j * 1.0)
    a = expected_ul_to_dl(z0, RadioConfig(sigma_db=0.0), BeamMode.beam_2d(), 0.5, layout=lay)
    b = expected_ul_to_dl(z0, RadioConfig(sigma_db=6.0), BeamMode.beam_2d(), 0.5, layout=lay)
    assert_allclose(b.value / a.value, 6.74420299120098754, rtol=1e-12)


def test_omega_hook_changes_series():
    bad = lambda z, acc=None: 1.1 * omega(z)
    assert lattice_series(0.3, 1.75, omega_fn=bad).value == pytest.approx(1.1 * ORACLE[0.3], rel=1e-9)
    assert ring_average_oracle(0.3, 3.5) == pytest.approx(ORACLE[0.3], rel=1e-12)
