import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from dtdd3d.geometry import (
    SECTOR_AZIMUTHS,
    DegenerateGeometryError,
    MobilePlacement,
    Sector,
    Site,
    arg_between,
    build_lattice,
    hex_ring_index,
    radial_bound,
    sample_interferer_offsets,
    sample_interferer_position,
    sample_serving_user,
    sector_polygon,
)


@pytest.mark.parametrize("rings, count", [(0, 1), (1, 7), (2, 19), (5, 91), (30, 2791)])
def test_site_counts(rings, count):
    assert build_lattice(0.75, rings).n_sites == count == 1 + 3 * rings * (rings + 1)


def test_origin_first_and_ring_sorted():
    lay = build_lattice(0.75, 5)
    assert lay.positions[0] == 0
    assert lay.origin.is_origin
    assert np.all(np.diff(lay.ring) >= 0)
    # Ring i holds 6i sites at hexagonal distance i.
    for i in range(1, 6):
        assert np.sum(lay.ring == i) == 6 * i


def test_first_ring_at_delta():
    lay = build_lattice(0.75, 1)
    assert_allclose(np.abs(lay.positions[1:]), 0.75, rtol=1e-15)
    assert_allclose(np.sort(np.angle(lay.positions[1:]) % (2 * math.pi)), np.arange(6) * math.pi / 3, atol=1e-15)


def test_layout_objects():
    lay = build_lattice(1.0, 1)
    assert len(lay.sites) == 7 and len(lay.sectors) == 21
    assert isinstance(lay.sites[3], Site)
    assert_allclose(lay.sectors[2].azimuth, 5 * math.pi / 3)


def test_sector_azimuths():
    assert_allclose(SECTOR_AZIMUTHS, [math.pi / 3, math.pi, 5 * math.pi / 3])


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_ring_index_symmetry(m, n):
    r = hex_ring_index(m, n)
    assert r == hex_ring_index(-m, -n) == hex_ring_index(n, m)
    assert r == hex_ring_index(-n, m + n)  # 60 degree rotation


def test_build_lattice_errors():
    with pytest.raises(ValueError):
        build_lattice(0.0, 2)
    with pytest.raises(ValueError):
        build_lattice(1.0, -1)
    with pytest.raises(ValueError):
        build_lattice(1.0, 1.5)


def test_arg_between():
    assert arg_between(-1 + 0j, 0) == math.pi
    assert arg_between(complex(-1, -0.0), 0) == math.pi
    assert_allclose(arg_between(1j, 0), math.pi / 2)
    with pytest.raises(DegenerateGeometryError):
        arg_between(0.3 + 0.1j, 0.3 + 0.1j)


def test_radial_bound_envelope():
    # Peak at 2 delta / 3; the 65 degree envelope halves at +-32.5 degrees.
    assert_allclose(radial_bound(0.0, 0.75), 0.5)
    assert_allclose(radial_bound(math.radians(32.5), 0.75), 0.25, rtol=1e-12)
    assert_allclose(radial_bound(math.pi / 3, 1.0), (2 / 3) * 0.5 ** 4.069578298309280, rtol=1e-12)


def test_interferer_law_moments():
    rng = np.random.default_rng(3)
    off, r = sample_interferer_offsets(rng.random(400_000), rng.random(400_000), 0.75)
    assert np.all(np.abs(off) <= math.pi / 3)
    assert np.all(r <= radial_bound(off, 0.75) + 1e-15)
    # E[r] = (1/2) E[bound(offset)], with the mean bound from quadrature.
    phi = np.linspace(-math.pi / 3, math.pi / 3, 20001)
    mean_bound = np.trapezoid(radial_bound(phi, 0.75), phi) / (2 * math.pi / 3)
    assert_allclose(r.mean(), 0.5 * mean_bound, rtol=5e-3)


def test_sample_interferer_position():
    rng = np.random.default_rng(0)
    sector = Sector(Site(1, 0, 0.75 + 0j), 2)
    p = sample_interferer_position(sector, rng, 0.75)
    assert isinstance(p, MobilePlacement)
    assert abs(p.position - sector.site.position) == pytest.approx(p.r)
    assert abs(p.theta - sector.azimuth) <= math.pi / 3 + 1e-12


def test_sector_polygon_shape():
    poly = sector_polygon(0j, math.pi / 3, 0.75)
    assert np.min(np.abs(poly)) == pytest.approx(0.0, abs=1e-15)
    assert np.max(np.abs(poly)) == pytest.approx(0.5)
    far = poly[np.argmax(np.abs(poly))]
    assert cmath.phase(far) == pytest.approx(math.pi / 3)


def test_serving_area_law():
    rng = np.random.default_rng(1)
    sector = Sector(Site(0, 0, 0j), 1)
    pts = np.array([sample_serving_user(sector, rng, 0.75).position for _ in range(20000)])
    # Centroid of the sector hexagon: distance delta/3 along the azimuth.
    assert_allclose(pts.mean(), 0.25 * cmath.exp(1j * math.pi / 3), atol=4e-3)
    assert np.all(np.abs(pts) <= 0.5 + 1e-12)
    # Mean squared distance of a hexagon with circumradius R about a corner: R^2 + 5R^2/12.
    R = 0.25
    assert_allclose(np.mean(np.abs(pts) ** 2), R * R + 5 * R * R / 12, rtol=1e-2)


def test_serving_radial_law_and_errors():
    rng = np.random.default_rng(2)
    sector = Sector(Site(0, 0, 0j), 1)
    p = sample_serving_user(sector, rng, 0.75, law="radial")
    assert 0 < p.r <= 0.5
    with pytest.raises(ValueError):
        sample_serving_user(sector, rng, 0.75, law="disc")


def test_mobile_placement_x():
    p = MobilePlacement(Sector(Site(0, 0, 0j), 1), 0.3, math.pi / 3, 0.75)
    assert p.x == pytest.approx(0.4)
